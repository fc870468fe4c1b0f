"""Time-step convergence of several schemes on the moving tanh front.

Prints the final-time L2 error per step and the regression order. Nodal
superconvergence shows up as order 2N for the Picard-iterated schemes.
"""
from eset.convergence import ManufacturedProblem, convergence_study, in_slab_orders

problem = ManufacturedProblem(eps=0.05, M=350, T=0.32)
# ETDRK4 stalls on a floor that grows with M, so the baselines run at M=255
baseline_problem = ManufacturedProblem(eps=0.05, M=255, T=0.32)
taus = [0.01, 0.005, 0.0025, 0.00125]

runs = [
    (problem.spec(N=3, scheme="semi_implicit"), "eset"),
    (problem.spec(N=2, scheme="picard", picard_iters=2), "eset"),
    (problem.spec(N=3, scheme="picard", picard_iters=3), "eset"),
    (None, "imex4"),
    (None, "etdrk4"),
]
for spec, integrator in runs:
    table = convergence_study(problem if spec else baseline_problem, taus, spec, integrator=integrator, workers=4)
    errs = "  ".join(f"{e:.2e}" for e in table.errors)
    print(f"{table.label:>7}: {errs}   order {table.slope():.2f}")

eset33 = convergence_study(problem, [0.02, 0.01, 0.005, 0.0025],
                           problem.spec(N=3, scheme="picard", picard_iters=3), in_slab=True, workers=4)
print("ESET33 in-slab local orders:", " ".join(f"{o:.2f}" for o in in_slab_orders(eset33)))
