"""Energy behaviour of ESET31 at and beyond its step bound.

At the bound the modified energy never rises. Eight times past it the
random field is amplified instead of relaxed and the energy grows.
"""
import numpy as np

from eset import PotentialSpec, SchemeSpec, make_space, march
from eset.marching import MarchError

space = make_space("dirichlet", 128)
pot = PotentialSpec("truncated_M1")
spec = SchemeSpec(N=3, scheme="semi_implicit", eps=0.08, potential=pot)
bound = spec.semi_implicit_step_bound() * spec.eps / pot.L
u0 = space.random_field(42, -1.0, 1.0)

print(f"step bound tau* = {bound:.4g}")
for factor in (1, 8, 64):
    tau = factor * bound
    try:
        _, recs = march(u0, spec, space, [(tau, int(0.5 / tau))])
    except MarchError as exc:
        print(f"{factor:>3} x tau*: {exc}")
        continue
    rise = np.max(np.diff([r.modified_energy for r in recs]))
    print(f"{factor:>3} x tau*: final energy {recs[-1].energy:.6f}, largest modified-energy step {rise:+.2e}")
