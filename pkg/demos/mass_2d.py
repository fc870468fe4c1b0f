"""Conservative against standard Allen-Cahn from the same random 2D field.

The conservative form keeps the mean fixed to round-off. The standard form
lets the minority phase shrink, so the mass drifts.
"""
from eset.config import parse_config
from eset.runner import march_config, max_mass_drift

base = ("scheme = eset\nN = 2\npicard_iters = 2\neps = 0.02\ndim = 2\nbasis = neumann\nM = 64\n"
        "ic = random\nseed = 42\nramp = 1e-5x99\ntau = 1e-3\nT = 0.05\n")
for eq in ("conservative", "standard"):
    res = march_config(parse_config(base + f"equation = {eq}\n"))
    r0, r1 = res.records[0], res.records[-1]
    print(f"{eq:>12}: mass {r0.mass:.12f} -> {r1.mass:.12f} (max drift {max_mass_drift(res.records):.2e}), "
          f"energy {r0.energy:.3f} -> {r1.energy:.3f}")
