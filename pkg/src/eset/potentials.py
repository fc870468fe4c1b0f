"""Double-well potentials, the stabilized nonlinearity and the max-principle cut-off."""
from dataclasses import dataclass

import numpy as np

POTENTIAL_KINDS = ("standard", "truncated", "truncated_M1")


@dataclass(frozen=True)
class PotentialSpec:
    """Bulk potential F with derivative f = F'.

    ``truncated`` continues F quadratically outside [-M_cut, M_cut] so that
    f' is globally bounded by ``L = 3 M_cut**2 - 1``; ``truncated_M1`` is the
    M_cut = 1 member of that family.  ``S`` is the linear stabilization used by
    the semi-implicit split f_hat(u) = f(u) - S u.
    """

    kind: str = "standard"
    M_cut: float = 1.0
    S: float = 0.0
    cutoff_enabled: bool = False

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "truncated" and self.M_cut < 1:
            raise ValueError("truncation level M_cut must be >= 1")
        if self.kind == "truncated_M1":
            object.__setattr__(self, "M_cut", 1.0)
        if self.S < 0:
            raise ValueError("stabilization S must be >= 0")

    @property
    def truncated(self):
        return self.kind != "standard"

    @property
    def L(self):
        """Global bound of |f'|; infinite for the untruncated quartic."""
        if not self.truncated:
            return np.inf
        return 3.0 * self.M_cut**2 - 1.0

    @property
    def L2(self):
        """Global bound of |f''|."""
        if not self.truncated:
            return np.inf
        return 6.0 * self.M_cut


def F_eval(u, spec):
    u = np.asarray(u, dtype=float)
    quartic = 0.25 * (1.0 - u * u) ** 2
    if not spec.truncated:
        return quartic
    m = spec.M_cut
    quad = 0.5 * (3 * m * m - 1) * u * u + 0.25 * (3 * m**4 + 1)
    return np.where(u > m, quad - 2 * m**3 * u, np.where(u < -m, quad + 2 * m**3 * u, quartic))


def f_eval(u, spec):
    u = np.asarray(u, dtype=float)
    cubic = u * u * u - u
    if not spec.truncated:
        return cubic
    m = spec.M_cut
    lin = (3 * m * m - 1) * u
    return np.where(u > m, lin - 2 * m**3, np.where(u < -m, lin + 2 * m**3, cubic))


def fprime_eval(u, spec):
    u = np.asarray(u, dtype=float)
    inner = 3.0 * u * u - 1.0
    if not spec.truncated:
        return inner
    m = spec.M_cut
    return np.where(np.abs(u) > m, 3 * m * m - 1.0, inner)


def fhat_eval(u, spec):
    return f_eval(u, spec) - spec.S * np.asarray(u, dtype=float)


def cutoff(values):
    """Clamp nodal values to [-1, 1]."""
    return np.clip(values, -1.0, 1.0)
