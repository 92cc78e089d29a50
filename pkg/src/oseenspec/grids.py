"""Staggered radial grid, quadrature, and the shared value types.

All operators act on L^2((0, r_max), dr) sampled at the cell midpoints
r_j = (j - 1/2) h, h = r_max/n.  The midpoint offset keeps every node
strictly away from the coordinate singularity at r = 0, and the inner
product is the plain midpoint rule h * sum a_j conj(b_j).

The second-derivative stencil realizes -d^2/dr^2 with an odd ghost value
across r = 0 (equivalent to a homogeneous Dirichlet condition there,
which every r^{k+1/2}-type field satisfies) and a Dirichlet cut at r_max.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun


@dataclass(frozen=True)
class RadialGrid:
    n: int
    r_max: float
    h: float
    nodes: np.ndarray = field(repr=False)

    def __eq__(self, other):
        if not isinstance(other, RadialGrid):
            return NotImplemented
        return self.n == other.n and self.r_max == other.r_max


def make_grid(n, r_max):
    """Build the midpoint grid; requires n >= 16 and r_max >= 10."""
    if int(n) != n or n < 16:
        raise ValueError(f"grid size n = {n} rejected; need an integer n >= 16")
    if not (math.isfinite(r_max) and r_max >= 10):
        raise ValueError(f"r_max = {r_max} rejected; need r_max >= 10")
    n = int(n)
    h = r_max / n
    nodes = (np.arange(1, n + 1) - 0.5) * h
    return RadialGrid(n=n, r_max=float(r_max), h=h, nodes=nodes)


def default_grid(mode=None, n=600):
    """Default resolution policy: r_max = 30, raised to 3 r_k + 10 when the
    mode's critical radius r_k = sigma^{-1}(nu_k) exists (nu_k in (0,1))."""
    r_max = 30.0
    if mode is not None:
        nu = mode.nu_k
        if nu is not None and 0.0 < nu < 1.0:
            r_max = max(30.0, 3.0 * specfun.sigma_inverse(nu) + 10.0)
    return make_grid(n, r_max)


@dataclass
class Field:
    """Grid samples of a radial function (real or complex)."""
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n,):
            raise ValueError(f"field has {v.shape} values on an n = {self.grid.n} grid")
        self.values = v

    @classmethod
    def from_callable(cls, grid, fun):
        return cls(grid, np.asarray(fun(grid.nodes)))

    def norm(self):
        return math.sqrt(self.grid.h) * float(np.linalg.norm(self.values))


def quadrature(a, b):
    """Midpoint inner product <a, b> = h sum_j a_j conj(b_j)."""
    if a.grid != b.grid:
        raise ValueError("quadrature called on fields from different grids")
    return complex(a.grid.h * np.vdot(b.values, a.values))


@dataclass(frozen=True)
class ModeSpec:
    """One angular/axial mode: rotation strength alpha, wavenumber k,
    spectral shift lam, and dilation angle theta."""
    alpha: float
    k: int
    lam: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k == 0:
            raise ValueError("k must be a nonzero integer")
        for name in ("alpha", "lam", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if abs(self.theta) >= math.pi / 8:
            raise ValueError("theta must satisfy |theta| < pi/8")

    @property
    def beta_k(self):
        return self.alpha * self.k / (8 * math.pi)

    @property
    def nu_k(self):
        """Normalized shift lam/beta_k; None for the self-adjoint case beta_k = 0."""
        if self.beta_k == 0.0:
            return None
        return self.lam / self.beta_k

    @property
    def r_k(self):
        """Critical radius sigma^{-1}(nu_k) when nu_k lies in (0, 1), else None."""
        nu = self.nu_k
        if nu is None or not (0.0 < nu < 1.0):
            return None
        return specfun.sigma_inverse(nu)


@dataclass
class OperatorMatrix:
    """Dense matrix representation of one assembled operator.

    kind is one of {"A_k", "K_k", "B_k", "H_full", "L1_model", "H_deformed",
    "K_truncated", "D2"}; the first three and the last two are real, the
    rest complex symmetric (equal to their transpose, not their adjoint).
    """
    kind: str
    grid: RadialGrid
    mode: ModeSpec | None
    data: np.ndarray

    @property
    def n(self):
        return self.grid.n


def second_derivative_stencil(grid):
    """-d^2/dr^2 as a dense (n, n) matrix: (-1, 2, -1)/h^2 with an odd
    ghost across r = 0 (first diagonal entry 3/h^2) and Dirichlet at r_max."""
    n, h = grid.n, grid.h
    m = np.zeros((n, n))
    idx = np.arange(n)
    m[idx, idx] = 2.0 / h ** 2
    m[idx[:-1], idx[:-1] + 1] = -1.0 / h ** 2
    m[idx[1:], idx[1:] - 1] = -1.0 / h ** 2
    m[0, 0] = 3.0 / h ** 2
    return OperatorMatrix(kind="D2", grid=grid, mode=None, data=m)
