"""Grids, sampled fields, and finite-difference calculus.

Everything else in the package is built on the pieces here: uniform 1-D
grids (half-line, symmetric whole-line, periodic), vector/scalar sample
fields, second-order difference operators, and one-sided boundary
stencils generated with the Fornberg recursion.

The interior second-difference is deliberately evaluated as
``(left + right) - 2*center`` so that reflecting a field through s = 0
commutes with the operator *bitwise* (negation commutes exactly with
IEEE rounding).  The reflection-symmetry invariants downstream depend
on this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVector, GridMismatch, GridTooSmall, OrderTooHigh

#: Unit vector normal to the wall; the boundary value of the tangent field.
E3 = np.array([0.0, 0.0, 1.0])

#: Highest boundary-trace derivative order supported by the stencil table.
K_MAX = 4

HALF = "half"
WHOLE = "whole"
PERIODIC = "periodic"


@dataclass(frozen=True)
class Grid:
    """A uniform 1-D grid in the arclength variable s.

    kind:
        ``half``      [0, L], node at s = 0.
        ``whole``     [-L, L], symmetric, odd node count, node at s = 0.
        ``periodic``  [0, L) with wrap-around, spacing L/n.
    """

    kind: str
    s_min: float
    s_max: float
    n: int

    def __post_init__(self):
        if self.kind not in (HALF, WHOLE, PERIODIC):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.n < 8:
            raise GridTooSmall(f"need at least 8 nodes, got {self.n}")
        if not self.s_max > self.s_min:
            raise ValueError("need s_max > s_min")
        if self.kind == HALF and self.s_min != 0.0:
            raise ValueError("half-line grids start at s = 0")
        if self.kind == WHOLE:
            if self.s_min != -self.s_max:
                raise ValueError("whole-line grids must be symmetric about 0")
            if self.n % 2 == 0:
                raise ValueError("whole-line grids need an odd node count")

    @property
    def h(self) -> float:
        if self.kind == PERIODIC:
            return (self.s_max - self.s_min) / self.n
        return (self.s_max - self.s_min) / (self.n - 1)

    @property
    def center(self) -> int:
        """Index of the node at s = 0 (half/whole grids)."""
        if self.kind == HALF:
            return 0
        if self.kind == WHOLE:
            return (self.n - 1) // 2
        raise GridMismatch("periodic grid has no distinguished s = 0 node")

    def nodes(self) -> np.ndarray:
        return self.s_min + self.h * np.arange(self.n)

    def refined(self) -> "Grid":
        """Grid with spacing h/2 whose nodes nest into this one."""
        if self.kind == PERIODIC:
            return Grid(PERIODIC, self.s_min, self.s_max, 2 * self.n)
        return Grid(self.kind, self.s_min, self.s_max, 2 * self.n - 1)

    @classmethod
    def half_line(cls, length: float, n: int) -> "Grid":
        return cls(HALF, 0.0, float(length), n)

    @classmethod
    def whole_line(cls, length: float, n: int) -> "Grid":
        return cls(WHOLE, -float(length), float(length), n)

    @classmethod
    def periodic(cls, length: float, n: int) -> "Grid":
        return cls(PERIODIC, 0.0, float(length), n)


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Right-handed cross product, elementwise over trailing axis 3."""
    return np.cross(a, b)


class _Field:
    """Common checks for sampled fields; subclasses fix the value shape."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        values = np.asarray(values)
        if values.shape != self._expected_shape(grid):
            raise GridMismatch(
                f"values shape {values.shape} does not match grid (n={grid.n})"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values

    def __len__(self) -> int:
        return self.grid.n


class VectorField(_Field):
    """Samples of an R^3-valued map on a grid, shape (n, 3)."""

    @staticmethod
    def _expected_shape(grid: Grid):
        return (grid.n, 3)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.values * self.values, axis=1))

    def unit_deviation(self) -> float:
        """max_i | |v_i| - 1 |."""
        return float(np.max(np.abs(self.norms() - 1.0)))


class ScalarField(_Field):
    """Samples of a real-valued map on a grid, shape (n,)."""

    @staticmethod
    def _expected_shape(grid: Grid):
        return (grid.n,)


def deriv_samples(values: np.ndarray, grid: Grid, order: int) -> np.ndarray:
    """Second-order finite difference of raw samples (any trailing shape).

    Interior: central stencils.  Non-periodic edges: one-sided stencils of
    matching formal order.  Periodic grids wrap.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    h = grid.h
    v = values
    if grid.kind == PERIODIC:
        up = np.roll(v, -1, axis=0)
        dn = np.roll(v, 1, axis=0)
        if order == 1:
            return (up - dn) / (2.0 * h)
        return ((dn + up) - 2.0 * v) / (h * h)
    if grid.n < 4:
        raise GridTooSmall("edge stencils need at least 4 nodes")
    out = np.empty_like(v)
    if order == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    else:
        out[1:-1] = ((v[:-2] + v[2:]) - 2.0 * v[1:-1]) / (h * h)
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return out


def deriv(field, order: int):
    """Finite-difference derivative of a field; returns the same field type."""
    return type(field)(field.grid, deriv_samples(field.values, field.grid, order))


def fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 on nodes x.

    Fornberg's recursion (Math. Comp. 51, 1988).  Returns w with
    sum_j w[j] f(x[j]) ~ f^(m)(x0).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < m + 1:
        raise GridTooSmall(f"{n} nodes cannot resolve derivative order {m}")
    w = np.zeros((m + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = (c4 * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w[m]


def one_sided_deriv_at_zero(
    field,
    k: int,
    side: str = "+",
    points: int | None = None,
    k_max: int = K_MAX,
) -> np.ndarray:
    """One-sided estimate of the k-th s-derivative trace at s = 0.

    Uses ``points`` stencil nodes on the requested side (default k + 2,
    formal accuracy 2).  ``side`` is "+" (s >= 0) or "-" (s <= 0); the
    latter needs a whole-line grid.  k = 0 returns the node value itself.
    """
    if k < 0 or k > k_max:
        raise OrderTooHigh(f"derivative order {k} exceeds k_max={k_max}")
    grid = field.grid
    i0 = grid.center
    if k == 0:
        return np.array(field.values[i0], copy=True)
    p = points if points is not None else k + 2
    if side == "+":
        offsets = np.arange(p)
        if i0 + p > grid.n:
            raise GridTooSmall(f"stencil of {p} nodes does not fit right of 0")
    elif side == "-":
        offsets = -np.arange(p)
        if i0 - (p - 1) < 0:
            raise GridTooSmall(f"stencil of {p} nodes does not fit left of 0")
    else:
        raise ValueError("side must be '+' or '-'")
    w = fd_weights(offsets * grid.h, 0.0, k)
    return w @ field.values[i0 + offsets]


def normalize_field(field: VectorField, min_norm: float = 0.5) -> VectorField:
    """Rescale every sample to the unit sphere.  Idempotent.

    Raises DegenerateVector if any sample norm falls below ``min_norm``
    (a guard against blowup; unit fields never get near it).
    """
    norms = field.norms()
    if np.any(norms < min_norm):
        raise DegenerateVector(
            f"sample norm {norms.min():.3g} below {min_norm}; refusing to rescale"
        )
    return VectorField(field.grid, field.values / norms[:, None])
