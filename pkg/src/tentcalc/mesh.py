"""Periodic grid geometry, weights, discrete measures and maximal operators.

The domain is the unit torus [0,1)^dim (dim 1 or 2) split into N equal cells
per side, with cell centers offset by h/2 = 1/(2N) so that no center sits on
the origin.  Distances are periodic:

    d(x, y) = min over integer shifts of |x - y + k|,    d <= sqrt(dim)/2.

Balls are sets of cells selected by center distance only, which keeps the
membership relation exactly symmetric: x in B(y, r) iff y in B(x, r).  That
symmetry is what later makes the tent-space Fubini identities exact rather
than approximate.

Weighted measures and norms use the cell quadrature

    w(S) = sum_{cells in S} w(cell) h^dim,
    ||f||_{L^p(v dw)} = (sum |f|^p v w h^dim)^{1/p},

and the maximal operator takes the sup of p0-mean ball averages over the
dyadic ball family {all centers} x {h, 2h, 4h, ..., 1/2}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Grid",
    "WeightModel",
    "PowerWeight",
    "TabulatedWeight",
    "UNIT_WEIGHT",
    "CellSet",
    "measure",
    "lp_norm",
    "maximal",
]

# relative slack used everywhere a continuum radius meets the discrete grid;
# breaks exact ties deterministically (toward inclusion)
TIE_SLACK = 1e-9


class Grid:
    """Periodic cell-centered grid on the unit torus; immutable."""

    def __init__(self, dim: int, n_side: int):
        if dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {dim}")
        if n_side < 4:
            raise ValueError(f"need at least 4 cells per side, got {n_side}")
        self._dim = int(dim)
        self._n = int(n_side)
        self._distance_matrix: NDArray | None = None

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n_side(self) -> int:
        return self._n

    @property
    def h(self) -> float:
        return 1.0 / self._n

    @property
    def spacing(self) -> Fraction:
        return Fraction(1, self._n)

    @property
    def n_cells(self) -> int:
        return self._n ** self._dim

    @property
    def cell_volume(self) -> float:
        return self.h ** self._dim

    @property
    def centers(self) -> NDArray:
        """Cell centers, shape (n_cells, dim); flat index is row-major."""
        axis = (np.arange(self._n) + 0.5) / self._n
        if self._dim == 1:
            return axis[:, None]
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def multi_index(self, flat: int) -> tuple[int, ...]:
        if self._dim == 1:
            return (flat,)
        return divmod(flat, self._n)

    def flat_index(self, multi: tuple[int, ...]) -> int:
        if self._dim == 1:
            return multi[0] % self._n
        return (multi[0] % self._n) * self._n + (multi[1] % self._n)

    def shift_perm(self, axis: int, step: int) -> NDArray:
        """Permutation p with p[i] = flat index of the cell shifted by
        `step` cells along `axis` (periodic); used for stencil assembly."""
        idx = np.arange(self.n_cells)
        if self._dim == 1:
            return (idx + step) % self._n
        i0, i1 = np.divmod(idx, self._n)
        if axis == 0:
            i0 = (i0 + step) % self._n
        elif axis == 1:
            i1 = (i1 + step) % self._n
        else:
            raise ValueError(f"axis out of range: {axis}")
        return i0 * self._n + i1

    def periodic_distance(self, x: NDArray, y: NDArray) -> float:
        delta = np.abs(np.asarray(x, float) - np.asarray(y, float))
        delta = np.minimum(delta, 1.0 - delta)
        return float(np.sqrt(np.sum(delta**2)))

    @property
    def distance_matrix(self) -> NDArray:
        """Pairwise periodic distances between cell centers, (M, M)."""
        if self._distance_matrix is None:
            c = self.centers
            d2 = np.zeros((self.n_cells, self.n_cells))
            for d in range(self._dim):
                delta = np.abs(c[:, None, d] - c[None, :, d])
                delta = np.minimum(delta, 1.0 - delta)
                d2 += delta**2
            self._distance_matrix = np.sqrt(d2)
        return self._distance_matrix

    def ball_mask(self, radius: float, strict: bool = False) -> NDArray:
        """Boolean (M, M) matrix, mask[c, y] = y in B(center c, radius).

        Closed balls (d <= r) by default; strict=True uses d < r.  Both
        comparisons get the deterministic 1e-9 tie slack toward inclusion.
        """
        if radius <= 0:
            raise ValueError(f"ball radius must be positive, got {radius}")
        bound = radius * (1.0 + TIE_SLACK)
        if strict:
            return self.distance_matrix < bound
        return self.distance_matrix <= bound

    def ball(self, center: int, radius: float) -> "CellSet":
        row = self.distance_matrix[center]
        members = np.nonzero(row <= radius * (1.0 + TIE_SLACK))[0]
        return CellSet(self, tuple(int(i) for i in members))

    def dyadic_radii(self, cap: float = 0.5) -> list[float]:
        """The radii {h, 2h, 4h, ...} up to and including `cap`."""
        radii = []
        r = self.h
        while r <= cap * (1.0 + TIE_SLACK):
            radii.append(r)
            r *= 2.0
        return radii

    def __repr__(self) -> str:
        return f"Grid(dim={self._dim}, n_side={self._n})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid)
            and other._dim == self._dim
            and other._n == self._n
        )

    def __hash__(self):
        return hash((self._dim, self._n))


@dataclass(frozen=True)
class CellSet:
    """An immutable set of cell indices on a fixed grid."""

    grid: Grid
    indices: tuple[int, ...]

    def __post_init__(self):
        m = self.grid.n_cells
        if any(not (0 <= i < m) for i in self.indices):
            raise ValueError("cell index out of range")

    @classmethod
    def whole(cls, grid: Grid) -> "CellSet":
        return cls(grid, tuple(range(grid.n_cells)))

    @classmethod
    def single(cls, grid: Grid, index: int) -> "CellSet":
        return cls(grid, (index,))

    @classmethod
    def empty(cls, grid: Grid) -> "CellSet":
        return cls(grid, ())

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index: int) -> bool:
        return index in set(self.indices)

    def as_array(self) -> NDArray:
        return np.asarray(self.indices, dtype=int)


class WeightModel:
    """A strictly positive weight sampled at cell centers."""

    def sample(self, grid: Grid) -> NDArray:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerWeight(WeightModel):
    """w(x) = d(x, origin)^alpha with the periodic distance to the origin.

    Centers are offset by h/2, so the value is finite and positive for any
    alpha.  Weights used to define measures and operators should keep
    alpha in (-dim, dim) (enforced at config ingestion); the class
    estimators deliberately probe values outside that interval.
    """

    alpha: float

    def sample(self, grid: Grid) -> NDArray:
        c = grid.centers
        delta = np.minimum(c, 1.0 - c)
        d = np.sqrt(np.sum(delta**2, axis=1))
        return d ** float(self.alpha)

    def power(self, exponent: float) -> "PowerWeight":
        """w^delta is again a power weight."""
        return PowerWeight(float(self.alpha) * float(exponent))


@dataclass(frozen=True)
class TabulatedWeight(WeightModel):
    """Per-cell positive samples, tied to a grid size."""

    values: tuple[float, ...]

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("tabulated weight values must be finite and positive")

    def sample(self, grid: Grid) -> NDArray:
        v = np.asarray(self.values, float)
        if v.size != grid.n_cells:
            raise ValueError(
                f"tabulated weight has {v.size} values, grid has {grid.n_cells} cells"
            )
        return v.copy()


UNIT_WEIGHT = PowerWeight(0.0)


def measure(w: WeightModel, s: CellSet) -> float:
    """w(S) = sum over cells of w * h^dim (0 for the empty set)."""
    if len(s) == 0:
        return 0.0
    values = w.sample(s.grid)
    return float(np.sum(values[s.as_array()]) * s.grid.cell_volume)


def lp_norm(
    f: NDArray,
    p: float,
    v: WeightModel,
    w: WeightModel,
    grid: Grid,
) -> float:
    """(sum |f|^p v w h^dim)^{1/p}; rejects p <= 0."""
    if p <= 0:
        raise ValueError(f"lp_norm requires p > 0, got {p}")
    f = np.asarray(f, float)
    if f.shape != (grid.n_cells,):
        raise ValueError(f"expected {grid.n_cells} cell values, got shape {f.shape}")
    dens = v.sample(grid) * w.sample(grid) * grid.cell_volume
    return float(np.sum(np.abs(f) ** p * dens) ** (1.0 / p))


def maximal(
    f: NDArray,
    grid: Grid,
    p0: float = 1.0,
    base: WeightModel | None = None,
) -> NDArray:
    """Discrete maximal operator over the dyadic ball family.

    At each cell x the value is sup over balls containing x of the p0-mean
    (avg_B |f|^{p0} d(base))^{1/p0}; base None means Lebesgue measure,
    otherwise the weighted measure of the supplied WeightModel.
    """
    if p0 <= 0:
        raise ValueError(f"maximal requires p0 > 0, got {p0}")
    f = np.asarray(f, float)
    mu = np.full(grid.n_cells, grid.cell_volume)
    if base is not None:
        mu = base.sample(grid) * grid.cell_volume
    g = np.abs(f) ** p0 * mu
    out = np.zeros(grid.n_cells)
    for r in grid.dyadic_radii(0.5):
        mask = grid.ball_mask(r)
        avg = (mask @ g) / (mask @ mu)
        # scatter each ball's average to its members; mask is symmetric
        contrib = np.where(mask, avg[:, None], 0.0).max(axis=0)
        np.maximum(out, contrib, out=out)
    return out ** (1.0 / p0)
