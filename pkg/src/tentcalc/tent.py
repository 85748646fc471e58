"""Upper-half-space fields, cone and Carleson functionals, change of angle.

A field lives on grid cells x ladder nodes, F(y_i, t_j), and the measure
element at a node is w(y) h^dim ln(rho) (the dt/t weight of the geometric
ladder).  The aperture-alpha cone functional is

    A_w^alpha F(x)^2 = sum_{j, y : d(x,y) < alpha t_j} |F(y,t_j)|^2
                         w(y) h^dim ln(rho) / w(B(y, t_j)),

with the aperture-independent normalizing measure w(B(y,t_j)).  Cone
membership and the normalizing ball use the same strict comparison
d < t (1 + 1e-9), which makes the p = 2 Fubini identity

    ||A_w F||^2_{L^2(w)} = sum_{j,y} |F(y,t_j)|^2 w(y) h^dim ln(rho)

hold termwise: summing w(x) h^dim over the cone slice at (y,t_j)
reproduces w(B(y,t_j)) exactly, so the normalizers cancel.

The Carleson functionals run over the same ball family as the maximal
operator (all centers, dyadic radii up to 1/2), with the t-range
0 < t < r_B realized as ladder nodes strictly below r_B:

    C_{w,p0}F(x) = sup_{B contains x} ( (1/w(B)) sum_{x' in B}
                     (truncated cone at x')^{p0} w(x') h^dim )^{1/p0},
    C_w F(x)     = sup_{B contains x} ( (1/w(B)) sum_{t_j < r_B, y in B}
                     |F(y,t_j)|^2 w(y) h^dim ln(rho) )^{1/2}.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .mesh import Grid, WeightModel, lp_norm
from .semigroup import TimeLadder

__all__ = [
    "HalfSpaceField",
    "cone_all",
    "cone_functional",
    "carleson_p_all",
    "carleson_p",
    "carleson_box_all",
    "carleson_box",
    "fubini_norm_sq",
    "AngleReport",
    "change_of_angle_report",
]

CONE_TIE_SLACK = 1e-9


@dataclass(frozen=True)
class HalfSpaceField:
    """F(y_i, t_j) on grid x ladder, with the weight of the half-space
    measure; values indexed (time, cell)."""

    grid: Grid
    ladder: TimeLadder
    weight: WeightModel
    values: NDArray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, float)
        expected = (self.ladder.count, self.grid.n_cells)
        if v.shape != expected:
            raise ValueError(f"field shape {v.shape}, expected {expected}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def weight_values(self) -> NDArray:
        return self.weight.sample(self.grid)

    def node_measures(self) -> NDArray:
        """w(y) h^dim ln(rho) per cell, shared by every ladder node."""
        return self.weight_values * self.grid.cell_volume * self.ladder.node_weight

    def to_csv(self, path: str):
        """Columns cell_index, t_index, value, row-major over nodes."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cell_index", "t_index", "value"])
            for j in range(self.ladder.count):
                for i in range(self.grid.n_cells):
                    writer.writerow([i, j, repr(float(self.values[j, i]))])


def _cone_mask(grid: Grid, radius: float) -> NDArray:
    """Strict-comparison ball mask shared by cone membership and the
    cone's normalizing measure."""
    return grid.distance_matrix < radius * (1.0 + CONE_TIE_SLACK)


def _cone_layers(fld: HalfSpaceField, alpha: float) -> NDArray:
    """(J, M) array: layer j at x is the (y-sum of the) cone integrand of
    node t_j, so the cone functional squared is the j-sum."""
    grid = fld.grid
    whn = fld.weight_values * grid.cell_volume
    lnrho = fld.ladder.node_weight
    layers = np.empty_like(fld.values)
    for j, t in enumerate(fld.ladder.nodes):
        norm_mask = _cone_mask(grid, t)
        wball = norm_mask @ whn
        payload = fld.values[j] ** 2 * whn * lnrho / wball
        if alpha == 1.0:
            layers[j] = norm_mask @ payload
        else:
            layers[j] = _cone_mask(grid, alpha * t) @ payload
    return layers


def cone_all(fld: HalfSpaceField, alpha: float = 1.0) -> NDArray:
    """A_w^alpha F at every cell."""
    if alpha <= 0:
        raise ValueError(f"aperture must be positive, got {alpha}")
    return np.sqrt(_cone_layers(fld, alpha).sum(axis=0))


def cone_functional(fld: HalfSpaceField, alpha: float, x: int) -> float:
    return float(cone_all(fld, alpha)[x])


def fubini_norm_sq(fld: HalfSpaceField) -> float:
    """sum |F|^2 w h^dim ln(rho); equals ||A_w F||^2_{L^2(w)} exactly."""
    return float(np.sum(fld.values**2 * fld.node_measures()[None, :]))


def _truncation_index(ladder: TimeLadder, r: float) -> int:
    """Number of ladder nodes with t_j strictly below r."""
    return int(np.sum(ladder.nodes < r * (1.0 - CONE_TIE_SLACK)))


def carleson_p_all(fld: HalfSpaceField, p0: float) -> NDArray:
    """C_{w,p0} F at every cell over the mesh ball family."""
    if p0 <= 0:
        raise ValueError(f"carleson_p requires p0 > 0, got {p0}")
    grid = fld.grid
    whn = fld.weight_values * grid.cell_volume
    cum = np.cumsum(_cone_layers(fld, 1.0), axis=0)
    out = np.zeros(grid.n_cells)
    for r in grid.dyadic_radii(0.5):
        j_cut = _truncation_index(fld.ladder, r)
        if j_cut == 0:
            continue
        trunc_sq = cum[j_cut - 1]
        maskb = grid.ball_mask(r)
        wb = maskb @ whn
        avg = (maskb @ (trunc_sq ** (p0 / 2) * whn)) / wb
        vals = avg ** (1.0 / p0)
        np.maximum(out, np.where(maskb, vals[:, None], 0.0).max(axis=0), out=out)
    return out


def carleson_p(fld: HalfSpaceField, p0: float, x: int) -> float:
    return float(carleson_p_all(fld, p0)[x])


def carleson_box_all(fld: HalfSpaceField) -> NDArray:
    """C_w F at every cell: box averages without the cone."""
    grid = fld.grid
    node_mass = fld.values**2 * fld.node_measures()[None, :]
    cum = np.cumsum(node_mass, axis=0)
    whn = fld.weight_values * grid.cell_volume
    out = np.zeros(grid.n_cells)
    for r in grid.dyadic_radii(0.5):
        j_cut = _truncation_index(fld.ladder, r)
        if j_cut == 0:
            continue
        per_cell = cum[j_cut - 1]
        maskb = grid.ball_mask(r)
        wb = maskb @ whn
        vals = np.sqrt((maskb @ per_cell) / wb)
        np.maximum(out, np.where(maskb, vals[:, None], 0.0).max(axis=0), out=out)
    return out


def carleson_box(fld: HalfSpaceField, x: int) -> float:
    return float(carleson_box_all(fld)[x])


@dataclass(frozen=True)
class AngleReport:
    """Measured aperture-growth ratio with the predicted power bounds."""

    alpha: float
    beta: float
    p: float
    norm_alpha: float
    norm_beta: float
    ratio: float | None
    predicted_increase: float | None
    predicted_decrease: float | None


def change_of_angle_report(
    fld: HalfSpaceField,
    alpha: float,
    beta: float,
    p: float,
    v: WeightModel,
    w: WeightModel,
    r: float | None = None,
    r_tilde: float | None = None,
    s: float | None = None,
    s_tilde: float | None = None,
) -> AngleReport:
    """Compare ||A^beta F|| / ||A^alpha F|| in L^p(v dw) with the class
    predictions (beta/alpha)^{n r_tilde r / p} (given r, r_tilde) and
    (alpha/beta)^{n / (s s_tilde p)} (given s, s_tilde)."""
    if not 0 < alpha <= beta:
        raise ValueError(f"need 0 < alpha <= beta, got ({alpha}, {beta})")
    grid = fld.grid
    norm_a = lp_norm(cone_all(fld, alpha), p, v, w, grid)
    norm_b = lp_norm(cone_all(fld, beta), p, v, w, grid)
    ratio = norm_b / norm_a if norm_a > 0 else None

    n = grid.dim
    inc = None
    if r is not None and r_tilde is not None:
        inc = (beta / alpha) ** (n * r_tilde * r / p)
    dec = None
    if s is not None and s_tilde is not None:
        dec = (alpha / beta) ** (n / (s * s_tilde * p))
    return AngleReport(
        alpha=alpha,
        beta=beta,
        p=p,
        norm_alpha=norm_a,
        norm_beta=norm_b,
        ratio=ratio,
        predicted_increase=inc,
        predicted_decrease=dec,
    )
