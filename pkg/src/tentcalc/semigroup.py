"""Heat and Poisson semigroup families on a spectral operator.

All evaluations are functional calculus on the w-orthonormal spectrum:

    heat:     (t^2 L_w)^m e^{-t^2 L_w} f = sum_k (t^2 lam_k)^m e^{-t^2 lam_k} c_k phi_k,
    Poisson:  (t sqrt(L_w))^{2K} e^{-t sqrt(L_w)} f, with (t sqrt(L_w))^{2K}
              rewritten as (t^2 L_w)^K; half-integer powers are not offered.

Time derivatives are computed analytically on the spectrum,

    t d/dt [(t^2 lam)^m e^{-t^2 lam}] = (2m (t^2 lam)^m - 2 (t^2 lam)^{m+1}) e^{-t^2 lam},
    t d/dt [(t s)^{2K} e^{-t s}]      = (2K (t s)^{2K} - (t s)^{2K+1}) e^{-t s},  s = sqrt(lam),

so the m = 0 heat identity t d_t e^{-t^2 L_w} f = -2 (t^2 L_w) e^{-t^2 L_w} f
holds exactly at the coefficient level; spatial gradients use centered
periodic differences on the evaluated field.

The Poisson semigroup also has a quadrature path through the subordination
formula

    e^{-t sqrt(L_w)} f = (1/sqrt(pi)) int_0^inf e^{-u} u^{1/2} e^{-(t^2/4u) L_w} f du/u,

integrated in v = log u (the du/u measure becomes dv) over a symmetric
interval that grows until the result stops moving at tolerance 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
from numpy.typing import NDArray

from .mesh import Grid
from .operator import SpectralOperator

__all__ = [
    "TimeLadder",
    "SemigroupRequest",
    "GradField",
    "QuadratureError",
    "ORDER_CAP",
    "heat_eval",
    "grad_eval",
    "poisson_eval",
    "poisson_grad_eval",
    "poisson_scalar",
    "subordination_factors",
    "centered_gradient",
    "OffDiagReport",
    "offdiag_probe",
]

ORDER_CAP = 4
SUBORDINATION_TOL = 1e-10

_FAMILIES = ("heat_power", "heat_grad", "poisson_power", "poisson_grad")


@dataclass(frozen=True)
class TimeLadder:
    """Geometric time nodes t_j = t_min * ratio^j with dt/t weight ln(ratio)."""

    t_min: float
    t_max: float
    ratio: float

    def __post_init__(self):
        if not (0 < self.t_min <= self.t_max):
            raise ValueError(f"need 0 < t_min <= t_max, got ({self.t_min}, {self.t_max})")
        if not self.ratio > 1:
            raise ValueError(f"ratio must exceed 1, got {self.ratio}")

    @classmethod
    def geometric(cls, t_min: float, t_max: float, ratio: float) -> "TimeLadder":
        return cls(float(t_min), float(t_max), float(ratio))

    @classmethod
    def default_for(cls, grid: Grid, ratio: float = 2 ** (1 / 16)) -> "TimeLadder":
        return cls(grid.h / 4, 1.0, float(ratio))

    @property
    def count(self) -> int:
        span = math.log(self.t_max / self.t_min) / math.log(self.ratio)
        return int(math.floor(span + 1e-12)) + 1

    @property
    def nodes(self) -> NDArray:
        return self.t_min * self.ratio ** np.arange(self.count)

    @property
    def node_weight(self) -> float:
        """Quadrature weight of each node for integrals against dt/t."""
        return math.log(self.ratio)


@dataclass(frozen=True)
class SemigroupRequest:
    """One semigroup evaluation: which family, which power, which time."""

    family: str
    order: int
    t: float

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown semigroup family {self.family!r}")
        if not (0 <= self.order <= ORDER_CAP):
            raise ValueError(f"order must lie in [0, {ORDER_CAP}], got {self.order}")
        if self.t < 0:
            raise ValueError(f"time must be nonnegative, got {self.t}")


def _check_order(order: int):
    if not (0 <= int(order) == order and order <= ORDER_CAP):
        raise ValueError(f"power must be an integer in [0, {ORDER_CAP}], got {order}")


def heat_factor(lam: NDArray, m: int, t: float) -> NDArray:
    """(t^2 lam)^m e^{-t^2 lam} (0^0 = 1, so m = 0 fixes the kernel mode)."""
    x = (t * t) * np.asarray(lam, float)
    return x**m * np.exp(-x)


def heat_time_factor(lam: NDArray, m: int, t: float) -> NDArray:
    x = (t * t) * np.asarray(lam, float)
    return (2 * m * x**m - 2 * x ** (m + 1)) * np.exp(-x)


def poisson_factor(lam: NDArray, big_k: int, t: float) -> NDArray:
    """(t sqrt(lam))^{2K} e^{-t sqrt(lam)} via (t^2 lam)^K."""
    lam = np.asarray(lam, float)
    y = t * np.sqrt(lam)
    return ((t * t) * lam) ** big_k * np.exp(-y)


def poisson_time_factor(lam: NDArray, big_k: int, t: float) -> NDArray:
    lam = np.asarray(lam, float)
    y = t * np.sqrt(lam)
    y2k = ((t * t) * lam) ** big_k
    return (2 * big_k * y2k - y2k * y) * np.exp(-y)


def heat_eval(op: SpectralOperator, m: int, t: float, f: NDArray) -> NDArray:
    _check_order(m)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    coeffs = op.project(np.asarray(f, float))
    return op.reconstruct(heat_factor(op.eigenvalues, m, t) * coeffs)


@dataclass(frozen=True)
class GradField:
    """t grad_{y,t} of a semigroup power: spatial part (dim, cells) already
    scaled by t, time part t d_t as a scalar field."""

    spatial: NDArray = field(repr=False)
    time: NDArray = field(repr=False)

    def norm_sq(self) -> NDArray:
        return np.sum(self.spatial**2, axis=0) + self.time**2

    def norm(self) -> NDArray:
        return np.sqrt(self.norm_sq())


def centered_gradient(grid: Grid, u: NDArray) -> NDArray:
    """Centered periodic differences, one row per axis."""
    u = np.asarray(u, float)
    out = np.empty((grid.dim, grid.n_cells))
    for axis in range(grid.dim):
        fwd = grid.shift_perm(axis, 1)
        bwd = grid.shift_perm(axis, -1)
        out[axis] = (u[fwd] - u[bwd]) / (2 * grid.h)
    return out


def grad_eval(op: SpectralOperator, m: int, t: float, f: NDArray) -> GradField:
    _check_order(m)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    coeffs = op.project(np.asarray(f, float))
    u = op.reconstruct(heat_factor(op.eigenvalues, m, t) * coeffs)
    du_t = op.reconstruct(heat_time_factor(op.eigenvalues, m, t) * coeffs)
    return GradField(spatial=t * centered_gradient(op.grid, u), time=du_t)


class QuadratureError(RuntimeError):
    """Subordination quadrature failed to settle; carries the residual."""

    def __init__(self, residual: float, message: str):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


def subordination_factors(
    lam: NDArray, t: float, tol: float = SUBORDINATION_TOL
) -> NDArray:
    """e^{-t sqrt(lam)} computed from the subordination integral.

    Integrates (1/sqrt(pi)) e^{-u} u^{1/2} e^{-(t^2/4u) lam} du/u in
    v = log u over [-V, V], doubling V until two consecutive answers
    agree within tol."""
    lam = np.atleast_1d(np.asarray(lam, float))
    if t == 0:
        return np.ones_like(lam)

    def integrand(v: float) -> NDArray:
        u = math.exp(v)
        return np.exp(-u + 0.5 * v - (t * t / (4 * u)) * lam) / math.sqrt(math.pi)

    prev: NDArray | None = None
    residual = math.inf
    v_half = 24.0
    while v_half <= 120.0:
        val, err = scipy.integrate.quad_vec(
            integrand, -v_half, v_half, epsabs=tol, epsrel=tol
        )
        if prev is not None:
            residual = float(np.max(np.abs(val - prev)))
            if residual <= tol and err <= 10 * tol:
                return val
        prev = val
        v_half *= 2
    raise QuadratureError(residual, "subordination interval growth did not converge")


def poisson_eval(
    op: SpectralOperator,
    big_k: int,
    t: float,
    f: NDArray,
    method: str = "spectral",
) -> NDArray:
    _check_order(big_k)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    coeffs = op.project(np.asarray(f, float))
    lam = op.eigenvalues
    if method == "spectral":
        factors = poisson_factor(lam, big_k, t)
    elif method == "subordination":
        factors = ((t * t) * lam) ** big_k * subordination_factors(lam, t)
    else:
        raise ValueError(f"unknown method {method!r}")
    return op.reconstruct(factors * coeffs)


def poisson_grad_eval(op: SpectralOperator, big_k: int, t: float, f: NDArray) -> GradField:
    _check_order(big_k)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    coeffs = op.project(np.asarray(f, float))
    u = op.reconstruct(poisson_factor(op.eigenvalues, big_k, t) * coeffs)
    du_t = op.reconstruct(poisson_time_factor(op.eigenvalues, big_k, t) * coeffs)
    return GradField(spatial=t * centered_gradient(op.grid, u), time=du_t)


def poisson_scalar(lam: float, t: float, tol: float = SUBORDINATION_TOL) -> float:
    """Scalar subordination value, the quadrature's closed-form cross-check."""
    return float(subordination_factors(np.array([lam]), t, tol)[0])


def _restricted_norm(op: SpectralOperator, g: NDArray, cells: NDArray) -> float:
    dens = op.weight_values * op.grid.cell_volume
    return float(np.sqrt(np.sum(g[cells] ** 2 * dens[cells])))


@dataclass(frozen=True)
class OffDiagReport:
    """Normalized two-ball decay quantities for one semigroup family.

    Quantities are restricted L^2(w) operator ratios on the ball B and the
    annuli C_j = 2^{j+1}B minus 2^j B; report-only, no pass/fail."""

    family: str
    t: float
    radius: float
    upsilon: float
    j_values: tuple[int, ...]
    b_to_b: float
    c_to_b: tuple[float, ...]
    b_to_c: tuple[float, ...]
    empty_annuli: tuple[int, ...]
    log_ratios_b_to_c: tuple[float, ...]
    fitted_rate: float | None


def offdiag_probe(
    op: SpectralOperator,
    family: str,
    center: int,
    radius: float,
    t: float,
    j_max: int,
    f: NDArray,
) -> OffDiagReport:
    """Probe off-diagonal decay of e^{-t^2 L_w} or e^{-t sqrt(L_w)}.

    For j = 2..j_max the annulus-to-ball and ball-to-annulus quantities
    are ||1_B T 1_{C_j} f|| / ||1_{C_j} f|| and ||1_{C_j} T 1_B f|| /
    ||1_B f||; a least-squares line through log(b_to_c) against
    4^j (radius/t)^2 gives the fitted decay rate."""
    if family not in ("heat", "poisson"):
        raise ValueError(f"family must be heat or poisson, got {family!r}")
    if j_max < 2:
        raise ValueError(f"j_max must be at least 2, got {j_max}")
    if 2 ** (j_max + 1) * radius > 0.25 * (1 + 1e-9):
        raise ValueError(
            f"annuli out of range: 2^{j_max + 1} * {radius} exceeds 1/4"
        )
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")

    grid = op.grid
    f = np.asarray(f, float)

    def evolve(g: NDArray) -> NDArray:
        if family == "heat":
            return heat_eval(op, 0, t, g)
        return poisson_eval(op, 0, t, g)

    ball = grid.ball(center, radius).as_array()
    in_ball = np.zeros(grid.n_cells, bool)
    in_ball[ball] = True

    f_ball = np.where(in_ball, f, 0.0)
    norm_f_ball = _restricted_norm(op, f, ball)
    tf_ball = evolve(f_ball)

    if norm_f_ball > 0:
        b_to_b = _restricted_norm(op, tf_ball, ball) / norm_f_ball
    else:
        b_to_b = 0.0

    j_values, c_to_b, b_to_c, empty = [], [], [], []
    for j in range(2, j_max + 1):
        outer = grid.ball(center, 2 ** (j + 1) * radius).as_array()
        inner = grid.ball(center, 2**j * radius).as_array()
        annulus = np.setdiff1d(outer, inner)
        j_values.append(j)
        if annulus.size == 0:
            empty.append(j)
            c_to_b.append(0.0)
            b_to_c.append(0.0)
            continue
        in_ann = np.zeros(grid.n_cells, bool)
        in_ann[annulus] = True
        f_ann = np.where(in_ann, f, 0.0)
        norm_f_ann = _restricted_norm(op, f, annulus)
        if norm_f_ann > 0:
            c_to_b.append(_restricted_norm(op, evolve(f_ann), ball) / norm_f_ann)
        else:
            c_to_b.append(0.0)
        if norm_f_ball > 0:
            b_to_c.append(_restricted_norm(op, tf_ball, annulus) / norm_f_ball)
        else:
            b_to_c.append(0.0)

    log_ratios = []
    for a, b in zip(b_to_c, b_to_c[1:]):
        if a > 0 and b > 0:
            log_ratios.append(math.log(b / a))

    xs, ys = [], []
    for j, q in zip(j_values, b_to_c):
        if q > 0 and j not in empty:
            xs.append(4.0**j * (radius / t) ** 2)
            ys.append(math.log(q))
    rate = None
    if len(xs) >= 2:
        slope = np.polyfit(xs, ys, 1)[0]
        rate = float(-slope)

    ratio = radius / t
    return OffDiagReport(
        family=family,
        t=t,
        radius=radius,
        upsilon=max(ratio, 1.0 / ratio),
        j_values=tuple(j_values),
        b_to_b=b_to_b,
        c_to_b=tuple(c_to_b),
        b_to_c=tuple(b_to_c),
        empty_annuli=tuple(empty),
        log_ratios_b_to_c=tuple(log_ratios),
        fitted_rate=rate,
    )
