"""Finite-volume assembly and spectral decomposition of L_w.

The operator is L_w f = -(1/w) div(w A grad f) on the periodic grid, with
a two-point flux per face and the arithmetic mean of w*A at the face:

    (L_w f)(x) = -(1/w(x)) sum_faces c_face (f(nb) - f(x)) / h^2,
    c_face = (w(x) A_dd(x) + w(nb) A_dd(nb)) / 2.

With that face coefficient the stencil is exactly self-adjoint for
<f, g>_w = sum f g w h^dim and positive semidefinite, with kernel the
constants.  Writing K for the stiffness matrix (so L = diag(1/w) K / h^2),
the substitution psi = sqrt(w) h^{dim/2} phi turns the generalized problem
K phi = lambda W phi into a standard symmetric one,

    diag(w^{-1/2}) (K / h^2) diag(w^{-1/2}) psi = lambda psi,

and phi_k = psi_k / (sqrt(w) h^{dim/2}) is then exactly w-orthonormal.

Two-point fluxes only see the diagonal of A, so the spectral path rejects
coefficient fields with off-diagonal entries; those (and complex A) go
through the dense non-spectral path in `assemble_dense`, which has no
eigenvalue calculus and is excluded from the verification suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .mesh import Grid, PowerWeight, TabulatedWeight, WeightModel

__all__ = [
    "CoefficientField",
    "SpectralOperator",
    "DenseOperator",
    "assemble",
    "assemble_dense",
    "operator_from_config",
]

# eigenvalues below this are an assembly bug, between this and zero they
# are roundoff in the kernel and get clamped to 0
EIG_ERROR_FLOOR = -1e-8
EIG_ZERO_BAND = 1e-9

ORTHO_TOL = 1e-10

_N_DIRECTIONS = 16


def _unit_vectors(dim: int) -> NDArray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    theta = 2 * np.pi * np.arange(_N_DIRECTIONS) / _N_DIRECTIONS
    return np.column_stack([np.cos(theta), np.sin(theta)])


@dataclass(frozen=True)
class CoefficientField:
    """Per-cell symmetric coefficient matrices with ellipticity bounds."""

    matrices: NDArray  # (n_cells, dim, dim)
    lam_ell: float
    big_lam_ell: float

    def __post_init__(self):
        a = np.asarray(self.matrices, float)
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise ValueError(f"expected (cells, dim, dim) matrices, got {a.shape}")
        if not (0 < self.lam_ell <= self.big_lam_ell):
            raise ValueError(
                f"need 0 < lam_ell <= big_lam_ell, got ({self.lam_ell}, {self.big_lam_ell})"
            )
        if not np.allclose(a, np.swapaxes(a, 1, 2), atol=1e-12):
            raise ValueError("coefficient matrices must be symmetric")
        xi = _unit_vectors(a.shape[1])
        # lower bound xi.A xi >= lam |xi|^2 on the direction sample
        quad = np.einsum("kd,cde,ke->ck", xi, a, xi)
        if quad.min() < self.lam_ell - 1e-12:
            raise ValueError(
                f"ellipticity violated: min quadratic form {quad.min()} < {self.lam_ell}"
            )
        # upper bound |A xi . zeta| <= Lam for all sampled unit pairs
        bil = np.abs(np.einsum("kd,cde,je->ckj", xi, a, xi))
        if bil.max() > self.big_lam_ell + 1e-12:
            raise ValueError(
                f"boundedness violated: max bilinear form {bil.max()} > {self.big_lam_ell}"
            )
        object.__setattr__(self, "matrices", a)

    @classmethod
    def identity(cls, grid: Grid) -> "CoefficientField":
        eye = np.broadcast_to(np.eye(grid.dim), (grid.n_cells, grid.dim, grid.dim))
        return cls(eye.copy(), 1.0, 1.0)

    @classmethod
    def diagonal(cls, grid: Grid, entries) -> "CoefficientField":
        """Constant diagonal coefficients, one entry per axis."""
        d = np.asarray(entries, float)
        if d.shape != (grid.dim,):
            raise ValueError(f"need {grid.dim} diagonal entries, got shape {d.shape}")
        if np.any(d <= 0):
            raise ValueError("diagonal entries must be positive")
        mats = np.broadcast_to(np.diag(d), (grid.n_cells, grid.dim, grid.dim))
        return cls(mats.copy(), float(d.min()), float(d.max()))

    @classmethod
    def from_values(cls, matrices, lam_ell: float, big_lam_ell: float) -> "CoefficientField":
        return cls(np.asarray(matrices, float), lam_ell, big_lam_ell)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def is_diagonal(self) -> bool:
        mask = ~np.eye(self.dim, dtype=bool)
        return bool(np.all(np.abs(self.matrices[:, mask]) < 1e-14))

    def diag_entries(self) -> NDArray:
        """(n_cells, dim) array of diagonal entries."""
        return np.diagonal(self.matrices, axis1=1, axis2=2).copy()


def _stiffness(grid: Grid, coeff: CoefficientField, wv: NDArray) -> NDArray:
    """K with (K f)(x) = sum_faces c_face (f(x) - f(nb)) / h^2."""
    m = grid.n_cells
    k = np.zeros((m, m))
    diag = coeff.diag_entries()
    idx = np.arange(m)
    for axis in range(grid.dim):
        nb = grid.shift_perm(axis, 1)
        c_face = 0.5 * (wv * diag[:, axis] + wv[nb] * diag[nb, axis])
        k[idx, idx] += c_face
        k[nb, nb] += c_face
        k[idx, nb] -= c_face
        k[nb, idx] -= c_face
    return k / grid.h**2


@dataclass(frozen=True)
class SpectralOperator:
    """L_w with its w-orthonormal eigendecomposition; immutable."""

    grid: Grid
    weight: WeightModel
    coeff: CoefficientField
    matrix: NDArray = field(repr=False)       # dense L (not symmetric)
    eigenvalues: NDArray = field(repr=False)  # ascending, >= 0
    eigenvectors: NDArray = field(repr=False) # columns phi_k, w-orthonormal
    weight_values: NDArray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.size

    def inner_w(self, f: NDArray, g: NDArray) -> float:
        dens = self.weight_values * self.grid.cell_volume
        return float(np.sum(f * g * dens))

    def project(self, f: NDArray) -> NDArray:
        """Coefficients c_k = <f, phi_k>_w."""
        dens = self.weight_values * self.grid.cell_volume
        return self.eigenvectors.T @ (f * dens)

    def reconstruct(self, coeffs: NDArray) -> NDArray:
        return self.eigenvectors @ coeffs

    def apply(self, f: NDArray) -> NDArray:
        f = np.asarray(f, float)
        if f.shape != (self.grid.n_cells,):
            raise ValueError(
                f"expected {self.grid.n_cells} cell values, got shape {f.shape}"
            )
        return self.matrix @ f


def assemble(grid: Grid, coeff: CoefficientField, w: WeightModel) -> SpectralOperator:
    """Assemble L_w and its dense w-orthonormal eigendecomposition."""
    if coeff.dim != grid.dim:
        raise ValueError(f"coefficient dim {coeff.dim} does not match grid dim {grid.dim}")
    if not coeff.is_diagonal:
        raise ValueError(
            "two-point flux assembly needs diagonal coefficients; "
            "use assemble_dense for full matrices"
        )
    wv = w.sample(grid)
    k = _stiffness(grid, coeff, wv)
    l_mat = k / wv[:, None]

    inv_sqrt_w = 1.0 / np.sqrt(wv)
    m_std = inv_sqrt_w[:, None] * k * inv_sqrt_w[None, :]
    m_std = 0.5 * (m_std + m_std.T)
    eigvals, psi = scipy.linalg.eigh(m_std)

    if eigvals.min() < EIG_ERROR_FLOOR:
        raise ValueError(
            f"assembly produced eigenvalue {eigvals.min()} < {EIG_ERROR_FLOOR}"
        )
    eigvals = eigvals.copy()
    eigvals[np.abs(eigvals) < EIG_ZERO_BAND] = 0.0

    # deterministic sign: largest-magnitude entry of each mode positive
    lead = np.argmax(np.abs(psi), axis=0)
    signs = np.sign(psi[lead, np.arange(psi.shape[1])])
    signs[signs == 0] = 1.0
    psi = psi * signs[None, :]

    phi = psi * inv_sqrt_w[:, None] / grid.cell_volume**0.5

    gram = phi.T @ (phi * (wv * grid.cell_volume)[:, None])
    resid = np.max(np.abs(gram - np.eye(grid.n_cells)))
    if resid > ORTHO_TOL:
        raise ValueError(f"w-orthonormalization residual {resid} exceeds {ORTHO_TOL}")

    return SpectralOperator(
        grid=grid,
        weight=w,
        coeff=coeff,
        matrix=l_mat,
        eigenvalues=eigvals,
        eigenvectors=phi,
        weight_values=wv,
    )


@dataclass(frozen=True)
class DenseOperator:
    """Non-spectral dense form of L_w; experimental path for full or
    complex coefficient matrices.  No eigenvalue calculus is offered."""

    grid: Grid
    weight: WeightModel
    matrix: NDArray = field(repr=False)
    weight_values: NDArray = field(repr=False)

    def apply(self, f: NDArray) -> NDArray:
        return self.matrix @ np.asarray(f)

    def heat(self, t: float, f: NDArray) -> NDArray:
        """e^{-t^2 L} f via a dense matrix exponential."""
        if t < 0:
            raise ValueError(f"time must be nonnegative, got {t}")
        return scipy.linalg.expm(-(t * t) * self.matrix) @ np.asarray(f)


def assemble_dense(grid: Grid, matrices: NDArray, w: WeightModel) -> DenseOperator:
    """Assemble L_w from per-cell matrices that may be full or complex.

    Only the face-normal row of A enters each two-point flux, so
    off-diagonal couplings are ignored by this discretization; the path
    exists to exercise complex-coefficient plumbing, not to discretize
    cross terms faithfully.
    """
    a = np.asarray(matrices)
    if a.shape != (grid.n_cells, grid.dim, grid.dim):
        raise ValueError(
            f"expected shape {(grid.n_cells, grid.dim, grid.dim)}, got {a.shape}"
        )
    wv = w.sample(grid)
    m = grid.n_cells
    k = np.zeros((m, m), dtype=a.dtype)
    idx = np.arange(m)
    diag = np.diagonal(a, axis1=1, axis2=2)
    for axis in range(grid.dim):
        nb = grid.shift_perm(axis, 1)
        c_face = 0.5 * (wv * diag[:, axis] + wv[nb] * diag[nb, axis])
        k[idx, idx] += c_face
        k[nb, nb] += c_face
        k[idx, nb] -= c_face
        k[nb, idx] -= c_face
    k /= grid.h**2
    return DenseOperator(grid=grid, weight=w, matrix=k / wv[:, None], weight_values=wv)


def _weight_from_config(cfg: dict, dim: int) -> WeightModel:
    kind = cfg.get("kind")
    if kind == "power":
        extra = set(cfg) - {"kind", "alpha"}
        if extra:
            raise ValueError(f"unknown weight config keys: {sorted(extra)}")
        alpha = float(cfg["alpha"])
        if not (-dim < alpha < dim):
            raise ValueError(f"alpha outside (-{dim}, {dim}): {alpha}")
        return PowerWeight(alpha)
    if kind == "tabulated":
        extra = set(cfg) - {"kind", "values"}
        if extra:
            raise ValueError(f"unknown weight config keys: {sorted(extra)}")
        return TabulatedWeight(tuple(float(v) for v in cfg["values"]))
    raise ValueError(f"unknown weight kind {kind!r}")


def _coeff_from_config(cfg: dict, grid: Grid) -> CoefficientField:
    kind = cfg.get("kind")
    if kind == "identity":
        if set(cfg) - {"kind"}:
            raise ValueError(f"unknown A config keys: {sorted(set(cfg) - {'kind'})}")
        return CoefficientField.identity(grid)
    if kind == "diag":
        extra = set(cfg) - {"kind", "entries"}
        if extra:
            raise ValueError(f"unknown A config keys: {sorted(extra)}")
        return CoefficientField.diagonal(grid, cfg["entries"])
    if kind == "file":
        extra = set(cfg) - {"kind", "path", "lam", "big_lam"}
        if extra:
            raise ValueError(f"unknown A config keys: {sorted(extra)}")
        mats = np.load(cfg["path"])
        return CoefficientField.from_values(
            mats, float(cfg.get("lam", 1.0)), float(cfg.get("big_lam", 1.0))
        )
    raise ValueError(f"unknown A kind {kind!r}")


def operator_from_config(cfg: dict) -> SpectralOperator:
    """Build a SpectralOperator from {dim, N, weight:{...}, A:{...}}."""
    extra = set(cfg) - {"dim", "N", "weight", "A"}
    if extra:
        raise ValueError(f"unknown operator config keys: {sorted(extra)}")
    grid = Grid(int(cfg["dim"]), int(cfg["N"]))
    w = _weight_from_config(dict(cfg.get("weight", {"kind": "power", "alpha": 0.0})), grid.dim)
    coeff = _coeff_from_config(dict(cfg.get("A", {"kind": "identity"})), grid)
    return assemble(grid, coeff, w)
