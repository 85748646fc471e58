"""Numerical check suites for the square-function machinery.

Five suites, each a pure function of a SuiteConfig, returning a
SuiteReport of pass/fail and report-only checks:

    heat_control     pointwise dominations between the heat kinds and
                     refinement-stable norm ratios
    poisson_control  Poisson-vs-heat dominations and ratios, plus the
                     modal 3/8-over-1/8 oracle
    boundedness      operator-norm ratios in L^p(v dw) for p drawn from
                     the exact admissible ranges, v in {1, 1/w, sqrt(w)}
    angles_carleson  aperture monotonicity, the p = 2 Fubini identity,
                     Carleson-vs-maximal domination and norm equivalence
    appendix_q       the small-aperture averaging inequality and its
                     predicted power of alpha

Claims with unspecified constants are never judged against an absolute
number: they pass on finiteness plus stability (< 15% drift between the
two configured grid sizes), with constants calibrated at the coarse size
and revalidated at the fine one.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from .exponents import (
    INF,
    CriticalPair,
    ExtReal,
    ext,
    ext_to_json,
    poisson_upper,
    power_weight_criticals,
    range_W,
    surrogate_p_bounds,
)
from .mesh import (
    TIE_SLACK,
    Grid,
    PowerWeight,
    UNIT_WEIGHT,
    WeightModel,
    lp_norm,
    maximal,
)
from .operator import CoefficientField, SpectralOperator, assemble
from .semigroup import TimeLadder
from .squarefn import SquareFunctionKind, build_field, evaluate
from .tent import (
    HalfSpaceField,
    carleson_p_all,
    change_of_angle_report,
    cone_all,
    fubini_norm_sq,
)
from .weights import ClassKind, weighted_class_constant

__all__ = [
    "Check",
    "SuiteReport",
    "SuiteConfig",
    "BankFunction",
    "draw_bank",
    "materialize",
    "suite_heat_control",
    "suite_poisson_control",
    "suite_boundedness",
    "suite_angles_carleson",
    "suite_appendix_q",
    "SUITES",
    "run_suites",
    "reports_to_json",
    "reports_to_csv",
]

POINTWISE_TOL = 1e-10
FUBINI_TOL = 1e-12
MODAL_RATIO_TOL = 1e-3
MODAL_L2_TOL = 1e-4


@dataclass(frozen=True)
class Check:
    """One named verdict inside a suite.

    pass_fail checks require an explicit tolerance; report_only checks
    carry the predicted functional form their values are compared with.
    """

    id: str
    kind: str
    values: tuple[float, ...]
    verdict: str
    tolerance: float | None = None
    predicted_form: str | None = None

    def __post_init__(self):
        if self.kind not in ("pass_fail", "report_only"):
            raise ValueError(f"unknown check kind {self.kind!r}")
        if self.kind == "pass_fail" and self.tolerance is None:
            raise ValueError(f"check {self.id!r}: pass_fail needs a tolerance")
        if self.kind == "report_only" and self.predicted_form is None:
            raise ValueError(f"check {self.id!r}: report_only needs predicted_form")
        if self.verdict not in ("pass", "fail"):
            raise ValueError(f"unknown verdict {self.verdict!r}")


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    checks: tuple[Check, ...]
    environment: dict

    @property
    def passed(self) -> bool:
        return all(c.verdict == "pass" for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "environment": self.environment,
            "checks": [
                {
                    "id": c.id,
                    "kind": c.kind,
                    "values": list(c.values),
                    "tolerance": c.tolerance,
                    "predicted_form": c.predicted_form,
                    "verdict": c.verdict,
                }
                for c in self.checks
            ],
        }


def reports_to_json(reports: list[SuiteReport]) -> str:
    return json.dumps([r.to_json_dict() for r in reports], indent=2)


def reports_to_csv(reports: list[SuiteReport]) -> str:
    """Flat (suite, check, value, verdict) rows, one row per value."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["suite", "check", "value", "verdict"])
    for report in reports:
        for c in report.checks:
            if c.values:
                for value in c.values:
                    writer.writerow([report.suite, c.id, repr(float(value)), c.verdict])
            else:
                writer.writerow([report.suite, c.id, "", c.verdict])
    return buf.getvalue()


@dataclass(frozen=True)
class SuiteConfig:
    """Shared experiment parameters; every suite is pure given one.

    The two sizes are the calibration grid and the revalidation grid.
    appendix_{r,s,q} are the class indices of the averaging inequality;
    it needs q <= s.
    """

    seed: int = 7
    dim: int = 2
    sizes: tuple[int, int] = (16, 32)
    weight_alpha: float = 1.0
    coeff_entries: tuple[float, ...] | None = None
    bank_size: int = 20
    drift_limit: float = 0.15
    ladder_ratio: float = 2 ** (1 / 16)
    ladder_t_max: float = 1.0
    appendix_r: float = 2.0
    appendix_s: float = 2.0
    appendix_q: float = 1.0
    appendix_alphas: tuple[float, ...] = (1.0, 0.5, 0.25)

    def __post_init__(self):
        if len(self.sizes) != 2 or self.sizes[0] >= self.sizes[1]:
            raise ValueError(f"sizes must be (coarse, fine), got {self.sizes}")
        if self.bank_size < 1:
            raise ValueError("bank_size must be positive")
        if self.appendix_q > self.appendix_s:
            raise ValueError(
                f"averaging inequality needs q <= s, got "
                f"q={self.appendix_q}, s={self.appendix_s}"
            )

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        coerced = dict(data)
        for key in ("sizes", "coeff_entries", "appendix_alphas"):
            if coerced.get(key) is not None:
                coerced[key] = tuple(coerced[key])
        return cls(**coerced)

    def weight(self) -> PowerWeight:
        return PowerWeight(self.weight_alpha)

    def coefficients(self, grid: Grid) -> CoefficientField:
        if self.coeff_entries is None:
            return CoefficientField.identity(grid)
        return CoefficientField.diagonal(grid, self.coeff_entries)


@lru_cache(maxsize=8)
def _assemble_cached(
    dim: int, n: int, alpha: float, entries: tuple[float, ...] | None
) -> SpectralOperator:
    grid = Grid(dim, n)
    if entries is None:
        coeff = CoefficientField.identity(grid)
    else:
        coeff = CoefficientField.diagonal(grid, entries)
    return assemble(grid, coeff, PowerWeight(alpha))


def _operator(config: SuiteConfig, n: int) -> SpectralOperator:
    return _assemble_cached(config.dim, n, config.weight_alpha, config.coeff_entries)


def _suite_ladder(config: SuiteConfig, grid: Grid) -> TimeLadder:
    return TimeLadder(grid.h / 4, config.ladder_t_max, config.ladder_ratio)


def _modal_ladder(config: SuiteConfig, grid: Grid) -> TimeLadder:
    # wide span so both modal tail and head truncation sit far below
    # the 1e-4 and 1e-3 modal gates
    return TimeLadder(grid.h / 16, 4.0, config.ladder_ratio)


@dataclass(frozen=True)
class BankFunction:
    """Grid-independent description of one test function."""

    kind: str
    params: tuple[float, ...]


def draw_bank(config: SuiteConfig) -> tuple[BankFunction, ...]:
    """Seeded bank cycling Gaussian bumps, zero-mean eigenmode mixes and
    ball indicators; descriptors only, materialized per grid."""
    rng = np.random.default_rng(config.seed)
    bank = []
    for i in range(config.bank_size):
        kind = ("bump", "modes", "indicator")[i % 3]
        if kind == "bump":
            center = rng.uniform(0.0, 1.0, size=config.dim)
            sigma = rng.uniform(0.08, 0.2)
            bank.append(BankFunction("bump", (*center, sigma)))
        elif kind == "modes":
            bank.append(BankFunction("modes", tuple(rng.standard_normal(6))))
        else:
            center = rng.uniform(0.0, 1.0, size=config.dim)
            radius = rng.uniform(0.1, 0.3)
            bank.append(BankFunction("indicator", (*center, radius)))
    return tuple(bank)


def _distances_to(grid: Grid, point: NDArray) -> NDArray:
    delta = np.abs(grid.centers - np.asarray(point, float)[None, :])
    delta = np.minimum(delta, 1.0 - delta)
    return np.sqrt(np.sum(delta**2, axis=1))


def materialize(bf: BankFunction, op: SpectralOperator) -> NDArray:
    grid = op.grid
    if bf.kind == "bump":
        *center, sigma = bf.params
        d = _distances_to(grid, np.array(center))
        return np.exp(-(d**2) / (2 * sigma**2))
    if bf.kind == "modes":
        coeffs = np.asarray(bf.params)
        return op.eigenvectors[:, 1 : 1 + coeffs.size] @ coeffs
    if bf.kind == "indicator":
        *center, radius = bf.params
        d = _distances_to(grid, np.array(center))
        return (d <= radius * (1.0 + TIE_SLACK)).astype(float)
    raise ValueError(f"unknown bank function kind {bf.kind!r}")


def _norm_p(op: SpectralOperator, values: NDArray, p: float, v: WeightModel) -> float:
    return lp_norm(values, p, v, op.weight, op.grid)


def _sup_ratio(numers: list[float], denoms: list[float]) -> float:
    ratios = [a / b for a, b in zip(numers, denoms) if b > 0]
    return max(ratios) if ratios else math.nan


def _drift(coarse: float, fine: float) -> float:
    if not (math.isfinite(coarse) and math.isfinite(fine)) or coarse <= 0:
        return math.inf
    return abs(fine / coarse - 1.0)


def _drift_check(cid: str, coarse: float, fine: float, config: SuiteConfig,
                 form: str) -> Check:
    d = _drift(coarse, fine)
    ok = d < config.drift_limit and math.isfinite(coarse) and math.isfinite(fine)
    return Check(
        id=cid,
        kind="report_only",
        values=(coarse, fine, d),
        verdict="pass" if ok else "fail",
        tolerance=config.drift_limit,
        predicted_form=form,
    )


def _pass_fail(cid: str, measured: float, tolerance: float) -> Check:
    return Check(
        id=cid,
        kind="pass_fail",
        values=(measured,),
        verdict="pass" if measured <= tolerance else "fail",
        tolerance=tolerance,
    )


def _environment(config: SuiteConfig, extra: dict | None = None) -> dict:
    env = {
        "dim": config.dim,
        "sizes": list(config.sizes),
        "weight": f"PowerWeight({config.weight_alpha})",
        "coefficients": (
            "identity" if config.coeff_entries is None
            else f"diagonal{tuple(config.coeff_entries)}"
        ),
        "ladder": {
            "ratio": config.ladder_ratio,
            "t_max": config.ladder_t_max,
            "t_min": "h/4",
        },
        "seed": config.seed,
        "bank_size": config.bank_size,
    }
    if extra:
        env.update(extra)
    return env


def _weighted_power_criticals(gamma: Fraction, alpha: Fraction, n: int) -> CriticalPair:
    """Critical pair of the power weight distance^gamma relative to the
    measure of distance^alpha: the homogeneous dimension is n + alpha."""
    dimension = Fraction(n) + alpha
    growth = 1 + gamma / dimension
    if growth <= 0:
        raise ValueError(f"gamma={gamma} is not a weight for alpha={alpha}, n={n}")
    r_v = max(Fraction(1), growth)
    s_v = max(Fraction(1), 1 / growth)
    return CriticalPair(ext(r_v), ext(s_v))


def _exact_alpha(config: SuiteConfig) -> Fraction:
    return Fraction(config.weight_alpha).limit_denominator(64)


def suite_heat_control(config: SuiteConfig) -> SuiteReport:
    """Pointwise dominations between heat kinds plus ratio stability."""
    bank = draw_bank(config)
    checks = []

    op16 = _operator(config, config.sizes[0])
    ladder16 = _suite_ladder(config, op16.grid)
    funcs16 = [materialize(bf, op16) for bf in bank]

    s1 = [evaluate(SquareFunctionKind("S_H", 1), op16, f, ladder16) for f in funcs16]
    gc0 = [evaluate(SquareFunctionKind("Gcal_H", 0), op16, f, ladder16) for f in funcs16]
    worst = max(float(np.max(s - 0.5 * g)) for s, g in zip(s1, gc0))
    checks.append(_pass_fail("pointwise-half-factor", worst, POINTWISE_TOL))

    worst = -math.inf
    for m in (0, 1):
        for f in funcs16:
            lo = evaluate(SquareFunctionKind("G_H", m), op16, f, ladder16)
            hi = evaluate(SquareFunctionKind("Gcal_H", m), op16, f, ladder16)
            worst = max(worst, float(np.max(lo - hi)))
    checks.append(_pass_fail("pointwise-grad-domination", worst, POINTWISE_TOL))

    ratio_rows = {"ratio-gcal1-over-s1": [], "ratio-s2-over-s1": [],
                  "eigenmode-s2-over-s1": []}
    for n in config.sizes:
        op = _operator(config, n)
        ladder = _suite_ladder(config, op.grid)
        funcs = [materialize(bf, op) for bf in bank]
        ns1 = [_norm_p(op, evaluate(SquareFunctionKind("S_H", 1), op, f, ladder),
                       2.0, UNIT_WEIGHT) for f in funcs]
        ns2 = [_norm_p(op, evaluate(SquareFunctionKind("S_H", 2), op, f, ladder),
                       2.0, UNIT_WEIGHT) for f in funcs]
        ng1 = [_norm_p(op, evaluate(SquareFunctionKind("Gcal_H", 1), op, f, ladder),
                       2.0, UNIT_WEIGHT) for f in funcs]
        ratio_rows["ratio-gcal1-over-s1"].append(_sup_ratio(ng1, ns1))
        ratio_rows["ratio-s2-over-s1"].append(_sup_ratio(ns2, ns1))
        phi = op.eigenvectors[:, 1]
        num = _norm_p(op, evaluate(SquareFunctionKind("S_H", 2), op, phi, ladder),
                      2.0, UNIT_WEIGHT)
        den = _norm_p(op, evaluate(SquareFunctionKind("S_H", 1), op, phi, ladder),
                      2.0, UNIT_WEIGHT)
        ratio_rows["eigenmode-s2-over-s1"].append(num / den)
    for cid, (coarse, fine) in ratio_rows.items():
        checks.append(_drift_check(cid, coarse, fine, config,
                                   "bounded, refinement-stable"))

    const = np.ones(op16.grid.n_cells)
    worst = max(
        float(np.max(evaluate(SquareFunctionKind(k), op16, const, ladder16)))
        for k in ("S_H", "Gcal_H")
    )
    checks.append(_pass_fail("constant-annihilated", worst, POINTWISE_TOL))
    checks.append(Check(
        id="constant-ratio-undefined", kind="report_only", values=(),
        verdict="pass", predicted_form="0/0, reported undefined",
    ))

    return SuiteReport("heat_control", tuple(checks), _environment(config))


def suite_poisson_control(config: SuiteConfig) -> SuiteReport:
    """Poisson-vs-heat dominations, ratio stability, the modal oracle."""
    bank = draw_bank(config)
    checks = []
    n_dim = config.dim
    alpha = _exact_alpha(config)
    crit_w = power_weight_criticals(alpha, n_dim)
    p_minus, p_plus = surrogate_p_bounds(crit_w, n_dim)
    upper = poisson_upper(p_plus, 1, crit_w.r_w, n_dim)
    admissible = range_W(p_minus, upper if upper > p_minus else INF, crit_w)
    p = 2.0
    if not (admissible.lower < ext(2) < admissible.upper):
        raise ValueError(f"p=2 outside admissible range {admissible}")

    op16 = _operator(config, config.sizes[0])
    ladder16 = _suite_ladder(config, op16.grid)
    funcs16 = [materialize(bf, op16) for bf in bank]

    worst = -math.inf
    for f in funcs16:
        lo = evaluate(SquareFunctionKind("G_P", 1), op16, f, ladder16)
        hi = evaluate(SquareFunctionKind("Gcal_P", 1), op16, f, ladder16)
        worst = max(worst, float(np.max(lo - hi)))
    checks.append(_pass_fail("pointwise-grad-domination-poisson", worst, POINTWISE_TOL))

    rows = {"ratio-sp-over-sh": [], "ratio-gcalp-over-gcalh": [],
            "ratio-gcalp-over-sh": []}
    for n in config.sizes:
        op = _operator(config, n)
        ladder = _suite_ladder(config, op.grid)
        funcs = [materialize(bf, op) for bf in bank]
        nsh = [_norm_p(op, evaluate(SquareFunctionKind("S_H", 1), op, f, ladder),
                       p, UNIT_WEIGHT) for f in funcs]
        nsp = [_norm_p(op, evaluate(SquareFunctionKind("S_P", 1), op, f, ladder),
                       p, UNIT_WEIGHT) for f in funcs]
        ngh = [_norm_p(op, evaluate(SquareFunctionKind("Gcal_H", 0), op, f, ladder),
                       p, UNIT_WEIGHT) for f in funcs]
        ngp = [_norm_p(op, evaluate(SquareFunctionKind("Gcal_P", 0), op, f, ladder),
                       p, UNIT_WEIGHT) for f in funcs]
        ngp1 = [_norm_p(op, evaluate(SquareFunctionKind("Gcal_P", 1), op, f, ladder),
                        p, UNIT_WEIGHT) for f in funcs]
        rows["ratio-sp-over-sh"].append(_sup_ratio(nsp, nsh))
        rows["ratio-gcalp-over-gcalh"].append(_sup_ratio(ngp, ngh))
        rows["ratio-gcalp-over-sh"].append(_sup_ratio(ngp1, nsh))
    for cid, (coarse, fine) in rows.items():
        checks.append(_drift_check(cid, coarse, fine, config,
                                   "bounded, refinement-stable"))

    worst = -math.inf
    for n in config.sizes:
        op = _operator(config, n)
        wide = _modal_ladder(config, op.grid)
        phi = op.eigenvectors[:, 1]
        num = _norm_p(op, evaluate(SquareFunctionKind("S_P", 1), op, phi, wide),
                      2.0, UNIT_WEIGHT)
        den = _norm_p(op, evaluate(SquareFunctionKind("S_H", 1), op, phi, wide),
                      2.0, UNIT_WEIGHT)
        worst = max(worst, abs((num / den) ** 2 - 3.0) / 3.0)
    checks.append(_pass_fail("eigenmode-ratio-three", worst, MODAL_RATIO_TOL))

    const = np.ones(op16.grid.n_cells)
    worst = max(
        float(np.max(evaluate(SquareFunctionKind(k), op16, const, ladder16)))
        for k in ("S_P", "Gcal_P")
    )
    checks.append(_pass_fail("constant-annihilated", worst, POINTWISE_TOL))
    checks.append(Check(
        id="constant-ratio-undefined", kind="report_only", values=(),
        verdict="pass", predicted_form="0/0, reported undefined",
    ))

    env = _environment(config, {
        "p": p,
        "surrogate": {"p_minus": ext_to_json(p_minus), "p_plus": ext_to_json(p_plus)},
        "poisson_upper": ext_to_json(upper),
    })
    return SuiteReport("poisson_control", tuple(checks), env)


def suite_boundedness(config: SuiteConfig) -> SuiteReport:
    """Operator-norm ratios in L^p(v dw) inside the admissible ranges."""
    bank = draw_bank(config)
    checks = []
    n_dim = config.dim
    alpha = _exact_alpha(config)
    crit_w = power_weight_criticals(alpha, n_dim)
    p_minus, p_plus = surrogate_p_bounds(crit_w, n_dim)
    heat_upper = INF
    poisson_up = poisson_upper(p_plus, 1, crit_w.r_w, n_dim)

    v_cases = [
        ("one", UNIT_WEIGHT, Fraction(0)),
        ("w-inv", PowerWeight(float(-alpha)), -alpha),
        ("w-half", PowerWeight(float(alpha) / 2), alpha / 2),
    ]
    p = 2.0
    env_ranges = {}
    env_classes = {}
    op16 = _operator(config, config.sizes[0])
    for label, v_model, gamma in v_cases:
        crit_v = _weighted_power_criticals(gamma, alpha, n_dim)
        heat_range = range_W(p_minus, heat_upper, crit_v)
        poisson_range = range_W(
            p_minus, poisson_up if poisson_up > p_minus else INF, crit_v
        )
        for name, rng_ in (("heat", heat_range), ("poisson", poisson_range)):
            if not (rng_.lower < ext(2) < rng_.upper):
                raise ValueError(f"p=2 outside {name} range for v={label}")
            env_ranges[f"{label}-{name}"] = {
                "lo": ext_to_json(rng_.lower), "hi": ext_to_json(rng_.upper),
            }
        est = weighted_class_constant(
            v_model, op16.weight, ClassKind("Ap_of_w", 2.0), op16.grid
        )
        env_classes[label] = est.constant_estimate

    norms = {}
    for n in config.sizes:
        op = _operator(config, n)
        ladder = _suite_ladder(config, op.grid)
        funcs = [materialize(bf, op) for bf in bank]
        sh = [evaluate(SquareFunctionKind("S_H", 1), op, f, ladder) for f in funcs]
        sp = [evaluate(SquareFunctionKind("S_P", 1), op, f, ladder) for f in funcs]
        for label, v_model, _ in v_cases:
            nf = [_norm_p(op, f, p, v_model) for f in funcs]
            norms[(n, label, "heat")] = _sup_ratio(
                [_norm_p(op, s, p, v_model) for s in sh], nf
            )
            norms[(n, label, "poisson")] = _sup_ratio(
                [_norm_p(op, s, p, v_model) for s in sp], nf
            )
    for label, _, _ in v_cases:
        for family in ("heat", "poisson"):
            coarse = norms[(config.sizes[0], label, family)]
            fine = norms[(config.sizes[1], label, family)]
            checks.append(_drift_check(
                f"operator-ratio-{family}-v-{label}", coarse, fine, config,
                "bounded, refinement-stable",
            ))

    wide = _modal_ladder(config, op16.grid)
    phi = op16.eigenvectors[:, 1]
    ratio = (
        _norm_p(op16, evaluate(SquareFunctionKind("S_H", 1), op16, phi, wide),
                2.0, UNIT_WEIGHT)
        / _norm_p(op16, phi, 2.0, UNIT_WEIGHT)
    )
    checks.append(_pass_fail(
        "modal-l2-one-eighth", abs(ratio**2 - 0.125) / 0.125, MODAL_L2_TOL
    ))

    min_norm = min(
        _norm_p(op16, materialize(bf, op16), 2.0, UNIT_WEIGHT) for bf in bank
    )
    checks.append(Check(
        id="bank-nonzero", kind="pass_fail", values=(min_norm,),
        verdict="pass" if min_norm > 0 else "fail", tolerance=0.0,
    ))

    env = _environment(config, {
        "p": p,
        "ranges": env_ranges,
        "class_constants_A2_of_w": env_classes,
    })
    return SuiteReport("boundedness", tuple(checks), env)


def suite_angles_carleson(config: SuiteConfig) -> SuiteReport:
    """Cone aperture and Carleson functional checks."""
    rng = np.random.default_rng(config.seed + 1)
    checks = []
    op16 = _operator(config, config.sizes[0])
    ladder16 = _suite_ladder(config, op16.grid)

    fields = [
        HalfSpaceField(
            op16.grid, ladder16, op16.weight,
            np.abs(rng.standard_normal((ladder16.count, op16.grid.n_cells))),
        )
        for _ in range(3)
    ]
    bank = draw_bank(config)[:4]
    fields += [
        build_field(SquareFunctionKind("S_H", 1), op16, materialize(bf, op16), ladder16)
        for bf in bank
    ]

    worst = -math.inf
    for fld in fields:
        lo = cone_all(fld, 0.5)
        mid = cone_all(fld, 1.0)
        hi = cone_all(fld, 2.0)
        worst = max(worst, float(np.max(lo - mid)), float(np.max(mid - hi)))
    checks.append(_pass_fail("aperture-monotonicity", worst, 0.0))

    worst = -math.inf
    for fld in fields:
        cone_sq = float(np.sum(
            cone_all(fld, 1.0) ** 2 * fld.weight_values * fld.grid.cell_volume
        ))
        direct = fubini_norm_sq(fld)
        worst = max(worst, abs(cone_sq - direct) / direct)
    checks.append(_pass_fail("fubini-p2-identity", worst, FUBINI_TOL))

    worst = -math.inf
    for fld in fields:
        area = cone_all(fld, 1.0)
        for p0 in (1.0, 2.0):
            carleson = carleson_p_all(fld, p0)
            dominator = maximal(area, fld.grid, p0, base=fld.weight)
            worst = max(worst, float(np.max(carleson - dominator)))
    checks.append(_pass_fail("carleson-below-maximal", worst, POINTWISE_TOL))

    equiv = {}
    angle = {}
    for n in config.sizes:
        op = _operator(config, n)
        ladder = _suite_ladder(config, op.grid)
        ratios = []
        angle_ratios = []
        for bf in bank:
            fld = build_field(
                SquareFunctionKind("S_H", 1), op, materialize(bf, op), ladder
            )
            area = cone_all(fld, 1.0)
            carleson = carleson_p_all(fld, 1.0)
            na = lp_norm(area, 2.0, UNIT_WEIGHT, op.weight, op.grid)
            nc = lp_norm(carleson, 2.0, UNIT_WEIGHT, op.weight, op.grid)
            if na > 0:
                ratios.append(nc / na)
            rep = change_of_angle_report(
                fld, 1.0, 2.0, 2.0, UNIT_WEIGHT, op.weight, r=2.0, r_tilde=2.0
            )
            if rep.ratio is not None:
                angle_ratios.append((rep.ratio, rep.predicted_increase))
        equiv[n] = max(ratios)
        angle[n] = max(r / pred for r, pred in angle_ratios)
    checks.append(_drift_check(
        "carleson-vs-cone-norms", equiv[config.sizes[0]], equiv[config.sizes[1]],
        config, "norm equivalence, doubling-calibrated band",
    ))
    calibrated = angle[config.sizes[0]]
    revalidated = angle[config.sizes[1]]
    ok = revalidated <= calibrated * (1.0 + config.drift_limit)
    checks.append(Check(
        id="angle-ratio-vs-predicted", kind="report_only",
        values=(calibrated, revalidated),
        verdict="pass" if ok else "fail", tolerance=config.drift_limit,
        predicted_form="calibrated constant * (beta/alpha)^{n r rtilde / p}",
    ))

    zero = HalfSpaceField(
        op16.grid, ladder16, op16.weight,
        np.zeros((ladder16.count, op16.grid.n_cells)),
    )
    worst = max(
        float(np.max(cone_all(zero, 1.0))),
        float(np.max(carleson_p_all(zero, 1.0))),
    )
    checks.append(_pass_fail("zero-field", worst, 0.0))

    return SuiteReport("angles_carleson", tuple(checks), _environment(config))


def _g_alpha_functional(
    grid: Grid, w_values: NDArray, h_values: NDArray, v_values: NDArray,
    alpha: float, t: float, q: float,
) -> float:
    """The v dw integral of the q-th root of the alpha-aperture average
    of |h| against the normalized ball measure dw(y)/w(B(y, alpha t))."""
    mask = grid.distance_matrix < alpha * t * (1.0 + TIE_SLACK)
    whn = w_values * grid.cell_volume
    wball = mask @ whn
    payload = np.abs(h_values) * whn / wball
    g = mask @ payload
    return float(np.sum(g ** (1.0 / q) * v_values * whn))


def suite_appendix_q(config: SuiteConfig) -> SuiteReport:
    """Small-aperture averaging inequality: measured alpha-power versus
    the predicted exponent n r (1/s - 1/q)."""
    rng = np.random.default_rng(config.seed + 2)
    checks = []
    op16 = _operator(config, config.sizes[0])
    grid = op16.grid
    w_values = op16.weight_values
    v_values = np.ones(grid.n_cells)
    h_values = np.abs(rng.standard_normal(grid.n_cells))
    t = 0.25

    # at q = 1, v = 1 the ball normalizations cancel by symmetry of the
    # distance, so the functional equals the plain mass at every aperture
    mass = float(np.sum(np.abs(h_values) * w_values * grid.cell_volume))
    worst = max(
        abs(_g_alpha_functional(grid, w_values, h_values, v_values, a, t, 1.0)
            / mass - 1.0)
        for a in config.appendix_alphas
    )
    checks.append(_pass_fail("mass-identity-q1", worst, FUBINI_TOL))

    def slope(q: float, weight_values: NDArray) -> float:
        vals = [
            _g_alpha_functional(grid, weight_values, h_values, v_values, a, t, q)
            for a in config.appendix_alphas
        ]
        ref = vals[0]
        logs = np.log(np.array(vals) / ref)
        la = np.log(np.array(config.appendix_alphas))
        return float(np.polyfit(la, logs, 1)[0])

    flat_slope = slope(config.appendix_s, np.ones(grid.n_cells))
    checks.append(Check(
        id="flat-weight-slope", kind="report_only",
        values=(flat_slope, 0.0),
        verdict="pass" if abs(flat_slope) <= 0.5 else "fail", tolerance=0.5,
        predicted_form="alpha^0 for w = 1, q = s",
    ))

    predicted = (
        config.dim * config.appendix_r
        * (1.0 / config.appendix_s - 1.0 / config.appendix_q)
    )
    measured = slope(config.appendix_q, w_values)
    checks.append(Check(
        id="power-weight-slope", kind="report_only",
        values=(measured, predicted),
        verdict="pass" if measured >= predicted - 0.5 else "fail", tolerance=0.5,
        predicted_form="alpha^{n r (1/s - 1/q)}",
    ))

    env = _environment(config, {
        "r": config.appendix_r, "s": config.appendix_s, "q": config.appendix_q,
        "alphas": list(config.appendix_alphas), "t": t,
    })
    return SuiteReport("appendix_q", tuple(checks), env)


SUITES = {
    "heat_control": suite_heat_control,
    "poisson_control": suite_poisson_control,
    "boundedness": suite_boundedness,
    "angles_carleson": suite_angles_carleson,
    "appendix_q": suite_appendix_q,
}


def run_suites(
    config: SuiteConfig,
    names: list[str] | None = None,
    threads: int = 1,
) -> list[SuiteReport]:
    """Run the named suites (all by default) in registry order."""
    if names is None:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suites: {unknown}")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(SUITES[n], config) for n in names]
            return [f.result() for f in futures]
    return [SUITES[n](config) for n in names]
