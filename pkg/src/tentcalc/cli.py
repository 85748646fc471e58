"""Command-line front end.

Three subcommands: exact exponent queries (rationals in, rationals out),
square-function field evaluation with CSV/JSON output, and the check
suites.  Exit codes: 0 success, 1 domain error, 2 usage error, 3 check
failure.  Given the same flags, config and seed, every output is
byte-identical across runs; output files never contain timestamps and
start with a header block naming the tool version, a hash of the
effective config, and the seed.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import click
import numpy as np
from numpy.typing import NDArray

from . import __version__
from .exponents import (
    corollary_ranges,
    ext,
    poisson_upper,
    power_weight_criticals,
    range_W,
    sobolev_exponent,
    surrogate_p_bounds,
)
from .mesh import PowerWeight, UNIT_WEIGHT, Grid, WeightModel, lp_norm
from .operator import CoefficientField, SpectralOperator, assemble
from .semigroup import TimeLadder
from .squarefn import SquareFunctionKind, evaluate, result_to_csv
from .verify import SUITES, SuiteConfig, reports_to_csv, reports_to_json, run_suites

KIND_TOKENS = {
    "SH": "S_H",
    "GH": "G_H",
    "GcalH": "Gcal_H",
    "SP": "S_P",
    "GP": "G_P",
    "GcalP": "Gcal_P",
    "g": "vertical_g_H",
}

SUITE_TOKENS = {
    "heat": "heat_control",
    "poisson": "poisson_control",
    "bounded": "boundedness",
    "angles": "angles_carleson",
    "appendix": "appendix_q",
}


@dataclass(frozen=True)
class RunConfig:
    """Grid, weight, coefficient and ladder parameters for one field run.

    Caps keep runs inside the dense-matrix budget: dim in {1, 2}, at most
    4096 cells, weight power strictly inside (-dim, dim).
    """

    dim: int = 2
    n: int = 16
    weight_alpha: float = 1.0
    coeff_entries: tuple[float, ...] | None = None
    ladder_ratio: float = 2 ** (1 / 16)
    ladder_t_max: float = 1.0
    ladder_t_min: float | None = None
    seed: int = 7

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not 4 <= self.n <= 128 or self.n**self.dim > 4096:
            raise ValueError(f"grid size out of range: dim={self.dim}, n={self.n}")
        if not -self.dim < self.weight_alpha < self.dim:
            raise ValueError(
                f"alpha outside (-n, n): weight power {self.weight_alpha} "
                f"not inside (-{self.dim}, {self.dim})"
            )
        if not 1.0 < self.ladder_ratio <= 2.0:
            raise ValueError(f"ladder_ratio must be in (1, 2], got {self.ladder_ratio}")
        if not 0.0 < self.ladder_t_max <= 8.0:
            raise ValueError(f"ladder_t_max must be in (0, 8], got {self.ladder_t_max}")
        if self.ladder_t_min is not None and not 0.0 < self.ladder_t_min < self.ladder_t_max:
            raise ValueError(
                f"ladder_t_min must be in (0, t_max), got {self.ladder_t_min}"
            )

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        coerced = dict(data)
        if coerced.get("coeff_entries") is not None:
            coerced["coeff_entries"] = tuple(coerced["coeff_entries"])
        return cls(**coerced)

    def build_operator(self) -> SpectralOperator:
        grid = Grid(self.dim, self.n)
        if self.coeff_entries is None:
            coeff = CoefficientField.identity(grid)
        else:
            coeff = CoefficientField.diagonal(grid, self.coeff_entries)
        return assemble(grid, coeff, PowerWeight(self.weight_alpha))

    def build_ladder(self, grid: Grid) -> TimeLadder:
        t_min = grid.h / 4 if self.ladder_t_min is None else self.ladder_t_min
        return TimeLadder(t_min, self.ladder_t_max, self.ladder_ratio)


def _config_hash(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def _header(payload: dict, seed: int | None) -> dict:
    return {"version": __version__, "config_hash": _config_hash(payload),
            "seed": seed}


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _parse_rational(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"{flag} expects a rational like 3/2, got {text!r}")


def _load_json(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return threads
    env = os.environ.get("TENTCALC_THREADS")
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise click.UsageError(f"TENTCALC_THREADS must be an integer, got {env!r}")


def _write_text(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


@click.group()
@click.version_option(__version__)
def main():
    """Exact exponent calculus, square-function fields, check suites."""


@main.command("exponents")
@click.option("--alpha", default=None, help="weight power, a rational like -3/2")
@click.option("--n", "n", type=int, default=None, help="ambient dimension")
@click.option("--K", "--k", "k", type=int, default=None,
              help="composition count for the Sobolev exponent chain")
@click.option("--p0", default=None, help="rational lower exponent")
@click.option("--q0", default=None, help="rational upper exponent")
@click.option("--corollary", type=click.Choice(["heat", "poisson"]), default=None,
              help="emit the admissible power interval instead")
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None,
              help="also write the result (with header) to this JSON file")
def cmd_exponents(alpha, n, k, p0, q0, corollary, out):
    """Exact rational exponent queries for a power weight."""
    if n is None:
        raise click.UsageError("--n is required")
    config = {"alpha": alpha, "n": n, "K": k, "p0": p0, "q0": q0,
              "corollary": corollary}
    try:
        if corollary is not None:
            ranges = corollary_ranges("power_weight", {"n": n, "family": corollary})
            result = {
                "alpha_range": [str(ranges["alpha_lo"]), str(ranges["alpha_hi"])],
                "gamma_range": [str(ranges["gamma_lo"]), str(ranges["gamma_hi"])],
            }
        else:
            if alpha is None:
                raise click.UsageError("--alpha is required without --corollary")
            a = _parse_rational(alpha, "--alpha")
            if not -n < a < n:
                raise ValueError(f"alpha outside (-n, n): {a} for n = {n}")
            pair = power_weight_criticals(a, n)
            result = {"r_w": str(pair.r_w), "s_w": str(pair.s_w)}
            p_minus, p_plus = surrogate_p_bounds(pair, n)
            result["surrogate_p"] = [str(p_minus), str(p_plus)]
            if p0 is not None and k is not None:
                q = ext(_parse_rational(p0, "--p0"))
                result["sobolev_exponent"] = str(sobolev_exponent(q, k, pair.r_w, n))
                result["poisson_upper"] = str(poisson_upper(q, k, pair.r_w, n))
            if p0 is not None and q0 is not None:
                lo = ext(_parse_rational(p0, "--p0"))
                hi = ext(_parse_rational(q0, "--q0"))
                rng = range_W(lo, hi, pair)
                result["range_W"] = [str(rng.lower), str(rng.upper)]
    except (TypeError, ValueError) as exc:
        _fail(str(exc))
    click.echo(json.dumps(result))
    if out is not None:
        _write_text(out, json.dumps(
            {"header": _header(config, None), **result}, indent=2
        ) + "\n")


def _materialize_f(spec: str, op: SpectralOperator) -> NDArray:
    grid = op.grid
    if spec == "constant":
        return np.ones(grid.n_cells)
    if spec.startswith("eig:"):
        index = int(spec.split(":", 1)[1])
        if not 0 <= index < grid.n_cells:
            raise ValueError(f"eigenmode index {index} outside [0, {grid.n_cells})")
        return op.eigenvectors[:, index]
    if spec.startswith("random:"):
        seed = int(spec.split(":", 1)[1])
        return np.random.default_rng(seed).standard_normal(grid.n_cells)
    if spec.startswith("bump:"):
        sigma = float(spec.split(":", 1)[1])
        if sigma <= 0:
            raise ValueError(f"bump width must be positive, got {sigma}")
        center = np.full(grid.dim, 0.5)
        delta = np.abs(grid.centers - center[None, :])
        delta = np.minimum(delta, 1.0 - delta)
        d = np.sqrt(np.sum(delta**2, axis=1))
        return np.exp(-(d**2) / (2 * sigma**2))
    raise ValueError(
        f"unknown function spec {spec!r}; use constant, eig:K, random:SEED or bump:SIGMA"
    )


def _density_model(spec: str, config: RunConfig) -> WeightModel:
    if spec == "one":
        return UNIT_WEIGHT
    if spec.startswith("w:"):
        delta = float(spec.split(":", 1)[1])
        return PowerWeight(config.weight_alpha * delta)
    raise ValueError(f"unknown density spec {spec!r}; use one or w:DELTA")


@main.command("sf")
@click.option("--kind", type=click.Choice(sorted(KIND_TOKENS)), required=True,
              help="square function family")
@click.option("--m", "--K", "order", type=int, default=None,
              help="semigroup order (family minimum when omitted)")
@click.option("--f", "f_spec", default="random:0", show_default=True,
              help="input function: constant, eig:K, random:SEED, bump:SIGMA")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON RunConfig file")
@click.option("--p", "p_values", multiple=True, type=float, default=(2.0,),
              show_default=True, help="exponents for the summary norms")
@click.option("--v", "v_specs", multiple=True, default=("one",), show_default=True,
              help="density for the summary norms: one or w:DELTA")
@click.option("--out-field", type=click.Path(dir_okay=False), default="sf_field.csv",
              show_default=True, help="per-cell values CSV")
@click.option("--out-summary", type=click.Path(dir_okay=False),
              default="sf_summary.json", show_default=True, help="summary JSON")
def cmd_sf(kind, order, f_spec, config_path, p_values, v_specs, out_field,
           out_summary):
    """Evaluate one square function on a configured grid."""
    try:
        config = RunConfig.from_dict(_load_json(config_path)) if config_path \
            else RunConfig()
        sf_kind = SquareFunctionKind(KIND_TOKENS[kind], order)
        op = config.build_operator()
        ladder = config.build_ladder(op.grid)
        f = _materialize_f(f_spec, op)
        values = evaluate(sf_kind, op, f, ladder)
        norms = [
            {"p": p, "v": v_spec,
             "norm": lp_norm(values, p, _density_model(v_spec, config),
                             op.weight, op.grid)}
            for p in p_values for v_spec in v_specs
        ]
    except (TypeError, ValueError) as exc:
        _fail(str(exc))

    payload = {**asdict(config), "kind": kind, "order": sf_kind.order,
               "f": f_spec}
    header = _header(payload, config.seed)
    result_to_csv(op.grid, values, out_field)
    with open(out_field) as fh:
        body = fh.read()
    _write_text(out_field, "".join(
        f"# {key} {value}\n" for key, value in header.items()
    ) + body)
    _write_text(out_summary, json.dumps({
        "header": header,
        "kind": kind,
        "family": sf_kind.family,
        "order": sf_kind.order,
        "f": f_spec,
        "config": asdict(config),
        "norms": norms,
    }, indent=2) + "\n")
    click.echo(f"wrote {out_field} and {out_summary}")


@main.command("verify")
@click.option("--suite", type=click.Choice([*sorted(SUITE_TOKENS), "all"]),
              default="all", show_default=True)
@click.option("--seed", type=int, default=None, help="overrides the config seed")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON SuiteConfig file")
@click.option("--threads", type=int, default=None,
              help="suite workers (default TENTCALC_THREADS or 1)")
@click.option("--out-json", type=click.Path(dir_okay=False),
              default="verify_report.json", show_default=True)
@click.option("--out-csv", type=click.Path(dir_okay=False),
              default="verify_report.csv", show_default=True)
def cmd_verify(suite, seed, config_path, threads, out_json, out_csv):
    """Run the check suites and write the reports."""
    try:
        data = _load_json(config_path) if config_path else {}
        if seed is not None:
            data["seed"] = seed
        config = SuiteConfig.from_dict(data)
        names = None if suite == "all" else [SUITE_TOKENS[suite]]
        reports = run_suites(config, names, threads=_resolve_threads(threads))
    except (TypeError, ValueError) as exc:
        _fail(str(exc))

    header = _header({**asdict(config), "suite": suite}, config.seed)
    json_text = json.dumps({
        "header": header,
        "reports": [r.to_json_dict() for r in reports],
    }, indent=2) + "\n"
    _write_text(out_json, json_text)
    csv_body = reports_to_csv(reports)
    _write_text(out_csv, "".join(
        f"# {key} {value}\n" for key, value in header.items()
    ) + csv_body)

    failed = [
        f"{r.suite}/{c.id}" for r in reports for c in r.checks
        if c.verdict != "pass"
    ]
    for report in reports:
        click.echo(f"{report.suite}: {'PASS' if report.passed else 'FAIL'}")
    click.echo(f"wrote {out_json} and {out_csv}")
    if failed:
        click.echo(f"failed checks: {', '.join(failed)}", err=True)
        sys.exit(3)


if __name__ == "__main__":
    main()
