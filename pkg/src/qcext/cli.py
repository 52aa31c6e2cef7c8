"""Batch experiment runner.

Usage::

    qcext --list
    qcext run config.json [--seed N] [--out path] [--format csv|json]

A config is a JSON object ``{"experiment": name, "params": {...}, "output": path,
"format": "csv" | "json", "seed": int}``. A parameter may be a scalar, a list,
or a range ``{"start": a, "stop": b, "step": h}`` (stop inclusive). Complex
numbers are written as ``[re, im]``.

Exit codes: 0 success, 2 configuration error, 3 a result failed its
numerical certificate.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import beltrami, extremal, grunsky, metrics, qcmap
from .errors import QCError
from .quadrature import DiskQuadrature

DEFAULT_SEED = 20240611


class ConfigError(QCError):
    """The experiment configuration is invalid."""


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "csv"
    seed: int = DEFAULT_SEED

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict) or "experiment" not in d:
            raise ConfigError("config must be an object with an 'experiment' key")
        unknown = set(d) - {"experiment", "params", "output", "format", "seed"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(d["experiment"], dict(d.get("params") or {}), d.get("output"),
                  d.get("format", "csv"), int(d.get("seed", DEFAULT_SEED)))
        if cfg.experiment not in REGISTRY:
            raise ConfigError(f"unknown experiment {cfg.experiment!r}; registry: {', '.join(REGISTRY)}")
        if cfg.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        return cfg


# --------------------------------------------------------------------------
# parameter helpers
# --------------------------------------------------------------------------

def _values(p: Any) -> list:
    if isinstance(p, dict):
        try:
            start, stop, step = p["start"], p["stop"], p["step"]
        except KeyError as exc:
            raise ConfigError(f"range needs start, stop, step: {p}") from exc
        if step == 0 or (stop - start) / step < 0:
            raise ConfigError(f"empty or infinite range {p}")
        count = int(round((stop - start) / step)) + 1
        vals = [round(start + i * step, 12) for i in range(count)]
        return [int(v) if all(isinstance(x, int) for x in (start, stop, step)) else v for v in vals]
    if isinstance(p, list):
        return list(p)
    return [p]


def _complex(v: Any) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex values are [re, im], got {v}")
        return complex(float(v[0]), float(v[1]))
    try:
        return complex(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"not a number: {v!r}") from exc


def _complex_list(p: Any) -> list[complex]:
    if isinstance(p, dict):
        return [complex(v) for v in _values(p)]
    if not isinstance(p, list):
        return [_complex(p)]
    return [_complex(v) for v in p]


def _get(params: dict, name: str, default: Any = None, required: bool = False) -> Any:
    if name in params:
        return params[name]
    if required:
        raise ConfigError(f"missing parameter {name!r}")
    return default


def _check_keys(params: dict, allowed: set[str]) -> None:
    extra = set(params) - allowed
    if extra:
        raise ConfigError(f"unknown parameters: {sorted(extra)}")


def _int(v: Any, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    return int(v)


def _quad(params: dict) -> DiskQuadrature:
    return DiskQuadrature(n_r=_int(_get(params, "n_r", 128), "n_r"),
                          n_theta=_int(_get(params, "n_theta", 512), "n_theta"))


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------

def _row(op: str, params: dict, value, error: float, certified: bool, **extra) -> dict:
    row = {"op": op}
    row.update(params)
    row.update(extra)
    row.update(value=value, error_estimate=error, certified=certified)
    return row


def _grunsky_vs_k(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"family", "b1", "t", "n", "N"})
    family = _get(params, "family", "affine")
    N = _int(_get(params, "N", 20), "N")
    rows = []
    if family == "affine":
        for b1 in _values(_get(params, "b1", required=True)):
            f = qcmap.family_map("affine", b1=_complex(b1))
            norm = grunsky.grunsky_norm(grunsky.grunsky_coefficients(f.series, N))
            k = f.k
            rows.append(_row("grunsky_norm", {"family": family, "param": b1, "N": N, "k": k},
                             norm.value, abs(norm.increment), norm.value <= k + 1e-8,
                             abs_diff_k=abs(norm.value - k),
                             atanh_kappa=float(np.arctanh(norm.value)),
                             teich_distance=metrics.teich_distance(k)))
        return rows
    if family not in ("koebe", "powered_koebe"):
        raise ConfigError(f"unknown family {family!r}")
    n = _int(_get(params, "n", 2 if family == "koebe" else 3), "n")
    for t in _values(_get(params, "t", required=True)):
        kw = {"t": _complex(t), "order": 2 * N + 4}
        if family == "powered_koebe":
            kw["n"] = n
        f = qcmap.to_sigma(qcmap.family_map(family, **kw))
        norm = grunsky.grunsky_norm(grunsky.grunsky_coefficients(f.series, N))
        k = f.k
        rows.append(_row("grunsky_norm", {"family": family, "param": t, "n": n, "N": N, "k": k},
                         norm.value, abs(norm.increment), norm.value <= k + 1e-8,
                         abs_diff_k=abs(norm.value - k),
                         atanh_kappa=float(np.arctanh(norm.value)),
                         teich_distance=metrics.teich_distance(k)))
    return rows


def _variation_consistency(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"eps", "N", "n_r", "n_theta"})
    N = _int(_get(params, "N", 4), "N")
    quad = DiskQuadrature(n_r=_int(_get(params, "n_r", 400), "n_r"),
                          n_theta=_int(_get(params, "n_theta", 400), "n_theta"))
    rows = []
    for eps in _values(_get(params, "eps", [1e-3])):
        eps = _complex(eps)
        # a callable coefficient forces the quadrature path instead of exact moments
        mu = beltrami.BeltramiCoeff.function(lambda z, e=eps: np.full(np.shape(z), e, complex), abs(eps))
        exact = qcmap.family_map("affine", b1=eps)
        b1 = qcmap.first_order_map(mu, quad, N)[-1]
        rel = abs(b1 - eps) / abs(eps)
        rows.append(_row("map_b1", {"eps": eps.real if eps.imag == 0 else str(eps), "N": N},
                         b1.real, rel, rel <= 1e-2, exact=eps.real, rel_err=rel))
        var = grunsky.grunsky_variation(mu, N, quad).alpha
        tab = grunsky.grunsky_coefficients(exact.series, N).alpha
        rel = float(np.max(np.abs(var - tab)) / abs(eps))
        rows.append(_row("grunsky_alpha", {"eps": eps.real if eps.imag == 0 else str(eps), "N": N},
                         var[0, 0].real, rel, rel <= 1e-2, exact=tab[0, 0].real, rel_err=rel))
    return rows


def _coefficient_table(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"n", "t"})
    t = _complex(_get(params, "t", 0.1))
    rows = []
    for n in _values(_get(params, "n", {"start": 3, "stop": 8, "step": 1})):
        n = _int(n, "n")
        f = qcmap.family_map("powered_koebe", n=n, t=t, order=n + 4)
        a_n = qcmap.taylor_coefficient(f, n)
        expected = 2 * t / (n - 1)
        err = abs(a_n - expected)
        rows.append(_row("a_n", {"n": n, "t": t.real}, a_n.real, err, err <= 1e-12,
                         expected=expected.real))
    return rows


def _kappa_n_table(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"n"})
    rows = []
    for n in _values(_get(params, "n", {"start": 3, "stop": 20, "step": 1})):
        n = _int(n, "n")
        b = extremal.kappa_n_bounds(n)
        ok = b.lower < b.upper and b.linear_at_lower > b.koebe_at_lower
        rows.append(_row("kappa_n_bounds", {"n": n}, b.lower, 0.0, ok, upper=b.upper,
                         linear_at_lower=b.linear_at_lower, koebe_at_lower=b.koebe_at_lower))
    return rows


def _golusin_property(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"m", "trials", "n_radial", "max_zeros"})
    trials = _int(_get(params, "trials", 1000), "trials")
    n_radial = _int(_get(params, "n_radial", 50), "n_radial")
    max_zeros = _int(_get(params, "max_zeros", 3), "max_zeros")
    rng = np.random.default_rng(seed)
    radii = np.linspace(0.0, 0.98, n_radial)
    rows = []
    for m in _values(_get(params, "m", [1, 2, 3])):
        m = _int(m, "m")
        violations, worst = 0, -np.inf
        for _ in range(trials):
            k = int(rng.integers(1, max_zeros + 1))
            zeros = np.sqrt(rng.uniform(0.01, 0.95 ** 2, k)) * np.exp(2j * np.pi * rng.uniform(size=k))
            g, c_m = metrics.blaschke(zeros, m, rotation=float(rng.uniform(0, 2 * np.pi)))
            phi = 2 * np.pi * rng.uniform()
            t = radii * np.exp(1j * phi)
            bound = np.array([metrics.golusin_bound(m, c_m, ti).value for ti in t])
            excess = np.abs(g(t)) - bound
            worst = max(worst, float(excess.max()))
            violations += int(np.sum(excess > 1e-10))
        # equality family on the ray arg t = arg c
        c = 0.6 * np.exp(0.7j)
        t = radii * np.exp(0.7j)
        eq_err = max(abs(abs(metrics.golusin_witness(m, c, ti)) - metrics.golusin_bound(m, c, ti).value)
                     for ti in t)
        rows.append(_row("golusin", {"m": m, "trials": trials, "n_radial": n_radial},
                         violations, eq_err, violations == 0 and eq_err <= 1e-12,
                         max_excess=worst))
    return rows


def _l1_span_distance(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"psi0", "e", "restarts", "n_r", "n_theta", "tol"})
    e = extremal.SpanBasis(tuple(_complex_list(_get(params, "e", required=True))))
    spec = _get(params, "psi0", "constant")
    if spec == "constant":
        psi0 = beltrami.QuadDifferential.constant(1.0)
    elif isinstance(spec, dict) and "rho" in spec:
        psi0 = beltrami.QuadDifferential.rho(_complex(spec["rho"]))
    elif isinstance(spec, dict) and "evaluation" in spec:
        psi0 = extremal.functional_derivative(extremal.FunctionalSpec.evaluation(
            _complex(spec["evaluation"]), normalization=spec.get("normalization", "fix1")))
    else:
        raise ConfigError("psi0 must be 'constant', {'rho': e} or {'evaluation': a}")
    res = extremal.l1_distance_to_span(psi0, e, _quad(params),
                                       restarts=_int(_get(params, "restarts", 8), "restarts"),
                                       seed=seed, tol=float(_get(params, "tol", 1e-3)))
    label = spec if isinstance(spec, str) else json.dumps(spec)
    row = _row("l1_distance", {"psi0": label, "e": json.dumps(_get(params, "e"))}, res.d,
               res.error, res.certified, max_residual=float(np.max(res.residuals)))
    for s, c in enumerate(res.coeffs):
        row[f"xi_{s + 1}"] = complex(c)
    return [row]


def _distortion_bound(params: dict, seed: int) -> list[dict]:
    _check_keys(params, {"a", "kappa", "M", "normalization", "n_r", "n_theta"})
    quad = _quad(params)
    M = _get(params, "M", 1.0)
    norm = _get(params, "normalization", "fix0")
    rows = []
    for a in _complex_list(_get(params, "a", required=True)):
        spec = extremal.FunctionalSpec.evaluation(a, M=M, normalization=norm)
        k0 = extremal.kappa0(spec, quad)
        for kappa in _values(_get(params, "kappa", [0.01])):
            b = extremal.distortion_bound(spec, float(kappa), quad)
            rows.append(_row("distortion_bound", {"a": a, "kappa": kappa, "M": M},
                             b.value, b.error, float(kappa) <= k0, kappa0=k0))
    return rows


REGISTRY: dict[str, Callable[[dict, int], list[dict]]] = {
    "grunsky-vs-k": _grunsky_vs_k,
    "variation-consistency": _variation_consistency,
    "coefficient-table": _coefficient_table,
    "kappa-n-table": _kappa_n_table,
    "golusin-property": _golusin_property,
    "l1-span-distance": _l1_span_distance,
    "distortion-bound": _distortion_bound,
}


def run_experiment(config: ExperimentConfig | dict) -> list[dict]:
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    try:
        return REGISTRY[config.experiment](config.params, config.seed)
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, QCError):
            raise
        raise ConfigError(f"invalid parameters for {config.experiment}: {exc}") from exc


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.15g}")
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return f"{v.real:.15g}{v.imag:+.15g}j"
    return v


def _cell(v: Any) -> str:
    v = _fmt(v)
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


def emit_report(rows: list[dict], format: str = "csv", path: str | None = None) -> str:
    """Render rows as CSV (header + rows) or a JSON array; write to ``path`` when given."""
    if not rows:
        raise QCError("no rows to emit")
    if format == "csv":
        header: list[str] = []
        for r in rows:
            header += [k for k in r if k not in header]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r[k]) if k in r else "" for k in header])
        text = buf.getvalue()
    elif format == "json":
        text = json.dumps([{k: _fmt(v) for k, v in r.items()} for r in rows], indent=1) + "\n"
    else:
        raise QCError(f"unknown format {format!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qcext", description="Run qcext experiments.")
    parser.add_argument("--list", action="store_true", help="list registered experiments")
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="path to a JSON config")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", default=None, help="output path (overrides the config)")
    run.add_argument("--format", choices=("csv", "json"), default=None)
    args = parser.parse_args(argv)

    if args.list:
        print("\n".join(REGISTRY))
        return 0
    if args.command != "run":
        parser.print_usage(sys.stderr)
        return 2
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        cfg = ExperimentConfig.from_dict(raw)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.format is not None:
            cfg.format = args.format
        rows = run_experiment(cfg)
    except (OSError, json.JSONDecodeError, QCError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = args.out or cfg.output
    text = emit_report(rows, cfg.format, out)
    if out is None:
        sys.stdout.write(text)
    if not all(r.get("certified", True) for r in rows):
        print("numerical certificate failed for at least one row", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
