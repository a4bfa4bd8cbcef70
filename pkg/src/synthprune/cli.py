"""Command-line front end.

Every command writes CSV (or JSON for ``theory`` and ``validate``) whose
first line is ``# `` followed by a JSON record of the tool version, the
command, its arguments and the full config. Output depends only on the
arguments, so repeating a command reproduces the file byte for byte.

Exit codes: 0 success, 2 config or input error, 3 numerical-regime error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .config import FIELD_NAMES, ExperimentConfig, config_from_mapping, derive
from .datasets import estimate_mu_norm, load_csv, real_data_mixing_run, synthetic_count
from .errors import ConfigError, ConvergenceError, DataError, InvalidRegimeError, SynthPruneError
from .simulate import fit_generator_streaming, mean_vector, monte_carlo, spectrum, stream
from .theory import (
    CONVENTIONS,
    build_ledger,
    corollary_synthetic_stats,
    critical_epsilon,
    isotropic_stats,
    kolmogorov_distance,
    marchenko_pastur_density,
    marchenko_pastur_point_mass,
    marchenko_pastur_support,
    mixture_stats,
    solve_deltas,
    theorem1_stats,
)

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_VALIDATION = 0, 2, 3, 4

PRESETS = {
    "oracle": (0.0, 1.0),
    "none": (1.0, 1.0),
    "weak": (1.0, 0.5),
    "strong": (0.2, 0.9),
}

SWEEP_VARIABLES = ("synthetic_proportion", "epsilon", "p_over_n", "eta_s")
MODELS = ("theorem1", "isotropic", "corollary")

# base values used when neither a config file nor a flag provides them
DEFAULTS = dict(p=200, n=1000, m=1000, n_hat=1000, mu_norm=0.7, gamma=1.0)


class ValidationFailed(SynthPruneError):
    pass


# ---------------------------------------------------------------- helpers


def parse_grid(text: str) -> list[float]:
    """``a:b:steps`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            a, b, steps = text.split(":")
            steps = int(steps)
            if steps < 1:
                raise ValueError
            vals = np.linspace(float(a), float(b), steps).tolist()
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}; use a:b:steps or a comma list", "grid") from None
    if not vals:
        raise ConfigError("grid is empty", "grid")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("grid must be strictly ascending", "grid")
    return [float(v) for v in vals]


def parse_int_list(text: str, name: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}", name) from None
    if not vals:
        raise ConfigError("list is empty", name)
    return vals


def parse_presets(text: str) -> list[str]:
    names = [v.strip() for v in text.split(",") if v.strip()]
    for nm in names:
        if nm not in PRESETS:
            raise ConfigError(f"unknown preset {nm!r}, expected one of {sorted(PRESETS)}", "presets")
    return names


def fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def build_config(args: argparse.Namespace, **forced) -> ExperimentConfig:
    """Defaults, then the config file, then explicit flags, then ``forced``."""
    values: dict[str, Any] = dict(DEFAULTS)
    if args.config:
        path = Path(args.config)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        unknown = sorted(set(raw) - set(FIELD_NAMES))
        if unknown:
            raise ConfigError(f"unknown key {unknown[0]!r}", unknown[0])
        values.update(raw)
    for name in FIELD_NAMES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    values.update(forced)
    return config_from_mapping(values)


class Output:
    """Collects text and writes it once, to ``--out`` or stdout."""

    def __init__(self, path: str | None):
        self.path = path
        self.buf = io.StringIO()

    def header(self, meta: dict) -> None:
        self.buf.write("# " + json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n")

    def table(self, columns: Sequence[str], rows: Sequence[dict]) -> None:
        w = csv.writer(self.buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])

    def comment(self, record: dict) -> None:
        self.buf.write("# " + json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n")

    def json(self, obj: dict) -> None:
        self.buf.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")

    def close(self) -> None:
        text = self.buf.getvalue()
        if self.path:
            Path(self.path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


def metadata(args: argparse.Namespace, cfg: ExperimentConfig | None) -> dict:
    # the output path and thread count do not affect results
    skip = {"func", "config", "command", "out", "workers"}
    a = {k: v for k, v in sorted(vars(args).items()) if k not in skip and k not in FIELD_NAMES}
    meta = {"tool": "synthprune", "version": __version__, "command": args.command, "args": a}
    if cfg is not None:
        meta["config"] = cfg.to_dict()
        meta["seed"] = cfg.seed
    return meta


def edge_clustered(k: int) -> np.ndarray:
    """``k`` points on [0, 1] packed quartically toward both ends.

    The density has square-root edges (and a ``1/sqrt(x)`` pole at 0 when
    p = n_hat), so a trapezoid rule over these rows integrates to 1 within
    about 2e-4 already at k = 512, where a uniform grid is off by 4e-2.
    """
    t = np.linspace(0.0, 1.0, k)
    s = 0.5 * (1.0 - np.cos(np.pi * t))
    return 0.5 * (1.0 - np.cos(np.pi * s))


def guarded(fn: Callable[[], dict]) -> dict:
    """Run a per-row computation; numerical failures become an ``error`` field."""
    try:
        return fn()
    except (InvalidRegimeError, ConvergenceError, ConfigError) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def coupled_epsilon(cfg: ExperimentConfig, convention: str) -> float:
    """Error of a classifier trained on ``m`` clean synthetic samples only."""
    if cfg.m == 0:
        return cfg.epsilon
    acc = corollary_synthetic_stats(cfg.p / cfg.m, 1.0, 1.0, cfg.gamma, cfg.mu_norm**2,
                                    convention).accuracy
    return 1.0 - acc


def empirical(cfg: ExperimentConfig, args, generator: str = "fitted") -> dict:
    if args.trials <= 0:
        return {}
    s = monte_carlo(cfg, args.trials, args.n_test, generator=generator, workers=args.workers)
    return {"empirical_mean": s.mean_acc, "empirical_std": s.std_acc,
            "empirical_decision_mean": s.mean_decision_mean,
            "empirical_decision_var": s.mean_decision_var}


# ---------------------------------------------------------------- commands


def cmd_deltas(args) -> int:
    cfg = build_config(args)
    grid = parse_grid(args.grid or "0.05:2:40")
    out = Output(args.out)
    out.header(metadata(args, cfg))
    rows = []
    r0 = derive(cfg)
    for ratio in grid:
        # p/n = ratio with the sample-size proportions of the config kept fixed
        eta = ratio * cfg.n / (cfg.n + cfg.m) if cfg.n > 0 else ratio
        eta_hat = ratio * cfg.n / cfg.n_hat if cfg.n > 0 else ratio

        def one():
            d = solve_deltas(eta, eta_hat, r0.pi, r0.alpha, cfg.gamma, convention=args.convention)
            return {"delta_r": d.delta_r, "delta_s": d.delta_s, "delta_g": d.delta_g,
                    "iterations": d.iterations, "residual": d.residual}
        rows.append({"ratio": ratio, "eta": eta, "eta_hat": eta_hat, **guarded(one)})
    out.table(["ratio", "eta", "eta_hat", "delta_r", "delta_s", "delta_g", "iterations",
               "residual", "error"], rows)
    out.close()
    return EXIT_OK


def cmd_mixing(args) -> int:
    base = build_config(args)
    grid = parse_grid(args.grid or "0:0.9:10")
    presets = parse_presets(args.presets)
    out = Output(args.out)
    out.header(metadata(args, base))
    rows = []
    for prop in grid:
        m = synthetic_count(base.n, prop)
        for name in presets:
            rho, phi = PRESETS[name]
            cfg = base.with_(m=m, rho=rho, phi=phi)
            row = {"proportion": prop, "preset": name, "m": m}

            def one():
                c = cfg
                if args.epsilon_mode == "coupled":
                    c = c.with_(epsilon=coupled_epsilon(c, args.convention))
                res = {"epsilon": c.epsilon,
                       "theory_accuracy": mixture_stats(c, args.convention).accuracy}
                res.update(empirical(c, args))
                return res
            row.update(guarded(one))
            rows.append(row)
    out.table(["proportion", "preset", "m", "epsilon", "theory_accuracy", "empirical_mean",
               "empirical_std", "error"], rows)
    out.close()
    return EXIT_OK


def cmd_phase(args) -> int:
    base = build_config(args, n=0, sigma=1.0, beta=1.0, mu_perp_norm=0.0)
    grid = parse_grid(args.grid or "0:1:21")
    ms = parse_int_list(args.m_grid, "m_grid")
    out = Output(args.out)
    out.header(metadata(args, base))
    rows = []
    for m in ms:
        for eps in grid:
            row = {"epsilon": eps, "m": m, "eta_s": base.p / m}

            def one():
                cfg = base.with_(m=m, epsilon=eps)
                r = derive(cfg)
                th = corollary_synthetic_stats(r.eta_s, r.alpha, r.lam, cfg.gamma, cfg.mu_norm**2,
                                               args.convention)
                res = {"theory_accuracy": th.accuracy}
                res.update(empirical(cfg, args, generator="isotropic"))
                return res
            row.update(guarded(one))
            rows.append(row)
    out.table(["epsilon", "m", "eta_s", "theory_accuracy", "empirical_mean", "empirical_std", "error"],
              rows)
    out.close()
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = build_config(args)
    n_hats = parse_int_list(args.n_hat_grid, "n_hat_grid") if args.n_hat_grid else [cfg.n_hat]
    out = Output(args.out)
    out.header(metadata(args, cfg))
    rows = []
    mu = mean_vector(cfg.p, cfg.mu_norm)
    for j, nh in enumerate(n_hats):
        ratio = cfg.p / nh
        gen = fit_generator_streaming(nh, cfg.p, mu, stream(cfg.seed, "generator", 0, j))
        ev = spectrum(gen.cov_hat)
        rows += [{"kind": "eigenvalue", "n_hat": nh, "ratio": ratio, "index": i, "x": float(x)}
                 for i, x in enumerate(ev)]
        lo, hi = marchenko_pastur_support(ratio)
        xs = lo + (hi - lo) * edge_clustered(args.density_points)
        dens = marchenko_pastur_density(xs, ratio)
        rows += [{"kind": "density", "n_hat": nh, "ratio": ratio, "index": i, "x": float(x),
                  "value": float(v)} for i, (x, v) in enumerate(zip(xs, dens))]
        rows.append({"kind": "point_mass", "n_hat": nh, "ratio": ratio, "x": 0.0,
                     "value": marchenko_pastur_point_mass(ratio)})
        rows.append({"kind": "kolmogorov", "n_hat": nh, "ratio": ratio,
                     "value": kolmogorov_distance(ev, ratio)})
    out.table(["kind", "n_hat", "ratio", "index", "x", "value"], rows)
    out.close()
    return EXIT_OK


def theory_record(cfg: ExperimentConfig, model: str, convention: str) -> dict:
    r = derive(cfg)
    rec: dict[str, Any] = {"model": model, "convention": convention, "ratios": asdict(r)}
    if model == "theorem1":
        d = solve_deltas(r.eta, r.eta_hat, r.pi, r.alpha, cfg.gamma, convention=convention)
        led = build_ledger(d, r, cfg.gamma)
        rec["deltas"] = asdict(d)
        rec["ledger"] = asdict(led)
        st = theorem1_stats(led, cfg.mu_norm**2)
    elif model == "isotropic":
        st = isotropic_stats(cfg, convention)
    else:
        if cfg.n != 0 or cfg.m == 0:
            raise ConfigError("the synthetic-only model needs n = 0 and m > 0", "n")
        st = corollary_synthetic_stats(r.eta_s, r.alpha, r.lam, cfg.gamma, cfg.mu_norm**2, convention)
    if cfg.phi > 0:
        rec["critical_epsilon"] = critical_epsilon(cfg.rho, cfg.phi)
    rec["stats"] = st.to_dict()
    return rec


def cmd_theory(args) -> int:
    cfg = build_config(args)
    rec = theory_record(cfg, args.model, args.convention)
    out = Output(args.out)
    out.json({"meta": metadata(args, cfg), **rec})
    out.close()
    return EXIT_OK


def cmd_simulate(args) -> int:
    from .simulate import run_trials, summarize

    cfg = build_config(args)
    out = Output(args.out)
    out.header(metadata(args, cfg))
    results = run_trials(cfg, args.trials, args.n_test, generator=args.generator, workers=args.workers)
    out.table(["trial", "accuracy", "decision_mean", "decision_var", "kept"],
              [asdict(r) for r in results])
    out.comment({"summary": summarize(results)._asdict()})
    out.close()
    return EXIT_OK


def validation_report(cfg: ExperimentConfig, args) -> dict:
    """Theory vs simulation at one config; errors become failed checks."""
    checks = []
    report: dict[str, Any] = {"checks": checks}
    model = "isotropic" if args.generator == "isotropic" else "theorem1"
    try:
        th = theory_record(cfg, model, args.convention)
        report["theory"] = th
        th_stats = th["stats"]
    except SynthPruneError as exc:
        checks.append({"name": "theory", "passed": False, "error": f"{type(exc).__name__}: {exc}"})
        th_stats = None
    try:
        s = monte_carlo(cfg, args.trials, args.n_test, generator=args.generator, workers=args.workers)
        report["empirical"] = s._asdict()
    except SynthPruneError as exc:
        checks.append({"name": "empirical", "passed": False, "error": f"{type(exc).__name__}: {exc}"})
        s = None

    if th_stats is not None and s is not None:
        se = s.std_acc / math.sqrt(args.trials) if args.trials > 1 else float("nan")
        diff = s.mean_acc - th_stats["accuracy"]
        checks.append({"name": "accuracy", "theory": th_stats["accuracy"], "empirical": s.mean_acc,
                       "difference": diff, "z": diff / se if se and se > 0 else None,
                       "tolerance": args.tolerance, "passed": abs(diff) <= args.tolerance})
        for key, emp in (("mean", s.mean_decision_mean), ("variance", s.mean_decision_var)):
            # relative to the decision-function scale so a zero mean is handled
            scale = max(abs(th_stats[key]), math.sqrt(th_stats["variance"]) if key == "mean" else 0.0)
            rel = abs(emp - th_stats[key]) / scale
            checks.append({"name": f"decision_{key}", "theory": th_stats[key], "empirical": emp,
                           "relative_difference": rel, "tolerance": args.moment_tolerance,
                           "passed": rel <= args.moment_tolerance})
        r = derive(cfg)
        if abs(r.lam) <= 1e-9 and r.pi == 0:
            inside = all(0.47 <= v <= 0.53 for v in (th_stats["accuracy"], s.mean_acc))
            checks.append({"name": "chance_level", "theory": th_stats["accuracy"],
                           "empirical": s.mean_acc, "interval": [0.47, 0.53], "passed": inside})
    report["passed"] = bool(checks) and all(c["passed"] for c in checks)
    return report


def cmd_validate(args) -> int:
    cfg = build_config(args)
    report = validation_report(cfg, args)
    out = Output(args.out)
    out.json({"meta": metadata(args, cfg), **report})
    out.close()
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_ingest(args) -> int:
    data = load_csv(args.csv, args.label_column, args.positive_label)
    mu_norm = estimate_mu_norm(data)
    cfg = build_config(args, p=data.dim, mu_norm=mu_norm if mu_norm > 0 else 1e-12)
    grid = parse_grid(args.grid or "0:0.8:5")
    presets = parse_presets(args.presets)
    out = Output(args.out)
    meta = metadata(args, cfg)
    meta["dataset"] = {"rows": len(data), "features": data.dim, "label_values": list(data.label_values),
                       "estimated_mu_norm": mu_norm}
    out.header(meta)
    rows = []
    for name in presets:
        rho, phi = PRESETS[name]
        c = cfg.with_(rho=rho, phi=phi)
        recs = real_data_mixing_run(data, c, args.trials, grid, args.test_fraction)
        for prop in grid:
            accs = np.array([r.accuracy for r in recs if r.proportion == prop])
            m = synthetic_count(c.n, prop)
            row = {"proportion": prop, "preset": name, "m": m,
                   "empirical_mean": float(accs.mean()),
                   "empirical_std": float(accs.std(ddof=1)) if accs.size > 1 else 0.0,
                   "trials": int(accs.size)}
            row.update(guarded(lambda: {"theory_accuracy": mixture_stats(c.with_(m=m), args.convention).accuracy}))
            rows.append(row)
    out.table(["proportion", "preset", "m", "theory_accuracy", "empirical_mean", "empirical_std",
               "trials", "error"], rows)
    out.close()
    return EXIT_OK


@dataclass
class SweepSpec:
    variable: str
    grid: list[float]
    base: ExperimentConfig
    trials: int = 0
    n_test: int = 20000
    outputs: tuple[str, ...] = ("theory",)
    generator: str = "fitted"

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepSpec":
        allowed = {"variable", "grid", "base", "trials", "n_test", "outputs", "generator"}
        unknown = sorted(set(raw) - allowed)
        if unknown:
            raise ConfigError(f"unknown key {unknown[0]!r}", unknown[0])
        for key in ("variable", "grid", "base"):
            if key not in raw:
                raise ConfigError("required key is missing", key)
        if raw["variable"] not in SWEEP_VARIABLES:
            raise ConfigError(f"must be one of {SWEEP_VARIABLES}", "variable")
        grid = [float(v) for v in raw["grid"]]
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("must be nonempty and strictly ascending", "grid")
        outputs = tuple(raw.get("outputs", ["theory"]))
        if not outputs or any(o not in ("theory", "empirical") for o in outputs):
            raise ConfigError("must be a nonempty subset of {theory, empirical}", "outputs")
        spec = cls(raw["variable"], grid, config_from_mapping(raw["base"]), int(raw.get("trials", 0)),
                   int(raw.get("n_test", 20000)), outputs, raw.get("generator", "fitted"))
        for v in grid:
            spec.config_at(v)  # domain check
        return spec

    def config_at(self, value: float) -> ExperimentConfig:
        b = self.base
        if self.variable == "synthetic_proportion":
            return b.with_(m=synthetic_count(b.n, value))
        if self.variable == "epsilon":
            return b.with_(epsilon=value)
        if self.variable == "p_over_n":
            if b.n == 0 or value <= 0:
                raise ConfigError("p_over_n needs n > 0 and positive values", "grid")
            return b.with_(p=max(1, int(round(value * b.n))))
        if value <= 0:
            raise ConfigError("eta_s must be > 0", "grid")
        return b.with_(m=max(1, int(round(b.p / value))))


def cmd_sweep(args) -> int:
    try:
        raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read sweep spec: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep spec is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("sweep spec must hold a JSON object")
    spec = SweepSpec.from_dict(raw)
    if args.seed is not None:
        spec.base = spec.base.with_(seed=args.seed)
    if args.trials is not None and args.trials > 0:
        spec.trials = args.trials
    out = Output(args.out)
    meta = metadata(args, spec.base)
    meta["sweep"] = {"variable": spec.variable, "grid": spec.grid, "trials": spec.trials,
                     "n_test": spec.n_test, "outputs": list(spec.outputs), "generator": spec.generator}
    out.header(meta)
    rows = []
    model = "isotropic" if spec.generator == "isotropic" else "theorem1"
    for value in spec.grid:
        cfg = spec.config_at(value)
        row = {"value": value, "p": cfg.p, "n": cfg.n, "m": cfg.m, "epsilon": cfg.epsilon}

        def one():
            res = {}
            if "theory" in spec.outputs:
                st = theory_record(cfg, model, args.convention)["stats"]
                res.update({"theory_accuracy": st["accuracy"], "theory_mean": st["mean"],
                            "theory_variance": st["variance"]})
            if "empirical" in spec.outputs and spec.trials > 0:
                s = monte_carlo(cfg, spec.trials, spec.n_test, generator=spec.generator,
                                workers=args.workers)
                res.update({"empirical_mean": s.mean_acc, "empirical_std": s.std_acc,
                            "empirical_decision_mean": s.mean_decision_mean,
                            "empirical_decision_var": s.mean_decision_var})
            return res
        row.update(guarded(one))
        rows.append(row)
    out.table(["value", "p", "n", "m", "epsilon", "theory_accuracy", "theory_mean", "theory_variance",
               "empirical_mean", "empirical_std", "empirical_decision_mean", "empirical_decision_var",
               "error"], rows)
    out.close()
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser, trials_default: int = 0) -> None:
    g = p.add_argument_group("experiment parameters (override --config)")
    g.add_argument("--config", help="flat JSON config file")
    g.add_argument("--p", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--n-hat", dest="n_hat", type=int)
    g.add_argument("--mu-norm", dest="mu_norm", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--rho", type=float)
    g.add_argument("--phi", type=float)
    g.add_argument("--sigma", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--mu-perp-norm", dest="mu_perp_norm", type=float)
    g.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=trials_default,
                   help=f"Monte Carlo trials per point (default {trials_default}; 0 = theory only)")
    p.add_argument("--n-test", dest="n_test", type=int, default=20000)
    p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo trials")
    p.add_argument("--grid", help="a:b:steps or comma list")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--convention", choices=CONVENTIONS, default="paper",
                   help="normalization of the synthetic self-energy")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synthprune", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deltas", help="fixed-point deltas along a p/n grid")
    _add_common(p)
    p.set_defaults(func=cmd_deltas)

    p = sub.add_parser("mixing", help="accuracy versus synthetic proportion for pruner presets")
    _add_common(p)
    p.add_argument("--presets", default="oracle,weak")
    p.add_argument("--epsilon-mode", dest="epsilon_mode", choices=("fixed", "coupled"), default="fixed")
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("phase", help="synthetic-only accuracy versus label noise")
    _add_common(p)
    p.add_argument("--m-grid", dest="m_grid", default="200,1000,10000")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("spectrum", help="generator covariance eigenvalues and the MP law")
    _add_common(p)
    p.add_argument("--n-hat-grid", dest="n_hat_grid")
    p.add_argument("--density-points", dest="density_points", type=int, default=512,
                   help="density samples per n_hat, packed toward the support edges")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("theory", help="single-point theory as JSON")
    _add_common(p)
    p.add_argument("--model", choices=MODELS, default="theorem1")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("simulate", help="single-point Monte Carlo, one row per trial")
    _add_common(p, trials_default=10)
    p.add_argument("--generator", choices=("fitted", "isotropic"), default="fitted")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="theory versus simulation report (JSON)")
    _add_common(p, trials_default=20)
    p.add_argument("--generator", choices=("fitted", "isotropic"), default="fitted")
    p.add_argument("--tolerance", type=float, default=0.02, help="max |accuracy difference|")
    p.add_argument("--moment-tolerance", dest="moment_tolerance", type=float, default=0.1,
                   help="max relative difference of the decision mean and variance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ingest", help="mixing experiment on a labeled CSV dataset")
    _add_common(p, trials_default=5)
    p.add_argument("--csv", required=True)
    p.add_argument("--label-column", dest="label_column", required=True)
    p.add_argument("--positive-label", dest="positive_label")
    p.add_argument("--presets", default="oracle,none")
    p.add_argument("--test-fraction", dest="test_fraction", type=float, default=0.2)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sweep", help="generic sweep from a JSON spec file")
    p.add_argument("spec")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--convention", choices=CONVENTIONS, default="paper")
    p.set_defaults(func=cmd_sweep, config=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidRegimeError, ConvergenceError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ValidationFailed as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
