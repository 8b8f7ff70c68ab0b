"""Experiment driver: config-driven calibration, sampling and curve output.

Subcommands
-----------
``calibrate``  pilot prior-predictive run; prints the tolerance and writes the
               distance sample as a CSV for histogramming.
``run``        full pipeline: (optional) tolerance calibration, sampler,
               prior sample, likelihood curve; writes curve CSV(s) and a
               metadata report.
``compare``    pairwise sup-norm and argmax differences between curve CSVs.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 simulation budget exhausted. ``ABCINTLIK_OUT_DIR`` sets the default output
directory. Every output embeds the config hash and master seed, and reruns
with the same config produce byte-identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, backend, kde, likelihood, samplers
from .core import BudgetExhaustedError, ConfigurationError, NumericalError
from .models import gk as gk_mod
from .models.gk import GkModel
from .models.matched_pairs import MatchedPairsModel
from .models.poisson_ratio import PoissonRatioModel
from .models.semipar_gp import SemiparGpModel, make_covariates

EXAMPLES = ("poisson_ratio", "matched_pairs", "gk", "semipar")
SAMPLERS = ("rejection", "mcmc_movestay", "mcmc_retry")

_DEFAULTS = {
    "sampler": "rejection",
    "epsilon": "auto(0.05)",
    "n_draws": 1000,
    "chain_length": 10_000,
    "burn_in": None,
    "seed": 1,
    "pilot_n": 2000,
    "prior_draws": 20_000,
    "grid_size": 512,
    "bandwidth": "silverman",
    "use_prior_pdf": True,
    "log_scale": None,
    "kernel_scale": None,
    "output": {"prefix": "run"},
    "model": {},
}


def load_config(path: str, overrides: dict | None = None) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    merged = dict(_DEFAULTS)
    merged.update(cfg)
    merged["model"] = {**_DEFAULTS["model"], **cfg.get("model", {})}
    merged["output"] = {**_DEFAULTS["output"], **cfg.get("output", {})}
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    validate_config(merged)
    return merged


def validate_config(cfg: dict) -> None:
    if cfg.get("example") not in EXAMPLES:
        raise ConfigurationError(
            f"example must be one of {EXAMPLES}, got {cfg.get('example')!r}"
        )
    if cfg["sampler"] not in SAMPLERS:
        raise ConfigurationError(
            f"sampler must be one of {SAMPLERS}, got {cfg['sampler']!r}"
        )
    eps = cfg["epsilon"]
    if isinstance(eps, str):
        parse_auto_epsilon(eps)
    elif not (isinstance(eps, (int, float)) and eps >= 0):
        raise ConfigurationError("epsilon must be nonnegative or 'auto(q)'")
    if int(cfg["n_draws"]) < 1 or int(cfg["chain_length"]) < 1:
        raise ConfigurationError("n_draws and chain_length must be positive")
    bw = cfg["bandwidth"]
    valid_rule = isinstance(bw, dict) and bw.get("rule") == "mse-rate"
    if bw != "silverman" and not valid_rule:
        raise ConfigurationError(
            "bandwidth must be 'silverman' or {'rule': 'mse-rate', 'c': ..., 'd': ...}"
        )


def parse_auto_epsilon(spec: str) -> float:
    if not (spec.startswith("auto(") and spec.endswith(")")):
        raise ConfigurationError(f"epsilon string must look like 'auto(0.05)', got {spec!r}")
    q = float(spec[5:-1])
    if not 0.0 < q < 1.0:
        raise ConfigurationError("auto-epsilon quantile must be in (0, 1)")
    return q


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def build_model_and_data(cfg: dict):
    kind = cfg["example"]
    mc = cfg["model"]
    if kind == "poisson_ratio":
        model = PoissonRatioModel(
            n=int(mc.get("n", 10)),
            a0=float(mc.get("a0", 0.1)),
            b0=float(mc.get("b0", 0.1)),
        )
        observed = model.make_observed(
            mc.get("theta_true", [2.0, 4.0]), seed=int(mc.get("data_seed", 11))
        )
    elif kind == "matched_pairs":
        model = MatchedPairsModel(
            k_pairs=int(mc.get("k_pairs", 30)),
            psi_prior_mean=float(mc.get("psi_prior_mean", 0.0)),
            psi_prior_sd=float(mc.get("psi_prior_sd", 10.0)),
        )
        observed = model.make_observed(
            float(mc.get("psi_true", 1.0)), seed=int(mc.get("data_seed", 1))
        )
    elif kind == "gk":
        model = GkModel(
            n=int(mc.get("n", 1000)),
            c=float(mc.get("c", 0.8)),
            quantile_levels=tuple(mc.get("quantile_levels", list(gk_mod.DEFAULT_QUANTILE_LEVELS))),
        )
        observed = model.make_observed(
            mc.get("theta_true", [3.0, 1.0, 2.0, 0.5]), seed=int(mc.get("data_seed", 20))
        )
    else:
        n = int(mc.get("n", 40))
        x, z = make_covariates(n, seed=int(mc.get("covariate_seed", 4)))
        model = SemiparGpModel(x=x, z=z)
        observed = model.make_observed(
            mc.get("beta_true", [1.0, 2.0]),
            sigma2=float(mc.get("sigma2", 0.25)),
            tau2=float(mc.get("tau2", 1.0)),
            alpha=float(mc.get("alpha", 0.5)),
            seed=int(mc.get("data_seed", 13)),
        )
    return model, observed


def resolve_epsilon(cfg: dict, model, observed):
    """Tolerance from the config: a number, or a pilot-run quantile."""
    eps = cfg["epsilon"]
    if not isinstance(eps, str):
        return float(eps), None
    q = parse_auto_epsilon(eps)
    pilot = samplers.calibrate_tolerance(
        model, observed, pilot_n=int(cfg["pilot_n"]), q=q, seed=int(cfg["seed"])
    )
    return pilot.epsilon, pilot


def run_sampler(cfg: dict, model, observed, epsilon: float) -> samplers.AbcDraws:
    kernel_scale = cfg.get("kernel_scale")
    if kernel_scale is not None:
        kernel_scale = np.asarray(kernel_scale, dtype=float)
    abc_cfg = samplers.AbcConfig(
        epsilon=epsilon,
        seed=int(cfg["seed"]),
        target_accepts=int(cfg["n_draws"]),
        chain_length=int(cfg["chain_length"]),
        burn_in=None if cfg["burn_in"] is None else int(cfg["burn_in"]),
        kernel_scale=kernel_scale,
    )
    runner = {
        "rejection": samplers.rejection_abc,
        "mcmc_movestay": samplers.abc_mcmc_movestay,
        "mcmc_retry": samplers.abc_mcmc_retry,
    }[cfg["sampler"]]
    return runner(model, observed, abc_cfg)


def _posterior_bandwidth(cfg: dict, model, m: int):
    """None selects Silverman; the rate rule uses the summary dimension."""
    rule = cfg["bandwidth"]
    if rule == "silverman":
        return None
    return kde.mse_optimal_bandwidth(
        m, int(rule.get("d", model.summary_dim)), float(rule.get("c", 1.0))
    )


def build_curves(cfg: dict, model, draws: samplers.AbcDraws):
    """One likelihood curve per interest parameter of the example."""
    log_scale = cfg["log_scale"]
    if log_scale is None:
        log_scale = model.psi_support == "positive"
    grid_size = int(cfg["grid_size"])
    seed = int(cfg["seed"])
    bandwidth = _posterior_bandwidth(cfg, model, draws.m)

    if cfg["example"] == "gk":
        curves = {}
        for level in model.quantile_levels:
            post = gk_mod.quantile_transform(draws, level, model.c)
            pdf = model.prior_quantile_pdf(level)
            if cfg["use_prior_pdf"] and pdf is not None:
                prior_kwargs = {"prior_pdf": pdf}
            else:
                prior_kwargs = {
                    "prior_sample": gk_mod.prior_quantile_sample(
                        model, level, int(cfg["prior_draws"]), seed
                    )
                }
            curves[f"u{level:g}"] = likelihood.abc_integrated_likelihood(
                post,
                grid_size=grid_size,
                log_scale=log_scale,
                posterior_bandwidth=bandwidth,
                meta={"interest": f"quantile({level:g})"},
                **prior_kwargs,
            )
        return curves

    pdf = model.prior_psi_pdf(np.array([1.0]))
    if cfg["use_prior_pdf"] and pdf is not None:
        prior_kwargs = {"prior_pdf": model.prior_psi_pdf}
    else:
        prior_kwargs = {
            "prior_sample": samplers.prior_psi_sample(
                model, int(cfg["prior_draws"]), seed
            )[:, 0]
        }
    curve = likelihood.abc_integrated_likelihood(
        draws,
        grid_size=grid_size,
        log_scale=log_scale,
        posterior_bandwidth=bandwidth,
        **prior_kwargs,
    )
    return {"psi": curve}


def write_curve_csv(path: Path, curve: likelihood.LikelihoodCurve, header: str) -> None:
    lines = [header, "psi,value,masked"]
    for p, v, m in zip(curve.psi_grid, curve.values, curve.mask):
        lines.append(f"{float(p)!r},{float(v)!r},{int(m)}")
    path.write_text("\n".join(lines) + "\n")


def read_curve_csv(path: Path) -> likelihood.LikelihoodCurve:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("psi,"):
                continue
            p, v, m = line.split(",")
            rows.append((float(p), float(v), bool(int(m))))
    if len(rows) < 2:
        raise ValueError(f"{path}: not a curve file")
    arr = np.array(rows)
    return likelihood.LikelihoodCurve(arr[:, 0], arr[:, 1], "raw", arr[:, 2] > 0)


def write_distances_csv(path: Path, distances: np.ndarray, header: str) -> None:
    lines = [header, "distance"]
    lines.extend(f"{float(d)!r}" for d in distances)
    path.write_text("\n".join(lines) + "\n")


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get("ABCINTLIK_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_calibrate(args) -> int:
    cfg = load_config(args.config, {"seed": args.seed, "pilot_n": args.pilot_n})
    model, observed = build_model_and_data(cfg)
    q = args.quantile if args.quantile is not None else parse_auto_epsilon(
        cfg["epsilon"] if isinstance(cfg["epsilon"], str) else "auto(0.05)"
    )
    pilot = samplers.calibrate_tolerance(
        model, observed, pilot_n=int(cfg["pilot_n"]), q=q, seed=int(cfg["seed"])
    )
    digest = config_hash(cfg)
    header = f"# config_sha256={digest} seed={cfg['seed']}"
    out = _out_dir(args)
    prefix = cfg["output"]["prefix"]
    dist_path = out / f"{prefix}_pilot_distances.csv"
    write_distances_csv(dist_path, pilot.distances, header)
    print(json.dumps({
        "epsilon": pilot.epsilon,
        "quantile": pilot.quantile,
        "pilot_n": pilot.pilot_n,
        "distances_csv": str(dist_path),
        "config_sha256": digest,
    }, indent=2, sort_keys=True))
    return 0


def cmd_run(args) -> int:
    overrides = {
        "epsilon": args.epsilon,
        "sampler": args.sampler,
        "seed": args.seed,
        "n_draws": args.n_draws,
    }
    cfg = load_config(args.config, overrides)
    digest = config_hash(cfg)
    t_start = time.time()

    model, observed = build_model_and_data(cfg)
    epsilon, pilot = resolve_epsilon(cfg, model, observed)
    draws = run_sampler(cfg, model, observed, epsilon)
    curves = build_curves(cfg, model, draws)

    # nothing is written until every stage has finished
    out = _out_dir(args)
    prefix = cfg["output"]["prefix"]
    header = f"# config_sha256={digest} seed={cfg['seed']}"
    curve_files = {}
    for tag, curve in curves.items():
        path = out / f"{prefix}_curve_{tag}.csv"
        write_curve_csv(path, curve, header)
        curve_files[tag] = str(path)

    meta = {
        "version": __version__,
        "backend": backend.active_backend(),
        "config_sha256": digest,
        "example": cfg["example"],
        "sampler": draws.sampler,
        "seed": cfg["seed"],
        "epsilon": epsilon,
        "epsilon_rule": cfg["epsilon"] if isinstance(cfg["epsilon"], str) else "fixed",
        "pilot_quantile": None if pilot is None else pilot.quantile,
        "pilot_n": None if pilot is None else pilot.pilot_n,
        "acceptance_rate": draws.acceptance_rate,
        "n_proposals": draws.n_proposals,
        "init_attempts": draws.init_attempts,
        "n_draws": draws.m,
        "curves": {
            tag: {
                "file": Path(curve_files[tag]).name,
                "argmax": curves[tag].argmax(),
                "masked_points": curves[tag].masked_count,
                "bandwidth_posterior": curves[tag].meta["bandwidth_posterior"],
                "bandwidth_prior": curves[tag].meta["bandwidth_prior"],
                "log_scale": curves[tag].meta["log_scale"],
                "prior_form": curves[tag].meta["prior_form"],
            }
            for tag in curves
        },
    }
    if pilot is not None:
        pilot_path = out / f"{prefix}_pilot_distances.csv"
        write_distances_csv(pilot_path, pilot.distances, header)
        meta["pilot_distances_csv"] = pilot_path.name
    meta_path = out / f"{prefix}_meta.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

    print(json.dumps({"meta": str(meta_path), "curves": curve_files}, indent=2, sort_keys=True))
    print(f"run completed in {time.time() - t_start:.1f}s", file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    curves = [(p, read_curve_csv(Path(p))) for p in args.curves]
    pairs = []
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            (pa, ca), (pb, cb) = curves[i], curves[j]
            same_grid = ca.psi_grid.shape == cb.psi_grid.shape and np.array_equal(
                ca.psi_grid, cb.psi_grid
            )
            if not same_grid and not args.interpolate:
                raise ValueError(
                    f"{pa} and {pb} have different grids; pass --interpolate"
                )
            sup = likelihood.sup_norm_distance(ca, cb, interpolate=not same_grid)
            pairs.append({
                "a": pa,
                "b": pb,
                "sup_norm": sup,
                "argmax_difference": abs(ca.argmax() - cb.argmax()),
                "interpolated": not same_grid,
            })
    report = {"pairs": pairs}
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abcintlik",
        description="Integrated-likelihood curves for interest parameters via ABC",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="pilot run; pick a tolerance quantile")
    cal.add_argument("-c", "--config", required=True)
    cal.add_argument("--pilot-n", type=int, default=None)
    cal.add_argument("--quantile", type=float, default=None)
    cal.add_argument("--seed", type=int, default=None)
    cal.add_argument("--out-dir", default=None)
    cal.set_defaults(func=cmd_calibrate)

    run = sub.add_parser("run", help="calibrate, sample and write likelihood curves")
    run.add_argument("-c", "--config", required=True)
    run.add_argument("--epsilon", type=float, default=None)
    run.add_argument("--sampler", choices=SAMPLERS, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--n-draws", type=int, default=None)
    run.add_argument("--out-dir", default=None)
    run.set_defaults(func=cmd_run)

    cmp_ = sub.add_parser("compare", help="sup-norm and argmax differences of curves")
    cmp_.add_argument("curves", nargs="+")
    cmp_.add_argument("--interpolate", action="store_true")
    cmp_.add_argument("-o", "--output", default=None)
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; the interface reserves 2 for
        # numerical failures and 1 for usage errors
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except BudgetExhaustedError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
