"""Command-line orchestration.

Verbs: evaluate, stats {bootstrap,shapiro,mwu,cdf}, spectra, eq,
turing serve. Exit codes: 0 success, 2 usage, 3 I/O, 4 validation,
5 numeric. The SYNTHVAL_OUTPUTS environment variable sets the default
output directory.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .embedding import embed_dataset
from .equivariance import EquivarianceConfig, eq_score, resolve_operator
from .errors import (FormatError, IngestError, NumericError, SynthvalError,
                     ValidationError)
from .genmetrics import KidConfig, fid, kid
from .imagecore import load_dataset, read_manifest
from .spectral import average_power_spectrum, spectral_divergence, spectrum_slice
from .statlab import (bootstrap_mean_ci, ecdf_percentile, mann_whitney_u,
                      read_series, shapiro_wilk, tail_fraction)

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4
EXIT_NUMERIC = 5


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_grid_csv(path: str, grid: np.ndarray) -> None:
    _write_atomic(path, "\n".join(",".join(format(v, ".17g") for v in row)
                                  for row in grid) + "\n")


def _write_slices_csv(path: str, real_profile: np.ndarray, synth_profile: np.ndarray) -> None:
    lines = ["index,real,synth"]
    for i, (a, b) in enumerate(zip(real_profile, synth_profile)):
        lines.append(f"{i},{format(a, '.17g')},{format(b, '.17g')}")
    _write_atomic(path, "\n".join(lines) + "\n")


def _print_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


# -- evaluate ---------------------------------------------------------------

def _add_evaluate_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of defaults for any flag below")
    p.add_argument("--real-manifest")
    p.add_argument("--synth-manifest")
    p.add_argument("--outputs", default=os.environ.get("SYNTHVAL_OUTPUTS"))
    p.add_argument("--image-size", type=int)
    p.add_argument("--feature-dim", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--kid-block-size", type=int)
    p.add_argument("--eq-operator")
    p.add_argument("--eq-transforms", type=int)
    p.add_argument("--eq-seed", type=int)


_EVAL_DEFAULTS = {
    "real_manifest": None, "synth_manifest": None, "outputs": None,
    "image_size": 512, "feature_dim": 192, "seed": 0,
    "kid_block_size": 100, "eq_operator": "identity",
    "eq_transforms": 16, "eq_seed": 0,
}


def _resolve_eval_config(args: argparse.Namespace) -> dict:
    cfg = dict(_EVAL_DEFAULTS)
    if args.config:
        if not os.path.exists(args.config):
            raise IngestError(f"config file not found: {args.config}")
        with open(args.config) as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"config file does not parse: {exc}") from exc
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key in ("real_manifest", "synth_manifest", "outputs"):
        if not cfg[key]:
            raise ValidationError(f"missing required setting: {key}")
    return cfg


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _resolve_eval_config(args)
    os.makedirs(cfg["outputs"], exist_ok=True)

    real_manifest = read_manifest(cfg["real_manifest"])
    synth_manifest = read_manifest(cfg["synth_manifest"])
    size = cfg["image_size"]
    real_rgb = load_dataset(real_manifest, size, grayscale=False)
    synth_rgb = load_dataset(synth_manifest, size, grayscale=False)
    real_gray = [im.to_gray() for im in real_rgb]
    synth_gray = [im.to_gray() for im in synth_rgb]

    real_feat = embed_dataset(real_rgb, d=cfg["feature_dim"], seed=cfg["seed"])
    synth_feat = embed_dataset(synth_rgb, d=cfg["feature_dim"], seed=cfg["seed"])
    fid_value = fid(real_feat, synth_feat)
    kid_est, kid_se = kid(real_feat, synth_feat,
                          KidConfig(block_size=max(2, min(cfg["kid_block_size"],
                                                          real_feat.n, synth_feat.n))))

    op = resolve_operator(cfg["eq_operator"])
    eq_cfg = EquivarianceConfig(num_transforms=cfg["eq_transforms"], seed=cfg["eq_seed"])
    eq_t = eq_score(op, synth_gray, "translation", eq_cfg)
    eq_r = eq_score(op, synth_gray, "rotation", eq_cfg)

    real_spec = average_power_spectrum(real_gray)
    synth_spec = average_power_spectrum(synth_gray)
    divergence = spectral_divergence(real_spec, synth_spec)

    out = cfg["outputs"]
    _write_grid_csv(os.path.join(out, "real_power_spectrum.csv"), real_spec.values)
    _write_grid_csv(os.path.join(out, "synth_power_spectrum.csv"), synth_spec.values)
    for angle in (0, 45):
        _write_slices_csv(os.path.join(out, f"slice_{angle}deg.csv"),
                          spectrum_slice(real_spec, angle),
                          spectrum_slice(synth_spec, angle))

    config_hash = hashlib.sha256(
        json.dumps(cfg, sort_keys=True).encode()).hexdigest()
    report = {
        "fid": fid_value,
        "kid": {"estimate": kid_est, "std_error": kid_se},
        "eq_t": eq_t,
        "eq_r": eq_r,
        "spectral_divergence": divergence,
        "provenance": {
            "config": cfg,
            "config_hash": config_hash,
            "toolkit_version": __version__,
        },
    }
    body = json.dumps(report, sort_keys=True, indent=2)
    _write_atomic(os.path.join(out, "report.json"), body + "\n")
    print(body)
    return 0


# -- stats ------------------------------------------------------------------

def cmd_stats(args: argparse.Namespace) -> int:
    series = read_series(args.series)
    if args.sub == "bootstrap":
        tail = tail_fraction(series, args.tail)
        result = bootstrap_mean_ci(tail.values(), resamples=args.resamples,
                                   level=args.level, seed=args.seed)
        _print_json({"subcommand": "bootstrap", "tail_fraction": args.tail,
                     "n_tail": len(tail)} | result.to_dict())
    elif args.sub == "shapiro":
        tail = tail_fraction(series, args.tail)
        _print_json({"subcommand": "shapiro", "tail_fraction": args.tail,
                     "n_tail": len(tail)} | shapiro_wilk(tail.values()).to_dict())
    elif args.sub == "mwu":
        values = series.values()
        split = max(1, min(len(values) - 1, int(round(args.split * len(values)))))
        early, late = values[:split], values[split:]
        _print_json({"subcommand": "mwu", "split": args.split,
                     "n_early": len(early), "n_late": len(late)}
                    | mann_whitney_u(early, late).to_dict())
    elif args.sub == "cdf":
        tail = tail_fraction(series, args.tail)
        query = args.query if args.query is not None else series.values()[-1]
        pct = ecdf_percentile(tail.values(), query)
        _print_json({"subcommand": "cdf", "tail_fraction": args.tail,
                     "n_tail": len(tail), "query": query, "percentile": pct})
    return 0


# -- spectra ----------------------------------------------------------------

def cmd_spectra(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    images = load_dataset(manifest, args.image_size, grayscale=True, label=args.label)
    spec = average_power_spectrum(images)
    os.makedirs(args.outputs, exist_ok=True)
    _write_grid_csv(os.path.join(args.outputs, "power_spectrum.csv"), spec.values)
    for angle in (0, 45, 90, 135):
        profile = spectrum_slice(spec, angle)
        lines = ["index,value"] + [f"{i},{format(v, '.17g')}" for i, v in enumerate(profile)]
        _write_atomic(os.path.join(args.outputs, f"slice_{angle}deg.csv"),
                      "\n".join(lines) + "\n")
    _print_json({"images": len(images), "size": spec.size, "outputs": args.outputs})
    return 0


# -- eq ---------------------------------------------------------------------

def cmd_eq(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    images = load_dataset(manifest, args.image_size, grayscale=True, label=args.label)
    op = resolve_operator(args.operator)
    cfg = EquivarianceConfig(num_transforms=args.transforms, seed=args.seed,
                             rotation_set=args.rotation_set)
    score = eq_score(op, images, args.family, cfg)
    _print_json({"operator": args.operator, "family": args.family,
                 "num_transforms": args.transforms, "seed": args.seed,
                 "score_db": score})
    return 0


# -- turing serve -----------------------------------------------------------

def cmd_turing_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .turing import TuringStore, create_app
    if os.path.exists(args.log):
        store = TuringStore.replay(args.log)
    else:
        store = TuringStore(log_path=args.log)
    uvicorn.run(create_app(store), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synthval",
        description="Evaluate synthetic image corpora against real ones.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="end-to-end evaluation report")
    _add_evaluate_args(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_stats = sub.add_parser("stats", help="statistics over a metric-series CSV")
    stats_sub = p_stats.add_subparsers(dest="sub", required=True)
    for name in ("bootstrap", "shapiro", "mwu", "cdf"):
        sp = stats_sub.add_parser(name)
        sp.add_argument("--series", required=True)
        if name in ("bootstrap", "shapiro", "cdf"):
            sp.add_argument("--tail", type=float, default=0.3)
        if name == "bootstrap":
            sp.add_argument("--resamples", type=int, default=2000)
            sp.add_argument("--level", type=float, default=0.95)
            sp.add_argument("--seed", type=int, default=0)
        if name == "mwu":
            sp.add_argument("--split", type=float, default=0.5,
                            help="fraction of the series in the early sample")
        if name == "cdf":
            sp.add_argument("--query", type=float, default=None,
                            help="default: last value of the series")
        sp.set_defaults(func=cmd_stats)

    p_spec = sub.add_parser("spectra", help="average power spectrum + slices as CSV")
    p_spec.add_argument("--manifest", required=True)
    p_spec.add_argument("--label", default=None, choices=("real", "synthetic"))
    p_spec.add_argument("--image-size", type=int, default=512)
    p_spec.add_argument("--outputs", default=os.environ.get("SYNTHVAL_OUTPUTS", "."))
    p_spec.set_defaults(func=cmd_spectra)

    p_eq = sub.add_parser("eq", help="equivariance score of a built-in operator")
    p_eq.add_argument("--manifest", required=True)
    p_eq.add_argument("--label", default=None, choices=("real", "synthetic"))
    p_eq.add_argument("--operator", default="identity")
    p_eq.add_argument("--family", default="translation",
                      choices=("translation", "rotation"))
    p_eq.add_argument("--rotation-set", default="exact90",
                      choices=("exact90", "any_angle"))
    p_eq.add_argument("--image-size", type=int, default=512)
    p_eq.add_argument("--transforms", type=int, default=16)
    p_eq.add_argument("--seed", type=int, default=0)
    p_eq.set_defaults(func=cmd_eq)

    p_turing = sub.add_parser("turing", help="blinded grading service")
    turing_sub = p_turing.add_subparsers(dest="sub", required=True)
    p_serve = turing_sub.add_parser("serve")
    p_serve.add_argument("--log", required=True, help="JSONL event log path")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_turing_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, FormatError, OSError) as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericError, SynthvalError) as exc:
        print(f"error: numeric: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
