"""Command-line front end: simulation, estimation, Monte Carlo, heatmaps.

JSON model specs in; CSV/JSON results out.  Every file-producing run echoes
its fully resolved configuration to ``<out>.config.json``; re-running with
``--config <that file>`` reproduces the outputs bit for bit.  CSV dialect:
comma separated, ``.`` decimal point, one header row, ``#``-prefixed metadata
lines carrying the schema version.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path


from .blocks import INF
from .estimators import (
    ClusterFunctional,
    EstimatorConfig,
    cluster_size_probs,
    estimate_cluster_statistic,
    hill_estimate,
    resolve_block_length,
)
from .experiments import (
    EstimatorSetting,
    McConfig,
    default_k_grid,
    default_k_prime_grid,
    run_heatmap,
    run_mc,
    run_variance_comparison,
)
from .models import model_from_dict, model_to_dict, simulate
from .oracles import model_oracle, oracle_linear_cp
from .models import effective_filter, model_alpha

SCHEMA = "lpblocks.v1"

ESTIMATE_COLUMNS = ("estimator", "p", "alpha", "k", "b", "m", "estimate",
                    "plug_in_variance", "threshold", "seed")
MC_COLUMNS = ("rep", "seed", "estimate", "plug_in_variance", "k", "b", "alpha_used")
HEATMAP_COLUMNS = ("k", "k_prime", "sd", "mse", "mean", "reps")


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


# ---------------------------------------------------------------------------
# formatting / IO helpers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)  # shortest round-trip decimal
    return str(value)


def _write_csv(path, kind, config, columns, rows):
    lines = [f"# schema={SCHEMA} kind={kind}"]
    lines.append("# config=" + json.dumps(config, sort_keys=True))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(row.get(c)) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _echo_config(out_path, config):
    if out_path is None:
        return None
    sidecar = Path(str(out_path) + ".config.json")
    _write_json(sidecar, config)
    return sidecar


def _load_model(args):
    if getattr(args, "model_dict", None) is not None:
        return model_from_dict(args.model_dict)
    if args.model is None:
        raise ConfigError("--model is required")
    try:
        raw = json.loads(Path(args.model).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read model file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file is not valid JSON: {exc}") from exc
    try:
        return model_from_dict(raw)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def _parse_p(text):
    if text is None or text == "alpha":
        return "alpha"
    if text == "inf":
        return INF
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"p: expected a number, 'inf' or 'alpha', got {text!r}")


def _parse_alpha(text):
    if text is None:
        return None
    if text == "hill":
        return "hill"
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"alpha: expected a number or 'hill', got {text!r}")


def _parse_grid(text, default):
    """Grid spec: 'lo:hi', 'lo:hi:count' (geometric) or 'v1,v2,...'."""
    if text is None:
        return default
    if isinstance(text, (tuple, list)):  # already resolved (from --config)
        return tuple(int(v) for v in text)
    if ":" not in text:  # single value or explicit comma list
        try:
            return tuple(int(v) for v in text.split(","))
        except ValueError:
            raise ConfigError(f"grid: bad explicit list {text!r}")
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ConfigError(f"grid: expected 'lo:hi[:count]' or a comma list, got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
        num = int(parts[2]) if len(parts) == 3 else None
    except ValueError:
        raise ConfigError(f"grid: bad bounds in {text!r}")
    if not 0 < lo <= hi:
        raise ConfigError(f"grid: need 0 < lo <= hi in {text!r}")
    return default_k_grid(lo, hi, num)


# ---------------------------------------------------------------------------
# argument plumbing (sentinel defaults so --config can fill the gaps)
# ---------------------------------------------------------------------------

_HARD_DEFAULTS = {
    "format": "csv",
    "seed": 0,
    "threads": 1,
    "n": 12000,
    "reps": 500,
    "p": "alpha",
    "functional": "extremal-index",
    "oracle_reps": 100000,
}


def _build_parser():
    parser = argparse.ArgumentParser(prog="lpblocks", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(sp, *, out_required=False):
        sp.add_argument("--model", help="path to a model JSON file")
        sp.add_argument("--config", help="re-run from an echoed config sidecar")
        sp.add_argument("--out", required=out_required, help="output path")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n", type=int)

    sp = sub.add_parser("simulate", help="simulate one trajectory")
    add_common(sp)

    for name in ("estimate", "mc"):
        sp = sub.add_parser(name, help=f"{name} run")
        add_common(sp)
        sp.add_argument("--functional",
                        choices=("extremal-index", "sum-index", "cluster-size", "constant-one"))
        sp.add_argument("--j", type=int, nargs="+", help="cluster-size orders")
        sp.add_argument("--k", type=int)
        sp.add_argument("--b", type=int, help="block length override of floor(sqrt(n/k))")
        sp.add_argument("--p", help="block-norm exponent: number, 'inf' or 'alpha'")
        sp.add_argument("--alpha", help="tail index: number or 'hill'")
        sp.add_argument("--kprime", type=int, help="Hill order-statistic count")
        if name == "mc":
            sp.add_argument("--reps", type=int)
            sp.add_argument("--threads", type=int)
            sp.add_argument("--oracle-reps", dest="oracle_reps", type=int)

    sp = sub.add_parser("heatmap", help="(k, k') tuning grids with Hill-estimated alpha")
    add_common(sp)
    sp.add_argument("--functional",
                    choices=("extremal-index", "sum-index", "cluster-size", "constant-one"))
    sp.add_argument("--j", type=int, nargs="+")
    sp.add_argument("--k-grid", dest="k_grid")
    sp.add_argument("--kprime-grid", dest="kprime_grid")
    sp.add_argument("--reps", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--oracle-reps", dest="oracle_reps", type=int)

    sp = sub.add_parser("oracle", help="ground-truth cluster statistics")
    add_common(sp)
    sp.add_argument("--functional",
                    choices=("extremal-index", "sum-index", "cluster-size", "constant-one", "cp"))
    sp.add_argument("--j", type=int, nargs="+")
    sp.add_argument("--p", help="exponent for the cp query")
    sp.add_argument("--reps", type=int, help="Monte Carlo reps for Kesten oracles")

    sp = sub.add_parser("variance-compare", help="alpha-blocks vs classic variance contrast")
    add_common(sp)
    sp.add_argument("--k", type=int)
    sp.add_argument("--reps", type=int)
    sp.add_argument("--threads", type=int)
    return parser


def _merge_config(args):
    """Overlay an echoed config file under explicitly-given CLI flags."""
    if args.config is None:
        return args
    try:
        stored = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}")
    if stored.get("subcommand") != args.subcommand:
        raise ConfigError(
            f"config is for subcommand {stored.get('subcommand')!r}, not {args.subcommand!r}")
    for key, value in stored.items():
        if key in ("schema", "kind", "subcommand", "b_derived", "m", "seed_scheme"):
            continue
        if key == "model":
            if args.model is None:
                args.model_dict = value
            continue
        attr = key
        if getattr(args, attr, None) is None:
            setattr(args, attr, tuple(value) if isinstance(value, list) and key.endswith("grid") else value)
    return args


def _resolved(args, key):
    value = getattr(args, key, None)
    return _HARD_DEFAULTS.get(key) if value is None else value


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _estimator_parts(args, n):
    """Resolve (setting fields, echo dict) shared by estimate and mc."""
    k = getattr(args, "k", None)
    if k is None:
        raise ConfigError("--k is required")
    alpha = _parse_alpha(getattr(args, "alpha", None))
    kprime = getattr(args, "kprime", None)
    if alpha == "hill" or (alpha is None and kprime is not None):
        if kprime is None:
            raise ConfigError("--alpha hill requires --kprime")
        alpha = None
    if alpha is None and kprime is None:
        raise ConfigError("--alpha (or --alpha hill with --kprime) is required")
    p = _parse_p(_resolved(args, "p"))
    functional = _resolved(args, "functional")
    j_list = list(getattr(args, "j", None) or [])
    if functional == "cluster-size" and not j_list:
        raise ConfigError("--j is required for cluster-size")
    b = getattr(args, "b", None)
    b_derived = resolve_block_length(n, k, b)
    m = n // b_derived
    if b_derived > n:
        raise ConfigError("b: block longer than sample")
    if k > m - 1:
        raise ConfigError(f"k: too many extremal blocks (k={k} needs m-1={m - 1} >= k)")
    if kprime is not None and not 2 <= kprime < n:
        raise ConfigError("kprime: must satisfy 2 <= kprime < n")
    for j in j_list:
        if not 1 <= j <= b_derived:
            raise ConfigError(f"j: must satisfy 1 <= j <= b ({b_derived})")
    echo = {
        "functional": functional,
        "j": j_list or None,
        "k": k,
        "b": b,
        "b_derived": b_derived,
        "m": m,
        "p": "inf" if p == INF else p,
        "alpha": alpha if alpha is not None else "hill",
        "kprime": kprime,
    }
    return functional, j_list, k, b, p, alpha, kprime, echo


def _base_echo(args, subcommand, model):
    return {
        "schema": SCHEMA,
        "kind": "config",
        "subcommand": subcommand,
        "model": model_to_dict(model),
        "n": _resolved(args, "n"),
        "seed": _resolved(args, "seed"),
        "format": _resolved(args, "format"),
        "out": str(args.out) if args.out else None,
        "seed_scheme": {
            "master_seed": _resolved(args, "seed"),
            "replicate_seed": "SeedSequence((master_seed, 0, rep)) -> uint64",
            "oracle_seed": "SeedSequence((master_seed, 1, 0)) -> uint64",
        },
    }


def _cmd_simulate(args):
    model = _load_model(args)
    n = _resolved(args, "n")
    seed = _resolved(args, "seed")
    series = simulate(model, n, seed)
    config = _base_echo(args, "simulate", model)
    if args.out is None:
        raise ConfigError("--out is required for simulate")
    fmt = _resolved(args, "format")
    if fmt == "csv":
        lines = [f"# schema={SCHEMA} kind=series",
                 "# config=" + json.dumps(config, sort_keys=True), "x"]
        lines.extend(_fmt(float(v)) for v in series.values)
        Path(args.out).write_text("\n".join(lines) + "\n")
    else:
        _write_json(args.out, {"schema": SCHEMA, "kind": "series", "config": config,
                               "x": [float(v) for v in series.values]})
    _echo_config(args.out, config)
    print(f"wrote {args.out} (n={n}, seed={seed})")
    return 0


def _result_row(name, res, p, alpha, seed):
    return {
        "estimator": name,
        "p": "inf" if res.p_used == INF else res.p_used,
        "alpha": res.alpha_used,
        "k": res.k_used,
        "b": res.b_used,
        "m": res.m_used,
        "estimate": res.estimate,
        "plug_in_variance": res.plug_in_variance,
        "threshold": res.threshold,
        "seed": seed,
    }


def _cmd_estimate(args):
    model = _load_model(args)
    n = _resolved(args, "n")
    seed = _resolved(args, "seed")
    functional, j_list, k, b, p, alpha, kprime, echo = _estimator_parts(args, n)
    config = {**_base_echo(args, "estimate", model), **echo}

    series = simulate(model, n, seed)
    alpha_used = alpha if alpha is not None else hill_estimate(series, kprime)
    p_used = alpha_used if p == "alpha" else p
    cfg = EstimatorConfig(k=k, alpha=alpha_used, p=p_used, b=b)
    rows = []
    if functional == "cluster-size":
        all_res = cluster_size_probs(series, cfg, max(j_list))
        for j in j_list:
            rows.append(_result_row(f"cluster-size-j{j}", all_res[j - 1], p_used, alpha_used, seed))
    else:
        f = ClusterFunctional(functional, alpha=alpha_used)
        res = estimate_cluster_statistic(series, f, cfg)
        rows.append(_result_row(functional, res, p_used, alpha_used, seed))

    if args.out is not None:
        if _resolved(args, "format") == "csv":
            _write_csv(args.out, "estimate", config, ESTIMATE_COLUMNS, rows)
        else:
            _write_json(args.out, {"schema": SCHEMA, "kind": "estimate",
                                   "config": config, "rows": rows})
        _echo_config(args.out, config)
    first = rows[0]
    se = math.sqrt(first["plug_in_variance"] / k)
    print(f"{first['estimator']}: {first['estimate']:.6g} +- {se:.3g} (plug-in SE)"
          + (f"; wrote {args.out}" if args.out else ""))
    return 0


def _mc_paths(out, j_list):
    out = Path(out)
    if len(j_list) <= 1:
        return {None if not j_list else j_list[0]: out}
    return {j: out.with_name(f"{out.stem}_j{j}{out.suffix}") for j in j_list}


def _cmd_mc(args):
    model = _load_model(args)
    n = _resolved(args, "n")
    seed = _resolved(args, "seed")
    reps = _resolved(args, "reps")
    threads = _resolved(args, "threads")
    oracle_reps = _resolved(args, "oracle_reps")
    functional, j_list, k, b, p, alpha, kprime, echo = _estimator_parts(args, n)
    if args.out is None:
        raise ConfigError("--out is required for mc")
    config = {**_base_echo(args, "mc", model), **echo,
              "reps": reps, "threads": threads, "oracle_reps": oracle_reps}

    paths = _mc_paths(args.out, j_list if functional == "cluster-size" else [])
    written = []
    for j, path in paths.items():
        setting = EstimatorSetting(functional=functional, k=k, alpha=alpha, p=p,
                                   j=j, b=b, k_prime=kprime)
        report = run_mc(McConfig(model=model, n=n, reps=reps, estimator=setting,
                                 master_seed=seed),
                        threads=threads, oracle_mc_reps=oracle_reps)
        rows = [{
            "rep": r.rep, "seed": r.seed, "estimate": r.result.estimate,
            "plug_in_variance": r.result.plug_in_variance,
            "k": r.result.k_used, "b": r.result.b_used,
            "alpha_used": r.result.alpha_used,
        } for r in report.per_rep]
        run_config = {**config, "j": [j] if j is not None else None}
        if _resolved(args, "format") == "csv":
            _write_csv(path, "mc", run_config, MC_COLUMNS, rows)
        else:
            _write_json(path, {"schema": SCHEMA, "kind": "mc", "config": run_config,
                               "rows": rows})
        summary = {
            "schema": SCHEMA, "kind": "mc-summary",
            "functional": functional, "j": j, "k": k, "b": report.per_rep[0].result.b_used,
            "n": n, "reps": reps,
            "mean": report.mean, "sd": report.sd, "mse": report.mse_vs_oracle,
            "oracle": report.oracle.value,
            "oracle_provenance": report.oracle.provenance,
            "oracle_mc_stderr": report.oracle.mc_stderr,
            "gaussian_overlay": report.gaussian_overlay,
        }
        _write_json(Path(str(path) + ".summary.json"), summary)
        written.append(str(path))
    _echo_config(args.out, config)
    print("wrote " + ", ".join(written))
    return 0


def _cmd_heatmap(args):
    model = _load_model(args)
    n = _resolved(args, "n")
    seed = _resolved(args, "seed")
    reps = _resolved(args, "reps")
    threads = _resolved(args, "threads")
    oracle_reps = _resolved(args, "oracle_reps")
    functional = _resolved(args, "functional")
    j_list = list(getattr(args, "j", None) or [])
    if functional == "cluster-size" and not j_list:
        raise ConfigError("--j is required for cluster-size")
    k_grid = _parse_grid(getattr(args, "k_grid", None), default_k_grid())
    kp_grid = _parse_grid(getattr(args, "kprime_grid", None), default_k_prime_grid())
    if args.out is None:
        raise ConfigError("--out is required for heatmap")
    config = {**_base_echo(args, "heatmap", model),
              "functional": functional, "j": j_list or None,
              "k_grid": list(k_grid), "kprime_grid": list(kp_grid),
              "reps": reps, "threads": threads, "oracle_reps": oracle_reps}

    grid = run_heatmap(model, n, reps, k_grid, kp_grid, functional=functional,
                       master_seed=seed, j=(j_list[0] if j_list else None),
                       threads=threads, oracle_mc_reps=oracle_reps)
    rows = []
    for i, k in enumerate(grid.k_values):
        for l, kp in enumerate(grid.k_prime_values):
            skipped = math.isnan(grid.mean[i, l])
            rows.append({
                "k": k, "k_prime": kp,
                "sd": None if skipped else float(grid.sd[i, l]),
                "mse": None if skipped else float(grid.mse[i, l]),
                "mean": None if skipped else float(grid.mean[i, l]),
                "reps": 0 if skipped else reps,
            })
    if _resolved(args, "format") == "csv":
        _write_csv(args.out, "heatmap", config, HEATMAP_COLUMNS, rows)
    else:
        _write_json(args.out, {"schema": SCHEMA, "kind": "heatmap", "config": config,
                               "rows": rows})
    summary = {
        "schema": SCHEMA, "kind": "heatmap-summary",
        "oracle": grid.oracle.value,
        "oracle_provenance": grid.oracle.provenance,
        "oracle_mc_stderr": grid.oracle.mc_stderr,
        "skipped": [list(s) for s in grid.skipped],
        "k_values": list(grid.k_values), "kprime_values": list(grid.k_prime_values),
        "reps": reps,
    }
    _write_json(Path(str(args.out) + ".summary.json"), summary)
    _echo_config(args.out, config)
    print(f"wrote {args.out}")
    return 0


def _cmd_oracle(args):
    model = _load_model(args)
    seed = _resolved(args, "seed")
    functional = _resolved(args, "functional")
    reps = getattr(args, "reps", None) or 100000
    j_list = list(getattr(args, "j", None) or [])
    rows = []
    if functional == "cp":
        p = _parse_p(getattr(args, "p", None))
        if p == "alpha":
            p = model_alpha(model)
        coeffs = effective_filter(model)
        if coeffs is not None:
            value = oracle_linear_cp(coeffs, model_alpha(model), p)
            name, stderr = "oracle:linear-cp", None
        else:
            from .oracles import oracle_kesten_cp
            res = oracle_kesten_cp(model, p, reps=reps, seed=seed)
            value, stderr = res.mean, res.mc_stderr
            name = f"oracle:kesten-mc:cp(reps={reps},seed={seed})"
        rows.append({"estimator": name, "p": "inf" if p == INF else p,
                     "alpha": model_alpha(model), "estimate": value,
                     "plug_in_variance": stderr, "seed": seed})
    else:
        for j in (j_list or [None]):
            ov = model_oracle(model, functional, j=j, mc_reps=reps, seed=seed)
            rows.append({"estimator": ov.provenance, "p": None,
                         "alpha": model_alpha(model), "estimate": ov.value,
                         "plug_in_variance": ov.mc_stderr, "seed": seed})
            if functional != "cluster-size":
                break
    config = {**_base_echo(args, "oracle", model), "functional": functional,
              "j": j_list or None, "reps": reps}
    if args.out is not None:
        if _resolved(args, "format") == "csv":
            _write_csv(args.out, "oracle", config, ESTIMATE_COLUMNS, rows)
        else:
            _write_json(args.out, {"schema": SCHEMA, "kind": "oracle",
                                   "config": config, "rows": rows})
        _echo_config(args.out, config)
    for row in rows:
        print(f"{row['estimator']}: {row['estimate']:.6g}")
    return 0


def _cmd_variance_compare(args):
    model = _load_model(args)
    n = _resolved(args, "n")
    seed = _resolved(args, "seed")
    reps = _resolved(args, "reps")
    threads = _resolved(args, "threads")
    k = getattr(args, "k", None)
    if k is None:
        raise ConfigError("--k is required")
    config = {**_base_echo(args, "variance-compare", model),
              "k": k, "reps": reps, "threads": threads}
    cmp = run_variance_comparison(model, n, reps, k, master_seed=seed, threads=threads)
    payload = {
        "schema": SCHEMA, "kind": "variance-compare",
        "k_var_alpha_blocks": cmp.k_var_alpha_blocks,
        "k_var_classic": cmp.k_var_classic,
        "ratio": cmp.ratio,
        "mean_alpha_blocks": cmp.mean_alpha_blocks,
        "mean_classic": cmp.mean_classic,
        "k": cmp.k, "b": cmp.b, "reps": cmp.reps,
    }
    if args.out is not None:
        if _resolved(args, "format") == "csv":
            cols = tuple(c for c in payload if c not in ("schema", "kind"))
            _write_csv(args.out, "variance-compare", config, cols, [payload])
        else:
            _write_json(args.out, {**payload, "config": config})
        _echo_config(args.out, config)
    print(f"k*var alpha-blocks {cmp.k_var_alpha_blocks:.4g}, "
          f"classic {cmp.k_var_classic:.4g}, ratio {cmp.ratio:.4g}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "mc": _cmd_mc,
    "heatmap": _cmd_heatmap,
    "oracle": _cmd_oracle,
    "variance-compare": _cmd_variance_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args.model_dict = None
    try:
        args = _merge_config(args)
        return _COMMANDS[args.subcommand](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
