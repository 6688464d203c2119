"""Command-line entry point.

Three subcommands cover the toolkit: ``verify`` (exact inequality checks),
``crossing`` (Monte Carlo or exact crossing experiments), and ``sweep``
(alpha sweeps with critical-point readout).  Every run writes a manifest
next to its results; result files contain no timing or other run-varying
fields, so reruns with the same seed are byte-identical regardless of
``--workers``.

Exit codes: 0 success, 1 an inequality check failed, 2 configuration error.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import os
import sys
import time
from fractions import Fraction
from importlib.metadata import version as pkg_version

import click

from . import exact, mc, sweep as sweep_mod
from .chroma import PATTERN_MASKS, ColorDistribution
from .events import (MAX_MONOTONE_GROUND, MonotoneProperty,
                     random_generated_property)
from .lattice import build_rectangle, build_rhombus
from .rng import RandomStream

SEED_ENV = "CHROMAPERC_SEED"

FUZZ_CASES = ("thm1_bc", "thm1_ad", "down_bc", "down_ad", "hk", "multi", "octo")


def _resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise click.UsageError(f"{SEED_ENV}={env!r} is not an integer")
    return 0


def _sig6(x: float) -> str:
    return f"{x:.6g}"


def _write_manifest(out_dir, command, config, seed, started, wall_time):
    os.makedirs(out_dir, exist_ok=True)
    manifest = {
        "command": command,
        "argv": sys.argv,
        "config": config,
        "master_seed": seed,
        "code_version": pkg_version("chromaperc"),
        "started_at": started,
        "finished_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "wall_time_s": wall_time,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _append_csv(path, fieldnames, rows):
    exists = os.path.exists(path)
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        if not exists:
            writer.writeheader()
        writer.writerows(rows)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


@click.group()
def main():
    """Colored-percolation experiments and exact inequality verification."""


# ---------------------------------------------------------------- verify --


def _fuzz_props(case, ground_size, k, stream):
    direction = {"thm1_bc": "upward", "thm1_ad": "upward"}.get(case, "downward")
    count = {"hk": 2, "octo": 4, "multi": k + 1}.get(case, 3)
    props = []
    for _ in range(count):
        num_gen = 1 + stream.randint(3)
        props.append(random_generated_property(direction, ground_size, num_gen,
                                               ground_size, stream))
    return props


def _report_rows(reports):
    rows = []
    for batch, rep in enumerate(reports):
        d = rep.to_dict()
        rows.append({
            "batch": batch,
            "case": d["case"],
            "ground_size": d["ground_size"],
            "lhs": f'{d["lhs"]["num"]}/{d["lhs"]["den"]}',
            "rhs": f'{d["rhs"]["num"]}/{d["rhs"]["den"]}',
            "direction": d["direction"],
            "holds": d["holds"],
            "pairwise_exact": rep.pairwise_ok(),
        })
    return rows


@main.command()
@click.option("--case", "case", required=True,
              type=click.Choice(FUZZ_CASES + ("single_edge",)))
@click.option("--ground-size", default=3, show_default=True)
@click.option("--batches", default=200, show_default=True)
@click.option("--k", default=2, show_default=True, help="multi case only")
@click.option("--seed", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
def verify(case, ground_size, batches, k, seed, fmt):
    """Exactly verify a correlation-inequality case on random monotone
    properties; exits 1 with the violating witness if any check fails."""
    seed = _resolve_seed(seed)
    if case == "single_edge":
        reports = exact.single_edge_reports()
    else:
        if not 1 <= ground_size <= MAX_MONOTONE_GROUND:
            raise click.UsageError(
                f"--ground-size must be in [1, {MAX_MONOTONE_GROUND}]")
        if case == "multi" and not 1 <= k <= 4:
            raise click.UsageError("--k must be in [1, 4]")
        if case == "multi" and (k + 1) * ground_size > 24:
            raise click.UsageError("multi enumeration too large: need "
                                   "(k+1)*ground_size <= 24")
        if case == "octo" and 8 ** ground_size > exact.MAX_COLORINGS:
            raise click.UsageError("octo ground size too large")
        stream = RandomStream(seed)
        reports = []
        for batch in range(batches):
            props = _fuzz_props(case, ground_size, k, stream.substream(batch))
            reports.append(exact.verify_case(case, props,
                                             k=k if case == "multi" else None))

    rows = _report_rows(reports)
    if fmt == "json":
        click.echo(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        click.echo(buf.getvalue(), nl=False)

    bad = [r for r in reports if not (r.holds and r.pairwise_ok())]
    if bad:
        click.echo(f"FAIL: {len(bad)} of {len(reports)} checks violated; "
                   f"first witness: {json.dumps(bad[0].to_dict())}", err=True)
        sys.exit(1)
    click.echo(f"ok: {len(reports)} checks hold exactly", err=True)


# -------------------------------------------------------------- crossing --


def _exact_crossing_payload(lattice_kind, size):
    if lattice_kind == "rectangle":
        lat = build_rectangle(size)
    elif lattice_kind == "rhombus":
        lat = build_rhombus(size)
    else:
        raise click.UsageError("--exact supports rectangle and rhombus only")
    if lat.num_elements > 20:
        raise click.UsageError("--exact lattice too large to enumerate")
    prop = MonotoneProperty.crossing(lat, "12", "34")
    payload = {
        "lattice": lattice_kind,
        "size": size,
        "p_half_crossing": _frac(exact.exact_half(prop)),
    }
    for pattern, masks in PATTERN_MASKS.items():
        payload[f"joint_{pattern}"] = _frac(
            exact.exact_joint([(prop, m) for m in masks], 4))
    if lattice_kind == "rhombus":
        dual = MonotoneProperty.crossing(lat, "14", "23")
        open_tab = prop.table()
        closed_tab = dual.table()[::-1]  # complement configuration, reversed index
        payload["duality_exactly_one"] = bool(
            (open_tab ^ closed_tab).all())
    return payload


def _frac(f: Fraction) -> dict:
    return {"num": str(f.numerator), "den": str(f.denominator)}


@main.command()
@click.option("--lattice", "lattice_kind", required=True,
              type=click.Choice(["rectangle", "rhombus", "hexagon"]))
@click.option("--size", required=True, type=int)
@click.option("--pattern", type=click.Choice(["bc", "ad"]), default="ad",
              show_default=True)
@click.option("--trials", default=100000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--exact", "exact_mode", is_flag=True,
              help="enumerate instead of sampling (small lattices)")
@click.option("--out", "out_dir", default="runs", show_default=True)
def crossing(lattice_kind, size, pattern, trials, seed, workers, fmt,
             exact_mode, out_dir):
    """Crossing-probability experiment on one lattice family."""
    seed = _resolve_seed(seed)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.perf_counter()
    if size < 1:
        raise click.UsageError("--size must be >= 1")

    if exact_mode:
        payload = _exact_crossing_payload(lattice_kind, size)
        os.makedirs(out_dir, exist_ok=True)
        _write_json(os.path.join(out_dir, "results.json"), payload)
        click.echo(json.dumps(payload, indent=2))
        _write_manifest(out_dir, "crossing", payload | {"exact": True}, seed,
                        started, time.perf_counter() - t0)
        return

    if trials < 1:
        raise click.UsageError("--trials must be >= 1")
    spec = mc.crossing_spec(lattice_kind, size, pattern, trials, seed, workers)
    est = mc.run(spec)
    experiment_id = f"{lattice_kind}-{size}-{pattern}-{trials}-{seed}"
    row = {
        "experiment_id": experiment_id,
        "lattice": lattice_kind,
        "size": size,
        "pattern": pattern,
        "N": trials,
        "seed": seed,
        "p_hat": est.p_hat,
        "stderr": est.stderr,
    }
    os.makedirs(out_dir, exist_ok=True)
    _append_csv(os.path.join(out_dir, "results.csv"), list(row.keys()), [row])
    _write_json(os.path.join(out_dir, "results.json"), row)
    if fmt == "json":
        click.echo(json.dumps(row, indent=2))
    else:
        click.echo(",".join(str(v) for v in row.values()))
    click.echo(f"p_hat = {_sig6(est.p_hat)} +/- {_sig6(est.stderr)} "
               f"(N={trials})", err=True)
    _write_manifest(out_dir, "crossing", row, seed, started, est.wall_time)


# ----------------------------------------------------------------- sweep --


def _parse_sizes(text):
    try:
        sizes = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise click.UsageError(f"bad --sizes {text!r}; expected e.g. 16,32")
    if not sizes or list(sizes) != sorted(set(sizes)) or sizes[0] < 2:
        raise click.UsageError("--sizes must be strictly increasing, all >= 2")
    return sizes


def _parse_alpha_grid(text, family):
    if text is None:
        return tuple(sweep_mod.default_alpha_grid(family))
    try:
        lo_s, hi_s, steps_s = text.split(":")
        lo, hi, steps = float(lo_s), float(hi_s), int(steps_s)
    except ValueError:
        raise click.UsageError(
            f"bad --alpha-grid {text!r}; expected start:stop:steps")
    if not (0.0 <= lo < hi <= 0.25) or steps < 2:
        raise click.UsageError("--alpha-grid must satisfy "
                               "0 <= start < stop <= 0.25 and steps >= 2")
    # clamp: accumulated float error can push the endpoint past 0.25
    return tuple(min(hi, lo + (hi - lo) * i / (steps - 1)) for i in range(steps))


@main.command("sweep")
@click.option("--family", required=True, type=click.Choice(sorted(sweep_mod.P_C)))
@click.option("--sizes", required=True)
@click.option("--alpha-grid", "alpha_grid", default=None,
              help="start:stop:steps; default straddles p_c/2")
@click.option("--trials", default=2000, show_default=True)
@click.option("--threshold", default=sweep_mod.DEFAULT_THRESHOLD, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--workers", default=1, show_default=True)
@click.option("--svg-out", "svg_out", default=None)
@click.option("--out", "out_dir", default="runs", show_default=True)
def sweep_cmd(family, sizes, alpha_grid, trials, threshold, seed, workers,
              svg_out, out_dir):
    """Sweep alpha for the 5-color deformation; report the critical alpha
    readout and the rigorous bound check against p_c/2."""
    seed = _resolve_seed(seed)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    t0 = time.perf_counter()
    sizes = _parse_sizes(sizes)
    alphas = _parse_alpha_grid(alpha_grid, family)
    if trials < 1:
        raise click.UsageError("--trials must be >= 1")
    config = sweep_mod.SweepConfig(family, sizes, alphas, trials, seed,
                                   workers=workers)
    points = sweep_mod.sweep(config)
    rows = sweep_mod.points_to_rows(points)
    alpha_est = sweep_mod.estimate_alpha_c(points, threshold) \
        if len(sizes) >= 2 else None

    os.makedirs(out_dir, exist_ok=True)
    _append_csv(os.path.join(out_dir, "curves.csv"), list(rows[0].keys()), rows)
    summary = {
        "family": family,
        "sizes": list(sizes),
        "alphas": list(alphas),
        "trials": trials,
        "seed": seed,
        "curves": rows,
    }
    if alpha_est is not None:
        summary["alpha_c"] = {
            "per_size": {str(L): a for L, a in alpha_est.per_size.items()},
            "alpha_c_hat": alpha_est.alpha_c_hat,
            "bound_p_c_half": alpha_est.bound,
            "bound_ok": alpha_est.bound_ok,
            "conjectured_equality": "alpha_c = p_c/2 (reported, not asserted)",
        }
    _write_json(os.path.join(out_dir, "results.json"), summary)
    if svg_out:
        with open(svg_out, "w") as fh:
            fh.write(sweep_mod.render_svg(points, title=family))
    click.echo(json.dumps(summary, indent=2))
    if alpha_est is not None:
        status = "ok" if alpha_est.bound_ok else "VIOLATED"
        click.echo(f"alpha_c_hat = {alpha_est.alpha_c_hat} "
                   f"(rigorous bound {_sig6(alpha_est.bound)}: {status})", err=True)
    _write_manifest(out_dir, "sweep",
                    {k: v for k, v in summary.items() if k != "curves"},
                    seed, started, time.perf_counter() - t0)
    if alpha_est is not None and not alpha_est.bound_ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
