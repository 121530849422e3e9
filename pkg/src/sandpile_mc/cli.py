"""Command-line entry point.

One subcommand per claim the toolkit can check:

  formula       tabulate the asymptotic height law
  bethe         tabulate the Bethe-lattice height law
  simulate-box  origin-height distribution from the sandpile chain
  ust-box       W-degree distribution from spanning trees of the box
  estimate-qd   W-degree distribution from the truncated infinite-volume sampler
  rw-return     windowed return probability of the simple random walk
  compare       estimate-qd plus PASS/FAIL verdicts against the closed forms
  sensitivity   estimate-qd swept over kill radii (truncation diagnostic)

Reports are CSV (default) or JSON and embed the full resolved
configuration; reruns with identical flags write byte-identical files.
Each report also renders a PNG figure next to it unless --no-figure is
given.  The default output directory is $SANDPILE_MC_OUT or the working
directory.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, fields

from . import __version__, figures
from .asymptotics import bethe_table, formula_table, p_from_q, poisson_weight
from .lattice import make_box
from .report import formula_rows, round12, table_rows, verdict_dict, write_report
from .runner import run_partitioned
from .sandpile import default_burn_in, default_thin, sample_heights
from .spanning import estimate_q_finite, estimate_q_infinite
from .stats import compare, compare_values
from .walk import estimate_return, fourier_bound

VERSION_STRING = f"sandpile-mc {__version__}"
OUTPUT_DIR_ENV = "SANDPILE_MC_OUT"


@dataclass
class RunConfig:
    """Fully resolved run parameters; every field is echoed in the report."""

    command: str
    dim: int
    radius: int | None = None
    samples: int | None = None
    seed: int = 0
    burn_in: int | None = None
    thin: int | None = None
    kill_radius: int | None = None
    max_steps: int | None = None
    horizon: int | None = None
    workers: int = 1
    output_format: str = "csv"
    output_path: str | None = None
    max_i: int | None = None
    k: float | None = None
    variant: str | None = None
    n_min: int | None = None
    radii: str | None = None
    figure: bool = True


def _add_output_flags(sp):
    sp.add_argument("--seed", type=int, default=0, help="64-bit run seed (default 0)")
    sp.add_argument("--workers", type=int, default=1,
                    help="independent sample streams merged into one report (default 1)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
    sp.add_argument("--output", dest="output_path", default=None,
                    help="report path (default: derived name in $SANDPILE_MC_OUT or cwd)")
    sp.add_argument("--no-figure", dest="figure", action="store_false",
                    help="skip the PNG figure next to the report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sandpile-mc", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=VERSION_STRING)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("formula", help="tabulate the asymptotic height law")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--max-i", type=int, default=None, dest="max_i")
    sp.add_argument("--variant", choices=("exact-sum", "leading"), default="exact-sum")
    _add_output_flags(sp)

    sp = sub.add_parser("bethe", help="tabulate the Bethe-lattice height law")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--max-i", type=int, default=None, dest="max_i")
    _add_output_flags(sp)

    sp = sub.add_parser("simulate-box", help="height law from the sandpile chain")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--burn-in", type=int, default=None, dest="burn_in",
                    help="chain steps discarded (default 10*N*2d)")
    sp.add_argument("--thin", type=int, default=None,
                    help="chain steps between samples (default N)")
    _add_output_flags(sp)

    sp = sub.add_parser("ust-box", help="W-degree law from box spanning trees")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--radius", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100000)
    _add_output_flags(sp)

    sp = sub.add_parser("estimate-qd", help="W-degree law, rooted-at-infinity sampler")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--kill-radius", type=int, default=6, dest="kill_radius")
    sp.add_argument("--max-steps", type=int, default=100000, dest="max_steps")
    sp.add_argument("--samples", type=int, default=100000)
    _add_output_flags(sp)

    sp = sub.add_parser("rw-return", help="windowed return probability of the walk")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--n-min", type=int, default=2, dest="n_min", choices=(2, 4))
    sp.add_argument("--horizon", type=int, default=10000)
    sp.add_argument("--samples", type=int, default=100000)
    _add_output_flags(sp)

    sp = sub.add_parser("compare", help="estimate-qd with closed-form verdicts")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--kill-radius", type=int, default=6, dest="kill_radius")
    sp.add_argument("--max-steps", type=int, default=100000, dest="max_steps")
    sp.add_argument("--samples", type=int, default=100000)
    sp.add_argument("--k", type=float, default=3.0, help="z-score pass threshold")
    _add_output_flags(sp)

    sp = sub.add_parser("sensitivity", help="estimate-qd swept over kill radii")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--radii", default="4,8", help="comma-separated kill radii")
    sp.add_argument("--max-steps", type=int, default=100000, dest="max_steps")
    sp.add_argument("--samples", type=int, default=100000)
    _add_output_flags(sp)

    return p


def _default_path(cfg: RunConfig) -> str:
    parts = [cfg.command, f"d{cfg.dim}"]
    if cfg.radius is not None:
        parts.append(f"L{cfg.radius}")
    if cfg.kill_radius is not None:
        parts.append(f"R{cfg.kill_radius}")
    if cfg.radii is not None:
        parts.append("R" + cfg.radii.replace(",", "-"))
    if cfg.samples is not None:
        parts.append(f"n{cfg.samples}")
    parts.append(f"seed{cfg.seed}")
    name = "_".join(parts) + "." + cfg.output_format
    outdir = os.environ.get(OUTPUT_DIR_ENV, ".")
    return os.path.join(outdir, name)


def _config_items(cfg: RunConfig) -> list:
    return [(f.name, getattr(cfg, f.name)) for f in fields(cfg)]


def _figure_path(report_path: str) -> str:
    stem, _ = os.path.splitext(report_path)
    return stem + ".png"


def run_command(cfg: RunConfig):
    """Execute one subcommand; returns (exit_code, report_path)."""
    handler = {
        "formula": _cmd_formula,
        "bethe": _cmd_bethe,
        "simulate-box": _cmd_simulate_box,
        "ust-box": _cmd_ust_box,
        "estimate-qd": _cmd_estimate_qd,
        "rw-return": _cmd_rw_return,
        "compare": _cmd_compare,
        "sensitivity": _cmd_sensitivity,
    }[cfg.command]
    started = time.perf_counter()
    rows, diagnostics, verdict, render = handler(cfg)
    path = cfg.output_path or _default_path(cfg)
    cfg.output_path = path
    write_report(path, cfg.output_format, VERSION_STRING, _config_items(cfg),
                 rows, diagnostics, verdict)
    if cfg.figure and render is not None:
        render(_figure_path(path))
    elapsed = time.perf_counter() - started
    print(f"wrote {path} in {elapsed:.1f}s", file=sys.stderr)
    if verdict is not None:
        overall = verdict["passed"] if isinstance(verdict, dict) else verdict.passed
        print(f"verdict: {'PASS' if overall else 'FAIL'}", file=sys.stderr)
    return 0, path


def _cmd_formula(cfg):
    max_i = cfg.max_i if cfg.max_i is not None else 2 * cfg.dim - 1
    table = formula_table(cfg.dim, max_i, cfg.variant or "exact-sum")
    rows = formula_rows(table.values)
    diag = dict(table.metadata)

    def render(png):
        vals = [table.values[i] for i in sorted(table.values)]
        figures.save_distribution(png, sorted(table.values), vals,
                                  title=f"asymptotic height law, d={cfg.dim}", ylabel="probability")

    return rows, diag, None, render


def _cmd_bethe(cfg):
    max_i = cfg.max_i if cfg.max_i is not None else cfg.dim - 1
    table = bethe_table(cfg.dim, max_i)
    rows = formula_rows(table.values)
    diag = {"total_mass_i_0_to_dm1": round12(table.metadata["total_mass_i_0_to_dm1"]),
            "note": table.metadata["note"]}

    def render(png):
        vals = [table.values[i] for i in sorted(table.values)]
        figures.save_distribution(png, sorted(table.values), vals,
                                  title=f"Bethe-lattice height law, degree {cfg.dim}",
                                  ylabel="probability")

    return rows, diag, None, render


def _cmd_simulate_box(cfg):
    box = make_box(cfg.dim, cfg.radius)
    if cfg.burn_in is None:
        cfg.burn_in = default_burn_in(box)
    if cfg.thin is None:
        cfg.thin = default_thin(box)

    def task(n, rng):
        return sample_heights(cfg.dim, cfg.radius, cfg.burn_in, cfg.thin, n, rng)

    table = run_partitioned(task, cfg.samples, cfg.seed, cfg.workers)
    rows = table_rows(table)

    def render(png):
        figures.save_distribution(png, table.labels, table.proportions, table.stderrs,
                                  title=f"origin height law, d={cfg.dim}, L={cfg.radius}")

    return rows, dict(table.diagnostics), None, render


def _cmd_ust_box(cfg):
    def task(n, rng):
        return estimate_q_finite(cfg.dim, cfg.radius, n, rng)

    table = run_partitioned(task, cfg.samples, cfg.seed, cfg.workers)
    rows = table_rows(table)

    def render(png):
        figures.save_distribution(png, table.labels, table.proportions, table.stderrs,
                                  title=f"W-degree law on the box, d={cfg.dim}, L={cfg.radius}")

    return rows, dict(table.diagnostics), None, render


def _qd_table(cfg):
    def task(n, rng):
        return estimate_q_infinite(cfg.dim, cfg.kill_radius, cfg.max_steps, n, rng)

    return run_partitioned(task, cfg.samples, cfg.seed, cfg.workers)


def _qd_diagnostics(table):
    diag = dict(table.diagnostics)
    total = diag.get("walks_total", 0)
    if total:
        diag["capped_walk_fraction"] = round12(diag["walks_capped"] / total)
        diag["escaped_walk_fraction"] = round12(diag["walks_escaped"] / total)
    diag["mean_degree"] = round12(table.moment(1))
    return diag


def _cmd_estimate_qd(cfg):
    table = _qd_table(cfg)
    rows = table_rows(table)
    diag = _qd_diagnostics(table)
    ref = [poisson_weight(i) for i in range(2 * cfg.dim)]

    def render(png):
        figures.save_distribution(png, table.labels, table.proportions, table.stderrs,
                                  reference=ref, ref_name="Poisson(1) weights",
                                  title=f"W-degree law, d={cfg.dim}, kill radius {cfg.kill_radius}")

    return rows, diag, None, render


def _cmd_rw_return(cfg):
    def task(n, rng):
        return estimate_return(cfg.dim, cfg.n_min, cfg.horizon, n, rng)

    table = run_partitioned(task, cfg.samples, cfg.seed, cfg.workers)
    rows = table_rows(table)
    p_hat = table.proportions[1]
    diag = {
        "return_probability": round12(p_hat),
        "return_stderr": round12(table.stderrs[1]),
        "fourier_bound_at_horizon_start": round12(
            fourier_bound(cfg.dim, max(cfg.n_min, cfg.dim))
        ),
    }

    def render(png):
        figures.save_distribution(png, table.labels, table.proportions, table.stderrs,
                                  title=f"return within [{cfg.n_min}, {cfg.horizon}], d={cfg.dim}")

    return rows, diag, None, render


def _cmd_compare(cfg):
    table = _qd_table(cfg)
    d = cfg.dim
    poisson_ref = [poisson_weight(i) for i in range(2 * d)]
    verdict_q = compare(table, poisson_ref, cfg.k)
    height = p_from_q(table, d)
    from .asymptotics import formula_p

    labels = sorted(height.values)
    ref_p = [formula_p(d, i) for i in labels]
    verdict_p = compare_values(labels, [height.values[i] for i in labels],
                               [height.stderr[i] for i in labels], ref_p,
                               cfg.k, 1.0 / table.total)
    verdict = {
        "passed": verdict_q.passed and verdict_p.passed,
        "k": cfg.k,
        "q_vs_poisson": verdict_dict(verdict_q),
        "p_vs_formula": verdict_dict(verdict_p),
    }
    rows = [dict(r, label=f"q:{r['label']}") for r in table_rows(table)]
    rows += [
        {"label": f"p:{i}", "count": None, "proportion": height.values[i],
         "stderr": height.stderr[i]}
        for i in labels
    ]
    diag = _qd_diagnostics(table)

    def render(png):
        figures.save_compare(png, list(table.labels), list(table.proportions), poisson_ref,
                             labels, [height.values[i] for i in labels], ref_p,
                             title=f"d={d}: estimates vs closed forms")

    return rows, diag, verdict, render


def _cmd_sensitivity(cfg):
    try:
        radii = [int(r) for r in cfg.radii.split(",") if r]
    except ValueError as exc:
        raise ValueError(f"bad --radii {cfg.radii!r}") from exc
    if len(radii) < 2:
        raise ValueError("sensitivity needs at least two kill radii")
    tables = {}
    for idx, r in enumerate(radii):
        def task(n, rng, _r=r):
            return estimate_q_infinite(cfg.dim, _r, cfg.max_steps, n, rng)

        # stream offset per radius so sweeps stay independent
        tables[r] = run_partitioned(task, cfg.samples, cfg.seed + idx, cfg.workers)
    rows = []
    for r in radii:
        for row in table_rows(tables[r]):
            rows.append(dict(row, label=f"R{r}:{row['label']}"))
    diag = {}
    base = radii[0]
    for r in radii[1:]:
        a, b = tables[base], tables[r]
        worst = 0.0
        for pa, sa, pb, sb in zip(a.proportions, a.stderrs, b.proportions, b.stderrs):
            se = max((sa * sa + sb * sb) ** 0.5, 1.0 / a.total)
            worst = max(worst, abs(pa - pb) / se)
        diag[f"worst_z_R{base}_vs_R{r}"] = round12(worst)

    def render(png):
        series = {f"R={r}": (list(t.proportions), list(t.stderrs)) for r, t in tables.items()}
        figures.save_sweep(png, list(range(2 * cfg.dim)), series,
                           title=f"kill-radius sweep, d={cfg.dim}")

    return rows, diag, None, render


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    known = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
    for name in ("samples", "workers"):
        val = getattr(cfg, name)
        if val is not None and val < 1:
            parser.error(f"--{name} must be >= 1")
    if cfg.seed < 0 or cfg.seed >= 2**64:
        parser.error("--seed must fit in 64 bits")
    try:
        code, _ = run_command(cfg)
        return code
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
