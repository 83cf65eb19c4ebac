"""Command-line interface.

Exit codes: 0 success, 1 numeric failure, 2 configuration or parse failure.
``VQS_THREADS`` caps how many trainings ``table`` and ``sweep`` run at once
(default 1, i.e. sequentially in-process).
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from vqs.config import dump_config, load_config, resolve_config_path
from vqs.errors import ConfigError, NumericError, VQSError
from vqs.model import forward, load_checkpoint
from vqs.oracle import fd_ground_state, jacobi_eigen
from vqs.plotting import line_plot_svg
from vqs.projection import reconstruct
from vqs.trainer import Problem, TrainReport, sign_fix, train, write_trace_csv

log = logging.getLogger("vqs")

FD_POINTS = 4000

# name, preset file, published exact ground-state energy (natural units)
TABLE_SYSTEMS = (
    ("Unperturbed", "unperturbed.cfg", 4.93480),
    ("Perturbed A", "perturbed_a.cfg", 8.79507),
    ("Perturbed B", "perturbed_b.cfg", 2.94583),
)

TABLE_COLUMNS = ("system", "computed", "oracle_basis", "oracle_fd", "paper_exact")


def thread_cap() -> int:
    raw = os.environ.get("VQS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"VQS_THREADS must be an integer, got {raw!r}") from None


def _map(fn, items):
    items = list(items)
    workers = min(thread_cap(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(x) -> str:
    return repr(float(x))


def write_solve_outputs(outdir: Path, report: TrainReport, fd_energy: float) -> None:
    cfg = report.config
    problem = Problem(cfg.system, cfg.N, cfg.G)
    xs = problem.grid.points
    raw = forward(report.params, problem.network_inputs(xs))
    c_raw = problem.projector.project(raw)
    sign = 1.0 if c_raw @ report.final_coefficients >= 0 else -1.0
    raw = sign * raw / np.sqrt(np.sum(raw * raw) * problem.grid.weight)
    psi_rec = reconstruct(report.final_coefficients, problem.basis, xs)
    psi_ref = reconstruct(report.oracle_coefficients, problem.basis, xs)

    write_trace_csv(outdir / "trace.csv", report)
    with open(outdir / "wavefunction.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "psi_net_raw", "psi_reconstructed", "psi_oracle"])
        for row in zip(xs, raw, psi_rec, psi_ref):
            w.writerow([_fmt(v) for v in row])
    with open(outdir / "report.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["final_energy", "oracle_energy", "oracle_fd_energy", "oracle_overlap",
                    "iterations", "converged", "wall_time"])
        w.writerow([_fmt(report.final_energy), _fmt(report.oracle_energy), _fmt(fd_energy),
                    _fmt(report.oracle_overlap), report.iterations, int(report.converged),
                    f"{report.wall_time:.3f}"])
    svg = line_plot_svg(
        xs,
        [("network (basis reconstruction)", psi_rec, False), ("exact (matrix oracle)", psi_ref, True)],
        title=f"Normalized ground state, a={cfg.system.a:g}, alpha={cfg.system.alpha:g}",
        xlabel="x",
        ylabel="psi(x)",
    )
    (outdir / "wavefunction.svg").write_text(svg)


def cmd_solve(args) -> int:
    config = load_config(args.config)
    if args.max_iters is not None:
        config = replace(config, max_iters=args.max_iters).validate()
    if args.seed is not None:
        config = replace(config, seed=args.seed).validate()
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.cfg").write_text(dump_config(config))
    report = train(config, checkpoint_path=outdir / "checkpoint.vqs")
    fd_energy, _, _ = fd_ground_state(config.system, FD_POINTS)
    write_solve_outputs(outdir, report, fd_energy)
    print(f"final energy   {report.final_energy:.8f}")
    print(f"oracle energy  {report.oracle_energy:.8f}")
    print(f"overlap        {report.oracle_overlap:.8f}")
    print(f"iterations     {report.iterations} ({report.wall_time:.1f} s)")
    return 0


def cmd_oracle(args) -> int:
    config = load_config(args.config)
    problem = Problem(config.system, config.N, config.G)
    eig = jacobi_eigen(problem.hamiltonian)
    fd_energy, _, _ = fd_ground_state(config.system, args.fd_points)
    print(f"jacobi  (N={config.N})    {eig.ground_energy:.10f}")
    print(f"fd      (M={args.fd_points})  {fd_energy:.10f}")
    print(f"difference         {eig.ground_energy - fd_energy:.3e}")
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "oracle_ground.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "coefficient"])
        for n, c in enumerate(sign_fix(eig.ground_vector), start=1):
            w.writerow([n, _fmt(c)])
    return 0


def _table_row(item):
    name, preset, exact = item
    config = load_config(preset)
    report = train(config)
    fd_energy, _, _ = fd_ground_state(config.system, FD_POINTS)
    return {
        "system": name,
        "computed": report.final_energy,
        "oracle_basis": report.oracle_energy,
        "oracle_fd": fd_energy,
        "paper_exact": exact,
        "overlap": report.oracle_overlap,
        "wall_time": report.wall_time,
        "report": report,
    }


def table_rows(systems=TABLE_SYSTEMS):
    """Train every preset and pair it with both oracles and the reference value."""
    return _map(_table_row, systems)


def write_table_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TABLE_COLUMNS)
        for row in rows:
            w.writerow([row["system"]] + [_fmt(row[k]) for k in TABLE_COLUMNS[1:]])


def cmd_table(args) -> int:
    rows = table_rows()
    write_table_csv(args.output, rows)
    for row in rows:
        print(f"{row['system']:<12} computed {row['computed']:.6f}  exact {row['paper_exact']:.5f}  "
              f"overlap {row['overlap']:.6f}  ({row['wall_time']:.0f} s)")
    return 0


def _sweep_train(item):
    config, value = item
    return value, train(config)


def sweep_rows(config, param, values, checkpoint=None, do_train=False):
    """Vary ``N`` or ``G``; report oracle and network energies per value.

    Network energies come from ``checkpoint`` (re-projected at each value) or
    from fresh training runs when ``do_train`` is set.  ``max_coeff_change``
    is the largest change of the unit-normalized coefficients relative to the
    previous value (G sweeps only; N sweeps change the coefficient count).
    """
    if param not in ("N", "G"):
        raise ConfigError(f"sweep parameter must be N or G, got {param!r}")
    if param == "G" and checkpoint is None and not do_train:
        raise ConfigError("a G sweep needs --checkpoint or --train")
    configs = [replace(config, **{param: v}).validate() for v in values]
    trained = {}
    if do_train:
        trained = dict(_map(_sweep_train, [(c, v) for c, v in zip(configs, values)]))
    params = load_checkpoint(checkpoint) if checkpoint is not None else None

    rows, previous = [], None
    for cfg, value in zip(configs, values):
        problem = Problem(cfg.system, cfg.N, cfg.G)
        row = {"param": param, "value": value, "oracle_energy": problem.oracle.ground_energy,
               "network_energy": None, "max_coeff_change": None}
        if value in trained:
            rep = trained[value]
            row["network_energy"] = rep.final_energy
            coeffs = rep.final_coefficients
        elif params is not None:
            c = problem.coefficients(params)
            row["network_energy"] = problem.energy(params)
            coeffs = sign_fix(c)
        else:
            coeffs = None
        if param == "G" and coeffs is not None and previous is not None:
            row["max_coeff_change"] = float(np.max(np.abs(coeffs - previous)))
        previous = coeffs
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    try:
        values = [int(v) for v in args.values.split(",")]
    except ValueError:
        raise ConfigError(f"--values must be a comma list of integers, got {args.values!r}") from None
    rows = sweep_rows(config, args.param, values, checkpoint=args.checkpoint, do_train=args.train)
    cols = ("param", "value", "oracle_energy", "network_energy", "max_coeff_change")
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([row["param"], row["value"]] +
                       ["" if row[k] is None else _fmt(row[k]) for k in cols[2:]])
    for row in rows:
        print(f"{row['param']}={row['value']:<6} oracle {row['oracle_energy']:.10f}"
              + ("" if row["network_energy"] is None else f"  network {row['network_energy']:.8f}"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqs", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="train a network for one config")
    p.add_argument("config", help="config file or bundled preset name")
    p.add_argument("-o", "--output", default="out", help="output directory")
    p.add_argument("--max-iters", type=int, help="override [train] max_iters")
    p.add_argument("--seed", type=int, help="override [train] seed")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="print both reference ground-state energies")
    p.add_argument("config")
    p.add_argument("-o", "--output", default=".", help="directory for oracle_ground.csv")
    p.add_argument("--fd-points", type=int, default=FD_POINTS)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("table", help="reproduce the ground-state energy table")
    p.add_argument("-o", "--output", default="table.csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", help="vary N or G and emit a convergence CSV")
    p.add_argument("config")
    p.add_argument("--param", choices=("N", "G"), required=True)
    p.add_argument("--values", required=True, help="comma-separated list, e.g. 10,25,50,100")
    p.add_argument("--checkpoint", help="network checkpoint to re-project")
    p.add_argument("--train", action="store_true", help="train a network per value")
    p.add_argument("-o", "--output", default="sweep.csv")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if hasattr(args, "config"):
            args.config = str(resolve_config_path(args.config))
        return args.func(args)
    except ConfigError as exc:
        print(f"vqs: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"vqs: numeric failure: {exc}", file=sys.stderr)
        return 1
    except VQSError as exc:
        print(f"vqs: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
