"""Command-line interface.

Subcommands mirror the library pipelines:

    simulate        integrate a field and write snapshot CSV
    scatter         compute a reflection grid from a field
    evolve-r        push a reflection grid forward in time
    zm-predict      evaluate the slow-region leading-order prediction
    rh-reconstruct  solve the reconstruction problem for a range of sites
    compare         residual table between two q-value CSV files
    fit-decay       log-log decay-exponent fit of (t, |q|) samples
    run             full experiment from a JSON config

Exit code 0 iff every requested residual budget is met.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import asymptotics, harness, lattice, rh, scattering


def _parse_site_range(text: str) -> list[int]:
    """'0..10' -> [0..10]; '3' -> [3]; '-5..5' works too."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_simulate(args) -> int:
    field = lattice.load_field_json(args.input)
    config = lattice.SimConfig(
        dt=args.dt, t_end=args.t_end, record_every=args.record_every
    )
    snapshots = lattice.simulate(field, config)
    lattice.save_snapshots_csv(snapshots, args.out)
    drift = max(
        abs(lattice.conserved_log_mass(s) - lattice.conserved_log_mass(snapshots[0]))
        for s in snapshots
    )
    print(f"wrote {args.out}: {len(snapshots)} snapshots, log-mass drift {drift:.3e}")
    return 0


def cmd_scatter(args) -> int:
    field = lattice.load_field_json(args.input)
    grid = scattering.reflection_grid(field, args.N)
    scattering.save_grid_json(grid, args.out)
    print(
        f"wrote {args.out}: N={grid.N}, sup|r|={np.max(np.abs(grid.r)):.6f}, "
        f"c_minus_inf={grid.c_minus_inf:.12g}"
    )
    return 0


def cmd_evolve_r(args) -> int:
    grid = scattering.load_grid_json(args.rgrid)
    evolved = scattering.evolve_reflection(grid, args.t)
    scattering.save_grid_json(evolved, args.out)
    print(f"wrote {args.out}: t_ref={evolved.t_ref:g}")
    return 0


def cmd_zm_predict(args) -> int:
    grid = scattering.load_grid_json(args.rgrid)
    pred = asymptotics.zm_predict(grid, args.n, args.t)
    geo = pred.geometry
    payload = {
        "n": args.n,
        "t": args.t,
        "xi_used": pred.xi_used,
        "S1": [geo.S1.real, geo.S1.imag],
        "S2": [geo.S2.real, geo.S2.imag],
        "nu1": geo.nu1,
        "nu2": geo.nu2,
        "phiS1": geo.phiS1,
        "phiS2": geo.phiS2,
        "beta1": [geo.beta1.real, geo.beta1.imag],
        "beta2": [geo.beta2.real, geo.beta2.imag],
        "delta0": pred.delta0,
        "delta0_inv": pred.delta0_inv,
        "alpha1": [pred.alpha1.real, pred.alpha1.imag],
        "alpha2": [pred.alpha2.real, pred.alpha2.imag],
        "delta10": [pred.delta10.real, pred.delta10.imag],
        "delta20": [pred.delta20.real, pred.delta20.imag],
        "m1_1": [pred.m1_1.real, pred.m1_1.imag],
        "m1_2": [pred.m1_2.real, pred.m1_2.imag],
        "q_pred": [pred.q_pred.real, pred.q_pred.imag],
        "error_scale": pred.error_scale,
        "convention_note": pred.convention_note,
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"wrote {args.out}: |q_pred|={abs(pred.q_pred):.6e}")
    return 0


def cmd_rh_reconstruct(args) -> int:
    grid = scattering.load_grid_json(args.rgrid)
    sites = _parse_site_range(args.n)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "t", "re", "im", "residual"])
        for n in sites:
            q, solve = rh.reconstruct_q_detailed(grid, n, args.t, N=args.N)
            writer.writerow(
                [
                    n,
                    f"{args.t:.17g}",
                    f"{q.real:.17g}",
                    f"{q.imag:.17g}",
                    f"{solve.residuals['equation_residual']:.3e}",
                ]
            )
    print(f"wrote {args.out}: {len(sites)} sites at t={args.t:g}")
    return 0


def _load_q_csv(path) -> dict:
    table = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            key = (int(row["n"]), float(row["t"]))
            table[key] = complex(float(row["re"]), float(row["im"]))
    return table


def cmd_compare(args) -> int:
    table = harness.compare_pipelines(_load_q_csv(args.a), _load_q_csv(args.b))
    print(f"max |delta| = {table['max_abs']:.6e}, median = {table['median_abs']:.6e}")
    if args.budget is not None and table["max_abs"] > args.budget:
        print(f"budget {args.budget:g} exceeded")
        return 1
    return 0


def cmd_fit_decay(args) -> int:
    samples = []
    with open(args.input) as fh:
        for row in csv.DictReader(fh):
            samples.append((float(row["t"]), float(row["q"])))
    fit = harness.fit_decay(samples)
    print(
        f"exponent = {fit.exponent:.4f}, intercept = {fit.intercept:.4f}, "
        f"r^2 = {fit.r_squared:.6f}, window = [{fit.window[0]:g}, {fit.window[1]:g}]"
    )
    return 0


def cmd_run(args) -> int:
    with open(args.config) as fh:
        exp = harness.Experiment.from_json_dict(json.load(fh))
    report = harness.run_experiment(exp)
    ok = harness.budgets_met(report) and not report["errors"]
    for name, item in report["budgets"].items():
        print(f"budget {name}: {'ok' if item['ok'] else 'EXCEEDED'}")
    for xi, err in report["errors"].items():
        print(f"ray {xi}: {err}")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="alpipe",
        description="Defocusing Ablowitz-Ladik pipelines: simulate, scatter, "
        "reconstruct, predict",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a field, write snapshot CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scatter", help="reflection grid from a field")
    p.add_argument("--input", required=True)
    p.add_argument("--N", type=int, default=1024)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("evolve-r", help="evolve a reflection grid in time")
    p.add_argument("--rgrid", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evolve_r)

    p = sub.add_parser("zm-predict", help="slow-region leading-order prediction")
    p.add_argument("--rgrid", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_zm_predict)

    p = sub.add_parser("rh-reconstruct", help="solve the reconstruction problem")
    p.add_argument("--rgrid", required=True)
    p.add_argument("--n", required=True, help="site or range like 0..10")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rh_reconstruct)

    p = sub.add_parser("compare", help="residuals between two q-value CSVs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--budget", type=float, default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fit-decay", help="log-log decay fit of t,q samples")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_fit_decay)

    p = sub.add_parser("run", help="full experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
