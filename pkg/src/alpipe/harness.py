"""Experiment driver: ray routing, pipeline fan-out, fitting, comparison.

Configs are plain JSON; outputs are CSV tables plus one JSON summary with
all cross-pipeline residuals.  Identical configs produce byte-identical
outputs (any randomized field carries an explicit seed).
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import asymptotics, lattice, rh, scattering
from .errors import RegionError


@dataclass
class FitResult:
    exponent: float
    intercept: float
    r_squared: float
    window: tuple[float, float]


@dataclass
class Experiment:
    """One experiment: a field, a grid size, rays, times, pipelines."""

    field_spec: dict
    N: int = 1024
    rays: list = dc_field(default_factory=list)
    times: list = dc_field(default_factory=list)
    pipelines: list = dc_field(default_factory=lambda: ["simulate", "scatter"])
    out_dir: str = "."
    dt: float = 0.01
    rh_N: int | None = None
    sites: list | None = None
    budgets: dict = dc_field(default_factory=dict)
    seed: int | None = None

    @classmethod
    def from_json_dict(cls, data: dict) -> "Experiment":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
        return cls(**data)


def route_ray(xi: float) -> str:
    """Map a ray to its asymptotic region; |xi| = 1 is rejected."""
    if abs(xi) < 1.0:
        return "zm"
    if abs(xi) > 1.0:
        return "fast"
    raise RegionError("|xi| = 1 sits on the transition edge and is excluded")


def snap_ray(xi: float, t: float) -> tuple[int, float]:
    """Nearest integer site for the requested ray at time t: n = round(2 t xi)."""
    n = int(round(2.0 * t * xi))
    return n, n / (2.0 * t)


def fit_decay(samples) -> FitResult:
    """Least-squares line through (ln t, ln |q|); the slope is the exponent."""
    pts = [(float(t), float(q)) for t, q in samples]
    if any(t <= 0 for t, _ in pts):
        raise ValueError("all t must be positive")
    kept = [(t, q) for t, q in pts if q > 0]
    if len(kept) < len(pts):
        warnings.warn(f"dropped {len(pts) - len(kept)} zero-amplitude samples")
    if len(kept) < 5:
        raise ValueError(f"need at least 5 usable samples, got {len(kept)}")
    lt = np.log([t for t, _ in kept])
    lq = np.log([q for _, q in kept])
    slope, intercept = np.polyfit(lt, lq, 1)
    resid = lq - (slope * lt + intercept)
    ss_tot = float(np.sum((lq - lq.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(
        exponent=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        window=(min(t for t, _ in kept), max(t for t, _ in kept)),
    )


def compare_pipelines(a: dict, b: dict) -> dict:
    """Nodewise |a-b| and relative residuals over matching keys."""
    missing_in_b = sorted(k for k in a if k not in b)
    missing_in_a = sorted(k for k in b if k not in a)
    if missing_in_a or missing_in_b:
        raise KeyError(
            f"key mismatch: missing in first {missing_in_a}, "
            f"missing in second {missing_in_b}"
        )
    rows = {}
    for key in sorted(a):
        va, vb = complex(a[key]), complex(b[key])
        absd = abs(va - vb)
        scale = max(abs(va), abs(vb))
        rows[key] = {"abs": absd, "rel": absd / scale if scale > 0 else 0.0}
    abs_all = [row["abs"] for row in rows.values()]
    return {
        "per_key": rows,
        "max_abs": max(abs_all) if abs_all else 0.0,
        "median_abs": float(np.median(abs_all)) if abs_all else 0.0,
    }


# ---------------------------------------------------------------------------
# experiment execution
# ---------------------------------------------------------------------------

def build_field(spec: dict, seed: int | None = None) -> lattice.LatticeField:
    """Field from an inline spec, a file reference, or a named generator."""
    if "file" in spec:
        return lattice.load_field_json(spec["file"])
    if "q" in spec:
        return lattice.field_from_json_dict(spec)
    kind = spec.get("kind")
    if kind == "gaussian":
        return lattice.gaussian_field(
            spec.get("amplitude", 0.3), spec.get("width", 20.0), spec.get("half_window", 400)
        )
    if kind == "single_site":
        c = spec.get("c", [0.3, 0.0])
        return lattice.single_site_field(complex(c[0], c[1]), spec.get("half_window", 1))
    if kind == "random":
        rng = np.random.default_rng(spec.get("seed", seed))
        half = spec.get("half_window", 32)
        amp = spec.get("amplitude", 0.2)
        q = amp * (rng.standard_normal(2 * half + 1) + 1j * rng.standard_normal(2 * half + 1))
        q *= np.exp(-((np.arange(-half, half + 1) / max(half / 2, 1)) ** 2))
        return lattice.LatticeField(-half, q, 0.0)
    raise ValueError(f"unrecognized field spec: {spec}")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def run_experiment(exp: Experiment) -> dict:
    """Execute the requested pipelines and write CSV/JSON artifacts.

    Per-ray errors are captured in the report rather than aborting the
    whole run.  Returns the report dict (also written as summary.json).
    """
    out = Path(exp.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    field = build_field(exp.field_spec, seed=exp.seed)
    times = sorted(float(t) for t in exp.times) or [0.0]
    report: dict = {"pipelines": {}, "rays": [], "errors": {}, "budgets": {}}

    snapshots_by_time: dict[float, lattice.LatticeField] = {field.time: field}
    if "simulate" in exp.pipelines and max(times) > field.time:
        config = lattice.SimConfig(dt=exp.dt, t_end=max(times), record_every=10**9)
        q = field.amplitudes.copy()
        t_now = field.time
        for t_target in times:
            if t_target <= t_now:
                continue
            span = t_target - t_now
            n_full = int(np.floor(span / exp.dt + 1e-9))
            for _ in range(n_full):
                q = lattice._rk4(q, exp.dt)
            rem = span - n_full * exp.dt
            if rem > 1e-12 * exp.dt:
                q = lattice._rk4(q, rem)
            t_now = t_target
            snapshots_by_time[t_target] = lattice.LatticeField(field.n_min, q.copy(), t_now)
        rows = []
        for t in sorted(snapshots_by_time):
            snap = snapshots_by_time[t]
            for n, v in zip(snap.sites, snap.amplitudes):
                rows.append([_fmt(t), int(n), _fmt(v.real), _fmt(v.imag)])
        _write_csv(out / "simulate.csv", ["t", "n", "re", "im"], rows)
        drift = max(
            abs(lattice.conserved_log_mass(s) - lattice.conserved_log_mass(field))
            for s in snapshots_by_time.values()
        )
        report["pipelines"]["simulate"] = {"log_mass_drift": drift, "times": times}
        _check_budget(report, exp, "log_mass_drift", drift)

    grid = None
    if "scatter" in exp.pipelines or "zm" in exp.pipelines or "rh" in exp.pipelines:
        grid = scattering.reflection_grid(field, exp.N)
        scattering.save_grid_json(grid, out / "rgrid.json")
        report["pipelines"]["scatter"] = {
            "N": exp.N,
            "sup_r": float(np.max(np.abs(grid.r))),
            "c_minus_inf": grid.c_minus_inf,
        }

    zm_rows, rh_rows = [], []
    for xi_req in exp.rays:
        entry = {"xi_requested": float(xi_req)}
        try:
            region = route_ray(float(xi_req))
            entry["region"] = region
            for t in times:
                if t <= field.time:
                    continue
                n, xi_real = snap_ray(float(xi_req), t)
                key = {"n": n, "t": t, "xi_realized": xi_real}
                if region == "zm" and "zm" in exp.pipelines:
                    pred = asymptotics.zm_predict(grid, n, t)
                    key["q_zm"] = [pred.q_pred.real, pred.q_pred.imag]
                    key["error_scale"] = pred.error_scale
                    zm_rows.append(
                        [_fmt(t), n, _fmt(pred.q_pred.real), _fmt(pred.q_pred.imag), _fmt(pred.error_scale)]
                    )
                if region == "fast":
                    key["fast_scale"] = asymptotics.fast_region_scale(n, t)
                if "rh" in exp.pipelines:
                    q_rec, solve = rh.reconstruct_q_detailed(grid, n, t, N=exp.rh_N or exp.N)
                    key["q_rh"] = [q_rec.real, q_rec.imag]
                    key["rh_residual"] = solve.residuals["equation_residual"]
                    rh_rows.append(
                        [n, _fmt(t), _fmt(q_rec.real), _fmt(q_rec.imag), _fmt(key["rh_residual"])]
                    )
                if t in snapshots_by_time:
                    snap = snapshots_by_time[t]
                    if snap.n_min <= n <= snap.n_max:
                        q_sim = snap.amplitudes[n - snap.n_min]
                        key["q_sim"] = [q_sim.real, q_sim.imag]
                        if "q_zm" in key:
                            qz = complex(*key["q_zm"])
                            if abs(qz) > 0:
                                key["sim_zm_modulus_ratio"] = abs(q_sim) / abs(qz)
                entry.setdefault("points", []).append(key)
        except Exception as exc:  # per-ray isolation
            entry["error"] = f"{type(exc).__name__}: {exc}"
            report["errors"][str(xi_req)] = entry["error"]
        report["rays"].append(entry)

    if zm_rows:
        _write_csv(out / "zm.csv", ["t", "n", "re", "im", "error_scale"], zm_rows)
    if rh_rows:
        _write_csv(out / "rh.csv", ["n", "t", "re", "im", "residual"], rh_rows)

    _apply_cross_budgets(report, exp)
    with open(out / "summary.json", "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=1, default=_json_default)
        fh.write("\n")
    return report


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _check_budget(report: dict, exp: Experiment, name: str, value: float) -> None:
    if name in exp.budgets:
        limit = float(exp.budgets[name])
        report["budgets"][name] = {"value": value, "limit": limit, "ok": value <= limit}


def _apply_cross_budgets(report: dict, exp: Experiment) -> None:
    if "sim_zm_modulus_ratio" in exp.budgets:
        lo, hi = exp.budgets["sim_zm_modulus_ratio"]
        ratios = [
            pt["sim_zm_modulus_ratio"]
            for ray in report["rays"]
            for pt in ray.get("points", [])
            if "sim_zm_modulus_ratio" in pt
        ]
        ok = bool(ratios) and all(lo <= r <= hi for r in ratios)
        report["budgets"]["sim_zm_modulus_ratio"] = {
            "value": ratios,
            "limit": [lo, hi],
            "ok": ok,
        }


def budgets_met(report: dict) -> bool:
    return all(item["ok"] for item in report["budgets"].values()) if report["budgets"] else True
