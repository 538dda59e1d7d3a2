"""Grid sweeps over (Delta_c, V_p) x {phi} x {J}: execution and data emission.

Work is split into lines: one line is a full ascending V_p scan at fixed
(phi, J, Delta_c).  Lines are independent jobs for the worker pool; inside a
line each point warm-starts from its converged neighbor (nearest-neighbor
continuation), which is what makes scans through the transition affordable.
Completed rows are appended to a JSONL journal as soon as they arrive so a
crashed sweep keeps its finished lines; ``finalize`` sorts everything and
writes the CSV / JSON / heatmap files, making output bytes a pure function
of (config, seed) regardless of worker count or completion order.
"""

import json
import multiprocessing
import os
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .model import ModelParams
from .observables import measure_order_parameters, local_rows, PHASE_LABELS, UNCLASSIFIED
from .selfconsistency import default_seeds, scf_solve

CSV_COLUMNS = ("phi", "j_ising", "delta_c", "v_pump", "alpha_re", "alpha_im",
               "alpha_abs", "m0x", "m0z", "mpix", "mpiz", "qb_mean", "p_mean",
               "s_half", "phase_label", "scf_iterations", "converged",
               "dmrg_max_bond", "discarded_weight", "wall_time_ms", "seed_winner")

PHASE_CODES = {label: i + 1 for i, label in enumerate(PHASE_LABELS)}
PHASE_CODES[UNCLASSIFIED] = 0

_HEATMAP_OBSERVABLES = ("alpha_abs", "m0x", "m0z", "mpix", "mpiz",
                        "qb_mean", "p_mean", "s_half", "phase_code")


@dataclass
class SweepRow:
    phi: float
    j_ising: float
    delta_c: float
    v_pump: float
    alpha_re: float
    alpha_im: float
    alpha_abs: float
    m0x: float
    m0z: float
    mpix: float
    mpiz: float
    qb_mean: float
    p_mean: float
    s_half: float
    phase_label: str
    scf_iterations: int
    converged: bool
    dmrg_max_bond: int
    discarded_weight: float
    wall_time_ms: float
    seed_winner: str


def _limit_blas_threads():
    # workers each get one BLAS thread; the tensors are too small to share
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, "1")


def solve_grid_point(cfg, phi, j_sign, delta_c, v_pump, warm=None):
    """One self-consistent solve plus all observables; returns (row, diagnostics, record)."""
    t0 = time.perf_counter()
    params = ModelParams(n_sites=cfg.n_sites, omega0=cfg.omega0, j_ising=j_sign,
                         v_pump=v_pump, delta_c=delta_c, kappa=cfg.kappa, phi=phi)
    scf_cfg = cfg.scf
    if scf_cfg.seeds is None:
        scf_cfg = replace(scf_cfg, seeds=tuple(default_seeds(params)[:2]))
    rec = scf_solve(params, scf_cfg, warm_start=warm)
    ops = measure_order_parameters(rec.ground_state, rec.alpha, stride=cfg.stride,
                                   eps_zero=cfg.eps_zero, phi=phi, j_sign=j_sign)
    solver = rec.diagnostics.get("solver", {})
    row = SweepRow(
        phi=phi, j_ising=j_sign, delta_c=delta_c, v_pump=v_pump,
        alpha_re=rec.alpha.real, alpha_im=rec.alpha.imag, alpha_abs=ops.alpha_abs,
        m0x=ops.m0x, m0z=ops.m0z, mpix=ops.mpix, mpiz=ops.mpiz,
        qb_mean=ops.qb_mean, p_mean=ops.p_mean, s_half=ops.s_half,
        phase_label=ops.phase, scf_iterations=rec.iterations,
        converged=rec.converged, dmrg_max_bond=int(solver.get("max_bond", 0)),
        discarded_weight=float(solver.get("discarded_weight", 0.0)),
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
        seed_winner=repr(rec.seed_used),
    )
    diag = {
        "residual_history": list(rec.residual_history),
        "fixed_point_residual": rec.fixed_point_residual,
        "spin_energy": rec.spin_energy,
        "total_energy": rec.total_energy,
        "all_seeds": rec.diagnostics.get("all_seeds", []),
        "warm_started": rec.diagnostics.get("warm_started", False),
        "pinning_eps": scf_cfg.pinning_eps,
        "stride": cfg.stride,
        "solver": solver,
    }
    return row, diag, rec


def _run_line(args):
    cfg, phi, j_sign, delta_c = args
    _limit_blas_threads()
    out = []
    warm = None
    for v_pump in cfg.v_pump_grid:
        try:
            row, diag, rec = solve_grid_point(cfg, phi, j_sign, delta_c, v_pump,
                                              warm=warm)
        except Exception as err:  # a failed point must never abort the sweep
            out.append((_failure_row(phi, j_sign, delta_c, v_pump),
                        {"error": f"{type(err).__name__}: {err}"}))
            warm = None
            continue
        if cfg.local_rows_origin > 0 and rec.converged:
            _write_local_rows(cfg, row, rec)
        out.append((row, diag))
        warm = (rec.alpha, rec.ground_state) if (
            rec.converged and abs(rec.alpha) > 10 * cfg.scf.alpha_tol) else None
    return out


def _failure_row(phi, j_sign, delta_c, v_pump):
    nan = float("nan")
    return SweepRow(phi=phi, j_ising=j_sign, delta_c=delta_c, v_pump=v_pump,
                    alpha_re=nan, alpha_im=nan, alpha_abs=nan, m0x=nan, m0z=nan,
                    mpix=nan, mpiz=nan, qb_mean=nan, p_mean=nan, s_half=nan,
                    phase_label="UNCLASSIFIED", scf_iterations=0, converged=False,
                    dmrg_max_bond=0, discarded_weight=nan, wall_time_ms=0.0,
                    seed_winner="")


def _write_local_rows(cfg, row, rec):
    qb, p = local_rows(rec.ground_state, origin=cfg.local_rows_origin)
    name = (f"localrows_phi{row.phi:.6f}_j{row.j_ising:+g}"
            f"_dc{row.delta_c:g}_vp{row.v_pump:g}.csv")
    path = os.path.join(cfg.out_dir, name)
    with open(path, "w") as fh:
        fh.write("m,qb,p_re,p_im\n")
        for m in range(1, cfg.n_sites + 1):
            pv = complex(p.values[m - 1])
            fh.write(f"{m},{_fmt(qb.values[m - 1])},{_fmt(pv.real)},{_fmt(pv.imag)}\n")


def run_sweep(cfg, progress=None):
    """Execute the full grid; returns the sorted list of (row, diagnostics).

    Lines are dispatched to a process pool of ``cfg.workers``; results are
    journaled to ``rows.partial.jsonl`` in completion order and sorted at
    the end, so re-running an identical config reproduces identical final
    outputs whatever the worker count.
    """
    _limit_blas_threads()
    os.makedirs(cfg.out_dir, exist_ok=True)
    lines = [(cfg, phi, j, dc) for phi in cfg.phi_values for j in cfg.j_values
             for dc in cfg.delta_c_grid]
    journal = os.path.join(cfg.out_dir, "rows.partial.jsonl")
    results = []
    with open(journal, "w") as jfh:
        jfh.write(json.dumps({"config": _config_echo(cfg)}) + "\n")
        jfh.flush()

        def consume(line_result):
            for row, diag in line_result:
                results.append((row, diag))
                jfh.write(json.dumps({"row": row.__dict__, "diagnostics": diag}) + "\n")
            jfh.flush()
            if progress:
                progress(len(results), len(lines) * len(cfg.v_pump_grid))

        if cfg.workers == 1 or len(lines) == 1:
            for job in lines:
                consume(_run_line(job))
        else:
            with multiprocessing.Pool(processes=min(cfg.workers, len(lines))) as pool:
                for line_result in pool.imap_unordered(_run_line, lines):
                    consume(line_result)

    results.sort(key=lambda pair: (pair[0].phi, pair[0].j_ising,
                                   pair[0].delta_c, pair[0].v_pump))
    return results


def _jsonify(value):
    if isinstance(value, complex):
        return repr(value)
    if isinstance(value, tuple):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    return value


def _config_echo(cfg):
    echo = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name in ("scf", "dmrg"):
            v = {sf.name: getattr(v, sf.name) for sf in fields(v)
                 if sf.name != "dmrg"}
        echo[f.name] = _jsonify(v)
    return echo


def _fmt(x):
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_rows_csv(rows, path):
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(getattr(row, c)) for c in CSV_COLUMNS) + "\n")


def read_rows_csv(path):
    """Parse a sweep CSV back into SweepRow objects (used by re-labeling)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header")
        rows = []
        for line in fh:
            cells = line.strip().split(",")
            kwargs = {}
            for name, cell in zip(CSV_COLUMNS, cells):
                ftype = SweepRow.__dataclass_fields__[name].type
                if ftype is float:
                    kwargs[name] = float(cell)
                elif ftype is int:
                    kwargs[name] = int(cell)
                elif ftype is bool:
                    kwargs[name] = cell == "true"
                else:
                    kwargs[name] = cell
            rows.append(SweepRow(**kwargs))
    return rows


def _heatmap_matrix(rows, cfg, phi, j_sign, observable):
    dgrid, vgrid = cfg.delta_c_grid, cfg.v_pump_grid
    mat = np.zeros((len(dgrid) + 1, len(vgrid) + 1))
    mat[0, 1:] = vgrid
    mat[1:, 0] = dgrid
    index = {(round(r.delta_c, 12), round(r.v_pump, 12)): r for r in rows
             if abs(r.phi - phi) < 1e-12 and r.j_ising == j_sign}
    for i, dc in enumerate(dgrid):
        for k, vp in enumerate(vgrid):
            row = index.get((round(dc, 12), round(vp, 12)))
            if row is None:
                mat[i + 1, k + 1] = np.nan
            elif observable == "phase_code":
                mat[i + 1, k + 1] = PHASE_CODES.get(row.phase_label, 0)
            else:
                mat[i + 1, k + 1] = getattr(row, observable)
    return mat


def emit_outputs(results, cfg):
    """Write the final sorted artifacts; returns the list of files created.

    CSV: one row per grid point, header exactly the SweepRow field names.
    JSON: full per-point diagnostics (residual history, all seed branches).
    Heatmaps: one matrix file per observable per (phi, J); first row is the
    V_p grid, first column the Delta_c grid, corner cell 0, body the
    observable (phase labels as integer codes, UNCLASSIFIED = 0).
    """
    os.makedirs(cfg.out_dir, exist_ok=True)
    written = []
    rows = [r for r, _ in results]
    if cfg.emit_csv:
        path = os.path.join(cfg.out_dir, "sweep.csv")
        write_rows_csv(rows, path)
        written.append(path)
    if cfg.emit_json:
        path = os.path.join(cfg.out_dir, "sweep.json")
        payload = {"config": _config_echo(cfg),
                   "points": [{"row": row.__dict__, "diagnostics": diag}
                              for row, diag in results]}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        written.append(path)
    if cfg.emit_heatmaps:
        for phi in cfg.phi_values:
            for j in cfg.j_values:
                for obs in _HEATMAP_OBSERVABLES:
                    mat = _heatmap_matrix(rows, cfg, phi, j, obs)
                    name = f"heatmap_{obs}_phi{phi:.6f}_j{j:+g}.csv"
                    path = os.path.join(cfg.out_dir, name)
                    np.savetxt(path, mat, fmt="%.12g", delimiter=",")
                    written.append(path)
    return written
