"""Command-line interface: solve, sweep, profile, verify, classify.

Exit codes: 0 on success, 1 on a failed check or runtime error, 2 on bad
usage or configuration.  Runtime errors print a single machine-readable
JSON line ``{"error": ...}`` to stderr.  BLAS thread pools are pinned to
one thread per process (the tensors are small; parallelism comes from the
sweep worker pool), overridable through the usual *_NUM_THREADS variables.
"""

import os

for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse
import json
import math
import sys
from dataclasses import replace

from .config import ConfigError, config_from_mapping, parse_config, parse_phi_token
from .dmrg import DmrgConfig
from .model import ModelParams, coupling_profile, mode_count_angle
from .observables import PHASE_NAMES, measure_order_parameters
from .selfconsistency import ScfConfig, scf_solve
from .sweep import emit_outputs, read_rows_csv, run_sweep, write_rows_csv
from .verify import fixed_point_spot_check, oracle_equivalence, threshold_check

THREADS_ENV = "DICKE_ISING_THREADS"


def _fail(message, code=1):
    print(json.dumps({"error": str(message)}), file=sys.stderr)
    raise SystemExit(code)


def _resolve_phi(args):
    if args.phi is not None and args.m_modes is not None:
        _fail("conflicting flags: give either --phi or --m-modes, not both", code=2)
    if args.m_modes is not None:
        return mode_count_angle(args.m_modes)
    if args.phi is not None:
        try:
            return parse_phi_token(args.phi)
        except ConfigError as err:
            _fail(err, code=2)
    return 0.0


def cmd_profile(args):
    phi = _resolve_phi(args)
    prof = coupling_profile(phi, args.sites)
    print(f"# phi = {phi:.9f} rad ({phi/math.pi:.6f} pi), sites = {args.sites}")
    print("site,amplitude")
    for n, a in enumerate(prof.amplitudes, 1):
        print(f"{n},{a:.12g}")
    return 0


def cmd_solve(args):
    phi = _resolve_phi(args)
    params = ModelParams(n_sites=args.n_sites, omega0=args.omega0, j_ising=args.j_ising,
                         v_pump=args.v_pump, delta_c=args.delta_c, kappa=args.kappa,
                         phi=phi)
    scf = ScfConfig(alpha_tol=args.alpha_tol, max_iterations=args.max_iterations,
                    damping=args.damping, solver_backend=args.backend,
                    pinning_eps=args.pinning_eps, accelerate=args.accelerate,
                    dmrg=DmrgConfig(max_bond=args.chi, seed=args.seed))
    rec = scf_solve(params, scf)
    ops = measure_order_parameters(rec.ground_state, rec.alpha, eps_zero=args.eps_zero,
                                   phi=phi, j_sign=args.j_ising)
    payload = {
        "params": {"n_sites": params.n_sites, "omega0": params.omega0,
                   "j_ising": params.j_ising, "v_pump": params.v_pump,
                   "delta_c": params.delta_c, "kappa": params.kappa, "phi": phi},
        "alpha": {"re": rec.alpha.real, "im": rec.alpha.imag, "abs": abs(rec.alpha),
                  "arg": math.atan2(rec.alpha.imag, rec.alpha.real)},
        "order_parameters": {k: getattr(ops, k) for k in
                             ("alpha_abs", "m0x", "m0z", "mpix", "mpiz",
                              "qb_mean", "p_mean", "s_half")},
        "phase": {"label": ops.phase, "name": PHASE_NAMES.get(ops.phase, ops.phase)},
        "scf": {"iterations": rec.iterations, "converged": rec.converged,
                "fixed_point_residual": rec.fixed_point_residual,
                "total_energy": rec.total_energy, "spin_energy": rec.spin_energy,
                "seed_used": repr(rec.seed_used)},
        "diagnostics": rec.diagnostics,
    }
    if args.json:
        print(json.dumps(payload, indent=1, sort_keys=True))
    else:
        print(f"alpha      = {rec.alpha:.8f}  (|alpha| = {abs(rec.alpha):.8f})")
        for k in ("m0x", "m0z", "mpix", "mpiz", "qb_mean", "p_mean", "s_half"):
            print(f"{k:<10s} = {getattr(ops, k):+.8f}")
        print(f"phase      = {ops.phase} ({PHASE_NAMES.get(ops.phase, '?')})")
        print(f"energy     = {rec.total_energy:.10f} (spin {rec.spin_energy:.10f})")
        print(f"scf        = {rec.iterations} iterations, converged={rec.converged}, "
              f"residual={rec.fixed_point_residual:.3e}")
    return 0 if rec.converged else 1


def _sweep_overrides(args):
    overrides = {}
    if args.out_dir is not None:
        overrides["out_dir"] = args.out_dir
    threads = args.threads if args.threads is not None else os.environ.get(THREADS_ENV)
    if threads is not None:
        overrides["workers"] = str(threads)
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    return overrides


def cmd_sweep(args):
    try:
        cfg = parse_config(args.config, overrides=_sweep_overrides(args))
    except ConfigError as err:
        _fail(err, code=2)
    total = (len(cfg.phi_values) * len(cfg.j_values) * len(cfg.delta_c_grid)
             * len(cfg.v_pump_grid))
    print(f"sweep: {total} grid points on {cfg.workers} workers -> {cfg.out_dir}")

    def progress(done, full):
        print(f"  {done}/{full} points", flush=True)

    results = run_sweep(cfg, progress=progress if args.verbose else None)
    files = emit_outputs(results, cfg)
    n_conv = sum(1 for r, _ in results if r.converged)
    print(f"done: {n_conv}/{len(results)} points converged")
    for f in files:
        print(f"wrote {f}")
    return 0


def cmd_classify(args):
    from .observables import classify_phase

    rows = read_rows_csv(args.csv)
    eps = {c: args.eps_zero for c in
           ("alpha_abs", "m0z", "m0x", "mpiz", "mpix", "qb_mean", "p_mean")}
    for col in eps:
        v = getattr(args, f"eps_zero_{col}", None)
        if v is not None:
            eps[col] = v
    for row in rows:
        row.phase_label = classify_phase(
            {"alpha_abs": row.alpha_abs, "m0z": row.m0z, "m0x": row.m0x,
             "mpiz": row.mpiz, "mpix": row.mpix, "qb_mean": row.qb_mean,
             "p_mean": row.p_mean},
            eps_zero=eps, phi=row.phi, j_sign=row.j_ising)
    write_rows_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_verify(args):
    failures = 0

    cases = oracle_equivalence(n_cases=args.oracle_cases, n_sites=10, seed=args.seed)
    worst_e = max(c.energy_rel_err for c in cases)
    worst_o = max(c.sxz_max_err for c in cases)
    ok = all(c.passed for c in cases)
    failures += 0 if ok else 1
    print(f"[{'PASS' if ok else 'FAIL'}] dmrg-vs-ed oracle: {len(cases)} cases, "
          f"worst |dE|/|E| = {worst_e:.2e}, worst <S> err = {worst_o:.2e}")

    v_loc, v_formula, v_scalar = threshold_check(n_sites=args.threshold_sites,
                                                 backend="dmrg", chi=8)
    rel = abs(v_loc - v_formula) / v_formula
    rel_s = abs(v_scalar - v_formula) / v_formula
    ok = rel < 0.01 and rel_s < 0.01
    failures += 0 if ok else 1
    print(f"[{'PASS' if ok else 'FAIL'}] superradiant threshold (J=0): located "
          f"{v_loc:.6f} vs analytic {v_formula:.6f} ({rel:.3%}); scalar oracle "
          f"{v_scalar:.6f} ({rel_s:.3%})")

    if args.sweep_dir:
        path = os.path.join(args.sweep_dir, "sweep.json")
        with open(path) as fh:
            payload = json.load(fh)
        cfg = _config_from_echo(payload["config"])
        pairs = [(_row_from_dict(p["row"]), p["diagnostics"])
                 for p in payload["points"]]
        checked = fixed_point_spot_check(cfg, pairs)
        ok = all(flag for _, _, flag in checked)
        failures += 0 if ok else 1
        worst = max((resid for _, resid, _ in checked), default=0.0)
        print(f"[{'PASS' if ok else 'FAIL'}] fixed-point residual spot check: "
              f"{len(checked)} rows, worst residual {worst:.2e}")

    return 0 if failures == 0 else 1


def _row_from_dict(d):
    from .sweep import SweepRow

    return SweepRow(**d)


def _config_from_echo(echo):
    scf = echo["scf"]
    dmrg = echo["dmrg"]
    raw = {
        "n_sites": str(echo["n_sites"]), "omega0": str(echo["omega0"]),
        "kappa": str(echo["kappa"]),
        "j_ising": ",".join(str(j) for j in echo["j_values"]),
        "delta_c_min": str(min(echo["delta_c_grid"])),
        "delta_c_max": str(max(echo["delta_c_grid"])),
        "delta_c_count": str(len(echo["delta_c_grid"])),
        "v_pump_min": str(min(echo["v_pump_grid"])),
        "v_pump_max": str(max(echo["v_pump_grid"])),
        "v_pump_count": str(len(echo["v_pump_grid"])),
        "solver_backend": scf["solver_backend"],
        "pinning_eps": str(scf["pinning_eps"]),
        "alpha_tol": str(scf["alpha_tol"]),
        "max_bond": str(dmrg["max_bond"]),
    }
    cfg = config_from_mapping(raw)
    return replace(cfg, phi_values=tuple(echo["phi_values"]))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dicke-ising",
        description="Self-consistent cavity + DMRG simulator for pump-structured "
                    "Ising chains in a lossy cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("profile", help="print a pump-cavity coupling profile")
    sp.add_argument("--phi", help="angle in radians or token: golden, mK, pi/D")
    sp.add_argument("--m-modes", type=int, help="mode count M -> arccos(1/(2M-1))")
    sp.add_argument("--sites", type=int, default=10)
    sp.set_defaults(func=cmd_profile)

    sp = sub.add_parser("solve", help="solve a single (delta_c, v_pump) point")
    sp.add_argument("--n-sites", type=int, default=50)
    sp.add_argument("--j-ising", type=float, default=-1.0)
    sp.add_argument("--omega0", type=float, default=0.1)
    sp.add_argument("--kappa", type=float, default=10.0)
    sp.add_argument("--delta-c", type=float, default=-10.0)
    sp.add_argument("--v-pump", type=float, default=0.0)
    sp.add_argument("--phi", help="angle in radians or token: golden, mK, pi/D")
    sp.add_argument("--m-modes", type=int)
    sp.add_argument("--chi", type=int, default=32, help="DMRG bond dimension cap")
    sp.add_argument("--backend", choices=("dmrg", "ed"), default="dmrg")
    sp.add_argument("--alpha-tol", type=float, default=1e-7)
    sp.add_argument("--max-iterations", type=int, default=400)
    sp.add_argument("--damping", type=float, default=0.5)
    sp.add_argument("--pinning-eps", type=float, default=1e-6)
    sp.add_argument("--eps-zero", type=float, default=1e-3)
    sp.add_argument("--accelerate", action="store_true")
    sp.add_argument("--seed", type=int, default=12061)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="run a grid sweep from a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out-dir", help="override the config out_dir")
    sp.add_argument("--threads", type=int,
                    help=f"worker processes (or set {THREADS_ENV})")
    sp.add_argument("--seed", type=int, help="override the config seed")
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the built-in oracle suites")
    sp.add_argument("--oracle-cases", type=int, default=5)
    sp.add_argument("--threshold-sites", type=int, default=12)
    sp.add_argument("--seed", type=int, default=20260809)
    sp.add_argument("--sweep-dir", help="also spot-check rows of a finished sweep")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("classify", help="re-label an existing sweep CSV")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--eps-zero", type=float, default=1e-3)
    for col in ("alpha_abs", "m0z", "m0x", "mpiz", "mpix", "qb_mean", "p_mean"):
        sp.add_argument(f"--eps-zero-{col.replace('_', '-')}", type=float,
                        dest=f"eps_zero_{col}")
    sp.set_defaults(func=cmd_classify)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ConfigError, ValueError, OSError) as err:
        _fail(err, code=1)


if __name__ == "__main__":
    raise SystemExit(main())
