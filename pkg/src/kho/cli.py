"""Command-line front end.

Subcommands: evolve, qfunc, energy-scan, spectrum, resonances, verify.
Exit status: 0 success, 1 usage error, 2 truncation-unsafe result,
3 verification failure.  All outputs are deterministic: the same flags
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import fock, model, output, verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TRUNCATION = 2
EXIT_VERIFY = 3

ENERGY_TARGETS = (50.0, 200.0)
UNREACHED = -1  # sentinel for scan points that never hit a target


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_window(text: str) -> tuple[float, float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        r = abs(parts[0])
        return (-r, r, -r, r)
    if len(parts) == 4:
        return tuple(parts)
    raise argparse.ArgumentTypeError("window must be R or re_min,re_max,im_min,im_max")


def _parse_res(text: str) -> tuple[int, int]:
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        return (parts[0], parts[0])
    if len(parts) == 2:
        return tuple(parts)
    raise argparse.ArgumentTypeError("res must be N or n_re,n_im")


def _add_system_flags(p, eta2_default="pi"):
    p.add_argument("--q", type=int, default=4, help="kicks per oscillator period")
    p.add_argument("--r", type=int, default=1, help="oscillator periods per q kicks")
    p.add_argument("--kappa", type=float, default=-0.8, help="dimensionless kick strength")
    p.add_argument("--eta2", default=eta2_default,
                   help="eta^2, symbolic: float | pi | pi/2 | 2pi/sqrt3 | phi*pi | a/b*pi")
    p.add_argument("--dim", type=int, default=500, help="Fock basis size")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kho", description="Quantum delta-kicked harmonic oscillator simulator")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("evolve", help="propagate and emit the energy trace")
    _add_system_flags(pe)
    pe.add_argument("--kicks", type=int, default=108)
    pe.add_argument("--alpha", type=complex, default=0j, help="initial coherent amplitude")
    pe.add_argument("--out", default="evolve.csv")
    pe.add_argument("--state-out", default=None, help="optional final-state JSON path")

    pq = sub.add_parser("qfunc", help="evolve and sample the Husimi Q function")
    _add_system_flags(pq, eta2_default=None)
    pq.add_argument("--kicks", type=int, default=None)
    pq.add_argument("--alpha", type=complex, default=0j)
    pq.add_argument("--window", type=_parse_window, default=_parse_window("16"))
    pq.add_argument("--res", type=_parse_res, default=(101, 101))
    pq.add_argument("--out", default="qfunc_out",
                    help="output CSV (single run) or directory (default panel set)")

    ps = sub.add_parser("energy-scan", help="kicks needed to reach 50 and 200 hbar*omega vs eta^2")
    _add_system_flags(ps)
    ps.add_argument("--kicks", type=int, default=2000, help="kick budget per point")
    ps.add_argument("--scan-min", default="0.4*pi")
    ps.add_argument("--scan-max", default="1.6*pi")
    ps.add_argument("--scan-points", type=int, default=61)
    ps.add_argument("--threads", type=int, default=1)
    ps.add_argument("--out", default="energy_scan.csv")

    pp = sub.add_parser("spectrum", help="quasienergy spectrum vs eta^2")
    _add_system_flags(pp)
    pp.add_argument("--scan-min", default="0.2*pi")
    pp.add_argument("--scan-max", default="1.8*pi")
    pp.add_argument("--scan-points", type=int, default=161)
    pp.add_argument("--threads", type=int, default=1)
    pp.add_argument("--out", default="spectrum.csv")

    pr = sub.add_parser("resonances", help="resonance table and z_n enumeration")
    pr.add_argument("--q-min", type=int, default=3)
    pr.add_argument("--q-max", type=int, default=8)
    pr.add_argument("--out", default=None, help="write JSON here instead of stdout")

    pv = sub.add_parser("verify", help="run the self-verification suite")
    pv.add_argument("--verify-level", choices=("quick", "full"), default="quick")
    pv.add_argument("--skew-zeta", type=float, default=0.0, help=argparse.SUPPRESS)

    return p


def _system_params(args) -> model.SystemParams:
    eta_sq = model.parse_eta2(str(args.eta2))
    return model.SystemParams(r=args.r, q=args.q, kappa=args.kappa, eta_sq=eta_sq)


def _config_echo(args, keys) -> dict:
    cfg = {}
    for k in keys:
        v = getattr(args, k.replace("-", "_"))
        cfg[k] = v if not isinstance(v, tuple) else ",".join(map(str, v))
    if "eta2" in cfg and cfg["eta2"] is not None:
        cfg["eta2_value"] = output.fmt(model.parse_eta2(str(cfg["eta2"])))
    return cfg


def cmd_evolve(args) -> int:
    params = _system_params(args)
    cfg = _config_echo(args, ["q", "r", "kappa", "eta2", "dim", "kicks", "alpha"])
    state = fock.coherent_state(args.alpha, args.dim)
    result = fock.evolve(state, params, args.kicks)
    extra = []
    if result.truncation_unsafe:
        extra.append(f"warning: truncation-unsafe from kick {result.first_unsafe_kick}")
        print(f"kho evolve: truncation-unsafe from kick {result.first_unsafe_kick}; "
              f"trace written to {args.out}", file=sys.stderr)
    output.write_energy_trace(args.out, cfg, result.energies, extra)
    if args.state_out:
        with open(args.state_out, "w") as fh:
            fh.write(output.fock_state_json(result.state))
    return EXIT_TRUNCATION if result.truncation_unsafe else EXIT_OK


_QFUNC_PANELS = (("pi", 36), ("pi", 108), ("phi*pi", 36), ("phi*pi", 108))


def cmd_qfunc(args) -> int:
    single = args.eta2 is not None
    runs = []
    if single:
        runs.append((str(args.eta2), args.kicks if args.kicks is not None else 108, args.out))
    else:
        os.makedirs(args.out, exist_ok=True)
        for eta2, kicks in _QFUNC_PANELS:
            name = f"qfunc_eta2-{eta2.replace('*', '')}_N{kicks}.csv"
            runs.append((eta2, kicks, os.path.join(args.out, name)))
    status = EXIT_OK
    for eta2, kicks, path in runs:
        params = model.SystemParams(r=args.r, q=args.q, kappa=args.kappa,
                                    eta_sq=model.parse_eta2(eta2))
        state = fock.coherent_state(args.alpha, args.dim)
        result = fock.evolve(state, params, kicks)
        grid = fock.q_function(result.state, args.window, args.res)
        cfg = _config_echo(args, ["q", "r", "kappa", "dim", "alpha"])
        cfg.update(eta2=eta2, kicks=kicks)
        cfg["eta2_value"] = output.fmt(params.eta_sq)
        extra = [f"riemann_sum={output.fmt(grid.riemann_sum())}"]
        if result.truncation_unsafe:
            extra.append(f"warning: truncation-unsafe from kick {result.first_unsafe_kick}")
            status = EXIT_TRUNCATION
        if grid.riemann_sum() < 0.99:
            extra.append("warning: window too small, probability mass outside grid")
            print(f"kho qfunc: window misses probability mass "
                  f"(sum={grid.riemann_sum():.3f}) for {path}", file=sys.stderr)
        output.write_qgrid(path, cfg, grid, extra)
    return status


def _energy_scan_point(payload):
    idx, eta_sq, q, r, kappa, dim, n_max = payload
    params = model.SystemParams(r=r, q=q, kappa=kappa, eta_sq=eta_sq)
    res = fock.kicks_to_energy(params, max(ENERGY_TARGETS), n_max, dim=dim)
    crossings = fock.energy_crossings(res.energies, list(ENERGY_TARGETS))
    unsafe_before = (res.truncation_unsafe and
                     any(c is None or res.first_unsafe_kick <= c for c in crossings))
    return idx, crossings, unsafe_before


def _map_points(worker, payloads, threads):
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(worker, payloads))
    else:
        results = [worker(p) for p in payloads]
    return sorted(results, key=lambda t: t[0])


def cmd_energy_scan(args) -> int:
    lo = model.parse_eta2(args.scan_min)
    hi = model.parse_eta2(args.scan_max)
    grid = np.linspace(lo, hi, args.scan_points)
    payloads = [(i, float(e), args.q, args.r, args.kappa, args.dim, args.kicks)
                for i, e in enumerate(grid)]
    results = _map_points(_energy_scan_point, payloads, args.threads)
    rows, unsafe_points = [], []
    for idx, crossings, unsafe in results:
        k50, k200 = (UNREACHED if c is None else c for c in crossings)
        rows.append((grid[idx], k50, k200))
        if unsafe:
            unsafe_points.append(idx)
    cfg = _config_echo(args, ["q", "r", "kappa", "dim", "kicks",
                              "scan-min", "scan-max", "scan-points"])
    extra = [f"targets={output.fmt(ENERGY_TARGETS[0])},{output.fmt(ENERGY_TARGETS[1])} "
             f"sentinel={UNREACHED}"]
    if unsafe_points:
        extra.append("warning: truncation-unsafe points (indices): "
                     + ",".join(map(str, unsafe_points)))
        print(f"kho energy-scan: {len(unsafe_points)} truncation-unsafe points",
              file=sys.stderr)
    output.write_energy_scan(args.out, cfg, rows, extra)
    return EXIT_TRUNCATION if unsafe_points else EXIT_OK


def _spectrum_point(payload):
    idx, eta_sq, q, r, kappa, dim = payload
    params = model.SystemParams(r=r, q=q, kappa=kappa, eta_sq=eta_sq)
    try:
        res = fock.quasienergy_spectrum(params, dim)
    except fock.EigensolverError as exc:
        return idx, None, str(exc)
    rows = [(eta_sq, rec.phi, rec.ground_overlap) for rec in res.records]
    return idx, rows, f"discarded={res.n_discarded}" if res.n_discarded else None


def cmd_spectrum(args) -> int:
    lo = model.parse_eta2(args.scan_min)
    hi = model.parse_eta2(args.scan_max)
    grid = np.linspace(lo, hi, args.scan_points)
    payloads = [(i, float(e), args.q, args.r, args.kappa, args.dim)
                for i, e in enumerate(grid)]
    results = _map_points(_spectrum_point, payloads, args.threads)
    rows, notes = [], []
    for idx, point_rows, note in results:
        if point_rows is None:
            notes.append(f"point {idx} failed: {note}")
            continue
        rows.extend(point_rows)
        if note:
            notes.append(f"point {idx}: {note}")
    cfg = _config_echo(args, ["q", "r", "kappa", "dim",
                              "scan-min", "scan-max", "scan-points"])
    output.write_spectrum(args.out, cfg, rows, notes or None)
    for n in notes:
        print(f"kho spectrum: {n}", file=sys.stderr)
    return EXIT_OK


def cmd_resonances(args) -> int:
    table = {}
    for q in range(args.q_min, args.q_max + 1):
        rc = model.resonant_values(q)
        entry = rc.as_dict()
        entry["z_values"] = model.z_values(q)
        table[str(q)] = entry
    text = json.dumps(table, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify.run(args.verify_level, zeta_skew=args.skew_zeta)
    for c in checks:
        print(c.line())
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return EXIT_VERIFY if n_fail else EXIT_OK


_HANDLERS = {
    "evolve": cmd_evolve,
    "qfunc": cmd_qfunc,
    "energy-scan": cmd_energy_scan,
    "spectrum": cmd_spectrum,
    "resonances": cmd_resonances,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, model.NoRationalPeriodError) as exc:
        print(f"kho: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
