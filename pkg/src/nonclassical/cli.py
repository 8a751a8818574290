"""Command-line front end: ``evolve``, ``measure``, ``sweep`` and ``selftest``.

State specifiers accepted by ``--state``::

    fock:N               number state |N>
    coherent:ALPHA       coherent state, ALPHA may be complex (e.g. 1+0.5j)
    thermal:NTH          thermal state
    FAMILY:N             superposition family (consecutive, skip, equal, geometric)
    file:PATH            density matrix file written by ``evolve``
"""

import argparse
import logging
import sys

import numpy as np

from . import evolution, states
from .errors import NonclassicalError
from .measures import CSV_HEADER, FAMILY_KINDS, MEASURES, default_families, measure, write_reports_csv
from .search import SearchConfig
from .states import BathParams
from .sweep import ConfigError, run_sweep, validate_config


def parse_state(text, dim=None):
    kind, _, arg = text.partition(":")
    if not arg:
        raise argparse.ArgumentTypeError(f"state specifier needs KIND:VALUE, got {text!r}")
    try:
        if kind == "file":
            return states.load_density_matrix(arg)
        if kind == "fock":
            n = int(arg)
            return states.fock_state(n, dim or n + 10)
        if kind == "coherent":
            alpha = complex(arg)
            return states.coherent_state(alpha, dim or states.suggested_dim("coherent", alpha=alpha))
        if kind == "thermal":
            N = float(arg)
            return states.thermal_state(N, dim or states.suggested_dim("thermal", N=N))
        if kind in states.FAMILIES:
            n = int(arg)
            top = states.family_amplitudes(kind, n).size - 1
            return states.superposition_family(kind, n, dim or top + 10)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad state specifier {text!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(f"unknown state kind {kind!r}")


def _common(p):
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--threads", type=int, default=1, metavar="K", help="worker threads")
    p.add_argument("--seed", type=int, default=None, help="reserved; all algorithms are deterministic")


def build_parser():
    parser = argparse.ArgumentParser(prog="nonclassical", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve one state and write its density matrix")
    p.add_argument("--state", required=True)
    p.add_argument("--dim", type=int, help="Fock dimension of the initial state")
    p.add_argument("--gamma-t", type=float, required=True)
    p.add_argument("--N", type=float, default=0.0, dest="N", help="bath mean photon number")
    p.add_argument("--trunc", type=int, help="output truncation")
    p.add_argument("--method", choices=("fast", "printed"), default="fast")
    _common(p)

    p = sub.add_parser("measure", help="one non-classicality measure of one state")
    p.add_argument("--state", required=True)
    p.add_argument("--dim", type=int)
    p.add_argument("--measure", choices=MEASURES, required=True)
    p.add_argument("--gamma-t", type=float, default=0.0)
    p.add_argument("--N", type=float, default=0.0, dest="N")
    p.add_argument("--family", action="append", choices=FAMILY_KINDS, help="classical basis (repeatable)")
    p.add_argument("--budget", type=int, default=600)
    _common(p)

    p = sub.add_parser("sweep", help="run a configured sweep and write CSV")
    p.add_argument("--config", required=True, metavar="PATH")
    _common(p)

    p = sub.add_parser("selftest", help="quick oracle-equivalence and identity checks")
    p.add_argument("--config", metavar="PATH", help="unused; accepted for uniformity")
    _common(p)
    return parser


def cmd_evolve(args):
    rho0 = parse_state(args.state, args.dim)
    req = evolution.PropagatorRequest(BathParams(1.0, args.N), args.gamma_t, rho0, trunc=args.trunc, method=args.method)
    rho = evolution.propagate(req)
    text = states.format_density_matrix(rho)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_measure(args):
    rho0 = parse_state(args.state, args.dim)
    rho = evolution.evolve(rho0, args.gamma_t, args.N) if args.gamma_t > 0 else rho0
    fams = None
    if args.measure != "negativity":
        kinds = tuple(args.family) if args.family else ("coherent", "thermal", "rho_nu_plus")
        fams = default_families(rho, kinds, BathParams(1.0, args.N))
    rep = measure(args.measure, rho, fams, SearchConfig(max_evals=args.budget))
    row = rep.csv_row(args.state, args.gamma_t, args.N)
    if args.out:
        write_reports_csv([row], args.out)
    else:
        print(",".join(CSV_HEADER))
        print(",".join(row))
    return 0


def cmd_sweep(args):
    try:
        config = validate_config(args.config)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
        return 2
    result = run_sweep(config, threads=args.threads, out=args.out)
    if not (args.out or config.output):
        print(",".join(CSV_HEADER))
        for row in result.rows:
            print(",".join(row))
    print(result.summary(), file=sys.stderr)
    return 1 if result.failures else 0


def selftest_checks():
    """Yield ``(name, ok, detail)`` for a handful of fast consistency checks."""
    bath = BathParams(1.0, 0.5)
    for label, rho0 in (("fock:3", states.fock_state(3, 8)), ("skip:2", states.superposition_family("skip", 2, 8))):
        rho = evolution.evolve(rho0, 0.5, bath.N)
        ref = evolution.ode_oracle(rho0, bath, 0.5, trunc=rho.dim)
        err = float(np.max(np.abs(rho.entries - ref.entries)))
        yield f"propagate vs ODE ({label}, N=0.5, gamma_t=0.5)", err <= 1e-8, f"max err {err:.2e}"

    rho0 = states.fock_state(4, 8)
    ref = evolution.ode_oracle(rho0, BathParams(1.0, 0.0), 1.0)
    pops = evolution.zero_temperature_populations(4, 1.0)
    err = float(np.max(np.abs(pops - ref.populations[: pops.size])))
    yield "zero-temperature populations vs ODE (n0=4)", err <= 1e-10, f"max err {err:.2e}"

    for k, N in ((0, 0.5), (1, 0.06)):
        err = evolution.diagonalization(k, 80, N).identity_defect(block=10)
        yield f"T T^-1 = I (k={k}, N={N}, M=80)", err <= 1e-8, f"defect {err:.2e}"

    rho = evolution.evolve(states.fock_state(2, 6), 20.0, 0.5)
    n = np.arange(rho.dim)
    err = float(np.max(np.abs(rho.populations - 0.5**n / 1.5 ** (n + 1))))
    yield "steady state is thermal (N=0.5)", err <= 1e-6, f"max err {err:.2e}"


def cmd_selftest(args):
    failed = 0
    for name, ok, detail in selftest_checks():
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    return 1 if failed else 0


COMMANDS = {"evolve": cmd_evolve, "measure": cmd_measure, "sweep": cmd_sweep, "selftest": cmd_selftest}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except NonclassicalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
