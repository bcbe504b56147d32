"""The flagsos command line: enumerate, table, solve, gp, verify, demo.

Every command reads an optional problem spec (JSON file or inline flags),
writes a JSON report to stdout (or --out), and uses exit codes
0 = success, 2 = verification failure, 3 = infeasible, 4 = budget exceeded.
Rationals are serialized as "p/q" strings; output is deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .errors import BudgetError, FlagSosError, InfeasibleError, RoundingError, VerificationError
from .flagcalc import pair_density_table
from .graphs import (
    Graph,
    IntersectionType,
    K3,
    complete_graph,
    density_value,
    empty_graph,
    enumerate_A_free,
    enumerate_flags,
    single_vertex_type,
)
from .poly import MPoly, edge_density_poly
from .sdp import Certificate, assemble_flag_sdp, assemble_gp_sdp, solve_gp_exact
from .verify import (
    IdentityClaim,
    solve_and_certify,
    verify_density_bound,
    verify_identity,
    verify_mantel_flag_sos,
    verify_section5,
)

NAMED_GRAPHS = {
    "K3": lambda: complete_graph(3),
    "K4": lambda: complete_graph(4),
    "K5": lambda: complete_graph(5),
}


def _parse_graph(spec: str | dict) -> Graph:
    if isinstance(spec, dict):
        return Graph.from_json(spec)
    if spec in NAMED_GRAPHS:
        return NAMED_GRAPHS[spec]()
    with open(spec) as fh:
        return Graph.from_json(json.load(fh))


class ProblemSpec:
    """Problem parameters: forbidden graph, sizes, and optional partitions."""

    def __init__(
        self,
        forbidden: Graph,
        n: int,
        t: int = 1,
        f: int = 2,
        m: int = 3,
        d: int = 1,
        partitions=None,
        type_graph: IntersectionType | None = None,
    ):
        if t > f:
            raise FlagSosError("need type size t <= flag size f")
        if m < 2 * f - t:
            raise FlagSosError(f"need m >= 2f - t = {2 * f - t}")
        self.forbidden = forbidden
        self.n = n
        self.t = t
        self.f = f
        self.m = m
        self.d = d
        self.partitions = partitions
        self.type_ = type_graph if type_graph is not None else self._default_type(t)

    @staticmethod
    def _default_type(t: int) -> IntersectionType:
        if t == 1:
            return single_vertex_type()
        return IntersectionType(empty_graph(t), tuple(range(1, t + 1)))

    @staticmethod
    def from_args(args) -> "ProblemSpec":
        data = {}
        if getattr(args, "spec", None):
            with open(args.spec) as fh:
                data = json.load(fh)
        forbidden = _parse_graph(data.get("forbidden", getattr(args, "forbidden", "K3") or "K3"))
        type_graph = None
        if "type" in data:
            type_graph = IntersectionType.from_json(data["type"])
        partitions = data.get("partitions")
        if getattr(args, "partitions", None):
            partitions = json.loads(args.partitions)
        if partitions is not None:
            partitions = [tuple(p) for p in partitions]

        def pick(name, default):
            flag = getattr(args, name, None)
            if flag is not None:
                return flag
            return data.get(name, default)

        return ProblemSpec(
            forbidden=forbidden,
            n=int(pick("n", 5)),
            t=int(pick("t", 1)),
            f=int(pick("f", 2)),
            m=int(pick("m", 3)),
            d=int(pick("d", 1)),
            partitions=partitions,
            type_graph=type_graph,
        )


def _fr(x) -> str:
    return str(Fraction(x))


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_enumerate(args) -> int:
    spec = ProblemSpec.from_args(args)
    hosts = enumerate_A_free(spec.m, spec.forbidden)
    flags = enumerate_flags(spec.type_, spec.f, spec.forbidden)
    _emit(
        {
            "hosts": [h.to_json() for h in hosts],
            "flags": [fl.to_json() for fl in flags],
            "counts": {"hosts": len(hosts), "flags": len(flags)},
            "version": __version__,
        },
        args,
    )
    return 0


def cmd_table(args) -> int:
    spec = ProblemSpec.from_args(args)
    hosts = enumerate_A_free(spec.m, spec.forbidden)
    flags = enumerate_flags(spec.type_, spec.f, spec.forbidden)
    table = pair_density_table(flags, hosts)
    payload = table.to_json()
    payload["version"] = __version__
    _emit(payload, args)
    return 0


def cmd_solve(args) -> int:
    spec = ProblemSpec.from_args(args)
    instance, solution, certificate, report = solve_and_certify(
        spec.type_,
        spec.f,
        spec.m,
        spec.forbidden,
        tol=args.tol,
        max_iters=args.max_iters,
        denom_bound=args.denom_bound,
    )
    payload = certificate.to_json()
    payload["verification"] = {
        "bound": _fr(report["bound"]),
        "max_abs_err": _fr(report["max_abs_err"]),
        "err_constant": _fr(report["err_constant"]),
        "ambient_n": report["ambient_n"],
        "ok": report["ok"],
    }
    payload["solver"] = {
        "objective": solution.objective,
        "gap": solution.gap,
        "iterations": solution.iterations,
    }
    payload["version"] = __version__
    _emit(payload, args)
    return 0


def cmd_gp(args) -> int:
    """Symmetry-adapted route: certify the flag SOS through the restricted
    block SDP and report the blocks plus the implied density bound."""
    spec = ProblemSpec.from_args(args)
    from .symrep import multiplicity, partitions_lex_geq, symmetry_adapted_basis
    from .verify import max_abs_on_zero_set

    n = spec.n
    if spec.d == 0:
        # constants are the only degree-zero invariant squares, so the only
        # certifiable density bound is the trivial one
        _emit(
            {
                "partitions": [[n]],
                "block_sizes": {str(n): 1},
                "blocks": {},
                "flag_bound": "1",
                "bound_with_err": "1",
                "status": "trivial",
                "exact": True,
                "nullity": 0,
                "version": __version__,
            },
            args,
        )
        return 0
    if spec.d < spec.f * (spec.f - 1) // 2:
        raise FlagSosError(
            f"the adapted route needs degree d >= f(f-1)/2 = {spec.f * (spec.f - 1) // 2}"
        )
    # flag side: exact certificate first, then its SOS polynomial as GP target
    instance, solution, certificate, report = solve_and_certify(
        spec.type_, spec.f, spec.m, spec.forbidden,
        tol=args.tol, max_iters=args.max_iters, denom_bound=args.denom_bound,
    )
    q = [[Fraction(x) for x in row] for row in certificate.block("Q")]
    from .flagcalc import Labeling, d_theta_F, injections

    flags = instance.table.flags
    thetas = [Labeling(n, th) for th in injections(spec.t, range(1, n + 1))]
    target = MPoly.zero(n)
    for theta in thetas:
        y = [d_theta_F(fl, theta) for fl in flags]
        for i in range(len(flags)):
            for j in range(len(flags)):
                if q[i][j]:
                    target = target + y[i] * y[j] * q[i][j]
    target = target * Fraction(1, len(thetas))

    wanted = spec.partitions if spec.partitions is not None else partitions_lex_geq(n, spec.t)
    degree = max(spec.d, 1)
    basis = symmetry_adapted_basis(n, degree, [lam for lam in wanted if multiplicity(lam, n, degree)])
    inst = assemble_gp_sdp(
        target,
        spec.t,
        basis,
        spec.forbidden,
        partitions=spec.partitions,
    )
    gp = solve_gp_exact(inst, tol=args.tol, max_iters=args.max_iters)
    blocks_json = {
        ",".join(map(str, lam)): [[_fr(x) for x in row] for row in m] for lam, m in gp.blocks.items()
    }
    err_bound = None
    if n <= 6:
        hosts = instance.table.hosts
        from .flagcalc import d_H
        from .sdp import flag_objectives

        a_h = flag_objectives(instance, q)
        base = MPoly.zero(n)
        for hk, host in enumerate(hosts):
            if a_h[hk]:
                base = base + d_H(host, n) * a_h[hk]
        err = target - base
        err_bound = max_abs_on_zero_set(err, n, spec.forbidden).max_abs
    payload = {
        "partitions": [list(lam) for lam in inst.partitions],
        "block_sizes": {",".join(map(str, lam)): inst.y_matrices[lam].size for lam in inst.partitions},
        "blocks": blocks_json,
        "flag_bound": _fr(certificate.bound),
        "bound_with_err": None if err_bound is None else _fr(Fraction(certificate.bound) + err_bound),
        "max_abs_err": None if err_bound is None else _fr(err_bound),
        "status": gp.status,
        "exact": gp.exact,
        "nullity": gp.nullity,
        "version": __version__,
    }
    _emit(payload, args)
    return 0


def cmd_verify(args) -> int:
    spec = ProblemSpec.from_args(args)
    which = args.what
    if which == "identity":
        n = spec.n
        from .flagcalc import d_H

        hosts = enumerate_A_free(spec.m, spec.forbidden)
        total = MPoly.zero(n)
        weighted = MPoly.zero(n)
        for host in hosts:
            poly = d_H(host, n)
            total = total + poly
            weighted = weighted + poly * density_value(host)
        one = MPoly.constant(n, 1)
        ok1, w1 = verify_identity(
            IdentityClaim(one, total, n, spec.forbidden, "mod-ideal"), threads=args.threads
        )
        ok2, w2 = verify_identity(
            IdentityClaim(edge_density_poly(n), weighted, n, spec.forbidden, "mod-ideal"),
            threads=args.threads,
        )
        payload = {
            "unit_partition_identity": ok1,
            "density_decomposition_identity": ok2,
            "n": n,
            "m": spec.m,
            "version": __version__,
        }
        if not (ok1 and ok2):
            witness = w1 or w2
            payload["witness"] = witness.to_graph().to_json() if witness else None
            _emit(payload, args)
            return 2
        _emit(payload, args)
        return 0
    if which == "mantel":
        report = verify_mantel_flag_sos(spec.n, threads=args.threads)
        payload = {
            k: (_fr(v) if isinstance(v, Fraction) else v)
            for k, v in report.items()
        }
        payload["version"] = __version__
        _emit(payload, args)
        return 0 if report["ok"] else 2
    if which == "section5":
        report = verify_section5(spec.n)
        payload = {k: (_fr(v) if isinstance(v, Fraction) else v) for k, v in report.items()}
        payload["version"] = __version__
        _emit(payload, args)
        return 0 if report["ok"] else 2
    if which == "certificate":
        if not args.certificate:
            raise FlagSosError("verify certificate needs --certificate <cert.json>")
        with open(args.certificate) as fh:
            certificate = Certificate.from_json(json.load(fh))
        meta = certificate.meta
        type_size = int(meta.get("type_size", spec.t))
        type_ = ProblemSpec._default_type(type_size)
        instance = assemble_flag_sdp(
            type_,
            int(meta.get("flag_size", spec.f)),
            int(meta.get("host_size", spec.m)),
            _parse_graph(meta["forbidden"]) if "forbidden" in meta else spec.forbidden,
        )
        report = verify_density_bound(certificate, instance, n=spec.n, threads=args.threads)
        payload = {
            "bound": _fr(report["bound"]),
            "max_abs_err": _fr(report["max_abs_err"]),
            "err_constant": _fr(report["err_constant"]),
            "ambient_n": report["ambient_n"],
            "ok": report["ok"],
            "version": __version__,
        }
        _emit(payload, args)
        return 0
    raise FlagSosError(f"unknown verify target {which!r}")


def cmd_demo(args) -> int:
    """End-to-end reproduction of the worked triangle-free example, printing a
    side-by-side of computed values against the published ones."""
    if args.which != "mantel":
        raise FlagSosError("only the 'mantel' demo is available")
    n = args.n or 5
    lines = []
    instance, solution, certificate, report = solve_and_certify(single_vertex_type(), 2, 3, K3)
    table = instance.table
    published = {
        (0, 0): {0: "1", 1: "1/3", 2: "0"},
        (0, 1): {0: "0", 1: "1/3", 2: "1/3"},
        (1, 1): {0: "0", 1: "0", 2: "1/3"},
    }
    table_ok = True
    for (i, j), row in published.items():
        for k, val in row.items():
            got = table.value(i, j, k)
            table_ok &= got == Fraction(val)
            lines.append(f"d_pair(F{i},F{j}) at H{k}: computed {got}, published {val}")
    lines.append(f"flag SDP objective: computed {solution.objective:.10f}, published 0.5")
    lines.append(f"rounded Q: {[[_fr(x) for x in row] for row in certificate.block('Q')]}, published [[1/2, -1/2], [-1/2, 1/2]]")
    lines.append(f"certified bound: {_fr(certificate.bound)}, published 1/2")
    mantel = verify_mantel_flag_sos(min(max(n, 4), 6))
    lines.append(f"short-SOS identity on every zero: {mantel['chain_identity']}")
    s5 = verify_section5(min(max(n, 4), 7))
    lines.append(
        f"two-block adapted identity at n={s5['n']}: exact={s5['identity']}, det Q_(n)=0: {s5['det_qn_zero']}, rank {s5['qn_rank']}"
    )
    payload = {
        "table_matches_published": table_ok,
        "flag_bound": _fr(certificate.bound),
        "sos_report": {k: (_fr(v) if isinstance(v, Fraction) else v) for k, v in mantel.items()},
        "section5_report": {k: (_fr(v) if isinstance(v, Fraction) else v) for k, v in s5.items()},
        "lines": lines,
        "version": __version__,
    }
    _emit(payload, args)
    if not args.out:
        for line in lines:
            sys.stderr.write(line + "\n")
    return 0 if table_ok and mantel["ok"] and s5["ok"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagsos",
        description="Flag-algebra SOS certificates for graph edge-density bounds",
    )
    parser.add_argument("--version", action="version", version=f"flagsos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_solver=False):
        p.add_argument("--spec", help="problem spec JSON file")
        p.add_argument("--forbidden", default=None, help="forbidden graph: K3/K4/K5 or a JSON file")
        p.add_argument("--n", type=int, default=None, help="ambient vertex count")
        p.add_argument("--t", type=int, default=None, help="intersection type size")
        p.add_argument("--f", type=int, default=None, help="flag size")
        p.add_argument("--m", type=int, default=None, help="host size")
        p.add_argument("--d", type=int, default=None, help="SOS degree for the GP route")
        p.add_argument("--partitions", default=None, help="explicit partition list as JSON, e.g. [[5],[4,1]]")
        p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
        p.add_argument("--threads", type=int, default=1, help="worker processes for zero-set scans")
        if with_solver:
            p.add_argument("--tol", type=float, default=1e-10, help="solver duality-gap tolerance")
            p.add_argument("--max-iters", type=int, default=400, dest="max_iters")
            p.add_argument("--denom-bound", type=int, default=10**4, dest="denom_bound")

    p = sub.add_parser("enumerate", help="hosts and flags with counts")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("table", help="exact pair-density table")
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("solve", help="assemble, solve, round, verify, emit a certificate")
    common(p, with_solver=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gp", help="symmetry-adapted block route for the flag target")
    common(p, with_solver=True)
    p.set_defaults(func=cmd_gp)

    p = sub.add_parser("verify", help="exact verification of identities and certificates")
    p.add_argument("what", choices=["identity", "mantel", "section5", "certificate"])
    p.add_argument("--certificate", default=None, help="certificate JSON file")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo", help="reproduce the worked triangle-free example end to end")
    p.add_argument("which", nargs="?", default="mantel", choices=["mantel"])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    # `--demo mantel` shorthand for the demo subcommand
    if argv and argv[0] == "--demo":
        argv = ["demo"] + argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return 4
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return 3
    except (VerificationError, RoundingError) as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return 2
    except FlagSosError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
