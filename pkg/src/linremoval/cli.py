"""Batch command-line front end.

Subcommands: snf, dk, complete (integer normal forms); ngood, circular,
cmatrix (padding, circularity, kernel matrix); solve, pipeline, copies,
verify, remove (restricted systems end to end).  Input is one JSON file
in the package wire format; the report is JSON on stdout, pretty with
--human.  Exit codes: 0 success (thin included), 2 parse, 3 precondition,
4 budget, 5 infeasible protection.

Coordinates in reports are 1-based, as is --protect.  Commands are
deterministic: the same input file always produces byte-identical output.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import (
    BudgetExceededError,
    InfeasibleRemovalError,
    PreconditionError,
    SchemaError,
)
from .hypergraph import build_host, enumerate_copies, verify_copy_classes, verify_copy_labels
from .intmat import (
    complete_to_square,
    det,
    determinantal_divisor,
    is_n_good,
    n_good_padding,
    smith_normal_form,
)
from .jsonio import (
    decode_matrix,
    decode_system,
    dump,
    encode_element,
    encode_int,
    encode_matrix,
    load_file,
)
from .pipeline import (
    CircularSystem,
    build_kernel_matrix,
    full_extension,
    is_circular,
    standardize,
)
from .removal import greedy_removal, min_removal_exact, small_m_removal
from .system import (
    DEFAULT_BUDGET,
    RestrictedSystem,
    _identity_prefix,
    count_solutions,
    enumerate_solutions,
    pull_back_removal,
    remove_elements,
    verify_extension,
)

BUDGET_ENV = "LINREMOVAL_BUDGET"


def _encode_sets(sets) -> list:
    return [[encode_element(v) for v in xs] for xs in sets]


def cmd_snf(args, budget) -> dict:
    matrix = decode_matrix(load_file(args.input))
    res = smith_normal_form(matrix)
    assert (res.U @ matrix) @ res.V == res.S, "normal form product check failed"
    return {
        "U": encode_matrix(res.U),
        "S": encode_matrix(res.S),
        "V": encode_matrix(res.V),
    }


def cmd_dk(args, budget) -> dict:
    matrix = decode_matrix(load_file(args.input))
    upto = min(matrix.rows, matrix.cols)
    return {
        "divisors": [
            encode_int(determinantal_divisor(matrix, k))
            for k in range(1, upto + 1)
        ]
    }


def cmd_complete(args, budget) -> dict:
    matrix = decode_matrix(load_file(args.input))
    completed = complete_to_square(matrix)
    return {
        "completed": encode_matrix(completed),
        "det": encode_int(det(completed)),
    }


def cmd_ngood(args, budget) -> dict:
    matrix = decode_matrix(load_file(args.input))
    padded = n_good_padding(matrix, args.n)
    return {
        "padded": encode_matrix(padded),
        "rows": padded.rows,
        "n": args.n,
        "n_good": is_n_good(padded, args.n),
    }


def cmd_circular(args, budget) -> dict:
    matrix = decode_matrix(load_file(args.input))
    ok = is_circular(matrix, args.n)
    return {
        "circular": ok,
        "n": args.n,
        "standard": encode_matrix(standardize(matrix, args.n)) if ok else None,
    }


def cmd_cmatrix(args, budget) -> dict:
    matrix = decode_matrix(load_file(args.input))
    kernel = build_kernel_matrix(matrix, args.n)
    return {"kernel": encode_matrix(kernel), "n": args.n}


def cmd_solve(args, budget) -> dict:
    system = decode_system(load_file(args.input))
    sols = enumerate_solutions(system, budget)
    return {
        "count": len(sols),
        "solutions": [[encode_element(v) for v in x] for x in sols],
    }


def _thin_payload(witness) -> dict:
    return {
        "coordinate": witness.coordinate + 1,
        "value": None if witness.value is None else encode_element(witness.value),
        "vacuous": witness.vacuous,
    }


def _report_payload(report) -> dict:
    return {
        "ok": report.ok,
        "dimensions": report.dimension_ok,
        "free_coordinates": report.full_group_ok,
        "structure": report.structure_ok,
        "bijection": report.bijection_ok,
        "source_count": report.source_count,
        "target_count": report.target_count,
        "problems": report.problems,
    }


def _encode_stages(stages) -> list:
    out = []
    for st in stages:
        enc = dict(st)
        if "row_divisors" in enc:
            enc["row_divisors"] = [encode_int(v) for v in enc["row_divisors"]]
        out.append(enc)
    return out


def cmd_pipeline(args, budget) -> dict:
    system = decode_system(load_file(args.input))
    res = full_extension(system, budget)
    payload = {
        "outcome": res.outcome,
        "stages": _encode_stages(res.stages),
        "solutions": res.stages[0]["solutions"],
    }
    if res.outcome == "thin":
        payload["thin"] = _thin_payload(res.thin)
        return payload
    if res.outcome == "small-system":
        payload["note"] = (
            "at most one free column; the remove command handles this directly"
        )
        return payload
    payload["target"] = {
        "equations": res.circular.equations,
        "variables": res.circular.variables,
        "modulus": res.circular.modulus,
    }
    payload["mapped_coords"] = [j + 1 for j in res.composed.mapped_coords]
    payload["target_circular"] = is_circular(
        res.circular.matrix, res.circular.modulus
    )
    payload["verification"] = _report_payload(
        verify_extension(res.composed, budget)
    )
    if args.trace:
        payload["matrices"] = {
            "translate": encode_matrix(res.chain[0].target.matrix),
            "identity_form": encode_matrix(res.chain[1].target.matrix),
            "circular": encode_matrix(res.chain[2].target.matrix),
            "kernel": encode_matrix(res.circular.kernel_matrix),
        }
    return payload


def _route_host(system, budget):
    """Direct host when the input is already standard circular homogeneous;
    otherwise run the full reduction and host its target."""
    group = system.group
    n = group.order
    k, m = system.equations, system.variables
    if system.is_homogeneous() and m >= k + 2:
        reduced = system.matrix.mod(n)
        if _identity_prefix(reduced) and is_circular(reduced, n):
            kernel = build_kernel_matrix(reduced, n)
            circ = CircularSystem(reduced, kernel, n)
            host = build_host(group, circ, system.restrictions)
            return "direct", host, None
    res = full_extension(system, budget)
    if res.outcome != "circular":
        return "pipeline", None, res
    host = build_host(group, res.circular, res.composed.target.restrictions)
    return "pipeline", host, res


def cmd_copies(args, budget) -> dict:
    system = decode_system(load_file(args.input))
    route, host, res = _route_host(system, budget)
    if host is None:
        return {
            "route": route,
            "outcome": res.outcome,
            "note": "no circular target to enumerate copies on",
        }
    copies = enumerate_copies(host, budget)
    payload = {
        "route": route,
        "count": len(copies),
        "positions": host.positions,
        "arity": host.arity_base + 1,
    }
    if args.full:
        payload["copies"] = [
            {
                "assignment": [encode_element(v) for v in c.assignment],
                "labels": [encode_element(v) for v in c.labels],
            }
            for c in copies
        ]
    return payload


def cmd_verify(args, budget) -> dict:
    system = decode_system(load_file(args.input))
    route, host, res = _route_host(system, budget)
    if host is None:
        return {
            "route": route,
            "outcome": res.outcome,
            "note": "no circular target to verify",
        }
    copies = enumerate_copies(host, budget)
    zero_rhs = tuple(host.group.zero for _ in range(host.matrix.rows))
    circ_system = RestrictedSystem(
        host.group, host.matrix, zero_rhs, host.restrictions
    )
    sols = enumerate_solutions(circ_system, budget)
    classes = verify_copy_classes(host, copies, sols)
    labels = verify_copy_labels(host, copies)
    return {
        "route": route,
        "copies": len(copies),
        "classes": classes.class_count,
        "expected_class_size": classes.expected_class_size,
        "solutions": len(sols),
        "class_report": {
            "ok": classes.ok,
            "kernel": classes.kernel_ok,
            "labels_match": classes.labels_match,
            "class_sizes": classes.class_sizes_ok,
            "edge_disjoint": classes.disjoint_ok,
            "problems": classes.problems,
        },
        "label_report": {
            "ok": labels.ok,
            "problems": labels.problems,
        },
        "verdict": "PASS" if classes.ok and labels.ok else "FAIL",
    }


def _parse_protect(raw, variables) -> frozenset[int]:
    if not raw:
        return frozenset()
    out = set()
    for tok in raw.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if not tok.isdigit() or int(tok) < 1:
            raise SchemaError(
                f"--protect expects 1-based coordinates, got {tok!r}"
            )
        j = int(tok) - 1
        if j >= variables:
            raise PreconditionError(
                f"protected coordinate {tok} exceeds the variable count"
            )
        out.add(j)
    return frozenset(out)


def cmd_remove(args, budget) -> dict:
    system = decode_system(load_file(args.input))
    protected = _parse_protect(args.protect, system.variables)
    solver = greedy_removal if args.greedy else min_removal_exact
    res = full_extension(system, budget)

    if res.outcome == "thin":
        wit = res.thin
        if wit.vacuous:
            removed = tuple(() for _ in range(system.variables))
            certificate = {"optimal": True, "lower_bound": 0}
            route = "thin"
        elif wit.coordinate not in protected:
            removed = tuple(
                (wit.value,) if j == wit.coordinate else ()
                for j in range(system.variables)
            )
            certificate = {"optimal": True, "lower_bound": 1}
            route = "thin"
        else:
            sol = solver(system, protected, budget)
            removed = sol.removed
            certificate = {"optimal": sol.optimal, "lower_bound": sol.lower_bound}
            route = "protected-fallback"
    elif res.outcome == "small-system":
        if protected:
            sol = solver(system, protected, budget)
            removed = sol.removed
            certificate = {"optimal": sol.optimal, "lower_bound": sol.lower_bound}
            route = "protected-fallback"
        else:
            sol = small_m_removal(system, budget)
            removed = sol.removed
            certificate = {"optimal": sol.optimal, "lower_bound": sol.lower_bound}
            route = "small"
    else:
        composed = res.composed
        inverse = {src: tgt for tgt, src in composed.coord_map.items()}
        shielded = set(range(composed.target.variables)) - set(
            composed.mapped_coords
        )
        shielded.update(inverse[j] for j in protected)
        target_sol = solver(composed.target, shielded, budget)
        removed = pull_back_removal(composed, target_sol.removed, budget)
        certificate = {
            "optimal": False,
            "lower_bound": None,
            "target_total_size": target_sol.total_size,
            "target_optimal": target_sol.optimal,
            "target_lower_bound": target_sol.lower_bound,
        }
        route = "pipeline"

    total = sum(len(s) for s in removed)
    post = count_solutions(remove_elements(system, removed), budget)
    assert post == 0, "reported removal leaves solutions alive"
    return {
        "route": route,
        "removed": _encode_sets(removed),
        "total_size": total,
        "certificate": certificate,
        "post_count": post,
    }


def _resolve_budget(args) -> int:
    if args.budget is not None:
        value = args.budget
    else:
        raw = os.environ.get(BUDGET_ENV)
        if raw is None:
            return DEFAULT_BUDGET
        if not raw.lstrip("-").isdigit():
            raise SchemaError(f"{BUDGET_ENV} must be an integer, got {raw!r}")
        value = int(raw)
    if value < 1:
        raise SchemaError("budget must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="path to the JSON input file")
    common.add_argument(
        "--budget",
        type=int,
        default=None,
        help=f"enumeration budget (default {DEFAULT_BUDGET}, env {BUDGET_ENV})",
    )
    common.add_argument(
        "--human", action="store_true", help="pretty-print the JSON report"
    )
    common.add_argument(
        "-o", "--output", default=None, help="write the report to a file"
    )

    parser = argparse.ArgumentParser(
        prog="linremoval",
        description="restricted linear systems over finite abelian groups: "
        "normal forms, circular reduction, hypergraph copies, removal sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form U, S, V")
    p.set_defaults(handler=cmd_snf)
    p = sub.add_parser("dk", parents=[common], help="determinantal divisors")
    p.set_defaults(handler=cmd_dk)
    p = sub.add_parser(
        "complete", parents=[common], help="complete to a square matrix"
    )
    p.set_defaults(handler=cmd_complete)

    p = sub.add_parser("ngood", parents=[common], help="pad until all row windows are coprime to n")
    p.add_argument("--n", type=int, required=True, help="modulus")
    p.set_defaults(handler=cmd_ngood)
    p = sub.add_parser("circular", parents=[common], help="circularity check and standard form")
    p.add_argument("--n", type=int, required=True, help="modulus")
    p.set_defaults(handler=cmd_circular)
    p = sub.add_parser("cmatrix", parents=[common], help="kernel matrix of a standard circular matrix")
    p.add_argument("--n", type=int, required=True, help="modulus")
    p.set_defaults(handler=cmd_cmatrix)

    p = sub.add_parser("solve", parents=[common], help="enumerate all solutions")
    p.set_defaults(handler=cmd_solve)
    p = sub.add_parser("pipeline", parents=[common], help="reduce to circular form")
    p.add_argument(
        "--trace", action="store_true", help="include intermediate matrices"
    )
    p.set_defaults(handler=cmd_pipeline)
    p = sub.add_parser("copies", parents=[common], help="enumerate hypergraph copies")
    p.add_argument(
        "--full", action="store_true", help="list assignments and labels"
    )
    p.set_defaults(handler=cmd_copies)
    p = sub.add_parser("verify", parents=[common], help="verify copy classes and labels")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("remove", parents=[common], help="minimum removal sets")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument(
        "--exact", action="store_true", help="exact minimum (default)"
    )
    mode.add_argument("--greedy", action="store_true", help="greedy heuristic")
    p.add_argument(
        "--protect",
        default=None,
        help="comma-separated 1-based coordinates that must stay untouched",
    )
    p.set_defaults(handler=cmd_remove)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code
        return code if isinstance(code, int) else 2

    try:
        budget = _resolve_budget(args)
        payload = args.handler(args, budget)
    except SchemaError as e:
        _emit_error("schema", e)
        return 2
    except PreconditionError as e:
        _emit_error("precondition", e)
        return 3
    except BudgetExceededError as e:
        _emit_error("budget", e)
        return 4
    except InfeasibleRemovalError as e:
        _emit_error("infeasible", e)
        return 5

    text = dump(payload, human=args.human)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _emit_error(kind: str, exc: Exception) -> None:
    sys.stderr.write(dump({"error": {"kind": kind, "message": str(exc)}}))


def run() -> None:
    sys.exit(main())
