"""Command-line interface: ``ghcodes <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (reported as one JSON
object on stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds_planner as bp
from . import constructions as cons
from .finite_field import FieldError, make_field
from .gh_matrix import GHError, extract_codes, format_ghm, normalize, parse_ghm, verify_gh
from .invariants import bound_violations, invariant_report
from .quantum import QuantumError, generator_text, quantum_report
from .search import (COMPLETE_MAX_Q, SearchError, SearchSpec, record_in_planner,
                     search_additive_gh)

KINDS = ["sylvester", "kron", "switching1", "switching2", "switching3", "projection", "ghp2", "fixed"]
FIXTURES = {
    "SW1_16x16": "switching construction I at p = 2, e = 2",
    "PROJ_8x8": "GF(8) multiplication table projected to GF(4)",
    "H8_rank4": "H(8,1) over GF(8) with rank 4 and kernel 1 (one entry repaired)",
}


class CliError(Exception):
    """A domain error to report with exit status 1."""


def _int_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, N,M,... or A..B, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _load_recipe(text: str) -> cons.Recipe:
    path = Path(text)
    raw = path.read_text(encoding="utf-8") if path.exists() else text
    try:
        return cons.recipe_from_json(json.loads(raw))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"cannot read recipe from {text!r}: {exc}")


def _read_matrix(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(str(exc))
    return parse_ghm(text)


def _sidecar(path: Path) -> Path:
    return path.with_name(path.stem + ".recipe.json")


def _write_matrix(M, out: str | None, recipe: cons.Recipe | None = None, comments=()):
    text = format_ghm(M, comments)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    p = Path(out)
    p.write_text(text, encoding="utf-8")
    if recipe is not None:
        _sidecar(p).write_text(json.dumps(recipe.to_json(), indent=2) + "\n", encoding="utf-8")


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise CliError(f"--kind {args.kind} needs {' '.join(missing)}")


def _recipe_from_args(args) -> cons.Recipe:
    k = args.kind
    if k == "sylvester":
        _need(args, "p", "e", "h")
        return cons.Sylvester(args.p, args.e, args.h)
    if k == "kron":
        if not (args.left and args.right):
            raise CliError("--kind kron needs --left and --right recipes")
        return cons.Kron(_load_recipe(args.left), _load_recipe(args.right))
    if k == "switching1":
        _need(args, "p", "e")
        return cons.SwitchI(args.p, args.e)
    if k == "switching2":
        _need(args, "p", "e", "h", "s")
        if len(args.s) != 1:
            raise CliError("--kind switching2 takes a single --s")
        return cons.SwitchII(args.p, args.e, args.h, args.s[0])
    if k == "switching3":
        _need(args, "p", "e", "h", "s")
        return cons.SwitchIII(args.p, args.e, args.h, tuple(args.s))
    if k == "projection":
        _need(args, "p", "e", "t")
        return cons.Projection(args.p, args.e, args.t)
    if k == "ghp2":
        _need(args, "p")
        return cons.GHp2(args.p)
    if k == "fixed":
        _need(args, "id")
        return cons.Fixed(args.id)
    raise CliError(f"unknown kind {k}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_construct(args) -> int:
    recipe = _load_recipe(args.recipe) if args.recipe else _recipe_from_args(args)
    M = recipe.build()
    d = recipe.declared()
    _write_matrix(M, args.output, recipe,
                  [f"recipe {recipe}", f"declared rank {d.rank} kernel {d.ker}"])
    return 0


def cmd_verify(args) -> int:
    M = _read_matrix(args.path)
    rep = verify_gh(M)
    if rep:
        print(f"ok: GH matrix H({M.field.q},{M.lam}) of order {M.n}")
        return 0
    i, j, elem, count = rep.violation
    print(json.dumps({"ok": False, "rows": [i, j], "element": elem, "count": count,
                      "expected": M.lam}))
    return 1


def _normalized(M):
    if not verify_gh(M):
        raise CliError("input is not a GH matrix")
    if not M.is_normalized:
        print("note: input normalized before measuring", file=sys.stderr)
        return normalize(M)
    return M


def cmd_invariants(args) -> int:
    rep = invariant_report(_normalized(_read_matrix(args.path)))
    viol = bound_violations(rep)
    if args.json:
        obj = rep.to_json()
        if args.bounds:
            obj["bound_violations"] = viol
        print(json.dumps(obj))
    else:
        for name, inv in (("F_H", rep.F_H), ("C_H", rep.C_H)):
            print(f"{name}: rank={inv.rank_q} ker={inv.ker_q} rank_p={inv.rank_p} ker_p={inv.ker_p}")
        print(f"additive={str(rep.is_p_additive).lower()} linear={str(rep.is_q_linear).lower()}")
        if args.bounds:
            print("bounds: " + ("ok" if not viol else "; ".join(viol)))
    return 1 if (args.bounds and viol) else 0


def cmd_plan(args) -> int:
    st = bp.pair_status(args.p, args.e, args.t, args.rank, args.ker, specific=not args.generic)
    if (args.search and not args.generic and st.verdict == bp.OPEN and args.t == args.e
            and args.ker == 1 and args.p ** args.e <= COMPLETE_MAX_Q):
        res = search_additive_gh(SearchSpec(make_field(args.p, args.e), target_rank=args.rank))
        record_in_planner(res)
        print(f"search: found={len(res.solutions)} complete={str(res.complete).lower()}")
        st = bp.pair_status(args.p, args.e, args.t, args.rank, args.ker)
    print(st)
    if not args.build:
        return 0
    if st.verdict != bp.CONSTRUCTIBLE:
        raise CliError(f"not constructible: {st}")
    res = bp.build_and_check(st.recipe, verify=not args.no_verify)
    print(f"build: {res.note}" + (f" (r, k) = {res.measured}" if res.measured else ""))
    if args.output:
        _write_matrix(res.matrix, args.output, st.recipe, [f"recipe {st.recipe}", res.note])
    return 0


def cmd_table(args) -> int:
    table = bp.emit_pair_table(args.p, args.e, args.t, specific=args.specific)
    if args.format == "csv":
        sys.stdout.write(table.csv())
    elif args.format == "aligned":
        sys.stdout.write(table.aligned())
    else:
        sys.stdout.write(table.text())
    return 0


def cmd_quantum(args) -> int:
    M = _normalized(_read_matrix(args.path))
    rep = quantum_report(M, scan=not args.no_scan)
    print(rep.dumps())
    if args.generators:
        Path(args.generators).write_text(generator_text(extract_codes(M)[1]), encoding="utf-8")
    return 0 if rep.self_orthogonal and rep.dual_scan != "nonempty" else 1


def cmd_search(args) -> int:
    F = make_field(args.p, args.e)
    spec = SearchSpec(F, lam=args.lam, target_rank=args.rank, max_nodes=args.max_nodes,
                      max_seconds=args.max_seconds, allow_incomplete=args.allow_incomplete)
    progress = (lambda line: print(line, file=sys.stderr, flush=True)) if args.progress else None
    res = search_additive_gh(spec, progress)
    record_in_planner(res)
    print(json.dumps({"q": F.q, "lambda": args.lam, "target_rank": args.rank,
                      "found": len(res.solutions), "complete": res.complete, "nodes": res.nodes}))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, M in enumerate(res.solutions):
            (out / f"solution_{i:03d}.ghm").write_text(format_ghm(M), encoding="utf-8")
    return 0


def _fixture_rebuild(name):
    if name == "SW1_16x16":
        return cons.switching_I(2, 2)
    if name == "PROJ_8x8":
        return cons.projection_construction(2, 2, 3)
    return None


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for name, desc in FIXTURES.items():
            print(f"{name}: {desc}")
        return 0
    if args.action == "emit":
        if not args.ids or len(args.ids) != 1:
            raise CliError("fixtures emit takes exactly one id")
        name = args.ids[0]
        if name not in FIXTURES:
            raise CliError(f"unknown fixture {name!r}")
        text = cons.fixture_text(name)
        if args.output and args.output != "-":
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return 0
    names = args.ids or list(FIXTURES) + ["H9_1"]
    failed = 0
    for name in names:
        if name == "H9_1":
            M = cons.gh_p2_one(3)
            F = M.field
            v1, v2 = cons.gh_p2_vectors(F)
            rep = invariant_report(M)
            ok = (bool(verify_gh(M)) and rep.is_p_additive and (rep.rank, rep.ker) == (3, 1)
                  and (F.mul_table[F.exp[F.p], F.frob_table[v1]] == v2).all())
            how = "structural"
        elif name in FIXTURES:
            stored = parse_ghm(cons.fixture_text(name))
            built = _fixture_rebuild(name)
            if built is not None:
                ok = format_ghm(built) == format_ghm(stored)
                how = "byte-equal"
            else:
                rep = invariant_report(stored)
                ok = bool(verify_gh(stored)) and rep.is_p_additive and (rep.rank, rep.ker) == (4, 1)
                how = "verified (4,1)"
        else:
            raise CliError(f"unknown fixture {name!r}")
        print(f"{name}: {'pass' if ok else 'FAIL'} ({how})")
        failed += not ok
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ghcodes", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a GH matrix and write it as .ghm")
    c.add_argument("--kind", choices=KINDS)
    c.add_argument("--recipe", help="recipe JSON (file or inline) instead of --kind")
    c.add_argument("--p", type=int)
    c.add_argument("--e", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--h", type=int)
    c.add_argument("--s", type=_int_list, help="switching amount(s), comma separated")
    c.add_argument("--id", choices=sorted(cons.FIXED_DECLARED))
    c.add_argument("--left", help="left recipe for --kind kron")
    c.add_argument("--right", help="right recipe for --kind kron")
    c.add_argument("-o", "--output", help="output .ghm (a .recipe.json sidecar is written next to it)")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check the GH property of a .ghm file")
    v.add_argument("path")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("invariants", help="rank and kernel report")
    i.add_argument("path")
    i.add_argument("--json", action="store_true")
    i.add_argument("--bounds", action="store_true", help="also check the additive-code bounds")
    i.set_defaults(func=cmd_invariants)

    p = sub.add_parser("plan", help="verdict and recipe for one (rank, kernel) pair")
    for name in ("p", "e", "t", "rank", "ker"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--generic", action="store_true", help="use only field-independent results")
    p.add_argument("--search", action="store_true",
                   help="settle an open t = e, kernel-1 pair by exhaustive search (q <= 9)")
    p.add_argument("--build", action="store_true")
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plan)

    t = sub.add_parser("table", help="pair table over a range of t")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--e", type=int, required=True)
    t.add_argument("--t", type=_int_range, required=True, help="A..B or a list")
    t.add_argument("--format", choices=["text", "aligned", "csv"], default="text")
    t.add_argument("--specific", action="store_true", help="include field-specific results")
    t.set_defaults(func=cmd_table)

    q = sub.add_parser("quantum", help="self-orthogonality and quantum code parameters")
    q.add_argument("path")
    q.add_argument("--no-scan", action="store_true")
    q.add_argument("--generators", help="write F_p-generators of C_H here")
    q.set_defaults(func=cmd_quantum)

    s = sub.add_parser("search", help="exhaustive search for additive H(q,1)")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--lam", type=int, default=1)
    s.add_argument("--rank", type=int)
    s.add_argument("--max-nodes", type=int, default=10**9)
    s.add_argument("--max-seconds", type=float, default=900.0)
    s.add_argument("--allow-incomplete", action="store_true")
    s.add_argument("--progress", action="store_true", help="PROGRESS lines on stderr")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_search)

    f = sub.add_parser("fixtures", help="embedded matrix fixtures")
    f.add_argument("action", choices=["list", "emit", "check"])
    f.add_argument("ids", nargs="*")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_fixtures)
    return ap


DOMAIN_ERRORS = (CliError, GHError, FieldError, QuantumError, SearchError, bp.PlannerError,
                 cons.ConstructionError, ValueError, ArithmeticError, AssertionError, RuntimeError)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "construct" and not (args.kind or args.recipe):
        print("ghcodes construct: error: one of --kind or --recipe is required", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
