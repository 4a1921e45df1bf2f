"""Command-line front end.

Every command prints a JSON run report. Exit status: 0 affirmative, 1 negative,
2 bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import tempfile
import time
from pathlib import Path as FsPath
from typing import Any, Callable, Optional

from . import approx, ccsolve, crosstree, gammaspace, generate
from .errors import CapExceeded, InputError

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class Outcome:
    def __init__(self, affirmative: bool, outcome: str, result: Any = None,
                 certificate: Any = None, verified: Optional[bool] = None):
        self.affirmative = affirmative
        self.outcome = outcome
        self.result = result
        self.certificate = certificate
        self.verified = verified


def _read_json(path: str) -> Any:
    try:
        text = FsPath(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e


def _load_tree(path: str) -> crosstree.CrossTree:
    return crosstree.CrossTree.from_dict(_read_json(path))


def _tuple_arg(text: Optional[str], r: int) -> tuple:
    if text is None:
        return ("",) * r
    parts = tuple(text.split(",")) if r > 1 or "," in text else (text,)
    if r == 0:
        parts = ()
    if len(parts) != r:
        raise InputError(f"--sigma needs {r} comma-separated components")
    return parts


def _node(node) -> dict:
    return {"left": node[0], "right": list(node[1])}


# -- tree ------------------------------------------------------------------


def cmd_tree(args) -> Outcome:
    sub = args.tree_cmd
    if sub == "from-forbidden":
        raw = _read_json(args.forbidden)
        try:
            w = [(item["left"], tuple(item["right"])) for item in raw]
        except (KeyError, TypeError) as e:
            raise InputError(f"forbidden list entries need left and right: {e}") from e
        t = crosstree.from_forbidden(w, args.height, args.r)
        return Outcome(True, "tree", t.to_dict())
    t = _load_tree(args.input)
    if sub == "validate":
        problems = crosstree.validate(t)
        return Outcome(not problems, "valid" if not problems else "invalid", {"problems": problems})
    problems = crosstree.validate(t)
    if problems:
        raise InputError(f"invalid cross-tree: {problems[0]}")
    if sub == "prune":
        pruned = crosstree.right_prune(t)
        return Outcome(True, "tree", pruned.to_dict())
    rho = args.rho or ""
    if sub == "slice":
        sl = sorted(crosstree.slice(t, rho))
        return Outcome(bool(sl), "slice", [list(s) for s in sl])
    sigma = _tuple_arg(args.sigma, t.r)
    if sub == "leftfull":
        direct = crosstree.leftfull(t, rho, sigma)
        cert = {"bottom_up": t.is_leftfull(rho, sigma)}
        if t.is_right_pruned:
            cert["criterion_c"] = crosstree.leftfull_via_c(t, rho, sigma)
        agree = all(v == direct for v in cert.values())
        return Outcome(direct, "yes" if direct else "no", direct, cert, agree)
    if sub == "extend":
        if args.n is None:
            raise InputError("--n is required")
        node = crosstree.leftfull_extend(t, rho, sigma, args.n)
        ok = crosstree.leftfull(t, *node)
        return Outcome(True, "extended", _node(node), None, ok)
    raise InputError(f"unknown tree subcommand {sub}")


# -- solve -----------------------------------------------------------------


def cmd_solve(args) -> Outcome:
    if args.sweep:
        return _sweep(args)
    if not args.input:
        raise InputError("--input or --sweep is required")
    t = _load_tree(args.input)
    problems = crosstree.validate(t)
    if problems:
        raise InputError(f"invalid cross-tree: {problems[0]}")
    sol = ccsolve.solve(t)
    verified = not ccsolve.check_solution(t, sol) and all(
        ccsolve.brute_excluded(t, st.at, st.component) for st in sol.restarts)
    cert = None
    if args.oracle:
        brute = ccsolve.brute_solution(t)
        kept = [s for s in range(t.r) if s not in sol.excluded]
        consistent = brute is not None and all(brute.agreement[s] for s in kept)
        cert = {"consistent": consistent, "oracle": None if brute is None else brute.to_dict()}
        verified = verified and consistent
    return Outcome(bool(verified), "solved" if verified else "inconsistent", sol.to_dict(), cert, verified)


def _sweep(args) -> Outcome:
    n, r = args.sweep
    limit = args.limit
    checked = exclusions = failures = 0
    empty_agreement = 0
    for t in generate.iter_leftfull(n, r):
        if limit is not None and checked >= limit:
            break
        sol = ccsolve.solve(t)
        checked += 1
        exclusions += bool(sol.excluded)
        empty_agreement += any(not a for a in sol.agreement)
        if ccsolve.check_solution(t, sol) or not all(
                ccsolve.brute_excluded(t, st.at, st.component) for st in sol.restarts):
            failures += 1
    summary = {"height": n, "r": r, "trees": checked, "with_exclusions": exclusions,
               "empty_agreement": empty_agreement, "failures": failures,
               "complete": limit is None or checked < limit}
    if exclusions == 0:
        summary["note"] = f"no exclusions at N={n}, r={r}"
    return Outcome(failures == 0, "sweep", summary, None, failures == 0)


# -- gamma -----------------------------------------------------------------


def _load_elem(path: str):
    g = gammaspace.elem_from_dict(_read_json(path))
    return g


def cmd_gamma(args) -> Outcome:
    sub = args.gamma_cmd
    if sub == "longest-chain":
        length, chain = gammaspace.longest_chain(args.m, args.B, args.S, args.cap)
        ok = all(gammaspace.is_valid(g) for g in chain) and all(
            gammaspace.lt(a, b) for a, b in zip(chain, chain[1:]))
        return Outcome(True, "chain", {"length": length,
                                       "witness": gammaspace.elem_to_dict(chain[-1])}, None, ok)
    if sub == "interpret":
        g = _load_elem(args.input)
        bad = gammaspace.validate_path(g)
        if bad:
            raise InputError(f"invalid element: {bad[0]}")
        fs = sorted(gammaspace.interpret(g), key=lambda c: c.sort_key)
        return Outcome(True, "interpretation", [gammaspace.elem_to_dict(c) for c in fs])
    if sub == "validate-path":
        bad = gammaspace.validate_path(_load_elem(args.input))
        return Outcome(not bad, "valid" if not bad else "invalid", {"problems": bad})
    if sub == "variations":
        doc = _read_json(args.input)
        try:
            t0 = frozenset(tuple(x) for x in doc["t0"])
            t1 = frozenset(tuple(x) for x in doc["t1"])
        except (KeyError, TypeError) as e:
            raise InputError("variations input needs t0 and t1 node lists") from e
        if not (gammaspace.is_fintree(t0) and gammaspace.is_fintree(t1)):
            raise InputError("trees must be prefix-closed and contain the root")
        v = gammaspace.variation(t0, t1)
        res = None if v is None else {"move": v[0], "node": list(v[1]), "F": list(v[2])}
        return Outcome(v is not None, "variation" if v else "not-a-variation", res)
    if sub == "normalize":
        xi = approx.StepStream.from_dict(_read_json(args.input))
        t = approx.normalize(xi)
        return Outcome(True, "table", t.to_dict(), None, not t.report())
    if sub == "diagonalize":
        if not args.tables:
            raise InputError("--tables needs at least one file")
        tables = [approx.ApproxTable.from_dict(_read_json(p)) for p in args.tables]
        prefix, cert = approx.diagonalize(tables)
        ok = approx.verify_certificate(prefix, tables, cert)
        return Outcome(ok, "prefix", prefix, cert.to_dict(), ok)
    if sub == "hyperimmune":
        arr = approx.DisjointArray.from_dict(_read_json(args.input))
        bad = arr.problems()
        if bad:
            raise InputError(bad[0])
        n = approx.hyperimmune_witness(args.prefix or "", arr)
        return Outcome(n is not None, "witness" if n is not None else "none within prefix", n)
    raise InputError(f"unknown gamma subcommand {sub}")


# -- plumbing --------------------------------------------------------------


def _digest(args) -> str:
    h = hashlib.sha256()
    skip = {"output", "format", "func"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    h.update(json.dumps(params, sort_keys=True, default=str).encode())
    files = [v for k, v in params.items() if k in ("input", "forbidden") and v]
    files += list(params.get("tables") or [])
    for p in files:
        try:
            h.update(FsPath(p).read_bytes())
        except OSError:
            pass
    return h.hexdigest()


def _write_atomic(path: str, text: str) -> None:
    target = FsPath(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    lines = []
    for k in ("command", "outcome", "verified", "seed", "wall_time", "inputs_digest"):
        lines.append(f"{k}: {report.get(k)}")
    for k in ("result", "certificate", "error"):
        if report.get(k) is not None:
            lines.append(f"{k}: {json.dumps(report[k], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--output", help="write the report to this file atomically")

    p = argparse.ArgumentParser(prog="crossbench", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    tree = sub.add_parser("tree", help="cross-tree operations", parents=[common])
    tree.add_argument("tree_cmd", choices=("validate", "prune", "slice", "leftfull", "extend", "from-forbidden"))
    tree.add_argument("--input")
    tree.add_argument("--rho", default="")
    tree.add_argument("--sigma", help="right tuple, components separated by commas")
    tree.add_argument("--n", type=int, help="target right length for extend")
    tree.add_argument("--forbidden", help="JSON list of forbidden nodes")
    tree.add_argument("--height", type=int)
    tree.add_argument("--r", type=int)
    tree.add_argument("--budget", type=int)
    tree.set_defaults(func=cmd_tree)

    solve = sub.add_parser("solve", help="cross-constraint solver", parents=[common])
    solve.add_argument("--input")
    solve.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    solve.add_argument("--sweep", nargs=2, type=int, metavar=("N", "R"),
                       help="solve every left-full tree of height N with R components")
    solve.add_argument("--limit", type=int, help="stop a sweep after this many trees")
    solve.set_defaults(func=cmd_solve)

    gamma = sub.add_parser("gamma", help="Gamma spaces and approximations", parents=[common])
    gamma.add_argument("gamma_cmd", choices=("interpret", "validate-path", "variations", "longest-chain",
                                             "diagonalize", "normalize", "hyperimmune"))
    gamma.add_argument("--input")
    gamma.add_argument("--tables", nargs="+")
    gamma.add_argument("--m", type=int, default=1)
    gamma.add_argument("--B", type=int, default=1)
    gamma.add_argument("--S", type=int, default=0)
    gamma.add_argument("--cap", type=int, default=200_000)
    gamma.add_argument("--prefix", default="")
    gamma.set_defaults(func=cmd_gamma)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    if args.command == "tree" and args.tree_cmd == "from-forbidden":
        if args.forbidden is None or args.height is None or args.r is None:
            parser.error("from-forbidden needs --forbidden, --height and --r")
    elif args.command in ("tree",) and not args.input:
        parser.error("--input is required")
    elif args.command == "gamma" and args.gamma_cmd not in ("longest-chain", "diagonalize") and not args.input:
        parser.error("--input is required")
    start = time.perf_counter()
    report = {"command": " ".join([args.command] + [getattr(args, "tree_cmd", None) or
                                                   getattr(args, "gamma_cmd", None) or ""]).strip(),
              "inputs_digest": _digest(args), "seed": args.seed}
    try:
        out = args.func(args)
        code = EXIT_OK if out.affirmative else EXIT_NEGATIVE
        report.update(outcome=out.outcome, result=out.result, certificate=out.certificate,
                      verified=out.verified)
    except (InputError, CapExceeded) as e:
        code = EXIT_INPUT
        report.update(outcome="input-error", error=str(e), verified=None)
        print(f"error: {e}", file=sys.stderr)
    report["wall_time"] = round(time.perf_counter() - start, 6)
    text = _render(report, args.format)
    if args.output:
        _write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
