"""Finite-height solver for the cross-constraint problem.

Builds a descending sequence of condition-tuples whose left parts separate and
whose right parts keep agreeing on every component not yet excluded. Exact
left-fullness lookups stand in for the halting-problem oracle of the infinite
construction. Right parts of the two stems always have equal lengths here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .crosstree import CrossTree, Node
from .errors import InputError
from .sufficiency import CondPair, extends
from .words import _tails_differ, agreement_positions, enumerate_extensions, tuple_len


@dataclass(frozen=True)
class Stuck:
    component: int
    at: CondPair


@dataclass
class Solution:
    pair: tuple[Node, Node]
    agreement: list[list[int]]
    excluded: list[int]
    trace: list[CondPair] = field(default_factory=list)
    restarts: list[Stuck] = field(default_factory=list)

    @property
    def restart_point(self) -> tuple[int, int]:
        """Left and right stem lengths of the last restart, (0, 0) without one."""
        if not self.restarts:
            return 0, 0
        rho, sigma = self.restarts[-1].at.stems[0]
        return len(rho), tuple_len(sigma)

    def to_dict(self) -> dict:
        return {
            "pair": [{"left": m, "right": list(s)} for m, s in self.pair],
            "agreement": [sorted(a) for a in self.agreement],
            "excluded": sorted(self.excluded),
            "trace": [cp.to_dict() for cp in self.trace],
            "restarts": [{"component": st.component, "at": st.at.to_dict()} for st in self.restarts],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _require(t: CrossTree, cp: CondPair) -> None:
    (r0, s0), (r1, s1) = cp.stems
    if len(r0) != len(r1):
        raise InputError("stems need equal left lengths")
    if [len(w) for w in s0] != [len(w) for w in s1]:
        raise InputError("stems need equal right lengths componentwise")
    for x in cp.stems:
        if x not in t or not t.is_leftfull(*x):
            raise InputError(f"{x!r} is not a left-full node of the tree")


def _grouped(t: CrossTree, stem: Node, length: int, rlen: int) -> dict[str, list[tuple]]:
    """Left-full extensions of ``stem`` at left length ``length`` and right length
    ``rlen``, grouped by left word."""
    rho, sigma = stem
    out = {}
    for mu in enumerate_extensions(rho, length):
        row = t.leftfull_table.get(mu, {}).get(rlen, ())
        hits = sorted(s for s in row if all(x.startswith(y) for x, y in zip(s, sigma)))
        if hits:
            out[mu] = hits
    return out


def _agrees(a: tuple, b: tuple, s: int, start: int) -> bool:
    return any(x == y for x, y in zip(a[s][start:], b[s][start:]))


def _candidates(t: CrossTree, cp: CondPair, lengths, need: list[int]) -> Iterator[CondPair]:
    """Extensions of ``cp`` agreeing on every component in ``need``, in
    (left length, right length, lex) order."""
    (r0, s0), (r1, s1) = cp.stems
    base, rbase = len(r0), tuple_len(s0)
    for length in lengths:
        for rlen in range(max(rbase, 1 if need else 0), length + 1):
            if rlen == rbase and need:
                continue
            g0 = _grouped(t, cp.stems[0], length, rlen)
            if not g0:
                continue
            g1 = _grouped(t, cp.stems[1], length, rlen)
            for m0, sig0 in g0.items():
                for m1, sig1 in g1.items():
                    if not _tails_differ(m0, m1, base):
                        continue
                    for a in sig0:
                        for b in sig1:
                            if all(_agrees(a, b, s, rbase) for s in need):
                                yield CondPair(((m0, a), (m1, b)))


def detect_excluded(t: CrossTree, cp: CondPair, s: int) -> bool:
    """True iff no extension condition-tuple of ``cp`` agrees on component ``s``.

    An agreeing extension can be cut back to the first agreeing position and
    stays left-full, so it is enough to look for agreement at the last
    position of each right length.
    """
    _require(t, cp)
    if not 0 <= s < t.r:
        raise InputError(f"component {s} out of range for r = {t.r}")
    (r0, s0), (r1, _) = cp.stems
    base, rbase = len(r0), tuple_len(s0)
    for length in range(base, t.height + 1):
        for rlen in range(rbase + 1, length + 1):
            g0 = _grouped(t, cp.stems[0], length, rlen)
            g1 = _grouped(t, cp.stems[1], length, rlen)
            d0 = {m: {x[s][-1] for x in xs} for m, xs in g0.items()}
            d1 = {m: {x[s][-1] for x in xs} for m, xs in g1.items()}
            for m0, a in d0.items():
                for m1, b in d1.items():
                    if a & b and _tails_differ(m0, m1, base):
                        return False
    return True


def brute_excluded(t: CrossTree, cp: CondPair, s: int) -> bool:
    """Oracle for :func:`detect_excluded` scanning full-depth node pairs."""
    n = t.height
    (r0, s0), (r1, s1) = cp.stems
    start = len(s0[s])
    full = t.full_slices
    for m0 in enumerate_extensions(r0, n):
        for m1 in enumerate_extensions(r1, n):
            if not _tails_differ(m0, m1, len(r0)):
                continue
            for a in full.get(m0, ()):
                if not all(x.startswith(y) for x, y in zip(a, s0)):
                    continue
                for b in full.get(m1, ()):
                    if all(x.startswith(y) for x, y in zip(b, s1)) and _agrees(a, b, s, start):
                        return False
    return True


def _is_full(t: CrossTree, cp: CondPair) -> bool:
    rho, sigma = cp.stems[0]
    return len(rho) == t.height and all(len(w) == t.height for w in sigma)


def extend_step(t: CrossTree, cp: CondPair, excluded=frozenset()) -> Union[CondPair, Stuck]:
    """One step of the construction.

    Below full height the left parts grow by the least possible amount; at
    full height the right parts are completed. On failure the returned
    :class:`Stuck` names a component and the condition-tuple at which it is
    excluded, reached by chaining extensions that agree on earlier components.
    """
    _require(t, cp)
    need = [s for s in range(t.r) if s not in excluded]
    base = cp.left_length
    lengths = range(base + 1, t.height + 1) if base < t.height else [t.height]
    if base == t.height:
        found = next((c for c in _candidates(t, cp, lengths, need)
                      if tuple_len(c.stems[0][1]) == t.height), None)
    else:
        found = next(_candidates(t, cp, lengths, need), None)
    if found is not None:
        return found
    c = cp
    for s in need:
        if detect_excluded(t, c, s):
            return Stuck(s, c)
        c = next(_candidates(t, c, range(c.left_length, t.height + 1), [s]))
    raise AssertionError(f"no extension of {cp!r} although every component can still agree")


def solve(t: CrossTree) -> Solution:
    if t.height < 1:
        raise InputError("height must be at least 1")
    root = CondPair.root(t.r)
    if not t.is_leftfull(*root.stems[0]):
        raise InputError("tree is not left-full below the root")
    cp, excluded = root, set()
    trace, restarts = [root], []
    restarted = False
    # a restart at full height still owes agreement on the kept components
    while not _is_full(t, cp) or (restarted and len(excluded) < t.r):
        res = extend_step(t, cp, excluded)
        if isinstance(res, Stuck):
            excluded.add(res.component)
            restarts.append(res)
            cp = CondPair((res.at.stems[0], res.at.stems[0]))
            restarted = True
        else:
            cp = res
            restarted = False
        trace.append(cp)
    (m0, a), (m1, b) = cp.stems
    sol = Solution(cp.stems, [sorted(agreement_positions(x, y)) for x, y in zip(a, b)],
                   sorted(excluded), trace, restarts)
    problems = check_solution(t, sol)
    assert not problems, problems
    return sol


def check_solution(t: CrossTree, sol: Solution) -> list[str]:
    """Invariant violations of a solution; empty when it is sound."""
    out = []
    n = t.height
    (m0, a), (m1, b) = sol.pair
    for x in sol.pair:
        if x not in t:
            out.append(f"{x!r} is not in the tree")
        if len(x[0]) != n or any(len(w) != n for w in x[1]):
            out.append(f"{x!r} is not at full depth")
    left, right = sol.restart_point
    if not _tails_differ(m0, m1, left):
        out.append("left parts are not completely incompatible past the last restart")
    for s in range(t.r):
        if s in sol.excluded:
            continue
        if not any(p >= right for p in agreement_positions(a[s], b[s])):
            out.append(f"component {s} has no agreement past the last restart")
    if len(sol.restarts) > t.r or len(set(sol.excluded)) != len(sol.excluded):
        out.append("more restarts than components")
    for prev, nxt in zip(sol.trace, sol.trace[1:]):
        restart = nxt.stems[0] == nxt.stems[1] and any(
            st.at.stems[0] == nxt.stems[0] for st in sol.restarts)
        if not restart and not extends(nxt, prev):
            out.append(f"trace step {nxt!r} does not extend {prev!r}")
    return out


def brute_solution(t: CrossTree) -> Optional[Solution]:
    """Lex-least full-depth pair with separated left parts maximizing the
    number of components that agree somewhere."""
    n = t.height
    leaves = sorted((mu, tau) for mu, taus in t.full_slices.items() for tau in taus)
    best, best_score = None, -1
    for x in leaves:
        for y in leaves:
            if not _tails_differ(x[0], y[0], 0):
                continue
            score = sum(1 for u, v in zip(x[1], y[1]) if agreement_positions(u, v))
            if score > best_score:
                best, best_score = (x, y), score
                if score == t.r:
                    break
        if best_score == t.r:
            break
    if best is None:
        assert not (n >= 1 and t.is_leftfull("", ("",) * t.r)), "left-full tree without separated pair"
        return None
    (_, a), (_, b) = best
    agree = [sorted(agreement_positions(u, v)) for u, v in zip(a, b)]
    return Solution(best, agree, [s for s in range(t.r) if not agree[s]])
