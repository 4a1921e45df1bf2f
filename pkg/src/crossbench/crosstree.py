"""Finite cross-trees over 3^<=N x (2^<=N)^r.

A node is a pair ``(rho, sigma)`` where ``rho`` is a ternary word and
``sigma`` an r-tuple of equal-length binary words with ``|sigma| <= |rho|``.
Trees are stored as a map from left word to the frozenset of right tuples
sitting above it, since slicing and left-fullness are the hot paths.
"""

from __future__ import annotations

import json
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InputError
from .words import (
    K_LEFT,
    K_RIGHT,
    check_tuple,
    check_word,
    empty_tuple,
    enumerate_extensions,
    tuple_extensions,
    tuple_len,
    tuples,
    words,
    words_upto,
)

Node = tuple[str, tuple[str, ...]]


def node_key(node: Node):
    rho, sigma = node
    return (len(rho), rho, tuple_len(sigma), sigma)


def node_prefix(a: Node, b: Node) -> bool:
    """Componentwise prefix order on nodes."""
    return b[0].startswith(a[0]) and all(y.startswith(x) for x, y in zip(a[1], b[1]))


def predecessors(node: Node) -> list[Node]:
    """Immediate predecessors of a node that are themselves valid nodes."""
    rho, sigma = node
    out = []
    ls = tuple_len(sigma)
    if rho and ls <= len(rho) - 1:
        out.append((rho[:-1], sigma))
    if ls:
        out.append((rho, tuple(w[:-1] for w in sigma)))
    return out


class CrossTree:
    """An immutable finite cross-tree of declared height and arity."""

    def __init__(self, nodes: Iterable[Node], height: int, r: int,
                 k_left: int = K_LEFT, k_right: int = K_RIGHT):
        slices: dict[str, set] = {}
        for rho, sigma in nodes:
            slices.setdefault(rho, set()).add(tuple(sigma))
        self._slices = {rho: frozenset(s) for rho, s in slices.items()}
        self.height = height
        self.r = r
        self.k_left = k_left
        self.k_right = k_right

    @classmethod
    def closed(cls, nodes: Iterable[Node], height: int, r: int, **kw) -> "CrossTree":
        """Tree generated by ``nodes``: their downward closure plus the root."""
        return cls(downward_closure(nodes, r), height, r, **kw)

    @cached_property
    def nodes(self) -> frozenset:
        return frozenset((rho, s) for rho, sl in self._slices.items() for s in sl)

    def __contains__(self, node) -> bool:
        rho, sigma = node
        sl = self._slices.get(rho)
        return sl is not None and tuple(sigma) in sl

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.sorted_nodes())

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrossTree):
            return NotImplemented
        return (self.height, self.r, self.nodes) == (other.height, other.r, other.nodes)

    def __hash__(self) -> int:
        return hash((self.height, self.r, self.nodes))

    def __repr__(self) -> str:
        return f"CrossTree(height={self.height}, r={self.r}, nodes={len(self)})"

    def sorted_nodes(self) -> list[Node]:
        return sorted(self.nodes, key=node_key)

    def slice(self, rho: str) -> frozenset:
        return self._slices.get(rho, frozenset())

    @property
    def lefts(self):
        return self._slices.keys()

    def truncate(self, m: int) -> "CrossTree":
        """Nodes whose length (max component length) is at most ``m``."""
        return CrossTree(((rho, s) for rho, s in self.nodes if len(rho) <= m),
                         min(m, self.height), self.r, self.k_left, self.k_right)

    def is_leaf(self, node: Node) -> bool:
        rho, sigma = node
        if len(rho) < self.height:
            for a in "0123456789"[: self.k_left]:
                if sigma in self.slice(rho + a):
                    return False
        if tuple_len(sigma) < len(rho):
            for ext in tuple_extensions(sigma, tuple_len(sigma) + 1, self.k_right):
                if ext in self.slice(rho):
                    return False
        return True

    @cached_property
    def leaves(self) -> list[Node]:
        return [x for x in self.sorted_nodes() if self.is_leaf(x)]

    @cached_property
    def leaf_rule_ok(self) -> bool:
        """Every leaf has left length equal to the height."""
        return all(len(rho) == self.height for rho, _ in self.leaves)

    @cached_property
    def full_slices(self) -> dict[str, frozenset]:
        """Left words of length N mapped to their right tuples of length N."""
        n = self.height
        return {rho: frozenset(s for s in sl if tuple_len(s) == n)
                for rho, sl in self._slices.items() if len(rho) == n}

    @cached_property
    def is_right_pruned(self) -> bool:
        for rho, sl in self._slices.items():
            for s in sl:
                if tuple_len(s) < len(rho) and not any(
                        e in sl for e in tuple_extensions(s, tuple_len(s) + 1, self.k_right)):
                    return False
        return True

    @cached_property
    def leftfull_table(self) -> dict[str, dict[int, frozenset]]:
        """For each left word rho and right length l, the right tuples sigma of
        length l below which the tree is left-full.

        Computed bottom-up: at height N it is the set of prefixes of full right
        tuples, above it the intersection over the children of rho.
        """
        n = self.height
        table: dict[str, dict[int, frozenset]] = {}
        if not self.leaf_rule_ok:
            return table
        for rho in words(n, self.k_left):
            full = self.full_slices.get(rho, frozenset())
            table[rho] = {l: frozenset(tuple(w[:l] for w in s) for s in full) for l in range(n + 1)}
        for depth in range(n - 1, -1, -1):
            for rho in words(depth, self.k_left):
                kids = [table[rho + a] for a in "0123456789"[: self.k_left]]
                table[rho] = {l: frozenset.intersection(*(k[l] for k in kids)) for l in range(depth + 1)}
        return table

    def is_leftfull(self, rho: str, sigma: Sequence[str]) -> bool:
        """Fast left-fullness lookup (no membership precondition)."""
        sigma = tuple(sigma)
        row = self.leftfull_table.get(rho)
        if row is None:
            return False
        return sigma in row.get(tuple_len(sigma), frozenset())

    def leftfull_nodes(self) -> list[Node]:
        return [x for x in self.sorted_nodes() if self.is_leftfull(*x)]

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "height": self.height,
            "nodes": [{"left": rho, "right": list(s)} for rho, s in self.sorted_nodes()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "CrossTree":
        try:
            r = int(d["r"])
            height = int(d["height"])
            raw = d["nodes"]
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed cross-tree document: {e}") from e
        nodes = []
        for i, item in enumerate(raw):
            try:
                rho = check_word(item["left"], K_LEFT)
                sigma = tuple(check_word(w, K_RIGHT) for w in item["right"])
            except (KeyError, TypeError) as e:
                raise InputError(f"malformed node at index {i}: {item!r}") from e
            nodes.append((rho, sigma))
        return cls(nodes, height, r)

    @classmethod
    def loads(cls, text: str) -> "CrossTree":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e


def downward_closure(nodes: Iterable[Node], r: int) -> set[Node]:
    out: set[Node] = {("", empty_tuple(r))}
    stack = [(rho, tuple(s)) for rho, s in nodes]
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        stack.extend(predecessors(x))
    return out


def validate(t: CrossTree) -> list[str]:
    """Report of violated cross-tree invariants; empty iff ``t`` is valid."""
    problems = []
    root = ("", empty_tuple(t.r))
    if root not in t:
        problems.append("not downward-closed: root (ε, ε) missing")
    for node in t.sorted_nodes():
        rho, sigma = node
        if any(ch not in "0123456789"[: t.k_left] for ch in rho):
            problems.append(f"{_fmt(node)}: left digit outside alphabet")
        if len(sigma) != t.r:
            problems.append(f"{_fmt(node)}: right arity {len(sigma)} != {t.r}")
            continue
        if any(ch not in "0123456789"[: t.k_right] for w in sigma for ch in w):
            problems.append(f"{_fmt(node)}: right digit outside alphabet")
        if len({len(w) for w in sigma}) > 1:
            problems.append(f"{_fmt(node)}: right components of unequal length")
            continue
        if tuple_len(sigma) > len(rho):
            problems.append(f"{_fmt(node)}: right part longer than left part")
        if len(rho) > t.height:
            problems.append(f"{_fmt(node)}: left length exceeds height {t.height}")
        for p in predecessors(node):
            if p not in t:
                problems.append(f"{_fmt(node)}: not downward-closed, missing {_fmt(p)}")
    return problems


def _fmt(node: Node) -> str:
    rho, sigma = node
    return f"({rho or 'ε'}, {','.join(w or 'ε' for w in sigma) or 'ε'})"


def all_nodes(n: int, r: int, k_left: int = K_LEFT, k_right: int = K_RIGHT):
    """Every node of X_{<=n} in (length, lex) order."""
    for rho in words_upto(n, k_left):
        for l in range(len(rho) + 1):
            for s in tuples(l, r, k_right):
                yield (rho, s)


def from_forbidden(w: Iterable[Node], n: int, r: int) -> CrossTree:
    """Cross-tree of the nodes of height <= n avoiding every basic open set in ``w``."""
    forbidden = []
    for mu, tau in w:
        tau = tuple(tau) if len(tau) else empty_tuple(r)
        if len(tau) != r:
            raise InputError(f"forbidden entry ({mu!r}, {tau!r}) has wrong arity")
        forbidden.append((mu, tau))
    nodes = [x for x in all_nodes(n, r)
             if not any(node_prefix(f, x) for f in forbidden)]
    return CrossTree(nodes, n, r)


def full_tree(n: int, r: int) -> CrossTree:
    return from_forbidden((), n, r)


def right_prune(t: CrossTree) -> CrossTree:
    """Largest cross-subtree whose slices are all pruned."""
    nodes = set(t.nodes)
    while True:
        slices: dict[str, set] = {}
        for rho, s in nodes:
            slices.setdefault(rho, set()).add(s)
        good = set()
        for rho, sl in slices.items():
            full = [s for s in sl if tuple_len(s) == len(rho)]
            for s in sl:
                l = tuple_len(s)
                if any(tuple(w[:l] for w in f) == s for f in full):
                    good.add((rho, s))
        kept = set()
        for x in sorted(good, key=node_key):
            if all(p in kept for p in predecessors(x)):
                kept.add(x)
        if kept == nodes:
            return CrossTree(kept, t.height, t.r, t.k_left, t.k_right)
        nodes = kept


def slice(t: CrossTree, rho: str) -> frozenset:
    return t.slice(rho)


def _require_member(t: CrossTree, rho: str, sigma) -> tuple[str, tuple[str, ...]]:
    sigma = tuple(sigma)
    if (rho, sigma) not in t:
        raise InputError(f"node {_fmt((rho, sigma))} is not in the tree")
    return rho, sigma


def leftfull(t: CrossTree, rho: str, sigma: Sequence[str]) -> bool:
    """Finite left-fullness of ``t`` below ``(rho, sigma)``, by direct enumeration."""
    rho, sigma = _require_member(t, rho, sigma)
    if not t.leaf_rule_ok:
        return False
    for mu in enumerate_extensions(rho, t.height, t.k_left):
        full = t.full_slices.get(mu, ())
        if not any(all(x.startswith(y) for x, y in zip(tau, sigma)) for tau in full):
            return False
    return True


def leftfull_via_c(t: CrossTree, rho: str, sigma: Sequence[str]) -> bool:
    """Left-fullness through the criterion available on right-pruned trees:
    the leaf rule plus ``(mu, sigma) in t`` for every full-length ``mu >= rho``.
    """
    if not t.is_right_pruned:
        raise InputError("leftfull_via_c requires a right-pruned tree")
    rho, sigma = _require_member(t, rho, sigma)
    if not t.leaf_rule_ok:
        return False
    return all(sigma in t.slice(mu) for mu in enumerate_extensions(rho, t.height, t.k_left))


def _blocking_extension(t: CrossTree, rho: str, sigma: tuple) -> str:
    """Shortest-then-lex ``mu >= rho`` with no right part of length |mu| above sigma."""
    l = tuple_len(sigma)
    for length in range(len(rho), t.height + 1):
        for mu in enumerate_extensions(rho, length, t.k_left):
            if not any(tuple_len(s) == length and all(x.startswith(y) for x, y in zip(s, sigma))
                       for s in t.slice(mu)):
                return mu
    raise AssertionError(f"no blocking extension of {rho!r} for right tuple {sigma!r} at length >= {l}")


def leftfull_extend(t: CrossTree, rho: str, sigma: Sequence[str], n: int) -> Node:
    """Extend a left-full stem so that the right part has length exactly ``n``.

    Tries the length-n extensions of sigma in lex order; each failure yields a
    longer left word below which the failed right extension is dead, and the
    next candidate is tried there.
    """
    rho, sigma = _require_member(t, rho, sigma)
    if not (tuple_len(sigma) <= n <= t.height):
        raise InputError(f"target right length {n} must lie in [{tuple_len(sigma)}, {t.height}]")
    if not leftfull(t, rho, sigma):
        raise InputError(f"tree is not left-full below {_fmt((rho, sigma))}")
    if n == tuple_len(sigma):
        return rho, sigma
    cur = rho + "0" * max(0, n - len(rho))
    for cand in tuple_extensions(sigma, n, t.k_right):
        if (cur, cand) in t and leftfull(t, cur, cand):
            return cur, cand
        cur = _blocking_extension(t, cur, cand)
    raise AssertionError("every right extension was blocked, contradicting left-fullness")
