"""Exhaustive enumerators and seeded random instances for sweeps and tests."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional

from .approx import ApproxTable, DisjointArray, StepStream
from .crosstree import CrossTree, Node, all_nodes, node_key, node_prefix, predecessors
from .gammaspace import (
    Coloring, GammaElem, Path, Step, ZETA0, _above_map, _nonempty_subsets, _strict_descendants,
    children, enumerate_fragment, zeta,
)
from .incmaps import MonotoneOracle, words_upto_depth
from .words import tuples, words


# -- cross-trees -----------------------------------------------------------


def _diagonal_children(rho: str, sigma: tuple, r: int) -> list[Node]:
    n = len(rho) + 1
    return [(rho + a, tuple(s + b for s, b in zip(sigma, bits)))
            for a in "012" for bits in itertools.product("01", repeat=r)]


def _closure_of_diagonal(diag: Iterable[Node]) -> set[Node]:
    out = set()
    for rho, sigma in diag:
        for l in range(len(rho) + 1):
            out.add((rho, tuple(w[:l] for w in sigma)))
    return out


def iter_right_pruned(n: int, r: int) -> Iterator[CrossTree]:
    """Every right-pruned cross-tree of height ``n``.

    A right-pruned tree is the closure of its nodes with |sigma| = |rho|, and
    those form an arbitrary rooted subtree of the product alphabet tree, so
    the enumeration walks rooted subtrees of depth at most ``n``.
    """
    root = ("", ("",) * r)

    def subtrees(node, depth) -> Iterator[list[Node]]:
        if depth == n:
            yield [node]
            return
        kids = _diagonal_children(node[0], node[1], r)
        for mask in range(1 << len(kids)):
            chosen = [k for i, k in enumerate(kids) if mask >> i & 1]
            for parts in itertools.product(*(list(subtrees(k, depth + 1)) if depth + 1 < n else [[k]]
                                             for k in chosen)):
                yield [node] + [x for p in parts for x in p]

    for diag in subtrees(root, 0):
        yield CrossTree(_closure_of_diagonal(diag), n, r)


def iter_cross_trees(n: int, r: int) -> Iterator[CrossTree]:
    """Every downward-closed node set with the root, by include/exclude over
    nodes in (length, lex) order."""
    nodes = sorted(all_nodes(n, r), key=lambda x: (len(x[0]), node_key(x)))
    root, rest = nodes[0], nodes[1:]
    chosen = {root}

    def go(i):
        if i == len(rest):
            yield CrossTree(set(chosen), n, r)
            return
        x = rest[i]
        yield from go(i + 1)
        if all(p in chosen for p in predecessors(x)):
            chosen.add(x)
            yield from go(i + 1)
            chosen.discard(x)

    yield from go(0)


def iter_leftfull(n: int, r: int) -> Iterator[CrossTree]:
    """Cross-trees of height ``n`` that are left-full below the root."""
    root = ("", ("",) * r)
    for t in iter_cross_trees(n, r):
        if t.is_leftfull(*root):
            yield t


def random_right_pruned(rng: random.Random, n: int, r: int, keep: float = 0.5) -> CrossTree:
    root = ("", ("",) * r)
    diag, frontier = [root], [root]
    for _ in range(n):
        nxt = []
        for rho, sigma in frontier:
            nxt.extend(k for k in _diagonal_children(rho, sigma, r) if rng.random() < keep)
        diag.extend(nxt)
        frontier = nxt
    return CrossTree(_closure_of_diagonal(diag), n, r)


def random_leftfull(rng: random.Random, n: int, r: int, spread: int = 2,
                    junk: float = 0.0, structured: float = 0.3) -> CrossTree:
    """Left-full tree: every full left word gets a few full right tuples.

    ``structured`` is the chance that component s of a chosen tuple copies a
    fixed 0/1 image of the left digits, which makes exclusions likelier.
    ``junk`` adds dead-end nodes so the tree is not right-pruned.
    """
    maps = [tuple(rng.randrange(2) for _ in range(3)) for _ in range(r)]
    full = tuples(n, r)
    nodes = set()
    for mu in words(n):
        k = 1 + min(int(rng.expovariate(1.0)), spread)
        for _ in range(k):
            if rng.random() < structured:
                tau = tuple("".join(str(maps[s][int(c)] ^ (rng.random() < 0.15)) for c in mu) for s in range(r))
            else:
                tau = rng.choice(full)
            nodes.add((mu, tau))
            if rng.random() < junk and n:
                l = rng.randrange(n)
                nodes.add((mu, tuple("".join(rng.choice("01") for _ in range(l)) for _ in range(r))))
    return CrossTree.closed(nodes, n, r)


def random_tree(rng: random.Random, n: int, r: int) -> CrossTree:
    """Mixture of random right-pruned trees and left-full trees with junk."""
    kind = rng.randrange(3)
    if kind == 0:
        return random_right_pruned(rng, n, r, keep=rng.uniform(0.3, 0.9))
    if kind == 1:
        return random_leftfull(rng, n, r, junk=rng.uniform(0.0, 0.5))
    return right_pruned_leftfull(rng, n, r)


def right_pruned_leftfull(rng: random.Random, n: int, r: int) -> CrossTree:
    return random_leftfull(rng, n, r, spread=rng.randrange(1, 4))


# -- pair sets -------------------------------------------------------------


def pair_poset(t: CrossTree) -> list[tuple[Node, Node]]:
    nodes = t.sorted_nodes()
    return [(a, b) for a in nodes for b in nodes]


def iter_upsets(t: CrossTree) -> Iterator[frozenset]:
    """Every set of node pairs of ``t`` closed under componentwise extension."""
    pairs = sorted(pair_poset(t), key=lambda p: (-len(p[0][0]) - len(p[1][0]),
                                                 -sum(map(len, p[0][1])) - sum(map(len, p[1][1])),
                                                 node_key(p[0]), node_key(p[1])))
    ups = {p: [q for q in pairs if q != p and node_prefix(p[0], q[0]) and node_prefix(p[1], q[1])]
           for p in pairs}
    chosen: set = set()

    def go(i):
        if i == len(pairs):
            yield frozenset(chosen)
            return
        p = pairs[i]
        yield from go(i + 1)
        if all(q in chosen for q in ups[p]):
            chosen.add(p)
            yield from go(i + 1)
            chosen.discard(p)

    yield from go(0)


def random_upset(rng: random.Random, t: CrossTree, k: int = 3) -> frozenset:
    pairs = pair_poset(t)
    gens = [rng.choice(pairs) for _ in range(rng.randint(0, k))]
    return frozenset(q for q in pairs if any(node_prefix(g[0], q[0]) and node_prefix(g[1], q[1]) for g in gens))


# -- oracles ---------------------------------------------------------------


def random_oracle(rng: random.Random, depth: int, size: int, keep: float = 0.8) -> MonotoneOracle:
    """Non-increasing set-valued oracle on words up to ``depth`` over range(size)."""
    table = {"": frozenset(x for x in range(size) if rng.random() < 0.9)}
    for w in words_upto_depth(depth):
        if w:
            table[w] = frozenset(x for x in table[w[:-1]] if rng.random() < keep)
    return MonotoneOracle(lambda w: table[w], depth, tuple(range(size)))


# -- Gamma elements and approximations ---------------------------------------


@lru_cache(maxsize=None)
def label_pool(m: int, offset: int) -> dict:
    """Strict-successor map over a small fragment of level m whose colorings
    live strictly above ``offset - 1``."""
    frag = enumerate_fragment(m, 2, 1 if m == 0 else 0, offset=offset)
    return _above_map(frag)


def random_move(rng: random.Random, step: Step, above: dict, bound: int = 2) -> Optional[Step]:
    tree = step.tree
    options = []
    for xi in sorted(tree):
        kids = children(tree, xi)
        if not kids and above.get(step.label(xi)):
            options.append(("grow", xi))
        elif len(kids) >= 2:
            options.append(("cut", xi))
    if not options:
        return None
    kind, xi = rng.choice(options)
    lab = step.labeling
    if kind == "grow":
        f = rng.choice(_nonempty_subsets(list(range(bound))))
        lab.update({xi + (c,): rng.choice(above[step.label(xi)]) for c in f})
        return Step.make(lab)
    kids = children(tree, xi)
    f = set(rng.sample(kids, rng.randint(1, len(kids) - 1)))
    keep = (tree - _strict_descendants(tree, xi)) | f
    return Step.make({x: lab[x] for x in keep})


def random_coloring(rng: random.Random, over_n: int, span: int = 3) -> Coloring:
    return Coloring.of({x: rng.randrange(3) for x in range(over_n + 1, over_n + 1 + span) if rng.random() < 0.5})


def random_path(rng: random.Random, m: int, over_n: int, moves: int) -> Path:
    above = label_pool(m - 1, over_n + 1)
    g = zeta(m)
    for _ in range(moves):
        st = random_move(rng, g.last, above)
        if st is None:
            break
        g = g.extend(st)
    return g


def random_row(rng: random.Random, m: int, n: int, cols: int) -> list[GammaElem]:
    if m == 0:
        g = random_coloring(rng, n)
        j = rng.randint(1, cols)
        return [ZETA0] * j + [g] * (cols - j)
    g = random_path(rng, m, n, rng.randint(0, 6))
    idx = sorted(rng.randint(1, len(g.steps)) for _ in range(cols - 1))
    return [zeta(m)] + [g.prefix(k) for k in idx]


def random_table(rng: random.Random, m: int, rows: int, cols: int) -> ApproxTable:
    return ApproxTable(m, [random_row(rng, m, n, cols) for n in range(rows)])


def random_stream(rng: random.Random, m: int, rows: int, cols: int, mess: float = 0.5) -> StepStream:
    """Stream from a random table, with probability ``mess`` corrupted by missing
    cells, late stages, swapped cells and cells that are not over their row."""
    t = random_table(rng, m, rows, cols)
    stages = [[s if rng.random() < 0.6 else rng.randint(0, cols + 3) for s in range(cols)] for _ in range(rows)]
    xi = StepStream.from_table(t, stages)
    if rng.random() < mess:
        for row_i, row in enumerate(xi.rows):
            for s in range(len(row)):
                u = rng.random()
                if u < 0.1:
                    row[s] = None
                elif u < 0.2 and s:
                    row[s], row[s - 1] = row[s - 1], row[s]
                elif u < 0.25:
                    bad = Coloring.of({row_i: 1})
                    if m == 0:
                        row[s] = (bad, row[s][1] if row[s] else s)
                    else:
                        row[s] = (_lift_to_level(bad, m), s)
    return xi


def _lift_to_level(c: Coloring, m: int) -> GammaElem:
    g: GammaElem = c
    for level in range(1, m + 1):
        g = Path(level, (Step.make({(): zeta(level - 1)}), Step.make({(): zeta(level - 1), (0,): g})))
    return g


def stream_is_valid(xi: StepStream) -> bool:
    if any(c is None for row in xi.rows for c in row):
        return False
    t = ApproxTable(xi.m, [[c[0] for c in row] for row in xi.rows])
    return not t.report()


def random_array(rng: random.Random, rows: int, span: int = 4) -> DisjointArray:
    out = []
    for n in range(rows):
        fs = [set(), set(), set()]
        for x in range(n + 1, n + 1 + span):
            j = rng.randrange(4)
            if j < 3:
                fs[j].add(x)
        out.append(fs)
    return DisjointArray.of(out)


def random_suite(rng: random.Random, max_tables: int = 10, max_level: int = 2,
                 rows: int = 48, cols: int = 4) -> list[ApproxTable]:
    return [random_table(rng, rng.randint(0, max_level), rows, cols)
            for _ in range(rng.randint(1, max_tables))]
