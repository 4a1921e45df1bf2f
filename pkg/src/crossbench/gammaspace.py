"""The Gamma_m hierarchy of labeled finite trees.

Level 0 holds finite partial 3-colorings of the naturals. An element of level
m > 0 is a computation path: a sequence of (tree, labeling) steps where each
tree arises from the previous one by growing a leaf or cutting back an inner
node, and labels come from level m - 1.

Labelings must be strictly order-preserving. Trees are frozensets of tuples of
naturals and always contain the empty tuple.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .errors import FragmentTooLarge, InputError

FinTree = frozenset
ROOT: tuple = ()


@dataclass(frozen=True)
class Coloring:
    """A finite partial map from naturals to {0, 1, 2}, kept as sorted items."""

    items: tuple = ()

    level = 0

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "Coloring":
        return cls(tuple(sorted((int(k), int(v)) for k, v in mapping.items())))

    @property
    def support(self) -> tuple:
        return tuple(k for k, _ in self.items)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.items)

    @property
    def sort_key(self):
        return (self.support, self.values)

    def as_dict(self) -> dict:
        return dict(self.items)

    def __repr__(self) -> str:
        return "{" + ", ".join(f"{k}↦{v}" for k, v in self.items) + "}"


ZETA0 = Coloring()


@dataclass(frozen=True, eq=False)
class Step:
    tree: frozenset
    labels: tuple  # ((node, element), ...) sorted by node
    _map: dict = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.labels))
        object.__setattr__(self, "_hash", hash((self.tree, self.labels)))

    @classmethod
    def make(cls, labeling: Mapping[tuple, "GammaElem"]) -> "Step":
        return cls(frozenset(labeling), tuple(sorted(labeling.items(), key=lambda kv: kv[0])))

    def label(self, node: tuple) -> "GammaElem":
        return self._map[node]

    @property
    def labeling(self) -> dict:
        return dict(self._map)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Step) and self._hash == other._hash
                and self.tree == other.tree and self.labels == other.labels)

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=False)
class Path:
    level: int
    steps: tuple
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.level, self.steps)))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Path) and self._hash == other._hash
                and self.level == other.level and self.steps == other.steps)

    def __hash__(self) -> int:
        return self._hash

    @property
    def last(self) -> Step:
        return self.steps[-1]

    def prefix(self, k: int) -> "Path":
        return Path(self.level, self.steps[:k])

    def extend(self, step: Step) -> "Path":
        return Path(self.level, self.steps + (step,))

    def __repr__(self) -> str:
        return f"Path(level={self.level}, steps={len(self.steps)})"


GammaElem = Union[Coloring, Path]


def level_of(g: GammaElem) -> int:
    return g.level


@lru_cache(maxsize=None)
def zeta(m: int) -> GammaElem:
    """Root of level m."""
    if m < 0:
        raise InputError("levels are non-negative")
    if m == 0:
        return ZETA0
    return Path(m, (Step.make({ROOT: zeta(m - 1)}),))


# -- finite trees -------------------------------------------------------


def children(tree: Iterable[tuple], node: tuple) -> list[tuple]:
    k = len(node) + 1
    return sorted(x for x in tree if len(x) == k and x[:-1] == node)


def leaves(tree: Iterable[tuple]) -> list[tuple]:
    tree = frozenset(tree)
    parents = {x[:-1] for x in tree if x}
    return sorted(x for x in tree if x not in parents)


def is_fintree(tree: Iterable[tuple]) -> bool:
    tree = frozenset(tree)
    return ROOT in tree and all(x[:-1] in tree for x in tree if x)


def _strict_descendants(tree, node) -> set:
    k = len(node)
    return {x for x in tree if len(x) > k and x[:k] == node}


def variation(t0: Iterable[tuple], t1: Iterable[tuple]):
    """How ``t1`` arises from ``t0`` in one step: ("grow" | "cut", node, F) or None."""
    t0, t1 = frozenset(t0), frozenset(t1)
    if t1 > t0:
        new = t1 - t0
        parents = {x[:-1] for x in new if x}
        if len(parents) == 1 and all(x for x in new):
            (xi,) = parents
            if xi in t0 and not children(t0, xi):
                return ("grow", xi, tuple(sorted(x[-1] for x in new)))
        return None
    for xi in sorted(t0):
        kids = children(t0, xi)
        if not kids:
            continue
        f = {x for x in t1 if len(x) == len(xi) + 1 and x[:-1] == xi}
        if not f or not f < set(kids):
            continue
        if t1 == (t0 - _strict_descendants(t0, xi)) | f:
            return ("cut", xi, tuple(sorted(x[-1] for x in f)))
    return None


def is_one_step_variation(t0: Iterable[tuple], t1: Iterable[tuple]) -> bool:
    return variation(t0, t1) is not None


def _full_cut(t0, t1) -> bool:
    """``t1`` is what cutting with F equal to the whole child set would give."""
    t0, t1 = frozenset(t0), frozenset(t1)
    for xi in sorted(t0):
        kids = children(t0, xi)
        if kids and t1 == (t0 - _strict_descendants(t0, xi)) | set(kids):
            return True
    return False


# -- order, validation, interpretation ------------------------------------


def leq(a: GammaElem, b: GammaElem) -> bool:
    if a.level != b.level:
        raise InputError(f"cannot compare levels {a.level} and {b.level}")
    if a.level == 0:
        return a == ZETA0 or a == b
    return len(a.steps) <= len(b.steps) and b.steps[: len(a.steps)] == a.steps


def lt(a: GammaElem, b: GammaElem) -> bool:
    return a != b and leq(a, b)


@lru_cache(maxsize=200_000)
def _validate_cached(g: GammaElem) -> tuple:
    return tuple(_validate(g))


def validate_path(g: GammaElem) -> list[str]:
    """Empty list iff ``g`` is a well-formed element of its level."""
    return list(_validate_cached(g))


def _validate(g) -> list[str]:
    if isinstance(g, Coloring):
        out = []
        keys = [k for k, _ in g.items]
        if keys != sorted(set(keys)):
            out.append("coloring support must be sorted without repeats")
        for k, v in g.items:
            if not isinstance(k, int) or k < 0:
                out.append(f"support element {k!r} is not a natural")
            if v not in (0, 1, 2):
                out.append(f"value {v!r} at {k} is not a color below 3")
        return out
    if not isinstance(g, Path):
        return [f"not a Gamma element: {g!r}"]
    out = []
    m = g.level
    if m < 1:
        return ["paths live at level 1 or above"]
    if not g.steps:
        return ["a computation path needs at least one step"]
    first = g.steps[0]
    if first.tree != frozenset({ROOT}) or first.label(ROOT) != zeta(m - 1):
        out.append("first step must be the root tree labeled with the root of the level below")
    for j, st in enumerate(g.steps):
        if not is_fintree(st.tree):
            out.append(f"step {j}: tree is not prefix-closed with a root")
            continue
        if set(st._map) != set(st.tree):
            out.append(f"step {j}: labeling domain differs from the tree")
            continue
        for node, lab in st.labels:
            if getattr(lab, "level", None) != m - 1:
                out.append(f"step {j}: label at {node} is not of level {m - 1}")
                continue
            sub = validate_path(lab)
            if sub:
                out.append(f"step {j}: label at {node} is invalid: {sub[0]}")
        if out:
            continue
        for node in st.tree:
            if node and not lt(st.label(node[:-1]), st.label(node)):
                out.append(f"step {j}: labeling is not strictly order-preserving at {node}")
    for j, (a, b) in enumerate(zip(g.steps, g.steps[1:]), start=1):
        if variation(a.tree, b.tree) is None:
            if a.tree == b.tree or _full_cut(a.tree, b.tree):
                out.append(f"step {j}: F not proper")
            else:
                out.append(f"step {j}: tree is not a one-step variation of the previous one")
        for node in a.tree & b.tree:
            if node in a._map and node in b._map and a.label(node) != b.label(node):
                out.append(f"step {j}: incompatible labelings at {node}")
                break
    return out


def is_valid(g: GammaElem) -> bool:
    return not validate_path(g)


@lru_cache(maxsize=200_000)
def interpret(g: GammaElem) -> frozenset:
    """The finite set of colorings a Gamma element stands for."""
    if isinstance(g, Coloring):
        return frozenset({g})
    last = g.last
    out = frozenset().union(*(interpret(last.label(x)) for x in leaves(last.tree)))
    assert out, "interpretation is empty"
    return out


def over(g: GammaElem, n: int) -> bool:
    return all(k > n for c in interpret(g) for k in c.support)


def compatible(f: str, fs: Iterable[Coloring]) -> bool:
    """Does the coloring prefix ``f`` extend some member of ``fs``."""
    for c in fs:
        if all(k < len(f) and int(f[k]) == v for k, v in c.items):
            return True
    return False


def lex_least(fs: Iterable[Coloring]) -> Coloring:
    return min(fs, key=lambda c: c.sort_key)


# -- fragments -----------------------------------------------------------


def gamma0_fragment(support_bound: int, offset: int = 0) -> list[Coloring]:
    """Colorings with support inside offset..offset+support_bound, root first,
    then by (support, values)."""
    out = [ZETA0]
    pos = range(offset, offset + support_bound + 1)
    for size in range(1, support_bound + 2):
        for sup in itertools.combinations(pos, size):
            for vals in itertools.product(range(3), repeat=size):
                out.append(Coloring(tuple(zip(sup, vals))))
    return out


def _nonempty_subsets(items: list) -> list[tuple]:
    out = []
    for size in range(1, len(items) + 1):
        out.extend(itertools.combinations(items, size))
    return out


def _successor_steps(step: Step, above: Mapping, bound: int) -> list[Step]:
    """Every next step from ``step``: grow a leaf with labels drawn from
    ``above[label]`` or cut back an inner node."""
    tree = step.tree
    out = []
    for xi in sorted(tree):
        kids = children(tree, xi)
        if not kids:
            ups = above.get(step.label(xi), ())
            if not ups:
                continue
            for f in _nonempty_subsets(list(range(bound))):
                for labs in itertools.product(ups, repeat=len(f)):
                    lab = step.labeling
                    lab.update({xi + (c,): e for c, e in zip(f, labs)})
                    out.append(Step.make(lab))
        else:
            for f in _nonempty_subsets(kids):
                if len(f) == len(kids):
                    continue
                keep = (tree - _strict_descendants(tree, xi)) | set(f)
                out.append(Step.make({x: step.label(x) for x in keep}))
    return out


def _above_map(elems: list) -> dict:
    """For each element of a prefix-closed fragment, the fragment elements strictly above it."""
    if not elems:
        return {}
    if elems[0].level == 0:
        return {ZETA0: [e for e in elems if e != ZETA0]}
    index = {e.steps: e for e in elems}
    above: dict = {e: [] for e in elems}
    for e in elems:
        for k in range(1, len(e.steps)):
            above[index[e.steps[:k]]].append(e)
    return above


def enumerate_fragment(m: int, bound: int, support_bound: int,
                       cap: int = 200_000, offset: int = 0) -> list[GammaElem]:
    """All elements of level m whose trees use child indices below ``bound``
    and whose colorings have support inside offset..offset+support_bound, in
    DFS order."""
    if m < 0 or bound < 0 or support_bound < 0:
        raise InputError("bounds must be non-negative")
    if m == 0:
        out = gamma0_fragment(support_bound, offset)
        if len(out) > cap:
            raise FragmentTooLarge(f"level-0 fragment has {len(out)} elements, cap {cap}")
        return out
    above = _above_map(enumerate_fragment(m - 1, bound, support_bound, cap, offset))
    out = []
    stack = [zeta(m)]
    while stack:
        g = stack.pop()
        out.append(g)
        if len(out) > cap:
            raise FragmentTooLarge(f"level-{m} fragment exceeds {cap} elements")
        succ = _successor_steps(g.last, above, bound)
        stack.extend(g.extend(s) for s in reversed(succ))
    return out


def brute_longest_chain(m: int, bound: int, support_bound: int, cap: int = 200_000) -> int:
    """Longest strict chain by enumerating the whole fragment."""
    frag = enumerate_fragment(m, bound, support_bound, cap)
    if m == 0:
        return 2 if len(frag) > 1 else 1
    return max(len(g.steps) for g in frag)


def labeled_longest_chain(m: int, bound: int, support_bound: int, cap: int = 200_000) -> int:
    """Longest strict chain by a memoized walk over labeled trees.

    Moves only depend on the last step of a path, so the longest continuation
    is a function of the labeled tree. Labels range over the whole fragment
    one level down.
    """
    if m == 0:
        return brute_longest_chain(0, bound, support_bound, cap)
    above = _above_map(enumerate_fragment(m - 1, bound, support_bound, cap))
    memo: dict = {}

    def value(st: Step) -> int:
        if st in memo:
            return memo[st]
        best = 1 + max((value(u) for u in _successor_steps(st, above, bound)), default=0)
        memo[st] = best
        if len(memo) > cap:
            raise FragmentTooLarge(f"more than {cap} labeled trees at level {m}")
        return best

    return value(zeta(m).last)


def _shape(tree: frozenset, node: tuple = ROOT):
    return tuple(sorted(_shape(tree, c) for c in children(tree, node)))


def longest_chain(m: int, bound: int, support_bound: int,
                  cap: int = 200_000) -> tuple[int, list[GammaElem]]:
    """Length of the longest strict chain in the fragment and a witness chain.

    Labels are irrelevant beyond their depth: labeling depth d with the d-th
    element of a longest chain one level down leaves every move available that
    any other labeling allows. So the search runs over tree shapes only.
    """
    if m < 0 or bound < 0 or support_bound < 0:
        raise InputError("bounds must be non-negative")
    if m == 0:
        frag = gamma0_fragment(support_bound)
        chain = frag[:2]
        return len(chain), chain
    _, below = longest_chain(m - 1, bound, support_bound, cap)
    height = len(below)

    def label(t: frozenset) -> Step:
        return Step.make({x: below[len(x)] for x in t})

    def moves(t: frozenset) -> list[frozenset]:
        out = []
        for xi in sorted(t):
            kids = children(t, xi)
            if not kids:
                if len(xi) + 1 < height:
                    out.extend(t | {xi + (c,) for c in f} for f in _nonempty_subsets(list(range(bound))))
            else:
                for f in _nonempty_subsets(kids):
                    if len(f) < len(kids):
                        out.append((t - _strict_descendants(t, xi)) | set(f))
        return out

    memo: dict = {}
    active: set = set()

    def value(t: frozenset) -> int:
        key = _shape(t)
        if key in memo:
            return memo[key]
        if key in active:
            raise AssertionError(f"cycle in the move graph at {sorted(t)}")
        active.add(key)
        best = 1 + max((value(u) for u in moves(t)), default=0)
        active.discard(key)
        memo[key] = best
        if len(memo) > cap:
            raise FragmentTooLarge(f"more than {cap} tree shapes at level {m}")
        return best

    t = frozenset({ROOT})
    total = value(t)
    steps = [label(t)]
    v = total
    while v > 1:
        t = next(u for u in moves(t) if value(u) == v - 1)
        steps.append(label(t))
        v -= 1
    path = Path(m, tuple(steps))
    return total, [path.prefix(k) for k in range(1, total + 1)]


# -- JSON ---------------------------------------------------------------


def elem_to_dict(g: GammaElem) -> dict:
    if isinstance(g, Coloring):
        return {"level": 0, "support": list(g.support), "values": list(g.values)}
    return {"level": g.level, "steps": [
        {"tree": [list(x) for x in sorted(st.tree)],
         "labels": [{"node": list(x), "label": elem_to_dict(e)} for x, e in st.labels]}
        for st in g.steps]}


def elem_from_dict(d) -> GammaElem:
    try:
        level = int(d["level"])
        if level == 0:
            sup, vals = d["support"], d["values"]
            if len(sup) != len(vals):
                raise InputError("support and values differ in length")
            return Coloring(tuple((int(k), int(v)) for k, v in zip(sup, vals)))
        steps = []
        for st in d["steps"]:
            tree = frozenset(tuple(int(i) for i in x) for x in st["tree"])
            labels = tuple(sorted(((tuple(int(i) for i in item["node"]), elem_from_dict(item["label"]))
                                   for item in st["labels"]), key=lambda kv: kv[0]))
            steps.append(Step(tree, labels))
        return Path(level, tuple(steps))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed Gamma element: {e}") from e


def dumps(g: GammaElem) -> str:
    return json.dumps(elem_to_dict(g), sort_keys=True, separators=(",", ":"))
