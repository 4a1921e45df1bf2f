"""T-sufficiency at finite height and extraction of condition-tuples.

The quantifier "for every cross-subtree S for which the stems form a
condition-tuple" is decided over the minimal such subtrees: the downward
closures of one full-length right tuple per full-length left extension of each
stem. Every qualifying subtree contains one of them and witnesses are inherited
upwards, so nothing is lost.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .crosstree import CrossTree, Node, leftfull, node_key, node_prefix
from .errors import CapExceeded, InputError
from .incmaps import IncompatMap, MonotoneOracle, ext2
from .words import _tails_differ, enumerate_extensions, tuple_extensions, tuple_len, words

DEFAULT_CAP = 10**6

NodePair = tuple[Node, Node]


@dataclass(frozen=True)
class CondPair:
    stems: tuple[Node, Node]

    @classmethod
    def of(cls, rho0, sigma0, rho1, sigma1) -> "CondPair":
        return cls(((rho0, tuple(sigma0)), (rho1, tuple(sigma1))))

    @classmethod
    def root(cls, r: int) -> "CondPair":
        e = ("", ("",) * r)
        return cls((e, e))

    def __getitem__(self, i: int) -> Node:
        return self.stems[i]

    @property
    def left_length(self) -> int:
        return len(self.stems[0][0])

    def to_dict(self) -> list:
        return [{"left": rho, "right": list(s)} for rho, s in self.stems]

    @classmethod
    def from_dict(cls, d) -> "CondPair":
        try:
            (a, b) = d
            return cls(((a["left"], tuple(a["right"])), (b["left"], tuple(b["right"]))))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed condition pair: {d!r}") from e


def is_condition_tuple(t: CrossTree, cp: CondPair) -> bool:
    (r0, s0), (r1, s1) = cp.stems
    if len(r0) != len(r1):
        return False
    return all(x in t and leftfull(t, *x) for x in cp.stems)


def require_condition_tuple(t: CrossTree, cp: CondPair) -> None:
    (r0, _), (r1, _) = cp.stems
    if len(r0) != len(r1):
        raise InputError("stems of a condition-tuple need equal left lengths")
    for x in cp.stems:
        if x not in t:
            raise InputError(f"stem {x!r} is not in the tree")
        if not leftfull(t, *x):
            raise InputError(f"tree is not left-full below stem {x!r}")


def extends(new: CondPair, old: CondPair) -> bool:
    """Extension of condition-tuples: componentwise prefix plus completely
    incompatible left parts over the old left stems."""
    if not all(node_prefix(o, n) for o, n in zip(old.stems, new.stems)):
        return False
    a, b = new.stems[0][0], new.stems[1][0]
    return len(a) == len(b) and _tails_differ(a, b, old.left_length)


def is_witness(pair: NodePair, cp: CondPair) -> bool:
    """Pair extends the stems with left parts completely incompatible over them."""
    x0, x1 = pair
    if not (node_prefix(cp.stems[0], x0) and node_prefix(cp.stems[1], x1)):
        return False
    return len(x0[0]) == len(x1[0]) and _tails_differ(x0[0], x1[0], cp.left_length)


class NodePairSet:
    """A set of node pairs given by a finite member list or by a predicate.

    ``suffix_closed`` is a declaration; :meth:`suffix_violations` checks it on
    a concrete tree.
    """

    def __init__(self, members: Optional[Iterable[NodePair]] = None,
                 predicate: Optional[Callable[[NodePair], bool]] = None,
                 suffix_closed: bool = False):
        if (members is None) == (predicate is None):
            raise InputError("give exactly one of members or predicate")
        self.members = None if members is None else frozenset(
            ((a[0], tuple(a[1])), (b[0], tuple(b[1]))) for a, b in members)
        self.predicate = predicate
        self.suffix_closed = suffix_closed

    def __contains__(self, pair) -> bool:
        if self.members is not None:
            return pair in self.members
        return bool(self.predicate(pair))

    @property
    def extensional(self) -> bool:
        return self.members is not None

    @classmethod
    def everything(cls) -> "NodePairSet":
        return cls(predicate=lambda p: True, suffix_closed=True)

    @classmethod
    def upward_closure(cls, generators: Iterable[NodePair]) -> "NodePairSet":
        gens = tuple(generators)

        def pred(pair):
            return any(node_prefix(g0, pair[0]) and node_prefix(g1, pair[1]) for g0, g1 in gens)

        return cls(predicate=pred, suffix_closed=True)

    def restrict(self, t: CrossTree) -> "NodePairSet":
        """Extensional copy holding the members that are pairs of nodes of ``t``."""
        nodes = t.sorted_nodes()
        return NodePairSet([(a, b) for a in nodes for b in nodes if (a, b) in self],
                           suffix_closed=self.suffix_closed)

    def suffix_violations(self, t: CrossTree, sample: Optional[Iterable[NodePair]] = None) -> list:
        """Members of ``t``^2 whose one-step extensions inside ``t`` are missing.

        Extensional sets are checked on every member; intensional ones only on
        ``sample`` (closure of an arbitrary predicate is not decidable).
        """
        if self.members is not None:
            pool = self.members
        else:
            pool = [p for p in (sample or ()) if p in self]
        bad = []
        for x0, x1 in sorted(pool, key=lambda p: (node_key(p[0]), node_key(p[1]))):
            for y0 in [x0, *_successors(t, x0)]:
                for y1 in [x1, *_successors(t, x1)]:
                    if (y0, y1) != (x0, x1) and (y0, y1) not in self:
                        bad.append(((x0, x1), (y0, y1)))
        return bad

    def to_dict(self) -> list:
        if self.members is None:
            raise InputError("only extensional sets serialize")
        return [[{"left": a[0], "right": list(a[1])}, {"left": b[0], "right": list(b[1])}]
                for a, b in sorted(self.members, key=lambda p: (node_key(p[0]), node_key(p[1])))]

    @classmethod
    def from_dict(cls, d, suffix_closed: bool = False) -> "NodePairSet":
        try:
            pairs = [((a["left"], tuple(a["right"])), (b["left"], tuple(b["right"]))) for a, b in d]
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed node-pair set: {e}") from e
        return cls(pairs, suffix_closed=suffix_closed)


def _successors(t: CrossTree, x: Node) -> list[Node]:
    rho, sigma = x
    out = []
    if len(rho) < t.height:
        out.extend((rho + a, sigma) for a in "012" if sigma in t.slice(rho + a))
    if tuple_len(sigma) < len(rho):
        out.extend((rho, e) for e in tuple_extensions(sigma, tuple_len(sigma) + 1) if e in t.slice(rho))
    return out


def _full_prefixes(node: Node) -> list[Node]:
    mu, tau = node
    l_full = tuple_len(tau)
    return [(mu[:a], tuple(w[:l] for w in tau)) for a in range(len(mu) + 1) for l in range(min(a, l_full) + 1)]


@dataclass
class SufficiencyCertificate:
    sufficient: bool
    height: int
    subtrees_checked: int
    counterexample: Optional[list] = None

    def to_dict(self) -> dict:
        d = {"sufficient": self.sufficient, "height": self.height,
             "subtrees_checked": self.subtrees_checked}
        if self.counterexample is not None:
            d["counterexample"] = [{"left": m, "right": list(s)} for m, s in self.counterexample]
        return d


def _slots(t: CrossTree, cp: CondPair) -> list[tuple[str, tuple, list[Node]]]:
    """One slot per (full left extension, stem right part): its full-length options."""
    slots = {}
    for rho, sigma in cp.stems:
        for mu in enumerate_extensions(rho, t.height):
            if (mu, sigma) in slots:
                continue
            opts = sorted(
                (mu, tau) for tau in t.full_slices.get(mu, ())
                if all(x.startswith(y) for x, y in zip(tau, sigma)))
            slots[(mu, sigma)] = opts
    return [(mu, sigma, opts) for (mu, sigma), opts in sorted(slots.items())]


def sufficiency_certificate(t: CrossTree, a: NodePairSet, cp: CondPair,
                            cap: int = DEFAULT_CAP) -> SufficiencyCertificate:
    """Decide T-sufficiency at height N = height(t) with a certificate.

    Depth-first over slot choices in lex order; a partial choice whose closure
    already contains a witness pair is abandoned, so the first complete choice
    reached is the lex-least counterexample subtree.
    """
    require_condition_tuple(t, cp)
    slots = _slots(t, cp)
    nodes0 = [x for x in t.nodes if node_prefix(cp.stems[0], x)]
    nodes1 = [x for x in t.nodes if node_prefix(cp.stems[1], x)]
    partners: dict[Node, set] = {}
    for x0 in nodes0:
        for x1 in nodes1:
            if is_witness((x0, x1), cp) and (x0, x1) in a:
                partners.setdefault(x0, set()).add(x1)
                partners.setdefault(x1, set()).add(x0)

    in_s: dict[Node, int] = {}
    chosen: list[Node] = []
    visited = 0

    def add(node):
        new = []
        for p in _full_prefixes(node):
            c = in_s.get(p, 0)
            in_s[p] = c + 1
            if c == 0:
                new.append(p)
        hit = any(y in in_s for x in new for y in partners.get(x, ()))
        return hit

    def remove(node):
        for p in _full_prefixes(node):
            c = in_s[p] - 1
            if c:
                in_s[p] = c
            else:
                del in_s[p]

    def search(i: int) -> bool:
        """True when a counterexample completion exists below this partial choice."""
        nonlocal visited
        visited += 1
        if visited > cap:
            raise CapExceeded(f"enumeration cap exceeded: more than {cap} partial subtrees")
        if i == len(slots):
            return True
        for opt in slots[i][2]:
            hit = add(opt)
            chosen.append(opt)
            if not hit and search(i + 1):
                return True
            chosen.pop()
            remove(opt)
        return False

    found = search(0)
    if found:
        return SufficiencyCertificate(False, t.height, visited, sorted(chosen))
    return SufficiencyCertificate(True, t.height, visited)


def is_sufficient(t: CrossTree, a: NodePairSet, cp: CondPair, cap: int = DEFAULT_CAP) -> bool:
    return sufficiency_certificate(t, a, cp, cap).sufficient


def minimal_sufficient_height(t: CrossTree, a: NodePairSet, cp: CondPair,
                              cap: int = DEFAULT_CAP) -> Optional[int]:
    """Least height M <= height(t) at which ``t`` truncated to M is sufficient."""
    for m in range(max(cp.left_length, max(tuple_len(s) for _, s in cp.stems)), t.height + 1):
        if is_sufficient(t.truncate(m), a, cp, cap):
            return m
    return None


def direct_search(t: CrossTree, a: NodePairSet, cp: CondPair) -> Optional[CondPair]:
    """Exhaustive oracle: first extension condition-tuple of ``cp`` lying in ``a``."""
    nodes0 = sorted((x for x in t.nodes if node_prefix(cp.stems[0], x)), key=node_key)
    nodes1 = sorted((x for x in t.nodes if node_prefix(cp.stems[1], x)), key=node_key)
    for x0 in nodes0:
        for x1 in nodes1:
            if is_witness((x0, x1), cp) and (x0, x1) in a and leftfull(t, *x0) and leftfull(t, *x1):
                return CondPair((x0, x1))
    return None


@dataclass
class Extraction:
    result: CondPair
    konig_height: int
    psi: Optional[IncompatMap]
    witness: NodePair
    lifted: NodePair
    subtree_size: int = 0
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "result": self.result.to_dict(),
            "konig_height": self.konig_height,
            "psi": None if self.psi is None else self.psi.to_dict(),
            "witness": CondPair(self.witness).to_dict(),
            "lifted": CondPair(self.lifted).to_dict(),
            "subtree_size": self.subtree_size,
        }


def _pair_order(p: NodePair):
    return (len(p[0][0]), node_key(p[0]), node_key(p[1]))


def _tail_oracle(t: CrossTree, cp: CondPair, n: int, depth: int) -> MonotoneOracle:
    """Tagged union of the slice maps f_i(tau) = {(i, nu) : (rho^i tau, sigma^i nu) in t},
    nu ranging over right tails reaching length |rho| + n and realized in the
    slice by a full-length right tuple."""
    target = cp.left_length + n

    def at_least(word: str) -> frozenset:
        out = set()
        for i, (rho, sigma) in enumerate(cp.stems):
            full_len = len(rho) + len(word)
            for s in t.slice(rho + word):
                if tuple_len(s) == full_len and all(x.startswith(y) for x, y in zip(s, sigma)):
                    out.add((i, tuple(w[len(y):target] for w, y in zip(s, sigma))))
        return frozenset(out)

    def evaluator(word: str) -> frozenset:
        if len(word) >= n:
            return at_least(word)
        out = set()
        for ext in enumerate_extensions(word, n):
            out |= at_least(ext)
        return frozenset(out)

    codomain = sorted(set().union(*(at_least(w) for w in words(n))))
    return MonotoneOracle(evaluator, depth, tuple(codomain))


def extract_detailed(t: CrossTree, a: NodePairSet, cp: CondPair,
                     cap: int = DEFAULT_CAP) -> Extraction:
    """Find a condition-tuple in ``a`` extending ``cp``, following the
    sufficiency-implies-extendible construction at finite height."""
    if not a.suffix_closed:
        raise InputError("extraction needs a suffix-closed pair set")
    require_condition_tuple(t, cp)
    if not is_sufficient(t, a, cp, cap):
        raise InputError("the pair set is not sufficient over the given condition-tuple")
    base = cp.left_length
    if base == t.height:
        found = direct_search(t, a, cp)
        assert found is not None, "sufficient at full height yet no stem-level witness"
        return Extraction(found, t.height, None, found.stems, found.stems)

    konig = next(m for m in range(base + 1, t.height + 1) if is_sufficient(t.truncate(m), a, cp, cap))
    n = konig - base
    budget = t.height - base
    oracle = _tail_oracle(t, cp, n, budget)
    _, psi = ext2(oracle, n, budget)

    blocks: list[list[Node]] = [[], []]
    for tau in words(n):
        img = psi.table[tau]
        for i, nu in sorted(oracle(img)):
            rho, sigma = cp.stems[i]
            node = (rho + tau, tuple(x + y for x, y in zip(sigma, nu)))
            assert node in t, f"B_{i} node {node!r} missing from the tree"
            blocks[i].append(node)
    s_nodes: set[Node] = set()
    for b in blocks[0] + blocks[1]:
        s_nodes.update(_full_prefixes(b))
    s_nodes.add(("", ("",) * t.r))
    sub = CrossTree(s_nodes, konig, t.r)
    for x in cp.stems:
        assert leftfull(sub, *x), f"closure of B_0 and B_1 is not left-full below {x!r}"

    side0 = sorted((x for x in s_nodes if node_prefix(cp.stems[0], x)), key=node_key)
    side1 = sorted((x for x in s_nodes if node_prefix(cp.stems[1], x)), key=node_key)
    witnesses = sorted(((x0, x1) for x0 in side0 for x1 in side1
                        if is_witness((x0, x1), cp) and (x0, x1) in a), key=_pair_order)
    if not witnesses:
        raise AssertionError(f"no witness inside S despite sufficiency; S = {sorted(s_nodes, key=node_key)}")
    for w0, w1 in witnesses:
        for b0 in blocks[0]:
            if not node_prefix(w0, b0):
                continue
            for b1 in blocks[1]:
                if node_prefix(w1, b1) and is_witness((b0, b1), cp) and (b0, b1) in a:
                    result = _lift(cp, psi, (b0, b1))
                    _check_extraction(t, a, cp, result)
                    return Extraction(result, konig, psi, (w0, w1), (b0, b1), len(s_nodes))
    raise AssertionError(
        f"no witness in S lifts to a completely incompatible pair of B-nodes; "
        f"witnesses = {witnesses[:5]}, S = {sorted(s_nodes, key=node_key)}")


def _lift(cp: CondPair, psi: IncompatMap, pair: NodePair) -> CondPair:
    base = cp.left_length
    out = []
    for (rho, sigma), (mu, tau) in zip(cp.stems, pair):
        out.append((rho + psi.table[mu[base:]], tau))
    return CondPair(tuple(out))


def _check_extraction(t: CrossTree, a: NodePairSet, cp: CondPair, result: CondPair) -> None:
    assert result.stems in a, f"extracted pair {result!r} is not in the pair set"
    assert extends(result, cp), f"extracted pair {result!r} does not extend {cp!r}"
    for x in result.stems:
        assert x in t and leftfull(t, *x), f"tree is not left-full below extracted stem {x!r}"


def extract(t: CrossTree, a: NodePairSet, cp: CondPair, cap: int = DEFAULT_CAP) -> CondPair:
    return extract_detailed(t, a, cp, cap).result


def dumps_certificate(cert) -> str:
    return json.dumps(cert.to_dict(), sort_keys=True, separators=(",", ":"))
