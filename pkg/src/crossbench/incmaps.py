"""Incompatibility-preserving maps 3^n -> 3^m.

Checking a map, extending it to send one word to a longer one, and growing
it until a non-increasing oracle is stable on every image.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping

from .errors import DepthBudgetExhausted, InputError
from .words import K_LEFT, _tails_differ, check_word, enumerate_extensions, words


@dataclass(frozen=True)
class IncompatMap:
    n: int
    m: int
    table: Mapping[str, str] = field(hash=False)

    def __call__(self, mu: str) -> str:
        return self.table[mu]

    def check(self) -> None:
        """Raise InputError unless the table is total, well-typed and extending."""
        if self.m < self.n:
            raise InputError(f"target length {self.m} is below source length {self.n}")
        dom = words(self.n)
        if sorted(self.table) != dom:
            raise InputError(f"table must have exactly the {len(dom)} words of length {self.n} as keys")
        for mu, img in self.table.items():
            check_word(img, K_LEFT)
            if len(img) != self.m:
                raise InputError(f"image {img!r} of {mu!r} does not have length {self.m}")

    def extends(self, other: "IncompatMap") -> bool:
        return self.n == other.n and all(self.table[mu].startswith(other.table[mu]) for mu in other.table)

    @classmethod
    def identity(cls, n: int) -> "IncompatMap":
        return cls(n, n, {mu: mu for mu in words(n)})

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "table": {mu: self.table[mu] for mu in sorted(self.table)}}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "IncompatMap":
        try:
            phi = cls(int(d["n"]), int(d["m"]), dict(d["table"]))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed map document: {e}") from e
        phi.check()
        return phi


def verify(phi: IncompatMap, rho0: str = "", rho1: str = "") -> bool:
    """Check that ``phi`` preserves incompatibility over ``(rho0, rho1)``.

    Enumerates every pair of source words; pairs extending the stems and
    completely incompatible over them must have images completely
    incompatible over the source words.
    """
    phi.check()
    if len(rho0) != len(rho1) or len(rho0) > phi.n:
        raise InputError("stems must have equal length at most n")
    tab = phi.table
    if any(not img.startswith(mu) for mu, img in tab.items()):
        return False
    n = phi.n
    dom0 = [mu for mu in tab if mu.startswith(rho0)]
    dom1 = [mu for mu in tab if mu.startswith(rho1)]
    start = len(rho0)
    for mu0 in dom0:
        for mu1 in dom1:
            if _tails_differ(mu0, mu1, start) and not _tails_differ(tab[mu0], tab[mu1], n):
                return False
    return True


def _shift(tau: str, delta: int) -> str:
    return "".join(str((int(c) + delta) % 3) for c in tau)


def ext1(rho: str, rho_hat: str, psi: IncompatMap) -> IncompatMap:
    """Extend ``psi`` to a map into 3^|rho_hat| sending ``rho`` to ``rho_hat``.

    Every image psi(eta) is padded with the tail of rho_hat shifted by
    eta(0) - rho(0) mod 3; distinct first digits give digit-wise distinct tails.
    """
    psi.check()
    n = psi.n
    if len(rho) != n:
        raise InputError(f"rho must have length {n}")
    check_word(rho_hat, K_LEFT)
    if not rho_hat.startswith(psi.table[rho]):
        raise InputError(f"psi({rho!r}) = {psi.table[rho]!r} is not a prefix of {rho_hat!r}")
    m = len(rho_hat)
    tau = rho_hat[psi.m:]
    if not tau:
        return psi
    if n == 0:
        raise InputError("no incompatibility-preserving map on 3^0 can grow: the empty word "
                         "is completely incompatible with itself")
    if not verify(psi):
        raise InputError("psi does not preserve incompatibility over (ε, ε)")
    base = int(rho[0])
    table = {eta: img + _shift(tau, int(eta[0]) - base) for eta, img in psi.table.items()}
    phi = IncompatMap(n, m, table)
    assert phi.table[rho] == rho_hat and phi.extends(psi)
    return phi


@dataclass(frozen=True)
class MonotoneOracle:
    """A non-increasing set-valued function on ternary words up to ``depth``.

    ``codomain`` lists every value the evaluator may return members of; the
    requirement sweep of :func:`ext2` walks it in sorted order.
    """

    evaluator: Callable[[str], frozenset]
    depth: int
    codomain: tuple
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, word: str) -> frozenset:
        if len(word) > self.depth:
            raise InputError(f"oracle queried at {word!r}, beyond depth {self.depth}")
        try:
            return self._cache[word]
        except KeyError:
            val = self._cache[word] = frozenset(self.evaluator(word))
            return val

    @classmethod
    def from_table(cls, table: Mapping[str, frozenset], depth: int) -> "MonotoneOracle":
        codomain = tuple(sorted(set().union(*table.values()))) if table else ()
        return cls(lambda w: table[w], depth, codomain)

    def is_non_increasing(self) -> bool:
        for w in words_upto_depth(self.depth):
            here = self(w)
            if len(w) < self.depth and any(not self(w + a) <= here for a in "012"):
                return False
        return True


def words_upto_depth(depth: int) -> list[str]:
    out = []
    for l in range(depth + 1):
        out.extend(words(l))
    return out


def stable_below(oracle: MonotoneOracle, nu: Hashable, start: str, budget: int) -> bool:
    """True iff ``nu`` is in oracle(w) for every w >= start up to the budget."""
    for l in range(len(start), budget + 1):
        for w in enumerate_extensions(start, l):
            if nu not in oracle(w):
                return False
    return True


def _first_drop(oracle: MonotoneOracle, nu: Hashable, start: str, budget: int) -> str | None:
    for l in range(len(start), budget + 1):
        for w in enumerate_extensions(start, l):
            if nu not in oracle(w):
                return w
    return None


def ext2(oracle: MonotoneOracle, n: int, budget: int) -> tuple[int, IncompatMap]:
    """Requirement sweep producing a map whose images settle every (nu, rho).

    For each requirement in (nu, rho) lex order: if nu already drops out at
    phi(rho), or stays in everywhere above it within the budget, nothing is
    done; otherwise phi is grown through :func:`ext1` so that phi(rho) is the
    shortest extension at which nu has dropped out.
    """
    if budget < n:
        raise InputError(f"budget {budget} is below n = {n}")
    if budget > oracle.depth:
        raise InputError(f"budget {budget} exceeds oracle depth {oracle.depth}")
    phi = IncompatMap.identity(n)
    for nu in oracle.codomain:
        for rho in words(n):
            at = phi.table[rho]
            if len(at) > budget:
                raise DepthBudgetExhausted((nu, rho))
            if nu not in oracle(at) or stable_below(oracle, nu, at, budget):
                continue
            eta = _first_drop(oracle, nu, at, budget)
            if eta is None:
                raise DepthBudgetExhausted((nu, rho))
            try:
                phi = ext1(rho, eta, phi)
            except InputError as e:
                raise DepthBudgetExhausted((nu, rho), f"cannot grow the map for requirement "
                                                      f"{(nu, rho)!r}: {e}") from e
    for nu in oracle.codomain:
        for rho in words(n):
            at = phi.table[rho]
            if nu in oracle(at) and not stable_below(oracle, nu, at, budget):
                raise InputError(f"oracle is not non-increasing: requirement {(nu, rho)!r} reopened")
    return phi.m, phi


def ext2_holds(oracle: MonotoneOracle, phi: IncompatMap, budget: int) -> bool:
    """Post-condition of :func:`ext2`, checked by full enumeration."""
    for nu in oracle.codomain:
        for rho, at in phi.table.items():
            if nu in oracle(at):
                for l in range(len(at), budget + 1):
                    for w in enumerate_extensions(at, l):
                        if nu not in oracle(w):
                            return False
    return True
