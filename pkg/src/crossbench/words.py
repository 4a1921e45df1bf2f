"""Finite words over small alphabets and tuples of such words.

A word is a ``str`` of ASCII digits, a right tuple is a ``tuple`` of words of
equal length. Both are immutable and hashable, which keeps the hot loops of
the cross-tree code cheap.
"""

from __future__ import annotations

from itertools import product
from typing import Sequence

from .errors import InputError

K_LEFT = 3
K_RIGHT = 2

_DIGITS = "0123456789"


def check_word(w: str, k: int) -> str:
    if not isinstance(w, str):
        raise InputError(f"word must be a string of digits, got {w!r}")
    for ch in w:
        if ch not in _DIGITS[:k]:
            raise InputError(f"digit {ch!r} of {w!r} is outside alphabet of size {k}")
    return w


def check_tuple(sigma: Sequence[str], r: int, k: int = K_RIGHT) -> tuple[str, ...]:
    sigma = tuple(sigma)
    if len(sigma) != r:
        raise InputError(f"right tuple {sigma!r} has arity {len(sigma)}, expected {r}")
    for w in sigma:
        check_word(w, k)
    if len({len(w) for w in sigma}) > 1:
        raise InputError(f"components of {sigma!r} have unequal lengths")
    return sigma


def tuple_len(sigma: Sequence[str]) -> int:
    """Length of a right tuple, the max of its component lengths."""
    return max((len(w) for w in sigma), default=0)


def empty_tuple(r: int) -> tuple[str, ...]:
    return ("",) * r


def is_prefix(a, b) -> bool:
    """Componentwise non-strict prefix test for words or tuples of words."""
    if isinstance(a, str) and isinstance(b, str):
        return b.startswith(a)
    if isinstance(a, str) or isinstance(b, str):
        raise InputError(f"cannot compare a word with a tuple: {a!r}, {b!r}")
    if len(a) != len(b):
        raise InputError(f"arity mismatch: {a!r} vs {b!r}")
    return all(y.startswith(x) for x, y in zip(a, b))


def completely_incompatible(mu0: str, mu1: str, rho0: str = "", rho1: str = "") -> bool:
    """True iff the suffixes of ``mu0``/``mu1`` past the stems differ everywhere."""
    if len(mu0) != len(mu1):
        raise InputError(f"words {mu0!r} and {mu1!r} have unequal lengths")
    if len(rho0) != len(rho1):
        raise InputError(f"stems {rho0!r} and {rho1!r} have unequal lengths")
    if not (mu0.startswith(rho0) and mu1.startswith(rho1)):
        raise InputError("stems must be prefixes of the words")
    return _tails_differ(mu0, mu1, len(rho0))


def _tails_differ(mu0: str, mu1: str, start: int) -> bool:
    for i in range(start, len(mu0)):
        if mu0[i] == mu1[i]:
            return False
    return True


def agreement_positions(w0: str, w1: str) -> set[int]:
    if len(w0) != len(w1):
        raise InputError(f"words {w0!r} and {w1!r} have unequal lengths")
    return {i for i, (x, y) in enumerate(zip(w0, w1)) if x == y}


def words(n: int, k: int = K_LEFT) -> list[str]:
    """All words of length exactly ``n`` in lexicographic order."""
    return ["".join(p) for p in product(_DIGITS[:k], repeat=n)]


def words_upto(n: int, k: int = K_LEFT) -> list[str]:
    """All words of length at most ``n`` in (length, lex) order."""
    out: list[str] = []
    for m in range(n + 1):
        out.extend(words(m, k))
    return out


def enumerate_extensions(stem: str, target_length: int, k: int = K_LEFT) -> list[str]:
    if target_length < len(stem):
        raise InputError(f"target length {target_length} is shorter than stem {stem!r}")
    return [stem + w for w in words(target_length - len(stem), k)]


def tuples(n: int, r: int, k: int = K_RIGHT) -> list[tuple[str, ...]]:
    """All r-tuples of words of length ``n``, lex order on the flattened tuple."""
    ws = words(n, k)
    return [tuple(t) for t in product(ws, repeat=r)]


def tuple_extensions(sigma: Sequence[str], n: int, k: int = K_RIGHT) -> list[tuple[str, ...]]:
    """Extensions of the tuple ``sigma`` to common length ``n``."""
    grow = n - tuple_len(sigma)
    if grow < 0:
        raise InputError(f"target length {n} is shorter than tuple {tuple(sigma)!r}")
    ws = words(grow, k)
    return [tuple(s + w for s, w in zip(sigma, ext)) for ext in product(ws, repeat=len(sigma))]


def require_pigeonhole(k_left: int, k_right: int) -> None:
    """Reject alphabet pairs where the left side is not strictly larger."""
    if k_left <= k_right:
        raise InputError(f"left alphabet ({k_left}) must be larger than right alphabet ({k_right})")
