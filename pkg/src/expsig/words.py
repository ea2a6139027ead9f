"""Word classes used to locate the leading-order error.

Letters are integers ``1..d``; a word is a tuple of letters.  For a fixed
half-length ``n`` the classes of length-``2n`` words are

``S``   concatenations of ``n`` squares ``e_i e_i``
``K``   words in which every letter occurs an even number of times
``E``   ``e_i e_j e_i e_j`` or ``e_i e_j e_j e_i`` with ``i != j`` (length 4 only)
``W^k`` a square prefix of length ``2k``, one ``E`` block, then a square suffix
``W``   union of ``W^k`` over ``k = 0 .. n-2``
``P^k`` words of ``K`` with exactly ``k`` non-square aligned pairs
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .tensor import _check_dim, parse_word, word_index

__all__ = [
    "CLASSES",
    "WordClassReport",
    "letter_counts",
    "nonsquare_pair_count",
    "is_square_word",
    "in_E",
    "w_block_positions",
    "classify",
    "enumerate_class",
    "class_indices",
    "class_mask",
    "word_class_report",
]

CLASSES = ("S", "K", "E", "W", "P")


def letter_counts(w: Sequence[int], d: int) -> tuple[int, ...]:
    """``(N_1(w), ..., N_d(w))``."""
    w = parse_word(w, d)
    counts = [0] * d
    for c in w:
        counts[c - 1] += 1
    return tuple(counts)


def nonsquare_pair_count(w: Sequence[int]) -> int:
    """Number of aligned pairs ``(w[2k], w[2k+1])`` whose letters differ."""
    w = parse_word(w)
    if len(w) % 2:
        raise ValueError(f"p(w) needs an even-length word, got length {len(w)}")
    return sum(w[i] != w[i + 1] for i in range(0, len(w), 2))


def is_square_word(w: Sequence[int]) -> bool:
    return len(w) % 2 == 0 and all(w[i] == w[i + 1] for i in range(0, len(w), 2))


def in_E(w: Sequence[int]) -> bool:
    if len(w) != 4:
        return False
    a, b, c, e = w
    return a != b and ((c, e) == (a, b) or (c, e) == (b, a))


def w_block_positions(w: Sequence[int]) -> list[int]:
    """All ``k`` such that ``w`` factors as (2k squares) * E-word * (squares).

    For a given ``k`` the factorisation is unique when it exists; a word can
    only have one such ``k`` because it contains exactly two non-square pairs.
    """
    L = len(w)
    if L % 2 or L < 4:
        return []
    out = []
    for k in range(0, (L - 4) // 2 + 1):
        pre, mid, post = w[: 2 * k], w[2 * k : 2 * k + 4], w[2 * k + 4 :]
        if is_square_word(pre) and in_E(mid) and is_square_word(post):
            out.append(k)
    return out


def classify(w: Sequence[int], d: int) -> set[str]:
    """Class labels of ``w`` such as ``{"K_6", "P^2", "W^1_6"}``.

    Words with an odd letter count belong to none of the classes and get an
    empty set.
    """
    w = parse_word(w, d)
    if len(w) % 2:
        raise ValueError(f"classify needs an even-length word, got length {len(w)}")
    L = len(w)
    counts = letter_counts(w, d)
    if any(c % 2 for c in counts):
        return set()
    labels = {f"K_{L}", f"P^{nonsquare_pair_count(w)}"}
    if is_square_word(w):
        labels.add(f"S_{L}")
    for k in w_block_positions(w):
        labels.add(f"W^{k}_{L}")
    return labels


def _squares(d: int, m: int):
    for letters in product(range(1, d + 1), repeat=m):
        yield tuple(c for c in letters for _ in (0, 1))


def _e_words(d: int):
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            if i != j:
                yield (i, j, i, j)
                yield (i, j, j, i)


def _all_words(d: int, length: int):
    return product(range(1, d + 1), repeat=length)


def enumerate_class(cls: str, d: int, n: int | None = None, k: int | None = None) -> list[tuple[int, ...]]:
    """Sorted, duplicate-free list of the words in a class.

    :param cls: one of ``"S", "K", "E", "W", "P"``
    :param d: alphabet size
    :param n: half-length (words have length ``2n``); ignored for ``"E"``
    :param k: block position for ``"W"`` (``W^k``), pair count for ``"P"``;
        for ``"W"`` omitting ``k`` gives the union over all positions
    """
    _check_dim(d)
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}; expected one of {CLASSES}")
    if cls == "E":
        if n not in (None, 2):
            raise ValueError("class E only contains words of length 4 (n = 2)")
        return sorted(_e_words(d))
    if n is None or n < 0:
        raise ValueError(f"class {cls} needs n >= 0")
    if cls == "S":
        return sorted(_squares(d, n))
    if cls == "K":
        return [w for w in _all_words(d, 2 * n) if all(c % 2 == 0 for c in letter_counts(w, d))]
    if cls == "P":
        if k is None or not 0 <= k <= n:
            raise ValueError(f"class P needs 0 <= k <= n, got k={k!r}")
        return [w for w in enumerate_class("K", d, n) if nonsquare_pair_count(w) == k]
    # W
    if n < 2:
        raise ValueError("class W needs n >= 2")
    ks = range(n - 1) if k is None else [k]
    if k is not None and not 0 <= k <= n - 2:
        raise ValueError(f"W^k needs 0 <= k <= n-2, got k={k}")
    words = set()
    for kk in ks:
        for pre in _squares(d, kk):
            for mid in _e_words(d):
                for post in _squares(d, n - 2 - kk):
                    words.add(pre + mid + post)
    return sorted(words)


@lru_cache(maxsize=None)
def class_indices(cls: str, d: int, n: int, k: int | None = None) -> np.ndarray:
    """Block indices (at level ``2n``) of the words in a class, ascending."""
    if cls == "E":
        words = enumerate_class("E", d) if n == 2 else []
    else:
        words = enumerate_class(cls, d, n, k)
    idx = np.array([word_index(w, d) for w in words], dtype=np.int64)
    idx.flags.writeable = False
    return idx


def class_mask(cls: str, d: int, n: int, k: int | None = None) -> np.ndarray:
    mask = np.zeros(d ** (2 * n), dtype=bool)
    mask[class_indices(cls, d, n, k)] = True
    return mask


@dataclass(frozen=True)
class WordClassReport:
    """Cardinalities of every class at fixed ``(d, n)``."""

    d: int
    n: int
    cardinalities: dict = field(default_factory=dict)

    def membership(self, w) -> set[str]:
        w = parse_word(w, self.d)
        if len(w) != 2 * self.n:
            raise ValueError(f"word length {len(w)} does not match 2n = {2 * self.n}")
        return classify(w, self.d)


def word_class_report(d: int, n: int) -> WordClassReport:
    card = {
        "S": len(class_indices("S", d, n)),
        "K": len(class_indices("K", d, n)),
    }
    if n >= 2:
        card["E"] = len(enumerate_class("E", d))
        for k in range(n - 1):
            card[f"W^{k}"] = len(class_indices("W", d, n, k))
        card["W"] = len(class_indices("W", d, n))
    for k in range(n + 1):
        card[f"P^{k}"] = len(class_indices("P", d, n, k))
    return WordClassReport(d, n, card)
