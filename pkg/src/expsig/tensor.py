"""Level-truncated free tensor algebra over R^d.

A :class:`TensorSeries` stores one dense block per level.  The block at level
``n`` has ``d**n`` slots; the word ``e_{i_1}...e_{i_n}`` lives at index
``sum((i_j - 1) * d**(n - j))``, so lexicographic word order and index order
coincide and the concatenation of a level-``k`` word with a level-``m`` word
is ``i * d**m + j``.

Two scalar modes are supported:

* ``"rational"``: numpy object arrays of :class:`fractions.Fraction`.
* ``"float"``: binary64 arrays, used by the Monte Carlo code.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Word",
    "MAX_DIM",
    "TensorSeries",
    "parse_word",
    "word_to_str",
    "word_index",
    "index_word",
    "unit",
    "zero",
    "from_terms",
    "product",
    "power",
    "exp",
    "projection",
    "projective_norm",
    "hs_norm",
    "to_json",
    "from_json",
]

Word = tuple  # tuple[int, ...], letters in 1..d
MAX_DIM = 9
SCALAR_MODES = ("rational", "float")

WordLike = Union[str, Sequence[int]]


def parse_word(w: WordLike, d: int | None = None) -> tuple[int, ...]:
    """Normalise ``"1122"`` or ``(1, 1, 2, 2)`` to a tuple of letters."""
    if isinstance(w, str):
        if w and not w.isdigit():
            raise ValueError(f"word {w!r} must be a string of digits")
        letters = tuple(int(c) for c in w)
    else:
        letters = tuple(int(c) for c in w)
    hi = MAX_DIM if d is None else d
    for c in letters:
        if not 1 <= c <= hi:
            raise ValueError(f"letter {c} of word {w!r} outside [1, {hi}]")
    return letters


def word_to_str(w: Sequence[int]) -> str:
    return "".join(str(c) for c in w)


def word_index(w: Sequence[int], d: int) -> int:
    idx = 0
    for c in w:
        idx = idx * d + (c - 1)
    return idx


def index_word(idx: int, n: int, d: int) -> tuple[int, ...]:
    letters = []
    for _ in range(n):
        idx, r = divmod(idx, d)
        letters.append(r + 1)
    return tuple(reversed(letters))


def _check_dim(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or not 2 <= d <= MAX_DIM:
        raise ValueError(f"dimension d must be an integer in [2, {MAX_DIM}], got {d!r}")


def _zeros(size: int, scalar: str) -> np.ndarray:
    if scalar == "float":
        return np.zeros(size, dtype=np.float64)
    out = np.empty(size, dtype=object)
    out[:] = [Fraction(0)] * size
    return out


def _to_scalar(x, scalar: str):
    if scalar == "float":
        return float(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"refusing to convert {type(x).__name__} {x!r} to an exact rational")


def _is_zero_block(block: np.ndarray) -> bool:
    return not block.any()


class TensorSeries:
    """An element of T(R^d) truncated at a fixed level.

    Instances are immutable; arithmetic returns new series.  ``a * b`` is the
    truncated concatenation product when both operands are series and scalar
    multiplication otherwise.
    """

    __slots__ = ("d", "level", "scalar", "_blocks")

    def __init__(self, d: int, level: int, blocks: Iterable[np.ndarray], scalar: str = "rational"):
        _check_dim(d)
        if level < 0:
            raise ValueError("level must be >= 0")
        if scalar not in SCALAR_MODES:
            raise ValueError(f"scalar mode must be one of {SCALAR_MODES}")
        blocks = list(blocks)
        if len(blocks) != level + 1:
            raise ValueError(f"expected {level + 1} level blocks, got {len(blocks)}")
        frozen = []
        for n, b in enumerate(blocks):
            b = np.asarray(b, dtype=np.float64 if scalar == "float" else object).reshape(-1)
            if b.size != d**n:
                raise ValueError(f"level {n} block has {b.size} slots, expected {d**n}")
            if scalar == "rational":
                conv = np.empty(b.size, dtype=object)
                conv[:] = [_to_scalar(x, scalar) for x in b]
                b = conv
            else:
                b = b.copy()
            b.flags.writeable = False
            frozen.append(b)
        self.d = int(d)
        self.level = int(level)
        self.scalar = scalar
        self._blocks = tuple(frozen)

    @classmethod
    def _trusted(cls, d: int, level: int, blocks: Sequence[np.ndarray], scalar: str) -> "TensorSeries":
        # skips validation; callers guarantee shapes and scalar types
        obj = cls.__new__(cls)
        for b in blocks:
            b.flags.writeable = False
        obj.d, obj.level, obj.scalar, obj._blocks = d, level, scalar, tuple(blocks)
        return obj

    @property
    def exact(self) -> bool:
        return self.scalar == "rational"

    def block(self, n: int) -> np.ndarray:
        """Read-only view of the level-``n`` coefficients."""
        if not 0 <= n <= self.level:
            raise ValueError(f"level {n} outside [0, {self.level}]")
        return self._blocks[n]

    @property
    def blocks(self) -> tuple[np.ndarray, ...]:
        return self._blocks

    def __getitem__(self, w: WordLike):
        letters = parse_word(w, self.d)
        if len(letters) > self.level:
            raise KeyError(f"word of length {len(letters)} exceeds truncation level {self.level}")
        return self._blocks[len(letters)][word_index(letters, self.d)]

    coeff = __getitem__

    def terms(self):
        """Yield ``(word, coefficient)`` for every nonzero coefficient in index order."""
        for n, b in enumerate(self._blocks):
            for idx in np.flatnonzero(b != 0):
                yield index_word(int(idx), n, self.d), b[idx]

    def _check_compatible(self, other: "TensorSeries") -> None:
        if not isinstance(other, TensorSeries):
            raise TypeError(f"expected TensorSeries, got {type(other).__name__}")
        if (self.d, self.level, self.scalar) != (other.d, other.level, other.scalar):
            raise ValueError(
                "incompatible series: "
                f"(d={self.d}, level={self.level}, {self.scalar}) vs "
                f"(d={other.d}, level={other.level}, {other.scalar})"
            )

    def __add__(self, other):
        self._check_compatible(other)
        return TensorSeries._trusted(
            self.d, self.level, [a + b for a, b in zip(self._blocks, other._blocks)], self.scalar
        )

    def __sub__(self, other):
        self._check_compatible(other)
        return TensorSeries._trusted(
            self.d, self.level, [a - b for a, b in zip(self._blocks, other._blocks)], self.scalar
        )

    def __neg__(self):
        return TensorSeries._trusted(self.d, self.level, [-b for b in self._blocks], self.scalar)

    def scale(self, c) -> "TensorSeries":
        c = _to_scalar(c, self.scalar)
        return TensorSeries._trusted(self.d, self.level, [b * c for b in self._blocks], self.scalar)

    def __mul__(self, other):
        if isinstance(other, TensorSeries):
            return product(self, other)
        if isinstance(other, (Real, np.number)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Real, np.number)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (Real, np.number)):
            if self.exact:
                return self.scale(Fraction(1) / _to_scalar(other, "rational"))
            return self.scale(1.0 / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        if (self.d, self.level, self.scalar) != (other.d, other.level, other.scalar):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._blocks, other._blocks))

    __hash__ = None

    def to_float(self) -> "TensorSeries":
        if not self.exact:
            return self
        return TensorSeries._trusted(
            self.d, self.level, [b.astype(np.float64) for b in self._blocks], "float"
        )

    def truncate(self, level: int) -> "TensorSeries":
        """Drop every level above ``level``."""
        if not 0 <= level <= self.level:
            raise ValueError(f"cannot truncate level-{self.level} series to level {level}")
        return TensorSeries._trusted(self.d, level, list(self._blocks[: level + 1]), self.scalar)

    def __repr__(self):
        nz = sum(int(np.count_nonzero(b != 0)) for b in self._blocks)
        return f"TensorSeries(d={self.d}, level={self.level}, scalar={self.scalar!r}, nonzero={nz})"


def zero(d: int, level: int, scalar: str = "rational") -> TensorSeries:
    _check_dim(d)
    if level < 0:
        raise ValueError("level must be >= 0")
    if scalar not in SCALAR_MODES:
        raise ValueError(f"scalar mode must be one of {SCALAR_MODES}")
    return TensorSeries._trusted(d, level, [_zeros(d**n, scalar) for n in range(level + 1)], scalar)


def unit(d: int, level: int, scalar: str = "rational") -> TensorSeries:
    """Multiplicative identity: coefficient 1 on the empty word, 0 elsewhere."""
    z = zero(d, level, scalar)
    blocks = [b.copy() for b in z.blocks]
    blocks[0][0] = Fraction(1) if scalar == "rational" else 1.0
    return TensorSeries._trusted(d, level, blocks, scalar)


def from_terms(d: int, level: int, terms, scalar: str = "rational") -> TensorSeries:
    """Build a series from a mapping or iterable of ``(word, coefficient)`` pairs.

    Repeated words accumulate.
    """
    z = zero(d, level, scalar)
    blocks = [b.copy() for b in z.blocks]
    items = terms.items() if hasattr(terms, "items") else terms
    for w, c in items:
        letters = parse_word(w, d)
        if len(letters) > level:
            raise ValueError(f"word {word_to_str(letters)!r} longer than level {level}")
        blocks[len(letters)][word_index(letters, d)] += _to_scalar(c, scalar)
    return TensorSeries._trusted(d, level, blocks, scalar)


def _block_product(a_blocks, b_blocks, d, level, scalar, a_nz, b_nz):
    out = []
    for n in range(level + 1):
        acc = None
        for k in range(n + 1):
            if not (a_nz[k] and b_nz[n - k]):
                continue
            term = np.multiply.outer(a_blocks[k], b_blocks[n - k]).reshape(-1)
            acc = term if acc is None else acc + term
        out.append(_zeros(d**n, scalar) if acc is None else acc)
    return out


def product(a: TensorSeries, b: TensorSeries) -> TensorSeries:
    """Truncated concatenation (Chen) product ``a ⊗ b``.

    Level ``n`` of the result is ``sum_k pi_k(a) ⊗ pi_{n-k}(b)``; anything
    above the truncation level is discarded.
    """
    a._check_compatible(b)
    a_nz = [not _is_zero_block(x) for x in a.blocks]
    b_nz = [not _is_zero_block(x) for x in b.blocks]
    blocks = _block_product(a.blocks, b.blocks, a.d, a.level, a.scalar, a_nz, b_nz)
    return TensorSeries._trusted(a.d, a.level, blocks, a.scalar)


def power(a: TensorSeries, M: int) -> TensorSeries:
    """``a^{⊗M}`` by binary exponentiation.  ``M = 0`` gives the unit."""
    if not isinstance(M, (int, np.integer)) or isinstance(M, bool):
        raise TypeError("exponent must be an integer")
    if M < 0:
        raise ValueError("negative tensor powers are not defined")
    result = unit(a.d, a.level, a.scalar)
    base = a
    first = True
    while M:
        if M & 1:
            result = base if first else product(result, base)
            first = False
        M >>= 1
        if M:
            base = product(base, base)
    return result


def exp(a: TensorSeries) -> TensorSeries:
    """Truncated exponential ``sum_{k<=L} a^{⊗k} / k!``; requires zero constant term."""
    if a.blocks[0][0] != 0:
        raise ValueError("exp requires a series with zero constant term")
    result = unit(a.d, a.level, a.scalar)
    term = result
    for k in range(1, a.level + 1):
        term = product(term, a) / k
        if all(_is_zero_block(b) for b in term.blocks):
            break
        result = result + term
    return result


def projection(a: TensorSeries, n: int) -> TensorSeries:
    """Keep the level-``n`` block and zero the rest."""
    if not 0 <= n <= a.level:
        raise ValueError(f"projection level {n} outside [0, {a.level}]")
    blocks = [b if k == n else _zeros(a.d**k, a.scalar) for k, b in enumerate(a.blocks)]
    return TensorSeries._trusted(a.d, a.level, blocks, a.scalar)


def projective_norm(a: TensorSeries, n: int):
    """Projective norm of the level-``n`` block with l1 on R^d.

    With the l1 base norm this is just the sum of absolute coefficients.
    Exact in rational mode.
    """
    block = a.block(n)
    if a.exact:
        return sum((abs(x) for x in block), Fraction(0))
    return float(np.abs(block).sum())


def hs_norm(a: TensorSeries, n: int) -> float:
    """Hilbert-Schmidt (Euclidean) norm of the level-``n`` block, as a float."""
    block = a.block(n)
    if a.exact:
        sq = sum((x * x for x in block), Fraction(0))
        return math.sqrt(sq)
    return float(np.sqrt(np.square(block).sum()))


def _fmt_scalar(x, scalar: str):
    if scalar == "float":
        return float(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_dict(a: TensorSeries) -> dict:
    return {
        "d": a.d,
        "level": a.level,
        "scalar": a.scalar,
        "terms": [{"word": word_to_str(w), "coeff": _fmt_scalar(c, a.scalar)} for w, c in a.terms()],
    }


def from_dict(obj: dict) -> TensorSeries:
    scalar = obj.get("scalar", "rational")
    terms = []
    for t in obj["terms"]:
        c = t["coeff"]
        if scalar == "rational":
            if not isinstance(c, str):
                raise ValueError(f"rational coefficient must be a 'p/q' string, got {c!r}")
            c = Fraction(c)
        terms.append((t["word"], c))
    return from_terms(int(obj["d"]), int(obj["level"]), terms, scalar)


def to_json(a: TensorSeries, **kwargs) -> str:
    """Serialise to the JSON series format; zero coefficients are omitted."""
    return json.dumps(to_dict(a), **kwargs)


def from_json(text: str) -> TensorSeries:
    return from_dict(json.loads(text))
