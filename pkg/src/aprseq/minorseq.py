"""Characteristic sequences built from principal and almost-principal minors.

For a symmetric matrix B of order n and 1 <= k:

* ``apr(B)`` has one letter per order k = 1..n-1 over the almost-principal
  minors ``det B[a + {i}, a + {j}]`` with ``|a| = k - 1`` and ``i != j``
  outside ``a``;
* ``epr(B)`` has one letter per order k = 1..n over the principal minors;
* ``qpr(B)`` has one letter per order k = 1..n over both kinds together.

A letter is ``A`` when every minor of that order is nonzero, ``N`` when all
vanish and ``S`` otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

from .symmatrix import IndexSet, MinorSpec, SymMatrix

PRINCIPAL = "principal"
ALMOST_PRINCIPAL = "almost-principal"
QUASI_PRINCIPAL = "quasi-principal"
MINOR_KINDS = (PRINCIPAL, ALMOST_PRINCIPAL, QUASI_PRINCIPAL)

APR, EPR, QPR = "APR", "EPR", "QPR"
_SEQ_MINORS = {APR: ALMOST_PRINCIPAL, EPR: PRINCIPAL, QPR: QUASI_PRINCIPAL}


class Letter(str, enum.Enum):
    A = "A"
    N = "N"
    S = "S"

    def __str__(self):
        return self.value


class AprUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class CharSeq:
    kind: str
    letters: tuple[Letter, ...]
    order_n: int

    def __post_init__(self):
        if self.kind not in _SEQ_MINORS:
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        want = self.order_n - 1 if self.kind == APR else self.order_n
        if self.kind == APR and self.order_n < 2:
            raise AprUndefinedError("the apr-sequence of a 1x1 matrix is undefined")
        if len(self.letters) != want:
            raise ValueError(f"{self.kind} word for order {self.order_n} needs {want} letters, got {len(self.letters)}")
        object.__setattr__(self, "letters", tuple(Letter(x) for x in self.letters))

    @classmethod
    def parse(cls, word: str, kind: str = APR) -> CharSeq:
        w = word.strip().upper()
        bad = set(w) - set("ANS")
        if bad or not w:
            raise ValueError(f"word {word!r} must be a nonempty string over A, N, S")
        n = len(w) + 1 if kind == APR else len(w)
        return cls(kind, tuple(Letter(c) for c in w), n)

    @property
    def word(self) -> str:
        return "".join(x.value for x in self.letters)

    def __str__(self):
        return self.word

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, k: int) -> Letter:
        """1-based letter access, matching the order of the minors it records."""
        if not 1 <= k <= len(self.letters):
            raise IndexError(k)
        return self.letters[k - 1]

    def to_json(self) -> dict:
        return {"kind": self.kind, "word": self.word, "order_n": self.order_n}


# -- enumeration ------------------------------------------------------------


def colex_masks(n: int, size: int) -> Iterator[int]:
    """All size-subsets of n bits, ascending as integers (colexicographic)."""
    if size == 0:
        yield 0
        return
    if size > n:
        return
    mask = (1 << size) - 1
    limit = 1 << n
    while mask < limit:
        yield mask
        low = mask & -mask
        ripple = mask + low
        mask = ripple | (((mask ^ ripple) >> 2) // low)


def _positions(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


@lru_cache(maxsize=None)
def principal_positions(n: int, k: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    return tuple((_positions(m), _positions(m)) for m in colex_masks(n, k))


@lru_cache(maxsize=None)
def almost_principal_positions(n: int, k: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """(rows, cols) 0-based positions with rows = a+{i}, cols = a+{j}, i < j.

    Only one of each transpose pair is listed: for symmetric B the two
    determinants coincide.
    """
    out = []
    full = (1 << n) - 1
    for alpha in colex_masks(n, k - 1):
        rest = _positions(full & ~alpha)
        for x, i in enumerate(rest):
            for j in rest[x + 1:]:
                out.append((_positions(alpha | 1 << i), _positions(alpha | 1 << j)))
    return tuple(out)


def _check_order(n: int, k: int, kind: str):
    if kind not in MINOR_KINDS:
        raise ValueError(f"unknown minor kind {kind!r}")
    top = n - 1 if kind == ALMOST_PRINCIPAL else n
    if not 1 <= k <= top:
        raise ValueError(f"order k={k} out of range 1..{top} for {kind} minors of an order-{n} matrix")


def _position_pairs(n: int, k: int, kind: str):
    _check_order(n, k, kind)
    if kind == PRINCIPAL:
        return principal_positions(n, k)
    if kind == ALMOST_PRINCIPAL:
        return almost_principal_positions(n, k)
    if k == n:
        return principal_positions(n, k)
    return principal_positions(n, k) + almost_principal_positions(n, k)


def almost_principal_count(n: int, k: int) -> int:
    """Number of almost-principal specs of order k, one per transpose pair."""
    return comb(n, k - 1) * comb(n - k + 1, 2)


def minors_of_order(n: int, k: int, kind: str) -> Iterator[MinorSpec]:
    """Each qualifying (rows, cols) exactly once.

    Principal specs come in colex order of their index set.  Almost-principal
    specs come by colex order of the common part, then (i, j) with i < j.
    Quasi-principal lists the principal specs first.
    """
    for rows, cols in _position_pairs(n, k, kind):
        yield MinorSpec(IndexSet.of(n, (r + 1 for r in rows)), IndexSet.of(n, (c + 1 for c in cols)))


# -- letters and sequences --------------------------------------------------


def letter(B: SymMatrix, k: int, kind: str, exhaustive: bool = False) -> Letter:
    """Classify the order-k minors of ``kind``.

    Stops as soon as one zero and one nonzero minor have been seen unless
    ``exhaustive`` is set.
    """
    seen_zero = seen_nonzero = False
    minor = B.minor_raw
    for rows, cols in _position_pairs(B.n, k, kind):
        if minor(rows, cols):
            seen_nonzero = True
        else:
            seen_zero = True
        if seen_zero and seen_nonzero and not exhaustive:
            return Letter.S
    if seen_zero and seen_nonzero:
        return Letter.S
    return Letter.A if seen_nonzero else Letter.N


def _sequence(B: SymMatrix, kind: str, exhaustive: bool) -> CharSeq:
    minors = _SEQ_MINORS[kind]
    top = B.n - 1 if kind == APR else B.n
    return CharSeq(kind, tuple(letter(B, k, minors, exhaustive) for k in range(1, top + 1)), B.n)


def apr_sequence(B: SymMatrix, exhaustive: bool = False) -> CharSeq:
    if B.n < 2:
        raise AprUndefinedError("the apr-sequence of a 1x1 matrix is undefined")
    return _sequence(B, APR, exhaustive)


def epr_sequence(B: SymMatrix, exhaustive: bool = False) -> CharSeq:
    return _sequence(B, EPR, exhaustive)


def qpr_sequence(B: SymMatrix, exhaustive: bool = False) -> CharSeq:
    return _sequence(B, QPR, exhaustive)


def ap_rank(B: SymMatrix) -> int:
    """Largest order of a nonsingular almost-principal submatrix (0 if none)."""
    for k in range(B.n - 1, 0, -1):
        for rows, cols in almost_principal_positions(B.n, k):
            if B.minor_raw(rows, cols):
                return k
    return 0


def principal_rank_witness(B: SymMatrix) -> IndexSet:
    """A largest index set g with det B[g] != 0; empty for the zero matrix."""
    for k in range(B.n, 0, -1):
        for rows, _ in principal_positions(B.n, k):
            if B.minor_raw(rows, rows):
                return IndexSet.of(B.n, (r + 1 for r in rows))
    return IndexSet.empty(B.n)


def last_nonzero_index(seq: CharSeq) -> int:
    """1-based index of the last A or S, or 0."""
    for k in range(len(seq.letters), 0, -1):
        if seq.letters[k - 1] != Letter.N:
            return k
    return 0
