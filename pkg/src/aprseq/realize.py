"""Witness matrices over the rationals for every attainable apr-word.

Words over {A, S} are grown one order at a time from a 3x3 seed by bordering
with a random vector; words ending in a run of N are finished with
rank-preserving borders.  Every step is recomputed exactly and resampled on
failure, so a returned matrix is always a verified witness.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Iterator

from .attain import check_char0, construct_no_A
from .exactfield import QQ, FieldSpec
from .minorseq import Letter, apr_sequence
from .symmatrix import SymMatrix, border, det, format_matrix, is_diagonal, ones, rank

NONSINGULAR_SEEDS = {
    "AA": [[0, 1, 1], [1, 0, 1], [1, 1, 0]],
    "AS": [[1, 1, 1], [1, 0, 1], [1, 1, 0]],
    "SA": [[1, 1, 0], [1, 1, 1], [0, 1, 1]],
    "SS": [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
}
SINGULAR_SEEDS = {
    "AA": [[2, 1, 1], [1, 0, 1], [1, 1, 0]],
    "AS": [[1, 1, 1], [1, 1, 1], [1, 1, 0]],
    "SA": [[1, 1, 0], [1, 2, 1], [0, 1, 1]],
    "SS": [[1, 1, 0], [1, 1, 0], [0, 0, 1]],
}

NONSINGULAR = "nonsingular"
SINGULAR = "singular"
RANK_PRESERVING = "rank_preserving"
BORDER_KINDS = (NONSINGULAR, SINGULAR, RANK_PRESERVING)


class RealizationRejected(ValueError):
    """The word is not attainable over a field of characteristic 0."""


class RetryExhausted(RuntimeError):
    def __init__(self, word: str, step: int, attempts: int):
        super().__init__(f"realizing {word}: border step to order {step} failed {attempts} times")
        self.word, self.step, self.attempts = word, step, attempts


@dataclass(frozen=True)
class RealizeOptions:
    seed: int = 1
    entry_bound: int = 100
    max_retries: int = 32

    def __post_init__(self):
        if self.entry_bound < 1 or self.max_retries < 1:
            raise ValueError("entry_bound and max_retries must be positive")


@dataclass
class Realization:
    word: str
    matrix: SymMatrix
    route: str
    retries: int = 0


def seed_3x3(pair: str, singular: bool = False, field: FieldSpec = QQ) -> SymMatrix:
    table = SINGULAR_SEEDS if singular else NONSINGULAR_SEEDS
    key = pair.strip().upper()
    if key not in table:
        raise ValueError(f"seed pair must be one of {sorted(table)}, got {pair!r}")
    return SymMatrix(table[key], field)


def border_probe(
    B: SymMatrix, next_letter, result_kind: str, rng: random.Random, bound: int = 100, drop: int = 1,
) -> SymMatrix:
    """Append one random row and column to B.

    The border is ``y = Bx`` with integer ``x``.  For an ``S`` letter in the
    nonsingular/singular modes ``x`` has coordinate ``drop`` (1-based) set to
    0, which puts ``y`` in the span of the other columns of B and makes the
    almost-principal block on rows 1..n and all columns but ``drop`` singular.
    The corner is ``x^T B x + 1`` (nonsingular) or ``x^T B x`` (singular and
    rank-preserving).
    """
    if result_kind not in BORDER_KINDS:
        raise ValueError(f"result_kind must be one of {BORDER_KINDS}")
    letter = Letter(next_letter)
    f = B.field
    if result_kind != RANK_PRESERVING:
        if letter == Letter.N:
            raise ValueError("an N letter only makes sense for a rank-preserving border")
        if det(B).is_zero():
            raise ValueError(f"{result_kind} border needs a nonsingular matrix")
    restrict = result_kind != RANK_PRESERVING and letter == Letter.S
    if restrict and B.n < 2:
        raise ValueError("an S border needs at least two columns")
    if restrict and not 1 <= drop <= B.n:
        raise ValueError(f"drop must lie in 1..{B.n}")
    while True:
        x = [rng.randint(-bound, bound) for _ in range(B.n)]
        if restrict:
            x[drop - 1] = 0
        if result_kind != SINGULAR or any(x):
            break
    x = [f.coerce(v) for v in x]
    y = B.matvec(x)
    t = B.quadratic_form(x)
    if result_kind == NONSINGULAR:
        t = f.add(t, f.one)
    return border(B, y, t)


def _grow(word: str, B: SymMatrix, target: str, kind: str, letter: str, rng, opts: RealizeOptions, stats: dict):
    for attempt in range(1, opts.max_retries + 1):
        # with the span of columns 2..n alone some S steps can never succeed
        # (columns 2 and 3 of the SA seed agree on rows 2, 3), so retries
        # rotate which column is left out of the span
        drop = (attempt - 1) % B.n + 1
        C = border_probe(B, letter, kind, rng, opts.entry_bound, drop=drop)
        if apr_sequence(C).word != target:
            continue
        if kind == NONSINGULAR and (det(C).is_zero() or is_diagonal(C)):
            continue
        if kind == SINGULAR and not det(C).is_zero():
            continue
        if kind == RANK_PRESERVING and rank(C) != rank(B):
            continue
        stats["retries"] += attempt - 1
        return C
    raise RetryExhausted(word, B.n + 1, opts.max_retries)


def _as_chain(word: str, singular: bool, rng, opts: RealizeOptions, stats: dict) -> SymMatrix:
    """Witness for a word over {A, S} of length >= 2."""
    if len(word) == 2:
        return seed_3x3(word, singular)
    B = seed_3x3(word[:2], singular=False)
    for m in range(3, len(word) + 1):
        kind = SINGULAR if singular and m == len(word) else NONSINGULAR
        B = _grow(word, B, word[:m], kind, word[m - 1], rng, opts, stats)
    return B


def realize_detailed(
    seq, field: FieldSpec = QQ, opts: RealizeOptions | None = None, rng: random.Random | None = None,
    singular: bool | None = None,
) -> Realization:
    """Like :func:`realize` but also reports the route taken and retries used."""
    opts = opts or RealizeOptions()
    word = str(seq).strip().upper()
    if not field.is_rational:
        raise ValueError("realization is implemented over the rationals only")
    verdict = check_char0(word)
    if not verdict:
        raise RealizationRejected(f"{word}: {verdict.reason}")
    rng = rng or random.Random(opts.seed)
    stats = {"retries": 0}
    n = len(word) + 1
    first_n = word.find("N")
    prefix = word if first_n < 0 else word[:first_n]

    if len(word) == 1:
        route = "length-1"
        B = SymMatrix([[0, 1], [1, 0]]) if (word == "A" and singular is False) else (
            ones(2) if word == "A" else SymMatrix([[0, 0], [0, 0]]))
    elif "A" not in word and not (singular is False and first_n < 0):
        route = "no-A"
        B = construct_no_A(word)
    elif prefix == "A":
        route = "J"
        B = ones(n)
    elif first_n < 0:
        route = "AS-chain"
        B = _as_chain(word, bool(singular), rng, opts, stats)
    else:
        route = "N-tail"
        B = _as_chain(prefix, True, rng, opts, stats)
        for m in range(len(prefix) + 1, len(word) + 1):
            B = _grow(word, B, word[:m], RANK_PRESERVING, "N", rng, opts, stats)

    got = apr_sequence(B).word
    if got != word:
        raise AssertionError(f"internal error: witness for {word} has apr {got}")
    return Realization(word, B, route, stats["retries"])


def realize(seq, field: FieldSpec = QQ, opts: RealizeOptions | None = None, singular: bool | None = None) -> SymMatrix:
    """A symmetric rational matrix whose apr-word is exactly ``seq``.

    ``singular`` picks a singular (True) or nonsingular (False) witness for
    words over {A, S}; other words have their singularity forced or fixed by
    the construction.
    """
    return realize_detailed(seq, field, opts, singular=singular).matrix


# -- sweeps -------------------------------------------------------------------


def all_words(length: int) -> Iterator[str]:
    for letters in product("ANS", repeat=length):
        yield "".join(letters)


def word_rng(seed: int, index: int) -> random.Random:
    """Per-word generator; string seeds hash deterministically (sha512)."""
    return random.Random(f"{seed}:{index}")


@dataclass
class SweepEntry:
    word: str
    status: str  # realized | rejected | failed
    reason: str = ""
    route: str = ""
    retries: int = 0
    matrix: str = ""


@dataclass
class SweepReport:
    n: int
    seed: int
    entries: list = field(default_factory=list)

    @property
    def counts(self) -> dict:
        out = {"realized": 0, "rejected": 0, "failed": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.counts["failed"] == 0

    @staticmethod
    def _entry_json(e: SweepEntry) -> dict:
        record = {k: v for k, v in asdict(e).items() if k != "word"}
        record["matrix"] = e.matrix.splitlines()
        return record

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "counts": self.counts,
            "words": {e.word: self._entry_json(e) for e in self.entries},
        }


def _sweep_one(n: int, index: int, word: str, opts: RealizeOptions) -> SweepEntry:
    verdict = check_char0(word)
    if not verdict:
        return SweepEntry(word, "rejected", verdict.reason)
    try:
        r = realize_detailed(word, QQ, opts, rng=word_rng(opts.seed, index))
    except RetryExhausted as exc:
        return SweepEntry(word, "failed", str(exc))
    return SweepEntry(word, "realized", verdict.reason, r.route, r.retries, format_matrix(r.matrix))


def _sweep_chunk(args):
    n, opts, items = args
    return [_sweep_one(n, i, w, opts) for i, w in items]


def realize_all(n: int, opts: RealizeOptions | None = None, workers: int = 1) -> SweepReport:
    """Resolve every word of length n-1: a verified witness or a rejection."""
    if not 2 <= n <= 8:
        raise ValueError("realize_all supports 2 <= n <= 8")
    opts = opts or RealizeOptions()
    items = list(enumerate(all_words(n - 1)))
    report = SweepReport(n, opts.seed)
    if workers <= 1:
        report.entries = _sweep_chunk((n, opts, items))
        return report
    from concurrent.futures import ProcessPoolExecutor

    chunks = [(n, opts, items[i::workers]) for i in range(workers)]
    with ProcessPoolExecutor(workers) as pool:
        results = [e for part in pool.map(_sweep_chunk, chunks) for e in part]
    order = {w: i for i, w in items}
    report.entries = sorted(results, key=lambda e: order[e.word])
    return report
