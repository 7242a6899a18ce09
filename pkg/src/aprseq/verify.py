"""Randomized property suites over symmetric rational matrices.

Each suite pairs a matrix generator with a check.  A check returns ``None``
when its hypothesis does not apply, ``""`` on success and a message on
failure.  Suites draw from their own generator seeded by (seed, suite name),
so running one suite alone reproduces its part of a full run.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from .attain import Case, canonical_matrix, check_char0, generalized_permutation_image, recognize_SN
from .minorseq import (
    ap_rank,
    almost_principal_positions,
    apr_sequence,
    epr_sequence,
    last_nonzero_index,
    principal_rank_witness,
    qpr_sequence,
)
from .symmatrix import (
    IndexSet,
    SymMatrix,
    SingularMatrixError,
    ak2,
    border,
    complement_labels,
    det,
    direct_sum,
    format_matrix,
    identity,
    inverse,
    is_diagonal,
    minor_det,
    nonzero_part,
    ones,
    rank,
    schur_complement,
    solve_in_column_space,
    structure_flags,
    submatrix_rank,
    zeros,
)

STYLES = ("dense", "sparse", "lowrank", "generic-lowrank", "blocks", "zero-rows", "canonical", "fraction")


# -- random matrices ------------------------------------------------------------


def _grid(n: int, entry: Callable[[], object]) -> list[list]:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = entry()
    return g


def _permute_and_scale(rng: random.Random, B: SymMatrix) -> SymMatrix:
    order = list(range(1, B.n + 1))
    rng.shuffle(order)
    scale = [rng.choice((1, -1, 2, -3)) for _ in range(B.n)]
    return generalized_permutation_image(B, order, scale, rng.choice((1, -1, 2)))


def _random_block(rng: random.Random, size: int) -> SymMatrix:
    kind = rng.choice(("J", "O", "I", "AK2", "random"))
    if kind == "AK2" and size == 2:
        return ak2()
    if kind == "J":
        return ones(size)
    if kind == "O":
        return zeros(size)
    if kind == "I":
        return identity(size)
    return SymMatrix(_grid(size, lambda: rng.randint(-2, 2)))


def random_symmetric(rng: random.Random, n: int, style: str | None = None) -> SymMatrix:
    """A random symmetric rational matrix of order n in one of :data:`STYLES`."""
    style = style or rng.choice(STYLES)
    if style == "dense":
        return SymMatrix(_grid(n, lambda: rng.randint(-5, 5)))
    if style == "sparse":
        return SymMatrix(_grid(n, lambda: rng.choice((0, 0, 0, 1, -1, 2))))
    if style in ("lowrank", "generic-lowrank"):
        r = rng.randint(0, n)
        spread = 2 if style == "lowrank" else 9
        X = [[rng.randint(-spread, spread) for _ in range(r)] for _ in range(n)]
        d = [rng.choice((1, -1, 2)) for _ in range(r)]
        return SymMatrix([[sum(X[i][t] * d[t] * X[j][t] for t in range(r)) for j in range(n)] for i in range(n)])
    if style == "blocks":
        sizes = []
        left = n
        while left:
            s = rng.randint(1, min(3, left))
            sizes.append(s)
            left -= s
        return _permute_and_scale(rng, direct_sum(*(_random_block(rng, s) for s in sizes)))
    if style == "zero-rows":
        B = random_symmetric(rng, n, rng.choice(("dense", "sparse", "lowrank")))
        dead = set(rng.sample(range(n), rng.randint(1, max(1, n - 1))))
        return SymMatrix([[0 if i in dead or j in dead else B.rows[i][j] for j in range(n)] for i in range(n)])
    if style == "canonical":
        return _permute_and_scale(rng, random_canonical(rng, n))
    if style == "fraction":
        return SymMatrix(_grid(n, lambda: Fraction(rng.randint(-4, 4), rng.randint(1, 3))))
    raise ValueError(f"unknown style {style!r}")


def random_canonical(rng: random.Random, n: int) -> SymMatrix:
    """One of the no-A families of order n; J_1 for n = 1."""
    if n < 2:
        return ones(n)
    options = ["J_plus_O", "L2_plus_O", "J"]
    if n >= 3:
        options.append("J2_plus_I")
    options.append("AK2_blocks")
    family = rng.choice(options)
    if family == "J_plus_O":
        return canonical_matrix(family, n=n, k=rng.randint(1, n - 1))
    if family == "L2_plus_O":
        return canonical_matrix(family, n=n, a=Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
    if family == "AK2_blocks":
        p = rng.randint(1, n // 2)
        return canonical_matrix(family, p=p, q=n - 2 * p)
    return canonical_matrix(family, n=n)


def _draw_until(rng, n_min, n_max, accept, style=None, tries: int = 200) -> SymMatrix:
    for _ in range(tries):
        B = random_symmetric(rng, rng.randint(n_min, n_max), style)
        if accept(B):
            return B
    raise RuntimeError("generator could not meet the suite hypothesis")


def _nonsingular(B: SymMatrix) -> bool:
    return not det(B).is_zero()


# -- checks -------------------------------------------------------------------


def _after(word: str, pattern: str) -> str | None:
    i = word.find(pattern)
    return None if i < 0 else word[i + len(pattern):]


def check_nn_tail(B, rng):
    w = apr_sequence(B).word
    tail = _after(w, "NN")
    if tail is None:
        return None
    return "" if set(tail) <= {"N"} else f"apr {w} has a non-N letter after NN"


def check_no_na(B, rng):
    w = apr_sequence(B).word
    i = w.find("N")
    return f"apr {w} contains NA" if i >= 0 and "A" in w[i:] else ""


def check_a_forces_n_tail(B, rng):
    w = apr_sequence(B).word
    if "A" not in w or "N" not in w:
        return None
    tail = w[w.find("N"):]
    return "" if set(tail) <= {"N"} else f"apr {w} has an A and a non-N letter after its first N"


def check_inverse(B, rng):
    w = apr_sequence(B).word
    wi = apr_sequence(inverse(B)).word
    return "" if wi == w[::-1] else f"apr {w}, apr of inverse {wi}"


def check_append(B, rng):
    w = apr_sequence(B).word
    got = apr_sequence(direct_sum(B, zeros(1))).word
    want = "".join(c if c == "N" else "S" for c in w) + "N"
    return "" if got == want else f"apr {w}: appending a zero row gave {got}, expected {want}"


def check_inheritance(B, rng):
    n = B.n
    w = apr_sequence(B).word
    for m in range(6, n + 1):
        subs = [B.principal_submatrix(IndexSet.of(n, g)) for g in combinations(range(1, n + 1), m)]
        words = [apr_sequence(C).word for C in subs]
        for k in range(1, m):
            letter = w[k - 1]
            if letter in "AN":
                for g, cw in zip(combinations(range(1, n + 1), m), words):
                    if cw[k - 1] != letter:
                        return f"apr {w}: letter {k} is {letter} but submatrix on {g} has {cw}"
            elif k <= m - 5 and not any(cw[k - 1] == "S" for cw in words):
                return f"apr {w}: letter {k} is S but no {m}x{m} principal submatrix keeps it"
    return ""


def _random_gamma(rng, B: SymMatrix) -> IndexSet | None:
    r = rank(B)
    if r == 0:
        return None
    size = rng.randint(1, r)
    for _ in range(20):
        g = IndexSet.of(B.n, rng.sample(range(1, B.n + 1), size))
        if not minor_det(B, g, g).is_zero():
            return g
    return principal_rank_witness(B)


def check_schur(B, rng):
    g = _random_gamma(rng, B)
    if g is None:
        return None
    r, k = rank(B), len(g)
    C = schur_complement(B, g)
    labels = complement_labels(B.n, g)
    if C.n != B.n - k:
        return f"Schur complement on {g} has order {C.n}"
    if rank(C) != r - k:
        return f"rank of Schur complement on {g} is {rank(C)}, expected {r - k}"
    dg = minor_det(B, g, g)
    for _ in range(12):
        if C.n == 0:
            break
        s = rng.randint(1, C.n)
        a = sorted(rng.sample(range(C.n), s))
        b = sorted(rng.sample(range(C.n), s))
        lhs = C.minor_raw(a, b)
        # the quotient identity is exact with the gamma rows and columns first
        rows = list(g.positions) + [labels[i] - 1 for i in a]
        cols = list(g.positions) + [labels[i] - 1 for i in b]
        if lhs != B.field.div(B.minor_raw(rows, cols), dg.value):
            return f"minor of Schur complement on {g} at rows {a} cols {b} disagrees"
    if C.n >= 2:
        w = apr_sequence(B).word
        wc = apr_sequence(C).word
        for j in range(1, C.n):
            if j + k <= len(w) and w[j + k - 1] in "AN" and wc[j - 1] != w[j + k - 1]:
                return f"apr {w}, Schur complement on {g} has {wc}: letter {j} should be {w[j + k - 1]}"
    return ""


def check_qpr_rank(B, rng):
    q = qpr_sequence(B)
    return "" if last_nonzero_index(q) == rank(B) else f"qpr {q.word} but rank {rank(B)}"


def check_qpr_n_tail(B, rng):
    q = qpr_sequence(B).word
    i = q.find("N")
    return "" if i < 0 or set(q[i:]) <= {"N"} else f"qpr {q} has a non-N letter after an N"


def check_aprank_bounds(B, rng):
    apr = apr_sequence(B)
    ar, r = ap_rank(B), rank(B)
    if ar != last_nonzero_index(apr):
        return f"ap-rank {ar} but apr {apr.word}"
    if ar > r:
        return f"ap-rank {ar} exceeds rank {r}"
    if (ar == 0) != is_diagonal(B):
        return f"ap-rank {ar} disagrees with diagonality"
    if is_diagonal(B):
        return ""
    if not r - 1 <= ar <= r:
        return f"ap-rank {ar} outside [rank-1, rank] with rank {r}"
    core, _ = nonzero_part(B)
    core_singular = det(core).is_zero()
    if (ar == r) != core_singular:
        return f"ap-rank {ar}, rank {r}, nonzero part singular={core_singular}"
    if _nonsingular(B) and ar != B.n - 1:
        return f"nonsingular non-diagonal matrix has ap-rank {ar}"
    return ""


def check_aprank_singular(B, rng):
    flags = structure_flags(B)
    if flags.is_diagonal or flags.has_zero_row or _nonsingular(B):
        return None
    return "" if ap_rank(B) == rank(B) else f"ap-rank {ap_rank(B)} differs from rank {rank(B)}"


def check_zero_row(B, rng):
    w = apr_sequence(B).word
    if not w.endswith("N") or rank(B) != B.n - 1:
        return None
    return "" if structure_flags(B).has_zero_row else f"apr {w}, rank n-1 and no zero row"


def check_principal_rank(B, rng):
    g = principal_rank_witness(B)
    r = rank(B)
    if len(g) != r:
        return f"largest nonsingular principal submatrix has order {len(g)}, rank is {r}"
    return "" if r == 0 or not minor_det(B, g, g).is_zero() else "witness block is singular"


def check_first_letter(B, rng):
    w = apr_sequence(B).word
    if (w[0] == "N") != is_diagonal(B):
        return f"apr {w} but diagonal={is_diagonal(B)}"
    if w[0] == "N" and set(w) != {"N"}:
        return f"apr {w} starts with N but is not all N"
    if w[0] != "N" and w.endswith("N") and _nonsingular(B):
        return f"apr {w} ends with N but the matrix is nonsingular"
    return ""


def check_necessary(B, rng):
    w = apr_sequence(B).word
    v = check_char0(w)
    return "" if v else f"apr {w} rejected: {v.reason}"


def check_sn_structure(B, rng):
    w = apr_sequence(B).word
    if not w.startswith("SN"):
        return None
    rep = recognize_SN(B)
    if rep.case == Case.NoneCase:
        return f"apr {w} but no canonical reduction found"
    canon = rep.canonical(B.field)
    if not rep.verify(B) or apr_sequence(canon).word != w:
        return f"reduction {rep.case.value} does not reproduce apr {w}"
    return ""


def check_deletion_rank(B, rng):
    n = B.n
    i, j = rng.randint(1, n), rng.randint(1, n)
    rows = IndexSet.full(n) - IndexSet.of(n, [i])
    cols = IndexSet.full(n) - IndexSet.of(n, [j])
    got = submatrix_rank(B, rows, cols)
    return "" if got >= n - 2 else f"deleting row {i} and column {j} leaves rank {got}"


def check_bordering(B, rng):
    f = B.field
    r = rank(B)
    mode = rng.choice(("outside", "offset", "same"))
    x = [rng.randint(-3, 3) for _ in range(B.n)]
    if mode == "outside":
        y = [rng.randint(-3, 3) for _ in range(B.n)]
        if solve_in_column_space(B, y) is not None:
            return None
        return "" if rank(border(B, y, rng.randint(-3, 3))) == r + 2 else "y outside the column space did not add 2"
    y = B.matvec([f.coerce(v) for v in x])
    q = B.quadratic_form([f.coerce(v) for v in x])
    if mode == "offset":
        return "" if rank(border(B, y, q + rng.choice((1, -1, 2)))) == r + 1 else "t != x^T B x did not add 1"
    return "" if rank(border(B, y, q)) == r else "t = x^T B x changed the rank"


def check_apr_sequence_letters(B, rng):
    a = apr_sequence(B).word
    e = epr_sequence(B).word
    q = qpr_sequence(B).word
    for k in range(B.n):
        if k == B.n - 1:
            want = e[k]
        else:
            want = e[k] if e[k] == a[k] and e[k] in "AN" else "S"
        if q[k] != want:
            return f"apr {a}, epr {e}, qpr {q} disagree at letter {k + 1}"
    # one almost-principal minor per transpose pair suffices
    for rows, cols in almost_principal_positions(B.n, rng.randint(1, B.n - 1)):
        if B.minor_raw(rows, cols) != B.minor_raw(cols, rows):
            return f"transposed almost-principal minors differ at {rows}, {cols}"
    return ""


# -- suite table ----------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    name: str
    description: str
    draw: Callable[[random.Random, int], SymMatrix]
    check: Callable[[SymMatrix, random.Random], str | None]


def _any(n_min=2):
    return lambda rng, n_max: random_symmetric(rng, rng.randint(n_min, max(n_min, n_max)))


def _tail_draw(rng, n_max):
    style = rng.choice(("generic-lowrank", "zero-rows", "canonical", "blocks", "lowrank"))
    return random_symmetric(rng, rng.randint(3, max(3, n_max)), style)


def _nonsingular_draw(rng, n_max):
    return _draw_until(rng, 2, n_max, _nonsingular)


def _singular_no_zero_row(rng, n_max):
    def ok(B):
        flags = structure_flags(B)
        return not flags.is_diagonal and not flags.has_zero_row and not _nonsingular(B)

    return _draw_until(rng, 2, n_max, ok, style=rng.choice(("lowrank", "blocks", "canonical", "sparse")))


def _rank_deficient_draw(rng, n_max):
    # half the draws pad a nonsingular block with a zero row, which meets the hypothesis
    if rng.random() < 0.5:
        B = _draw_until(rng, 1, max(1, n_max - 1), _nonsingular)
        return _permute_and_scale(rng, direct_sum(B, zeros(1)))
    return random_symmetric(rng, rng.randint(2, n_max))


def _inheritance_draw(rng, n_max):
    return random_symmetric(rng, rng.choice((6, 7)), rng.choice(("dense", "sparse", "lowrank", "blocks", "zero-rows")))


def _sn_draw(rng, n_max):
    if rng.random() < 0.3:
        return random_symmetric(rng, rng.randint(3, n_max))
    n = rng.randint(3, max(3, n_max))
    family = rng.choice(("J_plus_O", "L2_plus_O", "AK2_blocks"))
    if family == "J_plus_O":
        B = canonical_matrix(family, n=n, k=rng.randint(1, n - 2))
    elif family == "L2_plus_O":
        B = canonical_matrix(family, n=n, a=rng.randint(-3, 3))
    else:
        p = rng.randint(1, n // 2)
        B = canonical_matrix(family, p=p, q=n - 2 * p)
    return _permute_and_scale(rng, B)


SUITES = {
    s.name: s
    for s in (
        Suite("nn-theorem", "after NN every letter of apr is N", _tail_draw, check_nn_tail),
        Suite("na-free", "NA is never a subsequence of apr", _any(3), check_no_na),
        Suite("a-forces-n-tail", "an apr with an A is all N after its first N", _tail_draw, check_a_forces_n_tail),
        Suite("inverse", "apr of the inverse is apr reversed", _nonsingular_draw, check_inverse),
        Suite("append", "appending a zero row maps A,S to S and adds N", _any(2), check_append),
        Suite("inheritance", "N and A letters pass to principal submatrices of order >= 6; S survives in one when k <= m-5",
              _inheritance_draw, check_inheritance),
        Suite("schur", "Schur complement minors, rank drop, and inherited A/N letters", _any(2), check_schur),
        Suite("qpr-rank", "rank is the index of the last A or S of qpr", _any(1), check_qpr_rank),
        Suite("qpr-n-tail", "qpr is all N after its first N", _any(1), check_qpr_n_tail),
        Suite("aprank-bounds", "rank-1 <= ap-rank <= rank with equality iff the nonzero part is singular",
              _any(2), check_aprank_bounds),
        Suite("aprank-singular", "ap-rank equals rank for non-diagonal singular matrices without zero rows",
              _singular_no_zero_row, check_aprank_singular),
        Suite("zero-row", "apr ending N with rank n-1 forces a zero row", _rank_deficient_draw, check_zero_row),
        Suite("principal-rank", "rank is the order of a largest nonsingular principal submatrix",
              _any(1), check_principal_rank),
        Suite("first-letter", "a leading N means diagonal; A...N and S...N mean singular", _any(2), check_first_letter),
        Suite("necessary", "every observed apr passes the characteristic-0 test", _any(2), check_necessary),
        Suite("sn-structure", "matrices with apr starting SN reduce to a canonical family", _sn_draw, check_sn_structure),
        Suite("deletion-rank", "deleting a row and a column of a nonsingular matrix loses at most one rank",
              _nonsingular_draw, check_deletion_rank),
        Suite("bordering", "bordered rank grows by 2, 1 or 0 as y and t dictate", _any(1), check_bordering),
        Suite("qpr-consistency", "qpr letters agree with epr and apr letters", _any(2), check_apr_sequence_letters),
    )
}


# -- running ----------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    trials: int
    applicable: int = 0
    draws: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.applicable >= self.trials

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "trials": self.trials, "applicable": self.applicable,
                "draws": self.draws, "failures": self.failures}


def run_suite(
    name: str, trials: int = 1000, n_max: int = 7, seed: int = 1, max_failures: int = 3, max_draws: int | None = None,
) -> SuiteResult:
    """Check ``trials`` matrices that meet the suite hypothesis.

    Draws stop after ``max_draws`` (default 50 per trial) even if fewer
    matrices qualified; ``applicable`` records how many did.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    suite = SUITES[name]
    rng = random.Random(f"{seed}:{name}")
    result = SuiteResult(name, trials)
    limit = max_draws if max_draws is not None else 50 * trials
    while result.applicable < trials and result.draws < limit:
        B = suite.draw(rng, n_max)
        result.draws += 1
        try:
            msg = suite.check(B, rng)
        except (ArithmeticError, SingularMatrixError, ValueError) as exc:
            msg = f"{type(exc).__name__}: {exc}"
        if msg is None:
            continue
        result.applicable += 1
        if msg and len(result.failures) < max_failures:
            result.failures.append({"draw": result.draws, "detail": msg, "matrix": format_matrix(B).splitlines()})
    return result


def run_suites(names=None, trials: int = 1000, n_max: int = 7, seed: int = 1) -> list[SuiteResult]:
    names = list(SUITES) if names in (None, "all", ["all"]) else list(names)
    return [run_suite(n, trials, n_max, seed) for n in names]
