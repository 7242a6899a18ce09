"""Which apr-words are attainable, and canonical matrices that attain them.

The classifiers here work on words only.  Matrix-side facts are exercised by
the property suites in :mod:`aprseq.verify`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Sequence

from .exactfield import QQ, FieldSpec, Scalar
from .minorseq import APR, CharSeq, apr_sequence
from .symmatrix import (
    SymMatrix,
    ak2,
    direct_sum,
    identity,
    l2,
    nonzero_part,
    ones,
    rank,
    zeros,
)


def _word(seq) -> str:
    if isinstance(seq, CharSeq):
        if seq.kind != APR:
            raise ValueError(f"expected an APR sequence, got {seq.kind}")
        return seq.word
    w = str(seq).strip().upper()
    if not w or set(w) - set("ANS"):
        raise ValueError(f"word {seq!r} must be a nonempty string over A, N, S")
    return w


@dataclass(frozen=True)
class PatternScan:
    has_NA: bool
    has_NS: bool
    has_NN: bool
    first_N: int  # 1-based, 0 if no N
    last_nonN: int  # 1-based, 0 if every letter is N
    contains_A: bool


def scan_patterns(seq) -> PatternScan:
    w = _word(seq)
    last = max((i + 1 for i, c in enumerate(w) if c != "N"), default=0)
    return PatternScan("NA" in w, "NS" in w, "NN" in w, w.find("N") + 1, last, "A" in w)


# -- sequences without A ------------------------------------------------------


class Form(str, enum.Enum):
    AllN = "AllN"
    SN_tail = "SN_tail"
    SNS_alternating = "SNS_alternating"
    SS_then_N = "SS_then_N"
    NotNoA = "NotNoA"


FORM_PATTERNS = {
    Form.AllN: "NN̄",
    Form.SN_tail: "SNN̄",
    Form.SNS_alternating: "SNS(NS)‾N̄",
    Form.SS_then_N: "SSS̄N̄",
}


@dataclass(frozen=True)
class SeqForm:
    """A no-A word's shape.

    ``params`` by form: AllN ``{"n_count"}``; SN_tail ``{"trailing_N"}``;
    SNS_alternating ``{"blocks", "trailing_N"}`` where ``blocks`` counts
    A(K_2) summands (at least 2); SS_then_N ``{"s_count", "trailing_N"}``.
    """

    form: Form
    params: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.form != Form.NotNoA

    @property
    def pattern(self) -> str | None:
        return FORM_PATTERNS.get(self.form)


_SNS_RE = re.compile(r"S((?:NS)+)(N*)")


def classify_no_A(seq) -> SeqForm:
    """Match a word over {S, N} against the four attainable shapes."""
    w = _word(seq)
    if "A" in w:
        raise ValueError(f"classify_no_A needs a word over S and N, got {w}")
    if set(w) == {"N"}:
        return SeqForm(Form.AllN, {"n_count": len(w)})
    m = re.fullmatch(r"SN(N*)", w)
    if m:
        return SeqForm(Form.SN_tail, {"trailing_N": len(w) - 1})
    m = _SNS_RE.fullmatch(w)
    if m:
        return SeqForm(Form.SNS_alternating, {"blocks": len(m.group(1)) // 2 + 1, "trailing_N": len(m.group(2))})
    m = re.fullmatch(r"(SS+)(N*)", w)
    if m:
        return SeqForm(Form.SS_then_N, {"s_count": len(m.group(1)), "trailing_N": len(m.group(2))})
    return SeqForm(Form.NotNoA)


# -- verdicts -----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    passes: bool
    reason: str
    clause: str | None = None

    def __bool__(self):
        return self.passes

    def to_json(self) -> dict:
        return {"passes": self.passes, "clause": self.clause, "reason": self.reason}


def _is_alternating(w: str) -> bool:
    m = _SNS_RE.fullmatch(w)
    return m is not None


def check_necessary(seq) -> Verdict:
    """Necessary condition for attainability over any field (length >= 2)."""
    w = _word(seq)
    if len(w) < 2:
        raise ValueError("the necessary condition concerns words of length at least 2")
    if _is_alternating(w):
        return Verdict(True, "word has the form SNS(NS)‾N̄", "alternating")
    scan = scan_patterns(w)
    if not scan.has_NA and not scan.has_NS:
        return Verdict(True, "neither NA nor NS occurs", "no-NA-NS")
    bad = "NA" if scan.has_NA else "NS"
    return Verdict(False, f"contains {bad} and is not of the form SNS(NS)‾N̄")


def check_char0(seq) -> Verdict:
    """Exact attainability over a field of characteristic 0."""
    w = _word(seq)
    if len(w) == 1:
        if w == "S":
            return Verdict(False, "length-1 S unattainable: a 2x2 matrix has a single almost-principal minor")
        return Verdict(True, f"length-1 {w} is attained by a 2x2 matrix", "length-1")
    return check_necessary(w)


# -- canonical families -------------------------------------------------------

FAMILIES = ("zero", "J_plus_O", "L2_plus_O", "AK2_blocks", "J2_plus_I", "J")


def canonical_matrix(family: str, field: FieldSpec = QQ, **params) -> SymMatrix:
    """Named matrices from the no-A constructions.

    * ``zero``: O_n (``n``)
    * ``J_plus_O``: J_{n-k} + O_k (``n``, ``k`` with 1 <= k <= n-1)
    * ``L2_plus_O``: L_2(a) + O_{n-2} (``n`` >= 2, ``a``)
    * ``AK2_blocks``: T^p_q, p copies of A(K_2) then O_q (``p`` >= 1, ``q`` >= 0)
    * ``J2_plus_I``: J_2 + I_{n-2} (``n`` >= 3)
    * ``J``: J_n (``n``)
    """
    def need(*names):
        missing = [x for x in names if x not in params]
        if missing:
            raise ValueError(f"family {family} needs parameters {missing}")

    if family == "zero":
        need("n")
        if params["n"] < 1:
            raise ValueError("n must be positive")
        return zeros(params["n"], field)
    if family == "J":
        need("n")
        if params["n"] < 1:
            raise ValueError("n must be positive")
        return ones(params["n"], field)
    if family == "J_plus_O":
        need("n", "k")
        n, k = params["n"], params["k"]
        if not 1 <= k <= n - 1:
            raise ValueError(f"J_plus_O needs 1 <= k <= n-1, got n={n}, k={k}")
        return direct_sum(ones(n - k, field), zeros(k, field))
    if family == "L2_plus_O":
        need("n", "a")
        n = params["n"]
        if n < 2:
            raise ValueError("L2_plus_O needs n >= 2")
        return direct_sum(l2(params["a"], field), zeros(n - 2, field))
    if family == "AK2_blocks":
        need("p", "q")
        p, q = params["p"], params["q"]
        if p < 1 or q < 0:
            raise ValueError(f"AK2_blocks needs p >= 1 and q >= 0, got p={p}, q={q}")
        return direct_sum(*([ak2(field)] * p), zeros(q, field))
    if family == "J2_plus_I":
        need("n")
        n = params["n"]
        if n < 3:
            raise ValueError("J2_plus_I needs n >= 3")
        return direct_sum(ones(2, field), identity(n - 2, field))
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")


def construct_no_A(seq, field: FieldSpec = QQ) -> SymMatrix:
    """A 0/1 matrix attaining a no-A word; works over every field."""
    w = _word(seq)
    form = classify_no_A(w)
    n = len(w) + 1
    if form.form == Form.AllN:
        return zeros(n, field)
    if form.form == Form.SN_tail:
        return canonical_matrix("J_plus_O", field, n=n, k=1)
    if form.form == Form.SNS_alternating:
        return canonical_matrix("AK2_blocks", field, p=form.params["blocks"], q=form.params["trailing_N"])
    if form.form == Form.SS_then_N:
        s, q = form.params["s_count"], form.params["trailing_N"]
        # J_2 + I realizes the S-run; each appended zero row turns into one trailing N
        return direct_sum(ones(2, field), identity(s - 1, field), zeros(q, field))
    raise ValueError(f"{w} is not attainable over any field (no no-A form matches)")


# -- structure behind words that begin SN --------------------------------------


class Case(str, enum.Enum):
    ScaledJ_plus_O = "ScaledJ_plus_O"
    ScaledL2_plus_O = "ScaledL2_plus_O"
    MatchingBlocks_Tpq = "MatchingBlocks_Tpq"
    NoneCase = "None"


@dataclass(frozen=True)
class StructureReport:
    """How a matrix whose apr-word begins SN reduces to a canonical form.

    ``order`` and ``scale`` describe a generalized permutation P: position t of
    P^T B P is original index ``order[t-1]`` multiplied by ``scale[t-1]``, so
    ``c * scale[s] * scale[t] * B[order[s], order[t]]`` is the (s, t) entry of
    the canonical matrix.
    """

    case: Case
    apr: str | None
    k: int = 0
    p: int = 0
    q: int = 0
    a: Scalar | None = None
    c: Scalar | None = None
    order: tuple[int, ...] = ()
    scale: tuple[Scalar, ...] = ()

    def canonical(self, field: FieldSpec) -> SymMatrix | None:
        n = len(self.order)
        if self.case == Case.ScaledJ_plus_O:
            return canonical_matrix("J_plus_O", field, n=n, k=self.k)
        if self.case == Case.ScaledL2_plus_O:
            return canonical_matrix("L2_plus_O", field, n=n, a=self.a)
        if self.case == Case.MatchingBlocks_Tpq:
            return canonical_matrix("AK2_blocks", field, p=self.p, q=self.q)
        return None

    def transform(self, B: SymMatrix) -> SymMatrix:
        """c P^T B P for the recorded P and c."""
        f = B.field
        c = f.coerce(self.c)
        d = [f.coerce(x) for x in self.scale]
        idx = [i - 1 for i in self.order]
        grid = [
            [f.mul(f.mul(c, f.mul(d[s], d[t])), B.rows[idx[s]][idx[t]]) for t in range(len(idx))]
            for s in range(len(idx))
        ]
        return SymMatrix(grid, f)

    def verify(self, B: SymMatrix) -> bool:
        target = self.canonical(B.field)
        return target is not None and self.transform(B) == target


def recognize_SN(B: SymMatrix) -> StructureReport:
    """Identify which canonical reduction applies to a matrix with apr starting SN.

    Cases are tried in the order J-form, L_2-form, matching blocks; the first
    that verifies wins.  Returns ``Case.NoneCase`` when the apr-word does not
    begin with SN (or, which would contradict the classification, when no
    case verifies).
    """
    if B.n < 3:
        return StructureReport(Case.NoneCase, apr_sequence(B).word if B.n >= 2 else None)
    word = apr_sequence(B).word
    if not word.startswith("SN"):
        return StructureReport(Case.NoneCase, word)
    f = B.field
    one = Scalar(f, f.one)
    core, keep = nonzero_part(B)
    active = keep.members
    zero_rows = tuple(i for i in range(1, B.n + 1) if i not in keep)
    order = tuple(active) + zero_rows
    t = len(active)
    k = B.n - t

    def pad(scale_active):
        return tuple(scale_active) + (one,) * k

    # statement 1: rank one with every entry of the nonzero part nonzero
    if t >= 2 and k >= 1 and rank(core) == 1 and all(v for row in core.rows for v in row):
        b11 = core.rows[0][0]
        scale = [Scalar(f, f.inv(core.rows[i][0])) for i in range(t)]
        rep = StructureReport(Case.ScaledJ_plus_O, word, k=k, c=Scalar(f, b11), order=order, scale=pad(scale))
        if rep.verify(B):
            return rep

    # statement 2: a 2x2 block with nonzero off-diagonal entry, not both diagonals zero
    if t == 2:
        (x, y), (_, z) = core.rows
        if y and (x or z):
            first, second = (active[0], active[1]) if x else (active[1], active[0])
            d11, d22 = (x, z) if x else (z, x)
            c = f.inv(d11)
            d = f.div(d11, y)
            a = f.div(f.mul(d11, d22), f.mul(y, y))
            rep = StructureReport(
                Case.ScaledL2_plus_O,
                word,
                k=k,
                a=Scalar(f, a),
                c=Scalar(f, c),
                order=(first, second) + zero_rows,
                scale=pad([one, Scalar(f, d)]),
            )
            if rep.verify(B):
                return rep

    # statement 3: zero diagonal and a perfect matching of nonzero off-diagonal entries
    if t % 2 == 0 and t >= 2 and all(not core.rows[i][i] for i in range(t)):
        partner = {}
        ok = True
        for i in range(t):
            nz = [j for j in range(t) if j != i and core.rows[i][j]]
            if len(nz) != 1:
                ok = False
                break
            partner[i] = nz[0]
        if ok:
            pair_order, scale = [], []
            for i in range(t):
                j = partner[i]
                if i < j:
                    pair_order += [active[i], active[j]]
                    scale += [one, Scalar(f, f.inv(core.rows[i][j]))]
            rep = StructureReport(
                Case.MatchingBlocks_Tpq,
                word,
                k=k,
                p=t // 2,
                q=k,
                c=one,
                order=tuple(pair_order) + zero_rows,
                scale=pad(scale),
            )
            if rep.verify(B):
                return rep
    return StructureReport(Case.NoneCase, word)


def generalized_permutation_image(B: SymMatrix, order: Sequence[int], scale: Sequence, c=1) -> SymMatrix:
    """c P^T B P with P given as in :class:`StructureReport`."""
    f = B.field
    rep = StructureReport(Case.NoneCase, None, c=Scalar(f, f.coerce(c)), order=tuple(order),
                          scale=tuple(Scalar(f, f.coerce(x)) for x in scale))
    return rep.transform(B)
