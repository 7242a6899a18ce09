"""Immutable symmetric matrices over an exact field.

Indices in the public API are 1-based (index ``i`` is bit ``i - 1`` of an
:class:`IndexSet` mask).  Raw storage is a tuple of row tuples holding the
field's raw values; see :mod:`aprseq.exactfield`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .exactfield import QQ, FieldSpec, Scalar, parse_raw

PRINCIPAL = "principal"
ALMOST_PRINCIPAL = "almost-principal"
OTHER = "other"

COFACTOR_MAX_ORDER = 8


class SymmetryError(ValueError):
    def __init__(self, i: int, j: int):
        super().__init__(f"matrix is not symmetric: entry ({i},{j}) differs from ({j},{i})")
        self.i, self.j = i, j


class SingularMatrixError(ValueError):
    pass


class MatrixFormatError(ValueError):
    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line, self.column = line, column


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_members(mask: int) -> tuple[int, ...]:
    """0-based positions of the set bits, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True, order=True)
class IndexSet:
    """A subset of {1, ..., n} stored as a bitmask."""

    n: int
    mask: int

    def __post_init__(self):
        if self.n < 0 or self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#b} is not a subset of 1..{self.n}")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> IndexSet:
        mask = 0
        for i in members:
            if not 1 <= i <= n:
                raise ValueError(f"index {i} outside 1..{n}")
            mask |= 1 << (i - 1)
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> IndexSet:
        return cls(n, (1 << n) - 1)

    @classmethod
    def empty(cls, n: int) -> IndexSet:
        return cls(n, 0)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in mask_members(self.mask))

    @property
    def positions(self) -> tuple[int, ...]:
        return mask_members(self.mask)

    def __len__(self):
        return popcount(self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i) -> bool:
        return 1 <= i <= self.n and bool(self.mask >> (i - 1) & 1)

    def _check(self, other: IndexSet):
        if other.n != self.n:
            raise ValueError("index sets over different universes")

    def __or__(self, other: IndexSet) -> IndexSet:
        self._check(other)
        return IndexSet(self.n, self.mask | other.mask)

    def __and__(self, other: IndexSet) -> IndexSet:
        self._check(other)
        return IndexSet(self.n, self.mask & other.mask)

    def __sub__(self, other: IndexSet) -> IndexSet:
        self._check(other)
        return IndexSet(self.n, self.mask & ~other.mask)

    def complement(self) -> IndexSet:
        return IndexSet(self.n, ((1 << self.n) - 1) & ~self.mask)

    def __str__(self):
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class MinorSpec:
    rows: IndexSet
    cols: IndexSet

    def __post_init__(self):
        if self.rows.n != self.cols.n:
            raise ValueError("rows and columns index different universes")
        if len(self.rows) != len(self.cols):
            raise ValueError(f"|rows| = {len(self.rows)} but |cols| = {len(self.cols)}")

    @property
    def order(self) -> int:
        return len(self.rows)

    @property
    def kind(self) -> str:
        if self.rows.mask == self.cols.mask:
            return PRINCIPAL
        if popcount(self.rows.mask & self.cols.mask) == self.order - 1:
            return ALMOST_PRINCIPAL
        return OTHER

    def transpose(self) -> MinorSpec:
        return MinorSpec(self.cols, self.rows)

    def __str__(self):
        return f"({self.rows},{self.cols})"


# -- determinant kernels on raw square grids (lists of lists, mutated) ----


def det_int(a: list[list[int]]) -> int:
    """Fraction-free Bareiss elimination on an integer grid."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    sign = 1
    prev = 1
    for k in range(n - 1):
        rowk = a[k]
        if rowk[k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    rowk = a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = rowk[k]
        for i in range(k + 1, n):
            ai = a[i]
            aik = ai[k]
            if aik:
                for j in range(k + 1, n):
                    ai[j] = (ai[j] * akk - aik * rowk[j]) // prev
            else:
                for j in range(k + 1, n):
                    ai[j] = ai[j] * akk // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det_mod(a: list[list[int]], p: int) -> int:
    """Gaussian elimination modulo a prime."""
    n = len(a)
    det = 1
    for k in range(n):
        piv = None
        for r in range(k, n):
            if a[r][k] % p:
                piv = r
                break
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        rowk = a[k]
        akk = rowk[k] % p
        det = det * akk % p
        inv = pow(akk, -1, p)
        for i in range(k + 1, n):
            ai = a[i]
            f = ai[k] * inv % p
            if f:
                for j in range(k + 1, n):
                    ai[j] = (ai[j] - f * rowk[j]) % p
    return det % p


def det_fraction(a: list[list[Fraction]]) -> Fraction:
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = None
        for r in range(k, n):
            if a[r][k]:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        rowk = a[k]
        akk = rowk[k]
        det *= akk
        for i in range(k + 1, n):
            ai = a[i]
            f = ai[k] / akk
            if f:
                for j in range(k + 1, n):
                    ai[j] -= f * rowk[j]
    return det


def det_laplace(a: Sequence[Sequence], field: FieldSpec = QQ):
    """Cofactor expansion along the first row; factorial cost."""
    n = len(a)
    if n > COFACTOR_MAX_ORDER:
        raise ValueError(f"cofactor expansion limited to order {COFACTOR_MAX_ORDER}, got {n}")
    if n == 0:
        return field.one

    def expand(rows: tuple[int, ...], cols: tuple[int, ...]):
        if len(rows) == 1:
            return a[rows[0]][cols[0]]
        r, rest = rows[0], rows[1:]
        total = 0
        for idx, c in enumerate(cols):
            entry = a[r][c]
            if entry:
                sub = expand(rest, cols[:idx] + cols[idx + 1:])
                total = total + entry * sub if idx % 2 == 0 else total - entry * sub
        return total

    return field.coerce(expand(tuple(range(n)), tuple(range(n))))


# -- row reduction over a field -------------------------------------------


def rref(grid: list[list], field: FieldSpec) -> tuple[list[list], list[int]]:
    """Reduced row echelon form in place; returns (grid, pivot columns)."""
    rows = len(grid)
    cols = len(grid[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if grid[i][c]:
                piv = i
                break
        if piv is None:
            continue
        grid[r], grid[piv] = grid[piv], grid[r]
        inv = field.inv(grid[r][c])
        grid[r] = [field.mul(v, inv) for v in grid[r]]
        rowr = grid[r]
        for i in range(rows):
            if i != r and grid[i][c]:
                f = grid[i][c]
                grid[i] = [field.sub(v, field.mul(f, w)) for v, w in zip(grid[i], rowr)]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return grid, pivots


def grid_rank(grid: list[list], field: FieldSpec) -> int:
    if not grid or not grid[0]:
        return 0
    return len(rref([list(row) for row in grid], field)[1])


# -- the matrix type --------------------------------------------------------


class SymMatrix:
    """An immutable n x n symmetric matrix over ``field``.

    ``entries`` may hold ints, Fractions, Scalars of the same field, or
    scalar tokens as strings.  Order 0 is allowed as the vacuous summand of a
    direct sum.
    """

    __slots__ = ("n", "field", "rows", "_ints", "_hash")

    def __init__(self, entries: Sequence[Sequence], field: FieldSpec = QQ):
        n = len(entries)
        raw = []
        for i, row in enumerate(entries):
            if len(row) != n:
                raise ValueError(f"row {i + 1} has {len(row)} entries, expected {n}")
            raw.append(tuple(parse_raw(v, field) if isinstance(v, str) else field.coerce(v) for v in row))
        for i in range(n):
            for j in range(i + 1, n):
                if raw[i][j] != raw[j][i]:
                    raise SymmetryError(i + 1, j + 1)
        self.n = n
        self.field = field
        self.rows = tuple(raw)
        self._ints = None
        if field.is_rational and all(v.denominator == 1 for row in raw for v in row):
            self._ints = tuple(tuple(v.numerator for v in row) for row in raw)
        self._hash = None

    # -- basic access --

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"({i},{j}) outside 1..{self.n}")
        return Scalar(self.field, self.rows[i - 1][j - 1])

    @property
    def is_integral(self) -> bool:
        return self._ints is not None

    def entries(self) -> list[list[Scalar]]:
        return [[Scalar(self.field, v) for v in row] for row in self.rows]

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field, self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format_raw(v) for v in row) for row in self.rows)
        return f"SymMatrix([{body}], {self.field})"

    # -- raw helpers used by the sequence code --

    def sub_grid(self, rows: Sequence[int], cols: Sequence[int]) -> list[list]:
        """Raw submatrix for 0-based row/column positions."""
        src = self._ints if self._ints is not None else self.rows
        return [[src[r][c] for c in cols] for r in rows]

    def minor_raw(self, rows: Sequence[int], cols: Sequence[int]):
        """Raw determinant of the submatrix at 0-based positions."""
        k = len(rows)
        if k != len(cols):
            raise ValueError(f"minor needs equal sizes, got {k} rows and {len(cols)} columns")
        if k == 0:
            return self.field.one
        a = self.sub_grid(rows, cols)
        if self._ints is not None:
            return det_int(a)
        if self.field.is_rational:
            return det_fraction(a)
        return det_mod(a, self.field.modulus)

    def principal_submatrix(self, gamma: IndexSet) -> SymMatrix:
        pos = gamma.positions
        return SymMatrix([[self.rows[r][c] for c in pos] for r in pos], self.field)

    def permuted(self, order: Sequence[int]) -> SymMatrix:
        """The matrix P^T B P whose row t is original row ``order[t-1]``."""
        idx = [i - 1 for i in order]
        return SymMatrix([[self.rows[r][c] for c in idx] for r in idx], self.field)

    def scaled(self, c) -> SymMatrix:
        c = self.field.coerce(c)
        return SymMatrix([[self.field.mul(c, v) for v in row] for row in self.rows], self.field)

    def matvec(self, x: Sequence) -> list:
        f = self.field
        out = []
        for row in self.rows:
            s = f.zero
            for a, b in zip(row, x):
                if a and b:
                    s = f.add(s, f.mul(a, b))
            out.append(s)
        return out

    def quadratic_form(self, x: Sequence):
        f = self.field
        s = f.zero
        for a, b in zip(x, self.matvec(x)):
            s = f.add(s, f.mul(a, b))
        return s

    def __matmul__(self, other: SymMatrix) -> list[list]:
        """Raw product grid (the product of symmetric matrices need not be symmetric)."""
        f = self.field
        n = self.n
        out = [[f.zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                s = f.zero
                for t in range(n):
                    s = f.add(s, f.mul(self.rows[i][t], other.rows[t][j]))
                out[i][j] = s
        return out


def make_symmetric(n: int, field: FieldSpec, entries: Sequence[Sequence]) -> SymMatrix:
    if len(entries) != n:
        raise ValueError(f"expected {n} rows, got {len(entries)}")
    return SymMatrix(entries, field)


# -- named matrices ---------------------------------------------------------


def zeros(n: int, field: FieldSpec = QQ) -> SymMatrix:
    return SymMatrix([[0] * n for _ in range(n)], field)


def identity(n: int, field: FieldSpec = QQ) -> SymMatrix:
    return SymMatrix([[int(i == j) for j in range(n)] for i in range(n)], field)


def ones(n: int, field: FieldSpec = QQ) -> SymMatrix:
    return SymMatrix([[1] * n for _ in range(n)], field)


def ak2(field: FieldSpec = QQ) -> SymMatrix:
    """A(K_2), the adjacency matrix of a single edge."""
    return SymMatrix([[0, 1], [1, 0]], field)


def l2(a, field: FieldSpec = QQ) -> SymMatrix:
    """L_2(a) = [[1, 1], [1, a]]."""
    return SymMatrix([[1, 1], [1, a]], field)


# -- operations -------------------------------------------------------------


def minor_det(B: SymMatrix, rows: IndexSet, cols: IndexSet) -> Scalar:
    if len(rows) != len(cols) or len(rows) == 0:
        raise ValueError(f"minor needs 1 <= |rows| = |cols|, got {len(rows)} and {len(cols)}")
    if rows.n != B.n or cols.n != B.n:
        raise ValueError("index sets do not match the matrix order")
    return Scalar(B.field, B.field.coerce(B.minor_raw(rows.positions, cols.positions)))


def det(B: SymMatrix) -> Scalar:
    if B.n == 0:
        return Scalar(B.field, B.field.one)
    full = IndexSet.full(B.n)
    return minor_det(B, full, full)


def det_cofactor(B, field: FieldSpec | None = None) -> Scalar:
    """Determinant by Laplace expansion; an independent check on :func:`minor_det`.

    ``B`` is a :class:`SymMatrix` or a square raw grid over ``field``.
    """
    if isinstance(B, SymMatrix):
        field, grid = B.field, B.rows
    else:
        field = field or QQ
        grid = [[field.coerce(v) for v in row] for row in B]
        if any(len(row) != len(grid) for row in grid):
            raise ValueError("cofactor expansion needs a square grid")
    return Scalar(field, det_laplace(grid, field))


def rank(B: SymMatrix) -> int:
    return grid_rank([list(r) for r in B.rows], B.field)


def submatrix_rank(B: SymMatrix, rows: IndexSet, cols: IndexSet) -> int:
    return grid_rank(B.sub_grid(rows.positions, cols.positions), B.field) if len(rows) and len(cols) else 0


def _inverse_grid(grid: list[list], field: FieldSpec) -> list[list]:
    n = len(grid)
    aug = [list(row) + [field.one if i == j else field.zero for j in range(n)] for i, row in enumerate(grid)]
    red, pivots = rref(aug, field)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red]


def inverse(B: SymMatrix) -> SymMatrix:
    f = B.field
    grid = [[f.coerce(v) for v in row] for row in B.rows]
    return SymMatrix(_inverse_grid(grid, f), f)


def complement_labels(n: int, gamma: IndexSet) -> tuple[int, ...]:
    """Original indices of the rows of B/B[gamma], in order."""
    return gamma.complement().members


def schur_complement(B: SymMatrix, gamma: IndexSet) -> SymMatrix:
    """B / B[gamma].  Row t of the result is row ``complement_labels(n, gamma)[t-1]`` of B."""
    f = B.field
    g = gamma.positions
    rest = gamma.complement().positions
    block = [[f.coerce(B.rows[r][c]) for c in g] for r in g]
    try:
        inv = _inverse_grid(block, f) if g else []
    except SingularMatrixError:
        raise SingularMatrixError(f"det B[{gamma}] = 0; Schur complement undefined") from None
    k = len(g)
    # X = B[gamma]^{-1} B[gamma, rest]
    x = [[f.zero] * len(rest) for _ in range(k)]
    for a in range(k):
        for b, c in enumerate(rest):
            s = f.zero
            for t in range(k):
                s = f.add(s, f.mul(inv[a][t], B.rows[g[t]][c]))
            x[a][b] = s
    out = []
    for r in rest:
        row = []
        for b, c in enumerate(rest):
            s = f.coerce(B.rows[r][c])
            for t in range(k):
                s = f.sub(s, f.mul(B.rows[r][g[t]], x[t][b]))
            row.append(s)
        out.append(row)
    return SymMatrix(out, f)


def direct_sum(*blocks: SymMatrix) -> SymMatrix:
    if not blocks:
        raise ValueError("direct sum of nothing")
    field = blocks[0].field
    if any(b.field != field for b in blocks):
        raise ValueError("direct sum of matrices over different fields")
    n = sum(b.n for b in blocks)
    grid = [[field.zero] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                grid[off + i][off + j] = b.rows[i][j]
        off += b.n
    return SymMatrix(grid, field)


def border(B: SymMatrix, y: Sequence, t) -> SymMatrix:
    """[[B, y], [y^T, t]]."""
    if len(y) != B.n:
        raise ValueError(f"border vector has length {len(y)}, matrix order is {B.n}")
    f = B.field
    y = [f.coerce(v) for v in y]
    t = f.coerce(t)
    grid = [list(row) + [y[i]] for i, row in enumerate(B.rows)]
    grid.append(y + [t])
    return SymMatrix(grid, f)


def solve_in_column_space(B: SymMatrix, y: Sequence) -> list[Scalar] | None:
    """Some x with Bx = y, or None when y is not in the column space."""
    if len(y) != B.n:
        raise ValueError(f"vector has length {len(y)}, matrix order is {B.n}")
    f = B.field
    aug = [[f.coerce(v) for v in row] + [f.coerce(yi)] for row, yi in zip(B.rows, y)]
    red, pivots = rref(aug, f)
    if B.n in pivots:
        return None
    x = [f.zero] * B.n
    for r, c in enumerate(pivots):
        x[c] = red[r][B.n]
    return [Scalar(f, v) for v in x]


@dataclass(frozen=True)
class StructureFlags:
    is_diagonal: bool
    has_zero_row: bool
    zero_rows: IndexSet


def structure_flags(B: SymMatrix) -> StructureFlags:
    zero = [i + 1 for i, row in enumerate(B.rows) if not any(row)]
    diag = all(not B.rows[i][j] for i in range(B.n) for j in range(B.n) if i != j)
    return StructureFlags(diag, bool(zero), IndexSet.of(B.n, zero))


def is_diagonal(B: SymMatrix) -> bool:
    return structure_flags(B).is_diagonal


def nonzero_part(B: SymMatrix) -> tuple[SymMatrix, IndexSet]:
    """B with its zero rows and columns deleted, and the kept index set."""
    keep = structure_flags(B).zero_rows.complement()
    return B.principal_submatrix(keep), keep


# -- text format ------------------------------------------------------------


def format_matrix(B: SymMatrix) -> str:
    lines = [f"field {B.field}", str(B.n)]
    lines += [" ".join(B.field.format_raw(v) for v in row) for row in B.rows]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SymMatrix:
    """Parse the matrix text format::

        field rational        (or: field gf <p>)
        <n>
        <n rows of n whitespace-separated scalar tokens>
    """
    lines = [(no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise MatrixFormatError("empty matrix file", 1)
    no, head = lines[0]
    words = head.split()
    if words[:1] != ["field"]:
        raise MatrixFormatError("expected 'field rational' or 'field gf <p>'", no, 1)
    try:
        field = FieldSpec.parse(" ".join(words[1:]))
    except ValueError as exc:
        raise MatrixFormatError(str(exc), no, len(words[0]) + 2) from None
    if len(lines) < 2:
        raise MatrixFormatError("missing matrix order", no + 1)
    no, order = lines[1]
    if not order.isdigit():
        raise MatrixFormatError(f"matrix order must be a positive integer, got {order!r}", no, 1)
    n = int(order)
    if n < 1:
        raise MatrixFormatError("matrix order must be at least 1", no, 1)
    body = lines[2:]
    if len(body) != n:
        raise MatrixFormatError(f"expected {n} matrix rows, found {len(body)}", body[-1][0] if body else no)
    grid = []
    for no, ln in body:
        raw_line = text.splitlines()[no - 1]
        tokens = ln.split()
        if len(tokens) != n:
            raise MatrixFormatError(f"expected {n} entries, found {len(tokens)}", no)
        row = []
        pos = 0
        for tok in tokens:
            pos = raw_line.index(tok, pos)
            try:
                row.append(parse_raw(tok, field))
            except ValueError as exc:
                raise MatrixFormatError(str(exc), no, pos + 1) from None
            pos += len(tok)
        grid.append(row)
    try:
        return SymMatrix(grid, field)
    except SymmetryError as exc:
        raise MatrixFormatError(str(exc), body[exc.i - 1][0]) from None


def load_matrix(path) -> SymMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())
