"""Exact scalars (rationals and prime fields) and dense linear algebra.

Every rank/kernel/solve verdict downstream is a strict algebraic condition,
so arithmetic is exact by construction: rational scalars are
``fractions.Fraction`` (always reduced, positive denominator), prime-field
scalars are canonical residues wrapped in :class:`GFElement`.  There is no
floating-point mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


class LinearAlgebraError(ValueError):
    """Base for shape/field errors raised by this module."""


class FieldMismatchError(LinearAlgebraError):
    """Scalars of different modes (or different moduli) were combined."""


class ShapeError(LinearAlgebraError):
    """Matrix/vector dimensions do not fit the requested operation."""


class SingularMatrixError(LinearAlgebraError):
    """An invertible matrix was required."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class GFElement:
    """Residue in Z/p for a fixed prime p; values stay canonical in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _same_field(self, other: "GFElement") -> None:
        if self.p != other.p:
            raise FieldMismatchError(f"mixed prime moduli {self.p} and {other.p}")

    def __add__(self, other):
        if not isinstance(other, GFElement):
            return NotImplemented
        self._same_field(other)
        return GFElement(self.value + other.value, self.p)

    def __sub__(self, other):
        if not isinstance(other, GFElement):
            return NotImplemented
        self._same_field(other)
        return GFElement(self.value - other.value, self.p)

    def __mul__(self, other):
        if not isinstance(other, GFElement):
            return NotImplemented
        self._same_field(other)
        return GFElement(self.value * other.value, self.p)

    def __truediv__(self, other):
        if not isinstance(other, GFElement):
            return NotImplemented
        self._same_field(other)
        if other.value == 0:
            raise ZeroDivisionError("division by zero residue")
        return GFElement(self.value * pow(other.value, self.p - 2, self.p), self.p)

    def __neg__(self):
        return GFElement(-self.value, self.p)

    def __eq__(self, other):
        if isinstance(other, GFElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (self.value - other) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"

    def __str__(self):
        return str(self.value)


class RationalField:
    """Tag object for the rationals; elements are ``fractions.Fraction``."""

    name = "rational"

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, str)):
            return Fraction(x)
        raise FieldMismatchError(f"cannot coerce {x!r} into the rational field")

    def format(self, x) -> str:
        return str(self.coerce(x))

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class PrimeField:
    """Tag object for GF(p); elements are :class:`GFElement` with modulus p."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise LinearAlgebraError(f"{p} is not prime")
        self.p = p
        self.name = f"gf({p})"

    def zero(self) -> GFElement:
        return GFElement(0, self.p)

    def one(self) -> GFElement:
        return GFElement(1, self.p)

    def coerce(self, x) -> GFElement:
        if isinstance(x, GFElement):
            if x.p != self.p:
                raise FieldMismatchError(f"residue mod {x.p} used in GF({self.p})")
            return x
        if isinstance(x, int):
            return GFElement(x, self.p)
        if isinstance(x, str):
            if "/" in x:
                num, den = x.split("/", 1)
                return GFElement(int(num), self.p) / GFElement(int(den), self.p)
            return GFElement(int(x), self.p)
        raise FieldMismatchError(f"cannot coerce {x!r} into GF({self.p})")

    def format(self, x) -> str:
        return str(self.coerce(x).value)

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()

_GF_CACHE: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    """Return the (cached) prime field with modulus p."""
    if p not in _GF_CACHE:
        _GF_CACHE[p] = PrimeField(p)
    return _GF_CACHE[p]


Field = Union[RationalField, PrimeField]
Scalar = Union[Fraction, GFElement]


@dataclass(frozen=True)
class Matrix:
    """Dense matrix with row-major entries over a single exact field.

    Degenerate shapes (0 x k and k x 0) are legal and have rank 0.
    """

    field: Field
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError("negative matrix dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )
        object.__setattr__(
            self, "entries", tuple(self.field.coerce(x) for x in self.entries)
        )

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence]) -> "Matrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for row in rows:
            if len(row) != ncols:
                raise ShapeError("ragged rows")
            flat.extend(row)
        return cls(field, nrows, ncols, tuple(flat))

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero()
        return cls(field, rows, cols, (z,) * (rows * cols))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return cls(field, n, n, tuple(o if i == j else z for i in range(n) for j in range(n)))

    def entry(self, i: int, j: int) -> Scalar:
        return self.entries[i * self.cols + j]

    def row_tuple(self, i: int) -> tuple:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col_tuple(self, j: int) -> tuple:
        return self.entries[j :: self.cols] if self.cols else ()

    def to_rows(self) -> list[list]:
        return [list(self.row_tuple(i)) for i in range(self.rows)]

    def _check_field(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise FieldMismatchError("matrices over different fields")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in addition")
        return Matrix(
            self.field, self.rows, self.cols,
            tuple(a + b for a, b in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in subtraction")
        return Matrix(
            self.field, self.rows, self.cols,
            tuple(a - b for a, b in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.rows, self.cols, tuple(-a for a in self.entries))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise ShapeError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        zero = self.field.zero()
        out = []
        ocols = other.cols
        for i in range(self.rows):
            arow = self.row_tuple(i)
            for j in range(ocols):
                acc = zero
                for k, a in enumerate(arow):
                    if a:
                        acc = acc + a * other.entries[k * ocols + j]
                out.append(acc)
        return Matrix(self.field, self.rows, ocols, tuple(out))

    def scale(self, s) -> "Matrix":
        s = self.field.coerce(s)
        return Matrix(self.field, self.rows, self.cols, tuple(s * a for a in self.entries))

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field, self.cols, self.rows,
            tuple(self.entry(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def apply(self, vec: Sequence) -> tuple:
        """Matrix-vector product (vectors are plain scalar tuples)."""
        if len(vec) != self.cols:
            raise ShapeError("vector length does not match column count")
        vec = tuple(self.field.coerce(x) for x in vec)
        zero = self.field.zero()
        out = []
        for i in range(self.rows):
            acc = zero
            row = self.row_tuple(i)
            for a, x in zip(row, vec):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return tuple(out)

    def power(self, e: int) -> "Matrix":
        if self.rows != self.cols:
            raise ShapeError("power of a non-square matrix")
        result = Matrix.identity(self.field, self.rows)
        for _ in range(e):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return all(not a for a in self.entries)

    def inverse(self) -> "Matrix | None":
        """Exact inverse, or None when singular."""
        if self.rows != self.cols:
            raise ShapeError("inverse of a non-square matrix")
        n = self.rows
        zero, one = self.field.zero(), self.field.one()
        aug = [
            list(self.row_tuple(i)) + [one if j == i else zero for j in range(n)]
            for i in range(n)
        ]
        pivots = _echelonize(aug)
        if len(pivots) < n or any(p >= n for p in pivots):
            return None
        return Matrix.from_rows(self.field, [row[n:] for row in aug[:n]])

    @staticmethod
    def hstack(blocks: Sequence["Matrix"]) -> "Matrix":
        if not blocks:
            raise ShapeError("hstack of nothing")
        rows = blocks[0].rows
        field = blocks[0].field
        out = []
        for i in range(rows):
            for b in blocks:
                if b.rows != rows:
                    raise ShapeError("hstack blocks disagree on row count")
                out.extend(b.row_tuple(i))
        return Matrix(field, rows, sum(b.cols for b in blocks), tuple(out))

    @staticmethod
    def vstack(blocks: Sequence["Matrix"]) -> "Matrix":
        if not blocks:
            raise ShapeError("vstack of nothing")
        cols = blocks[0].cols
        field = blocks[0].field
        out = []
        for b in blocks:
            if b.cols != cols:
                raise ShapeError("vstack blocks disagree on column count")
            out.extend(b.entries)
        return Matrix(field, sum(b.rows for b in blocks), cols, tuple(out))


def _echelonize(rows: list[list]) -> list[int]:
    """In-place reduced row echelon form.

    Returns the pivot column indices in order; after the call the first
    ``len(pivots)`` rows carry the nonzero part (pivot entries normalized
    to 1, pivot columns cleared elsewhere) and the remaining rows are zero.
    """
    if not rows:
        return []
    ncols = len(rows[0])
    nrows = len(rows)
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][col]
        if pv != _one_like(pv):
            rows[r] = [x / pv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def _one_like(x):
    if isinstance(x, GFElement):
        return GFElement(1, x.p)
    return Fraction(1)


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    rows = m.to_rows()
    pivots = _echelonize(rows)
    if pivots:
        reduced = Matrix.from_rows(m.field, rows[: len(pivots)])
    else:
        reduced = Matrix.zero(m.field, 0, m.cols)
    return reduced, tuple(pivots)


def rank(m: Matrix) -> int:
    """Rank of m over its field; rank + nullity = cols."""
    rows = m.to_rows()
    return len(_echelonize(rows))


@dataclass(frozen=True)
class Subspace:
    """Subspace of the coordinate space, held as an RREF basis (row per vector)."""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise ShapeError("basis width does not match ambient dimension")

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def field(self) -> Field:
        return self.basis.field

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.zero(field, 0, ambient_dim))

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(field, ambient_dim))

    @classmethod
    def from_vectors(cls, field: Field, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [[field.coerce(x) for x in v] for v in vectors]
        for row in rows:
            if len(row) != ambient_dim:
                raise ShapeError("vector length does not match ambient dimension")
        pivots = _echelonize(rows)
        basis = Matrix.from_rows(field, rows[: len(pivots)]) if pivots else Matrix.zero(
            field, 0, ambient_dim
        )
        return cls(ambient_dim, basis)

    def _reduce(self, vec: Sequence) -> tuple[list, list]:
        """Reduce vec against the basis; returns (residue, coordinates)."""
        field = self.field
        v = [field.coerce(x) for x in vec]
        if len(v) != self.ambient_dim:
            raise ShapeError("vector length does not match ambient dimension")
        coords = []
        for i in range(self.basis.rows):
            row = self.basis.row_tuple(i)
            pivot_col = next(j for j, x in enumerate(row) if x)
            coeff = v[pivot_col]
            coords.append(coeff)
            if coeff:
                v = [a - coeff * b for a, b in zip(v, row)]
        return v, coords

    def contains(self, vec: Sequence) -> bool:
        residue, _ = self._reduce(vec)
        return all(not x for x in residue)

    def coordinates(self, vec: Sequence) -> tuple | None:
        """Coordinates of vec in the basis, or None when vec is outside."""
        residue, coords = self._reduce(vec)
        if any(x for x in residue):
            return None
        return tuple(coords)

    def join(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ShapeError("join of subspaces of different ambient spaces")
        vectors = [self.basis.row_tuple(i) for i in range(self.basis.rows)]
        vectors += [other.basis.row_tuple(i) for i in range(other.basis.rows)]
        return Subspace.from_vectors(self.field, self.ambient_dim, vectors)


class SpanBuilder:
    """Incrementally grown row span; ``add`` reports whether the span grew.

    Rows are kept forward-reduced in insertion order, so membership tests
    reduce against them in that order.
    """

    def __init__(self, field: Field, ambient_dim: int):
        self.field = field
        self.ambient_dim = ambient_dim
        self._rows: list[list] = []
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._rows)

    def _reduced(self, vec: Sequence) -> list:
        v = [self.field.coerce(x) for x in vec]
        if len(v) != self.ambient_dim:
            raise ShapeError("vector length does not match ambient dimension")
        for row, piv in zip(self._rows, self._pivots):
            c = v[piv]
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def add(self, vec: Sequence) -> bool:
        v = self._reduced(vec)
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            return False
        pv = v[piv]
        self._rows.append([x / pv for x in v])
        self._pivots.append(piv)
        return True

    def contains(self, vec: Sequence) -> bool:
        return all(not x for x in self._reduced(vec))

    def to_subspace(self) -> Subspace:
        return Subspace.from_vectors(self.field, self.ambient_dim, self._rows)


def kernel_basis(m: Matrix) -> Subspace:
    """Right kernel {x : m @ x = 0} as a subspace of the column-index space."""
    rows = m.to_rows()
    pivots = _echelonize(rows)
    pivot_set = set(pivots)
    free_cols = [j for j in range(m.cols) if j not in pivot_set]
    zero = m.field.zero()
    one = m.field.one()
    vectors = []
    for f in free_cols:
        v = [zero] * m.cols
        v[f] = one
        for row_idx, p in enumerate(pivots):
            v[p] = -rows[row_idx][f]
        vectors.append(v)
    return Subspace.from_vectors(m.field, m.cols, vectors)


def solve(a: Matrix, b: Sequence) -> tuple | None:
    """Some x with a @ x = b, or None when inconsistent.

    The returned x is the echelon-form particular solution: free variables
    are set to zero.
    """
    if len(b) != a.rows:
        raise ShapeError("right-hand side length does not match row count")
    field = a.field
    bvec = [field.coerce(x) for x in b]
    rows = [list(a.row_tuple(i)) + [bvec[i]] for i in range(a.rows)]
    if a.rows == 0:
        return (field.zero(),) * a.cols
    pivots = _echelonize(rows)
    if pivots and pivots[-1] == a.cols:
        return None
    zero = field.zero()
    x = [zero] * a.cols
    for row_idx, p in enumerate(pivots):
        x[p] = rows[row_idx][a.cols]
    return tuple(x)


def char_poly(m: Matrix) -> tuple[Fraction, ...]:
    """Characteristic polynomial coefficients (constant first, monic last).

    Faddeev-LeVerrier; rational matrices only, since the recursion divides
    by integers.
    """
    if m.rows != m.cols:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    if not isinstance(m.field, RationalField):
        raise FieldMismatchError("char_poly is supported over the rationals only")
    n = m.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    nmat = Matrix.identity(QQ, n)
    for k in range(1, n + 1):
        prod = m @ nmat
        trace = sum((prod.entry(i, i) for i in range(n)), Fraction(0))
        a = -trace / k
        coeffs[n - k] = a
        if k < n:
            nmat = prod + Matrix.identity(QQ, n).scale(a)
    return tuple(coeffs)


def _poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs: list[Fraction], root: Fraction) -> list[Fraction]:
    # synthetic division by (x - root); assumes root is exact
    out = [Fraction(0)] * (len(coeffs) - 1)
    carry = Fraction(0)
    for i in range(len(coeffs) - 1, 0, -1):
        carry = coeffs[i] + carry * root
        out[i - 1] = carry
    return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    f = 1
    while f * f <= n:
        if n % f == 0:
            small.append(f)
            if f != n // f:
                large.append(n // f)
        f += 1
    return small + large[::-1]


def rational_roots(coeffs: Sequence[Fraction]) -> tuple[list[tuple[Fraction, int]], tuple[Fraction, ...]]:
    """Rational roots (with multiplicity) and the root-free remaining factor.

    Input is a coefficient list, constant term first; the remainder is
    returned in the same layout and has no rational roots.
    """
    work = [Fraction(c) for c in coeffs]
    while len(work) > 1 and not work[-1]:
        work.pop()
    roots: list[tuple[Fraction, int]] = []
    zero_mult = 0
    while len(work) > 1 and not work[0]:
        zero_mult += 1
        work = work[1:]
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if len(work) > 1:
        denom_lcm = 1
        for c in work:
            denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
        ints = [int(c * denom_lcm) for c in work]
        candidates = []
        for p in _divisors(ints[0]):
            for q in _divisors(ints[-1]):
                candidates.append(Fraction(p, q))
                candidates.append(Fraction(-p, q))
        seen = set()
        for cand in sorted(set(candidates)):
            if cand in seen:
                continue
            seen.add(cand)
            mult = 0
            while len(work) > 1 and _poly_eval(work, cand) == 0:
                work = _deflate(work, cand)
                mult += 1
            if mult:
                roots.append((cand, mult))
    return roots, tuple(work)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def rational_eigenvalues(m: Matrix) -> tuple[list[tuple[Fraction, int]], tuple[Fraction, ...]]:
    """Rational eigenvalues of m with algebraic multiplicities.

    Also returns the rational-root-free factor of the characteristic
    polynomial (the constant polynomial (1,) when the spectrum splits).
    """
    roots, remainder = rational_roots(char_poly(m))
    return roots, remainder
