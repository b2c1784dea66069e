"""Punctual data: nilpotency, support of the quotient, and the explicit
path contracting a stable datum onto the basepoint configuration.

The support of the quotient attached to a commuting datum is its joint
spectrum; points are produced by recursive generalized-eigenspace splitting
and are complete exactly when every characteristic polynomial encountered
splits over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .adhm import AdhmDatum, equivalence, is_adhm, is_stable
from .exactalg import (
    QQ,
    Matrix,
    ShapeError,
    SpanBuilder,
    Subspace,
    kernel_basis,
    rational_eigenvalues,
)
from .quotmod import NonCommutingError, monomials_of_degree


class PathConstructionError(ValueError):
    """The homotopy needs r = c (or the experimental flag) and a stable datum."""


def is_nilpotent_tuple(x: AdhmDatum) -> bool:
    """True iff B_i^c = 0 for every i."""
    return all(b.power(x.c).is_zero() for b in x.B)


@dataclass(frozen=True)
class FactorReport:
    """An irreducible non-linear factor blocking the rational splitting."""

    axis: int
    polynomial: str
    multiplicity: int


@dataclass(frozen=True)
class SupportReport:
    points: tuple  # ((lambda_0, ..., lambda_{n-1}), multiplicity) pairs
    complete: bool
    factorizations: tuple  # FactorReport entries, empty when complete

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.points)


def _restricted_operator(x: AdhmDatum, space: Subspace, i: int) -> Matrix:
    """Matrix of B_i on an invariant subspace, in the subspace basis."""
    images = []
    for s in range(space.dim):
        img = x.B[i].apply(space.basis.row_tuple(s))
        coords = space.coordinates(img)
        if coords is None:
            raise NonCommutingError("subspace is not invariant under the tuple")
        images.append(coords)
    if not images:
        return Matrix.zero(x.field, 0, 0)
    return Matrix.from_rows(x.field, images).transpose()


def _irreducible_factors(axis: int, coeffs: Sequence[Fraction]) -> list[FactorReport]:
    import sympy

    z = sympy.Symbol("z")
    poly = sum(sympy.Rational(c.numerator, c.denominator) * z**k for k, c in enumerate(coeffs))
    _, factors = sympy.Poly(poly, z).factor_list()
    out = []
    for factor, mult in factors:
        out.append(FactorReport(axis=axis, polynomial=str(factor.as_expr()), multiplicity=mult))
    return out


def support(x: AdhmDatum) -> SupportReport:
    """Joint spectrum of the commuting tuple with multiplicities.

    Splits recursively: generalized eigenspaces of B_0, then of B_1 restricted
    to each, and so on.  When some characteristic polynomial along the way has
    an irrational part, the report is marked incomplete and carries that
    part's irreducible factors; multiplicities then sum to less than c.
    """
    if not is_adhm(x):
        raise NonCommutingError("support requires a commuting datum")
    points: list[tuple[tuple, int]] = []
    factors: list[FactorReport] = []

    def split(space: Subspace, axis: int, coords: tuple):
        if space.dim == 0:
            return
        if axis == x.n:
            points.append((coords, space.dim))
            return
        op = _restricted_operator(x, space, axis)
        roots, remainder = rational_eigenvalues(op)
        if len(remainder) > 1:
            factors.extend(_irreducible_factors(axis, remainder))
        for lam, mult in sorted(roots):
            shifted = op - Matrix.identity(x.field, op.rows).scale(lam)
            gen_eigen = kernel_basis(shifted.power(mult))
            vectors = []
            for i in range(gen_eigen.dim):
                cvec = gen_eigen.basis.row_tuple(i)
                vec = [x.field.zero()] * x.c
                for s, coeff in enumerate(cvec):
                    if coeff:
                        row = space.basis.row_tuple(s)
                        vec = [a + coeff * b for a, b in zip(vec, row)]
                vectors.append(vec)
            split(Subspace.from_vectors(x.field, x.c, vectors), axis + 1, coords + (lam,))

    split(Subspace.full(x.field, x.c), 0, ())
    points.sort(key=lambda pm: pm[0])
    complete = sum(m for _, m in points) == x.c
    return SupportReport(points=tuple(points), complete=complete, factorizations=tuple(factors))


def basepoint(n: int, c: int) -> AdhmDatum:
    """The datum (0, ..., 0, e_1, ..., e_c) with r = c: stable, commuting, nilpotent."""
    zero = Matrix.zero(QQ, c, c)
    identity = Matrix.identity(QQ, c)
    return AdhmDatum(n, c, c, (zero,) * n, tuple(identity.row_tuple(i) for i in range(c)))


@dataclass(frozen=True)
class PathData:
    """Fixed ingredients of the contraction path for one datum."""

    selected: tuple[int, ...]       # 0-based indices of the greedy independent vectors
    remaining: tuple[int, ...]      # the other slots, in input order
    completion: tuple               # vectors w_i, one per remaining slot (zero-padded)
    permutation: tuple[int, ...]    # slot order of the path endpoint at t = 1


def _path_data(x: AdhmDatum, *, experimental: bool) -> PathData:
    if x.r != x.c and not experimental:
        raise PathConstructionError("the contraction path needs r = c")
    if not is_adhm(x):
        raise NonCommutingError("the path scales a commuting tuple")
    if not is_stable(x):
        raise PathConstructionError("basis completion needs a stable datum")
    span = SpanBuilder(x.field, x.c)
    selected = []
    remaining = []
    for j, vec in enumerate(x.v):
        if span.add(vec):
            selected.append(j)
        else:
            remaining.append(j)
    k = len(selected)
    # complete with Krylov words B^alpha v_j, scanned in (|alpha|, alpha, j) order
    completion = []
    degree = 1
    while span.dim < x.c and degree <= x.c:
        for alpha in sorted(monomials_of_degree(x.n, degree)):
            for j in range(x.r):
                w = x.v[j]
                for i in range(x.n - 1, -1, -1):
                    for _ in range(alpha[i]):
                        w = x.B[i].apply(w)
                if span.add(w):
                    completion.append(w)
                    if span.dim == x.c:
                        break
            if span.dim == x.c:
                break
        degree += 1
    if span.dim < x.c:
        raise PathConstructionError("completion failed; datum is not stable")
    needed = len(remaining)
    zero_vec = (x.field.zero(),) * x.c
    padded = list(completion[:needed]) + [zero_vec] * max(0, needed - len(completion))
    return PathData(
        selected=tuple(selected),
        remaining=tuple(remaining),
        completion=tuple(padded),
        permutation=tuple(selected) + tuple(remaining),
    )


def path_permutation(x: AdhmDatum) -> tuple[int, ...]:
    """Slot order (0-based) in which the input vectors appear along the path."""
    return _path_data(x, experimental=(x.r != x.c)).permutation


def reindex_vectors(x: AdhmDatum, permutation: Sequence[int]) -> AdhmDatum:
    """The same datum with marked vectors permuted."""
    if sorted(permutation) != list(range(x.r)):
        raise ShapeError("not a permutation of the vector slots")
    return AdhmDatum(x.n, x.c, x.r, x.B, tuple(x.v[j] for j in permutation))


def homotopy_path(x: AdhmDatum, t, *, experimental: bool = False) -> AdhmDatum:
    """The point phi(t) of the contraction path.

    phi(t) = (t B_0, ..., t B_{n-1}, v_sel..., w_i (1-t) + v_rem_i t ...): the
    greedily selected independent vectors ride along unchanged, each remaining
    slot interpolates between a completion vector and its input vector.
    phi(0) is GL-equivalent to the basepoint configuration and phi(1) is the
    input with the vector slots in :func:`path_permutation` order.

    With ``experimental=True`` the same construction is attempted for r != c
    (the completion list is truncated or zero-padded to fit); no stability
    promise is made there, the verification report just records what happens.
    """
    data = _path_data(x, experimental=experimental)
    field = x.field
    t = field.coerce(t)
    one = field.one()
    new_b = tuple(b.scale(t) for b in x.B)
    vectors = [x.v[j] for j in data.selected]
    for w, j in zip(data.completion, data.remaining):
        vectors.append(
            tuple(wi * (one - t) + vi * t for wi, vi in zip(w, x.v[j]))
        )
    return AdhmDatum(x.n, x.c, x.r, new_b, tuple(vectors))


@dataclass(frozen=True)
class PathSample:
    t: object
    stable: bool
    commuting: bool
    nilpotent: bool

    @property
    def all_flags(self) -> bool:
        return self.stable and self.commuting and self.nilpotent


@dataclass(frozen=True)
class PathReport:
    samples: tuple
    endpoint_equivalent: bool
    permutation: tuple[int, ...]

    def all_stable_commuting(self) -> bool:
        return all(s.stable and s.commuting for s in self.samples)

    def all_flags(self) -> bool:
        return all(s.all_flags for s in self.samples)


def verify_path(x: AdhmDatum, grid: Sequence, *, experimental: bool = False) -> PathReport:
    """Flags (stable, commuting, nilpotent) of phi(t) on a sample grid.

    For a stable nilpotent datum with r = c the whole segment stays inside the
    stable nilpotent commuting locus, so every grid row should be all-true;
    the report is the desk-scale verification artifact, including whether the
    t = 1 endpoint is GL-equivalent to the reindexed input.
    """
    data = _path_data(x, experimental=experimental)
    samples = []
    for t in grid:
        pt = homotopy_path(x, t, experimental=experimental)
        samples.append(
            PathSample(
                t=x.field.coerce(t),
                stable=is_stable(pt),
                commuting=is_adhm(pt),
                nilpotent=is_nilpotent_tuple(pt),
            )
        )
    endpoint = homotopy_path(x, x.field.one(), experimental=experimental)
    target = reindex_vectors(x, data.permutation)
    endpoint_equivalent = equivalence(endpoint, target) is not None
    return PathReport(
        samples=tuple(samples),
        endpoint_equivalent=endpoint_equivalent,
        permutation=data.permutation,
    )
