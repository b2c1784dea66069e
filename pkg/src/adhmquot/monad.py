"""Matrices of linear forms realizing the perfect-extended-monad maps.

Forms live in the homogeneous coordinates z_0..z_n of projective n-space with
the hyperplane at infinity cut out by z_n = 0.  Maps are stored so that the
composition "target after source" is literally the matrix product
target @ source, with row counts matching the target term.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .adhm import AdhmDatum, is_adhm, is_stable, krylov_closure
from .exactalg import (
    Field,
    Matrix,
    ShapeError,
    Subspace,
    kernel_basis,
    rank,
    rational_eigenvalues,
)
from .quotmod import NonCommutingError


@dataclass(frozen=True)
class LinearForm:
    """Homogeneous linear form; coeffs[k] is the coefficient of z_k."""

    coeffs: tuple

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def evaluate(self, point: Sequence):
        acc = None
        for c, z in zip(self.coeffs, point):
            term = c * z
            acc = term if acc is None else acc + term
        return acc


@dataclass(frozen=True)
class LinearFormMatrix:
    """Matrix whose entries are linear forms in a common set of variables."""

    field: Field
    rows: int
    cols: int
    var_count: int
    entries: tuple  # row-major LinearForms

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError("entry count does not match the declared shape")
        for e in self.entries:
            if len(e.coeffs) != self.var_count:
                raise ShapeError("linear form arity differs from var_count")

    def entry(self, i: int, j: int) -> LinearForm:
        return self.entries[i * self.cols + j]


@dataclass(frozen=True)
class QuadraticFormMatrix:
    """Matrix of quadratic forms, each a map {(k, l), k <= l} -> coefficient."""

    field: Field
    rows: int
    cols: int
    var_count: int
    entries: tuple  # row-major dicts

    def entry(self, i: int, j: int) -> dict:
        return self.entries[i * self.cols + j]

    def is_zero(self) -> bool:
        return all(not e for e in self.entries)

    def coefficient_matrix(self, k: int, l: int) -> Matrix:
        """Scalar matrix of the z_k z_l coefficients."""
        key = (min(k, l), max(k, l))
        zero = self.field.zero()
        return Matrix(
            self.field, self.rows, self.cols,
            tuple(e.get(key, zero) for e in self.entries),
        )


def _form(field: Field, var_count: int, **coeffs) -> LinearForm:
    vec = [field.zero()] * var_count
    for idx, value in coeffs.items():
        vec[int(idx)] = field.coerce(value)
    return LinearForm(tuple(vec))


def _zero_form(field: Field, var_count: int) -> LinearForm:
    return LinearForm((field.zero(),) * var_count)


def alpha0(x: AdhmDatum) -> LinearFormMatrix:
    """The c x (nc + r) map (B_0 z_n - z_0 | ... | B_{n-1} z_n - z_{n-1} | v_j z_n)."""
    n, c, r = x.n, x.c, x.r
    field = x.field
    nv = n + 1
    zero = field.zero()
    entries = []
    for row in range(c):
        for i in range(n):
            for col in range(c):
                vec = [zero] * nv
                vec[n] = x.B[i].entry(row, col)
                if row == col:
                    vec[i] = vec[i] - field.one()
                entries.append(LinearForm(tuple(vec)))
        for j in range(r):
            vec = [zero] * nv
            vec[n] = x.v[j][row]
            entries.append(LinearForm(tuple(vec)))
    return LinearFormMatrix(field, c, n * c + r, nv, tuple(entries))


def _a_block(x: AdhmDatum, i: int) -> list[list[LinearForm | None]]:
    """Block A_i as an (n x (n-i-1)) grid of c x c form blocks; None means zero.

    Block row i carries B_{i+1+m} z_n - z_{i+1+m} across the columns, and the
    following block rows carry -B_i z_n + z_i down the diagonal.
    """
    n = x.n
    grid: list[list] = [[None] * (n - i - 1) for _ in range(n)]
    for m in range(n - i - 1):
        grid[i][m] = ("plus", i + 1 + m)
        grid[i + 1 + m][m] = ("minus", i)
    return grid


def _block_form(x: AdhmDatum, tag: tuple, row: int, col: int) -> LinearForm:
    kind, idx = tag
    field = x.field
    n = x.n
    vec = [field.zero()] * (n + 1)
    if kind == "plus":  # B_idx z_n - z_idx
        vec[n] = x.B[idx].entry(row, col)
        if row == col:
            vec[idx] = vec[idx] - field.one()
    else:  # -B_idx z_n + z_idx
        vec[n] = -x.B[idx].entry(row, col)
        if row == col:
            vec[idx] = vec[idx] + field.one()
    return LinearForm(tuple(vec))


def alpha_minus1(x: AdhmDatum) -> LinearFormMatrix:
    """The (nc + r) x (c n(n-1)/2) map assembled from the blocks A_0, ..., A_{n-2}."""
    n, c, r = x.n, x.c, x.r
    field = x.field
    nv = n + 1
    total_block_cols = sum(n - i - 1 for i in range(n - 1))
    grids = [_a_block(x, i) for i in range(n - 1)]
    entries: list[LinearForm] = []
    zf = _zero_form(field, nv)
    for block_row in range(n):
        for row in range(c):
            for i in range(n - 1):
                grid = grids[i]
                for m in range(n - i - 1):
                    tag = grid[block_row][m]
                    for col in range(c):
                        if tag is None:
                            entries.append(zf)
                        else:
                            entries.append(_block_form(x, tag, row, col))
    for _ in range(r * total_block_cols * c):
        entries.append(zf)
    return LinearFormMatrix(field, n * c + r, total_block_cols * c, nv, tuple(entries))


def alpha_minus2_p3(x: AdhmDatum) -> LinearFormMatrix:
    """For n = 3: the 3c x c block column (-B_2 z_3 + z_2; B_1 z_3 - z_1; -B_0 z_3 + z_0)."""
    if x.n != 3:
        raise ShapeError("the depth-two map is only constructed for n = 3")
    c = x.c
    field = x.field
    nv = 4
    tags = [("minus", 2), ("plus", 1), ("minus", 0)]
    entries = []
    for tag in tags:
        for row in range(c):
            for col in range(c):
                entries.append(_block_form(x, tag, row, col))
    return LinearFormMatrix(field, 3 * c, c, nv, tuple(entries))


def compose(a: LinearFormMatrix, b: LinearFormMatrix) -> QuadraticFormMatrix:
    """Entrywise-exact product a @ b, coefficients collected by monomial z_k z_l."""
    if a.cols != b.rows:
        raise ShapeError("inner dimensions do not match")
    if a.var_count != b.var_count or a.field != b.field:
        raise ShapeError("factors disagree on variables or field")
    out = []
    for i in range(a.rows):
        arow = [a.entry(i, k) for k in range(a.cols)]
        for j in range(b.cols):
            acc: dict = {}
            for k in range(a.cols):
                f = arow[k]
                if f.is_zero():
                    continue
                g = b.entry(k, j)
                if g.is_zero():
                    continue
                for ki, ca in enumerate(f.coeffs):
                    if not ca:
                        continue
                    for li, cb in enumerate(g.coeffs):
                        if not cb:
                            continue
                        key = (ki, li) if ki <= li else (li, ki)
                        prev = acc.get(key)
                        value = ca * cb if prev is None else prev + ca * cb
                        if value:
                            acc[key] = value
                        elif prev is not None:
                            del acc[key]
            out.append(acc)
    return QuadraticFormMatrix(a.field, a.rows, b.cols, a.var_count, tuple(out))


def evaluate(m: LinearFormMatrix, point: Sequence) -> Matrix:
    """Scalar matrix obtained by evaluating every entry at a point of P^n."""
    field = m.field
    pt = tuple(field.coerce(z) for z in point)
    if len(pt) != m.var_count:
        raise ShapeError("point arity does not match the variable count")
    if all(not z for z in pt):
        raise ValueError("the zero tuple is not a point of projective space")
    return Matrix(
        field, m.rows, m.cols, tuple(e.evaluate(pt) for e in m.entries)
    )


@dataclass(frozen=True)
class SurjectivityCertificate:
    """Verdict for fiberwise surjectivity of the degree-zero monad map."""

    surjective: bool
    witness_covector: tuple | None = None
    witness_point: tuple | None = None
    witness_available: bool | None = None
    note: str = ""


def _common_left_eigenvector(x: AdhmDatum) -> tuple[tuple, tuple] | None:
    """A covector w != 0 and rational eigentuple z with w B_i = z_i w, w v_j = 0.

    Witnesses must annihilate the Krylov closure, so the search runs inside
    its annihilator, splitting one operator at a time along rational
    eigenvalues.  Returns None when no fully rational witness exists.
    """
    closure = krylov_closure(x)
    ann = kernel_basis(closure.basis)
    if ann.dim == 0:
        return None

    def restricted(op_index: int, space: Subspace) -> Matrix:
        images = []
        for i in range(space.dim):
            w = space.basis.row_tuple(i)
            img = tuple(
                sum((w[a] * x.B[op_index].entry(a, b) for a in range(x.c)),
                    x.field.zero())
                for b in range(x.c)
            )
            coords = space.coordinates(img)
            if coords is None:
                raise AssertionError("annihilator is not invariant; datum not commuting?")
            images.append(coords)
        if not images:
            return Matrix.zero(x.field, 0, 0)
        return Matrix.from_rows(x.field, images).transpose()

    def search(space: Subspace, axis: int, eigs: tuple):
        if space.dim == 0:
            return None
        if axis == x.n:
            return space.basis.row_tuple(0), eigs
        r = restricted(axis, space)
        roots, _ = rational_eigenvalues(r)
        for lam, _mult in sorted(roots):
            shifted = r - Matrix.identity(x.field, r.rows).scale(lam)
            eigen = kernel_basis(shifted)
            if eigen.dim == 0:
                continue
            vectors = []
            for i in range(eigen.dim):
                coords = eigen.basis.row_tuple(i)
                vec = [x.field.zero()] * x.c
                for s, coeff in enumerate(coords):
                    if coeff:
                        row = space.basis.row_tuple(s)
                        vec = [a + coeff * b for a, b in zip(vec, row)]
                vectors.append(vec)
            sub = Subspace.from_vectors(x.field, x.c, vectors)
            found = search(sub, axis + 1, eigs + (lam,))
            if found is not None:
                return found
        return None

    return search(ann, 0, ())


def surjectivity_certificate(x: AdhmDatum) -> SurjectivityCertificate:
    """Decide whether the degree-zero map has full rank c at every point.

    At infinity the rank is automatically c; on the affine chart a rank drop
    at z is equivalent to a covector w with w B_i = z_i w and w v_j = 0, which
    exists over the algebraic closure exactly when the datum is unstable.  The
    verdict is therefore the stability check; for unstable data with rational
    joint spectrum an explicit witness (w, point) is attached.
    """
    if not is_adhm(x):
        raise NonCommutingError("certificate requires a commuting datum")
    if is_stable(x):
        return SurjectivityCertificate(surjective=True)
    found = _common_left_eigenvector(x)
    if found is None:
        return SurjectivityCertificate(
            surjective=False,
            witness_available=False,
            note="rank drops only at irrational points; no witness over the rationals",
        )
    w, eigs = found
    point = tuple(eigs) + (x.field.one(),)
    return SurjectivityCertificate(
        surjective=False,
        witness_covector=tuple(w),
        witness_point=point,
        witness_available=True,
    )


@dataclass(frozen=True)
class FiberReport:
    """Ranks and fiber dimensions of the monad maps at one point."""

    point: tuple
    term_dims: tuple
    ranks: dict
    middle_dim: int
    euler: int | None


def fiber_report(x: AdhmDatum, point: Sequence) -> FiberReport:
    """Evaluate the chain at a point and report ranks and the middle fiber.

    For n = 3 the full chain is used and the alternating sum of the term
    dimensions (always r) is included; other n report the degree -1 and 0
    pair only.
    """
    a0 = evaluate(alpha0(x), point)
    am1 = evaluate(alpha_minus1(x), point)
    ranks = {"alpha0": rank(a0), "alpha_minus1": rank(am1)}
    n, c, r = x.n, x.c, x.r
    middle = (n * c + r) - ranks["alpha_minus1"] - ranks["alpha0"]
    euler = None
    term_dims: tuple
    if n == 3:
        am2 = evaluate(alpha_minus2_p3(x), point)
        ranks["alpha_minus2"] = rank(am2)
        term_dims = (c, 3 * c, 3 * c + r, c)
        euler = c - 3 * c + (3 * c + r) - c
    else:
        term_dims = (c * (n * (n - 1) // 2), n * c + r, c)
    pt = tuple(x.field.coerce(z) for z in point)
    return FiberReport(point=pt, term_dims=term_dims, ranks=ranks, middle_dim=middle, euler=euler)


def sample_points(x: AdhmDatum, count: int, seed: int, *, bound: int = 7) -> list[tuple]:
    """Deterministic rational sample points on P^n: affine-chart points plus a
    few on the hyperplane at infinity."""
    rng = random.Random(seed)
    field = x.field
    pts = []
    infinity = max(1, count // 8)
    for _ in range(count - infinity):
        pts.append(
            tuple(field.coerce(rng.randint(-bound, bound)) for _ in range(x.n))
            + (field.one(),)
        )
    for _ in range(infinity):
        while True:
            coords = [rng.randint(-bound, bound) for _ in range(x.n)]
            if any(coords):
                break
        pts.append(tuple(field.coerce(z) for z in coords) + (field.zero(),))
    return pts


def rank_sample_report(x: AdhmDatum, samples: int, seed: int) -> dict:
    """Rank of the degree-zero map at sampled points plus rational support points.

    Support points are added when the joint spectrum is rational; otherwise
    the report says that sampling used random points only.
    """
    from .punctual import support

    pts = sample_points(x, samples, seed)
    sup = support(x)
    support_pts = [
        tuple(coord for coord in point) + (x.field.one(),)
        for point, _mult in sup.points
    ]
    a0 = alpha0(x)
    rows = []
    for pt in pts:
        rows.append({"point": pt, "rank": rank(evaluate(a0, pt)), "support_point": False})
    for pt in support_pts:
        rows.append({"point": pt, "rank": rank(evaluate(a0, pt)), "support_point": True})
    return {
        "expected_rank": x.c,
        "support_complete": sup.complete,
        "all_full_rank": all(row["rank"] == x.c for row in rows),
        "samples": rows,
    }
