"""Jacobian tangent dimensions of the defining equations and moduli-dimension
experiments at constructively sampled generic points.

The scheme structure is the one cut out by the chosen equations: commutator
entries, entries of B_i^e for the nilpotent locus (e defaults to c), and
entries of f(B_0, ..., B_{n-1}) for explicit variety relations evaluated on
commuting tuples in fixed index order.  Tangent dimensions depend on that
choice, which is why it is pinned here.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .adhm import AdhmDatum, commutator_pairs, is_stable, stabilizer_lie_dimension
from .exactalg import QQ, Field, Matrix, ShapeError, rank
from .quotmod import PolyVector


class ResidualError(ValueError):
    """Jacobians are only taken at points satisfying the equations exactly."""


class SamplerError(ValueError):
    """No constructive sampler covers the requested configuration."""


@dataclass(frozen=True)
class EquationSystem:
    """Which equations cut the locus: commutators, nilpotency, variety relations."""

    commutators: bool = True
    nilpotent: bool = False
    nilpotency_power: int | None = None  # defaults to c at evaluation time
    variety_relations: tuple = ()

    def power(self, c: int) -> int:
        return self.nilpotency_power if self.nilpotency_power is not None else c

    def describe(self) -> str:
        parts = []
        if self.commutators:
            parts.append("commutators")
        if self.nilpotent:
            parts.append("nilpotency")
        if self.variety_relations:
            parts.append(f"{len(self.variety_relations)} variety relations")
        return " + ".join(parts) if parts else "no equations"


def _variety_value(x: AdhmDatum, f: PolyVector) -> Matrix:
    """f(B_0, ..., B_{n-1}) for a one-slot polynomial, canonical index order."""
    if f.r != 1 or f.n != x.n:
        raise ShapeError("variety relations are one-slot polynomials in n variables")
    field = x.field
    acc = Matrix.zero(field, x.c, x.c)
    for (alpha, _j), coeff in f.terms.items():
        word = Matrix.identity(field, x.c)
        for i in range(x.n):
            for _ in range(alpha[i]):
                word = word @ x.B[i]
        acc = acc + word.scale(field.coerce(coeff))
    return acc


def residual(x: AdhmDatum, sys: EquationSystem) -> tuple:
    """All equation values stacked: commutator entries (pairs in lexicographic
    order), then B_i^e entries per i, then each variety relation's entries."""
    values: list = []
    if sys.commutators:
        for i, j in commutator_pairs(x.n):
            values.extend((x.B[i] @ x.B[j] - x.B[j] @ x.B[i]).entries)
    if sys.nilpotent:
        e = sys.power(x.c)
        for b in x.B:
            values.extend(b.power(e).entries)
    for f in sys.variety_relations:
        values.extend(_variety_value(x, f).entries)
    return tuple(values)


def coordinate_count(x: AdhmDatum) -> int:
    return x.n * x.c * x.c + x.r * x.c


def jacobian(x: AdhmDatum, sys: EquationSystem) -> Matrix:
    """Partial derivatives of every scalar equation in the n c^2 + r c coordinates.

    x must satisfy the system exactly.  The marked vectors enter no equation,
    so their columns are zero; they are kept so the column space matches the
    coordinate space of the datum.
    """
    res = residual(x, sys)
    if any(v for v in res):
        raise ResidualError("datum does not satisfy the equation system exactly")
    field = x.field
    c = x.c
    zero = field.zero()
    n_eqs = len(res)
    # columns are assembled per B-variable; derivative blocks use the product
    # rule with a unit perturbation in entry (a, b) of B_k
    pairs = commutator_pairs(x.n) if sys.commutators else []
    e_pow = sys.power(c) if sys.nilpotent else 0

    variety_pre_suf = []
    for f in sys.variety_relations:
        per_term = []
        for (alpha, _j), coeff in f.terms.items():
            prefixes = []
            acc = Matrix.identity(field, c)
            # prefix[i] = product of B_0^a0 .. B_{i-1}^a_{i-1}
            for i in range(x.n):
                prefixes.append(acc)
                for _ in range(alpha[i]):
                    acc = acc @ x.B[i]
            suffixes = [None] * x.n
            acc = Matrix.identity(field, c)
            for i in range(x.n - 1, -1, -1):
                suffixes[i] = acc
                for _ in range(alpha[i]):
                    acc = x.B[i] @ acc
            per_term.append((alpha, field.coerce(coeff), prefixes, suffixes))
        variety_pre_suf.append(per_term)

    columns: list[list] = []
    for k in range(x.n):
        bk_powers = [Matrix.identity(field, c)]
        max_alpha = 0
        for per_term in variety_pre_suf:
            for alpha, _co, _p, _s in per_term:
                max_alpha = max(max_alpha, alpha[k])
        for _ in range(max(e_pow, max_alpha, 1) - 1):
            bk_powers.append(bk_powers[-1] @ x.B[k])
        for a in range(c):
            for b in range(c):
                col: list = []
                if sys.commutators:
                    for i, j in pairs:
                        block = [[zero] * c for _ in range(c)]
                        if k == i:
                            # d[B_i, B_j] = E B_j - B_j E
                            for y in range(c):
                                block[a][y] = block[a][y] + x.B[j].entry(b, y)
                            for xx in range(c):
                                block[xx][b] = block[xx][b] - x.B[j].entry(xx, a)
                        elif k == j:
                            # d[B_i, B_j] = B_i E - E B_i
                            for xx in range(c):
                                block[xx][b] = block[xx][b] + x.B[i].entry(xx, a)
                            for y in range(c):
                                block[a][y] = block[a][y] - x.B[i].entry(b, y)
                        for row in block:
                            col.extend(row)
                if sys.nilpotent:
                    for i in range(x.n):
                        block = [[zero] * c for _ in range(c)]
                        if k == i:
                            # d(B^e) = sum_t B^t E B^{e-1-t}
                            for t in range(e_pow):
                                left = bk_powers[t]
                                right = bk_powers[e_pow - 1 - t]
                                for xx in range(c):
                                    lv = left.entry(xx, a)
                                    if lv:
                                        for y in range(c):
                                            block[xx][y] = block[xx][y] + lv * right.entry(b, y)
                        for row in block:
                            col.extend(row)
                for per_term in variety_pre_suf:
                    block = [[zero] * c for _ in range(c)]
                    for alpha, coeff, prefixes, suffixes in per_term:
                        if alpha[k] == 0:
                            continue
                        for t in range(alpha[k]):
                            left = prefixes[k] @ bk_powers[t]
                            right = bk_powers[alpha[k] - 1 - t] @ suffixes[k]
                            for xx in range(c):
                                lv = left.entry(xx, a)
                                if lv:
                                    lv = lv * coeff
                                    for y in range(c):
                                        block[xx][y] = block[xx][y] + lv * right.entry(b, y)
                    for row in block:
                        col.extend(row)
                columns.append(col)
    zero_col = [zero] * n_eqs
    for _ in range(x.r * c):
        columns.append(zero_col)
    if not columns or n_eqs == 0:
        return Matrix.zero(field, n_eqs, coordinate_count(x))
    entries = tuple(columns[j][i] for i in range(n_eqs) for j in range(len(columns)))
    return Matrix(field, n_eqs, coordinate_count(x), entries)


class _Dual:
    """Matrix pair A + eps A' with eps^2 = 0; the oracle's arithmetic."""

    __slots__ = ("value", "deriv")

    def __init__(self, value: Matrix, deriv: Matrix):
        self.value = value
        self.deriv = deriv

    def __matmul__(self, other: "_Dual") -> "_Dual":
        return _Dual(
            self.value @ other.value,
            self.value @ other.deriv + self.deriv @ other.value,
        )

    def __sub__(self, other: "_Dual") -> "_Dual":
        return _Dual(self.value - other.value, self.deriv - other.deriv)

    def __add__(self, other: "_Dual") -> "_Dual":
        return _Dual(self.value + other.value, self.deriv + other.deriv)

    def scale(self, s) -> "_Dual":
        return _Dual(self.value.scale(s), self.deriv.scale(s))

    def power(self, e: int) -> "_Dual":
        field = self.value.field
        n = self.value.rows
        out = _Dual(Matrix.identity(field, n), Matrix.zero(field, n, n))
        for _ in range(e):
            out = out @ self
        return out


def residual_directional(
    x: AdhmDatum, sys: EquationSystem, direction: Sequence[Matrix]
) -> tuple:
    """First-order change of the residual along a direction in the B-coordinates.

    Computed with formal dual numbers (eps^2 = 0), independently of the
    product-rule assembly in :func:`jacobian`; exact, no step size involved.
    """
    if len(direction) != x.n:
        raise ShapeError("direction needs one matrix per B_i")
    duals = [_Dual(b, d) for b, d in zip(x.B, direction)]
    out: list = []
    if sys.commutators:
        for i, j in commutator_pairs(x.n):
            out.extend((duals[i] @ duals[j] - duals[j] @ duals[i]).deriv.entries)
    if sys.nilpotent:
        e = sys.power(x.c)
        for d in duals:
            out.extend(d.power(e).deriv.entries)
    for f in sys.variety_relations:
        field = x.field
        acc = _Dual(Matrix.zero(field, x.c, x.c), Matrix.zero(field, x.c, x.c))
        for (alpha, _j), coeff in f.terms.items():
            word = _Dual(Matrix.identity(field, x.c), Matrix.zero(field, x.c, x.c))
            for i in range(x.n):
                for _ in range(alpha[i]):
                    word = word @ duals[i]
            acc = acc + word.scale(field.coerce(coeff))
        out.extend(acc.deriv.entries)
    return tuple(out)


def tangent_dimension(x: AdhmDatum, sys: EquationSystem) -> int:
    """(n c^2 + r c) - rank of the Jacobian at x."""
    return coordinate_count(x) - rank(jacobian(x, sys))


def moduli_dimension_estimate(x: AdhmDatum, sys: EquationSystem) -> int:
    """Tangent dimension minus dim GL(V), corrected by the stabilizer dimension.

    Only meaningful at stable points, where the correction vanishes and the
    quotient by GL(V) is free; unstable input is rejected.
    """
    if not is_stable(x):
        raise ResidualError("moduli estimates need a stable datum")
    return tangent_dimension(x, sys) - x.c * x.c + stabilizer_lie_dimension(x)


def _random_invertible(rng: random.Random, field: Field, c: int, bound: int = 3) -> Matrix:
    while True:
        g = Matrix(
            field, c, c,
            tuple(field.coerce(rng.randint(-bound, bound)) for _ in range(c * c)),
        )
        if g.inverse() is not None:
            return g


def sample_generic_commuting(
    n: int, c: int, r: int, rng: random.Random, *, max_retries: int = 64
) -> AdhmDatum:
    """Stable commuting datum at a regular semisimple point of the commuting locus.

    B_0 is an invertible affine rescaling of a conjugated distinct-eigenvalue
    diagonal matrix T, so it separates every eigenvalue pair; the remaining
    B_i are random polynomials in T.  At such points the commutator Jacobian
    has its generic rank, which is what the dimension formulas describe.
    """
    field = QQ
    for _ in range(max_retries):
        eigs = rng.sample(range(-2 * c - 2, 2 * c + 3), c)
        g = _random_invertible(rng, field, c)
        ginv = g.inverse()
        diag = Matrix(
            field, c, c,
            tuple(field.coerce(eigs[i]) if i == j else field.zero()
                  for i in range(c) for j in range(c)),
        )
        t = g @ diag @ ginv
        powers = [Matrix.identity(field, c)]
        for _ in range(max(c - 1, 1)):
            powers.append(powers[-1] @ t)
        scale = field.coerce(rng.choice([1, -1]) * rng.randint(1, 3))
        shift = field.coerce(rng.randint(-3, 3))
        bs = [t.scale(scale) + Matrix.identity(field, c).scale(shift)]
        for _ in range(n - 1):
            coeffs = [rng.randint(-3, 3) for _ in range(c)]
            acc = Matrix.zero(field, c, c)
            for k, a in enumerate(coeffs):
                if a:
                    acc = acc + powers[k].scale(field.coerce(a))
            bs.append(acc)
        vs = tuple(
            tuple(field.coerce(rng.randint(-3, 3)) for _ in range(c)) for _ in range(r)
        )
        datum = AdhmDatum(n, c, r, tuple(bs), vs)
        if is_stable(datum):
            return datum
    raise SamplerError("could not draw a stable regular semisimple sample")


def sample_punctual(
    n: int, c: int, r: int, rng: random.Random, *, max_retries: int = 64
) -> AdhmDatum:
    """Stable nilpotent commuting datum at a generic point of the principal
    nilpotent family: B_i = x_i N + y_i N^2 + ... with N regular nilpotent and
    every linear coefficient x_i nonzero.

    Supported for c <= 3, the range where the nilpotent commuting locus is
    irreducible and this family is dense in it.
    """
    if c > 3:
        raise SamplerError("punctual sampler is constructive for c <= 3 only")
    field = QQ
    for _ in range(max_retries):
        g = _random_invertible(rng, field, c)
        ginv = g.inverse()
        shift = Matrix(
            field, c, c,
            tuple(field.one() if j == i + 1 else field.zero()
                  for i in range(c) for j in range(c)),
        )
        nmat = g @ shift @ ginv
        powers = [Matrix.identity(field, c)]
        for _ in range(max(c - 1, 0)):
            powers.append(powers[-1] @ nmat)
        bs = []
        for _ in range(n):
            acc = Matrix.zero(field, c, c)
            if c >= 2:
                x_coeff = rng.choice([1, -1]) * rng.randint(1, 3)
                acc = acc + powers[1].scale(field.coerce(x_coeff))
                for k in range(2, c):
                    y = rng.randint(-2, 2)
                    if y:
                        acc = acc + powers[k].scale(field.coerce(y))
            bs.append(acc)
        vs = tuple(
            tuple(field.coerce(rng.randint(-3, 3)) for _ in range(c)) for _ in range(r)
        )
        datum = AdhmDatum(n, c, r, tuple(bs), vs)
        if is_stable(datum):
            return datum
    raise SamplerError("could not draw a stable punctual sample")


@dataclass(frozen=True)
class DimensionExperiment:
    trials: int
    tangent_min: int | None
    tangent_max: int | None
    histogram: dict
    moduli_histogram: dict

    @property
    def moduli_min(self) -> int | None:
        return min(self.moduli_histogram) if self.moduli_histogram else None


def dimension_experiment(
    n: int,
    c: int,
    r: int,
    *,
    punctual: bool = False,
    trials: int,
    seed: int,
    variety_relations: tuple = (),
) -> DimensionExperiment:
    """Tangent dimensions at `trials` constructive samples of the chosen locus.

    The minimum over trials is the experiment's dimension estimate at a
    generic point.  trials = 0 yields an empty histogram without error.
    """
    if variety_relations:
        raise SamplerError("no constructive sampler for explicit variety relations")
    sys = EquationSystem(commutators=True, nilpotent=punctual)
    rng = random.Random(seed)
    histogram: dict = {}
    moduli_histogram: dict = {}
    for _ in range(trials):
        if punctual:
            datum = sample_punctual(n, c, r, rng)
        else:
            datum = sample_generic_commuting(n, c, r, rng)
        tangent = tangent_dimension(datum, sys)
        histogram[tangent] = histogram.get(tangent, 0) + 1
        estimate = moduli_dimension_estimate(datum, sys)
        moduli_histogram[estimate] = moduli_histogram.get(estimate, 0) + 1
    return DimensionExperiment(
        trials=trials,
        tangent_min=min(histogram) if histogram else None,
        tangent_max=max(histogram) if histogram else None,
        histogram=histogram,
        moduli_histogram=moduli_histogram,
    )
