from __future__ import annotations

import random
from fractions import Fraction

import pytest

from adhmquot.adhm import (
    AdhmDatum,
    equivalence,
    is_adhm,
    is_stable,
    random_datum,
)
from adhmquot.exactalg import QQ, Matrix
from adhmquot.punctual import (
    PathConstructionError,
    basepoint,
    homotopy_path,
    is_nilpotent_tuple,
    path_permutation,
    reindex_vectors,
    support,
    verify_path,
)
from adhmquot.quotmod import NonCommutingError

from conftest import datum, mat


def test_nilpotency_examples(jordan2):
    assert is_nilpotent_tuple(datum(2, 2, 1, [[[0, 0], [0, 0]]] * 2, [(1, 0)]))
    assert is_nilpotent_tuple(AdhmDatum(1, 2, 1, (jordan2,), ((0, 1),)))
    assert not is_nilpotent_tuple(datum(1, 2, 1, [[[1, 0], [0, 0]]], [(1, 1)]))


def test_support_nilpotent_origin():
    x = random_datum(2, 3, 1, seed=1, nilpotent=True)
    report = support(x)
    assert report.complete
    assert report.points == (((Fraction(0), Fraction(0)), 3),)


def test_support_diagonal():
    x = datum(2, 2, 1, [[[1, 0], [0, 2]], [[3, 0], [0, 4]]], [(1, 1)])
    report = support(x)
    assert report.complete
    assert report.points == (
        ((Fraction(1), Fraction(3)), 1),
        ((Fraction(2), Fraction(4)), 1),
    )


def test_support_irrational_factor():
    x = datum(1, 2, 1, [[[0, -1], [1, 0]]], [(1, 0)])
    report = support(x)
    assert not report.complete
    assert report.points == ()
    (factor,) = report.factorizations
    assert factor.axis == 0
    assert factor.polynomial.replace(" ", "") == "z**2+1"


def test_support_mixed_rational_part():
    # B0 block-diagonal: eigenvalue 2 plus a rotation block
    b0 = mat([[2, 0, 0], [0, 0, -1], [0, 1, 0]])
    x = AdhmDatum(1, 3, 1, (b0,), ((1, 1, 0),))
    report = support(x)
    assert not report.complete
    assert report.points == (((Fraction(2),), 1),)
    assert report.total_multiplicity() == 1


def test_support_joint_multiplicity():
    # B_0 has a repeated eigenvalue whose eigenspace B_1 does not split further
    b0 = mat([[1, 0, 0], [0, 1, 0], [0, 0, 2]])
    b1 = mat([[3, 1, 0], [0, 3, 0], [0, 0, 4]])
    x = AdhmDatum(2, 3, 1, (b0, b1), ((1, 1, 1),))
    report = support(x)
    assert report.complete
    assert report.points == (
        ((Fraction(1), Fraction(3)), 2),
        ((Fraction(2), Fraction(4)), 1),
    )


def test_support_rejects_noncommuting(noncommuting_pair):
    b0, b1 = noncommuting_pair
    with pytest.raises(NonCommutingError):
        support(AdhmDatum(2, 2, 1, (b0, b1), ((1, 0),)))


def test_support_multiplicities_sum_to_c():
    for seed in range(5):
        x = random_datum(2, 4, 2, seed=seed, nilpotent=True)
        report = support(x)
        assert report.complete and report.total_multiplicity() == 4


def test_basepoint_flags():
    for n in (1, 2, 3):
        for c in (1, 2, 4):
            y = basepoint(n, c)
            assert (y.n, y.c, y.r) == (n, c, c)
            assert is_stable(y) and is_adhm(y) and is_nilpotent_tuple(y)


def test_basepoint_path_is_constant():
    y = basepoint(2, 3)
    for t in (Fraction(0), Fraction(1, 3), Fraction(1)):
        pt = homotopy_path(y, t)
        assert pt.v == y.v  # all vectors independent: no interpolation slots
        assert all(b.is_zero() for b in pt.B)


def test_hand_path_example(jordan2):
    # B0 = jordan, B1 = 0, v1 = v2 = e2: k = 1, w1 = B0 v1 = e1
    x = AdhmDatum(2, 2, 2, (jordan2, Matrix.zero(QQ, 2, 2)), ((0, 1), (0, 1)))
    assert is_stable(x)
    half = homotopy_path(x, Fraction(1, 2))
    assert half.B[0] == jordan2.scale(Fraction(1, 2))
    assert half.B[1].is_zero()
    assert half.v[0] == (Fraction(0), Fraction(1))
    assert half.v[1] == (Fraction(1, 2), Fraction(1, 2))


def test_path_endpoints(jordan2):
    x = AdhmDatum(2, 2, 2, (jordan2, Matrix.zero(QQ, 2, 2)), ((0, 1), (0, 1)))
    start = homotopy_path(x, Fraction(0))
    assert all(b.is_zero() for b in start.B)
    assert is_stable(start)
    end = homotopy_path(x, Fraction(1))
    assert end == reindex_vectors(x, path_permutation(x))
    assert equivalence(end, reindex_vectors(x, path_permutation(x))) is not None


def test_path_requires_square_and_stable(jordan2):
    with pytest.raises(PathConstructionError):
        homotopy_path(random_datum(2, 3, 2, seed=2, stable=True), Fraction(1, 2))
    unstable = AdhmDatum(1, 2, 2, (jordan2,), ((1, 0), (2, 0)))
    with pytest.raises(PathConstructionError):
        homotopy_path(unstable, Fraction(1, 2))


@pytest.mark.parametrize("seed", range(6))
def test_path_preserves_commutation_and_nilpotency(seed):
    rng = random.Random(seed)
    n, c = rng.choice([2, 3]), rng.choice([2, 3])
    x = random_datum(n, c, c, seed=30 + seed, stable=True, nilpotent=True)
    for t in (Fraction(0), Fraction(2, 7), Fraction(1, 2), Fraction(1)):
        pt = homotopy_path(x, t)
        assert is_adhm(pt)
        assert is_nilpotent_tuple(pt)
        assert is_stable(pt)


def test_verify_path_grid_report():
    x = random_datum(2, 3, 3, seed=40, stable=True, nilpotent=True)
    grid = [Fraction(k, 10) for k in range(11)]
    report = verify_path(x, grid)
    assert len(report.samples) == 11
    assert report.all_flags()
    assert report.endpoint_equivalent


def test_verify_path_non_nilpotent_input():
    x = datum(1, 2, 2, [[[1, 0], [0, 2]]], [(1, 0), (0, 1)])
    assert is_stable(x) and not is_nilpotent_tuple(x)
    report = verify_path(x, [Fraction(0), Fraction(1, 2), Fraction(1)])
    flags = [(s.nilpotent, s.stable, s.commuting) for s in report.samples]
    assert flags[0][0] is True       # t = 0 scales everything to zero
    assert flags[1][0] is False and flags[2][0] is False
    assert all(s.stable and s.commuting for s in report.samples)


def test_experimental_path_small_r():
    # n <= r < c: the same interpolation is attempted; t = 0 cannot be stable
    x = random_datum(2, 3, 2, seed=41, stable=True, nilpotent=True)
    report = verify_path(x, [Fraction(0), Fraction(1, 2), Fraction(1)], experimental=True)
    assert not report.samples[0].stable
    assert report.samples[-1].stable
    assert report.endpoint_equivalent


def test_experimental_path_large_r():
    x = random_datum(2, 2, 4, seed=42, stable=True, nilpotent=True)
    report = verify_path(
        x, [Fraction(k, 8) for k in range(9)], experimental=True
    )
    assert report.all_flags()
    assert report.endpoint_equivalent


def test_path_permutation_orders_selected_first():
    # v1 = 0 is skipped by the greedy scan, so slot 0 moves behind
    x = AdhmDatum(
        1, 2, 2,
        (mat([[0, 1], [0, 0]]),),
        ((0, 0), (0, 1)),
    )
    assert is_stable(x)
    assert path_permutation(x) == (1, 0)
