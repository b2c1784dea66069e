from __future__ import annotations

from fractions import Fraction

import pytest

from adhmquot.adhm import AdhmDatum
from adhmquot.exactalg import QQ, Matrix


def mat(rows) -> Matrix:
    return Matrix.from_rows(QQ, [[Fraction(x) for x in row] for row in rows])


def datum(n, c, r, bs, vs) -> AdhmDatum:
    return AdhmDatum(n, c, r, tuple(mat(b) for b in bs), tuple(tuple(v) for v in vs))


@pytest.fixture
def jordan2() -> Matrix:
    return mat([[0, 1], [0, 0]])


@pytest.fixture
def noncommuting_pair():
    # the classic 2x2 pair with [B0, B1] = diag(1, -1)
    return mat([[0, 1], [0, 0]]), mat([[0, 0], [1, 0]])
