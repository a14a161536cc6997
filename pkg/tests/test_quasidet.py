from fractions import Fraction
from random import Random

import pytest

from conftest import fraction_det
from solitonlab.algebra import QQ, MatrixAlgebra, SquareMatrix, random_element
from solitonlab.errors import ShapeViolation, SingularCell, SingularSubmatrix
from solitonlab.quasidet import (
    FrobeniusCell,
    bottom_row_conventions,
    frobenius_gamma,
    frobenius_quotient,
    frobenius_quotient_closed_form,
    quasideterminant,
    solution_entry_via_quasidet,
    wronski,
)
from solitonlab.series import D_T, D_V, SeriesAlgebra, series_exp_linear
from solitonlab.solitons import random_langmuir_params, langmuir_build_f

M2 = MatrixAlgebra(QQ, 2)


def test_one_by_one():
    m = MatrixAlgebra(QQ, 1).matrix([[Fraction(5, 3)]])
    assert quasideterminant(m, 0, 0) == Fraction(5, 3)


def test_two_by_two_literals():
    x = M2.matrix([[1, 2], [3, 4]])
    assert quasideterminant(x, 0, 0) == Fraction(-1, 2)
    assert quasideterminant(x, 1, 1) == Fraction(-2)


def test_det_ratio_oracle_all_positions():
    rng = Random(99)
    for _ in range(10):
        for size in (2, 3, 4):
            m = random_element(MatrixAlgebra(QQ, size), rng)
            rows = [list(r) for r in m.rows]
            full = fraction_det(rows)
            for i in range(size):
                for j in range(size):
                    sub = [r[:j] + r[j + 1:]
                           for k, r in enumerate(rows) if k != i]
                    sub_det = fraction_det(sub)
                    if sub_det == 0:
                        with pytest.raises(SingularSubmatrix):
                            quasideterminant(m, i, j)
                        continue
                    q = quasideterminant(m, i, j)
                    assert q * sub_det == (-1) ** (i + j) * full


def _toda_like_series(rng, n_modes, cap=7):
    out = []
    for _ in range(n_modes):
        cu = Fraction(rng.randint(1, 4), rng.randint(1, 4))
        cv = Fraction(rng.randint(1, 4), rng.randint(1, 4))
        scale = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        out.append(series_exp_linear(cu, cv, cap, algebra=QQ).scale_left(scale)
                   + SeriesAlgebra(QQ, 2, cap).constant(Fraction(rng.randint(1, 3))))
    return out


def test_wronski_shape():
    rng = Random(5)
    fs = _toda_like_series(rng, 3)
    wp = wronski(fs, D_V)
    # row r of dW equals row r + 1 of W
    for r in range(2):
        for j in range(3):
            assert wp.dW.entry(r, j) == wp.W.entry(r + 1, j)
    assert wp.N == 3


def test_wronski_single_series():
    rng = Random(6)
    (f,) = _toda_like_series(rng, 1)
    wp = wronski([f], D_V)
    assert wp.W.entry(0, 0) == f
    assert wp.dW.entry(0, 0) == f.derive(D_V)


def test_wronski_needs_valid_order():
    salg = SeriesAlgebra(QQ, 2, 4)
    low = salg.one().with_valid_order(1)
    with pytest.raises(ValueError):
        wronski([low, low], D_V)


def test_exponential_wronski_rows_follow_right_multiplication():
    # rows of W are the exponential times increasing powers of its v-exponent
    cu, cv = Fraction(2, 3), Fraction(3, 2)
    e = series_exp_linear(cu, cv, 6, algebra=QQ)
    wp = wronski([e], D_V)
    row = e
    for k in range(1, 2):
        row = row.scale_right(cv)
        assert wp.dW.entry(k - 1, 0) == row


def test_frobenius_gamma_single_mode():
    rng = Random(7)
    (f,) = _toda_like_series(rng, 1)
    cell = frobenius_gamma(wronski([f], D_V))
    assert cell.entry(0, 0) == f.derive(D_V) * f.inverse()


def test_frobenius_gamma_defining_relation_and_shape():
    rng = Random(8)
    for n_modes in (2, 3):
        fs = _toda_like_series(rng, n_modes)
        wp = wronski(fs, D_V)
        cell = frobenius_gamma(wp)
        prod = cell.matrix * wp.W
        for i in range(n_modes):
            for j in range(n_modes):
                assert prod.entry(i, j) == wp.dW.entry(i, j)


def test_bottom_row_convention_recorded():
    rng = Random(9)
    fs = _toda_like_series(rng, 2)
    wp = wronski(fs, D_V)
    cell = frobenius_gamma(wp)
    note = bottom_row_conventions(wp, cell)
    assert "skip-order-q-1" in note.matched
    assert "skip-order-q" not in note.matched


def test_bottom_row_convention_univariate_lattice_data():
    rng = Random(10)
    params = random_langmuir_params(rng, N=2, r=1, cap=8, window=3)
    data = langmuir_build_f(params)
    wp = wronski(data.f[0], D_T)
    cell = frobenius_gamma(wp)
    note = bottom_row_conventions(wp, cell)
    assert "skip-order-q-1" in note.matched


def test_solution_entry_matches_cell():
    rng = Random(11)
    fs = _toda_like_series(rng, 2)
    wp = wronski(fs, D_V)
    cell = frobenius_gamma(wp)
    assert solution_entry_via_quasidet(wp) == cell.entry(1, 0)


def test_frobenius_cell_shape_enforced():
    bad = M2.matrix([[0, 2], [1, 1]])  # row 0 is not a shifted identity row
    with pytest.raises(ShapeViolation):
        FrobeniusCell(bad)


def test_frobenius_cell_from_bottom_row():
    cell = FrobeniusCell.from_bottom_row(QQ, [1, 2, 3])
    assert cell.N == 3
    assert cell.entry(0, 1) == 1
    assert cell.entry(0, 0) == 0
    assert cell.bottom_row() == (1, 2, 3)


def test_quotient_identity_when_equal():
    cell = FrobeniusCell.from_bottom_row(QQ, [2, 3])
    y = frobenius_quotient(cell, cell)
    assert y == M2.one()


def test_quotient_literal_example():
    k = FrobeniusCell.from_bottom_row(QQ, [2, 3])
    l = FrobeniusCell.from_bottom_row(QQ, [1, 1])
    y = frobenius_quotient(k, l)
    assert y == M2.matrix([[1, 0], [1, 2]])
    # bottom row decomposes through the single inverted corner entry
    assert y.entry(1, 1) == Fraction(2)
    assert y.entry(1, 0) == Fraction(1)


def test_quotient_requires_invertible_corner():
    k = FrobeniusCell.from_bottom_row(M2, [M2.one(), M2.one()])
    l = FrobeniusCell.from_bottom_row(
        M2, [M2.matrix([[1, 2], [2, 4]]), M2.one()]
    )
    with pytest.raises(SingularCell):
        frobenius_quotient(k, l)


def test_quotient_closed_form_random_matrix_entries():
    rng = Random(12)
    for _ in range(15):
        n = rng.choice([2, 3, 4])
        k = FrobeniusCell.from_bottom_row(
            M2, [random_element(M2, rng) for _ in range(n)]
        )
        l = FrobeniusCell.from_bottom_row(
            M2, [random_element(M2, rng) for _ in range(n)]
        )
        try:
            direct = k.matrix * l.matrix.inverse()
        except Exception:
            continue
        assert frobenius_quotient_closed_form(k, l) == direct
        assert frobenius_quotient(k, l) == direct
