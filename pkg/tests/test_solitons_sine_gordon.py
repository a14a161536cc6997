from fractions import Fraction
from random import Random

import pytest

from solitonlab.algebra import QQ, MatrixAlgebra, random_invertible
from solitonlab.quasidet import ConventionNote
from solitonlab.residual import check_data, check_toda
from solitonlab.series import D_U, D_V
from solitonlab.solitons import (
    SineGordonParams,
    random_sine_gordon_params,
    sine_gordon_solution,
)


def test_vacuum_solution_is_constant_conjugate():
    # with the minus family switched off both site solutions collapse to p a p^-1
    m2 = MatrixAlgebra(QQ, 2)
    rng = Random(3)
    p = random_invertible(m2, rng)
    a = random_invertible(m2, rng)
    params = SineGordonParams(N=1, r=2, cap=6, p=[p], q=[m2.zero()], a=[a], scalar="rational")
    sol = sine_gordon_solution(params)
    expected = p * a * p.inverse()
    for g in sol.gs:
        salg = g.algebra
        assert g == salg.constant(expected)
    assert check_toda(list(sol.gs), D_U, D_V).passed


def test_vacuum_scalar_case_gives_a():
    params = SineGordonParams(
        N=1, r=1, cap=6,
        p=[Fraction(3, 2)], q=[Fraction(0)], a=[Fraction(5, 7)],
    )
    sol = sine_gordon_solution(params)
    for g in sol.gs:
        assert g == g.algebra.constant(Fraction(5, 7))


def test_single_mode_closed_form_matches_pipeline():
    rng = Random(41)
    sol = sine_gordon_solution(random_sine_gordon_params(rng, N=1, r=1, cap=7))
    assert sol.closed_forms is not None
    for cf, g in zip(sol.closed_forms, sol.gs):
        assert cf == g


def test_single_mode_satisfies_two_periodic_system():
    rng = Random(43)
    for r in (1, 2):
        sol = sine_gordon_solution(random_sine_gordon_params(rng, N=1, r=r, cap=7))
        report = check_toda(list(sol.gs), D_U, D_V)
        assert report.passed
        assert report.exact


def test_two_mode_pipeline_and_typo_resolution():
    rng = Random(47)
    sol = sine_gordon_solution(random_sine_gordon_params(rng, N=2, r=1, cap=8))
    report = check_toda(list(sol.gs), D_U, D_V)
    assert report.passed
    notes = [n for n in sol.notes if isinstance(n, ConventionNote)]
    assert notes, "expected a recorded reading of the two-factor display"
    note = notes[-1]
    assert note.matched == ("site-consistent",)
    # the literal fixed-site reading only coincides where its index matches
    assert "'literal-fixed-site': [1]" in note.detail


def test_shift_relations_hold_for_alternating_data():
    rng = Random(53)
    sol = sine_gordon_solution(random_sine_gordon_params(rng, N=2, r=1, cap=7))
    assert check_data("toda", sol.toda.data).passed


def test_three_mode_pipeline_path():
    rng = Random(59)
    sol = sine_gordon_solution(random_sine_gordon_params(rng, N=3, r=1, cap=8))
    assert sol.closed_forms is None
    assert check_toda(list(sol.gs), D_U, D_V).passed
