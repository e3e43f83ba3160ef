import pytest

from hres.chain import ChainComplex
from hres.generic_data import build_generic, h_ideal
from hres.minimal_complex import build_minimal
from hres.verify import (
    BettiTable, CheckReport, ExactnessCertificate, betti_table, certify_exactness, check_d_squared,
    compare_spans, expected_betti, matrix_entries, minimal_complex_reports, specialized_ranks,
)


@pytest.fixture(scope="module")
def mc3():
    return build_minimal(build_generic(3))


@pytest.fixture(scope="module")
def mc4():
    return build_minimal(build_generic(4))


def test_report_needs_witness_on_failure():
    with pytest.raises(ValueError):
        CheckReport("x", "fail")
    with pytest.raises(ValueError):
        CheckReport("x", "maybe")
    rep = CheckReport("x", "pass", None, 1.5)
    assert rep.to_json() == {"id": "x", "status": "pass", "witness": None, "details": {}}
    assert rep.to_json(timing=True)["seconds"] == 1.5


def test_betti_n3(mc3):
    table = betti_table(mc3)
    assert table.entries == {0: {0: 1}, 1: {2: 15}, 2: {3: 35}, 3: {4: 21, 5: 21},
                             4: {6: 35}, 5: {7: 15}, 6: {9: 1}}
    assert table == expected_betti(3, 1)
    assert table.mirror(3) == table


def test_betti_n4(mc4):
    table = betti_table(mc4)
    assert table.entries[4] == {6: 10, 7: 24, 8: 140, 9: 24, 10: 10}
    assert table == expected_betti(4, 1, source="display")
    assert table.diff(table.mirror(4)) == []


@pytest.mark.parametrize("du", [0, 1, 2])
def test_formula_matches_display_and_computation_n4(du, mc4):
    exp = expected_betti(4, du, source="formula")
    if du == 1:
        assert exp == expected_betti(4, 1, source="display") == betti_table(mc4)
    else:
        assert exp == betti_table(build_minimal(build_generic(4, du)))


@pytest.mark.slow
@pytest.mark.parametrize("du", [0, 2])
def test_formula_matches_computation_n5(du):
    assert expected_betti(5, du, source="formula") == betti_table(build_minimal(build_generic(5, du)))


def test_expected_betti_n2_and_missing_display():
    assert expected_betti(2).ranks() == {0: 1, 1: 4, 2: 6, 3: 4, 4: 1}
    with pytest.raises(ValueError):
        expected_betti(3, 0, source="display")


def test_betti_diff_reports_mismatch():
    a = BettiTable({0: {0: 1}, 1: {2: 3}})
    b = BettiTable({0: {0: 1}, 1: {2: 4}})
    assert a.diff(b) and a != b


@pytest.mark.parametrize("n,expected", [(2, [1, 3, 3, 1]), (3, [1, 14, 21, 21, 14, 1])])
def test_certificate_ranks(n, expected):
    cert = certify_exactness(build_minimal(build_generic(n)), seed=0, trials=5)
    assert cert.valid and cert.trials_used <= 5
    assert [cert.ranks[r] for r in sorted(cert.ranks)] == expected
    assert cert.to_json()["status"] == "valid"


def test_certificate_rejects_zeroed_m3_entry(mc3):
    M = mc3.M
    mat = M.d(3).copy()
    i, j, _ = next(iter(mat.entries()))
    mat[i, j] = mat.ring.zero()
    broken = ChainComplex(M.ring, M.lo, M.hi, M.modules, {**M.diffs, 3: mat})
    cert = certify_exactness(broken, trials=5)
    assert not cert.valid


def test_certificate_inconclusive_on_truncation(mc3):
    # dropping the last differential leaves the top module without a map: rank sums fall short
    M = mc3.M
    diffs = {r: m for r, m in M.diffs.items() if r != 6}
    trunc = ChainComplex(M.ring, M.lo, M.hi, M.modules, diffs)
    cert = certify_exactness(trunc, trials=2)
    assert cert.status == "inconclusive" and cert.trials_used == 2
    assert isinstance(cert, ExactnessCertificate)


def test_rank_sandwich_holds_at_points(mc3):
    from hres.generic_data import SplitMix64
    from hres.verify import random_point
    rng = SplitMix64(3)
    M = mc3.M
    for _ in range(3):
        ranks = specialized_ranks(M, random_point(M.ring, 101, rng), 101)
        for r in M.degrees():
            assert ranks.get(r, 0) + ranks.get(r + 1, 0) <= M.rank(r)


def test_spans(mc3):
    g = mc3.data.grading
    m1 = matrix_entries(mc3.M.d(1))
    assert compare_spans(m1, m1 + [mc3.M.ring.zero()], g).ok
    assert compare_spans(m1, h_ideal(mc3.data, sign_twist=True), g).ok
    assert compare_spans(m1, matrix_entries(mc3.M.d(6)), g).ok
    assert not compare_spans(m1, h_ideal(mc3.data), g).ok


@pytest.mark.parametrize("n", [3, 4])
def test_minimal_complex_reports(n, mc3, mc4):
    mc = mc3 if n == 3 else mc4
    reps = minimal_complex_reports(mc)
    assert {r.check_id: r.status for r in reps} == {
        "M.h0_span": "pass", "M.back_span": "pass", "betti.duality": "pass", "betti.expected": "pass"}


def test_d_squared_M4(mc4):
    assert check_d_squared(mc4.M).ok

