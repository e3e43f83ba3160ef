from math import comb

import pytest

from hres.big_complex import (
    CROSS_BLOCKS, DeterminantError, build_F, build_F_variant, build_G, chain_map_residual,
    f_labels, iso_basis_change, iso_basis_change_maps, iso_theta_sign, theta_scalar, total_rank,
    transformed_data, twist,
)
from hres.chain import ChainComplex
from hres.exact_arith import INHOMOGENEOUS, poly_ring, weighted_degree
from hres.generic_data import SplitMix64, apply_specialization, build_generic, make_specialization
from hres.linalg import evaluate_matrix, rank_mod_p
from hres.verify import check_d_squared, random_point

P = 1_000_003


def C(a, b):
    return comb(a, b) if b >= 0 else 0


@pytest.fixture(scope="module")
def F3():
    return build_F(build_generic(3))


def test_total_ranks():
    assert total_rank(2) == 64
    for n in range(2, 6):
        assert total_rank(n) == 4 ** (n + 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_family_ranks_are_vandermonde(n):
    for r in range(-1, 2 * n + 2):
        counts = {f: 0 for f in (1, 2, 3, 4)}
        for lab in f_labels(n, r):
            counts[lab.family] += 1
        assert counts[1] == C(2 * n, r + 1)
        assert counts[2] == counts[3] == C(2 * n, r)
        assert counts[4] == C(2 * n, r - 1)


def test_bottom_module():
    labs = f_labels(3, -1)
    assert len(labs) == 1 and labs[0].family == 1 and labs[0].t == 0


def test_degree_range(F3):
    assert (F3.lo, F3.hi) == (-1, 7)
    assert sum(F3.ranks().values()) == 256


@pytest.mark.parametrize("n", [2, 3])
def test_d_squared(n):
    assert check_d_squared(build_F(build_generic(n))).ok


@pytest.mark.parametrize("n", [3, 4])
def test_differentials_are_homogeneous(n):
    d = build_generic(n)
    F = build_F(d)
    for r in range(F.lo + 1, F.hi + 1):
        src, tgt = F.module(r), F.module(r - 1)
        for i, j, val in F.d(r).entries():
            deg = weighted_degree(val, d.grading)
            assert deg != INHOMOGENEOUS
            assert deg == src.twists[j] - tgt.twists[i], (r, src.labels[j], tgt.labels[i])


def test_twist_formulas_bottom_and_top():
    n, dv = 3, 1
    assert twist(1, -1, 0, n, dv) == 0
    # the top of F is family 4 at t = n, r = 2n + 1
    assert twist(4, 2 * n + 1, n, n, dv) == n * n


def test_sign_flip_in_one_block_is_caught(F3):
    r = 2
    mat = F3.d(r).copy()
    i, j = next((i, j) for i, j, _ in mat.entries()
                if F3.module(r).labels[j].family == 1 and F3.module(r - 1).labels[i].family == 2)
    mat[i, j] = -mat[i, j]
    broken = ChainComplex(F3.ring, F3.lo, F3.hi, F3.modules, {**F3.diffs, r: mat})
    rep = check_d_squared(broken)
    assert not rep.ok
    assert rep.witness["degree"] in (r, r + 1)
    assert rep.witness["poly"] not in (None, "0")


def test_tilde_sign_pattern(F3):
    d = build_generic(3)
    Ft = build_F_variant(d, "tilde")
    for r in range(F3.lo + 1, F3.hi + 1):
        src, tgt = F3.module(r), F3.module(r - 1)
        a, b = F3.d(r), Ft.d(r)
        assert a.nnz() == b.nnz()
        for i, j, val in a.entries():
            key = (src.labels[j].family, tgt.labels[i].family)
            assert b[i, j] == (-val if key in CROSS_BLOCKS else val)
    with pytest.raises(ValueError):
        build_F_variant(d, "sideways")


def test_theta_scalars():
    for r in range(-1, 8):
        for t in range(4):
            assert theta_scalar(3, r, t) == (-1) ** t
    R = poly_ring(3)
    th = iso_theta_sign(3, R)
    for m in th.values():
        assert m @ m == m.identity(R, m.nrows)


def test_theta_is_chain_map():
    d = build_generic(3)
    Ft, Fm = build_F_variant(d, "tilde"), build_F_variant(d, "minus_v")
    assert chain_map_residual(Ft, Fm, iso_theta_sign(3, d.ring)) == 0


def test_basis_change_identity_and_det():
    R = poly_ring(3)
    I = [[int(i == j) for j in range(3)] for i in range(3)]
    for side in ("Theta", "Phi"):
        maps = iso_basis_change_maps(3, R, I, side)
        assert all(m == m.identity(R, m.nrows) for m in maps.values() if m.nrows)
    with pytest.raises(DeterminantError):
        iso_basis_change_maps(3, R, [[2, 0, 0], [0, 1, 0], [0, 0, 1]], "Theta")


@pytest.mark.parametrize("side", ["Theta", "Phi"])
def test_basis_change_is_chain_map(side):
    d = build_generic(3)
    bc = iso_basis_change(d, [[1, 0, 0], [0, 1, 0], [4, 0, 1]], side)
    assert chain_map_residual(bc.source, bc.target, bc.maps) == 0


@pytest.mark.parametrize("side", ["Theta", "Phi"])
def test_basis_change_composition_is_contravariant(side):
    R = poly_ring(3)
    rng = SplitMix64(17)
    from hres.verify import unimodular_transvection
    T1, T2 = unimodular_transvection(3, rng), unimodular_transvection(3, rng)
    T12 = [[sum(T1[i][k] * T2[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    a, b = iso_basis_change_maps(3, R, T1, side), iso_basis_change_maps(3, R, T2, side)
    c = iso_basis_change_maps(3, R, T12, side)
    assert all(b[r] @ a[r] == c[r] for r in c)


def test_transformed_data_sides():
    d = build_generic(2)
    T = [[1, 1], [0, 1]]
    t = transformed_data(d, T, "Theta")
    R = d.ring
    assert t.X[0][1] == R.x(1, 1) + R.x(1, 2)
    assert t.v[0] == R.v(1) - R.v(2)
    p = transformed_data(d, T, "Phi")
    assert p.X[1][0] == R.x(1, 1) + R.x(2, 1)
    assert p.u[0] == R.u(1) - R.u(2)


@pytest.fixture(scope="module")
def block3():
    d = build_generic(3)
    return build_G(apply_specialization(d, make_specialization("block", 3, ring=d.ring)))


def test_block_form_chain_iso(block3):
    assert check_d_squared(block3.G).ok
    assert chain_map_residual(block3.G, block3.F, block3.phi) == 0
    point = random_point(block3.F.ring, P, SplitMix64(2))
    for r, m in block3.phi.items():
        assert m.nrows == m.ncols
        if m.nrows:
            assert rank_mod_p(evaluate_matrix(m, point, P), P) == m.nrows


def test_h_prime_vanishes_on_family_4(block3):
    from hres.big_complex import f_labels as labs
    for r, h in block3.h.items():
        for j, lab in enumerate(labs(2, r)):
            if lab.family == 4:
                assert not h.cols[j]


def test_block_form_requires_block_shape():
    with pytest.raises(ValueError):
        build_G(build_generic(3))


def test_block_form_even_n():
    d = build_generic(4)
    bf = build_G(apply_specialization(d, make_specialization("block", 4, ring=d.ring)))
    assert chain_map_residual(bf.G, bf.F, bf.phi) == 0
