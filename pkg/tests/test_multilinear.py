"""Exterior algebra: worked examples, then seeded property suites for the
module-action identities (200 hypothesis cases per identity and per n)."""

import pytest
from hypothesis import given, settings, strategies as st

from hres.exact_arith import GF, poly_ring
from hres.generic_data import SplitMix64
from hres.multilinear import (
    DUAL, PRIMAL, ExtElement, Minors, Orientation, SideMismatch, add_into, adjoint_entry,
    comult, contract, full, mask_of, minor_map, orientation_contract, subsets, wedge,
)

P = 1_000_003
CASES = settings(max_examples=200, derandomize=True, deadline=None)
seeds = st.integers(min_value=0, max_value=2**64 - 1)


def el(side, n, idx, c=1):
    return ExtElement.basis(side, n, idx, c)


def rand_el(rng, side, n, k):
    return ExtElement(side, n, {m: rng.randrange(P) - P // 2 for m in subsets(n, k)})


def rand_matrix(rng, n):
    return [[rng.randrange(P) - P // 2 for _ in range(n)] for _ in range(n)]


def scalar(x):
    return x.terms.get(0, 0)


def tensor(pairs):
    """Sum of x (x) y over (x, y) pairs, as {(mask, mask): coeff}."""
    out = {}
    for x, y in pairs:
        for mx, cx in x.terms.items():
            for my, cy in y.terms.items():
                add_into(out, (mx, my), cx * cy)
    return out


# ---------------------------------------------------------------------------
# examples


def test_wedge_examples():
    assert wedge(el(DUAL, 3, [1]), el(DUAL, 3, [2])) == el(DUAL, 3, [1, 2])
    assert wedge(el(DUAL, 3, [2]), el(DUAL, 3, [1])) == el(DUAL, 3, [1, 2], -1)
    assert not wedge(el(PRIMAL, 3, [1]), el(PRIMAL, 3, [1]))


def test_wedge_side_mismatch():
    with pytest.raises(SideMismatch):
        wedge(el(DUAL, 2, [1]), el(PRIMAL, 2, [1]))


def test_contract_examples():
    assert contract(el(DUAL, 2, [2]), el(PRIMAL, 2, [1, 2])) == el(PRIMAL, 2, [1], -1)
    # (eps2 ^ eps1)(e1 ^ e2): eps1 acts first
    two_one = wedge(el(DUAL, 2, [2]), el(DUAL, 2, [1]))
    assert contract(two_one, el(PRIMAL, 2, [1, 2])) == ExtElement.one(PRIMAL, 2)
    assert contract(el(DUAL, 3, [1]), el(PRIMAL, 3, [1, 2, 3])) == el(PRIMAL, 3, [2, 3])
    with pytest.raises(SideMismatch):
        contract(el(DUAL, 2, [1]), el(DUAL, 2, [1]))


def test_equal_degree_contraction_is_symmetric():
    rng = SplitMix64(5)
    for n in (2, 3, 4):
        for k in range(n + 1):
            a, b = rand_el(rng, PRIMAL, n, k), rand_el(rng, DUAL, n, k)
            assert contract(a, b).terms.get(0, 0) == contract(b, a).terms.get(0, 0)


def test_comult_examples():
    x = el(DUAL, 3, [1, 2, 3])
    got = [(a, b) for a, b in comult(x, (1, 2))]
    assert got == [(el(DUAL, 3, [1]), el(DUAL, 3, [2, 3])),
                   (el(DUAL, 3, [2], -1), el(DUAL, 3, [1, 3])),
                   (el(DUAL, 3, [3]), el(DUAL, 3, [1, 2]))]
    y = el(DUAL, 2, [1, 2])
    assert comult(y, (0, 2)) == [(ExtElement.one(DUAL, 2), y)]
    assert comult(y, (1, 1)) == [(el(DUAL, 2, [1]), el(DUAL, 2, [2])),
                                 (el(DUAL, 2, [2], -1), el(DUAL, 2, [1]))]


def test_minor_map_examples():
    R = poly_ring(3)
    X = [[R.x(i, j) for j in range(1, 4)] for i in range(1, 4)]
    m1 = minor_map(X, 1)
    assert all(m1[i, j] == X[i][j] for i in range(3) for j in range(3))
    mins = Minors(X, R.one())
    assert mins.det(mask_of([1, 2]), mask_of([1, 3])) == R.parse("x11*x23 - x13*x21")
    R2 = poly_ring(2)
    X2 = [[R2.x(i, j) for j in (1, 2)] for i in (1, 2)]
    top = Minors(X2, R2.one()).apply(el(PRIMAL, 2, [1, 2], R2.one()))
    assert top == el(DUAL, 2, [1, 2], R2.parse("x11*x22 - x12*x21"))


def test_minor_map_brute_force_leibniz():
    from itertools import permutations
    rng = SplitMix64(11)
    X = rand_matrix(rng, 4)
    mins = Minors(X)
    for k in range(1, 5):
        for T in subsets(4, k):
            for S in subsets(4, k):
                rows = [i for i in range(4) if T >> i & 1]
                cols = [j for j in range(4) if S >> j & 1]
                val = 0
                for perm in permutations(range(k)):
                    inv = sum(1 for a in range(k) for b in range(a + 1, k) if perm[a] > perm[b])
                    prod = (-1) ** inv
                    for a in range(k):
                        prod *= X[rows[a]][cols[perm[a]]]
                    val += prod
                assert mins.det(T, S) == val


def test_adjoint_examples():
    R = poly_ring(2)
    X = [[R.x(i, j) for j in (1, 2)] for i in (1, 2)]
    adj = [[adjoint_entry(X, i, j) for j in (1, 2)] for i in (1, 2)]
    assert adj == [[R.x(2, 2), -R.x(1, 2)], [-R.x(2, 1), R.x(1, 1)]]
    ident = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
    assert [[adjoint_entry(ident, i, j) for j in (1, 2, 3)] for i in (1, 2, 3)] == ident


def test_adjoint_times_matrix_is_det():
    rng = SplitMix64(3)
    for n in (2, 3, 4):
        X = rand_matrix(rng, n)
        det = Minors(X).det(full(n), full(n))
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                s = sum(X[i - 1][j - 1] * adjoint_entry(X, j, k) for j in range(1, n + 1))
                assert s == (det if i == k else 0)


def test_orientation_contract_examples():
    o = Orientation(3)
    assert orientation_contract(el(DUAL, 3, [1]), o) == el(PRIMAL, 3, [2, 3])
    assert orientation_contract(el(DUAL, 3, [2]), o) == el(PRIMAL, 3, [1, 3], -1)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_orientation_pairings(n):
    o = Orientation(n)
    assert o.pairing() == 1
    increasing = ExtElement(DUAL, n, {full(n): 1})
    assert contract(increasing, o.primal()).terms[0] == (-1) ** (n * (n - 1) // 2)


# ---------------------------------------------------------------------------
# property suites


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_derivation_formula(n, seed):
    """(a(g))(b) = a ^ g(b) + (-1)^(1 + deg g) g(a ^ b) for deg a = 1."""
    rng = SplitMix64(seed)
    a = rand_el(rng, PRIMAL, n, 1)
    k, m = rng.randrange(n + 1), rng.randrange(n + 1)
    g, b = rand_el(rng, DUAL, n, k), rand_el(rng, PRIMAL, n, m)
    lhs = contract(contract(a, g), b)
    second = contract(g, wedge(a, b))
    rhs = wedge(a, contract(g, b)) + (second if k % 2 else -second)
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_top_degree_swap(n, seed):
    """(a(g))(b) = (-1)^((n - deg a)(n - deg b)) (b(g))(a) for g of top degree."""
    rng = SplitMix64(seed)
    g = rand_el(rng, DUAL, n, n)
    ka, kb = rng.randrange(n + 1), rng.randrange(n + 1)
    a, b = rand_el(rng, PRIMAL, n, ka), rand_el(rng, PRIMAL, n, kb)
    lhs = contract(contract(a, g), b)
    rhs = contract(contract(b, g), a)
    assert lhs == (rhs if (n - ka) * (n - kb) % 2 == 0 else -rhs)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_top_degree_swap_on_all_basis_pairs(n):
    g = el(DUAL, n, range(1, n + 1))
    for ka in range(n + 1):
        for kb in range(n + 1):
            nu = (n - ka) * (n - kb)
            for A in subsets(n, ka):
                for B in subsets(n, kb):
                    a, b = ExtElement(PRIMAL, n, {A: 1}), ExtElement(PRIMAL, n, {B: 1})
                    lhs = contract(contract(a, g), b)
                    rhs = contract(contract(b, g), a)
                    assert lhs == (rhs if nu % 2 == 0 else -rhs)


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_top_degree_target(n, seed):
    """[a(g)](b) = a ^ g(b) when b has top degree."""
    rng = SplitMix64(seed)
    a = rand_el(rng, PRIMAL, n, rng.randrange(n + 1))
    g = rand_el(rng, DUAL, n, rng.randrange(n + 1))
    b = rand_el(rng, PRIMAL, n, n)
    assert contract(contract(a, g), b) == wedge(a, contract(g, b))


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_comult_contraction_doubling(n, seed):
    """sum_j c(alpha_{t-1}^[j]) ^ alpha_1^[j] = 2 (-1)^(t-1) c(alpha_t), deg c = t - 2."""
    rng = SplitMix64(seed)
    t = 2 + rng.randrange(n - 1)
    alpha = rand_el(rng, DUAL, n, t)
    c = rand_el(rng, PRIMAL, n, t - 2)
    lhs = ExtElement(DUAL, n)
    for a1, rest in comult(alpha, (1, t - 1)):
        lhs = lhs + wedge(contract(c, rest), a1)
    rhs = contract(c, alpha).scale(2 if t % 2 else -2)
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_comult_second_order_action(n, seed):
    """sum_i [beta_1^[i](a_2)](beta_{s-1}^[i]) = -2 a_2(beta_s)."""
    rng = SplitMix64(seed)
    s = 2 + rng.randrange(n - 1)
    beta = rand_el(rng, DUAL, n, s)
    a2 = rand_el(rng, PRIMAL, n, 2)
    lhs = ExtElement(DUAL, n)
    for b1, rest in comult(beta, (1, s - 1)):
        lhs = lhs + contract(contract(b1, a2), rest)
    assert lhs == contract(a2, beta).scale(-2)


def _poly_matrix(rng, n):
    """Random n x n matrix of GF(p) polynomials in a small ring."""
    R = poly_ring(2, GF(P))
    gens = [R.u(1), R.u(2), R.v(1), R.x(1, 1), R.x(2, 2)]
    out = []
    for _ in range(n):
        row = []
        for _ in range(n):
            f = R.const(rng.randrange(P))
            for g in gens:
                if rng.random() < 0.4:
                    f = f + g * R.const(rng.randrange(P))
            row.append(f)
        out.append(row)
    return R, out


def _lift(x, R):
    return x.map_coeffs(lambda c: R.const(c))


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_minor_maps_compose_with_actions(n, seed):
    """(wedge^i X*)[((wedge^j X)(b_j))(a_{i+j})] = b_j[(wedge^{i+j} X*)(a_{i+j})]."""
    rng = SplitMix64(seed)
    R, X = _poly_matrix(rng, n)
    mins = Minors(X, R.one())
    j = rng.randrange(n + 1)
    i = rng.randrange(n - j + 1)
    b = _lift(rand_el(rng, PRIMAL, n, j), R)
    a = _lift(rand_el(rng, PRIMAL, n, i + j), R)
    lhs = mins.apply(contract(mins.apply(b), a), transpose=True)
    rhs = contract(b, mins.apply(a, transpose=True))
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_comult_actions_tensor_identity(n, seed):
    """sum_i beta_1^[i](a_t) (x) beta_{s-1}^[i] = sum_j a_{t-1}^[j] (x) a_1^[j](beta_s)."""
    rng = SplitMix64(seed)
    t, s = 1 + rng.randrange(n), 1 + rng.randrange(n)
    a = rand_el(rng, PRIMAL, n, t)
    beta = rand_el(rng, DUAL, n, s)
    lhs = tensor((contract(b1, a), rest) for b1, rest in comult(beta, (1, s - 1)))
    rhs = tensor((rest, contract(a1, beta)) for a1, rest in comult(a, (1, t - 1)))
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_adjoint_operator_tensor_identity(n, seed):
    """Both sides of the (wedge^{n-1} X) / (wedge^{n-1} X*) tensor identity agree."""
    rng = SplitMix64(seed)
    R, X = _poly_matrix(rng, n)
    mins = Minors(X, R.one())
    eta = Orientation(n, R.one()).primal()

    def adj_action(x1, transpose):
        return contract(mins.apply(contract(x1, eta), transpose=transpose), eta)

    t, s = 1 + rng.randrange(n), 1 + rng.randrange(n)
    alpha = _lift(rand_el(rng, DUAL, n, t), R)
    beta = _lift(rand_el(rng, DUAL, n, s), R)
    lhs = tensor((contract(adj_action(b1, False), alpha), rest)
                 for b1, rest in comult(beta, (1, s - 1)))
    rhs = tensor((rest, contract(adj_action(a1, True), beta))
                 for a1, rest in comult(alpha, (1, t - 1)))
    assert lhs == rhs


@pytest.mark.parametrize("n", [2, 3, 4])
@CASES
@given(seed=seeds)
def test_transpose_duality_random(n, seed):
    """[(wedge^j X)(b)](a) = b[(wedge^j X*)(a)] on random vectors."""
    rng = SplitMix64(seed)
    X = rand_matrix(rng, n)
    mins = Minors(X)
    j = rng.randrange(n + 1)
    a, b = rand_el(rng, PRIMAL, n, j), rand_el(rng, PRIMAL, n, j)
    assert scalar(contract(mins.apply(b), a)) == scalar(contract(b, mins.apply(a, transpose=True)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_transpose_duality_all_basis_pairs(n):
    R = poly_ring(n)
    X = [[R.x(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    mins = Minors(X, R.one())
    for j in range(n + 1):
        for A in subsets(n, j):
            for B in subsets(n, j):
                a = ExtElement(PRIMAL, n, {A: R.one()})
                b = ExtElement(PRIMAL, n, {B: R.one()})
                assert scalar(contract(mins.apply(b), a)) == scalar(contract(b, mins.apply(a, transpose=True)))
