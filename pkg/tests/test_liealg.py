import itertools
from fractions import Fraction

import pytest

from spinorchain import liealg as la


def W(*cs):
    return la.weight(*cs)


def test_weyl_vector():
    assert la.weyl_vector(4) == W(3, 2, 1, 0)
    assert la.weyl_vector(2) == W(1, 0)
    assert la.weyl_vector(5) == W(4, 3, 2, 1, 0)


def test_fundamental_weights():
    assert la.fundamental_weight(4, 1) == W(1, 0, 0, 0)
    assert la.fundamental_weight(4, 4) == W("1/2", "1/2", "1/2", "1/2")
    assert la.fundamental_weight(4, 3) == W("1/2", "1/2", "1/2", "-1/2")


def test_dim_irrep_fundamentals():
    assert la.dim_irrep(4, la.fundamental_weight(4, 1)) == 8
    assert la.dim_irrep(4, la.fundamental_weight(4, 4)) == 8
    # independent oracle for dim L(w_2): brute-force weight count of the
    # antisymmetric square of the vector rep minus the singlet
    counts = {}
    vec = [W(*[1 if i == j else 0 for i in range(4)]) for j in range(4)]
    vec += [tuple(-c for c in v) for v in vec]
    for a, b in itertools.combinations(range(8), 2):
        w = tuple(x + y for x, y in zip(vec[a], vec[b]))
        counts[w] = counts.get(w, 0) + 1
    assert sum(counts.values()) == 28
    assert la.dim_irrep(4, la.fundamental_weight(4, 2)) == 28


def test_dim_irrep_rejects_non_dominant():
    with pytest.raises(ValueError):
        la.dim_irrep(4, W(0, 1, 0, 0))


def test_weight_multiplicities_vector_and_adjoint():
    wm = la.weight_multiplicities(4, la.fundamental_weight(4, 1))
    assert sum(wm.values()) == 8
    assert all(m == 1 for m in wm.values())
    adj = la.weight_multiplicities(4, W(1, 1, 0, 0))
    assert sum(adj.values()) == 28
    assert adj[W(0, 0, 0, 0)] == 4  # Cartan directions


def test_yangian_fundamental():
    d = la.yangian_fundamental(4, 2)
    assert d == {la.fundamental_weight(4, 2): 1, W(0, 0, 0, 0): 1}
    assert la.yangian_fundamental(4, 4) == {la.fundamental_weight(4, 4): 1}
    d = la.yangian_fundamental(5, 3)
    assert d == {la.fundamental_weight(5, 3): 1, la.fundamental_weight(5, 1): 1}
    with pytest.raises(ValueError):
        la.yangian_fundamental(4, 5)


def test_yangian_module_dimensions():
    for r in (3, 4, 5):
        for a in range(1, r + 1):
            total = sum(
                m * la.dim_irrep(r, lam) for lam, m in la.yangian_fundamental(r, a).items()
            )
            weights = la.yangian_weights(r, a)
            assert sum(weights.values()) == total


def test_chain_multiplicities_so8_vector_l2():
    d = la.chain_multiplicities(4, [1, 1])
    assert sum(d.values()) == 3
    assert d[W(0, 0, 0, 0)] == 1
    # dimension conservation
    assert sum(m * la.dim_irrep(4, lam) for lam, m in d.items()) == 64


def test_chain_multiplicities_so8_node2_l2():
    d = la.chain_multiplicities(4, [2, 2])
    assert sum(d.values()) == 10
    assert sum(m * la.dim_irrep(4, lam) for lam, m in d.items()) == 29 * 29


def test_chain_multiplicities_table1_totals():
    # homogeneous so(8) chains, counts from independent representation theory
    assert sum(la.chain_multiplicities(4, [1] * 3).values()) == 7
    assert sum(la.chain_multiplicities(4, [1] * 4).values()) == 26
    assert sum(la.chain_multiplicities(4, [3, 3]).values()) == 3
    assert sum(la.chain_multiplicities(4, [4, 4, 4]).values()) == 7
    assert sum(la.chain_multiplicities(4, [3] * 3).values()) == 7


def test_chain_multiplicities_table2_totals():
    assert sum(la.chain_multiplicities(5, [1, 1]).values()) == 3
    assert sum(la.chain_multiplicities(5, [2, 2]).values()) == 9
    assert sum(la.chain_multiplicities(5, [3, 3]).values()) == 20
    assert sum(la.chain_multiplicities(5, [4, 4]).values()) == 3
    assert sum(la.chain_multiplicities(5, [5, 5]).values()) == 3


def test_chain_multiplicities_node_permutation_invariant():
    a = la.chain_multiplicities(4, [1, 2, 1])
    b = la.chain_multiplicities(4, [1, 1, 2])
    assert a == b


def test_dimension_conservation_random():
    for r, nodes in [(3, [1, 2, 3]), (4, [2, 4]), (5, [1, 5])]:
        d = la.chain_multiplicities(r, nodes)
        lhs = sum(m * la.dim_irrep(r, lam) for lam, m in d.items())
        assert lhs == la.chain_dimension(r, nodes)


def test_component_weights():
    r = 4
    assert la.component_weight(r, ("psiA", ())) == la.fundamental_weight(r, r)
    for a in range(1, r + 1):
        got = la.component_weight(r, ("psi", a))
        expect = tuple(
            x - (1 if b == a else 0)
            for b, x in enumerate(la.fundamental_weight(r, r), start=1)
        )
        assert got == expect
    assert la.component_weight(r, ("v", (-2,))) == W(0, -1, 0, 0)


def test_magnon_degrees_so8_vector_l2():
    degs = la.magnon_degrees(4, [2, 0, 0, 0], W(0, 0, 0, 0))
    assert degs[("psi0",)] == 1
    assert [degs[("psi", a)] for a in (1, 2, 3, 4)] == [4, 3, 2, 1]


def test_magnon_degrees_vacuum_highest_components():
    for r, dd in [(4, [2, 0, 0, 0]), (5, [0, 0, 2, 0, 0]), (4, [0, 0, 0, 3])]:
        lam = la.lambda_max(r, dd)
        degs = la.magnon_degrees(r, dd, lam)
        assert all(degs[("q1", a)] == 0 for a in range(1, r + 1))


def test_magnon_degrees_weakly_decreasing():
    r = 4
    degs = la.magnon_degrees(r, [2, 0, 0, 0], W(1, 1, 0, 0))
    seq = [degs[("psi", a)] for a in range(1, r + 1)]
    assert all(x > y for x, y in zip(seq, seq[1:]))


def test_kr_vector_decomposition():
    d = la.kr_vector_decomposition(4, 2)
    assert d == {W(2, 0, 0, 0): 1, W(0, 0, 0, 0): 1}
    total = sum(la.dim_irrep(4, lam) for lam in d)
    assert total == 36


def test_gl_branching_spinor():
    # so(8) Weyl spinor (even forms) restricted to gl(4): ranks 0, 2, 4
    half = Fraction(1, 2)
    br = la.gl_branching(4, la.fundamental_weight(4, 4))
    assert sum(
        br.get(w, 0) for w in br
    ) == 3
    tops = sorted(br)
    assert tuple(tops[-1]) == (half, half, half, half)
    # total dimension must match
    from math import comb
    dims = 0
    for lam, m in br.items():
        shift = sum(lam) / 4
        base = tuple(c - shift for c in lam)
        # dimension via Weyl formula for A_3
        rho = (Fraction(3, 2), Fraction(1, 2), Fraction(-1, 2), Fraction(-3, 2))
        num = den = Fraction(1)
        for i in range(4):
            for j in range(i + 1, 4):
                num *= (base[i] + rho[i]) - (base[j] + rho[j])
                den *= rho[i] - rho[j]
        dims += m * int(num / den)
    assert dims == 8
