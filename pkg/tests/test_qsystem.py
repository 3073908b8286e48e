import itertools
import random
from fractions import Fraction

import pytest

from spinorchain.qpoly import (
    GR_ONE,
    GaussianRational,
    RationalFunction,
    ShiftedPolynomial,
    fused_power,
    wronskian,
)
from spinorchain.qsystem import (
    QSystemState,
    check_kinematic,
    derive_psi_ab,
    exact_lattice_state,
    mutate_lattice_state,
    pair_consistent_psis,
    random_lattice_state,
    verify_identities,
    weyl_covariance_check,
    SigmaCalculus,
)

U = ShiftedPolynomial.variable()
ONE = ShiftedPolynomial([GR_ONE])


def gr(re, im=0):
    return GaussianRational(re, im)


def test_identity_suite_r3_r4():
    for r in (3, 4):
        rng = random.Random(100 * r)
        st = random_lattice_state(r, rng, max_deg=4, half_window=30)
        rep = verify_identities(st, tol=1e-7)
        bad = {k: v.max_residual for k, v in rep.items() if v.status != "pass"}
        assert not bad, bad


def test_identity_suite_r5():
    rng = random.Random(503)
    st = random_lattice_state(5, rng, max_deg=4, half_window=30)
    rep = verify_identities(st, tol=3e-6)
    bad = {k: v.max_residual for k, v in rep.items() if v.status != "pass"}
    assert not bad, bad


def test_identity_suite_exact_lattice():
    rng = random.Random(11)
    st = exact_lattice_state(3, rng, max_deg=2, half_window=14)
    rep = verify_identities(st, tol=0.0)
    assert all(v.status == "pass" for v in rep.values())
    assert all(v.max_residual == 0.0 for v in rep.values())


def test_mutation_breaks_identities():
    rng = random.Random(42)
    flips = 0
    for _ in range(5):
        st = random_lattice_state(4, rng, max_deg=4, half_window=28)
        mut = mutate_lattice_state(st, rng, 1e-3)
        rep = verify_identities(mut, tol=1e-7)
        if any(v.status == "fail" for v in rep.values()):
            flips += 1
    assert flips == 5


def test_weyl_covariance_exact():
    rng = random.Random(77)
    st = exact_lattice_state(4, rng, max_deg=3, half_window=14)
    for kind, idx in [("s_ab-A", (1, 2)), ("s_ab-B", (2, 4)), ("s_a", (3,)),
                      ("elementary", (4,))]:
        rep = weyl_covariance_check(st, kind, idx, tol=0.0)
        bad = {k: v.max_residual for k, v in rep.items() if v.status != "pass"}
        assert not bad, (kind, idx, bad)


def test_derive_psi_ab_antisymmetry_and_vacuum():
    # equal arguments: zero two-form
    p, c = derive_psi_ab(ONE, U, U, ONE, ONE, 0)
    assert p.is_zero()
    # trivial-denominator case: any pair works, result matches by resubstitution
    rng = random.Random(3)
    pa = ShiftedPolynomial([gr(1), gr(2), GR_ONE])
    pb = ShiftedPolynomial([gr(-1, 1), GR_ONE])
    psiab, c = derive_psi_ab(ONE, pa, pb, ONE, ONE, 3)
    resid = wronskian([psiab, ONE]) - wronskian([pa, pb]).scale(c)
    assert resid.is_zero()
    # gauge: coefficient at u^{M_0} vanishes
    assert psiab.coeff(0) == GaussianRational(0)


def test_derive_psi_ab_exact_solved_point():
    # so(8) L=2 singlet-sector golden data: psi_0 = u, known psi_a shapes are
    # exercised end to end in the solver tests; here check consistency of the
    # pair solve against an independently constructed instance
    rng = random.Random(8)
    psi0 = U * U + ShiftedPolynomial([gr(Fraction(1, 5))])
    psis = pair_consistent_psis(3, rng, psi0)
    for i, j in itertools.combinations(range(3), 2):
        Mab = psis[i].degree + psis[j].degree - psi0.degree
        psiab, c = derive_psi_ab(psi0, psis[i], psis[j], ONE, ONE, Mab)
        resid = wronskian([psiab, psi0]) - wronskian([psis[i], psis[j]]).scale(c)
        assert resid.is_zero()
        assert psiab.is_monic() and psiab.degree == Mab
        assert not psiab.coeff(psi0.degree)


def test_lemma3_divisibility_exact():
    rng = random.Random(21)
    psi0 = U * U - ShiftedPolynomial([gr(Fraction(2, 7), Fraction(1, 3))])
    for r in (3, 4):
        psis = pair_consistent_psis(r, rng, psi0)
        for k in range(3, r + 1):
            for sub in itertools.combinations(range(r), k):
                w = wronskian([psis[s] for s in sub])
                q, rem = w.divrem(fused_power(psi0, k - 2))
                assert rem.is_zero(), (r, sub)


def test_shift_window_independence_exact():
    rng = random.Random(31)
    psi0 = U * U + ShiftedPolynomial([gr(Fraction(3, 4))])
    r = 4
    psis = pair_consistent_psis(r, rng, psi0)
    psi2 = {}
    for i, j in itertools.combinations(range(r), 2):
        Mab = psis[i].degree + psis[j].degree - psi0.degree
        psiab, c = derive_psi_ab(psi0, psis[i], psis[j], ONE, ONE, Mab)
        psi2[(i + 1, j + 1)] = psiab.scale(GR_ONE / c)
    st = QSystemState(
        r,
        RationalFunction(psi0),
        {a + 1: RationalFunction(psis[a]) for a in range(r)},
        {ab: RationalFunction(p) for ab, p in psi2.items()},
        "lattice",
        exact=True,
    )
    for A, B in [((1,), ()), ((2,), (3,)), ((1, 2), ())]:
        s = len(A) + len(B)
        base = st.v_mixed(A, B, r - 1 - s)
        for m in range(r - 3 - s, -r + s, -2):
            assert (st.v_mixed(A, B, m) - base).is_zero(), (A, B, m)


def test_check_kinematic_exact_instances():
    rng = random.Random(55)
    psi0 = U * U + ShiftedPolynomial([gr(Fraction(1, 2))])
    r = 4
    psis = pair_consistent_psis(r, rng, psi0)
    drinfeld = [ONE] * r
    ok, witness = check_kinematic(r, psi0, {a + 1: psis[a] for a in range(r)}, drinfeld)
    assert ok and witness is None


def test_check_kinematic_detects_violation():
    # random unrelated one-forms are generically not divisible
    rng = random.Random(60)
    psi0 = U * U + ShiftedPolynomial([gr(Fraction(1, 2))])
    bad = {a: ShiftedPolynomial([gr(rng.randint(-3, 3)) for _ in range(4)] + [GR_ONE])
           for a in range(1, 5)}
    ok, witness = check_kinematic(4, psi0, bad, [ONE] * 4)
    assert not ok and witness is not None


def test_sigma_calculus_rank_condition():
    # the dressing of the rank-r Wronskian condition reduces to the interior
    # Drinfeld product: sigma_{r-1}^{[r]_D} / sigma_r^{[r-2]_D} -> P_a^{[a]_D}
    r = 4
    calc = SigmaCalculus(r)
    tag = {}
    for k in range(1, r + 1):
        tag[(r - 1, r + 1 - 2 * k)] = tag.get((r - 1, r + 1 - 2 * k), 0) + 1
    for k in range(1, r - 1):
        tag[(r, r - 1 - 2 * k)] = tag.get((r, r - 1 - 2 * k), 0) - 1
    factors = calc.reduce(tag)
    got = {}
    for a, k, e in factors:
        got.setdefault(a, {})[k] = e
    # the stripped combination equals the inverse interior Drinfeld product
    expect = {a: {a + 1 - 2 * k: -1 for k in range(1, a + 1)} for a in range(1, r)}
    assert got == expect
