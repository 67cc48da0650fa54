from fractions import Fraction

import pytest

from conftest import SAMPLE, evaluate, param_value
from loopweight.crystal import Box, HalfInfMinus, HalfInfPlus, RowTableau, weight_of
from loopweight.monomial import YMonomial, box, m_of_row
from loopweight.representations import (
    EFLModule,
    FusionUndefined,
    Labeled,
    LinComb,
    Tensor,
    closed_form_defined,
    column_module,
    column_vector,
    divided_power_apply,
    efl_module,
    fundamental_minus,
    fundamental_plus,
    fuse,
    fuse_many,
    fusion_defined,
    iso_column_to_efl,
    mode_apply,
    phi_mode_apply,
    rect_module,
    submodule_span,
    truncate,
    vector_rep,
)
from loopweight.scalar import ONE, Q, Q_INV, SpectralParam, qpow

q = SAMPLE["q"]


def Y(i, qexp=0, e=1, base="a"):
    return YMonomial.y(i, SpectralParam(base, qexp), e)


def single(terms):
    assert len(terms) == 1
    return terms[0]


def test_fundamental_plus_examples(a):
    F = fundamental_plus(1, a)
    vac = F.generator()
    t = single(F.x_series(-1, 1, vac))
    assert t.support == a.shift(1) and t.coeff == ONE
    assert t.target == Labeled(HalfInfPlus.from_entries(1, 1, [2]), a)
    for ell in (1, 2, 3):
        F = fundamental_plus(ell, a)
        assert F.lweight(F.generator()) == Y(ell)
        assert all(not F.x_series(1, i, F.generator()) for i in range(-3, ell + 4))


def test_fundamental_minus_examples(a):
    F = fundamental_minus(0, a)
    vac = F.generator()
    assert all(not F.x_series(-1, i, vac) for i in range(-3, 5))
    t = single(F.x_series(1, 0, vac))
    assert t.support == a.shift(-1)
    assert t.target == Labeled(HalfInfMinus.from_entries(0, [0]), a)
    assert F.lweight(vac) == Y(0, 0, -1)


def test_vector_rep_examples(a):
    V = vector_rep(a)
    for j in (-2, 0, 3):
        t = single(V.x_series(-1, j, V.box(j)))
        assert (t.support, t.coeff, t.target) == (a.shift(j), ONE, V.box(j + 1))
        assert V.x_series(-1, j + 1, V.box(j)) == ()
        assert mode_apply(V, -1, j, 0, V.box(j)) == LinComb.of(V.box(j + 1))
        assert V.lweight(V.box(j)) == box(j, a)


@pytest.mark.parametrize("r", [-3, -1, 0, 2, 4])
@pytest.mark.parametrize("j", [-1, 2])
def test_vector_rep_mode_coefficient(a, r, j):
    V = vector_rep(a)
    res = mode_apply(V, -1, j, r, V.box(j))
    assert list(res.coeffs) == [V.box(j + 1)]
    assert evaluate(res.coeffs[V.box(j + 1)]) == SAMPLE["a"] ** r * q ** (j * r)


def test_mode_apply_empty_series(a):
    V = vector_rep(a)
    assert mode_apply(V, 1, 5, 3, V.box(0)).is_zero()


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_efl_examples(a, ell):
    E = efl_module(ell, a)
    gen = E.generator()
    t = single(E.x_series(-1, ell, gen))
    assert t.support == a.shift(1)
    assert t.target == E.label(RowTableau(tuple(range(1, ell)) + (ell + 1,)))
    assert E.lweight(gen) == Y(ell) * Y(0, ell, -1)
    t = single(E.x_series(1, 0, gen))
    assert t.support == a.shift(ell - 1)
    assert t.target == E.label(RowTableau((0,) + tuple(range(2, ell + 1))))
    for i in range(-3, ell + 4):
        if i != 0:
            assert not E.x_series(1, i, gen)


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_efl_lweight_is_row_monomial(a, ell):
    E = efl_module(ell, a)
    for v in E.basis_enum((-2, ell + 1)):
        assert E.lweight(v) == m_of_row(v.tableau, a)
        assert E.weight(v) == weight_of(v.tableau)


def test_phi_mode_examples(a):
    E = efl_module(2, a)
    for v in E.basis_enum((-1, 3)):
        for i in range(-2, 5):
            n = E.weight(v).pairing(i)
            assert phi_mode_apply(E, i, 1, 0, v) == LinComb.of(v, qpow(n))
            assert phi_mode_apply(E, i, -1, 0, v) == LinComb.of(v, qpow(-n))
    V = vector_rep(a)
    far = V.box(5)
    assert phi_mode_apply(V, 0, 1, 0, far) == LinComb.of(far)
    for m in (1, 2, 3):
        assert phi_mode_apply(V, 0, 1, m, far).is_zero()
    # one factor psi(a q^0 q z) at node 1 on [[1]]_a: mode 1 is (q - q^-1) a q
    res = phi_mode_apply(V, 1, 1, 1, V.box(1))
    assert res == LinComb.of(V.box(1), (Q - Q_INV) * a.scalar() * Q)


def test_divided_powers(a):
    k = 3
    C = column_module(k, a)
    parent = fuse_many([vector_rep(a.shift(-2 * m)) for m in range(k)])
    s = 2
    v = Tensor(tuple(Labeled(Box(s), a.shift(2 * m)) for m in range(k)))
    # the q-segment aq^{2m} in increasing order makes the column of equal boxes reachable
    P = fuse_many([vector_rep(a.shift(2 * m)) for m in range(k)])
    res = divided_power_apply(P, s, -1, k, v)
    target = Tensor(tuple(Labeled(Box(s + 1), a.shift(2 * m)) for m in range(k)))
    assert res == LinComb.of(target)
    assert divided_power_apply(P, s, -1, 0, v) == LinComb.of(v)
    assert divided_power_apply(P, s, -1, k + 1, v).is_zero()
    assert C.generator() == column_vector([1, 2, 3], a)
    assert parent.contains(C.generator())


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_fusion_defined_closed_form(ell):
    for d in range(-2 * ell - 2, 2 * ell + 3):
        assert fusion_defined(ell, d) == closed_form_defined(ell, d)
    assert fusion_defined(ell, None)


def test_fusion_defined_examples():
    assert [d for d in range(-4, 5) if not fusion_defined(1, d)] == [0]
    assert [d for d in range(-6, 7) if not fusion_defined(2, d)] == [-2, 0, 2]


def test_fusion_undefined_raises(a):
    F = fuse(efl_module(1, a), efl_module(1, a))
    v = Tensor((Labeled(RowTableau((0,)), a), Labeled(RowTableau((0,)), a)))
    with pytest.raises(FusionUndefined) as exc:
        F.x_series(-1, 0, v)
    assert exc.value.point == a and exc.value.node == 0


def test_two_factor_fusion_of_fundamentals_is_defined(a):
    ell = 2
    F = fuse(fundamental_plus(ell, a), fundamental_minus(0, a.shift(ell)))
    for v in F.basis_enum((-1, 3)):
        for i in range(-1, 4):
            for sign in (1, -1):
                assert all(order >= 0 for _, order in F.pole_orders(sign, i, v))


def test_generic_fusion_in_fraction_field(a, b):
    F = fuse(efl_module(1, a), efl_module(1, b))
    v = F.generator()
    res = mode_apply(F, -1, 1, 0, v)
    assert len(res) == 2
    coeffs = [evaluate(c) for c in res.coeffs.values()]
    assert all(c != 0 for c in coeffs)
    # at least one coefficient depends on the ratio a/b
    assert any(not c.is_laurent() for c in res.coeffs.values())


def flat_lincomb(res: LinComb) -> dict:
    return {Tensor(v.flat()): c for v, c in res.coeffs.items()}


def test_fusion_nesting_agrees(a, b):
    A, B, C = efl_module(1, a), efl_module(1, b), vector_rep(a.shift(-4))
    left, right, flat = fuse(fuse(A, B), C), fuse(A, fuse(B, C)), fuse_many([A, B, C])
    window = (0, 2)
    for fv in flat.basis_enum(window):
        x, y, z = fv.factors
        lv, rv = Tensor((Tensor((x, y)), z)), Tensor((x, Tensor((y, z))))
        assert left.lweight(lv) == right.lweight(rv) == flat.lweight(fv)
        for i in range(-1, 3):
            for sign in (1, -1):
                for r in (-1, 0, 2):
                    want = flat_lincomb(mode_apply(flat, sign, i, r, fv))
                    assert flat_lincomb(mode_apply(left, sign, i, r, lv)) == want
                    assert flat_lincomb(mode_apply(right, sign, i, r, rv)) == want


@pytest.mark.parametrize("ell,n", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_truncate_counts(a, ell, n):
    from math import comb

    T = truncate(efl_module(ell, a), (-n, ell + n))
    assert len(T) == comb(2 * n + ell + 2, ell)
    entries = {x for v in T.basis for x in v.tableau.entries}
    assert min(entries) == -n and max(entries) == ell + n + 1
    assert set(T.basis) == set(efl_module(ell, a).basis_enum((-n, ell + n)))


def test_truncate_single_node_string(a):
    for ell in (1, 2, 3):
        T = truncate(efl_module(ell, a), (ell, ell))
        assert len(T) == 2


def test_submodule_span_column_and_rect(a):
    C = column_module(2, a)
    rep = submodule_span(C.parent, C.pred, (-1, 3), modes=1)
    assert rep["ok"], rep
    R = rect_module(2, 2, a)
    rep = submodule_span(R.parent, R.pred, (0, 2), modes=1)
    assert rep["ok"], rep


def test_submodule_span_reports_violation(a):
    C = column_module(2, a)
    # a predicate that is not stable: first entry at most 1
    rep = submodule_span(C.parent, lambda v: C.pred(v) and v.factors[0].tableau.v <= 1, (-1, 3))
    assert not rep["ok"] and rep["violations"]


@pytest.mark.parametrize("k", [2, 3])
def test_iso_column_to_efl(a, k):
    rep = iso_column_to_efl(k, a, (-1, k + 1), modes=1)
    assert rep["ok"], rep["mismatches"]


def test_iso_column_examples(a):
    assert column_vector([1, 2], a) == Tensor((Labeled(Box(1), a), Labeled(Box(2), a.shift(-2))))
    C = column_module(2, a)
    E = EFLModule(2, a.shift(-1))
    lhs = mode_apply(C, -1, 2, 0, column_vector([1, 2], a))
    rhs = mode_apply(E, -1, 2, 0, E.label(RowTableau((1, 2))))
    assert list(rhs.coeffs) == [E.label(RowTableau((1, 3)))]
    assert lhs == LinComb({column_vector([1, 3], a): rhs.coeffs[E.label(RowTableau((1, 3)))]})
    # phi eigen: monomial of Row(1,2) at base a q^-1 equals the product of boxes
    assert C.lweight(column_vector([1, 2], a)) == m_of_row(RowTableau((1, 2)), a.shift(-1))
    assert C.lweight(column_vector([1, 2], a)) == box(1, a) * box(2, a.shift(-2))


def test_scalar_evaluation_consistency(a):
    # the conftest oracle agrees with direct parameter values
    assert evaluate(a.shift(3).scalar()) == param_value(a.shift(3))
    assert param_value(a) == Fraction(SAMPLE["a"])
