"""Variational recursion layer.

The two expansions are computed by independent recursions: the inverse-map
sequence V_k integrates a linear three-term relation while the solution
sequence a_n integrates self-convolutions.  Their boundary values are tied
by a_k(1) = -V_k(1)/k modulo the ideal of the earlier boundary values, and
that cross-check is the main oracle here.  The closed-form integral
quantities for two-piece linear coefficients are checked against the same
pipeline at several rational switch times.
"""

import pytest
from hypothesis import given, settings, strategies as st

from abelmult.exact import ParamPoly, parse_poly, rat_make, variables
from abelmult.groebner import GREVLEX, LEX, buchberger, ideal_equal
from abelmult.piecewise import PiecewisePoly, pl_from_slopes
from abelmult.variational import (
    EquationSpec,
    a_sequence,
    eta345_closed,
    eta_sequence,
    multiplicity_at,
    rescale,
    v_sequence,
)

R = rat_make

rationals = st.builds(rat_make, st.integers(-9, 9), st.integers(1, 4))


def cubic_22():
    """B = a + 2bt + 3ct^2, A = d + 2et + 3ft^2 over six parameters."""
    a, b, c, d, e, f = variables("a b c d e f")
    sym = a.symbols
    B = PiecewisePoly.from_poly(sym, (a, 2 * b, 3 * c))
    A = PiecewisePoly.from_poly(sym, (d, 2 * e, 3 * f))
    return EquationSpec.cubic(A, B)


def quartic_12():
    """B = a(2t - 1), A = b + 2ct."""
    a, b, c = variables("a b c")
    sym = a.symbols
    B = PiecewisePoly.from_poly(sym, (-a, 2 * a))
    A = PiecewisePoly.from_poly(sym, (b, 2 * c))
    return EquationSpec.quartic(A, B)


# -- the two recursions against each other ------------------------------------


@pytest.mark.parametrize("eq", [cubic_22(), quartic_12()], ids=["cubic", "quartic"])
def test_duality_modulo_earlier(eq):
    # a_k(1) + V_k(1)/k lies in the ideal of the earlier boundary values
    K = 6
    vs = v_sequence(eq, K)
    az = a_sequence(eq, K)
    for k in range(2, K + 1):
        earlier = [vs.boundary_value(i) for i in range(2, k)]
        gb = buchberger([g for g in earlier if not g.is_zero])
        defect = az.boundary_value(k) + R(1, k) * vs.boundary_value(k)
        if gb.generators:
            defect = gb.reduce(defect)
        assert defect.is_zero


def test_duality_exact_when_earlier_vanish():
    # with B of zero mean and A constant, V_2(1) = 0 and the k = 3 tie is exact
    a, b = variables("a b")
    sym = a.symbols
    B = PiecewisePoly.from_poly(sym, (a, -2 * a))
    A = PiecewisePoly.from_poly(sym, (b,))
    eq = EquationSpec.cubic(A, B)
    vs = v_sequence(eq, 3)
    az = a_sequence(eq, 3)
    assert vs.boundary_value(2).is_zero
    assert az.boundary_value(3) == -R(1, 3) * vs.boundary_value(3)


# -- closed-form boundary values ----------------------------------------------


def test_v2_is_minus_twice_integral():
    eq = cubic_22()
    a, b, c = (parse_poly(s, eq.symbols) for s in "abc")
    assert v_sequence(eq, 2).boundary_value(2) == -2 * (a + b + c)
    assert eq.quad_coeff.integrate01() == a + b + c


def test_pure_quartic_base_case():
    zero = PiecewisePoly.zero(())
    eq = EquationSpec.quartic(zero, zero)
    vs = v_sequence(eq, 4)
    assert vs.boundary_value(2).is_zero
    assert vs.boundary_value(3).is_zero
    assert vs.boundary_value(4) == -4
    az = a_sequence(eq, 4)
    t = PiecewisePoly.from_poly((), (ParamPoly.zero(()), ParamPoly.const((), 1)))
    assert az.entry(4) == t


def test_scaled_quartic_lead_enters_at_k4():
    k = variables("k")[0]
    sym = k.symbols
    zero = PiecewisePoly.zero(sym)
    eq = EquationSpec.scaled_quartic(zero, zero, k)
    vs = v_sequence(eq, 4)
    assert vs.boundary_value(3).is_zero
    assert vs.boundary_value(4) == -4 * k


@pytest.mark.parametrize("cut", ["2/5", "1/3", "5/7"])
def test_eta345_closed_matches_pipeline(cut):
    # quartic with B = q(2t - 1) and a two-piece linear A switching at the cut:
    # the integral forms agree with the recursion up to the -1/k unit, modulo
    # the earlier boundary values
    q, b0, m1, m2 = variables("q b0 m1 m2")
    sym = q.symbols
    h = R(cut)
    B = PiecewisePoly.from_poly(sym, (-q, 2 * q))
    A = pl_from_slopes(b0, [m1, m2], [h])
    eq = EquationSpec.quartic(A.lift(sym), B)
    vs = v_sequence(eq, 5)

    e3, e4, e5 = eta345_closed(q, b0, m1, m2, ParamPoly.const(sym, h))
    assert vs.boundary_value(3) == -3 * e3.lift(sym)
    g3 = buchberger([vs.boundary_value(3)])
    assert g3.reduce(vs.boundary_value(4) + 4 * e4.lift(sym)).is_zero
    g4 = buchberger([vs.boundary_value(3), vs.boundary_value(4)])
    assert g4.reduce(vs.boundary_value(5) + 5 * e5.lift(sym)).is_zero


def test_eta345_closed_symbolic_cut_specializes():
    # with the cut left symbolic, substituting a rational value afterwards
    # gives the same polynomials as fixing the cut from the start
    q, b0, m1, m2, h = variables("q b0 m1 m2 h")
    sym_free = eta345_closed(q, b0, m1, m2, h)
    for cut in (R(1, 4), R(3, 5)):
        fixed = eta345_closed(q, b0, m1, m2, ParamPoly.const(h.symbols, cut))
        for free_p, fixed_p in zip(sym_free, fixed):
            assert free_p.substitute({"h": cut}, partial=True) == fixed_p


# -- eta chain -----------------------------------------------------------------


def test_eta_chain_reduces_each_step():
    eq = cubic_22()
    es = eta_sequence(eq, 5)
    a, b, c, d, e, f = (parse_poly(s, eq.symbols) for s in "abcdef")
    assert es.eta(2) == -2 * (a + b + c)
    # V_3(1) contains a square of eta_2; the normal form strips it
    assert es.eta(3) == -3 * (d + e + f)
    assert es.basis(3).contains(es.boundary[3])


def test_eta_chain_cubic_22_stabilizes():
    eq = cubic_22()
    es = eta_sequence(eq, 6)
    printed = buchberger(
        [parse_poly(s, eq.symbols) for s in ("e*c - f*b", "a + b + c", "f + e + d")]
    )
    assert ideal_equal(es.basis(4), printed)
    assert es.basis(5).generators == es.basis(4).generators
    assert es.basis(6).generators == es.basis(4).generators
    assert es.first_stable() == 4
    assert es.first_trivial() is None


def test_eta_chain_initial_generators():
    # seeding the chain with a + b + c removes eta_2 from the start
    eq = cubic_22()
    seed = parse_poly("a + b + c", eq.symbols)
    es = eta_sequence(eq, 4, initial_generators=[seed])
    assert es.eta(2).is_zero
    assert es.basis(2).contains(seed)


def test_eta_chain_stops_after_trivial():
    # quartic with constant A = b, B = a: the chain collapses to the whole
    # ring; later etas are recorded as zero without further integration
    a, b = variables("a b")
    sym = a.symbols
    eq = EquationSpec.quartic(
        PiecewisePoly.from_poly(sym, (b,)), PiecewisePoly.from_poly(sym, (a,))
    )
    es = eta_sequence(eq, 8)
    t = es.first_trivial()
    assert t is not None
    for k in range(t + 1, 9):
        assert es.eta(k).is_zero
        assert es.basis(k).is_trivial()


def test_eta_chain_ordering_choice():
    eq = cubic_22()
    es = eta_sequence(eq, 4, ordering=LEX)
    assert es.basis(4).ordering is LEX
    printed = buchberger(
        [parse_poly(s, eq.symbols) for s in ("e*c - f*b", "a + b + c", "f + e + d")],
        LEX,
    )
    assert ideal_equal(es.basis(4), printed)


# -- pointwise multiplicity -----------------------------------------------------


def test_multiplicity_pure_quartic():
    zero = PiecewisePoly.zero(())
    r = multiplicity_at(EquationSpec.quartic(zero, zero), {})
    assert r.status == "resolved"
    assert r.k == 4
    assert r.leading_value == -4
    assert r.stability == "unstable"


def test_multiplicity_sign_rule():
    # z' = -z^3 decays toward 0, z' = z^3 blows up
    sym = ("s",)
    zero = PiecewisePoly.zero(sym)
    s = ParamPoly.variable(sym, "s")
    eq = EquationSpec.cubic(PiecewisePoly.from_poly(sym, (s,)), zero)
    stable = multiplicity_at(eq, {"s": -1})
    unstable = multiplicity_at(eq, {"s": 1})
    assert (stable.k, stable.stability) == (3, "stable")
    assert (unstable.k, unstable.stability) == (3, "unstable")


def test_multiplicity_center_report():
    # odd-symmetric coefficients about t = 1/2 give a center
    sym = ()
    A = PiecewisePoly.from_poly(sym, (ParamPoly.const(sym, -1), ParamPoly.const(sym, 2)))
    B = PiecewisePoly.from_poly(sym, (ParamPoly.const(sym, -3), ParamPoly.const(sym, 6)))
    r = multiplicity_at(EquationSpec.cubic(A, B), {}, kmax=9)
    assert r.status == "center-up-to-kmax"
    assert r.k is None
    assert r.stability == "undetermined"


def test_multiplicity_point_must_close_all_symbols():
    eq = cubic_22()
    with pytest.raises(ValueError):
        multiplicity_at(eq, {"a": 1, "b": 0})


def test_multiplicity_at_cubic_22_point():
    # a - b on the second basis element of the (2,2) chain: the first two
    # conditions hold, the third does not, so the multiplicity is exactly 4
    eq = cubic_22()
    point = {"a": 1, "b": 0, "c": -1, "d": -1, "e": 1, "f": 0}
    r = multiplicity_at(eq, point)
    assert r.k == 4


# -- rescale --------------------------------------------------------------------


def test_rescale_rational_semantics():
    eq = cubic_22()
    r = rescale(eq, 2)
    assert r.family == "cubic"
    assert r.quad_coeff == R(1, 2) * eq.quad_coeff
    assert r.cubic_coeff == R(1, 4) * eq.cubic_coeff

    zero = PiecewisePoly.zero(())
    rq = rescale(EquationSpec.quartic(zero, zero), 2)
    assert rq.family == "scaled-quartic"
    assert rq.lead == ParamPoly.const((), R(1, 8))
    back = rescale(rq, R(1, 2))
    assert back.family == "quartic"


def test_rescale_symbolic_divisor():
    # coefficients built as multiples of u rescale back exactly
    u, w = variables("u w")
    sym = u.symbols
    A = PiecewisePoly.from_poly(sym, (w * u * u,))
    B = PiecewisePoly.from_poly(sym, (u, 3 * u * w))
    eq = EquationSpec.cubic(A, B)
    r = rescale(eq, u)
    assert r.cubic_coeff == PiecewisePoly.from_poly(sym, (w,))
    assert r.quad_coeff == PiecewisePoly.from_poly(sym, (ParamPoly.const(sym, 1), 3 * w))


def test_rescale_rejects_bad_input():
    eq = cubic_22()
    with pytest.raises(ValueError):
        rescale(eq, 0)
    u = parse_poly("a", eq.symbols)
    with pytest.raises(ValueError):
        rescale(eq, u)  # coefficients are not multiples of a


@given(num=st.integers(min_value=-6, max_value=6).filter(bool), den=st.integers(min_value=1, max_value=6))
@settings(max_examples=25, deadline=None)
def test_rescale_preserves_multiplicity(num, den):
    u = R(num, den)
    eq = quartic_12()
    point = {"a": R(1, 2), "b": -1, "c": 1}
    before = multiplicity_at(eq, point, kmax=8)
    after = multiplicity_at(rescale(eq, u), point, kmax=8)
    assert before.k == after.k


# -- construction guards ---------------------------------------------------------


def test_constructors_unify_symbols():
    a = variables("a")[0]
    b = variables("b")[0]
    A = PiecewisePoly.from_poly(a.symbols, (a,))
    B = PiecewisePoly.from_poly(b.symbols, (b,))
    eq = EquationSpec.cubic(A, B)
    assert eq.symbols == ("a", "b")
    assert eq.free_symbols() == ("a", "b")


def test_family_invariants():
    sym = ("a",)
    zero = PiecewisePoly.zero(sym)
    one = ParamPoly.const(sym, 1)
    a = ParamPoly.variable(sym, "a")
    with pytest.raises(ValueError):
        EquationSpec("cubic", zero, zero, one)
    with pytest.raises(ValueError):
        EquationSpec("quartic", zero, zero, a)
    with pytest.raises(ValueError):
        EquationSpec("quintic", zero, zero, one)
    with pytest.raises(ValueError):
        v_sequence(EquationSpec.cubic(zero, zero), 1)


@given(vals=st.lists(rationals, min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
def test_v2_linear_in_quad_coeff(vals):
    # V_2(1) is linear in the z^2 coefficient
    sym = ()
    p, q, r = (PiecewisePoly.from_poly(sym, (ParamPoly.const(sym, v),)) for v in vals)
    zero = PiecewisePoly.zero(sym)

    def v2(quad):
        return v_sequence(EquationSpec.cubic(zero, quad), 2).boundary_value(2)

    assert v2(p + q) == v2(p) + v2(q)
    assert v2(r + r) == 2 * v2(r)
