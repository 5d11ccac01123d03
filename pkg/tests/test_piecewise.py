"""Piecewise polynomial layer.

Two oracles cross-check the calculus routines.  Integration is verified
against Newton-Cotes weights computed here by solving the moment equations
with exact Gaussian elimination, a path that shares no code with the
antiderivative-based implementation.  Products and reflections are verified
pointwise at random rational times.
"""

import random

import pytest
from hypothesis import given, strategies as st

from abelmult.exact import ParamPoly, rat_make, variables
from abelmult.piecewise import PiecewisePoly, pl_from_slopes

R = rat_make


def solve_exact(rows, rhs):
    """Gaussian elimination over the rationals (oracle helper)."""
    n = len(rows)
    m = [list(row) + [r] for row, r in zip(rows, rhs)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col])
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for i in range(n):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
    return [m[i][n] for i in range(n)]


def quad_oracle(f: PiecewisePoly, npoints: int = 6) -> object:
    """Integrate over [0,1] by per-segment Newton-Cotes, exact for
    polynomial degree < npoints."""
    total = ParamPoly.zero(f.symbols)
    # open nodes: strictly interior to each segment, so the right-continuous
    # evaluation convention never reads the neighboring segment
    nodes = [R(i + 1, npoints + 1) for i in range(npoints)]
    # moment equations: sum_i w_i x_i^k = 1/(k+1) for k < npoints
    rows = [[x**k for x in nodes] for k in range(npoints)]
    rhs = [R(1, k + 1) for k in range(npoints)]
    weights = solve_exact(rows, rhs)
    for u, v in zip(f.breakpoints, f.breakpoints[1:]):
        h = v - u
        for w, x in zip(weights, nodes):
            total = total + (w * h) * f.value_at(u + h * x)
    return total


def symbolic_pl():
    a, b, c = variables("a b c")
    return pl_from_slopes(b, [a, c], [R(1, 2)])


# -- construction -------------------------------------------------------------


def test_from_poly_and_eval():
    f = PiecewisePoly.from_poly((), [-1, 2])  # 2t - 1
    assert f.eval_num(0) == -1 and f.eval_num(1) == 1 and f.eval_num(R(1, 2)) == 0
    assert f.degree() == 1 and f.is_piecewise_linear()


def test_pl_from_slopes_continuity_and_values():
    f = pl_from_slopes(0, [0, 2], [R(1, 2)], symbols=())
    assert f.is_continuous()
    assert f.eval_num(R(1, 4)) == 0
    assert f.eval_num(R(3, 4)) == R(1, 2)
    assert f.eval_num(1) == 1


def test_pl_uniform_grid_offsets():
    # On the k-th piece of a uniform n-piece grid the offset is
    # intercept + (m_1 + ... + m_{k-1} - (k-1) m_k) / n.
    rng = random.Random(3)
    n = 5
    slopes = [R(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(n)]
    b0 = R(7, 3)
    f = pl_from_slopes(b0, slopes, [R(i, n) for i in range(1, n)], symbols=())
    for k in range(1, n + 1):
        expected_off = b0 + R(1, n) * (sum(slopes[: k - 1], R(0)) - (k - 1) * slopes[k - 1])
        off, slope = f.segment_linear(k - 1)
        assert slope.constant_value() == slopes[k - 1]
        assert off.constant_value() == expected_off


def test_pl_argument_validation():
    with pytest.raises(ValueError):
        pl_from_slopes(0, [1, 2], [], symbols=())
    with pytest.raises(ValueError):
        pl_from_slopes(0, [1, 2], [R(3, 2)], symbols=())
    with pytest.raises(ValueError):
        pl_from_slopes(0, [1], [], symbols=None)


def test_breakpoint_validation():
    with pytest.raises(ValueError):
        PiecewisePoly((), (0, R(1, 2)), ((),))
    with pytest.raises(ValueError):
        PiecewisePoly((), (0, R(1, 2), R(1, 2), 1), ((), (), ()))


# -- arithmetic ---------------------------------------------------------------


def test_alignment_of_different_grids():
    f = pl_from_slopes(0, [1, -1], [R(1, 2)], symbols=())
    g = pl_from_slopes(0, [2, 0, 2], [R(1, 3), R(2, 3)], symbols=())
    s = f + g
    assert s.breakpoints == (0, R(1, 3), R(1, 2), R(2, 3), 1)
    for t in (0, R(1, 5), R(2, 5), R(3, 5), R(4, 5), 1):
        assert s.eval_num(t) == f.eval_num(t) + g.eval_num(t)


def test_product_pointwise_oracle():
    rng = random.Random(11)
    f = symbolic_pl()
    g = PiecewisePoly.from_poly(f.symbols, [ParamPoly.variable(f.symbols, "c"), ParamPoly.const(f.symbols, 3), ParamPoly.variable(f.symbols, "a")])
    h = f * g
    for _ in range(20):
        t = R(rng.randint(0, 24), 24)
        pt = {s: R(rng.randint(-5, 5), rng.randint(1, 4)) for s in f.symbols}
        assert h.eval_num(t, pt) == f.eval_num(t, pt) * g.eval_num(t, pt)


def test_refine_is_a_no_op_for_values():
    f = symbolic_pl()
    g = f.refine([R(1, 3), R(5, 7)])
    assert g == f and f == g
    assert g.breakpoints == (0, R(1, 3), R(1, 2), R(5, 7), 1)


def test_scalar_and_parampoly_scaling():
    f = symbolic_pl()
    (lam,) = variables("a b c")[:1]
    assert (2 * f).eval_num(R(1, 3), {"a": 1, "b": 2, "c": 0}) == 2 * f.eval_num(R(1, 3), {"a": 1, "b": 2, "c": 0})
    assert (lam * f).value_at(R(3, 4)) == lam * f.value_at(R(3, 4))


# -- calculus -----------------------------------------------------------------


def test_antiderivative_basics():
    B = PiecewisePoly.from_poly((), [-1, 2])
    Bbar = B.antiderivative()
    assert Bbar.eval_num(0) == 0
    assert Bbar == PiecewisePoly.from_poly((), [0, -1, 1])  # t^2 - t
    assert B.integrate01() == ParamPoly.zero(())
    assert Bbar.integrate01().constant_value() == R(-1, 6)


def test_antiderivative_glues_continuously():
    f = symbolic_pl()
    F = f.antiderivative()
    assert F.is_continuous()
    assert F.value_at(0).is_zero
    assert F.derivative() == f
    # linearity
    g = f * f
    assert (f + g).antiderivative() == f.antiderivative() + g.antiderivative()


def test_integral_matches_quadrature_oracle():
    rng = random.Random(5)
    a, b, c = variables("a b c")
    f = pl_from_slopes(b, [a, c], [R(1, 2)])
    cases = [f, f * f, f * f * f, f.antiderivative() * f]
    for g in cases:
        assert g.integrate01() == quad_oracle(g)
    # random numeric piecewise cubics on a random grid
    for _ in range(10):
        cuts = sorted({R(rng.randint(1, 9), 10) for _ in range(2)})
        bps = [R(0), *cuts, R(1)]
        segs = [
            tuple(ParamPoly.const((), R(rng.randint(-8, 8), rng.randint(1, 5))) for _ in range(4))
            for _ in bps[:-1]
        ]
        g = PiecewisePoly((), bps, segs)
        assert g.integrate01() == quad_oracle(g)


def test_integral_additive_over_refinement():
    f = symbolic_pl()
    assert f.refine([R(1, 7), R(6, 7)]).integrate01() == f.integrate01()


def test_symbolic_pl_integral_closed_form():
    f = symbolic_pl()
    a, b, c = variables("a b c")
    assert f.integrate01() == R(3, 8) * a + b + R(1, 8) * c


# -- transforms ----------------------------------------------------------------


def test_reflect_pointwise():
    f = symbolic_pl()
    g = f.reflect()
    rng = random.Random(2)
    for _ in range(12):
        t = R(rng.randint(0, 16), 16)
        assert g.value_at(t) == f.value_at(1 - t)
    assert g.reflect() == f


def test_substitute():
    f = symbolic_pl()
    g = f.substitute({"a": 2, "b": 0, "c": -2})
    assert g.eval_num(R(1, 4)) == R(1, 2)
    assert g.eval_num(R(3, 4)) == R(1, 2)
    h = f.substitute({"b": 0}, partial=True)
    assert h.symbols == f.symbols


# -- hypothesis: piecewise ring laws -------------------------------------------

rats = st.builds(R, st.integers(-12, 12), st.integers(1, 6))


@st.composite
def numeric_pw(draw):
    ncuts = draw(st.integers(0, 2))
    cuts = sorted(draw(st.sets(st.sampled_from([R(i, 8) for i in range(1, 8)]), min_size=ncuts, max_size=ncuts)))
    bps = [R(0), *cuts, R(1)]
    segs = []
    for _ in bps[:-1]:
        deg = draw(st.integers(0, 2))
        segs.append(tuple(ParamPoly.const((), draw(rats)) for _ in range(deg + 1)))
    return PiecewisePoly((), bps, segs)


@given(numeric_pw(), numeric_pw(), numeric_pw())
def test_pw_ring_laws(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) * h == f * h + g * h
    assert (f - f).is_zero


@given(numeric_pw(), numeric_pw())
def test_pw_integral_linear(f, g):
    assert (f + g).integrate01() == f.integrate01() + g.integrate01()
    assert (3 * f).integrate01() == 3 * f.integrate01()


@given(numeric_pw())
def test_pw_antiderivative_fundamental(f):
    F = f.antiderivative()
    assert F.is_continuous()
    assert F.value_at(0).is_zero
    assert F.derivative() == f
    assert F.value_at(1) == f.integrate01()
