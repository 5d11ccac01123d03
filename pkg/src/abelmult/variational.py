"""Multiplicity of the zero solution via variational recursions.

The equations handled here are scalar ODEs on the time interval [0, 1]:

    cubic           z' = A(t) z^3 + B(t) z^2
    quartic         z' = z^4 + A(t) z^3 + B(t) z^2
    scaled-quartic  z' = L z^4 + A(t) z^3 + B(t) z^2   (L a parameter)

where A multiplies z^3 (``cubic_coeff``), B multiplies z^2 (``quad_coeff``)
and L is the z^4 coefficient (``lead``).  A periodic solution is one with
z(0) = z(1); the multiplicity of z = 0 is the order of c = 0 as a zero of
the displacement map q(c) = z(1, c) - c.

Two expansions compute it.  The direct one, z(t, c) = sum a_n(t) c^n, obeys
a convolution recursion (``a_sequence``).  The inverse-map expansion
c = sum V_k(t) z^k / k obeys a linear recursion (``v_sequence``):

    V_1 = 1,   V_k = -k * Int_0^t [B V_{k-1} + A V_{k-2} + L V_{k-3}],

with V_j = 0 for j <= 0, the L term absent for cubic equations.  The
multiplicity is the first k with V_k(1) != 0, and when the earlier values
vanish the two expansions are tied by a_k(1) = -V_k(1) / k.

With free parameters, V_k(1) is a polynomial in them.  ``eta_sequence``
reduces each V_k(1) to its normal form eta_k modulo the Groebner basis of
the earlier ones, building the ascending chain of ideals whose stabilization
(or collapse to the whole ring) bounds the multiplicity over a family.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .exact import ParamPoly, Rational, RationalLike, rat_make
from .groebner import GREVLEX, BudgetExceeded, GroebnerBasis, MonomialOrdering, buchberger
from .piecewise import PiecewisePoly, tp_antiderivative, tp_eval, tp_mul

FAMILIES = ("cubic", "quartic", "scaled-quartic")


@dataclass(frozen=True)
class EquationSpec:
    """One equation (or parameterized family) in a fixed symbol tuple."""

    family: str
    cubic_coeff: PiecewisePoly
    quad_coeff: PiecewisePoly
    lead: ParamPoly

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not (self.cubic_coeff.symbols == self.quad_coeff.symbols == self.lead.symbols):
            raise ValueError("coefficient symbol tuples differ; use the constructors")
        if self.family == "cubic" and not self.lead.is_zero:
            raise ValueError("cubic equations have no z^4 term")
        if self.family == "quartic" and self.lead != ParamPoly.const(self.symbols, 1):
            raise ValueError("quartic equations have z^4 coefficient 1")

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.cubic_coeff.symbols

    @staticmethod
    def _unify(parts: Sequence, extra: Sequence[str] = ()) -> tuple[str, ...]:
        names: set[str] = set(extra)
        for p in parts:
            names.update(p.symbols)
        return tuple(sorted(names))

    @classmethod
    def cubic(cls, cubic_coeff: PiecewisePoly, quad_coeff: PiecewisePoly) -> "EquationSpec":
        sym = cls._unify((cubic_coeff, quad_coeff))
        return cls("cubic", cubic_coeff.lift(sym), quad_coeff.lift(sym), ParamPoly.zero(sym))

    @classmethod
    def quartic(cls, cubic_coeff: PiecewisePoly, quad_coeff: PiecewisePoly) -> "EquationSpec":
        sym = cls._unify((cubic_coeff, quad_coeff))
        return cls("quartic", cubic_coeff.lift(sym), quad_coeff.lift(sym), ParamPoly.const(sym, 1))

    @classmethod
    def scaled_quartic(cls, cubic_coeff: PiecewisePoly, quad_coeff: PiecewisePoly, lead: ParamPoly) -> "EquationSpec":
        sym = cls._unify((cubic_coeff, quad_coeff, lead))
        return cls("scaled-quartic", cubic_coeff.lift(sym), quad_coeff.lift(sym), lead.lift(sym))

    def substitute(self, assignment: Mapping[str, RationalLike], partial: bool = False) -> "EquationSpec":
        return EquationSpec(
            self.family,
            self.cubic_coeff.substitute(assignment, partial=partial),
            self.quad_coeff.substitute(assignment, partial=partial),
            self.lead.substitute(assignment, partial=partial),
        )

    def free_symbols(self) -> tuple[str, ...]:
        used: set[str] = set(self.lead.used_symbols())
        for pw in (self.cubic_coeff, self.quad_coeff):
            for seg in pw.segments:
                for c in seg:
                    used.update(c.used_symbols())
        return tuple(s for s in self.symbols if s in used)


def _v_iter(eq: EquationSpec) -> Iterator[tuple[int, PiecewisePoly]]:
    """Yield (k, V_k) for k = 1, 2, 3, ... lazily."""
    sym = eq.symbols
    vs: dict[int, PiecewisePoly] = {1: PiecewisePoly.const(sym, 1)}
    yield 1, vs[1]
    has_lead = not eq.lead.is_zero
    k = 2
    while True:
        integrand = eq.quad_coeff * vs[k - 1]
        if k >= 3:
            integrand = integrand + eq.cubic_coeff * vs[k - 2]
        if has_lead and k >= 4:
            integrand = integrand + eq.lead * vs[k - 3]
        vk = (-k) * integrand.antiderivative()
        vs[k] = vk
        yield k, vk
        vs.pop(k - 3, None)  # only a three-entry window is ever read
        k += 1


@dataclass(frozen=True)
class VSequence:
    """V_1 .. V_K and their values at t = 1."""

    eq: EquationSpec
    entries: tuple[PiecewisePoly, ...]
    boundary: tuple[ParamPoly, ...]

    def entry(self, k: int) -> PiecewisePoly:
        return self.entries[k - 1]

    def boundary_value(self, k: int) -> ParamPoly:
        """V_k(1) as a polynomial in the parameters."""
        return self.boundary[k - 1]

    @property
    def K(self) -> int:
        return len(self.entries)


def v_sequence(eq: EquationSpec, K: int) -> VSequence:
    if K < 2:
        raise ValueError("K must be at least 2")
    entries = []
    for k, vk in _v_iter(eq):
        entries.append(vk)
        if k == K:
            break
    return VSequence(eq, tuple(entries), tuple(v.value_at(1) for v in entries))


@dataclass(frozen=True)
class ASequence:
    """a_1 .. a_N of the direct solution expansion."""

    eq: EquationSpec
    entries: tuple[PiecewisePoly, ...]

    def entry(self, n: int) -> PiecewisePoly:
        return self.entries[n - 1]

    def boundary_value(self, n: int) -> ParamPoly:
        return self.entries[n - 1].value_at(1)


def a_sequence(eq: EquationSpec, N: int) -> ASequence:
    """Solution-expansion coefficients by integrating the convolution
    recursion; the quartic square/cube/fourth-power sums are built
    incrementally from lower-index entries."""
    if N < 2:
        raise ValueError("N must be at least 2")
    sym = eq.symbols
    zero = PiecewisePoly.zero(sym)
    a: dict[int, PiecewisePoly] = {1: PiecewisePoly.const(sym, 1)}
    s2: dict[int, PiecewisePoly] = {}
    s3: dict[int, PiecewisePoly] = {}
    s4: dict[int, PiecewisePoly] = {}
    has_lead = not eq.lead.is_zero
    for n in range(2, N + 1):
        s2[n] = sum((a[i] * a[n - i] for i in range(1, n)), zero)
        s3[n] = sum((a[i] * s2[n - i] for i in range(1, n - 1)), zero)
        if has_lead:
            s4[n] = sum((a[i] * s3[n - i] for i in range(1, n - 2)), zero)
        rhs = eq.quad_coeff * s2[n] + eq.cubic_coeff * s3[n]
        if has_lead and n >= 4:
            rhs = rhs + eq.lead * s4[n]
        a[n] = rhs.antiderivative()
    return ASequence(eq, tuple(a[n] for n in range(1, N + 1)))


@dataclass(frozen=True)
class EtaSequence:
    """The reduced multiplicity quantities and their ideal chain.

    ``etas[k]`` is the normal form of V_k(1) modulo the Groebner basis of
    the ideal generated by the earlier etas (plus any initial generators);
    ``bases[k]`` is that basis after adjoining eta_k.  Once some basis is
    the whole ring the remaining etas are zero by definition and the chain
    is padded without further integration.
    """

    eq: EquationSpec
    K: int
    ordering: MonomialOrdering
    initial_basis: GroebnerBasis
    etas: dict[int, ParamPoly]
    boundary: dict[int, ParamPoly]
    bases: dict[int, GroebnerBasis]

    def eta(self, k: int) -> ParamPoly:
        return self.etas[k]

    def basis(self, k: int) -> GroebnerBasis:
        """Groebner basis of <initial, eta_2, ..., eta_k>."""
        return self.bases[k]

    @property
    def final_basis(self) -> GroebnerBasis:
        return self.bases[self.K]

    def first_trivial(self) -> int | None:
        """Smallest k whose ideal is the whole ring, if any."""
        for k in range(2, self.K + 1):
            if self.bases[k].is_trivial():
                return k
        return None

    def first_stable(self) -> int | None:
        """Smallest k with bases[k] == bases[K] (chain saturation point)."""
        for k in range(2, self.K + 1):
            if self.bases[k].generators == self.bases[self.K].generators:
                return k
        return None


def eta_sequence(
    eq: EquationSpec,
    K: int,
    ordering: MonomialOrdering = GREVLEX,
    initial_generators: Sequence[ParamPoly] = (),
    time_budget: float | None = None,
    stop_when_trivial: bool = True,
) -> EtaSequence:
    """Reduce V_2(1) .. V_K(1) along the ascending ideal chain.

    ``initial_generators`` seed the ideal before eta_2; registry cases use
    them for branch constraints fixed ahead of the computation.  The time
    budget is shared across the whole run.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    deadline = time.monotonic() + time_budget if time_budget is not None else None

    def remaining() -> float | None:
        if deadline is None:
            return None
        left = deadline - time.monotonic()
        if left <= 0:
            raise BudgetExceeded("eta chain exceeded its time budget")
        return left

    init = [g.lift(eq.symbols) for g in initial_generators]
    initial = buchberger(init, ordering, time_budget=remaining())
    if not initial.generators:
        # bind the symbol tuple even when there are no generators
        initial = GroebnerBasis(eq.symbols, ordering, ())
    current = initial
    etas: dict[int, ParamPoly] = {}
    boundary: dict[int, ParamPoly] = {}
    bases: dict[int, GroebnerBasis] = {}
    viter = _v_iter(eq)
    next(viter)  # V_1
    for k in range(2, K + 1):
        if stop_when_trivial and current.is_trivial():
            etas[k] = ParamPoly.zero(eq.symbols)
            bases[k] = current
            continue
        remaining()
        _, vk = next(viter)
        vk1 = vk.value_at(1)
        boundary[k] = vk1
        eta = current.reduce(vk1)
        etas[k] = eta
        if not eta.is_zero:
            current = current.extended([eta], time_budget=remaining())
        bases[k] = current
    return EtaSequence(eq, K, ordering, initial, etas, boundary, bases)


def eta345_closed(
    quad_slope: ParamPoly,
    intercept: ParamPoly,
    slope_before: ParamPoly,
    slope_after: ParamPoly,
    cut: ParamPoly,
) -> tuple[ParamPoly, ParamPoly, ParamPoly]:
    """Closed-form multiplicity quantities for the quartic family with a
    symbolic switch time.

    The equation is z' = z^4 + A z^3 + B z^2 with B = quad_slope * (2t - 1)
    (so the k=2 quantity vanishes identically) and A piecewise linear with
    two pieces meeting at t = cut: slope_before * t + intercept, then the
    continuous continuation with slope_after.  The cut may be a plain
    parameter, which is the point: everything stays polynomial in it.

    Returns the integral forms (eta3, eta4, eta5) =
    (Int A, Int [A Bbar + 1], Int [A Bbar^2 + 2 Bbar]) with Bbar the
    antiderivative of B.  These generate the same ideals as the pipeline
    quantities, each differing by the unit -1/k.
    """
    symbols = tuple(sorted({*quad_slope.symbols, *intercept.symbols, *slope_before.symbols, *slope_after.symbols, *cut.symbols}))
    q, b0, m1, m2, h = (p.lift(symbols) for p in (quad_slope, intercept, slope_before, slope_after, cut))
    zero = ParamPoly.zero(symbols)
    one = ParamPoly.const(symbols, 1)

    # t-polynomials as coefficient tuples over the parameter ring
    bbar = (zero, -q, q)  # q*(t^2 - t)
    a_before = (b0, m1)
    a_after = (b0 + (m1 - m2) * h, m2)

    def integrate(before: tuple, after: tuple) -> ParamPoly:
        # Int_0^cut before + Int_cut^1 after
        fb = tp_antiderivative(before)
        fa = tp_antiderivative(after)
        total = zero
        if fb:
            total = total + tp_eval(fb, h)
        if fa:
            total = total + tp_eval(fa, one) - tp_eval(fa, h)
        return total

    eta3 = integrate(a_before, a_after)
    eta4 = integrate(tp_mul(a_before, bbar), tp_mul(a_after, bbar)) + one
    bbar2 = tp_mul(bbar, bbar)
    eta5 = integrate(tp_mul(a_before, bbar2), tp_mul(a_after, bbar2)) + 2 * integrate(bbar, bbar)
    return eta3, eta4, eta5


@dataclass(frozen=True)
class MultiplicityResult:
    """Outcome of a pointwise multiplicity query.

    ``status`` is "resolved" when some V_k(1) is nonzero at the point (then
    k and leading_value are set), "center-up-to-kmax" when everything
    vanished for a cubic equation, and "unresolved" when everything
    vanished for a (scaled-)quartic one, where a center is impossible and
    only a larger Kmax can decide.
    """

    status: str
    k: int | None
    leading_value: Rational | None
    stability: str
    kmax: int

    def __str__(self) -> str:
        if self.status == "resolved":
            return f"multiplicity {self.k} ({self.stability}), V_{self.k}(1) = {self.leading_value}"
        return f"{self.status} (Kmax={self.kmax})"


def multiplicity_at(eq: EquationSpec, point: Mapping[str, RationalLike], kmax: int = 12) -> MultiplicityResult:
    """Multiplicity of z = 0 at one concrete parameter point.

    Stability follows the sign rule of the inverse-map expansion: stable
    when the first nonzero V_k(1) is positive, unstable when negative.
    """
    if kmax < 2:
        raise ValueError("kmax must be at least 2")
    num = eq.substitute(dict(point), partial=True)
    leftover = num.free_symbols()
    if leftover:
        raise ValueError(f"point leaves free symbols {leftover}")
    for k, vk in _v_iter(num):
        if k < 2:
            continue
        if k > kmax:
            break
        value = vk.value_at(1)
        if not value.is_zero:
            v = value.constant_value()
            return MultiplicityResult(
                status="resolved",
                k=k,
                leading_value=v,
                stability="stable" if v > 0 else "unstable",
                kmax=kmax,
            )
    status = "center-up-to-kmax" if eq.family == "cubic" else "unresolved"
    return MultiplicityResult(status=status, k=None, leading_value=None, stability="undetermined", kmax=kmax)


def rescale(eq: EquationSpec, u) -> EquationSpec:
    """The equation satisfied by z/u; the multiplicity of z = 0 is unchanged.

    The z^2 coefficient divides by u, the z^3 one by u^2 and the z^4 one by
    u^3.  u may be a nonzero Rational or a ParamPoly that divides every
    affected coefficient exactly (otherwise the result would leave the
    polynomial setting and a ValueError is raised).
    """
    if isinstance(u, ParamPoly):
        if u.is_zero:
            raise ValueError("u must be nonzero")
        u = u.lift(eq.symbols)
        quad = eq.quad_coeff.divide_exact(u)
        cubic = eq.cubic_coeff.divide_exact(u * u)
        lead = eq.lead.divide_exact(u * u * u) if not eq.lead.is_zero else eq.lead
    else:
        u = rat_make(u)
        if not u:
            raise ValueError("u must be nonzero")
        quad = (1 / u) * eq.quad_coeff
        cubic = (1 / u**2) * eq.cubic_coeff
        lead = eq.lead * (1 / u**3)
    if lead.is_zero:
        family = "cubic"
    elif lead == ParamPoly.const(eq.symbols, 1):
        family = "quartic"
    else:
        family = "scaled-quartic"
    return EquationSpec(family, cubic, quad, lead)
