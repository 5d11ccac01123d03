"""Sufficient conditions certifying that z = 0 is a center.

A center means every solution starting near zero is periodic, so all the
variational boundary values vanish and the multiplicity question
degenerates.  Three checkable certificates are implemented for the cubic
equation z' = A z^3 + B z^2:

* odd reflection symmetry: A(t) = -A(1 - t) and B(t) = -B(1 - t);
* its piecewise linear form: both coefficients linear on a common uniform
  grid, vanishing at t = 1/2, with palindromic slope sequences;
* proportionality: B = ratio * A for a parameter-free rational ratio with
  Int_0^1 A = 0, which makes the equation autonomous in the rescaled time
  s(t) = Int_0^t A.

Each check is sufficient only; ``none`` never asserts the absence of a
center.  The quartic families never have a center at zero, so ``certify``
returns ``none`` for them without running the cubic-only checks.
"""

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .exact import ParamPoly, Rational, rat_make
from .piecewise import PiecewisePoly
from .variational import EquationSpec


@dataclass(frozen=True)
class CenterCertificate:
    """Outcome of a certificate search.

    ``kind`` is one of "symmetry", "pl-symmetry", "proportional" or "none".
    Proportional certificates carry the witness: the ratio with B = ratio * A
    and the rescaled time s(t) (the running integral of A, with s(1) = 0).
    """

    kind: str
    ratio: Rational | None = None
    rescaled_time: PiecewisePoly | None = None

    def __bool__(self) -> bool:
        return self.kind != "none"

    def __str__(self) -> str:
        if self.kind == "proportional":
            return f"proportional (ratio {self.ratio})"
        return self.kind


def symmetry_check(eq: EquationSpec) -> bool:
    """True when both coefficients are odd about t = 1/2.

    Under this symmetry the solution retraces itself on [1/2, 1], so every
    solution defined on the whole interval is periodic.  Stated for the
    cubic family only; the quartic z^4 term has the wrong parity.
    """
    if eq.family != "cubic":
        raise ValueError("symmetry certificate applies to the cubic family")
    return (
        eq.cubic_coeff.reflect() == -eq.cubic_coeff
        and eq.quad_coeff.reflect() == -eq.quad_coeff
    )


def pl_center_check(a_slopes: Sequence, b_slopes: Sequence, a_mid, b_mid) -> bool:
    """Center test for piecewise linear coefficients on a uniform grid.

    ``a_slopes`` and ``b_slopes`` list the per-segment slopes of the two
    coefficients on the same grid i/n, and ``a_mid``, ``b_mid`` are the
    values at t = 1/2.  True when both values are zero and both slope
    sequences are palindromic (segment k mirrors segment n + 1 - k), which
    is exactly odd symmetry about 1/2 for continuous piecewise linear
    functions.
    """
    n = len(a_slopes)
    if n == 0 or len(b_slopes) != n:
        raise ValueError("slope lists must be nonempty and of equal length")
    if not (a_mid == 0 and b_mid == 0):
        return False
    for seq in (a_slopes, b_slopes):
        if any(seq[i] != seq[n - 1 - i] for i in range(n // 2)):
            return False
    return True


def uniform_slopes(pw: PiecewisePoly, n: int | None = None) -> tuple[list[ParamPoly], ParamPoly]:
    """Slopes of a continuous piecewise linear function on the grid i/n.

    When n is omitted the coarsest uniform grid containing the function's
    own breakpoints is used.  Returns (slopes, value at 1/2).
    """
    if not pw.is_piecewise_linear():
        raise ValueError("coefficient is not piecewise linear")
    if not pw.is_continuous():
        raise ValueError("coefficient is not continuous")
    if n is None:
        n = 1
        for b in pw.breakpoints:
            n = lcm(n, int(b.denominator))
    grid = [rat_make(i, n) for i in range(1, n)]
    refined = pw.refine(grid)
    if refined.breakpoints != tuple(rat_make(i, n) for i in range(n + 1)):
        raise ValueError(f"breakpoints do not fit the uniform grid with n={n}")
    slopes = [refined.segment_linear(i)[1] for i in range(n)]
    return slopes, pw.value_at(rat_make(1, 2))


def proportional_check(eq: EquationSpec) -> CenterCertificate:
    """Certificate for B = ratio * A with a rational ratio and Int_0^1 A = 0.

    The rescaled time s(t) = Int_0^t A then turns the equation into the
    autonomous dz/ds = z^3 + ratio z^2, and s(1) = s(0) closes every orbit.
    Both conditions are essential: with a nonzero mean the time change is
    not periodic and z = 0 can have finite multiplicity.
    """
    if eq.family != "cubic":
        raise ValueError("proportionality certificate applies to the cubic family")
    none = CenterCertificate("none")
    A, B = eq.cubic_coeff, eq.quad_coeff
    if A.is_zero:
        # ratio undefined; a center may still exist but not by this route
        return none
    Aa, Ba = A._aligned(B)
    ratio = None
    for seg_a, seg_b in zip(Aa.segments, Ba.segments):
        width = max(len(seg_a), len(seg_b))
        for i in range(width):
            p = seg_a[i] if i < len(seg_a) else None
            if p is None or p.is_zero:
                continue
            q = seg_b[i] if i < len(seg_b) else ParamPoly.zero(p.symbols)
            try:
                cand = q.divide_exact(p)
            except ValueError:
                return none
            if not cand.is_constant:
                return none
            ratio = cand.constant_value()
            break
        if ratio is not None:
            break
    if ratio is None or B != ratio * A:
        return none
    if not A.integrate01().is_zero:
        return none
    return CenterCertificate("proportional", ratio=ratio, rescaled_time=A.antiderivative())


def certify(eq: EquationSpec) -> CenterCertificate:
    """Search the certificates in order: pl-symmetry, symmetry, proportional.

    The first two are equivalent on continuous piecewise linear input; the
    piecewise form is preferred because its witness (grid, slopes) is the
    more informative report.
    """
    if eq.family != "cubic":
        return CenterCertificate("none")
    A, B = eq.cubic_coeff, eq.quad_coeff
    pl = (
        A.is_piecewise_linear()
        and B.is_piecewise_linear()
        and A.is_continuous()
        and B.is_continuous()
    )
    if pl:
        n = 1
        for pw in (A, B):
            for b in pw.breakpoints:
                n = lcm(n, int(b.denominator))
        a_slopes, a_mid = uniform_slopes(A, n)
        b_slopes, b_mid = uniform_slopes(B, n)
        if pl_center_check(a_slopes, b_slopes, a_mid, b_mid):
            return CenterCertificate("pl-symmetry")
    if symmetry_check(eq):
        return CenterCertificate("symmetry")
    return proportional_check(eq)
