"""Piecewise polynomial functions of time on [0, 1].

A PiecewisePoly is a finite list of polynomial segments in the time variable
whose coefficients are ParamPoly values, split at rational breakpoints
0 = t_0 < ... < t_m = 1.  Equation coefficients, their antiderivatives and
all products formed by the variational recursion live in this class.

Segment polynomials are plain tuples of ParamPoly coefficients, lowest degree
first; the tp_* helpers below operate on those tuples directly and are reused
by the closed-form integral routines elsewhere in the package.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Iterable, Mapping, Sequence

from .exact import ParamPoly, RAT_ONE, RAT_ZERO, Rational, RationalLike, rat_make

TPoly = tuple[ParamPoly, ...]


def _tp_trim(coeffs: Sequence[ParamPoly]) -> TPoly:
    out = list(coeffs)
    while out and out[-1].is_zero:
        out.pop()
    return tuple(out)


def tp_add(p: TPoly, q: TPoly) -> TPoly:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return _tp_trim(out)


def tp_neg(p: TPoly) -> TPoly:
    return tuple(-c for c in p)


def tp_scale(p: TPoly, factor) -> TPoly:
    return _tp_trim([c * factor for c in p])


def tp_mul(p: TPoly, q: TPoly) -> TPoly:
    if not p or not q:
        return ()
    zero = ParamPoly.zero(p[0].symbols) if p else ParamPoly.zero(q[0].symbols)
    out = [zero] * (len(p) + len(q) - 1)
    for i, ci in enumerate(p):
        if ci.is_zero:
            continue
        for j, cj in enumerate(q):
            out[i + j] = out[i + j] + ci * cj
    return _tp_trim(out)


def tp_eval(p: TPoly, x):
    """Horner evaluation; x may be a Rational or a ParamPoly."""
    if not p:
        return None  # caller supplies its own zero
    acc = p[-1]
    for c in reversed(p[:-1]):
        acc = acc * x + c
    return acc


def tp_antiderivative(p: TPoly) -> TPoly:
    """Term-by-term antiderivative with zero constant term."""
    if not p:
        return ()
    zero = ParamPoly.zero(p[0].symbols)
    return tuple([zero] + [c * rat_make(1, i + 1) for i, c in enumerate(p)])


def tp_derivative(p: TPoly) -> TPoly:
    return _tp_trim([c * i for i, c in enumerate(p) if i])


def tp_compose_affine(p: TPoly, alpha: Rational, beta: Rational) -> TPoly:
    """Coefficients of t -> p(alpha + beta*t)."""
    if not p:
        return ()
    zero = ParamPoly.zero(p[0].symbols)
    out = [zero] * len(p)
    power = [RAT_ONE]  # rational coefficients of (alpha + beta*t)^i
    for i, c in enumerate(p):
        if i:
            prev = power
            power = [RAT_ZERO] * (i + 1)
            for j, r in enumerate(prev):
                power[j] += alpha * r
                power[j + 1] += beta * r
        if not c.is_zero:
            for j, r in enumerate(power):
                if r:
                    out[j] = out[j] + c * r
    return _tp_trim(out)


class PiecewisePoly:
    __slots__ = ("symbols", "breakpoints", "segments")

    def __init__(self, symbols: Sequence[str], breakpoints: Sequence[RationalLike], segments: Sequence[Sequence[ParamPoly]]):
        symbols = tuple(symbols)
        bps = tuple(rat_make(b) for b in breakpoints)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(u >= v for u, v in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(segments) != len(bps) - 1:
            raise ValueError("need one segment per interval")
        segs = []
        for seg in segments:
            seg = _tp_trim(tuple(seg))
            for coeff in seg:
                if coeff.symbols != symbols:
                    raise ValueError(f"segment coefficient symbols {coeff.symbols} != {symbols}")
            segs.append(seg)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "segments", tuple(segs))

    def __setattr__(self, name, value):
        raise AttributeError("PiecewisePoly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, symbols: Sequence[str]) -> "PiecewisePoly":
        return cls(symbols, (0, 1), ((),))

    @classmethod
    def const(cls, symbols: Sequence[str], value) -> "PiecewisePoly":
        return cls.from_poly(symbols, (value,))

    @classmethod
    def from_poly(cls, symbols: Sequence[str], coeffs: Sequence) -> "PiecewisePoly":
        """Single global polynomial; coeffs lowest degree first, each a
        ParamPoly or a rational scalar."""
        symbols = tuple(symbols)
        lifted = tuple(
            c.lift(symbols) if isinstance(c, ParamPoly) else ParamPoly.const(symbols, c)
            for c in coeffs
        )
        return cls(symbols, (0, 1), (lifted,))

    def _zero_poly(self) -> ParamPoly:
        return ParamPoly.zero(self.symbols)

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return all(not seg for seg in self.segments)

    def degree(self) -> int:
        return max((len(seg) - 1 for seg in self.segments), default=-1)

    def is_piecewise_linear(self) -> bool:
        return all(len(seg) <= 2 for seg in self.segments)

    def segment_linear(self, i: int) -> tuple[ParamPoly, ParamPoly]:
        """(constant, slope) of segment i; error if the segment is not linear."""
        seg = self.segments[i]
        if len(seg) > 2:
            raise ValueError(f"segment {i} has degree {len(seg) - 1}")
        z = self._zero_poly()
        return (seg[0] if len(seg) > 0 else z, seg[1] if len(seg) > 1 else z)

    def refine(self, cuts: Iterable[RationalLike]) -> "PiecewisePoly":
        """Insert extra breakpoints; the function itself is unchanged."""
        extra = sorted({rat_make(c) for c in cuts} - set(self.breakpoints))
        if any(c <= 0 or c >= 1 for c in extra):
            raise ValueError("cuts must lie strictly inside (0, 1)")
        if not extra:
            return self
        bps = sorted(set(self.breakpoints) | set(extra))
        segs = []
        for u in bps[:-1]:
            i = bisect_right(self.breakpoints, u) - 1
            segs.append(self.segments[min(i, len(self.segments) - 1)])
        return PiecewisePoly(self.symbols, bps, segs)

    def _aligned(self, other: "PiecewisePoly") -> tuple["PiecewisePoly", "PiecewisePoly"]:
        if self.symbols != other.symbols:
            raise ValueError(f"symbol mismatch: {self.symbols} vs {other.symbols}")
        if self.breakpoints == other.breakpoints:
            return self, other
        return (
            self.refine(other.breakpoints[1:-1]),
            other.refine(self.breakpoints[1:-1]),
        )

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "PiecewisePoly":
        if isinstance(other, PiecewisePoly):
            a, b = self._aligned(other)
            segs = [tp_add(s, t) for s, t in zip(a.segments, b.segments)]
            return PiecewisePoly(a.symbols, a.breakpoints, segs)
        if isinstance(other, (int, Rational, ParamPoly)):
            return self + PiecewisePoly.const(self.symbols, other) if not isinstance(other, ParamPoly) else self + PiecewisePoly.from_poly(self.symbols, (other,))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "PiecewisePoly":
        return PiecewisePoly(self.symbols, self.breakpoints, [tp_neg(s) for s in self.segments])

    def __sub__(self, other):
        if isinstance(other, (PiecewisePoly, int, Rational, ParamPoly)):
            return self + (-(other if isinstance(other, PiecewisePoly) else PiecewisePoly.from_poly(self.symbols, (other if isinstance(other, ParamPoly) else ParamPoly.const(self.symbols, other),))))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other) -> "PiecewisePoly":
        if isinstance(other, PiecewisePoly):
            a, b = self._aligned(other)
            segs = [tp_mul(s, t) for s, t in zip(a.segments, b.segments)]
            return PiecewisePoly(a.symbols, a.breakpoints, segs)
        if isinstance(other, (int, Rational, ParamPoly)):
            factor = other.lift(self.symbols) if isinstance(other, ParamPoly) else rat_make(other)
            return PiecewisePoly(self.symbols, self.breakpoints, [tp_scale(s, factor) for s in self.segments])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewisePoly):
            return NotImplemented
        if self.symbols != other.symbols:
            return False
        a, b = self._aligned(other)
        return a.segments == b.segments

    __hash__ = None

    # -- calculus -------------------------------------------------------------

    def antiderivative(self) -> "PiecewisePoly":
        """The antiderivative vanishing at 0, glued continuously at breakpoints."""
        segs = []
        running = self._zero_poly()  # value at the left end of the next segment
        for seg, u, v in zip(self.segments, self.breakpoints, self.breakpoints[1:]):
            raw = tp_antiderivative(seg)
            at_u = tp_eval(raw, u) if raw else None
            shift = running - (at_u if at_u is not None else self._zero_poly())
            glued = tp_add(raw, (shift,)) if not shift.is_zero else raw
            at_v = tp_eval(glued, v)
            running = at_v if at_v is not None else self._zero_poly()
            segs.append(glued)
        return PiecewisePoly(self.symbols, self.breakpoints, segs)

    def derivative(self) -> "PiecewisePoly":
        return PiecewisePoly(self.symbols, self.breakpoints, [tp_derivative(s) for s in self.segments])

    def integrate01(self) -> ParamPoly:
        """Exact integral over [0, 1]."""
        total = self._zero_poly()
        for seg, u, v in zip(self.segments, self.breakpoints, self.breakpoints[1:]):
            raw = tp_antiderivative(seg)
            if raw:
                total = total + tp_eval(raw, v) - tp_eval(raw, u)
        return total

    # -- evaluation -------------------------------------------------------------

    def _segment_index(self, t: Rational) -> int:
        if t < 0 or t > 1:
            raise ValueError(f"t={t} outside [0, 1]")
        if t == 1:
            return len(self.segments) - 1
        return bisect_right(self.breakpoints, t) - 1

    def value_at(self, t: RationalLike) -> ParamPoly:
        """Symbolic value at rational time t (right-continuous convention)."""
        t = rat_make(t)
        seg = self.segments[self._segment_index(t)]
        v = tp_eval(seg, t)
        return v if v is not None else self._zero_poly()

    def eval_num(self, t: RationalLike, assignment: Mapping[str, RationalLike] | None = None) -> Rational:
        return self.value_at(t).evaluate(assignment or {})

    def is_continuous(self) -> bool:
        for i, t in enumerate(self.breakpoints[1:-1], start=1):
            left = tp_eval(self.segments[i - 1], t)
            right = tp_eval(self.segments[i], t)
            left = left if left is not None else self._zero_poly()
            right = right if right is not None else self._zero_poly()
            if left != right:
                return False
        return True

    # -- transforms ---------------------------------------------------------------

    def substitute(self, assignment: Mapping[str, RationalLike], partial: bool = False) -> "PiecewisePoly":
        segs = [tuple(c.substitute(assignment, partial=partial) for c in seg) for seg in self.segments]
        return PiecewisePoly(self.symbols, self.breakpoints, segs)

    def lift(self, symbols: Sequence[str]) -> "PiecewisePoly":
        if tuple(symbols) == self.symbols:
            return self
        segs = [tuple(c.lift(symbols) for c in seg) for seg in self.segments]
        return PiecewisePoly(symbols, self.breakpoints, segs)

    def divide_exact(self, divisor: ParamPoly) -> "PiecewisePoly":
        segs = [tuple(c.divide_exact(divisor) for c in seg) for seg in self.segments]
        return PiecewisePoly(self.symbols, self.breakpoints, segs)

    def reflect(self) -> "PiecewisePoly":
        """The time reversal t -> value at (1 - t)."""
        bps = tuple(1 - b for b in reversed(self.breakpoints))
        segs = [tp_compose_affine(seg, RAT_ONE, rat_make(-1)) for seg in reversed(self.segments)]
        return PiecewisePoly(self.symbols, bps, segs)

    def __str__(self) -> str:
        parts = []
        for seg, u, v in zip(self.segments, self.breakpoints, self.breakpoints[1:]):
            if not seg:
                desc = "0"
            else:
                desc = " + ".join(
                    f"({c})" + ("" if i == 0 else f"*t^{i}" if i > 1 else "*t")
                    for i, c in enumerate(seg)
                    if not c.is_zero
                )
            parts.append(f"[{u},{v}]: {desc}")
        return "; ".join(parts)

    __repr__ = __str__


def pl_from_slopes(
    intercept,
    slopes: Sequence,
    breakpoints: Sequence[RationalLike] = (),
    symbols: Sequence[str] | None = None,
) -> PiecewisePoly:
    """Continuous piecewise linear function on [0, 1].

    ``intercept`` is the value slope/offset pair anchor: the function equals
    ``slopes[0]*t + intercept`` on the first piece, and each later piece keeps
    the function continuous while switching to its own slope.  ``breakpoints``
    are the interior switch times, strictly increasing in (0, 1); there must
    be one more slope than breakpoints.  Slopes and intercept may be ParamPoly
    values or rational scalars; pass ``symbols`` when all of them are scalars.
    """
    if len(slopes) != len(breakpoints) + 1:
        raise ValueError("need exactly one more slope than interior breakpoints")
    if symbols is None:
        pools = [x.symbols for x in (intercept, *slopes) if isinstance(x, ParamPoly)]
        if not pools:
            raise ValueError("pass symbols= when intercept and slopes are all scalars")
        symbols = tuple(sorted(set().union(*pools)))
    symbols = tuple(symbols)

    def lift(x) -> ParamPoly:
        return x.lift(symbols) if isinstance(x, ParamPoly) else ParamPoly.const(symbols, x)

    cuts = tuple(rat_make(b) for b in breakpoints)
    if any(c <= 0 or c >= 1 for c in cuts) or any(u >= v for u, v in zip(cuts, cuts[1:])):
        raise ValueError("interior breakpoints must be strictly increasing in (0, 1)")
    ms = [lift(s) for s in slopes]
    offs = [lift(intercept)]
    for k in range(1, len(ms)):
        # continuity at cuts[k-1]: off_k = off_{k-1} + (m_{k-1} - m_k) * cut
        offs.append(offs[k - 1] + (ms[k - 1] - ms[k]) * cuts[k - 1])
    segs = [(off, m) for off, m in zip(offs, ms)]
    return PiecewisePoly(symbols, (rat_make(0), *cuts, rat_make(1)), segs)
