"""Floating-point oracle for the displacement map.

The exact pipeline predicts the multiplicity from polynomial data; this
module checks those predictions by actually integrating the equation.  A
classical fourth-order one-step scheme runs on a grid refined so that every
coefficient breakpoint is a grid point, which keeps the right-hand side
smooth within each step and preserves the order of the method.

The displacement q(c) = z(1, c) - c is tiny compared to c near a
high-multiplicity zero, so the integrator tracks the shifted variable
w = z - c directly: c enters only through the right-hand side and never
through a catastrophic subtraction at the end.  Everything here is plain
float arithmetic; nothing feeds back into the exact layer.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exact import RationalLike, rat_make
from .variational import EquationSpec

#: |z| beyond this counts as finite-time blow-up.
ESCAPE_RADIUS = 1e6

DEFAULT_STEP = 1.0 / 2048.0

LADDER_EXPONENTS = range(5, 13)


@dataclass(frozen=True)
class FlowResult:
    """Terminal value of one integration.

    ``value`` is z(1, c); when ``escaped`` is set the trajectory left the
    safety radius (or went non-finite) and ``value`` holds the last finite
    state, not a usable displacement.
    """

    value: float
    escaped: bool
    steps: int


@dataclass(frozen=True)
class MultiplicityEstimate:
    """Fitted multiplicity: q(c) ~ coeff * c^k on the sampled ladder.

    ``status`` is "fit" for a genuine power-law fit and "center-like" when
    every sampled |q(c)| sits below its own noise floor, which is how a
    center manifests numerically.
    """

    k: int | None
    coeff: float | None
    status: str

    @property
    def center_like(self) -> bool:
        return self.status == "center-like"


class _CompiledEquation:
    """Per-segment float coefficient tables for fast evaluation."""

    def __init__(self, eq: EquationSpec, point: Mapping[str, RationalLike] | None):
        num = eq.substitute(dict(point), partial=True) if point else eq
        leftover = num.free_symbols()
        if leftover:
            raise ValueError(f"point leaves free symbols {leftover}")
        cubic, quad = num.cubic_coeff._aligned(num.quad_coeff)
        self.breakpoints = cubic.breakpoints
        self.lead = float(num.lead.constant_value())
        self.cubic = [[float(c.constant_value()) for c in seg] for seg in cubic.segments]
        self.quad = [[float(c.constant_value()) for c in seg] for seg in quad.segments]

    def segment_of(self, t) -> int:
        i = bisect_right(self.breakpoints, t) - 1
        return min(max(i, 0), len(self.cubic) - 1)

    def rhs(self, seg: int, t: float, z: float) -> float:
        a = 0.0
        for c in reversed(self.cubic[seg]):
            a = a * t + c
        b = 0.0
        for c in reversed(self.quad[seg]):
            b = b * t + c
        return ((self.lead * z + a) * z + b) * z * z


def _integrate(
    comp: _CompiledEquation,
    c: float,
    step: float,
    record: Sequence = (),
) -> tuple[float, bool, int, dict]:
    """March w = z - c from 0 to 1; returns (w(1), escaped, steps, samples).

    ``record`` lists exact times whose z values should be sampled; they are
    merged into the stepping grid so no interpolation is involved.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    wanted = sorted(set(rat_make(r) for r in record))
    if any(r < 0 or r > 1 for r in wanted):
        raise ValueError("sample times must lie in [0, 1]")
    grid = sorted(set(comp.breakpoints) | set(wanted))
    wanted_set = set(wanted)
    samples: dict = {}
    w = 0.0
    err = 0.0  # compensation term for the summation of increments
    steps = 0
    if grid[0] in wanted_set:
        samples[grid[0]] = c + w
    for u, v in zip(grid, grid[1:]):
        seg = comp.segment_of(u)
        fu, fv = float(u), float(v)
        n = max(1, math.ceil((fv - fu) / step))
        h = (fv - fu) / n
        for j in range(n):
            t = fu + j * h
            z = c + w
            k1 = comp.rhs(seg, t, z)
            k2 = comp.rhs(seg, t + 0.5 * h, c + (w + 0.5 * h * k1))
            k3 = comp.rhs(seg, t + 0.5 * h, c + (w + 0.5 * h * k2))
            k4 = comp.rhs(seg, t + h, c + (w + h * k3))
            delta = (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            # compensated accumulation: w + delta with the rounding error
            # of each addition carried into the next one
            y = delta - err
            total = w + y
            err = (total - w) - y
            w = total
            steps += 1
            if not math.isfinite(w) or abs(c + w) > ESCAPE_RADIUS:
                return w, True, steps, samples
        if v in wanted_set:
            samples[v] = c + w
    return w, False, steps, samples


def flow(
    eq: EquationSpec,
    point: Mapping[str, RationalLike] | None,
    c: float,
    step: float = DEFAULT_STEP,
) -> FlowResult:
    """Integrate from z(0) = c to t = 1."""
    comp = _CompiledEquation(eq, point)
    w, escaped, steps, _ = _integrate(comp, c, step)
    return FlowResult(value=c + w, escaped=escaped, steps=steps)


def displacement(
    eq: EquationSpec,
    point: Mapping[str, RationalLike] | None,
    c: float,
    step: float = DEFAULT_STEP,
) -> float:
    """q(c) = z(1, c) - c, computed without the terminal subtraction.

    The shifted variable is returned directly, so the result stays accurate
    even when |q| is many orders of magnitude below |c|.
    """
    comp = _CompiledEquation(eq, point)
    w, escaped, _, _ = _integrate(comp, c, step)
    if escaped:
        raise OverflowError(f"trajectory from c={c} blows up before t=1")
    return w


def trajectory(
    eq: EquationSpec,
    point: Mapping[str, RationalLike] | None,
    c: float,
    times: Iterable[RationalLike],
    step: float = DEFAULT_STEP,
) -> dict:
    """z(t, c) sampled at the given rational times (keys are exact)."""
    comp = _CompiledEquation(eq, point)
    _, escaped, _, samples = _integrate(comp, c, step, record=list(times))
    if escaped:
        raise OverflowError(f"trajectory from c={c} blows up before t=1")
    return samples


def estimate_multiplicity(
    eq: EquationSpec,
    point: Mapping[str, RationalLike] | None = None,
    step: float = DEFAULT_STEP,
    ladder: Sequence[float] | None = None,
) -> MultiplicityEstimate:
    """Fit q(c) ~ coeff * c^k over a geometric ladder of initial values.

    The default ladder is c = +-2^-5 .. +-2^-12.  Each point is integrated
    at the working step and at half the step; their difference sets a
    per-point noise floor, so the fit only sees samples whose displacement
    is genuine signal.  When every sample drowns in noise the verdict is
    center-like.  Points that blow up are dropped; if all of them do, the
    ladder cannot say anything and an error is raised.
    """
    comp = _CompiledEquation(eq, point)
    if ladder is None:
        ladder = [s * 2.0**-e for e in LADDER_EXPONENTS for s in (1.0, -1.0)]
    samples = []
    any_finite = False
    for c in ladder:
        w1, esc1, _, _ = _integrate(comp, c, step)
        w2, esc2, _, _ = _integrate(comp, c, step / 2.0)
        if esc1 or esc2:
            continue
        any_finite = True
        floor = 40.0 * (abs(w1 - w2) + 1e-16 * abs(c))
        if abs(w2) > floor:
            samples.append((c, w2))
    if not any_finite:
        raise OverflowError("every ladder point blows up before t=1")
    if not samples:
        return MultiplicityEstimate(k=None, coeff=None, status="center-like")
    magnitudes = sorted({abs(c) for c, _ in samples})
    if len(magnitudes) < 2:
        raise ValueError("only one usable ladder magnitude; cannot fit a slope")
    xs = [math.log(abs(c)) for c, _ in samples]
    ys = [math.log(abs(q)) for c, q in samples]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    k = round(sxy / sxx)
    coeff = sum(q / c**k for c, q in samples) / len(samples)
    return MultiplicityEstimate(k=k, coeff=coeff, status="fit")
