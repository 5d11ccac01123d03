"""Groebner bases over the rationals.

Buchberger's algorithm with the normal pair-selection strategy (smallest
lcm first) and the Gebauer-Moeller pair update, which applies the coprime
and chain criteria while the pair queue is maintained.  Basis elements are
kept monic during the run; the finished basis is minimalized, interreduced,
and rescaled to integer coefficients with unit content and positive leading
coefficient, so a given ideal and ordering always print the same way.

Normal forms use a lazy max-heap over the working monomials: reduction never
reintroduces a monomial that has already been moved to the remainder, so
stale heap entries can simply be skipped.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Callable, Iterable, Sequence

from .exact import ParamPoly, RAT_ONE, Rational, rat_make

Exps = tuple[int, ...]


class BudgetExceeded(RuntimeError):
    """Raised when a computation exceeds its time budget."""


@dataclass(frozen=True)
class MonomialOrdering:
    """A monomial order: lex, grlex, or grevlex, with an optional symbol
    priority (most significant first).  Without a priority the polynomial's
    own symbol tuple order is used."""

    kind: str = "grevlex"
    priority: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lex", "grlex", "grevlex"):
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        if self.priority is not None:
            object.__setattr__(self, "priority", tuple(self.priority))

    def key_func(self, symbols: Sequence[str]) -> Callable[[Exps], tuple]:
        symbols = tuple(symbols)
        if self.priority is None:
            perm = tuple(range(len(symbols)))
        else:
            if sorted(self.priority) != sorted(symbols):
                raise ValueError(f"priority {self.priority} is not a permutation of {symbols}")
            perm = tuple(symbols.index(s) for s in self.priority)
        if self.kind == "lex":
            return lambda e: tuple(e[p] for p in perm)
        if self.kind == "grlex":
            return lambda e: (sum(e), tuple(e[p] for p in perm))
        rev = tuple(reversed(perm))
        return lambda e: (sum(e), tuple(-e[p] for p in rev))


GREVLEX = MonomialOrdering("grevlex")
LEX = MonomialOrdering("lex")


def _mono_mul(a: Exps, b: Exps) -> Exps:
    return tuple(x + y for x, y in zip(a, b))


def _mono_lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(a, b))


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _coprime(a: Exps, b: Exps) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class _Rev:
    # max-heap adapter for heapq
    __slots__ = ("key", "exps")

    def __init__(self, key, exps):
        self.key = key
        self.exps = exps

    def __lt__(self, other):
        return self.key > other.key


def _leading(terms: dict[Exps, Rational], key) -> Exps:
    return max(terms, key=key)


def _nf_terms(
    terms: dict[Exps, Rational],
    divisors: Sequence[tuple[Exps, dict[Exps, Rational]]],
    key,
) -> dict[Exps, Rational]:
    """Full normal form of a term dict modulo monic divisors (lm, terms)."""
    work = dict(terms)
    out: dict[Exps, Rational] = {}
    heap = [_Rev(key(e), e) for e in work]
    heapq.heapify(heap)
    while heap:
        top = heapq.heappop(heap).exps
        coeff = work.pop(top, None)
        if coeff is None:
            continue  # stale entry
        for lm, gterms in divisors:
            if _divides(lm, top):
                shift = tuple(x - y for x, y in zip(top, lm))
                for ge, gc in gterms.items():
                    if ge == lm:
                        continue
                    me = _mono_mul(ge, shift)
                    old = work.get(me)
                    new = (old if old is not None else 0) - coeff * gc
                    if new:
                        work[me] = new
                        if old is None:
                            heapq.heappush(heap, _Rev(key(me), me))
                    else:
                        work.pop(me, None)
                break
        else:
            out[top] = coeff
    return out


def reduce_poly(p: ParamPoly, basis: Iterable[ParamPoly], ordering: MonomialOrdering = GREVLEX) -> ParamPoly:
    """Normal form of p modulo a list of polynomials.

    For a Groebner basis the result is the unique canonical representative
    of p modulo the ideal; in particular it is zero exactly for members.
    """
    basis = [g for g in basis if not g.is_zero]
    for g in basis:
        if g.symbols != p.symbols:
            raise ValueError(f"symbol mismatch: {g.symbols} vs {p.symbols}")
    if p.is_zero or not basis:
        return p
    key = ordering.key_func(p.symbols)
    divisors = []
    for g in basis:
        lm = _leading(g.terms, key)
        lc = g.terms[lm]
        divisors.append((lm, g.terms if lc == 1 else {e: c / lc for e, c in g.terms.items()}))
    return ParamPoly._raw(p.symbols, _nf_terms(p.terms, divisors, key))


def spoly(f: ParamPoly, g: ParamPoly, ordering: MonomialOrdering = GREVLEX) -> ParamPoly:
    """S-polynomial: the lcm-matched combination cancelling both leads."""
    if f.is_zero or g.is_zero:
        raise ValueError("S-polynomial of a zero polynomial")
    if f.symbols != g.symbols:
        raise ValueError("symbol mismatch")
    key = ordering.key_func(f.symbols)
    lmf, lmg = _leading(f.terms, key), _leading(g.terms, key)
    l = _mono_lcm(lmf, lmg)
    mf = tuple(x - y for x, y in zip(l, lmf))
    mg = tuple(x - y for x, y in zip(l, lmg))
    cf, cg = f.terms[lmf], g.terms[lmg]
    out: dict[Exps, Rational] = {}
    for e, c in f.terms.items():
        out[_mono_mul(e, mf)] = c / cf
    for e, c in g.terms.items():
        me = _mono_mul(e, mg)
        v = out.get(me, None)
        v = (v if v is not None else 0) - c / cg
        if v:
            out[me] = v
        else:
            out.pop(me, None)
    return ParamPoly._raw(f.symbols, out)


def _integer_primitive(p: ParamPoly, key) -> ParamPoly:
    """Rescale to integer coefficients, content 1, positive leading coeff."""
    if p.is_zero:
        return p
    den = 1
    for c in p.terms.values():
        den = lcm(den, int(c.denominator))
    num = 0
    for c in p.terms.values():
        num = gcd(num, abs(int(c.numerator) * (den // int(c.denominator))))
    scale = rat_make(den, num)
    if p.terms[_leading(p.terms, key)] < 0:
        scale = -scale
    return p * scale


@dataclass(frozen=True)
class GroebnerBasis:
    """A reduced Groebner basis with its ordering.

    ``generators`` are integer-primitive and sorted by leading monomial,
    smallest first; reduction uses an equivalent monic copy internally.
    """

    symbols: tuple[str, ...]
    ordering: MonomialOrdering
    generators: tuple[ParamPoly, ...]
    _monic: tuple[tuple[Exps, dict], ...] = field(repr=False, compare=False, default=())

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i) -> ParamPoly:
        return self.generators[i]

    def reduce(self, p: ParamPoly) -> ParamPoly:
        if p.is_zero or not self.generators:
            return p
        if p.symbols != self.symbols:
            raise ValueError(f"symbol mismatch: {p.symbols} vs {self.symbols}")
        key = self.ordering.key_func(self.symbols)
        return ParamPoly._raw(p.symbols, _nf_terms(p.terms, self._monic, key))

    def contains(self, p: ParamPoly) -> bool:
        return self.reduce(p).is_zero

    def is_trivial(self) -> bool:
        """True when the ideal is the whole ring."""
        return any(g.is_constant and not g.is_zero for g in self.generators)

    def extended(self, extra: Iterable[ParamPoly], time_budget: float | None = None) -> "GroebnerBasis":
        """Groebner basis of this ideal plus extra generators, skipping the
        pairs already known to reduce to zero."""
        return buchberger(extra, self.ordering, seed=self, time_budget=time_budget)

    def __str__(self) -> str:
        return "[" + ", ".join(str(g) for g in self.generators) + "]"


def _make_basis(symbols, ordering, polys, key) -> GroebnerBasis:
    polys = sorted(polys, key=lambda g: key(_leading(g.terms, key)))
    monic = []
    prim = []
    for g in polys:
        lm = _leading(g.terms, key)
        lc = g.terms[lm]
        monic.append((lm, {e: c / lc for e, c in g.terms.items()} if lc != 1 else g.terms))
        prim.append(_integer_primitive(g, key))
    return GroebnerBasis(tuple(symbols), ordering, tuple(prim), tuple(monic))


def buchberger(
    generators: Iterable[ParamPoly],
    ordering: MonomialOrdering = GREVLEX,
    seed: GroebnerBasis | None = None,
    time_budget: float | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal spanned by the generators.

    ``seed`` supplies polynomials already known to form a Groebner basis
    under the same ordering; their mutual S-pairs are skipped, which is what
    makes the incremental eta pipeline cheap.  ``time_budget`` (seconds)
    raises BudgetExceeded when the pair loop runs over.
    """
    gens = [g for g in generators if not g.is_zero]
    if seed is not None:
        if seed.ordering != ordering:
            raise ValueError("seed basis uses a different ordering")
        seed_polys = [g for g in seed.generators if not g.is_zero]
    else:
        seed_polys = []
    pool = seed_polys + gens
    if not pool:
        return GroebnerBasis(("",) * 0 if seed is None else seed.symbols, ordering, ())
    symbols = pool[0].symbols
    for g in pool:
        if g.symbols != symbols:
            raise ValueError("generators must share one symbol tuple")
    key = ordering.key_func(symbols)
    deadline = time.monotonic() + time_budget if time_budget is not None else None

    basis: list[dict[Exps, Rational]] = []  # monic term dicts
    lms: list[Exps] = []
    pairs: list[tuple[tuple, Exps, int, int]] = []  # heap of (lcm key, lcm, i, j)

    def add(terms: dict[Exps, Rational], generate_pairs: bool) -> None:
        lm = _leading(terms, key)
        lc = terms[lm]
        if lc != 1:
            terms = {e: c / lc for e, c in terms.items()}
        t = len(basis)
        if generate_pairs:
            # Gebauer-Moeller update of the pair queue
            lcms = [_mono_lcm(lms[i], lm) for i in range(t)]
            keep = [True] * t
            for i in range(t):  # chain criterion among new pairs
                if not keep[i]:
                    continue
                for j in range(t):
                    if i == j or not keep[j]:
                        continue
                    if lcms[j] != lcms[i] and _divides(lcms[j], lcms[i]):
                        keep[i] = False
                        break
            seen: set[Exps] = set()
            for i in range(t):  # one pair per lcm, then the coprime criterion
                if not keep[i]:
                    continue
                if lcms[i] in seen:
                    keep[i] = False
                    continue
                seen.add(lcms[i])
                if _coprime(lms[i], lm):
                    keep[i] = False
            surviving = []
            for item in pairs:  # chain criterion against queued old pairs
                _, l, i, j = item
                if (
                    _divides(lm, l)
                    and _mono_lcm(lms[i], lm) != l
                    and _mono_lcm(lms[j], lm) != l
                ):
                    continue
                surviving.append(item)
            pairs[:] = surviving
            for i in range(t):
                if keep[i]:
                    pairs.append((key(lcms[i]), lcms[i], i, t))
            heapq.heapify(pairs)
        basis.append(terms)
        lms.append(lm)

    # seed elements are a Groebner basis already: no pairs among them
    for g in seed_polys:
        add(g.terms, generate_pairs=False)
    trivial = False
    for g in gens:
        nf = _nf_terms(g.terms, list(zip(lms, basis)), key)
        if nf:
            if not any(_leading(nf, key)):
                trivial = True
                break
            add(nf, generate_pairs=True)

    while pairs and not trivial:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded(f"Groebner run exceeded {time_budget:.0f}s ({len(pairs)} pairs left)")
        _, l, i, j = heapq.heappop(pairs)
        shift_i = tuple(x - y for x, y in zip(l, lms[i]))
        shift_j = tuple(x - y for x, y in zip(l, lms[j]))
        s: dict[Exps, Rational] = {}
        for e, c in basis[i].items():
            s[_mono_mul(e, shift_i)] = c
        for e, c in basis[j].items():
            me = _mono_mul(e, shift_j)
            v = s.get(me, None)
            v = (v if v is not None else 0) - c
            if v:
                s[me] = v
            else:
                s.pop(me, None)
        if not s:
            continue
        nf = _nf_terms(s, list(zip(lms, basis)), key)
        if not nf:
            continue
        if not any(_leading(nf, key)):
            trivial = True
            break
        add(nf, generate_pairs=True)

    if trivial:
        one = ParamPoly.const(symbols, 1)
        return _make_basis(symbols, ordering, [one], key)

    # minimalize: drop elements whose lead is divisible by another lead
    order = sorted(range(len(basis)), key=lambda t: key(lms[t]))
    kept: list[int] = []
    for t in order:
        if not any(_divides(lms[k], lms[t]) for k in kept):
            kept.append(t)
    # interreduce tails against the other kept elements
    final: list[ParamPoly] = []
    for t in kept:
        others = [(lms[k], basis[k]) for k in kept if k != t]
        nf = _nf_terms(basis[t], others, key)
        final.append(ParamPoly._raw(symbols, nf))
    return _make_basis(symbols, ordering, final, key)


def ideal_equal(b1, b2, ordering: MonomialOrdering | None = None) -> bool:
    """Whether two ideals coincide.

    Arguments may be GroebnerBasis instances or plain generator iterables;
    generator lists are completed first.  Bases under one ordering compare by
    the uniqueness of the reduced basis, otherwise by mutual membership.
    """
    if not isinstance(b1, GroebnerBasis):
        b1 = buchberger(list(b1), ordering or GREVLEX)
    if not isinstance(b2, GroebnerBasis):
        b2 = buchberger(list(b2), ordering or b1.ordering)
    if b1.symbols != b2.symbols:
        raise ValueError(f"symbol mismatch: {b1.symbols} vs {b2.symbols}")
    if b1.ordering == b2.ordering:
        return b1.generators == b2.generators
    return all(b2.contains(g) for g in b1.generators) and all(b1.contains(g) for g in b2.generators)


def no_real_root_quadratic(p: ParamPoly) -> bool:
    """Whether a univariate quadratic with rational coefficients has no real
    root, decided by the sign of the discriminant."""
    used = p.used_symbols()
    if len(used) != 1:
        raise ValueError(f"expected a univariate polynomial, got symbols {used}")
    (x,) = used
    if p.degree_in(x) != 2:
        raise ValueError(f"expected degree 2 in {x}, got {p.degree_in(x)}")
    i = p.symbols.index(x)
    c = [rat_make(0), rat_make(0), rat_make(0)]
    for e, v in p.terms.items():
        c[e[i]] = v
    disc = c[1] * c[1] - 4 * c[2] * c[0]
    return disc < 0
