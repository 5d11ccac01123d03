"""Exact scalar and polynomial arithmetic.

Two layers live here.  ``Rational`` is an arbitrary-precision fraction kept
in canonical form (reduced, positive denominator); ``rat_make`` is the only
constructor the rest of the package uses.  ``ParamPoly`` is a sparse
multivariate polynomial in the free parameters of an equation family, with
Rational coefficients, over a symbol tuple that is fixed for the lifetime of
a computation.  Exponent vectors are dense tuples aligned with that symbol
tuple, which keeps arithmetic dict-merge simple and hashing cheap.

``parse_poly`` / ``format_poly`` implement the small text grammar used by the
command line layer: lowercase symbols, integer or p/q rational literals,
``+ - *``, ``^`` with nonnegative integer exponents, parentheses.  Printing
orders terms by graded reverse lexicographic order, largest first, and the
output parses back to an equal polynomial.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence, Union

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    from fractions import Fraction as _mpq

#: Canonical exact scalar type.  gmpy2.mpq when available, Fraction otherwise;
#: both reduce automatically and keep the denominator positive.
Rational = type(_mpq())

RationalLike = Union[int, str, Rational]


def rat_make(numerator: RationalLike = 0, denominator: RationalLike = 1) -> Rational:
    """Build a Rational in canonical form.

    Accepts ints, existing Rationals, or strings like "-3/4".  A zero
    denominator raises ZeroDivisionError.
    """
    if isinstance(numerator, float) or isinstance(denominator, float):
        raise TypeError("floats are not exact; pass ints, strings or Rationals")
    return _mpq(numerator) / _mpq(denominator) if denominator != 1 else _mpq(numerator)


RAT_ZERO = rat_make(0)
RAT_ONE = rat_make(1)


def _grevlex_key(exps: tuple[int, ...]) -> tuple:
    # Larger key = larger monomial: compare total degree, then reversed
    # exponents negated (the monomial with the smaller last exponent wins).
    return (sum(exps), tuple(-e for e in reversed(exps)))


class ParamPoly:
    """Sparse multivariate polynomial over a fixed symbol tuple.

    ``terms`` maps exponent tuples to nonzero Rational coefficients; the zero
    polynomial is the empty map.  Arithmetic requires both operands to share
    the same symbol tuple; mixing tuples raises ValueError rather than
    guessing an embedding.  Instances are treated as immutable.
    """

    __slots__ = ("symbols", "terms")

    def __init__(self, symbols: Sequence[str], terms: Mapping[tuple[int, ...], RationalLike] | None = None):
        object.__setattr__(self, "symbols", tuple(symbols))
        clean: dict[tuple[int, ...], Rational] = {}
        if terms:
            width = len(self.symbols)
            for exps, coeff in terms.items():
                exps = tuple(exps)
                if len(exps) != width:
                    raise ValueError(f"exponent tuple {exps} does not match symbols {self.symbols}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = rat_make(coeff)
                if c:
                    clean[exps] = clean.get(exps, RAT_ZERO) + c
                    if not clean[exps]:
                        del clean[exps]
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _raw(cls, symbols: tuple[str, ...], terms: dict[tuple[int, ...], Rational]) -> "ParamPoly":
        # Internal fast path: terms already canonical (no zeros, right width).
        self = object.__new__(cls)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "terms", terms)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("ParamPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, symbols: Sequence[str]) -> "ParamPoly":
        return cls._raw(tuple(symbols), {})

    @classmethod
    def const(cls, symbols: Sequence[str], value: RationalLike) -> "ParamPoly":
        symbols = tuple(symbols)
        c = rat_make(value)
        if not c:
            return cls._raw(symbols, {})
        return cls._raw(symbols, {(0,) * len(symbols): c})

    @classmethod
    def variable(cls, symbols: Sequence[str], name: str) -> "ParamPoly":
        symbols = tuple(symbols)
        if name not in symbols:
            raise ValueError(f"symbol {name!r} not in {symbols}")
        exps = tuple(1 if s == name else 0 for s in symbols)
        return cls._raw(symbols, {exps: RAT_ONE})

    # -- predicates and views ---------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Rational:
        """The value of a constant polynomial; error if any symbol occurs."""
        if not self.terms:
            return RAT_ZERO
        if not self.is_constant:
            raise ValueError(f"not a constant: {self}")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.symbols.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def used_symbols(self) -> tuple[str, ...]:
        used = [any(e[i] for e in self.terms) for i in range(len(self.symbols))]
        return tuple(s for s, u in zip(self.symbols, used) if u)

    def coefficient(self, exps: Sequence[int]) -> Rational:
        return self.terms.get(tuple(exps), RAT_ZERO)

    def _check_same(self, other: "ParamPoly") -> None:
        if self.symbols != other.symbols:
            raise ValueError(f"symbol mismatch: {self.symbols} vs {other.symbols}")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            self._check_same(other)
            terms = dict(self.terms)
            for exps, c in other.terms.items():
                s = terms.get(exps, RAT_ZERO) + c
                if s:
                    terms[exps] = s
                else:
                    terms.pop(exps, None)
            return ParamPoly._raw(self.symbols, terms)
        if isinstance(other, (int, Rational)):
            return self + ParamPoly.const(self.symbols, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw(self.symbols, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "ParamPoly":
        if isinstance(other, (ParamPoly, int, Rational)):
            return self + (-other if isinstance(other, ParamPoly) else ParamPoly.const(self.symbols, -rat_make(other)))
        return NotImplemented

    def __rsub__(self, other) -> "ParamPoly":
        return (-self) + other

    def __mul__(self, other) -> "ParamPoly":
        if isinstance(other, ParamPoly):
            self._check_same(other)
            if len(self.terms) > len(other.terms):
                return other * self
            out: dict[tuple[int, ...], Rational] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    exps = tuple(a + b for a, b in zip(e1, e2))
                    s = out.get(exps, RAT_ZERO) + c1 * c2
                    if s:
                        out[exps] = s
                    else:
                        out.pop(exps, None)
            return ParamPoly._raw(self.symbols, out)
        if isinstance(other, (int, Rational)):
            c = rat_make(other)
            if not c:
                return ParamPoly.zero(self.symbols)
            return ParamPoly._raw(self.symbols, {e: c * v for e, v in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ParamPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = ParamPoly.const(self.symbols, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, ParamPoly):
            return self.symbols == other.symbols and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self == ParamPoly.const(self.symbols, other)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    __hash__ = None  # mutable-dict backed; not meant for set membership

    # -- substitution ------------------------------------------------------

    def substitute(self, assignment: Mapping[str, RationalLike], partial: bool = False) -> "ParamPoly":
        """Evaluate some symbols at Rational values.

        With partial=False every symbol that actually occurs must be
        assigned and the result is a constant polynomial.  With partial=True
        unassigned symbols survive; the symbol tuple is unchanged either way.
        """
        unknown = set(assignment) - set(self.symbols)
        if unknown:
            raise ValueError(f"assignment for unknown symbols {sorted(unknown)}")
        if not partial:
            missing = set(self.used_symbols()) - set(assignment)
            if missing:
                raise ValueError(f"unassigned symbols {sorted(missing)} (use partial=True to keep them)")
        values = {self.symbols.index(name): rat_make(v) for name, v in assignment.items()}
        out: dict[tuple[int, ...], Rational] = {}
        for exps, coeff in self.terms.items():
            c = coeff
            new = list(exps)
            for i, v in values.items():
                if exps[i]:
                    c = c * v ** exps[i]
                    new[i] = 0
            if not c:
                continue
            key = tuple(new)
            s = out.get(key, RAT_ZERO) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return ParamPoly._raw(self.symbols, out)

    def evaluate(self, assignment: Mapping[str, RationalLike]) -> Rational:
        """Full evaluation to a Rational."""
        return self.substitute(assignment).constant_value()

    def divide_exact(self, divisor: "ParamPoly") -> "ParamPoly":
        """Exact polynomial division; raises ValueError when not divisible."""
        if isinstance(divisor, (int, Rational)):
            divisor = ParamPoly.const(self.symbols, divisor)
        if divisor.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        self._check_same(divisor)
        dl = max(divisor.terms, key=_grevlex_key)
        dc = divisor.terms[dl]
        rem = dict(self.terms)
        quot: dict[tuple[int, ...], Rational] = {}
        while rem:
            m = max(rem, key=_grevlex_key)
            if any(a < b for a, b in zip(m, dl)):
                raise ValueError(f"{self} is not divisible by {divisor}")
            shift = tuple(a - b for a, b in zip(m, dl))
            coeff = rem[m] / dc
            quot[shift] = quot.get(shift, RAT_ZERO) + coeff
            for e, c in divisor.terms.items():
                me = tuple(a + b for a, b in zip(e, shift))
                s = rem.get(me, RAT_ZERO) - coeff * c
                if s:
                    rem[me] = s
                else:
                    rem.pop(me, None)
        return ParamPoly._raw(self.symbols, {e: c for e, c in quot.items() if c})

    def lift(self, symbols: Sequence[str]) -> "ParamPoly":
        """Re-embed into a larger symbol tuple (must contain the current one)."""
        symbols = tuple(symbols)
        if symbols == self.symbols:
            return self
        try:
            where = [symbols.index(s) for s in self.symbols]
        except ValueError:
            raise ValueError(f"{symbols} does not contain {self.symbols}") from None
        width = len(symbols)
        out: dict[tuple[int, ...], Rational] = {}
        for exps, coeff in self.terms.items():
            new = [0] * width
            for pos, e in zip(where, exps):
                new[pos] = e
            out[tuple(new)] = coeff
        return ParamPoly._raw(symbols, out)

    # -- printing ----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Rational]]:
        """Terms largest-first under graded reverse lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    __repr__ = __str__


def variables(names: str | Sequence[str]) -> tuple[ParamPoly, ...]:
    """Generators for a polynomial ring.

    ``variables("a b c")`` returns the three coordinate polynomials over the
    alphabetically sorted symbol tuple, in the requested order.
    """
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate symbols in {names}")
    symbols = tuple(sorted(names))
    return tuple(ParamPoly.variable(symbols, n) for n in names)


# -- text format -----------------------------------------------------------


def _format_monomial(symbols: tuple[str, ...], exps: tuple[int, ...]) -> str:
    parts = []
    for s, e in zip(symbols, exps):
        if e == 1:
            parts.append(s)
        elif e > 1:
            parts.append(f"{s}^{e}")
    return "*".join(parts)


def format_poly(p: ParamPoly) -> str:
    """Render largest term first; output round-trips through parse_poly."""
    if p.is_zero:
        return "0"
    chunks: list[str] = []
    for exps, coeff in p.sorted_terms():
        mono = _format_monomial(p.symbols, exps)
        mag = abs(coeff)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not chunks:
            chunks.append(f"-{body}" if coeff < 0 else body)
        else:
            chunks.append(f"- {body}" if coeff < 0 else f"+ {body}")
    return " ".join(chunks)


class PolyParseError(ValueError):
    """Parse failure with 1-based position information."""

    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.pos = pos


class _Tokens:
    # Token kinds: "int", "sym", or a literal of + - * ^ ( ) /
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.toks.append(("int", text[i:j], i))
                i = j
            elif ch.islower() and ch.isalpha():
                j = i
                while j < n and text[j].islower() and text[j].isalpha():
                    j += 1
                self.toks.append(("sym", text[i:j], i))
                i = j
            elif ch in "+-*^()/":
                self.toks.append((ch, ch, i))
                i += 1
            else:
                raise PolyParseError(f"unexpected character {ch!r}", text, i)
        self.toks.append(("end", "", n))
        self.k = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.k]

    def take(self, kind: str | None = None) -> tuple[str, str, int]:
        tok = self.toks[self.k]
        if kind is not None and tok[0] != kind:
            raise PolyParseError(f"expected {kind!r}, found {tok[1]!r}" if tok[0] != "end" else f"expected {kind!r}, found end of input", self.text, tok[2])
        self.k += 1
        return tok


def parse_poly(text: str, symbols: Sequence[str] | None = None) -> ParamPoly:
    """Parse the polynomial grammar.

    When ``symbols`` is None the symbol tuple is the alphabetically sorted
    set of symbols appearing in the text; passing it pins the tuple (and
    makes unknown symbols an error).
    """
    toks = _Tokens(text)
    if symbols is None:
        found = sorted({t[1] for t in toks.toks if t[0] == "sym"})
        symtuple = tuple(found)
    else:
        symtuple = tuple(symbols)

    def parse_expr() -> ParamPoly:
        sign = 1
        while toks.peek()[0] in "+-":
            if toks.take()[0] == "-":
                sign = -sign
        acc = parse_term()
        if sign < 0:
            acc = -acc
        while toks.peek()[0] in "+-":
            op = toks.take()[0]
            sign = 1
            while toks.peek()[0] in "+-":
                if toks.take()[0] == "-":
                    sign = -sign
            rhs = parse_term()
            if (op == "-") != (sign < 0):
                rhs = -rhs
            acc = acc + rhs
        return acc

    def parse_term() -> ParamPoly:
        acc = parse_factor()
        while True:
            kind = toks.peek()[0]
            if kind == "*":
                toks.take()
                acc = acc * parse_factor()
            elif kind == "/":
                # Rational literal written as p/q; only constant divisors.
                _, _, pos = toks.take()
                div = parse_factor()
                if not div.is_constant:
                    raise PolyParseError("division only by rational constants", text, pos)
                d = div.constant_value()
                if not d:
                    raise PolyParseError("division by zero", text, pos)
                acc = acc * ParamPoly.const(symtuple, 1 / d)
            else:
                return acc

    def parse_factor() -> ParamPoly:
        base = parse_base()
        if toks.peek()[0] == "^":
            _, _, pos = toks.take()
            neg = False
            while toks.peek()[0] == "-":
                toks.take()
                neg = not neg
            digits = toks.take("int")[1]
            if neg:
                raise PolyParseError("negative exponent", text, pos)
            return base ** int(digits)
        return base

    def parse_base() -> ParamPoly:
        kind, value, pos = toks.peek()
        if kind == "int":
            toks.take()
            return ParamPoly.const(symtuple, int(value))
        if kind == "sym":
            toks.take()
            if value not in symtuple:
                raise PolyParseError(f"unknown symbol {value!r}", text, pos)
            return ParamPoly.variable(symtuple, value)
        if kind == "(":
            toks.take()
            inner = parse_expr()
            tok = toks.peek()
            if tok[0] != ")":
                raise PolyParseError("expected ')'", text, tok[2])
            toks.take()
            return inner
        if kind == "-":
            toks.take()
            return -parse_factor()
        raise PolyParseError(f"expected a polynomial, found {value!r}" if kind != "end" else "unexpected end of input", text, pos)

    result = parse_expr()
    tok = toks.peek()
    if tok[0] != "end":
        raise PolyParseError(f"trailing input {tok[1]!r}", text, tok[2])
    return result
