"""Sparse bivariate polynomials in t and s over exact scalars.

PolyTS is a finitely supported map (deg_t, deg_s) -> Scalar.  The module
also houses the polynomial h(t) that parameterizes the two-variable modules
together with the operators

    F(f) = ((h(t) - h(alpha)) / (t - alpha)) * f - f'
    G(f) = h(alpha) * f + t * F(f)

where the division is exact synthetic division (t = alpha is always a root
of the numerator).  Both operators treat powers of s as passengers, so they
are applied to a PolyTS coefficient-wise in s; since the quotient polynomial
carries no s, this amounts to one global formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

from .errors import ModeError, ParseError
from .scalars import Alphabet, CONCRETE, RationalLike, Scalar, as_fraction

Key = tuple[int, int]


class PolyTS:
    """Polynomial in t and s with Scalar coefficients; immutable."""

    __slots__ = ("alphabet", "terms", "_hash")

    def __init__(self, alph: Alphabet, terms: Mapping[Key, Scalar]):
        clean: dict[Key, Scalar] = {}
        for (dt, ds), coeff in terms.items():
            if coeff.is_zero():
                continue
            if dt < 0 or ds < 0:
                raise ValueError(f"negative degree in PolyTS key ({dt}, {ds})")
            if coeff.alphabet != alph:
                raise ModeError("PolyTS coefficient alphabet mismatch")
            clean[(dt, ds)] = coeff
        object.__setattr__(self, "alphabet", alph)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PolyTS is immutable")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(alph: Alphabet = CONCRETE) -> PolyTS:
        return PolyTS(alph, {})

    @staticmethod
    def const(value: Scalar) -> PolyTS:
        return PolyTS(value.alphabet, {(0, 0): value})

    @staticmethod
    def monomial(coeff: Scalar, dt: int, ds: int) -> PolyTS:
        return PolyTS(coeff.alphabet, {(dt, ds): coeff})

    @staticmethod
    def rational(value: RationalLike, alph: Alphabet = CONCRETE) -> PolyTS:
        return PolyTS.const(Scalar.rational(value, alph))

    @staticmethod
    def var_t(alph: Alphabet = CONCRETE) -> PolyTS:
        return PolyTS(alph, {(1, 0): Scalar.one(alph)})

    @staticmethod
    def var_s(alph: Alphabet = CONCRETE) -> PolyTS:
        return PolyTS(alph, {(0, 1): Scalar.one(alph)})

    # -- structure -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def deg_t(self) -> int:
        return max((k[0] for k in self.terms), default=-1)

    def deg_s(self) -> int:
        return max((k[1] for k in self.terms), default=-1)

    def coeff(self, dt: int, ds: int) -> Scalar:
        return self.terms.get((dt, ds), Scalar.zero(self.alphabet))

    def s_slices(self) -> Iterator[tuple[int, PolyTS]]:
        """Yield (i, f_i) with f_i the t-polynomial coefficient of s^i."""
        slices: dict[int, dict[Key, Scalar]] = {}
        for (dt, ds), coeff in self.terms.items():
            slices.setdefault(ds, {})[(dt, 0)] = coeff
        for ds in sorted(slices):
            yield ds, PolyTS(self.alphabet, slices[ds])

    def has_s(self) -> bool:
        return any(ds for (_, ds) in self.terms)

    # -- arithmetic ------------------------------------------------------

    def _check_compatible(self, other: PolyTS) -> None:
        if self.alphabet != other.alphabet:
            raise ModeError("PolyTS alphabets differ")

    def __add__(self, other: PolyTS) -> PolyTS:
        self._check_compatible(other)
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = terms.get(key)
            if acc is None:
                terms[key] = coeff
            else:
                acc = acc + coeff
                if acc.is_zero():
                    del terms[key]
                else:
                    terms[key] = acc
        return PolyTS(self.alphabet, terms)

    def __neg__(self) -> PolyTS:
        return PolyTS(self.alphabet, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: PolyTS) -> PolyTS:
        return self + (-other)

    def __mul__(self, other: PolyTS) -> PolyTS:
        self._check_compatible(other)
        terms: dict[Key, Scalar] = {}
        for (t1, s1), c1 in self.terms.items():
            for (t2, s2), c2 in other.terms.items():
                key = (t1 + t2, s1 + s2)
                prod = c1 * c2
                acc = terms.get(key)
                if acc is None:
                    terms[key] = prod
                else:
                    acc = acc + prod
                    if acc.is_zero():
                        del terms[key]
                    else:
                        terms[key] = acc
        return PolyTS(self.alphabet, terms)

    def scale(self, c: Scalar) -> PolyTS:
        if c.is_zero():
            return PolyTS(self.alphabet, {})
        return PolyTS(self.alphabet, {k: v * c for k, v in self.terms.items()})

    def scale_rational(self, q: RationalLike) -> PolyTS:
        f = as_fraction(q)
        if f == 0:
            return PolyTS(self.alphabet, {})
        return PolyTS(self.alphabet, {k: v.scale(f) for k, v in self.terms.items()})

    def shift_degrees(self, dt: int, ds: int) -> PolyTS:
        """Multiply by t^dt * s^ds (dt, ds >= 0)."""
        return PolyTS(self.alphabet, {(a + dt, b + ds): c for (a, b), c in self.terms.items()})

    def pow(self, n: int) -> PolyTS:
        out = PolyTS.const(Scalar.one(self.alphabet))
        for _ in range(n):
            out = out * self
        return out

    def substitute(self, bindings: Mapping[str, RationalLike]) -> PolyTS:
        return PolyTS(CONCRETE, {k: c.substitute(bindings) for k, c in self.terms.items()})

    # -- calculus and substitutions in s ----------------------------------

    def d_dt(self) -> PolyTS:
        terms: dict[Key, Scalar] = {}
        for (dt, ds), coeff in self.terms.items():
            if dt == 0:
                continue
            key = (dt - 1, ds)
            add = coeff.scale(dt)
            acc = terms.get(key)
            terms[key] = add if acc is None else acc + add
        return PolyTS(self.alphabet, terms)

    def shift_s(self, m: int) -> PolyTS:
        """Substitute s -> s - m, expanding exactly by the binomial theorem."""
        if m == 0:
            return self
        terms: dict[Key, Scalar] = {}
        for (dt, ds), coeff in self.terms.items():
            for p, binom in _signed_binomials(ds, m):
                key = (dt, ds - p)
                add = coeff.scale(binom)
                acc = terms.get(key)
                if acc is None:
                    terms[key] = add
                else:
                    acc = acc + add
                    if acc.is_zero():
                        del terms[key]
                    else:
                        terms[key] = acc
        return PolyTS(self.alphabet, terms)

    # -- comparison, rendering -------------------------------------------

    def sorted_terms(self) -> list[tuple[Key, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyTS):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.alphabet, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (dt, ds), coeff in self.sorted_terms():
            vars_part = []
            if dt:
                vars_part.append("t" if dt == 1 else f"t^{dt}")
            if ds:
                vars_part.append("s" if ds == 1 else f"s^{ds}")
            c = coeff.render()
            if ("+" in c) or (" - " in c):
                vars_part.insert(0, f"({c})")
            elif c != "1" or not vars_part:
                vars_part.insert(0, c)
            parts.append("*".join(vars_part))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"PolyTS({self.render()})"


@lru_cache(maxsize=None)
def _signed_binomials(i: int, m: int) -> tuple[tuple[int, Fraction], ...]:
    """(p, C(i,p) * (-m)^p) pairs for expanding (s - m)^i."""
    out = []
    binom = 1
    power = Fraction(1)
    for p in range(i + 1):
        if p:
            binom = binom * (i - p + 1) // p
            power *= -m
        out.append((p, binom * power))
    return tuple(out)


def binomial(n: int, k: int) -> int:
    """C(n, k) with the convention C(n, k) = 0 for k < 0 or k > n."""
    if k < 0 or k > n:
        return 0
    out = 1
    for p in range(1, k + 1):
        out = out * (n - p + 1) // p
    return out


@dataclass(frozen=True)
class HPoly:
    """The polynomial h(t) = eta + xi*t + higher[0]*t^2 + ...

    higher is empty for the degree <= 1 case that makes the two-variable
    module irreducible; degree >= 2 is supported for the reducible probes.
    """

    xi: Scalar
    eta: Scalar
    higher: tuple[Scalar, ...] = ()

    def __post_init__(self) -> None:
        alph = self.xi.alphabet
        if self.eta.alphabet != alph or any(c.alphabet != alph for c in self.higher):
            raise ModeError("HPoly coefficients over different alphabets")

    @property
    def alphabet(self) -> Alphabet:
        return self.xi.alphabet

    def coeffs(self) -> tuple[Scalar, ...]:
        """Coefficients from degree 0 upward, trailing zeros trimmed."""
        cs = [self.eta, self.xi, *self.higher]
        while cs and cs[-1].is_zero():
            cs.pop()
        return tuple(cs)

    def degree(self) -> int:
        return len(self.coeffs()) - 1

    def at(self, alpha: Scalar) -> Scalar:
        """h(alpha) by Horner's rule."""
        total = Scalar.zero(self.alphabet)
        for c in reversed(self.coeffs()):
            total = total * alpha + c
        return total

    def as_polyts(self) -> PolyTS:
        return PolyTS(self.alphabet, {(k, 0): c for k, c in enumerate(self.coeffs())})

    def quotient_at(self, alpha: Scalar) -> PolyTS:
        """(h(t) - h(alpha)) / (t - alpha) by synthetic division, always exact."""
        cs = self.coeffs()
        if len(cs) <= 1:
            return PolyTS.zero(self.alphabet)
        q: list[Scalar] = [Scalar.zero(self.alphabet)] * (len(cs) - 1)
        acc = cs[-1]
        for k in range(len(cs) - 2, -1, -1):
            q[k] = acc
            acc = acc * alpha + cs[k]
        # acc is now h(alpha); the numerator h(t) - h(alpha) leaves remainder 0.
        assert acc == self.at(alpha), "synthetic division remainder mismatch"
        return PolyTS(self.alphabet, {(k, 0): c for k, c in enumerate(q)})


def h_linear(xi: Scalar, eta: Scalar) -> HPoly:
    return HPoly(xi=xi, eta=eta)


def h_from_coeffs(coeffs: list[Scalar]) -> HPoly:
    """Build from low-to-high coefficient list [eta, xi, ...]."""
    if not coeffs:
        raise ValueError("empty coefficient list")
    alph = coeffs[0].alphabet
    eta = coeffs[0]
    xi = coeffs[1] if len(coeffs) > 1 else Scalar.zero(alph)
    return HPoly(xi=xi, eta=eta, higher=tuple(coeffs[2:]))


@lru_cache(maxsize=None)
def _fg_data(h: HPoly, alpha: Scalar) -> tuple[PolyTS, Scalar]:
    return h.quotient_at(alpha), h.at(alpha)


def op_F(f: PolyTS, h: HPoly, alpha: Scalar) -> PolyTS:
    """F(f) = ((h(t) - h(alpha)) / (t - alpha)) * f - df/dt."""
    quotient, _ = _fg_data(h, alpha)
    return quotient * f - f.d_dt()


def op_G(f: PolyTS, h: HPoly, alpha: Scalar) -> PolyTS:
    """G(f) = h(alpha) * f + t * F(f)."""
    quotient, h_alpha = _fg_data(h, alpha)
    return f.scale(h_alpha) + (quotient * f - f.d_dt()).shift_degrees(1, 0)


# -- textual polynomial grammar -------------------------------------------
#
# Rendering writes "3/2*t^2*s + xi*t"; the parser accepts the same grammar:
# a sum of terms, each term a '*'-joined product of factors, each factor a
# rational, a declared symbol, t, or s, optionally followed by ^exponent.
# Parenthesized scalar sub-expressions like "(xi + eta)*t" are accepted.


_TOKEN_CHARS = set("0123456789/")


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*^()":
            tokens.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j] in _TOKEN_CHARS:
                j += 1
            tokens.append(text[i:j])
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(text[i:j])
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r} in polynomial")
    return tokens


class _Parser:
    def __init__(self, tokens: list[str], alph: Alphabet):
        self.tokens = tokens
        self.pos = 0
        self.alph = alph

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of polynomial")
        self.pos += 1
        return tok

    def parse_sum(self) -> PolyTS:
        total = self.parse_signed_term()
        while self.peek() in ("+", "-"):
            op = self.take()
            term = self.parse_term()
            total = total + term if op == "+" else total - term
        return total

    def parse_signed_term(self) -> PolyTS:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        term = self.parse_term()
        return term if sign > 0 else -term

    def parse_term(self) -> PolyTS:
        product = self.parse_factor()
        while self.peek() == "*":
            self.take()
            product = product * self.parse_factor()
        return product

    def parse_factor(self) -> PolyTS:
        tok = self.take()
        if tok == "(":
            inner = self.parse_sum()
            if self.take() != ")":
                raise ParseError("unbalanced parenthesis")
            base = inner
        elif tok == "-":
            return -self.parse_factor()
        elif tok and (tok[0].isdigit()):
            base = PolyTS.rational(Fraction(tok), self.alph)
        elif tok == "t":
            base = PolyTS.var_t(self.alph)
        elif tok == "s":
            base = PolyTS.var_s(self.alph)
        elif tok and (tok[0].isalpha() or tok[0] == "_"):
            base = PolyTS.const(Scalar.symbol(tok, self.alph))
        else:
            raise ParseError(f"unexpected token {tok!r}")
        if self.peek() == "^":
            self.take()
            exp_tok = self.take()
            neg = False
            if exp_tok == "-":
                neg = True
                exp_tok = self.take()
            if not exp_tok.isdigit():
                raise ParseError(f"bad exponent {exp_tok!r}")
            exp = int(exp_tok)
            if neg:
                if len(base.terms) == 1:
                    ((dt, ds), c), = base.terms.items()
                    if dt or ds:
                        raise ParseError("negative exponents only on scalar symbols")
                    return PolyTS.const(c.int_pow_of(-exp))
                raise ParseError("negative exponents only on scalar symbols")
            return base.pow(exp)
        return base


def parse_polyts(text: str, alph: Alphabet = CONCRETE) -> PolyTS:
    """Parse the textual polynomial grammar used by render()."""
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial string")
    parser = _Parser(tokens, alph)
    poly = parser.parse_sum()
    if parser.peek() is not None:
        raise ParseError(f"trailing tokens at {parser.pos}: {parser.tokens[parser.pos:]}")
    return poly


def parse_scalar(text: str, alph: Alphabet = CONCRETE) -> Scalar:
    """Parse a scalar expression (a polynomial with no t or s dependence)."""
    poly = parse_polyts(text, alph)
    if poly.is_zero():
        return Scalar.zero(alph)
    if poly.deg_t() > 0 or poly.deg_s() > 0:
        raise ParseError(f"expected scalar, got {text!r} with t or s dependence")
    return poly.coeff(0, 0)
