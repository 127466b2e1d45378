"""Exact scalars: rationals and Laurent polynomials over Q in declared symbols.

A Scalar is a finitely supported map from integer exponent vectors (one slot
per declared symbol) to Fraction coefficients.  Over the empty alphabet the
exponent vector is () and a Scalar is a plain rational; this is "concrete"
mode.  Over a non-empty alphabet scalars form a Laurent-polynomial ring;
this is "generic" mode.  Negative exponents are permitted only for symbols
declared invertible (e.g. lambda, mu1, mu2).

Zero coefficients are never stored, so structural equality of the term maps
is canonical equality.  Values are immutable after construction and safe to
share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import DivZero, InvertibleZero, ModeError, NotMonomial, UnboundSymbol

RationalLike = Union[int, Fraction, str]


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class ParamSymbol:
    """A declared parameter symbol, optionally invertible."""

    name: str
    invertible: bool = False


@dataclass(frozen=True)
class Alphabet:
    """Fixed, ordered set of parameter symbols a computation may use."""

    symbols: tuple[ParamSymbol, ...] = ()

    def __post_init__(self) -> None:
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol names in alphabet: {names}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    @property
    def mode(self) -> str:
        return "concrete" if not self.symbols else "generic"

    def index(self, name: str) -> int:
        for i, s in enumerate(self.symbols):
            if s.name == name:
                return i
        raise KeyError(f"symbol {name!r} not declared in alphabet {self.names}")

    def is_invertible(self, i: int) -> bool:
        return self.symbols[i].invertible

    def __len__(self) -> int:
        return len(self.symbols)


CONCRETE = Alphabet()


def alphabet(*names: str, invertible: Iterable[str] = ()) -> Alphabet:
    """Convenience constructor: alphabet("lambda", "xi", invertible=["lambda"])."""
    inv = set(invertible)
    unknown = inv - set(names)
    if unknown:
        raise ValueError(f"invertible flags for undeclared symbols: {sorted(unknown)}")
    return Alphabet(tuple(ParamSymbol(n, n in inv) for n in names))


class Scalar:
    """An element of Q or of a Laurent-polynomial ring over Q.

    terms maps exponent tuples (len == len(alphabet)) to nonzero Fractions.
    """

    __slots__ = ("alphabet", "terms", "_hash")

    def __init__(self, alph: Alphabet, terms: Mapping[tuple[int, ...], Fraction]):
        clean: dict[tuple[int, ...], Fraction] = {}
        width = len(alph)
        for exps, coeff in terms.items():
            if coeff == 0:
                continue
            if len(exps) != width:
                raise ValueError(f"exponent vector {exps} does not match alphabet width {width}")
            for i, e in enumerate(exps):
                if e < 0 and not alph.is_invertible(i):
                    raise ValueError(
                        f"negative exponent for non-invertible symbol {alph.names[i]!r}"
                    )
            clean[exps] = coeff
        object.__setattr__(self, "alphabet", alph)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Scalar is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def rational(value: RationalLike, alph: Alphabet = CONCRETE) -> Scalar:
        q = as_fraction(value)
        if q == 0:
            return Scalar(alph, {})
        return Scalar(alph, {(0,) * len(alph): q})

    @staticmethod
    def zero(alph: Alphabet = CONCRETE) -> Scalar:
        return Scalar(alph, {})

    @staticmethod
    def one(alph: Alphabet = CONCRETE) -> Scalar:
        return Scalar.rational(1, alph)

    @staticmethod
    def symbol(name: str, alph: Alphabet) -> Scalar:
        i = alph.index(name)
        exps = tuple(1 if k == i else 0 for k in range(len(alph)))
        return Scalar(alph, {exps: Fraction(1)})

    @staticmethod
    def symbol_power(name: str, power: int, alph: Alphabet) -> Scalar:
        i = alph.index(name)
        exps = tuple(power if k == i else 0 for k in range(len(alph)))
        return Scalar(alph, {exps: Fraction(1)})

    # -- predicates ------------------------------------------------------

    @property
    def mode(self) -> str:
        return self.alphabet.mode

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def as_fraction(self) -> Fraction:
        """The value of a symbol-free Scalar as a Fraction."""
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"scalar {self} carries symbols")
        return next(iter(self.terms.values()))

    # -- arithmetic ------------------------------------------------------

    def _check_compatible(self, other: Scalar) -> None:
        if self.alphabet != other.alphabet:
            raise ModeError(
                f"scalar alphabets differ: {self.alphabet.names} vs {other.alphabet.names}"
            )

    def __add__(self, other: Scalar) -> Scalar:
        self._check_compatible(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = terms.get(exps)
            if acc is None:
                terms[exps] = coeff
            else:
                acc = acc + coeff
                if acc:
                    terms[exps] = acc
                else:
                    del terms[exps]
        return Scalar(self.alphabet, terms)

    def __neg__(self) -> Scalar:
        return Scalar(self.alphabet, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Scalar) -> Scalar:
        return self + (-other)

    def __mul__(self, other: Scalar) -> Scalar:
        self._check_compatible(other)
        if not self.terms or not other.terms:
            return Scalar(self.alphabet, {})
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(exps)
                if acc is None:
                    terms[exps] = c1 * c2
                else:
                    acc = acc + c1 * c2
                    if acc:
                        terms[exps] = acc
                    else:
                        del terms[exps]
        return Scalar(self.alphabet, terms)

    def scale(self, q: RationalLike) -> Scalar:
        f = as_fraction(q)
        if f == 0:
            return Scalar(self.alphabet, {})
        return Scalar(self.alphabet, {e: c * f for e, c in self.terms.items()})

    def __pow__(self, n: int) -> Scalar:
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar.one(self.alphabet)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def inverse(self) -> Scalar:
        """Inverse of a monomial scalar (the only invertible generic scalars)."""
        if self.is_zero():
            raise DivZero("inverse of zero")
        if not self.is_monomial():
            raise NotMonomial(f"cannot invert multi-term scalar {self}")
        (exps, coeff), = self.terms.items()
        return Scalar(self.alphabet, {tuple(-e for e in exps): Fraction(1) / coeff})

    def divide_exact(self, divisor: Scalar) -> Scalar:
        """Exact division; the divisor must be a nonzero monomial."""
        self._check_compatible(divisor)
        if divisor.is_zero():
            raise DivZero("division by zero scalar")
        if not divisor.is_monomial():
            raise NotMonomial(f"divisor {divisor} is not a monomial")
        return self * divisor.inverse()

    def int_pow_of(self, m: int) -> Scalar:
        """self ** m for any integer m; negative m requires a monomial."""
        if m >= 0:
            return self ** m
        return self.inverse() ** (-m)

    # -- substitution ----------------------------------------------------

    def substitute(self, bindings: Mapping[str, RationalLike]) -> Scalar:
        """Bind every symbol to a rational, yielding a concrete-mode Scalar.

        Substitution is a ring homomorphism.  Binding zero to an invertible
        symbol is rejected; leaving any symbol unbound is rejected.
        """
        values: list[Fraction] = []
        for i, name in enumerate(self.alphabet.names):
            if name not in bindings:
                raise UnboundSymbol(f"symbol {name!r} not bound")
            q = as_fraction(bindings[name])
            if q == 0 and self.alphabet.is_invertible(i):
                raise InvertibleZero(f"invertible symbol {name!r} bound to zero")
            values.append(q)
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term *= v ** e
            total += term
        return Scalar.rational(total, CONCRETE)

    # -- canonical form, comparison, rendering ---------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending lexicographic exponent order (canonical)."""
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scalar):
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
        parts: list[str] = []
        for exps, coeff in self.sorted_terms():
            factors: list[str] = []
            for name, e in zip(self.alphabet.names, exps):
                if e == 0:
                    continue
                factors.append(name if e == 1 else f"{name}^{e}")
            if not factors or coeff != 1:
                if coeff == -1 and factors:
                    factors.insert(0, "-1")
                else:
                    factors.insert(0, str(coeff))
            parts.append("*".join(factors))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"Scalar({self.render()})"

    def to_json(self) -> object:
        """Canonical JSON form: "p/q" in concrete mode, term list otherwise."""
        if self.alphabet.mode == "concrete":
            return str(self.as_fraction())
        return [[list(e), str(c)] for e, c in self.sorted_terms()]
