"""The abstract Virasoro algebra and PBW normal ordering.

Convention used throughout this package:

    [d_i, d_j] = (j - i) d_{i+j} + delta_{i,-j} ((i^3 - i) / 12) c

Note the sign: many texts use [L_i, L_j] = (i - j) L_{i+j}, which is the
opposite.  Downstream consequences inherit it, e.g. d_1 d_{-1} v = -2h v on
a highest weight vector of weight h.

Words are tuples of generator indices (the string "c" is accepted for the
central element and is specialized to a scalar theta up front).  Normal
ordering rewrites a word into the PBW basis of non-decreasing indices by
bubble-sorting adjacent transpositions through the bracket; termination
follows from the (length, inversion count) measure.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .scalars import Alphabet, Scalar

Word = tuple[int, ...]


def central_coeff(i: int) -> Fraction:
    """(i^3 - i) / 12, the coefficient of c in [d_i, d_{-i}]."""
    return Fraction(i**3 - i, 12)


def bracket(i: int, j: int, theta: Scalar) -> "UElement":
    """[d_i, d_j] as an element of U(Vir)/(c - theta)."""
    alph = theta.alphabet
    terms: dict[Word, Scalar] = {}
    if j != i:
        terms[(i + j,)] = Scalar.rational(j - i, alph)
    if i == -j:
        cc = central_coeff(i)
        if cc:
            terms[()] = theta.scale(cc)
    return UElement(alph, terms)


@lru_cache(maxsize=None)
def _normal_order_cached(word: Word, theta: Scalar) -> tuple[tuple[Word, Scalar], ...]:
    alph = theta.alphabet
    result: dict[Word, Scalar] = {}
    stack: list[tuple[Word, Scalar]] = [(word, Scalar.one(alph))]
    while stack:
        w, c = stack.pop()
        pos = -1
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                pos = k
                break
        if pos < 0:
            acc = result.get(w)
            result[w] = c if acc is None else acc + c
            continue
        i, j = w[pos], w[pos + 1]
        # d_i d_j = d_j d_i + (j - i) d_{i+j} + delta_{i,-j} ((i^3-i)/12) theta
        stack.append((w[:pos] + (j, i) + w[pos + 2:], c))
        stack.append((w[:pos] + (i + j,) + w[pos + 2:], c.scale(j - i)))
        if i == -j:
            cc = central_coeff(i)
            if cc:
                stack.append((w[:pos] + w[pos + 2:], c * theta.scale(cc)))
    return tuple((w, c) for w, c in result.items() if not c.is_zero())


def normal_order(word: tuple[int | str, ...], theta: Scalar) -> "UElement":
    """Rewrite a word of generators into the non-decreasing PBW basis.

    Occurrences of "c" act as multiplication by theta.
    """
    coeff = Scalar.one(theta.alphabet)
    ds: list[int] = []
    for g in word:
        if g == "c":
            coeff = coeff * theta
        else:
            ds.append(int(g))
    out: dict[Word, Scalar] = {}
    for w, c in _normal_order_cached(tuple(ds), theta):
        out[w] = c * coeff
    return UElement(theta.alphabet, out)


class UElement:
    """Linear combination of normal-ordered words with Scalar coefficients."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alph: Alphabet, terms: dict[Word, Scalar]):
        object.__setattr__(self, "alphabet", alph)
        object.__setattr__(
            self, "terms", {w: c for w, c in terms.items() if not c.is_zero()}
        )

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("UElement is immutable")

    @staticmethod
    def zero(alph: Alphabet) -> UElement:
        return UElement(alph, {})

    @staticmethod
    def generator(i: int, alph: Alphabet) -> UElement:
        return UElement(alph, {(i,): Scalar.one(alph)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: UElement) -> UElement:
        terms = dict(self.terms)
        for w, c in other.terms.items():
            acc = terms.get(w)
            terms[w] = c if acc is None else acc + c
        return UElement(self.alphabet, terms)

    def __neg__(self) -> UElement:
        return UElement(self.alphabet, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: UElement) -> UElement:
        return self + (-other)

    def scale(self, c: Scalar) -> UElement:
        return UElement(self.alphabet, {w: v * c for w, v in self.terms.items()})

    def mul(self, other: UElement, theta: Scalar) -> UElement:
        """Product in U(Vir)/(c - theta), re-straightened into the PBW basis."""
        total = UElement.zero(self.alphabet)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                total = total + normal_order(w1 + w2, theta).scale(c1 * c2)
        return total

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UElement):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.alphabet, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Word, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            word_txt = "*".join(f"d[{i}]" for i in w) if w else "1"
            cr = c.render()
            if ("+" in cr) or (" - " in cr):
                parts.append(f"({cr})*{word_txt}")
            elif cr == "1":
                parts.append(word_txt)
            else:
                parts.append(f"{cr}*{word_txt}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"UElement({self.render()})"


def commutator(a: UElement, b: UElement, theta: Scalar) -> UElement:
    return a.mul(b, theta) - b.mul(a, theta)
