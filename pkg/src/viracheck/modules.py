"""The concrete modules Omega(lambda, alpha, h) and Omega(mu, b).

Omega(lambda, alpha, h) is C[t, s] with the action

    d_m (f(t) s^i) = lambda^m (s - m)^i (s f + m G(f) - m^2 alpha F(f)),
    c . x = 0,

and Omega(mu, b) is C[s] with

    d_m f(s) = mu^m (s + m b) f(s - m),
    c . x = 0.

Both families expose an act-on-basis interface keyed by monomial exponents
so the tensor machinery can treat them uniformly.  Actions on monomials are
memoized per (spec, m, key); specs are immutable so the caches are
semantically invisible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

from .errors import ModeError
from .polyts import HPoly, PolyTS, op_F, op_G
from .scalars import Alphabet, Scalar


@dataclass(frozen=True)
class OmegaSpec:
    """Parameters of the two-variable module; lam must be nonzero/invertible."""

    lam: Scalar
    alpha: Scalar
    h: HPoly

    def __post_init__(self) -> None:
        if self.lam.is_zero():
            raise ValueError("lambda must be nonzero")
        if self.lam.alphabet != self.alpha.alphabet or self.lam.alphabet != self.h.alphabet:
            raise ModeError("OmegaSpec parameters over different alphabets")

    @property
    def alphabet(self) -> Alphabet:
        return self.lam.alphabet


@lru_cache(maxsize=None)
def _omega_act_monomial(spec: OmegaSpec, m: int, dt: int, ds: int) -> PolyTS:
    alph = spec.alphabet
    f = PolyTS(alph, {(dt, 0): Scalar.one(alph)})
    core = f.shift_degrees(0, 1)
    if m:
        core = core + op_G(f, spec.h, spec.alpha).scale_rational(m)
        core = core - op_F(f, spec.h, spec.alpha).scale(spec.alpha).scale_rational(m * m)
    if ds:
        s_minus_m = PolyTS(alph, {(0, 1): Scalar.one(alph)}) + PolyTS.rational(-m, alph)
        core = s_minus_m.pow(ds) * core
    return core.scale(spec.lam.int_pow_of(m))


def omega_act(spec: OmegaSpec, m: int, x: PolyTS) -> PolyTS:
    """Image of x under d_m; the central element acts as zero."""
    if x.alphabet != spec.alphabet:
        raise ModeError("element and spec over different alphabets")
    total = PolyTS.zero(spec.alphabet)
    for (dt, ds), coeff in x.terms.items():
        total = total + _omega_act_monomial(spec, m, dt, ds).scale(coeff)
    return total


@dataclass(frozen=True)
class OmegaLZSpec:
    """Parameters of the rank-one module; mu must be nonzero/invertible.

    var_id tags the variable (s_1, s_2, ...) when several factors appear in
    one tensor product.
    """

    mu: Scalar
    b: Scalar
    var_id: int = 1

    def __post_init__(self) -> None:
        if self.mu.is_zero():
            raise ValueError("mu must be nonzero")
        if self.mu.alphabet != self.b.alphabet:
            raise ModeError("OmegaLZSpec parameters over different alphabets")

    @property
    def alphabet(self) -> Alphabet:
        return self.mu.alphabet


class OmegaLZElement:
    """Univariate polynomial in s_i with Scalar coefficients."""

    __slots__ = ("alphabet", "terms")

    def __init__(self, alph: Alphabet, terms: Mapping[int, Scalar]):
        clean = {}
        for deg, coeff in terms.items():
            if coeff.is_zero():
                continue
            if deg < 0:
                raise ValueError("negative degree")
            if coeff.alphabet != alph:
                raise ModeError("coefficient alphabet mismatch")
            clean[deg] = coeff
        object.__setattr__(self, "alphabet", alph)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("OmegaLZElement is immutable")

    @staticmethod
    def one(alph: Alphabet) -> OmegaLZElement:
        return OmegaLZElement(alph, {0: Scalar.one(alph)})

    @staticmethod
    def monomial(coeff: Scalar, deg: int) -> OmegaLZElement:
        return OmegaLZElement(coeff.alphabet, {deg: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: OmegaLZElement) -> OmegaLZElement:
        terms = dict(self.terms)
        for d, c in other.terms.items():
            acc = terms.get(d)
            terms[d] = c if acc is None else acc + c
        return OmegaLZElement(self.alphabet, terms)

    def __neg__(self) -> OmegaLZElement:
        return OmegaLZElement(self.alphabet, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: OmegaLZElement) -> OmegaLZElement:
        return self + (-other)

    def scale(self, c: Scalar) -> OmegaLZElement:
        return OmegaLZElement(self.alphabet, {d: v * c for d, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OmegaLZElement):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.alphabet, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for d in sorted(self.terms, reverse=True):
            c = self.terms[d].render()
            var = "" if d == 0 else ("s" if d == 1 else f"s^{d}")
            if ("+" in c) or (" - " in c):
                c = f"({c})"
            parts.append(f"{c}*{var}" if var and c != "1" else (var or c))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"OmegaLZElement({self.render()})"


@lru_cache(maxsize=None)
def _lz_act_monomial(spec: OmegaLZSpec, m: int, deg: int) -> OmegaLZElement:
    alph = spec.alphabet
    mu_m = spec.mu.int_pow_of(m)
    # (s + m b) * (s - m)^deg, expanded exactly
    out: dict[int, Scalar] = {}
    binom = 1
    power = 1
    coeffs = {}
    for p in range(deg + 1):
        if p:
            binom = binom * (deg - p + 1) // p
            power *= -m
        coeffs[deg - p] = binom * power
    mb = spec.b.scale(m)
    for d, c in coeffs.items():
        up = out.get(d + 1, Scalar.zero(alph)) + Scalar.rational(c, alph)
        if not up.is_zero():
            out[d + 1] = up
        lo = out.get(d, Scalar.zero(alph)) + mb.scale(c)
        if lo.is_zero():
            out.pop(d, None)
        else:
            out[d] = lo
    return OmegaLZElement(alph, out).scale(mu_m)


def omega_lz_act(spec: OmegaLZSpec, m: int, x: OmegaLZElement) -> OmegaLZElement:
    """Image of x under d_m: mu^m (s + m b) x(s - m)."""
    total = OmegaLZElement(spec.alphabet, {})
    for deg, coeff in x.terms.items():
        total = total + _lz_act_monomial(spec, m, deg).scale(coeff)
    return total


def bracket_check(act, i: int, j: int, x, central: Scalar | None = None) -> bool:
    """Does d_i d_j x - d_j d_i x equal (j - i) d_{i+j} x (+ central term)?

    act(m, x) is the module action; central is the scalar by which c acts
    (None or zero for the Omega families).  A False return is a finding,
    not an error.
    """
    lhs = _sub(act(i, act(j, x)), act(j, act(i, x)))
    rhs = _scale_rat(act(i + j, x), j - i)
    if central is not None and i == -j:
        from .enveloping import central_coeff

        cc = central_coeff(i)
        if cc:
            rhs = _add(rhs, _scale(x, central.scale(cc)))
    return lhs == rhs


def _add(a, b):
    return a + b


def _sub(a, b):
    return a - b


def _scale(x, c: Scalar):
    return x.scale(c)


def _scale_rat(x, q: int):
    if isinstance(x, PolyTS):
        return x.scale_rational(q)
    return x.scale(Scalar.rational(q, x.alphabet))


def iterate_action_matrix(act, x, steps: int) -> list:
    """x, d_n x, d_n^2 x, ... as raw elements (for local-finiteness probes)."""
    out = [x]
    for _ in range(steps):
        out.append(act(out[-1]))
    return out
