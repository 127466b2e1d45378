"""Tensor products of module factors and the quadratic word operators.

A TensorElement is a finitely supported map from tuples of per-factor basis
keys to Scalar coefficients:

  * two-variable factor keys are (deg_t, deg_s) monomial exponents,
  * rank-one factor keys are single s-exponents,
  * Whittaker/Verma factor keys are PBW words,
  * the trivial one-dimensional factor key is ().

The generators act by the Leibniz rule across factors.  The operators

    omega(r, l, m) = sum_i C(r, i) (-1)^(r-i) d_{l-m-i} d_{m+i}

and the coefficient-extraction machinery (exact Lagrange interpolation of
the action's polynomial dependence on m after dividing by lambda^m) live
here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .errors import ModeError, WindowBelowK, WindowTooSmall
from .induced import PBWVector, WhittakerSpec, stabilization_bound, whittaker_act, word_level
from .modules import (
    OmegaLZSpec,
    OmegaSpec,
    _lz_act_monomial,
    _omega_act_monomial,
)
from .polyts import PolyTS, binomial, op_F, op_G
from .scalars import Alphabet, Scalar


class OmegaTSFactor:
    """Two-variable module factor; basis keys (deg_t, deg_s)."""

    def __init__(self, spec: OmegaSpec):
        self.spec = spec
        self.alphabet = spec.alphabet
        self.central = Scalar.zero(spec.alphabet)
        self.locally_finite = False

    def act_on_basis(self, m: int, key: tuple[int, int]) -> Mapping:
        return _omega_act_monomial(self.spec, m, key[0], key[1]).terms

    def render_key(self, key) -> str:
        dt, ds = key
        return "*".join(
            (name if deg == 1 else f"{name}^{deg}")
            for name, deg in (("t", dt), ("s", ds))
            if deg
        ) or "1"

    def __eq__(self, other):
        return isinstance(other, OmegaTSFactor) and self.spec == other.spec

    def __hash__(self):
        return hash(("omega-ts", self.spec))


class OmegaLZFactor:
    """Rank-one module factor; basis keys are s_i exponents."""

    def __init__(self, spec: OmegaLZSpec):
        self.spec = spec
        self.alphabet = spec.alphabet
        self.central = Scalar.zero(spec.alphabet)
        self.locally_finite = False

    def act_on_basis(self, m: int, key: int) -> Mapping:
        return _lz_act_monomial(self.spec, m, key).terms

    def render_key(self, key) -> str:
        v = f"s{self.spec.var_id}"
        return "1" if key == 0 else (v if key == 1 else f"{v}^{key}")

    def __eq__(self, other):
        return isinstance(other, OmegaLZFactor) and self.spec == other.spec

    def __hash__(self):
        return hash(("omega-lz", self.spec))


class WhittakerFactor:
    """Whittaker/Verma factor; basis keys are PBW words."""

    def __init__(self, spec: WhittakerSpec, level_cap: int):
        self.spec = spec
        self.level_cap = level_cap
        self.alphabet = spec.alphabet
        self.central = spec.theta
        self.locally_finite = True

    def act_on_basis(self, m: int, key: tuple[int, ...]) -> Mapping:
        v = PBWVector.basis(self.spec, self.level_cap, key)
        return whittaker_act(self.spec, m, v).terms

    def stab_bound(self, key: tuple[int, ...]) -> int:
        return stabilization_bound(self.spec, PBWVector.basis(self.spec, self.level_cap, key))

    def render_key(self, key) -> str:
        from .induced import render_word

        return render_word(key)

    def __eq__(self, other):
        return (
            isinstance(other, WhittakerFactor)
            and self.spec == other.spec
            and self.level_cap == other.level_cap
        )

    def __hash__(self):
        return hash(("whittaker", self.spec, self.level_cap))


class TrivialFactor:
    """One-dimensional trivial module; every generator acts as zero."""

    def __init__(self, alph: Alphabet):
        self.alphabet = alph
        self.central = Scalar.zero(alph)
        self.locally_finite = True

    def act_on_basis(self, m: int, key: tuple) -> Mapping:
        return {}

    def stab_bound(self, key) -> int:
        return 0

    def render_key(self, key) -> str:
        return "1"

    def __eq__(self, other):
        return isinstance(other, TrivialFactor) and self.alphabet == other.alphabet

    def __hash__(self):
        return hash(("trivial", self.alphabet))


class TensorElement:
    """Bilinear combination across a fixed tuple of factors; immutable."""

    __slots__ = ("factors", "terms")

    def __init__(self, factors: tuple, terms: Mapping[tuple, Scalar]):
        alph = factors[0].alphabet
        for f in factors:
            if f.alphabet != alph:
                raise ModeError("tensor factors over different alphabets")
        clean = {}
        for key, coeff in terms.items():
            if len(key) != len(factors):
                raise ValueError("key arity does not match factor count")
            if not coeff.is_zero():
                clean[key] = coeff
        object.__setattr__(self, "factors", tuple(factors))
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("TensorElement is immutable")

    @property
    def alphabet(self) -> Alphabet:
        return self.factors[0].alphabet

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: TensorElement) -> TensorElement:
        if self.factors != other.factors:
            raise ModeError("tensor elements over different factor tuples")
        terms = dict(self.terms)
        for k, c in other.terms.items():
            acc = terms.get(k)
            terms[k] = c if acc is None else acc + c
        return TensorElement(self.factors, terms)

    def __neg__(self) -> TensorElement:
        return TensorElement(self.factors, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: TensorElement) -> TensorElement:
        return self + (-other)

    def scale(self, c: Scalar) -> TensorElement:
        return TensorElement(self.factors, {k: v * c for k, v in self.terms.items()})

    def scale_rational(self, q) -> TensorElement:
        return TensorElement(self.factors, {k: v.scale(q) for k, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.factors == other.factors and self.terms == other.terms

    def __hash__(self):
        return hash((self.factors, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, coeff in self.sorted_terms():
            txt = " (x) ".join(f.render_key(k) for f, k in zip(self.factors, key))
            c = coeff.render()
            if ("+" in c) or (" - " in c):
                c = f"({c})"
            parts.append(f"{c} * [{txt}]" if c != "1" else f"[{txt}]")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TensorElement({self.render()})"

    # -- views ------------------------------------------------------------

    def left_poly(self, right_key: tuple) -> PolyTS:
        """The PolyTS coefficient of a right-factor key combination (the
        leading factor must be the two-variable one)."""
        if not isinstance(self.factors[0], OmegaTSFactor):
            raise ValueError("left_poly requires a two-variable leading factor")
        terms = {}
        for key, coeff in self.terms.items():
            if key[1:] == right_key:
                terms[key[0]] = coeff
        return PolyTS(self.alphabet, terms)

    def top_s_degree(self) -> int:
        if not isinstance(self.factors[0], OmegaTSFactor):
            raise ValueError("top_s_degree requires a two-variable leading factor")
        return max((key[0][1] for key in self.terms), default=-1)


def tensor_from_poly(factors: tuple, poly: PolyTS, right_key: tuple) -> TensorElement:
    """poly (x) basis vector, for a two-variable leading factor."""
    terms = {}
    for mono, coeff in poly.terms.items():
        terms[(mono,) + right_key] = coeff
    return TensorElement(factors, terms)


def tensor_act(m: int, w: TensorElement) -> TensorElement:
    """Leibniz action of d_m across all factors."""
    out: dict[tuple, Scalar] = {}
    for key, coeff in w.terms.items():
        for slot, factor in enumerate(w.factors):
            for new_key, c in factor.act_on_basis(m, key[slot]).items():
                full = key[:slot] + (new_key,) + key[slot + 1:]
                add = coeff * c
                acc = out.get(full)
                if acc is None:
                    out[full] = add
                else:
                    acc = acc + add
                    if acc.is_zero():
                        del out[full]
                    else:
                        out[full] = acc
    return TensorElement(w.factors, out)


def tensor_central(w: TensorElement) -> TensorElement:
    """Action of the central element: the sum of the factors' charges."""
    total = Scalar.zero(w.alphabet)
    for f in w.factors:
        total = total + f.central
    return w.scale(total)


# -- quadratic word operators ----------------------------------------------


@dataclass(frozen=True)
class OmegaWordOp:
    """omega(r, l, m) = sum_i C(r, i) (-1)^(r-i) d_{l-m-i} d_{m+i}."""

    r: int
    l: int
    m: int

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("r must be non-negative")

    def pairs(self) -> list[tuple[int, int, int]]:
        """(outer index, inner index, signed binomial weight) triples."""
        out = []
        for i in range(self.r + 1):
            sign = -1 if (self.r - i) % 2 else 1
            out.append((self.l - self.m - i, self.m + i, sign * binomial(self.r, i)))
        return out


def omega_apply(op: OmegaWordOp, x, act: Callable):
    """Apply the quadratic operator through a module action act(m, x)."""
    total = None
    for outer, inner, weight in op.pairs():
        term = act(outer, act(inner, x))
        term = (
            term.scale_rational(weight)
            if hasattr(term, "scale_rational")
            else term.scale(Scalar.rational(weight, term.alphabet))
        )
        total = term if total is None else total + term
    return total


def binomial_vanish(r: int, j: int) -> Fraction:
    """sum_i (-1)^(r-i) C(r, i) i^j; zero iff j < r, and r! at j = r."""
    total = 0
    for i in range(r + 1):
        sign = -1 if (r - i) % 2 else 1
        power = 1 if j == 0 else i**j
        total += sign * binomial(r, i) * power
    return Fraction(total)


def omega4_closed_form(spec: OmegaSpec, f: PolyTS, l: int) -> PolyTS:
    """24 lambda^l alpha^2 (xi^2 f - 2 xi df/dt + d2f/dt2) with s -> s - l,
    the closed form of omega(4, l, m) on the two-variable module with
    h = xi t + eta (independent of m)."""
    if spec.h.degree() != 1:
        raise ValueError("closed form requires deg(h) = 1")
    xi = spec.h.xi
    inner = f.scale(xi * xi) - f.d_dt().scale(xi).scale_rational(2) + f.d_dt().d_dt()
    inner = inner.shift_s(l)
    return inner.scale(spec.lam.int_pow_of(l) * spec.alpha * spec.alpha).scale_rational(24)


# -- stabilization and coefficient extraction --------------------------------


def element_stab_bound(w: TensorElement, slots: Sequence[int] | None = None) -> int:
    """Largest stabilization bound among the chosen locally finite factors.

    With slots=None every factor except the leading one must be locally
    finite (Whittaker/Verma or trivial); a rank-one factor never stabilizes
    and is rejected.
    """
    if slots is None:
        slots = range(1, len(w.factors))
    bound = 0
    for slot in slots:
        factor = w.factors[slot]
        if not factor.locally_finite:
            raise ValueError(f"factor in slot {slot} is not locally finite")
        for key in w.terms:
            bound = max(bound, factor.stab_bound(key[slot]))
    return bound


def interpolate_power_coeffs(nodes: Sequence[int], values: Sequence[Scalar]) -> list[Scalar]:
    """Exact coefficients of the polynomial through (nodes[i], values[i]).

    Newton divided differences over the scalar ring (the nodes are distinct
    integers, so the divisions are by nonzero rationals and stay exact),
    then expansion into the power basis.
    """
    if len(nodes) != len(values) or not nodes:
        raise ValueError("need equally many nodes and values")
    k = len(nodes)
    table = list(values)
    newton = [table[0]]
    for order in range(1, k):
        for i in range(k - order):
            table[i] = (table[i + 1] - table[i]).scale(
                Fraction(1, nodes[i + order] - nodes[i])
            )
        newton.append(table[0])
    alph = values[0].alphabet
    power = [Scalar.zero(alph) for _ in range(k)]
    basis = [Fraction(1)]
    for step, coeff in enumerate(newton):
        for d, bc in enumerate(basis):
            power[d] = power[d] + coeff.scale(bc)
        nxt = [Fraction(0)] * (len(basis) + 1)
        for d, bc in enumerate(basis):
            nxt[d + 1] += bc
            nxt[d] -= nodes[step] * bc
        basis = nxt
    return power


def prop31_extract(j: int, w: TensorElement, window: Sequence[int]) -> TensorElement:
    """The m^j coefficient of lambda^(-m) d_m(w), by exact interpolation.

    For a window of distinct integers above the stabilization bound of the
    right factors, lambda^(-m) d_m(w) is coefficient-wise a polynomial in m
    of degree at most r + 2 (r = top s-degree of w); the window must hold at
    least r + 3 nodes.  The j = 0 coefficient is s*w; the leading ones
    recover the operator images of the top slices.
    """
    if not isinstance(w.factors[0], OmegaTSFactor):
        raise ValueError("extraction requires a two-variable leading factor")
    r = max(w.top_s_degree(), 0)
    nodes = sorted(set(window))
    if len(nodes) < r + 3:
        raise WindowTooSmall(f"window holds {len(nodes)} nodes, need {r + 3}")
    bound = element_stab_bound(w)
    if nodes[0] <= bound:
        raise WindowBelowK(f"window starts at {nodes[0]}, stabilization bound is {bound}")
    lam = w.factors[0].spec.lam
    sampled: list[dict[tuple, Scalar]] = []
    keys: set[tuple] = set()
    for m in nodes:
        flat = {}
        scaled = tensor_act(m, w).scale(lam.int_pow_of(-m))
        for key, coeff in scaled.terms.items():
            flat[key] = coeff
            keys.add(key)
        sampled.append(flat)
    zero = Scalar.zero(w.alphabet)
    out: dict[tuple, Scalar] = {}
    for key in sorted(keys):
        coeffs = interpolate_power_coeffs(nodes, [flat.get(key, zero) for flat in sampled])
        for d in range(r + 3, len(coeffs)):
            assert coeffs[d].is_zero(), "action degree in m exceeded r + 2"
        if j < len(coeffs) and not coeffs[j].is_zero():
            out[key] = coeffs[j]
    return TensorElement(w.factors, out)


def prop31_closed_form(j: int, w: TensorElement) -> TensorElement:
    """The closed-form combination whose membership the extraction argument
    yields: for w = sum_i a_i(t) s^i (x) v_i this is

      sum_i ( C(i,j) a_i s^{i-j+1} - C(i,j-1) G(a_i) s^{i-j+1}
              - C(i,j-2) alpha F(a_i) s^{i-j+2} ) (x) v_i.

    The exact m^j coefficient computed by prop31_extract equals (-1)^j
    times this element.
    """
    if not isinstance(w.factors[0], OmegaTSFactor):
        raise ValueError("closed form requires a two-variable leading factor")
    spec = w.factors[0].spec
    alph = w.alphabet
    out: dict[tuple, Scalar] = {}

    def put(poly: PolyTS, right: tuple, scale_coeff: Scalar) -> None:
        for mono, c in poly.terms.items():
            key = (mono,) + right
            add = c * scale_coeff
            acc = out.get(key)
            if acc is None:
                out[key] = add
            else:
                acc = acc + add
                if acc.is_zero():
                    del out[key]
                else:
                    out[key] = acc

    for key, coeff in w.terms.items():
        (p, i), right = key[0], key[1:]
        f = PolyTS(alph, {(p, 0): Scalar.one(alph)})
        c1 = binomial(i, j)
        if c1 and i - j + 1 >= 0:
            put(f.shift_degrees(0, i - j + 1).scale_rational(c1), right, coeff)
        c2 = binomial(i, j - 1)
        if c2:
            put(
                op_G(f, spec.h, spec.alpha).shift_degrees(0, i - j + 1).scale_rational(-c2),
                right,
                coeff,
            )
        c3 = binomial(i, j - 2)
        if c3:
            put(
                op_F(f, spec.h, spec.alpha)
                .scale(spec.alpha)
                .shift_degrees(0, i - j + 2)
                .scale_rational(-c3),
                right,
                coeff,
            )
    return TensorElement(w.factors, out)


def s_multiply(w: TensorElement) -> TensorElement:
    """Multiply the leading two-variable slot by s."""
    if not isinstance(w.factors[0], OmegaTSFactor):
        raise ValueError("s_multiply requires a two-variable leading factor")
    return TensorElement(
        w.factors,
        {((k[0][0], k[0][1] + 1),) + k[1:]: c for k, c in w.terms.items()},
    )


def omega_signature(
    act: Callable,
    samples: Sequence,
    r_max: int,
    pairs_for: Callable[[int], Sequence[tuple[int, int]]],
) -> dict:
    """Per-r record of whether omega(r, l, m) annihilates every sample on
    the supplied (l, m) window; pairs_for(r) yields the window for each r.

    Returns {"vanishing_orders": [...], "witnesses": [...]} with a witness
    recorded for the first non-vanishing (r, l, m, sample).
    """
    vanishing: list[int] = []
    witnesses: list[dict] = []
    for r in range(r_max + 1):
        found = None
        for l, m in pairs_for(r):
            for idx, x in enumerate(samples):
                y = omega_apply(OmegaWordOp(r, l, m), x, act)
                if not y.is_zero():
                    found = {"r": r, "l": l, "m": m, "sample": idx}
                    break
            if found:
                break
        if found is None:
            vanishing.append(r)
        else:
            witnesses.append(found)
    return {"vanishing_orders": vanishing, "witnesses": witnesses}
