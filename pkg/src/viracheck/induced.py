"""Cyclic induced modules: Verma, Whittaker, and the realization over
the subalgebra spanned by d_k - lambda^{k-n} d_n for k > n.

A Whittaker module here is the cyclic module with generator 1 on which
d_i acts by the scalar a_i for n <= i <= 2n, by zero for i > 2n, and c by
theta.  Its PBW basis consists of non-decreasing words in d_j with
j <= n - 1 applied to the generator.  n = 0 recovers the Verma module of
highest weight a_0 (with this package's bracket convention the level-k
space has d_0-eigenvalue a_0 - k).

The level of a basis word is sum(n - j) over its letters; for n = 0 this
is the usual Verma level, and it always bounds the word length, which is
what the truncation caps rely on.  Every operation that would produce a
word above the cap raises CapExceeded instead of silently truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

from .enveloping import Word, normal_order
from .errors import CapExceeded, ModeError
from .polyts import HPoly, PolyTS, op_F, op_G
from .scalars import Alphabet, Scalar


@dataclass(frozen=True)
class WhittakerSpec:
    """n, the scalars a = (a_n, ..., a_2n), and the central charge theta."""

    n: int
    a: tuple[Scalar, ...]
    theta: Scalar

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if len(self.a) != self.n + 1:
            raise ValueError(f"need n+1 = {self.n + 1} scalars a_n..a_2n, got {len(self.a)}")
        alph = self.theta.alphabet
        if any(ai.alphabet != alph for ai in self.a):
            raise ModeError("WhittakerSpec scalars over different alphabets")

    @property
    def alphabet(self) -> Alphabet:
        return self.theta.alphabet

    def generator_scalar(self, i: int) -> Scalar:
        """The scalar by which d_i acts on the cyclic vector, for i >= n."""
        if i < self.n:
            raise ValueError(f"d_{i} does not act by a scalar (i < n)")
        if i <= 2 * self.n:
            return self.a[i - self.n]
        return Scalar.zero(self.alphabet)


def verma_spec(weight: Scalar, theta: Scalar) -> WhittakerSpec:
    """The Verma module of highest weight `weight` as the n = 0 case."""
    return WhittakerSpec(n=0, a=(weight,), theta=theta)


def word_level(word: Word, n: int) -> int:
    return sum(n - j for j in word)


@lru_cache(maxsize=None)
def _act_on_word(spec: WhittakerSpec, m: int, word: Word) -> tuple[tuple[Word, Scalar], ...]:
    ordered = normal_order((m,) + word, spec.theta)
    out: dict[Word, Scalar] = {}
    for w, c in ordered.terms.items():
        split = len(w)
        for pos, idx in enumerate(w):
            if idx >= spec.n:
                split = pos
                break
        coeff = c
        for idx in w[split:]:
            coeff = coeff * spec.generator_scalar(idx)
            if coeff.is_zero():
                break
        if coeff.is_zero():
            continue
        prefix = w[:split]
        acc = out.get(prefix)
        out[prefix] = coeff if acc is None else acc + coeff
    return tuple((w, c) for w, c in out.items() if not c.is_zero())


class PBWVector:
    """Level-capped linear combination of PBW basis words applied to 1."""

    __slots__ = ("spec", "level_cap", "terms")

    def __init__(self, spec: WhittakerSpec, level_cap: int, terms: Mapping[Word, Scalar]):
        clean: dict[Word, Scalar] = {}
        for word, coeff in terms.items():
            if coeff.is_zero():
                continue
            if any(j > spec.n - 1 for j in word):
                raise ValueError(f"word {word} has indices above n-1 = {spec.n - 1}")
            if list(word) != sorted(word):
                raise ValueError(f"word {word} is not normal ordered")
            lvl = word_level(word, spec.n)
            if lvl > level_cap:
                raise CapExceeded(f"word {word} at level {lvl} exceeds cap {level_cap}")
            clean[word] = coeff
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "level_cap", level_cap)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PBWVector is immutable")

    @property
    def alphabet(self) -> Alphabet:
        return self.spec.alphabet

    @staticmethod
    def cyclic(spec: WhittakerSpec, level_cap: int) -> PBWVector:
        return PBWVector(spec, level_cap, {(): Scalar.one(spec.alphabet)})

    @staticmethod
    def basis(spec: WhittakerSpec, level_cap: int, word: Word) -> PBWVector:
        return PBWVector(spec, level_cap, {word: Scalar.one(spec.alphabet)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: PBWVector) -> PBWVector:
        terms = dict(self.terms)
        for w, c in other.terms.items():
            acc = terms.get(w)
            terms[w] = c if acc is None else acc + c
        return PBWVector(self.spec, self.level_cap, terms)

    def __neg__(self) -> PBWVector:
        return PBWVector(self.spec, self.level_cap, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: PBWVector) -> PBWVector:
        return self + (-other)

    def scale(self, c: Scalar) -> PBWVector:
        return PBWVector(self.spec, self.level_cap, {w: v * c for w, v in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PBWVector):
            return NotImplemented
        return self.spec == other.spec and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.spec, frozenset(self.terms.items())))

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms):
            c = self.terms[w].render()
            if ("+" in c) or (" - " in c):
                c = f"({c})"
            parts.append(f"{c}*{render_word(w)}" if c != "1" else render_word(w))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"PBWVector({self.render()})"


def render_word(word: Word) -> str:
    """Serialize a PBW word as "d[-3]^2 d[-1]" (the cyclic vector for ())."""
    if not word:
        return "1"
    parts = []
    pos = 0
    while pos < len(word):
        j = word[pos]
        count = 1
        while pos + count < len(word) and word[pos + count] == j:
            count += 1
        parts.append(f"d[{j}]" if count == 1 else f"d[{j}]^{count}")
        pos += count
    return " ".join(parts)


def whittaker_act(spec: WhittakerSpec, m: int, v: PBWVector) -> PBWVector:
    """Image of v under d_m, staying inside the level cap or raising CapExceeded."""
    out: dict[Word, Scalar] = {}
    for word, coeff in v.terms.items():
        for w, c in _act_on_word(spec, m, word):
            add = coeff * c
            acc = out.get(w)
            out[w] = add if acc is None else acc + add
    return PBWVector(spec, v.level_cap, out)


def central_act(v: PBWVector) -> PBWVector:
    return v.scale(v.spec.theta)


def _partitions(total: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    if max_part is None:
        max_part = total
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


def verma_level_basis(spec: WhittakerSpec, level: int) -> list[Word]:
    """All PBW words of the given exact level in a Verma module (n = 0).

    The count is the partition number p(level).
    """
    if spec.n != 0:
        raise ValueError("verma_level_basis applies to the n = 0 case")
    return [tuple(-p for p in parts) for parts in _partitions(level)]


def words_up_to_level(n: int, max_level: int) -> list[Word]:
    """All PBW words (indices <= n-1, non-decreasing) with level <= max_level."""
    out: list[Word] = []

    def build(prefix: tuple[int, ...], budget: int, max_j: int) -> None:
        out.append(prefix)
        j = max_j
        while n - j <= budget:
            build(prefix + (j,), budget - (n - j), j)
            j -= 1

    # each multiset of letters is built exactly once, largest letter first
    build((), max_level, n - 1)
    return sorted((tuple(sorted(w)) for w in out), key=lambda w: (word_level(w, n), w))


def stabilization_bound(spec: WhittakerSpec, v: PBWVector) -> int:
    """Smallest K such that d_m v = 0 for every m in a verification window
    above K; verified by direct action over (K, K + level_cap + 2n + 2].
    """
    max_level = max((word_level(w, spec.n) for w in v.terms), default=0)
    hard_bound = 2 * spec.n + max_level
    window = v.level_cap + 2 * spec.n + 2
    last_nonzero = 0
    for m in range(1, hard_bound + window + 1):
        if not whittaker_act(spec, m, v).is_zero():
            last_nonzero = m
    k = last_nonzero
    for m in range(k + 1, k + window + 1):
        assert whittaker_act(spec, m, v).is_zero(), "stabilization window not clear"
    return k


# -- the subalgebra action on C[t] -----------------------------------------


@dataclass(frozen=True)
class BModuleSpec:
    """Parameters (lambda, n, alpha, h, a) of the module C[t] for the
    subalgebra spanned by d_k - lambda^{k-n} d_n, k >= n+1."""

    lam: Scalar
    n: int
    alpha: Scalar
    h: HPoly
    a: tuple[Scalar, ...]

    def __post_init__(self) -> None:
        if self.lam.is_zero():
            raise ValueError("lambda must be nonzero")
        if len(self.a) != self.n + 1:
            raise ValueError(f"need n+1 = {self.n + 1} scalars a_n..a_2n")
        alph = self.lam.alphabet
        if self.alpha.alphabet != alph or self.h.alphabet != alph:
            raise ModeError("BModuleSpec parameters over different alphabets")
        if any(ai.alphabet != alph for ai in self.a):
            raise ModeError("BModuleSpec scalars over different alphabets")

    @property
    def alphabet(self) -> Alphabet:
        return self.lam.alphabet

    def a_scalar(self, k: int) -> Scalar:
        if k < self.n:
            raise ValueError(f"a_{k} undefined below n")
        if k <= 2 * self.n:
            return self.a[k - self.n]
        return Scalar.zero(self.alphabet)

    def whittaker_spec(self, theta: Scalar) -> WhittakerSpec:
        return WhittakerSpec(n=self.n, a=self.a, theta=theta)

    def omega_spec(self):
        from .modules import OmegaSpec

        return OmegaSpec(lam=self.lam, alpha=self.alpha, h=self.h)


def b_module_act(spec: BModuleSpec, k: int, f: PolyTS) -> PolyTS:
    """(d_k - lambda^{k-n} d_n) acting on f(t):

        (k - n) lambda^k (G(f) - (k + n) alpha F(f)) + (a_k - lambda^{k-n} a_n) f

    with a_k = 0 for k > 2n.  Requires k >= n + 1.
    """
    if k <= spec.n:
        raise IndexError(f"generator index k = {k} must exceed n = {spec.n}")
    if f.has_s():
        raise ValueError("the subalgebra acts on polynomials in t only")
    n = spec.n
    operator_part = op_G(f, spec.h, spec.alpha) - op_F(f, spec.h, spec.alpha).scale(
        spec.alpha
    ).scale_rational(k + n)
    operator_part = operator_part.scale(spec.lam.int_pow_of(k)).scale_rational(k - n)
    scalar_part = spec.a_scalar(k) - spec.lam.int_pow_of(k - n) * spec.a_scalar(n)
    return operator_part + f.scale(scalar_part)


# -- induced-module basis tags and action ----------------------------------

IndTag = tuple[Word, int]  # (non-decreasing word with indices <= n, t exponent)


def ind_basis(
    spec: BModuleSpec, len_cap: int, t_cap: int, min_index: int | None = None
) -> list[IndTag]:
    """All basis tags word (x) t^i with word length <= len_cap, letters drawn
    from [min_index, n] non-decreasing, and i <= t_cap.

    min_index defaults to n - 1, the shallowest window that exercises both
    the s-raising letter d_n and one letter landing in the right factor.
    """
    lo = spec.n - 1 if min_index is None else min_index
    words: list[Word] = [()]
    frontier: list[Word] = [()]
    for _ in range(len_cap):
        nxt = []
        for w in frontier:
            start = w[-1] if w else lo
            for j in range(start, spec.n + 1):
                nxt.append(w + (j,))
        words.extend(nxt)
        frontier = nxt
    return [(w, i) for w in sorted(set(words), key=lambda w: (len(w), w)) for i in range(t_cap + 1)]


def render_ind_tag(tag: IndTag) -> str:
    word, i = tag
    return f"{render_word(word)} | t^{i}"


def _ind_eval(
    spec: BModuleSpec, theta: Scalar, word: Word, f: PolyTS
) -> dict[IndTag, Scalar]:
    """Reduce word (x) f(t) to basis tags, using d_k = lambda^{k-n} d_n +
    (d_k - lambda^{k-n} d_n) for the letters with k > n; the parenthesized
    part acts on f through the subalgebra action."""
    out: dict[IndTag, Scalar] = {}
    stack: list[tuple[Word, PolyTS, Scalar]] = [(word, f, Scalar.one(spec.alphabet))]
    while stack:
        w, poly, coeff = stack.pop()
        if coeff.is_zero() or poly.is_zero():
            continue
        if list(w) != sorted(w):
            for w2, c2 in normal_order(w, theta).terms.items():
                stack.append((w2, poly, coeff * c2))
            continue
        if w and w[-1] > spec.n:
            k = w[-1]
            head = w[:-1]
            stack.append((head + (spec.n,), poly, coeff * spec.lam.int_pow_of(k - spec.n)))
            stack.append((head, b_module_act(spec, k, poly), coeff))
            continue
        for (dt, ds), c in poly.terms.items():
            if ds:
                raise ValueError("t-polynomial acquired s dependence")
            key = (w, dt)
            add = coeff * c
            acc = out.get(key)
            out[key] = add if acc is None else acc + add
    return {k: v for k, v in out.items() if not v.is_zero()}


def ind_act(
    spec: BModuleSpec, theta: Scalar, j: int, elem: Mapping[IndTag, Scalar]
) -> dict[IndTag, Scalar]:
    """d_j acting on a combination of induced-module basis tags."""
    out: dict[IndTag, Scalar] = {}
    alph = spec.alphabet
    for (word, i), coeff in elem.items():
        f = PolyTS(alph, {(i, 0): Scalar.one(alph)})
        for tag, c in _ind_eval(spec, theta, (j,) + word, f).items():
            add = coeff * c
            acc = out.get(tag)
            out[tag] = add if acc is None else acc + add
    return {k: v for k, v in out.items() if not v.is_zero()}


def theorem52_map(spec: BModuleSpec, theta: Scalar, tag: IndTag, level_cap: int):
    """Image of a basis tag under word (x) t^i  ->  word(t^i (x) 1), computed
    in the tensor product of the two-variable module with the Whittaker
    module (rightmost letters act first)."""
    from .tensors import OmegaTSFactor, TensorElement, WhittakerFactor, tensor_act

    word, i = tag
    factors = (
        OmegaTSFactor(spec.omega_spec()),
        WhittakerFactor(spec.whittaker_spec(theta), level_cap),
    )
    w = TensorElement(factors, {((i, 0), ()): Scalar.one(spec.alphabet)})
    for j in reversed(word):
        w = tensor_act(j, w)
    return w


def b_tag_exponents(tag_word: Word, s_deg: int, t_deg: int) -> dict[int, int]:
    """Exponent profile of a target-side basis vector t^{t_deg} s^{s_deg}
    (x) (word . 1): multiplicity at each word index, s_deg at n, t_deg at n+1.
    """
    exps: dict[int, int] = {}
    for j in tag_word:
        exps[j] = exps.get(j, 0) + 1
    return exps


def b_tag_less(n: int, a: tuple[Word, int, int], b: tuple[Word, int, int]) -> bool:
    """Total order on target basis vectors: compare exponents at increasing
    index; the first strict difference decides (l < r iff l's exponent there
    is smaller)."""
    ea = b_tag_exponents(*a)
    eb = b_tag_exponents(*b)
    ea[n] = a[1]
    eb[n] = b[1]
    ea[n + 1] = a[2]
    eb[n + 1] = b[2]
    for idx in sorted(set(ea) | set(eb)):
        va, vb = ea.get(idx, 0), eb.get(idx, 0)
        if va != vb:
            return va < vb
    return False


def leading_term_order_check(
    spec: BModuleSpec,
    theta: Scalar,
    len_cap: int,
    t_cap: int,
    level_cap: int,
    min_index: int | None = None,
) -> dict:
    """For every caps-bounded basis tag, verify that its image has the
    claimed leading term (the tag itself, read on the target side) with a
    nonzero coefficient and all other terms strictly lower in the order.

    Returns a report with the triangularity verdict and any counterexamples.
    """
    n = spec.n
    tags = ind_basis(spec, len_cap, t_cap, min_index)
    failures = []
    images = {}
    for tag in tags:
        word, i = tag
        expected = (tuple(j for j in word if j < n), word.count(n), i)
        image = theorem52_map(spec, theta, tag, level_cap)
        images[tag] = image
        if image.is_zero():
            failures.append({"tag": render_ind_tag(tag), "reason": "zero image"})
            continue
        entries = []
        for ((t_deg, s_deg), rword), coeff in image.terms.items():
            entries.append(((rword, s_deg, t_deg), coeff))
        top = entries[0][0]
        for cand, _ in entries[1:]:
            if b_tag_less(n, top, cand):
                top = cand
        if top != expected:
            failures.append(
                {
                    "tag": render_ind_tag(tag),
                    "reason": "leading term mismatch",
                    "got": repr(top),
                    "want": repr(expected),
                }
            )
            continue
        for cand, _ in entries:
            if cand != top and not b_tag_less(n, cand, top):
                failures.append(
                    {
                        "tag": render_ind_tag(tag),
                        "reason": "term not below leading",
                        "term": repr(cand),
                    }
                )
    leading = {tag: (tuple(j for j in tag[0] if j < n), tag[0].count(n), tag[1]) for tag in tags}
    distinct = len(set(leading.values())) == len(tags)
    if not distinct:
        failures.append({"reason": "leading tags not pairwise distinct"})
    return {
        "tags": len(tags),
        "triangular": not failures,
        "failures": failures,
        "images": images,
    }
