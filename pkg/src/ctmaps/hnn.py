"""Britton reduction for the towers F(d1,d2) < G_c1d < G_cd.

Both levels have associated subgroups inside the bottom free group
F(d1, d2), so membership of a segment reduces to: Britton-reduce it one
level down, reject if any lower stable letter survives, then read it in a
Stallings graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .rips import (ALPHABET_C, ALPHABET_D, ALPHABET_GC1D, ALPHABET_GCD, RipsParams,
                   presentation_Gcd, word_Dij)
from .lazy import LazyFreeGroup
from .stallings import SubgroupGraph, nielsen_check
from .words import (Alphabet, Word, concat, format_word, free_reduce, invert,
                    substitute, translate)


@dataclass(frozen=True)
class TowerWord:
    """``g0 t^e1 g1 t^e2 ... gk`` for a fixed stable letter t."""

    segments: tuple[Word, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.segments) != len(self.signs) + 1:
            raise ValueError("need exactly one more segment than stable letters")
        if any(e not in (1, -1) for e in self.signs):
            raise ValueError("stable-letter exponents must be +1 or -1")

    @property
    def stable_count(self) -> int:
        return len(self.signs)


class _TW:
    """Internal tower word: segments are lazy elements one level down."""

    __slots__ = ("segs", "signs")

    def __init__(self, segs, signs):
        self.segs = tuple(segs)
        self.signs = tuple(signs)


class HNNLevel:
    """One HNN step: ``t^-1 b t = phi(b)`` for b in the subgroup B of F(d1, d2).

    Elements of the bottom free group are handled as lazy substitution
    images (see :mod:`ctmaps.lazy`), so nested pinches never force the
    expansion of the very long words they stand for.
    """

    def __init__(self, stable: str, alphabet: Alphabet, domain_basis: Sequence[Word],
                 image_basis: Sequence[Word], base: Optional["HNNLevel"] = None,
                 bottom: Alphabet = ALPHABET_D):
        self.stable = stable
        self.alphabet = alphabet
        self.t = alphabet.index(stable)
        self.base = base
        self.bottom = bottom
        if base is not None and base.bottom != bottom:
            raise ValueError("levels of one tower must share the bottom group")
        dom = [translate(w, self.bottom) for w in domain_basis]
        img = [translate(w, self.bottom) for w in image_basis]
        if len(dom) != len(img):
            raise ValueError("domain and image bases differ in size")
        self.domain_basis = tuple(dom)
        self.image_basis = tuple(img)
        self.image_certificate = nielsen_check(img)
        if not self.image_certificate.passed:
            raise ValueError(f"defining map for {stable} is not certified injective")
        self.domain = SubgroupGraph(dom)
        self.image = SubgroupGraph(img)
        self.group = base.group if base is not None else LazyFreeGroup(bottom)
        self.group.register(stable, img)
        if [free_reduce(w) for w in dom] == bottom.gens():
            self._dom_key = None
        else:
            self._dom_key = f"{stable}:domain"
            self.group.register(self._dom_key, dom)

    @property
    def stable_names(self) -> set[str]:
        names = {self.stable}
        if self.base:
            names |= self.base.stable_names
        return names

    # -- Word-level views ------------------------------------------------

    def split(self, w: Word) -> TowerWord:
        w = translate(w, self.alphabet)
        segs: list[list[tuple[int, int]]] = [[]]
        signs: list[int] = []
        for g, e in w.runs:
            if g != self.t:
                segs[-1].append((g, e))
                continue
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                signs.append(s)
                segs.append([])
        return TowerWord(tuple(Word(self.alphabet, runs) for runs in segs), tuple(signs))

    def join(self, tw: TowerWord) -> Word:
        parts = [tw.segments[0]]
        for e, g in zip(tw.signs, tw.segments[1:]):
            parts.append(Word(self.alphabet, ((self.t, e),)))
            parts.append(g)
        return concat(*parts)

    # -- internal representation ----------------------------------------

    def _lift(self, w: Word):
        """A Word over this level's alphabet as an internal tower word."""
        tw = self.split(w)
        return _TW([self._seg_of_word(g) for g in tw.segments], tw.signs)

    def _seg_of_word(self, g: Word):
        if self.base is None:
            return self.group.from_word(translate(g, self.bottom))
        return self.base._lift(translate(g, self.base.alphabet))

    def _seg_of_lazy(self, x):
        if self.base is None:
            return x
        return _TW([self.base._seg_of_lazy(x)], ())

    def _seg_mul(self, *xs):
        if self.base is None:
            return self.group.mul(*xs)
        return self.base._tw_mul(*xs)

    def _tw_mul(self, *xs: _TW) -> _TW:
        segs = list(xs[0].segs)
        signs = list(xs[0].signs)
        for x in xs[1:]:
            segs[-1] = self._seg_mul(segs[-1], x.segs[0])
            segs += x.segs[1:]
            signs += x.signs
        return _TW(segs, signs)

    def _seg_word(self, seg, normalize: bool) -> Word:
        if self.base is None:
            return translate(self.group.expand(seg), self.alphabet)
        if normalize:
            seg = self.base._reduce(seg)
        return translate(self.base._tw_word(seg, normalize), self.alphabet)

    def _tw_word(self, tw: _TW, normalize: bool = True) -> Word:
        return self.join(TowerWord(tuple(self._seg_word(g, normalize) for g in tw.segs),
                                   tw.signs))

    def _to_bottom(self, seg):
        if self.base is None:
            return seg
        red = self.base._reduce(seg)
        if red.signs:
            return None
        return self.base._to_bottom(red.segs[0])

    def _pinch(self, left_sign: int, seg):
        d = self._to_bottom(seg)
        if d is None:
            return None
        G = self.group
        if left_sign < 0:
            if self._dom_key is not None:
                v, d = G.walk(self.domain, self._dom_key, d)
                if v != 0:
                    return None
            return self._seg_of_lazy(G.apply(self.stable, d))
        v, x = G.walk(self.image, self.stable, d)
        if v != 0:
            return None
        if self._dom_key is not None:
            x = G.apply(self._dom_key, x)
        return self._seg_of_lazy(x)

    def _reduce(self, w: _TW) -> _TW:
        segs = [w.segs[0]]
        signs: list[int] = []
        for e, g in zip(w.signs, w.segs[1:]):
            if signs and signs[-1] == -e:
                rep = self._pinch(signs[-1], segs[-1])
                if rep is not None:
                    signs.pop()
                    segs.pop()
                    segs[-1] = self._seg_mul(segs[-1], rep, g)
                    continue
            signs.append(e)
            segs.append(g)
        return _TW(segs, signs)

    def _reduce_random(self, w: _TW, rng: random.Random) -> _TW:
        segs = list(w.segs)
        signs = list(w.signs)
        while True:
            options = []
            for i in range(len(signs) - 1):
                if signs[i] == -signs[i + 1]:
                    rep = self._pinch(signs[i], segs[i + 1])
                    if rep is not None:
                        options.append((i, rep))
            if not options:
                return _TW(segs, signs)
            i, rep = rng.choice(options)
            segs[i:i + 3] = [self._seg_mul(segs[i], rep, segs[i + 2])]
            del signs[i:i + 2]

    def _is_trivial(self, w: _TW) -> bool:
        red = self._reduce(w)
        if red.signs:
            return False
        if self.base is None:
            return self.group.is_identity(red.segs[0])
        return self.base._is_trivial(red.segs[0])

    # -- public operations ----------------------------------------------

    def reduce_segment(self, seg: Word) -> Word:
        """A reduced representative of ``seg`` in the group below this level."""
        return self._seg_word(self._seg_of_word(translate(seg, self.alphabet)), True)

    def to_bottom(self, seg: Word) -> Optional[Word]:
        """``seg`` as a word on the bottom free group, or None if it is not in it."""
        d = self._to_bottom(self._seg_of_word(translate(seg, self.alphabet)))
        return None if d is None else self.group.expand(d)

    def phi(self, b: Word) -> Word:
        x = self.domain.express_in_basis(translate(b, self.bottom))
        return translate(substitute(x, self.image_basis, target=self.bottom), self.alphabet)

    def phi_inverse(self, c: Word) -> Word:
        x = self.image.express_in_basis(translate(c, self.bottom))
        return translate(substitute(x, self.domain_basis, target=self.bottom), self.alphabet)

    def pinch(self, left_sign: int, mid: Word) -> Optional[Word]:
        """Replacement for ``t^s mid t^-s`` if it is a pinch, else None."""
        rep = self._pinch(left_sign, self._seg_of_word(translate(mid, self.alphabet)))
        return None if rep is None else self._seg_word(rep, True)

    def britton_reduce(self, w: TowerWord | Word, rng: random.Random | None = None,
                       normalize: bool = True) -> TowerWord:
        """Remove pinches until none is left.

        Deterministic order is innermost-leftmost; passing ``rng`` picks a
        random available pinch at every step instead.  Segments come back
        reduced in the group below unless ``normalize`` is off.  The result
        is materialized, so it may raise LengthCapExceeded where
        :meth:`stable_count` and :meth:`is_trivial` would not.
        """
        red = self._reduce_any(w, rng)
        return TowerWord(tuple(self._seg_word(g, normalize) for g in red.segs), red.signs)

    def _reduce_any(self, w: TowerWord | Word, rng: random.Random | None) -> _TW:
        if isinstance(w, TowerWord):
            w = self.join(w)
        tw = self._lift(w)
        return self._reduce(tw) if rng is None else self._reduce_random(tw, rng)

    def stable_count(self, w: TowerWord | Word, rng: random.Random | None = None) -> int:
        """Number of stable letters left after Britton reduction."""
        return len(self._reduce_any(w, rng).signs)

    def is_trivial(self, w: Word) -> bool:
        return self._is_trivial(self._lift(w))


@lru_cache(maxsize=None)
def level_c1(params: RipsParams, alphabet: Alphabet = ALPHABET_GC1D) -> HNNLevel:
    D = ALPHABET_D
    return HNNLevel("c1", alphabet, D.gens(),
                    [word_Dij(params.r, 1, j, params.l, D) for j in (1, 2)])


@lru_cache(maxsize=None)
def level_c2(params: RipsParams) -> HNNLevel:
    D = ALPHABET_D
    inner = level_c1(params, ALPHABET_GCD)
    return HNNLevel("c2", ALPHABET_GCD, D.gens(),
                    [word_Dij(params.r, 2, j, params.l, D) for j in (1, 2)], base=inner)


def britton_reduce(w: TowerWord | Word, level: HNNLevel, rng: random.Random | None = None) -> TowerWord:
    return level.britton_reduce(w, rng)


def is_trivial_Gc1d(w: Word, params: RipsParams) -> bool:
    return level_c1(params).is_trivial(w)


def is_trivial_Gcd(w: Word, params: RipsParams) -> bool:
    return level_c2(params).is_trivial(w)


def random_word(alphabet: Alphabet, length: int, rng: random.Random, reduced: bool = True) -> Word:
    n = 2 * len(alphabet)
    codes: list[int] = []
    while len(codes) < length:
        x = rng.randrange(n)
        if reduced and codes and codes[-1] == x ^ 1:
            continue
        codes.append(x)
    return Word.from_codes(alphabet, codes)


@dataclass
class IntersectionReport:
    trials: int
    seed: int
    maxlen: int
    failures: list[tuple[str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def sample_intersection_triviality(trials: int, maxlen: int, seed: int,
                                   params: RipsParams) -> IntersectionReport:
    """Random nonempty c-words u and d-words v never satisfy u = v in G_cd."""
    rng = random.Random(seed)
    rep = IntersectionReport(trials, seed, maxlen)
    for _ in range(trials):
        u = random_word(ALPHABET_C, rng.randint(1, maxlen), rng)
        v = random_word(ALPHABET_D, rng.randint(1, maxlen), rng)
        w = concat(translate(u, ALPHABET_GCD), invert(translate(v, ALPHABET_GCD)))
        if is_trivial_Gcd(w, params):
            rep.failures.append((format_word(u), format_word(v)))
    return rep


@dataclass
class CrossOracleReport:
    r: int
    trials: int
    maxlen: int
    seed: int
    agree: int = 0
    trivial: int = 0
    disagreements: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.disagreements and self.agree == self.trials

    def to_dict(self) -> dict:
        return {"r": self.r, "trials": self.trials, "maxlen": self.maxlen, "seed": self.seed,
                "agree": self.agree, "trivial": self.trivial,
                "disagreements": self.disagreements, "passed": self.passed}


def cross_oracle(trials: int, maxlen: int, seed: int, params: RipsParams) -> CrossOracleReport:
    """Compare Dehn's algorithm on P(G_cd) with the Britton tower on random letter strings."""
    from .smallcancel import is_trivial
    p = presentation_Gcd(params)
    rng = random.Random(seed)
    rep = CrossOracleReport(params.r, trials, maxlen, seed)
    for _ in range(trials):
        w = random_word(ALPHABET_GCD, rng.randint(0, maxlen), rng, reduced=False)
        a = is_trivial(w, p)
        b = is_trivial_Gcd(w, params)
        if a == b:
            rep.agree += 1
            rep.trivial += a
        else:
            rep.disagreements.append(format_word(w))
    return rep
