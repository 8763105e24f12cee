"""Compressed arithmetic for the words u_n and w_n.

Conjugating d1 by the positive word u_n = a^n b^n (rewritten over the
letters ab, c1, c2) gives a positive word w_n on d1, d2 whose length grows
doubly exponentially.  Neither word is ever written out at realistic sizes:
u_n is a straight-line program and |w_n| comes from multiplying 2x2
letter-count matrices along it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .rips import (ALPHABET_C, ALPHABET_D, RipsParams, word_Ci, word_C, word_Dij,
                   word_Dj)
from .words import (Alphabet, LengthCapExceeded, Word, get_length_cap, is_positive,
                    letter_counts, make_alphabet, substitute)

ALPHABET_U = make_alphabet("ab c1 c2")
CONJUGATORS = ("ab", "c1", "c2")
DEFAULT_EXACT_BITS = 2 ** 20


# -- positive endomorphisms ---------------------------------------------------

@dataclass(frozen=True)
class PositiveEndo:
    """A positive endomorphism of a free monoid on two generators."""

    images: tuple[Word, ...]
    name: str = ""

    def __post_init__(self):
        if not self.images:
            raise ValueError("need at least one image")
        A = self.images[0].alphabet
        if len(self.images) != len(A):
            raise ValueError("need one image per generator")
        for w in self.images:
            if w.alphabet != A:
                raise ValueError("images over different alphabets")
            if not w or not is_positive(w):
                raise ValueError("images must be nonempty positive words")

    @property
    def alphabet(self) -> Alphabet:
        return self.images[0].alphabet

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """``M[i][j]`` = number of generator i in the image of generator j."""
        cols = [letter_counts(w) for w in self.images]
        return tuple(tuple(col[i] for col in cols) for i in range(len(cols)))

    def __call__(self, w: Word) -> Word:
        return substitute(w, self.images, target=self.alphabet)

    def compose(self, other: "PositiveEndo") -> "PositiveEndo":
        """``self o other``: apply ``other`` first."""
        return PositiveEndo(tuple(self(w) for w in other.images),
                            f"{self.name}.{other.name}" if self.name and other.name else "")


def endo_of_letter(x: str, params: RipsParams) -> PositiveEndo:
    """Conjugation action on F(d1, d2): ``x^-1 d_j x`` for x in ab, c1, c2."""
    D = ALPHABET_D
    if x == "ab":
        imgs = tuple(word_Dj(params.r, j, D) for j in (1, 2))
    elif x in ("c1", "c2"):
        i = int(x[1])
        imgs = tuple(word_Dij(params.r, i, j, params.l, D) for j in (1, 2))
    else:
        raise ValueError(f"unknown conjugator {x!r}; expected one of {CONJUGATORS}")
    return PositiveEndo(imgs, x)


def phi_endo(params: RipsParams) -> PositiveEndo:
    """Conjugation by b on F(c1, c2): ``c_i -> C_i``."""
    return PositiveEndo(tuple(word_Ci(params.r, i, ALPHABET_C) for i in (1, 2)), "phi")


# -- count matrices -----------------------------------------------------------

@dataclass(frozen=True)
class CountMatrix:
    """A nonnegative 2x2 matrix kept exactly and as (mantissa, log10 scale).

    Entries are row-major.  ``exact`` is dropped (None) once an entry
    outgrows the monoid's bit budget; the log track is always present.
    """

    exact: Optional[tuple[int, int, int, int]]
    mant: tuple[float, float, float, float]
    scale: float

    def log10_entry(self, i: int, j: int) -> float:
        m = self.mant[2 * i + j]
        return self.scale + math.log10(m) if m > 0 else -math.inf

    def log10_column_sum(self, j: int = 0) -> float:
        return self.scale + math.log10(self.mant[j] + self.mant[2 + j])

    def exact_column_sum(self, j: int = 0) -> Optional[int]:
        if self.exact is None:
            return None
        return self.exact[j] + self.exact[2 + j]


def _normalized(m: Sequence[float], scale: float) -> tuple[tuple[float, ...], float]:
    top = max(m)
    if top <= 0:
        return tuple(m), scale
    return tuple(x / top for x in m), scale + math.log10(top)


class CountMonoid:
    """Products of :class:`CountMatrix` with a per-entry exact bit budget."""

    def __init__(self, exact_bits: int = DEFAULT_EXACT_BITS):
        if exact_bits < 1:
            raise ValueError("exact_bits must be positive")
        self.exact_bits = exact_bits

    def make(self, rows: Sequence[Sequence[int]]) -> CountMatrix:
        flat = tuple(int(x) for row in rows for x in row)
        if len(flat) != 4 or min(flat) < 0:
            raise ValueError("expected a nonnegative 2x2 matrix")
        mant, scale = _normalized([float(x) for x in flat], 0.0)
        return CountMatrix(self._cap(flat), mant, scale)

    def identity(self) -> CountMatrix:
        return self.make(((1, 0), (0, 1)))

    def _cap(self, flat):
        if flat is None or max(x.bit_length() for x in flat) > self.exact_bits:
            return None
        return flat

    def _fits(self, X, Y) -> bool:
        # every product entry is at least each of its nonnegative terms, so
        # a single oversized term settles it without the multiplication
        for i in (0, 1):
            for j in (0, 1):
                for k in (0, 1):
                    x, y = X[2 * i + k], Y[2 * k + j]
                    if x and y and x.bit_length() + y.bit_length() - 1 > self.exact_bits:
                        return False
        return True

    def mul(self, A: CountMatrix, B: CountMatrix) -> CountMatrix:
        """The product ``A B``."""
        exact = None
        if A.exact is not None and B.exact is not None:
            a, b, c, d = A.exact
            e, f, g, h = B.exact
            if self._fits(A.exact, B.exact):
                exact = self._cap((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))
        p, q, r, s = A.mant
        t, u, v, w = B.mant
        mant, scale = _normalized((p * t + q * v, p * u + q * w, r * t + s * v, r * u + s * w),
                                  A.scale + B.scale)
        return CountMatrix(exact, mant, scale)

    def power(self, A: CountMatrix, k: int) -> CountMatrix:
        if k < 0:
            raise ValueError("negative power of a count matrix")
        result = self.identity()
        base = A
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result


# -- straight-line programs ---------------------------------------------------

@dataclass(frozen=True)
class Node:
    kind: str           # "leaf", "cat" or "pow"
    a: int | str        # letter name for leaves, child id otherwise
    b: int = 0          # right child for "cat", exponent for "pow"


@dataclass
class SLP:
    """A growing straight-line program over ``alphabet``.

    Node ids are list positions and children always precede parents, so
    the program is acyclic by construction.  ``labels`` names some nodes.
    """

    alphabet: Alphabet
    nodes: list[Node] = field(default_factory=list)
    labels: dict[str, int] = field(default_factory=dict)
    _leaves: dict[str, int] = field(default_factory=dict, repr=False)

    def leaf(self, name: str) -> int:
        if name not in self.alphabet:
            raise ValueError(f"{name!r} is not a letter of {self.alphabet}")
        if name not in self._leaves:
            self._leaves[name] = self._add(Node("leaf", name))
        return self._leaves[name]

    def cat(self, i: int, j: int) -> int:
        self._check(i)
        self._check(j)
        return self._add(Node("cat", i, j))

    def cat_all(self, ids: Sequence[int]) -> int:
        """Balanced concatenation of a nonempty sequence of nodes."""
        if not ids:
            raise ValueError("cannot concatenate an empty sequence")
        ids = list(ids)
        while len(ids) > 1:
            nxt = [self.cat(ids[k], ids[k + 1]) for k in range(0, len(ids) - 1, 2)]
            if len(ids) % 2:
                nxt.append(ids[-1])
            ids = nxt
        return ids[0]

    def pow(self, i: int, k: int) -> int:
        self._check(i)
        if k < 1:
            raise ValueError("powers in an SLP must be positive")
        return i if k == 1 else self._add(Node("pow", i, k))

    def label(self, name: str, i: int) -> int:
        self._check(i)
        self.labels[name] = i
        return i

    def _add(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def _check(self, i: int) -> None:
        if not 0 <= i < len(self.nodes):
            raise IndexError(f"no node {i}")

    def node(self, ref: int | str) -> int:
        return self.labels[ref] if isinstance(ref, str) else ref

    def evaluate(self, ref: int | str, leaf: Callable, cat: Callable, power: Callable,
                 memo: Optional[dict] = None):
        """Fold the program into a monoid given by the three callbacks."""
        root = self.node(ref)
        memo = {} if memo is None else memo
        stack = [root]
        while stack:
            i = stack[-1]
            if i in memo:
                stack.pop()
                continue
            nd = self.nodes[i]
            if nd.kind == "leaf":
                memo[i] = leaf(nd.a)
                stack.pop()
                continue
            kids = [nd.a, nd.b] if nd.kind == "cat" else [nd.a]
            todo = [k for k in kids if k not in memo]
            if todo:
                stack.extend(todo)
                continue
            memo[i] = cat(memo[nd.a], memo[nd.b]) if nd.kind == "cat" else power(memo[nd.a], nd.b)
            stack.pop()
        return memo[root]

    def length(self, ref: int | str, memo: Optional[dict] = None) -> int:
        return self.evaluate(ref, lambda _: 1, lambda x, y: x + y, lambda x, k: x * k, memo)

    def letter_counts(self, ref: int | str) -> list[int]:
        n = len(self.alphabet)

        def leaf(name):
            v = [0] * n
            v[self.alphabet.index(name)] = 1
            return v

        return self.evaluate(ref, leaf, lambda x, y: [p + q for p, q in zip(x, y)],
                             lambda x, k: [p * k for p in x])

    def materialize(self, ref: int | str) -> Word:
        """The expanded word; raises LengthCapExceeded before doing any work if too long."""
        n = self.length(ref)
        if n > get_length_cap():
            raise LengthCapExceeded(f"SLP expands to {n} letters, above the cap {get_length_cap()}")
        A = self.alphabet
        return self.evaluate(ref, lambda name: Word(A, ((A.index(name), 1),)),
                             lambda x, y: Word(A, x.runs + y.runs),
                             lambda x, k: Word(A, x.runs * k))


# -- u_n and w_n --------------------------------------------------------------

class GrowthModel:
    """Shared SLP for u_1, u_2, ... and matrix evaluation along it."""

    def __init__(self, params: RipsParams, exact_bits: int = DEFAULT_EXACT_BITS):
        self.params = params
        self.slp = SLP(ALPHABET_U)
        self.monoid = CountMonoid(exact_bits)
        self._phi_c: list[tuple[int, int]] = [(self.slp.leaf("c1"), self.slp.leaf("c2"))]
        self._phi_C: dict[int, int] = {}
        self._u: list[int] = []
        self._matrix_memo: dict[int, CountMatrix] = {}
        self._leaf_matrix = {x: self.monoid.make(endo_of_letter(x, params).matrix)
                             for x in CONJUGATORS}

    def _from_runs(self, w: Word, images: Sequence[int]) -> int:
        # w is a positive word on c1, c2; images[i] is the node standing for c_{i+1}
        return self.slp.cat_all([self.slp.pow(images[g], e) for g, e in w.runs])

    def phi_power_c(self, k: int) -> tuple[int, int]:
        """Nodes for phi^k(c1), phi^k(c2)."""
        C = ALPHABET_C
        while len(self._phi_c) <= k:
            prev = self._phi_c[-1]
            j = len(self._phi_c)
            nodes = tuple(self.slp.label(f"phi^{j}(c{i})",
                                         self._from_runs(word_Ci(self.params.r, i, C), prev))
                          for i in (1, 2))
            self._phi_c.append(nodes)
        return self._phi_c[k]

    def phi_power_C(self, k: int) -> int:
        """Node for phi^k(C)."""
        if k not in self._phi_C:
            node = self._from_runs(word_C(self.params.r, ALPHABET_C), self.phi_power_c(k))
            self._phi_C[k] = self.slp.label(f"phi^{k}(C)", node)
        return self._phi_C[k]

    def u(self, n: int) -> int:
        """Node for u_n."""
        if n < 1:
            raise ValueError("n must be >= 1")
        ab = self.slp.leaf("ab")
        while len(self._u) < n:
            m = len(self._u) + 1
            if m == 1:
                node = ab
            else:
                tail = self.slp.cat_all([ab] + [self.phi_power_C(k) for k in range(1, m)])
                node = self.slp.cat(self._u[-1], tail)
            self._u.append(self.slp.label(f"u_{m}", node))
        return self._u[n - 1]

    def matrix(self, ref: int | str) -> CountMatrix:
        """Count matrix of conjugation by the node's word: ``M_xm ... M_x1``."""
        M = self.monoid
        return self.slp.evaluate(ref, self._leaf_matrix.__getitem__,
                                 lambda x, y: M.mul(y, x), M.power, self._matrix_memo)

    def length_w(self, n: int) -> tuple[Optional[int], float]:
        Mu = self.matrix(self.u(n))
        return Mu.exact_column_sum(0), Mu.log10_column_sum(0)


@lru_cache(maxsize=16)
def shared_model(params: RipsParams, exact_bits: int = DEFAULT_EXACT_BITS) -> GrowthModel:
    """One model per parameter set, so repeated queries reuse its memoized matrices."""
    return GrowthModel(params, exact_bits)


def build_u(n: int, params: RipsParams) -> tuple[SLP, int]:
    """An SLP containing u_n and the id of its root."""
    model = GrowthModel(params)
    return model.slp, model.u(n)


def length_w(n: int, params: RipsParams,
             exact_bits: int = DEFAULT_EXACT_BITS) -> tuple[Optional[int], float]:
    """``(exact or None, log10)`` of |w_n| where w_n = u_n^-1 d1 u_n."""
    return shared_model(params, exact_bits).length_w(n)


def materialize_w(u: Word, params: RipsParams) -> Word:
    """w = u^-1 d1 u as a positive word on d1, d2, applying the letter actions in order."""
    if u.alphabet != ALPHABET_U:
        raise ValueError("u must be a word over ab, c1, c2")
    endos = {x: endo_of_letter(x, params) for x in CONJUGATORS}
    w = ALPHABET_D.gen("d1")
    for code in u.codes():
        if code & 1:
            raise ValueError("u must be positive")
        w = endos[ALPHABET_U.names[code >> 1]](w)
    return w


@dataclass(frozen=True)
class DistortionRow:
    n: int
    gamma_len: int
    w_len_exact: Optional[int]
    w_len_log10: float


def distortion_table(n_max: int, params: RipsParams,
                     exact_bits: int = DEFAULT_EXACT_BITS) -> list[DistortionRow]:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    model = shared_model(params, exact_bits)
    rows = []
    for n in range(1, n_max + 1):
        exact, lg = model.length_w(n)
        rows.append(DistortionRow(n, 4 * n + 1, exact, lg))
    return rows
