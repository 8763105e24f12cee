"""Small-cancellation machinery: pieces, C'(lambda), Dehn's algorithm, geodesics.

Subword queries against the symmetrized relator set go through a generalized
suffix automaton built over every cyclic relator (and inverse) written out
twice.  A word is a subword of some element of S exactly when it is a
substring of one of those doubled strings no longer than the relator, so the
automaton answers "longest suffix of the current word that is a relator
piece" in amortized constant time per letter, in space linear in the total
relator length.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Optional

from .rips import Presentation, RipsParams, presentation
from .words import Word, exponent_sums, format_word, free_reduce, invert, is_freely_reduced, reduce_codes

ONE_SIXTH = Fraction(1, 6)


class NotC16(RuntimeError):
    """The presentation is not certified C'(1/6); Dehn's algorithm is not a decision procedure."""


def _as_str(codes: Iterable[int]) -> str:
    return "".join(map(chr, codes))


def _as_codes(s: str) -> list[int]:
    return [ord(ch) for ch in s]


class _SuffixAutomaton:
    """Generalized suffix automaton with per-state occurrence masks."""

    def __init__(self, strings: list[list[int]]):
        self.nxt: list[dict[int, int]] = [{}]
        self.link: list[int] = [-1]
        self.length: list[int] = [0]
        prefix_states: list[list[int]] = []
        for s in strings:
            last = 0
            visited = []
            for c in s:
                last = self._extend(last, c)
                visited.append(last)
            prefix_states.append(visited)
        n = len(self.length)
        mask = [0] * n
        for i, visited in enumerate(prefix_states):
            bit = 1 << i
            for v in visited:
                mask[v] |= bit
        order = sorted(range(n), key=self.length.__getitem__, reverse=True)
        for v in order:
            if self.link[v] >= 0:
                mask[self.link[v]] |= mask[v]
        self.mask = mask
        self.order_up = order[::-1]

    def _new(self, length, nxt=None, link=-1):
        self.nxt.append({} if nxt is None else nxt)
        self.link.append(link)
        self.length.append(length)
        return len(self.length) - 1

    def _extend(self, last: int, c: int) -> int:
        nxt, link, length = self.nxt, self.link, self.length
        if c in nxt[last]:
            q = nxt[last][c]
            if length[last] + 1 == length[q]:
                return q
            clone = self._new(length[last] + 1, dict(nxt[q]), link[q])
            p = last
            while p != -1 and nxt[p].get(c) == q:
                nxt[p][c] = clone
                p = link[p]
            link[q] = clone
            return clone
        cur = self._new(length[last] + 1)
        p = last
        while p != -1 and c not in nxt[p]:
            nxt[p][c] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            q = nxt[p][c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = self._new(length[p] + 1, dict(nxt[q]), link[q])
                while p != -1 and nxt[p].get(c) == q:
                    nxt[p][c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        return cur

    def step(self, v: int, k: int, c: int) -> tuple[int, int]:
        nxt, link, length = self.nxt, self.link, self.length
        while v and c not in nxt[v]:
            v = link[v]
            k = length[v]
        t = nxt[v].get(c)
        if t is None:
            return 0, 0
        return t, k + 1


@dataclass(frozen=True)
class RelatorMatch:
    """A subword ``alpha`` of a word that is a prefix of the S-element ``relator``."""

    position: int
    alpha: Word
    relator: Word

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.alpha), len(self.relator))


class SymmetrizedRelatorSet:
    """All cyclic permutations of the relators and their inverses.

    Stored compactly as the distinct cyclic words (relators and inverses up
    to rotation); the explicit element set is built on demand.
    """

    def __init__(self, p: Presentation):
        if not p.relators:
            self.presentation = p
            self.cyclic: tuple[str, ...] = ()
            return
        seen: dict[str, str] = {}
        for rel in p.relators:
            if not rel:
                raise ValueError("empty relator")
            for w in (rel, invert(rel)):
                s = _as_str(w.code_list())
                canon = min(_rotations(s))
                seen.setdefault(canon, s)
        self.presentation = p
        self.cyclic = tuple(seen.values())

    @property
    def alphabet(self):
        return self.presentation.alphabet

    @cached_property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.cyclic)

    @cached_property
    def doubled(self) -> tuple[str, ...]:
        return tuple(s + s for s in self.cyclic)

    @cached_property
    def element_strings(self) -> frozenset[str]:
        return frozenset(x for s in self.cyclic for x in _rotations(s))

    @cached_property
    def elements(self) -> frozenset[Word]:
        A = self.alphabet
        return frozenset(Word.from_codes(A, _as_codes(s)) for s in self.element_strings)

    def __len__(self) -> int:
        return len(self.element_strings)

    def __contains__(self, w: Word) -> bool:
        return _as_str(w.code_list()) in self.element_strings

    @cached_property
    def min_length(self) -> int:
        return min(self.lengths) if self.lengths else 0

    @cached_property
    def automaton(self) -> _SuffixAutomaton:
        strings = [_as_codes(d[:-1]) for d in self.doubled]
        sam = _SuffixAutomaton(strings)
        self._prepare_dehn(sam)
        return sam

    def _prepare_dehn(self, sam: _SuffixAutomaton) -> None:
        # best (k, i) over the suffix-link ancestors of each state, for the
        # half-length threshold; k counts letters, i indexes self.cyclic
        lens = self.lengths
        n = len(sam.length)
        best_full = [None] * n
        best_anc = [None] * n
        for v in sam.order_up:
            parent = sam.link[v]
            anc = best_full[parent] if parent >= 0 else None
            best_anc[v] = anc
            own = _own_candidate(sam, v, sam.length[v], lens, Fraction(1, 2))
            best_full[v] = _better(own, anc)
        sam.best_anc = best_anc

    def locate(self, alpha: list[int], i: int) -> list[int]:
        """The S-element of cyclic word ``i`` that starts with ``alpha``."""
        m = self.lengths[i]
        p = self.doubled[i].find(_as_str(alpha))
        if p < 0 or len(alpha) > m:
            raise ValueError("alpha is not a subword of the cyclic relator")
        return _as_codes(self.doubled[i][p:p + m])


def _rotations(s: str) -> set[str]:
    d = s + s
    return {d[i:i + len(s)] for i in range(len(s))}


def _better(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return x if (x[0], -x[1]) >= (y[0], -y[1]) else y


def _own_candidate(sam, v, k_eff, lens, threshold: Fraction):
    # longest k in (len(link v), k_eff] with k <= |rho_i| and k > threshold*|rho_i|
    lo = sam.length[sam.link[v]] if sam.link[v] >= 0 else 0
    mask = sam.mask[v]
    best = None
    i = 0
    while mask:
        if mask & 1:
            m = lens[i]
            k = min(k_eff, m)
            if k > lo and k * threshold.denominator > threshold.numerator * m:
                if best is None or k > best[0]:
                    best = (k, i)
        mask >>= 1
        i += 1
    return best


@lru_cache(maxsize=64)
def symmetrize(p: Presentation) -> SymmetrizedRelatorSet:
    return SymmetrizedRelatorSet(p)


@dataclass(frozen=True)
class PieceReport:
    """Outcome of a C'(lambda) check.

    ``max_ratio`` is the largest |piece| / min(|s1|, |s2|) over distinct
    elements; ``witness`` is a pair realising it together with their common
    prefix.
    """

    lam: Fraction
    holds: bool
    max_ratio: Fraction
    witness: Optional[tuple[Word, Word, Word]]
    n_elements: int
    max_piece_length: int
    n_violating_elements: int

    def to_dict(self) -> dict:
        return {
            "lambda": str(self.lam),
            "holds": self.holds,
            "max_piece_ratio": str(self.max_ratio),
            "max_piece_ratio_float": float(self.max_ratio),
            "max_piece_length": self.max_piece_length,
            "n_elements": self.n_elements,
            "n_violating_elements": self.n_violating_elements,
            "witness": None if self.witness is None else {
                "element1": format_word(self.witness[0]),
                "element2": format_word(self.witness[1]),
                "piece": format_word(self.witness[2]),
                "piece_length": len(self.witness[2]),
            },
        }


def _lcp(a: str, b: str) -> int:
    n = min(len(a), len(b))
    # galloping comparison keeps the work in C for long shared prefixes
    lo, step = 0, 8
    while lo < n:
        hi = min(n, lo + step)
        if a[lo:hi] == b[lo:hi]:
            lo = hi
            step *= 2
        else:
            for k in range(lo, hi):
                if a[k] != b[k]:
                    return k
    return n


def check_cprime(p: Presentation | SymmetrizedRelatorSet, lam) -> tuple[bool, PieceReport]:
    """Decide C'(lam): every piece is strictly shorter than lam times each element."""
    lam = Fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    S = p if isinstance(p, SymmetrizedRelatorSet) else symmetrize(p)
    return _check_cprime_cached(S, lam)


@lru_cache(maxsize=64)
def _check_cprime_cached(S: SymmetrizedRelatorSet, lam: Fraction) -> tuple[bool, PieceReport]:
    elems = sorted(S.element_strings)
    n = len(elems)
    # the longest common prefix of s with any other element is attained at a
    # sorted neighbour
    adj = [_lcp(elems[t], elems[t + 1]) for t in range(n - 1)]
    best = None
    violating = 0
    max_piece = 0
    for t, s in enumerate(elems):
        left = adj[t - 1] if t > 0 else -1
        right = adj[t] if t < n - 1 else -1
        if left < 0 and right < 0:
            continue
        k, other = (left, t - 1) if left >= right else (right, t + 1)
        max_piece = max(max_piece, k)
        if k * lam.denominator >= lam.numerator * len(s):
            violating += 1
        ratio = Fraction(k, len(s))
        if best is None or ratio > best[0]:
            best = (ratio, t, other, k)
    A = S.alphabet
    if best is None:
        report = PieceReport(lam, True, Fraction(0), None, n, 0, 0)
        return True, report
    ratio, t, other, k = best
    witness = (Word.from_codes(A, _as_codes(elems[t])),
               Word.from_codes(A, _as_codes(elems[other])),
               Word.from_codes(A, _as_codes(elems[t][:k])))
    holds = violating == 0
    return holds, PieceReport(lam, holds, ratio, witness, n, max_piece, violating)


def find_min_r(lam, r_lo: int, r_hi: int, group: str | Callable[[int], Presentation] = "G",
               l: int = 2) -> Optional[int]:
    """Least r in [r_lo, r_hi] whose presentation is C'(lam); every r is tried."""
    if not 1 <= r_lo <= r_hi:
        raise ValueError("need 1 <= r_lo <= r_hi")
    for r in range(r_lo, r_hi + 1):
        p = group(r) if callable(group) else presentation(group, RipsParams(r, l))
        ok, _ = check_cprime(p, lam)
        if ok:
            return r
    return None


@dataclass(frozen=True)
class DehnStep:
    position: int
    alpha: Word
    relator: Word
    replacement: Word


@dataclass
class DehnTrace:
    input: Word
    steps: list[DehnStep] = field(default_factory=list)
    final: Optional[Word] = None

    def replay(self) -> Word:
        """Re-apply every step to the input, checking each one as it goes."""
        A = self.input.alphabet
        w = reduce_codes(self.input.code_list())
        for st in self.steps:
            alpha = st.alpha.code_list()
            k = len(alpha)
            if w[st.position:st.position + k] != alpha:
                raise AssertionError(f"step at {st.position} does not match the current word")
            rel = st.relator.code_list()
            if rel[:k] != alpha:
                raise AssertionError("alpha is not a prefix of the recorded relator")
            beta_inv = [x ^ 1 for x in reversed(rel[k:])]
            if st.replacement.code_list() != beta_inv:
                raise AssertionError("replacement is not the inverse of the relator tail")
            w = reduce_codes(w[:st.position] + beta_inv + w[st.position + k:])
        return Word.from_codes(A, w)


def dehn_reduce(w: Word, S: SymmetrizedRelatorSet | Presentation,
                record: bool = True) -> tuple[Word, DehnTrace]:
    """Dehn's algorithm.

    The word is consumed left to right onto a stack; as soon as a suffix of
    the stack is more than half of some element of S the longest such
    suffix is replaced, so the rewrite chosen is the one whose match ends
    leftmost, longest first.  The remaining word is kept freely reduced
    throughout.
    """
    if isinstance(S, Presentation):
        S = symmetrize(S)
    if w.alphabet != S.alphabet:
        raise ValueError("word and relator set use different alphabets")
    A = w.alphabet
    trace = DehnTrace(w)
    if not S.cyclic:
        final = free_reduce(w)
        trace.final = final
        return final, trace
    sam = S.automaton
    best_anc = sam.best_anc
    lens = S.lengths
    half = Fraction(1, 2)
    min_len = S.min_length
    step = sam.step

    queue = reduce_codes(w.code_list())[::-1]
    sc: list[int] = []
    ss: list[int] = []
    sl: list[int] = []
    v = k = 0
    while queue:
        x = queue.pop()
        v, k = step(v, k, x)
        sc.append(x)
        ss.append(v)
        sl.append(k)
        cand = best_anc[v]
        if 2 * k > min_len:
            cand = _better(_own_candidate(sam, v, k, lens, half), cand)
        if cand is None:
            continue
        ka, i = cand
        alpha = sc[-ka:]
        rot = S.locate(alpha, i)
        repl = [y ^ 1 for y in reversed(rot[ka:])]
        if record:
            pos = len(sc) - ka
            trace.steps.append(DehnStep(pos, Word.from_codes(A, alpha), Word.from_codes(A, rot),
                                        Word.from_codes(A, repl)))
        del sc[-ka:], ss[-ka:], sl[-ka:]
        while repl and queue and repl[-1] ^ 1 == queue[-1]:
            repl.pop()
            queue.pop()
        h = 0
        while h < len(repl) and sc and repl[h] ^ 1 == sc[-1]:
            h += 1
            sc.pop(), ss.pop(), sl.pop()
        repl = repl[h:]
        if not repl:
            while sc and queue and sc[-1] ^ 1 == queue[-1]:
                sc.pop(), ss.pop(), sl.pop()
                queue.pop()
        queue.extend(reversed(repl))
        v, k = (ss[-1], sl[-1]) if sc else (0, 0)
    final = Word.from_codes(A, sc)
    trace.final = final
    return final, trace


def _gate(p: Presentation) -> None:
    ok, report = check_cprime(p, ONE_SIXTH)
    if not ok:
        raise NotC16(f"{p.name or 'presentation'} is not C'(1/6): max piece ratio "
                     f"{report.max_ratio} >= 1/6")


def is_trivial(w: Word, p: Presentation) -> bool:
    _gate(p)
    final, _ = dehn_reduce(free_reduce(w), symmetrize(p), record=False)
    return not final


@dataclass(frozen=True)
class MatchReport:
    """Summary of relator subwords occurring in a word."""

    ok: bool
    threshold: Fraction
    longest: Optional[RelatorMatch]
    tightest: Optional[RelatorMatch]


def relator_matches(w: Word, S: SymmetrizedRelatorSet) -> list[tuple[int, int, int]]:
    """Every maximal (end, k, i): the k letters ending at ``end`` lie in cyclic word i.

    For each end position and each cyclic relator the longest admissible k is
    listed (k never exceeds that relator's length).
    """
    if not S.cyclic:
        return []
    sam = S.automaton
    lens = S.lengths
    out = []
    v = k = 0
    for end, x in enumerate(w.code_list(), start=1):
        v, k = sam.step(v, k, x)
        seen: dict[int, int] = {}
        u, ku = v, k
        while u > 0:
            lo = sam.length[sam.link[u]]
            mask = sam.mask[u]
            i = 0
            while mask:
                if mask & 1:
                    kk = min(ku, lens[i])
                    if kk > lo and kk > seen.get(i, 0):
                        seen[i] = kk
                mask >>= 1
                i += 1
            u = sam.link[u]
            ku = sam.length[u]
        out.extend((end, kk, i) for i, kk in seen.items())
    return out


def _match_report(w: Word, S: SymmetrizedRelatorSet, threshold: Fraction) -> MatchReport:
    A = w.alphabet
    codes = w.code_list()
    longest = tightest = None
    lkey = tkey = None
    for end, k, i in relator_matches(w, S):
        m = S.lengths[i]
        lk = (k, Fraction(k, m))
        tk = (Fraction(k, m), k)
        if lkey is None or lk > lkey:
            lkey, longest = lk, (end, k, i)
        if tkey is None or tk > tkey:
            tkey, tightest = tk, (end, k, i)

    def build(t):
        if t is None:
            return None
        end, k, i = t
        alpha = codes[end - k:end]
        return RelatorMatch(end - k, Word.from_codes(A, alpha), Word.from_codes(A, S.locate(alpha, i)))

    ok = tkey is None or tkey[0] <= threshold
    return MatchReport(ok, threshold, build(longest), build(tightest))


def is_dehn_reduced(w: Word, S: SymmetrizedRelatorSet | Presentation) -> tuple[bool, MatchReport]:
    if isinstance(S, Presentation):
        S = symmetrize(S)
    rep = _match_report(w, S, Fraction(1, 2))
    return rep.ok, rep


def is_strongly_dehn_reduced(w: Word, S: SymmetrizedRelatorSet | Presentation) -> tuple[bool, MatchReport]:
    if isinstance(S, Presentation):
        S = symmetrize(S)
    rep = _match_report(w, S, ONE_SIXTH)
    return rep.ok, rep


def naive_match_report(w: Word, S: SymmetrizedRelatorSet, threshold) -> tuple[bool, int, Fraction]:
    """Brute-force scan of every subword; returns (ok, longest k, max ratio)."""
    threshold = Fraction(threshold)
    s = _as_str(w.code_list())
    longest, ratio = 0, Fraction(0)
    for i in range(len(s)):
        for j in range(i + 1, len(s) + 1):
            sub = s[i:j]
            hit = False
            for d, m in zip(S.doubled, S.lengths):
                if j - i <= m and sub in d:
                    hit = True
                    longest = max(longest, j - i)
                    ratio = max(ratio, Fraction(j - i, m))
            if not hit:
                break
    return ratio <= threshold, longest, ratio


def certify_geodesic(w: Word, p: Presentation) -> bool:
    """True certifies ``w`` is the unique geodesic for its element; False is inconclusive."""
    _gate(p)
    if not is_freely_reduced(w):
        return False
    ok, _ = is_strongly_dehn_reduced(w, symmetrize(p))
    return ok


class Abelian(enum.Enum):
    DISTINCT_CERTIFIED = "DistinctCertified"
    INCONCLUSIVE = "Inconclusive"


def _echelon(rows: list[list[int]]) -> list[tuple[int, list[int]]]:
    """Integer row echelon form (Hermite-style) as (pivot column, row) pairs."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    out = []
    for c in range(ncols):
        active = [r for r in rows if r[c]]
        rest = [r for r in rows if not r[c]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[c]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[c] // piv[c]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[c] else rest).append(r)
            active = nxt
        if active:
            piv = active[0]
            if piv[c] < 0:
                piv = [-a for a in piv]
            out.append((c, piv))
        rows = [r for r in rest if any(r)]
    return out


def in_integer_row_span(rows: list[list[int]], v: list[int]) -> bool:
    v = list(v)
    for c, piv in _echelon(rows):
        if v[c] % piv[c]:
            return False
        q = v[c] // piv[c]
        v = [a - q * b for a, b in zip(v, piv)]
    return not any(v)


def abelianized_distinct(diff: list[int], p: Presentation) -> Abelian:
    rows = [exponent_sums(r) for r in p.relators]
    if in_integer_row_span(rows, diff):
        return Abelian.INCONCLUSIVE
    return Abelian.DISTINCT_CERTIFIED


def abelianized_equal(u: Word, v: Word, p: Presentation) -> Abelian:
    if u.alphabet != p.alphabet or v.alphabet != p.alphabet:
        raise ValueError("words must be over the presentation's alphabet")
    diff = [a - b for a, b in zip(exponent_sums(u), exponent_sums(v))]
    return abelianized_distinct(diff, p)
