"""Free-group words stored as runs of signed generator powers.

A word is a tuple of runs ``(gen, exp)`` with ``exp != 0``; the sign of
``exp`` is the sign of every letter in the run.  Adjacent runs never share
both generator and sign.  Adjacent runs on the same generator with opposite
signs are allowed (that is an unreduced word) and disappear under
:func:`free_reduce`.

Flat letters are encoded as integers ``2*gen + (exp < 0)`` so that the
inverse of a letter code ``x`` is ``x ^ 1``.
"""

from __future__ import annotations

import contextlib
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_LENGTH_CAP = 2 ** 27
_length_cap = DEFAULT_LENGTH_CAP


class AlphabetMismatch(ValueError):
    pass


class LengthCapExceeded(OverflowError):
    """A word would exceed the configured length cap.

    Words this large are meant to be handled through compressed
    representations (see :mod:`ctmaps.growth`).
    """


def get_length_cap() -> int:
    return _length_cap


def set_length_cap(cap: int) -> int:
    """Set the global length cap; returns the previous value."""
    global _length_cap
    if cap < 1:
        raise ValueError("length cap must be positive")
    old, _length_cap = _length_cap, cap
    return old


@contextlib.contextmanager
def length_cap(cap: int):
    old = set_length_cap(cap)
    try:
        yield
    finally:
        set_length_cap(old)


def _check_cap(n: int) -> None:
    if n > _length_cap:
        raise LengthCapExceeded(f"word of length {n} exceeds cap {_length_cap}")


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Alphabet:
    """An immutable, ordered table of generator names."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        for n in self.names:
            if not _NAME_RE.match(n):
                raise ValueError(f"invalid generator name {n!r}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"generator {name!r} not in alphabet {self.names}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def gen(self, name: str) -> "Word":
        return Word(self, ((self.index(name), 1),))

    def gens(self) -> list["Word"]:
        return [Word(self, ((i, 1),)) for i in range(len(self.names))]

    def identity(self) -> "Word":
        return Word(self, ())

    def parse(self, text: str) -> "Word":
        return parse_word(text, self)

    def __repr__(self):
        return f"Alphabet({' '.join(self.names)})"


def make_alphabet(names: str | Iterable[str]) -> Alphabet:
    if isinstance(names, str):
        names = names.split()
    return Alphabet(tuple(names))


def _merge_runs(runs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    # merge same-generator same-sign neighbours; keeps opposite-sign neighbours
    out: list[list[int]] = []
    for g, e in runs:
        if e == 0:
            continue
        if out and out[-1][0] == g and (out[-1][1] > 0) == (e > 0):
            out[-1][1] += e
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


class Word:
    """A word over an :class:`Alphabet`, run-length encoded and immutable."""

    __slots__ = ("alphabet", "runs", "_len", "_hash")

    def __init__(self, alphabet: Alphabet, runs: Iterable[tuple[int, int]] = ()):
        runs = _merge_runs(runs)
        n = len(alphabet)
        for g, _ in runs:
            if not 0 <= g < n:
                raise ValueError(f"generator index {g} outside alphabet {alphabet}")
        total = sum(abs(e) for _, e in runs)
        _check_cap(total)
        self.alphabet = alphabet
        self.runs = runs
        self._len = total
        self._hash = None

    @classmethod
    def _raw(cls, alphabet, runs, total):
        w = cls.__new__(cls)
        w.alphabet = alphabet
        w.runs = runs
        w._len = total
        w._hash = None
        return w

    @classmethod
    def from_codes(cls, alphabet: Alphabet, codes: Iterable[int]) -> "Word":
        runs: list[list[int]] = []
        for x in codes:
            g, neg = x >> 1, x & 1
            step = -1 if neg else 1
            if runs and runs[-1][0] == g and (runs[-1][1] < 0) == bool(neg):
                runs[-1][1] += step
            else:
                runs.append([g, step])
        return cls(alphabet, ((g, e) for g, e in runs))

    def codes(self) -> Iterator[int]:
        for g, e in self.runs:
            x = 2 * g + (e < 0)
            for _ in range(abs(e)):
                yield x

    def code_list(self) -> list[int]:
        out: list[int] = []
        for g, e in self.runs:
            out.extend([2 * g + (e < 0)] * abs(e))
        return out

    def __len__(self) -> int:
        return self._len

    def __bool__(self) -> bool:
        return bool(self.runs)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.alphabet == other.alphabet and self.runs == other.runs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.alphabet.names, self.runs))
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def __str__(self):
        return format_word(self)

    def __repr__(self):
        return f"Word({format_word(self)!r})"


def _same_alphabet(u: Word, v: Word) -> None:
    if u.alphabet != v.alphabet:
        raise AlphabetMismatch(f"cannot combine words over {u.alphabet} and {v.alphabet}")


def _reduce_runs(runs: Iterable[tuple[int, int]], stack: list[list[int]] | None = None):
    stack = [] if stack is None else stack
    for g, e in runs:
        while e and stack and stack[-1][0] == g:
            top = stack[-1][1]
            if (top > 0) == (e > 0):
                stack[-1][1] = top + e
                e = 0
            else:
                s = top + e
                if s == 0:
                    stack.pop()
                    e = 0
                elif (s > 0) == (top > 0):
                    stack[-1][1] = s
                    e = 0
                else:
                    stack.pop()
                    e = s
        if e:
            stack.append([g, e])
    return stack


def _from_stack(alphabet: Alphabet, stack: list[list[int]]) -> Word:
    runs = tuple((g, e) for g, e in stack)
    total = sum(abs(e) for _, e in runs)
    _check_cap(total)
    return Word._raw(alphabet, runs, total)


def free_reduce(w: Word) -> Word:
    return _from_stack(w.alphabet, _reduce_runs(w.runs))


def is_freely_reduced(w: Word) -> bool:
    return all(a[0] != b[0] for a, b in zip(w.runs, w.runs[1:]))


def invert(w: Word) -> Word:
    return Word._raw(w.alphabet, tuple((g, -e) for g, e in reversed(w.runs)), len(w))


def concat(*words: Word) -> Word:
    """Product of words, freely reduced."""
    if not words:
        raise ValueError("concat needs at least one word")
    first = words[0]
    stack = _reduce_runs(first.runs)
    for v in words[1:]:
        _same_alphabet(first, v)
        stack = _reduce_runs(v.runs, stack)
    return _from_stack(first.alphabet, stack)


def power(w: Word, k: int) -> Word:
    if k < 0:
        return power(invert(w), -k)
    if k == 0:
        return w.alphabet.identity()
    core, conj = cyclic_reduce(free_reduce(w))
    _check_cap(len(core) * k + 2 * len(conj))
    if len(core.runs) == 1:
        g, e = core.runs[0]
        body = Word(w.alphabet, ((g, e * k),))
    else:
        body = Word(w.alphabet, core.runs * k)
    return concat(conj, body, invert(conj))


def length(w: Word) -> int:
    return len(w)


def is_positive(w: Word) -> bool:
    return all(e > 0 for _, e in w.runs)


def letter_counts(w: Word) -> list[int]:
    """Number of occurrences of each generator (either sign)."""
    counts = [0] * len(w.alphabet)
    for g, e in w.runs:
        counts[g] += abs(e)
    return counts


def exponent_sums(w: Word) -> list[int]:
    sums = [0] * len(w.alphabet)
    for g, e in w.runs:
        sums[g] += e
    return sums


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split a freely reduced ``w`` as ``conjugator * core * conjugator^-1``."""
    runs = list(w.runs)
    lo, hi = 0, len(runs) - 1
    conj: list[tuple[int, int]] = []
    while lo < hi and runs[lo][0] == runs[hi][0] and (runs[lo][1] > 0) != (runs[hi][1] > 0):
        g, a = runs[lo]
        b = runs[hi][1]
        m = min(abs(a), abs(b))
        conj.append((g, m if a > 0 else -m))
        a = a - m if a > 0 else a + m
        b = b + m if b < 0 else b - m
        runs[lo] = (g, a)
        runs[hi] = (g, b)
        if a == 0:
            lo += 1
        if b == 0:
            hi -= 1
        if a != 0 and b != 0:
            break
    core = Word(w.alphabet, runs[lo:hi + 1])
    return core, Word(w.alphabet, conj)


def is_cyclically_reduced(w: Word) -> bool:
    if not is_freely_reduced(w):
        return False
    if len(w.runs) < 2:
        return True
    (g0, e0), (g1, e1) = w.runs[0], w.runs[-1]
    return g0 != g1 or (e0 > 0) == (e1 > 0)


def rotate(w: Word, k: int) -> Word:
    """Cyclic rotation moving the first ``k`` letters to the end."""
    n = len(w)
    if n == 0:
        return w
    k %= n
    if k == 0:
        return w
    head = subword(w, 0, k)
    tail = subword(w, k, n)
    return Word(w.alphabet, tail.runs + head.runs)


def subword(w: Word, start: int, stop: int) -> Word:
    """Letters ``start`` (inclusive) to ``stop`` (exclusive), without reduction."""
    start = max(0, start)
    stop = min(len(w), stop)
    if start >= stop:
        return w.alphabet.identity()
    out = []
    pos = 0
    for g, e in w.runs:
        m = abs(e)
        lo, hi = max(start, pos), min(stop, pos + m)
        if lo < hi:
            out.append((g, (hi - lo) if e > 0 else -(hi - lo)))
        pos += m
        if pos >= stop:
            break
    return Word(w.alphabet, out)


def smallest_period(w: Word) -> int:
    """Least p dividing |w| with rotate(w, p) == w."""
    s = w.code_list()
    n = len(s)
    if n == 0:
        return 0
    # prefix function on the flat letters
    pi = [0] * n
    for i in range(1, n):
        k = pi[i - 1]
        while k and s[i] != s[k]:
            k = pi[k - 1]
        if s[i] == s[k]:
            k += 1
        pi[i] = k
    p = n - pi[-1]
    return p if n % p == 0 else n


def cyclic_permutations(w: Word) -> set[Word]:
    n = len(w)
    if n == 0:
        return {w}
    return {rotate(w, k) for k in range(smallest_period(w))}


def substitute(w: Word, images: Mapping[int | str, Word] | Sequence[Word],
               target: Alphabet | None = None) -> Word:
    """Apply the homomorphism sending each generator to its image.

    ``images`` may be keyed by generator index or name, or be a sequence
    indexed by generator.  The result is freely reduced.
    """
    lookup: dict[int, Word] = {}
    if isinstance(images, Mapping):
        for k, v in images.items():
            lookup[w.alphabet.index(k) if isinstance(k, str) else k] = v
    else:
        lookup = dict(enumerate(images))
    if target is None:
        if not lookup:
            if w.runs:
                raise KeyError("no images supplied")
            return w
        target = next(iter(lookup.values())).alphabet
    inv_cache: dict[int, Word] = {}
    stack: list[list[int]] = []
    total_bound = 0
    for g, e in w.runs:
        try:
            img = lookup[g]
        except KeyError:
            raise KeyError(f"no image for generator {w.alphabet.names[g]!r}") from None
        if img.alphabet != target:
            raise AlphabetMismatch("images over different alphabets")
        if e < 0:
            if g not in inv_cache:
                inv_cache[g] = invert(img)
            img = inv_cache[g]
        total_bound += abs(e) * len(img)
        if len(img.runs) == 1:
            h, f = img.runs[0]
            stack = _reduce_runs(((h, f * abs(e)),), stack)
        else:
            for _ in range(abs(e)):
                stack = _reduce_runs(img.runs, stack)
            if total_bound > _length_cap:
                # the bound ignores cancellation, so only then pay for an exact count
                _check_cap(sum(abs(x) for _, x in stack))
    return _from_stack(target, stack)


def translate(w: Word, alphabet: Alphabet) -> Word:
    """Re-express ``w`` over another alphabet by matching generator names."""
    if w.alphabet == alphabet:
        return w
    idx = [alphabet.index(n) if n in alphabet else None for n in w.alphabet.names]
    runs = []
    for g, e in w.runs:
        if idx[g] is None:
            raise AlphabetMismatch(f"generator {w.alphabet.names[g]!r} missing from {alphabet}")
        runs.append((idx[g], e))
    return Word(alphabet, runs)


def format_word(w: Word) -> str:
    if not w.runs:
        return "1"
    parts = []
    for g, e in w.runs:
        name = w.alphabet.names[g]
        parts.append(name if e == 1 else f"{name}^{e}")
    return " ".join(parts)


_TERM_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse ``"c1 c2^3 d1^-2"``; ``"1"`` is the empty word.  No reduction."""
    terms = text.split()
    if terms == ["1"]:
        return alphabet.identity()
    runs = []
    for t in terms:
        m = _TERM_RE.match(t)
        if not m:
            raise ValueError(f"bad term {t!r} in word literal {text!r}")
        e = int(m.group(2)) if m.group(2) is not None else 1
        if e == 0:
            raise ValueError(f"zero exponent in {t!r}")
        runs.append((alphabet.index(m.group(1)), e))
    return Word(alphabet, runs)


def reduce_codes(codes: Iterable[int]) -> list[int]:
    """Naive stack-based free reduction over flat letter codes."""
    out: list[int] = []
    for x in codes:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return out
