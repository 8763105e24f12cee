"""Elements of a free group kept as formal images under injective substitutions.

A lazy element is a tuple of items.  An item is either a plain freely
reduced word or ``sigma_k(L)``: the image of another lazy element ``L``
under a registered substitution ``sigma_k`` (generator ``j`` maps to the
``j``-th image word).  Every registered image set must be Nielsen reduced.
That property bounds the cancellation between neighbouring image blocks, so
the first and last letters of an item's reduced expansion are the first and
last letters of its formal expansion.

Normalized tuples keep one invariant: the last letter of each item and the
first letter of the next one never cancel.  The expansion of a normalized
tuple is then a freely reduced word up to cancellation inside items, and
the element is trivial exactly when the tuple is empty.  Nested images can
be astronomically long; nothing here expands them unless asked to.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence

from .stallings import SubgroupGraph, nielsen_check
from .words import Alphabet, Word, concat, free_reduce, invert, substitute


class _Item:
    __slots__ = ("key", "word", "inner", "first", "last")

    def __init__(self, key, word, inner, first, last):
        self.key = key
        self.word = word
        self.inner = inner
        self.first = first
        self.last = last

    def __repr__(self):
        if self.key is None:
            return f"<{self.word}>"
        return f"{self.key}({self.inner!r})"


Lazy = tuple  # tuple[_Item, ...]


def _first_code(w: Word) -> int:
    g, e = w.runs[0]
    return 2 * g + (e < 0)


def _last_code(w: Word) -> int:
    g, e = w.runs[-1]
    return 2 * g + (e < 0)


def _drop_first(w: Word) -> Word:
    (g, e), rest = w.runs[0], w.runs[1:]
    e = e - 1 if e > 0 else e + 1
    runs = ((g, e),) + rest if e else rest
    return Word._raw(w.alphabet, runs, len(w) - 1)


def _drop_last(w: Word) -> Word:
    rest, (g, e) = w.runs[:-1], w.runs[-1]
    e = e - 1 if e > 0 else e + 1
    runs = rest + ((g, e),) if e else rest
    return Word._raw(w.alphabet, runs, len(w) - 1)


class LazyFreeGroup:
    """Arithmetic on lazy elements of the free group over ``alphabet``."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self._images: dict[str, tuple[Word, ...]] = {}
        self._by_code: dict[str, list[Word]] = {}

    # -- substitutions --------------------------------------------------

    def register(self, key: str, images: Sequence[Word]) -> None:
        images = tuple(free_reduce(w) for w in images)
        if len(images) != len(self.alphabet):
            raise ValueError("need one image per generator")
        if any(w.alphabet != self.alphabet for w in images):
            raise ValueError("images must be words over the group's alphabet")
        if key in self._images:
            if self._images[key] != images:
                raise ValueError(f"substitution {key!r} already registered differently")
            return
        if not nielsen_check(list(images)).passed:
            raise ValueError(f"images for {key!r} are not Nielsen reduced")
        self._images[key] = images
        by_code = []
        for w in images:
            by_code += [w, invert(w)]
        self._by_code[key] = by_code

    def images(self, key: str) -> tuple[Word, ...]:
        return self._images[key]

    # -- construction ---------------------------------------------------

    def _plain(self, w: Word) -> _Item:
        return _Item(None, w, None, _first_code(w), _last_code(w))

    def _phi(self, key: str, inner: Lazy) -> _Item:
        imgs = self._by_code[key]
        return _Item(key, None, inner, _first_code(imgs[inner[0].first]),
                     _last_code(imgs[inner[-1].last]))

    def from_word(self, w: Word) -> Lazy:
        if w.alphabet != self.alphabet:
            raise ValueError("word over a different alphabet")
        w = free_reduce(w)
        return (self._plain(w),) if w else ()

    def apply(self, key: str, x: Lazy) -> Lazy:
        """The image of ``x`` under substitution ``key``."""
        if key not in self._images:
            raise KeyError(f"no substitution registered as {key!r}")
        return (self._phi(key, x),) if x else ()

    # -- group operations -----------------------------------------------

    def mul(self, *xs: Lazy) -> Lazy:
        if not xs:
            return ()
        st = list(xs[0])
        for x in xs[1:]:
            for it in x:
                self._push(st, it)
        return tuple(st)

    def inverse(self, x: Lazy) -> Lazy:
        out = []
        for it in reversed(x):
            if it.key is None:
                out.append(self._plain(invert(it.word)))
            else:
                out.append(self._phi(it.key, self.inverse(it.inner)))
        return tuple(out)

    def is_identity(self, x: Lazy) -> bool:
        return not x

    def _push(self, st: list, it: _Item) -> None:
        while True:
            if not st:
                st.append(it)
                return
            top = st[-1]
            if top.key is None and it.key is None:
                st.pop()
                w = concat(top.word, it.word)
                if not w:
                    return
                it = self._plain(w)
                continue
            if top.key is not None and top.key == it.key:
                st.pop()
                inner = self.mul(top.inner, it.inner)
                if not inner:
                    return
                it = self._phi(top.key, inner)
                continue
            if top.last != it.first ^ 1:
                st.append(it)
                return
            # cancellation across a boundary: expose one image block as plain letters
            if top.key is not None:
                st.pop()
                rest, y = self._peel_last(top.inner)
                if rest:
                    self._push(st, self._phi(top.key, rest))
                self._push(st, self._plain(self._by_code[top.key][y]))
                continue
            rest, y = self._peel_first(it.inner)
            key = it.key
            self._push(st, self._plain(self._by_code[key][y]))
            if not rest:
                return
            it = self._phi(key, rest)

    def _peel_first(self, x: Lazy) -> tuple[Lazy, int]:
        """``(rest, code)`` with ``x = code * rest``."""
        head = x[0]
        if head.key is None:
            code = head.first
            w = _drop_first(head.word)
            st = [self._plain(w)] if w else []
        else:
            rest, y = self._peel_first(head.inner)
            block = self._by_code[head.key][y]
            code = _first_code(block)
            st = []
            w = _drop_first(block)
            if w:
                self._push(st, self._plain(w))
            if rest:
                self._push(st, self._phi(head.key, rest))
        for it in x[1:]:
            self._push(st, it)
        return tuple(st), code

    def _peel_last(self, x: Lazy) -> tuple[Lazy, int]:
        """``(rest, code)`` with ``x = rest * code``."""
        tail = x[-1]
        st = list(x[:-1])
        if tail.key is None:
            code = tail.last
            w = _drop_last(tail.word)
            if w:
                self._push(st, self._plain(w))
        else:
            rest, y = self._peel_last(tail.inner)
            block = self._by_code[tail.key][y]
            code = _last_code(block)
            if rest:
                self._push(st, self._phi(tail.key, rest))
            w = _drop_last(block)
            if w:
                self._push(st, self._plain(w))
        return tuple(st), code

    # -- queries --------------------------------------------------------

    def expand(self, x: Lazy) -> Word:
        """The freely reduced word; may raise LengthCapExceeded."""
        parts = [self.alphabet.identity()]
        for it in x:
            if it.key is None:
                parts.append(it.word)
            else:
                parts.append(substitute(self.expand(it.inner), self._images[it.key],
                                        target=self.alphabet))
        return concat(*parts)

    def walk(self, graph: SubgroupGraph, key: Optional[str], x: Lazy) -> tuple[Optional[int], Lazy]:
        """Read ``x`` from the basepoint of ``graph``.

        ``key`` names the substitution whose images form the basis of
        ``graph`` (or None); an item with that key met at the basepoint is
        read in one step.  Returns the end vertex (None if the reading
        leaves the graph) and the weight, a lazy element over the basis
        letters renamed to this group's generators.
        """
        if len(graph.basis) != len(self.alphabet):
            raise ValueError("basis size must match the number of generators")
        v = 0
        weight: list[_Item] = []
        work = deque(x)
        while work:
            it = work.popleft()
            if it.key is not None:
                if it.key == key and v == 0:
                    for sub in it.inner:
                        self._push(weight, sub)
                    continue
                rest, y = self._peel_first(it.inner)
                st: list[_Item] = []
                self._push(st, self._plain(self._by_code[it.key][y]))
                if rest:
                    self._push(st, self._phi(it.key, rest))
                work.extendleft(reversed(st))
                continue
            for code in it.word.codes():
                t = graph.out[v].get(code)
                if t is None:
                    return None, ()
                w = graph.weight[v][code]
                if w:
                    self._push(weight, self._plain(Word._raw(self.alphabet, w.runs, len(w))))
                v = t
        return v, tuple(weight)

    def size(self, x: Lazy) -> int:
        """Number of items in the expression tree (a measure of work, not length)."""
        return sum(1 if it.key is None else 1 + self.size(it.inner) for it in x)
