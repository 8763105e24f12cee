"""Stallings foldings for finitely generated subgroups of free groups.

Each edge carries, besides its generator label, a weight in the free group on
fresh basis letters ``e1 .. ek`` (one per input generator).  Folding keeps
the invariant that the weight of a closed path at the basepoint, mapped back
through the input words, equals the path label; reading a member word along
the folded graph therefore expresses it in the input basis.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .words import (Alphabet, AlphabetMismatch, Word, concat, free_reduce, invert,
                    is_freely_reduced, make_alphabet, substitute)


class NotMember(ValueError):
    pass


def basis_alphabet(k: int) -> Alphabet:
    return make_alphabet([f"e{i}" for i in range(1, k + 1)])


@dataclass
class _Edge:
    src: int
    gen: int
    dst: int
    weight: Word
    alive: bool = True


class SubgroupGraph:
    """Folded, basepointed core graph of the subgroup generated by ``basis``."""

    def __init__(self, basis: Sequence[Word], alphabet: Alphabet | None = None):
        basis = list(basis)
        if alphabet is None:
            if not basis:
                raise ValueError("alphabet required for an empty basis")
            alphabet = basis[0].alphabet
        for w in basis:
            if w.alphabet != alphabet:
                raise AlphabetMismatch("basis words over different alphabets")
        self.alphabet = alphabet
        self.basis = tuple(free_reduce(w) for w in basis)
        self.basis_alphabet = basis_alphabet(len(basis))
        self.free_on_basis = True
        self._parent: list[int] = [0]
        self._inc: list[dict[int, int]] = [{}]
        self._all: list[set[int]] = [set()]
        self._edges: list[_Edge] = []
        self._pending: deque[tuple[int, int]] = deque()
        E = self.basis_alphabet
        for i, w in enumerate(self.basis):
            if not w:
                continue
            codes = w.code_list()
            prev = 0
            for pos, x in enumerate(codes):
                nxt = 0 if pos == len(codes) - 1 else self._new_vertex()
                weight = E.gen(f"e{i + 1}") if pos == 0 else E.identity()
                if x & 1:
                    self._add_edge(nxt, x >> 1, prev, invert(weight))
                else:
                    self._add_edge(prev, x >> 1, nxt, weight)
                prev = nxt
        self._fold()
        self._prune()
        self._freeze()

    # -- construction ---------------------------------------------------

    def _new_vertex(self) -> int:
        self._parent.append(len(self._parent))
        self._inc.append({})
        self._all.append(set())
        return len(self._parent) - 1

    def _find(self, v: int) -> int:
        root = v
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[v] != root:
            self._parent[v], v = root, self._parent[v]
        return root

    def _attach(self, v: int, key: int, eid: int) -> None:
        other = self._inc[v].get(key)
        if other is None or not self._edges[other].alive:
            self._inc[v][key] = eid
        elif other != eid:
            self._pending.append((other, eid))

    def _add_edge(self, s: int, g: int, t: int, weight: Word) -> None:
        eid = len(self._edges)
        self._edges.append(_Edge(s, g, t, weight))
        self._all[s].add(eid)
        self._all[t].add(eid)
        self._attach(s, 2 * g, eid)
        self._attach(t, 2 * g + 1, eid)

    def _ends(self, eid: int) -> tuple[tuple[int, int], tuple[int, int]]:
        e = self._edges[eid]
        return (self._find(e.src), 2 * e.gen), (self._find(e.dst), 2 * e.gen + 1)

    def _detach(self, eid: int) -> None:
        self._edges[eid].alive = False
        for v, key in self._ends(eid):
            if self._inc[v].get(key) == eid:
                del self._inc[v][key]
            self._all[v].discard(eid)

    def _shift(self, v: int, pot: Word) -> None:
        # re-weight edges at v by the potential: w(x->y) -> P(x) w P(y)^-1
        inv = invert(pot)
        for eid in self._all[v]:
            e = self._edges[eid]
            (s, _), (t, _) = self._ends(eid)
            w = e.weight
            if s == v:
                w = concat(pot, w)
            if t == v:
                w = concat(w, inv)
            e.weight = w

    def _far(self, eid: int, key: int) -> tuple[int, Word]:
        (s, _), (t, _) = self._ends(eid)
        e = self._edges[eid]
        if key % 2 == 0:
            return t, e.weight
        return s, invert(e.weight)

    def _fold(self) -> None:
        while self._pending:
            e1, e2 = self._pending.popleft()
            if e1 == e2:
                continue
            if not (self._edges[e1].alive and self._edges[e2].alive):
                for e in (e1, e2):
                    if self._edges[e].alive:
                        self._reattach(e)
                continue
            shared = set(self._ends(e1)) & set(self._ends(e2))
            if not shared:
                continue
            v, key = min(shared)
            o1, w1 = self._far(e1, key)
            o2, w2 = self._far(e2, key)
            if o1 == o2:
                if free_reduce(concat(w1, invert(w2))):
                    self.free_on_basis = False
                self._detach(e2)
                self._reattach(e1)
                continue
            if o2 == 0:
                o1, o2, w1, w2, e1, e2 = o2, o1, w2, w1, e2, e1
            self._shift(o2, concat(invert(w1), w2))
            self._detach(e2)
            self._merge(o1, o2)
            self._reattach(e1)

    def _reattach(self, eid: int) -> None:
        for v, key in self._ends(eid):
            self._attach(v, key, eid)

    def _merge(self, keep: int, gone: int) -> None:
        self._parent[gone] = keep
        self._all[keep] |= self._all[gone]
        self._all[gone] = set()
        moved = list(self._inc[gone].items())
        self._inc[gone] = {}
        for key, eid in moved:
            if self._edges[eid].alive:
                self._attach(keep, key, eid)

    def _prune(self) -> None:
        stack = [v for v in range(len(self._parent)) if v and self._find(v) == v]
        while stack:
            v = stack.pop()
            live = self._all[v]
            if v == 0 or len(live) != 1:
                continue
            eid = next(iter(live))
            (s, _), (t, _) = self._ends(eid)
            if s == t:
                continue
            self._detach(eid)
            stack.append(t if s == v else s)

    def _freeze(self) -> None:
        # breadth-first relabelling from the basepoint in fixed label order
        order = {0: 0}
        queue = deque([0])
        tree_eids = {}
        while queue:
            v = queue.popleft()
            for key in sorted(self._inc[v]):
                eid = self._inc[v][key]
                u, _ = self._far(eid, key)
                if u not in order:
                    order[u] = len(order)
                    tree_eids[order[u]] = (order[v], key)
                    queue.append(u)
        self.n_vertices = len(order)
        self.out: list[dict[int, int]] = [dict() for _ in range(len(order))]
        self.weight: list[dict[int, Word]] = [dict() for _ in range(len(order))]
        edges = []
        for eid, e in enumerate(self._edges):
            if not e.alive:
                continue
            (s, _), (t, _) = self._ends(eid)
            s, t = order[s], order[t]
            edges.append((s, e.gen, t))
            self.out[s][2 * e.gen] = t
            self.out[t][2 * e.gen + 1] = s
            self.weight[s][2 * e.gen] = e.weight
            self.weight[t][2 * e.gen + 1] = invert(e.weight)
        self.edges = tuple(sorted(edges))
        # tree: child -> (parent, letter code read from parent to child)
        self._tree = tree_eids
        del self._edges, self._inc, self._all, self._parent, self._pending

    # -- queries --------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def canonical_form(self) -> tuple:
        return (self.n_vertices, self.edges)

    def _walk(self, w: Word) -> Optional[tuple[int, list[Word]]]:
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch("word and subgroup graph use different alphabets")
        v = 0
        weights = []
        for x in free_reduce(w).codes():
            t = self.out[v].get(x)
            if t is None:
                return None
            weights.append(self.weight[v][x])
            v = t
        return v, weights

    def contains(self, w: Word) -> bool:
        walked = self._walk(w)
        return walked is not None and walked[0] == 0

    def express_in_basis(self, w: Word) -> Word:
        walked = self._walk(w)
        if walked is None or walked[0] != 0:
            raise NotMember("word is not in the subgroup")
        weights = walked[1]
        if not weights:
            return self.basis_alphabet.identity()
        return concat(*weights)

    def free_basis(self) -> list[Word]:
        """A free basis read off the spanning tree (one loop per non-tree edge)."""
        A = self.alphabet

        def path(v):
            letters = []
            while v != 0:
                u, x = self._tree[v]
                letters.append(x)
                v = u
            return Word.from_codes(A, reversed(letters))

        tree = set()
        for child, (parent, x) in self._tree.items():
            tree.add((parent, x >> 1, child) if x % 2 == 0 else (child, x >> 1, parent))
        out = []
        for s, g, t in self.edges:
            if (s, g, t) in tree:
                tree.discard((s, g, t))
                continue
            out.append(concat(path(s), Word(A, ((g, 1),)), invert(path(t))))
        return out


def build_subgroup_graph(basis: Sequence[Word], alphabet: Alphabet | None = None) -> SubgroupGraph:
    return SubgroupGraph(basis, alphabet)


def contains(g: SubgroupGraph, w: Word) -> bool:
    return g.contains(w)


def express_in_basis(g: SubgroupGraph, w: Word) -> Word:
    return g.express_in_basis(w)


@dataclass
class NielsenReport:
    n0: bool = True
    n1: bool = True
    n2: bool = True
    violation: Optional[tuple[str, tuple[Word, ...]]] = None
    triples_checked: int = 0

    @property
    def passed(self) -> bool:
        return self.n0 and self.n1 and self.n2


def nielsen_check(U: Sequence[Word]) -> NielsenReport:
    """Check N0-N2 over all v1, v2, v3 in U and their inverses."""
    if not U:
        raise ValueError("U must be non-empty")
    for w in U:
        if not is_freely_reduced(w):
            raise ValueError("words must be freely reduced")
    rep = NielsenReport()
    V = []
    for w in U:
        V += [w, invert(w)]
    for v in V:
        if not v:
            rep.n0 = False
            rep.violation = rep.violation or ("N0", (v,))
    prod2 = {}
    for i, v1 in enumerate(V):
        for j, v2 in enumerate(V):
            p = concat(v1, v2)
            prod2[i, j] = p
            if p and not (len(p) >= len(v1) and len(p) >= len(v2)):
                rep.n1 = False
                rep.violation = rep.violation or ("N1", (v1, v2))
    for i, v1 in enumerate(V):
        for j, v2 in enumerate(V):
            if not prod2[i, j]:
                continue
            for k, v3 in enumerate(V):
                if not prod2[j, k]:
                    continue
                rep.triples_checked += 1
                p = concat(prod2[i, j], v3)
                if not len(p) > len(v1) - len(v2) + len(v3):
                    rep.n2 = False
                    rep.violation = rep.violation or ("N2", (v1, v2, v3))
    return rep


def cprime_half_sufficient(U: Sequence[Word]) -> bool:
    """C'(1/2) for U viewed as relators; implies N0-N2.

    Conservative: words that are empty, not cyclically reduced, or that
    coincide with another word up to rotation and inversion give False.
    """
    from .rips import Presentation
    from .smallcancel import check_cprime
    from .words import cyclic_permutations, is_cyclically_reduced
    if not U:
        raise ValueError("U must be non-empty")
    A = U[0].alphabet
    classes = []
    for w in U:
        if not w or not is_cyclically_reduced(w):
            return False
        cls = frozenset(cyclic_permutations(w) | cyclic_permutations(invert(w)))
        if any(cls & c for c in classes):
            return False
        classes.append(cls)
    ok, _ = check_cprime(Presentation(A, tuple(U), "U"), "1/2")
    return ok


def substitute_basis(x: Word, basis: Sequence[Word]) -> Word:
    """Evaluate a word over basis letters e1..ek on the given basis."""
    return substitute(x, list(basis), target=basis[0].alphabet if basis else None)
