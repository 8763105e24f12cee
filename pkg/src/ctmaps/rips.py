"""Rips-style word families and the presentations built from them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .words import (Alphabet, Word, concat, cyclic_permutations, cyclic_reduce, format_word, free_reduce,
                    invert, is_cyclically_reduced, make_alphabet, parse_word, translate)

ALPHABET_G = make_alphabet("a b c1 c2 d1 d2")
ALPHABET_GBCD = make_alphabet("b c1 c2 d1 d2")
ALPHABET_GCD = make_alphabet("c1 c2 d1 d2")
ALPHABET_GC1D = make_alphabet("c1 d1 d2")
ALPHABET_H = make_alphabet("b d1 d2")
ALPHABET_C = make_alphabet("c1 c2")
ALPHABET_D = make_alphabet("d1 d2")

GROUPS = ("G", "Gbcd", "Gcd", "Gc1d")


@dataclass(frozen=True)
class RipsParams:
    r: int
    l: int = 2

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.l < 2:
            # l = 1 makes D_{12} and D_{21} share the exponent base 3r
            raise ValueError(f"l must be >= 2, got {self.l}")


def _block_word(first: str, second: str, base: int, r: int, alphabet: Alphabet) -> Word:
    # first second^{base+1} first second^{base+2} ... first second^{base+r}
    x, y = alphabet.index(first), alphabet.index(second)
    runs = []
    for k in range(1, r + 1):
        runs.append((x, 1))
        runs.append((y, base + k))
    return Word(alphabet, runs)


def _check_index(name, v):
    if v not in (1, 2):
        raise ValueError(f"{name} must be 1 or 2, got {v}")


def word_C(r: int, alphabet: Alphabet = ALPHABET_G) -> Word:
    if r < 1:
        raise ValueError("r must be >= 1")
    return _block_word("c1", "c2", 0, r, alphabet)


def word_Ci(r: int, i: int, alphabet: Alphabet = ALPHABET_G) -> Word:
    if r < 1:
        raise ValueError("r must be >= 1")
    _check_index("i", i)
    return _block_word("c1", "c2", r * i, r, alphabet)


def word_Dj(r: int, j: int, alphabet: Alphabet = ALPHABET_G) -> Word:
    if r < 1:
        raise ValueError("r must be >= 1")
    _check_index("j", j)
    return _block_word("d1", "d2", r * j, r, alphabet)


def word_Dij(r: int, i: int, j: int, l: int = 2, alphabet: Alphabet = ALPHABET_G) -> Word:
    if r < 1:
        raise ValueError("r must be >= 1")
    if l < 2:
        raise ValueError("l must be >= 2")
    _check_index("i", i)
    _check_index("j", j)
    return _block_word("d1", "d2", r * (i * l + j), r, alphabet)


@dataclass(frozen=True)
class Presentation:
    """Generators plus cyclically reduced relators (each stored as LHS * RHS^-1)."""

    alphabet: Alphabet
    relators: tuple[Word, ...]
    name: str = ""

    def __post_init__(self):
        for w in self.relators:
            if w.alphabet != self.alphabet:
                raise ValueError("relator over a different alphabet")
            if not w:
                raise ValueError("empty relator")
            if not is_cyclically_reduced(w):
                raise ValueError(f"relator {format_word(w)} is not cyclically reduced")

    def to_text(self) -> str:
        lines = ["gens: " + " ".join(self.alphabet.names)]
        lines += ["rel: " + format_word(w) for w in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "Presentation":
        alphabet = None
        rels = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, rest = line.partition(":")
            key = key.strip()
            if key == "gens":
                alphabet = make_alphabet(rest)
            elif key == "rel":
                if alphabet is None:
                    raise ValueError("'rel:' line before 'gens:' line")
                rels.append(relator(parse_word(rest, alphabet)))
            else:
                raise ValueError(f"unrecognised line {line!r}")
        if alphabet is None:
            raise ValueError("missing 'gens:' line")
        return cls(alphabet, tuple(rels), name)


def relator(lhs: Word, rhs: Word | None = None) -> Word:
    """Cyclically reduced form of ``lhs * rhs^-1``."""
    w = free_reduce(lhs) if rhs is None else concat(lhs, invert(rhs))
    core, _ = cyclic_reduce(w)
    if not core:
        raise ValueError("relator reduces to the empty word")
    return core


def _cd_relators(p: RipsParams, alphabet: Alphabet, stable=("c1", "c2")) -> list[Word]:
    rels = []
    for name in stable:
        i = int(name[1])
        c = alphabet.gen(name)
        for j in (1, 2):
            d = alphabet.gen(f"d{j}")
            rels.append(relator(concat(invert(c), d, c), word_Dij(p.r, i, j, p.l, alphabet)))
    return rels


def _bc_relators(p: RipsParams, alphabet: Alphabet) -> list[Word]:
    b = alphabet.gen("b")
    return [relator(concat(invert(b), alphabet.gen(f"c{i}"), b), word_Ci(p.r, i, alphabet))
            for i in (1, 2)]


@lru_cache(maxsize=None)
def presentation_G(params: RipsParams) -> Presentation:
    A = ALPHABET_G
    a, b = A.gen("a"), A.gen("b")
    ab = concat(a, b)
    rels = [relator(concat(invert(a), invert(b), a, b), word_C(params.r, A))]
    rels += _bc_relators(params, A)
    rels += [relator(concat(invert(ab), A.gen(f"d{j}"), ab), word_Dj(params.r, j, A))
             for j in (1, 2)]
    rels += _cd_relators(params, A)
    return Presentation(A, tuple(rels), f"G(r={params.r},l={params.l})")


@lru_cache(maxsize=None)
def presentation_Gbcd(params: RipsParams) -> Presentation:
    A = ALPHABET_GBCD
    rels = _bc_relators(params, A) + _cd_relators(params, A)
    return Presentation(A, tuple(rels), f"Gbcd(r={params.r},l={params.l})")


@lru_cache(maxsize=None)
def presentation_Gcd(params: RipsParams) -> Presentation:
    A = ALPHABET_GCD
    return Presentation(A, tuple(_cd_relators(params, A)), f"Gcd(r={params.r},l={params.l})")


@lru_cache(maxsize=None)
def presentation_Gc1d(params: RipsParams) -> Presentation:
    A = ALPHABET_GC1D
    return Presentation(A, tuple(_cd_relators(params, A, stable=("c1",))),
                        f"Gc1d(r={params.r},l={params.l})")


def presentation(group: str, params: RipsParams) -> Presentation:
    builders = {"G": presentation_G, "Gbcd": presentation_Gbcd,
                "Gcd": presentation_Gcd, "Gc1d": presentation_Gc1d}
    try:
        return builders[group](params)
    except KeyError:
        raise ValueError(f"unknown group {group!r}; expected one of {GROUPS}") from None


def c_family(r: int, alphabet: Alphabet = ALPHABET_C) -> list[Word]:
    """[C, C1, C2]."""
    return [word_C(r, alphabet), word_Ci(r, 1, alphabet), word_Ci(r, 2, alphabet)]


def d_family(r: int, l: int = 2, alphabet: Alphabet = ALPHABET_D) -> list[Word]:
    """[D1, D2, D11, D12, D21, D22]."""
    return ([word_Dj(r, j, alphabet) for j in (1, 2)]
            + [word_Dij(r, i, j, l, alphabet) for i in (1, 2) for j in (1, 2)])


def exponents_of(w: Word, name: str) -> list[int]:
    """Exponents of the maximal runs of generator ``name`` in ``w``."""
    g = w.alphabet.index(name)
    return [e for h, e in w.runs if h == g]


def relator_in(w: Word, p: Presentation) -> bool:
    """Whether ``w`` is (a cyclic permutation of) a relator of ``p`` or its inverse."""
    w = translate(w, p.alphabet)
    target = cyclic_permutations(w) | cyclic_permutations(invert(w))
    return any(rel in target for rel in p.relators)
