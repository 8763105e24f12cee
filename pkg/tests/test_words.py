from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from ctmaps.rips import ALPHABET_C, ALPHABET_G, word_C, word_Ci, word_Dj
from ctmaps.words import (AlphabetMismatch, LengthCapExceeded, Word, concat, cyclic_permutations,
                          cyclic_reduce, format_word, free_reduce, invert, is_cyclically_reduced,
                          is_freely_reduced, is_positive, length, length_cap, letter_counts,
                          make_alphabet, parse_word, power, rotate, smallest_period, substitute)

AB = make_alphabet("a b")
ABC = make_alphabet("a b c")


def flat(w: Word) -> list[int]:
    return w.code_list()


def naive_reduce(codes: list[int]) -> list[int]:
    out: list[int] = []
    for x in codes:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return out


def rand_codes(rng: random.Random, alphabet, n: int) -> list[int]:
    return [rng.randrange(2 * len(alphabet)) for _ in range(n)]


def rand_word(rng: random.Random, alphabet=ALPHABET_G, maxlen: int = 100) -> Word:
    return Word.from_codes(alphabet, rand_codes(rng, alphabet, rng.randint(0, maxlen)))


def test_free_reduce_examples():
    G = ALPHABET_G
    assert free_reduce(G.parse("c1 c1^-1")) == G.identity()
    assert free_reduce(G.parse("b^-1 d1 d1^-1 b d2")) == G.parse("d2")


def test_free_reduce_matches_flat_stack():
    rng = random.Random(11)
    for _ in range(10_000):
        w = rand_word(rng)
        r = free_reduce(w)
        assert flat(r) == naive_reduce(flat(w))
        assert free_reduce(r) == r
        assert len(r) <= len(w)
        assert not free_reduce(concat(w, invert(w)))


def test_run_length_and_flat_agree():
    rng = random.Random(12)
    for _ in range(2_000):
        codes = rand_codes(rng, ALPHABET_G, rng.randint(0, 60))
        w = Word.from_codes(ALPHABET_G, codes)
        assert len(w) == len(codes) == length(w)
        assert flat(w) == codes
        counts = [0] * len(ALPHABET_G)
        for x in codes:
            counts[x >> 1] += 1
        assert letter_counts(w) == counts


def test_concat_associative():
    rng = random.Random(13)
    for _ in range(2_000):
        u, v, x = (rand_word(rng, maxlen=30) for _ in range(3))
        assert concat(concat(u, v), x) == concat(u, concat(v, x))


def test_invert_and_positive():
    assert invert(AB.parse("a b")) == AB.parse("b^-1 a^-1")
    assert is_positive(word_C(2))
    assert not is_positive(AB.parse("a b^-1"))


def test_letter_counts_of_D1_at_r1():
    D1 = word_Dj(1, 1)
    assert D1 == ALPHABET_G.parse("d1 d2^2")
    counts = letter_counts(D1)
    assert counts[ALPHABET_G.index("d1")] == 1
    assert counts[ALPHABET_G.index("d2")] == 2


def test_cyclic_reduce_examples():
    core, conj = cyclic_reduce(AB.parse("a b a^-1"))
    assert core == AB.parse("b") and conj == AB.parse("a")
    core, conj = cyclic_reduce(AB.parse("a b a b"))
    assert core == AB.parse("a b a b") and not conj


def test_cyclic_reduce_of_random_conjugates():
    rng = random.Random(14)
    for _ in range(2_000):
        w = free_reduce(rand_word(rng, AB, 20))
        if not w:
            continue
        g = free_reduce(rand_word(rng, AB, 10))
        conjugate = concat(g, w, invert(g))
        core, c = cyclic_reduce(conjugate)
        assert is_cyclically_reduced(core)
        assert concat(c, core, invert(c)) == conjugate
        assert core in cyclic_permutations(cyclic_reduce(w)[0])


def test_substitute_examples():
    C = ALPHABET_C
    images = {"c1": word_Ci(2, 1, C), "c2": word_Ci(2, 2, C)}
    assert substitute(C.parse("c1"), images) == images["c1"]
    w = substitute(word_C(2, C), images)
    expected = sum(len(images[C.names[x >> 1]]) for x in word_C(2, C).codes())
    assert len(w) == expected


def test_substitute_is_a_homomorphism():
    rng = random.Random(15)
    for _ in range(1_000):
        images = [free_reduce(rand_word(rng, AB, 6)) for _ in range(2)]
        u, v = rand_word(rng, AB, 15), rand_word(rng, AB, 15)
        assert substitute(concat(u, v), images) == concat(substitute(u, images), substitute(v, images))


def test_substitute_identity_images():
    rng = random.Random(16)
    for _ in range(1_000):
        w = free_reduce(rand_word(rng, ABC, 40))
        assert substitute(w, ABC.gens()) == w


def test_cyclic_permutations_examples():
    assert cyclic_permutations(AB.parse("a b a b")) == {AB.parse("a b a b"), AB.parse("b a b a")}
    assert cyclic_permutations(ABC.parse("a b c")) == {ABC.parse(s) for s in ("a b c", "b c a", "c a b")}


def test_cyclic_permutation_count_is_smallest_period():
    rng = random.Random(17)
    done = 0
    while done < 1_000:
        base = free_reduce(rand_word(rng, AB, 5))
        w = power(base, rng.randint(1, 4))
        if not w or not is_cyclically_reduced(w):
            continue
        naive = {tuple(flat(w)[k:] + flat(w)[:k]) for k in range(len(w))}
        perms = cyclic_permutations(w)
        assert len(perms) == len(naive) == smallest_period(w)
        assert len(w) % smallest_period(w) == 0
        assert {tuple(flat(p)) for p in perms} == naive
        done += 1


def test_rotate_round_trip():
    w = ABC.parse("a b^2 c^-1")
    assert rotate(w, 1) == ABC.parse("b^2 c^-1 a")
    assert rotate(rotate(w, 2), len(w) - 2) == w


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 5), max_size=40))
def test_parse_format_round_trip(codes):
    w = Word.from_codes(ABC, codes)
    assert parse_word(format_word(w), ABC) == w


def test_parse_identity_and_errors():
    assert parse_word("1", AB) == AB.identity()
    with pytest.raises(Exception):
        parse_word("a x", AB)


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        concat(AB.parse("a"), ABC.parse("a"))


def test_length_cap():
    with length_cap(100):
        with pytest.raises(LengthCapExceeded):
            power(AB.parse("a b"), 51)
        assert len(power(AB.parse("a b"), 50)) == 100


def test_is_freely_reduced():
    assert is_freely_reduced(AB.parse("a b a^-1"))
    assert not is_freely_reduced(Word.from_codes(AB, [0, 1]))
