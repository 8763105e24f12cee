from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from ctmaps.experiment import default_params, gamma_word
from ctmaps.hnn import random_word
from ctmaps.rips import (ALPHABET_G, ALPHABET_GCD, Presentation, RipsParams, presentation_G,
                         presentation_Gcd, word_Dij)
from ctmaps.smallcancel import (Abelian, NotC16, abelianized_distinct, abelianized_equal,
                                certify_geodesic, check_cprime, dehn_reduce, find_min_r,
                                in_integer_row_span, is_dehn_reduced, is_strongly_dehn_reduced,
                                is_trivial, naive_match_report, symmetrize)
from ctmaps.words import (concat, cyclic_permutations, exponent_sums, free_reduce, invert,
                          make_alphabet)

AB = make_alphabet("a b")


def ordered(S) -> list:
    return sorted(S.elements, key=lambda w: (len(w), w.code_list()))


def brute_elements(p: Presentation) -> set:
    out = set()
    for rel in p.relators:
        out |= cyclic_permutations(rel) | cyclic_permutations(invert(rel))
    return out


def brute_cprime(p: Presentation, lam: Fraction) -> tuple[bool, Fraction]:
    els = [w.code_list() for w in brute_elements(p)]
    worst = Fraction(0)
    for x, y in itertools.combinations(els, 2):
        k = 0
        while k < min(len(x), len(y)) and x[k] == y[k]:
            k += 1
        worst = max(worst, Fraction(k, min(len(x), len(y))))
    return worst < lam, worst


def test_symmetrize_small():
    assert len(symmetrize(Presentation(AB, (AB.parse("a b a b"),)))) == 4
    S = symmetrize(Presentation(AB, (AB.parse("a b a^-1 b^-1"),)))
    assert len(S) == 8


def test_symmetrize_matches_enumeration():
    p = presentation_Gcd(RipsParams(2))
    S = symmetrize(p)
    assert S.elements == brute_elements(p)


def test_cprime_commutator():
    p = Presentation(AB, (AB.parse("a b a^-1 b^-1"),))
    assert check_cprime(p, "1/2")[0]
    assert not check_cprime(p, "1/6")[0]
    assert brute_cprime(p, Fraction(1, 2)) == (True, Fraction(1, 4))


def test_cprime_vacuous():
    p = Presentation(make_alphabet("a"), ())
    assert check_cprime(p, "1/6")[0]
    assert check_cprime(p, "1/100")[0]


def test_cprime_matches_brute_force_on_random_presentations():
    rng = random.Random(21)
    A = make_alphabet("a b c")
    for _ in range(150):
        rels = []
        while len(rels) < rng.randint(1, 3):
            w = free_reduce(random_word(A, rng.randint(3, 9), rng))
            if w and w.code_list()[0] != w.code_list()[-1] ^ 1:
                rels.append(w)
        p = Presentation(A, tuple(rels))
        for lam in (Fraction(1, 6), Fraction(1, 4), Fraction(1, 2)):
            ok, rep = check_cprime(p, lam)
            bok, worst = brute_cprime(p, lam)
            assert ok == bok
            assert rep.max_ratio == worst


def test_cprime_matches_brute_force_on_Gcd():
    p = presentation_Gcd(RipsParams(2))
    ok, rep = check_cprime(p, "1/6")
    assert (ok, rep.max_ratio) == brute_cprime(p, Fraction(1, 6))


def test_cprime_monotone_in_lambda():
    for r in (2, 10, 21):
        p = presentation_G(RipsParams(r))
        lams = [Fraction(1, 6), Fraction(1, 4), Fraction(1, 2)]
        res = [check_cprime(p, lam)[0] for lam in lams]
        assert res == sorted(res)


def test_default_presentation_and_witness():
    ok, rep = check_cprime(presentation_G(default_params()), "1/6")
    assert ok and rep.max_ratio < Fraction(1, 6)
    assert rep.witness is not None


def test_find_min_r():
    r = find_min_r("1/6", 2, 60, "G")
    assert r is not None and r <= 60
    assert find_min_r("1/6", 2, 60, "G") == r
    comm = Presentation(AB, (AB.parse("a b a^-1 b^-1"),))
    assert find_min_r("1/2", 1, 5, lambda _r: comm) == 1


def test_dehn_reduces_relators():
    S = symmetrize(presentation_Gcd(default_params()))
    for rho in ordered(S)[:300]:
        final, trace = dehn_reduce(rho, S)
        assert not final and trace.replay() == final


def test_dehn_example_at_r2():
    C = ALPHABET_GCD
    w = concat(C.parse("c1^-1 d1 c1"), invert(word_Dij(2, 1, 1, 2, C)))
    final, trace = dehn_reduce(w, presentation_Gcd(RipsParams(2)))
    assert not final and not trace.replay()


def test_dehn_conjugates_of_relators():
    p = presentation_Gcd(default_params())
    S = symmetrize(p)
    rels = ordered(S)
    rng = random.Random(22)
    for _ in range(1_000):
        g = random_word(ALPHABET_GCD, rng.randint(0, 10), rng)
        w = concat(g, rng.choice(rels), invert(g))
        final, trace = dehn_reduce(w, S)
        assert not final
        assert trace.replay() == final


def test_dehn_trace_is_sound():
    p = presentation_Gcd(default_params())
    S = symmetrize(p)
    rng = random.Random(23)
    for _ in range(500):
        w = random_word(ALPHABET_GCD, rng.randint(0, 60), rng, reduced=False)
        final, trace = dehn_reduce(w, S)
        assert trace.replay() == final
        assert is_trivial(concat(w, invert(final)), p)
        assert is_dehn_reduced(final, S)[0]


def test_is_trivial_examples():
    p = presentation_Gcd(default_params())
    assert is_trivial(ALPHABET_GCD.identity(), p)
    assert not is_trivial(ALPHABET_GCD.parse("d1"), p)


def test_gate():
    with pytest.raises(NotC16):
        is_trivial(ALPHABET_G.parse("a"), presentation_G(RipsParams(2)))


def test_dehn_reduced_examples():
    S = symmetrize(presentation_G(default_params()))
    rng = random.Random(28)
    for rho in rng.sample(ordered(S)[:2000], 8):
        assert not is_dehn_reduced(rho, S)[0]
    assert is_strongly_dehn_reduced(ALPHABET_G.identity(), S)[0]


def test_gamma_longest_match():
    S = symmetrize(presentation_G(default_params()))
    for n in range(2, 11):
        ok, rep = is_strongly_dehn_reduced(gamma_word(n), S)
        assert ok
        assert rep.longest.alpha == ALPHABET_G.parse("a^-1 d1 a")


def test_gamma_1_is_itself_a_relator_subword():
    # the whole of b^-1 a^-1 d1 a b sits inside the relator (ab)^-1 d1 (ab) D1^-1
    S = symmetrize(presentation_G(default_params()))
    ok, rep = is_strongly_dehn_reduced(gamma_word(1), S)
    assert ok
    assert rep.longest.alpha == gamma_word(1)


def test_pattern_index_matches_naive_scan():
    p = presentation_Gcd(RipsParams(3))
    S = symmetrize(p)
    rng = random.Random(24)
    rels = ordered(S)
    for _ in range(400):
        w = random_word(ALPHABET_GCD, rng.randint(0, 25), rng)
        if rng.random() < 0.5:
            rho = rng.choice(rels).code_list()
            k = rng.randint(1, len(rho))
            w = free_reduce(concat(w, type(w).from_codes(ALPHABET_GCD, rho[:k])))
        for check, lam in ((is_dehn_reduced, "1/2"), (is_strongly_dehn_reduced, "1/6")):
            ok, rep = check(w, S)
            nok, longest, ratio = naive_match_report(w, S, lam)
            assert ok == nok
            assert (len(rep.longest.alpha) if rep.longest else 0) == longest
            assert (rep.tightest.ratio if rep.tightest else 0) == ratio


def test_certify_geodesic():
    p = presentation_G(default_params())
    assert certify_geodesic(gamma_word(1), p)
    for rho in p.relators:
        assert not certify_geodesic(rho, p)


def test_certified_words_are_distinct_elements():
    p = presentation_G(default_params())
    S = symmetrize(p)
    rng = random.Random(25)
    pairs = 0
    while pairs < 1_000:
        n = rng.randint(1, 8)
        u = random_word(ALPHABET_G, n, rng)
        v = random_word(ALPHABET_G, n, rng)
        if u == v or not (is_strongly_dehn_reduced(u, S)[0] and is_strongly_dehn_reduced(v, S)[0]):
            continue
        assert not is_trivial(concat(u, invert(v)), p)
        pairs += 1


def test_abelianized_against_box_search():
    p = presentation_Gcd(RipsParams(1))
    rows = [exponent_sums(r) for r in p.relators]
    spans = set()
    for coeffs in itertools.product(range(-3, 4), repeat=len(rows)):
        spans.add(tuple(sum(c * row[k] for c, row in zip(coeffs, rows)) for k in range(len(rows[0]))))
    d1 = ALPHABET_GCD.parse("d1")
    vec = tuple(exponent_sums(d1))
    # at r = 1 the two c1-relator rows differ by exactly the d1 vector
    assert vec in spans
    assert in_integer_row_span(rows, list(vec))
    assert abelianized_equal(d1, ALPHABET_GCD.identity(), p) is Abelian.INCONCLUSIVE
    c1 = ALPHABET_GCD.parse("c1")
    assert tuple(exponent_sums(c1)) not in spans
    assert abelianized_equal(c1, ALPHABET_GCD.identity(), p) is Abelian.DISTINCT_CERTIFIED
    rng = random.Random(26)
    for _ in range(300):
        v = [rng.randint(-4, 4) for _ in range(len(rows[0]))]
        if tuple(v) in spans:
            assert in_integer_row_span(rows, v)


def test_abelianized_equal_self():
    p = presentation_Gcd(RipsParams(2))
    w = ALPHABET_GCD.parse("c1 d2^3 c2^-1")
    assert abelianized_equal(w, w, p) is Abelian.INCONCLUSIVE


def test_abelianized_sound_on_trivial_pairs():
    p = presentation_Gcd(default_params())
    rels = ordered(symmetrize(p))
    rng = random.Random(27)
    for _ in range(1_000):
        u = random_word(ALPHABET_GCD, rng.randint(0, 12), rng)
        g = random_word(ALPHABET_GCD, rng.randint(0, 6), rng)
        v = concat(u, g, rng.choice(rels), invert(g))
        assert is_trivial(concat(u, invert(v)), p)
        assert abelianized_equal(u, v, p) is Abelian.INCONCLUSIVE
        diff = [a - b for a, b in zip(exponent_sums(u), exponent_sums(v))]
        assert abelianized_distinct(diff, p) is Abelian.INCONCLUSIVE
