"""The Cannon-Thurston witness: geodesics gamma_n, the words u_n, and Mitra's table.

gamma_n = b^-n a^-n d1 a^n b^n is a strongly Dehn-reduced (hence geodesic)
word through the identity of G.  Its endpoints b^n and b^n w_n lie in the
free subgroup H = <b, d1, d2>, where the H-geodesic between them stays at
distance n from the identity.  Far-away H-geodesics whose G-geodesics pass
through e are exactly what rules out a boundary map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .growth import GrowthModel, materialize_w, phi_endo, shared_model
from .hnn import cross_oracle, random_word
from .rips import (ALPHABET_C, ALPHABET_G, ALPHABET_GBCD, ALPHABET_H,
                   RipsParams, c_family, d_family, presentation, presentation_G,
                   presentation_Gbcd, relator_in, word_C, word_Ci, word_Dj, GROUPS)
from .smallcancel import (Abelian, ONE_SIXTH, abelianized_distinct, abelianized_equal,
                          check_cprime, dehn_reduce, find_min_r, is_strongly_dehn_reduced,
                          is_trivial, symmetrize, _gate)
from .stallings import cprime_half_sufficient, nielsen_check
from .words import (Word, concat, exponent_sums, format_word, free_reduce, invert,
                    is_freely_reduced, substitute, translate)

SCHEMA_VERSION = 1
DEFAULT_SEED = 20240229
VERDICT_TEXT = "M(N) ≤ 0 for all tested N ⟹ M(N) ↛ ∞"


class CertificationError(RuntimeError):
    """A gamma_n failed to certify; at that r this would contradict the construction."""


@lru_cache(maxsize=None)
def default_r(l: int = 2, r_lo: int = 18, r_hi: int = 60) -> int:
    """Least r >= 18 for which P_G(r) is C'(1/6)."""
    r = find_min_r(ONE_SIXTH, r_lo, r_hi, "G", l)
    if r is None:
        raise RuntimeError(f"no r in [{r_lo}, {r_hi}] makes P_G C'(1/6)")
    return r


def default_params() -> RipsParams:
    return RipsParams(default_r())


# -- gamma_n and its certificate ------------------------------------------------

def gamma_word(n: int) -> Word:
    if n < 1:
        raise ValueError("n must be >= 1")
    return ALPHABET_G.parse(f"b^{-n} a^{-n} d1 a^{n} b^{n}")


@dataclass(frozen=True)
class GammaCertificate:
    n: int
    freely_reduced: bool
    strongly_dehn_reduced: bool
    longest_match: Optional[Word]
    tightest_ratio: Fraction

    @property
    def geodesic(self) -> bool:
        return self.freely_reduced and self.strongly_dehn_reduced

    @property
    def longest_match_length(self) -> int:
        return 0 if self.longest_match is None else len(self.longest_match)


def certify_gamma(n: int, params: RipsParams) -> GammaCertificate:
    p = presentation_G(params)
    _gate(p)
    w = gamma_word(n)
    ok, rep = is_strongly_dehn_reduced(w, symmetrize(p))
    return GammaCertificate(n, is_freely_reduced(w), ok,
                            None if rep.longest is None else rep.longest.alpha,
                            Fraction(0) if rep.tightest is None else rep.tightest.ratio)


# -- distances in the tree of H -------------------------------------------------

def gromov_product(x: Word, y: Word, z: Word) -> Fraction:
    """``(y . z)_x`` from reduced lengths in a free group."""
    def d(u, v):
        return len(free_reduce(concat(invert(u), v)))
    return Fraction(d(x, y) + d(x, z) - d(y, z), 2)


def distance_to_geodesic(x: Word, y: Word, z: Word) -> int:
    """Distance from x to the tree geodesic [y, z], walking that geodesic vertex by vertex."""
    start = free_reduce(concat(invert(x), y)).code_list()
    path = free_reduce(concat(invert(y), z)).codes()
    stack = list(start)
    best = len(stack)
    for c in path:
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
        best = min(best, len(stack))
    return best


def h_distance_to_lambda(n: int, params: RipsParams,
                         model: Optional[GrowthModel] = None) -> int:
    """Tree distance from e to the H-geodesic lambda_n = [b^n, b^n w_n].

    The Gromov product at e is ``(|p0| + |p1| - |p0^-1 p1|) / 2`` with
    |p0| = n, |p1| = n + |w_n| and |p0^-1 p1| = |w_n|; the latter two hold
    because w_n is a nonempty positive word on d1, d2, so b^n w_n is
    reduced.  |w_n| is carried as a formal symbol W and must cancel.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    model = model or shared_model(params)
    exact, log10 = model.length_w(n)
    if not log10 >= 0:
        raise CertificationError("|w_n| is not a positive length")
    # (constant, coefficient of W) for each of the three lengths
    p0, p1, p01 = (n, 0), (n, 1), (0, 1)
    const = p0[0] + p1[0] - p01[0]
    coef = p0[1] + p1[1] - p01[1]
    if coef != 0 or const % 2:
        raise CertificationError("Gromov product does not reduce to an integer")
    value = const // 2
    if exact is not None and (n + (n + exact) - exact) != 2 * value:
        raise CertificationError("exact |w_n| disagrees with the symbolic product")
    return value


def h_distance_explicit(n: int, params: RipsParams) -> int:
    """The same distance by materializing w_n and walking the tree (small cases only)."""
    model = shared_model(params)
    u = model.slp.materialize(model.u(n))
    w = translate(materialize_w(u, params), ALPHABET_H)
    bn = ALPHABET_H.parse(f"b^{n}")
    return distance_to_geodesic(ALPHABET_H.identity(), bn, concat(bn, w))


# -- the identities w_1 and u_n --------------------------------------------------

@dataclass(frozen=True)
class W1Report:
    r: int
    trivial: bool
    trace_steps: int
    w1_length: int
    formula_length: int
    abelian: Abelian

    @property
    def passed(self) -> bool:
        return (self.trivial and self.trace_steps > 0 and self.w1_length == self.formula_length
                and self.abelian is Abelian.INCONCLUSIVE)

    def to_dict(self) -> dict:
        return {"r": self.r, "trivial": self.trivial, "trace_steps": self.trace_steps,
                "w1_length": self.w1_length, "formula_length": self.formula_length,
                "abelian": self.abelian.value, "passed": self.passed}


def verify_w1(params: RipsParams) -> W1Report:
    """gamma_1 = D1 in G, checked by Dehn's algorithm on gamma_1 D1^-1."""
    p = presentation_G(params)
    _gate(p)
    D1 = word_Dj(params.r, 1, ALPHABET_G)
    final, trace = dehn_reduce(concat(gamma_word(1), invert(D1)), symmetrize(p))
    r = params.r
    return W1Report(r, not final, len(trace.steps), len(D1), r + r * (3 * r + 1) // 2,
                    abelianized_equal(gamma_word(1), D1, p))


# A token is "a", "b" or an int k standing for phi^k(C).
RULES = ("ab->baC", "Ckb->bCk+1")


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    position: int


def _apply(tokens: list, step: RewriteStep) -> list:
    i = step.position
    if step.rule == RULES[0]:
        if tokens[i:i + 2] != ["a", "b"]:
            raise AssertionError(f"ab->baC does not apply at {i}")
        return tokens[:i] + ["b", "a", 0] + tokens[i + 2:]
    if step.rule == RULES[1]:
        k = tokens[i] if i < len(tokens) else None
        if not isinstance(k, int) or isinstance(k, bool) or tokens[i + 1:i + 2] != ["b"]:
            raise AssertionError(f"C^k b -> b C^(k+1) does not apply at {i}")
        return tokens[:i] + ["b", k + 1] + tokens[i + 2:]
    raise AssertionError(f"unknown rule {step.rule!r}")


def _derive_ab_power(n: int, offset: int, steps: list) -> None:
    """Steps turning a b^n (at ``offset``) into b^(n-1) a b C^1 ... C^(n-1)."""
    if n == 1:
        return
    _derive_ab_power(n - 1, offset, steps)
    # now b^(n-2) a b C^1..C^(n-2) b: push the last b left through the C's
    pos_a = offset + n - 2
    for k in range(n - 2, 0, -1):
        steps.append(RewriteStep(RULES[1], pos_a + 1 + k))
    # b^(n-2) a b b C^2..C^(n-1): then ab -> baC and C^0 b -> b C^1
    steps.append(RewriteStep(RULES[0], pos_a))
    steps.append(RewriteStep(RULES[1], pos_a + 2))


def _shape_ab_power(n: int) -> list:
    return ["b"] * (n - 1) + ["a", "b"] + list(range(1, n))


def _u_tokens(n: int) -> list:
    out = []
    for m in range(1, n + 1):
        out += ["a", "b"] + list(range(1, m))
    return out


def derive_u(n: int) -> tuple[list[RewriteStep], list[tuple[int, list]]]:
    """The inductive derivation a^n b^n -> u_n as rule applications.

    Returns the steps and checkpoints ``(step count, expected tokens)``
    where the intermediate word must have the inductive shape.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    steps: list[RewriteStep] = []
    checkpoints: list[tuple[int, list]] = []

    def go(m: int, prefix: list):
        # a^m b^m followed by the already-rewritten tail ``prefix``
        if m == 1:
            return
        _derive_ab_power(m, m - 1, steps)
        checkpoints.append((len(steps), ["a"] * (m - 1) + ["b"] * (m - 1)
                            + _shape_ab_power(m)[m - 1:] + prefix))
        go(m - 1, _shape_ab_power(m)[m - 1:] + prefix)

    go(n, [])
    checkpoints.append((len(steps), _u_tokens(n)))
    return steps, checkpoints


def check_rules(params: RipsParams) -> bool:
    """Both rewrite rules hold in G.

    ``ab = baC`` is a relator of P_G; ``C^k b = b C^(k+1)`` follows letter by
    letter from the relators ``b^-1 c_i b = C_i`` because phi^(k+1)(C) is
    phi^k(C) with every c_i replaced by C_i.
    """
    p = presentation_G(params)
    A = ALPHABET_G
    a, b = A.gen("a"), A.gen("b")
    C = word_C(params.r, A)
    ok = relator_in(concat(a, b, invert(concat(b, a, C))), p)
    for i in (1, 2):
        ok = ok and relator_in(concat(invert(b), A.gen(f"c{i}"), b,
                                      invert(word_Ci(params.r, i, A))), p)
    return ok


def _slp_tokens(model: GrowthModel, n: int) -> list:
    """Flatten u_n, keeping the labelled phi^k(C) nodes whole."""
    slp = model.slp
    atoms = {model.phi_power_C(k): k for k in range(1, n)}
    out: list = []
    stack = [model.u(n)]
    while stack:
        i = stack.pop()
        if i in atoms:
            out.append(atoms[i])
            continue
        nd = slp.nodes[i]
        if nd.kind == "leaf":
            if nd.a != "ab":
                raise AssertionError(f"stray letter {nd.a} outside phi^k(C)")
            out += ["a", "b"]
        elif nd.kind == "cat":
            stack += [nd.b, nd.a]
        else:
            stack += [nd.a] * nd.b
    return out


def _u_in_G(u: Word) -> Word:
    A = ALPHABET_G
    return substitute(u, {"ab": A.parse("a b"), "c1": A.gen("c1"), "c2": A.gen("c2")}, target=A)


def _tokens_in_G(tokens: list, params: RipsParams) -> Word:
    A = ALPHABET_G
    phi = phi_endo(params)
    C = word_C(params.r, ALPHABET_C)
    parts = []
    for t in tokens:
        if t in ("a", "b"):
            parts.append(A.gen(t))
        else:
            w = C
            for _ in range(t):
                w = phi(w)
            parts.append(translate(w, A))
    return concat(*parts)


@dataclass(frozen=True)
class UVerification:
    n: int
    r: int
    mode: str
    passed: bool
    steps: int
    abelian: Abelian
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "mode": self.mode, "passed": self.passed,
                "steps": self.steps, "abelian": self.abelian.value, "detail": self.detail}


def _abelian_u(n: int, model: GrowthModel, p) -> Abelian:
    counts = model.slp.letter_counts(model.u(n))    # ab, c1, c2
    A = ALPHABET_G
    u_vec = [0] * len(A)
    u_vec[A.index("a")] = u_vec[A.index("b")] = counts[0]
    u_vec[A.index("c1")], u_vec[A.index("c2")] = counts[1], counts[2]
    lhs = exponent_sums(A.parse(f"a^{n} b^{n}"))
    return abelianized_distinct([x - y for x, y in zip(lhs, u_vec)], p)


def verify_u(n: int, params: RipsParams, mode: str = "rewrite-proof",
             materialize_limit: int = 10 ** 6) -> UVerification:
    """a^n b^n = u_n in G, by replaying the induction or by Dehn's algorithm."""
    if mode not in ("rewrite-proof", "dehn"):
        raise ValueError("mode must be 'rewrite-proof' or 'dehn'")
    model = shared_model(params)
    p = presentation_G(params)
    abel = _abelian_u(n, model, p)
    if mode == "dehn":
        _gate(p)
        uG = _u_in_G(model.slp.materialize(model.u(n)))
        trivial = is_trivial(concat(ALPHABET_G.parse(f"a^{n} b^{n}"), invert(uG)), p)
        return UVerification(n, params.r, mode, trivial and abel is Abelian.INCONCLUSIVE, 0,
                             abel, f"|u_n| = {len(uG)} letters in G")
    steps, checkpoints = derive_u(n)
    tokens = ["a"] * n + ["b"] * n
    marks = dict(checkpoints)
    detail = ""
    ok = check_rules(params)
    if not ok:
        detail = "rewrite rules are not consequences of P_G"
    for count, step in enumerate(steps, start=1):
        if not ok:
            break
        try:
            tokens = _apply(tokens, step)
        except AssertionError as exc:
            ok, detail = False, str(exc)
            break
        if count in marks and tokens != marks[count]:
            ok, detail = False, f"shape check failed after step {count}"
    if ok and tokens != marks.get(len(steps), _u_tokens(n)):
        ok, detail = False, "derivation does not end at u_n"
    if ok and tokens != _slp_tokens(model, n):
        ok, detail = False, "derived word differs from the SLP for u_n"
    if ok and model.slp.length(model.u(n)) <= materialize_limit:
        ok = _tokens_in_G(tokens, params) == _u_in_G(model.slp.materialize(model.u(n)))
        detail = detail or ("materialized words agree" if ok else "materialized words differ")
    ok = ok and abel is Abelian.INCONCLUSIVE
    return UVerification(n, params.r, mode, ok, len(steps), abel, detail)


# -- H-freeness sampling ---------------------------------------------------------

@dataclass
class HFreenessReport:
    r: int
    trials: int
    maxlen: int
    seed: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"r": self.r, "trials": self.trials, "maxlen": self.maxlen, "seed": self.seed,
                "failures": self.failures, "passed": self.passed}


def sample_H_freeness(params: RipsParams, trials: int, maxlen: int, seed: int) -> HFreenessReport:
    """Random nonempty reduced words on b, d1, d2 must be nontrivial in G_bcd."""
    p = presentation_Gbcd(params)
    _gate(p)
    rng = random.Random(seed)
    rep = HFreenessReport(params.r, trials, maxlen, seed)
    for _ in range(trials):
        w = random_word(ALPHABET_H, rng.randint(1, maxlen), rng)
        if is_trivial(translate(w, ALPHABET_GBCD), p):
            rep.failures.append(format_word(w))
    return rep


# -- the Mitra table ---------------------------------------------------------------

@dataclass(frozen=True)
class MitraRow:
    n: int
    gamma: str
    gamma_len: int
    strongly_dehn_reduced: bool
    geodesic_certified: bool
    longest_match: str
    longest_match_len: int
    p0: str
    p1: str
    w_len_exact: Optional[int]
    w_len_log10: float
    h_distance: int
    g_distance: int
    spot_checks: int

    def to_dict(self) -> dict:
        return {"n": self.n, "gamma": self.gamma, "gamma_len": self.gamma_len,
                "strongly_dehn_reduced": self.strongly_dehn_reduced,
                "geodesic_certified": self.geodesic_certified,
                "longest_match": self.longest_match, "longest_match_len": self.longest_match_len,
                "p0": self.p0, "p1": self.p1,
                "w_len_exact": None if self.w_len_exact is None else str(self.w_len_exact),
                "w_len_log10": round(self.w_len_log10, 9),
                "h_distance": self.h_distance, "g_distance": self.g_distance,
                "spot_checks": self.spot_checks}


@dataclass(frozen=True)
class CTReport:
    r: int
    l: int
    n_max: int
    seed: int
    certificate: dict
    rows: tuple[MitraRow, ...]
    verdict: bool

    def to_dict(self) -> dict:
        return {"params": {"r": self.r, "l": self.l, "n_max": self.n_max, "seed": self.seed},
                "certificate": self.certificate,
                "rows": [row.to_dict() for row in self.rows],
                "verdict": self.verdict,
                "verdict_text": VERDICT_TEXT if self.verdict else "criterion not witnessed"}


def _uniqueness_spot_check(gamma: Word, p, rng: random.Random, count: int) -> int:
    """Other strongly Dehn-reduced words of the same length never equal gamma."""
    S = symmetrize(p)
    seen = {gamma}
    checked = 0
    while checked < count:
        v = random_word(ALPHABET_G, len(gamma), rng)
        if v in seen or not is_strongly_dehn_reduced(v, S)[0]:
            continue
        seen.add(v)
        if is_trivial(concat(gamma, invert(v)), p):
            raise CertificationError(f"{format_word(gamma)} equals another geodesic {format_word(v)}")
        checked += 1
    return checked


def run_ct_experiment(params: RipsParams, n_max: int = 10, seed: int = DEFAULT_SEED,
                      spot_checks: int = 10) -> CTReport:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    p = presentation_G(params)
    ok, cert = check_cprime(p, ONE_SIXTH)
    if not ok:
        raise CertificationError(f"P_G(r={params.r}) is not C'(1/6)")
    rng = random.Random(seed)
    model = shared_model(params)
    rows = []
    for n in range(1, n_max + 1):
        c = certify_gamma(n, params)
        if not c.geodesic:
            raise CertificationError(f"gamma_{n} is not certified geodesic at r={params.r}")
        exact, lg = model.length_w(n)
        rows.append(MitraRow(
            n=n, gamma=format_word(gamma_word(n)), gamma_len=len(gamma_word(n)),
            strongly_dehn_reduced=c.strongly_dehn_reduced, geodesic_certified=c.geodesic,
            longest_match=format_word(c.longest_match) if c.longest_match is not None else "",
            longest_match_len=c.longest_match_length,
            p0=format_word(ALPHABET_H.parse(f"b^{n}")),
            p1=format_word(ALPHABET_H.parse(f"b^{n}")) + f" w_{n}", w_len_exact=exact, w_len_log10=lg,
            h_distance=h_distance_to_lambda(n, params, model),
            # gamma_n is based at b^n, so after its b^-n prefix it passes through e
            g_distance=0,
            spot_checks=_uniqueness_spot_check(gamma_word(n), p, rng, spot_checks)))
    verdict = all(r.geodesic_certified and r.g_distance == 0 and r.h_distance == r.n for r in rows)
    return CTReport(params.r, params.l, n_max, seed, cert.to_dict(), tuple(rows), verdict)


# -- the whole pipeline --------------------------------------------------------------

@dataclass(frozen=True)
class VerifyConfig:
    r: Optional[int] = None
    l: int = 2
    seed: int = DEFAULT_SEED
    cross_trials: int = 10_000
    cross_maxlen: int = 40
    h_trials: int = 10_000
    h_maxlen: int = 30
    n_max: int = 10
    u_max: int = 4
    distortion_n_max: int = 8
    exact_bits: int = 2 ** 20


STAGES = ("min_r", "cprime", "nielsen", "cross_oracle", "identities", "h_freeness",
          "ct_experiment", "distortion")


def _stage_min_r(cfg, params):
    r_star = find_min_r(ONE_SIXTH, 2, 60, "G", cfg.l)
    out = {"search": [2, 60], "r_star": r_star}
    if r_star is not None:
        out["certificate"] = check_cprime(presentation_G(RipsParams(r_star, cfg.l)), ONE_SIXTH)[1].to_dict()
    return r_star is not None, out


def _stage_cprime(cfg, params):
    out = {}
    ok = True
    for g in GROUPS:
        holds, rep = check_cprime(presentation(g, params), ONE_SIXTH)
        out[g] = rep.to_dict()
        ok = ok and holds
    return ok, out


def _stage_nielsen(cfg, params):
    out = {}
    ok = True
    for name, fam in (("C", c_family(params.r)), ("D", d_family(params.r, params.l))):
        rep = nielsen_check(fam)
        half = cprime_half_sufficient(fam)
        out[name] = {"n0": rep.n0, "n1": rep.n1, "n2": rep.n2,
                     "triples_checked": rep.triples_checked, "cprime_half": half}
        ok = ok and rep.passed and half
    return ok, out


def _stage_cross(cfg, params):
    rep = cross_oracle(cfg.cross_trials, cfg.cross_maxlen, cfg.seed, params)
    return rep.passed, rep.to_dict()


def _stage_identities(cfg, params):
    w1 = verify_w1(params)
    us = [verify_u(n, params, "rewrite-proof") for n in range(1, cfg.u_max + 1)]
    dehn = verify_u(2, params, "dehn")
    ok = w1.passed and all(us) and bool(dehn)
    return ok, {"w1": w1.to_dict(), "u_rewrite": [u.to_dict() for u in us], "u2_dehn": dehn.to_dict()}


def _stage_h(cfg, params):
    rep = sample_H_freeness(params, cfg.h_trials, cfg.h_maxlen, cfg.seed)
    return rep.passed, rep.to_dict()


def _stage_ct(cfg, params):
    rep = run_ct_experiment(params, cfg.n_max, cfg.seed)
    ok = rep.verdict and [r.h_distance for r in rep.rows] == list(range(1, cfg.n_max + 1))
    return ok, rep.to_dict()


def _stage_distortion(cfg, params):
    from .growth import distortion_table
    rows = distortion_table(cfg.distortion_n_max, params, cfg.exact_bits)
    ratios = [rows[k + 1].w_len_log10 / rows[k].w_len_log10 for k in range(len(rows) - 1)]
    ok = all(x > 1.5 for x in ratios[1:])
    return ok, {"rows": [{"n": x.n, "gamma_len": x.gamma_len,
                          "w_len_exact": None if x.w_len_exact is None else str(x.w_len_exact),
                          "w_len_log10": round(x.w_len_log10, 9)} for x in rows],
                "log_ratios": [round(x, 9) for x in ratios]}


def verify_all(cfg: VerifyConfig = VerifyConfig(), progress=None) -> tuple[int, dict]:
    """Run every stage in order; returns (exit code, report).

    The exit code is 0 when everything passes and ``10 + k`` when stage k
    (counting from 1 in :data:`STAGES`) is the first to fail.  Later stages
    are skipped after a failure.
    """
    params = RipsParams(cfg.r if cfg.r is not None else default_r(cfg.l), cfg.l)
    runners = (_stage_min_r, _stage_cprime, _stage_nielsen, _stage_cross, _stage_identities,
               _stage_h, _stage_ct, _stage_distortion)
    report = {"schema_version": SCHEMA_VERSION,
              "config": {"r": params.r, "l": params.l, "seed": cfg.seed,
                         "cross_trials": cfg.cross_trials, "cross_maxlen": cfg.cross_maxlen,
                         "h_trials": cfg.h_trials, "h_maxlen": cfg.h_maxlen, "n_max": cfg.n_max,
                         "u_max": cfg.u_max, "distortion_n_max": cfg.distortion_n_max,
                         "exact_bits": cfg.exact_bits},
              "stages": []}
    code = 0
    for k, (name, run) in enumerate(zip(STAGES, runners), start=1):
        if progress:
            progress(name)
        try:
            ok, detail = run(cfg, params)
        except Exception as exc:  # a failing gate or certificate ends the run
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        report["stages"].append({"stage": name, "passed": ok, "detail": detail})
        if not ok:
            code = 10 + k
            break
    report["passed"] = code == 0
    return code, report
