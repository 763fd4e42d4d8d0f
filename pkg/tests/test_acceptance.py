"""The twelve acceptance criteria, each at its stated count and tolerance.

Every test records exactly one PASS/FAIL line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""
import json
import time
from pathlib import Path

import numpy as np

from markovtrace import combs, stoch
from markovtrace.cli import OK, main
from markovtrace.laws import perturb_null_cells, run_laws
from markovtrace.randgen import random_deterministic, random_kernel, random_nonsignalling, random_objects
from markovtrace.stoch import FinSet, causal_trace, identity, mat_trace

ROOT = Path(__file__).resolve().parent.parent
DATA, GOLDEN = ROOT / "data", ROOT / "tests" / "golden"
SEED = 20240601
CARDS = (1, 2, 3, 4)


def _rngs(n, salt):
    return [np.random.default_rng(s) for s in np.random.SeedSequence([SEED, salt]).spawn(n)]


def _objs(rng, lo, hi, prefix):
    return random_objects(rng, int(rng.integers(lo, hi + 1)), CARDS, prefix)


def _ns_instance(rng, zero_prob=0.3):
    X, Y, W = _objs(rng, 0, 2, "X"), _objs(rng, 0, 2, "Y"), _objs(rng, 1, 2, "W")
    return random_nonsignalling(rng, X, W, Y, W, zero_prob), len(W)


def _law_summary(report, prefix):
    laws = {k: v for k, v in report["laws"].items() if k.startswith(prefix)}
    fails = sum(v["failures"] for v in laws.values())
    worst = max((v["max_residual"] for v in laws.values()), key=float)
    return laws, fails, worst


def test_01_trace_axioms(acceptance):
    t0 = time.perf_counter()
    report = run_laws(SEED, 500, ["trace_axioms"])
    elapsed = time.perf_counter() - t0
    laws, fails, worst = _law_summary(report, "trace_axioms.")
    ok = fails == 0 and len(laws) == 6 and all(v["cases"] == 500 for v in laws.values()) and elapsed < 10.0
    acceptance(1, "trace axioms", ok,
               f"6 axioms x 500 kernels, max residual {float(worst):.2e} (< 1e-8), {elapsed:.2f} s (< 10 s)")


def test_02_yanking_exact(acceptance):
    bad = []
    for n in range(1, 7):
        W = (FinSet("W", n),)
        if not np.array_equal(causal_trace(stoch.swap(W, W), 1).array, identity(W).array):
            bad.append(n)
    acceptance(2, "yanking exact", not bad, f"|W| in 1..6, inexact for {bad or 'none'}")


def test_03_diagonal_sum_oracle(acceptance):
    worst_diff = worst_rows = 0.0
    for rng in _rngs(500, 3):
        f, k = _ns_instance(rng, zero_prob=0.5)
        tr = causal_trace(f, k)
        worst_diff = max(worst_diff, stoch.max_abs_diff(tr, mat_trace(f, k)))
        worst_rows = max(worst_rows, float(np.max(np.abs(tr.array.sum(axis=1) - 1.0))))
    ok = worst_diff < 1e-9 and worst_rows < 1e-9
    acceptance(3, "diagonal-sum oracle", ok,
               f"500 kernels, |causal - diagonal| {worst_diff:.2e}, |row sum - 1| {worst_rows:.2e} (< 1e-9)")


def test_04_non_discardability(acceptance):
    got = {n: mat_trace(identity((FinSet("W", n),)), 1).array for n in (2, 3, 4)}
    ok = all(a.shape == (1, 1) and a[0, 0] == n for n, a in got.items())
    acceptance(4, "non-discardability witness", ok, ", ".join(f"tr(id_{n}) = {a[0, 0]:g}" for n, a in got.items()))


def test_05_well_definedness(acceptance):
    worst, with_null = 0.0, 0
    for rng in _rngs(200, 5):
        f, k = _ns_instance(rng, zero_prob=0.6)
        d = stoch.disintegrate(f, stoch.is_nonsignalling_sem(f, k), k)
        with_null += bool(np.any(d.f_s.array <= stoch.DEFAULT_TOL.null))
        worst = max(worst, stoch.max_abs_diff(stoch.trace_from_disintegration(perturb_null_cells(rng, d)),
                                              causal_trace(f, k)))
    acceptance(5, "well-definedness", worst < 1e-12,
               f"200 kernels ({with_null} with null cells), max change {worst:.2e} (< 1e-12)")


def test_06_atomicity(acceptance):
    counts = {"random": 0, "deterministic": 0, "full-support": 0}
    for rng in _rngs(500, 6):
        dom, cod = _objs(rng, 0, 2, "A"), _objs(rng, 1, 2, "B")
        counts["random"] += stoch.is_atomic(random_kernel(rng, dom, cod, zero_prob=0.5))
        counts["deterministic"] += stoch.is_atomic(random_deterministic(rng, dom, cod))
        counts["full-support"] += stoch.is_atomic(random_kernel(rng, dom, cod, zero_prob=0.0))
    acceptance(6, "atomicity", all(v == 500 for v in counts.values()),
               ", ".join(f"{k} {v}/500" for k, v in counts.items()))


def test_07_free_category_laws(acceptance):
    report = run_laws(SEED, 300, ["free"])
    laws, fails, _ = _law_summary(report, "free.")
    conf = laws["free.normalization_confluence"]
    ok = fails == 0 and all(v["cases"] == 300 for v in laws.values())
    acceptance(7, "free-category laws", ok,
               f"{len(laws)} laws x 300 diagrams, {fails} failures; confluence over all elimination orders "
               f"{conf['cases'] - conf['failures']}/300")


def test_08_trace_soundness(acceptance):
    report = run_laws(SEED, 300, ["soundness"])
    s = report["laws"]["soundness.trace_soundness"]
    acceptance(8, "trace soundness", s["failures"] == 0 and s["cases"] == 300,
               f"300 diagram/model pairs, max residual {float(s['max_residual']):.2e} (< 1e-8)")


def test_09_combs_of_nonsignalling_kernels(acceptance):
    round_trip = 0.0
    for rng in _rngs(300, 90):
        A, Ap, B, Bp = (_objs(rng, lo, 2, n) for lo, n in ((0, "A"), (0, "A'"), (1, "B"), (0, "B'")))
        f = random_nonsignalling(rng, A, Bp, Ap, B, zero_prob=0.4)
        c = combs.comb_from_nonsignalling(f, len(Bp), len(B))
        round_trip = max(round_trip, stoch.max_abs_diff(combs.extension(c), f))
    contexts = 0.0
    for rng in _rngs(100, 91):
        A, Ap, B, Bp = (_objs(rng, lo, 2, n) for lo, n in ((0, "A"), (0, "A'"), (1, "B"), (0, "B'")))
        f = random_nonsignalling(rng, A, Bp, Ap, B, zero_prob=0.6)
        d = stoch.disintegrate(f, stoch.is_nonsignalling_sem(f, len(Bp), len(B)), len(Bp), len(B))
        c1, c2 = combs.comb_from_disintegration(d), combs.comb_from_disintegration(perturb_null_cells(rng, d))
        assert combs.ext_equiv(c1, c2)
        for _ in range(50):
            h = combs.random_context(rng, c1.B, c1.B_prime)
            contexts = max(contexts, stoch.max_abs_diff(combs.insert(c1, h), combs.insert(c2, h)))
    acceptance(9, "combs of non-signalling kernels", round_trip < 1e-9 and contexts < 1e-8,
               f"round trip {round_trip:.2e} (< 1e-9) on 300; 100 pairs x 50 contexts {contexts:.2e} (< 1e-8)")


def test_10_sliding_optic_pairs(acceptance):
    equal = 0
    for rng in _rngs(200, 10):
        A, Ap, B, Bp = (_objs(rng, 0, 1, n) for n in ("A", "A'", "B", "B'"))
        E, F = _objs(rng, 0, 2, "E"), _objs(rng, 0, 2, "F")
        f = random_kernel(rng, A, E + B)
        s = random_kernel(rng, E, F)
        g = random_kernel(rng, F + Bp, Ap)
        left, right = combs.slide(f, s, g)
        equal += combs.ext_equiv(left, right)
    acceptance(10, "sliding optic pairs", equal == 200, f"{equal}/200 ext_equiv")


def test_11_conditionals_and_bayes(acceptance):
    cond = bayes = 0.0
    for rng in _rngs(500, 11):
        A, X, Y = _objs(rng, 0, 2, "A"), _objs(rng, 1, 2, "X"), _objs(rng, 1, 2, "Y")
        j = random_kernel(rng, A, X + Y, zero_prob=0.4)
        cond = max(cond, stoch.conditional_residual(j, len(X), stoch.conditional(j, len(X))))
        p, lk = random_kernel(rng, A, X, zero_prob=0.4), random_kernel(rng, X, Y, zero_prob=0.4)
        bayes = max(bayes, stoch.bayes_residual(lk, p, stoch.bayes_inverse(lk, p)))
    acceptance(11, "conditionals and Bayes", cond < 1e-9 and bayes < 1e-9,
               f"500 each, conditional {cond:.2e}, Bayes {bayes:.2e} (< 1e-9)")


def _cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_12_cli_end_to_end(acceptance, capsys):
    ident, fig = DATA / "contraction_identity.diag", DATA / "feedback_context.diag"
    ident_model, fig_model = DATA / "contraction_identity_model.json", DATA / "feedback_context_model.json"
    goldens = [
        (["contract", ident, "--diag", "c1", "-k", "1", "--name", "c1_contracted"], "contraction_identity_c1_contract.diag"),
        (["eval", ident, "--diag", "c1", "--model", ident_model], "contraction_identity_c1_eval.json"),
        (["render", ident, "--diag", "c1"], "contraction_identity_c1.dot"),
        (["contract", fig, "--diag", "ctx", "-k", "1"], "feedback_context_ctx_contract.diag"),
        (["eval", fig, "--diag", "expected", "--model", fig_model], "feedback_context_expected_eval.json"),
        (["render", fig, "--diag", "ctx"], "feedback_context_ctx.dot"),
        (["render", fig, "--diag", "expected"], "feedback_context_expected.dot"),
    ]
    problems = []
    for path in (ident, fig):
        if _cli(capsys, "validate", path)[0] != OK:
            problems.append(f"validate {path.name}")
    for argv, golden in goldens:
        first, second = _cli(capsys, *argv), _cli(capsys, *argv)
        if first != second:
            problems.append(f"{golden} unstable")
        elif first[0] != OK or first[1] != (GOLDEN / golden).read_text():
            problems.append(f"{golden} differs")
    code, out, _ = _cli(capsys, "trace-check", fig, "--diag", "ctx", "-k", "1", "--model", fig_model)
    if code != OK or not json.loads(out)["holds"]:
        problems.append("feedback_context trace-check")
    code, out, _ = _cli(capsys, "identity-check", ident, "--lhs", "c1", "--rhs", "c2", "-k", "1", "--model", ident_model)
    if code != OK or json.loads(out)["status"] != "holds":
        problems.append("identity-check")
    acceptance(12, "CLI end-to-end", not problems,
               f"validate/contract/eval on both encodings, {len(goldens)} goldens byte-stable"
               + (f"; problems: {problems}" if problems else ""))
