import numpy as np
from hypothesis import given

from markovtrace import stoch
from markovtrace.diagram import normalize
from markovtrace.dsl import parse
from markovtrace.laws import LAW_TOLERANCE, SUITES, elimination_results, perturb_null_cells, run_laws
from markovtrace.randgen import random_cospan, random_nonsignalling, random_objects, random_signature, random_types

from conftest import seeds


def test_report_shape():
    rep = run_laws(3, 4)
    assert rep["seed"] == 3 and rep["cases"] == 4 and rep["violations"] == 0
    suites = {k.split(".")[0] for k in rep["laws"]}
    assert suites == set(SUITES)
    for stats in rep["laws"].values():
        assert stats["cases"] == 4 and stats["failures"] == 0 and stats["failing_cases"] == []


def test_reports_are_reproducible_and_parallel_safe():
    a = run_laws(11, 6, ["backend", "free"])
    assert a == run_laws(11, 6, ["backend", "free"])
    assert a == run_laws(11, 6, ["backend", "free"], jobs=2)


def test_default_run_has_no_violations():
    rep = run_laws(42, 200)
    assert rep["violations"] == 0, {k: v for k, v in rep["laws"].items() if v["failures"]}


def test_every_semantic_law_has_a_tolerance():
    rep = run_laws(0, 1)
    for name, stats in rep["laws"].items():
        law = name.split(".", 1)[1]
        # syntactic laws report 0.0 or inf and use the default threshold 0
        assert law in LAW_TOLERANCE or stats["max_residual"] in (0.0, "inf")


def test_elimination_orders_on_known_chain():
    prog = parse("type X; box f : X -> X; box s : I -> X; diag d = s ; f ; f ; del_X")
    c = prog.diagrams["d"].cospan
    assert elimination_results(c) == {normalize(c).canonical_bytes}
    assert normalize(c).graph.n_boxes == 0


@given(seeds)
def test_confluence_on_small_raw_cospans(seed):
    rng = np.random.default_rng(seed)
    sig = random_signature(rng)
    raw = random_cospan(rng, sig, random_types(rng, sig, int(rng.integers(0, 3))), int(rng.integers(0, 5)),
                        n_out=int(rng.integers(0, 3)))
    assert elimination_results(raw) == {normalize(raw).canonical_bytes}


@given(seeds)
def test_null_cell_perturbation_is_a_disintegration(seed):
    rng = np.random.default_rng(seed)
    X, W, Y = (random_objects(rng, 1, prefix=p) for p in "XWY")
    f = random_nonsignalling(rng, X, W, Y, W, zero_prob=0.6)
    d = stoch.disintegrate(f, stoch.is_nonsignalling_sem(f, 1), 1)
    q = perturb_null_cells(rng, d)
    assert stoch.max_abs_diff(q.recompose(), f) < 1e-12
    live = (d.f_s.array.T > 0)[:, :, None, None]
    nW, nX = live.shape[:2]
    a, b = d.f_p.array.reshape(nW, nX, -1, d.f_p.array.shape[1]), q.f_p.array.reshape(nW, nX, -1, d.f_p.array.shape[1])
    assert np.array_equal(np.where(live, a, 0), np.where(live, b, 0))
    assert stoch.max_abs_diff(stoch.trace_from_disintegration(q), stoch.causal_trace(f, 1)) < 1e-12
