import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings

from markovtrace import diagram as dg
from markovtrace import stoch
from markovtrace.contraction import TracePartition
from markovtrace.dsl import parse
from markovtrace.errors import ModelError, SignallingInput
from markovtrace.interp import Model, check_contraction_identity, check_trace_soundness, contract_network, evaluate, interpret
from markovtrace.randgen import (
    random_cospan,
    random_diagram,
    random_kernel,
    random_model,
    random_nonsignalling_diagram,
    random_signature,
    random_types,
)

from conftest import seeds
from helpers import naive_evaluate

DATA = Path(__file__).resolve().parent.parent / "data"


def _model(prog, name):
    return Model.from_json(json.loads((DATA / name).read_text()), prog.signature)


def test_identity_diagram_is_identity_kernel():
    prog = parse("type X; box f : X -> X; diag d = id_X")
    m = random_model(np.random.default_rng(0), prog.signature, cards=(3,))
    assert np.array_equal(interpret(prog.diagrams["d"], m).array, np.eye(3))


def test_copy_then_delete_is_identity():
    prog = parse("type X; box f : X -> X; diag d = copy_X ; (del_X * id_X)")
    m = random_model(np.random.default_rng(0), prog.signature, cards=(4,))
    assert np.array_equal(interpret(prog.diagrams["d"], m).array, np.eye(4))


def test_model_must_cover_signature():
    prog = parse("type X; box f : X -> X;")
    with pytest.raises(ModelError):
        Model(prog.signature, {"X": 2}, {})
    with pytest.raises(ModelError):
        Model(prog.signature, {}, {})
    k = stoch.identity([stoch.FinSet("X", 3)])
    with pytest.raises(ModelError):
        Model(prog.signature, {"X": 2}, {"f": k})


def test_model_json_roundtrip():
    prog = parse((DATA / "feedback_context.diag").read_text())
    m = _model(prog, "feedback_context_model.json")
    again = Model.from_json(json.loads(json.dumps(m.to_json())), prog.signature)
    for b in prog.signature.boxes:
        assert np.array_equal(again.kernel(b.name).array, m.kernel(b.name).array)


def test_contract_network_sums_unused_labels():
    a = np.arange(6.0).reshape(2, 3)
    assert np.allclose(contract_network([(a, [0, 1])], {0: 2, 1: 3}, [0]), a.sum(axis=1))
    assert np.allclose(contract_network([(a, [0, 1]), (a, [0, 1])], {0: 2, 1: 3}, [0, 1]), a * a)
    assert contract_network([], {}, []) == 1.0


@given(seeds)
@settings(max_examples=40)
def test_evaluation_matches_assignment_sum(seed):
    """Evaluate raw cospans (eliminable boxes included) against brute-force enumeration."""
    rng = np.random.default_rng(seed)
    sig = random_signature(rng)
    m = random_model(rng, sig, cards=(1, 2))
    c = random_cospan(rng, sig, random_types(rng, sig, int(rng.integers(0, 3))), int(rng.integers(0, 4)),
                      max_wires=7)
    assert np.allclose(evaluate(c, m).array, naive_evaluate(c, m), atol=1e-12)


@given(seeds)
def test_functoriality(seed):
    rng = np.random.default_rng(seed)
    sig = random_signature(rng)
    m = random_model(rng, sig)
    f = random_diagram(rng, sig, random_types(rng, sig, 2), int(rng.integers(0, 4)), n_out=2)
    g = random_diagram(rng, sig, f.cod, int(rng.integers(0, 4)), n_out=2)
    k = random_diagram(rng, sig, random_types(rng, sig, 1), int(rng.integers(0, 3)), n_out=1)
    I = lambda d: interpret(d, m)
    assert stoch.max_abs_diff(I(f >> g), stoch.seq(I(f), I(g))) < 1e-9
    assert stoch.max_abs_diff(I(f @ k), stoch.tensor(I(f), I(k))) < 1e-9
    ts = f.cod
    objs = m.objects(ts)
    assert np.array_equal(I(dg.copy(ts)).array, stoch.copy(objs).array)
    assert np.array_equal(I(dg.delete(ts)).array, stoch.delete(objs).array)
    assert np.array_equal(I(dg.swap(ts, k.cod)).array, stoch.swap(objs, m.objects(k.cod)).array)


def test_box_interprets_to_its_kernel():
    rng = np.random.default_rng(1)
    sig = random_signature(rng)
    m = random_model(rng, sig)
    for b in sig.boxes:
        assert np.array_equal(interpret(dg.box(sig, b.name), m).array, m.kernel(b.name).array)


# -- trace soundness -----------------------------------------------------------------

def test_swap_soundness_both_identity():
    prog = parse("type X; box f : X -> X; diag d = swap(X, X)")
    m = random_model(np.random.default_rng(2), prog.signature, cards=(3,))
    v = check_trace_soundness(TracePartition(prog.diagrams["d"], 1), m)
    assert v.holds and np.array_equal(v.contracted.array, np.eye(3))
    assert np.array_equal(v.traced.array, np.eye(3))


def test_empty_feedback_soundness_is_plain_interpretation():
    rng = np.random.default_rng(4)
    sig = random_signature(rng)
    m = random_model(rng, sig)
    d = random_diagram(rng, sig, random_types(rng, sig, 2), 3, n_out=2)
    v = check_trace_soundness(TracePartition(d, 0), m)
    assert v.residual == 0.0 and np.array_equal(v.traced.array, interpret(d, m).array)


def test_soundness_rejects_signalling():
    with pytest.raises(SignallingInput):
        prog = parse("type X; box f : X -> X; diag d = f")
        check_trace_soundness(TracePartition(prog.diagrams["d"], 1), random_model(np.random.default_rng(0), prog.signature))


@given(seeds)
def test_trace_soundness_random(seed):
    rng = np.random.default_rng(seed)
    sig = random_signature(rng)
    m = random_model(rng, sig)
    w = random_types(rng, sig, int(rng.integers(1, 3)))
    d = random_nonsignalling_diagram(rng, sig, random_types(rng, sig, int(rng.integers(0, 3))), w, w,
                                     int(rng.integers(0, 6)), max_wires=8)
    v = check_trace_soundness(TracePartition(d, len(w)), m)
    assert v.holds and v.residual < 1e-8


def test_feedback_context_soundness():
    prog = parse((DATA / "feedback_context.diag").read_text())
    m = _model(prog, "feedback_context_model.json")
    v = check_trace_soundness(TracePartition(prog.diagrams["ctx"], 1), m)
    assert v.holds
    assert np.allclose(v.contracted.array, [[0.575, 0.425], [0.35, 0.65]])


# -- contraction identity ------------------------------------------------------------

def test_contraction_identity_holds_when_premise_holds():
    prog = parse((DATA / "contraction_identity.diag").read_text())
    m = _model(prog, "contraction_identity_model.json")
    c1, c2 = (TracePartition(prog.diagrams[n], 1) for n in ("c1", "c2"))
    v = check_contraction_identity(c1, c2, m)
    assert v.status == "holds"


def test_contraction_identity_vacuous_when_premise_fails():
    prog = parse((DATA / "contraction_identity.diag").read_text())
    data = json.loads((DATA / "contraction_identity_model.json").read_text())
    data["boxes"]["f2"]["rows"][1] = ["0", "1"]  # differs on a p-likely row
    m = Model.from_json(data, prog.signature)
    c1, c2 = (TracePartition(prog.diagrams[n], 1) for n in ("c1", "c2"))
    assert check_contraction_identity(c1, c2, m).status == "vacuous"


@given(seeds)
@settings(max_examples=40)
def test_contraction_identity_never_violated(seed):
    """f2 = f1 off the support of p; premise holds, so the conclusion must too."""
    rng = np.random.default_rng(seed)
    prog = parse((DATA / "contraction_identity.diag").read_text())
    n = int(rng.integers(1, 4))
    X, Y = stoch.FinSet("X", n), stoch.FinSet("Y", int(rng.integers(1, 4)))
    p = random_kernel(rng, [], [X], zero_prob=0.5)
    f1 = random_kernel(rng, [X, X], [Y])
    rows = f1.array.copy()
    null = p.array[0] <= 0
    other = random_kernel(rng, [X, X], [Y]).array
    rows.reshape(n, n, -1)[null] = other.reshape(n, n, -1)[null]
    m = Model(prog.signature, {"X": n, "Y": Y.card}, {"p": p, "f1": f1, "f2": stoch.Kernel((X, X), (Y,), rows)})
    c1, c2 = (TracePartition(prog.diagrams[k], 1) for k in ("c1", "c2"))
    assert check_contraction_identity(c1, c2, m).status == "holds"
