import numpy as np
import pytest
from hypothesis import given

from markovtrace import diagram as dg
from markovtrace.contraction import (
    TracePartition,
    contract,
    contract_k,
    is_nonsignalling,
    reachable_wires,
    signalling_between,
)
from markovtrace.dsl import parse
from markovtrace.errors import BoundaryMismatch, SignallingInput
from markovtrace.laws import free_trace_axioms
from markovtrace.randgen import random_diagram, random_nonsignalling_diagram, random_signature, random_types

from conftest import seeds
from helpers import path_exists
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"


def test_identity_on_w_is_signalling():
    t = TracePartition(dg.identity(("X",)), 1)
    assert not is_nonsignalling(t)
    with pytest.raises(SignallingInput):
        contract(t)


def test_swap_contracts_to_identity():
    for w in [("X",), ("X", "Y"), ("X", "X", "Y")]:
        assert contract_k(dg.swap(w, w), len(w)) == dg.identity(w)


def test_empty_feedback_is_identity_operation():
    prog = parse("type X; box f : X -> X * X; diag d = f ; swap(X, X)")
    d = prog.diagrams["d"]
    assert contract_k(d, 0) == d


def test_feedback_type_mismatch():
    with pytest.raises(BoundaryMismatch):
        TracePartition(dg.swap(("X",), ("Y",)), 1)
    with pytest.raises(BoundaryMismatch):
        TracePartition(dg.identity(("X",)), 2)


def test_feedback_context_contracts_to_expected():
    prog = parse((DATA / "feedback_context.diag").read_text())
    out = contract_k(prog.diagrams["ctx"], 1)
    assert out == prog.diagrams["expected"]
    assert out.graph.n_boxes == 2 and out.graph.n_wires == 3


def test_contraction_triggers_normalization():
    # the fed-back W only reaches a delete once glued, so b becomes eliminable
    prog = parse("type X, W; box h : X -> X; box b : X -> W;"
                 "diag d = (copy_X ; (h * b)) * del_W")
    out = contract_k(prog.diagrams["d"], 1)
    assert [bx.label for bx in out.graph.boxes] == ["h"]


def test_contraction_identity_shape_contracts_to_diagonal():
    prog = parse((DATA / "contraction_identity.diag").read_text())
    got = contract_k(prog.diagrams["c1"], 1)
    want = parse("type X, Y; box p : I -> X; box f1 : X * X -> Y; diag e = p ; copy_X ; f1").diagrams["e"]
    assert got == want


@given(seeds)
def test_reachability_matches_brute_force_paths(seed):
    rng = np.random.default_rng(seed)
    sig = random_signature(rng)
    d = random_diagram(rng, sig, random_types(rng, sig, 3), int(rng.integers(0, 6)), n_out=3)
    for k in range(0, 3):
        c = d.cospan
        src = c.left[len(c.left) - k:] if k else ()
        dst = c.right[len(c.right) - k:] if k else ()
        assert signalling_between(d, k, k) == path_exists(c, src, dst)
        if d.dom[len(d.dom) - k:] == d.cod[len(d.cod) - k:]:
            assert is_nonsignalling(TracePartition(d, k)) == (not path_exists(c, src, dst))
    assert reachable_wires(d.cospan, ()) == set()


@given(seeds)
def test_generated_nonsignalling_diagrams_contract(seed):
    rng = np.random.default_rng(seed)
    sig = random_signature(rng)
    w = random_types(rng, sig, int(rng.integers(1, 3)))
    d = random_nonsignalling_diagram(rng, sig, random_types(rng, sig, 1), w, w, int(rng.integers(0, 6)))
    t = TracePartition(d, len(w))
    assert is_nonsignalling(t)
    out = contract(t)
    assert out.dom == d.dom[: t.m] and out.cod == d.cod[: t.n]


@given(seeds)
def test_free_contraction_axioms(seed):
    rng = np.random.default_rng(seed)
    res = free_trace_axioms(rng, random_signature(rng))
    assert all(v == 0.0 for v in res.values()), res
