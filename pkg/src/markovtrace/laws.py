"""Randomized law suite: categorical laws, trace axioms, soundness and comb laws.

Every check returns a residual (max-abs difference, 0.0 for syntactic
equalities that hold and ``inf`` for ones that fail). :func:`run_laws` runs
``cases`` independent cases, each with its own seed spawned from the master
seed, and aggregates a JSON-ready report.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import combs, stoch
from . import diagram as dg
from .contraction import TracePartition, contract, contract_k, is_nonsignalling
from .diagram import Diagram, eliminable_boxes, eliminate_box, normalize
from .hypergraph import Cospan
from .interp import check_trace_soundness, interpret
from .randgen import (
    random_cospan,
    random_deterministic,
    random_diagram,
    random_kernel,
    random_model,
    random_nonsignalling,
    random_nonsignalling_diagram,
    random_objects,
    random_signature,
    random_types,
)
from .stoch import causal_trace, identity, seq, tensor

TOLERANCES = {
    "trace": 1e-8,
    "oracle": 1e-9,
    "well_defined": 1e-12,
    "soundness": 1e-8,
    "comb_roundtrip": 1e-9,
    "comb_context": 1e-8,
    "recomposition": 1e-9,
}


def _syntactic(ok: bool) -> float:
    return 0.0 if ok else math.inf


# -- semantic (FinStoch) trace axioms --------------------------------------------

def _objs(rng, lo=0, hi=2, prefix="X"):
    return random_objects(rng, int(rng.integers(lo, hi + 1)), prefix=prefix)


def trace_axioms(rng: np.random.Generator) -> dict[str, float]:
    """The six causal-trace axioms on one random instance each."""
    out = {}
    X, Y, W = _objs(rng, 0, 2, "X"), _objs(rng, 0, 2, "Y"), _objs(rng, 1, 2, "W")
    kW = len(W)
    f = random_nonsignalling(rng, X, W, Y, W)

    Xp, Yp = _objs(rng, 0, 2, "A"), _objs(rng, 0, 2, "B")
    g, h = random_kernel(rng, Xp, X), random_kernel(rng, Y, Yp)
    lhs = causal_trace(seq(tensor(g, identity(W)), f, tensor(h, identity(W))), kW)
    out["tightening"] = stoch.max_abs_diff(lhs, seq(g, causal_trace(f, kW), h))

    Wp = _objs(rng, 1, 2, "V")
    f2 = random_nonsignalling(rng, X, Wp, Y, W)
    g2 = random_kernel(rng, W, Wp)
    left = seq(f2, tensor(identity(Y), g2))  # X ⊗ W' -> Y ⊗ W'
    right = seq(tensor(identity(X), g2), f2)  # X ⊗ W -> Y ⊗ W
    if stoch.is_nonsignalling_sem(left, len(Wp)) is None or stoch.is_nonsignalling_sem(right, kW) is None:
        out["sliding"] = math.inf
    else:
        out["sliding"] = stoch.max_abs_diff(causal_trace(left, len(Wp)), causal_trace(right, kW))

    plain = random_kernel(rng, X, Y)
    out["vanishing"] = stoch.max_abs_diff(causal_trace(plain, 0), plain)

    U, V = _objs(rng, 1, 1, "U"), _objs(rng, 1, 1, "V")
    f3 = random_nonsignalling(rng, X, U + V, Y, U + V)
    out["associativity"] = stoch.max_abs_diff(
        causal_trace(f3, 2), causal_trace(causal_trace(f3, 1), 1)
    )

    g4 = random_kernel(rng, Xp, Yp)
    out["superposition"] = stoch.max_abs_diff(
        causal_trace(tensor(g4, f), kW), tensor(g4, causal_trace(f, kW))
    )

    out["yanking"] = stoch.max_abs_diff(causal_trace(stoch.swap(W, W), kW), identity(W))
    return out


def backend_checks(rng: np.random.Generator) -> dict[str, float]:
    """Diagonal-sum oracle, normalization, well-definedness, atomicity, recompositions."""
    out = {}
    X, Y, W = _objs(rng, 0, 2, "X"), _objs(rng, 0, 2, "Y"), _objs(rng, 1, 2, "W")
    k = len(W)
    f = random_nonsignalling(rng, X, W, Y, W, zero_prob=0.5)
    tr = causal_trace(f, k)
    out["diagonal_oracle"] = stoch.max_abs_diff(tr, stoch.mat_trace(f, k))
    out["trace_normalized"] = float(np.max(np.abs(tr.array.sum(axis=1) - 1.0), initial=0.0))

    f_s = stoch.is_nonsignalling_sem(f, k)
    d = stoch.disintegrate(f, f_s, k)
    out["disintegration_recomposition"] = stoch.max_abs_diff(d.recompose(), f)
    out["well_definedness"] = stoch.max_abs_diff(
        stoch.trace_from_disintegration(perturb_null_cells(rng, d)), stoch.trace_from_disintegration(d)
    )

    p = random_kernel(rng, _objs(rng, 0, 2, "A"), _objs(rng, 1, 2, "P"), zero_prob=0.4)
    out["atomic"] = _syntactic(stoch.is_atomic(p))
    out["atomic_deterministic"] = _syntactic(stoch.is_atomic(random_deterministic(rng, p.dom, p.cod)))

    A, Xs, Ys = _objs(rng, 0, 2, "A"), _objs(rng, 1, 2, "X"), _objs(rng, 1, 2, "Y")
    j = random_kernel(rng, A, Xs + Ys, zero_prob=0.4)
    out["conditional"] = stoch.conditional_residual(j, len(Xs), stoch.conditional(j, len(Xs)))
    pr, lk = random_kernel(rng, A, Xs, zero_prob=0.4), random_kernel(rng, Xs, Ys, zero_prob=0.4)
    out["bayes"] = stoch.bayes_residual(lk, pr, stoch.bayes_inverse(lk, pr))
    return out


def perturb_null_cells(rng: np.random.Generator, d: stoch.Disintegration, tol=stoch.DEFAULT_TOL) -> stoch.Disintegration:
    """Another valid disintegration: f_p redrawn at random wherever f_s(w|x) is null."""
    X, W, Wp = d.X, d.W, d.W_prime
    nW, nX, nWp = stoch.size(W), stoch.size(X), stoch.size(Wp)
    fp = d.f_p.array.reshape(nW, nX, nWp, -1).copy()
    null = d.f_s.array.T <= tol.null  # (w, x)
    noise = rng.gamma(1.0, size=fp.shape) + 1e-3
    noise /= noise.sum(axis=-1, keepdims=True)
    fp[null] = noise[null]
    return stoch.Disintegration(d.f_s, stoch.Kernel(d.f_p.dom, d.f_p.cod, fp.reshape(nW * nX * nWp, -1)))


# -- combs -------------------------------------------------------------------------

def random_comb(rng: np.random.Generator) -> combs.Comb:
    A, Ap, B, Bp = (_objs(rng, 0, 1, n) for n in ("A", "A'", "B", "B'"))
    E = _objs(rng, 0, 2, "E")
    return combs.Comb(E, random_kernel(rng, A, E + B), random_kernel(rng, E + Bp, Ap))


def comb_checks(rng: np.random.Generator, contexts: int = 5) -> dict[str, float]:
    out = {}
    A, Ap, B, Bp = (_objs(rng, 0, 1, n) for n in ("A", "A'", "B", "B'"))
    if not B:
        B = random_objects(rng, 1, prefix="B")
    f = random_nonsignalling(rng, A, Bp, Ap, B)
    c = combs.comb_from_nonsignalling(f, len(Bp), len(B))
    out["comb_roundtrip"] = stoch.max_abs_diff(combs.extension(c), f)

    # a second comb with the same extension: a different disintegration
    f_s = stoch.is_nonsignalling_sem(f, len(Bp), len(B))
    d = perturb_null_cells(rng, stoch.disintegrate(f, f_s, len(Bp), len(B)))
    c2 = combs.comb_from_disintegration(d)
    worst = stoch.max_abs_diff(combs.extension(c2), f)
    for _ in range(contexts):
        h = combs.random_context(rng, c.B, c.B_prime)
        worst = max(worst, stoch.max_abs_diff(combs.insert(c, h), combs.insert(c2, h)))
    out["comb_context"] = worst

    base = random_comb(rng)
    E2 = _objs(rng, 0, 2, "F")
    s = random_kernel(rng, base.env, E2)
    g = random_kernel(rng, E2 + base.B_prime, base.A_prime)
    left, right = combs.slide(base.f, s, g)
    out["sliding_optic"] = _syntactic(combs.ext_equiv(left, right, stoch.Tolerances(eq=TOLERANCES["comb_context"])))
    return out


# -- free Markov category ------------------------------------------------------------

def elimination_results(c: Cospan) -> set[bytes]:
    """Canonical forms reached by every order of single-box eliminations."""
    out: set[bytes] = set()

    def go(c: Cospan):
        boxes = eliminable_boxes(c)
        if not boxes:
            out.add(Diagram(c).canonical_bytes)
            return
        for i in boxes:
            go(eliminate_box(c, i))

    go(c)
    return out


def free_laws(rng: np.random.Generator, max_boxes: int = 5, max_wires: int = 8) -> dict[str, float]:
    sig = random_signature(rng)
    out: dict[str, float] = {}

    def rd(dom, cod=None, n_out=None):
        return random_diagram(rng, sig, dom, int(rng.integers(0, max_boxes + 1)), cod, n_out, max_wires)

    def ty(lo=0, hi=2):
        return random_types(rng, sig, int(rng.integers(lo, hi + 1)))

    f = rd(ty())
    g = rd(f.cod, n_out=int(rng.integers(0, 3)))
    h = rd(g.cod, n_out=int(rng.integers(0, 3)))
    out["unit"] = _syntactic(f >> dg.identity(f.cod) == f == dg.identity(f.dom) >> f)
    out["associativity"] = _syntactic((f >> g) >> h == f >> (g >> h))

    k = rd(ty())
    out["tensor_unit"] = _syntactic(f @ dg.identity(()) == f == dg.identity(()) @ f)
    out["tensor_associativity"] = _syntactic((f @ g) @ k == f @ (g @ k))
    f2 = rd(k.cod, n_out=int(rng.integers(0, 3)))
    out["interchange"] = _syntactic((f @ k) >> (g @ f2) == (f >> g) @ (k >> f2))
    out["swap_involution"] = _syntactic(dg.swap(f.dom, k.dom) >> dg.swap(k.dom, f.dom) == dg.identity(f.dom + k.dom))
    out["swap_naturality"] = _syntactic((f @ k) >> dg.swap(f.cod, k.cod) == dg.swap(f.dom, k.dom) >> (k @ f))

    t = ty(1, 2)
    cp = dg.copy(t)
    out["copy_coassociative"] = _syntactic(cp >> (cp @ dg.identity(t)) == cp >> (dg.identity(t) @ cp))
    out["copy_counit"] = _syntactic(cp >> (dg.delete(t) @ dg.identity(t)) == dg.identity(t) == cp >> (dg.identity(t) @ dg.delete(t)))
    out["copy_commutative"] = _syntactic(cp >> dg.swap(t, t) == cp)
    out["discardable"] = _syntactic(f >> dg.delete(f.cod) == dg.delete(f.dom))

    # normalization confluence on raw cospans with <= 4 boxes
    raw = random_cospan(rng, sig, ty(), int(rng.integers(0, 5)), n_out=int(rng.integers(0, 3)))
    results = elimination_results(raw)
    out["normalization_confluence"] = _syntactic(results == {normalize(raw).canonical_bytes})

    out.update(free_trace_axioms(rng, sig, max_boxes, max_wires))
    return out


def free_trace_axioms(rng: np.random.Generator, sig, max_boxes: int = 5, max_wires: int = 8) -> dict[str, float]:
    out: dict[str, float] = {}

    def ty(lo=0, hi=2):
        return random_types(rng, sig, int(rng.integers(lo, hi + 1)))

    def nb():
        return int(rng.integers(0, max_boxes + 1))

    m, w = ty(0, 2), ty(1, 2)
    f = random_nonsignalling_diagram(rng, sig, m, w, w, nb(), n_out=int(rng.integers(0, 3)), max_wires=max_wires)
    f = _as_partition(f, len(w))
    n = f.diagram.cod[: f.n]
    dom_m = f.diagram.dom[: f.m]
    g = random_diagram(rng, sig, ty(), nb(), cod=dom_m, max_wires=max_wires) if dom_m or rng.random() < 0.5 else dg.identity(())
    h = random_diagram(rng, sig, n, nb(), n_out=int(rng.integers(0, 3)), max_wires=max_wires)
    wid = dg.identity(w)
    tight = TracePartition((g @ wid) >> f.diagram >> (h @ wid), len(w))
    out["free_tightening"] = _syntactic(
        is_nonsignalling(tight) and contract(tight) == g >> contract(f) >> h
    )

    wp = ty(1, 2)
    f2 = random_nonsignalling_diagram(rng, sig, m, wp, w, nb(), max_wires=max_wires)
    # f2 : m ⊗ w' -> n ⊗ w with no path w' -> w
    n2 = f2.cod[: len(f2.cod) - len(w)]
    gw = random_diagram(rng, sig, w, nb(), cod=wp, max_wires=max_wires)
    left = TracePartition(f2 >> (dg.identity(n2) @ gw), len(wp))
    right = TracePartition((dg.identity(m) @ gw) >> f2, len(w))
    out["free_sliding"] = _syntactic(
        is_nonsignalling(left) and is_nonsignalling(right) and contract(left) == contract(right)
    )

    out["free_vanishing"] = _syntactic(contract_k(f.diagram, 0) == f.diagram)

    u, v = ty(1, 1), ty(1, 2)
    f3 = random_nonsignalling_diagram(rng, sig, m, u + v, u + v, nb(), max_wires=max_wires)
    ku, kv = len(u), len(v)
    out["free_associativity"] = _syntactic(contract_k(f3, ku + kv) == contract_k(contract_k(f3, kv), ku))
    out["free_associativity_stepwise"] = _syntactic(
        contract_k(f3, ku + kv) == contract_k(contract_k(f3, 1), ku + kv - 1)
    )

    g4 = random_diagram(rng, sig, ty(), nb(), n_out=int(rng.integers(0, 3)), max_wires=max_wires)
    out["free_superposition"] = _syntactic(contract_k(g4 @ f.diagram, len(w)) == g4 @ contract(f))

    out["free_yanking"] = _syntactic(contract_k(dg.swap(w, w), len(w)) == dg.identity(w))
    return out


def _as_partition(d: Diagram, k: int) -> TracePartition:
    return TracePartition(d, k)


def soundness_case(rng: np.random.Generator, max_boxes: int = 5, max_wires: int = 8) -> dict[str, float]:
    """⟦contr_w(f)⟧ against the causal trace of ⟦f⟧ on a random diagram and model."""
    sig = random_signature(rng)
    model = random_model(rng, sig)
    m = random_types(rng, sig, int(rng.integers(0, 3)))
    w = random_types(rng, sig, int(rng.integers(1, 3)))
    d = random_nonsignalling_diagram(rng, sig, m, w, w, int(rng.integers(0, max_boxes + 1)),
                                     n_out=int(rng.integers(0, 3)), max_wires=max_wires)
    v = check_trace_soundness(TracePartition(d, len(w)), model)
    out = {"trace_soundness": v.residual}
    k = interpret(d, model)
    out["interpret_stochastic"] = float(np.max(np.abs(k.array.sum(axis=1) - 1.0), initial=0.0))
    return out


def functoriality_case(rng: np.random.Generator) -> dict[str, float]:
    sig = random_signature(rng)
    model = random_model(rng, sig)
    f = random_diagram(rng, sig, random_types(rng, sig, 2), int(rng.integers(0, 4)), n_out=2)
    g = random_diagram(rng, sig, f.cod, int(rng.integers(0, 4)), n_out=2)
    k = random_diagram(rng, sig, random_types(rng, sig, 1), int(rng.integers(0, 3)), n_out=1)
    I = lambda d: interpret(d, model)
    return {
        "functor_compose": stoch.max_abs_diff(I(f >> g), seq(I(f), I(g))),
        "functor_tensor": stoch.max_abs_diff(I(f @ k), tensor(I(f), I(k))),
    }


# -- driver ------------------------------------------------------------------------------

SUITES: dict[str, Callable[[np.random.Generator], dict[str, float]]] = {
    "trace_axioms": trace_axioms,
    "backend": backend_checks,
    "combs": comb_checks,
    "free": free_laws,
    "soundness": soundness_case,
    "functoriality": functoriality_case,
}

LAW_TOLERANCE = {
    "tightening": 1e-8, "sliding": 1e-8, "vanishing": 1e-8, "associativity": 1e-8,
    "superposition": 1e-8, "yanking": 1e-8,
    "diagonal_oracle": 1e-9, "trace_normalized": 1e-9, "disintegration_recomposition": 1e-9,
    "well_definedness": 1e-12, "conditional": 1e-9, "bayes": 1e-9,
    "comb_roundtrip": 1e-9, "comb_context": 1e-8,
    "trace_soundness": 1e-8, "interpret_stochastic": 1e-9,
    "functor_compose": 1e-9, "functor_tensor": 1e-9,
}


@dataclass
class LawStats:
    cases: int = 0
    failures: int = 0
    max_residual: float = 0.0
    failing_seeds: list = field(default_factory=list)


def run_case(seed_seq: np.random.SeedSequence, suites=None) -> dict[str, dict[str, float]]:
    out = {}
    for name in suites or SUITES:
        rng = np.random.default_rng(seed_seq.spawn(1)[0])
        out[name] = SUITES[name](rng)
    return out


def run_laws(seed: int, cases: int, suites=None, jobs: int = 1) -> dict:
    """Run ``cases`` random cases of every suite; returns a JSON-ready report."""
    children = np.random.SeedSequence(seed).spawn(cases)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(run_case, children, [suites] * cases))
    else:
        results = [run_case(s, suites) for s in children]
    stats: dict[str, LawStats] = defaultdict(LawStats)
    for i, res in enumerate(results):
        for suite, laws in res.items():
            for law, r in laws.items():
                s = stats[f"{suite}.{law}"]
                s.cases += 1
                s.max_residual = max(s.max_residual, r)
                if not r <= LAW_TOLERANCE.get(law, 0.0):
                    s.failures += 1
                    s.failing_seeds.append(i)
    laws = {
        k: {
            "cases": v.cases,
            "failures": v.failures,
            "max_residual": v.max_residual if math.isfinite(v.max_residual) else "inf",
            "failing_cases": v.failing_seeds[:10],
        }
        for k, v in sorted(stats.items())
    }
    return {
        "seed": seed,
        "cases": cases,
        "violations": sum(v.failures for v in stats.values()),
        "laws": laws,
    }
