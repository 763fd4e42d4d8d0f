"""Interpretation of free diagrams as finite stochastic kernels.

A diagram is evaluated as a tensor network in Mat(R+): every box contributes
its kernel as a tensor with one axis per port, wires are shared indices (so a
wire read by several ports behaves as a copy), and indices that appear nowhere
else are summed out (a delete). Pairwise contractions are chosen greedily by
the size of the intermediate result.
"""
from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import stoch
from .contraction import TracePartition, contract, is_nonsignalling
from .diagram import Diagram
from .errors import BoundaryMismatch, EvaluationError, ModelError, NotStochastic, SignallingInput
from .hypergraph import Cospan, Signature
from .stoch import DEFAULT_TOL, FinSet, Kernel, NonnegMatrix, Tolerances


@dataclass(frozen=True)
class Model:
    """Cardinalities for the signature's types and kernels for its boxes."""

    signature: Signature
    cards: Mapping[str, int]
    kernels: Mapping[str, NonnegMatrix] = field(default_factory=dict)

    def __post_init__(self):
        sig = self.signature
        for t in sig.types:
            if t not in self.cards:
                raise ModelError(f"no cardinality for type {t!r}")
            if int(self.cards[t]) < 1:
                raise ModelError(f"type {t!r} needs cardinality >= 1")
        for b in sig.boxes:
            if b.name not in self.kernels:
                raise ModelError(f"no kernel for box {b.name!r}")
            k = self.kernels[b.name]
            if stoch.cards(k.dom) != tuple(self.cards[t] for t in b.inputs) or stoch.cards(
                k.cod
            ) != tuple(self.cards[t] for t in b.outputs):
                raise ModelError(f"kernel for {b.name!r} has the wrong shape for {b.inputs} -> {b.outputs}")

    def objects(self, types) -> tuple[FinSet, ...]:
        try:
            return tuple(FinSet(t, int(self.cards[t])) for t in types)
        except KeyError as e:
            raise ModelError(f"no cardinality for type {e.args[0]!r}") from None

    def kernel(self, name: str) -> NonnegMatrix:
        try:
            return self.kernels[name]
        except KeyError:
            raise ModelError(f"no kernel for box {name!r}") from None

    def to_json(self) -> dict:
        return {
            "types": {t: int(self.cards[t]) for t in self.signature.types},
            "boxes": {b.name: stoch.to_json(self.kernels[b.name]) for b in self.signature.boxes},
        }

    @classmethod
    def from_json(cls, data: dict, signature: Signature) -> "Model":
        """Read ``{"types": {T: card}, "boxes": {name: kernel}}``.

        A box entry may omit ``dom``/``cod``; they are then read off the signature.
        """
        cards = {str(t): int(n) for t, n in data.get("types", {}).items()}
        kernels = {}
        for name, kd in data.get("boxes", {}).items():
            spec = signature.box(name)
            if "dom" not in kd or "cod" not in kd:
                kd = dict(kd)
                mk = lambda ts: [{"name": t, "card": cards[t]} for t in ts]
                kd.setdefault("dom", mk(spec.inputs))
                kd.setdefault("cod", mk(spec.outputs))
            kernels[name] = stoch.from_json(kd)
        return cls(signature, cards, kernels)

    @classmethod
    def load(cls, path, signature: Signature) -> "Model":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh), signature)


# -- tensor network contraction -------------------------------------------------

def _diagonal(arr: np.ndarray, labels: list[int]) -> tuple[np.ndarray, list[int]]:
    uniq = list(dict.fromkeys(labels))
    if len(uniq) == len(labels):
        return arr, labels
    letters = {l: string.ascii_letters[i] for i, l in enumerate(uniq)}
    spec = "".join(letters[l] for l in labels) + "->" + "".join(letters[l] for l in uniq)
    return np.einsum(spec, arr), uniq


def contract_network(
    tensors: list[tuple[np.ndarray, list[int]]], dims: Mapping[int, int], output: list[int]
) -> np.ndarray:
    """Contract a network of labelled tensors down to the ``output`` labels.

    A label shared by several tensors is a hyperedge (all copies agree);
    labels absent from ``output`` are summed once no tensor still needs them.
    """
    work = [_diagonal(a, list(ls)) for a, ls in tensors]
    keep = set(output)

    def reduce(a, ls, others):
        needed = keep.union(*others) if others else set(keep)
        drop = [i for i, l in enumerate(ls) if l not in needed]
        if drop:
            a = a.sum(axis=tuple(drop))
            ls = [l for l in ls if l in needed]
        return a, ls

    while len(work) > 1:
        best = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                li, lj = set(work[i][1]), set(work[j][1])
                others = [set(work[k][1]) for k in range(len(work)) if k not in (i, j)]
                needed = keep.union(*others) if others else keep
                res = [l for l in dict.fromkeys(work[i][1] + work[j][1]) if l in needed]
                cost = int(np.prod([dims[l] for l in res], dtype=np.int64))
                key = (0 if li & lj else 1, cost, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j, res)
        _, i, j, res = best
        (a, la), (b, lb) = work[i], work[j]
        letters = {l: string.ascii_letters[n] for n, l in enumerate(dict.fromkeys(la + lb))}
        spec = (
            "".join(letters[l] for l in la) + "," + "".join(letters[l] for l in lb)
            + "->" + "".join(letters[l] for l in res)
        )
        merged = (np.einsum(spec, a, b), res)
        work = [w for k, w in enumerate(work) if k not in (i, j)] + [merged]
    if not work:
        return np.ones(())
    a, ls = reduce(*work[0], [])
    return np.einsum(a, list(range(len(ls))), [ls.index(l) for l in output]) if output else a


def evaluate(c: Cospan, model: Model) -> NonnegMatrix:
    """Evaluate any cospan (normal or not) in Mat(R+)."""
    g = c.apex
    dims: dict[int, int] = {}
    for w, t in enumerate(g.wire_labels):
        if t not in model.cards:
            raise ModelError(f"no cardinality for type {t!r}")
        dims[w] = int(model.cards[t])
    tensors: list[tuple[np.ndarray, list[int]]] = []
    for b in g.boxes:
        k = model.kernel(b.label)
        if stoch.cards(k.dom) != tuple(dims[w] for w in b.inputs) or stoch.cards(k.cod) != tuple(dims[w] for w in b.outputs):
            raise ModelError(f"kernel for {b.label!r} does not match its ports")
        tensors.append((k.tensor, list(b.inputs) + list(b.outputs)))
    n = g.n_wires
    for w in c.left:
        tensors.append((np.ones(dims[w]), [w]))
    out_labels = []
    for j, w in enumerate(c.right):
        r = n + j
        dims[r] = dims[w]
        tensors.append((np.eye(dims[w]), [w, r]))
        out_labels.append(r)
    output = list(c.left) + out_labels
    arr = contract_network(tensors, dims, output)
    dom, cod = model.objects(c.dom), model.objects(c.cod)
    return NonnegMatrix(dom, cod, np.asarray(arr).reshape(stoch.size(dom), stoch.size(cod)))


def interpret(d: Diagram, model: Model, tol: Tolerances = DEFAULT_TOL) -> Kernel:
    """⟦d⟧ as a kernel; a non-stochastic result means an evaluator bug."""
    m = evaluate(d.cospan, model)
    try:
        return Kernel(m.dom, m.cod, m.array)
    except NotStochastic as e:
        raise EvaluationError(f"evaluation of {d!r} is not stochastic: {e}") from None


# -- soundness checks ---------------------------------------------------------------

@dataclass(frozen=True)
class TraceVerdict:
    holds: bool
    residual: float
    contracted: Kernel
    traced: Kernel

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "residual": self.residual,
            "contracted": stoch.to_json(self.contracted),
            "traced": stoch.to_json(self.traced),
        }


def check_trace_soundness(t: TracePartition, model: Model, tol: Tolerances = DEFAULT_TOL) -> TraceVerdict:
    """Compare ⟦contr_w(f)⟧ with the causal trace of ⟦f⟧."""
    if not is_nonsignalling(t):
        raise SignallingInput("diagram is structurally signalling")
    lhs = interpret(contract(t), model, tol)
    f = interpret(t.diagram, model, tol)
    if stoch.is_nonsignalling_sem(f, t.k, t.k, tol) is None:
        raise EvaluationError("a structurally non-signalling diagram evaluated to a signalling kernel")
    rhs = stoch.causal_trace(f, t.k, tol)
    res = stoch.max_abs_diff(lhs, rhs)
    return TraceVerdict(res <= tol.eq, res, lhs, rhs)


@dataclass(frozen=True)
class IdentityVerdict:
    status: str  # "holds" | "vacuous" | "violation"
    premise_residual: float
    conclusion_residual: float | None = None
    witnesses: tuple[Kernel, Kernel] | None = None


def check_contraction_identity(
    c1: TracePartition, c2: TracePartition, model: Model, tol: Tolerances = DEFAULT_TOL
) -> IdentityVerdict:
    """If ⟦C1⟧ = ⟦C2⟧, test ⟦contr(C1)⟧ = ⟦contr(C2)⟧."""
    d1, d2 = c1.diagram, c2.diagram
    if d1.dom != d2.dom or d1.cod != d2.cod or c1.k != c2.k:
        raise BoundaryMismatch("contraction identity sides must have the same type and feedback")
    prem = stoch.max_abs_diff(interpret(d1, model, tol), interpret(d2, model, tol))
    if prem > tol.eq:
        return IdentityVerdict("vacuous", prem)
    k1, k2 = interpret(contract(c1), model, tol), interpret(contract(c2), model, tol)
    concl = stoch.max_abs_diff(k1, k2)
    if concl <= tol.eq:
        return IdentityVerdict("holds", prem, concl)
    return IdentityVerdict("violation", prem, concl, (k1, k2))
