"""Markov string diagrams: validated cospans of hypergraphs.

A :class:`Diagram` is a morphism of the free Markov category over a
signature. Its apex is acyclic, every wire has exactly one source (an input
boundary port or a box output), and every box is eventually observed by the
output boundary. Two diagrams compare equal when their cospans are isomorphic;
:func:`canonical_form` decides this.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    BoundaryMismatch,
    Cyclic,
    EliminableBox,
    InvalidDiagram,
    NotLeftMonogamous,
)
from .hypergraph import (
    Box,
    Cospan,
    Hypergraph,
    Signature,
    coproduct,
    pushout,
    relabel,
    restrict,
)

CANONICAL_VERSION = 1


@dataclass(frozen=True)
class Violation:
    kind: str  # "cyclic" | "left-monogamy" | "eliminable"
    index: int
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} ({self.detail})"


_EXC = {"cyclic": Cyclic, "left-monogamy": NotLeftMonogamous, "eliminable": EliminableBox}


def box_successors(g: Hypergraph) -> list[set[int]]:
    cons = g.consumers()
    return [{c for w in b.outputs for c, _ in cons[w]} for b in g.boxes]


def topological_boxes(g: Hypergraph) -> list[int] | None:
    """Boxes in dependency order, or ``None`` if the hypergraph has a cycle."""
    succ = box_successors(g)
    indeg = [0] * g.n_boxes
    for s in succ:
        for j in s:
            indeg[j] += 1
    ready = [i for i, d in enumerate(indeg) if d == 0]
    order = []
    while ready:
        i = ready.pop()
        order.append(i)
        for j in sorted(succ[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return order if len(order) == g.n_boxes else None


def eliminable_boxes(c: Cospan) -> list[int]:
    """Boxes none of whose outputs reach the output boundary or another box."""
    g = c.apex
    observed = set(c.right)
    for b in g.boxes:
        observed.update(b.inputs)
    return [i for i, b in enumerate(g.boxes) if not observed.intersection(b.outputs)]


def violations(c: Cospan) -> list[Violation]:
    """Every reason ``c`` fails to be a Markov string diagram."""
    g = c.apex
    found: list[Violation] = []
    if topological_boxes(g) is None:
        found.append(Violation("cyclic", -1, "hypergraph contains a directed cycle"))
    sources = [0] * g.n_wires
    for w in c.left:
        sources[w] += 1
    for b in g.boxes:
        for w in b.outputs:
            sources[w] += 1
    for w, n in enumerate(sources):
        if n != 1:
            found.append(Violation("left-monogamy", w, f"wire {w} has {n} sources"))
    for i in eliminable_boxes(c):
        found.append(Violation("eliminable", i, f"box {i} ({g.boxes[i].label}) is unobserved"))
    return found


def _raise(found: list[Violation]) -> None:
    if found:
        raise _EXC[found[0].kind](found)


def validate(c: Cospan) -> "Diagram":
    _raise(violations(c))
    return Diagram(c)


def eliminate_box(c: Cospan, i: int) -> Cospan:
    """Remove one eliminable box together with its (now sourceless) outputs."""
    g = c.apex
    if i not in eliminable_boxes(c):
        raise ValueError(f"box {i} is not eliminable")
    dead = set(g.boxes[i].outputs)
    h, wmap = restrict(g, (j for j in range(g.n_boxes) if j != i), dead)
    return Cospan(h, tuple(wmap[w] for w in c.left), tuple(wmap[w] for w in c.right))


def normalize(c: Cospan) -> "Diagram":
    """Remove eliminable boxes until none remain.

    One reverse-topological sweep reaches the fixpoint: a box is kept exactly
    when one of its outputs is read by the output boundary or a kept box.
    """
    _raise([v for v in violations(c) if v.kind != "eliminable"])
    g = c.apex
    order = topological_boxes(g)
    assert order is not None
    cons = g.consumers()
    right = set(c.right)
    live = [False] * g.n_boxes
    for i in reversed(order):
        live[i] = any(
            w in right or any(live[j] for j, _ in cons[w]) for w in g.boxes[i].outputs
        )
    if all(live):
        return Diagram(c)
    dead_wires = {w for i, b in enumerate(g.boxes) if not live[i] for w in b.outputs}
    h, wmap = restrict(g, (i for i in range(g.n_boxes) if live[i]), dead_wires)
    return Diagram(Cospan(h, tuple(wmap[w] for w in c.left), tuple(wmap[w] for w in c.right)))


def canonical_numbering(c: Cospan) -> tuple[list[int], list[int]]:
    """Canonical box order and wire order of a valid diagram.

    Boxes are numbered in post-order of a depth-first walk from the output
    ports (inputs visited in port order). In a normal diagram every box is
    reached this way and every wire has a unique source, so the walk involves
    no choices and is invariant under isomorphism.
    """
    g = c.apex
    source: dict[int, int] = {}
    for i, b in enumerate(g.boxes):
        for w in b.outputs:
            source[w] = i
    seen: set[int] = set()
    order: list[int] = []

    def visit(w: int) -> None:
        stack = [(w, False)]
        while stack:
            wire, expanded = stack.pop()
            i = source.get(wire)
            if i is None:
                continue
            if expanded:
                if i not in seen:
                    seen.add(i)
                    order.append(i)
                continue
            if i in seen:
                continue
            stack.append((wire, True))
            for x in reversed(g.boxes[i].inputs):
                stack.append((x, False))

    for w in c.right:
        visit(w)
    if len(order) != g.n_boxes:
        raise InvalidDiagram([Violation("eliminable", -1, "box unreachable from outputs")])
    wires: list[int] = list(c.left)
    for i in order:
        wires.extend(g.boxes[i].outputs)
    return order, wires


@dataclass(frozen=True, eq=False)
class Diagram:
    """Isomorphism class of a Markov string diagram; ``==`` is iso."""

    cospan: Cospan

    def __post_init__(self):
        _raise(violations(self.cospan))

    @property
    def graph(self) -> Hypergraph:
        return self.cospan.apex

    @property
    def dom(self) -> tuple[str, ...]:
        return self.cospan.dom

    @property
    def cod(self) -> tuple[str, ...]:
        return self.cospan.cod

    @property
    def signature(self) -> Signature | None:
        return self.cospan.apex.signature

    @cached_property
    def canonical(self) -> "Diagram":
        """The same diagram with wires and boxes in canonical order."""
        c = self.cospan
        boxes, wires = canonical_numbering(c)
        wperm = [0] * len(wires)
        for new, old in enumerate(wires):
            wperm[old] = new
        bperm = [0] * len(boxes)
        for new, old in enumerate(boxes):
            bperm[old] = new
        g = relabel(c.apex, wperm, bperm)
        return Diagram(Cospan(g, tuple(wperm[w] for w in c.left), tuple(wperm[w] for w in c.right)))

    @cached_property
    def canonical_bytes(self) -> bytes:
        c = self.canonical.cospan
        doc = {
            "v": CANONICAL_VERSION,
            "wires": list(c.apex.wire_labels),
            "left": list(c.left),
            "boxes": [[b.label, list(b.inputs), list(b.outputs)] for b in c.apex.boxes],
            "right": list(c.right),
        }
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode()

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return self.canonical_bytes == other.canonical_bytes

    def __hash__(self):
        return hash(self.canonical_bytes)

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return compose(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return tensor(self, other)

    def __repr__(self):
        return f"Diagram({' * '.join(self.dom) or 'I'} -> {' * '.join(self.cod) or 'I'}, boxes={[b.label for b in self.graph.boxes]})"


def canonical_form(d: Diagram) -> bytes:
    """Byte string equal for two diagrams iff they are isomorphic.

    The format is compact JSON with keys ``v`` (format version), ``wires``
    (wire types in canonical order), ``left``/``right`` (boundary wire ids)
    and ``boxes`` (``[label, inputs, outputs]`` in canonical order). Stable
    across runs; not promised stable across format versions.
    """
    return d.canonical_bytes


def equal(d1: Diagram, d2: Diagram) -> bool:
    return d1.canonical_bytes == d2.canonical_bytes


# -- categorical structure ---------------------------------------------------

def compose(f: Diagram, g: Diagram) -> Diagram:
    """Sequential composite ``f ; g`` (first ``f``, then ``g``)."""
    if f.cod != g.dom:
        raise BoundaryMismatch(f"cannot compose {f.cod} with {g.dom}")
    h, ia, ib = pushout(f.graph, g.graph, f.cospan.right, g.cospan.left)
    c = Cospan(h, tuple(ia(w) for w in f.cospan.left), tuple(ib(w) for w in g.cospan.right))
    return normalize(c)


def tensor(f: Diagram, g: Diagram) -> Diagram:
    h, ia, ib = coproduct(f.graph, g.graph)
    c = Cospan(
        h,
        tuple(ia(w) for w in f.cospan.left) + tuple(ib(w) for w in g.cospan.left),
        tuple(ia(w) for w in f.cospan.right) + tuple(ib(w) for w in g.cospan.right),
    )
    return Diagram(c)


def seq(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = compose(out, d)
    return out


def par(*ds: Diagram, signature: Signature | None = None) -> Diagram:
    out = identity((), signature)
    for d in ds:
        out = tensor(out, d)
    return out


def _check_types(types: Sequence[str], signature: Signature | None) -> tuple[str, ...]:
    if signature is not None:
        for t in types:
            signature.check_type(t)
    return tuple(types)


def wiring(
    types: Sequence[str], outputs: Sequence[int], signature: Signature | None = None
) -> Diagram:
    """Box-free diagram sending input position ``outputs[j]`` to output ``j``.

    Covers identities, swaps, copies and deletes: a wire listed twice is
    copied, a wire never listed is deleted.
    """
    types = _check_types(types, signature)
    g = Hypergraph(types, (), signature)
    return Diagram(Cospan(g, tuple(range(len(types))), tuple(outputs)))


def identity(types: Sequence[str], signature: Signature | None = None) -> Diagram:
    return wiring(types, range(len(types)), signature)


def swap(a: Sequence[str], b: Sequence[str], signature: Signature | None = None) -> Diagram:
    a, b = tuple(a), tuple(b)
    n, m = len(a), len(b)
    return wiring(a + b, list(range(n, n + m)) + list(range(n)), signature)


def copy(types: Sequence[str] | str, signature: Signature | None = None) -> Diagram:
    types = (types,) if isinstance(types, str) else tuple(types)
    n = len(types)
    return wiring(types, list(range(n)) * 2, signature)


def delete(types: Sequence[str] | str, signature: Signature | None = None) -> Diagram:
    types = (types,) if isinstance(types, str) else tuple(types)
    return wiring(types, [], signature)


def box(signature: Signature, name: str) -> Diagram:
    spec = signature.box(name)
    m, n = len(spec.inputs), len(spec.outputs)
    g = Hypergraph(
        spec.inputs + spec.outputs,
        (Box(name, tuple(range(m)), tuple(range(m, m + n))),),
        signature,
    )
    return normalize(Cospan(g, tuple(range(m)), tuple(range(m, m + n))))


def permutation(types: Sequence[str], perm: Iterable[int], signature: Signature | None = None) -> Diagram:
    """Output ``j`` is input ``perm[j]``."""
    perm = list(perm)
    if sorted(perm) != list(range(len(types))):
        raise ValueError(f"{perm} is not a permutation")
    return wiring(types, perm, signature)
