"""Labelled finite hypergraphs and the colimits used to glue them.

Wires and boxes are numbered ``0..n-1``; the numbering carries no meaning and
every operation here is free to renumber. Isomorphism-invariant comparison
lives in :mod:`markovtrace.diagram`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import LabelClash, SignatureMismatch, UnknownName


@dataclass(frozen=True)
class BoxSpec:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class Signature:
    """Monoidal signature: type names plus typed box generators."""

    types: tuple[str, ...] = ()
    boxes: tuple[BoxSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "boxes", tuple(self.boxes))
        if len(set(self.types)) != len(self.types):
            raise ValueError(f"duplicate type names in {self.types}")
        names = [b.name for b in self.boxes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate box names in {names}")
        declared = set(self.types)
        for b in self.boxes:
            for t in b.inputs + b.outputs:
                if t not in declared:
                    raise UnknownName(f"box {b.name!r} uses undeclared type {t!r}")

    @classmethod
    def build(cls, types: Iterable[str], boxes: dict[str, tuple[Sequence[str], Sequence[str]]]):
        return cls(
            tuple(types),
            tuple(BoxSpec(n, tuple(i), tuple(o)) for n, (i, o) in boxes.items()),
        )

    def box(self, name: str) -> BoxSpec:
        for b in self.boxes:
            if b.name == name:
                return b
        raise UnknownName(f"unknown box {name!r}")

    def has_box(self, name: str) -> bool:
        return any(b.name == name for b in self.boxes)

    def check_type(self, t: str) -> str:
        if t not in self.types:
            raise UnknownName(f"unknown type {t!r}")
        return t

    def extend(self, types: Iterable[str] = (), boxes: Iterable[BoxSpec] = ()) -> "Signature":
        return Signature(self.types + tuple(types), self.boxes + tuple(boxes))


@dataclass(frozen=True)
class Box:
    label: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    @property
    def arity(self) -> tuple[int, int]:
        return len(self.inputs), len(self.outputs)


@dataclass(frozen=True)
class Hypergraph:
    """A finite hypergraph labelled over a signature.

    ``wire_labels[w]`` is the type of wire ``w``; each box lists its input and
    output wires in port order.
    """

    wire_labels: tuple[str, ...] = ()
    boxes: tuple[Box, ...] = ()
    signature: Signature | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.wire_labels)
        for i, b in enumerate(self.boxes):
            for w in b.inputs + b.outputs:
                if not 0 <= w < n:
                    raise ValueError(f"box {i} references missing wire {w}")
        if self.signature is not None:
            self.check_labelling(self.signature)

    @property
    def n_wires(self) -> int:
        return len(self.wire_labels)

    @property
    def n_boxes(self) -> int:
        return len(self.boxes)

    def check_labelling(self, sig: Signature) -> None:
        """Raise unless the labelling is a homomorphism into ``sig``."""
        for t in self.wire_labels:
            sig.check_type(t)
        for i, b in enumerate(self.boxes):
            spec = sig.box(b.label)
            ins = tuple(self.wire_labels[w] for w in b.inputs)
            outs = tuple(self.wire_labels[w] for w in b.outputs)
            if ins != spec.inputs or outs != spec.outputs:
                raise SignatureMismatch(
                    f"box {i} labelled {b.label!r} has ports {ins} -> {outs}, "
                    f"signature says {spec.inputs} -> {spec.outputs}"
                )

    def consumers(self) -> list[list[tuple[int, int]]]:
        """For each wire, the (box, port) pairs that read it."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.wire_labels]
        for i, b in enumerate(self.boxes):
            for p, w in enumerate(b.inputs):
                out[w].append((i, p))
        return out

    def producers(self) -> list[list[tuple[int, int]]]:
        """For each wire, the (box, port) pairs that write it."""
        out: list[list[tuple[int, int]]] = [[] for _ in self.wire_labels]
        for i, b in enumerate(self.boxes):
            for p, w in enumerate(b.outputs):
                out[w].append((i, p))
        return out


@dataclass(frozen=True)
class Morphism:
    """Hypergraph homomorphism given by its wire and box maps."""

    wires: tuple[int, ...]
    boxes: tuple[int, ...] = ()

    def __call__(self, w: int) -> int:
        return self.wires[w]


@dataclass(frozen=True)
class Cospan:
    apex: Hypergraph
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(self.left))
        object.__setattr__(self, "right", tuple(self.right))
        for w in self.left + self.right:
            if not 0 <= w < self.apex.n_wires:
                raise ValueError(f"boundary references missing wire {w}")

    @property
    def dom(self) -> tuple[str, ...]:
        return tuple(self.apex.wire_labels[w] for w in self.left)

    @property
    def cod(self) -> tuple[str, ...]:
        return tuple(self.apex.wire_labels[w] for w in self.right)


def _merge_signatures(a: Hypergraph, b: Hypergraph) -> Signature | None:
    if a.signature is None:
        return b.signature
    if b.signature is not None and a.signature != b.signature:
        raise SignatureMismatch("hypergraphs are labelled over different signatures")
    return a.signature


def coproduct(a: Hypergraph, b: Hypergraph) -> tuple[Hypergraph, Morphism, Morphism]:
    """Disjoint union, returning the graph and both injections."""
    sig = _merge_signatures(a, b)
    off = a.n_wires
    shifted = tuple(
        Box(x.label, tuple(w + off for w in x.inputs), tuple(w + off for w in x.outputs))
        for x in b.boxes
    )
    g = Hypergraph(a.wire_labels + b.wire_labels, a.boxes + shifted, sig)
    inj_a = Morphism(tuple(range(a.n_wires)), tuple(range(a.n_boxes)))
    inj_b = Morphism(
        tuple(range(off, off + b.n_wires)), tuple(range(a.n_boxes, a.n_boxes + b.n_boxes))
    )
    return g, inj_a, inj_b


def wire_classes(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    """Union-find over ``range(n)``; classes are renumbered by least member."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    fresh: dict[int, int] = {}
    return tuple(fresh.setdefault(find(w), len(fresh)) for w in range(n))


def quotient_wires(
    g: Hypergraph, pairs: Iterable[tuple[int, int]]
) -> tuple[Hypergraph, Morphism]:
    """Identify wires pairwise and return the quotient with its class map."""
    pairs = list(pairs)
    for u, v in pairs:
        if g.wire_labels[u] != g.wire_labels[v]:
            raise LabelClash(u, v, (g.wire_labels[u], g.wire_labels[v]))
    cls = wire_classes(g.n_wires, pairs)
    n = max(cls, default=-1) + 1
    labels = [""] * n
    for w, c in enumerate(cls):
        labels[c] = g.wire_labels[w]
    boxes = tuple(
        Box(b.label, tuple(cls[w] for w in b.inputs), tuple(cls[w] for w in b.outputs))
        for b in g.boxes
    )
    return Hypergraph(tuple(labels), boxes, g.signature), Morphism(cls, tuple(range(g.n_boxes)))


def pushout(
    a: Hypergraph, b: Hypergraph, a_legs: Sequence[int], b_legs: Sequence[int]
) -> tuple[Hypergraph, Morphism, Morphism]:
    """Pushout of ``a <- C -> b`` for a discrete ``C``.

    ``a_legs[i]`` and ``b_legs[i]`` are the images of the i-th wire of ``C``.
    Returns the glued graph and the two cocone maps.
    """
    if len(a_legs) != len(b_legs):
        raise ValueError("span legs must have the same length")
    g, ia, ib = coproduct(a, b)
    q, cls = quotient_wires(g, [(ia(x), ib(y)) for x, y in zip(a_legs, b_legs)])
    into_a = Morphism(tuple(cls(ia(w)) for w in range(a.n_wires)), ia.boxes)
    into_b = Morphism(tuple(cls(ib(w)) for w in range(b.n_wires)), ib.boxes)
    return q, into_a, into_b


def restrict(g: Hypergraph, keep_boxes: Iterable[int], drop_wires: Iterable[int] = ()) -> tuple[Hypergraph, dict[int, int]]:
    """Subgraph on the given boxes with ``drop_wires`` removed.

    Returns the graph and the old->new wire map. Dropped wires must not be
    referenced by any kept box.
    """
    keep_boxes = sorted(set(keep_boxes))
    drop = set(drop_wires)
    wmap: dict[int, int] = {}
    labels = []
    for w, t in enumerate(g.wire_labels):
        if w not in drop:
            wmap[w] = len(labels)
            labels.append(t)
    boxes = []
    for i in keep_boxes:
        b = g.boxes[i]
        boxes.append(Box(b.label, tuple(wmap[w] for w in b.inputs), tuple(wmap[w] for w in b.outputs)))
    return Hypergraph(tuple(labels), tuple(boxes), g.signature), wmap


def relabel(g: Hypergraph, wire_perm: Sequence[int], box_perm: Sequence[int]) -> Hypergraph:
    """Renumber wires (``old -> wire_perm[old]``) and reorder boxes."""
    n = g.n_wires
    labels = [""] * n
    for old, new in enumerate(wire_perm):
        labels[new] = g.wire_labels[old]
    boxes: list[Box | None] = [None] * g.n_boxes
    for old, new in enumerate(box_perm):
        b = g.boxes[old]
        boxes[new] = Box(b.label, tuple(wire_perm[w] for w in b.inputs), tuple(wire_perm[w] for w in b.outputs))
    return Hypergraph(tuple(labels), tuple(boxes), g.signature)  # type: ignore[arg-type]
