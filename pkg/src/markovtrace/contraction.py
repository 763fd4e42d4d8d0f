"""Structural non-signalling and hypergraph contraction (the free causal trace)."""
from __future__ import annotations

from dataclasses import dataclass

from .diagram import Diagram, normalize, validate
from .errors import BoundaryMismatch, SignallingInput
from .hypergraph import Cospan, quotient_wires


@dataclass(frozen=True)
class TracePartition:
    """A diagram ``m ⊗ w -> n ⊗ w`` with the last ``k`` ports on each side as ``w``."""

    diagram: Diagram
    k: int

    def __post_init__(self):
        d = self.diagram
        if self.k < 0 or self.k > len(d.dom) or self.k > len(d.cod):
            raise BoundaryMismatch(f"cannot split {len(d.dom)} -> {len(d.cod)} ports with k={self.k}")
        if self.w_in_types != self.w_out_types:
            raise BoundaryMismatch(
                f"feedback types differ: inputs {self.w_in_types}, outputs {self.w_out_types}"
            )

    @property
    def m(self) -> int:
        return len(self.diagram.dom) - self.k

    @property
    def n(self) -> int:
        return len(self.diagram.cod) - self.k

    @property
    def w_in(self) -> tuple[int, ...]:
        return self.diagram.cospan.left[self.m:]

    @property
    def w_out(self) -> tuple[int, ...]:
        return self.diagram.cospan.right[self.n:]

    @property
    def w_in_types(self) -> tuple[str, ...]:
        return self.diagram.dom[self.m:]

    @property
    def w_out_types(self) -> tuple[str, ...]:
        return self.diagram.cod[self.n:]


def reachable_wires(c: Cospan, start) -> set[int]:
    """Wires reachable from ``start`` along wire -> box -> output-wire steps."""
    g = c.apex
    cons = g.consumers()
    seen = set(start)
    todo = list(seen)
    while todo:
        w = todo.pop()
        for i, _ in cons[w]:
            for v in g.boxes[i].outputs:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    return seen


def is_nonsignalling(t: TracePartition) -> bool:
    """No directed path leads from a feedback input to a feedback output."""
    reach = reachable_wires(t.diagram.cospan, t.w_in)
    return not reach.intersection(t.w_out)


def signalling_between(d: Diagram, k_in: int, k_out: int) -> bool:
    """Structural signalling from the last ``k_in`` inputs to the last ``k_out`` outputs."""
    c = d.cospan
    src = c.left[len(c.left) - k_in:] if k_in else ()
    dst = c.right[len(c.right) - k_out:] if k_out else ()
    return bool(reachable_wires(c, src).intersection(dst))


def contract(t: TracePartition) -> Diagram:
    """Glue the k-th feedback input wire to the k-th feedback output wire, then normalize."""
    if not is_nonsignalling(t):
        raise SignallingInput("feedback outputs depend on feedback inputs")
    c = t.diagram.cospan
    g, cls = quotient_wires(c.apex, zip(t.w_in, t.w_out))
    glued = Cospan(g, tuple(cls(w) for w in c.left[: t.m]), tuple(cls(w) for w in c.right[: t.n]))
    out = normalize(glued)
    # the glued cospan is valid by construction; check anyway
    return validate(out.cospan)


def contract_k(d: Diagram, k: int) -> Diagram:
    return contract(TracePartition(d, k))


def check_contraction_identity(c1: TracePartition, c2: TracePartition, model, tol=None):
    """Evaluate one instance of the contraction identity under ``model``.

    Returns an :class:`~markovtrace.interp.IdentityVerdict`: ``holds``,
    ``vacuous`` (the premises already differ) or ``violation`` with the two
    contracted kernels as witnesses.
    """
    from . import interp

    if tol is None:
        return interp.check_contraction_identity(c1, c2, model)
    return interp.check_contraction_identity(c1, c2, model, tol)
