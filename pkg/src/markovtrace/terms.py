"""Term syntax for diagrams: AST, elaboration, printing, and read-back.

Concrete syntax (shared with the DSL)::

    id(X, Y)   id_X   id()            identities
    swap(X, Y)                        symmetry
    copy(X)    copy_X                 copy
    del(X)     del_X                  delete
    f                                 a box, or a previously defined diagram
    s ; t                             sequential composition
    s * t      s ⊗ t                  tensor
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from . import diagram as dg
from .diagram import Diagram
from .errors import DSLError, MarkovTraceError
from .hypergraph import Signature

Loc = tuple[int, int]


@dataclass(frozen=True)
class Id:
    types: tuple[str, ...]
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Swap:
    left: str
    right: str
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Copy:
    type: str
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Del:
    type: str
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Ref:
    name: str
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Seq:
    parts: tuple["Term", ...]
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Par:
    parts: tuple["Term", ...]
    loc: Loc = field(default=(0, 0), compare=False)


Term = Union[Id, Swap, Copy, Del, Ref, Seq, Par]


def build_from_term(
    term: Term, signature: Signature, env: Mapping[str, Diagram] | None = None
) -> Diagram:
    """Elaborate a term into a normalized diagram.

    Type errors are reported as :class:`DSLError` carrying the location of
    the offending subterm.
    """
    env = env or {}

    def fail(t: Term, msg: str):
        raise DSLError(msg, *t.loc)

    def go(t: Term) -> Diagram:
        try:
            if isinstance(t, Id):
                return dg.identity(t.types, signature)
            if isinstance(t, Swap):
                return dg.swap((t.left,), (t.right,), signature)
            if isinstance(t, Copy):
                return dg.copy(t.type, signature)
            if isinstance(t, Del):
                return dg.delete(t.type, signature)
            if isinstance(t, Ref):
                if t.name in env:
                    return env[t.name]
                if signature.has_box(t.name):
                    return dg.box(signature, t.name)
                fail(t, f"unknown box or diagram {t.name!r}")
        except DSLError:
            raise
        except MarkovTraceError as e:
            fail(t, str(e))
        if isinstance(t, Seq):
            out = go(t.parts[0])
            for p in t.parts[1:]:
                nxt = go(p)
                if out.cod != nxt.dom:
                    fail(p, f"type mismatch: {_show(out.cod)} does not match {_show(nxt.dom)}")
                out = dg.compose(out, nxt)
            return out
        if isinstance(t, Par):
            out = go(t.parts[0])
            for p in t.parts[1:]:
                out = dg.tensor(out, go(p))
            return out
        raise TypeError(f"not a term: {t!r}")

    return go(term)


def _show(types) -> str:
    return " * ".join(types) if types else "I"


# -- printing ------------------------------------------------------------------

def to_text(t: Term) -> str:
    """Print a term; ``parse_term(to_text(t))`` gives back ``t``."""

    def go(t: Term, prec: int) -> str:
        if isinstance(t, Id):
            if len(t.types) == 1:
                return f"id_{t.types[0]}"
            return f"id({', '.join(t.types)})"
        if isinstance(t, Swap):
            return f"swap({t.left}, {t.right})"
        if isinstance(t, Copy):
            return f"copy_{t.type}"
        if isinstance(t, Del):
            return f"del_{t.type}"
        if isinstance(t, Ref):
            return t.name
        if isinstance(t, Seq):
            s = " ; ".join(go(p, 1) for p in t.parts)
            return f"({s})" if prec > 0 else s
        if isinstance(t, Par):
            s = " * ".join(go(p, 2) for p in t.parts)
            return f"({s})" if prec > 1 else s
        raise TypeError(t)

    return go(t, 0)


# -- read-back -----------------------------------------------------------------

def _wiring_term(types: list[str], targets: list[int]) -> list[Term]:
    """Layers realising a box-free wiring from ``types`` onto ``targets``.

    ``targets[j]`` names the input position feeding output ``j``. Returns a
    list of sequential layers (possibly empty when the wiring is the identity).
    """
    n = len(types)
    if targets == list(range(n)):
        return []
    layers: list[Term] = []
    # 1. copy/delete each input to the right multiplicity, keeping input order
    counts = [targets.count(i) for i in range(n)]
    if any(c != 1 for c in counts):
        parts: list[Term] = []
        for i, c in enumerate(counts):
            if c == 0:
                parts.append(Del(types[i]))
            elif c == 1:
                parts.append(Id((types[i],)))
            else:
                chain: list[Term] = [Copy(types[i])]
                for k in range(2, c):
                    chain.append(Par((Copy(types[i]), Id((types[i],) * (k - 1)))))
                parts.append(chain[0] if len(chain) == 1 else Seq(tuple(chain)))
        layers.append(_par(parts))
    # 2. the copies sit grouped by source; bubble-sort them into target order
    current: list[int] = [i for i in range(n) for _ in range(counts[i])]
    # assign each target slot one of the copies deterministically
    want = list(targets)
    cur_types = [types[i] for i in current]
    pos = _matching(current, want)
    # pos[k] = index in ``want`` that copy k must end at; sort by swapping neighbours
    arr = list(pos)
    tys = list(cur_types)
    changed = True
    while changed:
        changed = False
        for k in range(len(arr) - 1):
            if arr[k] > arr[k + 1]:
                parts = []
                if k:
                    parts.append(Id(tuple(tys[:k])))
                parts.append(Swap(tys[k], tys[k + 1]))
                if k + 2 < len(arr):
                    parts.append(Id(tuple(tys[k + 2:])))
                layers.append(_par(parts))
                arr[k], arr[k + 1] = arr[k + 1], arr[k]
                tys[k], tys[k + 1] = tys[k + 1], tys[k]
                changed = True
    return layers


def _matching(current: list[int], want: list[int]) -> list[int]:
    slots: dict[int, list[int]] = {}
    for j, src in enumerate(want):
        slots.setdefault(src, []).append(j)
    return [slots[src].pop(0) for src in current]


def _par(parts: list[Term]) -> Term:
    parts = [p for p in parts if not (isinstance(p, Id) and not p.types)]
    if not parts:
        return Id(())
    return parts[0] if len(parts) == 1 else Par(tuple(parts))


def diagram_to_term(d: Diagram) -> Term:
    """A term that elaborates to a diagram equal to ``d``.

    Boxes are emitted one per layer in canonical order; between boxes a
    wiring layer routes the live wires (copying and deleting as needed).
    """
    c = d.canonical.cospan
    g = c.apex
    # remaining uses of each wire, to know what to keep alive
    frontier: list[int] = list(c.left)
    layers: list[Term] = []
    later_uses: list[list[int]] = []
    for i in range(g.n_boxes):
        later_uses.append([w for b in g.boxes[i + 1:] for w in b.inputs] + list(c.right))
    for i, b in enumerate(g.boxes):
        keep = [w for w in frontier if w in later_uses[i]]
        wanted = list(b.inputs) + keep
        targets = [frontier.index(w) for w in wanted]
        layers.extend(_wiring_term([g.wire_labels[w] for w in frontier], targets))
        rest = Id(tuple(g.wire_labels[w] for w in keep))
        layers.append(_par([Ref(b.label), rest]))
        frontier = list(b.outputs) + keep
    targets = [frontier.index(w) for w in c.right]
    layers.extend(_wiring_term([g.wire_labels[w] for w in frontier], targets))
    if not layers:
        return Id(tuple(g.wire_labels[w] for w in c.left))
    return layers[0] if len(layers) == 1 else Seq(tuple(layers))
