"""Random kernels, diagrams, models and terms for property tests and the law suite."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import stoch
from .diagram import Diagram, normalize
from .hypergraph import Box, BoxSpec, Cospan, Hypergraph, Signature
from .interp import Model
from .stoch import FinSet, Kernel, Objects
from .terms import Copy, Del, Id, Par, Ref, Seq, Swap, Term


def random_objects(rng: np.random.Generator, n: int, cards: Sequence[int] = (1, 2, 3, 4), prefix: str = "X") -> Objects:
    return tuple(FinSet(f"{prefix}{i}", int(rng.choice(cards))) for i in range(n))


def random_kernel(
    rng: np.random.Generator, dom: Sequence[FinSet], cod: Sequence[FinSet], zero_prob: float = 0.3
) -> Kernel:
    """Random stochastic matrix; each entry is zeroed with ``zero_prob`` (one per row survives)."""
    rows, cols = stoch.size(dom), stoch.size(cod)
    a = rng.gamma(1.0, size=(rows, cols)) + 1e-3
    mask = rng.random((rows, cols)) < zero_prob
    keep = rng.integers(0, cols, size=rows)
    mask[np.arange(rows), keep] = False
    a[mask] = 0.0
    a /= a.sum(axis=1, keepdims=True)
    return Kernel(tuple(dom), tuple(cod), a)


def random_deterministic(rng: np.random.Generator, dom: Sequence[FinSet], cod: Sequence[FinSet]) -> Kernel:
    rows, cols = stoch.size(dom), stoch.size(cod)
    a = np.zeros((rows, cols))
    a[np.arange(rows), rng.integers(0, cols, size=rows)] = 1.0
    return Kernel(tuple(dom), tuple(cod), a)


def random_nonsignalling(
    rng: np.random.Generator,
    X: Sequence[FinSet],
    W_prime: Sequence[FinSet],
    Y: Sequence[FinSet],
    W: Sequence[FinSet],
    zero_prob: float = 0.3,
) -> Kernel:
    """``f : X ⊗ W' -> Y ⊗ W`` assembled from a random ``f_s : X -> W`` and ``f_p``."""
    X, Wp, Y, W = map(tuple, (X, W_prime, Y, W))
    f_s = random_kernel(rng, X, W, zero_prob)
    f_p = random_kernel(rng, W + X + Wp, Y, zero_prob)
    return stoch.Disintegration(f_s, f_p).recompose()


# -- syntax --------------------------------------------------------------------

def random_signature(rng: np.random.Generator, n_types: int = 2, n_boxes: int = 4) -> Signature:
    types = tuple("XYZUV"[:n_types])
    boxes = []
    for i in range(n_boxes):
        ins = tuple(rng.choice(types, size=int(rng.integers(0, 3))).tolist())
        outs = tuple(rng.choice(types, size=int(rng.integers(1, 3))).tolist())
        boxes.append(BoxSpec(f"f{i}", ins, outs))
    # a source for every type keeps the generators from getting stuck
    for t in types:
        boxes.append(BoxSpec(f"s{t}", (), (t,)))
    return Signature(types, tuple(boxes))


def random_cospan(
    rng: np.random.Generator,
    sig: Signature,
    dom: Sequence[str],
    n_boxes: int,
    cod: Sequence[str] | None = None,
    n_out: int | None = None,
    max_wires: int | None = None,
) -> Cospan | None:
    """Raw acyclic, left-monogamous cospan (possibly with eliminable boxes).

    Boxes are stacked one at a time, reading random existing wires. The output
    boundary picks random wires (repeats allowed) of the requested types, or
    ``n_out`` arbitrary wires. Returns ``None`` when the requested types are
    not available.
    """
    labels = list(dom)
    boxes: list[Box] = []
    for _ in range(n_boxes):
        for _attempt in range(6):
            spec = sig.boxes[int(rng.integers(len(sig.boxes)))]
            if max_wires is not None and len(labels) + len(spec.outputs) > max_wires:
                continue
            ins = []
            for t in spec.inputs:
                cands = [w for w, l in enumerate(labels) if l == t]
                if not cands:
                    break
                ins.append(int(rng.choice(cands)))
            else:
                outs = list(range(len(labels), len(labels) + len(spec.outputs)))
                labels.extend(spec.outputs)
                boxes.append(Box(spec.name, tuple(ins), tuple(outs)))
                break
    if cod is None:
        n_out = int(rng.integers(0, 4)) if n_out is None else n_out
        right = [int(rng.integers(len(labels))) for _ in range(n_out)] if labels else []
    else:
        right = []
        for t in cod:
            cands = [w for w, l in enumerate(labels) if l == t]
            if not cands:
                cands = _add_source(rng, sig, t, labels, boxes)
                if not cands:
                    return None
            right.append(int(rng.choice(cands)))
    if max_wires is not None and len(labels) > max_wires:
        return None
    g = Hypergraph(tuple(labels), tuple(boxes), sig)
    return Cospan(g, tuple(range(len(dom))), tuple(right))


def _add_source(rng, sig: Signature, t: str, labels: list, boxes: list) -> list[int]:
    """Append a fresh source box producing type ``t``; returns its ``t`` wires."""
    src = [b for b in sig.boxes if not b.inputs and t in b.outputs]
    if not src:
        return []
    b = src[int(rng.integers(len(src)))]
    outs = range(len(labels), len(labels) + len(b.outputs))
    labels.extend(b.outputs)
    boxes.append(Box(b.name, (), tuple(outs)))
    return [w for w in outs if labels[w] == t]


def random_diagram(rng, sig, dom, n_boxes, cod=None, n_out=None, max_wires=None, tries: int = 50) -> Diagram:
    for _ in range(tries):
        c = random_cospan(rng, sig, dom, n_boxes, cod, n_out, max_wires)
        if c is not None:
            return normalize(c)
    raise RuntimeError(f"could not generate a diagram {dom} -> {cod}")


def random_types(rng: np.random.Generator, sig: Signature, n: int) -> tuple[str, ...]:
    return tuple(rng.choice(sig.types, size=n).tolist()) if n else ()


def random_nonsignalling_diagram(
    rng: np.random.Generator,
    sig: Signature,
    m: Sequence[str],
    w_in: Sequence[str],
    w_out: Sequence[str],
    n_boxes: int,
    n_out: int | None = None,
    max_wires: int | None = None,
    tries: int = 200,
) -> Diagram:
    """Diagram ``m ⊗ w_in -> n ⊗ w_out`` with no path from ``w_in`` to ``w_out``."""
    from .contraction import reachable_wires

    m, w_in, w_out = tuple(m), tuple(w_in), tuple(w_out)
    for _ in range(tries):
        c = random_cospan(rng, sig, m + w_in, n_boxes, n_out=n_out, max_wires=max_wires)
        tainted = reachable_wires(c, c.left[len(m):])
        labels = list(c.apex.wire_labels)
        boxes = list(c.apex.boxes)
        extra = []
        for t in w_out:
            cands = [w for w, l in enumerate(labels) if l == t and w not in tainted]
            if not cands:
                cands = _add_source(rng, sig, t, labels, boxes)
                if not cands:
                    break
            extra.append(int(rng.choice(cands)))
        else:
            if max_wires is not None and len(labels) > max_wires:
                continue
            g = Hypergraph(tuple(labels), tuple(boxes), sig)
            return normalize(Cospan(g, c.left, c.right + tuple(extra)))
    raise RuntimeError("could not generate a non-signalling diagram")


def random_model(rng: np.random.Generator, sig: Signature, cards: Sequence[int] = (1, 2, 3), zero_prob: float = 0.3) -> Model:
    card = {t: int(rng.choice(cards)) for t in sig.types}
    obj = lambda ts: tuple(FinSet(t, card[t]) for t in ts)
    kernels = {b.name: random_kernel(rng, obj(b.inputs), obj(b.outputs), zero_prob) for b in sig.boxes}
    return Model(sig, card, kernels)


def random_term(rng: np.random.Generator, sig: Signature, dom: Sequence[str], layers: int = 3) -> tuple[Term, tuple[str, ...]]:
    """Random well-typed term from ``dom``; returns the term and its codomain."""
    cur = list(dom)
    parts: list[Term] = []
    for _ in range(layers):
        atoms: list[Term] = []
        nxt: list[str] = []
        i = 0
        while i < len(cur) or (not cur and not atoms):
            choice = rng.random()
            boxes = [b for b in sig.boxes if tuple(cur[i:i + len(b.inputs)]) == b.inputs]
            if choice < 0.15 and i + 1 < len(cur):
                atoms.append(Swap(cur[i], cur[i + 1]))
                nxt += [cur[i + 1], cur[i]]
                i += 2
            elif choice < 0.3 and i < len(cur) and len(cur) < 5:
                atoms.append(Copy(cur[i]))
                nxt += [cur[i], cur[i]]
                i += 1
            elif choice < 0.4 and i < len(cur):
                atoms.append(Del(cur[i]))
                i += 1
            elif choice < 0.75 and boxes:
                b = boxes[int(rng.integers(len(boxes)))]
                atoms.append(Ref(b.name))
                nxt += list(b.outputs)
                i += len(b.inputs)
            elif i < len(cur):
                k = int(rng.integers(1, len(cur) - i + 1))
                atoms.append(Id(tuple(cur[i:i + k])))
                nxt += cur[i:i + k]
                i += k
            else:
                atoms.append(Id(()))
            if not cur:
                break
        parts.append(atoms[0] if len(atoms) == 1 else Par(tuple(atoms)))
        cur = nxt
    return (parts[0] if len(parts) == 1 else Seq(tuple(parts))), tuple(cur)
