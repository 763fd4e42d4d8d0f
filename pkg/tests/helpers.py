"""Independent oracles shared by the test modules."""
from itertools import permutations, product

import numpy as np

from markovtrace.hypergraph import Cospan


def closure_classes(n, pairs):
    """Equivalence classes by repeated relaxation (no union-find)."""
    cls = list(range(n))
    changed = True
    while changed:
        changed = False
        for u, v in pairs:
            m = min(cls[u], cls[v])
            for w in range(n):
                if cls[w] in (cls[u], cls[v]) and cls[w] != m:
                    cls[w] = m
                    changed = True
    fresh = {}
    return tuple(fresh.setdefault(c, len(fresh)) for c in cls)


def isomorphic(c1: Cospan, c2: Cospan) -> bool:
    """Brute-force cospan isomorphism over all wire bijections."""
    g1, g2 = c1.apex, c2.apex
    if g1.n_wires != g2.n_wires or g1.n_boxes != g2.n_boxes:
        return False
    if len(c1.left) != len(c2.left) or len(c1.right) != len(c2.right):
        return False
    boxes2 = sorted((b.label, b.inputs, b.outputs) for b in g2.boxes)
    for perm in permutations(range(g2.n_wires)):
        if any(g1.wire_labels[w] != g2.wire_labels[perm[w]] for w in range(g1.n_wires)):
            continue
        if tuple(perm[w] for w in c1.left) != c2.left or tuple(perm[w] for w in c1.right) != c2.right:
            continue
        mapped = sorted(
            (b.label, tuple(perm[w] for w in b.inputs), tuple(perm[w] for w in b.outputs)) for b in g1.boxes
        )
        if mapped == boxes2:
            return True
    return False


def path_exists(c: Cospan, sources, targets) -> bool:
    """Does some wire->box->wire path (length >= 0) join the two sets? Plain DFS on a box-level graph."""
    g = c.apex
    targets = set(targets)
    for s in sources:
        stack, seen = [s], {s}
        while stack:
            w = stack.pop()
            if w in targets:
                return True
            for b in g.boxes:
                if w in b.inputs:
                    for v in b.outputs:
                        if v not in seen:
                            seen.add(v)
                            stack.append(v)
    return False


def naive_evaluate(c: Cospan, model) -> np.ndarray:
    """Sum over every assignment of values to wires; exponential but obviously correct."""
    g = c.apex
    dims = [model.cards[t] for t in g.wire_labels]
    dom = [model.cards[t] for t in c.dom]
    cod = [model.cards[t] for t in c.cod]
    out = np.zeros((int(np.prod(dom, dtype=int)), int(np.prod(cod, dtype=int))))
    kernels = [model.kernel(b.label).tensor for b in g.boxes]
    for vals in product(*[range(d) for d in dims]):
        weight = 1.0
        for b, k in zip(g.boxes, kernels):
            weight *= k[tuple(vals[w] for w in b.inputs + b.outputs)]
            if weight == 0.0:
                break
        if weight == 0.0:
            continue
        row = np.ravel_multi_index(tuple(vals[w] for w in c.left), dom) if dom else 0
        col = np.ravel_multi_index(tuple(vals[w] for w in c.right), cod) if cod else 0
        out[row, col] += weight
    return out


def triple_loop_compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape
    m2, p = b.shape
    assert m == m2
    out = np.zeros((n, p))
    for i in range(n):
        for j in range(p):
            s = 0.0
            for k in range(m):
                s += a[i, k] * b[k, j]
            out[i, j] = s
    return out
