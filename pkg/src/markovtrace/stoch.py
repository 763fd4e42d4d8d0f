"""Finite stochastic kernels (FinStoch) and nonnegative matrices (Mat(R+)).

A morphism ``X1 ⊗ ... ⊗ Xm -> Y1 ⊗ ... ⊗ Yn`` is stored as a dense 2-D array
with one row per input tuple and one column per output tuple. Tuples are
flattened lexicographically, leftmost factor most significant, which is the
index order of ``numpy.kron`` and C-order ``reshape``.

Conventions for non-unique choices (conditionals, Bayesian inverses and
disintegrations): rows conditioned on a null event are uniform.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NotStochastic, SignallingInput


@dataclass(frozen=True)
class Tolerances:
    row: float = 1e-9
    eq: float = 1e-9
    ns: float = 1e-9
    supp: float = 1e-12
    null: float = 1e-12


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class FinSet:
    name: str
    card: int

    def __post_init__(self):
        if int(self.card) != self.card or self.card < 1:
            raise ValueError(f"FinSet {self.name!r} needs cardinality >= 1, got {self.card}")


Objects = tuple[FinSet, ...]


def _objs(x: Iterable[FinSet] | FinSet) -> Objects:
    return (x,) if isinstance(x, FinSet) else tuple(x)


def size(objs: Sequence[FinSet]) -> int:
    return math.prod(o.card for o in objs)


def cards(objs: Sequence[FinSet]) -> tuple[int, ...]:
    return tuple(o.card for o in objs)


@dataclass(frozen=True, eq=False)
class NonnegMatrix:
    """Morphism of Mat(R+); the array has shape ``(size(dom), size(cod))``."""

    dom: Objects
    cod: Objects
    array: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dom", _objs(self.dom))
        object.__setattr__(self, "cod", _objs(self.cod))
        a = np.asarray(self.array, dtype=float).reshape(size(self.dom), size(self.cod))
        a.setflags(write=False)
        object.__setattr__(self, "array", a)
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise ValueError("entries must be finite and nonnegative")

    @property
    def tensor(self) -> np.ndarray:
        """View with one axis per factor: ``dom`` axes then ``cod`` axes."""
        return self.array.reshape(cards(self.dom) + cards(self.cod))

    @property
    def shape(self) -> tuple[int, int]:
        return self.array.shape

    def __rshift__(self, other):
        return then(self, other)

    def __matmul__(self, other):
        return tensor(self, other)

    def __repr__(self):
        show = lambda os: " ⊗ ".join(f"{o.name}[{o.card}]" for o in os) or "I"
        return f"{type(self).__name__}({show(self.dom)} -> {show(self.cod)})"


class Kernel(NonnegMatrix):
    """Row-stochastic matrix: a FinStoch morphism ``p(y|x)``."""

    def __post_init__(self):
        super().__post_init__()
        check_stochastic(self.array)


def check_stochastic(a: np.ndarray, tol: float = DEFAULT_TOL.row) -> None:
    dev = np.max(np.abs(a.sum(axis=1) - 1.0), initial=0.0)
    if dev > tol:
        raise NotStochastic(f"row sums deviate from 1 by {dev:.3g}")


def _make(like: Sequence[NonnegMatrix], dom, cod, array) -> NonnegMatrix:
    if all(isinstance(x, Kernel) for x in like):
        return Kernel(dom, cod, array)
    return NonnegMatrix(dom, cod, array)


def as_matrix(k: NonnegMatrix) -> NonnegMatrix:
    return NonnegMatrix(k.dom, k.cod, k.array)


def kernel(dom, cod, rows) -> Kernel:
    return Kernel(_objs(dom), _objs(cod), np.asarray(rows, dtype=float))


# -- categorical structure ---------------------------------------------------

def then(f: NonnegMatrix, g: NonnegMatrix) -> NonnegMatrix:
    """Sequential composite ``f ; g``."""
    if cards(f.cod) != cards(g.dom):
        raise DimensionMismatch(f"cannot compose {f!r} with {g!r}")
    return _make((f, g), f.dom, g.cod, f.array @ g.array)


def compose(g: NonnegMatrix, f: NonnegMatrix) -> NonnegMatrix:
    """``g ∘ f``: matrix product, (gf)(z|x) = Σ_y g(z|y) f(y|x)."""
    return then(f, g)


def seq(*ks: NonnegMatrix) -> NonnegMatrix:
    out = ks[0]
    for k in ks[1:]:
        out = then(out, k)
    return out


def tensor(*ks: NonnegMatrix) -> NonnegMatrix:
    if not ks:
        return identity(())
    out = ks[0]
    for k in ks[1:]:
        out = _make((out, k), out.dom + k.dom, out.cod + k.cod, np.kron(out.array, k.array))
    return out


def rewire(dom: Sequence[FinSet], outputs: Sequence[int]) -> Kernel:
    """Deterministic kernel sending input factor ``outputs[j]`` to output factor ``j``.

    Identities, swaps, copies and deletes are all instances.
    """
    dom = _objs(dom)
    outputs = list(outputs)
    cod = tuple(dom[i] for i in outputs)
    rows = size(dom)
    a = np.zeros((rows, size(cod)))
    if rows:
        idx = np.indices(cards(dom)).reshape(len(dom), rows)
        col = np.zeros(rows, dtype=np.int64)
        for i in outputs:
            col = col * dom[i].card + idx[i]
        a[np.arange(rows), col] = 1.0
    return Kernel(dom, cod, a)


def identity(objs) -> Kernel:
    objs = _objs(objs)
    return rewire(objs, range(len(objs)))


def swap(a, b) -> Kernel:
    a, b = _objs(a), _objs(b)
    return rewire(a + b, list(range(len(a), len(a) + len(b))) + list(range(len(a))))


def copy(objs) -> Kernel:
    """Δ on the product object: (x', x'' | x) = [x' = x][x'' = x]."""
    objs = _objs(objs)
    return rewire(objs, list(range(len(objs))) * 2)


def delete(objs) -> Kernel:
    return rewire(_objs(objs), [])


def marginal(f: NonnegMatrix, keep: Sequence[int]) -> NonnegMatrix:
    """Keep the listed output factors (in the given order), summing out the rest."""
    return then(f, rewire(f.cod, keep))


def permute_dom(f: NonnegMatrix, order: Sequence[int]) -> NonnegMatrix:
    """Reorder inputs: new input ``j`` is old input ``order[j]``."""
    order = list(order)
    new_dom = tuple(f.dom[i] for i in order)
    inv = [order.index(i) for i in range(len(order))]
    return then(rewire(new_dom, inv), f)


def max_abs_diff(f: NonnegMatrix, g: NonnegMatrix) -> float:
    if f.shape != g.shape:
        raise DimensionMismatch(f"{f!r} and {g!r} have different shapes")
    return float(np.max(np.abs(f.array - g.array), initial=0.0))


def allclose(f: NonnegMatrix, g: NonnegMatrix, tol: float = DEFAULT_TOL.eq) -> bool:
    return max_abs_diff(f, g) <= tol


# -- supports, a.s. equality, atomicity --------------------------------------

def support(p: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> frozenset[int]:
    """Output indices reached with positive probability from some input."""
    return frozenset(np.flatnonzero(np.any(p.array > tol.supp, axis=0)).tolist())


def as_equal(f1: NonnegMatrix, f2: NonnegMatrix, p: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``f1 =_p f2`` for ``f1, f2 : W ⊗ X -> Y`` and ``p : A -> X``.

    Rows agree wherever the ``X`` component lies in ``supp(p)``, for every ``w``.
    """
    if f1.shape != f2.shape or cards(f1.dom) != cards(f2.dom):
        raise DimensionMismatch("f1 and f2 must have the same type")
    nx = len(p.cod)
    if cards(f1.dom[len(f1.dom) - nx:]) != cards(p.cod):
        raise DimensionMismatch(f"the trailing inputs of f1 must be {p.cod}")
    w, x = size(f1.dom[: len(f1.dom) - nx]), size(p.cod)
    d = np.abs(f1.array - f2.array).reshape(w, x, -1)
    s = sorted(support(p, tol))
    return bool(np.all(d[:, s, :] <= tol.eq))


def abs_cont(p: NonnegMatrix, q: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``p ≪ q``: support inclusion."""
    if cards(p.cod) != cards(q.cod):
        raise DimensionMismatch("p and q must share a codomain")
    return support(p, tol) <= support(q, tol)


def is_atomic(p: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Δ ∘ p ≪ p ⊗ p."""
    return abs_cont(then(p, copy(p.cod)), tensor(p, p), tol)


def is_deterministic(f: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    a = f.array
    return bool(np.all((np.abs(a) <= tol.eq) | (np.abs(a - 1.0) <= tol.eq)))


def commutes_with_copy(f: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Δ ∘ f = (f ⊗ f) ∘ Δ, checked literally."""
    return allclose(then(f, copy(f.cod)), then(copy(f.dom), tensor(f, f)), tol.eq)


# -- conditionals and Bayesian inversion -------------------------------------

def _normalize_rows(joint: np.ndarray, tol: Tolerances) -> np.ndarray:
    """Normalize the last axis; rows with mass <= tol.null become uniform."""
    mass = joint.sum(axis=-1, keepdims=True)
    n = joint.shape[-1]
    safe = np.where(mass > tol.null, mass, 1.0)
    return np.where(mass > tol.null, joint / safe, 1.0 / n)


def conditional(f: NonnegMatrix, k: int, tol: Tolerances = DEFAULT_TOL) -> Kernel:
    """Conditional ``f|_X : X ⊗ A -> Y`` of ``f : A -> X ⊗ Y`` (X = first ``k`` outputs)."""
    A, X, Y = f.dom, f.cod[:k], f.cod[k:]
    t = f.array.reshape(size(A), size(X), size(Y))
    cond = _normalize_rows(t, tol).transpose(1, 0, 2)
    return Kernel(X + A, Y, cond.reshape(size(X) * size(A), size(Y)))


def recompose_conditional(f: NonnegMatrix, k: int, cond: NonnegMatrix) -> NonnegMatrix:
    """Rebuild ``A -> X ⊗ Y`` from the X-marginal of ``f`` and a conditional.

    Copy ``a``, draw ``x`` from the marginal, copy ``x``, feed ``(x, a)`` to ``cond``.
    """
    A, X = f.dom, f.cod[:k]
    return seq(
        copy(A),
        tensor(marginal(f, range(k)), identity(A)),
        tensor(copy(X), identity(A)),
        tensor(identity(X), cond),
    )


def bayes_inverse(f: NonnegMatrix, p: NonnegMatrix, tol: Tolerances = DEFAULT_TOL) -> Kernel:
    """``f†_p : A ⊗ Y -> X`` for ``f : X -> Y`` and prior ``p : A -> X``."""
    X, Y = f.dom, f.cod
    joint = seq(p, copy(X), tensor(f, identity(X)))  # A -> Y ⊗ X
    cond = conditional(joint, len(Y), tol)  # Y ⊗ A -> X
    nY, nA = len(Y), len(p.dom)
    return permute_dom(cond, list(range(nY, nY + nA)) + list(range(nY)))


def bayes_residual(f: NonnegMatrix, p: NonnegMatrix, dagger: NonnegMatrix) -> float:
    """Max deviation in p(x|a) f(y|x) = (f∘p)(y|a) f†(x|a,y), both sides as A -> X ⊗ Y."""
    A, X, Y = p.dom, f.dom, f.cod
    lhs = seq(p, copy(X), tensor(identity(X), f))
    rhs = seq(
        copy(A),
        tensor(identity(A), then(p, f)),
        tensor(identity(A), copy(Y)),
        tensor(dagger, identity(Y)),
    )
    return max_abs_diff(lhs, rhs)


def conditional_residual(f: NonnegMatrix, k: int, cond: NonnegMatrix) -> float:
    return max_abs_diff(f, recompose_conditional(f, k, cond))


# -- non-signalling, disintegration, traces -----------------------------------

def _split(f: NonnegMatrix, k_in: int, k_out: int):
    X, Wp = f.dom[: len(f.dom) - k_in], f.dom[len(f.dom) - k_in:]
    Y, W = f.cod[: len(f.cod) - k_out], f.cod[len(f.cod) - k_out:]
    return X, Wp, Y, W


def is_nonsignalling_sem(
    f: NonnegMatrix, k_in: int, k_out: int | None = None, tol: Tolerances = DEFAULT_TOL
) -> Kernel | None:
    """Signalling test for ``f : X ⊗ W' -> Y ⊗ W`` (last ``k_in`` inputs, ``k_out`` outputs).

    Returns the shared ``W``-marginal ``f_s : X -> W`` (mean over ``w'``) when
    it does not depend on ``w'``, else ``None``.
    """
    k_out = k_in if k_out is None else k_out
    X, Wp, Y, W = _split(f, k_in, k_out)
    t = f.array.reshape(size(X), size(Wp), size(Y), size(W)).sum(axis=2)
    if np.max(t.max(axis=1) - t.min(axis=1), initial=0.0) > tol.ns:
        return None
    return Kernel(X, W, t.mean(axis=1))


@dataclass(frozen=True)
class Disintegration:
    """``f_s : X -> W`` and ``f_p : W ⊗ X ⊗ W' -> Y`` with f(y,w|x,w') = f_s(w|x) f_p(y|w,x,w')."""

    f_s: Kernel
    f_p: Kernel

    @property
    def X(self) -> Objects:
        return self.f_s.dom

    @property
    def W(self) -> Objects:
        return self.f_s.cod

    @property
    def W_prime(self) -> Objects:
        return self.f_p.dom[len(self.W) + len(self.X):]

    def recompose(self) -> Kernel:
        """f(y, w | x, w') = f_s(w | x) f_p(y | w, x, w')."""
        X, W, Wp, Y = self.X, self.W, self.W_prime, self.f_p.cod
        fs = self.f_s.array  # (x, w)
        fp = self.f_p.array.reshape(size(W), size(X), size(Wp), size(Y))
        t = np.einsum("xw,wxvy->xvyw", fs, fp)
        return Kernel(X + Wp, Y + W, t.reshape(size(X) * size(Wp), size(Y) * size(W)))


def disintegrate(f: NonnegMatrix, f_s: NonnegMatrix, k_in: int, k_out: int | None = None, tol: Tolerances = DEFAULT_TOL) -> Disintegration:
    """f_p(y|w,x,w') = f(y,w|x,w') / f_s(w|x), uniform where f_s(w|x) is null."""
    k_out = k_in if k_out is None else k_out
    X, Wp, Y, W = _split(f, k_in, k_out)
    if cards(f_s.dom) != cards(X) or cards(f_s.cod) != cards(W):
        raise DimensionMismatch("f_s must have type X -> W")
    t = f.array.reshape(size(X), size(Wp), size(Y), size(W))
    fs = f_s.array  # (x, w)
    marg = t.sum(axis=2)  # (x, w', w)
    if np.max(np.abs(marg - fs[:, None, :]), initial=0.0) > tol.ns:
        raise SignallingInput("f_s is not the W-marginal of f for every w'")
    null = fs <= tol.null  # (x, w)
    safe = np.where(null, 1.0, fs)
    fp = np.where(
        null[:, None, None, :], 1.0 / size(Y), t / safe[:, None, None, :]
    )  # (x, w', y, w)
    fp = fp.transpose(3, 0, 1, 2)  # (w, x, w', y)
    return Disintegration(Kernel(X, W, fs), Kernel(W + X + Wp, Y, fp.reshape(-1, size(Y))))


def trace_from_disintegration(d: Disintegration) -> Kernel:
    """Copy x, draw w ~ f_s(·|x), feed (w, x, w) into f_p: Σ_w f_s(w|x) f_p(y|w,x,w)."""
    X, W, Y = d.X, d.W, d.f_p.cod
    if cards(d.W_prime) != cards(W):
        raise DimensionMismatch("f_p must read W twice to be traced")
    fp = d.f_p.array.reshape(size(W), size(X), size(W), size(Y))
    return Kernel(X, Y, np.einsum("xw,wxwy->xy", d.f_s.array, fp))


def mat_trace(f: NonnegMatrix, k: int) -> NonnegMatrix:
    """Compact-closed trace Σ_w f(y,w|x,w); no normalization guarantee."""
    X, W, Y, _ = _split(f, k, k)
    if cards(f.dom[len(X):]) != cards(f.cod[len(Y):]):
        raise DimensionMismatch("traced factors must agree")
    t = f.array.reshape(size(X), size(W), size(Y), size(W))
    return NonnegMatrix(X, Y, np.einsum("xwyw->xy", t))


def causal_trace(f: NonnegMatrix, k: int, tol: Tolerances = DEFAULT_TOL) -> Kernel:
    """Trace of a non-signalling ``f : X ⊗ W -> Y ⊗ W`` over its last ``k`` factors.

    Computed from a disintegration and cross-checked against the diagonal sum.
    """
    X, Wp, Y, W = _split(f, k, k)
    if cards(Wp) != cards(W):
        raise DimensionMismatch("traced factors must agree")
    f_s = is_nonsignalling_sem(f, k, k, tol)
    if f_s is None:
        raise SignallingInput("the W output depends on the W input")
    tr = trace_from_disintegration(disintegrate(f, f_s, k, k, tol))
    diag = mat_trace(f, k)
    err = max_abs_diff(tr, diag)
    if err > tol.eq:
        raise ArithmeticError(f"trace computations disagree by {err:.3g}")
    return tr


# -- serialization --------------------------------------------------------------

def _num(x) -> float:
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def objs_to_json(objs: Sequence[FinSet]) -> list[dict]:
    return [{"name": o.name, "card": o.card} for o in objs]


def objs_from_json(data) -> Objects:
    return tuple(FinSet(str(o["name"]), int(o["card"])) for o in data)


def to_json(k: NonnegMatrix) -> dict:
    return {
        "dom": objs_to_json(k.dom),
        "cod": objs_to_json(k.cod),
        "rows": [[float(v) for v in row] for row in k.array],
    }


def from_json(data: dict, stochastic: bool = True) -> NonnegMatrix:
    """Read the kernel JSON object; entries may be numbers or exact decimal/fraction strings."""
    dom, cod = objs_from_json(data["dom"]), objs_from_json(data["cod"])
    rows = np.array([[_num(v) for v in row] for row in data["rows"]], dtype=float)
    if rows.shape != (size(dom), size(cod)):
        raise DimensionMismatch(f"rows have shape {rows.shape}, expected {(size(dom), size(cod))}")
    return (Kernel if stochastic else NonnegMatrix)(dom, cod, rows)


def dumps(k: NonnegMatrix) -> str:
    """Byte-stable JSON text (``repr`` floats, fixed key order)."""
    return json.dumps(to_json(k), indent=None, separators=(", ", ": ")) + "\n"


def loads(text: str, stochastic: bool = True) -> NonnegMatrix:
    return from_json(json.loads(text), stochastic)
