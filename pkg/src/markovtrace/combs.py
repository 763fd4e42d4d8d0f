"""Two-tooth combs over FinStoch: insertion, extension and their equivalences.

A comb ``(E, f, g)`` of type ``(A, A') -> (B, B')`` has ``f : A -> E ⊗ B`` and
``g : E ⊗ B' -> A'``; it is a process ``A -> A'`` with a hole ``B -> B'``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stoch
from .errors import AuditFailure, BoundaryMismatch, SignallingInput
from .stoch import DEFAULT_TOL, FinSet, Kernel, Objects, Tolerances, copy, identity, rewire, seq, tensor


@dataclass(frozen=True)
class Comb:
    env: Objects
    f: Kernel
    g: Kernel

    def __post_init__(self):
        object.__setattr__(self, "env", tuple(self.env))
        ne = len(self.env)
        if stoch.cards(self.f.cod[:ne]) != stoch.cards(self.env):
            raise BoundaryMismatch("f must output the environment first")
        if stoch.cards(self.g.dom[:ne]) != stoch.cards(self.env):
            raise BoundaryMismatch("g must read the environment first")

    @property
    def A(self) -> Objects:
        return self.f.dom

    @property
    def B(self) -> Objects:
        return self.f.cod[len(self.env):]

    @property
    def B_prime(self) -> Objects:
        return self.g.dom[len(self.env):]

    @property
    def A_prime(self) -> Objects:
        return self.g.cod

    @property
    def boundary(self) -> tuple[tuple[int, ...], ...]:
        return tuple(stoch.cards(x) for x in (self.A, self.A_prime, self.B, self.B_prime))

    def to_json(self) -> dict:
        return {
            "env": stoch.objs_to_json(self.env),
            "f": stoch.to_json(self.f),
            "g": stoch.to_json(self.g),
            "boundary": {
                "A": stoch.objs_to_json(self.A),
                "A_prime": stoch.objs_to_json(self.A_prime),
                "B": stoch.objs_to_json(self.B),
                "B_prime": stoch.objs_to_json(self.B_prime),
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "Comb":
        c = cls(stoch.objs_from_json(data["env"]), stoch.from_json(data["f"]), stoch.from_json(data["g"]))
        declared = data.get("boundary")
        if declared is not None:
            want = tuple(stoch.cards(stoch.objs_from_json(declared[k])) for k in ("A", "A_prime", "B", "B_prime"))
            if want != c.boundary:
                raise BoundaryMismatch(f"declared boundary {want} does not match the kernels {c.boundary}")
        return c


def insert(c: Comb, h: Kernel) -> Kernel:
    """C[h] = (f ⊗ id_K) ; (id_E ⊗ h) ; (g ⊗ id_K') for ``h : B ⊗ K -> B' ⊗ K'``."""
    nb, nbp = len(c.B), len(c.B_prime)
    if stoch.cards(h.dom[:nb]) != stoch.cards(c.B) or stoch.cards(h.cod[:nbp]) != stoch.cards(c.B_prime):
        raise BoundaryMismatch(f"hole has type {c.B} -> {c.B_prime}, got {h!r}")
    K, Kp = h.dom[nb:], h.cod[nbp:]
    return seq(
        tensor(c.f, identity(K)),
        tensor(identity(c.env), h),
        tensor(c.g, identity(Kp)),
    )


def extension(c: Comb) -> Kernel:
    """C[swap_{B,B'}] : A ⊗ B' -> A' ⊗ B."""
    return insert(c, stoch.swap(c.B, c.B_prime))


def _same_boundary(c1: Comb, c2: Comb) -> None:
    if c1.boundary != c2.boundary:
        raise BoundaryMismatch(f"combs have different boundaries {c1.boundary} vs {c2.boundary}")


def ext_equiv(c1: Comb, c2: Comb, tol: Tolerances = DEFAULT_TOL) -> bool:
    _same_boundary(c1, c2)
    return stoch.allclose(extension(c1), extension(c2), tol.eq)


def random_context(rng: np.random.Generator, B: Objects, B_prime: Objects, max_card: int = 3) -> Kernel:
    """A random ``h : B ⊗ K -> B' ⊗ K'`` with small random side channels."""
    K = tuple(FinSet(f"K{i}", int(rng.integers(1, max_card + 1))) for i in range(int(rng.integers(0, 2))))
    Kp = tuple(FinSet(f"K'{i}", int(rng.integers(1, max_card + 1))) for i in range(int(rng.integers(0, 2))))
    from .randgen import random_kernel

    return random_kernel(rng, B + K, B_prime + Kp)


def ctx_equiv(
    c1: Comb,
    c2: Comb,
    budget: int = 20,
    rng: np.random.Generator | None = None,
    tol: Tolerances = DEFAULT_TOL,
    audit_tol: float = 1e-8,
) -> bool:
    """Contextual equivalence, decided through the extension.

    Contextual and extensional equivalence coincide for kernels; ``budget``
    random contexts are additionally tried and must agree with the verdict.
    """
    verdict = ext_equiv(c1, c2, tol)
    if verdict:
        rng = rng or np.random.default_rng(0)
        for _ in range(budget):
            h = random_context(rng, c1.B, c1.B_prime)
            err = stoch.max_abs_diff(insert(c1, h), insert(c2, h))
            if err > audit_tol:
                raise AuditFailure(f"extensionally equal combs differ by {err:.3g} on a sampled context")
    return verdict


def optic_equiv(c1: Comb, c2: Comb, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Optic equivalence, decided by comparing extensions.

    This reduction is only valid because finite stochastic maps admit
    universal dilations; no coend search is performed.
    """
    return ext_equiv(c1, c2, tol)


def comb_from_nonsignalling(
    f: Kernel, b_in: int, b_out: int, tol: Tolerances = DEFAULT_TOL
) -> Comb:
    """Comb with environment ``A ⊗ B`` whose extension is ``f : A ⊗ B' -> A' ⊗ B``.

    The first tooth copies ``a``, draws ``b`` from the B-marginal ``f_s(b|a)``
    and keeps ``(a, b)`` in the environment; the second tooth is a
    disintegration ``f_p(a'|b, a, b')``.
    """
    f_s = stoch.is_nonsignalling_sem(f, b_in, b_out, tol)
    if f_s is None:
        raise SignallingInput("f signals from B' to B")
    return comb_from_disintegration(stoch.disintegrate(f, f_s, b_in, b_out, tol))


def comb_from_disintegration(d: stoch.Disintegration) -> Comb:
    """The comb of a disintegration; its extension is ``d.recompose()``."""
    A, B, Bp = d.X, d.W, d.W_prime
    nA, nB = len(A), len(B)
    first = seq(
        copy(A),  # a a
        tensor(identity(A), d.f_s),  # a b
        tensor(identity(A), copy(B)),  # a b b
    )
    # f_p reads (b, a, b'); the environment is stored as (a, b)
    second = seq(
        rewire(A + B + Bp, list(range(nA, nA + nB)) + list(range(nA)) + list(range(nA + nB, nA + nB + len(Bp)))),
        d.f_p,
    )
    return Comb(A + B, first, second)


def slide(f: Kernel, s: Kernel, g: Kernel) -> tuple[Comb, Comb]:
    """The two sides of one sliding step.

    With ``f : A -> E ⊗ B``, ``s : E -> E'`` and ``g : E' ⊗ B' -> A'``,
    returns ``(E', f;(s⊗id), g)`` and ``(E, f, (s⊗id);g)``.
    """
    E, Ep = s.dom, s.cod
    B = f.cod[len(E):]
    Bp = g.dom[len(Ep):]
    left = Comb(Ep, seq(f, tensor(s, identity(B))), g)
    right = Comb(E, f, seq(tensor(s, identity(Bp)), g))
    return left, right
