"""Write the comb example files in data/ from a fixed seed.

comb_a.json and comb_b.json are two different combs with the same extension
(one built from a non-signalling kernel, the other from a disintegration that
differs on null cells); context.json is a kernel that can fill their hole.
"""
import json
from pathlib import Path

import numpy as np

from markovtrace import combs, stoch
from markovtrace.laws import perturb_null_cells
from markovtrace.randgen import random_nonsignalling
from markovtrace.stoch import FinSet

OUT = Path(__file__).resolve().parent.parent / "data"


def main(seed: int = 2024) -> None:
    rng = np.random.default_rng(seed)
    A, Ap, B, Bp = (FinSet(n, 2) for n in ("A", "A'", "B", "B'"))
    f = random_nonsignalling(rng, (A,), (Bp,), (Ap,), (B,), zero_prob=0.5)
    a = combs.comb_from_nonsignalling(f, 1, 1)
    d = stoch.disintegrate(f, stoch.is_nonsignalling_sem(f, 1), 1)
    b = combs.comb_from_disintegration(perturb_null_cells(rng, d))
    h = combs.random_context(rng, a.B, a.B_prime)
    for name, obj in (("comb_a", a.to_json()), ("comb_b", b.to_json()), ("context", stoch.to_json(h))):
        (OUT / f"{name}.json").write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
    print("ext residual", stoch.max_abs_diff(combs.extension(a), combs.extension(b)))


if __name__ == "__main__":
    main()
