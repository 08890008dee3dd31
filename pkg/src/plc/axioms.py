"""Seeded instantiation of the proof-system schemas, for validity sweeps.

Schemas: K, T, 4, 5 for both boxes; commutation of the boxes; at-least-one
and at-most-one decision value; the functionality schema tying a full input
description to its decision; and the two independence schemas making input
atoms classifier-independent.
"""

from __future__ import annotations

import itertools
import random

from .syntax import (
    And,
    Atom,
    BoxF,
    BoxI,
    Dec,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Signature,
    Top,
    big_or,
    conj_term,
)

SCHEMA_NAMES = (
    "K_boxI",
    "K_boxF",
    "T_boxI",
    "T_boxF",
    "4_boxI",
    "4_boxF",
    "5_boxI",
    "5_boxF",
    "Comm",
    "AtLeast",
    "AtMost",
    "Funct",
    "Indep_pos",
    "Indep_neg",
)


def random_formula(
    rng: random.Random,
    sig: Signature,
    depth: int,
    *,
    allow_cp: bool = False,
    allow_dyn: bool = False,
    leaf_weight: float = 0.3,
) -> Formula:
    """A random formula of bounded modal/connective depth."""
    if depth <= 0 or rng.random() < leaf_weight:
        kinds = ["dec", "top"] + (["atom"] * 3 if sig.atoms else [])
        k = rng.choice(kinds)
        if k == "atom":
            return Atom(rng.choice(sig.atoms))
        if k == "dec":
            return Dec(rng.choice(sig.values))
        return Top()
    ops = ["not", "and", "or", "implies", "boxI", "boxF", "diaI", "diaF"]
    if allow_cp and sig.atoms:
        ops.append("cp")
    if allow_dyn:
        ops.append("dyn")
    op = rng.choice(ops)
    sub = lambda: random_formula(  # noqa: E731
        rng, sig, depth - 1, allow_cp=allow_cp, allow_dyn=allow_dyn, leaf_weight=leaf_weight
    )
    if op == "not":
        return Not(sub())
    if op == "and":
        return And(sub(), sub())
    if op == "or":
        return Or(sub(), sub())
    if op == "implies":
        return Implies(sub(), sub())
    if op == "boxI":
        return BoxI(sub())
    if op == "boxF":
        return BoxF(sub())
    if op == "diaI":
        return Not(BoxI(Not(sub())))
    if op == "diaF":
        return Not(BoxF(Not(sub())))
    if op == "cp":
        count = rng.randint(1, min(2, len(sig.atoms)))
        from .syntax import CP

        return CP(tuple(rng.sample(sig.atoms, count)), sub())
    from .syntax import Dyn

    return Dyn(random_formula(rng, sig, depth - 1), sub())


def _atom_subsets(sig: Signature) -> list[frozenset]:
    out: list[frozenset] = []
    for r in range(len(sig.atoms) + 1):
        for combo in itertools.combinations(sig.atoms, r):
            out.append(frozenset(combo))
    return out


def axiom_instances(
    sig: Signature, depth: int = 2, seed: int = 0, count: int = 1
) -> list[tuple[str, Formula]]:
    """`count` instances of every schema, deterministic in the seed.

    Functionality instances walk all atom subsets (cycled with the output
    values); the S5 and commutation schemas draw their subformulas randomly
    up to the given depth.
    """
    rng = random.Random(seed)
    subsets = _atom_subsets(sig)
    out: list[tuple[str, Formula]] = []

    def draw() -> Formula:
        return random_formula(rng, sig, depth)

    for i in range(count):
        for box, tag in ((BoxI, "boxI"), (BoxF, "boxF")):
            phi, psi = draw(), draw()
            out.append(
                (f"K_{tag}", Implies(And(box(phi), box(Implies(phi, psi))), box(psi)))
            )
            chi = draw()
            out.append((f"T_{tag}", Implies(box(chi), chi)))
            chi = draw()
            out.append((f"4_{tag}", Implies(box(chi), box(box(chi)))))
            chi = draw()
            out.append((f"5_{tag}", Implies(Not(box(chi)), box(Not(box(chi))))))
        phi = draw()
        out.append(("Comm", Iff(BoxF(BoxI(phi)), BoxI(BoxF(phi)))))
        out.append(("AtLeast", big_or(Dec(v) for v in sig.values)))
        if len(sig.values) > 1:
            x = sig.values[i % len(sig.values)]
            others = [v for v in sig.values if v != x]
            y = others[i % len(others)]
        else:
            x = y = sig.values[0]
        if x != y:
            out.append(("AtMost", Implies(Dec(x), Not(Dec(y)))))
        else:
            out.append(("AtMost", Top()))  # degenerate single-value signature
        xset = subsets[i % len(subsets)]
        xval = sig.values[i % len(sig.values)]
        guard = conj_term(xset, sig.atoms, sig)
        out.append(
            (
                "Funct",
                Implies(And(guard, Dec(xval)), BoxI(Implies(guard, Dec(xval)))),
            )
        )
        if sig.atoms:
            p = Atom(sig.atoms[i % len(sig.atoms)])
            out.append(("Indep_pos", Implies(p, BoxF(p))))
            out.append(("Indep_neg", Implies(Not(p), BoxF(Not(p)))))
    return out
