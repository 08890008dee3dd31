"""Pointed model checking over multi-classifier models and decision models.

Evaluation is extension-based: each call computes, bottom-up, the full set of
points (as a bitmask) where a formula holds, so boxed subformulas cost one
pass instead of an exponential recursion.  Extensions are cached per model.
"""

from __future__ import annotations

from .models import MCM, MDM, PointedMCM, QuasiMDM, state_mask, update_mcm
from .syntax import (
    CP,
    And,
    Atom,
    BoxF,
    BoxI,
    Dec,
    Dyn,
    Formula,
    Not,
    Top,
    validate_formula,
)


class EvalError(ValueError):
    """A formula cannot be evaluated against the given model."""


def extension_mask(mcm: MCM, phi: Formula) -> int:
    """Bitmask of the points satisfying phi, state-major (bit = si*nf + fi)."""
    if mcm.inconsistent:
        raise EvalError(
            "the model carries the inconsistent-knowledge marker (no classifiers)"
        )
    hit = mcm._ext_cache.get(phi)
    if hit is not None:
        return hit
    validate_formula(phi, mcm.sig)
    ns, nf = len(mcm.states), len(mcm.functions)
    full = (1 << (ns * nf)) - 1
    state_row = [((1 << nf) - 1) << (si * nf) for si in range(ns)]
    fn_col = [
        sum(1 << (si * nf + fi) for si in range(ns)) for fi in range(nf)
    ]
    memo: dict[int, int] = {}

    def rec(f: Formula) -> int:
        got = memo.get(id(f))
        if got is not None:
            return got
        if isinstance(f, Atom):
            out = 0
            for si, s in enumerate(mcm.states):
                if f.name in s:
                    out |= state_row[si]
        elif isinstance(f, Dec):
            out = 0
            for si, s in enumerate(mcm.states):
                for fi, fn in enumerate(mcm.functions):
                    if fn(s) == f.value:
                        out |= 1 << (si * nf + fi)
        elif isinstance(f, Top):
            out = full
        elif isinstance(f, Not):
            out = full ^ rec(f.sub)
        elif isinstance(f, And):
            out = rec(f.left) & rec(f.right)
        elif isinstance(f, BoxI):
            e = rec(f.sub)
            out = 0
            for col in fn_col:
                if e & col == col:
                    out |= col
        elif isinstance(f, BoxF):
            e = rec(f.sub)
            out = 0
            for row in state_row:
                if e & row == row:
                    out |= row
        elif isinstance(f, CP):
            e = rec(f.sub)
            xbits = 0
            for a in f.atoms:
                xbits |= 1 << mcm.sig.atom_index(a)
            groups: dict[int, int] = {}
            for si, s in enumerate(mcm.states):
                k = state_mask(mcm.sig, s) & xbits
                groups[k] = groups.get(k, 0) | state_row[si]
            out = 0
            for gmask in groups.values():
                for col in fn_col:
                    bits = gmask & col
                    if e & bits == bits:
                        out |= bits
        elif isinstance(f, Dyn):
            e_ann = rec(f.announced)
            guard = 0
            for col in fn_col:
                if e_ann & col == col:
                    guard |= col
            if guard == 0:
                out = full
            else:
                updated = update_mcm(mcm, f.announced)
                e_sub = extension_mask(updated, f.sub)
                nf2 = len(updated.functions)
                fmap = {}
                for fi, fn in enumerate(mcm.functions):
                    for fj, fn2 in enumerate(updated.functions):
                        if fn2 == fn:  # tables are unique within a model
                            fmap[fi] = fj
                            break
                out = full ^ guard
                for si in range(ns):
                    for fi in range(nf):
                        bit = 1 << (si * nf + fi)
                        if guard & bit and e_sub >> (si * nf2 + fmap[fi]) & 1:
                            out |= bit
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[id(f)] = out
        return out

    result = rec(phi)
    mcm._ext_cache[phi] = result
    return result


def check_mcm(point: PointedMCM, phi: Formula) -> bool:
    """Truth of phi at a pointed multi-classifier model."""
    mcm = point.model
    si = mcm.states.index(point.state)
    fi = mcm.functions.index(point.function)
    return bool(extension_mask(mcm, phi) >> (si * len(mcm.functions) + fi) & 1)


def valid_in_mcm(mcm: MCM, phi: Formula) -> bool:
    """Truth of phi at every point of the model."""
    ns, nf = len(mcm.states), len(mcm.functions)
    return extension_mask(mcm, phi) == (1 << (ns * nf)) - 1


def mdm_extension_mask(M: QuasiMDM, phi: Formula) -> int:
    """Bitmask over world positions (in M.worlds order) where phi holds.

    Ceteris-paribus and update operators are rejected: their semantics lives
    at the multi-classifier level; expand or reduce them first.
    """
    hit = M._ext_cache.get(phi)
    if hit is not None:
        return hit
    validate_formula(phi, M.sig)
    n = len(M.worlds)
    full = (1 << n) - 1
    pos = {w: i for i, w in enumerate(M.worlds)}
    i_blocks = [sum(1 << pos[w] for w in b) for b in M.rel_i]
    f_blocks = [sum(1 << pos[w] for w in b) for b in M.rel_f]
    memo: dict[int, int] = {}

    def rec(f: Formula) -> int:
        got = memo.get(id(f))
        if got is not None:
            return got
        if isinstance(f, Atom):
            out = sum(1 << pos[w] for w in M.worlds if f.name in M.atoms_val(w))
        elif isinstance(f, Dec):
            out = sum(1 << pos[w] for w in M.worlds if M.dec_val(w) == f.value)
        elif isinstance(f, Top):
            out = full
        elif isinstance(f, Not):
            out = full ^ rec(f.sub)
        elif isinstance(f, And):
            out = rec(f.left) & rec(f.right)
        elif isinstance(f, BoxI):
            e = rec(f.sub)
            out = 0
            for b in i_blocks:
                if e & b == b:
                    out |= b
        elif isinstance(f, BoxF):
            e = rec(f.sub)
            out = 0
            for b in f_blocks:
                if e & b == b:
                    out |= b
        elif isinstance(f, (CP, Dyn)):
            raise EvalError(
                "ceteris-paribus and update operators have no decision-model "
                "semantics; expand or reduce them first"
            )
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[id(f)] = out
        return out

    result = rec(phi)
    M._ext_cache[phi] = result
    return result


def check_mdm(M: QuasiMDM | MDM, w, phi: Formula) -> bool:
    """Truth of phi at a world of a (quasi) decision model."""
    try:
        i = M.worlds.index(w)
    except ValueError:
        raise EvalError(f"world {w!r} is not in the model") from None
    return bool(mdm_extension_mask(M, phi) >> i & 1)
