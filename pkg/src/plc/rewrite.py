"""Equivalence-preserving rewrites: update-operator elimination, the
ceteris-paribus expansion pass, and a small cleanup simplifier.
"""

from __future__ import annotations

from .config import DEFAULT_REWRITE_NODES, BudgetMeter
from .syntax import (
    CP,
    And,
    Atom,
    BoxF,
    BoxI,
    Dec,
    Dyn,
    Formula,
    Implies,
    Not,
    Top,
    _expand_cp_ordered,
    size,
)


def simplify(phi: Formula) -> Formula:
    """Cleanup: double negation, truth/falsity absorption, boxed constants.

    The output is equivalent to the input on every pointed model.
    """
    memo: dict[int, Formula] = {}
    top = Top()
    bot = Not(top)

    def rec(f: Formula) -> Formula:
        got = memo.get(id(f))
        if got is not None:
            return got
        if isinstance(f, Not):
            s = rec(f.sub)
            if isinstance(s, Not):
                out = s.sub
            else:
                out = Not(s)
        elif isinstance(f, And):
            l, r = rec(f.left), rec(f.right)
            if l == top:
                out = r
            elif r == top:
                out = l
            elif l == bot or r == bot:
                out = bot
            else:
                out = And(l, r)
        elif isinstance(f, BoxI):
            s = rec(f.sub)
            out = s if s in (top, bot) else BoxI(s)
        elif isinstance(f, BoxF):
            s = rec(f.sub)
            out = s if s in (top, bot) else BoxF(s)
        elif isinstance(f, CP):
            s = rec(f.sub)
            out = s if s in (top, bot) else CP(f.atoms, s)
        elif isinstance(f, Dyn):
            a = rec(f.announced)
            s = rec(f.sub)
            out = top if s == top else Dyn(a, s)
        else:
            out = f
        memo[id(f)] = out
        return out

    return rec(phi)


def cp_free(phi: Formula, *, max_nodes: int | None = None) -> Formula:
    """Expand every ceteris-paribus modality into its boxed case split.

    Exponential in the index-set sizes; guarded by a node budget.
    """
    meter = BudgetMeter(max_nodes or DEFAULT_REWRITE_NODES, "ceteris-paribus expansion")

    def rec(f: Formula) -> Formula:
        if isinstance(f, Not):
            return Not(rec(f.sub))
        if isinstance(f, And):
            return And(rec(f.left), rec(f.right))
        if isinstance(f, BoxI):
            return BoxI(rec(f.sub))
        if isinstance(f, BoxF):
            return BoxF(rec(f.sub))
        if isinstance(f, CP):
            expanded = _expand_cp_ordered(f.atoms, rec(f.sub))
            meter.spend(size(expanded))
            return expanded
        if isinstance(f, Dyn):
            return Dyn(rec(f.announced), rec(f.sub))
        return f

    return rec(phi)


def _dyn_scope_total(phi: Formula) -> int:
    """Sum over update nodes of the size of their scope (the rewrite measure)."""
    total = 0
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Not):
            stack.append(f.sub)
        elif isinstance(f, And):
            stack.append(f.left)
            stack.append(f.right)
        elif isinstance(f, (BoxI, BoxF, CP)):
            stack.append(f.sub)
        elif isinstance(f, Dyn):
            total += size(f.sub)
            stack.append(f.announced)
            stack.append(f.sub)
    return total


def reduce_dynamic(phi: Formula, *, max_nodes: int | None = None) -> Formula:
    """Eliminate every update operator through its six reduction laws.

    Updates are pushed innermost-first through negation, conjunction, both
    boxes, atoms and decision atoms; a ceteris-paribus modality in the scope
    is expanded before the push.  Each law application strictly shrinks the
    scope measure (asserted); the result contains no update node.
    """
    meter = BudgetMeter(max_nodes or DEFAULT_REWRITE_NODES, "update reduction")

    def push(ann: Formula, scope: Formula) -> Formula:
        # `ann` and `scope` are already update-free
        guard = BoxI(ann)
        before = size(scope)
        if isinstance(scope, (Atom, Dec, Top)):
            out = Implies(guard, scope)
            residual = 0
        elif isinstance(scope, Not):
            out = Implies(guard, Not(push(ann, scope.sub)))
            residual = size(scope.sub)
        elif isinstance(scope, And):
            out = And(push(ann, scope.left), push(ann, scope.right))
            residual = size(scope.left) + size(scope.right)
        elif isinstance(scope, BoxI):
            out = Implies(guard, BoxI(push(ann, scope.sub)))
            residual = size(scope.sub)
        elif isinstance(scope, BoxF):
            out = Implies(guard, BoxF(push(ann, scope.sub)))
            residual = size(scope.sub)
        elif isinstance(scope, CP):
            expanded = _expand_cp_ordered(scope.atoms, scope.sub)
            meter.spend(size(expanded))
            return push(ann, expanded)
        else:
            raise AssertionError(f"update operator in a reduced scope: {scope!r}")
        assert residual < before, "reduction law failed to shrink the scope measure"
        meter.spend(size(out) if residual == 0 else before)
        return out

    def rec(f: Formula) -> Formula:
        if isinstance(f, Not):
            return Not(rec(f.sub))
        if isinstance(f, And):
            return And(rec(f.left), rec(f.right))
        if isinstance(f, BoxI):
            return BoxI(rec(f.sub))
        if isinstance(f, BoxF):
            return BoxF(rec(f.sub))
        if isinstance(f, CP):
            return CP(f.atoms, rec(f.sub))
        if isinstance(f, Dyn):
            return push(rec(f.announced), rec(f.sub))
        return f

    out = rec(phi)
    assert _dyn_scope_total(out) == 0
    return out
