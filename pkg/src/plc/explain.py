"""Objective and subjective classifier explanations: implicants, prime
implicants, abductive explanations, their knowledge-prefixed variants, and
exhaustive enumeration over all terms.
"""

from __future__ import annotations

from .models import MCM, ClassifierFn, PointedMCM
from .syntax import (
    BoxF,
    BoxI,
    CPDia,
    Dec,
    DiaI,
    Formula,
    Implies,
    Not,
    Signature,
    Term,
    all_terms,
    big_and,
    And,
)


def pimp_formula(term: Term, value: str, sig: Signature) -> Formula:
    """The modal statement that `term` is a prime implicant for `value`:
    it forces the value everywhere, and dropping any literal leaves an
    instance (agreeing on the remaining atoms) classified differently."""
    sig.require_value(value)
    for a in term.atoms:
        sig.atom_index(a)
    target = Dec(value)
    minimality = []
    for p in sig.atoms:
        if p not in term.atoms:
            continue
        rest = sorted(term.atoms - {p})
        # holding nothing fixed is the plain instance diamond
        minimality.append(CPDia(rest, Not(target)) if rest else DiaI(Not(target)))
    return BoxI(Implies(term.as_formula(sig), big_and([target] + minimality)))


def axp_formula(term: Term, value: str, sig: Signature) -> Formula:
    """Abductive explanation: a prime implicant the actual instance satisfies."""
    return And(term.as_formula(sig), pimp_formula(term, value, sig))


def subpimp_formula(term: Term, value: str, sig: Signature) -> Formula:
    return BoxF(pimp_formula(term, value, sig))


def subaxp_formula(term: Term, value: str, sig: Signature) -> Formula:
    return BoxF(axp_formula(term, value, sig))


def is_implicant(mcm: MCM, fn: ClassifierFn, term: Term, value: str) -> bool:
    """Every state satisfying the term is classified as `value`."""
    mcm.sig.require_value(value)
    for a in term.atoms:
        mcm.sig.atom_index(a)
    return all(fn(s) == value for s in mcm.states if term.satisfied_by(s))


def check_pimp(mcm: MCM, fn: ClassifierFn, term: Term, value: str) -> bool:
    """Prime implicant check, agreeing with model checking of pimp_formula.

    When no state satisfies the term the boxed implication is vacuous and the
    check is true; otherwise the term must be an implicant whose every
    one-literal weakening loses the implicant property.
    """
    if not any(term.satisfied_by(s) for s in mcm.states):
        return True
    if not is_implicant(mcm, fn, term, value):
        return False
    for p in term.atoms:
        if is_implicant(mcm, fn, term.drop(p), value):
            return False
    return True


def check_axp(point: PointedMCM, term: Term, value: str) -> bool:
    return term.satisfied_by(point.state) and check_pimp(
        point.model, point.function, term, value
    )


def check_subjective(point: PointedMCM, kind: str, term: Term, value: str) -> bool:
    """The knowledge-prefixed check: true iff it holds under every classifier
    the agent considers possible, at the actual instance."""
    if kind not in ("axp", "pimp"):
        raise ValueError("kind must be 'axp' or 'pimp'")
    mcm = point.model
    if kind == "axp" and not term.satisfied_by(point.state):
        return False
    return all(check_pimp(mcm, f, term, value) for f in mcm.functions)


def _prime_terms(mcm: MCM, fn: ClassifierFn, value: str) -> list[Term]:
    """All prime implicants of fn for value, smallest first.

    Any term containing a known smaller implicant cannot be prime, which
    short-circuits most of the 3^|atoms| candidates.
    """
    primes: list[Term] = []
    for term in all_terms(mcm.sig):
        if any(p < term for p in primes):
            continue
        if is_implicant(mcm, fn, term, value):
            primes.append(term)
    return primes


def enumerate_pimps(point: PointedMCM) -> list[Term]:
    """All prime implicants of the actual classification, smallest first."""
    return _prime_terms(point.model, point.function, point.function(point.state))


def enumerate_axps(point: PointedMCM) -> list[Term]:
    """All abductive explanations of the actual classification, ordered by
    size then literal order; never empty over a finite state set."""
    value = point.function(point.state)
    return [
        t
        for t in _prime_terms(point.model, point.function, value)
        if t.satisfied_by(point.state)
    ]


def enumerate_subjective(point: PointedMCM, kind: str = "axp") -> list[Term]:
    """All subjective explanations of the actual classification; may be empty
    (knowing several classifiers can leave no common minimal reason)."""
    value = point.function(point.state)
    return [
        t
        for t in all_terms(point.model.sig)
        if check_subjective(point, kind, t, value)
    ]
