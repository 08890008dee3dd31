"""Formula ASTs, signatures, terms, and the structural operations on them.

The primitive connectives are atoms, decision atoms, truth, negation,
conjunction, the two boxes, the ceteris-paribus modality, and the knowledge
update operator.  Everything else (or, implication, iff, diamonds, falsity)
is desugared into primitives at construction time; the printer re-sugars.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

ATOM_RE = re.compile(r"[a-z_][A-Za-z0-9_]*\Z")
VALUE_RE = re.compile(r"[a-z0-9_][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"boxI", "boxF", "diaI", "diaF", "true", "false"})
FRESH_PREFIX = "_"


class SignatureError(ValueError):
    """Ill-formed signature (bad names, duplicates, atom/value clash)."""


@dataclass(frozen=True)
class Signature:
    """The declared finite atom set and output-value set of a session."""

    atoms: tuple[str, ...]
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        atoms = tuple(self.atoms)
        values = tuple(self.values)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "values", values)
        if not values:
            raise SignatureError("value set must be nonempty")
        for a in atoms:
            if not ATOM_RE.match(a) or a in KEYWORDS:
                raise SignatureError(f"bad atom name {a!r}")
        for v in values:
            if not VALUE_RE.match(v) or v in KEYWORDS:
                raise SignatureError(f"bad value name {v!r}")
        if len(set(atoms)) != len(atoms):
            raise SignatureError("duplicate atom names")
        if len(set(values)) != len(values):
            raise SignatureError("duplicate value names")
        if set(atoms) & set(values):
            raise SignatureError("atom and value names must be disjoint")
        object.__setattr__(self, "_atom_pos", {a: i for i, a in enumerate(atoms)})

    def atom_index(self, name: str) -> int:
        try:
            return self._atom_pos[name]  # type: ignore[attr-defined]
        except KeyError:
            raise SignatureError(f"unknown atom {name!r}") from None

    def require_value(self, value: str) -> None:
        if value not in self.values:
            raise SignatureError(f"unknown value {value!r}")


class Formula:
    """Base class; all nodes are immutable values with structural equality."""

    __slots__ = ()

    def __str__(self) -> str:
        from .parser import render_formula

        return render_formula(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Dec(Formula):
    """Decision atom: the current classifier outputs this value here."""

    value: str

    def __repr__(self) -> str:
        return f"Dec({self.value!r})"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    sub: Formula

    def __repr__(self) -> str:
        return f"Not({self.sub!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class BoxI(Formula):
    """Necessity over input instances (classifier held fixed)."""

    sub: Formula

    def __repr__(self) -> str:
        return f"BoxI({self.sub!r})"


@dataclass(frozen=True, repr=False)
class BoxF(Formula):
    """Necessity over classifiers (input instance held fixed)."""

    sub: Formula

    def __repr__(self) -> str:
        return f"BoxF({self.sub!r})"


@dataclass(frozen=True, repr=False)
class CP(Formula):
    """Ceteris-paribus modality: sub holds at all instances agreeing on `atoms`."""

    atoms: tuple[str, ...]
    sub: Formula

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(sorted(set(self.atoms))))

    def __repr__(self) -> str:
        return f"CP({self.atoms!r}, {self.sub!r})"


@dataclass(frozen=True, repr=False)
class Dyn(Formula):
    """Knowledge update: sub holds after discarding classifiers that do not
    globally satisfy the announced constraint."""

    announced: Formula
    sub: Formula

    def __repr__(self) -> str:
        return f"Dyn({self.announced!r}, {self.sub!r})"


# Derived connectives, stored desugared.

def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def DiaI(sub: Formula) -> Formula:
    return Not(BoxI(Not(sub)))


def DiaF(sub: Formula) -> Formula:
    return Not(BoxF(Not(sub)))


def CPDia(atoms: Iterable[str], sub: Formula) -> Formula:
    return Not(CP(tuple(atoms), Not(sub)))


def Bottom() -> Formula:
    return Not(Top())


def big_and(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is truth."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else And(out, p)
    return Top() if out is None else out


def big_or(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is falsity."""
    out: Formula | None = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return Bottom() if out is None else out


def size(phi: Formula) -> int:
    """Number of AST nodes."""
    n = 0
    stack = [phi]
    while stack:
        f = stack.pop()
        n += 1
        if isinstance(f, Not):
            stack.append(f.sub)
        elif isinstance(f, And):
            stack.append(f.left)
            stack.append(f.right)
        elif isinstance(f, (BoxI, BoxF, CP)):
            stack.append(f.sub)
        elif isinstance(f, Dyn):
            stack.append(f.announced)
            stack.append(f.sub)
    return n


def subformulas(phi: Formula, plus: bool = False, sig: Signature | None = None) -> frozenset[Formula]:
    """All subformulas of phi (phi included); with `plus`, also every decision
    atom of the signature."""
    out: set[Formula] = set()

    def walk(f: Formula) -> None:
        if f in out:
            return
        out.add(f)
        if isinstance(f, Not):
            walk(f.sub)
        elif isinstance(f, And):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (BoxI, BoxF, CP)):
            walk(f.sub)
        elif isinstance(f, Dyn):
            walk(f.announced)
            walk(f.sub)

    walk(phi)
    if plus:
        if sig is None:
            raise ValueError("plus=True needs a signature for the decision atoms")
        out.update(Dec(v) for v in sig.values)
    return frozenset(out)


def atoms_of(phi: Formula) -> frozenset[str]:
    """Input atoms occurring in phi, including ceteris-paribus index sets."""
    out: set[str] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Atom):
            out.add(f.name)
        elif isinstance(f, Not):
            stack.append(f.sub)
        elif isinstance(f, And):
            stack.append(f.left)
            stack.append(f.right)
        elif isinstance(f, (BoxI, BoxF)):
            stack.append(f.sub)
        elif isinstance(f, CP):
            out.update(f.atoms)
            stack.append(f.sub)
        elif isinstance(f, Dyn):
            stack.append(f.announced)
            stack.append(f.sub)
    return frozenset(out)


def dec_values_of(phi: Formula) -> frozenset[str]:
    out: set[str] = set()
    for f in subformulas(phi):
        if isinstance(f, Dec):
            out.add(f.value)
    return frozenset(out)


def is_static(phi: Formula) -> bool:
    """True when phi contains no knowledge-update operator."""
    return not any(isinstance(f, Dyn) for f in subformulas(phi))


def validate_formula(phi: Formula, sig: Signature) -> None:
    """Raise SignatureError unless every atom and value of phi is declared."""
    for a in atoms_of(phi):
        sig.atom_index(a)
    for v in dec_values_of(phi):
        sig.require_value(v)


def conj_term(positive: Iterable[str], over: Iterable[str], sig: Signature) -> Formula:
    """Conjunction asserting each atom of `positive` and denying the rest of
    `over`, in signature order; empty `over` yields truth."""
    pos = frozenset(positive)
    ov = frozenset(over)
    if not pos <= ov:
        raise ValueError("positive atoms must be a subset of the atoms described")
    for a in ov:
        sig.atom_index(a)
    lits: list[Formula] = []
    for a in sig.atoms:
        if a in ov:
            lits.append(Atom(a) if a in pos else Not(Atom(a)))
    return big_and(lits)


def _expand_cp_ordered(xs: tuple[str, ...], phi: Formula) -> Formula:
    """Expansion of the ceteris-paribus modality over an ordered index set."""
    clauses: list[Formula] = []
    for ymask in range((1 << len(xs)) - 1, -1, -1):
        lits: list[Formula] = []
        for i, a in enumerate(xs):
            lits.append(Atom(a) if ymask >> i & 1 else Not(Atom(a)))
        guard = big_and(lits)
        clauses.append(Implies(guard, BoxI(Implies(guard, phi))))
    return big_and(clauses)


def expand_cp(xatoms: Iterable[str], phi: Formula, sig: Signature) -> Formula:
    """Rewrite [X]phi into its boxed case split over the valuations of X.

    The result mentions only negation, conjunction, and the instance box at
    the expanded position; it is exponential in |X|.
    """
    xset = frozenset(xatoms)
    for a in xset:
        sig.atom_index(a)
    xs = tuple(a for a in sig.atoms if a in xset)
    return _expand_cp_ordered(xs, phi)


@dataclass(frozen=True)
class Term:
    """A consistent conjunction of literals, the currency of explanations."""

    pos: frozenset[str]
    neg: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pos", frozenset(self.pos))
        object.__setattr__(self, "neg", frozenset(self.neg))
        if self.pos & self.neg:
            raise ValueError("a term cannot both assert and deny an atom")

    @property
    def atoms(self) -> frozenset[str]:
        return self.pos | self.neg

    def __len__(self) -> int:
        return len(self.pos) + len(self.neg)

    def is_empty(self) -> bool:
        return not self.pos and not self.neg

    def __le__(self, other: "Term") -> bool:
        return self.pos <= other.pos and self.neg <= other.neg

    def __lt__(self, other: "Term") -> bool:
        return self <= other and self != other

    def drop(self, atom: str) -> "Term":
        return Term(self.pos - {atom}, self.neg - {atom})

    def satisfied_by(self, state: frozenset[str]) -> bool:
        return self.pos <= state and not (self.neg & state)

    def as_formula(self, sig: Signature) -> Formula:
        lits: list[Formula] = []
        for a in sig.atoms:
            if a in self.pos:
                lits.append(Atom(a))
            elif a in self.neg:
                lits.append(Not(Atom(a)))
        return big_and(lits)

    def sort_key(self, sig: Signature) -> tuple:
        lits = tuple(
            (sig.atom_index(a), 0 if a in self.pos else 1)
            for a in sig.atoms
            if a in self.atoms
        )
        return (len(self), lits)

    @classmethod
    def from_formula(cls, phi: Formula) -> "Term":
        """Read a conjunction of literals back into a term; truth is empty."""
        pos: set[str] = set()
        neg: set[str] = set()

        def walk(f: Formula) -> None:
            if isinstance(f, Top):
                return
            if isinstance(f, Atom):
                pos.add(f.name)
            elif isinstance(f, Not) and isinstance(f.sub, Atom):
                neg.add(f.sub.name)
            elif isinstance(f, And):
                walk(f.left)
                walk(f.right)
            else:
                raise ValueError(f"not a conjunction of literals: {f!r}")

        walk(phi)
        return cls(frozenset(pos), frozenset(neg))


def all_terms(sig: Signature) -> Iterator[Term]:
    """Every term over the signature, ordered by size then literal order."""
    import itertools

    terms = []
    for choice in itertools.product((0, 1, 2), repeat=len(sig.atoms)):
        pos = frozenset(a for a, c in zip(sig.atoms, choice) if c == 1)
        neg = frozenset(a for a, c in zip(sig.atoms, choice) if c == 2)
        terms.append(Term(pos, neg))
    terms.sort(key=lambda t: t.sort_key(sig))
    return iter(terms)
