"""Multi-classifier models, two-relation decision models, and the
transformations between them (building, updating, validating, quotienting).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _vecsem
from .syntax import (
    Formula,
    Signature,
    big_and,
    is_static,
    validate_formula,
)

State = frozenset  # a state is the set of atoms it makes true

_CONSTRAINT_TABLE_CAP = 2_097_152  # candidate functions enumerated per build


class ModelError(ValueError):
    """Ill-formed model or an operation unsupported on the given model."""


def state_of(*atoms: str) -> State:
    return frozenset(atoms)


def state_mask(sig: Signature, s: State) -> int:
    mask = 0
    for a in s:
        mask |= 1 << sig.atom_index(a)
    return mask


def mask_state(sig: Signature, mask: int) -> State:
    return frozenset(a for i, a in enumerate(sig.atoms) if mask >> i & 1)


def all_states(sig: Signature) -> list[State]:
    return [mask_state(sig, m) for m in range(1 << len(sig.atoms))]


class ClassifierFn:
    """A total map from the model's states to output values.

    Equality and hashing are by table only; the name is a label.
    """

    def __init__(self, name: str, table: Mapping[State, str]):
        self.name = name
        self._table = {frozenset(s): v for s, v in table.items()}
        self._items = tuple(sorted(self._table.items(), key=lambda kv: tuple(sorted(kv[0]))))

    def __call__(self, state: State) -> str:
        try:
            return self._table[state]
        except KeyError:
            raise ModelError(f"state {set(state) or '{}'} outside the domain of {self.name}") from None

    def items(self) -> tuple[tuple[State, str], ...]:
        return self._items

    @property
    def table(self) -> dict[State, str]:
        return dict(self._table)

    def renamed(self, name: str) -> "ClassifierFn":
        return ClassifierFn(name, self._table)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ClassifierFn) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return f"ClassifierFn({self.name!r}, {len(self._table)} states)"


class MCM:
    """A set of input instances together with a set of candidate classifiers.

    States are sorted by their atom bitmask and functions by (name, table);
    models are immutable after construction.  An empty function set is legal
    only with the `inconsistent` marker, which knowledge updates produce when
    every classifier is discarded; checking against such a model is an error.
    """

    def __init__(
        self,
        sig: Signature,
        states: Iterable[State],
        functions: Iterable[ClassifierFn],
        inconsistent: bool = False,
    ):
        self.sig = sig
        sts = [frozenset(s) for s in states]
        if not sts:
            raise ModelError("state set must be nonempty")
        for s in sts:
            for a in s:
                sig.atom_index(a)
        if len(set(sts)) != len(sts):
            raise ModelError("duplicate states")
        self.states: tuple[State, ...] = tuple(sorted(sts, key=lambda s: state_mask(sig, s)))
        fns = list(functions)
        if not fns and not inconsistent:
            raise ModelError("classifier set must be nonempty")
        if fns and inconsistent:
            raise ModelError("inconsistent marker requires an empty classifier set")
        sset = set(self.states)
        for f in fns:
            dom = set(s for s, _ in f.items())
            if dom != sset:
                raise ModelError(f"function {f.name} is not total on the state set")
            for _, v in f.items():
                sig.require_value(v)
        if len(set(fns)) != len(fns):
            raise ModelError("duplicate function tables")
        names = [f.name for f in fns]
        if len(set(names)) != len(names):
            raise ModelError("duplicate function names")
        self.functions: tuple[ClassifierFn, ...] = tuple(
            sorted(fns, key=lambda f: (f.name, tuple(v for _, v in f.items())))
        )
        self.inconsistent = inconsistent
        self._ext_cache: dict[Formula, int] = {}
        self._key_cache: tuple | None = None

    def key(self) -> tuple:
        """Canonical structural key (used for memoizing updates)."""
        if self._key_cache is None:
            self._key_cache = (
                self.sig.atoms,
                self.sig.values,
                tuple(state_mask(self.sig, s) for s in self.states),
                tuple((f.name, f.items()) for f in self.functions),
                self.inconsistent,
            )
        return self._key_cache

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MCM) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def function_named(self, name: str) -> ClassifierFn:
        for f in self.functions:
            if f.name == name:
                return f
        raise ModelError(f"no function named {name!r}")

    def points(self) -> list[tuple[State, ClassifierFn]]:
        return [(s, f) for s in self.states for f in self.functions]

    def point(self, state: State, function: ClassifierFn | str) -> "PointedMCM":
        fn = self.function_named(function) if isinstance(function, str) else function
        return PointedMCM(self, frozenset(state), fn)

    def __repr__(self) -> str:
        return f"MCM({len(self.states)} states, {len(self.functions)} functions)"


class PointedMCM:
    """A model with a designated actual state and actual classifier."""

    def __init__(self, model: MCM, state: State, function: ClassifierFn):
        if model.inconsistent:
            raise ModelError("cannot point a model whose classifier set is empty")
        if state not in set(model.states):
            raise ModelError("designated state is not in the model")
        if function not in set(model.functions):
            raise ModelError("designated function is not in the model")
        self.model = model
        self.state = state
        self.function = function

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PointedMCM)
            and self.model == other.model
            and self.state == other.state
            and self.function == other.function
        )

    def __hash__(self) -> int:
        return hash((self.model, self.state, self.function))

    def __repr__(self) -> str:
        return f"PointedMCM(state={set(self.state) or '{}'}, function={self.function.name})"


def build_mcm(
    sig: Signature,
    states: str | Iterable[State] = "all",
    functions: Iterable[ClassifierFn] | None = None,
    constraints: Sequence[Formula | str] | None = None,
) -> MCM:
    """Construct a model from explicit tables or from constraint formulas.

    In constraint mode a candidate function is kept iff its singleton model
    satisfies every constraint at every state; candidates are enumerated by
    brute force over all value assignments, so the state set must stay small.
    """
    if (functions is None) == (constraints is None):
        raise ValueError("give exactly one of functions= or constraints=")
    sts = all_states(sig) if states == "all" else [frozenset(s) for s in states]
    if functions is not None:
        return MCM(sig, sts, functions)

    from .parser import parse_formula

    phis: list[Formula] = []
    for c in constraints or []:
        phi = parse_formula(c, sig) if isinstance(c, str) else c
        if not is_static(phi):
            raise ModelError("constraints must not contain update operators")
        validate_formula(phi, sig)
        phis.append(phi)
    if states != "all" and set(sts) != set(all_states(sig)):
        warnings.warn(
            "constraint mode over a partial state set: ceteris-paribus "
            "constraints that walk intermediate states may not mean what you want",
            stacklevel=2,
        )
    combined = big_and(phis)
    n = len(sts)
    nv = len(sig.values)
    total = nv**n
    if total > _CONSTRAINT_TABLE_CAP:
        raise ModelError(f"constraint mode would enumerate {total} candidate functions")
    sts_sorted = sorted(sts, key=lambda s: state_mask(sig, s))
    masks = [state_mask(sig, s) for s in sts_sorted]
    kept: list[ClassifierFn] = []
    chunk = 65536
    gen = itertools.product(range(nv), repeat=n)
    while True:
        rows = list(itertools.islice(gen, chunk))
        if not rows:
            break
        batch = np.asarray(rows, dtype=np.int8).reshape(len(rows), 1, n)
        truth = _vecsem.grid_truth(combined, sig.atoms, sig.values, masks, batch)
        ok = truth[:, :, 0].all(axis=1)
        for local_i in np.nonzero(ok)[0]:
            row = rows[int(local_i)]
            table = {s: sig.values[row[j]] for j, s in enumerate(sts_sorted)}
            kept.append(ClassifierFn(f"f{len(kept)}", table))
    if not kept:
        raise ModelError("no candidate function satisfies the constraints")
    return MCM(sig, sts_sorted, kept)


_UPDATE_MEMO: dict[tuple, MCM] = {}
_UPDATE_MEMO_CAP = 8192


def update_mcm(mcm: MCM, phi: Formula) -> MCM:
    """Discard every classifier that does not globally satisfy phi.

    The constraint is evaluated in the original model; the state set is
    unchanged.  If nothing survives, the result carries the
    inconsistent-knowledge marker instead of being rejected.
    """
    if mcm.inconsistent:
        raise ModelError("cannot update a model whose classifier set is empty")
    validate_formula(phi, mcm.sig)
    key = (mcm.key(), phi)
    hit = _UPDATE_MEMO.get(key)
    if hit is not None:
        return hit

    from .semantics import extension_mask

    ext = extension_mask(mcm, phi)
    ns, nf = len(mcm.states), len(mcm.functions)
    survivors = []
    for fi, f in enumerate(mcm.functions):
        if all(ext >> (si * nf + fi) & 1 for si in range(ns)):
            survivors.append(f)
    out = MCM(mcm.sig, mcm.states, survivors, inconsistent=not survivors)
    if len(_UPDATE_MEMO) >= _UPDATE_MEMO_CAP:
        _UPDATE_MEMO.clear()
    _UPDATE_MEMO[key] = out
    return out


class QuasiMDM:
    """Kripke model over two equivalence relations with one decision per world.

    Constraints checked here are purely structural (partitions cover the
    worlds, valuations are declared); the semantic constraints are the
    validator's business.
    """

    def __init__(
        self,
        sig: Signature,
        worlds: Iterable,
        valuation: Mapping,
        rel_i: Iterable[Iterable],
        rel_f: Iterable[Iterable],
    ):
        self.sig = sig
        self.worlds = tuple(worlds)
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("duplicate world ids")
        if not self.worlds:
            raise ModelError("world set must be nonempty")
        val = {}
        for w in self.worlds:
            if w not in valuation:
                raise ModelError(f"world {w!r} has no valuation")
            atoms, dec = valuation[w]
            atoms = frozenset(atoms)
            for a in atoms:
                sig.atom_index(a)
            sig.require_value(dec)
            val[w] = (atoms, dec)
        self.valuation = val
        self.rel_i = self._partition(rel_i, "relI")
        self.rel_f = self._partition(rel_f, "relF")
        self._i_index = {w: bi for bi, block in enumerate(self.rel_i) for w in block}
        self._f_index = {w: bi for bi, block in enumerate(self.rel_f) for w in block}
        self._ext_cache: dict[Formula, int] = {}

    def _partition(self, blocks: Iterable[Iterable], label: str) -> tuple[frozenset, ...]:
        out = tuple(frozenset(b) for b in blocks)
        seen: set = set()
        for b in out:
            if not b:
                raise ModelError(f"{label} has an empty block")
            if seen & b:
                raise ModelError(f"{label} blocks overlap")
            seen |= b
        if seen != set(self.worlds):
            raise ModelError(f"{label} does not cover the world set exactly")
        return out

    def atoms_val(self, w) -> frozenset:
        return self.valuation[w][0]

    def dec_val(self, w) -> str:
        return self.valuation[w][1]

    def i_class(self, w) -> frozenset:
        return self.rel_i[self._i_index[w]]

    def f_class(self, w) -> frozenset:
        return self.rel_f[self._f_index[w]]

    def i_index(self, w) -> int:
        return self._i_index[w]

    def f_index(self, w) -> int:
        return self._f_index[w]

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.worlds)} worlds)"


class MDM(QuasiMDM):
    """A quasi model additionally expected to satisfy functionality (C2)."""


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class MdmReport:
    checks: tuple[ConstraintCheck, ...]

    def check(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def passed(self, name: str) -> bool:
        return self.check(name).passed

    @property
    def ok_quasi(self) -> bool:
        return all(self.passed(n) for n in ("C1", "C3", "C4", "C5"))

    @property
    def ok_mdm(self) -> bool:
        return self.ok_quasi and self.passed("C2")

    @property
    def ok_c6(self) -> bool:
        return self.passed("C6")


def validate_mdm(M: QuasiMDM) -> MdmReport:
    """Per-constraint report: commutation, functionality, instance agreement,
    decision uniqueness/existence, and the trivial-intersection property."""
    checks: list[ConstraintCheck] = []

    # C1: the two relations commute.
    c1_witness = None
    for w in M.worlds:
        via_if = set()
        for u in M.i_class(w):
            via_if |= M.f_class(u)
        via_fi = set()
        for u in M.f_class(w):
            via_fi |= M.i_class(u)
        diff = via_if ^ via_fi
        if diff:
            c1_witness = (w, sorted(diff, key=repr)[0])
            break
    checks.append(ConstraintCheck("C1", c1_witness is None, c1_witness))

    # C2: same instance valuation within a classifier forces the same decision.
    c2_witness = None
    groups: dict[tuple, tuple] = {}
    for w in M.worlds:
        k = (M.i_index(w), M.atoms_val(w))
        if k in groups:
            v = groups[k]
            if M.dec_val(v) != M.dec_val(w):
                c2_witness = (v, w)
                break
        else:
            groups[k] = w
    checks.append(ConstraintCheck("C2", c2_witness is None, c2_witness))

    # C3: worlds for the same instance agree on the input atoms.
    c3_witness = None
    for block in M.rel_f:
        ws = sorted(block, key=repr)
        for u in ws[1:]:
            if M.atoms_val(u) != M.atoms_val(ws[0]):
                c3_witness = (ws[0], u)
                break
        if c3_witness:
            break
    checks.append(ConstraintCheck("C3", c3_witness is None, c3_witness))

    # C4/C5 hold structurally: exactly one decision value is stored per world.
    checks.append(ConstraintCheck("C4", True, None))
    checks.append(ConstraintCheck("C5", True, None))

    # C6: the relations intersect in the identity.
    c6_witness = None
    cells: dict[tuple[int, int], tuple] = {}
    for w in M.worlds:
        k = (M.i_index(w), M.f_index(w))
        if k in cells:
            c6_witness = (cells[k], w)
            break
        cells[k] = w
    checks.append(ConstraintCheck("C6", c6_witness is None, c6_witness))

    return MdmReport(tuple(checks))


def mcm_to_mdm(mcm: MCM) -> MDM:
    """The grid image: one world per (state, function) pair, rows related by
    shared function, columns by shared state."""
    if mcm.inconsistent:
        raise ModelError("cannot convert a model whose classifier set is empty")
    worlds = [(si, fi) for si in range(len(mcm.states)) for fi in range(len(mcm.functions))]
    rel_i = [
        frozenset((si, fi) for si in range(len(mcm.states)))
        for fi in range(len(mcm.functions))
    ]
    rel_f = [
        frozenset((si, fi) for fi in range(len(mcm.functions)))
        for si in range(len(mcm.states))
    ]
    valuation = {
        (si, fi): (mcm.states[si], mcm.functions[fi](mcm.states[si]))
        for (si, fi) in worlds
    }
    return MDM(mcm.sig, worlds, valuation, rel_i, rel_f)


def world_point(mcm: MCM, world: tuple[int, int]) -> PointedMCM:
    """The point a grid-image world stands for."""
    si, fi = world
    return PointedMCM(mcm, mcm.states[si], mcm.functions[fi])


def generated_submodel(M: QuasiMDM, w0) -> QuasiMDM:
    """Restriction to the worlds reachable from w0 through either relation."""
    if w0 not in set(M.worlds):
        raise ModelError(f"world {w0!r} is not in the model")
    reached = {w0}
    frontier = [w0]
    while frontier:
        w = frontier.pop()
        for u in M.i_class(w) | M.f_class(w):
            if u not in reached:
                reached.add(u)
                frontier.append(u)
    worlds = [w for w in M.worlds if w in reached]
    rel_i = [b & reached for b in M.rel_i if b & reached]
    rel_f = [b & reached for b in M.rel_f if b & reached]
    val = {w: M.valuation[w] for w in worlds}
    return type(M)(M.sig, worlds, val, rel_i, rel_f)


def _lift_partition(
    base_index: dict, classes: list[list], label: str
) -> tuple[list[frozenset], dict]:
    """Existential lift of a partition along a quotient map.

    `base_index` maps old items to their old block id; `classes` lists the new
    classes as lists of old items.  The lifted relation must again be an
    equivalence (it is, for models satisfying the constraints); otherwise the
    quotient is rejected.
    """
    touched: dict[int, set[int]] = {}
    for ci, members in enumerate(classes):
        for m in members:
            touched.setdefault(base_index[m], set()).add(ci)
    # connected components of the co-touch graph
    parent = list(range(len(classes)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    raw_pairs: set[tuple[int, int]] = set()
    for group in touched.values():
        gs = sorted(group)
        for a in gs:
            for b in gs:
                raw_pairs.add((a, b))
            union(gs[0], a)
    blocks: dict[int, list[int]] = {}
    for ci in range(len(classes)):
        blocks.setdefault(find(ci), []).append(ci)
    # the existential relation must already be transitive
    for members in blocks.values():
        for a in members:
            for b in members:
                if (a, b) not in raw_pairs:
                    raise ModelError(
                        f"quotient of {label} is not an equivalence relation; "
                        "the model cannot be normalized as a whole"
                    )
    out = [frozenset(members) for members in blocks.values()]
    new_index = {}
    for bi, members in enumerate(out):
        for ci in members:
            new_index[ci] = bi
    return out, new_index


def mdm_to_mcm(M: QuasiMDM) -> tuple[MCM, dict]:
    """Collapse a valid decision model to a multi-classifier model.

    First merges equal-valuation worlds inside each classifier row, then
    merges classifier rows that induce the same function, and finally reads
    the surviving grid off as a model.  Returns the model and a map sending
    each original world to its (state, function) point.  Raises ModelError if
    the constraints fail or the quotient does not form a complete grid (which
    can only happen for disconnected inputs).
    """
    report = validate_mdm(M)
    bad = [n for n in ("C1", "C2", "C3", "C4", "C5") if not report.passed(n)]
    if bad:
        details = "; ".join(
            f"{n} fails at {report.check(n).witness}" for n in bad
        )
        raise ModelError(f"not a valid decision model: {details}")

    # Quotient 1: merge worlds with equal valuation within one classifier row.
    block_of: dict = {}
    blocks1: list[list] = []
    keys: dict[tuple, int] = {}
    for w in M.worlds:
        k = (M.i_index(w), M.valuation[w])
        if k not in keys:
            keys[k] = len(blocks1)
            blocks1.append([])
        bi = keys[k]
        blocks1[bi].append(w)
        block_of[w] = bi
    n1 = len(blocks1)
    i1_of = {bi: M.i_index(blocks1[bi][0]) for bi in range(n1)}
    val1 = {bi: M.valuation[blocks1[bi][0]] for bi in range(n1)}
    rel_f1_blocks, f1_of = _lift_partition(
        {w: M.f_index(w) for w in M.worlds},
        blocks1,
        "the instance relation",
    )

    # Quotient 2: merge rows that induce the same function, instance-wise.
    rows: dict[int, list[int]] = {}
    for bi in range(n1):
        rows.setdefault(i1_of[bi], []).append(bi)
    row_ids = sorted(rows)

    def rows_compatible(ra: int, rb: int) -> bool:
        for a in rows[ra]:
            for b in rows[rb]:
                if val1[a][0] == val1[b][0] and val1[a][1] != val1[b][1]:
                    return False
        return True

    compat = {
        (ra, rb): rows_compatible(ra, rb) for ra in row_ids for rb in row_ids
    }
    sim_pairs: set[tuple[int, int]] = set()
    for a in range(n1):
        for b in range(n1):
            if val1[a][0] == val1[b][0] and compat[(i1_of[a], i1_of[b])]:
                sim_pairs.add((a, b))
    # group into classes; verify transitivity of the merge relation
    class_of: dict[int, int] = {}
    classes2: list[list[int]] = []
    for a in range(n1):
        if a in class_of:
            continue
        members = [b for b in range(n1) if (a, b) in sim_pairs]
        member_set = set(members)
        for m in members:
            if {b for b in range(n1) if (m, b) in sim_pairs} != member_set:
                raise ModelError(
                    "duplicate-classifier merge is not an equivalence; "
                    "the model cannot be normalized as a whole"
                )
        ci = len(classes2)
        classes2.append(members)
        for m in members:
            class_of[m] = ci
    rel_i2_blocks, i2_of = _lift_partition(i1_of, classes2, "the classifier relation")
    rel_f2_blocks, f2_of = _lift_partition(f1_of, classes2, "the instance relation")
    val2 = {}
    for ci, members in enumerate(classes2):
        vals = {val1[m] for m in members}
        if len(vals) != 1:
            raise ModelError("merged worlds disagree on their valuation")
        val2[ci] = val1[members[0]]

    # Read the grid off: instance classes become states, classifier classes
    # become functions.
    state_of_f: dict[int, State] = {}
    for fb, members in enumerate(rel_f2_blocks):
        states = {val2[ci][0] for ci in members}
        if len(states) != 1:
            raise ModelError("an instance class carries two input valuations")
        state_of_f[fb] = next(iter(states))
    if len(set(state_of_f.values())) != len(state_of_f):
        raise ModelError(
            "two distinct instance classes share one input valuation; "
            "the model is not isomorphic to a multi-classifier model"
        )
    cell: dict[tuple[int, int], int] = {}
    for ci in range(len(classes2)):
        k = (i2_of[ci], f2_of[ci])
        if k in cell:
            raise ModelError("grid read-off found a doubly-occupied cell")
        cell[k] = ci
    tables: list[dict[State, str]] = []
    for ib in range(len(rel_i2_blocks)):
        table: dict[State, str] = {}
        for fb in range(len(rel_f2_blocks)):
            if (ib, fb) not in cell:
                raise ModelError(
                    "incomplete grid (disconnected model); take the generated "
                    "submodel of a designated world first"
                )
            table[state_of_f[fb]] = val2[cell[(ib, fb)]][1]
        tables.append(table)
    order = sorted(range(len(tables)), key=lambda i: tuple(sorted((tuple(sorted(s)), v) for s, v in tables[i].items())))
    fns = [ClassifierFn(f"g{rank}", tables[ib]) for rank, ib in enumerate(order)]
    if len(set(fns)) != len(fns):
        raise ModelError("grid read-off produced duplicate functions")
    mcm = MCM(M.sig, list(state_of_f.values()), fns)
    fn_by_row = {ib: fns[rank] for rank, ib in enumerate(order)}
    mapping = {}
    for w in M.worlds:
        ci = class_of[block_of[w]]
        mapping[w] = (state_of_f[f2_of[ci]], fn_by_row[i2_of[ci]])
    return mcm, mapping
