import random

import pytest

from plc import (
    CP,
    Atom,
    BoxF,
    BoxI,
    Dec,
    Dyn,
    EvalError,
    Iff,
    Implies,
    MDM,
    Not,
    QuasiMDM,
    Signature,
    check_mcm,
    check_mdm,
    expand_cp,
    mcm_to_mdm,
    parse_formula,
    random_formula,
    valid_in_mcm,
)
from plc.models import PointedMCM, world_point
from plc.syntax import big_or

import helpers


def test_satisfaction_clauses_basics():
    rng = random.Random(1)
    m = helpers.random_mcm(rng)
    for s in m.states:
        for f in m.functions:
            pt = PointedMCM(m, s, f)
            for a in m.sig.atoms:
                assert check_mcm(pt, Atom(a)) == (a in s)
            assert check_mcm(pt, Dec(f(s)))
            # exactly one decision atom holds per point
            assert sum(check_mcm(pt, Dec(v)) for v in m.sig.values) == 1


def test_every_point_satisfies_some_decision_atom():
    rng = random.Random(2)
    for _ in range(20):
        m = helpers.random_mcm(rng)
        at_least = big_or(Dec(v) for v in m.sig.values)
        assert valid_in_mcm(m, at_least)


def test_example_constraint_is_model_valid(ex_model):
    assert valid_in_mcm(ex_model, parse_formula("~an -> =0", ex_model.sig))


def test_independence_axioms_hold_everywhere():
    rng = random.Random(3)
    for _ in range(20):
        m = helpers.random_mcm(rng)
        for a in m.sig.atoms:
            assert valid_in_mcm(m, Implies(Atom(a), BoxF(Atom(a))))
            assert valid_in_mcm(m, Implies(Not(Atom(a)), BoxF(Not(Atom(a)))))


def test_box_commutation_holds_everywhere():
    rng = random.Random(4)
    for _ in range(20):
        m = helpers.random_mcm(rng)
        phi = random_formula(rng, m.sig, 2)
        assert valid_in_mcm(m, Iff(BoxI(BoxF(phi)), BoxF(BoxI(phi))))


def test_s5_laws_for_both_boxes():
    rng = random.Random(5)
    for _ in range(20):
        m = helpers.random_mcm(rng)
        phi = random_formula(rng, m.sig, 2)
        for box in (BoxI, BoxF):
            assert valid_in_mcm(m, Implies(box(phi), phi))
            assert valid_in_mcm(m, Implies(box(phi), box(box(phi))))
            assert valid_in_mcm(m, Implies(Not(box(phi)), box(Not(box(phi)))))


def test_cp_clause_matches_its_expansion():
    rng = random.Random(6)
    for _ in range(40):
        m = helpers.random_mcm(rng, max_functions=3)
        phi = random_formula(rng, m.sig, 2)
        xs = tuple(a for a in m.sig.atoms if rng.random() < 0.5)
        direct = CP(xs, phi)
        expanded = expand_cp(xs, phi, m.sig)
        for s in m.states:
            for f in m.functions:
                pt = PointedMCM(m, s, f)
                assert check_mcm(pt, direct) == check_mcm(pt, expanded)


def test_cp_direct_clause_quantifier():
    sig = Signature(("p", "q"), ("0", "1"))
    from plc import ClassifierFn, build_mcm

    f = ClassifierFn("f", {s: ("1" if "p" in s else "0") for s in helpers.all_states(sig)})
    m = build_mcm(sig, "all", functions=[f])
    # [p](=1) at {p,q}: all states agreeing on p are classified 1
    pt = m.point(frozenset({"p", "q"}), "f")
    assert check_mcm(pt, CP(("p",), Dec("1")))
    assert not check_mcm(pt, CP(("q",), Dec("1")))


def test_checking_inconsistent_model_is_an_error():
    from plc import ClassifierFn, MCM, update_mcm

    sig = Signature(("p",), ("0", "1"))
    f = ClassifierFn("f", {frozenset(): "0", frozenset({"p"}): "1"})
    m = MCM(sig, helpers.all_states(sig), [f])
    empty = update_mcm(m, parse_formula("=0 & =1", sig))
    from plc.semantics import extension_mask

    with pytest.raises(EvalError):
        extension_mask(empty, Atom("p"))


def test_mdm_singleton_reflexive():
    sig = Signature(("p",), ("0", "1"))
    M = MDM(sig, ["w"], {"w": (frozenset({"p"}), "1")}, [["w"]], [["w"]])
    assert check_mdm(M, "w", parse_formula("boxI p & boxF p", sig))


def test_mdm_rejects_cp_and_dyn():
    sig = Signature(("p",), ("0", "1"))
    M = MDM(sig, ["w"], {"w": (frozenset({"p"}), "1")}, [["w"]], [["w"]])
    with pytest.raises(EvalError):
        check_mdm(M, "w", CP(("p",), Atom("p")))
    with pytest.raises(EvalError):
        check_mdm(M, "w", Dyn(Atom("p"), Atom("p")))


def test_checkers_agree_on_grid_images():
    rng = random.Random(7)
    for _ in range(30):
        m = helpers.random_mcm(rng)
        M = mcm_to_mdm(m)
        phi = random_formula(rng, m.sig, 3)
        for psi in _some_subformulas(phi):
            for w in M.worlds:
                assert check_mdm(M, w, psi) == check_mcm(world_point(m, w), psi)


def _some_subformulas(phi):
    from plc import subformulas

    return sorted(subformulas(phi), key=repr)[:6]


def test_quasi_model_can_break_functionality():
    # two worlds, same valuation, same classifier row, different decisions:
    # a functionality instance fails, which no true decision model allows
    sig = Signature(("p",), ("0", "1"))
    Q = QuasiMDM(
        sig,
        ["u", "v"],
        {"u": (frozenset({"p"}), "1"), "v": (frozenset({"p"}), "0")},
        [["u", "v"]],
        [["u"], ["v"]],
    )
    from plc import validate_mdm

    rep = validate_mdm(Q)
    assert rep.ok_quasi and not rep.passed("C2")
    funct = parse_formula("(p & =1) -> boxI (p -> =1)", sig)
    assert not check_mdm(Q, "u", funct)


def test_dynamic_clause_on_mcm():
    rng = random.Random(8)
    for _ in range(20):
        m = helpers.random_mcm(rng, max_functions=3)
        ann = random_formula(rng, m.sig, 2)
        body = random_formula(rng, m.sig, 2)
        phi = Dyn(ann, body)
        from plc import update_mcm

        updated = update_mcm(m, ann)
        for s in m.states:
            for f in m.functions:
                pt = PointedMCM(m, s, f)
                guard = check_mcm(pt, BoxI(ann))
                want = True
                if guard:
                    want = check_mcm(PointedMCM(updated, s, f), body)
                assert check_mcm(pt, phi) == want
