import random

import pytest

from plc import (
    And,
    Atom,
    BoxF,
    BoxI,
    BudgetExceeded,
    CP,
    Dec,
    Dyn,
    Implies,
    Not,
    Signature,
    Top,
    check_mcm,
    cp_free,
    is_static,
    random_formula,
    reduce_dynamic,
    simplify,
    subformulas,
)
from plc.models import PointedMCM

import helpers

SIG = Signature(("p", "q"), ("0", "1"))


def test_reduction_axiom_shapes():
    p = Atom("p")
    chi = Atom("q")
    assert reduce_dynamic(Dyn(Top(), p)) == Implies(BoxI(Top()), p)
    assert simplify(reduce_dynamic(Dyn(Top(), p))) == p
    assert reduce_dynamic(Dyn(chi, Dec("1"))) == Implies(BoxI(chi), Dec("1"))
    got = reduce_dynamic(Dyn(chi, BoxF(p)))
    assert got == Implies(BoxI(chi), BoxF(Implies(BoxI(chi), p)))
    got_not = reduce_dynamic(Dyn(chi, Not(p)))
    assert got_not == Implies(BoxI(chi), Not(Implies(BoxI(chi), p)))
    got_and = reduce_dynamic(Dyn(chi, And(p, Dec("0"))))
    assert got_and == And(Implies(BoxI(chi), p), Implies(BoxI(chi), Dec("0")))
    got_boxi = reduce_dynamic(Dyn(chi, BoxI(p)))
    assert got_boxi == Implies(BoxI(chi), BoxI(Implies(BoxI(chi), p)))


def test_reduction_output_is_static():
    rng = random.Random(1)
    for _ in range(200):
        phi = random_formula(rng, SIG, 3, allow_cp=True, allow_dyn=True)
        out = reduce_dynamic(phi)
        assert is_static(out)
        assert not any(isinstance(f, Dyn) for f in subformulas(out))


def test_reduction_preserves_truth():
    rng = random.Random(2)
    for _ in range(150):
        phi = random_formula(rng, SIG, 3, allow_cp=True, allow_dyn=True)
        out = reduce_dynamic(phi)
        for _ in range(3):
            m = helpers.random_mcm(rng, sig=SIG, max_functions=3)
            for s in m.states:
                for f in m.functions:
                    pt = PointedMCM(m, s, f)
                    assert check_mcm(pt, phi) == check_mcm(pt, out)


def test_nested_announcements_reduce_deterministically():
    p = Atom("p")
    phi = Dyn(Atom("q"), Dyn(p, Dec("1")))
    out1 = reduce_dynamic(phi)
    out2 = reduce_dynamic(phi)
    assert out1 == out2 and is_static(out1)


def test_cp_under_announcement_is_expanded():
    phi = Dyn(Atom("q"), CP(("p",), Dec("1")))
    out = reduce_dynamic(phi)
    assert is_static(out)
    assert not any(isinstance(f, CP) for f in subformulas(out))


def test_cp_outside_announcement_is_kept():
    phi = CP(("p",), Dyn(Atom("q"), Dec("1")))
    out = reduce_dynamic(phi)
    assert is_static(out)
    assert any(isinstance(f, CP) for f in subformulas(out))


def test_reduction_budget_guard():
    # a large index set under an announcement blows the expansion up
    sig = Signature(("p", "q", "r"), ("0", "1"))
    phi = Dyn(Atom("p"), CP(("p", "q", "r"), Dec("1")))
    with pytest.raises(BudgetExceeded):
        reduce_dynamic(phi, max_nodes=10)


def test_simplify_examples():
    p = Atom("p")
    assert simplify(Not(Not(p))) == p
    assert simplify(And(Top(), p)) == p
    assert simplify(And(p, Top())) == p
    assert simplify(BoxI(Top())) == Top()
    assert simplify(BoxF(Not(Top()))) == Not(Top())
    assert simplify(Dyn(p, Top())) == Top()


def test_simplify_preserves_truth():
    rng = random.Random(3)
    for _ in range(150):
        phi = random_formula(rng, SIG, 3, allow_cp=True, allow_dyn=True)
        out = simplify(phi)
        m = helpers.random_mcm(rng, sig=SIG, max_functions=3)
        for s in m.states:
            for f in m.functions:
                pt = PointedMCM(m, s, f)
                assert check_mcm(pt, phi) == check_mcm(pt, out)


def test_cp_free_output_and_equivalence():
    rng = random.Random(4)
    for _ in range(60):
        phi = random_formula(rng, SIG, 3, allow_cp=True)
        out = cp_free(phi)
        assert not any(isinstance(f, CP) for f in subformulas(out))
        m = helpers.random_mcm(rng, sig=SIG, max_functions=3)
        for s in m.states:
            for f in m.functions:
                pt = PointedMCM(m, s, f)
                assert check_mcm(pt, phi) == check_mcm(pt, out)
