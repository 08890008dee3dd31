"""Reasoning toolkit for the product modal logic of binary-input classifiers.

A classifier that is only partially known is modelled as a set of candidate
classifiers over a set of input instances; one box quantifies over instances,
the other over candidates.  The package parses and prints formulas, model
checks them, decides satisfiability in fixed-signature and open-signature
modes, computes objective and subjective explanations, and applies
knowledge-update operators with their reduction laws.
"""

from .config import BudgetExceeded
from .explain import (
    axp_formula,
    check_axp,
    check_pimp,
    check_subjective,
    enumerate_axps,
    enumerate_pimps,
    enumerate_subjective,
    is_implicant,
    pimp_formula,
    subaxp_formula,
    subpimp_formula,
)
from .models import (
    MCM,
    MDM,
    ClassifierFn,
    MdmReport,
    ModelError,
    PointedMCM,
    QuasiMDM,
    all_states,
    build_mcm,
    generated_submodel,
    mcm_to_mdm,
    mdm_to_mcm,
    update_mcm,
    validate_mdm,
    world_point,
)
from .modelio import dumps_mcm, dumps_mdm, load_model, loads_model
from .parser import FormulaSyntaxError, parse_formula, render_formula
from .rewrite import cp_free, reduce_dynamic, simplify
from .semantics import EvalError, check_mcm, check_mdm, valid_in_mcm
from .solver import Witness, brute_force_sat, filtrate, sat_finite, sat_open, valid_finite
from .syntax import (
    CP,
    And,
    Atom,
    Bottom,
    BoxF,
    BoxI,
    CPDia,
    Dec,
    DiaF,
    DiaI,
    Dyn,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Signature,
    SignatureError,
    Term,
    Top,
    all_terms,
    atoms_of,
    big_and,
    big_or,
    conj_term,
    expand_cp,
    is_static,
    subformulas,
)
from .axioms import SCHEMA_NAMES, axiom_instances, random_formula

import types as _types

__all__ = [
    name
    for name, value in list(globals().items())
    if not name.startswith("_") and not isinstance(value, _types.ModuleType)
]
