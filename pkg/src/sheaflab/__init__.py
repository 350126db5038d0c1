"""Finite sheaf models for intuitionistic higher-order logic.

The base spaces are finite posets with the Alexandrov topology; sheaves are
given as functors (stalks and transition maps), and sentences of a
many-sorted higher-order language get open sets as truth values.  A finite
Muchnik-degree layer supplies the degree poset, the Muchnik reals and the
``<=T`` atom.
"""
from .baire import PrefixCone, cone_relations, refine_disjoint
from .lang import parse_formula, parse_sort, parse_term, sort_check
from .modelio import load_fixture, load_model
from .muchnik import (
    DegreeStructure,
    ValueSystem,
    WeakDegree,
    acbp_check,
    eval_leT,
    muchnik_reals_sheaf,
    psi,
    psi_inv,
    wdeg_lattice,
    weak_reduces,
)
from .poset import Poset, all_opens, make_poset
from .semantics import Caps, Model, check_schema, eval_formula, eval_term, models
from .sheaf import (
    Section,
    Sheaf,
    function_sheaf,
    iso_check,
    make_sheaf,
    omega1,
    power_sheaf,
    product,
    simple_sheaf,
)

__version__ = "0.1.0"
