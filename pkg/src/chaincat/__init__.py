"""Chains of finite modules over Z/p^e and direct-sum decisions for them."""

from .arith import ChainRing, ResidueMatrix, howell_form, solve_kernel, solve_particular
from .chains import (
    ChainObject,
    chain_object_new,
    direct_sum_objects,
    is_in_U_n,
    random_object,
    s_n,
    s_padding,
    split_chain,
    zero_object,
)
from .decompose import (
    ClassDigraph,
    DecisionReport,
    decide_iso,
    decide_iso_general,
    extract_digraph,
    oracle_iso,
    swap_search,
    verify_iso,
)
from .endo import (
    EndoRing,
    all_ideals_I,
    associated_component,
    ideal_checklist,
    endo_ring,
    ideal_I,
    is_completely_prime,
    jacobson_radical,
    max_ideals_of_sum,
    semisimple_report,
    verify_ideal_comparison,
)
from .errors import CapExceeded, ChainCatError, InputError, TheoremViolation
from .fmodule import (
    FModule,
    QuotientModule,
    Submodule,
    direct_sum,
    module_new,
    quotient,
    submodule_from_generators,
    submodule_intersect,
    submodule_leq,
    submodule_sum,
)
from .homs import ClassTable, HomElement, HomGroup, class_partition, hom_chain, induced_map, same_class

__all__ = [name for name in dir() if not name.startswith("_") and name not in {"arith", "chains", "decompose", "endo", "errors", "fmodule", "homs"}]
