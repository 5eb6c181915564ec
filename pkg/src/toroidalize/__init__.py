"""Exact symbolic blowup sequences for monomial morphisms to a surface.

The package represents a dominant morphism from an n-fold to a surface,
near a chosen base point, as a finite set of exact local monomial
presentations.  It drives permissible codimension-2 blowups until the
pulled-back point ideal is principal everywhere, lifts the result through
the blowup of the base point, and certifies that every local form matches
a toroidal template.
"""

from .forms import (
    ChartContext,
    Form,
    FormError,
    MonomialPresentation,
    NoTemplateMatchError,
    NotPrincipalError,
    TemplateKind,
    ToroidalTemplate,
    classify_point,
    is_principal,
    match_template,
    monomial_free,
    monomial_pair,
    monomial_unit,
    nested,
    power_unit,
    transverse,
    transverse_product,
    transverse_unit,
)
from .invariants import (
    LocusReport,
    center_value,
    enumerate_centers,
    locus_report,
    one_point_invariant,
    two_point_invariant,
)
from .transform import (
    Center,
    CenterKind,
    ChartPoint,
    DescendantSet,
    PermissibilityError,
    blowup,
    blowup_monomial_free,
    blowup_monomial_pair,
    blowup_monomial_pair_3pt,
    blowup_transverse,
)
from .principalize import (
    NoCenterError,
    Scenario,
    StepBudgetExceededError,
    Trace,
    default_budget,
    make_scenario,
    run,
    step,
)
from .descent import (
    ClassifiedLeaf,
    EBranchData,
    LiftedPresentation,
    SurfaceChart,
    classify_global,
    classify_scenario,
    lift,
    reseed,
)
from .oracle import (
    BoundExceededError,
    SearchBound,
    SearchResult,
    exhaustive_search,
    oracle_principal,
    oracle_rank,
)

__version__ = "0.1.0"
