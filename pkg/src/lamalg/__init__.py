"""A typed lambda calculus with nonnegative-rational weighted sums of terms.

The package provides the term/type algebra and parser, an AC-aware rewrite
engine with pluggable strategies, type synthesis with a precision preorder,
an abstraction into a weight-free additive calculus, a translation into
System F with pairs, and a property-check harness over generated terms.
"""

from .additive import (
    Derivation,
    a_is_normal,
    a_normal_form,
    a_normalize,
    a_step,
    a_synthesize,
    derive,
    injective_matching,
    is_additive,
    lesssim,
    sigma,
    sqleq,
    strip_zero_parts,
)
from .fsysp import (
    CoercionError,
    FCheck,
    FNormalizeResult,
    FTerm,
    FType,
    TranslateError,
    Translation,
    coerce,
    f_alpha_eq,
    f_canonical,
    f_check,
    f_lessapprox,
    f_normal_form,
    f_normalize,
    f_parts,
    f_sqleq,
    f_step,
    f_term_str,
    f_type_str,
    translate,
    ttype,
    tunit,
)
from .oracles import (
    Agreement,
    additive_universe,
    check_f_sqleq,
    check_precedes,
    check_sqleq,
    f_sqleq_closure,
    f_term_size,
    f_term_universe,
    precedes_closure,
    sqleq_closure,
    term_size,
    type_universe,
)
from .parser import ParseError, parse_context, parse_term, parse_type, parse_unit
from .propgen import (
    CheckReport,
    FuzzResult,
    GenConfig,
    gen_typed_term,
    render_figures,
    run_checks,
    write_report,
)
from .rewrite import (
    ByGroup,
    DEFAULT_FUEL,
    FuelExhausted,
    Leftmost,
    NormalizeResult,
    RandomChoice,
    Rightmost,
    RuleId,
    Step,
    Strategy,
    is_normal,
    lincomb,
    normal_form,
    normalize,
    step,
)
from .syntax import (
    Abs,
    App,
    Arrow,
    Context,
    Forall,
    Scalar,
    Scaled,
    Sum,
    Term,
    TyAbs,
    TyApp,
    TySum,
    TyVar,
    Type,
    UnitType,
    Var,
    ZERO,
    ZERO_TYPE,
    Zero,
    ZeroType,
    alpha_eq,
    canonical,
    classify,
    term_str,
    type_equiv,
    type_str,
)
from .typecheck import TypingError, precedes, precedes_witness, sr_check, synthesize

__version__ = "0.1.0"
