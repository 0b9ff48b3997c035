"""Exact digit-defined functions: positional systems, digit maps, Salem-type series."""

from .errors import DigitfnError, DomainError, NonPeriodicError, RefusalError, ValidationError
from .numbers import (
    CantorBase,
    DigitString,
    NumberSystem,
    QMatrix,
    canonicalize,
    cantor_dual,
    cylinder,
    from_digits,
    parse_digits,
    representations,
    to_digits,
)
from .maps import (
    BlockPermutation,
    LambdaSFunction,
    Shape,
    TableMap,
    bush_wunderlich,
    builtin_map,
    compose,
    evaluate,
    f_m,
    fplus,
    fplusinv,
    group_enumerate,
    inverse,
    invariant_set_dimension,
    table_map_fij,
    ternary_f,
)
from .salem import PMatrix, SalemParams, check_conditions, cylinder_ratio, eval_F_cantor, eval_F_negaQ, eval_F_tilde, salem_eval

__version__ = "0.1.0"
