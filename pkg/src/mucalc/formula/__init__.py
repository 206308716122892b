"""Formula core: AST, grammar, normalization and binding analysis."""

from .syntax import (TOP, BOT, And, Bot, Box, Cover, Diamond, Formula, Mu,
                     NegVar, Nu, Or, Top, TopI, Var, alpha_canonical,
                     alpha_equal, and_, and_parts, big_and, big_or, box, cover,
                     dia, from_dict, from_json, is_top_literal, label_str, mu,
                     nu, nvar, or_, or_parts, pretty, sigma, sorted_formulas,
                     to_dict, to_json, to_source, topi, var)
from .parse import ParseError, parse
from .normalize import (CopyInfo, SubstResult, expand_covers, implies,
                        is_well_named, negate, normalize, occurs_unguarded,
                        substitute, substitute_tracked, to_cover_form,
                        to_well_named, well_named_violations)
from .binding import BindingInfo, alternation_depth, closure, priorities

__all__ = [
    "TOP", "BOT", "And", "Bot", "Box", "Cover", "Diamond", "Formula", "Mu",
    "NegVar", "Nu", "Or", "Top", "TopI", "Var", "alpha_canonical",
    "alpha_equal", "and_", "and_parts", "big_and", "big_or", "box", "cover",
    "dia", "from_dict", "from_json", "is_top_literal", "label_str", "mu",
    "nu", "nvar", "or_", "or_parts", "pretty", "sigma", "sorted_formulas",
    "to_dict", "to_json", "to_source", "topi", "var",
    "ParseError", "parse",
    "CopyInfo", "SubstResult", "expand_covers", "implies", "is_well_named",
    "negate", "normalize", "occurs_unguarded", "substitute",
    "substitute_tracked", "to_cover_form", "to_well_named",
    "well_named_violations",
    "BindingInfo", "alternation_depth", "closure", "priorities",
]
