"""Toolkit for the TREND temporal conceptual data modelling language."""

from .dlr import DlrKb, kb_satisfied, translate
from .errors import ParseError, SchemaError, TrendError
from .model import Schema, TransitionConstraint, build_schema, player, roles_of
from .reason import Bounds, check_implication, check_subsumption, find_witness
from .render import check_dot, to_dot
from .semantics import Semantics, TemporalState, Violation, check_state, load_state
from .text import check_text, parse_constraint, parse_schema, serialize_schema
from .verbal import name_to_surface, verbalize

__version__ = "0.1.0"

__all__ = [
    "ParseError", "SchemaError", "TrendError", "Schema", "TransitionConstraint",
    "build_schema", "player", "roles_of", "Semantics", "TemporalState", "Violation",
    "check_state", "load_state", "parse_schema", "serialize_schema", "check_text",
    "parse_constraint", "DlrKb", "translate", "kb_satisfied", "Bounds", "find_witness",
    "check_subsumption", "check_implication", "verbalize", "name_to_surface", "to_dot",
    "check_dot",
]
