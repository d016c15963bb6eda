"""Requirements formalization, validation, test generation, and runtime
monitoring over finite-trace temporal logic."""

from . import (
    authoring,
    automata,
    elicitation,
    ltlf,
    monitor,
    project,
    re_lang,
    reqstore,
    semcov,
    testgen,
)
from .automata import Dfa, compile_formula, equivalent, minimize, product
from .ltlf import Formula, Trace, Valuation, parse_formula
from .monitor import MonitorSession, ThresholdConfig
from .project import Project, load_project, save_project
from .re_lang import lower_to_ltlf, parse_re, render_re
from .reqstore import Candidate, Requirement, analyze

__version__ = "1.0.0"

__all__ = [
    "authoring",
    "automata",
    "elicitation",
    "ltlf",
    "monitor",
    "project",
    "re_lang",
    "reqstore",
    "semcov",
    "testgen",
    "Dfa",
    "compile_formula",
    "equivalent",
    "minimize",
    "product",
    "Formula",
    "Trace",
    "Valuation",
    "parse_formula",
    "MonitorSession",
    "ThresholdConfig",
    "Project",
    "load_project",
    "save_project",
    "lower_to_ltlf",
    "parse_re",
    "render_re",
    "Candidate",
    "Requirement",
    "analyze",
    "__version__",
]
