"""Exact finite models of Massey products over cyclic p-extensions.

Subpackages by layer: ``residue`` (Z/p^m arithmetic), ``groupring`` (R[G],
D^(k) operators and ideal duality), ``gcohom`` (low-degree cohomology and the
embedding-problem toolkit), ``unipotent`` (upper unitriangular groups and
rho^(k)), ``massey`` (defining systems and transgressions on Kummer models),
``graded`` (augmentation filtrations) and ``cli``.
"""

from .gcohom import Cochain, GModule, h2_class_eq, transgression
from .groupring import GroupRing, d_operator
from .massey import (NotProper, SyntheticKummerInstance, UModule, massey_class, massey_cocycle,
                     massey_via_transgression, proper_defining_system)
from .suites import SUITES, Overrides, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "Cochain", "GModule", "GroupRing", "NotProper", "Overrides", "SUITES", "SuiteReport",
    "SyntheticKummerInstance", "UModule", "d_operator", "h2_class_eq", "massey_class",
    "massey_cocycle", "massey_via_transgression", "proper_defining_system", "run_suite",
    "transgression",
]
