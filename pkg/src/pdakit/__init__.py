"""Pushdown automata with output tapes and colored stacks.

Simulation of nondeterministic pushdown transducers, colored automata and
their conversion to ideal shape, reversal, and stack-history analysis of
the three-part palindrome-pair function h3.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CENT, DOLLAR, LAMBDA, PDA, Z0, ComputationPath, Configuration, FunctionTable,
    TerminationViolation, Transducer, Transition, check_k_valued, check_unambiguous,
    enumerate_outputs, enumerate_paths, refines, tabulate, validate,
)
from .colored import (  # noqa: E402
    ColoredAutomaton, ColorVerdict, decide_colors, enumerate_colors, from_transducer,
)
from .normalize import NormalizationTrace, PassOrderViolation, is_ideal_shape, to_ideal_shape  # noqa: E402
from .reversal import ReversalCertificate, make_stack_emptying, reverse, reverse_input  # noqa: E402
from .h3 import MalformedInput, build_h3_machine, h3_oracle  # noqa: E402

__all__ = [
    "CENT", "DOLLAR", "LAMBDA", "Z0", "PDA", "Transducer", "Transition", "Configuration",
    "ComputationPath", "FunctionTable", "TerminationViolation", "validate", "enumerate_paths",
    "enumerate_outputs", "tabulate", "check_k_valued", "check_unambiguous", "refines",
    "ColoredAutomaton", "ColorVerdict", "enumerate_colors", "decide_colors", "from_transducer",
    "NormalizationTrace", "PassOrderViolation", "to_ideal_shape", "is_ideal_shape",
    "ReversalCertificate", "make_stack_emptying", "reverse", "reverse_input",
    "MalformedInput", "build_h3_machine", "h3_oracle",
]
