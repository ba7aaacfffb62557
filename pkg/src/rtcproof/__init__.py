"""Proof kernel, cyclic-proof checker, and bounded prover for transitive closure logic."""

from .errors import RtcError
from .kernel import (RuleId, RuleInstance, RuleParams, check_rule_instance,
                     expected_premises, rule_instance)
from .proofgraph import (GraphBuilder, ProofGraph, ProofNode, TraceStep,
                         trace_relation, validate_structure)
from .prooffile import (ProofFile, TheoryFile, load_theory, parse_proof,
                        parse_theory, serialize_proof)
from .prover import Proved, Refuted, SearchConfig, Unknown, expand_fair, prove
from .semantics import (FiniteModel, degree, descent_witness, evaluate,
                        evaluate_warshall, find_counter_model)
from .syntax import (Formula, Sequent, Signature, Term, alpha_eq, canon,
                     free_vars, parse_formula, parse_sequent, pretty,
                     pretty_sequent, substitute)
from .tracecheck import (CycleReport, check_by_path_enumeration,
                         check_global_trace_condition, enumerate_basic_cycles,
                         is_non_overlapping)
from .translate import (BetaConfig, beta_translate, derive_induction,
                        encode_rtc2, explicit_to_cyclic)

__version__ = "0.1.0"
