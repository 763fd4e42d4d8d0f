"""String-diagram rewriting for free Markov categories with a finite stochastic backend.

Diagrams are hypergraph cospans (:mod:`.diagram`), contracted along
non-signalling feedback (:mod:`.contraction`) and interpreted as stochastic
matrices (:mod:`.interp`, :mod:`.stoch`) where the causal trace and combs
(:mod:`.combs`) live.
"""
from .combs import Comb, comb_from_disintegration, comb_from_nonsignalling, ctx_equiv, ext_equiv, extension, insert, optic_equiv, slide
from .contraction import TracePartition, contract, contract_k, is_nonsignalling
from .diagram import Diagram, canonical_form, compose, copy, delete, equal, identity, normalize, swap, tensor, validate
from .dsl import format_program, parse
from .errors import (
    AuditFailure,
    BoundaryMismatch,
    Cyclic,
    DimensionMismatch,
    DSLError,
    EliminableBox,
    EvaluationError,
    InvalidDiagram,
    LabelClash,
    MarkovTraceError,
    ModelError,
    NotLeftMonogamous,
    NotStochastic,
    SignallingInput,
    SignatureMismatch,
    UnknownName,
)
from .hypergraph import Box, BoxSpec, Cospan, Hypergraph, Signature
from .interp import Model, check_contraction_identity, check_trace_soundness, interpret
from .render import to_dot
from .stoch import DEFAULT_TOL, FinSet, Kernel, NonnegMatrix, Tolerances, causal_trace, mat_trace

__version__ = "0.1.0"
