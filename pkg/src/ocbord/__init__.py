"""ocbord: a symbolic engine for open-closed 2d cobordisms.

Diagrams are terms over a small generator set (open and closed
multiplications, units, their duals, and the zip/cozip maps between the
two sectors).  The package computes their topological invariants,
normalizes them through a checkable sequence of local moves, decides
diffeomorphism equivalence, and evaluates them as exact-rational linear
maps under a user-supplied knowledgeable Frobenius algebra.
"""

from .diagram import (
    DEFAULT_COLOR,
    Cross,
    DiagramTerm,
    Gen,
    Id,
    OcbordError,
    PortGraph,
    Seg,
    TypingError,
    canonical_key,
    compose,
    from_port_graph,
    gen_term,
    graph_eq,
    identity_term,
    syntactic_eq,
    tensor,
    to_port_graph,
)
from .dsl import ParseError, SourceSpan, TypeMismatch, parse, parse_file, render
from .invariants import (
    ComponentInvariants,
    Invariants,
    equivalent,
    invariants,
    profile_key,
)
from .normalform import normal_form, unwrap, wrap
from .rewrite import (
    Match,
    MoveTrace,
    Rule,
    StrategyStuck,
    TraceError,
    apply_match,
    check_trace,
    find_matches,
    normalize,
    normalize_with_trace,
    parse_trace,
    read_trace,
    rules,
    trace_text,
    write_trace,
)
from .tqft import (
    BUILTIN_ALGEBRAS,
    KFA,
    AxiomReport,
    Groupoid,
    LinearMap,
    builtin_algebra,
    builtin_groupoid_example,
    builtin_matrix_example,
    check_axioms,
    evaluate,
    groupoid_algebra,
    load_kfa,
    save_kfa,
)

__version__ = "0.1.0"
