"""PAC-guaranteed programming-by-example synthesis for string programs."""

from .dsl import (
    App,
    Component,
    ComponentSet,
    Expr,
    If,
    Lit,
    Sort,
    Var,
    component_size,
    condition_count,
    default_component_set,
    evaluate,
    parse_expr,
    pretty,
)
from .enumeration import CapacityError, CountTable, enumerate_programs, extend_examples, total_count
from .clustering import (
    BoolClusters,
    ClusterMaps,
    bool_clusters,
    cluster,
    pattern_count,
    tier_size,
    unify_pick,
)
from .engine import EnumerativeEngine, engines_for_task, synthesize_min_consistent
from .guarantee import (
    GuaranteeParams,
    Program,
    SynthesisOutcome,
    TraceRow,
    default_g,
    replay_with_g,
    run_guaranteed,
    run_tiered,
    sample_complexity,
)
from .oracle import (
    Example,
    MutationConfig,
    OracleExhausted,
    OracleSource,
    RecordedSource,
    TaskSpec,
    UniformStringConfig,
    held_out_error,
    load_task,
    make_example,
    sample_input,
)

__version__ = "0.1.0"
