"""Code generation against grammar scaffolds, execution, and filtering."""

from vizsmith.generate.codegen import assemble, build_codegen_prompt, postprocess_stub
from vizsmith.generate.executor import (
    CANDIDATE_STATUSES,
    ERROR_STATUSES,
    CandidateProgram,
    ExecutionLimits,
    execute,
    selftest,
    tree_paths,
)
from vizsmith.generate.filters import (
    FilterPolicy,
    normalize_for_consensus,
    select_by_consistency,
    select_by_correctness,
    select_first_compiled,
)
from vizsmith.generate.pipeline import generate_visualization
from vizsmith.generate.scaffolds import (
    Scaffold,
    ScaffoldRegistry,
    chart_spec_schema,
    default_registry,
    get_scaffold,
)

__all__ = [
    "CANDIDATE_STATUSES",
    "CandidateProgram",
    "ERROR_STATUSES",
    "ExecutionLimits",
    "FilterPolicy",
    "Scaffold",
    "ScaffoldRegistry",
    "assemble",
    "build_codegen_prompt",
    "chart_spec_schema",
    "default_registry",
    "execute",
    "generate_visualization",
    "get_scaffold",
    "normalize_for_consensus",
    "postprocess_stub",
    "select_by_consistency",
    "select_by_correctness",
    "select_first_compiled",
    "selftest",
    "tree_paths",
]
