"""modiagen: random generation of k-noncrossing sigma-modular diagrams.

Exact big-integer counting tables drive a restart-based sampler; a
brute-force oracle and a chi-square harness validate both at desk scale.
"""
from ._backend import backend_name, get_kernels
from .diagram import (ClassFlags, Diagram, Stack, WeightedCore, classify,
                      collapse, expand, find_k_crossing, stack_decomposition)
from .errors import (CacheError, GiveUpError, MalformedSequenceError,
                     NormalizationError, OracleCapError, RowOverflowError)
from .sampler import (BatchResult, SamplerSession, SamplerStats,
                      WeightedStarSequence, derive_subseed,
                      draw_weighted_choice, run_attempts, sample_batch,
                      sample_core, sample_modular, sample_star_sequence,
                      sample_weighted_sequence, session_from_seed)
from .shapes import (ADD, NOTHING, REMOVE, Move, Shape, ShapeSpace,
                     enumerate_moves, shape_index, shape_unindex, valid_shape)
from .tableau import (StarSequence, Tableau, diagram_to_star_sequence,
                      rsk_extract, rsk_insert, star_sequence_to_diagram)
from .tables import (CoreTable, WeightedTable, build_core_table,
                     build_weighted_table, compositions_count,
                     core_transition_weights, load_core_table,
                     load_weighted_table, save_table,
                     weighted_transition_weights)

__version__ = "0.1.0"

__all__ = [
    "ADD", "NOTHING", "REMOVE",
    "BatchResult", "CacheError", "ClassFlags", "CoreTable", "Diagram",
    "GiveUpError", "MalformedSequenceError", "Move", "NormalizationError",
    "OracleCapError", "RowOverflowError", "SamplerSession", "SamplerStats",
    "Shape", "ShapeSpace", "Stack", "StarSequence", "Tableau",
    "WeightedCore", "WeightedStarSequence", "WeightedTable",
    "backend_name", "build_core_table", "build_weighted_table",
    "classify", "collapse", "compositions_count",
    "core_transition_weights", "derive_subseed",
    "diagram_to_star_sequence", "draw_weighted_choice", "enumerate_moves",
    "expand", "find_k_crossing", "get_kernels", "load_core_table",
    "load_weighted_table", "run_attempts", "sample_batch", "sample_core",
    "sample_modular", "sample_star_sequence", "sample_weighted_sequence",
    "save_table", "session_from_seed", "shape_index", "shape_unindex",
    "stack_decomposition", "star_sequence_to_diagram", "valid_shape",
    "weighted_transition_weights",
]
