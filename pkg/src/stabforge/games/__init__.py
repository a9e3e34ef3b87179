"""Synchronous games built from codes, and the checks that relate their strategies."""

from .braiding import (
    LazyMeasurements,
    braiding_test,
    dls_game,
    perfect_braiding_strategy,
    perfect_dls_strategy,
    perfect_qld_strategy,
    qld_test,
)
from .code_game import CodeGame, ExtractionReport, code_game, codeword_strategy, extract_homomorphism, perfect_code_strategy
from .core import (
    Game,
    StrategyValidationError,
    SynchronousStrategy,
    ValueReport,
    classical_value,
    deterministic_strategy,
    game_value,
)
from .subgames import (
    Subgame,
    anticommutation_game,
    anticommutation_strategy,
    commutation_game,
    commutation_strategy,
    magic_square_observables,
)
from .checks import (
    ClosenessBreakdown,
    ExtractionPoint,
    data_processing_check,
    extraction_sweep,
    l1_bound_check,
    min_dimension_bound,
    perturb_strategy,
    strategy_closeness,
    value_gap_check,
)
from .registry import GAME_KINDS, GAME_REGISTRY, binary_code, build_game, build_perfect_strategy, strategy_registry
