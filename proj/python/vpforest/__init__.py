"""Python bindings for the vpforest library.

A Mondrian forest stream classifier with a fixed node budget, where every
floating-point value can be emulated at a reduced precision (p mantissa bits,
e exponent bits). The heavy lifting lives in the compiled `_core` module;
this package just re-exports it.
"""

from ._core import (
    ArithOp,
    Checkpoint,
    F1Average,
    Footprint,
    ForestConfig,
    InstrumentationMode,
    MondrianForest,
    NonFiniteError,
    OverflowPolicy,
    PrecisionFormat,
    PrequentialReport,
    RangeOverflowError,
    RawSensorRow,
    RunStatus,
    StreamSample,
    apply_default_hyperparams,
    delta_f1,
    dynamic_range,
    featurize_windows,
    macro_f1,
    make_format,
    micro_f1,
    node_footprint,
    normalize_minmax,
    prequential_run,
    round_to_precision,
    rounded_arith,
    shuffle_stream,
    synthesize,
)

__all__ = [
    "ArithOp",
    "Checkpoint",
    "F1Average",
    "Footprint",
    "ForestConfig",
    "InstrumentationMode",
    "MondrianForest",
    "NonFiniteError",
    "OverflowPolicy",
    "PrecisionFormat",
    "PrequentialReport",
    "RangeOverflowError",
    "RawSensorRow",
    "RunStatus",
    "StreamSample",
    "apply_default_hyperparams",
    "delta_f1",
    "dynamic_range",
    "featurize_windows",
    "macro_f1",
    "make_format",
    "micro_f1",
    "node_footprint",
    "normalize_minmax",
    "prequential_run",
    "round_to_precision",
    "rounded_arith",
    "shuffle_stream",
    "synthesize",
]
