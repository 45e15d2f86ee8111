"""notchcast: credit-rating panels, an LSTM change forecaster, and
lead-lag analysis between US and international rating indices."""

from .backend import BACKEND
from .errors import (
    ConfigError,
    DataError,
    DegenerateSplit,
    EmptyInput,
    InsufficientOverlap,
    InvalidConfig,
    LengthMismatch,
    MixedEntity,
    NoData,
    NonFiniteLoss,
    OutOfRange,
    SeriesTooShort,
    TooFewValues,
    UnknownGrade,
)
from .grades import SCALE, TOP_NOTCH, grade_to_notch, notch_to_grade, parse_rating
from .panel import (
    Month,
    RatingEvent,
    RegionPanel,
    TimeGrid,
    build_panels,
    read_events_csv,
    write_events_csv,
    write_panel_csv,
)
from .preprocess import (
    NormalizationStats,
    SupervisedDataset,
    align_panels,
    build_supervised,
    fit_stats,
    make_windows,
    normalize,
    denormalize,
    temporal_split,
    winsorize,
)
from .model import ModelParams, init_params, lstm_step, model_forward, param_count
from .training import (
    EvalReport,
    LossCurve,
    TrainConfig,
    adam_step,
    evaluate,
    load_checkpoint,
    mse_loss,
    predict,
    save_checkpoint,
    train,
)
from .gradcheck import grad_check
from .analysis import (
    DEFAULT_EVENT_CALENDAR,
    DipReport,
    EventRecord,
    LagEstimate,
    cross_correlation_lag,
    detect_dips,
    match_events,
)
from .synth import SynthConfig, generate_panel
from .config import RunConfig, load_config
from .prng import Prng

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "DataError",
    "DegenerateSplit",
    "EmptyInput",
    "InsufficientOverlap",
    "InvalidConfig",
    "LengthMismatch",
    "MixedEntity",
    "NoData",
    "NonFiniteLoss",
    "OutOfRange",
    "SeriesTooShort",
    "TooFewValues",
    "UnknownGrade",
    "SCALE",
    "TOP_NOTCH",
    "grade_to_notch",
    "notch_to_grade",
    "parse_rating",
    "Month",
    "RatingEvent",
    "RegionPanel",
    "TimeGrid",
    "build_panels",
    "read_events_csv",
    "write_events_csv",
    "write_panel_csv",
    "NormalizationStats",
    "SupervisedDataset",
    "align_panels",
    "build_supervised",
    "fit_stats",
    "make_windows",
    "normalize",
    "denormalize",
    "temporal_split",
    "winsorize",
    "ModelParams",
    "init_params",
    "lstm_step",
    "model_forward",
    "param_count",
    "EvalReport",
    "LossCurve",
    "TrainConfig",
    "adam_step",
    "evaluate",
    "load_checkpoint",
    "mse_loss",
    "predict",
    "save_checkpoint",
    "train",
    "grad_check",
    "DEFAULT_EVENT_CALENDAR",
    "DipReport",
    "EventRecord",
    "LagEstimate",
    "cross_correlation_lag",
    "detect_dips",
    "match_events",
    "SynthConfig",
    "generate_panel",
    "RunConfig",
    "load_config",
    "Prng",
    "__version__",
]
