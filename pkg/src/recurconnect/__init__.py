"""Recurrence-based connectivity analysis for dated scalar time series.

Measures time-varying connectivity between series pairs through the
correlation of their recurrence profiles (corrected to discard lags inside
the autocorrelation time), alongside the Pearson coefficient, and tests both
against twin-surrogate null distributions.
"""

from .analysis import (
    ConnectivityBins,
    PairTrend,
    PeakAlignment,
    SpanStats,
    WindowSpec,
    bin_connectivity,
    peak_align,
    sliding_pairwise,
    window_span_stats,
)
from .connectivity import MeasureValue, cpr, cpr_uncorrected, pearson
from .errors import (
    AlignmentError,
    CsvFormatError,
    DegenerateSeriesError,
    InsufficientLagsError,
    NoDecorrelationError,
    RecurConnectError,
)
from .ingest import AlignedDataset, TimeSeries, align, parse_csv, read_series
from .preprocess import (
    AcfSummary,
    NormalizedSeries,
    acf_summary,
    autocorrelation,
    autocorrelation_time,
    mutual_information,
    normalize,
)
from .recurrence import (
    RecurrenceConfig,
    RecurrenceMatrix,
    TauRecurrenceProfile,
    TwinClasses,
    find_twins,
    recurrence_matrix,
    tau_recurrence_rate,
    write_pbm,
)
from .surrogates import (
    SignificanceResult,
    SurrogateEnsemble,
    generate_ensemble,
    significance_test,
    twin_surrogate,
)
from .synthetic import LorenzParams, lorenz, white_noise

__version__ = "0.1.0"

__all__ = [
    "AcfSummary",
    "AlignedDataset",
    "AlignmentError",
    "ConnectivityBins",
    "CsvFormatError",
    "DegenerateSeriesError",
    "InsufficientLagsError",
    "LorenzParams",
    "MeasureValue",
    "NoDecorrelationError",
    "NormalizedSeries",
    "PairTrend",
    "PeakAlignment",
    "RecurConnectError",
    "RecurrenceConfig",
    "RecurrenceMatrix",
    "SignificanceResult",
    "SpanStats",
    "SurrogateEnsemble",
    "TauRecurrenceProfile",
    "TimeSeries",
    "TwinClasses",
    "WindowSpec",
    "acf_summary",
    "align",
    "autocorrelation",
    "autocorrelation_time",
    "bin_connectivity",
    "cpr",
    "cpr_uncorrected",
    "find_twins",
    "generate_ensemble",
    "lorenz",
    "mutual_information",
    "normalize",
    "parse_csv",
    "peak_align",
    "pearson",
    "read_series",
    "recurrence_matrix",
    "significance_test",
    "sliding_pairwise",
    "tau_recurrence_rate",
    "twin_surrogate",
    "white_noise",
    "window_span_stats",
]
