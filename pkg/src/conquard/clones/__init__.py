from .detect import (
    DEFAULT_MIN_LENGTH,
    CloneClass,
    CloneOccurrence,
    CloneReport,
    InvalidMinLength,
    build_report,
    cloned_line_sets,
    cloning_ratio,
    detect_clones,
    format_listing,
    maximal_repeats,
)

__all__ = [
    "DEFAULT_MIN_LENGTH", "CloneClass", "CloneOccurrence", "CloneReport", "InvalidMinLength",
    "build_report", "cloned_line_sets", "cloning_ratio", "detect_clones", "format_listing",
    "maximal_repeats",
]
