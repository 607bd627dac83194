from .report import (
    PROVENANCE_TAGS,
    TRACE_COLUMNS,
    CheckReport,
    build_document,
    dumps_report,
    timed,
    write_report,
    write_trace_csv,
)

__all__ = [
    "PROVENANCE_TAGS",
    "TRACE_COLUMNS",
    "CheckReport",
    "build_document",
    "dumps_report",
    "timed",
    "write_report",
    "write_trace_csv",
]
