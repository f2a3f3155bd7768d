"""Result export: CSV and JSON files, run manifests, SVG figures and terminal summaries."""

__all__ = ["ReportError", "PathFileError"]


class ReportError(Exception):
    """Base exception for reading or writing result files."""

    pass


class PathFileError(ReportError):
    """A path CSV is missing columns or holds unusable samples."""

    pass
