"""Path planning: workspaces, B-spline paths, constrained cost and the particle swarm planner."""

__all__ = [
    "PlanningError",
    "WorkspaceError",
    "WorkspaceSamplingError",
    "SplineError",
    "SearchBoundsError",
]


class PlanningError(Exception):
    """Base exception for planning operations."""

    pass


class WorkspaceError(PlanningError):
    """Workspace document cannot be parsed or violates an invariant."""

    pass


class WorkspaceSamplingError(PlanningError):
    """Random workspace generation gave up after too many rejections."""

    pass


class SplineError(PlanningError):
    """Invalid spline input (parameter out of range, too few samples)."""

    pass


class SearchBoundsError(PlanningError):
    """Search regions cannot be built for the workspace."""

    pass
