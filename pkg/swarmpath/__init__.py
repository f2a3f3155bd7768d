"""swarmpath: swarm-planned spline paths and cascaded PID tracking for differential-drive robots."""

__version__ = "0.1.0"
