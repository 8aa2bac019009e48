"""Free-flying space-manipulator simulation and sliding-mode control."""

__version__ = "0.1.0"
