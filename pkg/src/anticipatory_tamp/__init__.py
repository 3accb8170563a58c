"""Anticipatory TAMP: sequential task-and-motion planning that plans ahead for the next task."""

__version__ = "1.0.0"
