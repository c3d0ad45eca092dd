"""evosim: deterministic sandbox simulation of evolving agent personalities."""

__version__ = "0.1.0"
