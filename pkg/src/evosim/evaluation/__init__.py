"""Objective evaluation suite: BFI-44 assessment, behavioral-similarity
metrics, and the nonparametric statistics used to compare run groups."""
