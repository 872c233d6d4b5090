"""Deterministic batch figure rendering for entanglement-link artifacts.

Consumes the CSV sweep tables, JSONL training records and frontier point
tables produced by the mwlink command-line tool, and renders publication
style figures.  Rendering is read-only over inputs and deterministic:
identical inputs yield identical image bytes.
"""

__version__ = "0.1.0"
