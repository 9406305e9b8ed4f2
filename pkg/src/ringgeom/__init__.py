"""Exact constructions and verifiers for ring planes, their quadric
varieties over small fields, and the associated combinatorial designs."""

__version__ = "0.1.0"
