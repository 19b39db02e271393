"""Protein fill-in-middle design toolkit: FIM data transforms, a small
decoder-only inference engine, structure parsing, secondary-structure
assignment, and the SEIFER recovery benchmark."""

__version__ = "0.1.0"
