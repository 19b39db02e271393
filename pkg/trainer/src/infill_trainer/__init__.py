"""Desk-scale training for the infill-bench model format.

This package never imports infill-bench: the two sides meet only at the
documented interchange surfaces (the weight-bundle file, the alphabet
JSON, and the logits CSV of the benchmark CLI).
"""

from __future__ import annotations

__version__ = "0.1.0"

from .alphabet import Alphabet
from .corpus import synth_corpus
from .experiment import fim_vs_ar_experiment
from .export import export_bundle, load_into_model, read_bundle
from .fim import fim_stream, maybe_fim, plain_stream, sample_span
from .model import CharGPT
from .train import Checkpoint, TrainConfig, TrainingDivergedError, train

__all__ = [
    "Alphabet",
    "CharGPT",
    "Checkpoint",
    "TrainConfig",
    "TrainingDivergedError",
    "export_bundle",
    "fim_stream",
    "fim_vs_ar_experiment",
    "load_into_model",
    "maybe_fim",
    "plain_stream",
    "read_bundle",
    "sample_span",
    "synth_corpus",
    "train",
]
