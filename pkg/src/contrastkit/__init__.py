"""Toolkit for hunting spurious n-gram cues in NLI data, synthesizing
label-flipped contrast sets with LLM generation + multi-judge consensus,
emitting balanced per-epoch training mixtures, and scoring predictions
with paired consistency."""

__version__ = "0.1.0"
