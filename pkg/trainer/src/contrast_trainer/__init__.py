"""Thin fine-tuning harness for the contrast-set pipeline.

Consumes epoch files emitted by the sampling stage (canonical jsonl),
trains a small sequence-pair classifier under a naive or dynamic-balanced
curriculum, and writes prediction files the evaluation stage consumes.
Deliberately file-coupled: the main pipeline never imports this package.
"""

__version__ = "0.1.0"
