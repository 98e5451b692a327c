"""Exception hierarchy shared across the toolkit."""


class ContrastKitError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(ContrastKitError):
    """A dataset or prediction file is malformed; message names the line."""


class PromptError(ContrastKitError):
    """A prompt template could not be rendered (missing input)."""


class GenerationParseError(ContrastKitError):
    """Generator response unusable; retryable once per anchor.

    ``reason`` is one of ``empty_response`` / ``no_perturbation``.
    """

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


class JudgeParseError(ContrastKitError):
    """Judge response did not match the ``<valid>|<reasoning>`` format."""


class BackendError(ContrastKitError):
    """Permanent LLM backend failure (bad config, 4xx, missing mock entry)."""


class TransientBackendError(BackendError):
    """Retryable LLM backend failure (timeout, 429, 5xx, connection)."""


class CompletionError(ContrastKitError):
    """All retries against an endpoint were exhausted."""

    def __init__(self, message, attempts):
        super().__init__(message)
        self.attempts = attempts


class SamplingError(ContrastKitError):
    """Epoch-mixture construction failed (e.g. pool too small)."""


class EvaluationError(ContrastKitError):
    """Prediction scoring failed (unknown/duplicate ids, broken pairing)."""


class IntegrityError(ContrastKitError):
    """A contrast-set file violates the pairing invariants."""
