"""Contrast-set synthesis: anchors, prompts, LLM clients, pipeline."""

from .anchors import TargetAssigner, assign_target_label, select_anchors
from .client import HttpChatTransport, LlmClient, LlmEndpointConfig, MockTransport, mock_key
from .pipeline import ContrastSetResult, consensus_filter, generate_contrast_set
from .prompts import (
    generation_template,
    judge_template,
    label_display,
    parse_generation_response,
    parse_judge_verdict,
    render_generation_prompt,
    render_judge_prompt,
)
from .types import AnchorSet, ContrastPair, GenerationTask, JudgeVerdict, RejectionRecord

__all__ = [
    "AnchorSet",
    "ContrastPair",
    "ContrastSetResult",
    "GenerationTask",
    "HttpChatTransport",
    "JudgeVerdict",
    "LlmClient",
    "LlmEndpointConfig",
    "MockTransport",
    "RejectionRecord",
    "TargetAssigner",
    "assign_target_label",
    "consensus_filter",
    "generate_contrast_set",
    "generation_template",
    "judge_template",
    "label_display",
    "mock_key",
    "parse_generation_response",
    "parse_judge_verdict",
    "render_generation_prompt",
    "render_judge_prompt",
    "select_anchors",
]
