"""Prompt rendering and response parsing for the generator and judge roles.

Templates live as text assets next to this module and are substituted
verbatim: only the exact placeholder tokens {PREMISE}, {HYPOTHESIS},
{TARGET_LABEL} and {NEW_PREMISE} are replaced, so any braces inside the
data survive untouched.
"""

from __future__ import annotations

from importlib import resources

from ..corpus import Label
from ..errors import GenerationParseError, JudgeParseError, PromptError
from .types import GenerationTask, JudgeVerdict

__all__ = [
    "generation_template",
    "judge_template",
    "render_generation_prompt",
    "render_judge_prompt",
    "parse_generation_response",
    "parse_judge_verdict",
    "label_display",
]

_GENERATION_ECHO_PREFIX = "new premise:"


def _load_template(name: str) -> str:
    ref = resources.files(__package__).joinpath("templates", name)
    return ref.read_text(encoding="utf-8")


def generation_template() -> str:
    return _load_template("generation_prompt.txt")


def judge_template() -> str:
    return _load_template("judge_prompt.txt")


def label_display(label: Label) -> str:
    """Label spelling used inside prompts (e.g. 'Contradiction')."""
    return label.value.capitalize()


def render_generation_prompt(task: GenerationTask) -> str:
    template = generation_template()
    return (
        template.replace("{PREMISE}", task.anchor.premise)
        .replace("{HYPOTHESIS}", task.anchor.hypothesis)
        .replace("{TARGET_LABEL}", label_display(task.target_label))
    )


def render_judge_prompt(
    premise: str, hypothesis: str, new_premise: str, target_label: Label
) -> str:
    if not new_premise or not new_premise.strip():
        raise PromptError("judge prompt requires a non-empty NEW_PREMISE")
    if not premise.strip() or not hypothesis.strip():
        raise PromptError("judge prompt requires non-empty PREMISE and HYPOTHESIS")
    template = judge_template()
    return (
        template.replace("{PREMISE}", premise)
        .replace("{HYPOTHESIS}", hypothesis)
        .replace("{NEW_PREMISE}", new_premise)
        .replace("{TARGET_LABEL}", label_display(target_label))
    )


def parse_generation_response(text: str, original_premise: str) -> str:
    """Extract the new premise from a generator response.

    Trims whitespace and strips an echoed ``New Premise:`` prefix. An empty
    result or one identical to the original premise raises a retryable
    GenerationParseError.
    """
    out = text.strip()
    if out.lower().startswith(_GENERATION_ECHO_PREFIX):
        out = out[len(_GENERATION_ECHO_PREFIX) :].strip()
    if not out:
        raise GenerationParseError("empty generator response", reason="empty_response")
    if out == original_premise.strip():
        raise GenerationParseError(
            "no perturbation: response equals the original premise",
            reason="no_perturbation",
        )
    return out


def parse_judge_verdict(text: str, judge_id: str = "") -> JudgeVerdict:
    """Parse the ``<valid>|<short_concise_reasoning>`` judge format.

    The left side must be (case-insensitively) true or false; the right
    side is the trimmed reasoning and must be non-empty.
    """
    stripped = text.strip()
    if "|" not in stripped:
        raise JudgeParseError(f"no '|' separator in judge response: {stripped!r}")
    left, _, right = stripped.partition("|")
    flag = left.strip().lower()
    if flag not in ("true", "false"):
        raise JudgeParseError(f"verdict must be true/false, got {left.strip()!r}")
    reasoning = right.strip()
    if not reasoning:
        raise JudgeParseError("empty reasoning in judge response")
    return JudgeVerdict(judge_id=judge_id, valid=(flag == "true"), reasoning=reasoning)
