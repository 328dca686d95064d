"""Translating informal solutions into contexts with a language model."""

from .client import (
    Attempt, DEFAULT_KEY_ENV, Endpoint, FormalizationRequest, FormalizationResult,
    HttpEndpoint, LlmEndpointConfig, MockEndpoint, check_context_text,
    extract_context_text, formalize, load_mock_script, mock_endpoint, write_transcript,
)
from .prompts import (
    FEW_SHOT, GRAMMAR_BLOCK, KIND_DEFINITIONS, TEMPLATES, build_formalization_prompt,
    build_generation_prompt, build_regeneration_prompt, build_repair_prompt,
)

__all__ = [
    "Attempt", "DEFAULT_KEY_ENV", "Endpoint", "FEW_SHOT", "FormalizationRequest",
    "FormalizationResult", "GRAMMAR_BLOCK", "HttpEndpoint", "KIND_DEFINITIONS",
    "LlmEndpointConfig", "MockEndpoint", "TEMPLATES", "build_formalization_prompt",
    "build_generation_prompt", "build_regeneration_prompt", "build_repair_prompt",
    "check_context_text", "extract_context_text", "formalize", "load_mock_script",
    "mock_endpoint", "write_transcript",
]
