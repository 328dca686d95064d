import json
from pathlib import Path

import httpx
import pytest

from stepcheck.context import errors_only, parse_context, print_context, validate_context
from stepcheck.errors import FormalizationFailed, PromptError, TransportError, UnknownTemplate
from stepcheck.formalizer import (
    FEW_SHOT, GRAMMAR_BLOCK, KIND_DEFINITIONS, FormalizationRequest, HttpEndpoint,
    LlmEndpointConfig, MockEndpoint, build_formalization_prompt, extract_context_text,
    formalize, load_mock_script, mock_endpoint,
)

GOLDEN = Path(__file__).parent.parent / "src" / "stepcheck" / "data" / "golden"
FIB_TEXT = (GOLDEN / "c01_fibonacci.ctx").read_text()
REQ = FormalizationRequest("Compute f(6) for the Fibonacci function.",
                           "f(3) = 2, f(4) = 3, f(5) = 5, f(6) = 8.")


# -- prompts -----------------------------------------------------------------------------


def test_prompt_contains_grammar_kinds_and_examples():
    prompt = build_formalization_prompt("P", "S")
    assert GRAMMAR_BLOCK in prompt and KIND_DEFINITIONS in prompt
    for _, _, context in FEW_SHOT:
        assert context in prompt
    assert "definition(f): NN -> NN" in prompt
    assert prompt.rstrip().endswith("Context:")


def test_prompt_is_deterministic():
    assert build_formalization_prompt("P", "S") == build_formalization_prompt("P", "S")


def test_prompt_errors():
    with pytest.raises(PromptError):
        build_formalization_prompt("P", "   ")
    with pytest.raises(UnknownTemplate):
        build_formalization_prompt("P", "S", template="terse")


def test_few_shot_examples_are_valid_contexts():
    assert len(FEW_SHOT) >= 2
    for _, _, text in FEW_SHOT:
        assert errors_only(validate_context(parse_context(text))) == []


# -- mock endpoint -----------------------------------------------------------------------


def test_mock_replays_then_repeats_last():
    one = MockEndpoint(["a"])
    assert [one.complete("x") for _ in range(3)] == ["a", "a", "a"]
    two = MockEndpoint(["a", "b"])
    assert [two.complete(str(i)) for i in range(3)] == ["a", "b", "b"]
    assert two.prompts == ["0", "1", "2"]


def test_mock_records_built_prompt():
    endpoint = MockEndpoint([FIB_TEXT])
    formalize(REQ, endpoint)
    assert endpoint.prompts == [build_formalization_prompt(REQ.problem, REQ.solution)]


# -- formalize ----------------------------------------------------------------------------


def test_fib_solution_fixture_reproduces_golden_context():
    result = formalize(REQ, mock_endpoint(load_mock_script("fib-solution")))
    assert result.attempts == 1
    assert print_context(result.context) == print_context(parse_context(FIB_TEXT))


def test_broken_output_is_repaired_once():
    endpoint = mock_endpoint(load_mock_script("fib-broken-once"), retries=2)
    result = formalize(REQ, endpoint)
    assert result.attempts == 2
    assert result.diagnostics and "attempt 1" in result.diagnostics[0]
    assert "was rejected" in endpoint.prompts[1]


def test_exhausted_retries_raise():
    broken = load_mock_script("fib-broken-once")[0]
    endpoint = mock_endpoint([broken], retries=0)
    with pytest.raises(FormalizationFailed) as info:
        formalize(REQ, endpoint)
    assert info.value.attempts == 1 and len(endpoint.prompts) == 1


@pytest.mark.parametrize("retries", [0, 1, 3])
def test_attempts_are_bounded(retries):
    endpoint = mock_endpoint(["0 | FACT: x = = 1\n"], retries=retries)
    with pytest.raises(FormalizationFailed):
        formalize(REQ, endpoint)
    assert len(endpoint.prompts) == 1 + retries


def test_invalid_structure_is_never_returned():
    # A conclusion with no premises parses but fails validation.
    endpoint = mock_endpoint(["0 | CONCLUSION: 1 = 1\n"], retries=1)
    with pytest.raises(FormalizationFailed):
        formalize(REQ, endpoint)


def test_transcript_is_json_lines(tmp_path):
    path = tmp_path / "t.jsonl"
    formalize(REQ, mock_endpoint(load_mock_script("fib-broken-once")), transcript_path=path)
    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert [r["attempt"] for r in records] == [1, 2]
    assert records[0]["diagnostics"] and records[1]["diagnostics"] == []


def test_code_fences_are_stripped():
    assert extract_context_text("Here:\n```text\n0 | FACT: x = 1\n```\n") == "0 | FACT: x = 1\n"


# -- configuration and HTTP ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        LlmEndpointConfig(retries=-1)
    with pytest.raises(ValueError):
        LlmEndpointConfig(temperature=2.5)


def test_http_endpoint_sends_chat_completion(monkeypatch, tmp_path):
    monkeypatch.setenv("STEPCHECK_TEST_KEY", "secret-value")
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": FIB_TEXT}}]})

    config = LlmEndpointConfig(base_url="http://llm.test/v1", model="m",
                               api_key_env="STEPCHECK_TEST_KEY", retries=0)
    endpoint = HttpEndpoint(config, transport=httpx.MockTransport(handler))
    path = tmp_path / "t.jsonl"
    result = formalize(REQ, endpoint, transcript_path=path)
    assert result.attempts == 1
    assert seen["url"] == "http://llm.test/v1/chat/completions"
    assert seen["auth"] == "Bearer secret-value"
    assert seen["body"]["model"] == "m" and seen["body"]["messages"][0]["role"] == "user"
    assert "secret-value" not in path.read_text()
    assert "secret-value" not in json.dumps(config.to_json())


def test_http_errors_become_transport_errors():
    def handler(request):
        return httpx.Response(500, json={"error": "boom"})

    endpoint = HttpEndpoint(LlmEndpointConfig(base_url="http://llm.test"),
                            transport=httpx.MockTransport(handler))
    with pytest.raises(TransportError):
        endpoint.complete("hi")

    def bad_shape(request):
        return httpx.Response(200, json={"nothing": True})

    endpoint = HttpEndpoint(LlmEndpointConfig(base_url="http://llm.test"),
                            transport=httpx.MockTransport(bad_shape))
    with pytest.raises(TransportError):
        endpoint.complete("hi")
