"""HTTP endpoint plumbing: auth header, retry/backoff, error wrapping."""

import pytest

from animeval.endpoint import EndpointConfig, post_json
from animeval.errors import EndpointError


def fast_config(url, **overrides):
    params = {"url": url, "timeout": 5.0, "retries": 1, "backoff_base": 0.0}
    params.update(overrides)
    return EndpointConfig(**params)


def test_missing_url_rejected():
    with pytest.raises(EndpointError, match="not configured"):
        post_json(fast_config(""), {"x": 1})


def test_success_round_trip(endpoint_server):
    endpoint_server.queue(200, {"answer": 42})
    body = post_json(fast_config(endpoint_server.url), {"q": "hi"})
    assert body == {"answer": 42}
    assert len(endpoint_server.requests) == 1
    request = endpoint_server.requests[0]
    assert request["payload"] == {"q": "hi"}
    assert request["authorization"] is None


def test_bearer_token_from_environment(endpoint_server, monkeypatch):
    monkeypatch.setenv("ANIMEVAL_TEST_TOKEN", "sekrit")
    config = fast_config(endpoint_server.url, token_env="ANIMEVAL_TEST_TOKEN")
    post_json(config, {})
    assert endpoint_server.requests[-1]["authorization"] == "Bearer sekrit"


def test_unset_token_env_sends_no_header(endpoint_server, monkeypatch):
    monkeypatch.delenv("ANIMEVAL_TEST_TOKEN", raising=False)
    config = fast_config(endpoint_server.url, token_env="ANIMEVAL_TEST_TOKEN")
    post_json(config, {})
    assert endpoint_server.requests[-1]["authorization"] is None


def test_retries_after_server_error(endpoint_server):
    endpoint_server.queue(500, {"err": True})
    endpoint_server.queue(200, {"ok": 2})
    body = post_json(fast_config(endpoint_server.url, retries=3), {})
    assert body == {"ok": 2}
    assert len(endpoint_server.requests) == 2


def test_retries_after_malformed_body(endpoint_server):
    endpoint_server.queue(200, "this is not json {")
    endpoint_server.queue(200, {"ok": 3})
    body = post_json(fast_config(endpoint_server.url, retries=3), {})
    assert body == {"ok": 3}
    assert len(endpoint_server.requests) == 2


def test_exhausted_retries_raise_with_cause(endpoint_server):
    for _ in range(3):
        endpoint_server.queue(503, {"down": True})
    with pytest.raises(EndpointError, match="after 3 attempts") as excinfo:
        post_json(fast_config(endpoint_server.url, retries=3), {})
    assert len(endpoint_server.requests) == 3
    assert excinfo.value.__cause__ is not None


def test_retries_floor_at_one_attempt(endpoint_server):
    endpoint_server.queue(500, {})
    with pytest.raises(EndpointError, match="after 1 attempts"):
        post_json(fast_config(endpoint_server.url, retries=0), {})
    assert len(endpoint_server.requests) == 1


def test_backoff_schedule_doubles(endpoint_server, monkeypatch):
    sleeps = []
    monkeypatch.setattr("animeval.endpoint.time.sleep", sleeps.append)
    for _ in range(3):
        endpoint_server.queue(500, {})
    config = fast_config(endpoint_server.url, retries=3, backoff_base=0.5)
    with pytest.raises(EndpointError):
        post_json(config, {})
    assert sleeps == [0.5, 1.0]


def test_unreachable_host_wrapped():
    with pytest.raises(EndpointError):
        post_json(fast_config("http://127.0.0.1:9/closed", timeout=2.0), {})
