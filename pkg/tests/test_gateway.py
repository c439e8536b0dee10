import json

import pytest

from emokb.events import EmotionalEvent
from emokb.gateway import (
    AuthError,
    CompletionParams,
    FrozenClock,
    LlmGateway,
    MockPlanSpec,
    MockProvider,
    RetryPolicy,
    TokenBucket,
    TransportError,
    UnparseableAnswerError,
    mock_gateway,
    parse_phrase_list,
    prompt_hash,
)
from emokb.indicators import Indicator
from emokb.prompts import ExampleSet, PromptPackStore, render_prompt


def classic_prompt(surface="遭受"):
    ind = Indicator(surface, "negative", "classic", "literature")
    store = PromptPackStore()
    return render_prompt(ind, store.example_set(ind))


def parse(text, surface="遭受"):
    from emokb.gateway import RawCompletion

    raw = RawCompletion(text=text, provider_id="test", latency=0.0, retries_used=0)
    ind = Indicator(surface, "negative", "classic", "literature")
    return parse_phrase_list(raw, ind)


def bei_event(surface="被禁止发言", indicator="被禁止", theme="发言"):
    return EmotionalEvent(
        surface=surface, kind="bei", indicator_surface=indicator, theme=theme
    )


class TestMockPurity:
    def test_same_prompt_same_seed_same_text(self, params):
        prompt = classic_prompt()
        a = MockProvider(seed=5).complete_text(prompt.rendered_text, params)
        b = MockProvider(seed=5).complete_text(prompt.rendered_text, params)
        assert a == b

    def test_different_seed_different_text(self, params):
        prompt = classic_prompt()
        a = MockProvider(seed=5).complete_text(prompt.rendered_text, params)
        b = MockProvider(seed=6).complete_text(prompt.rendered_text, params)
        assert a != b

    def test_different_prompt_different_text(self, params):
        a = MockProvider(seed=5).complete_text(classic_prompt("遭受").rendered_text, params)
        b = MockProvider(seed=5).complete_text(classic_prompt("蒙受").rendered_text, params)
        assert a != b

    def test_call_order_does_not_matter(self, params):
        p1 = classic_prompt("遭受").rendered_text
        p2 = classic_prompt("蒙受").rendered_text
        m1 = MockProvider(seed=9)
        first = (m1.complete_text(p1, params), m1.complete_text(p2, params))
        m2 = MockProvider(seed=9)
        second = (m2.complete_text(p2, params), m2.complete_text(p1, params))
        assert first == (second[1], second[0])


class TestMockPlan:
    def test_plan_spec_counts_reconcile(self, params):
        provider = MockProvider(
            seed=0,
            spec_overrides={"遭受": MockPlanSpec(unique=20, duplicates=3, garbage=2,
                                                blank=1)},
        )
        plan = provider.generation_plan(classic_prompt("遭受").rendered_text)
        assert plan.raw_line_count == 26
        text = provider.complete_text(classic_prompt("遭受").rendered_text, params)
        assert len(text.splitlines()) == 26

    def test_plan_spec_validation(self):
        with pytest.raises(ValueError):
            MockPlanSpec(unique=5, duplicates=-1)
        with pytest.raises(ValueError):
            MockPlanSpec(unique=0, duplicates=2)
        assert MockPlanSpec(unique=0).unique == 0  # zero-yield plans are legal

    def test_garbage_lines_fail_parsing(self, params):
        provider = MockProvider(
            seed=1,
            spec_overrides={"遭受": MockPlanSpec(unique=10, duplicates=0, garbage=5,
                                                blank=0)},
        )
        text = provider.complete_text(classic_prompt("遭受").rendered_text, params)
        parsed, rejected = parse(text)
        assert len(parsed) == 10
        assert len(rejected) == 5


class TestParsePhraseList:
    def test_numbered_variants_accepted(self):
        raw = "1. 遭受挫折；\n2、遭受打击。\n3．遭受失败\n"
        parsed, rejected = parse(raw)
        assert parsed == ["遭受挫折", "遭受打击", "遭受失败"]
        assert rejected == []

    def test_non_numbered_rejected_with_reason(self):
        parsed, rejected = parse("以下是结果\n1. 遭受挫折；\n")
        assert parsed == ["遭受挫折"]
        assert len(rejected) == 1 and "numbered" in rejected[0][1]

    def test_missing_indicator_prefix_rejected(self):
        _, rejected = parse("1. 获得好评；\n")
        assert len(rejected) == 1

    def test_empty_theme_rejected(self):
        _, rejected = parse("1. 遭受。\n")
        assert len(rejected) == 1

    def test_terminal_punctuation_stripped(self):
        parsed, _ = parse("1. 遭受挫折。\n")
        assert parsed == ["遭受挫折"]

    def test_order_preserved(self):
        raw = "".join(f"{i}. 遭受事件{i}；\n" for i in range(1, 6))
        parsed, _ = parse(raw)
        assert parsed == [f"遭受事件{i}" for i in range(1, 6)]

    def test_total_no_exception_on_garbage(self):
        parsed, rejected = parse("~~~\n\x00\n42\n")
        assert parsed == []
        assert rejected


class TestRetries:
    def test_transport_errors_retried_then_succeed(self, params):
        prompt = classic_prompt()

        class Flaky:
            provider_id = "flaky"

            def __init__(self):
                self.calls = 0

            def complete_text(self, text, p):
                self.calls += 1
                if self.calls < 3:
                    raise TransportError("boom")
                return "1. 遭受挫折；"

        provider = Flaky()
        gw = LlmGateway(provider, retry_policy=RetryPolicy(max_retries=3, base_delay=1.0),
                        clock=FrozenClock())
        result = gw.complete_raw(prompt.rendered_text, params)
        assert provider.calls == 3
        assert result.retries_used == 2

    def test_exhausted_retries_raise(self, params):
        class Dead:
            provider_id = "dead"

            def complete_text(self, text, p):
                raise TransportError("down")

        gw = LlmGateway(Dead(), retry_policy=RetryPolicy(max_retries=2, base_delay=0.0),
                        clock=FrozenClock())
        with pytest.raises(TransportError):
            gw.complete_raw("x", params)

    def test_auth_error_never_retried(self, params):
        class NoAuth:
            provider_id = "noauth"

            def __init__(self):
                self.calls = 0

            def complete_text(self, text, p):
                self.calls += 1
                raise AuthError("bad credential")

        provider = NoAuth()
        gw = LlmGateway(provider, retry_policy=RetryPolicy(max_retries=5, base_delay=0.0),
                        clock=FrozenClock())
        with pytest.raises(AuthError):
            gw.complete_raw("x", params)
        assert provider.calls == 1

    def test_backoff_is_exponential(self):
        import random

        policy = RetryPolicy(max_retries=5, base_delay=0.5, max_delay=30.0, jitter=0.0)
        rng = random.Random(0)
        delays = [policy.delay(a, rng) for a in range(4)]
        assert delays == [0.5, 1.0, 2.0, 4.0]

    def test_backoff_capped(self):
        import random

        policy = RetryPolicy(max_retries=20, base_delay=0.5, max_delay=3.0, jitter=0.0)
        rng = random.Random(0)
        assert policy.delay(10, rng) == 3.0


class TestRateLimit:
    def test_token_bucket_spaces_requests(self):
        clock = FrozenClock()
        bucket = TokenBucket(requests_per_minute=60, clock=clock)
        start = clock.monotonic()
        for _ in range(3):
            bucket.acquire()
        # 60 rpm = 1 req/s; third acquire needs 2 simulated seconds
        assert clock.monotonic() - start >= 2.0 - 1e-9


class TestAudit:
    def test_audit_lines_carry_required_fields(self, tmp_path, params):
        audit = tmp_path / "audit.jsonl"
        gw = mock_gateway(seed=0, audit_path=audit)
        prompt = classic_prompt()
        gw.complete(prompt, params)
        lines = audit.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert set(record) >= {"timestamp", "indicator", "prompt_hash", "response",
                               "latency"}
        assert record["indicator"] == "遭受"
        assert record["prompt_hash"] == prompt_hash(prompt.rendered_text)


class TestConstrainedQueries:
    def test_neutrality_yes_and_no(self, gw, params):
        assert gw.query_neutrality(bei_event("被安排参加会议", "被安排", "参加会议"),
                                   params) is True
        assert gw.query_neutrality(bei_event(), params) is False

    def test_neutrality_rejects_non_bei(self, gw, params):
        event = EmotionalEvent(surface="遭受挫折", kind="explicit_nonneutral",
                               indicator_surface="遭受", theme="挫折")
        with pytest.raises(ValueError):
            gw.query_neutrality(event, params)

    def test_polarity_answers(self, gw, params):
        accepted = bei_event("被夸奖有责任心", "被夸奖", "有责任心").with_status(
            "accepted", validity_score=0.9
        )
        assert gw.query_polarity(accepted, params) == "positive"
        negative = bei_event().with_status("accepted", validity_score=0.9)
        assert gw.query_polarity(negative, params) == "negative"

    def test_unparseable_answer_raises(self, params):
        gw = mock_gateway(seed=0, force_unparseable={"被禁止发言"})
        with pytest.raises(UnparseableAnswerError):
            gw.query_neutrality(bei_event(), params)


class TestPromptHash:
    def test_sha256_shape(self):
        h = prompt_hash("任意文本")
        assert len(h) == 64 and int(h, 16) >= 0

    def test_distinct_inputs_distinct_hashes(self):
        assert prompt_hash("a") != prompt_hash("b")
