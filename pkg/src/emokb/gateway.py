"""Provider-agnostic LLM access for event generation and labeling.

One provider contract (``complete_text(text, params) -> text``) serves three
call shapes: free-form generation from a few-shot prompt, a yes/no neutrality
query, and a positive/negative polarity query. The two queries demand a
one-token answer (是/否, 正面/负面); anything else raises, never silently
defaults.

The gateway layers retries with exponential backoff (never on auth errors),
token-bucket rate limiting and an optional JSONL audit log on top of whatever
provider it wraps. ``MockProvider`` is a network-free provider whose output
is a pure function of (prompt text, seed), used throughout the tests and
demos.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import re
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from importlib import resources
from pathlib import Path

from .events import EmotionalEvent
from .indicators import Indicator
from .prompts import Prompt, parse_prompt
from .textnorm import canonical_event_surface

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.7  # decoding default; override in provider config


class GatewayError(Exception):
    """Base class for everything the gateway can raise."""


class TransportError(GatewayError):
    """Network failure, timeout, or retryable provider error after retries."""


class AuthError(GatewayError):
    """Credential rejected. Never retried."""


class RefusalError(GatewayError):
    """Provider returned an empty body."""


class UnparseableAnswerError(GatewayError):
    """A constrained query got an answer outside its allowed token set."""


# ---------------------------------------------------------------------------
# Clocks. FrozenClock makes sleeps instant and timestamps reproducible, which
# the CLI exposes as --frozen-time for byte-identical outputs.


class SystemClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def monotonic(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class FrozenClock:
    """Starts at a fixed instant; sleep() advances simulated time instantly."""

    def __init__(self, start: str = "2024-01-01T00:00:00+00:00"):
        self._now = datetime.fromisoformat(start)
        self._mono = 0.0
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            return self._now

    def monotonic(self) -> float:
        with self._lock:
            return self._mono

    def sleep(self, seconds: float) -> None:
        with self._lock:
            self._now += timedelta(seconds=seconds)
            self._mono += seconds


def isoformat(dt: datetime) -> str:
    return dt.isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# Call parameters and results.


@dataclass(frozen=True)
class CompletionParams:
    model_id: str = "mock"
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = 2048
    request_timeout: float = 60.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")


@dataclass(frozen=True)
class RawCompletion:
    text: str  # verbatim provider output, no normalization
    provider_id: str
    latency: float
    retries_used: int


@dataclass(frozen=True)
class RetryPolicy:
    max_retries: int = 3
    base_delay: float = 0.5
    max_delay: float = 30.0
    jitter: float = 0.0  # multiplied by a uniform draw; 0 keeps runs reproducible

    def delay(self, attempt: int, rng: random.Random) -> float:
        d = min(self.base_delay * (2**attempt), self.max_delay)
        if self.jitter:
            d += self.jitter * rng.random()
        return d


class TokenBucket:
    """requests/minute limiter; acquire() blocks through the clock."""

    def __init__(self, requests_per_minute: float, clock=None):
        if requests_per_minute <= 0:
            raise ValueError("requests_per_minute must be positive")
        self._rate = requests_per_minute / 60.0
        self._capacity = max(1.0, requests_per_minute / 60.0)
        self._tokens = self._capacity
        self._clock = clock or SystemClock()
        self._last = self._clock.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock.monotonic()
                self._tokens = min(self._capacity, self._tokens + (now - self._last) * self._rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self._rate
            self._clock.sleep(wait)


# ---------------------------------------------------------------------------
# Constrained query prompts and answer parsing.

NEUTRALITY_QUERY_TEMPLATE = (
    "判断下面这个事件的情感极性是否为中性。只回答“是”或“否”，不要输出其他内容。\n事件：{surface}"
)

POLARITY_QUERY_TEMPLATE = (
    "判断下面这个事件的情感极性。只回答“正面”或“负面”，不要输出其他内容。\n事件：{surface}"
)

_ANSWER_STRIP = " \t\r\n。．.，,！!？?；;：:“”\"'"


def _parse_constrained(text: str, allowed: dict[str, object], what: str):
    answer = text.strip(_ANSWER_STRIP)
    if answer in allowed:
        return allowed[answer]
    raise UnparseableAnswerError(f"{what} answer {text!r} is not one of {sorted(allowed)}")


# ---------------------------------------------------------------------------
# Phrase-list parsing.

_NUMBERED_LINE_RE = re.compile(r"^\s*\d+\s*[.、．]\s*(.*)$")


def parse_phrase_list(
    raw: RawCompletion, indicator: Indicator
) -> tuple[list[str], list[tuple[str, str]]]:
    """Split a numbered-list completion into accepted event surfaces and
    rejected lines with reasons. Every non-empty line lands in exactly one of
    the two outputs; ordering is preserved. Total function, never raises."""
    accepted: list[str] = []
    rejected: list[tuple[str, str]] = []
    for line in raw.text.splitlines():
        if not line.strip():
            continue
        m = _NUMBERED_LINE_RE.match(line)
        if not m:
            rejected.append((line, "not a numbered line"))
            continue
        phrase = canonical_event_surface(m.group(1))
        if not phrase:
            rejected.append((line, "empty phrase"))
        elif not phrase.startswith(indicator.surface):
            rejected.append((line, "missing indicator prefix"))
        elif phrase == indicator.surface:
            rejected.append((line, "empty theme"))
        else:
            accepted.append(phrase)
    return accepted, rejected


def prompt_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Mock provider.


def _load_theme_bank() -> tuple[str, ...]:
    ref = resources.files("emokb").joinpath("data/theme_bank.txt")
    lines = ref.read_text(encoding="utf-8").splitlines()
    return tuple(line.strip() for line in lines if line.strip())


_THEME_MODIFIERS = ("再次", "突然", "意外", "经常", "彻底", "几乎", "终于", "慢慢")

# Verbs whose 被-events read as neutral announcements rather than emotional
# events; the mock answers the neutrality query by scanning for them.
NEUTRAL_MARKER_VERBS = frozenset(
    {"安排", "模仿", "通知", "邀请", "选为", "派往", "叫去", "要求"}
)

# Verbs that flip a 被-event positive; everything else answers negative.
POSITIVE_MARKER_VERBS = frozenset(
    {
        "善待", "体谅", "同意", "夸奖", "协助", "救助", "表扬", "奖励",
        "认可", "鼓励", "理解", "支持", "帮助", "信任", "重视", "录取",
    }
)

_EVENT_LINE_RE = re.compile(r"事件：(.+)$", re.MULTILINE)


@dataclass(frozen=True)
class MockPlanSpec:
    """Line composition the mock emits for one generation prompt."""

    unique: int
    duplicates: int = 0
    garbage: int = 0
    blank: int = 0

    def __post_init__(self):
        if self.unique < 0 or self.duplicates < 0 or self.garbage < 0 or self.blank < 0:
            raise ValueError("plan counts must be non-negative")
        if self.duplicates and not self.unique:
            raise ValueError("duplicates require at least one unique phrase")


@dataclass(frozen=True)
class MockPlan:
    indicator_surface: str
    spec: MockPlanSpec
    lines: tuple[str, ...]

    @property
    def raw_line_count(self) -> int:
        return len(self.lines)


class MockProvider:
    """Deterministic offline provider. Output is a pure function of
    (prompt text, seed) plus the construction-time knobs; calling twice with
    the same text yields byte-identical results."""

    def __init__(
        self,
        seed: int = 0,
        default_spec: MockPlanSpec | None = None,
        spec_overrides: dict[str, MockPlanSpec] | None = None,
        force_unparseable: frozenset[str] | set[str] = frozenset(),
        fail_surfaces: frozenset[str] | set[str] = frozenset(),
    ):
        self.seed = seed
        self.default_spec = default_spec
        self.spec_overrides = dict(spec_overrides or {})
        self.force_unparseable = frozenset(force_unparseable)
        self.fail_surfaces = frozenset(fail_surfaces)
        self._themes = _load_theme_bank()

    @property
    def provider_id(self) -> str:
        return f"mock-{self.seed}"

    def _rng(self, salt: str, text: str) -> random.Random:
        digest = hashlib.sha256(f"{self.seed}|{salt}|{text}".encode("utf-8")).hexdigest()
        return random.Random(int(digest, 16))

    def complete_text(self, text: str, params: CompletionParams) -> str:
        if "短语模板" in text:
            indicator_surface, _ = parse_prompt(text)
            if indicator_surface in self.fail_surfaces:
                raise TransportError(f"mock transport failure for {indicator_surface!r}")
            return "\n".join(self.generation_plan(text).lines) + "\n"
        m = _EVENT_LINE_RE.search(text)
        surface = m.group(1).strip() if m else ""
        if surface in self.fail_surfaces:
            raise TransportError(f"mock transport failure for {surface!r}")
        if surface in self.force_unparseable:
            return "也许吧"
        if "是否为中性" in text:
            neutral = any(v in surface for v in NEUTRAL_MARKER_VERBS)
            return "是" if neutral else "否"
        if "正面" in text and "负面" in text:
            positive = any(v in surface for v in POSITIVE_MARKER_VERBS)
            return "正面" if positive else "负面"
        return "无法处理"

    def generation_plan(self, prompt_text: str) -> MockPlan:
        """The exact lines complete_text will emit for this prompt, with the
        unique/duplicate/garbage/blank breakdown. Tests reconcile harvest
        counts against this."""
        surface, _examples = parse_prompt(prompt_text)
        rng = self._rng("gen", prompt_text)
        spec = self.spec_overrides.get(surface) or self.default_spec
        if spec is None:
            spec = MockPlanSpec(
                unique=rng.randint(40, 110),
                duplicates=rng.randint(0, 10),
                garbage=rng.randint(0, 5),
                blank=rng.randint(0, 3),
            )
        themes = self._theme_stream(rng, spec.unique)
        phrases = [surface + theme for theme in themes]
        phrase_lines = list(phrases)
        if spec.duplicates:
            phrase_lines += [rng.choice(phrases) for _ in range(spec.duplicates)]
        rng.shuffle(phrase_lines)
        garbage = self._garbage_lines(rng, surface, spec.garbage)
        lines: list[str] = []
        number = 0
        for phrase in phrase_lines:
            number += 1
            lines.append(f"{number}. {phrase}；")
        for kind, payload in garbage:
            if kind == "numbered":
                number += 1
                lines.append(f"{number}. {payload}；")
            else:
                lines.append(payload)
        for _ in range(spec.blank):
            lines.insert(rng.randrange(len(lines) + 1), "")
        return MockPlan(surface, spec, tuple(lines))

    def _theme_stream(self, rng: random.Random, count: int) -> list[str]:
        bank = list(self._themes)
        rng.shuffle(bank)
        stream = list(bank)
        for modifier in _THEME_MODIFIERS:
            if len(stream) >= count:
                break
            stream += [modifier + theme for theme in bank]
        if count > len(stream):
            raise ValueError(f"theme bank exhausted: need {count}, have {len(stream)}")
        return stream[:count]

    def _garbage_lines(
        self, rng: random.Random, surface: str, count: int
    ) -> list[tuple[str, str]]:
        forms = (
            ("plain", "以下内容仅供参考"),
            ("numbered", "与主题无关的一句话"),
            ("numbered", surface),  # empty theme after trimming
        )
        return [forms[rng.randrange(len(forms))] for _ in range(count)]


# ---------------------------------------------------------------------------
# HTTP provider. One JSON POST per completion; schema kept provider-neutral.


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model_id: str
    credential_env: str
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = 2048
    request_timeout: float = 60.0
    requests_per_minute: float | None = None
    max_retries: int = 3

    @classmethod
    def load(cls, path: str | Path) -> "ProviderConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        for key in ("endpoint", "model_id", "credential_env"):
            if key not in raw:
                raise ValueError(f"provider config missing {key!r}")
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in raw.items() if k in known})

    def params(self) -> CompletionParams:
        return CompletionParams(
            model_id=self.model_id,
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
            request_timeout=self.request_timeout,
        )


class HttpProvider:
    """POSTs {model, input, temperature, max_output_tokens} and expects
    {"text": ...} back. Credential comes from the environment variable named
    in the config, read per call and sent as a bearer token."""

    def __init__(self, config: ProviderConfig):
        import os

        import requests

        self._requests = requests
        self._os = os
        self.config = config

    @property
    def provider_id(self) -> str:
        return self.config.model_id

    def complete_text(self, text: str, params: CompletionParams) -> str:
        token = self._os.environ.get(self.config.credential_env)
        if not token:
            raise AuthError(
                f"environment variable {self.config.credential_env} is not set"
            )
        try:
            resp = self._requests.post(
                self.config.endpoint,
                json={
                    "model": params.model_id,
                    "input": text,
                    "temperature": params.temperature,
                    "max_output_tokens": params.max_output_tokens,
                },
                headers={"Authorization": f"Bearer {token}"},
                timeout=params.request_timeout,
            )
        except self._requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"provider rejected credential: HTTP {resp.status_code}")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransportError(f"HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise GatewayError(f"unexpected HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise TransportError(f"non-JSON response: {exc}") from exc
        text_out = body.get("text", "")
        if not text_out:
            raise RefusalError("provider returned an empty body")
        return text_out


# ---------------------------------------------------------------------------
# The gateway.


@dataclass
class LlmGateway:
    provider: object
    retry_policy: RetryPolicy = field(default_factory=RetryPolicy)
    rate_limiter: TokenBucket | None = None
    audit_path: Path | None = None
    clock: object = field(default_factory=SystemClock)

    def __post_init__(self):
        self._audit_lock = threading.Lock()
        self._retry_rng = random.Random(0)

    # -- low level ---------------------------------------------------------

    def complete_raw(self, text: str, params: CompletionParams) -> RawCompletion:
        """Retry loop around the provider. AuthError is terminal on first
        sight; transport errors and refusals retry up to the cap."""
        attempts = self.retry_policy.max_retries + 1
        last: Exception | None = None
        for attempt in range(attempts):
            if self.rate_limiter is not None:
                self.rate_limiter.acquire()
            start = self.clock.monotonic()
            try:
                out = self.provider.complete_text(text, params)
                latency = self.clock.monotonic() - start
                return RawCompletion(out, self.provider.provider_id, latency, attempt)
            except AuthError:
                raise
            except (TransportError, RefusalError) as exc:
                last = exc
                if attempt + 1 < attempts:
                    delay = self.retry_policy.delay(attempt, self._retry_rng)
                    logger.warning(
                        "provider call failed (%s), retry %d/%d in %.1fs",
                        exc,
                        attempt + 1,
                        self.retry_policy.max_retries,
                        delay,
                    )
                    self.clock.sleep(delay)
        assert last is not None
        raise last

    def _audit(self, indicator: str | None, text: str, completion: RawCompletion) -> None:
        if self.audit_path is None:
            return
        entry = {
            "timestamp": isoformat(self.clock.now()),
            "indicator": indicator,
            "prompt_hash": prompt_hash(text),
            "response": completion.text,
            "latency": round(completion.latency, 6),
        }
        line = json.dumps(entry, ensure_ascii=False)
        with self._audit_lock:
            with open(self.audit_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    # -- public ops --------------------------------------------------------

    def complete(self, prompt: Prompt, params: CompletionParams) -> RawCompletion:
        completion = self.complete_raw(prompt.rendered_text, params)
        self._audit(prompt.indicator_surface, prompt.rendered_text, completion)
        return completion

    def query_neutrality(self, event: EmotionalEvent, params: CompletionParams) -> bool:
        if event.kind != "bei":
            raise ValueError(f"neutrality triage applies to bei events, got {event.kind}")
        text = NEUTRALITY_QUERY_TEMPLATE.format(surface=event.surface)
        completion = self.complete_raw(text, params)
        self._audit(event.indicator_surface, text, completion)
        return _parse_constrained(
            completion.text, {"是": True, "否": False}, "neutrality"
        )

    def query_polarity(self, event: EmotionalEvent, params: CompletionParams) -> str:
        if event.kind != "bei":
            raise ValueError(f"polarity queries apply to bei events, got {event.kind}")
        text = POLARITY_QUERY_TEMPLATE.format(surface=event.surface)
        completion = self.complete_raw(text, params)
        self._audit(event.indicator_surface, text, completion)
        return _parse_constrained(
            completion.text, {"正面": "positive", "负面": "negative"}, "polarity"
        )


def mock_gateway(
    seed: int = 0,
    clock=None,
    audit_path: Path | None = None,
    **mock_kwargs,
) -> LlmGateway:
    """Gateway over a MockProvider with no rate limit; the default test rig."""
    return LlmGateway(
        provider=MockProvider(seed=seed, **mock_kwargs),
        retry_policy=RetryPolicy(max_retries=2, base_delay=0.0),
        audit_path=audit_path,
        clock=clock or FrozenClock(),
    )
