"""Chat-model clients and cost accounting.

Every completion is metered into a CostLedger (input tokens, output
tokens, dollars from a per-model price table), which is how a run's
reported cost is reproduced from its trace. Two implementations:
a scripted client that replays canned responses (tests, goldens,
offline runs) and an OpenAI-style chat-completions HTTP client for
live models.
"""

from __future__ import annotations

import base64
import json
import os
from dataclasses import dataclass, field
from typing import Optional

import httpx


class ModelError(RuntimeError):
    """Transport-level or protocol-level model failure."""


@dataclass
class CostEntry:
    stage: str
    model: str
    input_tokens: int
    output_tokens: int
    cost: float

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "model": self.model,
            "input_tokens": self.input_tokens,
            "output_tokens": self.output_tokens,
            "cost": self.cost,
        }


@dataclass
class CostLedger:
    entries: list[CostEntry] = field(default_factory=list)

    def add(self, entry: CostEntry) -> None:
        self.entries.append(entry)

    @property
    def total_cost(self) -> float:
        return sum(e.cost for e in self.entries)

    @property
    def total_tokens(self) -> tuple[int, int]:
        return (sum(e.input_tokens for e in self.entries),
                sum(e.output_tokens for e in self.entries))

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "total_cost": self.total_cost}


@dataclass
class PriceTable:
    """Dollars per 1k tokens, by model id."""

    input_per_1k: float = 0.0
    output_per_1k: float = 0.0
    models: dict[str, tuple[float, float]] = field(default_factory=dict)

    def cost(self, model: str, input_tokens: int, output_tokens: int) -> float:
        rate_in, rate_out = self.models.get(model, (self.input_per_1k, self.output_per_1k))
        return input_tokens / 1000.0 * rate_in + output_tokens / 1000.0 * rate_out

    @classmethod
    def from_dict(cls, data: dict) -> "PriceTable":
        default = data.get("default", {})
        return cls(
            input_per_1k=float(default.get("input_per_1k", 0.0)),
            output_per_1k=float(default.get("output_per_1k", 0.0)),
            models={
                name: (float(v.get("input_per_1k", 0.0)), float(v.get("output_per_1k", 0.0)))
                for name, v in data.get("models", {}).items()
            },
        )


def estimate_tokens(text: str) -> int:
    # Rough chars/4 heuristic; exact usage comes from live API responses.
    return max(1, len(text) // 4)


def _message_chars(messages: list[dict]) -> int:
    return sum(len(m.get("content", "")) for m in messages)


class ScriptedModelClient:
    """Replays a fixed list of responses; deterministic and offline."""

    def __init__(self, responses: list[str], model_id: str = "scripted",
                 prices: PriceTable | None = None, strict: bool = True):
        self.responses = list(responses)
        self.model_id = model_id
        self.supports_images = True
        self.prices = prices or PriceTable()
        self.strict = strict
        self.calls: list[dict] = []
        self._cursor = 0

    def complete(self, messages: list[dict], images: list[bytes] | None = None,
                 temperature: Optional[float] = None,
                 ledger: Optional[CostLedger] = None, stage: str = "") -> str:
        self.calls.append({
            "messages": messages,
            "image_count": len(images or []),
            "temperature": temperature,
            "stage": stage,
        })
        if self._cursor >= len(self.responses):
            if self.strict:
                raise ModelError(
                    f"scripted client exhausted after {len(self.responses)} responses")
            response = "{}"
        else:
            response = self.responses[self._cursor]
            self._cursor += 1
        if ledger is not None:
            in_tok = estimate_tokens(" " * _message_chars(messages))
            out_tok = estimate_tokens(response)
            ledger.add(CostEntry(stage, self.model_id, in_tok, out_tok,
                                 self.prices.cost(self.model_id, in_tok, out_tok)))
        return response


class OpenAIChatClient:
    """OpenAI-style /chat/completions client with image parts."""

    def __init__(self, model_id: str, endpoint: Optional[str] = None,
                 api_key: Optional[str] = None, prices: PriceTable | None = None,
                 temperature: float = 0.1, timeout_s: float = 120.0,
                 max_retries: int = 2):
        self.model_id = model_id
        self.endpoint = (endpoint or os.environ.get("POSTERKIT_MODEL_ENDPOINT", "")
                         ).rstrip("/")
        self.api_key = api_key or os.environ.get("POSTERKIT_MODEL_KEY", "")
        self.prices = prices or PriceTable()
        self.temperature = temperature
        self.timeout_s = timeout_s
        self.max_retries = max_retries
        self.supports_images = True
        if not self.endpoint:
            raise ModelError(
                "model endpoint not configured (set POSTERKIT_MODEL_ENDPOINT)")

    def _payload(self, messages: list[dict], images: list[bytes] | None,
                 temperature: Optional[float]) -> dict:
        wire_messages = []
        for i, m in enumerate(messages):
            content = m.get("content", "")
            if images and i == len(messages) - 1 and m.get("role") == "user":
                parts: list[dict] = [{"type": "text", "text": content}]
                for img in images:
                    b64 = base64.b64encode(img).decode("ascii")
                    parts.append({
                        "type": "image_url",
                        "image_url": {"url": f"data:image/png;base64,{b64}"},
                    })
                wire_messages.append({"role": m["role"], "content": parts})
            else:
                wire_messages.append({"role": m.get("role", "user"), "content": content})
        return {
            "model": self.model_id,
            "messages": wire_messages,
            "temperature": self.temperature if temperature is None else temperature,
        }

    def complete(self, messages: list[dict], images: list[bytes] | None = None,
                 temperature: Optional[float] = None,
                 ledger: Optional[CostLedger] = None, stage: str = "") -> str:
        payload = self._payload(messages, images, temperature)
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                response = httpx.post(f"{self.endpoint}/chat/completions",
                                      json=payload, headers=headers,
                                      timeout=self.timeout_s)
                response.raise_for_status()
                data = response.json()
                text = data["choices"][0]["message"]["content"]
                if ledger is not None:
                    usage = data.get("usage", {})
                    in_tok = int(usage.get("prompt_tokens",
                                           estimate_tokens(json.dumps(payload))))
                    out_tok = int(usage.get("completion_tokens", estimate_tokens(text)))
                    ledger.add(CostEntry(stage, self.model_id, in_tok, out_tok,
                                         self.prices.cost(self.model_id, in_tok, out_tok)))
                return text
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_error = exc
        raise ModelError(f"model call failed after retries: {last_error}")
