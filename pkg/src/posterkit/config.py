"""Configuration loading: prompt templates, judge rubric, prices, pipeline.

Prompt templates and the rubric are versioned YAML config files, not
code; the packaged defaults under ``templates/`` can be overridden with
a config file or the POSTERKIT_CONFIG environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .clients import PriceTable
from .render import RenderConfig

_TEMPLATE_DIR = Path(__file__).parent / "templates"


class ConfigError(ValueError):
    pass


def _load_yaml(path: Path) -> dict:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file missing: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    return data


def load_prompts(path: str | Path | None = None) -> dict:
    prompts = _load_yaml(Path(path) if path else _TEMPLATE_DIR / "prompts.yaml")
    required = ("planner", "planner_with_paper", "paper_extractor", "reviewer",
                "synthesis_guided", "synthesis_free")
    missing = [k for k in required if k not in prompts]
    if missing:
        raise ConfigError(f"prompt config missing templates: {missing}")
    return prompts


def load_rubric(path: str | Path | None = None) -> dict:
    rubric = _load_yaml(Path(path) if path else _TEMPLATE_DIR / "rubric.yaml")
    if "metrics" not in rubric or "judge_prompt" not in rubric:
        raise ConfigError("rubric config needs 'metrics' and 'judge_prompt'")
    return rubric


def load_prices(path: str | Path | None = None) -> PriceTable:
    return PriceTable.from_dict(
        _load_yaml(Path(path) if path else _TEMPLATE_DIR / "prices.yaml"))


@dataclass
class PipelineConfig:
    """Everything the editing pipeline needs besides the model client."""

    max_adjust_rounds: int = 1
    parse_retries: int = 2
    review_enabled: bool = True
    needs_paper_override: bool = True
    render: RenderConfig = field(default_factory=RenderConfig)
    prompts: dict = field(default_factory=load_prompts)
    rubric: dict = field(default_factory=load_rubric)

    @classmethod
    def from_file(cls, path: str | Path | None = None) -> "PipelineConfig":
        """Build from a YAML config file; unset keys fall back to defaults."""
        if path is None:
            path = os.environ.get("POSTERKIT_CONFIG")
        if path is None:
            return cls()
        data = _load_yaml(Path(path))
        render_cfg = data.get("render", {})
        return cls(
            max_adjust_rounds=int(data.get("max_adjust_rounds", 1)),
            parse_retries=int(data.get("parse_retries", 2)),
            review_enabled=bool(data.get("review_enabled", True)),
            needs_paper_override=bool(data.get("needs_paper_override", True)),
            render=RenderConfig(
                mode=render_cfg.get("mode", "wireframe"),
                command=render_cfg.get("command"),
                dpi=int(render_cfg.get("dpi", 32)),
            ),
            prompts=load_prompts(data["prompts"]) if data.get("prompts") else load_prompts(),
            rubric=load_rubric(data["rubric"]) if data.get("rubric") else load_rubric(),
        )


def default_prices() -> PriceTable:
    return load_prices()


def resolve_price_table(path: Optional[str] = None) -> PriceTable:
    if path:
        return load_prices(path)
    env = os.environ.get("POSTERKIT_PRICES")
    return load_prices(env) if env else load_prices()
