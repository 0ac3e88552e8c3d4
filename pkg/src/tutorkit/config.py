"""Service configuration from an INI-style key-value file.

Sections: ``[service]`` (data_dir, listen_addr, template_dir),
``[provider]`` (kind plus provider-specific settings), ``[policy]`` (the
adaptivity knobs). Environment variables take precedence over the file for
provider secrets and endpoints.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .adaptivity import DEFAULT_POLICY, AdaptivityPolicy
from .gateway import (
    API_BASE_ENV,
    API_KEY_ENV,
    MODEL_ENV,
    CompletionProvider,
    HttpCompletionProvider,
    RetryPolicy,
    load_script,
)
from .prompts import TemplateLibrary, default_library

DEFAULT_LISTEN_ADDR = "127.0.0.1:8000"


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path = Path("./tutor-data")
    listen_addr: str = DEFAULT_LISTEN_ADDR
    template_dir: Path | None = None
    provider_kind: str = "scripted"
    script_path: Path | None = None
    base_url: str | None = None
    model: str | None = None
    api_key: str | None = None
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    policy: AdaptivityPolicy = DEFAULT_POLICY

    @property
    def listen_host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def listen_port(self) -> int:
        return int(self.listen_addr.rsplit(":", 1)[1])


def load_config(path: Path | str) -> ServiceConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")

    service = parser["service"] if parser.has_section("service") else {}
    provider = parser["provider"] if parser.has_section("provider") else {}
    policy_section = parser["policy"] if parser.has_section("policy") else {}

    policy_kwargs = {}
    for name in (
        "raise_threshold",
        "lower_threshold",
        "mastery_streak",
        "required_transfer_passes",
        "transfer_pass_score",
        "short_answer_min_level",
    ):
        if name in policy_section:
            policy_kwargs[name] = int(policy_section[name])
    if "transfer_domains" in policy_section:
        domains = tuple(d.strip() for d in policy_section["transfer_domains"].split(",") if d.strip())
        policy_kwargs["transfer_domains"] = domains

    retry_kwargs = {}
    if "max_attempts" in provider:
        retry_kwargs["max_attempts"] = int(provider["max_attempts"])
    for name in ("backoff_base", "backoff_cap", "timeout"):
        if name in provider:
            retry_kwargs[name] = float(provider[name])

    template_dir = service.get("template_dir") or None
    script_path = provider.get("script_path") or None
    return ServiceConfig(
        data_dir=Path(service.get("data_dir", "./tutor-data")),
        listen_addr=service.get("listen_addr", DEFAULT_LISTEN_ADDR),
        template_dir=Path(template_dir) if template_dir else None,
        provider_kind=provider.get("kind", "scripted"),
        script_path=Path(script_path) if script_path else None,
        base_url=provider.get("base_url") or None,
        model=provider.get("model") or None,
        api_key=provider.get("api_key") or None,
        retry=RetryPolicy(**retry_kwargs),
        policy=AdaptivityPolicy(**policy_kwargs),
    )


def build_provider(config: ServiceConfig) -> CompletionProvider:
    if config.provider_kind == "scripted":
        if config.script_path is None:
            raise ValueError("scripted provider needs a script_path")
        return load_script(config.script_path)
    if config.provider_kind == "http":
        return HttpCompletionProvider(
            base_url=os.environ.get(API_BASE_ENV) or config.base_url,
            api_key=os.environ.get(API_KEY_ENV) or config.api_key,
            model=os.environ.get(MODEL_ENV) or config.model,
            retry=config.retry,
        )
    raise ValueError(f"unknown provider kind {config.provider_kind!r}")


def build_library(config: ServiceConfig) -> TemplateLibrary:
    if config.template_dir is not None:
        return TemplateLibrary.load(config.template_dir)
    return default_library()
