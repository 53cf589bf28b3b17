"""Settings loading: TOML file, `SURF_CONFIG` env var, coded defaults."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .graph import DEFAULT_DAMPING, DEFAULT_EPS, DEFAULT_FUSION_WEIGHTS, DEFAULT_MAX_ITER
from .rank import DEFAULT_RANK_WEIGHTS, DEFAULT_TOP_RESULTS
from .search import (
    DEFAULT_CORPUS_CAP,
    DEFAULT_PER_PROVIDER_LIMIT,
    DEFAULT_TIMEOUT_MS,
    ProviderConfig,
)

CONFIG_ENV_VAR = "SURF_CONFIG"
DEFAULT_LISTEN = "127.0.0.1:7878"


@dataclass
class Settings:
    damping: float = DEFAULT_DAMPING
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    fusion_weights: tuple[float, float, float] = DEFAULT_FUSION_WEIGHTS
    rank_weights: tuple[float, float, float, float] = DEFAULT_RANK_WEIGHTS
    top_results: int = DEFAULT_TOP_RESULTS
    corpus_cap: int = DEFAULT_CORPUS_CAP
    per_provider_limit: int = DEFAULT_PER_PROVIDER_LIMIT
    fixtures_dir: str = ""
    cache_dir: str = ""
    listen: str = DEFAULT_LISTEN
    providers: list[ProviderConfig] = field(default_factory=list)


def default_settings() -> Settings:
    """Settings with one live StackExchange provider; works with no file."""
    settings = Settings()
    settings.providers = [
        ProviderConfig(
            provider_id="stackoverflow",
            kind="stackexchange",
            credential_env="SURF_STACKEXCHANGE_KEY",
        )
    ]
    return settings


def load_settings(path: str | Path | None = None) -> Settings:
    """Load settings from `path`, else $SURF_CONFIG, else defaults."""
    if path is None:
        env_path = os.environ.get(CONFIG_ENV_VAR, "")
        path = env_path or None
    if path is None:
        return default_settings()

    raw = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    settings = Settings()

    graph = raw.get("graph", {})
    settings.damping = float(graph.get("damping", settings.damping))
    settings.eps = float(graph.get("eps", settings.eps))
    settings.max_iter = int(graph.get("max_iter", settings.max_iter))
    if "fusion_weights" in graph:
        settings.fusion_weights = tuple(float(w) for w in graph["fusion_weights"])

    rank = raw.get("rank", {})
    if "weights" in rank:
        settings.rank_weights = tuple(float(w) for w in rank["weights"])
    settings.top_results = int(rank.get("top_n", settings.top_results))

    search = raw.get("search", {})
    settings.corpus_cap = int(search.get("corpus_cap", settings.corpus_cap))
    settings.per_provider_limit = int(
        search.get("per_provider_limit", settings.per_provider_limit)
    )
    settings.fixtures_dir = str(search.get("fixtures_dir", settings.fixtures_dir))

    content = raw.get("content", {})
    settings.cache_dir = str(content.get("cache_dir", settings.cache_dir))

    service = raw.get("service", {})
    settings.listen = str(service.get("listen", settings.listen))

    for entry in raw.get("provider", []):
        settings.providers.append(
            ProviderConfig(
                provider_id=str(entry["id"]),
                kind=str(entry.get("kind", "generic")),
                endpoint=str(entry.get("endpoint", "")),
                credential_env=str(entry.get("credential_env", "")),
                per_provider_limit=int(entry.get("limit", settings.per_provider_limit)),
                timeout_ms=int(entry.get("timeout_ms", DEFAULT_TIMEOUT_MS)),
                enabled=bool(entry.get("enabled", True)),
                options=dict(entry.get("options", {})),
            )
        )
    if not settings.providers and not settings.fixtures_dir:
        settings.providers = default_settings().providers
    return settings


def parse_listen(listen: str) -> tuple[str, int]:
    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"listen address must be host:port, got {listen!r}")
    return host, int(port)
