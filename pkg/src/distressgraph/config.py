"""Application configuration: one UTF-8 JSON file covering workflow
parameters, provider settings, resource file paths, and service options.

Relative paths inside the file resolve against the file's own directory so
a config can travel with its data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from .alignment import LexiconProposer, MappingProposer, default_proposer
from .embedding import HashedBagEmbedder
from .engine import Engine
from .errors import ConfigError, ValidationError
from .explain import default_rules, load_rules
from .workflow import WorkflowConfig

_WORKFLOW_KEYS = {
    "alpha",
    "required_roles",
    "tau",
    "tau_align",
    "eta",
    "target_reject_rate",
    "tau_bounds",
}
_PATH_KEYS = {"proposer_entries", "rules", "event_log"}
_APP_KEYS = _PATH_KEYS | {"provider_dim", "host", "port", "auth_tokens"}


@dataclass
class AppConfig:
    workflow: WorkflowConfig = field(default_factory=WorkflowConfig)
    provider_dim: int = 4096
    proposer_entries: Optional[str] = None
    rules: Optional[str] = None
    event_log: Optional[str] = None
    host: str = "127.0.0.1"
    port: int = 8000
    # token -> validator id
    auth_tokens: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        doc = self.workflow.to_dict()
        doc.update(
            {
                "provider_dim": self.provider_dim,
                "proposer_entries": self.proposer_entries,
                "rules": self.rules,
                "event_log": self.event_log,
                "host": self.host,
                "port": self.port,
                "auth_tokens": dict(self.auth_tokens),
            }
        )
        return doc


def _require(condition: bool, name: str, detail: str) -> None:
    if not condition:
        raise ConfigError(f"config field {name!r}: {detail}")


def parse_config(data: dict, base_dir: Optional[Path] = None) -> AppConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(data) - _WORKFLOW_KEYS - _APP_KEYS)
    if unknown:
        raise ConfigError(f"unknown config field {unknown[0]!r}")

    for name in ("alpha", "tau", "tau_align", "eta", "target_reject_rate"):
        if name in data:
            _require(
                isinstance(data[name], (int, float))
                and not isinstance(data[name], bool),
                name,
                "expected a number",
            )
    if "required_roles" in data:
        _require(
            isinstance(data["required_roles"], list)
            and all(isinstance(r, str) for r in data["required_roles"]),
            "required_roles",
            "expected a list of role names",
        )
    if "tau_bounds" in data:
        _require(
            isinstance(data["tau_bounds"], list) and len(data["tau_bounds"]) == 2,
            "tau_bounds",
            "expected [low, high]",
        )
    try:
        workflow = WorkflowConfig.from_dict(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc

    provider_dim = data.get("provider_dim", 4096)
    _require(
        isinstance(provider_dim, int)
        and not isinstance(provider_dim, bool)
        and provider_dim > 0,
        "provider_dim",
        "expected a positive integer",
    )
    host = data.get("host", "127.0.0.1")
    _require(isinstance(host, str) and bool(host), "host", "expected a host string")
    port = data.get("port", 8000)
    _require(
        isinstance(port, int) and not isinstance(port, bool) and 1 <= port <= 65535,
        "port",
        "expected a port in [1, 65535]",
    )
    auth_tokens = data.get("auth_tokens", {})
    _require(
        isinstance(auth_tokens, dict)
        and all(
            isinstance(k, str) and isinstance(v, str) for k, v in auth_tokens.items()
        ),
        "auth_tokens",
        "expected an object of token -> validator id",
    )

    paths: dict[str, Optional[str]] = {}
    for name in _PATH_KEYS:
        value = data.get(name)
        if value is None:
            paths[name] = None
            continue
        _require(isinstance(value, str) and bool(value), name, "expected a file path")
        resolved = Path(value)
        if base_dir is not None and not resolved.is_absolute():
            resolved = base_dir / resolved
        paths[name] = str(resolved)

    return AppConfig(
        workflow=workflow,
        provider_dim=provider_dim,
        proposer_entries=paths["proposer_entries"],
        rules=paths["rules"],
        event_log=paths["event_log"],
        host=host,
        port=port,
        auth_tokens=dict(auth_tokens),
    )


def load_config(path: Union[str, Path]) -> AppConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data, base_dir=path.resolve().parent)


def load_proposer(path: Union[str, Path]) -> MappingProposer:
    """Proposer entries file: JSON array of entries, or an object with
    ``proposer_id`` and ``entries``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read proposer entries {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"proposer entries {path} not valid JSON: {exc}") from exc
    try:
        if isinstance(data, dict):
            return LexiconProposer.from_dicts(
                data["entries"], proposer_id=data.get("proposer_id", "lexicon-proposer-v1")
            )
        return LexiconProposer.from_dicts(data)
    except (KeyError, TypeError, ValidationError) as exc:
        raise ConfigError(f"bad proposer entries {path}: {exc}") from exc


def build_engine(app: AppConfig, log_path: Optional[Union[str, Path]] = None) -> Engine:
    """Construct an engine from configuration, replaying an existing log.

    ``log_path`` overrides the config's event_log; both optional.
    """
    chosen = str(log_path) if log_path is not None else app.event_log
    proposer = (
        load_proposer(app.proposer_entries) if app.proposer_entries else default_proposer()
    )
    rules = load_rules(app.rules) if app.rules else default_rules()
    kwargs = {
        "config": replace(app.workflow),
        "embedder": HashedBagEmbedder(dim=app.provider_dim),
        "proposer": proposer,
        "rules": rules,
    }
    if chosen and Path(chosen).exists():
        return Engine.from_log_file(chosen, **kwargs)
    return Engine(log_path=chosen, **kwargs)


__all__ = ["AppConfig", "build_engine", "load_config", "load_proposer", "parse_config"]
