"""Configuration directory handling and first-run scaffolding.

Everything lives under one home directory (default ~/.idiolect, overridable
with IDIOLECT_HOME): a key=value properties file and a grammar/ directory whose
files load in lexicographic order, user files after defaults.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from .dispatch import EngineSettings
from .grammar import GrammarDoc, parse_grammar
from .ranker import RankerConfig
from .repair import DEFAULT_FILLERS

HOME_ENV_VAR = "IDIOLECT_HOME"
DEFAULT_HOME_NAME = ".idiolect"
PROPERTIES_FILE = "idiolect.properties"
GRAMMAR_DIR = "grammar"
DEFAULT_GRAMMAR_FILE = "10-default.grammar"
USER_GRAMMAR_FILE = "90-user.grammar"

DEFAULT_PROPERTIES = {
    "auto_repair": "true",
    "max_edits": "2",
    "lambda": "0.3",
    "fallback_threshold": "0.4",
    "fallback_backend": "builtin",
    "fallback_timeout": "2.0",
    "fillers": ",".join(sorted(DEFAULT_FILLERS)),
    "wake_phrase": "start listening",
    "sleep_phrase": "stop listening",
}

QUICK_START = """\
Idiolect is ready. Try these commands at the prompt:

    open the readme md
    jump to the third line
    whenever i say ship it run commit and push

Type :help for REPL commands, :quit to leave.
"""


class ConfigError(RuntimeError):
    pass


@dataclass
class Config:
    home_dir: Path
    properties: dict[str, str]
    grammar_paths: list[Path]
    warnings: list[str] = field(default_factory=list)
    first_run: bool = False

    @property
    def auto_repair(self) -> bool:
        return self.properties.get("auto_repair", "true").lower() in ("true", "1", "yes", "on")

    @property
    def max_edits(self) -> int:
        return int(self.properties.get("max_edits", "2"))

    @property
    def rerank_lambda(self) -> float:
        return float(self.properties.get("lambda", "0.3"))

    @property
    def fallback_threshold(self) -> float:
        return float(self.properties.get("fallback_threshold", "0.4"))

    @property
    def fallback_backend(self) -> str:
        return self.properties.get("fallback_backend", "builtin")

    @property
    def fallback_timeout(self) -> float:
        try:
            return float(self.properties.get("fallback_timeout", "2.0"))
        except ValueError:
            return 2.0

    @property
    def fillers(self) -> frozenset[str]:
        raw = self.properties.get("fillers", "")
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        return frozenset(parts) if parts else DEFAULT_FILLERS

    @property
    def wake_phrase(self) -> str:
        return self.properties.get("wake_phrase", "start listening")

    @property
    def sleep_phrase(self) -> str:
        return self.properties.get("sleep_phrase", "stop listening")

    @property
    def user_grammar_path(self) -> Path:
        return self.home_dir / GRAMMAR_DIR / USER_GRAMMAR_FILE

    def engine_settings(self) -> EngineSettings:
        backend = self.fallback_backend
        fallback_enabled = backend.lower() not in ("off", "none", "disabled")
        ranker = RankerConfig(
            threshold=self.fallback_threshold,
            backend="builtin" if not fallback_enabled else backend,
            timeout_s=self.fallback_timeout,
        )
        return EngineSettings(
            wake_phrase=self.wake_phrase,
            sleep_phrase=self.sleep_phrase,
            fillers=self.fillers,
            max_edits=self.max_edits,
            auto_repair=self.auto_repair,
            rerank_lambda=self.rerank_lambda,
            ranker=ranker,
            fallback_enabled=fallback_enabled,
        )

    def load_grammars(self) -> list[GrammarDoc]:
        docs = []
        for path in self.grammar_paths:
            source = "user" if "user" in path.stem else "default"
            docs.append(parse_grammar(path.read_text("utf-8"), source=source))
        return docs


def parse_properties(text: str) -> tuple[dict[str, str], list[str]]:
    """key=value lines; '#' comments; unknown keys warn but load."""
    props: dict[str, str] = {}
    warnings: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            warnings.append(f"line {lineno}: not a key=value pair: {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULT_PROPERTIES:
            warnings.append(f"line {lineno}: unknown key {key!r}")
        props[key] = value
    return props, warnings


def render_properties(props: Mapping[str, str]) -> str:
    lines = ["# idiolect engine properties"]
    lines += [f"{k}={v}" for k, v in props.items()]
    return "\n".join(lines) + "\n"


def load_config(env: Optional[Mapping[str, str]] = None) -> Config:
    """Load (and on first run create) the configuration directory.

    First run scaffolds the properties file and grammar directory with the
    shipped defaults; later runs read what is there. Out-of-range values are
    clamped with a warning rather than rejected.
    """
    env = env if env is not None else os.environ
    home_override = env.get(HOME_ENV_VAR)
    home_dir = Path(home_override) if home_override else Path.home() / DEFAULT_HOME_NAME
    first_run = not home_dir.exists()
    warnings: list[str] = []
    try:
        home_dir.mkdir(parents=True, exist_ok=True)
        grammar_dir = home_dir / GRAMMAR_DIR
        grammar_dir.mkdir(exist_ok=True)
        properties_path = home_dir / PROPERTIES_FILE
        if not properties_path.exists():
            properties_path.write_text(render_properties(DEFAULT_PROPERTIES), "utf-8")
        default_grammar = grammar_dir / DEFAULT_GRAMMAR_FILE
        if not default_grammar.exists():
            shipped = resources.files("idiolect.data").joinpath("default.grammar")
            default_grammar.write_text(shipped.read_text("utf-8"), "utf-8")
        user_grammar = grammar_dir / USER_GRAMMAR_FILE
        if not user_grammar.exists():
            user_grammar.write_text("# user-defined commands\n", "utf-8")
        props, prop_warnings = parse_properties(properties_path.read_text("utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot use home directory {home_dir}: {exc}") from exc
    warnings.extend(prop_warnings)

    merged = dict(DEFAULT_PROPERTIES)
    merged.update(props)
    config = Config(
        home_dir=home_dir,
        properties=merged,
        grammar_paths=sorted(grammar_dir.glob("*.grammar")),
        warnings=warnings,
        first_run=first_run,
    )
    _clamp(config)
    missing = [p for p in config.grammar_paths if not p.exists()]
    for path in missing:
        config.warnings.append(f"grammar file missing: {path}")
    return config


def _clamp(config: Config) -> None:
    try:
        edits = int(config.properties.get("max_edits", "2"))
    except ValueError:
        edits = 2
        config.warnings.append("max_edits is not an integer; using 2")
    if edits not in (0, 1, 2):
        config.warnings.append(f"max_edits={edits} out of range, clamped to 2")
        edits = max(0, min(edits, 2))
    config.properties["max_edits"] = str(edits)
    try:
        threshold = float(config.properties.get("fallback_threshold", "0.4"))
    except ValueError:
        threshold = 0.4
        config.warnings.append("fallback_threshold is not a number; using 0.4")
    if not 0.0 <= threshold <= 1.0:
        config.warnings.append(f"fallback_threshold={threshold} out of range, clamped")
        threshold = max(0.0, min(threshold, 1.0))
    config.properties["fallback_threshold"] = f"{threshold:g}"


def write_properties(config: Config) -> None:
    (config.home_dir / PROPERTIES_FILE).write_text(
        render_properties(config.properties), "utf-8"
    )
