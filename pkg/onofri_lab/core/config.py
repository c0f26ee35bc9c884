"""
Єдина точка конфігурації лабораторії.

Пріоритет: defaults -> config.yaml (або --config) -> env -> profile.yaml -> CLI args
"""

import json
import os
from dataclasses import dataclass, field, fields as dataclass_fields
from pathlib import Path
from typing import Any, Optional

try:
    import yaml
    YAML_AVAILABLE = True
except ImportError:
    yaml = None  # type: ignore[assignment]
    YAML_AVAILABLE = False

from .errors import ConfigurationError


SECTIONS = (
    "grid", "caps", "bubbles", "search", "branch",
    "minimize", "sample", "output", "display", "runtime",
)

# Формат виводу за замовчуванням для кожної команди
DEFAULT_FORMATS = {
    "quad-check": "csv",
    "bubble-report": "csv",
    "branch": "csv",
    "config-search": "json",
    "minimize": "json",
    "mto-sample": "json",
}


# ---------------------------------------------------------------------------
# Dataclasses
# ---------------------------------------------------------------------------

@dataclass
class GridConfig:
    """Глобальна сітка Гаусса–Лежандра."""
    L: int = 32
    max_degree: int = 4


@dataclass
class CapsConfig:
    delta: float = 0.35
    n_r: int = 200
    n_ang: int = 32


@dataclass
class BubblesConfig:
    configs: list = field(default_factory=lambda: ["PAIR", "TRIANGLE", "TETRAHEDRON", "OCTAHEDRON"])
    eps: list = field(default_factory=lambda: [1e-2, 3e-3, 1e-3])


@dataclass
class SearchConfig:
    N: list = field(default_factory=lambda: [3])
    even: bool = False
    starts: int = 200
    seed: int = 0


@dataclass
class BranchConfig:
    a_start: float = 0.34
    a_end: float = 0.48
    step: float = 0.01
    switch_at_third: bool = True
    lmax: int = 64
    targets: list = field(default_factory=list)


@dataclass
class MinimizeConfig:
    a: float = 0.49
    c0: float = 0.5
    mode: str = "backtrack"
    penalty_weight: float = 1e4
    seeds: int = 10
    seed: int = 0
    lmax: int = 32
    amplitude: float = 0.3
    max_iter: int = 5000
    tol: float = 1e-8


@dataclass
class SampleConfig:
    """Випадкові поля для нерівностей та семплер нижньої межі."""
    count: int = 1000
    lmax: int = 6
    amplitude: float = 1.0
    seed: int = 0
    lemma: bool = False
    K1: float = 3.0
    K2: float = 0.05
    lemma_count: int = 500
    dump_worst: Optional[str] = None


@dataclass
class OutputConfig:
    format: Optional[str] = None
    out: Optional[str] = None


@dataclass
class DisplayConfig:
    ascii_logs: bool = False
    debug: bool = False


@dataclass
class RuntimeConfig:
    threads: int = 0


@dataclass
class AppConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    caps: CapsConfig = field(default_factory=CapsConfig)
    bubbles: BubblesConfig = field(default_factory=BubblesConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    branch: BranchConfig = field(default_factory=BranchConfig)
    minimize: MinimizeConfig = field(default_factory=MinimizeConfig)
    sample: SampleConfig = field(default_factory=SampleConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    display: DisplayConfig = field(default_factory=DisplayConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

    def output_format(self, command: str) -> str:
        return (self.output.format or DEFAULT_FORMATS.get(command, "csv")).lower()


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _parse_bool(value: Any, default: bool = False) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        return value.lower() in ("true", "1", "yes")
    return default


def _env_int(key: str, default: int) -> int:
    """Читає int з os.environ з fallback на default."""
    try:
        return int(os.getenv(key, str(default)))
    except (ValueError, TypeError):
        return default


# ---------------------------------------------------------------------------
# Step 1: config file (YAML або JSON)
# ---------------------------------------------------------------------------

def load_config_file(path: Optional[str] = None) -> dict:
    """
    Читає файл конфігурації.

    Без path: config.yaml у робочій директорії, відсутній файл дає {}.
    З path (--config): файл має існувати; .json читається json, решта через yaml.
    """
    explicit = path is not None
    p = Path(path if explicit else "config.yaml")
    if not p.exists():
        if explicit:
            raise ConfigurationError(f"Файл конфігурації не знайдено: {p}")
        return {}
    try:
        with open(p, "r", encoding="utf-8") as f:
            if p.suffix.lower() == ".json":
                data = json.load(f)
            elif YAML_AVAILABLE and yaml is not None:
                data = yaml.safe_load(f)
            else:
                return {}
    except (OSError, ValueError) as e:
        if explicit:
            raise ConfigurationError(f"Не вдалося прочитати {p}: {e}") from e
        return {}
    except Exception as e:
        # yaml.YAMLError
        if explicit:
            raise ConfigurationError(f"Не вдалося розібрати {p}: {e}") from e
        return {}
    return data if isinstance(data, dict) else {}


# ---------------------------------------------------------------------------
# Step 2: environment (після load_dotenv)
# ---------------------------------------------------------------------------

def apply_env(base: dict) -> dict:
    if os.getenv("ONOFRI_LAB_THREADS") is not None:
        base.setdefault("runtime", {})
        base["runtime"]["threads"] = max(0, _env_int("ONOFRI_LAB_THREADS", 0))
    if os.getenv("ONOFRI_LAB_ASCII_LOGS") is not None:
        base.setdefault("display", {})
        base["display"]["ascii_logs"] = _parse_bool(os.getenv("ONOFRI_LAB_ASCII_LOGS"))
    if os.getenv("ONOFRI_LAB_DEBUG") is not None:
        base.setdefault("display", {})
        base["display"]["debug"] = _parse_bool(os.getenv("ONOFRI_LAB_DEBUG"))
    return base


# ---------------------------------------------------------------------------
# Step 3: apply profile overrides
# ---------------------------------------------------------------------------

def apply_profile(base: dict, profile: dict) -> dict:
    """Deep-merge секцій профілю поверх base."""
    for section in SECTIONS:
        if isinstance(profile.get(section), dict):
            base.setdefault(section, {})
            base[section].update(profile[section])
    return base


# ---------------------------------------------------------------------------
# Step 4: apply CLI overrides
# ---------------------------------------------------------------------------

# атрибут argparse -> (секція, ключ)
_CLI_MAP = {
    "L": ("grid", "L"),
    "max_degree": ("grid", "max_degree"),
    "delta": ("caps", "delta"),
    "n_r": ("caps", "n_r"),
    "n_ang": ("caps", "n_ang"),
    "configs": ("bubbles", "configs"),
    "eps": ("bubbles", "eps"),
    "N": ("search", "N"),
    "starts": ("search", "starts"),
    "a_start": ("branch", "a_start"),
    "a_end": ("branch", "a_end"),
    "step": ("branch", "step"),
    "targets": ("branch", "targets"),
    "a": ("minimize", "a"),
    "c0": ("minimize", "c0"),
    "mode": ("minimize", "mode"),
    "penalty_weight": ("minimize", "penalty_weight"),
    "seeds": ("minimize", "seeds"),
    "max_iter": ("minimize", "max_iter"),
    "tol": ("minimize", "tol"),
    "count": ("sample", "count"),
    "K1": ("sample", "K1"),
    "K2": ("sample", "K2"),
    "lemma_count": ("sample", "lemma_count"),
    "dump_worst": ("sample", "dump_worst"),
    "format": ("output", "format"),
    "out": ("output", "out"),
    "threads": ("runtime", "threads"),
}

# Спільні прапорці, секція яких залежить від команди
_COMMAND_SECTION = {
    "bubble-report": "bubbles",
    "config-search": "search",
    "branch": "branch",
    "minimize": "minimize",
    "mto-sample": "sample",
}


def apply_cli_overrides(base: dict, args) -> dict:
    """Найвищий пріоритет: CLI аргументи."""
    for attr, (section, key) in _CLI_MAP.items():
        value = getattr(args, attr, None)
        if value is not None:
            base.setdefault(section, {})
            base[section][key] = value.lower() if attr == "format" else value

    command = getattr(args, "command", None)
    section = _COMMAND_SECTION.get(command)
    if section:
        for attr in ("seed", "lmax", "amplitude"):
            value = getattr(args, attr, None)
            if value is not None:
                base.setdefault(section, {})
                base[section][attr] = value
    if getattr(args, "even", False):
        base.setdefault("search", {})
        base["search"]["even"] = True
    if getattr(args, "no_switch", False):
        base.setdefault("branch", {})
        base["branch"]["switch_at_third"] = False
    if getattr(args, "lemma", False):
        base.setdefault("sample", {})
        base["sample"]["lemma"] = True
    if getattr(args, "debug", False):
        base.setdefault("display", {})
        base["display"]["debug"] = True
    if getattr(args, "ascii_logs", False):
        base.setdefault("display", {})
        base["display"]["ascii_logs"] = True
    return base


# ---------------------------------------------------------------------------
# Step 5: build AppConfig from flat dict
# ---------------------------------------------------------------------------

def _build_section(cls, data: dict, section_name: str):
    """Створює екземпляр dataclass з відповідної секції словника."""
    section_data = data.get(section_name, {})
    if not isinstance(section_data, dict):
        return cls()
    # Фільтруємо тільки поля, що є у dataclass
    valid_fields = {f.name for f in dataclass_fields(cls)}
    filtered = {k: v for k, v in section_data.items() if k in valid_fields and v is not None}
    try:
        return cls(**filtered)
    except TypeError as e:
        raise ConfigurationError(f"Секція '{section_name}': {e}") from e


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def build_config(args=None, profile_config: Optional[dict] = None) -> AppConfig:
    """
    Повний pipeline побудови конфігурації:
    defaults -> config file -> env -> profile -> CLI
    """
    # 1. config.yaml або --config (defaults вшиті у dataclass)
    base = load_config_file(getattr(args, "config", None) if args is not None else None)

    # 2. Env
    base = apply_env(base)

    # 3. Profile
    if profile_config:
        base = apply_profile(base, profile_config)

    # 4. CLI
    if args is not None:
        base = apply_cli_overrides(base, args)

    # 5. Збираємо AppConfig
    config = AppConfig(
        grid=_build_section(GridConfig, base, "grid"),
        caps=_build_section(CapsConfig, base, "caps"),
        bubbles=_build_section(BubblesConfig, base, "bubbles"),
        search=_build_section(SearchConfig, base, "search"),
        branch=_build_section(BranchConfig, base, "branch"),
        minimize=_build_section(MinimizeConfig, base, "minimize"),
        sample=_build_section(SampleConfig, base, "sample"),
        output=_build_section(OutputConfig, base, "output"),
        display=_build_section(DisplayConfig, base, "display"),
        runtime=_build_section(RuntimeConfig, base, "runtime"),
    )
    config.bubbles.configs = [str(c).upper() for c in _as_list(config.bubbles.configs)]
    config.bubbles.eps = [float(e) for e in _as_list(config.bubbles.eps)]
    config.search.N = [int(n) for n in _as_list(config.search.N)]
    config.branch.targets = [float(a) for a in _as_list(config.branch.targets)]
    return config
