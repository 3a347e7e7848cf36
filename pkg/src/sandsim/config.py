"""Plain-text configuration: `section.key = value` lines.

Two sections exist: `pcg.*` maps onto PcgParams and `rules.*` onto
RuleConfig. Values use the literal Python-ish spellings below; the format
round-trips exactly (parse(format(x)) == x).

    # lines starting with '#' and blank lines are ignored
    pcg.max_lines = 5
    pcg.element_palette = sand,water,wall
    pcg.thickness_range = 1,3
    rules.freeze_chance = 0.05
    rules.velocity_enabled = true
"""

import dataclasses
import os

from .elements import ElementId
from .engine import RuleConfig
from .procgen import PcgParams

__all__ = ["ConfigError", "parse_config", "format_config", "load_config_file",
           "seed_from_env"]

_ENV_SEED = "PW_SEED"


class ConfigError(ValueError):
    """Unparseable configuration text."""


def seed_from_env(default: int) -> int:
    """Global seed override: the PW_SEED environment variable wins."""
    raw = os.environ.get(_ENV_SEED)
    if raw is None:
        return default
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{_ENV_SEED}={raw!r} is not an integer") from exc


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        if value and all(isinstance(v, ElementId) for v in value):
            return ",".join(v.name.lower() for v in value)
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(text: str, template):
    if isinstance(template, bool):
        if text not in ("true", "false"):
            raise ConfigError(f"expected true/false, got {text!r}")
        return text == "true"
    if isinstance(template, tuple):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if template and all(isinstance(v, ElementId) for v in template):
            try:
                return tuple(ElementId[item.upper()] for item in items)
            except KeyError as exc:
                raise ConfigError(f"unknown element name in {text!r}") from exc
        return tuple(int(item) for item in items)
    if isinstance(template, float):
        return float(text)
    if isinstance(template, int):
        return int(text)
    raise ConfigError(f"unsupported field type {type(template).__name__}")


def format_config(pcg: PcgParams | None = None,
                  rules: RuleConfig | None = None) -> str:
    """Canonical text form; fields appear in declaration order."""
    pcg = pcg if pcg is not None else PcgParams()
    rules = rules if rules is not None else RuleConfig()
    lines = []
    for prefix, obj in (("pcg", pcg), ("rules", rules)):
        for field in dataclasses.fields(obj):
            lines.append(f"{prefix}.{field.name} = "
                         f"{_format_value(getattr(obj, field.name))}")
    return "\n".join(lines) + "\n"


def parse_config(text: str) -> tuple[PcgParams, RuleConfig]:
    """Parse config text; unspecified keys keep their defaults."""
    defaults = {"pcg": PcgParams(), "rules": RuleConfig()}
    updates: dict[str, dict] = {"pcg": {}, "rules": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        section, _, name = key.partition(".")
        if section not in defaults or not name:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        template_obj = defaults[section]
        if not hasattr(template_obj, name):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            updates[section][name] = _parse_value(value, getattr(template_obj, name))
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    try:
        pcg = dataclasses.replace(defaults["pcg"], **updates["pcg"])
        rules = dataclasses.replace(defaults["rules"], **updates["rules"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return pcg, rules


def load_config_file(path: str) -> tuple[PcgParams, RuleConfig]:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
