"""JSON ingestion for systems and schedules, validated against the shipped schemas."""
from __future__ import annotations

import json
import os
import tempfile
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import ConfigError
from .symbolic import DigitSetSchedule, ScheduleUnion, SubshiftSpec


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    text = resources.files("symentropy").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def load_json(path) -> object:
    """Parse a JSON file; errors carry the file name and line/column."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read ({exc.strerror})") from exc
    return parse_json(text, str(p))


def parse_json(text: str, source: str = "<string>") -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def validate(doc, name: str, source: str = "<document>") -> None:
    try:
        jsonschema.validate(doc, schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "(root)"
        raise ConfigError(f"{source}: {where}: {exc.message}") from exc


def system_from_json(doc, source: str = "<system>") -> SubshiftSpec:
    validate(doc, "system", source)
    try:
        return SubshiftSpec(doc["alphabet_size"], forbidden=doc.get("forbidden"),
                            matrix=doc.get("matrix"), name=doc.get("name"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _one_schedule(d) -> DigitSetSchedule:
    return DigitSetSchedule(
        d["alphabet"], preperiod=tuple(d.get("preperiod", ())), period=tuple(d.get("period", ())),
        two_sided_rule=d.get("two_sided", "free"), pin_word=tuple(d.get("pin_word", ())),
        left_prefix=tuple(d.get("left_prefix", ())), left_period=tuple(d.get("left_period", ())))


def schedule_from_json(doc, source: str = "<schedule>"):
    validate(doc, "schedule", source)
    try:
        if "union" in doc:
            return ScheduleUnion(tuple(_one_schedule(d) for d in doc["union"]))
        return _one_schedule(doc)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def schedule_to_json(K) -> dict:
    if isinstance(K, ScheduleUnion):
        return {"union": [p.to_json() for p in K.parts]}
    return K.to_json()


def load_system(path) -> SubshiftSpec:
    return system_from_json(load_json(path), str(path))


def load_schedule(path):
    return schedule_from_json(load_json(path), str(path))


def atomic_write(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over the target."""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=f".{p.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
