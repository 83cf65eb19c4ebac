"""Experiment configuration files (INI syntax).

Recognized sections and keys, with defaults::

    [system]      a = 1.0, mu = 1.0, hbar = 1.0, alpha = 0.0
    [basis]       N = 100
    [quadrature]  G = 2048
    [model]       architecture = box          (box | perturbed | 1,64,1 ...)
    [train]       optimizer = adaptive-moments, eta = 1e-3, eta_decay = 1.0,
                  max_iters = 20000, window = 200, tol = 1e-9, seed = 0

Unknown sections or keys are rejected.  Presets ship in ``vqs/presets``.
"""
from __future__ import annotations

import configparser
import re
from importlib import resources
from pathlib import Path

from vqs.basis import BoxSystem
from vqs.errors import ConfigError, VQSError
from vqs.model import ARCHITECTURES
from vqs.trainer import TrainConfig

SCHEMA = {
    "system": {"a": float, "mu": float, "hbar": float, "alpha": float},
    "basis": {"N": int},
    "quadrature": {"G": int},
    "model": {"architecture": str},
    "train": {
        "optimizer": str, "eta": float, "eta_decay": float, "max_iters": int,
        "window": int, "tol": float, "seed": int,
    },
}

PRESETS = ("unperturbed.cfg", "perturbed_a.cfg", "perturbed_b.cfg")


def preset_path(name: str) -> Path:
    ref = resources.files("vqs") / "presets" / name
    return Path(str(ref))


def resolve_config_path(name) -> Path:
    """A filesystem path, or the name of a bundled preset."""
    path = Path(name)
    if path.is_file():
        return path
    for candidate in (str(name), f"{name}.cfg"):
        preset = preset_path(Path(candidate).name)
        if Path(candidate).name in PRESETS and preset.is_file():
            return preset
    raise ConfigError(f"config file not found: {name}")


def _key_line(lines, section, key):
    current = None
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        header = re.match(r"^\[([^\]]+)\]", text)
        if header:
            current = header.group(1).strip()
        elif current == section and re.match(rf"^{re.escape(key)}\s*[=:]", text, re.IGNORECASE):
            return lineno
    return None


def _section_line(lines, section):
    for lineno, raw in enumerate(lines, start=1):
        if raw.strip() == f"[{section}]":
            return lineno
    return None


def _parse_architecture(value, line):
    if value in ARCHITECTURES:
        return value
    try:
        dims = tuple(int(d) for d in value.split(","))
    except ValueError:
        raise ConfigError(
            f"architecture must be one of {sorted(ARCHITECTURES)} or a comma list of widths, got {value!r}",
            line,
        ) from None
    return dims


def parse_config(text: str, source="<config>") -> TrainConfig:
    lines = text.splitlines()
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(source))
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{source}: expected a [section] header before {exc.line.strip()!r}", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError(f"{source}: cannot parse {exc.errors[0][1].strip() if exc.errors else ''}", lineno) from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        raise ConfigError(f"{source}: {exc.message.splitlines()[0]}", lineno) from None

    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]", _section_line(lines, section))
        for key, raw in parser.items(section):
            line = _key_line(lines, section, key)
            kind = SCHEMA[section].get(key)
            if kind is None:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]", line)
            raw = raw.strip()
            if key == "architecture":
                values[key] = _parse_architecture(raw, line)
                continue
            try:
                values[key] = kind(raw)
            except ValueError:
                raise ConfigError(f"{source}: {key} = {raw!r} is not a valid {kind.__name__}", line) from None

    system_keys = SCHEMA["system"]
    try:
        system = BoxSystem(**{k: values.pop(k) for k in list(values) if k in system_keys})
    except VQSError as exc:
        raise ConfigError(f"{source}: [system] {exc}") from None
    config = TrainConfig(system=system, **values)
    return config.validate()


def load_config(path) -> TrainConfig:
    path = resolve_config_path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, source=path)


def dump_config(config: TrainConfig) -> str:
    s = config.system
    arch = config.architecture
    if not isinstance(arch, str):
        arch = ",".join(str(d) for d in arch)
    return (
        "[system]\n"
        f"a = {s.a!r}\nmu = {s.mu!r}\nhbar = {s.hbar!r}\nalpha = {s.alpha!r}\n\n"
        f"[basis]\nN = {config.N}\n\n"
        f"[quadrature]\nG = {config.G}\n\n"
        f"[model]\narchitecture = {arch}\n\n"
        "[train]\n"
        f"optimizer = {config.optimizer}\neta = {config.eta!r}\n"
        f"eta_decay = {config.eta_decay!r}\nmax_iters = {config.max_iters}\n"
        f"window = {config.window}\ntol = {config.tol!r}\nseed = {config.seed}\n"
    )
