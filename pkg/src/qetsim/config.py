"""Run configuration: flat key-value text with sections.

A run is fully described by one INI-style file, and every JSON report
embeds the resolved configuration so results can be replayed exactly.
Custom models are expressed per site as sums of Pauli products, e.g.::

    [model]
    kind = custom
    sites = 6
    range = 1
    term_0 = -1.0 z0 + -0.5 x0 x1 + -0.5 x0 x5
    ...

Directions are three whitespace-separated reals; they are normalized on
load with a warning when the correction exceeds 1e-6.
"""

from __future__ import annotations

import configparser
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .chain import ChainModel, build_custom, build_ising
from .pauli import OperatorSum, PauliTerm


class ConfigError(ValueError):
    """Configuration could not be parsed or validated."""


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    sites: int
    b: float = 0.0
    h: float = 0.0
    boundary: str = "periodic"
    interaction_range: int = 1
    custom_terms: tuple[str, ...] = ()

    def build(self) -> ChainModel:
        if self.kind == "ising":
            return build_ising(self.sites, self.b, self.h, self.boundary)
        terms = [
            _parse_term_sum(text, self.sites) for text in self.custom_terms
        ]
        return build_custom(
            self.sites,
            self.interaction_range,
            lambda n: terms[n],
            boundary=self.boundary,
        )


@dataclass(frozen=True)
class ProtocolConfig:
    site_a: int
    direction_a: tuple[float, float, float]
    site_b: int
    direction_b: tuple[float, float, float]
    shots: int = 0


@dataclass(frozen=True)
class SolverConfig:
    method: str = "dense"
    tol: float = 1e-10
    max_iter: int = 300


@dataclass(frozen=True)
class SweepConfig:
    axis: str
    values: tuple[float, ...] = ()
    points: int = 0


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig
    protocol: Optional[ProtocolConfig] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: Optional[SweepConfig] = None
    seed: int = 0
    output_dir: Optional[str] = None
    output_format: Optional[str] = None
    source_path: Optional[str] = None
    resolved: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(self.resolved)


_TERM_TOKEN = re.compile(r"^([xyz])(\d+)$")


def _parse_term_sum(text: str, site_count: int) -> OperatorSum:
    terms = []
    for chunk in text.split("+"):
        fields = chunk.split()
        if not fields:
            raise ConfigError(f"empty product in term definition {text!r}")
        try:
            coefficient = float(fields[0])
        except ValueError:
            raise ConfigError(
                f"product {chunk.strip()!r} must start with a real coefficient"
            ) from None
        factors = {}
        for token in fields[1:]:
            match = _TERM_TOKEN.match(token)
            if not match:
                raise ConfigError(
                    f"factor {token!r} is not of the form <axis><site>, e.g. x3"
                )
            site = int(match.group(2))
            if site >= site_count:
                raise ConfigError(f"factor {token!r} outside chain of {site_count} sites")
            if site in factors:
                raise ConfigError(f"site {site} repeated inside one product: {chunk!r}")
            factors[site] = match.group(1)
        terms.append(PauliTerm(coefficient, factors))
    return OperatorSum(tuple(terms))


def _section_line(path: Path, section: str) -> str:
    try:
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            if line.strip().lower() == f"[{section}]":
                return f"{path}:{lineno}"
    except OSError:
        pass
    return str(path)


class _Section:
    """Typed access to one config section with located error messages."""

    def __init__(self, parser, name: str, path: Path):
        self.name = name
        self.path = path
        self.present = parser.has_section(name)
        self.raw = dict(parser[name]) if self.present else {}

    def _fail(self, message: str):
        raise ConfigError(f"{_section_line(self.path, self.name)}: [{self.name}] {message}")

    def require(self, key: str) -> str:
        if key not in self.raw:
            self._fail(f"missing required key {key!r}")
        return self.raw[key]

    def get(self, key: str, default=None):
        return self.raw.get(key, default)

    def get_int(self, key: str, default=None) -> int:
        value = self.require(key) if default is None else self.raw.get(key, default)
        try:
            return int(value)
        except (TypeError, ValueError):
            self._fail(f"key {key!r} must be an integer, got {value!r}")

    def get_float(self, key: str, default=None) -> float:
        value = self.require(key) if default is None else self.raw.get(key, default)
        try:
            return float(value)
        except (TypeError, ValueError):
            self._fail(f"key {key!r} must be a number, got {value!r}")

    def get_direction(self, key: str) -> tuple[float, float, float]:
        fields = self.require(key).split()
        if len(fields) != 3:
            self._fail(f"key {key!r} must hold three reals, got {len(fields)} fields")
        try:
            vec = [float(f) for f in fields]
        except ValueError:
            self._fail(f"key {key!r} holds a non-numeric component")
        norm = math.sqrt(sum(c * c for c in vec))
        if norm == 0.0:
            self._fail(f"key {key!r} must not be the zero vector")
        if abs(norm - 1.0) > 1e-6:
            print(
                f"warning: renormalizing {key} by {abs(norm - 1.0):.3e}",
                file=sys.stderr,
            )
        return tuple(c / norm for c in vec)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as err:
        # configparser messages already carry file/line information
        raise ConfigError(str(err)) from None

    model_section = _Section(parser, "model", path)
    if not model_section.present:
        raise ConfigError(f"{path}: missing required section [model]")
    kind = model_section.get("kind", "ising").strip().lower()
    sites = model_section.get_int("sites")
    boundary = model_section.get("boundary", "periodic").strip().lower()
    if boundary not in ("open", "periodic"):
        model_section._fail(f"boundary must be open or periodic, got {boundary!r}")
    if kind == "ising":
        model = ModelConfig(
            kind="ising",
            sites=sites,
            b=model_section.get_float("b"),
            h=model_section.get_float("h"),
            boundary=boundary,
        )
    elif kind == "custom":
        reach = model_section.get_int("range", "1")
        custom = []
        for n in range(sites):
            custom.append(model_section.require(f"term_{n}"))
        model = ModelConfig(
            kind="custom",
            sites=sites,
            boundary=boundary,
            interaction_range=reach,
            custom_terms=tuple(custom),
        )
    else:
        model_section._fail(f"kind must be ising or custom, got {kind!r}")

    protocol_section = _Section(parser, "protocol", path)
    protocol_cfg = None
    if protocol_section.present:
        site_a = protocol_section.get_int("site_a")
        site_b = protocol_section.get_int("site_b")
        for label, site in (("site_a", site_a), ("site_b", site_b)):
            if not 0 <= site < sites:
                protocol_section._fail(
                    f"{label} = {site} outside chain of {sites} sites"
                )
        protocol_cfg = ProtocolConfig(
            site_a=site_a,
            direction_a=protocol_section.get_direction("direction_a"),
            site_b=site_b,
            direction_b=protocol_section.get_direction("direction_b"),
            shots=protocol_section.get_int("shots", "0"),
        )

    solver_section = _Section(parser, "solver", path)
    method = (solver_section.get("method", "dense") or "dense").strip().lower()
    if method not in ("dense", "krylov"):
        solver_section._fail(f"method must be dense or krylov, got {method!r}")
    solver_cfg = SolverConfig(
        method=method,
        tol=solver_section.get_float("tol", "1e-10"),
        max_iter=solver_section.get_int("max_iter", "300"),
    )

    sweep_section = _Section(parser, "sweep", path)
    sweep_cfg = None
    if sweep_section.present:
        axis = sweep_section.require("axis").strip().lower()
        if axis not in ("distance", "coupling", "angle"):
            sweep_section._fail(
                f"axis must be distance, coupling or angle, got {axis!r}"
            )
        values: tuple[float, ...] = ()
        points = 0
        if axis == "angle":
            points = sweep_section.get_int("points", "721")
            if points < 1:
                sweep_section._fail("points must be positive")
        else:
            raw = sweep_section.require("values").split()
            if not raw:
                sweep_section._fail("values must not be empty")
            try:
                values = tuple(float(v) for v in raw)
            except ValueError:
                sweep_section._fail("values must be whitespace-separated numbers")
        sweep_cfg = SweepConfig(axis=axis, values=values, points=points)

    run_section = _Section(parser, "run", path)
    seed = run_section.get_int("seed", "0") if run_section.present else 0

    output_section = _Section(parser, "output", path)
    output_dir = output_section.get("dir") if output_section.present else None
    output_format = output_section.get("format") if output_section.present else None

    resolved = {s: dict(parser[s]) for s in parser.sections()}
    return RunConfig(
        model=model,
        protocol=protocol_cfg,
        solver=solver_cfg,
        sweep=sweep_cfg,
        seed=seed,
        output_dir=output_dir,
        output_format=output_format,
        source_path=str(path),
        resolved=resolved,
    )
