"""Run configuration (YAML), validated with pydantic; unknown keys are errors.

Example::

    seed: 7
    generator: {kind: zahl_grid, m: 3}
    rotation: {policy: auto}
    partition: {source: heuristic, degree: 4}
    audit: {b: 10, d: 1}
    bound: {epsilon: "1/10", c1: "1", c2: "1"}
    stages: [count, lift_check, classify, audit, bound]
    output: out/zahl3
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

STAGES = ("count", "lift_check", "classify", "audit", "bound")


class ConfigError(ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _rational_text(v) -> str:
    if isinstance(v, float):
        raise ValueError("write rationals as strings like '1/10', not floats")
    try:
        return str(Fraction(str(v)))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {v!r}") from exc


class GeneratorConfig(_Strict):
    kind: Literal["hawaiian", "complementary_conics", "zahl_grid", "random"]
    count: int = 0
    m: int = 2
    n: int = 3
    coord_bound: int = 100


class RotationConfig(_Strict):
    policy: Literal["auto", "identity", "explicit"] = "auto"
    matrix: Optional[List[List[str]]] = None

    @model_validator(mode="after")
    def _matrix_needed(self):
        if (self.policy == "explicit") != (self.matrix is not None):
            raise ValueError("a matrix is required exactly when policy is 'explicit'")
        return self


class PartitionConfig(_Strict):
    source: Literal["heuristic", "file"] = "heuristic"
    degree: int = 4
    path: Optional[str] = None

    @model_validator(mode="after")
    def _check(self):
        if self.source == "file" and not self.path:
            raise ValueError("partition source 'file' needs a path")
        if self.source == "heuristic" and (self.degree < 2 or self.degree % 2):
            raise ValueError("heuristic partition degree must be even and >= 2")
        return self


class AuditConfig(_Strict):
    b: int = Field(ge=0)
    d: int = Field(default=1, ge=1)
    require_condition_i: bool = True


class BoundConfig(_Strict):
    epsilon: str = "1/10"
    c1: str = "1"
    c2: str = "1"
    b: Optional[int] = None

    _rationals = field_validator("epsilon", "c1", "c2", mode="before")(_rational_text)


class RunConfig(_Strict):
    seed: int = 0
    mode: Optional[Literal["signed", "unsigned"]] = None
    input: Optional[str] = None
    generator: Optional[GeneratorConfig] = None
    rotation: RotationConfig = RotationConfig()
    partition: PartitionConfig = PartitionConfig()
    audit: Optional[AuditConfig] = None
    bound: BoundConfig = BoundConfig()
    stages: List[Literal["count", "lift_check", "classify", "audit", "bound"]] = ["count"]
    output: str = "out"

    @model_validator(mode="after")
    def _source(self):
        if (self.input is None) == (self.generator is None):
            raise ValueError("give exactly one of 'input' and 'generator'")
        if "audit" in self.stages and self.audit is None:
            raise ValueError("the audit stage needs an 'audit' section")
        return self


def load_config(path) -> RunConfig:
    from pydantic import ValidationError

    try:
        data = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(str(exc)) from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
