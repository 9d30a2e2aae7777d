"""Pydantic models for command output and moment input documents"""
import math
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.special.moments import MomentKind

SCHEMA_VERSION = "1"


class Check(BaseModel):
    name: str
    passed: bool
    slack: float
    detail: Optional[str] = None

    @classmethod
    def tolerance(cls, name, error, tol, scale=1.0, detail=None):
        """Passes iff tol * scale - error > 0, so a zero tolerance always fails"""
        slack = tol * scale - error
        return cls(name=name, passed=bool(slack > 0), slack=slack, detail=detail)

    @classmethod
    def boolean(cls, name, passed, slack=None, detail=None):
        if slack is None:
            slack = 1.0 if passed else -1.0
        return cls(name=name, passed=bool(passed), slack=slack, detail=detail)

    @classmethod
    def failure(cls, name, error):
        return cls(name=name, passed=False, slack=-math.inf, detail=str(error))


class OutputEnvelope(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: str
    params: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    checks: List[Check] = Field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)


class MomentDocument(BaseModel):
    """{"kind": ..., "moments": [...], "interval": [a, b]}"""
    model_config = ConfigDict(extra="forbid")

    kind: MomentKind = MomentKind.HAMBURGER
    moments: List[float] = Field(min_length=1)
    interval: Optional[Tuple[float, float]] = None

    @field_validator("interval")
    @classmethod
    def _ordered(cls, value):
        if value is not None and not value[0] < value[1]:
            raise ValueError(f"interval {value} is empty")
        return value
