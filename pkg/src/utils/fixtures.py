"""Curve fixtures (one JSON record per line) and the JSON height report"""
import logging
from fractions import Fraction
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from sympy import isprime

from src.utils.elliptic_curves import CurveQ, RationalPoint
from src.utils.errors import FixtureError
from src.utils.padic_numbers import render_expansion

logger = logging.getLogger(__name__)

STAGES = ("e2", "frobenius", "sigma", "height", "multiple")


class ExpectedValue(BaseModel):
    """One known value of a pipeline stage.

    ``value`` is a digit expansion for e2 and height, the four entries
    a, b, c, d for frobenius, the residues c_2, c_3, ... for sigma and
    (alpha, beta, d) for multiple.
    """
    stage: Literal["e2", "frobenius", "sigma", "height", "multiple"]
    value: Union[str, List[int]]
    p: Optional[int] = Field(None, description="prime for e2, frobenius, sigma and height")
    prec: Optional[int] = Field(None, ge=1, description="N, or M for height")
    m: Optional[int] = Field(None, ge=2, description="multiplier for the multiple stage")
    modulus: Optional[int] = Field(None, ge=3, description="odd modulus R for the multiple stage")
    column_trick: bool = False
    normalization: Literal["standard", "mst"] = "standard"

    @model_validator(mode="after")
    def check_stage_fields(self):
        if self.stage == "multiple":
            if self.m is None or self.modulus is None:
                raise ValueError("multiple entries need m and modulus")
            if not isinstance(self.value, list) or len(self.value) != 3:
                raise ValueError("multiple entries expect [alpha, beta, d]")
            return self
        if self.p is None or self.prec is None:
            raise ValueError(f"{self.stage} entries need p and prec")
        if not isprime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.stage in ("e2", "height") and not isinstance(self.value, str):
            raise ValueError(f"{self.stage} entries expect a digit expansion string")
        if self.stage == "frobenius" and (not isinstance(self.value, list) or len(self.value) != 4):
            raise ValueError("frobenius entries expect [a, b, c, d]")
        if self.stage == "sigma" and not isinstance(self.value, list):
            raise ValueError("sigma entries expect a list of residues")
        return self


class CurveFixture(BaseModel):
    label: str = Field(..., min_length=1)
    a_invariants: List[int] = Field(..., min_length=5, max_length=5)
    generator: Optional[List[int]] = Field(
        None, min_length=4, max_length=4, description="x_num, x_den, y_num, y_den")
    tamagawa_lcm: int = Field(1, ge=1)
    note: Optional[str] = None
    expected: List[ExpectedValue] = Field(default_factory=list)

    @field_validator("a_invariants")
    @classmethod
    def check_nonsingular(cls, value):
        CurveQ.from_list(value)
        return value

    @model_validator(mode="after")
    def check_generator(self):
        if self.generator is not None:
            if self.generator[1] == 0 or self.generator[3] == 0:
                raise ValueError("generator denominators must be nonzero")
            if not self.curve().contains(self.point()):
                raise ValueError(f"generator {self.point()} is not on {self.curve()}")
        if any(entry.stage == "height" for entry in self.expected) and self.generator is None:
            raise ValueError("height entries need a generator")
        return self

    def curve(self):
        return CurveQ.from_list(self.a_invariants)

    def point(self):
        if self.generator is None:
            return None
        x_num, x_den, y_num, y_den = self.generator
        return RationalPoint.from_xy(Fraction(x_num, x_den), Fraction(y_num, y_den))


class HeightReport(BaseModel):
    """JSON form of a height; ``render()`` reproduces the text output"""
    valuation: int
    digits: List[int]
    p: int
    precision: int
    diagnostics: dict = Field(default_factory=dict)

    @classmethod
    def from_result(cls, result):
        return cls(**result.value.to_json(), diagnostics=result.diagnostics)

    def render(self):
        return render_expansion(self.p, self.valuation, self.digits, self.precision)


def load_fixtures(path):
    """[(line number, CurveFixture)] for every non-blank line of a JSONL file"""
    fixtures = []
    try:
        with open(path, encoding="utf-8") as handle:
            lines = list(handle)
    except OSError as error:
        raise FixtureError(f"cannot read {path}: {error.strerror}")

    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            fixtures.append((number, CurveFixture.model_validate_json(line)))
        except ValidationError as error:
            first = error.errors()[0]
            location = ".".join(str(part) for part in first["loc"]) or "record"
            raise FixtureError(f"{path}:{number}: {location}: {first['msg']}")
    logger.info("load_fixtures: %d fixtures from %s", len(fixtures), path)
    return fixtures
