from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.config.settings import settings
from app.services.algebra import AlgebraElement
from app.utils.error_handlers import ConfigError, QuasiTodaError


class CommandName(str, Enum):
    """Job commands of the command-line front end"""
    FACTORIZE = "factorize"
    VIETA = "vieta"
    TODA_SOLVE = "toda-solve"
    TODA_FLOW = "toda-flow"
    LIOUVILLE = "liouville"
    KP_CHECK = "kp-check"
    KDV_SOLITON = "kdv-soliton"
    TAU_CHECK = "tau-check"
    SECH_CHECK = "sech-check"


COMMUTATIVE_COMMANDS = (CommandName.TAU_CHECK.value, CommandName.SECH_CHECK.value)


class SystemType(str, Enum):
    """Toda system type"""
    A = "A"
    B = "B"
    C = "C"


class JobConfig(BaseModel):
    """Validated job configuration; identical configs give identical artifacts"""
    model_config = ConfigDict(extra="forbid", use_enum_values=True)

    command: CommandName
    seed: int = Field(default=0, ge=0)
    dim: int = Field(default=2, ge=1, le=6)
    orders: Tuple[int, int] = (6, 6)
    type: SystemType = SystemType.A
    n: int = Field(default=3, ge=1)
    N: int = Field(default=2, ge=0)
    degree: int = Field(default=3, ge=0)
    bound: int = Field(default=3, ge=1)
    instances: int = Field(default=1, ge=1)
    m: int = Field(default=3, ge=1, description="Index of the symbolic flow time")
    floor: Optional[int] = Field(default=None, le=-1)
    kdv: bool = True

    # explicit instance data
    alphas: Optional[List[str]] = None
    amps: Optional[List[str]] = None
    alpha: str = "1"
    a: str = "1"

    # numeric comparison
    radius: Optional[float] = Field(default=None, gt=0, description="Bound on |x + t|; sets half_width = radius / 2")
    half_width: Optional[float] = Field(default=None, gt=0)
    points: Optional[int] = Field(default=None, ge=0)
    tolerance: Optional[float] = Field(default=None, gt=0)

    # artifacts
    report: Optional[str] = None
    dump: Optional[str] = None
    csv: Optional[str] = None

    @field_validator("orders", mode="before")
    @classmethod
    def parse_orders(cls, v):
        if isinstance(v, str):
            parts = [p.strip() for p in v.split(",") if p.strip()]
            if len(parts) == 1:
                parts = parts * 2
            v = tuple(int(p) for p in parts)
        if isinstance(v, int):
            v = (v, v)
        return v

    @field_validator("orders")
    @classmethod
    def validate_orders(cls, v):
        if any(o < 0 for o in v):
            raise ValueError("orders must be nonnegative")
        return v

    @field_validator("alpha", "a")
    @classmethod
    def validate_rational(cls, v):
        try:
            Fraction(v)
        except ZeroDivisionError as e:
            raise ValueError("zero denominator") from e
        return v

    @field_validator("alphas", "amps")
    @classmethod
    def validate_literals(cls, v):
        if v is not None:
            for literal in v:
                try:
                    AlgebraElement.from_literal(literal)
                except (QuasiTodaError, ZeroDivisionError) as e:
                    raise ValueError(str(e)) from e
        return v

    @model_validator(mode="before")
    @classmethod
    def commutative_defaults(cls, values):
        if isinstance(values, dict) and values.get("command") in COMMUTATIVE_COMMANDS:
            values = {"dim": 1, **values}
            if values["command"] == CommandName.SECH_CHECK.value:
                values = {"orders": settings.sech_orders, **values}
        return values

    @model_validator(mode="after")
    def validate_instance(self):
        if self.command in COMMUTATIVE_COMMANDS and self.dim != 1:
            raise ValueError(f"{self.command} runs in the commutative case --dim 1")
        if self.command == CommandName.TODA_SOLVE.value:
            if self.type == SystemType.C.value and self.n % 2:
                raise ValueError("type C needs an even n")
            if self.type == SystemType.B.value and (self.n % 2 == 0 or self.n < 3):
                raise ValueError("type B needs an odd n >= 3")
        if (self.alphas is None) != (self.amps is None):
            raise ValueError("alphas and amps must be given together")
        if self.alphas is not None and len(self.alphas) != len(self.amps):
            raise ValueError("alphas and amps must have the same length")
        if self.command == CommandName.SECH_CHECK.value and Fraction(self.a) <= 0:
            raise ValueError("sech-check needs a > 0")
        if self.radius is not None:
            if self.half_width is None:
                self.half_width = self.radius / 2
            elif self.half_width != self.radius / 2:
                raise ValueError("radius and half_width disagree")
        return self

    @property
    def k(self) -> int:
        """Number of independent unknowns of a type B or C system"""
        return self.n // 2

    def alpha_elements(self) -> Optional[List[AlgebraElement]]:
        return None if self.alphas is None else [AlgebraElement.from_literal(s) for s in self.alphas]

    def amp_elements(self) -> Optional[List[AlgebraElement]]:
        return None if self.amps is None else [AlgebraElement.from_literal(s) for s in self.amps]

    def summary(self) -> Dict[str, Any]:
        """Config as recorded in the report; artifact paths are left out"""
        return self.model_dump(mode="json", exclude={"report", "dump", "csv"}, exclude_none=True)


def load_job_config(file_values: Dict[str, Any], overrides: Dict[str, Any]) -> JobConfig:
    """
    Merge a config file with command-line flags; flags win.

    Raises:
        ConfigError: the merged values do not validate
    """
    merged = {**file_values, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        return JobConfig(**merged)
    except ValidationError as e:
        errors = [{"loc": ".".join(str(p) for p in err["loc"]), "msg": err["msg"]} for err in e.errors()]
        raise ConfigError("invalid job configuration", errors=errors) from e
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError("invalid job configuration", errors=[{"loc": "", "msg": str(e)}]) from e
