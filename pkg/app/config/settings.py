from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="QUASITODA_",
        case_sensitive=False,
        extra="ignore"  # Ignore extra fields from .env
    )

    # Application
    app_name: str = "QuasiToda"
    app_version: str = "1.0.0"
    debug: bool = False

    # Logging
    log_level: str = "INFO"
    log_format: Literal["json", "console"] = "json"
    slow_operation_ms: float = Field(default=1000.0, gt=0)

    # Series arithmetic
    series_max_order: int = Field(default=48, ge=1, description="Cap applied when integration raises an order")

    # Pseudodifferential calculus
    psdo_floor: int = Field(default=-5, le=-1)
    soliton_floor: int = Field(default=-4, le=-2)

    # Numeric comparison with the closed-form one-soliton
    sech_tolerance: float = Field(default=1e-9, gt=0)
    sech_half_width: float = Field(default=0.25, gt=0, description="Sample grid covers [-h, h]^2")
    sech_orders: int = Field(default=16, ge=4)
    sech_points: int = Field(default=11, ge=0)

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        if isinstance(v, str):
            return v.strip().upper()
        return v


# Global settings instance
settings = Settings()
