from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class CliConfig(BaseSettings):
    image_root: Path | None = Field(default=None, validation_alias="MAMMO_IMAGE_ROOT")
    seed: int = Field(default=0, ge=0, lt=2**64, validation_alias="MAMMO_SEED")
    workers: int = Field(default=1, ge=1, validation_alias="MAMMO_WORKERS")
    log_level: str | None = Field(default=None, validation_alias="MAMMO_LOG_LEVEL")

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    def get_resolved_image_root(self, manifest: Path, override: Path | None = None) -> Path:
        """Flag, then MAMMO_IMAGE_ROOT, then the manifest's own directory."""
        if override:
            return override
        if self.image_root:
            return self.image_root
        return manifest.parent

    def get_resolved_seed(self, override: int | None = None) -> int:
        return self.seed if override is None else override

    def get_resolved_workers(self, override: int | None = None) -> int:
        return self.workers if override is None else override
