from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    OUTPUT_DIR: Path = Path(".")
    LOG_LEVEL: str = "INFO"
    WORKERS: int = 1

    model_config = SettingsConfigDict(
        env_prefix="DEBROGLIE_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    def resolve_output(self, path: str | Path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.OUTPUT_DIR / path


settings = Settings()
