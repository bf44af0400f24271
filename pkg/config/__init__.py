from config.settings import Settings

_settings = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def override_settings(**fields) -> Settings:
    """Replace the singleton with a copy carrying the given overrides."""
    global _settings
    current = get_settings()
    updates = {k: v for k, v in fields.items() if v is not None}
    _settings = current.model_copy(update=updates)
    return _settings


def reset_settings():
    global _settings
    _settings = None
