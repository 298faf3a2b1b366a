from .settings import ForgeSettings, get_settings

__all__ = ["ForgeSettings", "get_settings"]
