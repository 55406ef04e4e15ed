# Configuration and manifest schemas
from .schema import EmoforgeConfig, RunManifest, resolve_config

__all__ = ["EmoforgeConfig", "RunManifest", "resolve_config"]
