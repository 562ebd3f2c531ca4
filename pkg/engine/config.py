"""
Configuration Manager for maskcert

Loads and merges configuration from:
1. config/default.yaml (base)
2. config/{environment}.yaml (environment-specific overrides)
3. an optional extra YAML file (``--config``)
4. Environment variables (runtime overrides)

Usage:
    from engine.config import ConfigManager

    config = ConfigManager()
    rho = config.get("smoothing.rho")
    n = config.get("smoothing.n", default=1000)
"""

import os
import yaml
from pathlib import Path
from typing import Any, Optional, Dict
import logging

from engine.errors import UsageError

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent.parent / "config"

# Map environment variables to config paths
ENV_MAPPINGS = {
    "MASKCERT_SEED": "sampling.seed",
    "MASKCERT_RHO": "smoothing.rho",
    "MASKCERT_N": "smoothing.n",
    "MASKCERT_NPRIME": "smoothing.n_prime",
    "MASKCERT_ALPHA": "smoothing.alpha",
    "MASKCERT_WORKERS": "runtime.workers",
    "MASKCERT_ENUM_CAP": "certification.enum_cap",
    "MASKCERT_LOG_LEVEL": "logging.level",
}


class ConfigManager:
    """Manages run configuration with environment-based overrides."""

    def __init__(
        self,
        environment: Optional[str] = None,
        extra_file: Optional[str] = None,
        config_dir: Optional[Path] = None,
        use_env: bool = True,
    ):
        """
        Initialize configuration manager.

        Args:
            environment: Environment name (development, production, etc.)
                        If None, uses MASKCERT_ENV environment variable or "default"
            extra_file: Optional YAML file merged after the environment file
            config_dir: Directory holding default.yaml (defaults to ./config)
            use_env: Apply MASKCERT_* environment variable overrides
        """
        self.environment = environment or os.getenv("MASKCERT_ENV", "default")
        self.config_dir = Path(config_dir) if config_dir else CONFIG_DIR
        self.extra_file = extra_file
        self.use_env = use_env
        self._config: Dict[str, Any] = {}

        self._load_config()

    def _load_config(self) -> None:
        """Load and merge configuration files."""
        # 1. Load default configuration
        default_config = self._load_yaml(self.config_dir / "default.yaml")
        if default_config is None:
            raise UsageError(f"Default configuration not found in {self.config_dir}")

        self._config = default_config

        # 2. Load environment-specific configuration
        if self.environment != "default":
            env_config_path = self.config_dir / f"{self.environment}.yaml"
            if env_config_path.exists():
                env_config = self._load_yaml(env_config_path) or {}
                self._config = self._deep_merge(self._config, env_config)
                logger.info(f"Loaded {self.environment} configuration")
            else:
                logger.warning(f"Environment config not found: {env_config_path}")

        # 3. Explicit file from the command line
        if self.extra_file:
            extra = self._load_yaml(Path(self.extra_file))
            if extra is None:
                raise UsageError(f"Cannot read config file: {self.extra_file}")
            self._config = self._deep_merge(self._config, extra)

        # 4. Override with environment variables
        if self.use_env:
            self._apply_env_overrides()

        logger.debug(f"Configuration loaded (environment: {self.environment})")

    def _load_yaml(self, path: Path) -> Optional[Dict[str, Any]]:
        """Load YAML file."""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.error(f"Failed to load {path}: {e}")
            return None
        if not isinstance(data, dict):
            raise UsageError(f"Configuration file {path} must hold a mapping")
        return data

    def _deep_merge(self, base: Dict, override: Dict) -> Dict:
        """Deep merge two dictionaries."""
        result = base.copy()

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result

    def _apply_env_overrides(self) -> None:
        """Apply environment variable overrides."""
        for env_var, config_path in ENV_MAPPINGS.items():
            value = os.getenv(env_var)
            if value is not None:
                # YAML scalar parsing turns "0.9" into 0.9 and "7" into 7
                self.set(config_path, yaml.safe_load(value))
                logger.debug(f"Override from {env_var}: {config_path} = {value}")

    def get(self, path: str, default: Any = None) -> Any:
        """
        Get configuration value by dot-notation path.

        Args:
            path: Dot-notation path (e.g., "smoothing.rho")
            default: Default value if path not found

        Returns:
            Configuration value or default

        Example:
            >>> config = ConfigManager()
            >>> config.get("smoothing.alpha")
            0.05
            >>> config.get("nonexistent.key", "default_value")
            'default_value'
        """
        keys = path.split(".")
        value = self._config

        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default

        return value

    def set(self, path: str, value: Any) -> None:
        """
        Set configuration value by dot-notation path.

        Args:
            path: Dot-notation path (e.g., "smoothing.rho")
            value: Value to set
        """
        keys = path.split(".")
        target = self._config

        for key in keys[:-1]:
            if key not in target or not isinstance(target[key], dict):
                target[key] = {}
            target = target[key]

        target[keys[-1]] = value

    def update(self, overrides: Dict[str, Any]) -> None:
        """Apply several dot-path overrides, skipping None values."""
        for path, value in overrides.items():
            if value is not None:
                self.set(path, value)

    def __repr__(self) -> str:
        return f"<ConfigManager environment={self.environment}>"

