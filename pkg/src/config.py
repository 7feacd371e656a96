#!/usr/bin/env python3
"""
Configuration Management for Qudit GME
======================================

Centralized configuration management using environment variables.
Numerical tolerances, capacity caps and optimizer defaults all live here so
that the CLI, the scanner and the tests agree on them.
"""

import os
import logging
from typing import Optional

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # dotenv not installed, continue without it
    pass


def _env_float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: str) -> int:
    return int(os.getenv(name, default))


class Config:
    """Application configuration class."""

    # Application settings
    APP_NAME = os.getenv('APP_NAME', 'Qudit GME')
    APP_VERSION = os.getenv('APP_VERSION', '1.0.0')

    # Logging settings
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', 'logs/qudit_gme.log')
    LOG_FORMAT = os.getenv('LOG_FORMAT',
                           '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    LOG_ENCODING = os.getenv('LOG_ENCODING', 'utf-8')

    # Numerical tolerances
    TOL_HERM = _env_float('TOL_HERM', '1e-10')
    TOL_TRACE = _env_float('TOL_TRACE', '1e-10')
    TOL_PSD = _env_float('TOL_PSD', '1e-9')
    TOL_EIG = _env_float('TOL_EIG', '1e-10')
    TOL_NORM = _env_float('TOL_NORM', '1e-10')
    DECISION_TOL = _env_float('DECISION_TOL', '1e-9')

    # Capacity caps
    MAX_DIMENSION = _env_int('MAX_DIMENSION', str(2 ** 14))
    ORACLE_MAX_ENTRIES = _env_int('ORACLE_MAX_ENTRIES', str(2 ** 20))
    MAX_PARTIES = _env_int('MAX_PARTIES', '20')
    MAX_GRID_CELLS = _env_int('MAX_GRID_CELLS', '250000')

    # Concurrency
    WORKERS = _env_int('WORKERS', str(min(4, os.cpu_count() or 1)))

    # Probe optimizer defaults
    OPT_RESTARTS = _env_int('OPT_RESTARTS', '32')
    OPT_ITERATIONS = _env_int('OPT_ITERATIONS', '500')
    OPT_STEP = _env_float('OPT_STEP', '0.3')
    OPT_DECAY = _env_float('OPT_DECAY', '0.95')
    OPT_TOL = _env_float('OPT_TOL', '1e-8')
    OPT_SEED = _env_int('OPT_SEED', '42')
    OPT_BASIS_BUDGET = _env_int('OPT_BASIS_BUDGET', '4096')
    OPT_BASIS_SEEDS = _env_int('OPT_BASIS_SEEDS', '8')

    # Output
    REPORTS_DIR = os.getenv('REPORTS_DIR', 'reports')

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration settings."""
        try:
            for name in ('TOL_HERM', 'TOL_TRACE', 'TOL_PSD', 'TOL_EIG', 'TOL_NORM', 'DECISION_TOL'):
                assert getattr(cls, name) > 0, f"{name} must be positive"
            assert cls.MAX_DIMENSION >= 2, "Max dimension must be at least 2"
            assert cls.ORACLE_MAX_ENTRIES > 0, "Oracle capacity must be positive"
            assert cls.MAX_GRID_CELLS > 0, "Grid cell cap must be positive"
            assert cls.WORKERS >= 1, "Worker count must be at least 1"
            assert cls.OPT_RESTARTS >= 1, "Optimizer needs at least one restart"
            assert cls.OPT_ITERATIONS >= 0, "Optimizer iterations must be non-negative"
            assert 0 < cls.OPT_DECAY < 1, "Step decay must lie in (0, 1)"
            assert cls.OPT_STEP > 0, "Initial step must be positive"
            return True

        except AssertionError as e:
            logging.error(f"Configuration validation failed: {e}")
            return False

    @classmethod
    def get_log_level(cls) -> int:
        """Get logging level from string."""
        level_map = {
            'DEBUG': logging.DEBUG,
            'INFO': logging.INFO,
            'WARNING': logging.WARNING,
            'ERROR': logging.ERROR,
            'CRITICAL': logging.CRITICAL
        }
        return level_map.get(cls.LOG_LEVEL.upper(), logging.INFO)

    @classmethod
    def as_dict(cls) -> dict:
        """Return all upper-case settings as a plain dictionary."""
        return {name: getattr(cls, name) for name in dir(cls) if name.isupper()}


class DevelopmentConfig(Config):
    """Development-specific configuration."""

    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    """Production-specific configuration."""

    LOG_LEVEL = 'WARNING'


class TestingConfig(Config):
    """Testing-specific configuration."""

    LOG_LEVEL = 'ERROR'
    LOG_FILE = ''
    WORKERS = 1


def get_config(environment: Optional[str] = None) -> Config:
    """Get configuration based on environment."""
    if environment is None:
        environment = os.getenv('ENVIRONMENT', 'development')

    config_map = {
        'development': DevelopmentConfig,
        'production': ProductionConfig,
        'testing': TestingConfig
    }

    return config_map.get(environment.lower(), DevelopmentConfig)


# Global configuration instance
config = get_config()
