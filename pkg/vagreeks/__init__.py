"""Make things easy to import."""
from .scenarioengine import ModelParams, ScenarioGenerator
from .vaproduct import ProductSpec
from .greeks import NestedRunner, BumpRunner, GreekEstimate
from .runconfig import RunConfig, ConfigError, CASES
from .validation import validate

__all__ = ["ModelParams", "ScenarioGenerator", "ProductSpec", "NestedRunner",
           "BumpRunner", "GreekEstimate", "RunConfig", "ConfigError", "CASES",
           "validate"]
