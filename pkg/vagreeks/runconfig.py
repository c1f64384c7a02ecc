"""Run configuration: built-in model cases, config files and overrides."""

import os
import logging

from .scenarioengine import ModelParams
from .vaproduct import ProductSpec, load_mortality_table
from .greeks import ESTIMATORS, CENTRAL, FORWARD

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Raised for unknown cases, bad counts or malformed configuration."""


def _case(kappa_v, theta_v, sigma_v, kappa_r, theta_r, sigma_r,
          rho_sv, rho_sr, rho_vr):
    # Initial variance and rate start at their long-run levels
    return ModelParams(kappa_v=kappa_v, theta_v=theta_v, sigma_v=sigma_v,
                       v0=theta_v, kappa_r=kappa_r, theta_r=theta_r,
                       sigma_r=sigma_r, r0=theta_r, rho_sv=rho_sv,
                       rho_sr=rho_sr, rho_vr=rho_vr)


CASES = {
    "A": _case(2.0, 0.04, 0.15, 0.4, 0.04, 0.1, -0.7, -0.3, 0.2),
    "B": _case(1.0, 0.04, 0.3, 0.4, 0.04, 0.1, -0.7, -0.3, 0.2),
    "C": _case(2.0, 0.04, 0.15, 0.2, 0.04, 0.2, -0.7, -0.3, 0.2),
    "D": _case(1.0, 0.04, 0.3, 0.2, 0.04, 0.2, -0.7, -0.3, 0.2),
    "E": _case(1.0, 0.04, 0.3, 0.2, 0.04, 0.2, -0.9, -0.3, 0.2),
}

CUSTOM = "custom"

MODEL_KEYS = ("kappa_v", "theta_v", "sigma_v", "v0", "kappa_r", "theta_r",
              "sigma_r", "r0", "rho_sv", "rho_sr", "rho_vr")

PRODUCT_KEYS = {
    "premium": float, "withdrawal_rate": float, "guarantee_charge": float,
    "fund_charge": float, "ratchet_term": int, "ratchet_cap": float,
    "term": int, "lapse_rate": float,
}

RUN_KEYS = {
    "case": str, "estimators": str, "paths": int, "outer": int, "inner": int,
    "steps-per-year": int, "bump": float, "seed": int, "out": str,
    "format": str, "jobs": int, "block-size": int, "mortality": str,
    "s0": float, "quadrature": str, "scheme": str, "bump-scheme": str,
    "log-level": int,
}

FORMATS = ("table", "csv", "hdf5")

# off=3, info=2, debug=1
LOG_LEVEL = 2


def read_config_file(path):
    """Read a flat key = value file.

    Blank lines and anything after # are ignored. Keys may use - or _.

    Returns:
        dict: Raw string values by key

    """
    if not os.path.isfile(path):
        raise ConfigError("Config file {} does not exist".format(path))

    values = {}
    with open(path) as config_file:
        for number, line in enumerate(config_file, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("{}:{}: expected key = value, got "
                                  "{!r}".format(path, number, line))
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    logger.debug("Read %s keys from %s", len(values), path)
    return values


def _normalise_key(key):
    key = key.strip().lower()
    if key.replace("_", "-") in RUN_KEYS:
        return key.replace("_", "-")
    if key.replace("-", "_") in MODEL_KEYS or \
            key.replace("-", "_") in PRODUCT_KEYS:
        return key.replace("-", "_")
    raise ConfigError("Unknown configuration key {!r}".format(key))


def _convert(key, value, kind):
    if value is None or not isinstance(value, str):
        return value
    try:
        return kind(value)
    except ValueError:
        raise ConfigError("Invalid value {!r} for {}".format(value, key))


class RunConfig(object):

    """Settings for one experiment run."""

    # Default Values
    case = "A"
    estimators = ESTIMATORS
    n_paths = 36000
    n_outer = 10000
    n_inner = 10
    steps_per_year = 20
    bump = 0.005
    bump_scheme = CENTRAL
    seed = 2024
    out = None
    format = "table"
    n_jobs = 1
    block_size = 250
    mortality = None
    s0 = 10000.0
    quadrature = "left"
    scheme = "log"
    log_level = LOG_LEVEL

    _attributes = {
        "case": "case", "paths": "n_paths", "outer": "n_outer",
        "inner": "n_inner", "steps-per-year": "steps_per_year",
        "bump": "bump", "bump-scheme": "bump_scheme", "seed": "seed",
        "out": "out", "format": "format", "jobs": "n_jobs",
        "block-size": "block_size", "mortality": "mortality", "s0": "s0",
        "quadrature": "quadrature", "scheme": "scheme",
        "log-level": "log_level",
    }

    def __init__(self, values=None):
        """
        Args:
            values(dict): Settings keyed as in the config file, either raw
                strings or already converted values. None values are skipped.

        """
        self.model_overrides = {}
        self.product_overrides = {}

        for key, value in (values or {}).items():
            if value is None:
                continue
            key = _normalise_key(key)
            if key in MODEL_KEYS:
                self.model_overrides[key] = _convert(key, value, float)
            elif key in PRODUCT_KEYS:
                self.product_overrides[key] = _convert(key, value,
                                                       PRODUCT_KEYS[key])
            elif key == "estimators":
                self.estimators = self.parse_estimators(value)
            else:
                setattr(self, self._attributes[key],
                        _convert(key, value, RUN_KEYS[key]))

        self.validate()

    @staticmethod
    def parse_estimators(value):
        if isinstance(value, str):
            value = value.replace(",", " ").split()
        estimators = tuple(value)
        if "all" in estimators:
            return ESTIMATORS
        aliases = {"mixed": "mixed_pw_lr"}
        estimators = tuple(aliases.get(name, name) for name in estimators)
        unknown = [name for name in estimators if name not in ESTIMATORS]
        if unknown or not estimators:
            raise ConfigError("Unknown estimators {}; choose from {}".format(
                unknown, ", ".join(ESTIMATORS)))
        return estimators

    def validate(self):
        self.case = str(self.case)
        self.case = CUSTOM if self.case.lower() == CUSTOM \
            else self.case.upper()
        if self.case == CUSTOM:
            missing = [key for key in MODEL_KEYS
                       if key not in self.model_overrides]
            if missing:
                raise ConfigError("Custom case needs all model parameters, "
                                  "missing {}".format(", ".join(missing)))
        elif self.case not in CASES:
            raise ConfigError("Unknown case {!r}; choose from {} or "
                              "{}".format(self.case, ", ".join(sorted(CASES)),
                                          CUSTOM))
        elif self.model_overrides:
            raise ConfigError("Give either a built-in case or explicit model "
                              "parameters with case = custom, not both")

        for name in ("n_paths", "n_outer", "n_inner", "steps_per_year",
                     "n_jobs", "block_size"):
            if getattr(self, name) < 1:
                raise ConfigError("{} must be positive, got {}".format(
                    name, getattr(self, name)))
        if self.n_outer < 2 or self.n_paths < 2:
            raise ConfigError("Standard errors need at least 2 outer paths")
        if not self.bump > 0:
            raise ConfigError("bump must be positive")
        if not self.s0 > 0:
            raise ConfigError("s0 must be positive")
        if self.bump_scheme not in (CENTRAL, FORWARD):
            raise ConfigError("bump-scheme must be central or forward")
        if self.format not in FORMATS:
            raise ConfigError("format must be one of {}".format(
                ", ".join(FORMATS)))
        if self.format == "hdf5" and self.out is None:
            raise ConfigError("hdf5 output needs an out path")
        if self.quadrature not in ("left", "trapezoid"):
            raise ConfigError("quadrature must be left or trapezoid")
        if self.scheme not in ("log", "euler"):
            raise ConfigError("scheme must be log or euler")

    def model_params(self):
        if self.case == CUSTOM:
            params = ModelParams(**self.model_overrides)
        else:
            params = CASES[self.case]
        try:
            return params.validate()
        except ValueError as error:
            raise ConfigError(str(error))

    def product(self):
        overrides = dict(self.product_overrides)
        term = overrides.get("term", 30)
        if self.mortality is not None:
            try:
                overrides["mortality"] = load_mortality_table(
                    self.mortality, term=term)
            except (IOError, ValueError) as error:
                raise ConfigError(str(error))
        try:
            return ProductSpec(**overrides).validate()
        except ValueError as error:
            raise ConfigError(str(error))
