"""Joint Heston variance, CIR short rate and equity path simulation."""

import logging
from collections import namedtuple

import numpy as np
from scipy.integrate import trapezoid

from . import randomstreams

logger = logging.getLogger(__name__)


class NonPositiveDefinite(ValueError):
    """Raised when correlations do not form a positive-definite matrix."""


class DegenerateVolatility(ValueError):
    """Raised when a conditional volatility is zero and weights blow up."""


_ModelParams = namedtuple("ModelParams", [
    "kappa_v", "theta_v", "sigma_v", "v0",
    "kappa_r", "theta_r", "sigma_r", "r0",
    "rho_sv", "rho_sr", "rho_vr"])


class ModelParams(_ModelParams):

    """Heston variance, CIR rate and correlation parameters.

    Rates and variances are per year. Zero vol-of-variance or vol-of-rate is
    accepted as the deterministic limit of each factor.

    """

    __slots__ = ()

    def validate(self):
        """Check parameter ranges.

        Returns:
            ModelParams: self

        """
        for name in ("kappa_v", "theta_v", "kappa_r", "theta_r"):
            if not getattr(self, name) > 0:
                raise ValueError("{} must be strictly positive, got "
                                 "{}".format(name, getattr(self, name)))
        for name in ("sigma_v", "sigma_r", "v0", "r0"):
            if getattr(self, name) < 0:
                raise ValueError("{} must be non-negative, got "
                                 "{}".format(name, getattr(self, name)))
        self.cholesky()
        return self

    def correlation_matrix(self):
        """Correlation matrix in (V, r, S) order."""
        return np.array([[1.0, self.rho_vr, self.rho_sv],
                         [self.rho_vr, 1.0, self.rho_sr],
                         [self.rho_sv, self.rho_sr, 1.0]])

    def cholesky(self):
        return cholesky_factor(self.rho_sv, self.rho_sr, self.rho_vr)


CholeskyFactor = namedtuple("CholeskyFactor", ["a"])

FactorPaths = namedtuple("FactorPaths", [
    "grid", "v", "r", "v_raw", "r_raw", "z1", "z2", "steps_per_year"])

EquityPaths = namedtuple("EquityPaths", ["s", "discounts"])

ConditionalBlock = namedtuple("ConditionalBlock", [
    "sigma_bar1", "xi_bar1", "r_bar1", "z_star"])


def cholesky_factor(rho_sv, rho_sr, rho_vr):
    """Factor the (V, r, S) correlation matrix.

    Row 3 of the factor holds the equity loadings a31, a32, a33 on the
    independent drivers.

    Args:
        rho_sv(float): Equity-variance correlation
        rho_sr(float): Equity-rate correlation
        rho_vr(float): Variance-rate correlation

    Returns:
        CholeskyFactor: Lower-triangular A with A.A^T equal to the correlation
            matrix

    """
    for name, rho in (("rho_sv", rho_sv), ("rho_sr", rho_sr),
                      ("rho_vr", rho_vr)):
        if not -1.0 <= rho <= 1.0:
            raise NonPositiveDefinite(
                "{} must lie in [-1, 1], got {}".format(name, rho))

    rho = np.array([[1.0, rho_vr, rho_sv],
                    [rho_vr, 1.0, rho_sr],
                    [rho_sv, rho_sr, 1.0]])
    try:
        a = np.linalg.cholesky(rho)
    except np.linalg.LinAlgError:
        raise NonPositiveDefinite(
            "Correlations (rho_sv={}, rho_sr={}, rho_vr={}) do not form a "
            "positive-definite matrix".format(rho_sv, rho_sr, rho_vr))

    if not np.all(np.diag(a) > 0):
        raise NonPositiveDefinite(
            "Correlation matrix is singular: pivots {}".format(np.diag(a)))

    logger.debug("Cholesky factor:\n%s", a)
    return CholeskyFactor(a=a)


def evolve_factors(params, cholesky, steps_per_year, horizon, z1, z2):
    """Evolve variance and rate by full-truncation Euler.

    The raw state may dip below zero; drift, diffusion and every consumer use
    the floored value.

    Args:
        params(ModelParams): Model parameters
        cholesky(CholeskyFactor): Correlation factor
        steps_per_year(int): Time steps per year
        horizon(int): Number of years
        z1(numpy.ndarray): Variance drivers, (n_paths, N)
        z2(numpy.ndarray): Second independent drivers, (n_paths, N)

    Returns:
        FactorPaths: Variance and rate on the grid with their drivers

    """
    n_steps = steps_per_year * horizon
    z1 = np.atleast_2d(z1)
    z2 = np.atleast_2d(z2)
    if z1.shape[-1] != n_steps or z2.shape != z1.shape:
        raise ValueError("Driver shapes {} and {} do not match {} steps".format(
            z1.shape, z2.shape, n_steps))

    a = cholesky.a
    dt = 1.0 / steps_per_year
    sqrt_dt = np.sqrt(dt)
    n_paths = z1.shape[0]

    v_raw = np.empty((n_paths, n_steps + 1))
    r_raw = np.empty((n_paths, n_steps + 1))
    v_raw[:, 0] = params.v0
    r_raw[:, 0] = params.r0

    z_r = a[1, 0] * z1 + a[1, 1] * z2
    for idx in range(n_steps):
        v_pos = np.maximum(v_raw[:, idx], 0.0)
        r_pos = np.maximum(r_raw[:, idx], 0.0)
        v_raw[:, idx + 1] = v_raw[:, idx] \
            + params.kappa_v * (params.theta_v - v_pos) * dt \
            + params.sigma_v * np.sqrt(v_pos) * sqrt_dt * z1[:, idx]
        r_raw[:, idx + 1] = r_raw[:, idx] \
            + params.kappa_r * (params.theta_r - r_pos) * dt \
            + params.sigma_r * np.sqrt(r_pos) * sqrt_dt * z_r[:, idx]

    truncated = np.mean(v_raw < 0)
    if truncated > 0.01:
        logger.warning("%.1f%% of variance states truncated at zero",
                       100 * truncated)

    grid = np.arange(n_steps + 1) * dt
    return FactorPaths(grid=grid,
                       v=np.maximum(v_raw, 0.0), r=np.maximum(r_raw, 0.0),
                       v_raw=v_raw, r_raw=r_raw, z1=z1, z2=z2,
                       steps_per_year=steps_per_year)


def simulate_factor_paths(params, steps_per_year, horizon, rng, n_paths=1):
    """Simulate variance and rate paths from a generator.

    Args:
        params(ModelParams): Model parameters
        steps_per_year(int): Time steps per year, at least 1
        horizon(int): Number of years, at least 1
        rng(numpy.random.Generator): Source of Z1 and Z2
        n_paths(int): Number of paths

    Returns:
        FactorPaths: Paths shaped (n_paths, N + 1) and drivers (n_paths, N)

    """
    if steps_per_year < 1 or horizon < 1:
        raise ValueError("steps_per_year and horizon must be at least 1")
    params.validate()

    n_steps = steps_per_year * horizon
    z1 = rng.standard_normal((n_paths, n_steps))
    z2 = rng.standard_normal((n_paths, n_steps))
    return evolve_factors(params, params.cholesky(), steps_per_year, horizon,
                          z1, z2)


def simulate_equity_path(factors, s0, cholesky, z3, scheme="log"):
    """Simulate equity paths conditional on factor paths.

    Args:
        factors(FactorPaths): Variance and rate paths with Z1, Z2
        s0(float): Initial equity level
        cholesky(CholeskyFactor): Correlation factor
        z3(numpy.ndarray): Equity drivers, (n_outer, n_inner, N)
        scheme(str): "log" to step log S exactly as in the Ito form, "euler"
            to step S directly

    Returns:
        EquityPaths: Levels (n_outer, n_inner, N + 1) and discount factors at
            each annual date (n_outer, horizon + 1), starting with 1

    """
    a = cholesky.a
    spy = factors.steps_per_year
    dt = 1.0 / spy
    sqrt_dt = np.sqrt(dt)

    v = factors.v[:, None, :-1]
    r = factors.r[:, None, :-1]
    if z3.ndim != 3 or z3.shape[0] != v.shape[0] or z3.shape[2] != v.shape[2]:
        raise ValueError("Equity drivers shaped {} do not share the factor "
                         "grid {}".format(z3.shape, factors.v.shape))

    shock = (a[2, 0] * factors.z1 + a[2, 1] * factors.z2)[:, None, :] \
        + a[2, 2] * z3
    diffusion = np.sqrt(v) * sqrt_dt * shock

    s = np.empty(z3.shape[:2] + (z3.shape[2] + 1,))
    s[..., 0] = s0
    if scheme == "log":
        s[..., 1:] = s0 * np.exp(np.cumsum((r - 0.5 * v) * dt + diffusion,
                                           axis=-1))
    elif scheme == "euler":
        s[..., 1:] = s0 * np.cumprod(1.0 + r * dt + diffusion, axis=-1)
    else:
        raise ValueError("Unknown equity scheme {}".format(scheme))

    accrued = np.concatenate(
        [np.zeros((factors.r.shape[0], 1)),
         np.cumsum(factors.r[:, :-1] * dt, axis=-1)], axis=-1)
    discounts = np.exp(-accrued[:, ::spy])

    return EquityPaths(s=s, discounts=discounts)


def conditional_moments(factors, cholesky, horizon=1, quadrature="left"):
    """Calculate the conditional log-normal parameters out to a horizon.

    Given the factor paths, log S_tau is Gaussian with volatility sigma_bar,
    drift adjustment xi_bar and average rate r_bar.

    Args:
        factors(FactorPaths): Variance and rate paths with Z1, Z2
        cholesky(CholeskyFactor): Correlation factor
        horizon(int): Conditioning horizon in years, 1 for the CLRM
        quadrature(str): "left" Riemann sums, matching the Euler increments,
            or "trapezoid"

    Returns:
        ConditionalBlock: Per-outer-path sigma_bar, xi_bar and r_bar, with
            z_star unset

    """
    a = cholesky.a
    spy = factors.steps_per_year
    dt = 1.0 / spy
    n_steps = spy * horizon
    if n_steps > factors.z1.shape[-1]:
        raise ValueError("Factor paths are shorter than {} years".format(
            horizon))

    v = factors.v[:, :n_steps + 1]
    r = factors.r[:, :n_steps + 1]
    if quadrature == "left":
        int_v = np.sum(v[:, :-1], axis=-1) * dt
        int_r = np.sum(r[:, :-1], axis=-1) * dt
    elif quadrature == "trapezoid":
        int_v = trapezoid(v, dx=dt, axis=-1)
        int_r = trapezoid(r, dx=dt, axis=-1)
    else:
        raise ValueError("Unknown quadrature {}".format(quadrature))

    # Ito integrals are always evaluated at the left end point
    stochastic = np.sum(
        np.sqrt(v[:, :-1]) * np.sqrt(dt) *
        (a[2, 0] * factors.z1[:, :n_steps] + a[2, 1] * factors.z2[:, :n_steps]),
        axis=-1)
    y_bar = -0.5 * (a[2, 0] ** 2 + a[2, 1] ** 2) * int_v + stochastic

    sigma_bar = np.sqrt(a[2, 2] ** 2 * int_v / horizon)
    if np.any(sigma_bar <= 0):
        raise DegenerateVolatility(
            "Conditional volatility is zero on {} of {} outer paths".format(
                int(np.sum(sigma_bar <= 0)), sigma_bar.size))

    logger.debug("Conditional moments over %s years: mean sigma_bar %.6f, "
                 "mean xi_bar %.6f, mean r_bar %.6f",
                 horizon, np.mean(sigma_bar), np.mean(np.exp(y_bar)),
                 np.mean(int_r / horizon))
    return ConditionalBlock(sigma_bar1=sigma_bar, xi_bar1=np.exp(y_bar),
                            r_bar1=int_r / horizon, z_star=None)


def _expand(values, ndim):
    values = np.asarray(values, dtype=float)
    return values.reshape(values.shape + (1,) * (ndim - values.ndim))


def implied_shock(s1, s0, block, horizon=1):
    """Recover the standard normal shock that carries S0 to S1.

    Args:
        s1(array-like): Equity levels at the horizon, (n_outer, n_inner) or
            broadcastable to the block
        s0(float): Initial equity level
        block(ConditionalBlock): Conditional moments per outer path
        horizon(float): Years between S0 and S1

    Returns:
        numpy.ndarray: Z* shaped like s1

    """
    s1 = np.asarray(s1, dtype=float)
    sigma = _expand(block.sigma_bar1, s1.ndim)
    if np.any(sigma <= 0):
        raise DegenerateVolatility("Conditional volatility must be positive")
    xi = _expand(block.xi_bar1, s1.ndim)
    r_bar = _expand(block.r_bar1, s1.ndim)

    return (np.log(s1 / (xi * s0)) - (r_bar - 0.5 * sigma ** 2) * horizon) \
        / (sigma * np.sqrt(horizon))


class ScenarioGenerator(object):

    """Generate keyed nested scenarios for a model.

    Outer paths carry variance and rate, inner paths carry equity. Every draw
    comes from a stream keyed by (seed, purpose, outer index), so any subset of
    outer paths can be regenerated independently and in any order.

    """

    # Default Values
    steps_per_year = 20
    quadrature = "left"
    scheme = "log"
    log_level = 2

    def __init__(self, params, horizon, seed=0, steps_per_year=None,
                 quadrature=None, scheme=None, log_level=None):
        """
        Args:
            params(ModelParams): Model parameters
            horizon(int): Number of years to simulate
            seed(int): Run seed
            steps_per_year(int): Time steps per year
            quadrature(str): Conditional moment quadrature, left or trapezoid
            scheme(str): Equity scheme, log or euler
            log_level(int): Logging level (off=3, info=2, debug=1) -
                Default is info

        """
        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.setLevel(self.log_level * 10)

        self.params = params.validate()
        self.cholesky = params.cholesky()
        self.horizon = int(horizon)
        self.seed = int(seed)

        # Overwrite default values with arguments, if given
        if steps_per_year is not None:
            self.steps_per_year = int(steps_per_year)
        if quadrature is not None:
            self.quadrature = quadrature
        if scheme is not None:
            self.scheme = scheme
        if log_level is not None:
            self.logger.setLevel(log_level * 10)

        if self.steps_per_year < 1 or self.horizon < 1:
            raise ValueError("steps_per_year and horizon must be at least 1")

    @property
    def n_steps(self):
        return self.steps_per_year * self.horizon

    def factor_paths(self, outer_indices):
        """Generate variance and rate paths for the given outer paths."""
        z1, z2 = randomstreams.factor_draws(self.seed, outer_indices,
                                            self.n_steps)
        return evolve_factors(self.params, self.cholesky, self.steps_per_year,
                              self.horizon, z1, z2)

    def scenarios(self, s0, outer_indices, n_inner):
        """Generate a nested block of scenarios.

        Args:
            s0(float): Initial equity level
            outer_indices(list(int)): Global outer path indices
            n_inner(int): Equity paths per outer path

        Returns:
            tuple: FactorPaths, EquityPaths and ConditionalBlock with Z*
                for every inner path

        """
        outer_indices = list(outer_indices)
        factors = self.factor_paths(outer_indices)
        z3 = randomstreams.equity_draws(self.seed, outer_indices, n_inner,
                                        self.n_steps)
        equity = simulate_equity_path(factors, s0, self.cholesky, z3,
                                      scheme=self.scheme)
        block = conditional_moments(factors, self.cholesky,
                                    quadrature=self.quadrature)
        z_star = implied_shock(equity.s[..., self.steps_per_year], s0, block)

        self.logger.debug("Generated outer paths %s-%s with %s inner paths",
                          outer_indices[0], outer_indices[-1], n_inner)
        return factors, equity, block._replace(z_star=z_star)
