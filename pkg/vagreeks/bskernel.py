"""Black-Scholes analytics and Monte Carlo Greek estimators.

Closed forms here are the oracles the VA estimators are checked against. All
sample functions are vectorized: pass arrays of terminal levels and shocks,
get arrays of per-path samples back.

"""

from collections import namedtuple

import numpy as np
from scipy.stats import norm

from .scenarioengine import DegenerateVolatility

CALL = "call"
DIGITAL = "digital"

DIGITAL_NOTIONAL = 1.0  # Digital pays one unit of currency in the money


class UnsupportedPayoff(ValueError):
    """Raised when an estimator cannot handle the requested payoff."""


_EuropeanSpec = namedtuple("EuropeanSpec",
                           ["s0", "k", "r", "sigma", "t", "payoff"])


class EuropeanSpec(_EuropeanSpec):

    """European call or unit digital under Black-Scholes."""

    __slots__ = ()

    def __new__(cls, s0, k, r, sigma, t, payoff=CALL):
        for name, value in (("s0", s0), ("k", k), ("sigma", sigma),
                            ("t", t)):
            if not value > 0:
                raise ValueError("{} must be strictly positive, got "
                                 "{}".format(name, value))
        if payoff not in (CALL, DIGITAL):
            raise UnsupportedPayoff("Unknown payoff {}".format(payoff))
        return super(EuropeanSpec, cls).__new__(cls, s0, k, r, sigma, t,
                                                payoff)


_AsianSpec = namedtuple("AsianSpec", ["s0", "k", "r", "sigma", "dates"])


class AsianSpec(_AsianSpec):

    """Arithmetic-average Asian call over equally weighted dates."""

    __slots__ = ()

    def __new__(cls, s0, k, r, sigma, dates):
        dates = tuple(float(date) for date in dates)
        if len(dates) < 1:
            raise ValueError("At least one averaging date is required")
        if dates[0] <= 0 or np.any(np.diff(dates) <= 0):
            raise ValueError("Averaging dates must be positive and strictly "
                             "increasing, got {}".format(dates))
        return super(AsianSpec, cls).__new__(cls, s0, k, r, sigma, dates)

    @property
    def maturity(self):
        return self.dates[-1]


def _d1_d2(s0, k, r, sigma, t):
    vol = sigma * np.sqrt(t)
    d1 = (np.log(s0 / k) + (r + 0.5 * sigma ** 2) * t) / vol
    return d1, d1 - vol


def bs_call_price(spec):
    """Black-Scholes European call value."""
    d1, d2 = _d1_d2(spec.s0, spec.k, spec.r, spec.sigma, spec.t)
    return spec.s0 * norm.cdf(d1) - \
        spec.k * np.exp(-spec.r * spec.t) * norm.cdf(d2)


def bs_call_delta(spec):
    d1, _ = _d1_d2(spec.s0, spec.k, spec.r, spec.sigma, spec.t)
    return norm.cdf(d1)


def bs_call_gamma(spec):
    d1, _ = _d1_d2(spec.s0, spec.k, spec.r, spec.sigma, spec.t)
    return norm.pdf(d1) / (spec.s0 * spec.sigma * np.sqrt(spec.t))


def bs_digital_price(spec):
    _, d2 = _d1_d2(spec.s0, spec.k, spec.r, spec.sigma, spec.t)
    return DIGITAL_NOTIONAL * np.exp(-spec.r * spec.t) * norm.cdf(d2)


def bs_digital_delta(spec):
    _, d2 = _d1_d2(spec.s0, spec.k, spec.r, spec.sigma, spec.t)
    return DIGITAL_NOTIONAL * np.exp(-spec.r * spec.t) * norm.pdf(d2) / \
        (spec.s0 * spec.sigma * np.sqrt(spec.t))


def simulate_terminal(spec, z):
    """Exact GBM terminal levels for standard normal shocks z."""
    z = np.asarray(z, dtype=float)
    return spec.s0 * np.exp((spec.r - 0.5 * spec.sigma ** 2) * spec.t +
                            spec.sigma * np.sqrt(spec.t) * z)


def discounted_payoff(spec, s_t):
    """Discounted call or digital payoff at terminal levels s_t."""
    s_t = np.asarray(s_t, dtype=float)
    discount = np.exp(-spec.r * spec.t)
    if spec.payoff == CALL:
        return discount * np.maximum(s_t - spec.k, 0.0)
    return discount * DIGITAL_NOTIONAL * (s_t > spec.k)


def pathwise_delta_sample(spec, s_t):
    """Pathwise delta samples e^{-rT} I(S_T > K) S_T / S0.

    Raises:
        UnsupportedPayoff: For the digital, whose payoff is discontinuous and
            whose pathwise derivative is zero almost everywhere

    """
    if spec.payoff != CALL:
        raise UnsupportedPayoff(
            "Pathwise delta needs a payoff continuous in S0, got "
            "{}".format(spec.payoff))
    s_t = np.asarray(s_t, dtype=float)
    return np.exp(-spec.r * spec.t) * (s_t > spec.k) * s_t / spec.s0


def lrm_delta_weight(z, s0, sigma, t):
    """Likelihood ratio delta weight Z / (S0 sigma sqrt(T))."""
    if not (sigma > 0 and t > 0):
        raise ValueError("sigma and t must be strictly positive")
    return np.asarray(z, dtype=float) / (s0 * sigma * np.sqrt(t))


def lrm_gamma_weight(z, s0, sigma, t):
    """Likelihood ratio gamma weight (Z^2 - Z sigma sqrt(T) - 1) / (S0 sigma)^2 T."""
    if not (sigma > 0 and t > 0):
        raise ValueError("sigma and t must be strictly positive")
    z = np.asarray(z, dtype=float)
    return (z * z - z * sigma * np.sqrt(t) - 1.0) / \
        (s0 ** 2 * sigma ** 2 * t)


def mixed_gamma_lr_pw_sample(spec, s_t, z):
    """Gamma from differentiating the LRM delta pathwise.

    e^{-rT} I(S_T > K) K Z / (S0^2 sigma sqrt(T))

    """
    if spec.payoff != CALL:
        raise UnsupportedPayoff("Mixed gamma is defined for the call")
    s_t = np.asarray(s_t, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.exp(-spec.r * spec.t) * (s_t > spec.k) * spec.k * z / \
        (spec.s0 ** 2 * spec.sigma * np.sqrt(spec.t))


def mixed_gamma_pw_lr_sample(spec, s_t, z):
    """Gamma from weighting the pathwise delta by the LRM score.

    e^{-rT} I(S_T > K) (S_T / S0^2) (Z / (sigma sqrt(T)) - 1)

    """
    if spec.payoff != CALL:
        raise UnsupportedPayoff("Mixed gamma is defined for the call")
    s_t = np.asarray(s_t, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.exp(-spec.r * spec.t) * (s_t > spec.k) * s_t / spec.s0 ** 2 * \
        (z / (spec.sigma * np.sqrt(spec.t)) - 1.0)


def simulate_asian_levels(spec, z):
    """Exact GBM levels at the averaging dates.

    Args:
        spec(AsianSpec): Contract
        z(numpy.ndarray): Independent shocks (n_paths, m), column j drives
            the move from date j-1 to date j

    Returns:
        numpy.ndarray: Levels (n_paths, m)

    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    steps = np.diff((0.0,) + spec.dates)
    if z.shape[-1] != steps.size:
        raise ValueError("Expected {} shocks per path, got {}".format(
            steps.size, z.shape[-1]))
    log_moves = (spec.r - 0.5 * spec.sigma ** 2) * steps + \
        spec.sigma * np.sqrt(steps) * z
    return spec.s0 * np.exp(np.cumsum(log_moves, axis=-1))


def _asian_payoff(spec, levels):
    levels = np.atleast_2d(np.asarray(levels, dtype=float))
    average = levels.mean(axis=-1)
    return np.exp(-spec.r * spec.maturity) * np.maximum(average - spec.k, 0.0), \
        average


def asian_lrm_delta_sample(spec, levels, z1):
    """LRM Asian delta samples.

    Only the first transition density depends on S0, so the weight uses the
    shock to the first averaging date alone.

    """
    payoff, _ = _asian_payoff(spec, levels)
    return payoff * lrm_delta_weight(z1, spec.s0, spec.sigma, spec.dates[0])


def asian_pathwise_delta_sample(spec, levels):
    """Pathwise Asian delta samples e^{-rT} I(A > K) A / S0."""
    _, average = _asian_payoff(spec, levels)
    return np.exp(-spec.r * spec.maturity) * (average > spec.k) * average / \
        spec.s0


def conditional_bs_price(s0, k, t, xi, sigma_bar, r_bar):
    """Black-Scholes call at the conditional arguments of a factor path.

    Averaging over variance and rate paths gives the stochastic-volatility,
    stochastic-rate call price.

    Args:
        s0(float): Initial equity level
        k(float): Strike
        t(float): Maturity in years
        xi(array-like): Drift adjustment exp(Y_T) per factor path
        sigma_bar(array-like): Conditional volatility per factor path
        r_bar(array-like): Average short rate per factor path

    Returns:
        numpy.ndarray: Conditional call prices

    """
    sigma_bar = np.asarray(sigma_bar, dtype=float)
    if np.any(sigma_bar <= 0):
        raise DegenerateVolatility("Conditional volatility must be positive")
    forward_s0 = s0 * np.asarray(xi, dtype=float)
    r_bar = np.asarray(r_bar, dtype=float)
    d1, d2 = _d1_d2(forward_s0, k, r_bar, sigma_bar, t)
    return forward_s0 * norm.cdf(d1) - k * np.exp(-r_bar * t) * norm.cdf(d2)
