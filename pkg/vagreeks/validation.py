"""Black-Scholes oracle battery for the pathwise, LRM and mixed estimators."""

import logging
from collections import namedtuple

import numpy as np

from . import bskernel, randomstreams
from .greeks import bump_revalue, CENTRAL, DELTA
from .runconfig import ConfigError
from .stats import mean_se

logger = logging.getLogger(__name__)

CheckResult = namedtuple("CheckResult", [
    "name", "estimate", "std_err", "expected", "deviation", "passed"])

# At-the-money call used by every European check
ORACLE_SPEC = bskernel.EuropeanSpec(s0=100.0, k=100.0, r=0.05, sigma=0.2,
                                    t=1.0)
ASIAN_SPEC = bskernel.AsianSpec(s0=100.0, k=100.0, r=0.05, sigma=0.2,
                                dates=np.arange(1, 13) / 12.0)
TOLERANCE = 3.0


def _check(name, samples, expected, tolerance):
    estimate, std_err = mean_se(samples)
    return _compare(name, estimate, std_err, expected, tolerance)


def _compare(name, estimate, std_err, expected, tolerance):
    deviation = abs(estimate - expected) / std_err if std_err > 0 \
        else (0.0 if estimate == expected else float("inf"))
    return CheckResult(name=name, estimate=estimate, std_err=std_err,
                       expected=expected, deviation=deviation,
                       passed=deviation <= tolerance)


def validate(n_samples=10 ** 6, seed=0, tolerance=TOLERANCE,
             gamma_weight=None):
    """Run every oracle check.

    Args:
        n_samples(int): Monte Carlo samples per check
        seed(int): Oracle stream seed
        tolerance(float): Allowed deviation in standard errors
        gamma_weight(callable): LRM gamma weight, replaceable to inject faults

    Returns:
        list(CheckResult): One result per check

    """
    if n_samples < 2:
        raise ConfigError("Validation needs at least 2 samples, got "
                          "{}".format(n_samples))
    if gamma_weight is None:
        gamma_weight = bskernel.lrm_gamma_weight

    spec = ORACLE_SPEC
    digital = spec._replace(payoff=bskernel.DIGITAL)
    z = randomstreams.stream(seed, randomstreams.ORACLE, 0).standard_normal(
        n_samples)
    s_t = bskernel.simulate_terminal(spec, z)

    delta_weight = bskernel.lrm_delta_weight(z, spec.s0, spec.sigma, spec.t)
    gamma_weights = gamma_weight(z, spec.s0, spec.sigma, spec.t)
    call_payoff = bskernel.discounted_payoff(spec, s_t)
    digital_payoff = bskernel.discounted_payoff(digital, s_t)
    delta = bskernel.bs_call_delta(spec)
    gamma = bskernel.bs_call_gamma(spec)

    results = [
        _check("call pathwise delta",
               bskernel.pathwise_delta_sample(spec, s_t), delta, tolerance),
        _check("call LRM delta", call_payoff * delta_weight, delta,
               tolerance),
        _check("call LRM gamma", call_payoff * gamma_weights, gamma,
               tolerance),
        _check("call LR-PW gamma",
               bskernel.mixed_gamma_lr_pw_sample(spec, s_t, z), gamma,
               tolerance),
        _check("call PW-LR gamma",
               bskernel.mixed_gamma_pw_lr_sample(spec, s_t, z), gamma,
               tolerance),
        _check("digital LRM delta", digital_payoff * delta_weight,
               bskernel.bs_digital_delta(digital), tolerance),
        _check("delta weight mean", delta_weight, 0.0, tolerance),
        _check("gamma weight mean", gamma_weights, 0.0, tolerance),
    ]

    asian = ASIAN_SPEC
    z_asian = randomstreams.stream(seed, randomstreams.ORACLE, 1) \
        .standard_normal((n_samples, len(asian.dates)))
    levels = bskernel.simulate_asian_levels(asian, z_asian)

    def asian_payoffs(s0):
        bumped = asian._replace(s0=s0)
        return bskernel._asian_payoff(bumped, levels * s0 / asian.s0)[0]

    bump = bump_revalue(asian_payoffs, asian.s0, bump=0.005, scheme=CENTRAL,
                        order=DELTA, seed=seed)
    for name, samples in (
            ("Asian LRM delta",
             bskernel.asian_lrm_delta_sample(asian, levels, z_asian[:, 0])),
            ("Asian pathwise delta",
             bskernel.asian_pathwise_delta_sample(asian, levels))):
        estimate, std_err = mean_se(samples)
        results.append(_compare(name, estimate,
                                np.hypot(std_err, bump.std_err), bump.value,
                                tolerance))

    for result in results:
        log = logger.info if result.passed else logger.error
        log("%-22s %.6g (SE %.2g) vs %.6g: %.2f SE", result.name,
            result.estimate, result.std_err, result.expected,
            result.deviation)
    return results
