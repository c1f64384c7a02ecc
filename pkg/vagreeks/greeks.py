"""VA liability delta and gamma estimators over nested scenarios."""

import logging
from collections import namedtuple
from timeit import default_timer as timer

import numpy as np
from joblib import Parallel, delayed

from .scenarioengine import DegenerateVolatility
from .stats import clustered_mean_se, cluster_means, variance_ratio
from .vaproduct import (project_cashflows, survival_curve, liability_sample,
                        pathwise_cashflow_derivatives,
                        pathwise_liability_derivative)

# Estimator tags
BUMP = "bump"
NESTED = "nested"
PATHWISE = "pathwise"
CLRM = "clrm"
MIXED = "mixed_pw_lr"
ESTIMATORS = (BUMP, PATHWISE, CLRM, MIXED)

# Orders
LIABILITY = "liability"
DELTA = "delta"
GAMMA = "gamma"

CENTRAL = "central"
FORWARD = "forward"

GreekEstimate = namedtuple("GreekEstimate", [
    "estimator", "order", "value", "std_err", "n_outer", "n_inner", "seed",
    "runtime"])

NestedBatch = namedtuple("NestedBatch", [
    "levels", "discounts", "block", "s0", "units"])

BatchValuation = namedtuple("BatchValuation", ["liability", "pathwise"])


def build_nested_batch(generator, s0, outer_indices, n_inner, term,
                       units=None):
    """Simulate a block of nested scenarios and keep the annual view.

    Args:
        generator(ScenarioGenerator): Keyed scenario source
        s0(float): Initial equity level
        outer_indices(list(int)): Outer paths to generate
        n_inner(int): Equity paths per outer path
        term(int): Contract term in years
        units(float): Equity units held at inception

    Returns:
        NestedBatch: Annual levels (n_outer, n_inner, T + 1), discounts
            (n_outer, 1, T) and the conditional block with Z*

    """
    if generator.horizon < term:
        raise ValueError("Scenarios cover {} years, contract term is "
                         "{}".format(generator.horizon, term))
    _, equity, block = generator.scenarios(s0, outer_indices, n_inner)
    spy = generator.steps_per_year
    levels = equity.s[..., ::spy][..., :term + 1]
    discounts = equity.discounts[:, None, 1:term + 1]
    return NestedBatch(levels=levels, discounts=discounts, block=block,
                       s0=s0, units=units)


def value_batch(batch, product):
    """Liability and its pathwise S0 derivative for every inner path."""
    surv = survival_curve(product)
    trace = project_cashflows(product, batch.levels, batch.units)
    derivatives = pathwise_cashflow_derivatives(product, batch.levels, trace,
                                                batch.units)
    return BatchValuation(
        liability=liability_sample(trace, batch.discounts, surv),
        pathwise=pathwise_liability_derivative(trace, derivatives,
                                               batch.discounts, surv))


def _sigma_bar(batch):
    sigma = batch.block.sigma_bar1[:, None]
    if np.any(sigma <= 0):
        raise DegenerateVolatility("Conditional volatility must be positive")
    return sigma


def clrm_delta_weight(batch):
    return batch.block.z_star / (batch.s0 * _sigma_bar(batch))


def clrm_gamma_weight(batch):
    z = batch.block.z_star
    sigma = _sigma_bar(batch)
    return (z * z - z * sigma - 1.0) / (batch.s0 ** 2 * sigma ** 2)


def clrm_samples(batch, valuation, order):
    if order == DELTA:
        return clrm_delta_weight(batch) * valuation.liability
    elif order == GAMMA:
        return clrm_gamma_weight(batch) * valuation.liability
    raise ValueError("Unknown order {}".format(order))


def mixed_gamma_samples(batch, valuation):
    weight = clrm_delta_weight(batch)
    return weight * valuation.pathwise - weight / batch.s0 * \
        valuation.liability


def _estimate(estimator, order, samples, seed=None, runtime=0.0):
    samples = np.asarray(samples, dtype=float)
    n_inner = samples.shape[1] if samples.ndim > 1 else 1
    value, std_err = clustered_mean_se(cluster_means(samples))
    return GreekEstimate(estimator=estimator, order=order, value=value,
                         std_err=std_err, n_outer=samples.shape[0],
                         n_inner=n_inner, seed=seed, runtime=runtime)


def pathwise_delta(batch, product, seed=None):
    """Pathwise liability delta with clustered standard error."""
    start = timer()
    samples = value_batch(batch, product).pathwise
    return _estimate(PATHWISE, DELTA, samples, seed, timer() - start)


def clrm_greek(batch, product, order, seed=None):
    """Conditional likelihood ratio delta or gamma.

    The weights are the Black-Scholes scores at (S0, sigma_bar_1, Z*) over the
    first year, the only transition density that depends on S0.

    """
    start = timer()
    samples = clrm_samples(batch, value_batch(batch, product), order)
    return _estimate(CLRM, order, samples, seed, timer() - start)


def mixed_gamma_pw_lr(batch, product, seed=None):
    """Gamma from differentiating the CLRM delta pathwise with Z* fixed."""
    start = timer()
    samples = mixed_gamma_samples(batch, value_batch(batch, product))
    return _estimate(MIXED, GAMMA, samples, seed, timer() - start)


def _bump_legs(sample_fn, s0, bump, scheme, orders):
    if not bump > 0:
        raise ValueError("Bump fraction must be positive, got {}".format(bump))
    h = bump * s0
    if scheme == CENTRAL:
        steps = {1, -1}
        if GAMMA in orders or LIABILITY in orders:
            steps.add(0)
    elif scheme == FORWARD:
        steps = {0, 1}
        if GAMMA in orders:
            steps.add(2)
    else:
        raise ValueError("Unknown bump scheme {}".format(scheme))
    return dict((step, np.asarray(sample_fn(s0 + step * h), dtype=float))
                for step in sorted(steps))


def _difference(legs, h, scheme, order):
    if order == LIABILITY:
        return legs[0]
    if scheme == CENTRAL:
        if order == DELTA:
            return (legs[1] - legs[-1]) / (2.0 * h)
        return (legs[1] - 2.0 * legs[0] + legs[-1]) / h ** 2
    if order == DELTA:
        return (legs[1] - legs[0]) / h
    return (legs[2] - 2.0 * legs[1] + legs[0]) / h ** 2


def bump_revalue(sample_fn, s0, bump=0.005, scheme=CENTRAL, order=DELTA,
                 seed=None):
    """Finite-difference Greek with common random numbers.

    Args:
        sample_fn(callable): Maps an initial level to per-path samples,
            (n_outer,) or (n_outer, n_inner). Every call must replay the same
            random streams.
        s0(float): Initial level
        bump(float): Relative bump size h
        scheme(str): central or forward
        order(str): delta or gamma
        seed(int): Seed recorded on the estimate

    Returns:
        GreekEstimate: Estimate with SE from the per-path differences

    """
    start = timer()
    legs = _bump_legs(sample_fn, s0, bump, scheme, (order,))
    samples = _difference(legs, bump * s0, scheme, order)
    return _estimate(BUMP, order, samples, seed, timer() - start)


class SimulationRunner(object):

    """Run VA valuations over blocks of outer paths in parallel.

    Blocks are fixed by block_size alone and results are gathered in block
    order, so the output does not depend on n_jobs.

    """

    # Default Values
    block_size = 250
    n_jobs = 1
    log_level = 2

    def __init__(self, generator, product, block_size=None, n_jobs=None,
                 log_level=None):
        """
        Args:
            generator(ScenarioGenerator): Keyed scenario source
            product(ProductSpec): Contract terms
            block_size(int): Outer paths per work item
            n_jobs(int): Worker threads
            log_level(int): Logging level (off=3, info=2, debug=1) -
                Default is info

        """
        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.setLevel(self.log_level * 10)

        self.generator = generator
        self.product = product.validate()

        # Overwrite default values with arguments, if given
        if block_size is not None:
            self.block_size = int(block_size)
        if n_jobs is not None:
            self.n_jobs = int(n_jobs)
        if log_level is not None:
            self.logger.setLevel(log_level * 10)

        if self.block_size < 1 or self.n_jobs < 1:
            raise ValueError("block_size and n_jobs must be at least 1")

    def blocks(self, n_outer):
        return [list(range(start, min(start + self.block_size, n_outer)))
                for start in range(0, n_outer, self.block_size)]

    def map_blocks(self, function, n_outer):
        """Apply function to each block and concatenate results in order.

        Args:
            function(callable): Maps a list of outer indices to a dict of
                arrays with one leading entry per outer path
            n_outer(int): Number of outer paths

        Returns:
            dict: Concatenated arrays

        """
        blocks = self.blocks(n_outer)
        results = Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(function)(block) for block in blocks)
        self.logger.debug("Evaluated %s blocks of up to %s outer paths",
                          len(blocks), self.block_size)
        return dict((key, np.concatenate([result[key] for result in results]))
                    for key in results[0])

    def run(self, s0, estimators):
        """Estimate the liability and requested Greeks.

        Returns:
            list(GreekEstimate): One estimate per (estimator, order)

        """
        raise NotImplementedError("Must be implemented in child class")


class NestedRunner(SimulationRunner):

    """Outer variance/rate paths with inner equity paths for PW and CLRM."""

    # Default Values
    n_outer = 10000
    n_inner = 10

    def __init__(self, generator, product, n_outer=None, n_inner=None,
                 block_size=None, n_jobs=None, log_level=None):
        """
        Args:
            generator(ScenarioGenerator): Keyed scenario source
            product(ProductSpec): Contract terms
            n_outer(int): Variance/rate paths
            n_inner(int): Equity paths per variance/rate path
            block_size(int): Outer paths per work item
            n_jobs(int): Worker threads
            log_level(int): Logging level (off=3, info=2, debug=1) -
                Default is info

        """
        super(NestedRunner, self).__init__(generator, product, block_size,
                                           n_jobs, log_level)

        # Overwrite default values with arguments, if given
        if n_outer is not None:
            self.n_outer = int(n_outer)
        if n_inner is not None:
            self.n_inner = int(n_inner)

        if self.n_outer < 1 or self.n_inner < 1:
            raise ValueError("n_outer and n_inner must be at least 1")

    def batch(self, s0, outer_indices, units=None):
        if units is None:
            units = self.product.premium / s0
        return build_nested_batch(self.generator, s0, outer_indices,
                                  self.n_inner, self.product.term, units)

    def requested(self, estimators):
        """List the (estimator, order) pairs a selection produces."""
        pairs = [(NESTED, LIABILITY)]
        if PATHWISE in estimators:
            pairs.append((PATHWISE, DELTA))
        if CLRM in estimators:
            pairs.extend([(CLRM, DELTA), (CLRM, GAMMA)])
        if MIXED in estimators:
            pairs.append((MIXED, GAMMA))
        return pairs

    def _value_block(self, s0, pairs, outer_indices):
        batch = self.batch(s0, outer_indices)
        valuation = value_batch(batch, self.product)

        results = {}
        for estimator, order in pairs:
            if estimator == NESTED:
                samples = valuation.liability
            elif estimator == PATHWISE:
                samples = valuation.pathwise
            elif estimator == CLRM:
                samples = clrm_samples(batch, valuation, order)
            else:
                samples = mixed_gamma_samples(batch, valuation)
            results[(estimator, order)] = cluster_means(samples)
        return results

    def run(self, s0, estimators=ESTIMATORS):
        start = timer()
        pairs = self.requested(estimators)
        self.logger.info("Nested set-up: %s outer x %s inner paths, %s steps "
                         "per year", self.n_outer, self.n_inner,
                         self.generator.steps_per_year)
        means = self.map_blocks(
            lambda block: self._value_block(s0, pairs, block), self.n_outer)
        runtime = timer() - start

        estimates = []
        for estimator, order in pairs:
            value, std_err = clustered_mean_se(means[(estimator, order)])
            estimates.append(GreekEstimate(
                estimator=estimator, order=order, value=value,
                std_err=std_err, n_outer=self.n_outer, n_inner=self.n_inner,
                seed=self.generator.seed, runtime=runtime))
        self.logger.info("Nested set-up finished in %.2f s", runtime)
        return estimates


class BumpRunner(SimulationRunner):

    """Bump and revalue with every leg replaying the same scenarios."""

    # Default Values
    n_paths = 36000
    bump = 0.005
    scheme = CENTRAL

    def __init__(self, generator, product, n_paths=None, bump=None,
                 scheme=None, block_size=None, n_jobs=None, log_level=None):
        """
        Args:
            generator(ScenarioGenerator): Keyed scenario source
            product(ProductSpec): Contract terms
            n_paths(int): Independent scenarios per leg
            bump(float): Relative bump size
            scheme(str): central or forward
            block_size(int): Outer paths per work item
            n_jobs(int): Worker threads
            log_level(int): Logging level (off=3, info=2, debug=1) -
                Default is info

        """
        super(BumpRunner, self).__init__(generator, product, block_size,
                                         n_jobs, log_level)

        # Overwrite default values with arguments, if given
        if n_paths is not None:
            self.n_paths = int(n_paths)
        if bump is not None:
            self.bump = float(bump)
        if scheme is not None:
            self.scheme = scheme

        if self.n_paths < 2:
            raise ValueError("n_paths must be at least 2")

    def liability_fn(self, base_s0):
        """Per-path liabilities as a function of S0 with units held fixed."""
        units = self.product.premium / base_s0

        def value_block(s0, outer_indices):
            batch = build_nested_batch(self.generator, s0, outer_indices, 1,
                                       self.product.term, units)
            return {LIABILITY: value_batch(batch, self.product).liability[:, 0]}

        def liabilities(s0):
            self.logger.debug("Revaluing %s paths at S0 = %s", self.n_paths,
                              s0)
            return self.map_blocks(
                lambda block: value_block(s0, block), self.n_paths)[LIABILITY]

        return liabilities

    def run(self, s0, estimators=ESTIMATORS):
        if BUMP not in estimators:
            return []
        start = timer()
        self.logger.info("Bump set-up: %s paths, %s bump of %s", self.n_paths,
                         self.scheme, self.bump)
        orders = (LIABILITY, DELTA, GAMMA)
        legs = _bump_legs(self.liability_fn(s0), s0, self.bump, self.scheme,
                          orders)
        runtime = timer() - start

        estimates = []
        for order in orders:
            if order == LIABILITY and 0 not in legs:
                continue
            samples = _difference(legs, self.bump * s0, self.scheme, order)
            estimate = _estimate(BUMP, order, samples,
                                 self.generator.seed, runtime)
            estimates.append(estimate)
        self.logger.info("Bump set-up finished in %.2f s", runtime)
        return estimates


def report_variance_reduction(estimates, logger=None):
    """Log the bump over mixed gamma variance ratio when both are present."""
    gammas = dict((e.estimator, e) for e in estimates if e.order == GAMMA)
    if BUMP not in gammas or MIXED not in gammas:
        return None
    ratio = variance_ratio(gammas[MIXED].std_err, gammas[BUMP].std_err)
    (logger or logging.getLogger(__name__)).info(
        "Gamma variance ratio bump / mixed: %.1f", ratio)
    return ratio
