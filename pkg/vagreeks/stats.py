"""Sample aggregation: plain and clustered means with standard errors."""

import math
import logging

import numpy as np

logger = logging.getLogger(__name__)


class InsufficientSamples(ValueError):
    """Raised when a standard error is requested from fewer than 2 samples."""


class SampleAccumulator(object):

    """Mergeable running count, sum and sum of squares.

    Sums are carried with a Kahan compensation term. Each batch passed to
    `add` is first reduced with an exactly rounded sum, so the order in which
    batches arrive only touches the compensated running totals.

    """

    def __init__(self, samples=None):
        """
        Args:
            samples(array-like): Optional initial batch of samples

        """
        self.count = 0
        self.sum = 0.0
        self.sum_sq = 0.0
        self._sum_c = 0.0
        self._sum_sq_c = 0.0

        if samples is not None:
            self.add(samples)

    @staticmethod
    def _kahan(total, compensation, value):
        y = value - compensation
        t = total + y
        compensation = (t - total) - y
        return t, compensation

    def add(self, samples):
        """Accumulate a batch of samples.

        Args:
            samples(array-like): Values to add, any shape

        Returns:
            SampleAccumulator: self, to allow chaining

        """
        values = np.asarray(samples, dtype=float).ravel()
        if values.size == 0:
            return self

        self.count += values.size
        self.sum, self._sum_c = self._kahan(
            self.sum, self._sum_c, math.fsum(values))
        self.sum_sq, self._sum_sq_c = self._kahan(
            self.sum_sq, self._sum_sq_c, math.fsum(values * values))
        return self

    def merge(self, other):
        """Return a new accumulator holding both sets of samples.

        Args:
            other(SampleAccumulator): Accumulator to combine with

        Returns:
            SampleAccumulator: Combined accumulator

        """
        merged = SampleAccumulator()
        merged.count = self.count + other.count
        merged.sum, merged._sum_c = self._kahan(
            self.sum, self._sum_c + other._sum_c, other.sum)
        merged.sum_sq, merged._sum_sq_c = self._kahan(
            self.sum_sq, self._sum_sq_c + other._sum_sq_c, other.sum_sq)
        return merged

    @property
    def mean(self):
        if self.count == 0:
            raise InsufficientSamples("No samples accumulated")
        return self.sum / self.count

    @property
    def variance(self):
        """Unbiased sample variance, floored at zero."""
        if self.count < 2:
            raise InsufficientSamples(
                "Need at least 2 samples for a variance, got "
                "{}".format(self.count))
        mean = self.sum / self.count
        spread = self.sum_sq - self.count * mean * mean
        return max(spread / (self.count - 1), 0.0)

    @property
    def std_err(self):
        return math.sqrt(self.variance / self.count)


def mean_se(samples):
    """Calculate mean and standard error of independent samples.

    The variance is taken about the mean, so large offsets do not cancel out
    the spread.

    Args:
        samples(array-like): Independent samples

    Returns:
        tuple(float, float): Mean and standard error

    """
    values = np.asarray(samples, dtype=float).ravel()
    if values.size < 2:
        raise InsufficientSamples(
            "Need at least 2 samples for a standard error, got "
            "{}".format(values.size))

    mean = math.fsum(values) / values.size
    deviations = values - mean
    variance = math.fsum(deviations * deviations) / (values.size - 1)
    return mean, math.sqrt(variance / values.size)


def clustered_mean_se(cluster_means, n_outer=None):
    """Calculate grand mean and standard error over outer-path cluster means.

    Inner paths sharing an outer realization are dependent, so the outer
    cluster means are the independent units.

    Args:
        cluster_means(array-like): One mean per outer path
        n_outer(int): Expected number of clusters, checked if given

    Returns:
        tuple(float, float): Grand mean and standard error

    """
    values = np.asarray(cluster_means, dtype=float).ravel()
    if n_outer is not None and values.size != n_outer:
        raise ValueError("Expected {} cluster means, got {}".format(
            n_outer, values.size))
    if values.size < 2:
        raise InsufficientSamples(
            "Need at least 2 outer paths for a clustered standard error, "
            "got {}".format(values.size))
    return mean_se(values)


def cluster_means(samples):
    """Reduce an (n_outer, n_inner) sample array to per-outer means."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        return samples
    return samples.reshape(samples.shape[0], -1).mean(axis=1)


def variance_ratio(std_err, reference_std_err):
    """Ratio of reference variance to estimator variance.

    Args:
        std_err(float): Standard error of the estimator being assessed
        reference_std_err(float): Standard error of the reference estimator

    Returns:
        float: (reference_std_err / std_err) ** 2, inf if std_err is zero

    """
    if std_err == 0:
        return float("inf")
    return (reference_std_err / std_err) ** 2
