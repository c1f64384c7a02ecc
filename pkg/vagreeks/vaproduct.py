"""A stylized GMWB variable annuity: cashflows, decrements and liability.

All cashflow functions work on arrays of annual equity levels shaped
(..., T + 1), so one call projects every scenario of a block.

"""

import os
import logging
from collections import namedtuple

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

ENTRY_AGE = 65

# Gompertz-Makeham stand-in for a 65 year old male, mu(x) = A + B c^x
GM_A = 5e-4
GM_B = 3.5e-5
GM_C = 1.094


def gompertz_makeham_table(entry_age=ENTRY_AGE, term=30, a=GM_A, b=GM_B,
                           c=GM_C):
    """Annual death probabilities from a Gompertz-Makeham force of mortality.

    Args:
        entry_age(int): Age at annuitization
        term(int): Number of years to tabulate
        a(float): Age-independent hazard
        b(float): Gompertz scale
        c(float): Gompertz growth per year of age

    Returns:
        numpy.ndarray: q_x for x = entry_age .. entry_age + term - 1

    """
    ages = entry_age + np.arange(term)
    integrated_hazard = a + b * c ** ages * (c - 1.0) / np.log(c)
    return 1.0 - np.exp(-integrated_hazard)


def load_mortality_table(path, entry_age=ENTRY_AGE, term=30):
    """Read an (age, death probability) table.

    The file is plain text with a header line and two whitespace or comma
    separated columns.

    Returns:
        numpy.ndarray: q_x for x = entry_age .. entry_age + term - 1

    """
    if not os.path.isfile(path):
        raise IOError("Mortality table {} does not exist".format(path))

    try:
        table = pd.read_csv(path, sep=r"[,\s]+", engine="python",
                            header=None, skiprows=1, dtype=str)
    except pd.errors.ParserError as error:
        raise ValueError("Malformed mortality table {}: {}".format(
            path, error))
    if table.shape[1] != 2 or table.isnull().values.any():
        raise ValueError("Mortality table {} needs two columns, age and "
                         "q".format(path))
    rates = dict((int(float(age)), float(q))
                 for age, q in zip(table[0], table[1]))

    ages = range(entry_age, entry_age + term)
    missing = [age for age in ages if age not in rates]
    if missing:
        raise ValueError("Mortality table {} does not cover ages {}".format(
            path, missing))

    q = np.array([rates[age] for age in ages])
    if np.any((q < 0) | (q > 1)):
        raise ValueError("Death probabilities must lie in [0, 1]")
    logger.debug("Loaded mortality for ages %s-%s from %s", entry_age,
                 entry_age + term - 1, path)
    return q


def write_mortality_table(path, q, entry_age=ENTRY_AGE):
    """Write death probabilities in the format load_mortality_table reads."""
    with open(path, "w") as table:
        table.write("age q\n")
        for offset, rate in enumerate(q):
            table.write("{} {!r}\n".format(entry_age + offset, float(rate)))


_ProductSpec = namedtuple("ProductSpec", [
    "premium", "withdrawal_rate", "guarantee_charge", "fund_charge",
    "ratchet_term", "ratchet_cap", "term", "lapse_rate", "mortality",
    "guarantee_follows_equity", "literal_fund_derivative"])


class ProductSpec(_ProductSpec):

    """GMWB contract terms.

    premium is in currency. The fund buys premium / S0 units of the equity
    index at inception. The guarantee base starts at the premium and, unless
    guarantee_follows_equity is set, does not move when S0 is bumped.

    """

    __slots__ = ()

    def __new__(cls, premium=10000.0, withdrawal_rate=0.04,
                guarantee_charge=0.01, fund_charge=0.0125, ratchet_term=10,
                ratchet_cap=1.15, term=30, lapse_rate=0.04, mortality=None,
                guarantee_follows_equity=False, literal_fund_derivative=False):
        if mortality is None:
            mortality = gompertz_makeham_table(term=term)
        mortality = tuple(float(q) for q in mortality)
        return super(ProductSpec, cls).__new__(
            cls, float(premium), withdrawal_rate, guarantee_charge,
            fund_charge, int(ratchet_term), ratchet_cap, int(term), lapse_rate,
            mortality, bool(guarantee_follows_equity),
            bool(literal_fund_derivative))

    def validate(self):
        """Check contract terms.

        Returns:
            ProductSpec: self

        """
        if not self.premium > 0:
            raise ValueError("premium must be positive")
        if not 0 <= self.guarantee_charge <= self.withdrawal_rate < 1:
            raise ValueError(
                "Need 0 <= guarantee_charge <= withdrawal_rate < 1, got {} "
                "and {}".format(self.guarantee_charge, self.withdrawal_rate))
        if self.term < 1 or not 0 <= self.ratchet_term <= self.term:
            raise ValueError("Need 0 <= ratchet_term <= term and term >= 1")
        if not self.ratchet_cap > 1:
            raise ValueError("ratchet_cap must exceed 1")
        if not 0 <= self.lapse_rate < 1:
            raise ValueError("lapse_rate must lie in [0, 1)")
        if len(self.mortality) < self.term:
            raise ValueError("Mortality covers {} years, term is {}".format(
                len(self.mortality), self.term))
        if any(q < 0 or q > 1 for q in self.mortality):
            raise ValueError("Death probabilities must lie in [0, 1]")
        return self

    @property
    def net_income_rate(self):
        return self.withdrawal_rate - self.guarantee_charge


CashflowTrace = namedtuple("CashflowTrace",
                           ["fund", "base", "income", "shortfall"])

CashflowDerivatives = namedtuple("CashflowDerivatives",
                                 ["fund", "base", "income"])

SurvivalCurve = namedtuple("SurvivalCurve", ["p_surv"])


def survival_curve(spec):
    """In-force probabilities with independent mortality and constant lapse.

    Returns:
        SurvivalCurve: p_surv for t = 1 .. T

    """
    q = np.asarray(spec.mortality[:spec.term])
    years = np.arange(1, spec.term + 1)
    return SurvivalCurve(
        p_surv=np.cumprod(1.0 - q) * (1.0 - spec.lapse_rate) ** years)


def _units(spec, levels, units):
    if units is None:
        return spec.premium / levels[..., 0]
    return units


def _returns(spec, levels):
    # Net annual return R_t after the fund charge, so the fund grows by
    # 1 + R_t = S_t / S_{t-1} - eta. Independent of S0 for a multiplicative
    # model.
    return levels[..., 1:] / levels[..., :-1] - 1.0 - spec.fund_charge


def project_cashflows(spec, levels, units=None):
    """Project fund, guarantee base and income along scenarios.

    Args:
        spec(ProductSpec): Contract terms
        levels(numpy.ndarray): Annual equity levels S_0 .. S_T, (..., T + 1)
        units(float): Equity units bought at inception; defaults to
            premium / S_0 of each scenario. Pass the base-level units when
            revaluing at a bumped S0.

    Returns:
        CashflowTrace: Arrays (..., T + 1), index 0 holding time-zero values

    """
    levels = np.asarray(levels, dtype=float)
    if levels.shape[-1] != spec.term + 1:
        raise ValueError("Expected {} annual levels, got {}".format(
            spec.term + 1, levels.shape[-1]))
    units = _units(spec, levels, units)
    growth = 1.0 + _returns(spec, levels)

    fund = np.zeros(levels.shape)
    base = np.zeros(levels.shape)
    income = np.zeros(levels.shape)
    fund[..., 0] = units * levels[..., 0]
    if spec.guarantee_follows_equity:
        base[..., 0] = fund[..., 0]
    else:
        base[..., 0] = spec.premium

    for t in range(1, spec.term + 1):
        fund[..., t] = np.maximum(
            (fund[..., t - 1] - income[..., t - 1]) * growth[..., t - 1], 0.0)
        if t <= spec.ratchet_term:
            base[..., t] = np.minimum(
                np.maximum(base[..., t - 1], fund[..., t]),
                spec.ratchet_cap * base[..., t - 1])
        else:
            base[..., t] = base[..., t - 1]
        income[..., t] = spec.net_income_rate * base[..., t]

    shortfall = np.maximum(income - fund, 0.0)
    shortfall[..., 0] = 0.0
    return CashflowTrace(fund=fund, base=base, income=income,
                         shortfall=shortfall)


def liability_sample(trace, discounts, surv):
    """Discounted, decremented guarantee shortfall per scenario.

    Args:
        trace(CashflowTrace): Projected cashflows (..., T + 1)
        discounts(numpy.ndarray): D_1 .. D_T, broadcastable to (..., T)
        surv(SurvivalCurve): In-force probabilities for t = 1 .. T

    Returns:
        numpy.ndarray: Liability per scenario

    """
    return np.sum(discounts * surv.p_surv * trace.shortfall[..., 1:], axis=-1)


def pathwise_cashflow_derivatives(spec, levels, trace=None, units=None):
    """Derivatives of fund, guarantee base and income with respect to S0.

    Returns R_t are unaffected by S0, so the recursions run forward on the
    indicators of the projected trace.

    Args:
        spec(ProductSpec): Contract terms
        levels(numpy.ndarray): Annual equity levels (..., T + 1)
        trace(CashflowTrace): Projection of levels, recomputed if None
        units(float): Equity units bought at inception

    Returns:
        CashflowDerivatives: Arrays (..., T + 1)

    """
    levels = np.asarray(levels, dtype=float)
    units = _units(spec, levels, units)
    if trace is None:
        trace = project_cashflows(spec, levels, units)
    growth = 1.0 + _returns(spec, levels)
    cap = spec.ratchet_cap

    d_fund = np.zeros(levels.shape)
    d_base = np.zeros(levels.shape)
    d_income = np.zeros(levels.shape)
    d_fund[..., 0] = units
    if spec.guarantee_follows_equity:
        d_base[..., 0] = units

    for t in range(1, spec.term + 1):
        carried = (d_fund[..., t - 1] - d_income[..., t - 1]) * \
            growth[..., t - 1]
        if spec.literal_fund_derivative:
            d_fund[..., t] = np.maximum(carried, 0.0)
        else:
            d_fund[..., t] = np.where(trace.fund[..., t] > 0, carried, 0.0)

        if t <= spec.ratchet_term:
            fund = trace.fund[..., t]
            prior = trace.base[..., t - 1]
            step_up = (fund >= prior) & (fund <= cap * prior)
            capped = (fund >= prior) & (fund > cap * prior)
            d_base[..., t] = np.where(
                step_up, d_fund[..., t],
                np.where(capped, cap * d_base[..., t - 1],
                         d_base[..., t - 1]))
        else:
            d_base[..., t] = d_base[..., t - 1]
        d_income[..., t] = spec.net_income_rate * d_base[..., t]

    return CashflowDerivatives(fund=d_fund, base=d_base, income=d_income)


def pathwise_liability_derivative(trace, derivatives, discounts, surv):
    """Sum of D_t p_t I(I_t > F_t) (dI_t/dS0 - dF_t/dS0) per scenario."""
    biting = trace.income[..., 1:] > trace.fund[..., 1:]
    slope = derivatives.income[..., 1:] - derivatives.fund[..., 1:]
    return np.sum(discounts * surv.p_surv * biting * slope, axis=-1)
