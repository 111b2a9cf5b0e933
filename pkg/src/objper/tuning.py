"""Penalty-path computation and information-criterion selection of the period.

The penalized loss ``rss[theta] + lam * theta`` is affine in ``lam`` for every
candidate, so the selected period as a function of ``lam`` is the lower
envelope of ``theta_max`` lines: a step function with finitely many
breakpoints. The information criteria depend on ``lam`` only through the
selected period, so minimizing them over ``lam`` reduces to scoring the
distinct periods on the path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InputError, InvalidRegularizerError, ZeroRSSError
from .scan import ScanResult


class Criterion(str, Enum):
    LOG_RSS = "log_rss"
    RSS = "rss"


def parse_criterion(kind):
    """Accept a :class:`Criterion` or one of ``"rss"``, ``"log_rss"``, ``"log-rss"``."""
    if isinstance(kind, Criterion):
        return kind
    try:
        return Criterion(str(kind).replace("-", "_"))
    except ValueError:
        raise InputError(f"unknown criterion {kind!r}; expected 'rss' or 'log-rss'") from None


@dataclass(frozen=True)
class LambdaPath:
    """Piecewise-constant map from the penalty weight to the selected period.

    Segment ``k`` covers ``[breakpoints[k], breakpoints[k + 1])``; the last
    segment is unbounded and always selects ``theta = 1``.
    """

    breakpoints: np.ndarray
    thetas: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        th = np.asarray(self.thetas, dtype=int)
        if bp.shape != th.shape or bp.size == 0:
            raise InputError("breakpoints and thetas must be nonempty and equally long")
        if bp[0] != 0 or np.any(np.diff(bp) <= 0):
            raise InputError("breakpoints must start at 0 and increase strictly")
        if np.any(np.diff(th) >= 0) or th[-1] != 1:
            raise InputError("thetas must decrease strictly and end at 1")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "thetas", th)

    def __len__(self):
        return len(self.thetas)

    def theta_at(self, lam):
        """Selected period at penalty ``lam`` (vectorized)."""
        k = np.searchsorted(self.breakpoints, lam, side="right") - 1
        if np.any(k < 0):
            raise InputError("lambda must be >= 0")
        out = self.thetas[k]
        return int(out) if np.ndim(out) == 0 else out

    def segments(self):
        """``(theta, lo, hi)`` per segment; ``hi`` is ``inf`` for the last one."""
        his = list(self.breakpoints[1:]) + [math.inf]
        return [(int(t), float(lo), float(hi)) for t, lo, hi in zip(self.thetas, self.breakpoints, his)]


def lambda_path(result):
    """Exact lower-envelope path of ``rss[theta] + lam * theta`` over ``lam >= 0``.

    Accepts a :class:`ScanResult` or a bare RSS vector. Ties at any ``lam``
    go to the smallest period.
    """
    rss = np.asarray(result.rss if isinstance(result, ScanResult) else result, dtype=float)
    if rss.ndim != 1 or rss.size == 0:
        raise InputError("rss must be a nonempty vector")
    cur = int(np.argmin(rss))
    breakpoints, thetas = [0.0], [cur + 1]
    while cur > 0:
        j = np.arange(cur)
        cross = (rss[:cur] - rss[cur]) / (cur - j)
        lam = cross.min()
        cur = int(np.flatnonzero(cross == lam)[0])
        if lam <= breakpoints[-1]:
            thetas[-1] = cur + 1
        else:
            breakpoints.append(float(lam))
            thetas.append(cur + 1)
    return LambdaPath(np.array(breakpoints), np.array(thetas))


def g_default(T, theta_max):
    """Default regularizer ``log(T/theta_max) / (T/theta_max) ** 1.01``."""
    if theta_max < 1:
        raise InvalidRegularizerError("theta_max must be >= 1")
    ratio = T / theta_max
    if ratio <= 1:
        raise InvalidRegularizerError(
            f"T/theta_max = {ratio:.6g} must exceed 1 for the default regularizer"
        )
    return math.log(ratio) / ratio**1.01


def information_criterion(result, theta_hat, g, kind=Criterion.RSS):
    """Goodness of fit at ``theta_hat`` plus the complexity penalty ``theta_hat * g``.

    ``kind="log_rss"`` uses ``log(RSS / T)``, ``kind="rss"`` uses ``RSS / T``.
    """
    kind = parse_criterion(kind)
    if not 1 <= theta_hat <= result.theta_max:
        raise InputError(f"theta_hat={theta_hat} outside 1..{result.theta_max}")
    fit = _fit_term(result, theta_hat, kind)
    return fit + theta_hat * g


def _fit_term(result, theta, kind):
    r = result.rss_at(theta)
    if kind is Criterion.LOG_RSS:
        if r <= 0:
            raise ZeroRSSError(
                f"RSS({theta}) = 0, log-RSS criterion undefined; use the rss criterion"
            )
        return math.log(r / result.T)
    return r / result.T


@dataclass(frozen=True)
class ICRecord:
    theta: int
    lambda_lo: float
    lambda_hi: float
    rss_over_T: float
    fit: float
    penalty: float
    value: float


@dataclass
class ICReport:
    criterion_kind: Criterion
    g_value: float
    records: list
    selected_theta: int
    selected_lambda: float
    path: LambdaPath = field(repr=False)

    @property
    def selected_value(self):
        return min(r.value for r in self.records)

    def to_dict(self):
        return {
            "criterion_kind": self.criterion_kind.value,
            "g_value": self.g_value,
            "selected_theta": self.selected_theta,
            "selected_lambda": self.selected_lambda,
            "records": [
                {
                    "theta": r.theta,
                    "lambda_lo": r.lambda_lo,
                    "lambda_hi": None if math.isinf(r.lambda_hi) else r.lambda_hi,
                    "rss_over_T": r.rss_over_T,
                    "fit": r.fit,
                    "penalty": r.penalty,
                    "value": r.value,
                }
                for r in self.records
            ],
        }


def select(result, kind=Criterion.RSS, g=None):
    """Pick the penalty, and with it the period, minimizing the information criterion.

    ``g`` defaults to :func:`g_default` for the scan's ``T`` and ``theta_max``.
    The reported lambda is the midpoint of the winning segment (left end + 1
    for the unbounded last segment); any lambda in the segment is equivalent.
    """
    kind = parse_criterion(kind)
    if g is None:
        g = g_default(result.T, result.theta_max)
    if not (g > 0 and math.isfinite(g)):
        raise InputError("g must be a positive finite number")
    path = lambda_path(result)
    records = []
    for theta, lo, hi in path.segments():
        fit = _fit_term(result, theta, kind)
        penalty = theta * g
        records.append(
            ICRecord(theta, lo, hi, result.rss_at(theta) / result.T, fit, penalty, fit + penalty)
        )
    best = min(records, key=lambda r: (r.value, r.theta))
    lam = best.lambda_lo + 1.0 if math.isinf(best.lambda_hi) else 0.5 * (best.lambda_lo + best.lambda_hi)
    return ICReport(kind, float(g), records, best.theta, lam, path)
