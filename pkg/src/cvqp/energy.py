"""Energy cost of the encoding and error-vs-energy trade-off surfaces.

The cost of preparing ``|x, delta>`` from the vacuum is its excess mean photon
number

    E(x, delta) = x**2 / 2 + (1 - delta**2)**2 / (4 delta**2)

Two inputs with equal ``|x|`` and ``delta`` cost ``E_tot = 2 E``, which can be
solved for the squeezed-branch width ``delta**2 <= 1``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, InfeasibleBudgetError, InvalidWidthError
from .measurement import Polarity, lower_tail, prob_error, upper_tail
from .superposition import symmetric_superposition, xor_homodyne_mixture

__all__ = [
    "EnergyBudget",
    "TradeoffSurface",
    "mode_energy",
    "width_from_budget",
    "and_surface",
    "xor_surface",
    "DEFAULT_X_RANGE",
    "DEFAULT_E_RANGE",
    "DEFAULT_RESOLUTION",
]

DEFAULT_X_RANGE = (0.0, 2.0)
DEFAULT_E_RANGE = (0.0, 6.0)
DEFAULT_RESOLUTION = 121

CSV_HEADER = ("x", "e_tot", "p_err_plus", "p_err_minus")


def mode_energy(x: float, delta: float) -> float:
    """Mean photon number of ``D(x) S(-log delta) |0>`` above the vacuum."""
    delta = float(delta)
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidWidthError(f"width must be positive and finite, got {delta!r}")
    d2 = delta * delta
    return abs(x) ** 2 / 2.0 + (1.0 - d2) ** 2 / (4.0 * d2)


@dataclass(frozen=True)
class EnergyBudget:
    """Total preparation energy shared by two inputs of equal ``|x|``."""

    total: float
    displacement_mag: float

    def __post_init__(self):
        object.__setattr__(self, "total", float(self.total))
        object.__setattr__(self, "displacement_mag", abs(float(self.displacement_mag)))
        if not (self.total >= 0.0 and math.isfinite(self.total)):
            raise ConfigurationError(f"energy must be non-negative and finite, got {self.total!r}")

    @property
    def feasible(self) -> bool:
        return self.total >= self.displacement_mag**2


def _width_sq(total, mag):
    # roots of D**2 - 2 a D + 1 = 0 multiply to one; take 1/(larger root) for stability
    # a >= 1 on the feasible set; rounding in E - |x|^2 must not push it below
    a = np.maximum(1.0 + (total - mag**2), 1.0)
    disc = np.sqrt(a * a - 1.0)
    return 1.0 / (a + disc)


def width_from_budget(budget: EnergyBudget) -> float:
    """Squared width ``delta**2`` that spends ``budget.total`` on two modes.

    Returns the root with ``delta**2 <= 1`` (squeezing, never anti-squeezing).

    Raises:
        InfeasibleBudgetError: if the displacement alone exceeds the budget.
    """
    if not budget.feasible:
        raise InfeasibleBudgetError(
            f"energy {budget.total!r} cannot pay for displacement {budget.displacement_mag!r}"
            f" (needs at least {budget.displacement_mag ** 2!r})"
        )
    return float(_width_sq(budget.total, budget.displacement_mag))


@dataclass(frozen=True)
class TradeoffSurface:
    """Error probabilities on a rectangular ``(x, E_tot)`` grid.

    ``p_err_plus`` and ``p_err_minus`` have shape ``(len(x), len(e_tot))``;
    cells with an infeasible budget hold NaN.
    """

    task: str
    x: np.ndarray
    e_tot: np.ndarray
    p_err_plus: np.ndarray
    p_err_minus: np.ndarray

    @property
    def feasible(self) -> np.ndarray:
        return ~np.isnan(self.p_err_plus)

    def rows(self) -> Iterator[tuple[float, float, float | None, float | None]]:
        """Row-major ``(x, e_tot, p_plus, p_minus)`` with ``None`` for missing cells."""
        for i, x in enumerate(self.x):
            for j, e in enumerate(self.e_tot):
                pp, pm = self.p_err_plus[i, j], self.p_err_minus[i, j]
                yield (
                    float(x),
                    float(e),
                    None if np.isnan(pp) else float(pp),
                    None if np.isnan(pm) else float(pm),
                )

    def to_csv(self, path: str | os.PathLike | None = None) -> str:
        """Serialise as CSV (shortest round-trip floats, empty fields when missing)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows():
            writer.writerow(["" if v is None else repr(v) for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _axis(lo_hi, n: int, name: str) -> np.ndarray:
    lo, hi = (float(v) for v in lo_hi)
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ConfigurationError(f"empty {name} range {lo_hi!r} with {n} points")
    if n == 1:
        if lo != hi:
            raise ConfigurationError(f"{name} range {lo_hi!r} needs more than one point")
        return np.array([lo])
    return np.linspace(lo, hi, n)


def _grid(x_range, e_range, resolution):
    if np.isscalar(resolution):
        nx = ne = int(resolution)
    else:
        nx, ne = (int(r) for r in resolution)
    x = _axis(x_range, nx, "x")
    e = _axis(e_range, ne, "energy")
    if x.min() < 0.0:
        raise ConfigurationError("displacement magnitudes must be non-negative")
    if e.min() < 0.0:
        raise ConfigurationError("energies must be non-negative")
    X, E = np.meshgrid(x, e, indexing="ij")
    feasible = E >= X**2
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = np.where(feasible, _width_sq(E, X), np.nan)
    return x, e, X, np.sqrt(d2)


def and_surface(x_range=DEFAULT_X_RANGE, e_range=DEFAULT_E_RANGE, resolution=DEFAULT_RESOLUTION):
    """AND error surfaces with unit weights and bias ``-1``.

    ``p_err_plus`` is the ``y <= 0`` mass for input ``(x, x)`` (readout mean
    ``2x - 1``, std ``delta``); ``p_err_minus`` the ``y > 0`` mass for
    ``(x, -x)`` (mean ``-1``).
    """
    x, e, X, delta = _grid(x_range, e_range, resolution)
    with np.errstate(invalid="ignore"):
        plus = lower_tail(-(2.0 * X - 1.0) / delta)
        minus = upper_tail(1.0 / delta)
    return TradeoffSurface("and", x, e, plus, minus)


def _xor_plus_cell(x: float, delta: float) -> float:
    mix = xor_homodyne_mixture(symmetric_superposition(x, -x, delta), bias=-1.0)
    return prob_error(mix, Polarity.POSITIVE)


def xor_surface(x_range=DEFAULT_X_RANGE, e_range=DEFAULT_E_RANGE, resolution=DEFAULT_RESOLUTION):
    """XOR error surfaces for the symmetric superposition input, bias ``-1``.

    ``p_err_plus`` is the ``y <= 0`` mass of the three-component mixture for
    ``x1 = -x2 = x``; ``p_err_minus`` matches the AND case since ``x1 = x2``
    collapses the superposition to a single Gaussian at ``-1``.
    """
    x, e, X, delta = _grid(x_range, e_range, resolution)
    plus = np.full(X.shape, np.nan)
    for idx in zip(*np.nonzero(~np.isnan(delta))):
        plus[idx] = _xor_plus_cell(float(X[idx]), float(delta[idx]))
    with np.errstate(invalid="ignore"):
        minus = upper_tail(1.0 / delta)
    return TradeoffSurface("xor", x, e, plus, minus)

