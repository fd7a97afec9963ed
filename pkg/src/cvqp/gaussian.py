"""Displaced-squeezed Gaussian modes and the perceptron gate pipeline.

A single qumode prepared as ``D(x) S(r) |0>`` has the position wavefunction

    psi(q) = (pi * delta**2) ** (-1/4) * exp(-(q - x)**2 / (2 * delta**2))

with ``delta = exp(-r)``.  Squeezing attenuators, controlled additions and
displacements all act on such product states as affine maps of the position
quadrature, so the whole circuit can be tracked through ``(center, width)``
pairs without touching kets.

``width`` always stores ``delta``, the envelope width of the wavefunction.
The position measurement on the mode has standard deviation
``delta / sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigurationError, InvalidWeightError, InvalidWidthError

__all__ = [
    "GaussianMode",
    "ProductGaussianState",
    "PerceptronConfig",
    "encode_mode",
    "attenuate",
    "affine_readout",
    "homodyne_density",
]


def _check_width(delta: float) -> float:
    delta = float(delta)
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidWidthError(f"width must be positive and finite, got {delta!r}")
    return delta


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not math.isfinite(eta) or eta == 0.0 or abs(eta) > 1.0:
        raise InvalidWeightError(f"attenuation weight must satisfy 0 < |eta| <= 1, got {eta!r}")
    return eta


@dataclass(frozen=True)
class GaussianMode:
    """One displaced-squeezed wavepacket.

    Attributes:
        center: displacement of the packet in quadrature units.
        width: envelope width ``delta`` of the wavefunction.
    """

    center: float
    width: float

    def __post_init__(self):
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "width", _check_width(self.width))

    @property
    def std(self) -> float:
        """Standard deviation of a position measurement on this mode."""
        return self.width / math.sqrt(2.0)

    @property
    def variance(self) -> float:
        return self.width**2 / 2.0

    @property
    def squeezing(self) -> float:
        """Squeezing parameter ``r`` such that ``width == exp(-r)``."""
        return 0.0 - math.log(self.width)

    def amplitude(self, q):
        """Position-space wavefunction evaluated at ``q`` (real, positive)."""
        q = np.asarray(q, dtype=float)
        norm = (math.pi * self.width**2) ** -0.25
        return norm * np.exp(-((q - self.center) ** 2) / (2.0 * self.width**2))


@dataclass(frozen=True)
class ProductGaussianState:
    """Tensor product of independent Gaussian modes, one per input."""

    modes: tuple[GaussianMode, ...]

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise ConfigurationError("a product state needs at least one mode")
        for m in modes:
            if not isinstance(m, GaussianMode):
                raise ConfigurationError(f"expected GaussianMode, got {type(m).__name__}")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def encode(cls, xs: Iterable[float], deltas: float | Iterable[float]) -> "ProductGaussianState":
        """Encode a vector of reals, sharing one width or using one width per entry."""
        xs = [float(x) for x in xs]
        if np.isscalar(deltas):
            deltas = [deltas] * len(xs)
        deltas = list(deltas)
        if len(deltas) != len(xs):
            raise ConfigurationError(f"{len(xs)} values but {len(deltas)} widths")
        return cls(tuple(encode_mode(x, d) for x, d in zip(xs, deltas)))

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, i):
        return self.modes[i]

    @property
    def centers(self) -> tuple[float, ...]:
        return tuple(m.center for m in self.modes)

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(m.width for m in self.modes)


@dataclass(frozen=True)
class PerceptronConfig:
    """Attenuation weights and bias of a single perceptron."""

    etas: tuple[float, ...]
    bias: float = 0.0

    def __post_init__(self):
        etas = tuple(float(e) for e in self.etas)
        if not etas:
            raise ConfigurationError("at least one weight is required")
        for e in etas:
            if not math.isfinite(e) or abs(e) > 1.0:
                raise InvalidWeightError(f"weights must satisfy |eta| <= 1, got {e!r}")
        object.__setattr__(self, "etas", etas)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def n_inputs(self) -> int:
        return len(self.etas)


def encode_mode(x: float, delta: float) -> GaussianMode:
    """Prepare ``D(x) S(-log delta) |0>``.

    Raises:
        InvalidWidthError: if ``delta`` is not strictly positive.
    """
    return GaussianMode(x, delta)


def attenuate(mode: GaussianMode, eta: float) -> GaussianMode:
    """Scale a mode's position quadrature by ``eta``.

    A squeezer with ``eta = exp(-2r)`` maps ``|q>`` to ``sqrt(eta) |eta q>``, so
    both the center and the envelope width shrink by ``|eta|``.  Negative
    weights add a pi phase rotation, which flips the center's sign only.
    """
    eta = _check_eta(eta)
    return GaussianMode(eta * mode.center, abs(eta) * mode.width)


def affine_readout(state: ProductGaussianState, config: PerceptronConfig) -> GaussianMode:
    """State of the last qumode after attenuation, the CX chain and the bias.

    The CX chain accumulates ``sum_j eta_j q_j`` on the last mode; the other
    modes are traced out.  For product Gaussian inputs the marginal is a
    Gaussian whose center is the affine output and whose squared width is
    ``sum_j eta_j**2 * delta_j**2``.

    Raises:
        ConfigurationError: if the state and config disagree on the number of inputs.
    """
    if len(state) != config.n_inputs:
        raise ConfigurationError(
            f"state has {len(state)} modes but config expects {config.n_inputs} inputs"
        )
    attenuated = [attenuate(m, eta) for m, eta in zip(state.modes, config.etas)]
    center = math.fsum(m.center for m in attenuated) + config.bias
    width = math.hypot(*(m.width for m in attenuated))
    return GaussianMode(center, width)


def homodyne_density(readout: GaussianMode, y):
    """Probability density of an ideal position measurement with outcome ``y``.

    Works elementwise on arrays.
    """
    y = np.asarray(y, dtype=float)
    w2 = readout.width**2
    out = np.exp(-((y - readout.center) ** 2) / w2) / math.sqrt(math.pi * w2)
    return float(out) if out.ndim == 0 else out

