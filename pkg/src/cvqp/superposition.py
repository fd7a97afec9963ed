"""Superpositions of product Gaussian states and their homodyne statistics.

A superposed input is written as

    |psi> = C**(-1/2) * sum_i c_i |branch_i>

where every branch is a :class:`~cvqp.gaussian.ProductGaussianState`.  The
position density of the readout mode is a sum over branch pairs ``(i, j)``.
For real Gaussian wavefunctions the cross term of one mode is

    psi_a(q) psi_b(q) = <a|b> * N(q; m_ab, s_ab**2)

so every pair contributes one Gaussian component.  After the attenuation,
CX and bias gates that component is again Gaussian in the readout variable,
with weight ``c_i c_j prod_k <a_k|b_k> / C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from .errors import ConfigurationError
from .gaussian import (
    GaussianMode,
    PerceptronConfig,
    ProductGaussianState,
    _check_eta,
    encode_mode,
)

__all__ = [
    "GaussianMixture",
    "SuperposedGaussianState",
    "gaussian_overlap",
    "symmetric_superposition",
    "readout_mixture",
    "xor_homodyne_mixture",
]

_WEIGHT_TOL = 1e-12


def _same(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-13, abs_tol=1e-13)


@dataclass(frozen=True)
class GaussianMixture:
    """Finite mixture of normal distributions over the homodyne outcome.

    ``std`` is the true standard deviation of each component, not an
    envelope width.  Instances built through :meth:`from_components` are in
    canonical form: sorted by mean, with identical ``(mean, std)`` pairs
    merged.
    """

    weights: tuple[float, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        m = tuple(float(v) for v in self.means)
        s = tuple(float(v) for v in self.stds)
        if not (len(w) == len(m) == len(s)) or not w:
            raise ConfigurationError("weights, means and stds must be non-empty and equally long")
        if any(v < 0.0 or not math.isfinite(v) for v in w):
            raise ConfigurationError(f"weights must be non-negative, got {w}")
        if any(not (v > 0.0 and math.isfinite(v)) for v in s):
            raise ConfigurationError(f"stds must be positive, got {s}")
        if abs(math.fsum(w) - 1.0) > _WEIGHT_TOL:
            raise ConfigurationError(f"weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)
        object.__setattr__(self, "stds", s)

    @classmethod
    def from_components(cls, components: Iterable[tuple[float, float, float]]) -> "GaussianMixture":
        """Build a canonical mixture from ``(weight, mean, std)`` triples."""
        merged: list[list[float]] = []
        for mu, sd, w in sorted((float(m), float(s), float(w)) for w, m, s in components):
            if merged and _same(merged[-1][0], mu) and _same(merged[-1][1], sd):
                merged[-1][2] += w
            else:
                merged.append([mu, sd, w])
        return cls(
            tuple(c[2] for c in merged),
            tuple(c[0] for c in merged),
            tuple(c[1] for c in merged),
        )

    @classmethod
    def from_mode(cls, mode: GaussianMode) -> "GaussianMixture":
        """Single-component mixture for the position statistics of ``mode``."""
        return cls((1.0,), (mode.center,), (mode.std,))

    @property
    def components(self) -> list[tuple[float, float, float]]:
        return list(zip(self.weights, self.means, self.stds))

    def __len__(self) -> int:
        return len(self.weights)

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for w, mu, sd in self.components:
            out = out + w * np.exp(-0.5 * ((y - mu) / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))
        return float(out) if out.ndim == 0 else out

    def cdf(self, y):
        """Mass at outcomes ``<= y``."""
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for w, mu, sd in self.components:
            out = out + w * ndtr((y - mu) / sd)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return math.fsum(w * mu for w, mu, _ in self.components)

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(w * (sd**2 + (m - mu) ** 2) for w, m, sd in self.components)


def gaussian_overlap(a: GaussianMode, b: GaussianMode) -> float:
    """Inner product of two real Gaussian wavepackets.

    For widths ``d_a`` and ``d_b``::

        <a|b> = sqrt(2 d_a d_b / (d_a**2 + d_b**2))
                * exp(-(x_a - x_b)**2 / (2 (d_a**2 + d_b**2)))

    which reduces to ``exp(-(x_a - x_b)**2 / (4 d**2))`` for equal widths.
    """
    s2 = a.width**2 + b.width**2
    prefactor = math.sqrt(2.0 * a.width * b.width / s2)
    return prefactor * math.exp(-((a.center - b.center) ** 2) / (2.0 * s2))


def _branch_overlap(u: ProductGaussianState, v: ProductGaussianState) -> float:
    return math.prod(gaussian_overlap(a, b) for a, b in zip(u.modes, v.modes))


def _norm_constant(branches: Sequence[tuple[float, ProductGaussianState]]) -> float:
    return math.fsum(
        ci * cj * _branch_overlap(si, sj) for ci, si in branches for cj, sj in branches
    )


@dataclass(frozen=True)
class SuperposedGaussianState:
    """Weighted sum of product Gaussian states.

    Attributes:
        branches: ``(coefficient, state)`` pairs; coefficients are real and
            non-negative.
        norm_constant: ``C``, chosen so that ``C**(-1/2) * sum_i c_i |branch_i>``
            has unit norm.  Computed from the branches when omitted.
    """

    branches: tuple[tuple[float, ProductGaussianState], ...]
    norm_constant: float | None = None

    def __post_init__(self):
        branches = tuple((float(c), s) for c, s in self.branches)
        if not branches:
            raise ConfigurationError("a superposition needs at least one branch")
        n = len(branches[0][1])
        for c, s in branches:
            if not isinstance(s, ProductGaussianState):
                raise ConfigurationError(f"expected ProductGaussianState, got {type(s).__name__}")
            if len(s) != n:
                raise ConfigurationError("all branches must have the same number of modes")
            if c < 0.0 or not math.isfinite(c):
                raise ConfigurationError(f"branch coefficients must be non-negative, got {c!r}")
        norm = _norm_constant(branches)
        if not norm > 0.0:
            raise ConfigurationError("superposition has zero norm")
        if self.norm_constant is not None and not math.isclose(
            float(self.norm_constant), norm, rel_tol=1e-12
        ):
            raise ConfigurationError(
                f"norm_constant {self.norm_constant!r} inconsistent with branches ({norm!r})"
            )
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "norm_constant", norm)

    @property
    def n_modes(self) -> int:
        return len(self.branches[0][1])

    def amplitude(self, *qs):
        """Wavefunction on a broadcastable set of per-mode coordinates."""
        if len(qs) != self.n_modes:
            raise ConfigurationError(f"need {self.n_modes} coordinate arrays, got {len(qs)}")
        total = 0.0
        for c, state in self.branches:
            term = c
            for mode, q in zip(state.modes, qs):
                term = term * mode.amplitude(q)
            total = total + term
        return total / math.sqrt(self.norm_constant)


def symmetric_superposition(
    x1: float, x2: float, delta: float, delta2: float | None = None
) -> SuperposedGaussianState:
    """Exchange-symmetric input ``|x1, x2> + |x2, x1>`` built from squeezed packets.

    Mode 1 always has width ``delta`` and mode 2 width ``delta2`` (defaults to
    ``delta``).  With equal widths the normalisation constant is
    ``2 * (1 + exp(-(x1 - x2)**2 / (2 delta**2)))``.
    """
    delta2 = delta if delta2 is None else delta2
    first = ProductGaussianState((encode_mode(x1, delta), encode_mode(x2, delta2)))
    second = ProductGaussianState((encode_mode(x2, delta), encode_mode(x1, delta2)))
    return SuperposedGaussianState(((1.0, first), (1.0, second)))


def _pair_component(u: ProductGaussianState, v: ProductGaussianState, etas, bias):
    # product of two real Gaussians in one mode: precision adds, mean is precision-weighted
    mean = bias
    var = 0.0
    for a, b, eta in zip(u.modes, v.modes, etas):
        pa, pb = 1.0 / a.width**2, 1.0 / b.width**2
        s2 = 1.0 / (pa + pb)
        mean += eta * s2 * (pa * a.center + pb * b.center)
        var += eta**2 * s2
    return mean, math.sqrt(var)


def readout_mixture(
    state: SuperposedGaussianState, config: PerceptronConfig
) -> GaussianMixture:
    """Homodyne outcome distribution of the readout mode for a superposed input."""
    if state.n_modes != config.n_inputs:
        raise ConfigurationError(
            f"state has {state.n_modes} modes but config expects {config.n_inputs} inputs"
        )
    etas = [_check_eta(e) for e in config.etas]
    comps = []
    branches = state.branches
    for i, (ci, si) in enumerate(branches):
        for j, (cj, sj) in enumerate(branches):
            if j < i:
                continue
            weight = ci * cj * _branch_overlap(si, sj) / state.norm_constant
            if j > i:
                weight *= 2.0
            if weight == 0.0:
                continue
            mean, std = _pair_component(si, sj, etas, config.bias)
            comps.append((weight, mean, std))
    # C is a sum of the same terms, so the weights can only miss 1 by rounding
    total = math.fsum(w for w, _, _ in comps)
    return GaussianMixture.from_components((w / total, m, s) for w, m, s in comps)


def xor_homodyne_mixture(
    state: SuperposedGaussianState, bias: float, etas: tuple[float, float] = (1.0, -1.0)
) -> GaussianMixture:
    """Readout distribution of the two-input circuit used for XOR.

    For the equal-width symmetric state this yields components at
    ``b + x1 - x2``, ``b + x2 - x1`` and ``b`` with common std ``delta``.

    Raises:
        ConfigurationError: if the branches do not hold exactly two modes.
    """
    if state.n_modes != 2:
        raise ConfigurationError(f"XOR readout needs two modes per branch, got {state.n_modes}")
    return readout_mixture(state, PerceptronConfig(tuple(etas), bias))
