"""Brute-force numerical cross-checks for the closed-form readout statistics.

Nothing here calls the closed-form readout code.  Two-mode input states are
tabulated on a square position grid, the attenuation/CX/displacement chain
is applied as the exact coordinate map ``y = eta1 q1 + eta2 q2 + b``, and the
first mode is traced out by accumulating probability into a histogram of
``y``.

Accumulation is done row by row (fixed ``q1``).  Along each row the density in
``q2`` is replaced by its cubic-spline interpolant, whose antiderivative is
evaluated at the preimages of the bin edges.  Each grid cell therefore
spreads its mass over the bins that its footprint actually covers, instead
of dumping it into the single bin that holds its centre.  Point deposits
alias badly when ``eta1 * h`` and the bin width are nearly commensurate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from .errors import ConfigurationError, CoverageError
from .gaussian import PerceptronConfig, ProductGaussianState, _check_eta
from .superposition import SuperposedGaussianState

__all__ = [
    "GridSpec",
    "GridWavefunction2",
    "ReadoutHistogram",
    "build_wavefunction",
    "oracle_readout_distribution",
    "convolution_identity_check",
    "chain_convolution_density",
]

COVERAGE_WIDTHS = 8.0
MIN_POINTS = 64
MIN_BINS = 128
_ROW_BLOCK = 256


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``q_k = -L + k h`` with ``h = 2L / N``, ``k = 0 .. N-1``.

    The origin is a grid point whenever ``N`` is even.
    """

    half_extent: float = 12.0
    points: int = 2048

    def __post_init__(self):
        if not (self.half_extent > 0.0 and math.isfinite(self.half_extent)):
            raise ConfigurationError(f"half_extent must be positive, got {self.half_extent!r}")
        if int(self.points) != self.points or self.points < MIN_POINTS:
            raise ConfigurationError(f"need at least {MIN_POINTS} grid points, got {self.points!r}")

    @property
    def step(self) -> float:
        return 2.0 * self.half_extent / self.points

    @property
    def axis(self) -> np.ndarray:
        return -self.half_extent + self.step * np.arange(self.points)

    def check_covers(self, center: float, width: float) -> None:
        reach = abs(center) + COVERAGE_WIDTHS * width
        if reach > self.half_extent:
            raise CoverageError(
                f"packet at {center!r} with width {width!r} reaches {reach:.3g},"
                f" beyond the grid half-extent {self.half_extent!r}"
            )


@dataclass(frozen=True)
class GridWavefunction2:
    """Real two-mode wavefunction sampled on ``spec.axis x spec.axis``.

    ``amplitudes[i, j]`` is ``psi(q1_i, q2_j)``.  ``raw_norm`` records the
    discrete norm before renormalisation, which validates analytic
    normalisation constants.
    """

    amplitudes: np.ndarray
    spec: GridSpec
    raw_norm: float = field(default=1.0)

    @property
    def norm(self) -> float:
        h = self.spec.step
        return float(np.sum(self.amplitudes**2) * h * h)


def _packet(q: np.ndarray, center: float, width: float) -> np.ndarray:
    return (math.pi * width * width) ** -0.25 * np.exp(-((q - center) ** 2) / (2.0 * width * width))


def build_wavefunction(state, spec: GridSpec = GridSpec()) -> GridWavefunction2:
    """Tabulate a two-mode product or superposed Gaussian state.

    Raises:
        CoverageError: if any packet comes within eight widths of the grid edge.
        ConfigurationError: if the state does not have exactly two modes.
    """
    if isinstance(state, ProductGaussianState):
        branches = ((1.0, state),)
        norm_constant = 1.0
    elif isinstance(state, SuperposedGaussianState):
        branches = state.branches
        norm_constant = state.norm_constant
    else:
        raise TypeError(f"cannot tabulate {type(state).__name__}")
    q = spec.axis
    psi = np.zeros((spec.points, spec.points))
    for coeff, branch in branches:
        if len(branch) != 2:
            raise ConfigurationError(f"grid oracle handles two modes, got {len(branch)}")
        for mode in branch:
            spec.check_covers(mode.center, mode.width)
        a, b = branch.modes
        psi += coeff * np.outer(_packet(q, a.center, a.width), _packet(q, b.center, b.width))
    psi /= math.sqrt(norm_constant)
    h = spec.step
    raw = float(np.sum(psi**2) * h * h)
    return GridWavefunction2(psi / math.sqrt(raw), spec, raw)


@dataclass(frozen=True)
class ReadoutHistogram:
    """Probability mass of the readout outcome per bin."""

    edges: np.ndarray
    mass: np.ndarray

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def density(self) -> np.ndarray:
        return self.mass / self.bin_width

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    def mean(self) -> float:
        return float(np.sum(self.mass * self.centers) / self.total)

    def variance(self) -> float:
        c = self.centers
        mu = self.mean()
        # Sheppard's correction for the bin discretisation
        return float(np.sum(self.mass * (c - mu) ** 2) / self.total - self.bin_width**2 / 12.0)

    def mass_at_or_below(self, threshold: float = 0.0) -> float:
        return float(self.mass[self.centers <= threshold].sum())

    def max_deviation(self, dist) -> float:
        """Largest ``|density - bin-averaged density of dist|`` over all bins.

        ``dist`` is anything with a ``cdf`` method, typically a
        :class:`~cvqp.superposition.GaussianMixture`.
        """
        expected = np.diff(np.asarray(dist.cdf(self.edges))) / self.bin_width
        return float(np.max(np.abs(self.density - expected)))


def _block_masses(p_block, q_rows, q, h, edges, eta1, eta2, bias):
    spline = CubicSpline(q, p_block, axis=1).antiderivative()
    coef = np.transpose(spline.c, (2, 1, 0))  # (rows, intervals, order)
    total = spline(q[-1])
    u = (edges[None, :] - bias - eta1 * q_rows[:, None]) / eta2
    idx = np.clip(np.floor((u - q[0]) / h).astype(np.intp), 0, len(q) - 2)
    t = u - q[idx]
    c = coef[np.arange(len(q_rows))[:, None], idx]
    cum = c[..., 0]
    for k in range(1, c.shape[-1]):
        cum = cum * t + c[..., k]
    cum = np.where(u < q[0], 0.0, np.where(u > q[-1], total[:, None], cum))
    if eta2 < 0.0:
        cum = total[:, None] - cum
    return h * np.diff(cum, axis=1).sum(axis=0)


def oracle_readout_distribution(
    psi: GridWavefunction2,
    etas: tuple[float, float],
    bias: float,
    bins: int = 1024,
    y_range: tuple[float, float] | None = None,
    workers: int = 1,
) -> ReadoutHistogram:
    """Histogram of ``y = eta1 q1 + eta2 q2 + bias`` under ``|psi|**2``.

    By default the bins cover ``[-Y, Y]`` with ``Y`` the largest reachable
    ``|y|``; with an even bin count zero is then a bin edge, so tail masses
    split cleanly at the decision threshold.

    Rows are processed in blocks, optionally on a thread pool; partial
    histograms are summed in block order.
    """
    if bins < MIN_BINS:
        raise ConfigurationError(f"need at least {MIN_BINS} bins, got {bins}")
    eta1, eta2 = (_check_eta(e) for e in etas)
    spec = psi.spec
    q, h = spec.axis, spec.step
    if y_range is None:
        reach = (abs(eta1) + abs(eta2)) * spec.half_extent + abs(bias) + h
        y_range = (-reach, reach)
    edges = np.linspace(y_range[0], y_range[1], bins + 1)

    p = psi.amplitudes**2
    row_mass = p.sum(axis=1)
    active = np.flatnonzero(row_mass > 1e-30 * row_mass.max())
    blocks = [active[i : i + _ROW_BLOCK] for i in range(0, len(active), _ROW_BLOCK)]

    def run(rows):
        return _block_masses(p[rows], q[rows], q, h, edges, eta1, eta2, float(bias))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(rows) for rows in blocks]
    return ReadoutHistogram(edges, np.sum(parts, axis=0))


def convolution_identity_check(a: float, b: float, c: float, d: float, z: float, y=None) -> float:
    """Max deviation between a quadrature of a Gaussian convolution and its closed form.

    Numerically integrates ``exp(-(y-x-a)**2/b) * exp(-(x-z-c)**2/d)`` over
    ``x`` for each ``y`` and compares with
    ``sqrt(pi / (1/b + 1/d)) * exp(-(y-a-c-z)**2 / (b+d))``.
    """
    if not (b > 0.0 and d > 0.0):
        raise ConfigurationError("b and d must be positive")
    if y is None:
        y = np.linspace(-8.0, 8.0, 161) + (a + c + z)
    y = np.asarray(y, dtype=float)
    s_max = math.sqrt(max(b, d))
    s_min = math.sqrt(min(b, d))
    lo = min(y.min() - a, z + c) - 12.0 * s_max
    hi = max(y.max() - a, z + c) + 12.0 * s_max
    n = int(math.ceil((hi - lo) / (s_min / 16.0))) + 1
    x = np.linspace(lo, hi, n)
    integrand = np.exp(-((y[:, None] - x[None, :] - a) ** 2) / b) * np.exp(-((x - z - c) ** 2) / d)
    numeric = trapezoid(integrand, x, axis=1)
    closed = math.sqrt(math.pi / (1.0 / b + 1.0 / d)) * np.exp(-((y - a - c - z) ** 2) / (b + d))
    return float(np.max(np.abs(numeric - closed)))


def chain_convolution_density(
    state: ProductGaussianState, config: PerceptronConfig, step: float = 0.005
) -> tuple[np.ndarray, np.ndarray]:
    """Readout density for any number of modes by repeated numerical convolution.

    Each attenuated mode's position density is sampled on ``k * step`` and
    the CX chain is applied as successive discrete convolutions.  Returns
    ``(y, density)`` on the shifted grid ``k * step + bias``.
    """
    if len(state) != config.n_inputs:
        raise ConfigurationError("state and config disagree on the number of inputs")
    density = None
    for mode, eta in zip(state.modes, config.etas):
        eta = _check_eta(eta)
        center, width = eta * mode.center, abs(eta) * mode.width
        half = int(math.ceil((abs(center) + 12.0 * width) / step))
        u = step * np.arange(-half, half + 1)
        f = np.exp(-((u - center) ** 2) / (width * width)) / math.sqrt(math.pi * width * width)
        if density is None:
            density, k0 = f, -half
        else:
            density, k0 = np.convolve(density, f) * step, k0 - half
    y = step * (k0 + np.arange(len(density))) + config.bias
    return y, density
