"""Threshold homodyne readout: ReLU activation, error probability, shot sampling."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, log_ndtr

from .errors import ConfigurationError
from .gaussian import GaussianMode
from .superposition import GaussianMixture

__all__ = [
    "Polarity",
    "OutcomeSample",
    "ShotBatch",
    "relu_readout",
    "lower_tail",
    "upper_tail",
    "prob_error",
    "log_prob_error",
    "shot_stream",
    "sample_outcomes",
]

_SQRT2 = math.sqrt(2.0)


class Polarity(enum.Enum):
    """Which side of zero the outcome must land on for a correct answer."""

    POSITIVE = "positive"
    NONPOSITIVE = "nonpositive"

    @classmethod
    def from_label(cls, label: int) -> "Polarity":
        if label == 1:
            return cls.POSITIVE
        if label == 0:
            return cls.NONPOSITIVE
        raise ConfigurationError(f"labels must be 0 or 1, got {label!r}")


@dataclass(frozen=True)
class OutcomeSample:
    y: float
    activated: float
    seed_info: str


def relu_readout(y):
    """Conditional displacement of the ancilla: ``0`` if ``y <= 0`` else ``y``."""
    out = np.where(np.asarray(y, dtype=float) > 0.0, y, 0.0)
    return float(out) if out.ndim == 0 else out


def lower_tail(z):
    """Standard normal CDF via ``erfc``; accurate in relative terms deep in the left tail."""
    return 0.5 * erfc(-np.asarray(z, dtype=float) / _SQRT2)


def upper_tail(z):
    """Standard normal survival function ``Q(z)``."""
    return 0.5 * erfc(np.asarray(z, dtype=float) / _SQRT2)


def _as_mixture(dist) -> GaussianMixture:
    if isinstance(dist, GaussianMixture):
        return dist
    if isinstance(dist, GaussianMode):
        return GaussianMixture.from_mode(dist)
    raise TypeError(f"expected GaussianMixture or GaussianMode, got {type(dist).__name__}")


def prob_error(dist, polarity: Polarity) -> float:
    """Probability that the thresholded outcome contradicts ``polarity``.

    For :attr:`Polarity.POSITIVE` this is the mass at ``y <= 0``, for
    :attr:`Polarity.NONPOSITIVE` the mass at ``y > 0``.  Each tail is
    evaluated with ``erfc`` directly, so tiny error probabilities keep full
    relative precision.

    Args:
        dist: a :class:`GaussianMixture`, or a :class:`GaussianMode` whose
            position statistics are used.
        polarity: the expected side of the threshold.
    """
    mix = _as_mixture(dist)
    w = np.array(mix.weights)
    z = -np.array(mix.means) / np.array(mix.stds)
    if polarity is Polarity.POSITIVE:
        tails = lower_tail(z)
    elif polarity is Polarity.NONPOSITIVE:
        tails = upper_tail(z)
    else:
        raise ConfigurationError(f"unknown polarity {polarity!r}")
    return float(min(1.0, math.fsum(w * tails)))


def log_prob_error(dist, polarity: Polarity) -> float:
    """Natural log of :func:`prob_error`, finite even where the tail underflows."""
    mix = _as_mixture(dist)
    z = -np.array(mix.means) / np.array(mix.stds)
    if polarity is Polarity.NONPOSITIVE:
        z = -z
    terms = np.log(np.array(mix.weights)) + log_ndtr(z)
    top = terms.max()
    return float(top + math.log(np.exp(terms - top).sum()))


def shot_stream(seed: int, worker: int = 0) -> np.random.Generator:
    """Independent PCG64 stream for ``worker`` derived from a master ``seed``.

    Streams for distinct workers come from ``SeedSequence(seed).spawn`` style
    child keys, so they never overlap and do not depend on thread timing.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(worker,))))


@dataclass(frozen=True)
class ShotBatch:
    """Homodyne shots plus their ReLU-activated ancilla displacements.

    Behaves as a read-only sequence of :class:`OutcomeSample`.
    """

    y: np.ndarray
    activated: np.ndarray
    seed: int
    workers: int = 1

    def __len__(self) -> int:
        return len(self.y)

    def __getitem__(self, i) -> OutcomeSample:
        return OutcomeSample(float(self.y[i]), float(self.activated[i]), self.seed_info)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def seed_info(self) -> str:
        return f"pcg64:seed={self.seed}:workers={self.workers}"

    def error_rate(self, polarity: Polarity) -> float:
        if polarity is Polarity.POSITIVE:
            return float(np.count_nonzero(self.y <= 0.0)) / len(self.y)
        return float(np.count_nonzero(self.y > 0.0)) / len(self.y)


def _draw(mix: GaussianMixture, rng: np.random.Generator, n: int) -> np.ndarray:
    means = np.array(mix.means)
    stds = np.array(mix.stds)
    if len(mix) == 1:
        k = np.zeros(n, dtype=np.intp)
    else:
        k = rng.choice(len(mix), size=n, p=np.array(mix.weights))
    return rng.normal(means[k], stds[k])


def sample_outcomes(dist, seed: int, n: int, workers: int = 1) -> ShotBatch:
    """Draw ``n`` i.i.d. homodyne outcomes.

    Shots are split into ``workers`` contiguous blocks, block ``i`` drawn from
    :func:`shot_stream` ``(seed, i)``.  Blocks run on a thread pool and are
    concatenated in worker order, so the output only depends on
    ``(dist, seed, n, workers)``.
    """
    n = int(n)
    if n < 1:
        raise ConfigurationError(f"need at least one shot, got {n}")
    if workers < 1:
        raise ConfigurationError(f"need at least one worker, got {workers}")
    mix = _as_mixture(dist)
    sizes = [n // workers + (1 if i < n % workers else 0) for i in range(workers)]
    if workers == 1:
        blocks = [_draw(mix, shot_stream(seed, 0), n)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda i: _draw(mix, shot_stream(seed, i), sizes[i]), range(workers)))
    y = np.concatenate(blocks)
    return ShotBatch(y, relu_readout(y), int(seed), workers)
