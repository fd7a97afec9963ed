"""Randomised closed-form vs grid-oracle comparison suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian import PerceptronConfig, ProductGaussianState, affine_readout
from .measurement import Polarity, prob_error
from .oracle import (
    GridSpec,
    build_wavefunction,
    convolution_identity_check,
    oracle_readout_distribution,
)
from .superposition import GaussianMixture, symmetric_superposition, xor_homodyne_mixture

__all__ = ["CaseResult", "VerificationReport", "verify"]

DENSITY_TOL = 1e-6
CONVOLUTION_TOL = 1e-8
TAIL_TOL = 1e-5
NORM_TOL = 1e-9


@dataclass
class CaseResult:
    kind: str
    params: dict
    deviation: float
    tolerance: float
    tail_deviation: float = 0.0
    norm_deviation: float = 0.0

    @property
    def passed(self) -> bool:
        return (
            self.deviation <= self.tolerance
            and self.tail_deviation <= TAIL_TOL
            and self.norm_deviation <= NORM_TOL
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "tail_deviation": self.tail_deviation,
            "norm_deviation": self.norm_deviation,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    spec: GridSpec
    bins: int
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def worst(self, kind: str) -> float:
        devs = [c.deviation for c in self.cases if c.kind == kind]
        return max(devs) if devs else 0.0

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        return {
            "grid_l": self.spec.half_extent,
            "grid_n": self.spec.points,
            "bins": self.bins,
            "passed": self.passed,
            "max_deviation": {k: self.worst(k) for k in ("product", "superposition", "convolution")},
            "cases": [c.to_dict() for c in self.cases],
        }


def _signed_eta(rng) -> float:
    return float(rng.uniform(0.1, 1.0) * rng.choice((-1.0, 1.0)))


def _histogram_case(kind, params, state, etas, bias, dist, spec, bins, workers):
    psi = build_wavefunction(state, spec)
    hist = oracle_readout_distribution(psi, etas, bias, bins=bins, workers=workers)
    tail = abs(hist.mass_at_or_below(0.0) - prob_error(dist, Polarity.POSITIVE))
    return CaseResult(
        kind,
        params,
        hist.max_deviation(dist),
        DENSITY_TOL,
        tail_deviation=tail,
        norm_deviation=max(abs(psi.raw_norm - 1.0), abs(hist.total - 1.0)),
    )


def verify(
    spec: GridSpec = GridSpec(),
    bins: int = 1024,
    seed: int = 0,
    n_product: int = 20,
    n_superposition: int = 10,
    n_convolution: int = 50,
    workers: int = 1,
) -> VerificationReport:
    """Run randomised product, superposition and convolution-identity checks.

    Widths are drawn from ``[exp(-1), 1]`` and centres from ``[-2, 2]``.
    Superposition cases use the XOR weights ``(1, -1)`` and, for every other
    case, unequal widths on the two modes.
    """
    rng = np.random.default_rng(seed)
    report = VerificationReport(spec, bins)
    lo_w = math.exp(-1.0)

    for _ in range(n_product):
        xs = rng.uniform(-2.0, 2.0, 2)
        ds = rng.uniform(lo_w, 1.0, 2)
        etas = (_signed_eta(rng), _signed_eta(rng))
        bias = float(rng.uniform(-1.0, 1.0))
        state = ProductGaussianState.encode(xs, ds)
        dist = GaussianMixture.from_mode(affine_readout(state, PerceptronConfig(etas, bias)))
        params = {"x": xs.tolist(), "delta": ds.tolist(), "etas": list(etas), "bias": bias}
        report.cases.append(_histogram_case("product", params, state, etas, bias, dist, spec, bins, workers))

    for i in range(n_superposition):
        x1, x2 = rng.uniform(-2.0, 2.0, 2)
        d1 = float(rng.uniform(lo_w, 1.0))
        d2 = float(rng.uniform(lo_w, 1.0)) if i % 2 else d1
        bias = float(rng.uniform(-1.0, 1.0))
        state = symmetric_superposition(float(x1), float(x2), d1, d2)
        dist = xor_homodyne_mixture(state, bias)
        params = {"x": [float(x1), float(x2)], "delta": [d1, d2], "etas": [1.0, -1.0], "bias": bias}
        report.cases.append(
            _histogram_case("superposition", params, state, (1.0, -1.0), bias, dist, spec, bins, workers)
        )

    for _ in range(n_convolution):
        a, c, z = rng.uniform(-2.0, 2.0, 3)
        b, d = rng.uniform(0.1, 2.0, 2)
        dev = convolution_identity_check(a, b, c, d, z)
        params = {"a": a, "b": b, "c": c, "d": d, "z": z}
        report.cases.append(
            CaseResult("convolution", {k: float(v) for k, v in params.items()}, dev, CONVOLUTION_TOL)
        )
    return report
