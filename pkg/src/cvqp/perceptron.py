"""The full quantum perceptron: AND/XOR experiments, classical reference, trainer.

Logical inputs live in ``{-1, +1}`` and labels in ``{0, 1}``.  A label of 1
expects a positive homodyne outcome (the ancilla gets displaced), a label of
0 expects ``y <= 0`` (the ancilla stays in the vacuum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr, ndtr

from .energy import mode_energy
from .errors import ConfigurationError, InvalidWidthError
from .gaussian import PerceptronConfig, ProductGaussianState, affine_readout
from .measurement import Polarity, prob_error, relu_readout
from .superposition import GaussianMixture, readout_mixture, symmetric_superposition

__all__ = [
    "TruthTable",
    "AND_TABLE",
    "XOR_TABLE",
    "RowResult",
    "ExperimentReport",
    "TrainConfig",
    "TrainResult",
    "classical_forward",
    "run_and",
    "run_xor",
    "training_loss",
    "loss_gradient",
    "finite_difference_gradient",
    "train_weights",
    "product_encoding_floor",
]


@dataclass(frozen=True)
class TruthTable:
    """Binary function of two ``{-1, +1}`` inputs."""

    name: str
    rows: tuple[tuple[tuple[int, int], int], ...]

    def __post_init__(self):
        rows = tuple((tuple(int(v) for v in x), int(label)) for x, label in self.rows)
        inputs = [x for x, _ in rows]
        if len(rows) != 4 or len(set(inputs)) != 4:
            raise ConfigurationError("a truth table needs four distinct input pairs")
        for x, label in rows:
            if any(v not in (-1, 1) for v in x) or len(x) != 2:
                raise ConfigurationError(f"inputs must be pairs from {{-1, +1}}, got {x}")
            if label not in (0, 1):
                raise ConfigurationError(f"labels must be 0 or 1, got {label}")
        object.__setattr__(self, "rows", rows)

    @property
    def inputs(self) -> np.ndarray:
        return np.array([x for x, _ in self.rows], dtype=float)

    @property
    def labels(self) -> np.ndarray:
        return np.array([label for _, label in self.rows])


_PAIRS = ((-1, -1), (-1, 1), (1, -1), (1, 1))
AND_TABLE = TruthTable("and", tuple((p, int(p == (1, 1))) for p in _PAIRS))
XOR_TABLE = TruthTable("xor", tuple((p, int(p[0] != p[1])) for p in _PAIRS))


def classical_forward(x: Sequence[float], w: Sequence[float], b: float) -> float:
    """``ReLU(x . w + b)``."""
    if len(x) != len(w):
        raise ConfigurationError(f"{len(x)} inputs but {len(w)} weights")
    return relu_readout(math.fsum(xi * wi for xi, wi in zip(x, w)) + b)


@dataclass(frozen=True)
class RowResult:
    inputs: tuple[int, int]
    label: int
    readout: GaussianMixture
    p_err: float

    @property
    def mean(self) -> float:
        return self.readout.mean()

    @property
    def std(self) -> float:
        return math.sqrt(self.readout.variance())

    def to_dict(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "label": self.label,
            "readout_mean": self.mean,
            "readout_std": self.std,
            "components": [
                {"weight": w, "mean": m, "std": s} for w, m, s in self.readout.components
            ],
            "p_err": self.p_err,
        }


@dataclass(frozen=True)
class ExperimentReport:
    """Per-row misclassification probabilities of one encoding."""

    task: str
    encoding: str
    delta: float
    displacement: float
    etas: tuple[float, ...]
    bias: float
    energy_total: float
    rows: tuple[RowResult, ...]

    @property
    def squeezing(self) -> float:
        return 0.0 - math.log(self.delta)

    @property
    def p_errs(self) -> list[float]:
        return [r.p_err for r in self.rows]

    @property
    def worst_p_err(self) -> float:
        return max(self.p_errs)

    @property
    def accuracy(self) -> float:
        """Expected success rate with the four inputs equally likely."""
        return 1.0 - sum(self.p_errs) / len(self.rows)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "encoding": self.encoding,
            "delta": self.delta,
            "r": self.squeezing,
            "displacement": self.displacement,
            "etas": list(self.etas),
            "bias": self.bias,
            "energy_total": self.energy_total,
            "rows": [r.to_dict() for r in self.rows],
            "worst_p_err": self.worst_p_err,
            "accuracy": self.accuracy,
        }


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not (delta > 0.0 and math.isfinite(delta)):
        raise InvalidWidthError(f"width must be positive and finite, got {delta!r}")
    return delta


def run_and(
    delta: float,
    etas: tuple[float, float] = (1.0, 1.0),
    bias: float = -1.0,
    displacement: float = 1.0,
    table: TruthTable = AND_TABLE,
) -> ExperimentReport:
    """Product-state perceptron on a truth table (AND by default).

    Each logical input ``s`` is encoded as ``|s * displacement, delta>``.
    """
    delta = _check_delta(delta)
    config = PerceptronConfig(tuple(etas), bias)
    rows = []
    for inputs, label in table.rows:
        state = ProductGaussianState.encode([displacement * s for s in inputs], delta)
        readout = GaussianMixture.from_mode(affine_readout(state, config))
        rows.append(RowResult(inputs, label, readout, prob_error(readout, Polarity.from_label(label))))
    energy = 2.0 * mode_energy(displacement, delta)
    return ExperimentReport(
        table.name, "product", delta, float(displacement), config.etas, config.bias, energy, tuple(rows)
    )


def run_xor(
    delta: float,
    etas: tuple[float, float] = (1.0, -1.0),
    bias: float = -1.0,
    displacement: float = 1.0,
    table: TruthTable = XOR_TABLE,
) -> ExperimentReport:
    """Superposed-input perceptron on XOR.

    Each row ``(s1, s2)`` is fed as the symmetric superposition of
    ``|s1 d, s2 d>`` and ``|s2 d, s1 d>``.  The reported energy is that of the
    underlying two-mode product encoding, matching how the trade-off
    surfaces are parametrised.
    """
    delta = _check_delta(delta)
    config = PerceptronConfig(tuple(etas), bias)
    rows = []
    for (s1, s2), label in table.rows:
        state = symmetric_superposition(displacement * s1, displacement * s2, delta)
        readout = readout_mixture(state, config)
        rows.append(RowResult((s1, s2), label, readout, prob_error(readout, Polarity.from_label(label))))
    energy = 2.0 * mode_energy(displacement, delta)
    return ExperimentReport(
        table.name, "superposition", delta, float(displacement), config.etas, config.bias, energy, tuple(rows)
    )


# ---------------------------------------------------------------------------
# training


@dataclass(frozen=True)
class TrainConfig:
    """Plain gradient descent with weights clamped to ``[-clamp, clamp]``.

    A zero learning rate is allowed and leaves the starting point untouched.
    """

    learning_rate: float = 2.0
    max_iter: int = 2000
    tol: float = 1e-7
    restarts: int = 4
    fd_step: float = 1e-5
    clamp: float = 1.0

    def __post_init__(self):
        if not (self.learning_rate >= 0.0 and math.isfinite(self.learning_rate)):
            raise ConfigurationError(f"learning rate must be >= 0, got {self.learning_rate!r}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be positive, got {self.max_iter!r}")
        if not self.tol > 0.0:
            raise ConfigurationError(f"tol must be positive, got {self.tol!r}")
        if self.restarts < 0:
            raise ConfigurationError(f"restarts must be non-negative, got {self.restarts!r}")
        if not self.fd_step > 0.0:
            raise ConfigurationError(f"fd_step must be positive, got {self.fd_step!r}")
        if not 0.0 < self.clamp <= 1.0:
            raise ConfigurationError(f"clamp must lie in (0, 1], got {self.clamp!r}")


@dataclass
class TrainResult:
    etas: tuple[float, float]
    bias: float
    loss: float
    loss_trace: list[float]
    converged: bool
    iterations: int
    gradient_check: float
    row_p_errs: list[float] = field(default_factory=list)

    @property
    def worst_p_err(self) -> float:
        return max(self.row_p_errs)

    def to_dict(self) -> dict:
        return {
            "etas": list(self.etas),
            "bias": self.bias,
            "loss": self.loss,
            "worst_p_err": self.worst_p_err,
            "row_p_errs": self.row_p_errs,
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_check": self.gradient_check,
            "loss_trace": self.loss_trace,
        }


def _row_terms(params, table: TruthTable, delta: float):
    params = np.asarray(params, dtype=float)
    etas, bias = params[:-1], params[-1]
    x = table.inputs
    mu = x @ etas + bias
    sigma = max(math.sqrt(float(np.sum(etas**2)) * delta * delta / 2.0), 1e-300)
    # label 0 errs on y > 0: Phi(mu/sigma); label 1 errs on y <= 0: Phi(-mu/sigma)
    sign = np.where(table.labels == 0, 1.0, -1.0)
    return x, etas, mu, sigma, sign


def row_errors(params, table: TruthTable, delta: float) -> np.ndarray:
    """Per-row error probabilities of the product encoding at ``(eta1, eta2, b)``."""
    _, _, mu, sigma, sign = _row_terms(params, table, delta)
    return ndtr(sign * mu / sigma)


def training_loss(params, table: TruthTable, delta: float) -> float:
    """Mean misclassification probability over the table rows."""
    return float(np.mean(row_errors(params, table, delta)))


def loss_gradient(params, table: TruthTable, delta: float) -> np.ndarray:
    """Analytic gradient of :func:`training_loss` with respect to ``(eta1, eta2, b)``."""
    x, etas, mu, sigma, sign = _row_terms(params, table, delta)
    z = sign * mu / sigma
    pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    dsigma = np.append(etas * delta * delta / (2.0 * sigma), 0.0)
    dmu = np.hstack([x, np.ones((len(x), 1))])
    dz = sign[:, None] * (dmu * sigma - mu[:, None] * dsigma[None, :]) / sigma**2
    return (pdf[:, None] * dz).mean(axis=0)


def finite_difference_gradient(params, table: TruthTable, delta: float, step: float = 1e-5) -> np.ndarray:
    """Central differences of :func:`training_loss`, taken row by row.

    Each row is differenced on the smaller of its two tails, in the log
    domain: ``d Phi(z) = Phi(z) * d log Phi(z)``, and a row whose error
    exceeds 1/2 uses ``Phi(z) = 1 - Phi(-z)``.  Deep in the tails the loss
    is flat to double precision and ``Phi`` is strongly curved, while
    ``log Phi`` stays close to linear, so this keeps the difference quotient
    accurate everywhere.
    """
    params = np.asarray(params, dtype=float)
    _, _, mu, sigma, sign = _row_terms(params, table, delta)
    z0 = sign * mu / sigma
    orient = np.where(z0 > 0.0, -1.0, 1.0)
    scale = orient * ndtr(orient * z0)

    def log_tail(p):
        _, _, m, s, sg = _row_terms(p, table, delta)
        return log_ndtr(orient * sg * m / s)

    grad = np.empty_like(params)
    for k in range(len(params)):
        e = np.zeros_like(params)
        e[k] = step
        grad[k] = np.mean(scale * (log_tail(params + e) - log_tail(params - e))) / (2.0 * step)
    return grad


def relative_gap(a, b) -> float:
    """``|a - b| / |b|``, defined as 0 when both vanish."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    diff = np.linalg.norm(a - b)
    scale = np.linalg.norm(b)
    if scale == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return float(diff / scale)


def _descend(start, table, delta, cfg: TrainConfig):
    params = np.array(start, dtype=float)
    trace = [training_loss(params, table, delta)]
    best = (trace[0], params.copy())
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        grad = finite_difference_gradient(params, table, delta, cfg.fd_step)
        if np.linalg.norm(grad) < cfg.tol:
            converged = cfg.learning_rate > 0.0
            it -= 1
            break
        # halve the step until the loss does not increase; a saturated region can
        # otherwise swallow the iterate where the gradient is numerically zero
        step = cfg.learning_rate
        while True:
            trial = params - step * grad
            trial[:-1] = np.clip(trial[:-1], -cfg.clamp, cfg.clamp)
            loss = training_loss(trial, table, delta)
            if loss <= trace[-1] or step < cfg.learning_rate * 2.0**-30:
                break
            step *= 0.5
        params = trial
        trace.append(loss)
        if loss < best[0]:
            best = (loss, params.copy())
    return best, trace, converged, it


def train_weights(
    table: TruthTable,
    delta: float,
    cfg: TrainConfig = TrainConfig(),
    seed: int = 0,
    init: Sequence[float] | None = None,
) -> TrainResult:
    """Fit ``(eta1, eta2, b)`` by gradient descent on the mean error probability.

    The loss uses the product encoding.  Gradients are central finite
    differences; the analytic gradient is compared against them at every
    starting point and the worst relative gap is reported as
    ``gradient_check``.  ``init`` (if given) is the first start, followed by
    ``cfg.restarts`` random starts drawn from ``default_rng(seed)``.  The
    best point over all runs is returned; ``converged`` is False when that
    run hit ``max_iter`` without the gradient norm dropping below ``tol``.
    """
    delta = _check_delta(delta)
    rng = np.random.default_rng(seed)
    starts = [] if init is None else [np.asarray(init, dtype=float)]
    n_random = cfg.restarts + (1 if init is None else 0)
    for _ in range(n_random):
        starts.append(np.append(rng.uniform(-cfg.clamp, cfg.clamp, 2), rng.uniform(-2.0, 2.0)))

    best = None
    check = 0.0
    for start in starts:
        check = max(
            check,
            relative_gap(finite_difference_gradient(start, table, delta, cfg.fd_step), loss_gradient(start, table, delta)),
        )
        (loss, params), trace, converged, iters = _descend(start, table, delta, cfg)
        if best is None or loss < best[0]:
            best = (loss, params, trace, converged, iters)
    loss, params, trace, converged, iters = best
    return TrainResult(
        etas=(float(params[0]), float(params[1])),
        bias=float(params[2]),
        loss=loss,
        loss_trace=trace,
        converged=converged,
        iterations=iters,
        gradient_check=check,
        row_p_errs=[float(p) for p in row_errors(params, table, delta)],
    )


def product_encoding_floor(
    table: TruthTable,
    delta: float,
    n_eta: int = 81,
    n_bias: int = 121,
    bias_range: tuple[float, float] = (-3.0, 3.0),
) -> tuple[float, tuple[float, float, float]]:
    """Smallest mean error over a dense ``(eta1, eta2, b)`` sweep.

    Points with ``eta1 = eta2 = 0`` are skipped.  Returns the minimum and its
    parameters.
    """
    delta = _check_delta(delta)
    e = np.linspace(-1.0, 1.0, n_eta)
    b = np.linspace(bias_range[0], bias_range[1], n_bias)
    E1, E2, B = np.meshgrid(e, e, b, indexing="ij")
    sigma = np.sqrt((E1**2 + E2**2) * delta * delta / 2.0)
    valid = sigma > 0
    sigma = np.where(valid, sigma, 1.0)
    total = np.zeros_like(E1)
    for (s1, s2), label in table.rows:
        mu = s1 * E1 + s2 * E2 + B
        sign = 1.0 if label == 0 else -1.0
        total += ndtr(sign * mu / sigma)
    mean = np.where(valid, total / len(table.rows), np.inf)
    k = np.unravel_index(np.argmin(mean), mean.shape)
    return float(mean[k]), (float(E1[k]), float(E2[k]), float(B[k]))
