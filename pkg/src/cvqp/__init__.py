"""Continuous-variable quantum perceptron simulator.

Inputs are encoded in displaced-squeezed Gaussian states, combined by
squeezing attenuators, controlled additions and a bias displacement, and
read out with a threshold homodyne measurement that realises a ReLU.
"""

from .energy import (
    EnergyBudget,
    TradeoffSurface,
    and_surface,
    mode_energy,
    width_from_budget,
    xor_surface,
)
from .errors import (
    ConfigurationError,
    CoverageError,
    CVQPError,
    InfeasibleBudgetError,
    InvalidWeightError,
    InvalidWidthError,
)
from .gaussian import (
    GaussianMode,
    PerceptronConfig,
    ProductGaussianState,
    affine_readout,
    attenuate,
    encode_mode,
    homodyne_density,
)
from .measurement import (
    OutcomeSample,
    Polarity,
    ShotBatch,
    log_prob_error,
    prob_error,
    relu_readout,
    sample_outcomes,
)
from .perceptron import (
    AND_TABLE,
    XOR_TABLE,
    ExperimentReport,
    TrainConfig,
    TrainResult,
    TruthTable,
    classical_forward,
    product_encoding_floor,
    run_and,
    run_xor,
    train_weights,
)
from .superposition import (
    GaussianMixture,
    SuperposedGaussianState,
    gaussian_overlap,
    readout_mixture,
    symmetric_superposition,
    xor_homodyne_mixture,
)

__version__ = "0.1.0"
