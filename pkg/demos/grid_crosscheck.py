"""
Checking the closed forms on a grid
===================================

The readout statistics used everywhere else are derived analytically.  Here
the two-mode wavefunction is tabulated on a 2048 x 2048 grid instead, pushed
through the exact coordinate map y = eta1 q1 + eta2 q2 + b and binned.  The
histogram should match the analytic density bin for bin.
"""

import math

from cvqp import GaussianMixture, PerceptronConfig, ProductGaussianState, affine_readout
from cvqp import symmetric_superposition, xor_homodyne_mixture
from cvqp.oracle import GridSpec, build_wavefunction, oracle_readout_distribution

spec = GridSpec(half_extent=12.0, points=2048)

# %%
# A product state with unequal widths and mixed-sign weights.
state = ProductGaussianState.encode((0.7, -1.2), (0.8, math.exp(-1)))
config = PerceptronConfig((0.6, -0.9), 0.25)
hist = oracle_readout_distribution(build_wavefunction(state, spec), config.etas, config.bias)
closed = GaussianMixture.from_mode(affine_readout(state, config))
print("product       max density gap", f"{hist.max_deviation(closed):.2e}")

# %%
# The superposed XOR input.  The grid norm before renormalising tests the
# analytic normalisation constant.
state = symmetric_superposition(1.0, -1.0, math.exp(-1))
psi = build_wavefunction(state, spec)
hist = oracle_readout_distribution(psi, (1.0, -1.0), -1.0)
print("superposition max density gap", f"{hist.max_deviation(xor_homodyne_mixture(state, -1.0)):.2e}")
print("grid norm with analytic C    ", f"{psi.raw_norm:.12f}")
