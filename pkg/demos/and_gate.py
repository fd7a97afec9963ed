"""
An AND gate from squeezed light
===============================

Each logical input (-1 or +1) is stored as the centre of a displaced,
squeezed Gaussian wavepacket.  Attenuators scale the packets, controlled
additions sum them onto the last mode, a displacement adds the bias and a
homodyne measurement thresholded at zero reads out the answer.
"""

import math

from cvqp import (
    PerceptronConfig,
    Polarity,
    ProductGaussianState,
    affine_readout,
    prob_error,
    run_and,
)

# %%
# One input row by hand.  Both inputs are +1, the weights are 1 and the bias
# is -1, so the readout is centred at +1.  Its envelope width grows as the
# root of the summed squared widths.
state = ProductGaussianState.encode((1.0, 1.0), deltas=1.0)
readout = affine_readout(state, PerceptronConfig(etas=(1.0, 1.0), bias=-1.0))
print("centre", readout.center, "width", round(readout.width, 4), "std", round(readout.std, 4))

# the label is 1, so the answer is wrong whenever the outcome lands at y <= 0
print("error", prob_error(readout, Polarity.POSITIVE))

# %%
# The whole truth table, without squeezing (r = 0) and with r = 1.
for r in (0.0, 1.0):
    report = run_and(math.exp(-r))
    cells = ", ".join(f"{100 * p:.3g}%" for p in report.p_errs)
    print(f"r={r:g}  E_tot={report.energy_total:.3f}  errors: {cells}")

# %%
# The same energy can buy displacement instead of squeezing.  Coherent
# states at |x| = 2 with bias -2 cost exactly 4 photons, slightly more than
# the squeezed encoding above, yet their worst row is about seven times worse.
coherent = run_and(1.0, bias=-2.0, displacement=2.0)
print(f"coherent: E_tot={coherent.energy_total:g}  worst error {100 * coherent.worst_p_err:.3f}%")
