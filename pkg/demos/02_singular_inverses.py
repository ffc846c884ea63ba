"""Inverses of filters whose symbol vanishes on the unit circle.

The difference filter delta - delta_{.-1} annihilates constants, so no
summable inverse exists; the causal representative is the unit step.
Squaring the filter gives the ramp g[k] = k + 1 and growth order 1.
"""

import numpy as np

from wienerlab import Filter, convolve, decay_fit, invert_singular_1d

diff = Filter((0,), np.array([1.0, -1.0]))

step = invert_singular_1d(diff, window_radius=20)
print("difference filter: inverse values", step.values[:8], "...")
print(f"growth order {step.growth_order}, residual {step.residual:.1e}")

ramp = invert_singular_1d(convolve(diff, diff), window_radius=20)
print("\nsquared difference: inverse values", ramp.values[:8], "...")
print(f"growth order {ramp.growth_order}, residual {ramp.residual:.1e}")

rep = decay_fit(ramp)
print(f"fitted growth model: {rep.model}, order {rep.order:.3f}")

# a mixed symbol: stable cubic times one unit factor
cubic = Filter((-1,), np.array([1.0, 4.0, 1.0]) / 6.0)
mixed = invert_singular_1d(convolve(cubic, diff), window_radius=30)
print(f"\ncubic times difference: growth order {mixed.growth_order}, "
      f"residual {mixed.residual:.1e}")
print("the inverse tends to the step height far to the right:",
      mixed.values[-3:])
