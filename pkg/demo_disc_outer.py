#%%[markdown]
# # Disc Outer Functions Demo
#
# This demo builds outer functions on the unit disc from a boundary modulus,
# measures their mean oscillation on arcs at 1 and reads off the decay exponent.

#%%[markdown]
# ## Building an Outer Function
#
# A modulus profile is made by family name. The `power` family is `|1 - e^{it}|^beta`,
# whose outer function is `(1 - z)^beta`, so the quadrature can be compared with a closed form.

#%%
import numpy as np

from outerlab import DiscOuterEvaluator, list_families, make_modulus

print(list_families())

psi = make_modulus("power", {"beta": 0.5})
outer = DiscOuterEvaluator(psi)
z = np.array([0.3, 0.5j, 0.9 * np.exp(0.5j)])
print(outer.evaluate(z))
print((1 - z) ** 0.5)

#%%[markdown]
# ## Mean Oscillation on Arcs
#
# `oscillation_profile` samples the function on shrinking nonisotropic balls around 1
# (arcs, on the circle) and reports the mean distance to the geometric median.
# Every radius draws from its own seeded substream.

#%%
from outerlab import SeededSampler, SpherePoint, fit_exponent, oscillation_profile

radii = [2.0 ** -k for k in range(3, 11)]
profile = oscillation_profile(outer, SpherePoint.one(1), radii, count="auto", sampler=SeededSampler(7))
for estimate in profile:
    print(f"r={estimate.radius:.2e}  nu={estimate.nu:.4e}  se={estimate.standard_error:.1e}")

#%%
fit = fit_exponent(profile)
print(f"slope {fit.slope:.3f} +/- {fit.confidence_halfwidth:.3f}  (R^2 = {fit.r_squared:.4f})")

#%%[markdown]
# ## Hoelder Cusps
#
# For a modulus that is only Hoelder at 1 the guaranteed exponent is half the Hoelder exponent.
# A scenario line runs the same measurement and judges it against that prediction.

#%%
from outerlab import parse_scenario, run_scenario

report = run_scenario(parse_scenario("scenario cusp[tag:A][family:holder_cusp][alpha:0.5]"))
print(report.predicted, report.measured, report.verdict)

#%%[markdown]
# ## Poisson Kernel Growth
#
# `||P_r||_q^q` grows like `(1 - r)^(1 - q)`; the fitted exponent is checked two-sided.

#%%
from outerlab import poisson_lq_scaling

for q in (1.5, 2.0, 3.0):
    growth = poisson_lq_scaling(q, [1 - 2.0 ** -k for k in range(3, 11)])
    print(q, round(growth.slope, 4))
