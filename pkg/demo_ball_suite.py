#%%[markdown]
# # Ball Outer Functions and the Verification Suite
#
# This demo moves to the unit ball of C^2: lifted outer functions, Monte-Carlo evaluation
# of the ball outer function, the constants that enter the exponent bounds and finally
# the shipped verification suite.

#%%[markdown]
# ## Lifted Profiles
#
# A modulus that depends on the first coordinate only is a lift of a disc modulus.
# Its outer function is the disc outer function of the first coordinate, which is
# much cheaper than the Monte-Carlo route.

#%%
import numpy as np

from outerlab import BallOuterEvaluator, SeededSampler, ball_outer_from_lift, make_modulus

phi = make_modulus("power", {"beta": 0.5}, n=2)
lifted = ball_outer_from_lift(phi)
z = np.array([[0.4, 0.2j]])
print(lifted(z))

#%%
mc = BallOuterEvaluator(phi, mc_count=50_000, sampler=SeededSampler(3))
value = mc.evaluate(z[0])
print(value.value, "+/-", value.se_real, value.se_imag)

#%%[markdown]
# ## Norm and Slice Constants
#
# `log_lp_norm` estimates `||log phi||_p` on the sphere, `slice_constant` the supremum of the
# slice integrals of `|log phi|` over complex lines through the origin.

#%%
from outerlab import log_lp_norm, slice_constant

print(log_lp_norm(phi, 4.0, 20_000, SeededSampler(4)))
slices = slice_constant(phi, directions=16, angles=1024, sampler=SeededSampler(5))
print(slices.value, slices.worst_direction)

#%%[markdown]
# ## The Suite
#
# The shipped suite holds one scenario per theorem and auxiliary check.
# The negative control carries a wrong prediction and must come back as a violation.

#%%
from outerlab import run_suite
from outerlab.data import get_config_path

control = run_suite(config=get_config_path("negative_control.cfg"))
print(control.summary)
print("exit code:", control.exit_code)

#%%
result = run_suite(config=get_config_path("default_suite.cfg"), threads=4)
print(result.summary)
