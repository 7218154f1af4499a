"""
Outage capacity with imperfect feedback
=======================================

The low-SNR epsilon-outage capacity of one-relay incremental relaying is the
log term divided by the mean number of phases. Since that mean depends on
the rate through the direct-link failure probability, each value is a
fixed point solved by bisection.
"""

# %%
import numpy as np

from increlay import ChannelParams, baf_capacity, db_to_linear, df_capacity

params = ChannelParams(var_sd=1.0, var_sr=(1.0,), var_rd=(1.0,), snr=db_to_linear(-10))

print(" p    DF rate     BAF rate    E(N) DF")
for p in np.linspace(0, 1, 11):
    df = df_capacity(params, 0.01, p)
    baf = baf_capacity(params, 0.01, p)
    print(f"{p:4.1f}  {df.rate:.6f}   {baf.rate:.6f}   {df.expected_phases:.4f}")

# %%
# The rate lost relative to perfect feedback
# ------------------------------------------
perfect = df_capacity(params, 0.01, 1.0).rate
for p in (0.99, 0.9, 0.75, 0.5):
    print(p, f"{100 * (1 - df_capacity(params, 0.01, p).rate / perfect):.1f}% lower")
