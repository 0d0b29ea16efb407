"""A single overloaded tick, scored two ways.

Wellbeing drops by 0.3 after a 60 s wait while fatigue is at its maximum.
An outcome-only reward punishes the tick, so the update shrinks the fatigue
weight and the policy learns to wait less when tired. The interval-aware
reward pays a spacing bonus for having waited, so the same tick now pushes
the fatigue weight up. Repeating the tick 100 times shows where each signal
leads.
"""

from dataclasses import replace

from atcpg.policy import PolicyConfig, PolicyWeights, TickContext, predict_interval, update_weights
from atcpg.reward import interval_aware_reward, naive_reward

cfg = PolicyConfig()
tired = TickContext(fatigue=5.0)
w0 = PolicyWeights(bias=60.0, w_priority=0, w_fatigue=30.0, w_wellbeing=0, w_performance=0,
                   w_phase=0, w_kappa=0)

r_naive = 2 * -0.3  # latency term left out, as in the hand calculation
br = interval_aware_reward(-0.3, kappa=0.0, dt=60.0, dt_base=60.0)
print(f"naive reward            {r_naive:+.3f}  (with 200 ms latency: {naive_reward(-0.3, 200.0):+.4f})")
print(f"interval-aware reward   {br.total:+.3f}  = {br.efficiency_term:+.3f} efficiency "
      f"{br.spacing_term:+.3f} spacing {br.spread_term:+.3f} spread")
print(f"fatigue weight after one naive update   {update_weights(w0, r_naive, tired, cfg).w_fatigue:.2f}")
print(f"fatigue weight after one aware update   {update_weights(w0, br.total, tired, cfg).w_fatigue:.2f}")
print(f"interval at w_fatigue = 29.7            {predict_interval(replace(w0, w_fatigue=29.7), tired, cfg):.1f} s")

w_naive = w_aware = w0
for tick in range(1, 101):
    w_naive = update_weights(w_naive, r_naive, tired, cfg)
    dt = predict_interval(w_aware, tired, cfg)
    w_aware = update_weights(w_aware, interval_aware_reward(-0.3, 0.0, dt, 60.0).total, tired, cfg)
    if tick in (1, 10, 50, 100):
        print(f"tick {tick:3d}: naive w_fatigue {w_naive.w_fatigue:7.2f}   aware w_fatigue {w_aware.w_fatigue:7.2f}"
              f"   aware interval {predict_interval(w_aware, tired, cfg):6.1f} s")
