"""Blind geometric spread against a controller that sees the load flag.

Both controllers replay one pre-drawn 500-tick trajectory, so every success
bit is shared and the efficiency gap comes only from interval choice. The
privileged spread separates overload from normal ticks far more sharply,
yet the blind one produces larger absolute spread values, and with a
negative spread weight that is what shortens intervals.

The second half adds positions to the imagined futures. When position noise
follows the hidden load, the joint embedding raises spread further; when it
follows an unrelated flag, the extra spread carries no information.
"""

from atcpg.pacing import run_headtohead, run_spatial_ablation

out = run_headtohead(seed=42, ticks=500)
print(f"{'':24}{'eta':>9}{'interval':>10}{'perf':>7}{'k_ol':>7}{'k_nol':>7}{'disc':>7}")
for label, (res, _) in out.items():
    print(f"{label:<24}{res.efficiency:9.4f}{res.mean_interval:10.1f}{res.performance_score:7.3f}"
          f"{res.kappa_mean_overload:7.2f}{res.kappa_mean_normal:7.2f}{res.kappa_discriminability:7.1f}")

print()
for mode in ("correlated", "decorrelated", "zero"):
    sp = run_spatial_ablation(seed=99, ticks=500, positions=mode)
    so, st = sp["ATCPG-SO"][0], sp["ATCPG-ST"][0]
    print(f"positions {mode:<13} SO eta {so.efficiency:.4f} kappa {so.kappa_mean:.2f} | "
          f"ST eta {st.efficiency:.4f} kappa {st.kappa_mean:.2f} (overload {st.kappa_mean_overload:.2f})")
