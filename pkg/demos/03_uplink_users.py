"""Uplink: many users sharing one frame, matched-filter detection.

At low SNR each user's matched filter collects the full channel energy while
the other users look like extra noise of roughly unit power each. Per-user
capacity therefore tracks the single-user ideal as long as the noise power
dominates the K interferers, and falls away as SNR rises.
"""

from cpdsss.harness import SweepConfig, run_sweep

cfg = SweepConfig(snr_db=(-35.0, -30.0, -25.0, -20.0, -15.0), k=(1, 8, 32), m=(1,),
                  direction=("ul",), csi_mode=("perfect",), trials=10, seed=3)
res = run_sweep(cfg)

print(f"{'SNR':>6} {'K':>3} {'per-user':>10} {'ideal':>10} {'ratio':>6}")
for a in res.aggregates:
    ratio = a["mean_capacity_bpcu"] / a["mean_ideal_bpcu"]
    print(f"{a['snr_db']:6.0f} {a['k']:3d} {a['mean_capacity_bpcu']:10.5f} {a['mean_ideal_bpcu']:10.5f} {ratio:6.3f}")
