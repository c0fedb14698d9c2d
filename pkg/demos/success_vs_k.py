"""
Success rate against the number of tones
========================================

Random tones in (0, 100) Hz with fH = 100 Hz, spacing above 0.1 Hz, amplitudes
in [0.1, 1], SNR 20 dB, channels fH/7, fH/8, fH/9 with 100 snapshots each.
A trial succeeds when sqrt(sum of squared errors)/K < 0.05 Hz. The baseline
runs ESPRIT on one channel sampled at fH.

Set TRIALS = 500 for the full-size run.
"""
# %%
from subnyq import ExperimentConfig, run_success_sweep
from subnyq.harness import success_csv

TRIALS = 100

cfg = ExperimentConfig(num_trials=TRIALS, seed=0)
rows = run_success_sweep(cfg, progress=print)
print(success_csv(rows))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    K = [r.K for r in rows]
    plt.plot(K, [r.success_proposed for r in rows], "o-", label="three sub-Nyquist channels")
    plt.plot(K, [r.success_baseline for r in rows], "s--", label="ESPRIT at fH")
    plt.xlabel("K")
    plt.ylabel("success probability")
    plt.legend()
    plt.savefig("success_vs_k.png", dpi=120)
