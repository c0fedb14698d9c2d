"""
Screening eligible frequencies with a second channel
=====================================================

Two tones at 25 and 50 Hz, band limit fH = 60 Hz, three channels sampled at
fH/3, fH/4 and fH/5. ESPRIT on one channel only sees the folded frequencies;
unfolding gives every frequency that could have produced them, and another
channel's noise subspace scores each candidate.
"""
# %%
import numpy as np

from subnyq import SignalSpec, run_scenario

spec = SignalSpec.from_arrays([25.0, 50.0], fH=60.0)
res = run_scenario(spec, factors=(3, 4, 5))

# %%
# Candidates unfolded from the fH/3 channel are 5, 25, 45, 10, 30, 50 Hz.
# Screening them with the fH/4 channel cannot tell 5 and 10 Hz from the true
# tones: the spacing 25 Hz is 5 * fH/(3*4), so the false pair aliases exactly
# onto the true pair there. The fH/5 channel has no such coincidence.

for (x, y), ps in res.pair_spectra.items():
    print(f"\nunfold fH/{x}, screen with fH/{y}")
    for f, v in sorted(zip(ps.freqs, ps.normalized)):
        print(f"  {f:6.2f} Hz   {v:9.3g}")

# %%
# The pipeline combines both screening channels and recovers the truth.
print("\nestimate:", res.pipeline.final_freqs)

# %%
# Optional plot, one panel per channel pair.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, axes = plt.subplots(3, 1, figsize=(6, 7), sharex=True)
    for ax, ((x, y), ps) in zip(axes, res.pair_spectra.items()):
        ax.stem(ps.freqs, 10 * np.log10(ps.normalized))
        ax.set_ylabel("dB")
        ax.set_title(f"S(fH/{x}) unfolded, screened by S(fH/{y})")
    axes[-1].set_xlabel("eligible frequency (Hz)")
    fig.tight_layout()
    fig.savefig("eligible_spectra.png", dpi=120)
