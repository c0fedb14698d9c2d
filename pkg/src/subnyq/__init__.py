"""Frequency estimation of multiple complex sinusoids from three sub-Nyquist channels.

Each channel samples the band-limited signal at fH/a for a pairwise-coprime
factor a. ESPRIT on one channel gives the folded frequencies, these are
unfolded into eligible candidates, and the two other channels screen the
candidates with a MUSIC-like pseudo-spectrum.
"""

__version__ = "0.1.0"

from .model import ChannelConfig, ChannelSequence, SignalSpec, Sinusoid, synthesize, synthesize_multichannel
from .subspace import esprit, fold_to_hertz
from .unfold import audit_ambiguity, bezout_match, unfold
from .screen import pseudo_spectrum, run_pipeline, steering
from .harness import ExperimentConfig, mse_metric, run_mse_sweep, run_scenario, run_success_sweep

__all__ = [
    "ChannelConfig", "ChannelSequence", "SignalSpec", "Sinusoid", "synthesize", "synthesize_multichannel",
    "esprit", "fold_to_hertz", "audit_ambiguity", "bezout_match", "unfold",
    "pseudo_spectrum", "run_pipeline", "steering",
    "ExperimentConfig", "mse_metric", "run_mse_sweep", "run_scenario", "run_success_sweep",
]
