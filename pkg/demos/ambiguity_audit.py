"""
Which frequency pairs confuse which channel pair
================================================

Two tones whose spacing is an integer multiple of fH/(a*b) produce integer
right-hand sides for the cross pairs of the (a, b) matcher, so matching on
that channel pair alone returns spurious frequencies. With pairwise-coprime
a, b, c no spacing below fH can do this on all three channel pairs at once.
"""
# %%
import numpy as np

from subnyq import audit_ambiguity, bezout_match, unfold
from subnyq.model import fold_down

fH, factors = 60.0, (3, 4, 5)
freqs = [25.0, 50.0]

for c in audit_ambiguity(freqs, factors, fH).conflicts:
    print(f"{freqs[c.pair[0]]} and {freqs[c.pair[1]]} Hz conflict on channels {c.channel_pair}, "
          f"spacing = {c.multiple} * fH/{c.channel_pair[0] * c.channel_pair[1]}")

# %%
# Closed-form matching on each channel pair.
sets = {x: unfold(np.sort(fold_down(freqs, x, fH)), x, fH) for x in factors}
for x, y in [(3, 4), (3, 5), (4, 5)]:
    rep = bezout_match(sets[x], sets[y])
    print(f"({x},{y}) matches: {sorted(np.round(rep.freqs, 6))}")

# %%
# Exhaustive check on a 0.5 Hz grid: no pair conflicts everywhere at once.
grid = np.arange(0, fH, 0.5)
rep = audit_ambiguity(grid, factors, fH)
print(f"{len(rep.conflicts)} pairwise conflicts, {len(rep.simultaneous)} simultaneous")
