"""
Interval stabbing on a line and on a circle
===========================================

The search stages all reduce to one primitive: find the point covered by the
most intervals.
"""

import numpy as np

from herereg.stabbing import Interval, stab_circular, stab_linear

# %%
# Three intervals on the line; the first two overlap on [1, 2].
res = stab_linear([Interval(0, 2, 0), Interval(1, 3, 1), Interval(5, 6, 2)])
print(res.count, res.stabber, sorted(res.stabbed))

# %%
# On the circle an arc may run through zero.  ``(5.5, 0.5)`` is such an arc;
# internally it is split at the seam but still counts once.
arcs = [(5.5, 0.5), (0.2, 1.0), (6.0, 0.3)]
res = stab_circular(arcs)
print(res.count, round(res.stabber, 3), sorted(res.stabbed))

# %%
# Pieces sharing an owner are one vote, however many of them cover a point.
res = stab_linear([Interval(0, 4, 7), Interval(1, 2, 7), Interval(1.5, 3, 8)])
print(res.count, sorted(res.stabbed))

# %%
# Random arcs for a sense of scale.
rng = np.random.default_rng(0)
start = rng.uniform(0, 2 * np.pi, 10_000)
arcs = list(zip(start, (start + 0.3) % (2 * np.pi)))
print(stab_circular(arcs).count)
