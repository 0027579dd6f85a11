"""Inside a gated diffusive unit (GDU).

A GDU merges three signals per node -- a residual input x, the diffused
neighborhood state z, and the previous hidden state h -- through sigmoid
gates, and squashes the result with tanh.  The full variant selects among
four gated branches; the simplified variant uses a single gate and roughly
halves the parameter count.
"""

import numpy as np

from difnet.gdu import (GduParamsFull, GduParamsSimplified, gate_values,
                        gdu_full, gdu_simplified)
from difnet.tensor import Tensor

rng = np.random.Generator(np.random.Philox(2))
d = 4
x = Tensor(rng.normal(size=(3, d)))
z = Tensor(rng.normal(size=(3, d)))
h = Tensor(rng.normal(size=(3, d)))

full = GduParamsFull.init(d, rng)
simple = GduParamsSimplified.init(d, rng)

out_full = gdu_full(full, x, z, h).data
out_simple = gdu_simplified(simple, x, z, h).data
print("full GDU output:\n", np.round(out_full, 3))
print("simplified GDU output:\n", np.round(out_simple, 3))
assert (np.abs(out_full) < 1.0).all() and (np.abs(out_simple) < 1.0).all()
print("outputs stay inside (-1, 1) -- the tanh squash prevents blow-up")

# The gates are probabilities: f and e rescale z and h, g and r mix branches.
gates = gate_values(full, x, z, h)
for name, value in gates.items():
    assert (value > 0).all() and (value < 1).all()
    print(f"gate {name}: mean {value.mean():.3f}")

n_full = sum(w.data.size for w in (full.w_f, full.w_e, full.w_u, full.w_g, full.w_r))
n_simple = sum(w.data.size for w in (simple.w_f, simple.w_e, simple.w_u,
                                     simple.w_g, simple.w_res))
print(f"parameters per layer: full {n_full}, simplified {n_simple}")
