"""A tour of the 2-D reverse-mode autodiff core.

Every value is a Tensor wrapping a float64 matrix.  Operations record their
inputs, so calling .backward() on a 1x1 result fills .grad on everything
that fed into it.  Shapes must match exactly -- there is no broadcasting.
"""

import numpy as np

from difnet.tensor import (Tensor, grad_check, matmul, mul, sigmoid, sum_all,
                           tanh, zero_grads)

rng = np.random.Generator(np.random.Philox(0))

# Build a tiny expression: loss = sum(tanh(A @ B) * C)
a = Tensor(rng.normal(size=(3, 2)), requires_grad=True)
b = Tensor(rng.normal(size=(2, 4)), requires_grad=True)
c = Tensor(rng.normal(size=(3, 4)))

loss = sum_all(mul(tanh(matmul(a, b)), c))
print(f"loss = {loss.item():.6f}")

loss.backward()
print("dL/dA:\n", a.grad)
print("dL/dB:\n", b.grad)

# Gradients accumulate across backward calls; zero_grads resets them.
first = a.grad.copy()
loss.backward()
assert np.allclose(a.grad, 2 * first)
zero_grads([a, b])
assert a.grad is None

# grad_check compares analytic gradients against central finite differences
# and returns the worst relative error over all parameters.
a2 = Tensor(rng.normal(size=(3, 3)), requires_grad=True)
err = grad_check(lambda: sum_all(sigmoid(matmul(a2, a2))), [a2])
print(f"finite-difference relative error: {err:.2e}")
assert err < 1e-6
