"""The L1 formula for a Caputo derivative of order 1 < alpha < 2.

The Caputo derivative is a weighted memory integral of u''.  The L1 formula
replaces u' by piecewise constant difference quotients, which produces the
decreasing weights b_j = (j+1)^(2-alpha) - j^(2-alpha).  Every step needs the
whole history, weighted by d_j = b_{n-j-1} - b_{n-j}.
"""

import math

import numpy as np

from fracwave import build_weights, l1_caputo_apply

alpha = 1.5
w = build_weights(alpha, dt=0.1, steps=10)
print("b_0..b_4:", w.b[:5])
print("mu = Gamma(3-alpha) dt^alpha:", w.mu)
d, tail = w.history_weights(5)
print("history weights at step 5:", d, "tail:", tail, "sum:", d.sum() + tail)

# Accuracy at the half step t_{n-1/2} for v(t) = t^2, whose Caputo derivative is 2 t^(2-alpha) / Gamma(3-alpha).
print("\n dt        error     observed order")
prev = None
for steps in (25, 50, 100, 200, 400):
    dt = 0.5 / steps
    t = np.arange(steps + 1) * dt
    approx = l1_caputo_apply(build_weights(alpha, dt, steps), t**2, 0.0)
    exact = 2 / math.gamma(3 - alpha) * (0.5 - dt / 2) ** (2 - alpha)
    err = abs(approx - exact)
    order = "" if prev is None else f"{math.log2(prev / err):.3f}"
    print(f"{dt:.5f}  {err:.3e}  {order}")
    prev = err
print("guaranteed order 3 - alpha =", 3 - alpha, "(t^2 is smooth enough to do better)")
