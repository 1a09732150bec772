"""Hermite cubic collocation on a 1D mesh.

The spline space holds C^1 piecewise cubics vanishing at both ends.  Each
node carries a value and a slope coefficient; the boundary values are
dropped, which leaves 2N unknowns on N elements.  Collocating at the two
Gauss points of every element gives square matrices B (values) and A
(negated second derivatives) with an almost block diagonal pattern.
"""

import numpy as np

from fracwave import HermiteBasis1D, assemble_matrices, gauss_rule, uniform_partition
from fracwave.abd import AbdMatrix, factor

rule = gauss_rule(2)
print("2-point Gauss rule on [0, 1]:", rule.nodes, rule.weights)

basis = HermiteBasis1D(uniform_partition(4))
print("dimension for N=4:", basis.dimension)

# x(1-x) lies in the space: its interpolant is exact, so -u'' = 2 at every Gauss point.
c = basis.interpolate(lambda x: x * (1 - x), lambda x: 1 - 2 * x)
m = assemble_matrices(basis)
print("A c at the Gauss points:", m.A @ c)

# Solve the two-point problem -u'' = pi^2 sin(pi x) by collocation with the ABD solver.
for n in (4, 8, 16):
    basis = HermiteBasis1D(uniform_partition(n))
    m = assemble_matrices(basis)
    rhs = np.pi**2 * np.sin(np.pi * m.points)
    coeffs = factor(AbdMatrix(m.tiles_a)).solve(rhs)
    x = np.linspace(0, 1, 401)
    err = np.abs(basis.evaluate(coeffs, x) - np.sin(np.pi * x)).max()
    print(f"N={n:3d}  max error {err:.3e}")
