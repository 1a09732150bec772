"""Piecewise Hermite cubics vanishing at 0 and 1, and their collocation matrices.

Degrees of freedom are ordered node by node, value then slope, with the two
boundary value DOFs removed::

    s_0, v_1, s_1, v_2, s_2, ..., v_{N-1}, s_{N-1}, s_N

so the space has dimension ``2N``.  Slope functions are scaled so that their
coefficient is the nodal first derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .mesh import GaussRule, Partition1D, composite_points, gauss_rule


def shape_functions(s, h, deriv: int = 0) -> np.ndarray:
    """Local Hermite cubic shape functions on an element of width ``h``.

    Returns an array of shape ``s.shape + (4,)`` ordered as
    (left value, left slope, right value, right slope).  Derivatives are with
    respect to the global coordinate.
    """
    s = np.asarray(s, dtype=float)
    h = np.asarray(h, dtype=float)
    s2 = s * s
    s3 = s2 * s
    if deriv == 0:
        cols = (1 - 3 * s2 + 2 * s3, h * (s - 2 * s2 + s3), 3 * s2 - 2 * s3, h * (s3 - s2))
    elif deriv == 1:
        cols = ((6 * s2 - 6 * s) / h, 1 - 4 * s + 3 * s2, (6 * s - 6 * s2) / h, 3 * s2 - 2 * s)
    elif deriv == 2:
        cols = ((12 * s - 6) / h**2, (6 * s - 4) / h, (6 - 12 * s) / h**2, (6 * s - 2) / h)
    else:
        raise ValueError(f"derivative order must be 0, 1 or 2, got {deriv}")
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


@dataclass(frozen=True)
class HermiteBasis1D:
    """Basis of the Dirichlet Hermite cubic space on a partition."""

    partition: Partition1D
    local_dofs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.partition.n_elements
        value = np.arange(n + 1) * 2 - 1
        value[0] = value[n] = -1
        slope = np.minimum(np.arange(n + 1) * 2, 2 * n - 1)
        k = np.arange(n)
        dofs = np.stack([value[k], slope[k], value[k + 1], slope[k + 1]], axis=1)
        dofs.setflags(write=False)
        object.__setattr__(self, "local_dofs", dofs)

    @property
    def n_elements(self) -> int:
        return self.partition.n_elements

    @property
    def dimension(self) -> int:
        return 2 * self.n_elements

    def value_dofs(self) -> np.ndarray:
        """Global index of the value DOF at each node (-1 on the boundary)."""
        n = self.n_elements
        idx = np.arange(n + 1) * 2 - 1
        idx[0] = idx[n] = -1
        return idx

    def slope_dofs(self) -> np.ndarray:
        n = self.n_elements
        return np.minimum(np.arange(n + 1) * 2, 2 * n - 1)

    def _local(self, x, deriv):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        k = self.partition.locate(x)
        x0 = self.partition.nodes[k]
        h = self.partition.element_widths[k]
        vals = shape_functions((x - x0) / h, h, deriv)
        return k, vals

    def eval_basis(self, x: float, deriv: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Global indices and values of the basis functions active at ``x``."""
        if not np.isscalar(x) and np.ndim(x) != 0:
            raise TypeError("eval_basis takes a single point; use basis_matrix for arrays")
        k, vals = self._local(x, deriv)
        dofs = self.local_dofs[k[0]]
        keep = dofs >= 0
        return dofs[keep], vals[0][keep]

    def basis_matrix(self, x, deriv: int = 0) -> sparse.csr_matrix:
        """Sparse ``len(x) x dimension`` matrix of basis derivatives at the points ``x``."""
        k, vals = self._local(x, deriv)
        dofs = self.local_dofs[k]
        keep = dofs >= 0
        rows = np.broadcast_to(np.arange(k.size)[:, None], dofs.shape)
        return sparse.csr_matrix(
            (vals[keep], (rows[keep], dofs[keep])), shape=(k.size, self.dimension)
        )

    def evaluate(self, coeffs, x, deriv: int = 0) -> np.ndarray:
        """Evaluate the spline with the given coefficients (1D) at ``x``."""
        return self.basis_matrix(x, deriv) @ np.asarray(coeffs, dtype=float)

    def interpolate(self, u, du) -> np.ndarray:
        """Coefficients of the Hermite interpolant of ``u`` (with derivative ``du``)."""
        x = self.partition.nodes
        c = np.zeros(self.dimension)
        vd = self.value_dofs()
        c[vd[1:-1]] = u(x[1:-1])
        c[self.slope_dofs()] = du(x)
        return c


def hermite_basis(partition: Partition1D) -> HermiteBasis1D:
    return HermiteBasis1D(partition)


@dataclass(frozen=True)
class CollocationMatrices:
    """Basis values ``B`` and negated second derivatives ``A`` at the Gauss points.

    ``tiles_b`` and ``tiles_a`` hold the per-element 2x4 blocks: rows are the
    two Gauss points of the element, columns its four local DOFs (zero where
    the DOF is a removed boundary value).
    """

    basis: HermiteBasis1D
    points: np.ndarray
    B: np.ndarray
    A: np.ndarray
    tiles_b: np.ndarray
    tiles_a: np.ndarray

    @property
    def size(self) -> int:
        return self.basis.dimension

    def tiles(self, mu: float) -> np.ndarray:
        """Element tiles of ``B + mu/2 A``."""
        return self.tiles_b + 0.5 * mu * self.tiles_a

    def operator(self, mu: float) -> np.ndarray:
        return self.B + 0.5 * mu * self.A


def assemble_matrices(basis: HermiteBasis1D, rule: GaussRule | None = None) -> CollocationMatrices:
    """Assemble the collocation matrices ``B = [chi_j(xi_i)]`` and ``A = [-chi_j''(xi_i)]``."""
    rule = gauss_rule(2) if rule is None else rule
    if rule.count != 2:
        raise ValueError("Hermite cubic collocation uses the 2-point Gauss rule")
    part = basis.partition
    n = part.n_elements
    h = part.element_widths
    vals = shape_functions(rule.nodes[None, :], h[:, None], 0)
    d2 = shape_functions(rule.nodes[None, :], h[:, None], 2)
    mask = (basis.local_dofs >= 0)[:, None, :]
    tiles_b = np.where(mask, vals, 0.0)
    tiles_a = np.where(mask, -d2, 0.0)

    m = basis.dimension
    B = np.zeros((m, m))
    A = np.zeros((m, m))
    for k in range(n):
        for local, dof in enumerate(basis.local_dofs[k]):
            if dof < 0:
                continue
            B[2 * k : 2 * k + 2, dof] = tiles_b[k, :, local]
            A[2 * k : 2 * k + 2, dof] = tiles_a[k, :, local]
    points, _ = composite_points(part, rule)
    for arr in (points, B, A, tiles_b, tiles_a):
        arr.setflags(write=False)
    return CollocationMatrices(basis, points, B, A, tiles_b, tiles_a)


def apply_tiles(tiles: np.ndarray, local_dofs: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Multiply a block-structured collocation matrix by ``coeffs`` along axis 0.

    The sum over the four local DOFs is taken in a fixed order so that the
    result does not depend on how ``coeffs`` columns are batched.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    padded = np.concatenate([coeffs, np.zeros((1,) + coeffs.shape[1:])], axis=0)
    gathered = padded[local_dofs]  # (N, 4, ...) ; index -1 hits the zero row
    n = tiles.shape[0]
    extra = (1,) * (coeffs.ndim - 1)
    out = np.zeros((n, 2) + coeffs.shape[1:])
    for local in range(4):
        out += tiles[:, :, local].reshape((n, 2) + extra) * gathered[:, None, local]
    return out.reshape((2 * n,) + coeffs.shape[1:])


@dataclass(frozen=True)
class SplineSpace2D:
    """Tensor product space M(3, delta_x) x M(3, delta_y)."""

    bx: HermiteBasis1D
    by: HermiteBasis1D

    @property
    def shape(self) -> tuple[int, int]:
        return self.bx.dimension, self.by.dimension


@dataclass(frozen=True)
class SplineCoeffs2D:
    """Coefficients ``gamma[i, j]`` of ``chi_i(x) psi_j(y)`` (x-major layout)."""

    space: SplineSpace2D
    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.shape != self.space.shape:
            raise ValueError(f"coefficient shape {gamma.shape} does not match space {self.space.shape}")
        object.__setattr__(self, "gamma", gamma)

    def evaluate_grid(self, x, y, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Derivative ``d^{dx+dy} U / dx^dx dy^dy`` on the tensor grid ``x`` by ``y``."""
        mx = self.space.bx.basis_matrix(x, dx)
        my = self.space.by.basis_matrix(y, dy)
        return np.asarray((my @ (mx @ self.gamma).T).T)

    def __call__(self, x, y, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Pointwise evaluation at matching arrays ``x`` and ``y``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        mx = self.space.bx.basis_matrix(x, dx)
        my = self.space.by.basis_matrix(y, dy)
        return np.asarray(my.multiply(mx @ self.gamma).sum(axis=1)).ravel()


def eval_spline_2d(c: SplineCoeffs2D, x: float, y: float, dx: int = 0, dy: int = 0) -> float:
    """Value of a derivative of the tensor spline at a single point of the unit square."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"point ({x}, {y}) lies outside the unit square")
    ix, vx = c.space.bx.eval_basis(x, dx)
    iy, vy = c.space.by.eval_basis(y, dy)
    return float(vx @ c.gamma[np.ix_(ix, iy)] @ vy)


def hermite_interpolant_2d(u, u_x, u_y, u_xy, px: Partition1D, py: Partition1D) -> SplineCoeffs2D:
    """Piecewise Hermite bicubic interpolant of ``u`` vanishing on the boundary.

    The four callables take ``(x, y)`` arrays.  ``u`` must vanish at the
    boundary nodes.
    """
    bx, by = HermiteBasis1D(px), HermiteBasis1D(py)
    X, Y = np.meshgrid(px.nodes, py.nodes, indexing="ij")
    uv = np.broadcast_to(u(X, Y), X.shape)
    boundary = np.zeros(X.shape, dtype=bool)
    boundary[[0, -1], :] = True
    boundary[:, [0, -1]] = True
    if np.any(np.abs(uv[boundary]) > 1e-12):
        raise ValueError("function to interpolate does not vanish on the boundary")

    gamma = np.zeros((bx.dimension, by.dimension))
    vx, sx = bx.value_dofs(), bx.slope_dofs()
    vy, sy = by.value_dofs(), by.slope_dofs()
    ix_in = slice(1, -1)
    gamma[np.ix_(vx[ix_in], vy[ix_in])] = uv[ix_in, ix_in]
    gamma[np.ix_(sx, vy[ix_in])] = np.broadcast_to(u_x(X, Y), X.shape)[:, ix_in]
    gamma[np.ix_(vx[ix_in], sy)] = np.broadcast_to(u_y(X, Y), X.shape)[ix_in, :]
    gamma[np.ix_(sx, sy)] = np.broadcast_to(u_xy(X, Y), X.shape)
    return SplineCoeffs2D(SplineSpace2D(bx, by), gamma)
