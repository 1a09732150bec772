"""Almost block diagonal solvers for the 1D Hermite collocation systems.

The matrices have one 2x4 tile per element.  Tile ``k`` couples the DOFs of
nodes ``k`` and ``k+1``; the first and last tiles lose a column to the
Dirichlet condition, so their effective size is 2x3.

:class:`AbdFactorization` eliminates node by node: at stage ``g`` the row left
over from the previous stage and the two rows of tile ``g`` form a small
working block, whose columns of node ``g`` are eliminated with partial
pivoting.  Fill never leaves the working block, so storage and work are O(N).
:class:`BandedFactorization` is an independent LAPACK banded LU behind the
same interface.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

PIVOT_RTOL = 1e-14


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a pivot falls below the singularity threshold."""

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


@dataclass(frozen=True)
class AbdMatrix:
    """Element tiles ``(N, 2, 4)`` of an ``M x M`` collocation matrix, ``M = 2N``.

    Tile columns are the local DOFs (left value, left slope, right value, right
    slope); the left value of the first tile and the right value of the last
    are structurally zero.
    """

    tiles: np.ndarray

    def __post_init__(self):
        tiles = np.array(self.tiles, dtype=float)
        if tiles.ndim != 3 or tiles.shape[1:] != (2, 4) or tiles.shape[0] < 1:
            raise ValueError(f"expected tiles of shape (N, 2, 4), got {tiles.shape}")
        tiles[0, :, 0] = 0.0
        tiles[-1, :, 2] = 0.0
        tiles.setflags(write=False)
        object.__setattr__(self, "tiles", tiles)

    @property
    def n_blocks(self) -> int:
        return self.tiles.shape[0]

    @property
    def size(self) -> int:
        return 2 * self.n_blocks

    def columns(self, k: int) -> np.ndarray:
        """Global column index of each local DOF of tile ``k`` (-1 if removed)."""
        n = self.n_blocks
        cols = np.array([2 * k - 1, 2 * k, 2 * k + 1, 2 * k + 2])
        if k == 0:
            cols[0] = -1
        if k == n - 1:
            cols[2] = -1
            cols[3] = 2 * n - 1
        return cols

    def to_dense(self) -> np.ndarray:
        m = self.size
        out = np.zeros((m, m))
        for k in range(self.n_blocks):
            for local, col in enumerate(self.columns(k)):
                if col >= 0:
                    out[2 * k : 2 * k + 2, col] = self.tiles[k, :, local]
        return out

    @classmethod
    def from_dense(cls, dense) -> "AbdMatrix":
        """Pick the tiles out of a dense matrix; entries outside the footprint must be zero."""
        dense = np.asarray(dense, dtype=float)
        m = dense.shape[0]
        if dense.shape != (m, m) or m % 2 or m == 0:
            raise ValueError("expected a square matrix of even order")
        n = m // 2
        tiles = np.zeros((n, 2, 4))
        probe = cls(tiles)
        for k in range(n):
            for local, col in enumerate(probe.columns(k)):
                if col >= 0:
                    tiles[k, :, local] = dense[2 * k : 2 * k + 2, col]
        out = cls(tiles)
        if not np.array_equal(out.to_dense(), dense):
            raise ValueError("matrix has entries outside the almost block diagonal footprint")
        return out

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.to_dense() @ x


def _node_locals(k: int, n: int) -> tuple[list[int], list[int]]:
    """Local columns of tile ``k`` belonging to node ``k`` and node ``k+1``."""
    left = [1] if k == 0 else [0, 1]
    right = [3] if k == n - 1 else [2, 3]
    return left, right


@dataclass(frozen=True)
class _Stage:
    rows: tuple[int, ...]      # rows of tile g fed in at this stage (global indices)
    perm: np.ndarray           # working-row order after pivoting
    lower: np.ndarray          # (r, p) elimination multipliers in permuted order
    upper: np.ndarray          # (p, c) pivot rows
    n_pivots: int
    cols: tuple[int, ...]      # global columns of the node eliminated here


def _split(batch: int, workers: int) -> list[slice]:
    workers = max(1, min(workers, batch))
    edges = np.linspace(0, batch, workers + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


class _Factorization:
    size: int

    def _solve_block(self, rhs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def solve(self, rhs, workers: int = 1) -> np.ndarray:
        """Solve for one right-hand side (1D) or a batch stored in columns (2D).

        With ``workers > 1`` disjoint column ranges are solved on a thread
        pool; every column goes through the same operations either way.
        """
        rhs = np.asarray(rhs, dtype=float)
        vector = rhs.ndim == 1
        b = rhs[:, None] if vector else rhs
        if b.ndim != 2 or b.shape[0] != self.size:
            raise ValueError(f"right-hand side has shape {rhs.shape}, expected leading dimension {self.size}")
        if workers > 1 and b.shape[1] > 1:
            parts = _split(b.shape[1], workers)
            out = np.empty_like(b)
            with ThreadPoolExecutor(max_workers=len(parts)) as pool:
                results = pool.map(lambda s: self._solve_block(b[:, s]), parts)
                for s, res in zip(parts, results):
                    out[:, s] = res
        else:
            out = self._solve_block(b)
        return out[:, 0] if vector else out


class AbdFactorization(_Factorization):
    """Node-by-node LU with partial pivoting confined to the block structure.

    Pivot ties go to the smallest original row index.
    """

    def __init__(self, m: AbdMatrix, pivot_rtol: float = PIVOT_RTOL):
        self.size = m.size
        n = m.n_blocks
        tiles = m.tiles
        scale = float(np.abs(tiles).max())
        if scale == 0.0:
            raise SingularMatrixError("matrix is identically zero", block=0)
        threshold = pivot_rtol * scale
        stages = []
        carry = np.zeros((0, 1))
        carry_rows: list[int] = []
        for g in range(n + 1):
            # columns: node g, then node g+1
            if g < n:
                left, right = _node_locals(g, n)
                block = tiles[g][:, left + right]
                p = len(left)
                width = len(left) + len(right)
                work = np.zeros((carry.shape[0] + 2, width))
                work[: carry.shape[0], :p] = carry
                work[carry.shape[0] :] = block
                rows = carry_rows + [2 * g, 2 * g + 1]
                new_rows = (2 * g, 2 * g + 1)
                cols = tuple(m.columns(g)[left])
            else:
                work = carry.copy()
                p = work.shape[1]
                rows = carry_rows
                new_rows = ()
                cols = (2 * n - 1,)
            r = work.shape[0]
            remaining = list(range(r))  # ascending original row order
            pivots = []
            mult = np.zeros((r, p))
            for j in range(p):
                cand = np.abs(work[remaining, j])
                best = int(np.argmax(cand))
                if cand[best] <= threshold:
                    raise SingularMatrixError(
                        f"zero pivot while eliminating node {g} (block {min(g, n - 1)})",
                        block=min(g, n - 1),
                    )
                piv = remaining.pop(best)
                pivots.append(piv)
                for i in remaining:
                    factor = work[i, j] / work[piv, j]
                    mult[i, j] = factor
                    work[i, j:] -= factor * work[piv, j:]
                    work[i, j] = 0.0
            perm = np.array(pivots + remaining)
            stages.append(
                _Stage(new_rows, perm, mult[perm], work[pivots].copy(), p, cols)
            )
            carry = work[remaining][:, p:]
            carry_rows = [rows[i] for i in remaining]
        self._stages = stages

    def _solve_block(self, rhs: np.ndarray) -> np.ndarray:
        batch = rhs.shape[1]
        carry = np.zeros((0, batch))
        ys = []
        for st in self._stages:
            z = np.concatenate([carry, rhs[list(st.rows)]], axis=0)[st.perm]
            for j in range(st.n_pivots):
                for i in range(j + 1, z.shape[0]):
                    z[i] -= st.lower[i, j] * z[j]
            ys.append(z[: st.n_pivots])
            carry = z[st.n_pivots :]
        x = np.empty_like(rhs)
        right = np.zeros((0, batch))
        for st, y in zip(reversed(self._stages), reversed(ys)):
            p = st.n_pivots
            u = st.upper
            sol = np.empty((p, batch))
            for j in range(p - 1, -1, -1):
                acc = y[j].copy()
                for k in range(j + 1, p):
                    acc -= u[j, k] * sol[k]
                for k in range(right.shape[0]):
                    acc -= u[j, p + k] * right[k]
                sol[j] = acc / u[j, j]
            x[list(st.cols)] = sol
            right = sol
        return x


class BandedFactorization(_Factorization):
    """LAPACK ``gbtrf`` factorization of the same matrix, bandwidths 2 and 2."""

    kl = 2
    ku = 2

    def __init__(self, m: AbdMatrix, pivot_rtol: float = PIVOT_RTOL):
        dense = m.to_dense()
        self.size = n = dense.shape[0]
        kl, ku = self.kl, self.ku
        ab = np.zeros((2 * kl + ku + 1, n))
        for j in range(n):
            for i in range(max(0, j - ku), min(n, j + kl + 1)):
                ab[kl + ku + i - j, j] = dense[i, j]
        lu, piv, info = lapack.dgbtrf(ab, kl, ku)
        if info > 0:
            raise SingularMatrixError(f"exactly singular at column {info - 1}", block=(info - 1) // 2)
        diag = np.abs(lu[kl + ku])
        scale = float(np.abs(dense).max())
        bad = np.nonzero(diag <= pivot_rtol * scale)[0]
        if bad.size:
            raise SingularMatrixError(f"near-zero pivot at column {bad[0]}", block=int(bad[0]) // 2)
        self._lu, self._piv = lu, piv

    def _solve_block(self, rhs: np.ndarray) -> np.ndarray:
        x, info = lapack.dgbtrs(self._lu, self.kl, self.ku, rhs, self._piv)
        if info != 0:
            raise ValueError(f"dgbtrs failed with info={info}")
        return x


SOLVERS = {"abd": AbdFactorization, "banded": BandedFactorization}


def factor(m: AbdMatrix, method: str = "abd") -> _Factorization:
    """Factor an almost block diagonal matrix; ``method`` is ``"abd"`` or ``"banded"``."""
    try:
        cls = SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown solver {method!r}; choose from {sorted(SOLVERS)}") from None
    return cls(m)
