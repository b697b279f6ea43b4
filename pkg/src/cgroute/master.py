"""Restricted master problem: set-covering LP over route columns.

Solved by a dense two-phase revised simplex (explicit basis inverse,
eta updates, periodic refactorization). Dantzig pricing switches to
Bland's rule after too many degenerate pivots. The basis is kept between
solves, so re-solving after adding columns skips phase 1. The solver is
deliberately self-contained; an external LP engine can be swapped in
behind RmpState without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import Column

TOL = 1e-9
_REFACTOR_EVERY = 64
_HARD_PIVOT_CAP = 200_000


class LpError(RuntimeError):
    pass


class InfeasibleMasterError(LpError):
    """The covering LP has no feasible point (should be impossible once
    initialization covers every customer)."""


class NumericalStallError(LpError):
    """Pivot cap exhausted; the LP is numerically stuck."""


@dataclass
class LpSolution:
    objective: float
    x: np.ndarray
    duals: np.ndarray
    pivots: int


class CoveringLp:
    """min c^T x  s.t.  A x >= 1,  x >= 0, with columns added over time."""

    def __init__(self, n_rows: int, tol: float = TOL):
        self.m = n_rows
        self.tol = tol
        self._cap = 64
        self._A = np.zeros((n_rows, self._cap))
        self._c = np.zeros(self._cap)
        self.k = 0
        self._basis_tags = None  # list of ('x', j) / ('s', i) / ('a', i)

    def add_column(self, cost: float, rows) -> int:
        if self.k == self._cap:
            self._cap *= 2
            A = np.zeros((self.m, self._cap))
            A[:, : self.k] = self._A[:, : self.k]
            c = np.zeros(self._cap)
            c[: self.k] = self._c[: self.k]
            self._A, self._c = A, c
        j = self.k
        for r in rows:
            self._A[r, j] = 1.0
        self._c[j] = cost
        self.k += 1
        return j

    # -- simplex ------------------------------------------------------------

    def _column(self, M, j):
        if j < M.shape[1]:
            return M[:, j]
        e = np.zeros(self.m)
        e[j - M.shape[1]] = 1.0
        return e

    def _refactor(self, M, basis):
        B = np.column_stack([self._column(M, j) for j in basis])
        try:
            return np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalStallError("basis matrix became singular") from exc

    def _optimize(self, M, costs, art_cost, basis, Binv, x_B, pivots_done):
        """Run simplex to optimality from the given basis. Artificial
        columns (indices >= ncols) never enter. Returns total pivots."""
        m = self.m
        ncols = M.shape[1]
        tol = self.tol
        bland_after = 5 * (m + ncols)
        degenerate = 0
        bland = False
        pivots = pivots_done
        basic_mask = np.zeros(ncols, dtype=bool)
        for j in basis:
            if j < ncols:
                basic_mask[j] = True

        while True:
            pivots += 1
            if pivots > _HARD_PIVOT_CAP:
                raise NumericalStallError(f"no optimum after {pivots} pivots")
            if pivots % _REFACTOR_EVERY == 0:
                Binv = self._refactor(M, basis)
                x_B = Binv @ np.ones(m)
                x_B[x_B < 0] = 0.0

            c_B = np.array([costs[j] if j < ncols else art_cost for j in basis])
            y = c_B @ Binv
            d = costs - y @ M
            d[basic_mask] = np.inf
            if bland:
                entering = np.flatnonzero(d < -tol)
                if entering.size == 0:
                    return basis, Binv, x_B, y, pivots
                q = int(entering[0])
            else:
                q = int(np.argmin(d))
                if d[q] >= -tol:
                    return basis, Binv, x_B, y, pivots

            w = Binv @ M[:, q]
            pos = w > tol
            if not pos.any():
                raise LpError("LP is unbounded, which a covering LP with finite costs cannot be")
            ratios = np.full(m, np.inf)
            ratios[pos] = x_B[pos] / w[pos]
            rmin = ratios.min()
            ties = np.flatnonzero(ratios <= rmin + 1e-12)
            if bland:
                r = int(min(ties, key=lambda i: basis[i]))
            else:
                r = int(max(ties, key=lambda i: w[i]))

            if rmin <= tol:
                degenerate += 1
                if degenerate > bland_after:
                    bland = True

            leaving = basis[r]
            if leaving < ncols:
                basic_mask[leaving] = False
            basic_mask[q] = True
            x_B = x_B - rmin * w
            x_B[r] = rmin
            x_B[x_B < 0] = 0.0
            piv = w[r]
            Binv[r, :] /= piv
            others = np.arange(m) != r
            Binv[others, :] -= np.outer(w[others], Binv[r, :])
            basis = basis.copy()
            basis[r] = q

    def solve(self) -> LpSolution:
        m, k = self.m, self.k
        if k == 0:
            raise InfeasibleMasterError("no columns")
        M = np.hstack([self._A[:, :k], -np.eye(m)])
        ncols = k + m
        costs = np.concatenate([self._c[:k], np.zeros(m)])
        b = np.ones(m)
        pivots = 0

        basis = self._encode_basis(ncols)
        if basis is not None:
            Binv = self._refactor(M, basis)
            x_B = Binv @ b
            if x_B.min() < -1e-7:
                basis = None  # stale basis; rebuild from scratch

        if basis is None:
            # phase 1: start from the all-artificial basis and price real
            # columns with zero cost until the artificial mass vanishes.
            basis = np.arange(ncols, ncols + m)
            Binv = np.eye(m)
            x_B = b.copy()
            phase1 = np.zeros(ncols)
            basis, Binv, x_B, _, pivots = self._optimize(M, phase1, 1.0, basis, Binv, x_B, pivots)
            residual = sum(x_B[i] for i in range(m) if basis[i] >= ncols)
            if residual > 1e-7 * m:
                raise InfeasibleMasterError(f"phase 1 left infeasibility {residual:.3e}")
            basis, Binv = self._drive_out_artificials(M, basis, Binv)
            x_B = Binv @ b
            x_B[x_B < 0] = 0.0

        basis, Binv, x_B, y, pivots = self._optimize(M, costs, 0.0, basis, Binv, x_B, pivots)

        self._basis_tags = [self._tag(j, k, ncols) for j in basis]
        x = np.zeros(k)
        for i, j in enumerate(basis):
            if j < k:
                x[j] = x_B[i]
        duals = np.where(y > 0, y, 0.0)
        return LpSolution(objective=float(self._c[:k] @ x), x=x, duals=duals, pivots=pivots)

    def _drive_out_artificials(self, M, basis, Binv):
        ncols = M.shape[1]
        in_basis = set(int(j) for j in basis)
        for r in range(self.m):
            if basis[r] < ncols:
                continue
            row = Binv[r, :] @ M
            candidates = [j for j in np.flatnonzero(np.abs(row) > self.tol) if j not in in_basis]
            if not candidates:
                continue  # redundant row: the artificial stays basic at zero
            q = int(candidates[0])
            w = Binv @ M[:, q]
            in_basis.discard(int(basis[r]))
            in_basis.add(q)
            Binv[r, :] /= w[r]
            others = np.arange(self.m) != r
            Binv[others, :] -= np.outer(w[others], Binv[r, :])
            basis = basis.copy()
            basis[r] = q
        return basis, Binv

    def _encode_basis(self, ncols):
        if self._basis_tags is None:
            return None
        out = np.empty(self.m, dtype=int)
        for i, (kind, idx) in enumerate(self._basis_tags):
            if kind == "x":
                out[i] = idx
            elif kind == "s":
                out[i] = self.k + idx
            else:
                out[i] = ncols + idx
        return out

    def _tag(self, j, k, ncols):
        if j < k:
            return ("x", int(j))
        if j < ncols:
            return ("s", int(j - k))
        return ("a", int(j - ncols))

    def dump_lp(self, path) -> Path:
        """Write the current LP in CPLEX LP text format for cross-checking."""
        lines = ["Minimize", " obj: " + " + ".join(f"{self._c[j]:.12g} x{j}" for j in range(self.k))]
        lines.append("Subject To")
        for r in range(self.m):
            terms = [f"x{j}" for j in range(self.k) if self._A[r, j] > 0]
            lines.append(f" cover{r}: " + " + ".join(terms) + " >= 1")
        lines.append("Bounds")
        lines.extend(f" 0 <= x{j}" for j in range(self.k))
        lines.append("End")
        path = Path(path)
        path.write_text("\n".join(lines) + "\n")
        return path


class RmpState:
    """Column pool plus the LP, deduplicating columns by route sequence."""

    def __init__(self, n_customers: int):
        self.n = n_customers
        self.columns: list[Column] = []
        self._seen: set[tuple] = set()
        self._lp = CoveringLp(n_customers)
        self.solution: LpSolution | None = None

    def add_columns(self, new_columns) -> int:
        """Add distinct columns (by sequence); returns how many were new."""
        added = 0
        for col in new_columns:
            if col.sequence in self._seen:
                continue
            self._seen.add(col.sequence)
            self.columns.append(col)
            self._lp.add_column(col.cost, [i - 1 for i in sorted(col.cover)])
            added += 1
        return added

    def solve(self):
        """Solve the LP; returns (objective, duals over customers 1..n, x)."""
        self.solution = self._lp.solve()
        return self.solution.objective, self.solution.duals, self.solution.x

    @property
    def objective(self) -> float:
        if self.solution is None:
            raise LpError("solve() has not been called")
        return self.solution.objective

    def dump_lp(self, path) -> Path:
        return self._lp.dump_lp(path)
