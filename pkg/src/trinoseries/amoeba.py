"""Numeric sampler for the discriminant amoeba of a trinomial system.

A point rho in Log space belongs to the amoeba when some x on the torus
|x_i| = e^(rho_i) carries a singular solution, i.e. the critical system

    P_i(y; x) = 0,   det(dP/dy) = 0

has a solution in (arg x, y).  The solver eliminates x exactly on the
P = 0 slice: every y in (C*)^n determines x_i(y) = (1 - y^omega_i)/y^sigma_i
with P(y; x(y)) = 0 identically, so membership reduces to

    log|x_i(y)| = rho_i,   det(dP/dy)(y, x(y)) = 0,

n + 2 real equations in the 2n real unknowns w = log y (arg x is recovered
as arg x(y)).  On that slice det(dP/dy) equals det(M)/prod(y_j) with
M_ij = omega_j^(i) u_i + sigma_j^(i) (1 - u_i), u_i = y^omega_i; the residual
uses det(M) normalized by the permanent of the entry-wise magnitude scale,
so one absolute tolerance is meaningful across the whole grid.

Grid scans test cells, not points: a cell of side `resolution` reports
membership when the amoeba meets the box rho +- resolution/2 (the log|x|
equations get a dead zone of that half-width).  Amoeba tentacles are
exponentially thin in Log space, so pointwise sampling at any fixed
resolution would lose them while the box test tracks them as far as they
carry solutions.  Membership is decided by multistart Newton
(Levenberg-Marquardt steps) with per-cell deterministic RNG streams; no
symbolic discriminants are ever formed.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .systems import TrinomialSystem

_TINY = 1e-300


def _critical_residual(system: TrinomialSystem, w, rho, halfwidth=0.0):
    """Batched real residual of the reduced critical system.

    w: (B, n) complex log-coordinates; rho: (B, n) floats.
    Rows: deadzone(log|x_i(y)| - rho_i), Re(det_n), Im(det_n).
    """
    n = system.n
    omega = np.array(system.omega, dtype=float)
    sigma = np.array(system.sigma, dtype=float)
    u = np.exp(w @ omega)  # (B, n): u_i = y^omega^(i)
    s = np.exp(w @ sigma)
    B = w.shape[0]
    x = (1.0 - u) / np.where(np.abs(s) < _TINY, _TINY, s)
    logx = np.log(np.maximum(np.abs(x), _TINY))
    delta = logx - rho
    if halfwidth > 0.0:
        delta = np.sign(delta) * np.maximum(np.abs(delta) - halfwidth, 0.0)
    M = np.empty((B, n, n), dtype=complex)
    scale = np.empty((B, n, n), dtype=float)
    one_u = 1.0 - u
    for i in range(n):
        for j in range(n):
            M[:, i, j] = omega[j, i] * u[:, i] + sigma[j, i] * one_u[:, i]
            scale[:, i, j] = omega[j, i] * np.abs(u[:, i]) + sigma[j, i] * np.abs(
                one_u[:, i]
            )
    det = np.linalg.det(M)
    perm = np.zeros(B, dtype=float)
    for p in permutations(range(n)):
        prod = np.ones(B, dtype=float)
        for i, j in enumerate(p):
            prod = prod * scale[:, i, j]
        perm += prod
    detn = det / np.maximum(perm, _TINY)
    return np.concatenate(
        [delta, detn.real[:, None], detn.imag[:, None]], axis=1
    )


def solution_args(system: TrinomialSystem, w):
    """arg x(y) for a converged w (the eliminated theta unknowns)."""
    omega = np.array(system.omega, dtype=float)
    sigma = np.array(system.sigma, dtype=float)
    u = np.exp(w @ omega)
    s = np.exp(w @ sigma)
    return np.angle((1.0 - u) / s)


def _pack(w):
    return np.concatenate([w.real, w.imag], axis=1)


def _unpack(u, n):
    return u[:, :n] + 1j * u[:, n : 2 * n]


def _newton_batch(system, u0, rho, tol, halfwidth=0.0, iters=30, presolve=True):
    """Two-stage damped Levenberg-Marquardt on the batched real system;
    returns (best residual, final iterate) per start.  rho has one row per
    start.

    Stage one ignores the log|x| equations (huge dead zone) so every start
    first lands on the singular variety det = 0; stage two then slides along
    it to meet the target box.  This keeps thin tentacle cells detectable
    with a modest number of multistarts.
    """
    u = u0.copy()
    if presolve:
        u = _lm_iterations(system, u, rho, tol, 1e9, max(6, iters // 3))[1]
    return _lm_iterations(system, u, rho, tol, halfwidth, iters)


def _lm_iterations(system, u, rho, tol, halfwidth, iters):
    n = system.n
    B, m = u.shape
    best = np.full(B, np.inf)
    for _ in range(iters):
        F = _critical_residual(system, _unpack(u, n), rho, halfwidth)
        rn = np.max(np.abs(F), axis=1)
        best = np.minimum(best, rn)
        if np.all(rn < tol):
            break
        J = np.empty((B, F.shape[1], m))
        h = 1e-7
        for dmi in range(m):
            du = np.zeros_like(u)
            du[:, dmi] = h
            J[:, :, dmi] = (
                _critical_residual(system, _unpack(u + du, n), rho, halfwidth) - F
            ) / h
        # normal equations with a small damping term: tolerant of the rank
        # deficiency the dead zone introduces, and batched throughout
        JT = np.swapaxes(J, 1, 2)
        G = JT @ J + 1e-10 * np.eye(m)[None, :, :]
        rhs = (JT @ F[:, :, None])[:, :, 0]
        try:
            step = np.linalg.solve(G, rhs[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.empty((B, m))
            for b in range(B):
                step[b] = np.linalg.lstsq(J[b], F[b], rcond=None)[0]
        step = np.nan_to_num(step, nan=0.0, posinf=0.0, neginf=0.0)
        norm = np.linalg.norm(step, axis=1, keepdims=True)
        big = norm > 1.5
        step = np.where(big, step * (1.5 / np.where(big, norm, 1.0)), step)
        u = u - step
        np.clip(u[:, :n], -9.0, 7.0, out=u[:, :n])
        u[:, n:] = np.mod(u[:, n:] + math.pi, 2 * math.pi) - math.pi
    F = _critical_residual(system, _unpack(u, n), rho, halfwidth)
    best = np.minimum(best, np.max(np.abs(F), axis=1))
    return best, u


def _starts(system, rng, attempts):
    n = system.n
    rew = rng.uniform(-2.5, 1.5, size=(attempts, n))
    imw = rng.uniform(-math.pi, math.pi, size=(attempts, n))
    return _pack(rew + 1j * imw)


def amoeba_membership(system: TrinomialSystem, rho, attempts: int = 50,
                      tol: float = 1e-8, rng=None, seed: int = 0,
                      halfwidth: float = 0.0):
    """(member, score): member is True when any multistart converges on the
    critical system at |x| = e^rho; score is the converged fraction.
    halfwidth > 0 tests the box rho +- halfwidth instead of the point."""
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(seed))
    rho = np.asarray(rho, dtype=float)
    starts = _starts(system, rng, attempts)
    rho_rows = np.broadcast_to(rho, (attempts, system.n)).copy()
    best, _u = _newton_batch(system, starts, rho_rows, tol, halfwidth)
    hits = int(np.count_nonzero(best < tol))
    return hits > 0, hits / attempts


@dataclass
class AmoebaGrid:
    axes: tuple  # one 1-D float array per dimension (rho values)
    member: np.ndarray  # bool, shape = grid
    score: np.ndarray  # float, shape = grid

    def to_csv(self, fh, header: str | None = None):
        writer = csv.writer(fh)
        if header:
            fh.write(header)
        dim = len(self.axes)
        writer.writerow([f"rho{i + 1}" for i in range(dim)] + ["member", "score"])
        if self.member.size == 0:
            return
        if dim == 1:
            for i, r in enumerate(self.axes[0]):
                writer.writerow(
                    [f"{r:.6f}", int(self.member[i]), f"{self.score[i]:.6f}"]
                )
        else:
            for i, r1 in enumerate(self.axes[0]):
                for j, r2 in enumerate(self.axes[1]):
                    writer.writerow(
                        [
                            f"{r1:.6f}",
                            f"{r2:.6f}",
                            int(self.member[i, j]),
                            f"{self.score[i, j]:.6f}",
                        ]
                    )


def _axis(lo: float, hi: float, resolution: float) -> np.ndarray:
    if hi < lo:
        raise ValueError("empty axis bounds")
    count = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
    return lo + resolution * np.arange(count)


_KEEP_SOLUTIONS = 6


def amoeba_scan(system: TrinomialSystem, bounds, resolution: float,
                attempts: int = 24, tol: float = 1e-8, seed: int = 0,
                workers: int = 1) -> AmoebaGrid:
    """Scan a rectangular Log-space grid of cells of side `resolution`;
    deterministic under a fixed seed (per-cell RNG streams keyed by
    (seed, cell index)).

    Two phases: a batched random-multistart sweep over all cells, then a
    growth phase that retests empty cells bordering member cells with the
    neighbors' converged solutions as starts.  The growth phase follows the
    exponentially thinning tentacles outward, where random multistarts alone
    have vanishing hit probability; its schedule is deterministic, so results
    do not depend on the worker count.
    """
    n = system.n
    if n not in (1, 2):
        raise ValueError("amoeba_scan supports n = 1 and n = 2")
    if len(bounds) != n:
        raise ValueError("bounds must list (lo, hi) per axis")
    axes = tuple(_axis(lo, hi, resolution) for lo, hi in bounds)
    shape = tuple(len(a) for a in axes)
    member = np.zeros(shape, dtype=bool)
    score = np.zeros(shape, dtype=float)
    solutions: dict[tuple, np.ndarray] = {}
    cells = list(np.ndindex(*shape))
    halfwidth = resolution / 2.0

    def cell_rho(idx):
        return np.asarray([axes[dim][idx[dim]] for dim in range(n)], dtype=float)

    def record(idx, best, u, tried):
        hits = int(np.count_nonzero(best < tol))
        member[idx] = hits > 0
        score[idx] = hits / tried
        if hits:
            solutions[tuple(idx)] = u[best < tol][:_KEEP_SOLUTIONS]

    def run_chunk(chunk):
        starts = []
        rho_rows = []
        for idx in chunk:
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=tuple(idx))
            )
            starts.append(_starts(system, rng, attempts))
            rho_rows.append(np.tile(cell_rho(idx), (attempts, 1)))
        best, u = _newton_batch(
            system, np.concatenate(starts), np.concatenate(rho_rows), tol, halfwidth
        )
        return [
            (idx, best[p * attempts : (p + 1) * attempts],
             u[p * attempts : (p + 1) * attempts])
            for p, idx in enumerate(chunk)
        ]

    row_len = shape[-1] if n == 2 else len(cells)
    chunks = [cells[i : i + row_len] for i in range(0, len(cells), row_len)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, chunks))
    else:
        parts = [run_chunk(chunk) for chunk in chunks]
    for part in parts:
        for idx, best, u in part:
            record(idx, best, u, attempts)

    # growth phase: seed empty cells from converged neighbors
    def neighbors(idx):
        if n == 1:
            (i,) = idx
            return [(i + di,) for di in (-1, 1) if 0 <= i + di < shape[0]]
        i, j = idx
        out = []
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                if di == dj == 0:
                    continue
                ni, nj = i + di, j + dj
                if 0 <= ni < shape[0] and 0 <= nj < shape[1]:
                    out.append((ni, nj))
        return out

    fresh = [idx for idx in cells if member[idx]]
    tested: set[tuple] = set()
    while fresh:
        frontier = []
        seen = set()
        for src in fresh:
            for nb in neighbors(src):
                if not member[nb] and nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
        fresh = []
        for idx in frontier:
            seeds = [solutions[nb] for nb in neighbors(idx) if tuple(nb) in solutions]
            if not seeds:
                continue
            key = (idx, sum(s.shape[0] for s in seeds))
            if key in tested:
                continue
            tested.add(key)
            u0 = np.concatenate(seeds)
            rho_rows = np.tile(cell_rho(idx), (u0.shape[0], 1))
            best, u = _newton_batch(
                system, u0, rho_rows, tol, halfwidth, iters=20, presolve=False
            )
            if np.count_nonzero(best < tol):
                record(idx, best, u, u0.shape[0])
                fresh.append(idx)

    return AmoebaGrid(axes=axes, member=member, score=score)


def member_connected(grid: AmoebaGrid) -> bool:
    """True when the sampled member cells form one 8-connected component."""
    cells = {tuple(idx) for idx in np.argwhere(grid.member)}
    if not cells:
        return False
    start = next(iter(cells))
    stack = [start]
    seen = {start}
    while stack:
        ci, cj = stack.pop()
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                nxt = (ci + di, cj + dj)
                if nxt in cells and nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(seen) == len(cells)


def complement_components(grid: AmoebaGrid) -> int:
    """Number of 4-connected components of the sampled complement."""
    free = ~grid.member
    seen = np.zeros_like(free)
    count = 0
    shape = free.shape
    for start in np.argwhere(free):
        start = tuple(start)
        if seen[start] or not free[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            ci, cj = stack.pop()
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                ni, nj = ci + di, cj + dj
                if 0 <= ni < shape[0] and 0 <= nj < shape[1]:
                    if free[ni, nj] and not seen[ni, nj]:
                        seen[ni, nj] = True
                        stack.append((ni, nj))
    return count
