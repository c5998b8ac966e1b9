"""Reconstruction Riemann-Hilbert problem on the unit circle.

The jump is V = [[1-|r|^2, -conj(rho)], [rho, 1]] with the dressed datum
rho(lambda) = r(lambda, t) lambda^{-n}; the oscillatory factor e^{i t phi}
of the jump (with xi = n/(2t) inside phi) is exactly this combination, and
storing it directly keeps t = 0 regular.  V factors as

    V = (I - w_-)^{-1} (I + w_+),
    w_- = [[0, -conj(rho)], [0, 0]],   w_+ = [[0, 0], [rho, 0]],

both nilpotent, so (I - w_-)^{-1} = I + w_- exactly.

The contour is oriented clockwise with +/- = left/right = outside/inside.
The one-sided Cauchy boundary operators are realized by Fourier-mode
splitting: C+ keeps the strictly negative modes (boundary values of the
function analytic outside and vanishing at infinity), C- is minus the
non-negative modes, so the Plemelj relation C+ - C- = identity holds
exactly on the resolved trigonometric space.

The Beals-Coifman density mu = (1 - C_w)^{-1} I, C_w f = C+(f w_-)
+ C-(f w_+), acts row-wise on 2x2 data.  Eliminating the second column
through the exact relation f2 = g2 + C+(u f1) reduces each row to an
N x N dense system (I - P_- M_l P_+ M_u) f1 = rhs, solved by one LU with
two right-hand sides.  The solution at the origin is

    M(0) = I - mean_theta( mu (w_+ + w_-) ),

and q_n(t) = M_{1,2}(0, n+1, t).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg

from .errors import DomainError, ResolutionError, SolverError
from .scattering import ReflectionGrid

#: refuse solves with fewer than this many nodes per oscillation cycle
NODES_PER_CYCLE = 8


@dataclass
class JumpData:
    """Discretized jump factors w+/w- on the uniform circle grid."""

    thetas: np.ndarray
    w_plus: np.ndarray   # (N, 2, 2), strictly lower triangular
    w_minus: np.ndarray  # (N, 2, 2), strictly upper triangular
    n: int
    t: float

    @property
    def N(self) -> int:
        return self.thetas.size

    def jump_matrices(self) -> np.ndarray:
        """V_k = (I - w_-)^{-1} (I + w_+) = (I + w_-)(I + w_+), per node."""
        eye = np.broadcast_to(np.eye(2, dtype=np.complex128), (self.N, 2, 2))
        return np.matmul(eye + self.w_minus, eye + self.w_plus)


@dataclass
class BealsCoifmanSolve:
    """Density mu, reconstructed M(0), and solver diagnostics."""

    mu: np.ndarray          # (N, 2, 2)
    M_at_zero: np.ndarray   # (2, 2)
    residuals: dict = dc_field(default_factory=dict)


def _require_power_of_two(N: int) -> None:
    if N < 4 or (N & (N - 1)) != 0:
        raise ValueError(f"grid size must be a power of two >= 4, got {N}")


def _resample_r(grid: ReflectionGrid, N: int) -> np.ndarray:
    """Trigonometric resampling of r onto an N-point uniform grid."""
    if N == grid.N:
        return grid.r.copy()
    modes = np.fft.fft(grid.r) / grid.N
    out = np.zeros(N, dtype=np.complex128)
    keep = min(N, grid.N) // 2
    out[:keep] = modes[:keep]
    out[-keep:] = modes[-keep:]
    return np.fft.ifft(out) * N


def build_jump(grid: ReflectionGrid, n: int, t: float, N: int | None = None) -> JumpData:
    """Jump data for the RH problem with index n at absolute time t.

    The grid's own reflection data (at grid.t_ref) is evolved to time t by
    the unimodular factor exp(2i(cos th - 1)(t - t_ref)) and dressed with
    lambda^{-n}; both factors are unimodular on the circle, so
    sup|rho| = sup|r| < 1 is preserved.
    """
    if N is None:
        N = grid.N
    _require_power_of_two(N)
    thetas = 2.0 * np.pi * np.arange(N) / N
    r = _resample_r(grid, N)
    if np.any(np.abs(r) >= 1.0):
        raise DomainError("jump requires sup|r| < 1 at all nodes")

    evol = np.exp(2j * (np.cos(thetas) - 1.0) * (t - grid.t_ref))
    winding = np.exp(-1j * n * thetas)
    rho = r * evol * winding

    w_plus = np.zeros((N, 2, 2), dtype=np.complex128)
    w_minus = np.zeros((N, 2, 2), dtype=np.complex128)
    w_plus[:, 1, 0] = rho
    w_minus[:, 0, 1] = -np.conj(rho)
    return JumpData(thetas, w_plus, w_minus, n, t)


def cauchy_project(values: np.ndarray, side: str) -> np.ndarray:
    """One-sided Cauchy boundary values by Fourier-mode splitting.

    values has shape (N, ...) with axis 0 the uniform theta grid.  side
    "plus" keeps the strictly negative modes; side "minus" returns minus
    the non-negative modes.  (C+ - C-) is the identity on trigonometric
    polynomials resolved by the grid.
    """
    N = values.shape[0]
    _require_power_of_two(N)
    modes = np.fft.fft(values, axis=0)
    freq = np.fft.fftfreq(N, d=1.0 / N)  # integer mode numbers
    neg = (freq < 0).reshape((N,) + (1,) * (values.ndim - 1))
    if side == "plus":
        modes = np.where(neg, modes, 0.0)
        return np.fft.ifft(modes, axis=0)
    if side == "minus":
        modes = np.where(neg, 0.0, modes)
        return -np.fft.ifft(modes, axis=0)
    raise ValueError("side must be 'plus' or 'minus'")


def _projection_matrix_plus(N: int) -> np.ndarray:
    """Dense matrix of C+ on the N-point grid (cached)."""
    mat = _projection_matrix_plus._cache.get(N)
    if mat is None:
        mat = cauchy_project(np.eye(N, dtype=np.complex128), "plus")
        _projection_matrix_plus._cache[N] = mat
    return mat


_projection_matrix_plus._cache = {}


def oscillation_cycles(n: int, dt: float) -> float:
    """Bound on phase-winding cycles of the dressed jump datum."""
    return abs(n) + 4.0 * abs(dt) / np.pi


def solve_beals_coifman(jump: JumpData, grid_t_ref: float | None = None) -> BealsCoifmanSolve:
    """Solve (1 - C_w) mu = I and evaluate M(0) by the same quadrature."""
    N = jump.N
    u = jump.w_minus[:, 0, 1]  # upper-corner entry (-conj(rho))
    l = jump.w_plus[:, 1, 0]   # lower-corner entry (rho)

    cycles = oscillation_cycles(jump.n, jump.t if grid_t_ref is None else jump.t - grid_t_ref)
    if N < NODES_PER_CYCLE * cycles:
        raise ResolutionError(
            f"N = {N} cannot resolve ~{cycles:.0f} oscillation cycles; "
            f"need N >= {NODES_PER_CYCLE * cycles:.0f}"
        )

    Pp = _projection_matrix_plus(N)
    Pm = Pp - np.eye(N, dtype=np.complex128)
    # Schur reduction of the row system  f1 - P-(l f2) = g1, f2 - P+(u f1) = g2
    K = Pm @ (l[:, None] * Pp * u[None, :])
    A = np.eye(N, dtype=np.complex128) - K

    ones = np.ones(N, dtype=np.complex128)
    rhs = np.stack([ones, Pm @ (l * ones)], axis=1)
    try:
        lu, piv = scipy.linalg.lu_factor(A)
        f1 = scipy.linalg.lu_solve((lu, piv), rhs)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(
            f"dense Beals-Coifman solve failed (cond ~ {np.linalg.cond(A):.3e})"
        ) from exc

    f1_row1, f1_row2 = f1[:, 0], f1[:, 1]
    f2_row1 = _apply_plus(u * f1_row1)
    f2_row2 = ones + _apply_plus(u * f1_row2)

    mu = np.empty((N, 2, 2), dtype=np.complex128)
    mu[:, 0, 0] = f1_row1
    mu[:, 0, 1] = f2_row1
    mu[:, 1, 0] = f1_row2
    mu[:, 1, 1] = f2_row2

    # residual of the full (unreduced) equation, applied spectrally
    res = np.empty_like(mu)
    res[:, :, 0] = mu[:, :, 0] - _apply_minus_cols(mu[:, :, 1] * l[:, None])
    res[:, :, 1] = mu[:, :, 1] - _apply_plus_cols(mu[:, :, 0] * u[:, None])
    res[:, 0, 0] -= 1.0
    res[:, 1, 1] -= 1.0
    residual = float(np.max(np.abs(res)))

    muw = np.empty_like(mu)
    muw[:, :, 0] = mu[:, :, 1] * l[:, None]
    muw[:, :, 1] = mu[:, :, 0] * u[:, None]
    M0 = np.eye(2, dtype=np.complex128) - muw.mean(axis=0)

    det_dev = abs(np.linalg.det(M0) - 1.0)
    diagnostics = {"equation_residual": residual, "det_deviation": float(det_dev)}
    if residual > 1e-6:
        raise SolverError(
            f"Beals-Coifman residual {residual:.3e} exceeds tolerance; "
            f"cond(A) ~ {np.linalg.cond(A):.3e}"
        )
    return BealsCoifmanSolve(mu, M0, diagnostics)


def _apply_plus(vec: np.ndarray) -> np.ndarray:
    return cauchy_project(vec, "plus")


def _apply_plus_cols(arr: np.ndarray) -> np.ndarray:
    return cauchy_project(arr, "plus")


def _apply_minus_cols(arr: np.ndarray) -> np.ndarray:
    return cauchy_project(arr, "minus")


def reconstruct_q(grid: ReflectionGrid, n: int, t: float, N: int | None = None) -> complex:
    """q_n(t) = M_{1,2}(0, n+1, t) from the grid's scattering data."""
    jump = build_jump(grid, n + 1, t, N=N)
    solve = solve_beals_coifman(jump, grid_t_ref=grid.t_ref)
    return complex(solve.M_at_zero[0, 1])


def reconstruct_q_detailed(grid: ReflectionGrid, n: int, t: float, N: int | None = None):
    """(q_n(t), BealsCoifmanSolve) for callers that want diagnostics."""
    jump = build_jump(grid, n + 1, t, N=N)
    solve = solve_beals_coifman(jump, grid_t_ref=grid.t_ref)
    return complex(solve.M_at_zero[0, 1]), solve
