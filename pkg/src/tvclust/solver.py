"""Alternating-direction augmented-Lagrangian solver for gradient-sparse synthesis.

Minimizes ||grad w||_1 subject to H w = f_ref by alternating a closed-form
shrinkage update of the auxiliary gradient variable with one Barzilai-Borwein
descent step on the excitations, followed by a multiplier update. The solver
contains no randomness: identical inputs produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .array_model import RadiationOperator, discrete_gradient, gradient_adjoint
from .reference import ReferencePattern

__all__ = [
    "SolverConfig",
    "SolverState",
    "SolveResult",
    "SolverDivergenceError",
    "shrink",
    "al_objective",
    "al_gradient",
    "bb_step",
    "armijo_accept",
    "update_multipliers",
    "check_convergence",
    "solve",
]

TRACE_COLUMNS = ("iter", "phi", "grad_norm", "tv_residual", "fit_residual", "sigma", "rho")


class SolverDivergenceError(RuntimeError):
    """Raised when the objective or gradient becomes non-finite."""

    def __init__(self, iteration: int, what: str):
        super().__init__(f"solver diverged at iteration {iteration}: non-finite {what}")
        self.iteration = iteration


@dataclass(frozen=True)
class SolverConfig:
    """Penalty weights and loop controls.

    beta weighs the gradient-consistency penalty, gamma the pattern-fit
    penalty; nu is the Armijo acceptance parameter, delta the relative-step
    convergence threshold.
    """

    beta: float = 32.0
    gamma: float = 1024.0
    nu: float = 1e-4
    delta: float = 1e-5
    max_iter: int = 5000
    backtrack_shrink: float = 0.5
    backtrack_max: int = 30

    def __post_init__(self):
        if self.beta <= 0 or self.gamma <= 0:
            raise ValueError("beta and gamma must be positive")
        if not 0.0 < self.nu < 1.0:
            raise ValueError("nu must lie in (0, 1)")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0.0 < self.backtrack_shrink < 1.0:
            raise ValueError("backtrack_shrink must lie in (0, 1)")
        if self.backtrack_max < 1:
            raise ValueError("backtrack_max must be >= 1")


@dataclass(frozen=True)
class SolverState:
    """One snapshot of the alternating-direction iterates."""

    w: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray
    eta: np.ndarray
    d: Optional[np.ndarray] = None
    d_prev: Optional[np.ndarray] = None
    w_prev: Optional[np.ndarray] = None
    sigma: float = 1.0
    rho: float = 1.0
    iter: int = 1


@dataclass(frozen=True)
class SolveResult:
    w_hat: np.ndarray
    iterations: int
    terminated_by: str  # "converged" | "max_iter"
    objective_trace: np.ndarray
    constraint_residuals: tuple  # (||grad w - alpha||_2, ||H w - f||_2)
    trace: np.ndarray = field(repr=False, default=None)  # columns: TRACE_COLUMNS


def shrink(v, beta: float) -> np.ndarray:
    """Complex soft-thresholding: the closed-form auxiliary-variable update.

    Per entry returns max(|v| - 1/beta, 0) * v/|v|, with the sign factor
    defined as zero at the origin. This is the exact minimizer of
    |a| + Re[conj(mu) (a - g)] + beta/2 |g - a|^2 when called with
    v = g - mu/beta.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    v = np.asarray(v, dtype=complex)
    mag = np.abs(v)
    out = np.zeros_like(v)
    nz = mag > 0
    out[nz] = np.maximum(mag[nz] - 1.0 / beta, 0.0) * (v[nz] / mag[nz])
    return out


def _phi(alpha, r, s, mu, eta, beta: float, gamma: float) -> float:
    """Augmented-Lagrangian value from precomputed residuals r, s.

    The multiplier terms enter through their real parts so the objective is
    real-valued; the l1 term sums complex moduli.
    """
    return float(
        np.sum(np.abs(alpha))
        - np.real(np.vdot(mu, r))
        - np.real(np.vdot(eta, s))
        + 0.5 * beta * np.real(np.vdot(r, r))
        + 0.5 * gamma * np.real(np.vdot(s, s))
    )


def al_objective(state: SolverState, H: RadiationOperator, f_ref: ReferencePattern,
                 config: SolverConfig) -> float:
    r = discrete_gradient(state.w) - state.alpha
    s = H.matrix @ state.w - f_ref.samples
    return _phi(state.alpha, r, s, state.mu, state.eta, config.beta, config.gamma)


def al_gradient(state: SolverState, H: RadiationOperator, f_ref: ReferencePattern,
                config: SolverConfig) -> np.ndarray:
    """Steepest-ascent direction of the objective with respect to w.

    Computed as adj(grad)(beta (grad w - alpha) - mu) + H^* (gamma (H w - f) - eta),
    which matches central finite differences of the objective coordinate-wise:
    the real/imaginary parts of the output equal d(phi)/dx and d(phi)/dy.
    """
    r = discrete_gradient(state.w) - state.alpha
    s = H.matrix @ state.w - f_ref.samples
    return gradient_adjoint(config.beta * r - state.mu) + H.matrix.conj().T @ (
        config.gamma * s - state.eta
    )


def bb_step(w, w_prev, d, d_prev) -> float:
    """Barzilai-Borwein step length, with fallback 1 on non-positive curvature."""
    s = np.asarray(w) - np.asarray(w_prev)
    y = np.asarray(d) - np.asarray(d_prev)
    den = np.real(np.vdot(s, y))
    if den <= 0:
        return 1.0
    sigma = np.real(np.vdot(s, s)) / den
    if not np.isfinite(sigma) or sigma <= 0:
        return 1.0
    return float(sigma)


def armijo_accept(phi_old: float, phi_new: float, rho: float, sigma: float,
                  d, nu: float) -> bool:
    """Sufficient-decrease test: (phi_old - phi_new) / (rho sigma ||d||^2) >= nu."""
    dn2 = np.real(np.vdot(d, d))
    if dn2 == 0:
        raise ValueError("zero descent direction: treat as converged instead")
    return (phi_old - phi_new) / (rho * sigma * dn2) >= nu


def update_multipliers(state: SolverState, H: RadiationOperator, f_ref: ReferencePattern,
                       config: SolverConfig):
    """Multiplier steps mu - beta (grad w - alpha) and eta - gamma (H w - f)."""
    r = discrete_gradient(state.w) - state.alpha
    s = H.matrix @ state.w - f_ref.samples
    return state.mu - config.beta * r, state.eta - config.gamma * s


def check_convergence(w_next, w, delta: float) -> bool:
    """Relative-step test ||w_next - w|| <= delta ||w||; false while w is all-zero."""
    scale = np.linalg.norm(w)
    if scale == 0:
        return False
    return np.linalg.norm(np.asarray(w_next) - np.asarray(w)) <= delta * scale


def solve(H: RadiationOperator, f_ref: ReferencePattern,
          config: SolverConfig = SolverConfig()) -> SolveResult:
    """Run the alternating-direction loop from the all-zero start.

    Each iteration performs, in order: the shrinkage update of the auxiliary
    gradient variable, one descent step on w (Barzilai-Borwein length, scaled
    back until the Armijo test accepts or the trial budget is spent), and the
    multiplier updates. Terminates on the relative-step test or after
    ``max_iter`` iterations, whichever comes first.
    """
    Hm = H.matrix
    f = np.asarray(f_ref.samples, dtype=complex)
    if Hm.shape[0] != f.size:
        raise ValueError(f"reference length {f.size} does not match operator M={Hm.shape[0]}")
    if not np.any(f):
        raise ValueError("reference pattern is identically zero")
    beta, gamma = config.beta, config.gamma
    Hh = np.conjugate(Hm).T

    n = Hm.shape[1]
    w = np.zeros(n, dtype=complex)
    mu = np.zeros(n, dtype=complex)
    eta = np.zeros(f.size, dtype=complex)
    Dw = np.zeros(n, dtype=complex)
    Hw = np.zeros(f.size, dtype=complex)
    w_prev = d_prev = None
    sigma = 1.0
    alpha = np.zeros(n, dtype=complex)

    rows = []
    terminated = "max_iter"
    iterations = config.max_iter
    for k in range(1, config.max_iter + 1):
        alpha = shrink(Dw - mu / beta, beta)
        r0 = Dw - alpha
        s0 = Hw - f
        d = gradient_adjoint(beta * r0 - mu) + Hh @ (gamma * s0 - eta)
        if not np.all(np.isfinite(d)):
            raise SolverDivergenceError(k, "gradient")
        dn2 = np.real(np.vdot(d, d))
        if dn2 == 0.0:
            # stationary point of the current subproblem; nothing left to move
            phi = _phi(alpha, r0, s0, mu, eta, beta, gamma)
            rows.append((k, phi, 0.0, np.linalg.norm(r0), np.linalg.norm(s0), sigma, 0.0))
            iterations, terminated = k, "converged"
            break

        if w_prev is not None:
            sigma = bb_step(w, w_prev, d, d_prev)
        Dd = discrete_gradient(d)
        Hd = Hm @ d
        phi_old = _phi(alpha, r0, s0, mu, eta, beta, gamma)
        rho = 1.0
        for trial in range(config.backtrack_max):
            t = rho * sigma
            phi_new = _phi(alpha, r0 - t * Dd, s0 - t * Hd, mu, eta, beta, gamma)
            if armijo_accept(phi_old, phi_new, rho, sigma, d, config.nu):
                break
            if trial + 1 < config.backtrack_max:
                rho *= config.backtrack_shrink
        if not np.isfinite(phi_new):
            raise SolverDivergenceError(k, "objective")

        w_next = w - (rho * sigma) * d
        Dw_next = discrete_gradient(w_next)
        Hw_next = Hm @ w_next
        r_new = Dw_next - alpha
        s_new = Hw_next - f
        mu = mu - beta * r_new
        eta = eta - gamma * s_new
        rows.append((k, phi_new, np.sqrt(dn2), np.linalg.norm(r_new),
                     np.linalg.norm(s_new), sigma, rho))

        converged = check_convergence(w_next, w, config.delta)
        w_prev, d_prev = w, d
        w, Dw, Hw = w_next, Dw_next, Hw_next
        if converged:
            iterations, terminated = k, "converged"
            break

    trace = np.asarray(rows, dtype=float)
    return SolveResult(
        w_hat=w,
        iterations=iterations,
        terminated_by=terminated,
        objective_trace=trace[:, 1].copy(),
        constraint_residuals=(
            float(np.linalg.norm(Dw - alpha)),
            float(np.linalg.norm(Hw - f)),
        ),
        trace=trace,
    )
