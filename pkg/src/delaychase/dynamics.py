"""Plant construction, LQR synthesis, and delayed-feedback system assembly.

The pursuer is a planar point mass ``m r'' = -c r' + u`` with decoupled x/y
channels and state ordering ``[x, vx, y, vy]``.  Closing the loop with a
delayed full-state feedback on the tracking error yields a linear system with
two discrete delays,

    e'(t) = A e(t) + B1 e(t - tau1) + B2 e(t - tau2),

represented here by :class:`DelaySystem`.  ``tau1`` delays the position
measurements and ``tau2`` the velocity measurements.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_continuous_are, solve_continuous_lyapunov

__all__ = [
    "PlantParams",
    "StateMatrices",
    "LqrWeights",
    "DelaySystem",
    "RiccatiError",
    "build_plant",
    "solve_care",
    "care_residual",
    "lqr_gain",
    "assemble_delay_system",
    "zero_delay_matrix",
    "is_hurwitz",
    "fig9_benchmark",
    "hayes_system",
    "FIG9_A",
    "FIG9_B1",
    "FIG9_B2",
]

STATE_LABELS = ("x", "vx", "y", "vy")


class RiccatiError(ValueError):
    """Raised when the continuous algebraic Riccati equation has no
    stabilizing solution (non-stabilizable pair, indefinite weights, ...)."""


@dataclass(frozen=True)
class PlantParams:
    """Point-mass pursuer parameters: mass ``m`` (kg) and viscous damping
    coefficient ``c`` (N s/m)."""

    m: float
    c: float

    def __post_init__(self):
        if not np.isfinite(self.m) or self.m <= 0:
            raise ValueError(f"mass must be positive and finite, got {self.m}")
        if not np.isfinite(self.c) or self.c < 0:
            raise ValueError(f"damping must be >= 0 and finite, got {self.c}")


@dataclass(frozen=True)
class StateMatrices:
    """State-space pair (A, B) of the open-loop plant."""

    a: np.ndarray  # (4, 4)
    b: np.ndarray  # (4, 2)


def build_plant(params: PlantParams) -> StateMatrices:
    """State-space form of the planar point mass.

    Each axis contributes a 2x2 block ``[[0, 1], [0, -c/m]]``; the input
    matrix has ``1/m`` on the acceleration rows.  Note the (1,2) and (3,4)
    entries are exactly 1 (x' = vx), not 1/m: with state ordering
    ``[x, vx, y, vy]`` any other value would be dimensionally inconsistent.
    """
    m, c = params.m, params.c
    a = np.zeros((4, 4))
    a[0, 1] = 1.0
    a[2, 3] = 1.0
    a[1, 1] = -c / m
    a[3, 3] = -c / m
    b = np.zeros((4, 2))
    b[1, 0] = 1.0 / m
    b[3, 1] = 1.0 / m
    return StateMatrices(a=a, b=b)


def _check_symmetric(name: str, mat: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.max(np.abs(mat - mat.T), initial=0.0) > tol * max(1.0, np.max(np.abs(mat))):
        raise ValueError(f"{name} is not symmetric within {tol}")
    return mat


@dataclass(frozen=True)
class LqrWeights:
    """LQR weighting pair: Q symmetric PSD on the state, R symmetric PD on
    the input."""

    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        q = _check_symmetric("Q", self.q)
        r = _check_symmetric("R", self.r)
        if np.min(np.linalg.eigvalsh(q)) < -1e-12:
            raise ValueError("Q must be positive semidefinite")
        if np.min(np.linalg.eigvalsh(r)) <= 0:
            raise ValueError("R must be positive definite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @classmethod
    def identity(cls, n_states: int = 4, n_inputs: int = 2) -> "LqrWeights":
        return cls(q=np.eye(n_states), r=np.eye(n_inputs))


def care_residual(a, b, q, r, p) -> float:
    """Frobenius norm of A'P + PA - P B R^-1 B' P + Q."""
    res = a.T @ p + p @ a - p @ b @ np.linalg.solve(r, b.T @ p) + q
    return float(np.linalg.norm(res, "fro"))


def solve_care(a, b, weights: LqrWeights, tol: float = 1e-11) -> np.ndarray:
    """Stabilizing solution of the continuous algebraic Riccati equation.

    Delegates to scipy's Schur-based solver, then polishes with a few
    Newton-Kleinman iterations (each solves a Lyapunov equation for the
    closed-loop matrix) so the residual meets ``tol`` even on moderately
    conditioned instances.  Works for any state dimension, including the
    scalar case.

    Raises
    ------
    RiccatiError
        If no finite stabilizing solution exists, e.g. the pair (A, B) is
        not stabilizable.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    q, r = weights.q, weights.r
    try:
        p = solve_continuous_are(a, b, q, r)
    except Exception as exc:
        raise RiccatiError(
            f"CARE has no stabilizing solution for this (A, B, Q, R); "
            f"check that (A, B) is stabilizable and (A, Q^1/2) detectable "
            f"(solver said: {exc})"
        ) from exc

    # Newton-Kleinman polish: quadratically contracts the residual.
    for _ in range(6):
        if care_residual(a, b, q, r, p) <= tol:
            break
        k = np.linalg.solve(r, b.T @ p)
        a_cl = a - b @ k
        p_next = solve_continuous_lyapunov(a_cl.T, -(q + k.T @ r @ k))
        p_next = 0.5 * (p_next + p_next.T)
        if not np.all(np.isfinite(p_next)):
            break
        p = p_next

    if not np.all(np.isfinite(p)):
        raise RiccatiError("CARE solver returned non-finite entries")
    resid = care_residual(a, b, q, r, p)
    if resid > max(tol, 1e-8 * max(1.0, float(np.linalg.norm(p)))):
        raise RiccatiError(f"CARE residual {resid:.3e} did not converge")
    return 0.5 * (p + p.T)


def lqr_gain(a, b, weights: LqrWeights) -> np.ndarray:
    """Optimal state-feedback gain k = R^-1 B' P for the law u = -k e.

    The returned closed loop A - B k is Hurwitz whenever the CARE admits a
    stabilizing solution.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    p = solve_care(a, b, weights)
    k = np.linalg.solve(weights.r, b.T @ p)
    if not is_hurwitz(a - b @ k):
        raise RiccatiError("LQR closed loop is not Hurwitz; CARE solution invalid")
    return k


def is_hurwitz(mat: np.ndarray, margin: float = 0.0) -> bool:
    """True iff every eigenvalue of ``mat`` has real part < -margin."""
    return bool(np.max(np.linalg.eigvals(mat).real) < -margin)


@dataclass(frozen=True)
class DelaySystem:
    """The triple (A, B1, B2) with delay pair (tau1, tau2) of the dynamics
    ``e'(t) = A e(t) + B1 e(t - tau1) + B2 e(t - tau2)``.

    With both delays zero this reduces to the ODE ``e' = (A + B1 + B2) e``.
    Dimension is 4 for the game but arbitrary square matrices are accepted
    (scalar embeddings are used throughout the tests).
    """

    a: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    tau1: float
    tau2: float
    benchmark: str | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError(f"A must be square, got {a.shape}")
        b1 = np.atleast_2d(np.asarray(self.b1, dtype=float))
        b2 = np.atleast_2d(np.asarray(self.b2, dtype=float))
        for name, mat in (("B1", b1), ("B2", b2)):
            if mat.shape != (n, n):
                raise ValueError(f"{name} must have shape {(n, n)}, got {mat.shape}")
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"{name} contains non-finite entries")
        if not np.all(np.isfinite(a)):
            raise ValueError("A contains non-finite entries")
        if self.tau1 < 0 or self.tau2 < 0:
            raise ValueError(f"delays must be >= 0, got ({self.tau1}, {self.tau2})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)
        object.__setattr__(self, "tau1", float(self.tau1))
        object.__setattr__(self, "tau2", float(self.tau2))

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def max_delay(self) -> float:
        return max(self.tau1, self.tau2)

    def with_delays(self, tau1: float, tau2: float) -> "DelaySystem":
        return DelaySystem(self.a, self.b1, self.b2, tau1, tau2, self.benchmark)


def assemble_delay_system(
    plant: StateMatrices,
    k: np.ndarray,
    tau1: float = 0.0,
    tau2: float = 0.0,
    split: str | Sequence[np.ndarray] = "position-velocity",
) -> DelaySystem:
    """Distribute the feedback gains over the two delay channels.

    ``split="position-velocity"`` places the position gains (k11, k23) in B1
    and the velocity gains (k12, k24) in B2, each on the acceleration rows;
    the cross-coupling entries of ``k`` are not used.  Passing a pair of
    matrices instead uses them verbatim after shape/finiteness validation,
    which is how externally specified benchmarks are loaded.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (2, 4):
        raise ValueError(f"gain matrix must be 2x4, got {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("gain matrix contains non-finite entries")

    if isinstance(split, str):
        if split != "position-velocity":
            raise ValueError(f"unknown split mode {split!r}")
        b1 = np.zeros((4, 4))
        b2 = np.zeros((4, 4))
        b1[1, 0] = -k[0, 0]
        b1[3, 2] = -k[1, 2]
        b2[1, 1] = -k[0, 1]
        b2[3, 3] = -k[1, 3]
    else:
        try:
            b1, b2 = split
        except Exception as exc:
            raise ValueError("custom split must be a (B1, B2) pair") from exc
        b1 = np.asarray(b1, dtype=float)
        b2 = np.asarray(b2, dtype=float)
        if b1.shape != (4, 4) or b2.shape != (4, 4):
            raise ValueError(
                f"custom B1/B2 must be 4x4, got {b1.shape} and {b2.shape}"
            )
    return DelaySystem(a=plant.a, b1=b1, b2=b2, tau1=tau1, tau2=tau2)


def zero_delay_matrix(sys: DelaySystem) -> np.ndarray:
    """A + B1 + B2: the system matrix of the zero-delay ODE reduction."""
    return sys.a + sys.b1 + sys.b2


# Canonical benchmark instance: the numeric error dynamics of the original
# planar tracking game.  The A matrix is not derivable from the point-mass
# plant for any (m, c) and is treated as an opaque benchmark; B1 gathers the
# x-channel feedback row, B2 the y-channel row.
FIG9_A = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-305.0, -279.0, -1.0, 1.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 1.0, -40.0, -2.0],
    ]
)
FIG9_B1 = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [-14.514, -1.285, 22.941, -0.283],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ]
)
FIG9_B2 = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [-14.0, -1.0, 23.0, -0.283],
    ]
)


def fig9_benchmark(tau1: float = 0.8, tau2: float = 0.8) -> DelaySystem:
    """The built-in "fig9" benchmark system with the given delay pair."""
    return DelaySystem(
        a=FIG9_A, b1=FIG9_B1, b2=FIG9_B2, tau1=tau1, tau2=tau2, benchmark="fig9"
    )


def hayes_system(tau1: float = 1.0, tau2: float = 0.0) -> DelaySystem:
    """Scalar test family x'(t) = -x(t - tau1); tau2 enters with a zero
    matrix so the delay-plane sweep machinery can still be exercised."""
    return DelaySystem(
        a=np.array([[0.0]]),
        b1=np.array([[-1.0]]),
        b2=np.array([[0.0]]),
        tau1=tau1,
        tau2=tau2,
        benchmark="hayes",
    )
