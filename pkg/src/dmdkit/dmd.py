"""Dynamic mode decomposition in companion and SVD form.

Both fits regress a one-step linear operator from snapshot pairs. The
companion fit works on the longest leading block of snapshot columns that is
numerically independent and expresses the next snapshot as a combination of
those columns; its eigenvalue problem is the companion matrix of the
regression coefficients. The SVD fit projects the shifted snapshots onto the
dominant left singular subspace and eigendecomposes the reduced operator,
which is far better behaved on noisy or rank-deficient data.

``fit_svd_dmd`` returns a ``KoopmanModel`` carrying eigenvalues, modes in
observable space, and the SVD factors needed to evaluate eigenfunctions and
run spectral predictions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import SnapshotPair, Trajectory, delay_embed, snapshot_pairs
from .errors import (
    ConditioningError,
    ConfigError,
    EmptyRankError,
    NumericalError,
    ShapeError,
)
from .linalg import DEFAULT_RTOL, SvdFactors, eig, pinv, svd_truncated

# companion precondition: the regression block must be well conditioned
# (condition number below 1e12), so columns are accepted while the smallest
# singular value stays above 1e-12 times the largest
_COMPANION_RTOL = 1e-12
_ZERO_EIGENVALUE_TOL = 1e-12
_IMAG_RESIDUE_TOL = 1e-8


@dataclass(frozen=True)
class CompanionFit:
    """Companion-matrix regression result.

    ``vandermonde_t`` has rows that are geometric progressions of the
    eigenvalues, T[i, j] = lambda_i**j, and ``window`` is the number of
    leading snapshot columns the regression used.
    """

    c_matrix: np.ndarray
    eigenvalues: np.ndarray
    vandermonde_t: np.ndarray
    window: int


@dataclass(frozen=True)
class KoopmanModel:
    """SVD-based DMD fit: reduced operator, spectrum, and observable modes."""

    k_hat: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors_p: np.ndarray
    modes_v: np.ndarray
    svd: SvdFactors
    observable_dim: int
    fit_residual: float
    algorithm_tag: str = "dmd"
    flags: tuple = ()


def _leading_window(x: np.ndarray) -> int:
    """Largest j such that the first j columns are numerically independent."""
    window = 0
    for j in range(1, min(x.shape) + 1):
        s = np.linalg.svd(x[:, :j], compute_uv=False)
        if s[-1] <= _COMPANION_RTOL * s[0]:
            break
        window = j
    return window


def fit_companion(pair: SnapshotPair) -> CompanionFit:
    """Regress the successor of the leading independent snapshot block.

    The block's next snapshot is written as x@c by least squares; the
    companion matrix of c carries the eigenvalues. Data whose matrix is
    rank-deficient (rank below both dimensions) loses information in this
    representation, so that case is rejected in favor of the SVD fit.
    """
    x, xp = pair.x, pair.xp
    if x.shape[1] < 2:
        raise ShapeError("companion fit needs at least 2 snapshot columns")
    s_all = np.linalg.svd(x, compute_uv=False)
    if s_all[0] <= 0.0:
        raise EmptyRankError("snapshot matrix is identically zero")
    rank = int(np.count_nonzero(s_all > _COMPANION_RTOL * s_all[0]))
    if rank < min(x.shape):
        raise ConditioningError(
            f"snapshot matrix is numerically rank-deficient (rank {rank} of "
            f"{x.shape[0]}x{x.shape[1]}); use fit_svd_dmd instead"
        )
    window = _leading_window(x)
    if window == 0:
        raise EmptyRankError("no usable snapshot columns")
    coeffs = pinv(x[:, :window], rtol=_COMPANION_RTOL) @ xp[:, window - 1]
    c_matrix = np.zeros((window, window))
    c_matrix[1:, :-1] = np.eye(window - 1)
    c_matrix[:, -1] = coeffs
    values = eig(c_matrix).values
    vander = np.vander(values, N=window, increasing=True)
    return CompanionFit(c_matrix=c_matrix, eigenvalues=values,
                        vandermonde_t=vander, window=window)


def companion_modes(fit: CompanionFit, pair: SnapshotPair) -> np.ndarray:
    """Modes as snapshot combinations: columns of x[:, :window] @ inv(T)."""
    if pair.x.shape[1] < fit.window:
        raise ShapeError("pair has fewer columns than the fitted window")
    t = fit.vandermonde_t
    if np.linalg.cond(t) > 1e12:
        raise NumericalError(
            "Vandermonde matrix is numerically singular (repeated or "
            "clustered eigenvalues); modes are not recoverable"
        )
    return np.linalg.solve(t.T, pair.x[:, :fit.window].T.astype(complex)).T


def _mode_columns(xp, factors, values, vectors):
    """Observable-space modes (1/lambda) xp W inv(Sigma) p, zero-lambda flagged."""
    base = xp @ (factors.w / factors.sigma) @ vectors
    modes = np.zeros(base.shape, dtype=complex)
    alive = np.abs(values) > _ZERO_EIGENVALUE_TOL
    modes[:, alive] = base[:, alive] / values[alive]
    return modes, bool(np.any(~alive))


def fit_svd_dmd(pair: SnapshotPair, rtol: float = DEFAULT_RTOL) -> KoopmanModel:
    """Project the shift operator onto the leading singular subspace.

    The reduced operator U^T xp W inv(Sigma) is eigendecomposed; modes are
    lifted back to observable space. ``fit_residual`` is the relative error
    of the spectral reconstruction of xp on the training columns.
    """
    factors = svd_truncated(pair.x, rtol)
    k_hat = factors.u.T @ pair.xp @ (factors.w / factors.sigma)
    spectrum = eig(k_hat)
    modes, has_zero = _mode_columns(pair.xp, factors, spectrum.values, spectrum.vectors)

    flags = []
    if pair.x.shape[1] == 1:
        flags.append("degenerate_single_column")
    if has_zero:
        flags.append("zero_eigenvalue_modes")

    amps = np.linalg.lstsq(modes, pair.x.astype(complex), rcond=None)[0]
    recon = modes @ (spectrum.values[:, None] * amps)
    denom = np.linalg.norm(pair.xp)
    residual = float(np.linalg.norm(pair.xp - recon) / (denom if denom > 0 else 1.0))

    return KoopmanModel(
        k_hat=k_hat,
        eigenvalues=spectrum.values,
        eigenvectors_p=spectrum.vectors,
        modes_v=modes,
        svd=factors,
        observable_dim=pair.n_observables,
        fit_residual=residual,
        flags=tuple(flags),
    )


def dmd_modes(model: KoopmanModel, pair: SnapshotPair) -> np.ndarray:
    """Recompute the observable-space modes of a fitted model from its pair."""
    if pair.n_observables != model.observable_dim:
        raise ShapeError(
            f"pair has {pair.n_observables} observables, model expects "
            f"{model.observable_dim}"
        )
    modes, _ = _mode_columns(pair.xp, model.svd, model.eigenvalues,
                             model.eigenvectors_p)
    return modes


def eigenfunction_values(model: KoopmanModel, z) -> np.ndarray:
    """Eigenfunction values inv(P) U^T z; columns of z give columns of phi."""
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    cols = z[:, None] if single else z
    if cols.shape[0] != model.observable_dim:
        raise ShapeError(
            f"z has dimension {cols.shape[0]}, model expects {model.observable_dim}"
        )
    lifted = model.svd.u.T @ cols
    try:
        phi = np.linalg.solve(model.eigenvectors_p, lifted.astype(complex))
    except np.linalg.LinAlgError as err:
        raise NumericalError(f"eigenvector matrix is singular: {err}") from err
    return phi[:, 0] if single else phi


def full_operator(model: KoopmanModel) -> np.ndarray:
    """Lift the reduced operator back to observable space, U K_hat U^T."""
    return model.svd.u @ model.k_hat @ model.svd.u.T


def _discard_imaginary(values: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values.real))) if values.size else 0.0)
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if residue > _IMAG_RESIDUE_TOL * scale:
        raise NumericalError(
            f"prediction has imaginary residue {residue:.3e}; the spectrum "
            "is not conjugate-consistent with real data"
        )
    return values.real


def _spectral_predict(modes, values, amplitudes, steps: int) -> np.ndarray:
    """Advance amplitudes through eigenvalue powers, m = 1..steps."""
    out = np.empty((steps, modes.shape[0]))
    state = amplitudes.astype(complex)
    for m in range(steps):
        state = state * values
        out[m] = _discard_imaginary(modes @ state)
    return out


def predict(model: KoopmanModel, g0, steps: int) -> np.ndarray:
    """Spectral forecast g_m = sum_i lambda_i^m phi_i(g0) v_i for m=1..steps.

    g0 is expanded in the mode basis by least squares; a rank-deficient mode
    matrix still predicts but emits a warning, since the projection is then
    not unique.
    """
    if not isinstance(steps, (int, np.integer)) or steps < 0:
        raise ConfigError(f"steps must be a non-negative integer, got {steps}")
    g0 = np.asarray(g0, dtype=float).ravel()
    if g0.size != model.observable_dim:
        raise ShapeError(
            f"g0 has dimension {g0.size}, model expects {model.observable_dim}"
        )
    amps, _, rank, _ = np.linalg.lstsq(model.modes_v, g0.astype(complex), rcond=None)
    if rank < min(model.modes_v.shape):
        warnings.warn(
            "mode matrix is rank-deficient; prediction uses a least-squares "
            "projection of g0",
            RuntimeWarning,
            stacklevel=2,
        )
    return _spectral_predict(model.modes_v, model.eigenvalues, amps, steps)


def embedding_sweep(traj: Trajectory, depths, rtol: float = DEFAULT_RTOL):
    """Fit a model per embedding depth and report (h, fit residual) pairs.

    The true state dimension is rarely known from data, so this sweeps
    candidate depths; the residual drops sharply once the embedding is deep
    enough to linearize the observed dynamics.
    """
    report = []
    for h in depths:
        embedded = delay_embed(traj, h)
        model = fit_svd_dmd(snapshot_pairs(embedded), rtol)
        report.append((int(h), model.fit_residual))
    return report
