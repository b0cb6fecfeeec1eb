"""Gaussian entropy and patch mutual information for a frame pair.

The patch populations of two adjacent frames are modeled as a joint
Gaussian. With the 2d x 2d sample covariance O of the joint matrix and
its d x d diagonal blocks O_prev and O_curr,

    H(C)  = 0.5 * log((2*pi*e)^dim * det(C))          (nats)
    PMI   = H(O_prev) + H(O_curr) - H(O)

PMI is nonnegative for positive-definite block matrices and shrinks as
the two frames decouple, so low PMI marks motion-salient pairs.

Sample covariances of near-duplicate frames are rank deficient, which
makes det(O) collapse; a small trace-scaled diagonal jitter is added and
escalated tenfold until a Cholesky factorization succeeds. Trace scaling
keeps PMI invariant under a common intensity rescale of both frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError, ZeroVarianceError
from .patches import PatchGrid, PatchMatrix, embed_pair

LOG_2PI_E = math.log(2.0 * math.pi) + 1.0

JITTER_CEILING = 1e-2


@dataclass(frozen=True)
class CovarianceDecomposition:
    """Joint covariance with its marginal blocks.

    ``jitter`` is the relative level actually needed: a matrix M of
    dimension m receives ``jitter * trace(M) / m`` on its diagonal before
    factorization. ``escalated`` is set when the base level did not
    suffice.
    """

    joint: np.ndarray
    marginal_prev: np.ndarray
    marginal_curr: np.ndarray
    jitter: float
    escalated: bool = False

    def jitter_amount(self, matrix: np.ndarray) -> float:
        return self.jitter * float(np.trace(matrix)) / matrix.shape[0]

    def jittered(self, matrix: np.ndarray) -> np.ndarray:
        out = matrix.copy()
        out[np.diag_indices_from(out)] += self.jitter_amount(matrix)
        return out


@dataclass(frozen=True)
class PmiValue:
    """PMI in nats plus the three entropies it was composed from."""

    value: float
    h_prev: float
    h_curr: float
    h_joint: float
    degenerate: bool = False


def _cholesky_ok(matrix: np.ndarray, amount: float) -> bool:
    probe = matrix.copy()
    probe[np.diag_indices_from(probe)] += amount
    try:
        np.linalg.cholesky(probe)
    except np.linalg.LinAlgError:
        return False
    return True


def covariance(
    samples: PatchMatrix | np.ndarray,
    d: int | None = None,
    base_jitter: float = 1e-8,
) -> CovarianceDecomposition:
    """Sample covariance of a (2d, N) matrix with the 1/N normalizer.

    Columns are centered on their mean. The marginal blocks are the exact
    top-left and bottom-right d x d sub-blocks of the joint matrix.
    """
    if isinstance(samples, PatchMatrix):
        data = samples.data
        d = samples.grid.dim
    else:
        data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ConfigError("need a 2-D sample matrix with at least 2 columns")
    if data.shape[0] % 2 != 0:
        raise ConfigError("sample matrix must have an even row count (2d)")
    if d is None:
        d = data.shape[0] // 2
    n = data.shape[1]

    centered = data - data.mean(axis=1, keepdims=True)
    joint = centered @ centered.T / n
    joint = (joint + joint.T) * 0.5
    if float(np.trace(joint)) == 0.0:
        raise ZeroVarianceError("zero-variance input: all patch samples are identical")

    prev = np.ascontiguousarray(joint[:d, :d])
    curr = np.ascontiguousarray(joint[d:, d:])

    level = base_jitter
    while level <= JITTER_CEILING * 1.0000001:
        dec = CovarianceDecomposition(joint, prev, curr, jitter=level, escalated=level > base_jitter)
        if all(
            _cholesky_ok(m, dec.jitter_amount(m)) for m in (joint, prev, curr)
        ):
            return dec
        level *= 10.0
    raise NumericalError(
        f"jitter escalation exhausted at {JITTER_CEILING}: covariance stays indefinite"
    )


def gaussian_entropy(cov: np.ndarray | float, dim: int | None = None, floor: float = 0.0) -> float:
    """Differential entropy of a Gaussian with covariance ``cov``, in nats.

    The log-determinant comes from a Cholesky factorization; if that
    fails the symmetric eigendecomposition is used with eigenvalues
    clamped below at ``floor``.
    """
    matrix = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    if not np.all(np.isfinite(matrix)):
        raise NumericalError("non-finite covariance entries")
    if dim is None:
        dim = matrix.shape[0]
    try:
        chol = np.linalg.cholesky(matrix)
        logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    except np.linalg.LinAlgError:
        eigenvalues = np.linalg.eigvalsh(matrix)
        clamp = max(floor, float(np.finfo(np.float64).tiny))
        logdet = float(np.sum(np.log(np.maximum(eigenvalues, clamp))))
    return 0.5 * (dim * LOG_2PI_E + logdet)


def pmi(
    frame_prev: np.ndarray,
    frame_curr: np.ndarray,
    grid: PatchGrid,
    base_jitter: float = 1e-8,
) -> PmiValue:
    """Patch mutual information between two frames, symmetric in its arguments."""
    pair = embed_pair(frame_prev, frame_curr, grid)
    dec = covariance(pair, base_jitter=base_jitter)
    d = grid.dim
    h_prev = gaussian_entropy(
        dec.jittered(dec.marginal_prev), d, floor=dec.jitter_amount(dec.marginal_prev)
    )
    h_curr = gaussian_entropy(
        dec.jittered(dec.marginal_curr), d, floor=dec.jitter_amount(dec.marginal_curr)
    )
    h_joint = gaussian_entropy(
        dec.jittered(dec.joint), 2 * d, floor=dec.jitter_amount(dec.joint)
    )
    value = h_prev + h_curr - h_joint
    if -1e-9 <= value < 0.0:
        value = 0.0
    return PmiValue(value, h_prev, h_curr, h_joint, degenerate=dec.escalated)
