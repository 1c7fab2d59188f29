"""Lifted finite-horizon matrices: Toeplitz input-output map, circulant wrap,
DFT diagonalization, structured inversion, and initial-step deletion."""

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedCirculantError
from .plants import DiscretePlant, frequency_response, markov_parameters, unstable_zero_count

__all__ = [
    "LiftedModel",
    "DeletedModel",
    "DiagonalizationReport",
    "toeplitz_matrix",
    "step_observability",
    "circulant_matrix",
    "dft_matrix",
    "dft_verify",
    "circulant_inverse",
    "circulant_deviation",
    "delete_initial_steps",
]

# Tolerances fixed by the module contract.
_SINGULAR_RTOL = 1e-12     # circulant eigenvalue magnitude, relative to the largest
_IMAG_RESIDUE_TOL = 1e-10  # allowed imaginary part when realifying complex results


def toeplitz_matrix(plant: DiscretePlant, horizon: int) -> np.ndarray:
    """Lower-triangular Toeplitz map from input history to output history.

    Row k of the product with u reproduces y(k+1) of the state recursion for
    x(0) = 0, honoring the one-step input-to-output delay of the sampled plant.
    """
    m = markov_parameters(plant, horizon)
    P = np.zeros((horizon, horizon))
    for j in range(horizon):
        P[j:, j] = m[: horizon - j]
    return P


def step_observability(plant: DiscretePlant, horizon: int) -> np.ndarray:
    """Stack of C A^k for k = 1 .. horizon, mapping x(0) to the output history."""
    O = np.empty((horizon, plant.order))
    row = plant.C.copy()
    for k in range(horizon):
        row = row @ plant.A
        O[k] = row[0]
    return O


def circulant_matrix(plant: DiscretePlant, horizon: int) -> np.ndarray:
    """Circulant wrap of the Markov parameters: entry (i, j) = C A^((i-j) mod N) B."""
    m = markov_parameters(plant, horizon)
    idx = (np.arange(horizon)[:, None] - np.arange(horizon)[None, :]) % horizon
    return m[idx]


@dataclass(frozen=True)
class LiftedModel:
    """Finite-horizon matrices of a sampled plant over `horizon` steps."""

    plant: DiscretePlant
    horizon: int
    markov: np.ndarray
    toeplitz: np.ndarray
    observability: np.ndarray
    circulant: np.ndarray

    @classmethod
    def build(cls, plant: DiscretePlant, horizon: int) -> "LiftedModel":
        if horizon < 1:
            raise ValueError("horizon must be at least one step")
        fields = {
            "markov": markov_parameters(plant, horizon),
            "toeplitz": toeplitz_matrix(plant, horizon),
            "observability": step_observability(plant, horizon),
            "circulant": circulant_matrix(plant, horizon),
        }
        for a in fields.values():
            a.flags.writeable = False
        return cls(plant=plant, horizon=horizon, **fields)

    @property
    def period(self):
        return self.plant.period


@dataclass(frozen=True)
class DeletedModel:
    """Lifted model with the first q time steps removed from the learning objective.

    toeplitz: rows q+1..N of the full Toeplitz map, shape (N-q, N).
    circulant_inverse: columns q+1..N of the inverse circulant, shape (N, N-q).
    """

    q: int
    toeplitz: np.ndarray
    circulant_inverse: np.ndarray

    @property
    def horizon(self):
        return self.toeplitz.shape[1]


def dft_matrix(n: int) -> np.ndarray:
    """Forward DFT matrix with entries z0^(-j*k) for z0 = exp(2 pi i / n)."""
    j = np.arange(n)
    z0 = np.exp(2j * np.pi / n)
    return z0 ** (-np.outer(j, j))


@dataclass(frozen=True)
class DiagonalizationReport:
    """Result of conjugating the circulant by the DFT matrix.

    diagonal: the N complex diagonal entries of H Pc H^-1.
    transfer: C (zI - A)^-1 B at z = z0^j for each observable frequency.
    aligned_error: |diagonal - z * transfer| per frequency. The circulant's
        eigenvalues carry the raw Markov sequence, one sample ahead of the
        delayed input-to-output response, hence the z factor.
    tail_norm: spectral norm of A^(N-1), the truncation scale of the match.
    """

    max_offdiag: float
    diagonal: np.ndarray
    transfer: np.ndarray
    aligned_error: np.ndarray
    tail_norm: float

    @property
    def max_aligned_error(self):
        return float(np.max(self.aligned_error))


def dft_verify(model: LiftedModel, plant: DiscretePlant | None = None) -> DiagonalizationReport:
    """Diagonalize the circulant by the DFT and compare with the frequency response."""
    plant = plant if plant is not None else model.plant
    n = model.horizon
    H = dft_matrix(n)
    PE = H @ model.circulant @ np.linalg.inv(H)
    off = PE - np.diag(np.diag(PE))
    diagonal = np.diag(PE).copy()
    zs = np.exp(2j * np.pi / n) ** np.arange(n)
    transfer = np.array([frequency_response(plant, z) for z in zs])
    aligned = np.abs(diagonal - zs * transfer)
    tail = np.linalg.norm(np.linalg.matrix_power(plant.A, n - 1), 2)
    return DiagonalizationReport(
        max_offdiag=float(np.max(np.abs(off))),
        diagonal=diagonal,
        transfer=transfer,
        aligned_error=aligned,
        tail_norm=float(tail),
    )


def circulant_inverse(model: LiftedModel) -> np.ndarray:
    """Invert the circulant through its DFT eigenvalues.

    The eigenvalues are the DFT of the first column; the inverse is the
    circulant built from the inverse DFT of their reciprocals, so the result
    is circulant by construction.
    """
    n = model.horizon
    eigs = np.fft.fft(model.markov)
    mags = np.abs(eigs)
    bad = np.where(mags < _SINGULAR_RTOL * mags.max())[0]
    if bad.size:
        raise IllConditionedCirculantError(bad.tolist(), mags[bad].tolist())
    col = np.fft.ifft(1.0 / eigs)
    residue = np.max(np.abs(col.imag))
    if residue > _IMAG_RESIDUE_TOL:
        raise ArithmeticError(f"imaginary residue {residue:.3e} in circulant inverse")
    first = col.real
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return first[idx]


def circulant_deviation(matrix: np.ndarray) -> float:
    """Largest spread of any wrapped diagonal; zero for an exact circulant."""
    n = matrix.shape[0]
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    worst = 0.0
    for d in range(n):
        vals = matrix[idx == d]
        worst = max(worst, float(vals.max() - vals.min()))
    return worst


def delete_initial_steps(
    model: LiftedModel, inverse: np.ndarray, q: int | None = None
) -> DeletedModel:
    """Drop the first q rows of the Toeplitz map and columns of the inverse circulant.

    q defaults to the plant's count of sampling zeros outside the unit circle,
    the directions that make exact inversion of the full map ill-posed.
    """
    if q is None:
        q = unstable_zero_count(model.plant)
    n = model.horizon
    if not 0 <= q < n:
        raise ValueError(f"deletion count q = {q} must satisfy 0 <= q < N = {n}")
    toeplitz = model.toeplitz[q:, :].copy()
    circ_inv = inverse[:, q:].copy()
    toeplitz.flags.writeable = False
    circ_inv.flags.writeable = False
    return DeletedModel(q=q, toeplitz=toeplitz, circulant_inverse=circ_inv)
