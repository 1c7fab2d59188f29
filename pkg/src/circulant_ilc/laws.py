"""Learning gain matrix constructions and the error propagation map I - P L."""

from dataclasses import dataclass, field

import numpy as np

from .lifted import DeletedModel

__all__ = [
    "LearningLaw",
    "signed_svd",
    "inverse_circulant_law",
    "scaled_inverse_circulant_law",
    "accelerated_law",
    "partial_isometry_law",
    "contraction_mapping_law",
    "quadratic_cost_law",
    "error_propagation",
]

KINDS = (
    "inverse_circulant",
    "optimized_inverse_circulant",
    "accelerated",
    "scaled_inverse_circulant",
    "partial_isometry",
    "contraction_mapping",
    "quadratic_cost",
)


@dataclass(frozen=True)
class LearningLaw:
    """A gain matrix mapping an error history to an input-history update.

    For deletion count q the gain is N x (N-q): it consumes the error at the
    surviving steps and updates the full input history.
    """

    gain: np.ndarray
    kind: str
    q: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown law kind {self.kind!r}")
        g = np.array(self.gain, dtype=float)
        g.flags.writeable = False
        object.__setattr__(self, "gain", g)

    @property
    def shape(self):
        return self.gain.shape


def signed_svd(matrix: np.ndarray):
    """SVD with a fixed sign convention.

    The largest-magnitude entry of each left singular vector is made positive
    and the flip is propagated to the matching right vector, so downstream
    vector-based constructions are deterministic across platforms.
    """
    U, s, Vt = np.linalg.svd(matrix)
    k = min(U.shape[1], Vt.shape[0])
    for i in range(k):
        lead = np.argmax(np.abs(U[:, i]))
        if U[lead, i] < 0:
            U[:, i] = -U[:, i]
            Vt[i, :] = -Vt[i, :]
    return U, s, Vt


def inverse_circulant_law(deleted: DeletedModel) -> LearningLaw:
    """The deleted inverse circulant itself as the learning gain."""
    return LearningLaw(deleted.circulant_inverse, "inverse_circulant", deleted.q)


def scaled_inverse_circulant_law(deleted: DeletedModel, overall_gain: float) -> LearningLaw:
    """Deleted inverse circulant scaled by a single overall gain."""
    return LearningLaw(
        overall_gain * deleted.circulant_inverse,
        "scaled_inverse_circulant",
        deleted.q,
        params={"phi": float(overall_gain)},
    )


def accelerated_law(deleted: DeletedModel, power: int) -> LearningLaw:
    """Gain whose propagation matrix is the `power`-th power of the base one.

    Built from the geometric sum L = Pc_inv * sum_{k<p} (I - P Pc_inv)^k, which
    equals P^-1 [I - (I - P Pc_inv)^p] without forming the catastrophically
    ill-conditioned P^-1.
    """
    if power < 1:
        raise ValueError("power must be at least 1")
    P = deleted.toeplitz
    C = deleted.circulant_inverse
    n = P.shape[0]
    E = np.eye(n) - P @ C
    total = np.eye(n)
    term = np.eye(n)
    for _ in range(power - 1):
        term = term @ E
        total = total + term
    return LearningLaw(C @ total, "accelerated", deleted.q, params={"power": int(power)})


def partial_isometry_law(p_matrix: np.ndarray) -> LearningLaw:
    """V U^T from the thin SVD of the (possibly row-deleted) plant matrix."""
    rows, cols = p_matrix.shape
    U, s, Vt = np.linalg.svd(p_matrix, full_matrices=False)
    if s[-1] <= rows * np.finfo(float).eps * s[0]:
        raise ValueError("plant matrix is rank deficient; partial isometry undefined")
    return LearningLaw(Vt.T @ U.T, "partial_isometry", cols - rows)


def contraction_mapping_law(p_matrix: np.ndarray, gain: float = 1.0) -> LearningLaw:
    """Scaled transpose of the plant matrix."""
    rows, cols = p_matrix.shape
    return LearningLaw(
        gain * p_matrix.T, "contraction_mapping", cols - rows, params={"gain": float(gain)}
    )


def quadratic_cost_law(p_matrix: np.ndarray, weight: float = 1.0) -> LearningLaw:
    """(P^T P + w I)^-1 P^T, the minimizer of ||e||^2 + w ||du||^2 per step."""
    if weight <= 0:
        raise ValueError("weight must be positive")
    rows, cols = p_matrix.shape
    gain = np.linalg.solve(p_matrix.T @ p_matrix + weight * np.eye(cols), p_matrix.T)
    return LearningLaw(gain, "quadratic_cost", cols - rows, params={"weight": float(weight)})


def error_propagation(p_matrix: np.ndarray, law) -> np.ndarray:
    """I - P L, the map from one run's error history to the next."""
    gain = law.gain if isinstance(law, LearningLaw) else np.asarray(law)
    rows, cols = p_matrix.shape
    if gain.shape != (cols, rows):
        raise ValueError(
            f"gain shape {gain.shape} incompatible with plant matrix {p_matrix.shape}"
        )
    return np.eye(rows) - p_matrix @ gain
