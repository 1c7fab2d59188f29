"""Spectral analysis of error propagation matrices and overall-gain sweeps."""

from dataclasses import dataclass

import numpy as np

from .lifted import DeletedModel

__all__ = ["ConvergenceReport", "GainSweep", "analyze", "gain_sweep"]


@dataclass(frozen=True)
class ConvergenceReport:
    """Spectrum of an error propagation matrix.

    converges: spectral radius below one (errors vanish asymptotically).
    monotonic: largest singular value below one (Euclidean error norm shrinks
    every run, for every initial error).
    """

    singular_values: np.ndarray
    eigenvalue_magnitudes: np.ndarray
    spectral_radius: float
    converges: bool
    monotonic: bool

    @property
    def sigma_max(self):
        return float(self.singular_values[0])


def _sorted_magnitudes(values):
    mags = np.abs(values)
    order = np.argsort(-mags, kind="stable")  # ties keep original index order
    return mags[order]


def analyze(matrix: np.ndarray) -> ConvergenceReport:
    """Full singular and eigenvalue spectra, sorted by descending magnitude."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("error propagation matrix must be square")
    singular = np.linalg.svd(matrix, compute_uv=False)
    eigen = _sorted_magnitudes(np.linalg.eigvals(matrix))
    rho = float(eigen[0]) if eigen.size else 0.0
    return ConvergenceReport(
        singular_values=singular,
        eigenvalue_magnitudes=eigen,
        spectral_radius=rho,
        converges=bool(rho < 1.0),
        monotonic=bool(singular[0] < 1.0) if singular.size else True,
    )


@dataclass(frozen=True)
class GainSweep:
    """Per-gain largest singular value and spectral radius of I - phi P Pc_inv."""

    gains: np.ndarray
    sigma_max: np.ndarray
    spectral_radius: np.ndarray

    @property
    def best_index(self):
        return int(np.argmin(self.sigma_max))

    @property
    def best_gain(self):
        return float(self.gains[self.best_index])


def gain_sweep(deleted: DeletedModel, gains) -> GainSweep:
    """Analyze I - phi P_q Pc_inv_q over a grid of overall gains phi."""
    gains = np.asarray(gains, dtype=float)
    if gains.size == 0:
        raise ValueError("gain grid must be nonempty")
    base = deleted.toeplitz @ deleted.circulant_inverse
    n = base.shape[0]
    sigma = np.empty(gains.size)
    rho = np.empty(gains.size)
    for i, phi in enumerate(gains):
        report = analyze(np.eye(n) - phi * base)
        sigma[i] = report.sigma_max
        rho[i] = report.spectral_radius
    return GainSweep(gains=gains, sigma_max=sigma, spectral_radius=rho)
