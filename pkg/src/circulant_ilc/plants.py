"""Factored continuous-time plants, zero-order-hold sampling, and pulse-response data.

Plants are products of unity-DC-gain sections: first-order a/(s+a) and
second-order w^2/(s^2 + 2*zeta*w*s + w^2). Everything downstream depends only
on the Markov parameters of the sampled system, which are invariant to the
realization chosen here.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ContinuousPlant",
    "ContinuousStateSpace",
    "DiscretePlant",
    "realize",
    "discretize_zoh",
    "markov_parameters",
    "frequency_response",
    "sampling_zeros",
    "unstable_zero_count",
    "Preset",
    "PRESETS",
]


@dataclass(frozen=True)
class ContinuousPlant:
    """Strictly proper plant given as a product of unity-DC-gain sections.

    first_order: pole magnitudes a (rad/s), one section a/(s+a) each.
    second_order: (natural frequency, damping ratio) pairs.
    """

    first_order: tuple = ()
    second_order: tuple = ()

    def __post_init__(self):
        fo = tuple(float(a) for a in self.first_order)
        so = tuple((float(w), float(z)) for w, z in self.second_order)
        object.__setattr__(self, "first_order", fo)
        object.__setattr__(self, "second_order", so)
        if not fo and not so:
            raise ValueError("plant needs at least one section")
        if any(a <= 0 for a in fo):
            raise ValueError("first-order pole parameters must be positive")
        if any(w <= 0 or z <= 0 for w, z in so):
            raise ValueError("second-order sections need positive frequency and damping")

    @property
    def order(self):
        return len(self.first_order) + 2 * len(self.second_order)

    def transfer(self, s):
        """Evaluate the factored transfer function at complex frequency s."""
        g = 1.0 + 0.0j
        for a in self.first_order:
            g *= a / (s + a)
        for w, z in self.second_order:
            g *= w * w / (s * s + 2.0 * z * w * s + w * w)
        return g


def _readonly(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ContinuousStateSpace:
    """Strictly proper continuous-time realization dx/dt = A x + B u, y = C x.

    Realizations of a ContinuousPlant are always strictly stable; marginal
    systems (an integrator, say) are still representable for direct use.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _readonly(self.A))
        object.__setattr__(self, "B", _readonly(np.reshape(self.B, (-1, 1))))
        object.__setattr__(self, "C", _readonly(np.reshape(self.C, (1, -1))))

    @property
    def order(self):
        return self.A.shape[0]

    def transfer(self, s):
        """C (sI - A)^-1 B at complex frequency s."""
        n = self.order
        return complex((self.C @ np.linalg.solve(s * np.eye(n) - self.A, self.B))[0, 0])


@dataclass(frozen=True)
class DiscretePlant:
    """Sampled system x(k+1) = A x(k) + B u(k), y(k) = C x(k), sample period T."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    period: float

    def __post_init__(self):
        object.__setattr__(self, "A", _readonly(self.A))
        object.__setattr__(self, "B", _readonly(np.reshape(self.B, (-1, 1))))
        object.__setattr__(self, "C", _readonly(np.reshape(self.C, (1, -1))))
        if self.period <= 0:
            raise ValueError("sample period must be positive")

    @property
    def order(self):
        return self.A.shape[0]


def _series(first, second):
    """Cascade two (A, B, C) triples: output of the first drives the second."""
    A1, B1, C1 = first
    A2, B2, C2 = second
    n1, n2 = A1.shape[0], A2.shape[0]
    A = np.block([[A1, np.zeros((n1, n2))], [B2 @ C1, A2]])
    B = np.vstack([B1, np.zeros((n2, 1))])
    C = np.hstack([np.zeros((1, n1)), C2])
    return A, B, C


def realize(plant: ContinuousPlant) -> ContinuousStateSpace:
    """Series cascade of controllable-canonical sections for the factored plant."""
    sections = []
    for a in plant.first_order:
        sections.append((np.array([[-a]]), np.array([[1.0]]), np.array([[a]])))
    for w, z in plant.second_order:
        A = np.array([[0.0, 1.0], [-w * w, -2.0 * z * w]])
        sections.append((A, np.array([[0.0], [1.0]]), np.array([[w * w, 0.0]])))
    sys = sections[0]
    for sec in sections[1:]:
        sys = _series(sys, sec)
    return ContinuousStateSpace(*sys)


def discretize_zoh(css: ContinuousStateSpace, period: float) -> DiscretePlant:
    """Exact zero-order-hold sampling of a continuous realization.

    A = exp(Ac T) and B = (integral of exp(Ac t) dt) Bc come out of one
    exponential of the augmented matrix [[Ac, Bc], [0, 0]].
    """
    if period <= 0:
        raise ValueError("sample period must be positive")
    n = css.order
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = css.A
    M[:n, n:] = css.B
    E = scipy.linalg.expm(M * period)
    return DiscretePlant(E[:n, :n], E[:n, n:], css.C, period)


def markov_parameters(plant: DiscretePlant, count: int) -> np.ndarray:
    """First `count` unit-pulse response samples C A^r B, r = 0 .. count-1."""
    if count < 1:
        raise ValueError("need at least one Markov parameter")
    out = np.empty(count)
    v = plant.B.copy()
    for r in range(count):
        out[r] = (plant.C @ v)[0, 0]
        v = plant.A @ v
    return out


def frequency_response(plant: DiscretePlant, z: complex) -> complex:
    """Discrete transfer function C (zI - A)^-1 B at the point z."""
    n = plant.order
    M = z * np.eye(n) - plant.A
    try:
        w = np.linalg.solve(M, plant.B.astype(complex))
    except np.linalg.LinAlgError:
        raise ValueError(f"z = {z} is an eigenvalue of A; response undefined") from None
    return complex((plant.C @ w)[0, 0])


def sampling_zeros(plant: DiscretePlant) -> np.ndarray:
    """Transmission zeros of the sampled system.

    Solved as the finite generalized eigenvalues of the system-matrix pencil
    [[A - zI, B], [C, 0]]; avoids the ill-conditioned numerator polynomial.
    """
    n = plant.order
    M = np.block([[plant.A, plant.B], [plant.C, np.zeros((1, 1))]])
    W = np.zeros((n + 1, n + 1))
    W[:n, :n] = np.eye(n)
    vals = scipy.linalg.eigvals(M, W)
    return vals[np.isfinite(vals)]


def unstable_zero_count(plant: DiscretePlant) -> int:
    """Number of sampling zeros strictly outside the unit circle."""
    return int(np.sum(np.abs(sampling_zeros(plant)) > 1.0))


@dataclass(frozen=True)
class Preset:
    """Named benchmark configuration: plant plus its experiment defaults."""

    name: str
    plant: ContinuousPlant
    sample_hz: float = 50.0
    horizon: int = 51
    q: int = 1
    optimizer_iterations: int = 1000


PRESETS = {
    "third_order": Preset(
        "third_order",
        ContinuousPlant(first_order=(8.8,), second_order=((37.0, 0.5),)),
        q=1,
        optimizer_iterations=1000,
    ),
    "fourth_order": Preset(
        "fourth_order",
        ContinuousPlant(second_order=((37.0, 0.5), (74.0, 0.5))),
        q=2,
        optimizer_iterations=10000,
    ),
    "fifth_order": Preset(
        "fifth_order",
        ContinuousPlant(first_order=(8.8,), second_order=((37.0, 0.5), (74.0, 0.5))),
        q=2,
        optimizer_iterations=10000,
    ),
}
