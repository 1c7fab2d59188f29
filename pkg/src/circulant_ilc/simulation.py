"""Iteration-domain execution of learning laws on the lifted plant."""

from dataclasses import dataclass

import numpy as np

from .laws import LearningLaw, signed_svd
from .lifted import LiftedModel
from .plants import DiscretePlant

__all__ = [
    "Trajectory",
    "SimulationResult",
    "make_trajectory",
    "run_ilc",
    "worst_case_experiment",
    "compare_laws",
]


@dataclass(frozen=True)
class Trajectory:
    """Desired output history sampled at t = T, 2T, ..., NT."""

    samples: np.ndarray
    label: str
    period: float

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size


def _yd1(t):
    return np.pi * (1.0 - np.cos(np.pi * t / 2.0)) ** 2


def _yd2(t):
    return np.pi * (5.0 * t**3 - 7.5 * t**4 + 3.0 * t**5)


_BENCHMARKS = {"yd1": _yd1, "yd2": _yd2}


def make_trajectory(label: str, plant: DiscretePlant, horizon: int) -> Trajectory:
    """One of the benchmark smooth-start trajectories on the plant's sample grid.

    Both start with value and first two derivatives at zero, so the continuous
    inverse needs no impulsive control at t = 0.
    """
    if label not in _BENCHMARKS:
        raise ValueError(f"unknown trajectory {label!r}; pick one of {sorted(_BENCHMARKS)}")
    t = np.arange(1, horizon + 1) * plant.period
    return Trajectory(_BENCHMARKS[label](t), label, plant.period)


@dataclass(frozen=True)
class SimulationResult:
    """Input and error histories across learning iterations.

    inputs[j] is the input history applied at iteration j; errors[j] the error
    at the surviving steps q+1..N; deleted_errors[j] the (diagnostic only)
    error at the deleted steps. rms[j] = ||errors[j]|| / sqrt(N - q).
    """

    inputs: np.ndarray
    errors: np.ndarray
    deleted_errors: np.ndarray
    rms: np.ndarray
    law_kind: str
    q: int

    @property
    def iterations(self):
        return self.rms.size - 1


def run_ilc(
    model: LiftedModel,
    law: LearningLaw,
    trajectory: Trajectory,
    iterations: int,
    initial_input: np.ndarray | None = None,
    initial_state: np.ndarray | None = None,
) -> SimulationResult:
    """Run u <- u + L e for the given number of iterations.

    The output is always produced over the full horizon; the learning update
    and the RMS record see only the error at steps q+1..N, with q taken from
    the law.
    """
    n = model.horizon
    q = law.q
    if len(trajectory) != n:
        raise ValueError(f"trajectory length {len(trajectory)} != horizon {n}")
    if law.gain.shape != (n, n - q):
        raise ValueError(f"law shape {law.gain.shape} incompatible with N={n}, q={q}")
    u = np.zeros(n) if initial_input is None else np.array(initial_input, dtype=float)
    x0 = np.zeros(model.plant.order) if initial_state is None else np.asarray(initial_state)
    bias = model.observability @ x0

    inputs = np.empty((iterations + 1, n))
    errors = np.empty((iterations + 1, n - q))
    deleted_errors = np.empty((iterations + 1, q))
    rms = np.empty(iterations + 1)
    for j in range(iterations + 1):
        y = model.toeplitz @ u + bias
        full_error = trajectory.samples - y
        inputs[j] = u
        errors[j] = full_error[q:]
        deleted_errors[j] = full_error[:q]
        rms[j] = np.linalg.norm(errors[j]) / np.sqrt(n - q)
        if j < iterations:
            u = u + law.gain @ errors[j]
    return SimulationResult(
        inputs=inputs,
        errors=errors,
        deleted_errors=deleted_errors,
        rms=rms,
        law_kind=law.kind,
        q=q,
    )


def worst_case_experiment(
    model: LiftedModel, law: LearningLaw, iterations: int
) -> SimulationResult:
    """Track the top right-singular vector of I - P L as the desired output.

    With zero initial input the first-run error is exactly that vector, the
    one direction the accelerated non-deleted law cannot learn: the RMS stays
    essentially constant from the first iteration on.
    """
    if law.q != 0:
        raise ValueError("worst-case experiment needs a law on the non-deleted model")
    n = model.horizon
    E = np.eye(n) - model.toeplitz @ law.gain
    _, _, Vt = signed_svd(E)
    trajectory = Trajectory(Vt[0, :], "custom", model.period)
    return run_ilc(model, law, trajectory, iterations)


def compare_laws(
    model: LiftedModel, laws, trajectory: Trajectory, iterations: int
) -> list[SimulationResult]:
    """Run several laws on the same plant and trajectory."""
    return [run_ilc(model, law, trajectory, iterations) for law in laws]
