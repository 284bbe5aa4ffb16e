"""Error metrics and convergence traces.

The error measure throughout is the phase-insensitive mean squared error
between target and replay magnitudes: ``mean((|T| - |R|)^2)``. Replay phase is
free (nothing constrains it physically), so only magnitudes are compared.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


def mse(target_mag: np.ndarray, replay: np.ndarray) -> float:
    """Phase-insensitive mean squared error between a magnitude pattern and a field.

    ``target_mag`` holds the wanted magnitudes (real, non-negative),
    ``replay`` the complex field to score. Shapes must match exactly.
    """
    if target_mag.shape != replay.shape:
        raise ValueError(f"shape mismatch: target {target_mag.shape} vs replay {replay.shape}")
    d = np.abs(replay)
    d -= target_mag
    flat = d.ravel()
    return float(flat @ flat / flat.size)


def pearson(x, y) -> float:
    """Pearson correlation coefficient of two equal-length 1D samples.

    Raises ValueError for length < 2, mismatched lengths, or zero variance in
    either sample (correlation undefined). Result is clipped to [-1, 1] to
    absorb last-bit rounding.
    """
    xa = np.asarray(x, dtype=np.float64).ravel()
    ya = np.asarray(y, dtype=np.float64).ravel()
    if xa.size != ya.size:
        raise ValueError(f"length mismatch: {xa.size} vs {ya.size}")
    if xa.size < 2:
        raise ValueError("need at least 2 samples")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("zero variance: correlation undefined")
    return float(np.clip((xc @ yc) / np.sqrt(vx * vy), -1.0, 1.0))


class TraceSample(NamedTuple):
    iteration: int
    mse: float
    accepted: int


class ConvergenceTrace:
    """Sampled (iteration, mse, accepted-count) history of one search run.

    Samples are appended in run order; iterations must be strictly increasing
    and accepted counts non-decreasing. Every trace starts at iteration 0 with
    the initial error and zero accepted, so traces from runs that share a
    starting point can be compared sample-for-sample.
    """

    def __init__(self):
        self.samples: list[TraceSample] = []

    def append(self, iteration: int, mse_value: float, accepted: int) -> None:
        if self.samples:
            last = self.samples[-1]
            if iteration <= last.iteration:
                raise ValueError(f"iterations must increase: {iteration} after {last.iteration}")
            if accepted < last.accepted:
                raise ValueError(f"accepted count decreased: {accepted} after {last.accepted}")
        elif iteration != 0:
            raise ValueError(f"trace must start at iteration 0, got {iteration}")
        self.samples.append(TraceSample(int(iteration), float(mse_value), int(accepted)))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def initial_mse(self) -> float:
        return self.samples[0].mse

    @property
    def final_mse(self) -> float:
        return self.samples[-1].mse

    @property
    def final_iteration(self) -> int:
        return self.samples[-1].iteration

    @property
    def final_accepted(self) -> int:
        return self.samples[-1].accepted


def relative_improvement(baseline: ConvergenceTrace, variant: ConvergenceTrace) -> float:
    """How much more error the variant removed than the baseline, relatively.

    Both runs must start from the same error and end at the same iteration;
    the result is ``(E_b - E_v) / (E_0 - E_b)`` where E_0 is the shared initial
    error and E_b, E_v the final errors. Positive means the variant ended
    lower. Raises ValueError if the starting errors differ, the final
    iterations differ, or the baseline made no reduction (denominator <= 0,
    improvement undefined).
    """
    if not baseline.samples or not variant.samples:
        raise ValueError("empty trace")
    if baseline.initial_mse != variant.initial_mse:
        raise ValueError(
            f"traces start from different errors: {baseline.initial_mse!r} vs {variant.initial_mse!r}"
        )
    if baseline.final_iteration != variant.final_iteration:
        raise ValueError(
            f"traces end at different iterations: {baseline.final_iteration} vs {variant.final_iteration}"
        )
    reduction = baseline.initial_mse - baseline.final_mse
    if reduction <= 0:
        raise ValueError("baseline made no error reduction; improvement undefined")
    return (baseline.final_mse - variant.final_mse) / reduction


def final_error_improvement(baseline: ConvergenceTrace, variant: ConvergenceTrace) -> float:
    """Relative final-error gap ``(E_b - E_v) / E_b``.

    A second, blunter comparison reported alongside
    :func:`relative_improvement`; requires a nonzero baseline final error.
    """
    if not baseline.samples or not variant.samples:
        raise ValueError("empty trace")
    if baseline.final_mse == 0:
        raise ValueError("baseline final error is zero; relative gap undefined")
    return (baseline.final_mse - variant.final_mse) / baseline.final_mse
