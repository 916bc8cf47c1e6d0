"""
SPDX-License-Identifier: MIT

Learning-rate schedules `α_t` and the hyper-parameter grid searched by the training comparisons.
"""

import math
from dataclasses import dataclass

# Grid search constants
ALPHA_GRID = (0.0005, 0.001, 0.005, 0.01, 0.05)
GAMMA_GRID = (0.6, 0.8, 0.95)
# Inner loop lengths as multiples of N/b
INNER_LENGTH_FACTORS = (0.5, 1, 2, 4)

SCHEDULE_KINDS = ('constant', 'inv_t', 'inv_sqrt_t', 'exp')

@dataclass(frozen=True)
class LearningRateSchedule:
    """
    A learning-rate schedule indexed by the (1-based) step or outer iteration `t`.

    Kinds:
        - `constant`: `α_t = α₀`
        - `inv_t`: `α_t = α₀/t`
        - `inv_sqrt_t`: `α_t = α₀/√t`
        - `exp`: `α_t = α₀·γᵗ` with `γ ∈ (0, 1)`

    Attributes:
        kind: One of `SCHEDULE_KINDS`.
        alpha0: The initial learning rate `α₀ > 0`.
        gamma: The decay factor of the `exp` schedule.
    """
    kind: str
    alpha0: float
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f'Unknown schedule "{self.kind}": must be one of {SCHEDULE_KINDS}')
        if not self.alpha0 > 0:
            raise ValueError(f'Initial learning rate must be positive, got {self.alpha0}')
        if self.kind == 'exp' and (self.gamma is None or not 0 < self.gamma < 1):
            raise ValueError(f'Exponential schedule requires 0 < γ < 1, got {self.gamma}')

    def __call__(self, t: int) -> float:
        if t < 1:
            raise ValueError(f'Schedules are indexed from t=1, got {t}')

        if self.kind == 'inv_t':
            return self.alpha0 / t
        if self.kind == 'inv_sqrt_t':
            return self.alpha0 / math.sqrt(t)
        if self.kind == 'exp':
            return self.alpha0 * self.gamma**t

        return self.alpha0

    @property
    def label(self) -> str:
        if self.kind == 'exp':
            return f'exp(α₀={self.alpha0:g}, γ={self.gamma:g})'

        return f'{self.kind}(α₀={self.alpha0:g})'

@dataclass(frozen=True)
class OuterRates:
    """
    An explicit list of learning rates `(α₁, α₂, ...)`; the last one repeats past the end of the list.
    """
    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.rates or any(not rate > 0 for rate in self.rates):
            raise ValueError(f'Explicit learning rates must be a non-empty list of positive values, got {self.rates}')

    def __call__(self, t: int) -> float:
        if t < 1:
            raise ValueError(f'Schedules are indexed from t=1, got {t}')

        return self.rates[min(t, len(self.rates)) - 1]

    @property
    def label(self) -> str:
        return 'rates(' + ', '.join(f'{rate:g}' for rate in self.rates) + ')'

Schedule = LearningRateSchedule | OuterRates

def schedule_grid(kinds: tuple[str, ...] = ('constant', 'inv_t', 'exp'), alphas: tuple[float, ...] = ALPHA_GRID,
                  gammas: tuple[float, ...] = GAMMA_GRID) -> list[LearningRateSchedule]:
    """
    Enumerate the schedules of the grid search (`γ` only varies for the exponential kind).
    """
    grid = []
    for kind in kinds:
        for alpha0 in alphas:
            if kind == 'exp':
                grid.extend(LearningRateSchedule(kind, alpha0, gamma) for gamma in gammas)
            else:
                grid.append(LearningRateSchedule(kind, alpha0))

    return grid

def inner_length_grid(n_components: int, batch_size: int,
                      factors: tuple[float, ...] = INNER_LENGTH_FACTORS) -> list[int]:
    """
    Return the inner loop lengths `m ∈ {N/2b, N/b, 2N/b, 4N/b}` (rounded, at least 1, without duplicates).
    """
    lengths = []
    for factor in factors:
        length = max(1, round(factor * n_components / batch_size))
        if length not in lengths:
            lengths.append(length)

    return lengths
