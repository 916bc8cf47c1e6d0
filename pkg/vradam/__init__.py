"""
# What is vradam ?

*vradam* is a small numerical laboratory for studying the convergence of [**ADAM**](https://arxiv.org/abs/1412.6980) \
on stochastic objectives, and of its variance-reduced variant *VRADAM*.

It reproduces three behaviours from the command line:

- the divergence of stochastic ADAM (with `β₁ = 0`, constant or decaying learning rates) on a one-dimensional strongly \
convex two-branch problem and on finite sums built to have the same gradient distribution;
- the convergence of VRADAM, which replaces the stochastic gradient by an SVRG-style direction anchored on a snapshot \
whose full gradient is recomputed every outer iteration;
- a grid-search comparison of VRADAM against ADAM when training classifiers under the same compute budget.

Every experiment is seeded: the same config and base seed always produce the same CSV files.

# Background

## General ADAM

For a step `t`, a direction `g_t` and decay rates `β₁, β₂ ∈ [0, 1)`, the moments are updated as
```
m_t = β₁·m_{t-1} + (1-β₁)·g_t
v_t = β₂·v_{t-1} + (1-β₂)·g_t²
w_{t+1} = w_t - α_t·m_t/√(v_t + ε)
```
with optional bias correction of both moments. Plain ADAM uses a stochastic gradient as `g_t`.

## VRADAM

Every outer iteration `t` computes the full gradient `∇F(w̃)` at the snapshot `w̃`, then runs `m` inner steps with the \
direction `𝒢(w_k) - 𝒢(w̃) + ∇F(w̃)`, both estimates drawn from the same random seed. Option A resets the moments at the \
start of every outer iteration, option B carries them over.

Cost is counted in model cost units: one mini-batch gradient is one unit, a variance-reduced inner step is two and a full \
gradient is `N/b`.

# Using the vradam CLI tool

The package is designed to be run from the command-line as a python module. You can see the list of available options \
with the following command:
```console
(.venv) $ python -m vradam -h
```

Four sub-commands are available, each reading its section of the config file (`vradam/sample.config.hjson` by default):
```console
(.venv) $ python -m vradam divergence --delta 10 --trials 200 --steps 5000
(.venv) $ python -m vradam train --model logistic --epochs 5
(.venv) $ python -m vradam verify --negative-controls
(.venv) $ python -m vradam reset-compare --seeds 100
```

Outputs land in `{output_root}/{command}/` next to `effective_config.hjson`, the configuration that was actually run.

The exit code is 0 on success, 1 when a check fails, 2 on usage or configuration errors and 3 on I/O errors.

# Using vradam as a library

Problems live in `vradam.problems`, optimizers in `vradam.optimizers`, experiment drivers in `vradam.experiments` and \
the oracle battery in `vradam.verify`:
```python
from vradam.experiments import OptimizerSpec
from vradam.optimizers import AdamHyper, LearningRateSchedule
from vradam.problems import make_op_delta
from vradam.numerics import RandomSource

problem = make_op_delta(10)
adam = OptimizerSpec('adam', AdamHyper(LearningRateSchedule('constant', 1e-3), beta1=0.0))
record = adam.run(problem, problem.initial_point(), 1000, RandomSource(0))
```
"""
