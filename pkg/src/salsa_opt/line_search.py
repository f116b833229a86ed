"""Backtracking Armijo line search over mini-batches (SLS).

Each step re-grows the previous step size by 2**(1/b), then shrinks it by
``delta`` until the sufficient-decrease test holds on the current batch.
Both sides of the test are evaluated on the same mini-batch. Steps whose
gradient is numerically zero skip the search entirely and reuse the last
accepted step size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ParamVector, StepRecord, axpy, norm_sq
from .directions import AdamState, adam_direction, adam_update_moments, \
    preconditioned_grad_norm, sgd_direction


@dataclass
class SlsConfig:
    """Knobs of the classic stochastic Armijo search.

    c:              sufficient-decrease constant in (0,1)
    delta:          backtracking shrink factor in (0,1)
    b:              step regrowth is 2**(1/b) per step
    grad_eps:       skip the search when the gradient norm is <= this
    max_backtracks: shrink budget before giving up on a step
    eta_init:       step size before the first search
    eta_min/eta_max: hard clamps on the step size
    """

    c: float = 0.1
    delta: float = 0.9
    b: float = 500.0
    grad_eps: float = 1e-8
    max_backtracks: int = 100
    eta_init: float = 1.0
    eta_min: float = 1e-10
    eta_max: float = 10.0

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must be in (0,1), got {self.c}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0,1), got {self.delta}")
        if self.b <= 0:
            raise ValueError(f"b must be > 0, got {self.b}")
        if not self.eta_min < self.eta_init <= self.eta_max:
            raise ValueError(
                f"need eta_min < eta_init <= eta_max, got "
                f"{self.eta_min}, {self.eta_init}, {self.eta_max}"
            )
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be >= 0")


@dataclass
class SlsState:
    """Mutable per-run state: last accepted step size, step counter,
    and Adam moments for the adam variant."""

    eta: float
    k: int = 0
    adam: AdamState | None = None


def propose_initial_step(eta_prev: float, b: float, eta_max: float = 10.0) -> float:
    """Regrow the previous step size by 2**(1/b), clamped to eta_max."""
    return min(eta_prev * 2.0 ** (1.0 / b), eta_max)


def armijo_holds(loss0: float, loss_trial: float, eta: float, c: float,
                 gnorm_term: float) -> bool:
    """Sufficient decrease: loss_trial <= loss0 - c * eta * gnorm_term."""
    return loss_trial <= loss0 - c * eta * gnorm_term


@dataclass
class BacktrackResult:
    eta: float
    backtracks: int
    loss_trial: float


def backtrack(objective_on_batch: Callable[[ParamVector], float],
              w: ParamVector, d: ParamVector, eta_start: float, loss0: float,
              gnorm_term: float, cfg: SlsConfig) -> BacktrackResult:
    """Shrink eta by cfg.delta until the Armijo test holds on this batch.

    Performs exactly backtracks+1 objective evaluations. Non-finite trial
    losses count as violations. If the budget runs out the last trial step
    size is returned, clamped up to cfg.eta_min (with one re-evaluation in
    the rare case the clamp changes it).
    """
    eta = eta_start
    trial = np.inf
    for i in range(cfg.max_backtracks + 1):
        trial = objective_on_batch(axpy(eta, d, w))
        if np.isfinite(trial) and armijo_holds(loss0, trial, eta, cfg.c, gnorm_term):
            return BacktrackResult(eta=eta, backtracks=i, loss_trial=trial)
        if i < cfg.max_backtracks:
            eta *= cfg.delta
    if eta < cfg.eta_min:
        eta = cfg.eta_min
        trial = objective_on_batch(axpy(eta, d, w))
    return BacktrackResult(eta=eta, backtracks=cfg.max_backtracks, loss_trial=trial)


def _guard_hit(grad_norm_sq: float, cfg: SlsConfig) -> bool:
    # Tiny-gradient guard: ||g|| <= grad_eps, compared in squared form.
    return grad_norm_sq <= cfg.grad_eps ** 2


def sls_step(batch, w: ParamVector, optimizer_kind: str, state: SlsState,
             cfg: SlsConfig) -> tuple[ParamVector, StepRecord]:
    """One SLS step on a fresh mini-batch objective.

    Evaluates loss/gradient once at w. Unless the gradient guard trips, the
    step size is regrown and backtracked against the Armijo test (raw
    gradient norm for sgd, preconditioned norm for adam, checked along the
    momentum-free direction). The applied update uses the momentum direction
    for adam. Mutates ``state``; returns the new parameters and the record.
    """
    if optimizer_kind not in ("sgd", "adam"):
        raise ValueError(f"unknown optimizer_kind {optimizer_kind!r}")
    res = batch.eval(w)
    g = res.grad
    gsq = norm_sq(g)
    if optimizer_kind == "adam":
        state.adam = adam_update_moments(state.adam, g)

    if _guard_hit(gsq, cfg):
        eta, backtracks, searched = state.eta, 0, False
    else:
        searched = True
        eta0 = propose_initial_step(state.eta, cfg.b, cfg.eta_max)
        if optimizer_kind == "sgd":
            d_search = sgd_direction(g)
            gnorm_term = gsq
        else:
            d_search = adam_direction(state.adam, g, use_momentum=False)
            gnorm_term = preconditioned_grad_norm(state.adam, g)
        result = backtrack(batch.loss, w, d_search, eta0, res.loss, gnorm_term, cfg)
        eta, backtracks = result.eta, result.backtracks

    if optimizer_kind == "sgd":
        d_update = sgd_direction(g)
    else:
        d_update = adam_direction(state.adam, g, use_momentum=True)
    w_next = axpy(eta, d_update, w)

    record = StepRecord(k=state.k, eta=eta, loss=res.loss, grad_norm_sq=gsq,
                        searched=searched, backtracks=backtracks,
                        batch_seed=batch.key)
    state.eta = eta
    state.k += 1
    return w_next, record


def apply_without_search(batch, w: ParamVector, optimizer_kind: str,
                         state: SlsState) -> tuple[ParamVector, StepRecord]:
    """Take a step with the current eta and no search (frequency-skipped).

    The gradient is still evaluated and, for adam, folded into the moments;
    smoothing/search state stays frozen by construction since no search runs.
    """
    res = batch.eval(w)
    g = res.grad
    gsq = norm_sq(g)
    if optimizer_kind == "adam":
        state.adam = adam_update_moments(state.adam, g)
        d_update = adam_direction(state.adam, g, use_momentum=True)
    else:
        d_update = sgd_direction(g)
    w_next = axpy(state.eta, d_update, w)
    record = StepRecord(k=state.k, eta=state.eta, loss=res.loss,
                        grad_norm_sq=gsq, searched=False, backtracks=0,
                        batch_seed=batch.key)
    state.k += 1
    return w_next, record
