"""EMA-smoothed Armijo line search (SaLSa).

Both batch-dependent sides of the Armijo test are exponentially smoothed:
the realized loss decrease (h) and the gradient-norm term (s). A step size
is accepted when h >= c * eta * s, with h recomputed per candidate step
size because the decrease depends on it. The gradient side does not depend
on the step size, so s is committed before backtracking starts.

An optional non-decrease mode additionally shrinks the accepted step until
the batch loss does not increase, which restores a classical convergence
guarantee in the full-batch setting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ParamVector, StepRecord, axpy, norm_sq
from .directions import adam_direction, adam_update_moments, \
    preconditioned_grad_norm, sgd_direction
from .line_search import SlsConfig, SlsState, propose_initial_step


@dataclass
class SmoothState:
    """Smoothed loss decrease h and gradient-norm term s.

    Until the first search commits, ``initialized`` is False and h/s hold
    no meaningful values: the first observed raw values seed them directly.
    """

    h: float = 0.0
    s: float = 0.0
    beta3: float = 0.99
    initialized: bool = False


@dataclass
class SalsaConfig(SlsConfig):
    """SLS knobs plus the smoothing factor and the non-decrease switch.

    The sufficient-decrease constant defaults to 0.3 here (the smoothed
    criterion tolerates a stiffer c than the raw one, where 0.1 is usual).
    """

    c: float = 0.3
    beta3: float = 0.99
    enforce_nondecrease: bool = False

    def __post_init__(self):
        super().__post_init__()
        if not 0.0 < self.beta3 < 1.0:
            raise ValueError(f"beta3 must be in (0,1), got {self.beta3}")


@dataclass
class SalsaState(SlsState):
    """SLS run state extended with the smoothing state."""

    smooth: SmoothState = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.smooth is None:
            self.smooth = SmoothState()


def smooth_update(prev: float, x: float, beta3: float, initialized: bool) -> float:
    """One EMA update; seeds with the raw value on the first observation."""
    if not initialized:
        return x
    return beta3 * prev + (1.0 - beta3) * x


def salsa_criterion(h: float, s: float, eta: float, c: float) -> bool:
    """Smoothed sufficient decrease: h >= c * eta * s."""
    return h >= c * eta * s


def salsa_backtrack(objective_on_batch: Callable[[ParamVector], float],
                    w: ParamVector, d: ParamVector, eta_start: float,
                    loss0: float, smooth: SmoothState, s_new: float,
                    cfg: SalsaConfig) -> tuple[float, int, float, float]:
    """Shrink eta until the smoothed criterion holds against s_new.

    For each candidate a trial h is formed from this batch's decrease at
    that candidate; only the accepted candidate's trial h is returned for
    committing (rejected trials never touch the average). Returns
    (eta, backtracks, h_committed, loss_trial).
    """
    eta = eta_start
    trial = np.inf
    h_trial = smooth.h
    for i in range(cfg.max_backtracks + 1):
        trial = objective_on_batch(axpy(eta, d, w))
        h_trial = smooth_update(smooth.h, loss0 - trial, smooth.beta3,
                                smooth.initialized)
        if np.isfinite(trial) and salsa_criterion(h_trial, s_new, eta, cfg.c):
            return eta, i, h_trial, trial
        if i < cfg.max_backtracks:
            eta *= cfg.delta
    if eta < cfg.eta_min:
        eta = cfg.eta_min
        trial = objective_on_batch(axpy(eta, d, w))
        h_trial = smooth_update(smooth.h, loss0 - trial, smooth.beta3,
                                smooth.initialized)
    # Budget exhausted: the step is still taken at the last candidate, so
    # its realized decrease is what belongs in the average.
    return eta, cfg.max_backtracks, h_trial, trial


def _nondecrease_search(objective_on_batch, w, d, eta, loss0, cfg):
    """Largest eta * delta**j whose batch loss does not exceed loss0.

    Returns (eta, loss_at_eta); falls back to eta_min when the budget runs
    out. The j=0 probe costs one evaluation even when nothing shrinks.
    """
    for j in range(cfg.max_backtracks + 1):
        trial = objective_on_batch(axpy(eta, d, w))
        if np.isfinite(trial) and trial <= loss0:
            return eta, trial
        if j < cfg.max_backtracks:
            eta *= cfg.delta
    eta = cfg.eta_min
    return eta, objective_on_batch(axpy(eta, d, w))


def enforce_nondecrease(objective_on_batch: Callable[[ParamVector], float],
                        w: ParamVector, d: ParamVector, eta: float,
                        loss0: float, cfg: SalsaConfig) -> float:
    """Shrink eta until loss(w + eta*d) <= loss0; eta_min on exhaustion."""
    eta_out, _ = _nondecrease_search(objective_on_batch, w, d, eta, loss0, cfg)
    return eta_out


def _salsa_step(batch, w, state: SalsaState, cfg: SalsaConfig,
                kind: str) -> tuple[ParamVector, StepRecord]:
    res = batch.eval(w)
    g = res.grad
    gsq = norm_sq(g)
    if kind == "adam":
        state.adam = adam_update_moments(state.adam, g)

    sm = state.smooth
    if gsq <= cfg.grad_eps ** 2:
        # Guard path: no search, smoothing state frozen, step still applied.
        eta, backtracks, searched = state.eta, 0, False
        d_update = sgd_direction(g) if kind == "sgd" else \
            adam_direction(state.adam, g, use_momentum=True)
        if cfg.enforce_nondecrease:
            eta, _ = _nondecrease_search(batch.loss, w, d_update, eta, res.loss, cfg)
    else:
        searched = True
        if kind == "sgd":
            d_search = sgd_direction(g)
            gnorm_term = gsq
        else:
            d_search = adam_direction(state.adam, g, use_momentum=False)
            gnorm_term = preconditioned_grad_norm(state.adam, g)
        # s does not depend on eta: commit it before the backtracking loop.
        s_new = smooth_update(sm.s, gnorm_term, sm.beta3, sm.initialized)
        eta0 = propose_initial_step(state.eta, cfg.b, cfg.eta_max)
        eta, backtracks, h_new, _ = salsa_backtrack(
            batch.loss, w, d_search, eta0, res.loss, sm, s_new, cfg)

        d_update = d_search if kind == "sgd" else \
            adam_direction(state.adam, g, use_momentum=True)
        if cfg.enforce_nondecrease:
            eta_nd, trial_nd = _nondecrease_search(
                batch.loss, w, d_update, eta, res.loss, cfg)
            if eta_nd != eta:
                eta = eta_nd
                # Keep h tied to the step size actually applied so a replay
                # of the trace reproduces the committed average.
                if kind == "sgd":
                    decrease = res.loss - trial_nd
                else:
                    decrease = res.loss - batch.loss(axpy(eta, d_search, w))
                h_new = smooth_update(sm.h, decrease, sm.beta3, sm.initialized)
        sm.h = h_new
        sm.s = s_new
        sm.initialized = True

    w_next = axpy(eta, d_update, w)
    record = StepRecord(k=state.k, eta=eta, loss=res.loss, grad_norm_sq=gsq,
                        searched=searched, backtracks=backtracks,
                        batch_seed=batch.key)
    state.eta = eta
    state.k += 1
    return w_next, record


def salsa_sgd_step(batch, w: ParamVector, state: SalsaState,
                   cfg: SalsaConfig) -> tuple[ParamVector, StepRecord]:
    """One SaLSa step along the negative gradient."""
    return _salsa_step(batch, w, state, cfg, "sgd")


def salsa_adam_step(batch, w: ParamVector, state: SalsaState,
                    cfg: SalsaConfig) -> tuple[ParamVector, StepRecord]:
    """One SaLSa step with the Adam direction.

    The criterion uses the momentum-free direction and the preconditioned
    gradient-norm term; the applied update keeps momentum.
    """
    return _salsa_step(batch, w, state, cfg, "adam")
