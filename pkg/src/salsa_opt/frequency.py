"""Search-frequency controller.

Running a line search every step costs an extra forward pass per update.
When the step size is barely moving that is wasted work, so two EMAs of the
accepted step size (decay 0.9 and 0.99) estimate its rate of change; their
ratio maps to an interval L in [1, 10] and a search runs only every L-th
step. On plateaus the ratio is ~1 and L saturates at 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

BETA_FAST = 0.9
BETA_SLOW = 0.99
L_MIN = 1
L_MAX = 10


@dataclass
class FreqState:
    """Step-size EMAs, current interval L, and steps since the last search."""

    ema_fast: float = 0.0
    ema_slow: float = 0.0
    L: int = 1
    since_search: int = 0
    seeded: bool = False


def update_emas(state: FreqState, eta: float) -> FreqState:
    """Fold a freshly accepted step size into both EMAs (seed on first call)."""
    if eta <= 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    if not state.seeded:
        return replace(state, ema_fast=eta, ema_slow=eta, seeded=True)
    return replace(
        state,
        ema_fast=BETA_FAST * state.ema_fast + (1.0 - BETA_FAST) * eta,
        ema_slow=BETA_SLOW * state.ema_slow + (1.0 - BETA_SLOW) * eta,
    )


def compute_interval(state: FreqState) -> int:
    """Interval until the next search: round(1/(rbar-1)) clamped to [1,10].

    rbar is the fast/slow EMA ratio, inverted when below one so growth and
    decay are treated alike. rbar == 1 exactly means no movement, the limit
    of the formula, so L is pinned at the maximum.
    """
    r = state.ema_fast / state.ema_slow
    rbar = r if r >= 1.0 else 1.0 / r
    if rbar == 1.0:
        return L_MAX
    # round half away from zero, per "closest integer" (argument is > 0)
    raw = math.floor(1.0 / (rbar - 1.0) + 0.5)
    return min(L_MAX, max(L_MIN, raw))


def should_search(state: FreqState) -> bool:
    """True when this step must run a search (always, before any history)."""
    if not state.seeded:
        return True
    return state.since_search + 1 >= state.L


class FrequencyController:
    """Bookkeeping wrapper used by run loops.

    ``record_search`` after every completed line search (feeds the EMAs and
    recomputes L), ``record_skip`` on steps without one. A scheduled search
    that gets skipped by the tiny-gradient guard counts as a skip; the
    counter saturates at L-1 so the search is retried on the next step.
    """

    def __init__(self):
        self.state = FreqState()

    def should_search(self) -> bool:
        return should_search(self.state)

    def record_search(self, eta: float) -> None:
        st = update_emas(self.state, eta)
        st = replace(st, L=compute_interval(st), since_search=0)
        self.state = st

    def record_skip(self) -> None:
        st = self.state
        self.state = replace(
            st, since_search=min(st.since_search + 1, st.L - 1))
