"""Leggett and CHSH inequality evaluation and bounds.

The inequality value is L = sum over term groups of weight * |sum of
correlations|; every canonical layout normalizes to L <= 4.  A violation
verdict compares L against 4 - f_min, where f_min is either the closed-form
two-dimensional bound of the layout (mode "analytic2d") or the
state-corrected value from adversarial minimization over hidden local
vectors (mode "state_corrected", computed in :mod:`leggett_lab.optimize`
and registered here to keep the module dependency one-way).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import CorrelationModel
from .geometry import Direction, RigidRotation, SettingsLayout, build_layout

VIOLATION_TOL = 1e-7  # margin above which a violation verdict is issued


@dataclass(frozen=True)
class BoundResult:
    """A bound term f_min and the resulting inequality bound 4 - f_min."""

    f_min: float
    bound: float
    argmin_u: Direction | None
    argmin_v: Direction | None
    per_term: tuple
    mode: str  # "analytic2d" | "state_corrected"
    f_direct: float | None = None
    f_triangle: float | None = None
    converged: bool = True
    evaluations: int = 0


@dataclass(frozen=True)
class LeggettEvaluation:
    L: float
    bound: BoundResult
    margin: float
    violated: bool
    layout: SettingsLayout
    rotation_a: RigidRotation | None = None
    rotation_b: RigidRotation | None = None


@dataclass(frozen=True)
class ChshEvaluation:
    B: float
    settings: tuple
    violated: bool


def leggett_value(model: CorrelationModel, layout: SettingsLayout) -> float:
    """sum_groups weight * |sum_terms E(a_i, b_j)| with the layout's vectors."""
    if not layout.groups:
        raise ValueError(f"layout {layout.name!r} has no inequality term groups")
    total = 0.0
    for weight, terms in layout.groups:
        s = sum(model.correlation(layout.a_list[i], layout.b_list[j]) for i, j in terms)
        total += weight * abs(s)
    return total


def analytic_fmin(layout_name: str, phi: float) -> float:
    """Closed-form two-dimensional bound terms.

    original:   (4/pi) |sin(phi/2)|
    threeplus7:       |sin(phi/2)|
    threeplus6: (4/3) |sin(phi/2)|
    """
    s = abs(math.sin(0.5 * phi))
    if layout_name == "original":
        return 4.0 / math.pi * s
    if layout_name == "threeplus7":
        return s
    if layout_name == "threeplus6":
        return 4.0 / 3.0 * s
    raise ValueError(f"no Leggett bound for layout {layout_name!r}")


_numeric_fmin_impl = None


def register_numeric_fmin(func) -> None:
    """Called by :mod:`leggett_lab.optimize` to provide the state-corrected bound."""
    global _numeric_fmin_impl
    _numeric_fmin_impl = func


def leggett_bound(
    model: CorrelationModel,
    layout: SettingsLayout,
    mode: str = "state_corrected",
    config=None,
) -> BoundResult:
    """Bound for the given layout in the requested mode.

    The original layout supports only the analytic mode: its closed-form
    factor rests on a rotational-invariance ensemble average that a
    point-mass hidden-vector minimization does not reproduce.
    """
    if mode == "analytic2d":
        f = analytic_fmin(layout.name, layout.phi)
        return BoundResult(f, 4.0 - f, None, None, (), "analytic2d")
    if mode != "state_corrected":
        raise ValueError(f"unknown bound mode {mode!r}")
    if layout.name == "original":
        raise ValueError("the original layout supports only the analytic2d bound mode")
    if _numeric_fmin_impl is None:  # pragma: no cover - import order guard
        raise RuntimeError("state-corrected bound unavailable: optimize module not imported")
    return _numeric_fmin_impl(model, layout, config)


def evaluate_leggett(
    model: CorrelationModel,
    layout: SettingsLayout,
    mode: str = "state_corrected",
    config=None,
) -> LeggettEvaluation:
    value = leggett_value(model, layout)
    bound = leggett_bound(model, layout, mode=mode, config=config)
    margin = value - bound.bound
    return LeggettEvaluation(value, bound, margin, margin > VIOLATION_TOL, layout)


def chsh_value(
    model: CorrelationModel, a: Direction, a2: Direction, b: Direction, b2: Direction
) -> ChshEvaluation:
    """B = E(a,b) + E(a,b2) + E(a2,b) - E(a2,b2); violation means B > 2."""
    B = (
        model.correlation(a, b)
        + model.correlation(a, b2)
        + model.correlation(a2, b)
        - model.correlation(a2, b2)
    )
    return ChshEvaluation(B, (a, a2, b, b2), B > 2.0)


def chsh_at_layout(model: CorrelationModel, layout: SettingsLayout | None = None) -> ChshEvaluation:
    """CHSH at fixed settings (the canonical diagonal geometry by default)."""
    if layout is None:
        layout = build_layout("chsh")
    a, a2 = layout.a_list
    b, b2 = layout.b_list
    return chsh_value(model, a, a2, b, b2)


@dataclass(frozen=True)
class ImplicationReport:
    """Grid check that every Leggett violation comes with a CHSH violation."""

    counterexamples: tuple
    leggett_violations: int
    points: int

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def implication_check(
    family: str,
    sign: int,
    alpha_grid,
    phi_grid,
    layout_name: str = "threeplus7",
    bound_mode: str = "state_corrected",
    starts: int = 16,
    seed: int = 0,
    chsh_optimizer=None,
) -> ImplicationReport:
    """For every grid point where the Leggett evaluation is violated, an
    optimized CHSH evaluation must exceed 2.  Returns the counterexamples
    (expected empty)."""
    from .correlations import ecs_model, pes_model
    from .optimize import SearchConfig, numeric_fmin, optimize_chsh
    from .util import stable_seed

    if chsh_optimizer is None:
        chsh_optimizer = optimize_chsh
    counterexamples = []
    n_violations = 0
    n_points = 0
    sphere = ((0.0, math.pi), (-math.pi, math.pi))
    for i, alpha in enumerate(alpha_grid):
        model = (
            pes_model() if family == "qubit_projective" else ecs_model(alpha, sign, family)
        )
        chsh_b = None
        for j, phi in enumerate(phi_grid):
            n_points += 1
            layout = build_layout(layout_name, phi)
            value = leggett_value(model, layout)
            if bound_mode == "state_corrected":
                cfg = SearchConfig(
                    ranges=sphere * 2,
                    starts=starts,
                    seed=stable_seed(seed, i, j),
                    max_iterations=300,
                    tolerance=1e-9,
                )
                bound = numeric_fmin(model, layout, cfg, check_convergence=False, polish=False)
            else:
                bound = leggett_bound(model, layout, mode=bound_mode)
            margin = value - bound.bound
            if not margin > VIOLATION_TOL:
                continue
            n_violations += 1
            if chsh_b is None:  # settings-independent, one optimization per alpha
                ccfg = SearchConfig(
                    ranges=sphere * 4, starts=starts, seed=stable_seed(seed, "chsh", i)
                )
                chsh_b = chsh_optimizer(model, ccfg).B
            if not chsh_b > 2.0:
                counterexamples.append((float(alpha), float(phi), margin, chsh_b))
    return ImplicationReport(tuple(counterexamples), n_violations, n_points)
