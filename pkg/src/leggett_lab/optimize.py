"""Derivative-free multi-start searches over angle spaces.

One Nelder-Mead engine serves every optimization task in the package:
hidden-vector bound minimization, CHSH setting maximization, rigid-rotation
optimization of inequality values, parameter scans, and amplitude-threshold
bisection.

Determinism contract: identical config and objective give bit-identical
results.  Starts come from a seeded Sobol sequence, start 0 is the range
midpoint (the identity rotation for rigid searches), and the reduction picks
the best value with start-index tie-break, so any execution order or worker
count yields the same answer.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import qmc

from .coherent_algebra import gram_matrix, kappa_K, operator_elements, pseudospin_bloch, rotation_map
from .correlations import CorrelationModel, ecs_model, pes_model
from .errors import ConvergenceError
from .geometry import Direction, RigidRotation, SettingsLayout, build_layout, rotate_settings, to_cartesian
from . import inequality
from .inequality import (
    BoundResult,
    ChshEvaluation,
    LeggettEvaluation,
    VIOLATION_TOL,
    chsh_value,
    leggett_bound,
    leggett_value,
)
from .util import stable_seed

_SPHERE = ((0.0, math.pi), (-math.pi, math.pi))
_EULER = ((0.0, 2.0 * math.pi),) * 3


@dataclass(frozen=True)
class SearchConfig:
    """Multi-start Nelder-Mead configuration.

    ranges gives one (lo, hi) interval per coordinate; starts are drawn from
    a Sobol sequence scaled to that box.  tolerance is the simplex value
    spread at which a start stops.
    """

    ranges: tuple
    starts: int = 32
    seed: int = 0
    max_iterations: int = 2000
    tolerance: float = 1e-10

    @property
    def dim(self) -> int:
        return len(self.ranges)


@dataclass(frozen=True)
class SimplexResult:
    point: np.ndarray
    value: float
    converged: bool
    evaluations: int
    start_index: int


def _nelder_mead(f, x0, step, fatol, maxiter):
    """Standard reflection/expansion/contraction/shrink simplex descent.

    Returns (x_best, f_best, converged, n_evaluations).  Fully deterministic:
    ties are broken by vertex order and the initial simplex is x0 plus one
    step along each coordinate.
    """
    n = len(x0)
    pts = np.repeat(np.asarray(x0, dtype=float)[None, :], n + 1, axis=0)
    for k in range(n):
        pts[k + 1, k] += step[k]
    vals = np.array([f(p) for p in pts])
    nfev = n + 1
    for _ in range(maxiter):
        order = np.argsort(vals, kind="stable")
        pts, vals = pts[order], vals[order]
        if vals[-1] - vals[0] <= fatol:
            return pts[0], vals[0], True, nfev
        centroid = pts[:-1].mean(axis=0)
        xr = centroid + (centroid - pts[-1])
        fr = f(xr)
        nfev += 1
        if fr < vals[0]:
            xe = centroid + 2.0 * (centroid - pts[-1])
            fe = f(xe)
            nfev += 1
            if fe < fr:
                pts[-1], vals[-1] = xe, fe
            else:
                pts[-1], vals[-1] = xr, fr
        elif fr < vals[-2]:
            pts[-1], vals[-1] = xr, fr
        else:
            if fr < vals[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (pts[-1] - centroid)
            fc = f(xc)
            nfev += 1
            if fc < min(fr, vals[-1]):
                pts[-1], vals[-1] = xc, fc
            else:  # shrink toward the best vertex
                pts[1:] = pts[0] + 0.5 * (pts[1:] - pts[0])
                vals[1:] = [f(p) for p in pts[1:]]
                nfev += n
    order = np.argsort(vals, kind="stable")
    return pts[order[0]], vals[order[0]], False, nfev


def _start_points(config: SearchConfig) -> np.ndarray:
    lo = np.array([r[0] for r in config.ranges])
    hi = np.array([r[1] for r in config.ranges])
    pts = np.empty((config.starts, config.dim))
    pts[0] = 0.5 * (lo + hi)
    if config.starts > 1:
        n = config.starts - 1
        pow2 = 1 << max(1, (n - 1).bit_length())
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sob = qmc.Sobol(config.dim, scramble=True, seed=config.seed).random(pow2)
        pts[1:] = lo + sob[:n] * (hi - lo)
    return pts


def _run_starts(objective, config: SearchConfig) -> list[SimplexResult]:
    steps = [0.15 * (hi - lo) for lo, hi in config.ranges]
    out = []
    for idx, x0 in enumerate(_start_points(config)):
        x, v, ok, nfev = _nelder_mead(objective, x0, steps, config.tolerance, config.max_iterations)
        out.append(SimplexResult(x, float(v), ok, nfev, idx))
    return out


def _best_of(results: list[SimplexResult]) -> SimplexResult:
    return min(results, key=lambda r: (r.value, r.start_index))


def _polish(objective, x0, fatol=1e-15, maxiter=5000):
    step = np.full(len(x0), 1e-3)
    x, v, _, nfev = _nelder_mead(objective, x0, step, fatol, maxiter)
    return x, float(v), nfev


def simplex_minimize(objective, config: SearchConfig) -> SimplexResult:
    """Best point over seeded multi-start simplex descent.

    A start that exhausts max_iterations without meeting the tolerance is
    still used but flags the result as unconverged.
    """
    if config.dim < 1:
        raise ValueError("objective must have at least one coordinate")
    return _best_of(_run_starts(objective, config))


def simplex_maximize(objective, config: SearchConfig) -> SimplexResult:
    res = simplex_minimize(lambda x: -objective(x), config)
    return replace(res, value=-res.value)


# -- fast local-average and correlation kernels -----------------------------------
#
# The generic CorrelationModel methods are exact but slow inside a simplex
# loop.  For the four families shipped here the same math is precompiled
# into closed-over numpy/complex kernels; the generic path remains as the
# fallback (and the tests assert both paths agree).


def _conjugated_pair(model: CorrelationModel, d: Direction):
    """(M', G') = U(d)^dag (M, Gram) U(d) for a coefficient-algebra family."""
    name = "onoff" if model.family == "on_off" else "parity"
    m = operator_elements(name, model.ecs.alpha)
    g = gram_matrix(model.ecs.alpha)
    u = rotation_map(d.theta, d.phi)
    return u.conj().T @ m @ u, u.conj().T @ g @ u


def _local_avg_kernels(model: CorrelationModel, a_dirs, b_dirs):
    """Batched A(u; a_i) over a_dirs and B(v; b_j) over b_dirs.

    Returns (abar(u_angles) -> array, bbar(v_angles) -> array).
    """
    if model.family == "qubit_projective":
        A = np.array([to_cartesian(d) for d in a_dirs])
        B = np.array([to_cartesian(d) for d in b_dirs])

        def abar(t, p):
            st = math.sin(t)
            u = (st * math.cos(p), st * math.sin(p), math.cos(t))
            return A @ u

        def bbar(t, p):
            st = math.sin(t)
            v = (st * math.cos(p), st * math.sin(p), math.cos(t))
            return B @ v

        return abar, bbar

    if model.family == "pseudo_spin":
        m = pseudospin_bloch(model.ecs.alpha)
        mb = m * np.array([-1.0, 1.0, 1.0])
        A = np.array([to_cartesian(d) for d in a_dirs])
        B = np.array([to_cartesian(d) for d in b_dirs])
        Am, Bm = A @ m, B @ mb

        def abar(t, p):
            st = math.sin(t)
            u = np.array([st * math.cos(p), st * math.sin(p), math.cos(t)])
            return 2.0 * (A @ u) * float(u @ m) - Am

        def bbar(t, p):
            st = math.sin(t)
            v = np.array([st * math.cos(p), st * math.sin(p), math.cos(t)])
            return 2.0 * (B @ v) * float(v @ mb) - Bm

        return abar, bbar

    # on_off / parity: A(u; a) = <c|M'|c> / <c|G'|c> with c = U(u) e_party
    pairs_a = [_conjugated_pair(model, d) for d in a_dirs]
    pairs_b = [_conjugated_pair(model, d) for d in b_dirs]
    normalize = model.normalize

    def _coeff(t, p, first: bool):
        s, c = math.sin(0.5 * t), math.cos(0.5 * t)
        ph = complex(math.cos(p), math.sin(p))
        if first:
            return s, ph.conjugate() * c  # U(u) @ (1, 0)
        return ph * c, -s  # U(u) @ (0, 1)

    def _quad(m2, c0, c1):
        return (
            m2[0, 0] * (c0.conjugate() * c0)
            + m2[0, 1] * (c0.conjugate() * c1)
            + m2[1, 0] * (c1.conjugate() * c0)
            + m2[1, 1] * (c1.conjugate() * c1)
        ).real

    def abar(t, p):
        c0, c1 = _coeff(t, p, True)
        out = np.empty(len(pairs_a))
        for k, (m2, g2) in enumerate(pairs_a):
            num = _quad(m2, c0, c1)
            out[k] = num / _quad(g2, c0, c1) if normalize else num
        return out

    def bbar(t, p):
        c0, c1 = _coeff(t, p, False)
        out = np.empty(len(pairs_b))
        for k, (m2, g2) in enumerate(pairs_b):
            num = _quad(m2, c0, c1)
            out[k] = num / _quad(g2, c0, c1) if normalize else num
        return out

    return abar, bbar


def _correlation_tensor(model: CorrelationModel):
    """3x3 tensor T with E(a, b) = a . T b, or None for coefficient models."""
    if model.family == "qubit_projective":
        return -np.eye(3)
    if model.family == "pseudo_spin":
        K = kappa_K(model.ecs.alpha)
        if model.ecs.sign < 0:
            return np.diag([-K, -K, -1.0])
        kt = math.tanh(2.0 * model.ecs.alpha**2) * K
        return np.diag([kt, kt, 1.0])
    return None


def _leggett_from_tensor(T, A, B, groups):
    M = A @ T @ B.T
    total = 0.0
    for w, terms in groups:
        s = 0.0
        for i, j in terms:
            s += M[i, j]
        total += w * abs(s)
    return total


def _make_rigid_objective(model: CorrelationModel, layout: SettingsLayout, shared: bool):
    """negative inequality value as a function of Euler angles (3 or 6)."""
    A0 = np.array([to_cartesian(d) for d in layout.a_list])
    B0 = np.array([to_cartesian(d) for d in layout.b_list])
    T = _correlation_tensor(model)

    def rot(z1, y, z2):
        cz, sz = math.cos(z1), math.sin(z1)
        cy, sy = math.cos(y), math.sin(y)
        c2, s2 = math.cos(z2), math.sin(z2)
        return np.array(
            [
                [cz * cy * c2 - sz * s2, -cz * cy * s2 - sz * c2, cz * sy],
                [sz * cy * c2 + cz * s2, -sz * cy * s2 + cz * c2, sz * sy],
                [-sy * c2, sy * s2, cy],
            ]
        )

    if T is not None:

        def objective(x):
            ra = rot(x[0], x[1], x[2])
            rb = ra if shared else rot(x[3], x[4], x[5])
            return -_leggett_from_tensor(T, A0 @ ra.T, B0 @ rb.T, layout.groups)

        return objective

    name = "onoff" if model.family == "on_off" else "parity"
    m2 = operator_elements(name, model.ecs.alpha)
    g2 = gram_matrix(model.ecs.alpha)
    C = model.ecs.coefficient_tensor()
    normalize = model.normalize

    def corr(av, bv):
        ta = math.acos(max(-1.0, min(1.0, av[2])))
        pa = math.atan2(av[1], av[0])
        tb = math.acos(max(-1.0, min(1.0, bv[2])))
        pb = math.atan2(bv[1], bv[0])
        d = rotation_map(ta, pa) @ C @ rotation_map(tb, pb).T
        num = np.einsum("xy,xu,yv,uv->", d.conj(), m2, m2, d).real
        if not normalize:
            return num
        den = np.einsum("xy,xu,yv,uv->", d.conj(), g2, g2, d).real
        return num / den

    def objective(x):
        ra = rot(x[0], x[1], x[2])
        rb = ra if shared else rot(x[3], x[4], x[5])
        A = A0 @ ra.T
        B = B0 @ rb.T
        total = 0.0
        for w, terms in layout.groups:
            s = 0.0
            for i, j in terms:
                s += corr(A[i], B[j])
            total += w * abs(s)
        return -total

    return objective


# -- hidden-vector bound minimization ----------------------------------------------


def numeric_fmin(
    model: CorrelationModel,
    layout: SettingsLayout,
    config: SearchConfig | None = None,
    check_convergence: bool = True,
    polish: bool = True,
) -> BoundResult:
    """State-corrected bound term: adversarial minimum over hidden vectors.

    Two formulations are computed.  The direct form minimizes
    sum_groups w * sum_terms |A(u; a_i) - B(v; b_j)| over (u, v) on the
    sphere pair (a point-mass hidden distribution is optimal because the
    integrand is a nonnegative average).  The triangle-relaxed form
    minimizes sum w * |B(v; b_j) - B(v; b_j')| over the b-pairs that share
    an a-setting.  The larger of the two is the f_min used for verdicts;
    both are reported.
    """
    if layout.name not in ("threeplus7", "threeplus6"):
        raise ValueError(f"numeric bound supports threeplus7/threeplus6, not {layout.name!r}")
    if config is None:
        config = SearchConfig(ranges=_SPHERE * 2)
    elif config.dim != 4:
        config = replace(config, ranges=_SPHERE * 2)

    flat = [(w, i, j) for w, group in layout.groups for i, j in group]
    weights = np.array([w for w, _, _ in flat])
    ia = np.array([i for _, i, _ in flat])
    jb = np.array([j for _, _, j in flat])
    abar, bbar = _local_avg_kernels(model, layout.a_list, layout.b_list)

    def direct(x):
        return float(weights @ np.abs(abar(x[0], x[1])[ia] - bbar(x[2], x[3])[jb]))

    results = _run_starts(direct, config)
    best = _best_of(results)
    pn = 0
    if polish:
        px, pval, pn = _polish(direct, best.point)
        if pval < best.value:
            best = replace(best, point=px, value=pval)

    if check_convergence and config.starts >= 4:
        decile = max(2, -(-config.starts // 10))
        top = sorted(results, key=lambda r: r.value)[:decile]
        vals = sorted(_polish(direct, r.point, fatol=1e-13, maxiter=1500)[1] for r in top)
        if vals[-1] - vals[0] > 1e-6:
            raise ConvergenceError(
                f"top-decile spread {vals[-1] - vals[0]:.3e} after {config.starts} starts"
            )

    pair_j = np.array([j for j, _, _ in layout.bound_pairs], dtype=int)
    pair_j2 = np.array([j2 for _, j2, _ in layout.bound_pairs], dtype=int)
    pair_w = np.array([w for _, _, w in layout.bound_pairs])

    def triangle(x):
        vals = bbar(x[0], x[1])
        return float(pair_w @ np.abs(vals[pair_j] - vals[pair_j2]))

    tri_cfg = SearchConfig(
        ranges=_SPHERE,
        starts=max(8, config.starts // 2),
        seed=stable_seed(config.seed, "triangle"),
        max_iterations=config.max_iterations,
        tolerance=config.tolerance,
    )
    tri_results = _run_starts(triangle, tri_cfg)
    tri_best = _best_of(tri_results)
    tval, tn = tri_best.value, 0
    if polish:
        _, tp, tn = _polish(triangle, tri_best.point)
        tval = min(tp, tval)

    f_direct = max(0.0, best.value)
    f_triangle = max(0.0, tval)
    f_min = max(f_direct, f_triangle)
    u = Direction(float(best.point[0]), float(best.point[1]))
    v = Direction(float(best.point[2]), float(best.point[3]))
    per_term = weights * np.abs(abar(u.theta, u.phi)[ia] - bbar(v.theta, v.phi)[jb])
    return BoundResult(
        f_min=f_min,
        bound=4.0 - f_min,
        argmin_u=u,
        argmin_v=v,
        per_term=tuple(float(t) for t in per_term),
        mode="state_corrected",
        f_direct=f_direct,
        f_triangle=f_triangle,
        converged=best.converged,
        evaluations=sum(r.evaluations for r in results) + pn
        + sum(r.evaluations for r in tri_results) + tn,
    )


inequality.register_numeric_fmin(numeric_fmin)


# -- CHSH setting optimization -------------------------------------------------------


def optimize_chsh(model: CorrelationModel, config: SearchConfig | None = None) -> ChshEvaluation:
    """Maximize the CHSH combination over all four measurement directions."""
    if config is None:
        config = SearchConfig(ranges=_SPHERE * 4)
    elif config.dim != 8:
        config = replace(config, ranges=_SPHERE * 4)

    T = _correlation_tensor(model)
    if T is not None:

        def negative_b(x):
            st = np.sin(x[0::2])
            vecs = np.stack([st * np.cos(x[1::2]), st * np.sin(x[1::2]), np.cos(x[0::2])], axis=1)
            ta = vecs[0] @ T
            ta2 = vecs[1] @ T
            return -(ta @ vecs[2] + ta @ vecs[3] + ta2 @ vecs[2] - ta2 @ vecs[3])

    else:

        def negative_b(x):
            ev = chsh_value(
                model,
                Direction(x[0], x[1]),
                Direction(x[2], x[3]),
                Direction(x[4], x[5]),
                Direction(x[6], x[7]),
            )
            return -ev.B

    best = simplex_minimize(negative_b, config)
    px, pval, _ = _polish(negative_b, best.point)
    if pval < best.value:
        best = replace(best, point=px, value=pval)
    x = best.point
    return chsh_value(
        model,
        Direction(float(x[0]), float(x[1])),
        Direction(float(x[2]), float(x[3])),
        Direction(float(x[4]), float(x[5])),
        Direction(float(x[6]), float(x[7])),
    )


# -- rigid-rotation optimization -------------------------------------------------------


def optimize_rigid(
    model: CorrelationModel,
    layout: SettingsLayout,
    config: SearchConfig | None = None,
    shared: bool = False,
    bound_mode: str = "state_corrected",
    bound_config: SearchConfig | None = None,
    check_convergence: bool = True,
) -> LeggettEvaluation:
    """Maximize the inequality value over rigid rotations of the settings.

    shared=False rotates the two parties independently (6 Euler angles);
    shared=True applies one common rotation to both (3 angles).  The
    identity rotation is always start 0, so the optimized value never falls
    below the unrotated one.  The bound is recomputed at the optimal rotated
    settings before the verdict.
    """
    n_angles = 3 if shared else 6
    default_starts = 32 if shared else 64
    if config is None:
        config = SearchConfig(ranges=_EULER * (n_angles // 3), starts=default_starts)
    elif config.dim != n_angles:
        config = replace(config, ranges=_EULER * (n_angles // 3))

    objective = _make_rigid_objective(model, layout, shared)

    # start 0 must be the identity rotation, not the box midpoint
    results = []
    steps = [0.15 * (hi - lo) for lo, hi in config.ranges]
    starts = _start_points(config)
    starts[0] = 0.0
    for idx, x0 in enumerate(starts):
        x, v, ok, nfev = _nelder_mead(objective, x0, steps, config.tolerance, config.max_iterations)
        results.append(SimplexResult(x, float(v), ok, nfev, idx))
    best = _best_of(results)
    px, pval, _ = _polish(objective, best.point)
    if pval < best.value:
        best = replace(best, point=px, value=pval)

    x = best.point
    ra = RigidRotation(float(x[0]), float(x[1]), float(x[2]))
    rb = ra if shared else RigidRotation(float(x[3]), float(x[4]), float(x[5]))
    rotated = rotate_settings(layout, ra, rb)
    value = leggett_value(model, rotated)
    if bound_mode == "state_corrected":
        bound = numeric_fmin(model, rotated, bound_config, check_convergence=check_convergence)
    else:
        bound = leggett_bound(model, rotated, mode=bound_mode)
    margin = value - bound.bound
    return LeggettEvaluation(
        L=value,
        bound=bound,
        margin=margin,
        violated=margin > VIOLATION_TOL,
        layout=rotated,
        rotation_a=ra,
        rotation_b=rb,
    )


# -- threshold bisection ------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of the amplitude-threshold search."""

    verdict: str  # "threshold" | "always" | "never"
    alpha_star: float | None
    bracket: tuple
    margin_lo: float
    margin_hi: float
    margin_at_star: float | None
    evaluations: int


DEFAULT_THRESHOLD_PHI = {"threeplus7": 0.2507, "threeplus6": 2.0 * math.atan(1.0 / 3.0)}


def threshold_alpha(
    family: str,
    sign: int,
    layout_name: str,
    optimized: bool = False,
    tolerance: float = 1e-3,
    phi: float | None = None,
    bracket: tuple = (0.5, 10.0),
    seed: int = 0,
    starts: int | None = None,
    shared: bool = True,
    bound_mode: str = "state_corrected",
    scan_points: int = 16,
) -> ThresholdResult:
    """Bisect the inequality margin over the state amplitude.

    The margin is scanned on a coarse grid over the bracket first; the last
    sign change from nonpositive to positive (the amplitude beyond which the
    violation persists) seeds the bisection, which narrows the bracket to
    the requested width.  Each margin evaluation runs fresh inner
    optimizations with seeds derived from the amplitude, so a rerun with the
    same seed reproduces the result bit for bit.  All-positive margins give
    verdict "always", all-nonpositive "never".
    """
    if layout_name not in DEFAULT_THRESHOLD_PHI:
        raise ValueError(f"threshold supports threeplus7/threeplus6, not {layout_name!r}")
    if phi is None:
        phi = DEFAULT_THRESHOLD_PHI[layout_name]
    layout = build_layout(layout_name, phi)
    evaluations = 0

    def margin(alpha: float) -> float:
        nonlocal evaluations
        evaluations += 1
        model = (
            pes_model() if family == "qubit_projective" else ecs_model(alpha, sign, family)
        )
        run_seed = stable_seed(seed, layout_name, family, sign, round(alpha, 12))
        bcfg = SearchConfig(ranges=_SPHERE * 2, starts=starts or 32, seed=run_seed)
        if optimized:
            ocfg = SearchConfig(
                ranges=_EULER * (1 if shared else 2),
                starts=starts or (32 if shared else 64),
                seed=stable_seed(run_seed, "rigid"),
            )
            ev = optimize_rigid(model, layout, ocfg, shared=shared, bound_mode=bound_mode, bound_config=bcfg)
        else:
            ev = inequality.evaluate_leggett(model, layout, mode=bound_mode, config=bcfg)
        return ev.margin

    grid = np.linspace(bracket[0], bracket[1], scan_points)
    margins = [margin(a) for a in grid]
    lo = hi = None
    m_lo = m_hi = 0.0
    for i in range(len(grid) - 1):
        if margins[i] <= 0.0 < margins[i + 1]:
            lo, hi = float(grid[i]), float(grid[i + 1])
            m_lo, m_hi = margins[i], margins[i + 1]
    if lo is None:
        if all(m > 0.0 for m in margins):
            return ThresholdResult("always", None, tuple(bracket), margins[0], margins[-1], None, evaluations)
        return ThresholdResult("never", None, tuple(bracket), margins[0], margins[-1], None, evaluations)

    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        m_mid = margin(mid)
        if m_mid > 0.0:
            hi, m_hi = mid, m_mid
        else:
            lo, m_lo = mid, m_mid
    alpha_star = 0.5 * (lo + hi)
    return ThresholdResult(
        "threshold", alpha_star, (lo, hi), m_lo, m_hi, margin(alpha_star), evaluations
    )


# -- parameter scans --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    """One row of a parameter sweep (the CSV row format)."""

    index: int
    alpha: float | None
    phi: float
    L: float
    f_min_corrected: float | None
    f_min_analytic: float | None
    bound_used: float
    chsh_B: float | None
    margin: float
    violated: bool
    starts: int
    seed: int


@dataclass(frozen=True)
class ScanTask:
    """What to compute at every grid point of a scan."""

    layout_name: str
    family: str = "qubit_projective"
    sign: int = -1
    alpha: float | None = None
    phi: float | None = None
    bound_mode: str = "state_corrected"
    optimize: bool = False
    shared: bool = True
    include_chsh: bool = False
    starts: int = 32
    seed: int = 0
    strict_convergence: bool = True


def _scan_point(task: ScanTask, index: int, alpha: float | None, phi: float) -> SweepRecord:
    layout = build_layout(task.layout_name, phi)
    model = (
        pes_model()
        if task.family == "qubit_projective"
        else ecs_model(alpha, task.sign, task.family)
    )
    point_seed = stable_seed(task.seed, task.layout_name, task.family, index)
    bcfg = SearchConfig(ranges=_SPHERE * 2, starts=task.starts, seed=point_seed)
    if task.optimize:
        ocfg = SearchConfig(
            ranges=_EULER * (1 if task.shared else 2),
            starts=task.starts,
            seed=stable_seed(point_seed, "rigid"),
        )
        ev = optimize_rigid(
            model,
            layout,
            ocfg,
            shared=task.shared,
            bound_mode=task.bound_mode,
            bound_config=bcfg,
            check_convergence=task.strict_convergence,
        )
    else:
        if task.bound_mode == "state_corrected":
            bound = numeric_fmin(model, layout, bcfg, check_convergence=task.strict_convergence)
        else:
            bound = leggett_bound(model, layout, mode=task.bound_mode)
        value = leggett_value(model, layout)
        margin = value - bound.bound
        ev = LeggettEvaluation(value, bound, margin, margin > VIOLATION_TOL, layout)

    f_corr = ev.bound.f_min if ev.bound.mode == "state_corrected" else None
    try:
        f_an = inequality.analytic_fmin(task.layout_name, phi)
    except ValueError:
        f_an = None
    if f_corr is None and task.layout_name != "original":
        f_corr = numeric_fmin(
            model, ev.layout, bcfg, check_convergence=task.strict_convergence
        ).f_min

    chsh_b = None
    if task.include_chsh:
        ccfg = SearchConfig(
            ranges=_SPHERE * 4, starts=task.starts, seed=stable_seed(point_seed, "chsh")
        )
        chsh_b = optimize_chsh(model, ccfg).B

    return SweepRecord(
        index=index,
        alpha=alpha,
        phi=phi,
        L=ev.L,
        f_min_corrected=f_corr,
        f_min_analytic=f_an,
        bound_used=ev.bound.bound,
        chsh_B=chsh_b,
        margin=ev.margin,
        violated=ev.violated,
        starts=task.starts,
        seed=task.seed,
    )


def scan(variable: str, grid, task: ScanTask, workers: int = 1) -> list[SweepRecord]:
    """Evaluate the task at every grid point.

    Records come back sorted by grid index and are identical for any worker
    count (each point draws its own seed from the task seed and index)."""
    grid = list(grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be monotone nondecreasing")
    if variable == "phi":
        points = [(i, task.alpha, float(g)) for i, g in enumerate(grid)]
    elif variable == "alpha":
        if task.phi is None:
            raise ValueError("alpha scan needs task.phi")
        points = [(i, float(g), task.phi) for i, g in enumerate(grid)]
    else:
        raise ValueError("variable must be 'phi' or 'alpha'")

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda p: _scan_point(task, *p), points))
    else:
        records = [_scan_point(task, *p) for p in points]
    return sorted(records, key=lambda r: r.index)
