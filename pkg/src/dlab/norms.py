"""Space-time norms: Strichartz, lateral, the dyadic X/Y/G building blocks,
their aggregates, and the Z norm used by the Morawetz/energy diagnostics.

Time integrals use the trapezoid rule on trajectory frames (the integrand
||.||^q is only Lipschitz in t, so a higher-order rule buys nothing) and
infinite exponents are realized as grid/frame maxima.  Lateral norms place
the chosen coordinate axis outermost via one transpose pass and then take
two nested power sums.  Large exponents (4/eps and friends) are evaluated
with a peak-normalization guard so no intermediate overflows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidExponentError
from .grid import FREQUENCY, PHYSICAL, Field, SpectralGrid, Trajectory
from .projections import Band, band_symbol

_STACK_LIMIT = 6 * 10**8  # bytes of complex128 a norm evaluation may materialize


@dataclass(frozen=True)
class EpsilonPolicy:
    """The fixed small epsilon of the functional framework plus the data
    regularity s it must be compatible with (eps <= (s - 1/3)/3 when s > 1/3).
    """

    eps: float = 0.05
    s: float | None = None

    def __post_init__(self):
        if not 0 < self.eps < 2:
            raise ValueError(f"eps must lie in (0, 2), got {self.eps}")
        if self.s is not None and self.s > 1.0 / 3.0:
            cap = (self.s - 1.0 / 3.0) / 3.0
            if self.eps > cap + 1e-12:
                raise ValueError(
                    f"eps={self.eps} violates eps <= (s - 1/3)/3 = {cap:.4g} at s={self.s}"
                )

    @property
    def x_lateral_pq(self) -> tuple:
        return 4.0 / (2.0 - self.eps), 4.0 / self.eps

    @property
    def y_smoothing_pq(self) -> tuple:
        return 4.0 / self.eps, 4.0 / (2.0 - self.eps)

    @property
    def y_maximal_pq(self) -> tuple:
        return 4.0 / (2.0 - self.eps), 4.0 / self.eps

    @property
    def g_lateral_pq(self) -> tuple:
        return 4.0 / (4.0 - self.eps), 4.0 / (2.0 + self.eps)

    @property
    def divisibility_exponent(self) -> float:
        return 4.0 / self.eps


@dataclass
class NormReport:
    """A computed norm value plus its specification and quadrature metadata."""

    kind: str
    value: float
    dt: float
    frame_count: int
    params: dict = field(default_factory=dict)
    band: float | None = None
    upper_bound: bool = False
    truncated_bands: tuple = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "dt": self.dt,
            "frame_count": self.frame_count,
            "params": self.params,
            "band": self.band,
            "upper_bound": self.upper_bound,
            "truncated_bands": list(self.truncated_bands),
        }


def is_admissible(q: float, r: float, tol: float = 1e-9) -> bool:
    """Strichartz admissibility 2/q + 4/r = 2 (recorded, never enforced)."""
    if q < 2 or r < 2:
        return False
    return abs(2.0 / q + 4.0 / r - 2.0) <= tol


def _window(v: Trajectory, interval) -> tuple:
    """Resolve an interval to (i0, i1, trapezoid weights)."""
    if interval is None:
        i0, i1 = 0, v.n_frames - 1
    else:
        ta, tb = interval
        if tb < ta:
            raise ValueError(f"empty interval [{ta}, {tb}]")
        i0, i1 = v.frame_index(ta), v.frame_index(tb)
    n = i1 - i0 + 1
    w = np.zeros(n)
    if n > 1:
        w[:] = v.dt
        w[0] = w[-1] = 0.5 * v.dt
    return i0, i1, w


def _physical_arrays(v: Trajectory, i0: int, i1: int) -> list:
    n = i1 - i0 + 1
    if n * v.grid.size * 16 > _STACK_LIMIT:
        raise MemoryError(
            f"window of {n} frames on m={v.grid.m}^4 exceeds the norm stack limit"
        )
    return [v.frames[i].in_domain(PHYSICAL).values for i in range(i0, i1 + 1)]


def _power_mean(values: np.ndarray, weights: np.ndarray, q: float) -> float:
    """(sum_j w_j values_j^q)^(1/q) with a peak guard; q = inf gives max."""
    values = np.asarray(values, dtype=float)
    if np.isinf(q):
        return float(values.max(initial=0.0))
    peak = values.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    return float(peak * (np.sum(weights * (values / peak) ** q)) ** (1.0 / q))


def strichartz_norm(v: Trajectory, q: float, r: float, interval=None) -> float:
    """L^q_t L^r_x norm over the window by trapezoid quadrature over frames."""
    if q < 1 or r < 1:
        raise InvalidExponentError(f"exponents must be >= 1, got q={q}, r={r}")
    i0, i1, w = _window(v, interval)
    g = v.grid
    vol = g.dx**g.d
    per_frame = np.empty(i1 - i0 + 1)
    for j, i in enumerate(range(i0, i1 + 1)):
        a = np.abs(v.frames[i].in_domain(PHYSICAL).values)
        if np.isinf(r):
            per_frame[j] = a.max()
        else:
            peak = a.max()
            per_frame[j] = 0.0 if peak == 0.0 else peak * (vol * np.sum((a / peak) ** r)) ** (1.0 / r)
    return _power_mean(per_frame, w, q)


def lateral_norm(v: Trajectory, p: float, q: float, axis: int, interval=None) -> float:
    """Lateral L^{p,q}_{e_axis} norm: x_axis outermost at exponent p, the
    (t, x') block inner at exponent q."""
    g = v.grid
    if not 1 <= axis <= g.d:
        raise InvalidExponentError(f"axis must be in 1..{g.d}, got {axis}")
    if p < 1 or q < 1:
        raise InvalidExponentError(f"exponents must be >= 1, got p={p}, q={q}")
    i0, i1, w = _window(v, interval)
    arrs = _physical_arrays(v, i0, i1)
    ax = axis - 1
    other_axes = tuple(a for a in range(g.d) if a != ax)
    vol_inner = g.dx ** (g.d - 1)

    if np.isinf(q):
        inner = np.zeros(g.m)
        for a in arrs:
            inner = np.maximum(inner, np.abs(a).max(axis=other_axes))
    else:
        peak = max((np.abs(a).max() for a in arrs), default=0.0)
        if peak == 0.0:
            return 0.0
        acc = np.zeros(g.m)
        for wt, a in zip(w, arrs):
            acc += wt * np.sum((np.abs(a) / peak) ** q, axis=other_axes)
        inner = peak * (vol_inner * acc) ** (1.0 / q)

    if np.isinf(p):
        return float(inner.max(initial=0.0))
    pk = inner.max(initial=0.0)
    if pk == 0.0:
        return 0.0
    return float(pk * (g.dx * np.sum((inner / pk) ** p)) ** (1.0 / p))


def _batch_to_physical(stack_freq: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    axes = tuple(range(1, grid.d + 1))
    a = np.fft.ifftshift(stack_freq, axes=axes)
    a = np.fft.ifftn(a, axes=axes)
    return np.fft.fftshift(a, axes=axes) / grid.dx**grid.d


def _band_projected(v: Trajectory, i0: int, i1: int, symbol: np.ndarray) -> Trajectory:
    """Band-projected window as a new physical-domain trajectory."""
    g = v.grid
    n = i1 - i0 + 1
    if n * g.size * 16 > _STACK_LIMIT:
        raise MemoryError("band projection window exceeds the norm stack limit")
    stack = np.stack([v.frames[i].in_domain(FREQUENCY).values for i in range(i0, i1 + 1)])
    stack *= symbol
    phys = _batch_to_physical(stack, g)
    frames = tuple(Field(g, PHYSICAL, phys[j]) for j in range(n))
    return Trajectory(g, v.t0 + i0 * v.dt, v.dt, frames)


def aggregate_bands(grid: SpectralGrid) -> list:
    """Dyadic N contributing to the aggregate norms: 2*dxi <= N <= m*dxi/4."""
    lo, hi = 2.0 * grid.dxi, grid.m * grid.dxi / 4.0
    j = int(np.ceil(np.log2(lo) - 1e-9))
    out = []
    while 2.0**j <= hi * (1 + 1e-9):
        out.append(2.0**j)
        j += 1
    return out


def xn_norm(v: Trajectory, N: float, interval=None, pol: EpsilonPolicy = EpsilonPolicy()) -> float:
    """Dyadic solution-space building block at band N:

        N ||P_N v||_{L2 L4} + N ||P_N v||_{L3 L3} + N ||P_N v||_{L6 L12/5}
        + sum_axes N^(-1/2+eps) ||P_N v||_{lateral (4/(2-eps), 4/eps)}.
    """
    g = v.grid
    i0, i1, _ = _window(v, interval)
    vN = _band_projected(v, i0, i1, band_symbol(g, Band.dyadic(N)))
    total = N * strichartz_norm(vN, 2, 4)
    total += N * strichartz_norm(vN, 3, 3)
    total += N * strichartz_norm(vN, 6, 12.0 / 5.0)
    p, q = pol.x_lateral_pq
    for ax in range(1, g.d + 1):
        total += N ** (-0.5 + pol.eps) * lateral_norm(vN, p, q, ax)
    return float(total)


def yn_norm(F: Trajectory, N: float, interval=None, pol: EpsilonPolicy = EpsilonPolicy()) -> float:
    """Dyadic forcing-space building block at band N:

        <N>^(1/3+3eps) ( ||P_N F||_{L3 L6} + ||P_N F||_{L6 L6} )
        + sum_axes <N>^(1/3+3eps) N^(1/2-eps) ||P_{N,e} P_N F||_{lateral (4/eps, 4/(2-eps))}
        + sum_axes N^(-1/6) ||P_N F||_{lateral (4/(2-eps), 4/eps)}.
    """
    g = F.grid
    i0, i1, _ = _window(F, interval)
    japN = (1.0 + N * N) ** 0.5
    wN = japN ** (1.0 / 3.0 + 3.0 * pol.eps)
    sym_N = band_symbol(g, Band.dyadic(N))
    FN = _band_projected(F, i0, i1, sym_N)
    total = wN * (strichartz_norm(FN, 3, 6) + strichartz_norm(FN, 6, 6))
    p_ls, q_ls = pol.y_smoothing_pq
    for ax in range(1, g.d + 1):
        sym_dir = band_symbol(g, Band.directional(N, ax)) * sym_N
        FNdir = _band_projected(F, i0, i1, sym_dir)
        total += wN * N ** (0.5 - pol.eps) * lateral_norm(FNdir, p_ls, q_ls, ax)
    p_mx, q_mx = pol.y_maximal_pq
    for ax in range(1, g.d + 1):
        total += N ** (-1.0 / 6.0) * lateral_norm(FN, p_mx, q_mx, ax)
    return float(total)


def gn_norm_upper(h: Trajectory, N: float, interval=None, pol: EpsilonPolicy = EpsilonPolicy()) -> float:
    """Upper bound on the dyadic nonlinearity-space norm at band N.

    The true norm is an infimum over splittings P_N h = h1 + h2; this takes
    the smaller of the two pure splittings (h, 0) and (0, h), so it is an
    upper bound (reported as such wherever it enters a NormReport).
    """
    g = h.grid
    i0, i1, _ = _window(h, interval)
    hN = _band_projected(h, i0, i1, band_symbol(g, Band.dyadic(N)))
    term1 = N * strichartz_norm(hN, 1, 2)
    p, q = pol.g_lateral_pq
    term2 = 0.0
    for ax in range(1, g.d + 1):
        term2 += N ** (0.5 + pol.eps) * lateral_norm(hN, p, q, ax)
    return float(min(term1, term2))


def _aggregate(fn, v, interval, pol, bands) -> float:
    if bands is None:
        bands = aggregate_bands(v.grid)
    total = 0.0
    for N in bands:
        total += fn(v, N, interval, pol) ** 2
    return float(np.sqrt(total))


def x_norm(v, interval=None, pol: EpsilonPolicy = EpsilonPolicy(), bands=None) -> float:
    """l^2 aggregate of xn_norm over the grid-resolved dyadic bands."""
    return _aggregate(xn_norm, v, interval, pol, bands)


def y_norm(F, interval=None, pol: EpsilonPolicy = EpsilonPolicy(), bands=None) -> float:
    """l^2 aggregate of yn_norm over the grid-resolved dyadic bands."""
    return _aggregate(yn_norm, F, interval, pol, bands)


def g_norm_upper(h, interval=None, pol: EpsilonPolicy = EpsilonPolicy(), bands=None) -> float:
    """l^2 aggregate of the per-band gn_norm_upper minima (an upper bound)."""
    return _aggregate(gn_norm_upper, h, interval, pol, bands)


def z_norm(F: Trajectory, interval=None) -> float:
    """||F||_{L3 L6} + ||<x>^(1/2) F||_{L2 Linf} + ||grad F||_{L2 L4}."""
    g = F.grid
    i0, i1, w = _window(F, interval)
    term1 = strichartz_norm(F, 3, 6, interval)

    jap = (1.0 + g.x_squared) ** 0.25
    sup_w = np.empty(i1 - i0 + 1)
    grad_l4 = np.empty(i1 - i0 + 1)
    vol = g.dx**g.d
    for j, i in enumerate(range(i0, i1 + 1)):
        fr = F.frames[i]
        phys = fr.in_domain(PHYSICAL).values
        sup_w[j] = (jap * np.abs(phys)).max()
        fh = fr.in_domain(FREQUENCY).values
        gmag2 = np.zeros(g.shape)
        for ax in range(1, g.d + 1):
            sym = 1j * g.axis_coord(ax, frequency=True)
            stackp = _batch_to_physical((fh * sym)[None, ...], g)[0]
            gmag2 += np.abs(stackp) ** 2
        grad_l4[j] = (vol * np.sum(gmag2**2)) ** 0.25
    term2 = _power_mean(sup_w, w, 2)
    term3 = _power_mean(grad_l4, w, 2)
    return float(term1 + term2 + term3)


def linf_h1(v: Trajectory, interval=None) -> float:
    """sup over frames of the homogeneous H^1 norm."""
    from .grid import sobolev_norm

    i0, i1, _ = _window(v, interval)
    return max(
        sobolev_norm(v.frames[i], 1.0, homogeneous=True) for i in range(i0, i1 + 1)
    )


def linf_l2(v: Trajectory, interval=None) -> float:
    from .grid import lp_norm

    i0, i1, _ = _window(v, interval)
    return max(
        lp_norm(v.frames[i].in_domain(PHYSICAL), 2) for i in range(i0, i1 + 1)
    )


@dataclass
class DivisibilityReport:
    which: str
    lhs: float
    rhs: float
    exponent: float
    subinterval_norms: tuple
    ok: bool


def divisibility_check(
    v: Trajectory,
    breakpoints,
    which: str = "X",
    pol: EpsilonPolicy = EpsilonPolicy(),
    interval=None,
) -> DivisibilityReport:
    """Check the time-divisibility inequality

        || { ||v||_{X(I_j)} } ||_{l^(4/eps)} <= ||v||_{X(I)}

    for a partition of I at the given interior frame times (same for Y).
    """
    if which not in ("X", "Y"):
        raise ValueError("which must be 'X' or 'Y'")
    norm = x_norm if which == "X" else y_norm
    i0, i1, _ = _window(v, interval)
    ta, tb = v.t0 + i0 * v.dt, v.t0 + i1 * v.dt
    cuts = [ta] + sorted(breakpoints) + [tb]
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            raise ValueError("breakpoints must strictly partition the interval")
    sub = np.array([norm(v, (a, b), pol) for a, b in zip(cuts, cuts[1:])])
    rhs = norm(v, (ta, tb), pol)
    qd = pol.divisibility_exponent
    lhs = _power_mean(sub, np.ones_like(sub), qd)
    return DivisibilityReport(
        which=which,
        lhs=float(lhs),
        rhs=float(rhs),
        exponent=qd,
        subinterval_norms=tuple(float(s) for s in sub),
        ok=bool(lhs <= rhs * (1.0 + 1e-8)),
    )
