"""Unit-scale Gaussian randomization of Schrodinger data, the real symmetric
wave-pair randomization, and radial test-profile generators.

A draw multiplies each unit-cell piece P_k f by an i.i.d. coefficient g_k with
E g = 0 and E |g|^2 = 1.  Coefficients come from a counter-based generator
(Philox) keyed by (seed, draw), so ensembles are reproducible independently of
execution order.  Because at most two translates of the 1D profile are nonzero
at any frequency, the randomized multiplier sum_k g_k psi(xi - k) is assembled
from 2^d corner gathers instead of a loop over cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DegenerateDataError, NotRealError
from .grid import FREQUENCY, Field, SpectralGrid, lp_norm
from .projections import active_cell_box, smoothstep, unit_cell_tables, unit_projection

COMPLEX_GAUSSIAN = "complex_gaussian"
BERNOULLI = "bernoulli"


@dataclass(frozen=True)
class RandomizationSpec:
    """Seed, coefficient law and (optionally) the finite active cell set.

    active_set, when given, is a collection of integer lattice points k;
    coefficients outside it are zeroed.  When omitted, every cell inside the
    grid-feasible box participates (dead cells contribute nothing anyway).
    """

    seed: int
    law: str = COMPLEX_GAUSSIAN
    active_set: tuple | None = None

    def __post_init__(self):
        if self.law not in (COMPLEX_GAUSSIAN, BERNOULLI):
            raise ValueError(f"unknown law {self.law!r}")
        if self.active_set is not None:
            object.__setattr__(
                self, "active_set", tuple(tuple(int(c) for c in k) for k in self.active_set)
            )


def _philox(seed: int, draw: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), draw & (2**64 - 1)]))


def _draw_box(rng: np.random.Generator, shape: tuple, law: str) -> np.ndarray:
    """Complex coefficient box with E g = 0, E |g|^2 = 1, fixed C-order draw."""
    pair = rng.standard_normal(size=shape + (2,))
    if law == BERNOULLI:
        pair = np.where(pair >= 0.0, 1.0, -1.0)
    return (pair[..., 0] + 1j * pair[..., 1]) / np.sqrt(2.0)


def _active_mask(grid: SpectralGrid, K: int, active_set) -> np.ndarray | None:
    if active_set is None:
        return None
    if len(active_set) == 0:
        raise DegenerateDataError("active set is empty")
    mask = np.zeros((2 * K + 1,) * grid.d)
    for k in active_set:
        idx = tuple(c + K for c in k)
        if all(0 <= i < 2 * K + 1 for i in idx):
            mask[idx] = 1.0
    return mask


def _corner_multiplier(grid: SpectralGrid, gbox: np.ndarray, K: int) -> np.ndarray:
    """sum_k g_k psi(xi - k) on the lattice via the 2^d corner gathers."""
    n0, w0, w1 = unit_cell_tables(grid)
    mult = np.zeros(grid.shape, dtype=np.complex128)
    weights = (w0, w1)
    for corner in product((0, 1), repeat=grid.d):
        w = np.ones(grid.shape)
        idx1d = []
        for ax, b in enumerate(corner):
            shape = [1] * grid.d
            shape[ax] = grid.m
            w = w * weights[b].reshape(shape)
            idx1d.append(np.clip(n0 + b + K, 0, 2 * K))
        mult += w * gbox[np.ix_(*idx1d)]
    return mult


def randomize_schrodinger(f: Field, spec: RandomizationSpec, draw: int) -> Field:
    """f^omega = sum_k g_k(omega) P_k f, deterministic in (seed, draw)."""
    g = f.grid
    K = active_cell_box(g)
    rng = _philox(spec.seed, draw)
    gbox = _draw_box(rng, (2 * K + 1,) * g.d, spec.law)
    mask = _active_mask(g, K, spec.active_set)
    if mask is not None:
        gbox = gbox * mask
    fh = f.in_domain(FREQUENCY)
    mult = _corner_multiplier(g, gbox, K)
    out = Field(g, FREQUENCY, fh.values * mult)
    return out.in_domain(f.domain)


def _lex_sign(grid_shape_box: tuple, K: int, d: int) -> np.ndarray:
    """+1 on the lexicographic half-space, -1 on its negation, 0 at the origin."""
    sign = np.zeros(grid_shape_box, dtype=int)
    coords = np.indices(grid_shape_box) - K
    undecided = np.ones(grid_shape_box, dtype=bool)
    for ax in range(d):
        c = coords[ax]
        sign = np.where(undecided & (c > 0), 1, sign)
        sign = np.where(undecided & (c < 0), -1, sign)
        undecided = undecided & (c == 0)
    return sign


def _symmetric_box(rng: np.random.Generator, K: int, d: int, law: str) -> np.ndarray:
    """Coefficient box with g_{-k} = conj(g_k) exactly and E |g|^2 = 1.

    Independent real Gaussians live on a lexicographic half-space I with
    Z^d = I + (-I) + {0}; the origin coefficient is real.
    """
    shape = (2 * K + 1,) * d
    pair = rng.standard_normal(size=shape + (2,))
    if law == BERNOULLI:
        pair = np.where(pair >= 0.0, 1.0, -1.0)
    a, b = pair[..., 0], pair[..., 1]
    sign = _lex_sign(shape, K, d)
    g_half = (a + 1j * b) / np.sqrt(2.0)
    rev = (slice(None, None, -1),) * d
    g_reflected = np.conj(g_half[rev])
    g = np.where(sign > 0, g_half, np.where(sign < 0, g_reflected, a.astype(complex)))
    return g


def _require_real(f: Field, label: str) -> None:
    phys = f.in_domain("physical")
    scale = max(1.0, float(np.abs(phys.values).max()))
    if np.abs(phys.values.imag).max() > 1e-12 * scale:
        raise NotRealError(f"{label} must be real-valued")


def _lattice_conjugate_reflection(grid: SpectralGrid, arr: np.ndarray) -> np.ndarray:
    """conj(arr(-xi)) with xi -> -xi taken modulo the lattice (Nyquist fixed)."""
    out = np.conj(arr[(slice(None, None, -1),) * grid.d])
    return np.roll(out, shift=(1,) * grid.d, axis=tuple(range(grid.d)))


def randomize_wave_pair(
    f0: Field, f1: Field, spec: RandomizationSpec, draw: int
) -> tuple:
    """Real-output pair randomization via conjugate-symmetric coefficients.

    The unpaired Nyquist planes of the lattice (index -m/2 has no +m/2
    partner) are the one place the cell construction cannot pair xi with -xi;
    the multiplier is projected onto its conjugate-symmetric part there, which
    leaves every paired mode untouched and keeps the output exactly real.
    """
    _require_real(f0, "f0")
    _require_real(f1, "f1")
    g = f0.grid
    K = active_cell_box(g)
    rng = _philox(spec.seed, draw)
    box0 = _symmetric_box(rng, K, g.d, spec.law)
    box1 = _symmetric_box(rng, K, g.d, spec.law)
    mask = _active_mask(g, K, spec.active_set)
    if mask is not None:
        box0, box1 = box0 * mask, box1 * mask
    out = []
    for f, box in ((f0, box0), (f1, box1)):
        fh = f.in_domain(FREQUENCY)
        mult = _corner_multiplier(g, box, K)
        mult = 0.5 * (mult + _lattice_conjugate_reflection(g, mult))
        out.append(Field(g, FREQUENCY, fh.values * mult).in_domain(f.domain))
    return out[0], out[1]


def symmetric_coefficient_box(spec: RandomizationSpec, draw: int, grid: SpectralGrid):
    """The first wave coefficient box of a draw (exposed for symmetry checks)."""
    K = active_cell_box(grid)
    rng = _philox(spec.seed, draw)
    return _symmetric_box(rng, K, grid.d, spec.law), K


def compute_active_set(f: Field, rel_threshold: float = 1e-14) -> tuple:
    """Cells k with ||psi(. - k) fhat||_2 above the relative threshold.

    Follows the box ||k||_inf <= m*dxi/2 + 2 intersected with cells carrying
    mass; evaluated with one scatter-add pass per corner pattern.
    """
    g = f.grid
    K = active_cell_box(g)
    fh = f.in_domain(FREQUENCY)
    w2 = np.abs(fh.values) ** 2
    n0, w0, w1 = unit_cell_tables(g)
    weights = (w0, w1)
    mass = np.zeros((2 * K + 1,) * g.d)
    for corner in product((0, 1), repeat=g.d):
        w = np.ones(g.shape)
        idx1d = []
        for ax, b in enumerate(corner):
            shape = [1] * g.d
            shape[ax] = g.m
            w = w * weights[b].reshape(shape) ** 2
            idx1d.append(np.clip(n0 + b + K, 0, 2 * K))
        mesh = np.meshgrid(*idx1d, indexing="ij")
        flat = np.ravel_multi_index([mm.ravel() for mm in mesh], mass.shape)
        np.add.at(mass.reshape(-1), flat, (w * w2).ravel())
    total = float(np.sum(w2))
    if total == 0.0:
        return ()
    keep = np.argwhere(mass > (rel_threshold**2) * total)
    return tuple(tuple(int(c) - K for c in row) for row in keep)


def projected_mass_sum(f: Field, cells) -> float:
    """sum_k ||P_k f||_2^2 by direct summation of the projected pieces."""
    total = 0.0
    for k in cells:
        total += lp_norm(unit_projection(f, k).in_domain("physical"), 2) ** 2
    return total


@dataclass(frozen=True)
class RadialProfileSpec:
    """Radial data profile prescribed in frequency space.

    kind ``fourier_powerlaw``: rho(r) = <r>^{-(s + d/2 + ep0)} up to the
    cutoff Xi, which places f marginally in H^s (d/2 = 2 here).
    kind ``gaussian_bump``: rho(r) = exp(-r^2 / (2 width^2)).
    kind ``annulus_bump``: smooth plateau bump supported in [inner, outer].
    """

    kind: str
    target_s: float = 0.5
    ep0: float = 0.1
    cutoff: float = np.inf
    width: float = 1.0
    inner: float = 1.0
    outer: float = 2.0

    def __post_init__(self):
        if self.kind not in ("fourier_powerlaw", "gaussian_bump", "annulus_bump"):
            raise ValueError(f"unknown radial profile kind {self.kind!r}")

    def radial_profile(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.kind == "fourier_powerlaw":
            decay = self.target_s + 2.0 + self.ep0
            rho = (1.0 + r * r) ** (-decay / 2.0)
            if np.isfinite(self.cutoff):
                rho = rho * (r <= self.cutoff)
            return rho
        if self.kind == "gaussian_bump":
            return np.exp(-(r * r) / (2.0 * self.width**2))
        w = max((self.outer - self.inner) / 4.0, 1e-12)
        return smoothstep((r - self.inner) / w) * smoothstep((self.outer - r) / w)


def make_radial_data(spec: RadialProfileSpec, grid: SpectralGrid) -> Field:
    """Field with fhat(xi) = rho(|xi|), returned in the frequency domain."""
    r = np.sqrt(grid.xi_squared)
    return Field(grid, FREQUENCY, spec.radial_profile(r).astype(np.complex128))


def radial_symmetry_residual(f: Field) -> float:
    """Max over lattice orbits {|xi| = const} of the spread of fhat, relative
    to the largest coefficient magnitude."""
    g = f.grid
    fh = f.in_domain(FREQUENCY)
    n2 = np.zeros(g.shape, dtype=np.int64)
    for ax in range(1, g.d + 1):
        n = (np.arange(g.m) - g.m // 2).astype(np.int64)
        shape = [1] * g.d
        shape[ax - 1] = g.m
        n2 = n2 + (n.reshape(shape)) ** 2
    vals = fh.values.ravel()
    orbits = n2.ravel()
    scale = float(np.abs(vals).max())
    if scale == 0.0:
        return 0.0
    order = np.argsort(orbits, kind="stable")
    sorted_orbits = orbits[order]
    sorted_vals = vals[order]
    boundaries = np.flatnonzero(np.diff(sorted_orbits)) + 1
    worst = 0.0
    for chunk in np.split(sorted_vals, boundaries):
        if len(chunk) > 1:
            worst = max(worst, float(np.abs(chunk - chunk[0]).max()))
    return worst / scale
