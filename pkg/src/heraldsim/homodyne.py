"""Homodyne quadrature statistics and trace synthesis.

Quadrature convention: x = (a + a†)/sqrt(2), vacuum variance 1/2.  The
Fock-state quadrature densities are squared Hermite functions

    |psi_n(x)|**2,   psi_n(x) = H_n(x) exp(-x**2/2) / sqrt(2**n n! sqrt(pi)),

so <x**2> = (2n+1)/2 in Fock state n.  Samplers draw (x, theta) pairs with
the local-oscillator phase theta uniform on [0, 2*pi); x follows the
phase-conditional density Tr[rho |x,theta><x,theta|] via a tabulated
inverse CDF (diagonal states) or cell-bounded rejection (states with
coherences).

Trace synthesis emulates a continuous homodyne record: white vacuum noise
with per-sample standard deviation sqrt(1/(2*dt)) whose components along
the two analysis modes are replaced by jointly drawn mode quadratures.
Projecting a trace onto any normalized mode with  sum(mode*trace)*dt
recovers that mode's quadrature statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import PhotonDistribution
from .errors import (
    CutoffExceeded,
    EmptyInput,
    GridMismatch,
    InvalidDensity,
    ModesNotOrthogonal,
    OutOfRange,
)
from .fock import check_density
from .modes import HeraldPair, ModeFunction, TimeGrid

X_MAX = 8.0          # quadrature range [-X_MAX, X_MAX] covers all supported states
GRID_1D = 2 ** 14    # nodes of the 1-d tabulated CDF
GRID_2D = 512        # cells per axis of the 2-d joint sampler
MAX_FOCK = 16        # guard for the Hermite recurrence
REJECTION_GUARD = 1.02  # headroom of per-cell bounds over smooth variation


def hermite_function(n: int, x: np.ndarray | float) -> np.ndarray:
    """Normalized Hermite function psi_n evaluated by stable recurrence."""
    if not 0 <= n <= MAX_FOCK:
        raise CutoffExceeded(f"Fock index {n} outside [0, {MAX_FOCK}]")
    x = np.asarray(x, dtype=float)
    psi_prev = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n == 0:
        return psi_prev
    psi = math.sqrt(2.0) * x * psi_prev
    for k in range(1, n):
        psi, psi_prev = (
            math.sqrt(2.0 / (k + 1)) * x * psi - math.sqrt(k / (k + 1)) * psi_prev,
            psi,
        )
    return psi


def fock_quadrature_pdf(n: int, x: np.ndarray | float) -> np.ndarray:
    """Quadrature density |psi_n(x)|**2 of Fock state n."""
    psi = hermite_function(n, x)
    return psi * psi


def mixture_pdf(dist: PhotonDistribution, x: np.ndarray | float) -> np.ndarray:
    """Phase-independent quadrature density of a Fock-diagonal state."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for n, p in enumerate(dist.probs):
        if p > 0.0:
            out += p * fock_quadrature_pdf(n, x)
    return out


@dataclass(frozen=True)
class QuadratureSample:
    """One homodyne outcome: quadrature value and local-oscillator phase."""

    x: float
    theta: float


@dataclass(frozen=True)
class QuadratureTrace:
    """A synthesized homodyne record over an acquisition window."""

    grid: TimeGrid
    samples: np.ndarray = field(repr=False)
    herald: HeraldPair
    theta: float = 0.0
    seed: int = -1

    def __post_init__(self) -> None:
        s = np.asarray(self.samples, dtype=float).copy()
        if s.shape != (self.grid.n_samples,):
            raise GridMismatch("trace length does not match grid")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)


def _tabulated_inverse_cdf(pdf_nodes: np.ndarray, xs: np.ndarray):
    """Piecewise-linear inverse CDF from pdf values on the node grid."""
    h = xs[1] - xs[0]
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf_nodes[1:] + pdf_nodes[:-1]) * h)])
    total = cdf[-1]
    if total <= 0.0:
        raise InvalidDensity("quadrature density has no mass on the sampling range")
    cdf /= total

    def draw(u: np.ndarray) -> np.ndarray:
        return np.interp(u, cdf, xs)

    return draw


def _phase_blocks_1d(rho: np.ndarray, xs: np.ndarray):
    """Split p(x|theta) into phase harmonics.

    Returns (g0, harmonics) with p(x|theta) = g0(x) +
    2*sum_d Re[G_d(x) * exp(i*d*theta)], harmonics keyed by d > 0.
    """
    dim = rho.shape[0]
    psi = np.stack([hermite_function(n, xs) for n in range(dim)])
    g0 = np.zeros_like(xs)
    harmonics: dict[int, np.ndarray] = {}
    for m in range(dim):
        for n in range(dim):
            if rho[m, n] == 0.0:
                continue
            d = n - m
            term = rho[m, n] * psi[m] * psi[n]
            if d == 0:
                g0 += term.real
            elif d > 0:
                harmonics[d] = harmonics.get(d, np.zeros_like(xs, dtype=complex)) + term
    return g0, harmonics


def sample_quadratures(rho: np.ndarray, count: int, rng_seed: int) -> np.ndarray:
    """Draw ``count`` (x, theta) pairs from a single-mode density matrix.

    theta is uniform on [0, 2*pi).  For Fock-diagonal states x comes from
    the tabulated inverse CDF of the phase-independent mixture density;
    otherwise a per-cell bounded rejection sampler handles the
    phase-dependent coherence terms exactly.

    Returns an array of shape (count, 2) with columns (x, theta).
    Deterministic for a fixed seed.
    """
    if count <= 0:
        raise EmptyInput(f"sample count must be positive, got {count}")
    rho = np.asarray(rho, dtype=complex)
    check_density(rho)
    if rho.shape[0] - 1 > MAX_FOCK:
        raise CutoffExceeded(f"density matrix cutoff {rho.shape[0] - 1} > {MAX_FOCK}")
    rng = np.random.default_rng(rng_seed)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
    xs = np.linspace(-X_MAX, X_MAX, GRID_1D)
    offdiag = rho - np.diag(np.diag(rho))
    if np.max(np.abs(offdiag)) < 1e-12:
        diag = np.clip(np.real(np.diag(rho)), 0.0, None)
        pdf = mixture_pdf(PhotonDistribution(diag / diag.sum()), xs)
        draw = _tabulated_inverse_cdf(pdf, xs)
        x = draw(rng.uniform(0.0, 1.0, size=count))
        return np.column_stack([x, theta])

    # coherent case: rejection against a per-cell phase-independent bound
    g0, harmonics = _phase_blocks_1d(rho, xs)
    bound_nodes = g0 + sum(2.0 * np.abs(g) for g in harmonics.values())
    cell_bound = np.maximum(bound_nodes[1:], bound_nodes[:-1]) * REJECTION_GUARD
    h = xs[1] - xs[0]
    cell_cdf = np.cumsum(cell_bound * h)
    cell_cdf /= cell_cdf[-1]
    dim = rho.shape[0]

    def pdf_exact(xv: np.ndarray, tv: np.ndarray) -> np.ndarray:
        psi = np.stack([hermite_function(n, xv) for n in range(dim)])
        w = psi * np.exp(1j * np.outer(np.arange(dim), tv))
        return np.real(np.einsum("in,ij,jn->n", w.conj(), rho, w))

    out_x = np.empty(count)
    out_t = np.empty(count)
    filled = 0
    while filled < count:
        todo = count - filled
        batch = max(int(todo * 1.5) + 16, 64)
        cells = np.searchsorted(cell_cdf, rng.uniform(0.0, 1.0, size=batch))
        xv = xs[cells] + h * rng.uniform(0.0, 1.0, size=batch)
        tv = rng.uniform(0.0, 2.0 * math.pi, size=batch)
        accept = rng.uniform(0.0, 1.0, size=batch) * cell_bound[cells] <= pdf_exact(xv, tv)
        take = min(int(accept.sum()), todo)
        idx = np.nonzero(accept)[0][:take]
        out_x[filled : filled + take] = xv[idx]
        out_t[filled : filled + take] = tv[idx]
        filled += take
    return np.column_stack([out_x, out_t])


def _phase_blocks_2d(rho2: np.ndarray, d: int, centers: np.ndarray):
    """Phase harmonics of the joint density on the cell-center grid."""
    psi = np.stack([hermite_function(n, centers) for n in range(d)])  # (d, G)
    r4 = rho2.reshape(d, d, d, d)  # indices (m, n, m', n')
    totals = np.add.outer(np.arange(d), np.arange(d))  # m + n
    blocks: dict[int, np.ndarray] = {}
    # diffs[m, n, m', n'] = (m + n) - (m' + n'); the delta = 0 block is the
    # phase average and |G_delta| bounds cover the conjugate pairs.
    diffs = np.subtract.outer(totals, totals)
    for delta in range(0, 2 * d - 1):
        rm = r4 * (diffs == delta)
        if not np.any(rm):
            continue
        g = np.einsum("mnop,ma,oa,nb,pb->ab", rm, psi, psi, psi, psi, optimize=True)
        blocks[delta] = g
    return blocks


def joint_sample_two_modes(rho2: np.ndarray, count: int, rng_seed: int) -> np.ndarray:
    """Draw ``count`` joint quadrature triples (x1, x2, theta) of two modes
    measured with a shared local-oscillator phase.

    The joint density is evaluated on a 512 x 512 cell grid over
    [-8, 8]^2 and sampled by inverse CDF over the flattened grid (with
    uniform jitter inside cells).  States whose coherences connect unequal
    total photon number get the same per-cell bounded rejection treatment
    as the 1-d sampler.

    Returns an array of shape (count, 3).  Deterministic for a fixed seed.
    """
    if count <= 0:
        raise EmptyInput(f"sample count must be positive, got {count}")
    rho2 = np.asarray(rho2, dtype=complex)
    check_density(rho2)
    d = int(round(math.sqrt(rho2.shape[0])))
    if d * d != rho2.shape[0]:
        raise InvalidDensity(f"two-mode matrix dimension {rho2.shape[0]} is not a square")
    rng = np.random.default_rng(rng_seed)
    edges = np.linspace(-X_MAX, X_MAX, GRID_2D + 1)
    h = edges[1] - edges[0]
    centers = 0.5 * (edges[:-1] + edges[1:])
    blocks = _phase_blocks_2d(rho2, d, centers)
    g0 = np.clip(blocks.get(0, np.zeros((GRID_2D, GRID_2D))).real, 0.0, None)
    harmonic = {k: v for k, v in blocks.items() if k != 0 and np.max(np.abs(v)) > 1e-12}

    if not harmonic:
        masses = g0.ravel()
        cdf = np.cumsum(masses)
        cdf /= cdf[-1]
        flat = np.searchsorted(cdf, rng.uniform(0.0, 1.0, size=count))
        i1, i2 = np.unravel_index(flat, (GRID_2D, GRID_2D))
        x1 = edges[i1] + h * rng.uniform(0.0, 1.0, size=count)
        x2 = edges[i2] + h * rng.uniform(0.0, 1.0, size=count)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=count)
        return np.column_stack([x1, x2, theta])

    bound = (g0 + sum(2.0 * np.abs(g) for g in harmonic.values())) * REJECTION_GUARD
    masses = bound.ravel()
    cdf = np.cumsum(masses)
    cdf /= cdf[-1]
    r4 = rho2.reshape(d, d, d, d)

    def pdf_exact(x1v, x2v, tv):
        psi1 = np.stack([hermite_function(n, x1v) for n in range(d)])
        psi2 = np.stack([hermite_function(n, x2v) for n in range(d)])
        ph = np.exp(1j * np.outer(np.arange(d), tv))
        w1 = psi1 * ph
        w2 = psi2 * ph
        return np.real(
            np.einsum("ms,ns,mnop,os,ps->s", w1.conj(), w2.conj(), r4, w1, w2, optimize=True)
        )

    out = np.empty((count, 3))
    filled = 0
    while filled < count:
        todo = count - filled
        batch = max(int(todo * 1.5) + 16, 64)
        flat = np.searchsorted(cdf, rng.uniform(0.0, 1.0, size=batch))
        i1, i2 = np.unravel_index(flat, (GRID_2D, GRID_2D))
        x1 = edges[i1] + h * rng.uniform(0.0, 1.0, size=batch)
        x2 = edges[i2] + h * rng.uniform(0.0, 1.0, size=batch)
        tv = rng.uniform(0.0, 2.0 * math.pi, size=batch)
        accept = rng.uniform(0.0, 1.0, size=batch) * bound[i1, i2] <= pdf_exact(x1, x2, tv)
        take = min(int(accept.sum()), todo)
        idx = np.nonzero(accept)[0][:take]
        out[filled : filled + take, 0] = x1[idx]
        out[filled : filled + take, 1] = x2[idx]
        out[filled : filled + take, 2] = tv[idx]
        filled += take
    return out


def vacuum_two_mode(n_max: int = 2) -> np.ndarray:
    """Product vacuum of two modes on the (n_max+1)**2 product basis."""
    d = n_max + 1
    rho = np.zeros((d * d, d * d), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def _check_analysis_pair(f1: ModeFunction, f2: ModeFunction) -> None:
    if f1.grid != f2.grid:
        raise GridMismatch("analysis modes on different grids")
    if not (f1.normalized and f2.normalized):
        raise ModesNotOrthogonal("analysis modes must be normalized")
    ov = float(np.dot(f1.samples, f2.samples)) * f1.grid.dt
    if abs(ov) > 1e-9:
        raise ModesNotOrthogonal(f"analysis modes overlap {ov:.2e} > 1e-9")


def synthesize_trace(
    rho2: np.ndarray,
    f1: ModeFunction,
    f2: ModeFunction,
    herald: HeraldPair,
    rng_seed: int,
) -> QuadratureTrace:
    """Synthesize one homodyne trace for a state of the (f1, f2) pair.

    A white Gaussian record with per-sample standard deviation
    sqrt(1/(2*dt)) carries vacuum statistics in every normalized mode; its
    components along f1 and f2 are replaced by a joint draw from ``rho2``.
    """
    traces, quads, thetas = synthesize_trace_batch(rho2, f1, f2, herald, 1, rng_seed)
    return QuadratureTrace(
        grid=f1.grid,
        samples=traces[0],
        herald=herald,
        theta=float(thetas[0]),
        seed=rng_seed,
    )


def synthesize_trace_batch(
    rho2: np.ndarray,
    f1: ModeFunction,
    f2: ModeFunction,
    herald: HeraldPair,
    count: int,
    rng_seed: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized trace synthesis: (traces, quadrature pairs, phases).

    ``traces`` has shape (count, n_samples); row k carries the joint draw
    (quads[k, 0], quads[k, 1]) in modes (f1, f2) and vacuum elsewhere.
    """
    _check_analysis_pair(f1, f2)
    grid = f1.grid
    dt = grid.dt
    joint = joint_sample_two_modes(rho2, count, rng_seed)
    # independent stream for the vacuum record so mode draws stay aligned
    # with the joint sampler regardless of trace length
    noise_rng = np.random.default_rng(np.random.SeedSequence(entropy=rng_seed, spawn_key=(1,)))
    sigma = math.sqrt(1.0 / (2.0 * dt))
    traces = noise_rng.normal(0.0, sigma, size=(count, grid.n_samples))
    for mode, col in ((f1, 0), (f2, 1)):
        current = traces @ mode.samples * dt
        traces += np.outer(joint[:, col] - current, mode.samples)
    return traces, joint[:, :2], joint[:, 2]


def project_trace(trace: QuadratureTrace | np.ndarray, xi: ModeFunction, grid: TimeGrid | None = None) -> float | np.ndarray:
    """Project a trace (or batch of trace rows) onto a normalized mode:
    sum(xi * trace) * dt."""
    if isinstance(trace, QuadratureTrace):
        if trace.grid != xi.grid:
            raise GridMismatch("trace and analysis mode on different grids")
        return float(np.dot(trace.samples, xi.samples) * xi.grid.dt)
    if grid is not None and grid != xi.grid:
        raise GridMismatch("trace and analysis mode on different grids")
    arr = np.asarray(trace, dtype=float)
    if arr.shape[-1] != xi.grid.n_samples:
        raise GridMismatch("trace length does not match analysis grid")
    return arr @ xi.samples * xi.grid.dt


def write_trace_csv(trace: QuadratureTrace, path: str) -> None:
    """Trace file: one header row (t_start, dt, n_samples, t1, t2, seed),
    then one sample per line."""
    with open(path, "w") as fh:
        fh.write("t_start,dt,n_samples,t1,t2,seed\n")
        fh.write(
            f"{trace.grid.t_start:.12g},{trace.grid.dt:.12g},{trace.grid.n_samples},"
            f"{trace.herald.t1:.12g},{trace.herald.t2:.12g},{trace.seed}\n"
        )
        fh.write("sample\n")
        for v in trace.samples:
            fh.write(f"{v:.12g}\n")


def read_trace_csv(path: str) -> QuadratureTrace:
    with open(path) as fh:
        fh.readline()
        t_start, dt, n_samples, t1, t2, seed = fh.readline().strip().split(",")
        fh.readline()
        samples = np.array([float(line) for line in fh if line.strip()])
    grid = TimeGrid(t_start=float(t_start), dt=float(dt), n_samples=int(n_samples))
    return QuadratureTrace(
        grid=grid,
        samples=samples,
        herald=HeraldPair(t1=float(t1), t2=float(t2)),
        seed=int(seed),
    )
