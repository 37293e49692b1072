"""Maximum-likelihood photon-number tomography from homodyne samples.

Phase-randomized homodyne data determine the photon-number distribution:
the probability of a quadrature outcome in bin j given n photons is

    Pi[n][j] = integral over bin j of |psi_n(x)|**2 dx,

independent of the local-oscillator phase.  ``ml_diagonal`` runs the
expectation-maximization fixed point

    P_n  <-  P_n * (1/J) * sum_j  hist_j * Pi[n][j] / p_j,
    p_j = sum_n P_n * Pi[n][j],

whose log-likelihood is non-decreasing.  ``ml_full`` keeps the phases and
iterates R(rho) rho R(rho) with trace renormalization, reconstructing the
full density matrix (coherences included).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analytic import PhotonDistribution
from .errors import CutoffExceeded, EmptyInput, OutOfRange
from .homodyne import X_MAX, hermite_function

# Gauss-Legendre order per bin; exact to machine precision for the smooth
# squared Hermite functions at the default binning.
_GL_ORDER = 16


@dataclass(frozen=True)
class MLConfig:
    """Reconstruction settings: Fock cutoff and stopping rule."""

    cutoff: int = 5
    max_iters: int = 2000
    tol: float = 1e-10
    n_bins: int = 256

    def __post_init__(self) -> None:
        if self.cutoff < 2:
            raise CutoffExceeded(f"cutoff must be >= 2, got {self.cutoff}")
        if self.max_iters < 1 or self.tol <= 0.0 or self.n_bins < 64:
            raise OutOfRange("invalid iteration settings")


@dataclass(frozen=True)
class BinnedPOVM:
    """Per-Fock-state bin masses over a uniform quadrature binning."""

    edges: np.ndarray
    elements: np.ndarray = field(repr=False)  # shape (cutoff+1, n_bins)

    @property
    def cutoff(self) -> int:
        return self.elements.shape[0] - 1

    @property
    def n_bins(self) -> int:
        return self.elements.shape[1]


def build_povm(cutoff: int, n_bins: int = 256) -> BinnedPOVM:
    """Integrate |psi_n|**2 over each bin of [-X_MAX, X_MAX] by fixed-order
    Gauss-Legendre quadrature.  Row sums equal 1 up to the (negligible)
    tail mass beyond +-X_MAX."""
    if cutoff < 1:
        raise CutoffExceeded(f"cutoff must be >= 1, got {cutoff}")
    if n_bins < 64:
        raise OutOfRange(f"need at least 64 bins, got {n_bins}")
    edges = np.linspace(-X_MAX, X_MAX, n_bins + 1)
    nodes, weights = np.polynomial.legendre.leggauss(_GL_ORDER)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[:-1] + edges[1:])
    xs = mids[:, None] + half * nodes[None, :]  # (n_bins, order)
    elements = np.empty((cutoff + 1, n_bins))
    for n in range(cutoff + 1):
        psi = hermite_function(n, xs)
        elements[n] = (psi * psi) @ weights * half
    return BinnedPOVM(edges=edges, elements=elements)


@dataclass(frozen=True)
class MLResult:
    """Reconstruction output: probabilities plus convergence metadata."""

    probs: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    cutoff: int
    ll_history: np.ndarray = field(repr=False, default_factory=lambda: np.array([]))
    stderr: np.ndarray | None = None

    def distribution(self) -> PhotonDistribution:
        return PhotonDistribution(self.probs)

    def to_json_dict(self) -> dict:
        out = {
            "cutoff": self.cutoff,
            "probs": [float(p) for p in self.probs],
            "log_likelihood": float(self.log_likelihood),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
        }
        if self.stderr is not None:
            out["stderr"] = [float(s) for s in self.stderr]
        return out


def _bin_samples(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    clipped = np.clip(x, edges[0], edges[-1] - 1e-12)
    idx = np.searchsorted(edges, clipped, side="right") - 1
    return np.bincount(idx, minlength=edges.size - 1).astype(float)


def ml_diagonal(samples: np.ndarray, config: MLConfig = MLConfig()) -> MLResult:
    """EM estimate of the photon-number distribution from quadrature values.

    ``samples`` may be a 1-d array of x values or an (N, 2) array of
    (x, theta) rows; phases are irrelevant for the phase-averaged POVM and
    are ignored.  Stops when the relative log-likelihood gain drops below
    ``config.tol``; the result carries a ``converged`` flag (no exception
    on hitting the iteration budget: the best iterate is returned).
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 2:
        x = x[:, 0]
    if x.size == 0:
        raise EmptyInput("no quadrature samples")
    if x.size < 1000:
        warnings.warn(
            f"only {x.size} samples; estimates below ~1e3 samples are noisy",
            stacklevel=2,
        )
    povm = build_povm(config.cutoff, config.n_bins)
    hist = _bin_samples(x, povm.edges)
    total = hist.sum()
    pi = povm.elements  # (cutoff+1, n_bins)
    probs = np.full(config.cutoff + 1, 1.0 / (config.cutoff + 1))
    ll_prev = -np.inf
    history = []
    converged = False
    iters = 0
    occupied = hist > 0
    for iters in range(1, config.max_iters + 1):
        p_bin = probs @ pi
        p_bin = np.maximum(p_bin, 1e-300)
        ll = float(hist[occupied] @ np.log(p_bin[occupied]))
        assert ll >= ll_prev - 1e-9 * max(1.0, abs(ll_prev))  # EM monotone
        history.append(ll)
        weights = pi @ (hist / p_bin)
        probs = probs * weights / total
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        if ll_prev != -np.inf and abs(ll - ll_prev) <= config.tol * abs(ll_prev):
            converged = True
            break
        ll_prev = ll
    p_bin = np.maximum(probs @ pi, 1e-300)
    history.append(float(hist[occupied] @ np.log(p_bin[occupied])))
    return MLResult(
        probs=probs,
        log_likelihood=history[-1],
        iterations=iters,
        converged=converged,
        cutoff=config.cutoff,
        ll_history=np.array(history),
    )


def ml_full(samples: np.ndarray, config: MLConfig = MLConfig()) -> tuple[np.ndarray, MLResult]:
    """Full density-matrix reconstruction via iterated R(rho) rho R(rho).

    ``samples`` must be an (N, 2) array of (x, theta) rows.  Projector
    vectors  v_n = psi_n(x) exp(i n theta)  enter
    R = (1/N) sum_k |v_k><v_k| / p_k  with p_k = <v_k|rho|v_k>; each step
    conjugates rho by R and renormalizes the trace.  Returns the density
    matrix and an MLResult with its diagonal.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise EmptyInput("no quadrature samples")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise OutOfRange("ml_full needs (N, 2) samples of (x, theta)")
    if arr.shape[0] < 10_000:
        warnings.warn(
            f"only {arr.shape[0]} samples; full reconstruction wants >= 1e4",
            stacklevel=2,
        )
    x, theta = arr[:, 0], arr[:, 1]
    dim = config.cutoff + 1
    psi = np.stack([hermite_function(n, x) for n in range(dim)])  # (dim, N)
    w = psi * np.exp(1j * np.outer(np.arange(dim), theta))  # projector components
    rho = np.eye(dim, dtype=complex) / dim
    ll_prev = -np.inf
    history = []
    converged = False
    iters = 0
    n_samp = x.size
    for iters in range(1, config.max_iters + 1):
        probs_k = np.real(np.einsum("in,ij,jn->n", w.conj(), rho, w))
        probs_k = np.maximum(probs_k, 1e-300)
        ll = float(np.sum(np.log(probs_k)))
        history.append(ll)
        r_op = (w / probs_k) @ w.conj().T / n_samp
        rho = r_op @ rho @ r_op
        rho = 0.5 * (rho + rho.conj().T)
        rho /= np.real(np.trace(rho))
        if ll_prev != -np.inf and abs(ll - ll_prev) <= config.tol * abs(ll_prev):
            converged = True
            break
        ll_prev = ll
    probs_k = np.maximum(np.real(np.einsum("in,ij,jn->n", w.conj(), rho, w)), 1e-300)
    history.append(float(np.sum(np.log(probs_k))))
    diag = np.clip(np.real(np.diag(rho)), 0.0, None)
    result = MLResult(
        probs=diag / diag.sum(),
        log_likelihood=history[-1],
        iterations=iters,
        converged=converged,
        cutoff=config.cutoff,
        ll_history=np.array(history),
    )
    return rho, result


def bootstrap_stderr(
    samples: np.ndarray,
    config: MLConfig = MLConfig(),
    n_boot: int = 16,
    rng_seed: int = 0,
) -> np.ndarray:
    """Standard error of the EM probabilities by multinomial resampling of
    the binned histogram (cheap: EM reruns on resampled histograms)."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 2:
        x = x[:, 0]
    if x.size == 0:
        raise EmptyInput("no quadrature samples")
    povm = build_povm(config.cutoff, config.n_bins)
    hist = _bin_samples(x, povm.edges)
    total = int(hist.sum())
    rng = np.random.default_rng(rng_seed)
    reps = np.empty((n_boot, config.cutoff + 1))
    for b in range(n_boot):
        resampled = rng.multinomial(total, hist / total).astype(float)
        reps[b] = _em_on_histogram(resampled, povm.elements, config)
    return reps.std(axis=0, ddof=1)


def _em_on_histogram(hist: np.ndarray, pi: np.ndarray, config: MLConfig) -> np.ndarray:
    probs = np.full(config.cutoff + 1, 1.0 / (config.cutoff + 1))
    total = hist.sum()
    ll_prev = -np.inf
    occupied = hist > 0
    for _ in range(config.max_iters):
        p_bin = np.maximum(probs @ pi, 1e-300)
        ll = float(hist[occupied] @ np.log(p_bin[occupied]))
        probs = probs * (pi @ (hist / p_bin)) / total
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        if ll_prev != -np.inf and abs(ll - ll_prev) <= config.tol * abs(ll_prev):
            break
        ll_prev = ll
    return probs


def fock_fidelity(dist: PhotonDistribution, n: int) -> float:
    """Weight of Fock state n in a distribution (fidelity to |n><n|)."""
    if n > dist.cutoff:
        raise CutoffExceeded(f"Fock index {n} above distribution cutoff {dist.cutoff}")
    return dist.p(n)
