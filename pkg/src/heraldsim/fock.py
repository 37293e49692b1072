"""Truncated multimode Fock engine.

Brute-force counterpart to the closed-form results in :mod:`heraldsim.analytic`:
states of a small register of orthonormal temporal modes are represented as
density matrices over occupation tuples (n_1, ..., n_M) with
sum(n) <= n_max, ordered lexicographically.  The engine supports

* building the heralded state  a+[g1] a+[g2] |0>  (normalized) from the
  decomposition of the trigger wavepackets over the register,
* per-mode binomial loss via photon-number Kraus operators,
* passive (photon-number conserving) mode-basis changes,
* reduction to the state of one analysis mode, including the vacuum
  admixture for any mode component outside the register span.

Everything is dense numpy; register sizes of interest are a handful of
modes with at most four photons, so dimensions stay below ~10^2.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import binom

from .analytic import PhotonDistribution
from .errors import (
    CutoffExceeded,
    GridMismatch,
    InvalidDensity,
    ModesNotOrthogonal,
    NotUnitary,
    OutOfRange,
    SpanDeficit,
)
from .modes import ModeFunction, overlap

# Pairwise orthonormality tolerance for register modes.
REGISTER_GRAM_TOL = 1e-8
# L2 mass a wavepacket may carry outside the register span when building states.
SPAN_TOL = 1e-6


def basis_tuples(n_modes: int, n_max: int) -> list[tuple[int, ...]]:
    """Occupation tuples with total photon number <= n_max, lexicographic."""
    tuples = [
        t for t in itertools.product(range(n_max + 1), repeat=n_modes) if sum(t) <= n_max
    ]
    tuples.sort()
    return tuples


@dataclass(frozen=True)
class ModeRegister:
    """An ordered list of pairwise-orthonormal modes on a shared grid."""

    modes: tuple[ModeFunction, ...]

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        if not modes:
            raise OutOfRange("register needs at least one mode")
        grid = modes[0].grid
        for m in modes:
            if m.grid != grid:
                raise GridMismatch("register modes on different grids")
        object.__setattr__(self, "modes", modes)
        gram = np.array([[overlap(a, b) for b in modes] for a in modes])
        if np.max(np.abs(gram - np.eye(len(modes)))) > REGISTER_GRAM_TOL:
            raise ModesNotOrthogonal(
                f"register modes not orthonormal within {REGISTER_GRAM_TOL:g}"
            )

    def __len__(self) -> int:
        return len(self.modes)


@dataclass(frozen=True)
class MultimodeState:
    """Density matrix over the truncated occupation basis of a register."""

    register: ModeRegister
    n_max: int
    rho: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.n_max < 2:
            raise CutoffExceeded(f"n_max must be >= 2, got {self.n_max}")
        basis = basis_tuples(len(self.register), self.n_max)
        rho = np.asarray(self.rho, dtype=complex).copy()
        dim = len(basis)
        if rho.shape != (dim, dim):
            raise InvalidDensity(f"rho shape {rho.shape}, expected {(dim, dim)}")
        check_density(rho)
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "_basis", basis)
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(basis)})

    @property
    def basis(self) -> list[tuple[int, ...]]:
        return list(self._basis)  # type: ignore[attr-defined]

    def index_of(self, occ: tuple[int, ...]) -> int:
        return self._index[occ]  # type: ignore[attr-defined]


@dataclass(frozen=True)
class DecompositionCoeffs:
    """Projections of the two trigger wavepackets onto a register.

    alpha[m] = <h_m, g1>, beta[n] = <h_n, g2>, matrix = outer(alpha, beta).
    ``residual1``/``residual2`` hold the L2 mass outside the span.
    """

    alpha: np.ndarray
    beta: np.ndarray
    matrix: np.ndarray
    residual1: float
    residual2: float


def check_density(rho: np.ndarray) -> None:
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > 1e-8:
        raise InvalidDensity(f"trace {tr} differs from 1")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise InvalidDensity("matrix not Hermitian")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals.min() < -1e-8:
        raise InvalidDensity(f"negative eigenvalue {evals.min():.3e}")


def decomposition_coeffs(register: ModeRegister, g1: ModeFunction, g2: ModeFunction) -> DecompositionCoeffs:
    """Project both trigger wavepackets onto the register modes."""
    alpha = np.array([overlap(h, g1) for h in register.modes])
    beta = np.array([overlap(h, g2) for h in register.modes])
    r1 = g1.norm_squared() - float(np.dot(alpha, alpha))
    r2 = g2.norm_squared() - float(np.dot(beta, beta))
    return DecompositionCoeffs(
        alpha=alpha, beta=beta, matrix=np.outer(alpha, beta), residual1=r1, residual2=r2
    )


def build_heralded_state(
    register: ModeRegister,
    g1: ModeFunction,
    g2: ModeFunction,
    n_max: int = 2,
) -> MultimodeState:
    """Normalized pure state  a+[g1] a+[g2] |0>  over the register.

    With g_i = sum_m c_im h_m the creation-operator product expands to
    amplitudes sqrt(2)*alpha_m*beta_m on |2_m> and
    (alpha_m*beta_n + alpha_n*beta_m) on |1_m 1_n>.  The squared norm
    before normalization equals 1 + <g1,g2>**2 when both wavepackets lie
    in the span.

    Raises
    ------
    SpanDeficit
        If either wavepacket carries more than 1e-6 of its L2 mass
        outside the register span.
    CutoffExceeded
        If n_max < 2 (the state has two photons).
    """
    if n_max < 2:
        raise CutoffExceeded(f"two-photon state needs n_max >= 2, got {n_max}")
    coeffs = decomposition_coeffs(register, g1, g2)
    if coeffs.residual1 > SPAN_TOL or coeffs.residual2 > SPAN_TOL:
        raise SpanDeficit(
            f"wavepacket mass outside register span: {coeffs.residual1:.2e}, "
            f"{coeffs.residual2:.2e} (tolerance {SPAN_TOL:g})"
        )
    m_count = len(register)
    basis = basis_tuples(m_count, n_max)
    index = {t: i for i, t in enumerate(basis)}
    psi = np.zeros(len(basis), dtype=complex)
    a, b = coeffs.alpha, coeffs.beta
    for m in range(m_count):
        occ = [0] * m_count
        occ[m] = 2
        psi[index[tuple(occ)]] += math.sqrt(2.0) * a[m] * b[m]
        for n in range(m + 1, m_count):
            occ2 = [0] * m_count
            occ2[m] = 1
            occ2[n] = 1
            psi[index[tuple(occ2)]] += a[m] * b[n] + a[n] * b[m]
    nrm = float(np.linalg.norm(psi))
    if nrm == 0.0:
        raise SpanDeficit("heralded amplitude vanished; register does not see the triggers")
    psi /= nrm
    return MultimodeState(register=register, n_max=n_max, rho=np.outer(psi, psi.conj()))


def _kraus_single(n_max: int, k: int, eta: float) -> np.ndarray:
    """Single-mode photon-loss Kraus operator K_k on Fock space 0..n_max:
    K_k |n> = sqrt(binom(n,k) * eta**(n-k) * (1-eta)**k) |n-k>."""
    op = np.zeros((n_max + 1, n_max + 1))
    for n in range(k, n_max + 1):
        op[n - k, n] = math.sqrt(binom(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
    return op


def loss_channel_single(rho: np.ndarray, eta: float) -> np.ndarray:
    """Binomial loss channel on a single-mode density matrix."""
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"transmission must lie in [0, 1], got {eta}")
    rho = np.asarray(rho, dtype=complex)
    n_max = rho.shape[0] - 1
    out = np.zeros_like(rho)
    for k in range(n_max + 1):
        kk = _kraus_single(n_max, k, eta)
        out += kk @ rho @ kk.T
    return out


def _mode_kraus_on_basis(
    basis: list[tuple[int, ...]], index: dict, mode: int, k: int, eta: float
) -> np.ndarray:
    dim = len(basis)
    op = np.zeros((dim, dim))
    for j, occ in enumerate(basis):
        n = occ[mode]
        if n < k:
            continue
        coeff = math.sqrt(binom(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
        target = list(occ)
        target[mode] = n - k
        op[index[tuple(target)], j] = coeff
    return op


def apply_loss_channel(state: MultimodeState, eta: float) -> MultimodeState:
    """Apply identical binomial loss with transmission ``eta`` to every mode.

    Photon loss only lowers occupation numbers, so the truncated basis is
    closed under the channel and the trace is preserved to float accuracy.
    """
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"transmission must lie in [0, 1], got {eta}")
    basis = state.basis
    index = {t: i for i, t in enumerate(basis)}
    rho = np.asarray(state.rho, dtype=complex)
    for mode in range(len(state.register)):
        acc = np.zeros_like(rho)
        for k in range(state.n_max + 1):
            kk = _mode_kraus_on_basis(basis, index, mode, k, eta)
            acc += kk @ rho @ kk.T
        rho = acc
    return MultimodeState(register=state.register, n_max=state.n_max, rho=rho)


def _transform_matrix(basis: list[tuple[int, ...]], index: dict, unitary: np.ndarray) -> np.ndarray:
    """Matrix of the passive transform on the occupation basis.

    New-mode creation operators are b+_m = sum_k U[m,k] a+_k, so the old
    operators expand as a+_k = sum_m U[m,k] b+_m (U real orthogonal) and
    each old basis state is re-expanded as a polynomial of b+ acting on
    vacuum.  Number conservation keeps the truncation exact.
    """
    m_count = unitary.shape[0]
    dim = len(basis)
    out = np.zeros((dim, dim))
    vacuum = tuple([0] * m_count)
    for j, occ in enumerate(basis):
        amps: dict[tuple[int, ...], float] = {vacuum: 1.0}
        for k, reps in enumerate(occ):
            for _ in range(reps):
                nxt: dict[tuple[int, ...], float] = {}
                for t, amp in amps.items():
                    for m in range(m_count):
                        coeff = unitary[m, k]
                        if coeff == 0.0:
                            continue
                        tt = list(t)
                        tt[m] += 1
                        key = tuple(tt)
                        nxt[key] = nxt.get(key, 0.0) + amp * coeff * math.sqrt(tt[m])
                amps = nxt
        scale = 1.0 / math.sqrt(math.prod(math.factorial(n) for n in occ))
        for t, amp in amps.items():
            out[index[t], j] = amp * scale
    return out


def change_mode_basis(state: MultimodeState, unitary: np.ndarray) -> MultimodeState:
    """Rotate the register by a real orthogonal matrix.

    Row m of ``unitary`` gives the new mode m as a combination of the old
    modes; the register's mode functions are recombined accordingly and
    the density matrix is conjugated by the induced Fock-space transform.
    Complex rotations are not supported: register modes are real temporal
    profiles.

    Raises
    ------
    NotUnitary
        If ``unitary`` is not real orthogonal within 1e-10.
    """
    u = np.asarray(unitary)
    if np.iscomplexobj(u) and np.max(np.abs(u.imag)) > 1e-12:
        raise NotUnitary("complex rotations unsupported; temporal modes are real")
    u = u.real.astype(float)
    m_count = len(state.register)
    if u.shape != (m_count, m_count):
        raise NotUnitary(f"matrix shape {u.shape}, expected {(m_count, m_count)}")
    if np.max(np.abs(u @ u.T - np.eye(m_count))) > 1e-10:
        raise NotUnitary("matrix fails orthogonality check at 1e-10")
    basis = state.basis
    index = {t: i for i, t in enumerate(basis)}
    transform = _transform_matrix(basis, index, u)
    rho = transform @ np.asarray(state.rho) @ transform.T
    grid = state.register.modes[0].grid
    old = np.stack([m.samples for m in state.register.modes])
    new_modes = []
    for row in u:
        s = row @ old
        s = s / math.sqrt(float(np.dot(s, s)) * grid.dt)
        new_modes.append(ModeFunction(grid=grid, samples=s, normalized=True))
    new_modes = tuple(new_modes)
    return MultimodeState(
        register=ModeRegister(modes=new_modes), n_max=state.n_max, rho=rho
    )


def _complete_orthonormal_rows(rows: np.ndarray, dim: int) -> np.ndarray:
    """Real orthogonal matrix whose leading rows equal ``rows`` (orthonormal)."""
    k = rows.shape[0]
    a = np.eye(dim)
    a[:, :k] = rows.T
    q, r = np.linalg.qr(a)
    # QR may flip signs of the leading columns; undo so rows are exact.
    for i in range(k):
        if r[i, i] < 0:
            q[:, i] *= -1.0
    u = q.T
    u[:k] = rows  # exact leading rows, orthonormal by precondition
    return u


def _partial_trace_keep(
    rho: np.ndarray, basis: list[tuple[int, ...]], keep: tuple[int, ...], n_max: int
) -> np.ndarray:
    """Trace out all register modes except ``keep``; product-basis output.

    Output is indexed by the kept occupations stacked as a flat index with
    base (n_max + 1), e.g. (n_a, n_b) -> n_a*(n_max+1) + n_b.
    """
    d = n_max + 1
    out_dim = d ** len(keep)
    out = np.zeros((out_dim, out_dim), dtype=complex)
    rest_idx = [m for m in range(len(basis[0])) if m not in keep]

    def flat(occ: tuple[int, ...]) -> int:
        f = 0
        for m in keep:
            f = f * d + occ[m]
        return f

    for i, occ_i in enumerate(basis):
        for j, occ_j in enumerate(basis):
            if all(occ_i[m] == occ_j[m] for m in rest_idx):
                out[flat(occ_i), flat(occ_j)] += rho[i, j]
    return out


def reduce_to_mode(state: MultimodeState, xi: ModeFunction) -> np.ndarray:
    """Single-mode density matrix of analysis mode ``xi``.

    The mode is split as xi = s*xi_par + c*xi_perp with xi_par the
    normalized in-span part (s**2 = in-span L2 mass) and xi_perp outside
    the register, where the state is vacuum.  The register is rotated so
    its first mode is xi_par, the rest are traced out, and the vacuum
    admixture is accounted for by a beam-splitter (loss) channel with
    transmission s**2.

    Returns an (n_max+1) x (n_max+1) complex density matrix.
    """
    c = np.array([overlap(h, xi) for h in state.register.modes])
    s_sq = float(np.dot(c, c))
    norm_sq = xi.norm_squared()
    if abs(norm_sq - 1.0) > 1e-9:
        raise GridMismatch("analysis mode must be normalized")
    d = state.n_max + 1
    if s_sq < 1e-12:
        vac = np.zeros((d, d), dtype=complex)
        vac[0, 0] = 1.0
        return vac
    first_row = c / math.sqrt(s_sq)
    m_count = len(state.register)
    if m_count == 1:
        rho_par = np.asarray(state.rho, dtype=complex).copy()
    else:
        u = _complete_orthonormal_rows(first_row[None, :], m_count)
        rotated = change_mode_basis(state, u)
        rho_par = _partial_trace_keep(
            np.asarray(rotated.rho), rotated.basis, keep=(0,), n_max=state.n_max
        )
    if s_sq < 1.0 - 1e-12:
        rho_par = loss_channel_single(rho_par, min(s_sq, 1.0))
    return rho_par


def reduce_to_mode_pair(
    state: MultimodeState, xi_a: ModeFunction, xi_b: ModeFunction
) -> np.ndarray:
    """Two-mode density matrix of an orthonormal analysis pair in the span.

    Both modes must lie inside the register span (mass deficit < 1e-9) and
    be orthogonal; the register is rotated so they occupy the first two
    slots and everything else is traced out.  Output is indexed by
    (n_a, n_b) -> n_a*(n_max+1) + n_b on the product basis.
    """
    ca = np.array([overlap(h, xi_a) for h in state.register.modes])
    cb = np.array([overlap(h, xi_b) for h in state.register.modes])
    if abs(float(np.dot(ca, cb))) > 1e-9:
        raise ModesNotOrthogonal("analysis pair not orthogonal")
    for c, m in ((ca, xi_a), (cb, xi_b)):
        deficit = m.norm_squared() - float(np.dot(c, c))
        if deficit > 1e-9:
            raise SpanDeficit(
                f"analysis mode carries {deficit:.2e} L2 mass outside the register"
            )
    rows = np.stack([ca / np.linalg.norm(ca), cb / np.linalg.norm(cb)])
    u = _complete_orthonormal_rows(rows, len(state.register))
    rotated = change_mode_basis(state, u)
    return _partial_trace_keep(
        np.asarray(rotated.rho), rotated.basis, keep=(0, 1), n_max=state.n_max
    )


def photon_distribution(rho: np.ndarray) -> PhotonDistribution:
    """Diagonal of a single-mode density matrix as a PhotonDistribution."""
    rho = np.asarray(rho, dtype=complex)
    check_density(rho)
    diag = np.clip(np.real(np.diag(rho)), 0.0, None)
    diag = diag / diag.sum()
    return PhotonDistribution(diag)


def density_matrix_to_json(rho: np.ndarray) -> str:
    """Serialize a density matrix as JSON (dimension, row-major real/imag)."""
    rho = np.asarray(rho, dtype=complex)
    payload = {
        "dimension": rho.shape[0],
        "real": [float(v) for v in rho.real.ravel()],
        "imag": [float(v) for v in rho.imag.ravel()],
    }
    return json.dumps(payload)


def density_matrix_from_json(text: str) -> np.ndarray:
    payload = json.loads(text)
    d = int(payload["dimension"])
    re = np.array(payload["real"], dtype=float).reshape(d, d)
    im = np.array(payload["imag"], dtype=float).reshape(d, d)
    return re + 1j * im
