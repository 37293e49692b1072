"""Experiment drivers: seeded, file-emitting runs behind the CLI.

Each driver takes an ExperimentConfig, derives independent per-task seeds
from the config seed, runs one simulation campaign, and writes plot-ready
CSV/JSON plus a manifest (config hash, seed, library versions) into the
output directory.  Everything is deterministic given (config, seed); the
analytic columns never touch the RNG at all.

Drivers
-------
run_g2              pair-delay correlation of the simulated trigger beam
run_delay_sweep     two-photon weight in the adapted mode vs herald delay
run_fixed_mode_sweep  photon weights in the first-trigger mode vs delay
run_fock_panels     reconstructed distributions in four analysis modes
end_to_end          clicks -> pairs -> traces -> projections -> tomography
reconstruct_samples tomography of an existing quadrature CSV
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import platform
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analytic import PhotonDistribution, apply_loss, fidelity_optimal, fixed_mode_distribution, g2_closed_form
from .clicks import (
    concatenate_streams,
    g2_histogram,
    sample_clicks,
    select_coincidences,
    synthesize_thermal_field,
    write_g2_csv,
)
from .errors import InsufficientPairs, OutOfRange
from .fock import (
    ModeRegister,
    MultimodeState,
    apply_loss_channel,
    build_heralded_state,
    density_matrix_to_json,
    reduce_to_mode,
    reduce_to_mode_pair,
)
from .homodyne import project_trace, sample_quadratures, synthesize_trace_batch
from .modes import (
    HeraldPair,
    ModeFunction,
    TimeGrid,
    extend_orthonormal_basis,
    make_symmetric_antisymmetric,
    make_trigger_mode,
    overlap,
    write_mode_csv,
)
from .tomo import MLConfig, MLResult, bootstrap_stderr, ml_diagonal

# A field segment longer than this many samples is sharded to keep FFTs
# and click buffers in memory; streams are concatenated afterwards.
MAX_FIELD_SAMPLES_PER_SEGMENT = 4_000_000
# Trace synthesis is chunked so a batch never holds more than this many
# full-length photocurrent records at once.
MAX_TRACES_PER_CHUNK = 2048


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs for the experiment drivers, JSON-serializable.

    Times suffixed _ns are nanoseconds; rates are Hz.  ``delays_ns`` must
    be sorted ascending.  ``min_pairs_per_bin`` is the reconstruction
    threshold of the end-to-end pipeline: thinner delay bins are skipped
    with a warning.
    """

    gamma_hz: float = 53e6
    eta: float = 0.76
    grid_dt_ns: float = 0.1
    grid_window_ns: float = 500.0
    delays_ns: tuple[float, ...] = tuple(float(d) for d in range(0, 45, 2))
    acceptance_window_ns: float = 65.0
    samples_per_point: int = 100_000
    rng_seed: int = 5
    output_dir: str = "outputs"
    # trigger-beam simulation
    mean_rate_hz: float = 5e7
    field_dt_ns: float = 0.5
    g2_n_events: int = 1_000_000
    g2_bin_ns: float = 0.5
    g2_max_delay_ns: float = 60.0
    # coincidence selection / end-to-end pipeline
    dead_time_ns: float = 500.0
    end_to_end_duration_s: float = 0.08
    delta_t_bin_ns: float = 2.0
    min_pairs_per_bin: int = 1000
    # reconstruction
    tomo_cutoff: int = 5
    tomo_n_bins: int = 256
    bootstrap_reps: int = 16

    def __post_init__(self) -> None:
        positive = {
            "gamma_hz": self.gamma_hz,
            "grid_dt_ns": self.grid_dt_ns,
            "grid_window_ns": self.grid_window_ns,
            "acceptance_window_ns": self.acceptance_window_ns,
            "samples_per_point": self.samples_per_point,
            "mean_rate_hz": self.mean_rate_hz,
            "field_dt_ns": self.field_dt_ns,
            "g2_n_events": self.g2_n_events,
            "g2_bin_ns": self.g2_bin_ns,
            "g2_max_delay_ns": self.g2_max_delay_ns,
            "end_to_end_duration_s": self.end_to_end_duration_s,
            "delta_t_bin_ns": self.delta_t_bin_ns,
            "min_pairs_per_bin": self.min_pairs_per_bin,
            "tomo_cutoff": self.tomo_cutoff,
            "tomo_n_bins": self.tomo_n_bins,
            "bootstrap_reps": self.bootstrap_reps,
        }
        for name, value in positive.items():
            if not value > 0:
                raise OutOfRange(f"{name} must be positive, got {value}")
        if not (0.0 <= self.eta <= 1.0):
            raise OutOfRange(f"eta must lie in [0, 1], got {self.eta}")
        if self.dead_time_ns < 0.0:
            raise OutOfRange(f"dead_time_ns cannot be negative, got {self.dead_time_ns}")
        delays = tuple(float(d) for d in self.delays_ns)
        if not delays:
            raise OutOfRange("delays_ns must not be empty")
        if any(d < 0 for d in delays) or list(delays) != sorted(delays):
            raise OutOfRange("delays_ns must be non-negative and sorted ascending")
        object.__setattr__(self, "delays_ns", delays)

    def grid(self) -> TimeGrid:
        return TimeGrid(
            t_start=0.0,
            dt=self.grid_dt_ns * 1e-9,
            n_samples=int(round(self.grid_window_ns / self.grid_dt_ns)) + 1,
        )

    def ml_config(self) -> MLConfig:
        return MLConfig(cutoff=self.tomo_cutoff, n_bins=self.tomo_n_bins)

    def to_json_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["delays_ns"] = list(out["delays_ns"])
        return out


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_json_dict(), indent=2) + "\n")


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a config JSON; unknown keys are rejected to catch typos."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise OutOfRange(f"config file {path} must hold a JSON object")
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise OutOfRange(f"unknown config keys: {sorted(unknown)}")
    if "delays_ns" in raw:
        raw["delays_ns"] = tuple(float(d) for d in raw["delays_ns"])
    return ExperimentConfig(**raw)


def config_hash(config: ExperimentConfig) -> str:
    canon = json.dumps(config.to_json_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _derive_seeds(seed: int, count: int) -> list[int]:
    # independent child seeds; stable across platforms for a fixed root
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def write_manifest(config: ExperimentConfig, out_dir: Path, command: str, outputs: list[str]) -> Path:
    manifest = {
        "command": command,
        "config_hash": config_hash(config),
        "rng_seed": config.rng_seed,
        "outputs": outputs,
        "versions": {
            "heraldsim": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "config": config.to_json_dict(),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _prepare_out_dir(config: ExperimentConfig, out_dir: str | Path | None, command: str) -> Path:
    base = Path(out_dir) if out_dir is not None else Path(config.output_dir) / command
    base.mkdir(parents=True, exist_ok=True)
    return base


def _fmt(value: float) -> str:
    return f"{value:.12g}"


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _herald_for_delay(config: ExperimentConfig, delta_t: float) -> HeraldPair:
    center = 0.5 * (config.grid_window_ns * 1e-9)
    return HeraldPair(t1=center - 0.5 * delta_t, t2=center + 0.5 * delta_t)


def _adapted_lossy_distribution(ov: float, eta: float) -> PhotonDistribution:
    # reduced state of f1 before loss is diag(F-, 0, F+); loss is binomial
    f_plus, f_minus = fidelity_optimal(ov)
    return apply_loss(PhotonDistribution(np.array([f_minus, 0.0, f_plus])), eta)


def _antisymmetric_lossy_distribution(ov: float, eta: float) -> PhotonDistribution:
    f_plus, f_minus = fidelity_optimal(ov)
    return apply_loss(PhotonDistribution(np.array([f_plus, 0.0, f_minus])), eta)


def _fixed_lossy_distribution(ov: float, eta: float) -> PhotonDistribution:
    return apply_loss(fixed_mode_distribution(ov), eta)


@dataclass(frozen=True)
class _DelayScene:
    """Modes and lossy state for one herald delay."""

    herald: HeraldPair
    g1: ModeFunction
    g2: ModeFunction
    f1: ModeFunction
    f2: ModeFunction | None  # undefined at zero delay
    state: MultimodeState
    rho_pair: np.ndarray | None  # lossy state of (f1, f2); None at zero delay
    rho_f1: np.ndarray
    rho_g1: np.ndarray
    overlap: float


def _build_scene(config: ExperimentConfig, delta_t: float) -> _DelayScene:
    """Build trigger/analysis modes at one delay and reduce the lossy state.

    At zero delay the two triggers coincide: the state is a two-photon
    Fock state in the single mode g1 = f1 and the antisymmetric partner
    does not exist.
    """
    grid = config.grid()
    herald = _herald_for_delay(config, delta_t)
    g1 = make_trigger_mode(herald.t1, config.gamma_hz, grid)
    if delta_t == 0.0:
        register = ModeRegister(modes=(g1,))
        state = apply_loss_channel(build_heralded_state(register, g1, g1), config.eta)
        rho_f1 = reduce_to_mode(state, g1)
        return _DelayScene(
            herald=herald, g1=g1, g2=g1, f1=g1, f2=None, state=state,
            rho_pair=None, rho_f1=rho_f1, rho_g1=rho_f1, overlap=1.0,
        )
    g2 = make_trigger_mode(herald.t2, config.gamma_hz, grid)
    f1, f2 = make_symmetric_antisymmetric(g1, g2)
    register = ModeRegister(modes=tuple(extend_orthonormal_basis([g1, g2], grid, 2)))
    state = apply_loss_channel(build_heralded_state(register, g1, g2), config.eta)
    return _DelayScene(
        herald=herald, g1=g1, g2=g2, f1=f1, f2=f2, state=state,
        rho_pair=reduce_to_mode_pair(state, f1, f2),
        rho_f1=reduce_to_mode(state, f1),
        rho_g1=reduce_to_mode(state, g1),
        overlap=overlap(g1, g2),
    )


def _reconstruct(
    samples: np.ndarray, config: ExperimentConfig, boot_seed: int
) -> tuple[MLResult, np.ndarray]:
    ml_config = config.ml_config()
    result = ml_diagonal(samples, ml_config)
    stderr = bootstrap_stderr(samples, ml_config, n_boot=config.bootstrap_reps, rng_seed=boot_seed)
    return result, stderr


# ---------------------------------------------------------------------------
# drivers


def run_g2(config: ExperimentConfig, out_dir: str | Path | None = None) -> dict:
    """Simulate the trigger beam, histogram pair delays, compare to theory.

    Writes g2.csv (delay_ns, g2_empirical, g2_theory), summary.json, and a
    manifest.  Returns the summary dict.
    """
    out = _prepare_out_dir(config, out_dir, "g2")
    duration_total = config.g2_n_events / config.mean_rate_hz
    dt_field = config.field_dt_ns * 1e-9
    segment = _segment_duration(duration_total, dt_field)
    n_segments = int(math.ceil(duration_total / segment))
    seeds = _derive_seeds(config.rng_seed, 2 * n_segments)
    streams = []
    for k in range(n_segments):
        field = synthesize_thermal_field(config.gamma_hz, segment, dt_field, seeds[2 * k])
        streams.append(sample_clicks(field, config.mean_rate_hz, seeds[2 * k + 1]))
    stream = concatenate_streams(streams)
    hist = g2_histogram(stream, config.g2_bin_ns * 1e-9, config.g2_max_delay_ns * 1e-9)
    theory = g2_closed_form(hist.bin_centers, config.gamma_hz)
    deviation = np.abs(hist.g2 - theory)
    csv_path = out / "g2.csv"
    write_g2_csv(hist, csv_path, gamma=config.gamma_hz)
    summary = {
        "n_clicks": int(len(stream)),
        "n_segments": n_segments,
        "duration_s": stream.duration,
        "g2_zero": float(hist.g2[0]),
        "max_abs_deviation": float(deviation.max()),
        "rms_deviation": float(np.sqrt(np.mean(deviation**2))),
        "csv": str(csv_path),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    write_manifest(config, out, "g2", ["g2.csv", "summary.json"])
    return summary


def _segment_duration(duration_total: float, dt_field: float) -> float:
    if duration_total / dt_field <= MAX_FIELD_SAMPLES_PER_SEGMENT:
        return duration_total
    return MAX_FIELD_SAMPLES_PER_SEGMENT * dt_field


def run_delay_sweep(config: ExperimentConfig, out_dir: str | Path | None = None) -> list[dict]:
    """Two-photon weight in the adapted mode f1 versus herald delay.

    For each delay: build the lossy state, reduce to f1, draw quadrature
    samples, reconstruct, and tabulate against the analytic weight
    eta**2 * F_plus(I).  Writes delay_sweep.csv with columns
    (delta_t_ns, P2_f1_analytic, P2_f1_reconstructed, stderr).
    """
    out = _prepare_out_dir(config, out_dir, "delay_sweep")
    seeds = _derive_seeds(config.rng_seed, 2 * len(config.delays_ns))
    rows = []
    for k, delta_ns in enumerate(config.delays_ns):
        scene = _build_scene(config, delta_ns * 1e-9)
        samples = sample_quadratures(scene.rho_f1, config.samples_per_point, seeds[2 * k])
        result, stderr = _reconstruct(samples, config, seeds[2 * k + 1])
        analytic_p2 = config.eta**2 * fidelity_optimal(scene.overlap)[0]
        rows.append(
            {
                "delta_t_ns": delta_ns,
                "P2_f1_analytic": analytic_p2,
                "P2_f1_reconstructed": float(result.probs[2]),
                "stderr": float(stderr[2]),
            }
        )
    csv_path = out / "delay_sweep.csv"
    with open(csv_path, "w") as fh:
        fh.write("delta_t_ns,P2_f1_analytic,P2_f1_reconstructed,stderr\n")
        for row in rows:
            fh.write(
                f"{_fmt(row['delta_t_ns'])},{_fmt(row['P2_f1_analytic'])},"
                f"{_fmt(row['P2_f1_reconstructed'])},{_fmt(row['stderr'])}\n"
            )
    write_manifest(config, out, "delay_sweep", ["delay_sweep.csv"])
    return rows


def run_fixed_mode_sweep(config: ExperimentConfig, out_dir: str | Path | None = None) -> list[dict]:
    """Photon-number weights in the fixed analysis mode g1 versus delay.

    Analytic curves compose the fixed-mode distribution with binomial
    loss; reconstructed points run the same sampling + EM pipeline as the
    adapted-mode sweep.  Writes fixed_sweep.csv.
    """
    out = _prepare_out_dir(config, out_dir, "fixed_sweep")
    seeds = _derive_seeds(config.rng_seed, 2 * len(config.delays_ns))
    rows = []
    for k, delta_ns in enumerate(config.delays_ns):
        scene = _build_scene(config, delta_ns * 1e-9)
        samples = sample_quadratures(scene.rho_g1, config.samples_per_point, seeds[2 * k])
        result, stderr = _reconstruct(samples, config, seeds[2 * k + 1])
        analytic = _fixed_lossy_distribution(scene.overlap, config.eta)
        row = {"delta_t_ns": delta_ns}
        for n in range(3):
            row[f"P{n}_analytic"] = analytic.p(n)
            row[f"P{n}_reconstructed"] = float(result.probs[n])
            row[f"P{n}_stderr"] = float(stderr[n])
        rows.append(row)
    csv_path = out / "fixed_sweep.csv"
    columns = ["delta_t_ns"]
    for n in range(3):
        columns += [f"P{n}_analytic", f"P{n}_reconstructed", f"P{n}_stderr"]
    with open(csv_path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    write_manifest(config, out, "fixed_sweep", ["fixed_sweep.csv"])
    return rows


def run_fock_panels(
    config: ExperimentConfig,
    delta_t_ns: float = 40.0,
    out_dir: str | Path | None = None,
) -> dict:
    """Reconstructed photon distributions in the four analysis modes
    (g1, g2, f1, f2) at one herald delay.

    Per mode: panel_<name>.json holds the tomography output, the analytic
    weights, and the exact reduced density matrix; mode_<name>.csv holds
    the mode shape for plotting.
    """
    out = _prepare_out_dir(config, out_dir, "fock_panels")
    delta_t = delta_t_ns * 1e-9
    scene = _build_scene(config, delta_t)
    if scene.f2 is None:
        raise OutOfRange("panel run needs a nonzero delay; the mode pair is degenerate at 0")
    analytic_by_mode = {
        "g1": _fixed_lossy_distribution(scene.overlap, config.eta),
        "g2": _fixed_lossy_distribution(scene.overlap, config.eta),
        "f1": _adapted_lossy_distribution(scene.overlap, config.eta),
        "f2": _antisymmetric_lossy_distribution(scene.overlap, config.eta),
    }
    modes_by_name = {"g1": scene.g1, "g2": scene.g2, "f1": scene.f1, "f2": scene.f2}
    seeds = _derive_seeds(config.rng_seed, 2 * len(modes_by_name))
    outputs = []
    panels = {}
    for k, (name, mode) in enumerate(modes_by_name.items()):
        rho = reduce_to_mode(scene.state, mode)
        samples = sample_quadratures(rho, config.samples_per_point, seeds[2 * k])
        result, stderr = _reconstruct(samples, config, seeds[2 * k + 1])
        panel = {
            "mode": name,
            "delta_t_ns": delta_t_ns,
            "n_samples": config.samples_per_point,
            "reconstruction": result.to_json_dict(),
            "stderr": [float(s) for s in stderr],
            "analytic_probs": [float(p) for p in analytic_by_mode[name].probs],
            "exact_rho": json.loads(density_matrix_to_json(rho)),
        }
        panels[name] = panel
        panel_path = out / f"panel_{name}.json"
        panel_path.write_text(json.dumps(panel, indent=2) + "\n")
        write_mode_csv(mode, out / f"mode_{name}.csv")
        outputs += [f"panel_{name}.json", f"mode_{name}.csv"]
    write_manifest(config, out, "fock_panels", outputs)
    return panels


def end_to_end(config: ExperimentConfig, out_dir: str | Path | None = None) -> dict:
    """Full pipeline: trigger beam -> clicks -> coincidence pairs ->
    per-pair homodyne traces -> mode projections -> per-delay-bin
    tomography, compared against the analytic adapted-mode weights.

    Pairs are grouped into delay bins of width ``delta_t_bin_ns``; each
    group is simulated with the analysis modes of its bin-center delay.
    Bins holding fewer than ``min_pairs_per_bin`` pairs are skipped with a
    warning; if every bin is skipped, InsufficientPairs is raised.  Writes
    samples.csv (x, theta_rad, delta_t_ns) and report.json.
    """
    out = _prepare_out_dir(config, out_dir, "end_to_end")
    dt_field = config.field_dt_ns * 1e-9
    segment = _segment_duration(config.end_to_end_duration_s, dt_field)
    n_segments = int(math.ceil(config.end_to_end_duration_s / segment))
    seeds = _derive_seeds(config.rng_seed, 2 * n_segments + 1)
    streams = []
    for k in range(n_segments):
        field = synthesize_thermal_field(config.gamma_hz, segment, dt_field, seeds[2 * k])
        streams.append(sample_clicks(field, config.mean_rate_hz, seeds[2 * k + 1]))
    stream = concatenate_streams(streams)
    pairs = select_coincidences(
        stream,
        window=config.acceptance_window_ns * 1e-9,
        dead_time=config.dead_time_ns * 1e-9,
        rng_seed=seeds[-1],
    )
    if not pairs:
        raise InsufficientPairs("no coincidence pairs selected")
    delays = np.array([p.delta_t for p in pairs])
    bin_width = config.delta_t_bin_ns * 1e-9
    n_bins = int(math.ceil(config.acceptance_window_ns / config.delta_t_bin_ns))
    edges = bin_width * np.arange(n_bins + 1)
    which = np.clip(np.searchsorted(edges, delays, side="right") - 1, 0, n_bins - 1)
    bin_seeds = _derive_seeds(seeds[-1] ^ 0xE2E, 2 * n_bins)
    sample_rows = []
    bins_report = []
    n_reconstructed = 0
    for b in range(n_bins):
        idx = np.flatnonzero(which == b)
        center_ns = (edges[b] + 0.5 * bin_width) * 1e9
        entry = {
            "delta_t_bin_center_ns": center_ns,
            "n_pairs": int(idx.size),
            "skipped": False,
        }
        if idx.size < config.min_pairs_per_bin:
            if idx.size:
                warnings.warn(
                    f"delay bin at {center_ns:.1f} ns holds {idx.size} pairs "
                    f"(< {config.min_pairs_per_bin}); skipping reconstruction",
                    stacklevel=2,
                )
            entry["skipped"] = True
            bins_report.append(entry)
            continue
        scene = _build_scene(config, center_ns * 1e-9)
        x_values, thetas = _traces_for_bin(scene, idx.size, bin_seeds[2 * b])
        for x, theta, pair_idx in zip(x_values, thetas, idx):
            sample_rows.append((x, theta, delays[pair_idx] * 1e9))
        result, stderr = _reconstruct(x_values, config, bin_seeds[2 * b + 1])
        analytic = _adapted_lossy_distribution(scene.overlap, config.eta)
        entry["reconstruction"] = result.to_json_dict()
        entry["stderr"] = [float(s) for s in stderr]
        entry["analytic_probs"] = [float(p) for p in analytic.probs]
        entry["P2_pull"] = float(
            (result.probs[2] - analytic.p(2)) / stderr[2] if stderr[2] > 0 else np.nan
        )
        bins_report.append(entry)
        n_reconstructed += 1
    if n_reconstructed == 0:
        raise InsufficientPairs(
            f"no delay bin reached {config.min_pairs_per_bin} pairs; "
            f"got {len(pairs)} pairs over {n_bins} bins"
        )
    samples_path = out / "samples.csv"
    with open(samples_path, "w") as fh:
        fh.write("x,theta_rad,delta_t_ns\n")
        for x, theta, d_ns in sample_rows:
            fh.write(f"{_fmt(x)},{_fmt(theta)},{_fmt(d_ns)}\n")
    report = {
        "n_clicks": int(len(stream)),
        "n_pairs": int(len(pairs)),
        "n_bins": n_bins,
        "n_bins_reconstructed": n_reconstructed,
        "duration_s": stream.duration,
        "bins": bins_report,
    }
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    write_manifest(config, out, "end_to_end", ["samples.csv", "report.json"])
    return report


def _traces_for_bin(scene: _DelayScene, count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Synthesize ``count`` traces for one delay bin and project onto f1.

    Chunked so at most MAX_TRACES_PER_CHUNK full traces are alive at once;
    only the projections and phases are kept.
    """
    x_out = np.empty(count)
    theta_out = np.empty(count)
    chunk_seeds = _derive_seeds(seed, int(math.ceil(count / MAX_TRACES_PER_CHUNK)))
    done = 0
    for chunk_seed in chunk_seeds:
        n = min(MAX_TRACES_PER_CHUNK, count - done)
        traces, _, thetas = synthesize_trace_batch(
            scene.rho_pair, scene.f1, scene.f2, scene.herald, n, chunk_seed
        )
        x_out[done : done + n] = project_trace(traces, scene.f1)
        theta_out[done : done + n] = thetas
        done += n
    return x_out, theta_out


def reconstruct_samples(
    samples_csv: str | Path,
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
) -> dict:
    """Tomography of an existing quadrature CSV (columns x[,theta_rad[,...]]).

    Writes reconstruction.json holding the tomography output plus
    bootstrap standard errors.
    """
    out = _prepare_out_dir(config, out_dir, "reconstruct")
    x = _read_samples_csv(samples_csv)
    result, stderr = _reconstruct(x, config, _derive_seeds(config.rng_seed, 1)[0])
    payload = result.to_json_dict()
    payload["stderr"] = [float(s) for s in stderr]
    payload["n_samples"] = int(x.size)
    payload["source"] = str(samples_csv)
    (out / "reconstruction.json").write_text(json.dumps(payload, indent=2) + "\n")
    write_manifest(config, out, "reconstruct", ["reconstruction.json"])
    return payload


def _read_samples_csv(path: str | Path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "x":
            raise OutOfRange(f"{path}: expected a header starting with 'x'")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        raise OutOfRange(f"{path}: no samples")
    return data[:, 0]
