"""Stochastic synthesis of swarm returns and Monte Carlo estimators.

Each realization draws initial blade angles and projection phases uniformly
on [0, 2*pi) and rotor speeds from a Gaussian, then sums unit scatterer
returns coherently.  Realization ``k`` of an ensemble is generated from a
substream derived deterministically from ``(master_seed, k)``, so ensembles
are bit-identical regardless of worker count or scheduling.
"""
from __future__ import annotations

import json
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, FormatError, ValidationError
from .model import Curve, SamplingGrid, SwarmParams, derive

_ENSEMBLE_MAGIC = b"SWEN"
_ENSEMBLE_VERSION = 1
_CHUNK_ROWS = 256


@dataclass(frozen=True)
class SwarmState:
    """Latent draws of one realization: per-rotor angles, phases and speeds."""

    initial_angles: np.ndarray      # (n_drones, n_rotors), [0, 2*pi)
    projection_phases: np.ndarray   # (n_drones, n_rotors), [0, 2*pi)
    rotor_speeds: np.ndarray        # (n_drones, n_rotors), rad/s

    def __post_init__(self) -> None:
        for name in ("initial_angles", "projection_phases", "rotor_speeds"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2:
                raise ValidationError(f"{name} must be a 2-d array")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.initial_angles.shape == self.projection_phases.shape
                == self.rotor_speeds.shape):
            raise ValidationError("state arrays must share one (n_drones, n_rotors) shape")


def sample_state(params: SwarmParams, rng: np.random.Generator) -> SwarmState:
    """Draw one latent state from ``rng``.

    Draw order is fixed (angle block, phase block, speed block, each in
    row-major drone/rotor order) so a given generator position always yields
    the same state.  Speeds are not truncated: the return is symmetric in
    the speed sign, so negative samples are admissible.
    """
    shape = (params.n_drones, params.n_rotors)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    speeds = params.mean_speed + params.speed_std * rng.standard_normal(size=shape)
    return SwarmState(initial_angles=angles, projection_phases=phases,
                      rotor_speeds=speeds)


def synthesize(state: SwarmState, params: SwarmParams, grid: SamplingGrid) -> np.ndarray:
    """Coherent return signal of one realization on the given time grid.

    Each blade contributes a unit phasor whose phase is the modulation index
    times the cosine of its rotation angle; rotor returns are rotated by the
    projection phase and summed.  Output is complex128 of length
    ``grid.n_samples``.
    """
    if state.initial_angles.shape != (params.n_drones, params.n_rotors):
        raise ValidationError(
            f"state shape {state.initial_angles.shape} does not match "
            f"(n_drones, n_rotors)=({params.n_drones}, {params.n_rotors})"
        )
    d = derive(params)
    t = grid.times()
    base = state.initial_angles[..., None] + state.rotor_speeds[..., None] * t
    acc = np.zeros(base.shape, dtype=np.complex128)
    for b in range(params.n_blades):
        angle = base + (2.0 * np.pi * b / params.n_blades)
        acc += np.exp(-1j * d.mod_index * np.cos(angle))
    rotor_gain = np.exp(-1j * state.projection_phases)[..., None]
    return params.gain_magnitude * np.sum(rotor_gain * acc, axis=(0, 1))


@dataclass(frozen=True)
class Ensemble:
    """A batch of signal realizations with its generation provenance."""

    params: SwarmParams
    grid: SamplingGrid
    master_seed: int
    signals: np.ndarray   # (n_realizations, n_samples), complex

    def __post_init__(self) -> None:
        arr = np.asarray(self.signals)
        if arr.ndim != 2 or not np.iscomplexobj(arr):
            raise ValidationError("signals must be a 2-d complex array")
        if arr.shape[1] != self.grid.n_samples:
            raise ValidationError(
                f"signals have {arr.shape[1]} samples but the grid has {self.grid.n_samples}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "signals", arr)

    @property
    def n_realizations(self) -> int:
        return self.signals.shape[0]


def realization_rng(master_seed: int, index: int) -> np.random.Generator:
    """Deterministic substream for realization ``index`` of ``master_seed``."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def simulate_ensemble(params: SwarmParams, grid: SamplingGrid, n_realizations: int,
                      master_seed: int, *, n_workers: int = 1,
                      dtype=np.complex64) -> Ensemble:
    """Generate ``n_realizations`` independent signal realizations.

    Realization ``k`` depends only on ``(master_seed, k)``; results are
    bit-identical for any ``n_workers``.  ``dtype`` may be complex64 (the
    default, halving memory) or complex128.
    """
    if isinstance(n_realizations, bool) or not isinstance(n_realizations, int) \
            or n_realizations < 1:
        raise ValidationError(f"n_realizations must be >= 1, got {n_realizations!r}")
    dtype = np.dtype(dtype)
    if dtype not in (np.dtype(np.complex64), np.dtype(np.complex128)):
        raise ValidationError(f"dtype must be complex64 or complex128, got {dtype}")
    try:
        signals = np.empty((n_realizations, grid.n_samples), dtype=dtype)
    except MemoryError as exc:
        raise MemoryError(
            f"could not allocate ensemble storage ({n_realizations} x "
            f"{grid.n_samples} {dtype}); 0/{n_realizations} realizations done"
        ) from exc

    def fill(k: int) -> None:
        state = sample_state(params, realization_rng(master_seed, k))
        signals[k] = synthesize(state, params, grid)

    done = 0
    try:
        if n_workers <= 1:
            for k in range(n_realizations):
                fill(k)
                done += 1
        else:
            with ThreadPoolExecutor(max_workers=n_workers) as pool:
                for _ in pool.map(fill, range(n_realizations)):
                    done += 1
    except MemoryError as exc:
        raise MemoryError(
            f"ensemble generation exhausted memory after {done}/{n_realizations} "
            "realizations"
        ) from exc
    return Ensemble(params=params, grid=grid, master_seed=master_seed, signals=signals)


def estimate_acf(ensemble: Ensemble, t_ref_index: int = 0, n_lags: int | None = None,
                 *, time_average: bool = False) -> Curve:
    """Monte Carlo autocorrelation estimate over nonnegative lags.

    The default estimator averages ``y_k(t_ref) * conj(y_k(t_ref + lag))``
    across realizations at the single reference time.  ``time_average=True``
    additionally averages over every valid reference time within each
    realization, a variance-reduction extension that assumes (and exploits)
    stationarity.
    """
    signals = ensemble.signals
    n_samples = signals.shape[1]
    if n_lags is None:
        n_lags = n_samples - t_ref_index
    if t_ref_index < 0 or n_lags < 1 or t_ref_index + n_lags > n_samples:
        raise DomainError(
            f"lag range overflows the grid: t_ref_index={t_ref_index}, "
            f"n_lags={n_lags}, n_samples={n_samples}"
        )
    n_real = signals.shape[0]
    acc = np.zeros(n_lags, dtype=np.complex128)
    if time_average:
        fft_len = 1 << (n_samples + n_lags - 1).bit_length()
        for lo in range(0, n_real, _CHUNK_ROWS):
            rows = signals[lo:lo + _CHUNK_ROWS].astype(np.complex128)
            spectra = np.fft.fft(rows, n=fft_len, axis=1)
            ac = np.fft.ifft(spectra * np.conj(spectra), axis=1)[:, :n_lags]
            acc += np.conj(ac).sum(axis=0)
        counts = (n_samples - np.arange(n_lags)).astype(float)
        acc /= n_real * counts
        estimator = "time_average"
    else:
        for lo in range(0, n_real, _CHUNK_ROWS):
            rows = signals[lo:lo + _CHUNK_ROWS]
            ref = rows[:, t_ref_index:t_ref_index + 1]
            block = rows[:, t_ref_index:t_ref_index + n_lags]
            acc += np.sum(ref * np.conj(block), axis=0, dtype=np.complex128)
        acc /= n_real
        estimator = "single_reference"
    lags = ensemble.grid.dt * np.arange(n_lags)
    meta = {
        "n_realizations": n_real,
        "t_ref_index": t_ref_index,
        "master_seed": ensemble.master_seed,
        "dt_s": ensemble.grid.dt,
        "estimator": estimator,
    }
    return Curve(axis="lag_s", x=lags, y=acc, meta=meta)


def estimate_psd(acf_curve: Curve) -> Curve:
    """Spectrum estimate: scaled transform of a lag-domain curve.

    The curve must hold uniformly spaced lags starting at zero.  Negative
    lags are reconstructed by conjugate symmetry and the result approximates
    the plain integral transform of the autocorrelation (DFT scaled by the
    lag step).  The frequency axis is angular (rad/s), ascending.
    """
    if acf_curve.axis != "lag_s":
        raise DomainError(f"expected a lag-domain curve, got axis {acf_curve.axis!r}")
    lags = acf_curve.x
    if lags.size < 2:
        raise DomainError("need at least two lags to form a spectrum")
    dlag = lags[1] - lags[0]
    steps = np.diff(lags)
    if np.any(np.abs(steps - dlag) > 1e-9 * dlag):
        raise DomainError("lag grid must be uniformly spaced")
    if lags[0] != 0.0:
        raise DomainError("lag grid must start at zero")
    values = np.asarray(acf_curve.y, dtype=np.complex128)
    m = values.size
    total = 2 * m - 1
    seq = np.empty(total, dtype=np.complex128)
    seq[:m] = values
    seq[m:] = np.conj(values[-1:0:-1])
    spectrum = np.fft.fft(seq) * dlag
    freqs = 2.0 * np.pi * np.fft.fftfreq(total, d=dlag)
    order = np.fft.fftshift(np.arange(total))
    freqs = freqs[order]
    spectrum = spectrum[order]
    residual = float(np.max(np.abs(spectrum.imag))) if m > 1 else 0.0
    meta = dict(acf_curve.meta)
    meta.update({
        "dlag_s": float(dlag),
        "max_imag_residual": residual,
        "transform": "lag-step-scaled DFT of the conjugate-symmetric extension",
    })
    return Curve(axis="angular_frequency_rad_per_s", x=freqs, y=spectrum.real, meta=meta)


@dataclass(frozen=True)
class StftConfig:
    """Short-time transform settings for spectrograms."""

    window: str = "hann"
    window_length: int = 256
    hop: int = 64
    fft_length: int = 256

    def __post_init__(self) -> None:
        if self.window not in ("hann", "rectangular"):
            raise ValidationError(f"window must be 'hann' or 'rectangular', got {self.window!r}")
        for name in ("window_length", "hop", "fft_length"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        if self.hop > self.window_length:
            raise ValidationError(
                f"hop ({self.hop}) must not exceed window_length ({self.window_length})"
            )
        if self.fft_length < self.window_length:
            raise ValidationError(
                f"fft_length ({self.fft_length}) must be >= window_length "
                f"({self.window_length})"
            )


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude-squared short-time transform with annotated axes."""

    power: np.ndarray   # (n_freqs, n_frames)
    times: np.ndarray   # frame centers, seconds
    freqs: np.ndarray   # angular frequency, rad/s, ascending

    def __post_init__(self) -> None:
        for name in ("power", "times", "freqs"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def spectrogram(series: np.ndarray, grid: SamplingGrid,
                cfg: StftConfig = StftConfig()) -> Spectrogram:
    """Magnitude-squared short-time transform of one complex series."""
    series = np.asarray(series)
    if series.ndim != 1:
        raise DomainError("series must be one-dimensional")
    if cfg.window_length > series.size:
        raise DomainError(
            f"window_length ({cfg.window_length}) exceeds series length ({series.size})"
        )
    if cfg.window == "hann":
        k = np.arange(cfg.window_length)
        win = 0.5 - 0.5 * np.cos(2.0 * np.pi * k / cfg.window_length)
    else:
        win = np.ones(cfg.window_length)
    n_frames = 1 + (series.size - cfg.window_length) // cfg.hop
    starts = cfg.hop * np.arange(n_frames)
    frames = series[starts[:, None] + np.arange(cfg.window_length)[None, :]] * win
    transform = np.fft.fft(frames, n=cfg.fft_length, axis=1)
    power = np.abs(np.fft.fftshift(transform, axes=1)) ** 2
    freqs = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(cfg.fft_length, d=grid.dt))
    times = grid.t_start + (starts + 0.5 * (cfg.window_length - 1)) * grid.dt
    return Spectrogram(power=power.T, times=times, freqs=freqs)


def save_ensemble(path, ensemble: Ensemble) -> None:
    """Write an ensemble to the versioned binary container.

    Layout: magic ``SWEN``, little-endian u32 version and u64 header length,
    UTF-8 JSON header (params, grid, seed, shape, dtype), then the raw
    little-endian row-major payload.
    """
    p = ensemble.params
    g = ensemble.grid
    dtype_name = "complex64" if ensemble.signals.dtype == np.complex64 else "complex128"
    header = {
        "version": _ENSEMBLE_VERSION,
        "params": {
            "n_drones": p.n_drones, "n_rotors": p.n_rotors, "n_blades": p.n_blades,
            "blade_length": p.blade_length, "wavelength": p.wavelength,
            "mean_speed": p.mean_speed, "speed_variance": p.speed_variance,
            "gain_magnitude": p.gain_magnitude,
        },
        "grid": {"t_start": g.t_start, "dt": g.dt, "n_samples": g.n_samples},
        "master_seed": ensemble.master_seed,
        "n_realizations": ensemble.n_realizations,
        "n_samples": g.n_samples,
        "dtype": dtype_name,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    wire_dtype = "<c8" if dtype_name == "complex64" else "<c16"
    with open(path, "wb") as fh:
        fh.write(_ENSEMBLE_MAGIC)
        fh.write(struct.pack("<IQ", _ENSEMBLE_VERSION, len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(ensemble.signals).astype(wire_dtype, copy=False).tobytes())


def load_ensemble(path) -> Ensemble:
    """Read an ensemble written by :func:`save_ensemble`."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _ENSEMBLE_MAGIC:
            raise FormatError(f"not an ensemble container (magic {magic!r})")
        version, header_len = struct.unpack("<IQ", fh.read(12))
        if version != _ENSEMBLE_VERSION:
            raise FormatError(f"unsupported ensemble container version {version}")
        header = json.loads(fh.read(header_len).decode("utf-8"))
        wire_dtype = "<c8" if header["dtype"] == "complex64" else "<c16"
        count = header["n_realizations"] * header["n_samples"]
        payload = np.frombuffer(fh.read(), dtype=wire_dtype, count=count)
    params = SwarmParams(**header["params"])
    grid = SamplingGrid(**header["grid"])
    signals = payload.astype(header["dtype"]).reshape(
        header["n_realizations"], header["n_samples"])
    return Ensemble(params=params, grid=grid, master_seed=header["master_seed"],
                    signals=signals)
