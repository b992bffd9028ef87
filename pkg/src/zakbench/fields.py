"""Fourier-coefficient fields on the torus and their spectral diagnostics.

Everything in this package represents a 2*pi-periodic function by its
truncated Fourier coefficient vector ``f_k`` for ``k = -N..N`` (sequence
normalization: ``f(x) = sum_k f_k e^{ikx}``).  This module owns the
container type plus the handful of primitives the rest of the code is
built on: discrete Sobolev norms, alias-free convolution, seeded random
data of prescribed regularity, and the dyadic-shell regularity estimator.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

# FFT worker threads; 1 is the default and the reproducibility-safe choice
FFT_WORKERS = max(1, int(os.environ.get("ZAKBENCH_THREADS", "1")))

__all__ = [
    "FourierField",
    "sobolev_norm",
    "harmonic_power_sum",
    "convolve",
    "convolve_coeffs",
    "random_sobolev_field",
    "fit_regularity",
    "InsufficientTailError",
    "field_to_csv",
    "field_from_csv",
    "DEFAULT_RANDOM_EPS",
    "DEFAULT_NOISE_FLOOR",
]

# Exponent cushion for random data: amplitudes (1+|k|)^(-s-1/2-eps) put the
# field in H^s but detectably outside H^(s+0.1).
DEFAULT_RANDOM_EPS = 0.05

# Dyadic shells with ell^2 mass below this are treated as numerical noise.
DEFAULT_NOISE_FLOOR = 1e-14

_REAL_SYMMETRY_TOL = 1e-12


class InsufficientTailError(ValueError):
    """Raised when a spectrum has too few usable dyadic shells to fit."""


def wavenumbers(radius: int) -> np.ndarray:
    """Integer mode numbers -radius..radius in storage order."""
    return np.arange(-radius, radius + 1)


@dataclass(frozen=True)
class FourierField:
    """Immutable truncated Fourier coefficient vector.

    Parameters
    ----------
    coeffs:
        Complex amplitudes in index order ``k = -N..N`` (length 2N+1).
    radius:
        Truncation radius N.  Mode ``k`` lives at array index ``k + N``.
    is_mean_zero:
        Asserts ``coeffs[k=0] == 0`` exactly.
    """

    coeffs: np.ndarray
    radius: int
    is_mean_zero: bool = False

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.ndim != 1 or arr.shape[0] != 2 * self.radius + 1:
            raise ValueError(
                f"expected {2 * self.radius + 1} coefficients for radius "
                f"{self.radius}, got shape {arr.shape}"
            )
        if self.is_mean_zero and arr[self.radius] != 0:
            raise ValueError("field flagged mean-zero but k=0 coefficient is nonzero")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # -- indexing -----------------------------------------------------------

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.radius:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + self.radius])

    @property
    def k(self) -> np.ndarray:
        return wavenumbers(self.radius)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, radius: int, mean_zero: bool = True) -> "FourierField":
        return cls(np.zeros(2 * radius + 1, dtype=np.complex128), radius, mean_zero)

    @classmethod
    def delta(cls, k: int, radius: int, amplitude: complex = 1.0) -> "FourierField":
        c = np.zeros(2 * radius + 1, dtype=np.complex128)
        c[k + radius] = amplitude
        return cls(c, radius, is_mean_zero=(k != 0))

    @classmethod
    def from_coeffs(cls, coeffs, radius: int, mean_zero: bool = False) -> "FourierField":
        return cls(np.asarray(coeffs, dtype=np.complex128), radius, mean_zero)

    # -- derived fields ------------------------------------------------------

    def conj_reflect(self) -> "FourierField":
        """Coefficients of the complex conjugate function: g_k = conj(f_{-k})."""
        return FourierField(np.conj(self.coeffs[::-1]), self.radius, self.is_mean_zero)

    def hermitian_part(self) -> "FourierField":
        """Coefficients of Re f, i.e. (f + conj f)/2."""
        return FourierField(
            0.5 * (self.coeffs + np.conj(self.coeffs[::-1])),
            self.radius,
            self.is_mean_zero,
        )

    def real_asymmetry(self) -> float:
        """Max deviation from the conjugate symmetry of a real-valued function."""
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))))

    def is_real_valued(self, tol: float = _REAL_SYMMETRY_TOL) -> bool:
        return self.real_asymmetry() <= tol

    def scaled(self, factor: complex) -> "FourierField":
        return FourierField(self.coeffs * factor, self.radius, self.is_mean_zero)

    def __add__(self, other: "FourierField") -> "FourierField":
        _check_radius(self, other)
        return FourierField(
            self.coeffs + other.coeffs,
            self.radius,
            self.is_mean_zero and other.is_mean_zero,
        )

    def __sub__(self, other: "FourierField") -> "FourierField":
        _check_radius(self, other)
        return FourierField(
            self.coeffs - other.coeffs,
            self.radius,
            self.is_mean_zero and other.is_mean_zero,
        )


def _check_radius(f: FourierField, g: FourierField) -> None:
    if f.radius != g.radius:
        raise ValueError(f"truncation radii differ: {f.radius} vs {g.radius}")


# ---------------------------------------------------------------------------
# Sobolev norms
# ---------------------------------------------------------------------------

def sobolev_weights(radius: int, s: float) -> np.ndarray:
    """Japanese-bracket weights (1+|k|)^s for k = -radius..radius."""
    return (1.0 + np.abs(wavenumbers(radius))) ** s


def sobolev_norm(f: FourierField, s: float) -> float:
    """H^s norm ( sum_k (1+|k|)^{2s} |f_k|^2 )^{1/2}."""
    return sobolev_norm_arr(f.coeffs, s)


def sobolev_norm_arr(coeffs: np.ndarray, s: float) -> float:
    coeffs = np.asarray(coeffs)
    radius = (coeffs.shape[-1] - 1) // 2
    w = sobolev_weights(radius, s)
    return float(np.sqrt(np.sum(w * w * np.abs(coeffs) ** 2, axis=-1)))


def sobolev_norms_batch(coeffs: np.ndarray, s: float) -> np.ndarray:
    """H^s norms along the last axis of a (..., 2N+1) coefficient array."""
    radius = (coeffs.shape[-1] - 1) // 2
    w = sobolev_weights(radius, s)
    return np.sqrt(np.sum(w * w * np.abs(coeffs) ** 2, axis=-1))


# ---------------------------------------------------------------------------
# Harmonic-type partial sums
# ---------------------------------------------------------------------------

def harmonic_power_sum(beta: float, k: int) -> float:
    """Partial sum of |n|^(-beta) over 0 < |n| <= |k| (empty sum = 0).

    Symmetric in n, so the value is twice the one-sided sum.  Grows like
    (1+|k|)^(1-beta) for beta < 1, like 2 log for beta = 1, and is bounded
    by 2 zeta(beta) for beta > 1.
    """
    m = abs(int(k))
    if m == 0:
        return 0.0
    n = np.arange(1, m + 1, dtype=np.float64)
    return float(2.0 * np.sum(n ** (-beta)))


# ---------------------------------------------------------------------------
# Alias-free convolution
# ---------------------------------------------------------------------------

def _pad_length(radius: int) -> int:
    """Smallest 2^a * 5^b >= 3N+1.

    Zero padding to >= 3N+1 grid points keeps every retained product mode
    |k| <= N free of circular aliasing for quadratic products; restricting
    to {2,5}-smooth lengths keeps pocketfft on its fastest codelets.
    """
    need = 3 * radius + 1
    best = 1
    while best < need:
        best *= 2
    p5 = 1
    while p5 <= 2 * need:
        p2 = 1
        while p5 * p2 < need:
            p2 *= 2
        best = min(best, p5 * p2)
        p5 *= 5
    return best


def _to_grid(coeffs: np.ndarray, radius: int, length: int) -> np.ndarray:
    """Scatter centered coefficients into an FFT-ordered buffer of size length."""
    buf = np.zeros(coeffs.shape[:-1] + (length,), dtype=np.complex128)
    buf[..., : radius + 1] = coeffs[..., radius:]
    buf[..., length - radius :] = coeffs[..., :radius]
    return buf


def _from_grid(buf: np.ndarray, radius: int) -> np.ndarray:
    out = np.empty(buf.shape[:-1] + (2 * radius + 1,), dtype=np.complex128)
    out[..., radius:] = buf[..., : radius + 1]
    out[..., :radius] = buf[..., buf.shape[-1] - radius :]
    return out


def convolve_coeffs(a: np.ndarray, b: np.ndarray, radius: int) -> np.ndarray:
    """Truncated convolution (a*b)_k = sum_{m+n=k} a_n b_m, |k| <= radius.

    Computed on a zero-padded grid so that every product of retained input
    modes landing inside the band is exact; supports leading batch axes.
    """
    length = _pad_length(radius)
    ga = _fft.ifft(_to_grid(a, radius, length), axis=-1, workers=FFT_WORKERS)
    gb = _fft.ifft(_to_grid(b, radius, length), axis=-1, workers=FFT_WORKERS)
    prod = _fft.fft(ga * gb, axis=-1, workers=FFT_WORKERS) * length
    return _from_grid(prod, radius)


def convolve(f: FourierField, g: FourierField) -> FourierField:
    """Alias-free product field of f and g, truncated to the common band."""
    _check_radius(f, g)
    out = convolve_coeffs(f.coeffs, g.coeffs, f.radius)
    return FourierField(out, f.radius)


# ---------------------------------------------------------------------------
# Random data of prescribed regularity
# ---------------------------------------------------------------------------

def random_sobolev_field(
    s: float,
    radius: int,
    seed: int,
    mean_zero: bool = False,
    real_valued: bool = False,
    eps: float = DEFAULT_RANDOM_EPS,
    amplitude: float = 1.0,
) -> FourierField:
    """Deterministic random field with amplitudes (1+|k|)^(-s-1/2-eps).

    Phases are i.i.d. uniform from ``numpy.random.default_rng(seed)``, so
    the same (s, radius, seed) always produces the same field.  With
    ``real_valued`` the negative modes are the conjugates of the positive
    ones and the mean is real.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    rng = np.random.default_rng(seed)
    k = wavenumbers(radius)
    mags = amplitude * (1.0 + np.abs(k)) ** (-s - 0.5 - eps)
    if real_valued:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=radius)
        coeffs = np.zeros(2 * radius + 1, dtype=np.complex128)
        pos = mags[radius + 1 :] * np.exp(1j * theta)
        coeffs[radius + 1 :] = pos
        coeffs[:radius] = np.conj(pos[::-1])
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        coeffs[radius] = sign * mags[radius]
    else:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=2 * radius + 1)
        coeffs = mags * np.exp(1j * theta)
    if mean_zero:
        coeffs[radius] = 0.0
    return FourierField(coeffs, radius, is_mean_zero=mean_zero)


# ---------------------------------------------------------------------------
# Regularity estimation from dyadic-shell decay
# ---------------------------------------------------------------------------

def dyadic_shells(kmin: int, kmax: int):
    """Full dyadic shell edges [lo, 2lo) inside [kmin, kmax].

    Partial trailing shells are dropped: a clipped shell holds far less
    mass than the decay trend predicts and would bias the slope fit.
    """
    shells = []
    lo = max(1, kmin)
    while 2 * lo <= kmax + 1:
        shells.append((lo, 2 * lo))
        lo = 2 * lo
    return shells


def fit_regularity(
    f: FourierField,
    fit_range: tuple[int, int] | None = None,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
) -> float:
    """Estimate the Sobolev regularity of f from its dyadic tail decay.

    The ell^2 mass of each dyadic shell |k| in [K, 2K) is fit against the
    shell center in log-log; a per-mode amplitude decay (1+|k|)^(-sigma)
    gives shell mass ~ K^(1-2 sigma), and the field sits on the boundary
    of H^s for s = sigma - 1/2.  Shells whose mass is below ``noise_floor``
    are dropped; fewer than 3 usable shells raises InsufficientTailError.
    """
    if fit_range is None:
        fit_range = (max(4, f.radius // 16), f.radius)
    kmin, kmax = int(fit_range[0]), int(fit_range[1])
    if kmin < 1 or kmax > f.radius or kmin >= kmax:
        raise ValueError(f"bad fit range {fit_range} for radius {f.radius}")
    absk = np.abs(f.k)
    power = np.abs(f.coeffs) ** 2
    centers, masses = [], []
    for lo, hi in dyadic_shells(kmin, kmax):
        mask = (absk >= lo) & (absk < hi)
        mass = float(np.sum(power[mask]))
        if mass < noise_floor:
            continue
        centers.append(np.sqrt(lo * (hi - 1)))
        masses.append(mass)
    if len(masses) < 3:
        raise InsufficientTailError(
            f"only {len(masses)} usable dyadic shells in |k| in [{kmin}, {kmax}]"
        )
    slope = np.polyfit(np.log(centers), np.log(masses), 1)[0]
    # mass slope beta = 1 - 2*sigma  =>  regularity s = sigma - 1/2 = -beta/2
    return float(-slope / 2.0)


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def field_to_csv(f: FourierField, path_or_buf) -> None:
    """Write one row per mode: k, re, im with 17 significant digits."""
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.writer(fh)
        writer.writerow(["k", "re", "im"])
        for k, c in zip(f.k, f.coeffs):
            writer.writerow([int(k), f"{c.real:.17g}", f"{c.imag:.17g}"])
    finally:
        if own:
            fh.close()


def field_from_csv(path_or_buf, mean_zero: bool | None = None) -> FourierField:
    own = isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__")
    fh = open(path_or_buf, "r", newline="") if own else path_or_buf
    try:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["k", "re", "im"]:
            raise ValueError(f"unexpected field CSV header: {header}")
        rows = [(int(r[0]), float(r[1]), float(r[2])) for r in reader if r]
    finally:
        if own:
            fh.close()
    if not rows:
        raise ValueError("empty field CSV")
    ks = [r[0] for r in rows]
    radius = max(abs(min(ks)), abs(max(ks)))
    coeffs = np.zeros(2 * radius + 1, dtype=np.complex128)
    for k, re, im in rows:
        coeffs[k + radius] = re + 1j * im
    if mean_zero is None:
        mean_zero = coeffs[radius] == 0.0
    return FourierField(coeffs, radius, is_mean_zero=bool(mean_zero))


def field_to_csv_string(f: FourierField) -> str:
    buf = io.StringIO()
    field_to_csv(f, buf)
    return buf.getvalue()
