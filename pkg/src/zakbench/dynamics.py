"""Time evolution of the Zakharov system in Fourier coefficient space.

The evolved state is (u, n_plus) with the conjugate half-wave derived by
reflection.  The integrator is a Lawson (integrating-factor) classical
RK4: the stiff diagonal linear phases exp(-i alpha k^2 t), exp(-i|j|t)
(and the damping exp(-gamma t) when present) are applied exactly, so the
linear part of the flow carries no scheme error and smoothing diagnostics
can subtract it exactly.  The nonlinear terms use alias-free padded
convolutions.

The u-equation couples to the real density n = (n_+ + n_-)/2; a
``coupling="plus_only"`` switch instead couples to n_+ alone, which is
the single-field model the normal-form identities are stated for.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fields import (
    FourierField,
    _check_radius,
    convolve_coeffs,
    sobolev_norms_batch,
    wavenumbers,
)

__all__ = [
    "ModelParams",
    "ZakharovState",
    "Trajectory",
    "BlowUpError",
    "rhs",
    "linear_flow_schrodinger",
    "linear_flow_wave_plus",
    "integrate",
    "mass",
    "energy",
    "energy_rate",
    "DEFAULT_BLOWUP_THRESHOLD",
]

DEFAULT_BLOWUP_THRESHOLD = 1e8

_COUPLINGS = ("full", "plus_only")


@dataclass(frozen=True)
class ModelParams:
    """Dispersion coefficient, optionally with its exact rational value."""

    alpha: float
    alpha_rational: Fraction | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.alpha_rational is not None:
            frac = Fraction(self.alpha_rational)
            if abs(float(frac) - self.alpha) > 1e-15:
                raise ValueError(
                    f"alpha_rational {frac} does not match alpha {self.alpha}"
                )
            object.__setattr__(self, "alpha_rational", frac)

    @classmethod
    def from_rational(cls, frac) -> "ModelParams":
        frac = Fraction(frac)
        return cls(alpha=float(frac), alpha_rational=frac)


@dataclass(frozen=True)
class ZakharovState:
    """Solution snapshot: Schrodinger part u, half-wave n_plus, time t."""

    u: FourierField
    n_plus: FourierField
    t: float = 0.0

    def __post_init__(self):
        _check_radius(self.u, self.n_plus)
        if not self.n_plus.is_mean_zero:
            raise ValueError("n_plus must be mean-zero")

    @property
    def radius(self) -> int:
        return self.u.radius

    def n_real(self) -> FourierField:
        """The physical density n = (n_+ + n_-)/2."""
        return self.n_plus.hermitian_part()


class BlowUpError(RuntimeError):
    """Norm guard tripped; carries the last time with finite, bounded data."""

    def __init__(self, t_last: float, norm: float):
        super().__init__(f"norm {norm:.3e} exceeded blow-up guard at t={t_last:.6g}")
        self.t_last = t_last
        self.norm = norm


# ---------------------------------------------------------------------------
# Right-hand side
# ---------------------------------------------------------------------------

def _rhs_arrays(
    u: np.ndarray,
    n: np.ndarray,
    radius: int,
    alpha: float,
    coupling: str = "full",
    nl_scale: float = 1.0,
    gamma: float = 0.0,
    forcing: np.ndarray | None = None,
):
    """du/dt, dn/dt for coefficient arrays shaped (..., 2N+1)."""
    k = wavenumbers(radius)
    absk = np.abs(k).astype(np.float64)
    du = (-1j * alpha * k * k - gamma) * u
    dn = (-1j * absk - gamma) * n
    if nl_scale != 0.0:
        if coupling == "full":
            density = 0.5 * (n + np.conj(n[..., ::-1]))
        elif coupling == "plus_only":
            density = n
        else:
            raise ValueError(f"unknown coupling {coupling!r}")
        du = du - 1j * nl_scale * convolve_coeffs(density, u, radius)
        uubar = convolve_coeffs(u, np.conj(u[..., ::-1]), radius)
        dn = dn - 1j * nl_scale * absk * uubar
    if forcing is not None:
        du = du - 1j * forcing
    dn[..., radius] = 0.0
    return du, dn


def rhs(
    state: ZakharovState,
    params: ModelParams,
    coupling: str = "full",
    nl_scale: float = 1.0,
) -> tuple[FourierField, FourierField]:
    """Instantaneous time derivative (du/dt, dn_plus/dt) of the state."""
    du, dn = _rhs_arrays(
        state.u.coeffs,
        state.n_plus.coeffs,
        state.radius,
        params.alpha,
        coupling=coupling,
        nl_scale=nl_scale,
    )
    return (
        FourierField(du, state.radius),
        FourierField(dn, state.radius, is_mean_zero=True),
    )


# ---------------------------------------------------------------------------
# Exact linear propagators
# ---------------------------------------------------------------------------

def _schrodinger_phase(radius: int, t: float, alpha: float, gamma: float = 0.0):
    k = wavenumbers(radius)
    return np.exp((-1j * alpha * k * k - gamma) * t)


def _wave_phase(radius: int, t: float, gamma: float = 0.0):
    absk = np.abs(wavenumbers(radius))
    return np.exp((-1j * absk - gamma) * t)


def linear_flow_schrodinger(
    u0: FourierField, t: float, alpha: float, gamma: float = 0.0
) -> FourierField:
    """Free Schrodinger group (damped if gamma > 0): u_k -> e^{-i alpha k^2 t - gamma t} u_k."""
    return FourierField(
        _schrodinger_phase(u0.radius, t, alpha, gamma) * u0.coeffs,
        u0.radius,
        is_mean_zero=u0.is_mean_zero,
    )


def linear_flow_wave_plus(n0: FourierField, t: float, gamma: float = 0.0) -> FourierField:
    """Half-wave group for n_plus: n_j -> e^{-i |j| t - gamma t} n_j."""
    return FourierField(
        _wave_phase(n0.radius, t, gamma) * n0.coeffs,
        n0.radius,
        is_mean_zero=n0.is_mean_zero,
    )


# ---------------------------------------------------------------------------
# Conserved quantities
# ---------------------------------------------------------------------------

def mass(state: ZakharovState) -> float:
    """sum_k |u_k|^2, exactly conserved by the conservative flow."""
    return float(np.sum(np.abs(state.u.coeffs) ** 2))


def _energy_complex(u: np.ndarray, n_plus: np.ndarray, radius: int, alpha: float):
    k = wavenumbers(radius)
    n_minus = np.conj(n_plus[..., ::-1])
    n_real = 0.5 * (n_plus + n_minus)
    kinetic = alpha * np.sum(k * k * np.abs(u) ** 2, axis=-1)
    wave = 0.25 * (
        np.sum(np.abs(n_plus) ** 2, axis=-1) + np.sum(np.abs(n_minus) ** 2, axis=-1)
    )
    density = convolve_coeffs(u, np.conj(u[..., ::-1]), radius)
    cross = np.sum(n_real * density[..., ::-1], axis=-1)
    return kinetic + wave + cross


def energy(state: ZakharovState, params: ModelParams) -> float:
    """Hamiltonian alpha*sum k^2|u_k|^2 + (|n_+|^2+|n_-|^2)/4 + sum n_j (|u|^2)_{-j}.

    The value is real for admissible states; an imaginary residue above
    1e-12 of the total scale indicates corrupted data and raises.
    """
    e = complex(
        _energy_complex(state.u.coeffs, state.n_plus.coeffs, state.radius, params.alpha)
    )
    scale = max(1.0, abs(e))
    if abs(e.imag) > 1e-12 * scale:
        raise ValueError(f"energy has imaginary residue {e.imag:.3e}")
    return float(e.real)


def energy_rate(state: ZakharovState, params: ModelParams) -> float:
    """dE/dt evaluated through the chain rule on rhs output (0 for the flow)."""
    du, dn = rhs(state, params)
    k = wavenumbers(state.radius)
    u, n_plus = state.u.coeffs, state.n_plus.coeffs
    duc, dnc = du.coeffs, dn.coeffs
    kinetic = 2.0 * params.alpha * np.sum(k * k * np.real(np.conj(u) * duc))
    wave = np.sum(np.real(np.conj(n_plus) * dnc))
    n_real = 0.5 * (n_plus + np.conj(n_plus[..., ::-1]))
    dn_real = 0.5 * (dnc + np.conj(dnc[..., ::-1]))
    density = convolve_coeffs(u, np.conj(u[..., ::-1]), state.radius)
    ddensity = convolve_coeffs(duc, np.conj(u[..., ::-1]), state.radius)
    ddensity = ddensity + convolve_coeffs(u, np.conj(duc[..., ::-1]), state.radius)
    cross = np.sum(dn_real * density[::-1]) + np.sum(n_real * ddensity[::-1])
    return float(np.real(kinetic + wave + cross))


# ---------------------------------------------------------------------------
# Time stepping
# ---------------------------------------------------------------------------

def default_dt(radius: int, alpha: float = 1.0) -> float:
    """Resolve the fastest retained Schrodinger phase: dt = 0.5 / N^2."""
    return 0.5 / (radius * radius)


def _integrate_arrays(
    u0: np.ndarray,
    n0: np.ndarray,
    radius: int,
    alpha: float,
    t0: float,
    dt: float,
    t_end: float,
    sample_every: int,
    coupling: str = "full",
    nl_scale: float = 1.0,
    gamma: float = 0.0,
    forcing: np.ndarray | None = None,
    blowup_threshold: float = DEFAULT_BLOWUP_THRESHOLD,
):
    """Lawson-RK4 march of coefficient arrays with leading batch axes.

    Returns (times, u_samples, n_samples) where the sample arrays have the
    step-sample axis first.  The step count is rounded so the march lands
    exactly on t_end.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not t_end > t0:
        raise ValueError("t_end must exceed the initial time")
    n_steps = max(1, round((t_end - t0) / dt))
    h = (t_end - t0) / n_steps
    sample_every = max(1, int(sample_every))

    k = wavenumbers(radius)
    absk = np.abs(k).astype(np.float64)
    lam_u = -1j * alpha * k * k - gamma
    lam_n = -1j * absk - gamma

    from scipy import fft as _sfft

    from .fields import FFT_WORKERS, _pad_length

    length = _pad_length(radius)
    batch = np.broadcast_shapes(u0.shape[:-1], n0.shape[:-1])
    buf_u = np.zeros(batch + (length,), dtype=np.complex128)
    buf_n = np.zeros(batch + (length,), dtype=np.complex128)

    def scatter(buf, coeffs):
        buf[..., : radius + 1] = coeffs[..., radius:]
        buf[..., length - radius :] = coeffs[..., :radius]
        return buf

    def gather(grid):
        out = np.empty(batch + (2 * radius + 1,), dtype=np.complex128)
        out[..., radius:] = grid[..., : radius + 1]
        out[..., :radius] = grid[..., length - radius :]
        return out

    def nl(u, n):
        # One grid round trip serves both quadratic terms: |u|^2 reuses the
        # samples of u, and for the full coupling the real density is just
        # the real part of the samples of n_plus.
        if nl_scale == 0.0:
            du = np.zeros_like(u)
            dn = np.zeros_like(n)
        else:
            gu = _sfft.ifft(scatter(buf_u, u), axis=-1, workers=FFT_WORKERS)
            gn = _sfft.ifft(scatter(buf_n, n), axis=-1, workers=FFT_WORKERS)
            gd = gn.real if coupling == "full" else gn
            du = gather(_sfft.fft(gd * gu, axis=-1, overwrite_x=True,
                                  workers=FFT_WORKERS))
            du *= -1j * nl_scale * length
            dn = gather(_sfft.fft(gu * np.conj(gu), axis=-1, overwrite_x=True,
                                  workers=FFT_WORKERS))
            dn *= (-1j * nl_scale * length) * absk
        if forcing is not None:
            du -= 1j * forcing
        dn[..., radius] = 0.0
        return du, dn

    # March in a windowed interaction frame: v = exp(-lam (t - T0)) u.  The
    # marched state is only ever ADDED to (v += h/6 sum K), so per-step
    # rounding is a random walk instead of the systematic ~eps bias that a
    # per-step phase multiplication of the state would imprint on the mass;
    # the phases touch the state only at sparse window recenterings.
    recenter_every = max(1, min(1024, int(0.25 / h) or 1))
    if gamma > 0:
        recenter_every = max(1, min(recenter_every, int(0.25 / (gamma * h)) or 1))

    vu = np.array(u0, dtype=np.complex128, copy=True)
    vn = np.array(n0, dtype=np.complex128, copy=True)
    base = 0  # step index of the current window origin T0

    def phases(delta_t):
        return (np.exp(lam_u * delta_t), np.exp(lam_n * delta_t),
                np.exp(-lam_u * delta_t), np.exp(-lam_n * delta_t))

    times = [t0]
    us = [vu.copy()]
    ns = [vn.copy()]

    for step in range(1, n_steps + 1):
        d0 = (step - 1 - base) * h
        pu0, pn0, qu0, qn0 = phases(d0)
        pu1, pn1, qu1, qn1 = phases(d0 + 0.5 * h)
        pu2, pn2, qu2, qn2 = phases(d0 + h)

        f1u, f1n = nl(pu0 * vu, pn0 * vn)
        k1u, k1n = qu0 * f1u, qn0 * f1n
        f2u, f2n = nl(pu1 * (vu + 0.5 * h * k1u), pn1 * (vn + 0.5 * h * k1n))
        k2u, k2n = qu1 * f2u, qn1 * f2n
        f3u, f3n = nl(pu1 * (vu + 0.5 * h * k2u), pn1 * (vn + 0.5 * h * k2n))
        k3u, k3n = qu1 * f3u, qn1 * f3n
        f4u, f4n = nl(pu2 * (vu + h * k3u), pn2 * (vn + h * k3n))
        k4u, k4n = qu2 * f4u, qn2 * f4n
        vu += (h / 6.0) * (k1u + 2.0 * (k2u + k3u) + k4u)
        vn += (h / 6.0) * (k1n + 2.0 * (k2n + k3n) + k4n)
        vn[..., radius] = 0.0

        if step - base >= recenter_every:
            pu, pn_, _, _ = phases((step - base) * h)
            vu *= pu
            vn *= pn_
            base = step

        if step % sample_every == 0 or step == n_steps:
            pu, pn_, _, _ = phases((step - base) * h)
            u = pu * vu
            n = pn_ * vn
            t_now = t0 + step * h
            guard = max(
                float(np.max(np.sum(np.abs(u) ** 2, axis=-1))),
                float(np.max(np.sum(np.abs(n) ** 2, axis=-1))),
            )
            if not np.isfinite(guard) or guard > blowup_threshold**2:
                t_last = times[-1]
                raise BlowUpError(t_last, math.sqrt(guard) if np.isfinite(guard) else math.inf)
            times.append(t_now)
            us.append(u.copy())
            ns.append(n.copy())

    return np.array(times), np.stack(us, axis=0), np.stack(ns, axis=0)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution path: arrays indexed (sample, mode)."""

    times: np.ndarray
    u: np.ndarray
    n_plus: np.ndarray
    radius: int
    params: ModelParams

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> ZakharovState:
        return ZakharovState(
            FourierField(self.u[i], self.radius),
            FourierField(self.n_plus[i], self.radius, is_mean_zero=True),
            t=float(self.times[i]),
        )

    def initial_state(self) -> ZakharovState:
        return self.state(0)

    def final_state(self) -> ZakharovState:
        return self.state(len(self.times) - 1)

    def states(self):
        return [self.state(i) for i in range(len(self.times))]


def integrate(
    state: ZakharovState,
    params: ModelParams,
    dt: float,
    t_end: float,
    scheme: str = "lawson_rk4",
    sample_dt: float | None = None,
    coupling: str = "full",
    nl_scale: float = 1.0,
    gamma: float = 0.0,
    forcing: FourierField | None = None,
    blowup_threshold: float = DEFAULT_BLOWUP_THRESHOLD,
) -> Trajectory:
    """Advance the state to t_end, sampling roughly every sample_dt.

    The only scheme is the exact-phase Lawson RK4; the argument exists so
    configs can state it explicitly.  Raises BlowUpError when any L^2 norm
    exceeds ``blowup_threshold`` (the conservative flow is globally well
    posed at this regularity, so the guard flags numerical failure).
    """
    if scheme != "lawson_rk4":
        raise ValueError(f"unknown scheme {scheme!r}")
    if coupling not in _COUPLINGS:
        raise ValueError(f"unknown coupling {coupling!r}")
    n_steps = max(1, round((t_end - state.t) / dt))
    h = (t_end - state.t) / n_steps
    stride = 1 if sample_dt is None else max(1, round(sample_dt / h))
    fc = None if forcing is None else forcing.coeffs
    times, us, ns = _integrate_arrays(
        state.u.coeffs,
        state.n_plus.coeffs,
        state.radius,
        params.alpha,
        state.t,
        dt,
        t_end,
        sample_every=stride,
        coupling=coupling,
        nl_scale=nl_scale,
        gamma=gamma,
        forcing=fc,
        blowup_threshold=blowup_threshold,
    )
    return Trajectory(times, us, ns, state.radius, params)


# ---------------------------------------------------------------------------
# Trajectory diagnostics
# ---------------------------------------------------------------------------

def trajectory_norms(traj: Trajectory, s_list) -> dict:
    """Per-sample mass, energy and requested H^s norms of u and n_plus."""
    out = {
        "t": traj.times.copy(),
        "mass": np.sum(np.abs(traj.u) ** 2, axis=-1),
    }
    e = _energy_complex(traj.u, traj.n_plus, traj.radius, traj.params.alpha)
    out["energy"] = np.real(e)
    for s in s_list:
        out[f"h{s:g}_u"] = sobolev_norms_batch(traj.u, s)
        out[f"h{s:g}_n"] = sobolev_norms_batch(traj.n_plus, s)
    return out
