"""Reductions between raw physical data and the evolved first-order form.

The solver evolves the pair (u, n_plus) where ``n_plus = n + i d^{-1} n_t``
and ``d = (-d_xx)^{1/2}``.  This requires the wave data to be mean-zero,
which the gauge transform below arranges; the conjugate half-wave
``n_minus`` is never stored, it is always the conjugate reflection of
``n_plus`` (exactly true for real n, n_t).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import FourierField, _check_radius

__all__ = [
    "PhysicalTriple",
    "GaugeRecord",
    "gauge_normalize",
    "ungauge_u",
    "ungauge_n",
    "apply_d",
    "apply_d_inverse",
    "to_plus_minus",
    "from_plus_minus",
]


@dataclass(frozen=True)
class PhysicalTriple:
    """Raw initial data (u0, n0, n1) before any reduction.

    n0 and n1 are coefficient vectors of real-valued functions and must
    satisfy conjugate symmetry; all three share one truncation radius.
    """

    u0: FourierField
    n0: FourierField
    n1: FourierField

    def __post_init__(self):
        _check_radius(self.u0, self.n0)
        _check_radius(self.u0, self.n1)
        for name in ("n0", "n1"):
            f: FourierField = getattr(self, name)
            if not f.is_real_valued(tol=1e-10):
                raise ValueError(f"{name} is not conjugate-symmetric (real-valued)")

    @property
    def radius(self) -> int:
        return self.u0.radius


@dataclass(frozen=True)
class GaugeRecord:
    """Means removed from the wave data: A = mean(n0), B = mean(n1)."""

    A: float
    B: float


def gauge_normalize(p: PhysicalTriple) -> tuple[PhysicalTriple, GaugeRecord]:
    """Zero the k=0 coefficients of n0, n1 and record the removed means.

    The gauged variables are n - A - Bt and exp(i(B t^2/2 + A t)) u; they
    satisfy the same system with mean-zero wave data.  u0 is unchanged at
    t=0 since the phase factor is 1 there.
    """
    r = p.radius
    A = float(p.n0.coeffs[r].real)
    B = float(p.n1.coeffs[r].real)
    n0c = p.n0.coeffs.copy()
    n1c = p.n1.coeffs.copy()
    n0c[r] = 0.0
    n1c[r] = 0.0
    gauged = PhysicalTriple(
        p.u0,
        FourierField(n0c, r, is_mean_zero=True),
        FourierField(n1c, r, is_mean_zero=True),
    )
    return gauged, GaugeRecord(A=A, B=B)


def ungauge_u(u: FourierField, t: float, record: GaugeRecord) -> FourierField:
    """Map the gauged Schrodinger part back to the original variables.

    The forward gauge multiplies u by exp(i(B t^2/2 + A t)), so the
    inverse applies the conjugate phase.
    """
    phase = np.exp(-1j * (record.B * t * t / 2.0 + record.A * t))
    return u.scaled(phase)


def ungauge_n(n: FourierField, t: float, record: GaugeRecord) -> FourierField:
    """Restore the removed mean drift: n -> n + A + B t."""
    c = n.coeffs.copy()
    c[n.radius] += record.A + record.B * t
    return FourierField(c, n.radius)


def apply_d(f: FourierField) -> FourierField:
    """(d f)_k = |k| f_k, the half-wave operator (-d_xx)^{1/2}."""
    k = np.abs(f.k).astype(np.float64)
    return FourierField(k * f.coeffs, f.radius, is_mean_zero=True)


def apply_d_inverse(f: FourierField) -> FourierField:
    """(d^{-1} f)_k = f_k / |k|; defined only for mean-zero input."""
    r = f.radius
    if f.coeffs[r] != 0:
        raise ValueError("d^{-1} requires a mean-zero field (nonzero k=0 coefficient)")
    k = np.abs(f.k).astype(np.float64)
    out = np.zeros_like(f.coeffs)
    nz = k != 0
    out[nz] = f.coeffs[nz] / k[nz]
    return FourierField(out, r, is_mean_zero=True)


def to_plus_minus(p: PhysicalTriple):
    """Build n_plus = n0 + i d^{-1} n1 from mean-zero wave data.

    Returns (u, n_plus); n_minus is recovered as the conjugate reflection
    of n_plus whenever needed.
    """
    if not (p.n0.is_mean_zero and p.n1.is_mean_zero):
        raise ValueError("wave data must be gauge-normalized (mean-zero) first")
    nu = apply_d_inverse(p.n1)
    n_plus = FourierField(p.n0.coeffs + 1j * nu.coeffs, p.radius, is_mean_zero=True)
    return p.u0, n_plus


def from_plus_minus(u: FourierField, n_plus: FourierField) -> PhysicalTriple:
    """Invert to_plus_minus: n = (n_+ + n_-)/2, n_t = d (n_+ - n_-)/(2i)."""
    n_minus = n_plus.conj_reflect()
    n0 = FourierField(
        0.5 * (n_plus.coeffs + n_minus.coeffs), n_plus.radius, is_mean_zero=True
    )
    diff = FourierField(
        (n_plus.coeffs - n_minus.coeffs) / (2j), n_plus.radius, is_mean_zero=True
    )
    n1 = apply_d(diff)
    return PhysicalTriple(u, n0, n1)
