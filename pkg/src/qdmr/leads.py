"""Reservoir statistics, energy-dependent tunneling rates, and the
memory-time diagnostic for the leads.

Directional rates follow the convention used throughout: the 0->1 rate
is the Lorentzian window times the Fermi occupation (an electron enters
the dot from the lead), the 1->0 rate uses the hole factor 1 - f.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import LeadParams


def fermi(energy, mu: float, temperature: float):
    """Fermi-Dirac occupation 1/(exp((E-mu)/T) + 1), overflow-safe.

    Vectorized over ``energy``; exact limits 0 and 1 are returned once
    the exponent magnitude exceeds 700.
    """
    x = (np.asarray(energy, dtype=float) - mu) / temperature
    out = np.empty_like(x)
    big = x > 700.0
    small = x < -700.0
    mid = ~(big | small)
    out[big] = 0.0
    out[small] = 1.0
    out[mid] = 1.0 / (np.exp(x[mid]) + 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def tunneling_rate(energy, lead: LeadParams):
    """Lorentzian window: gamma_rate * delta^2 / ((E - gamma_center)^2 + delta^2)."""
    e = np.asarray(energy, dtype=float)
    d2 = lead.delta**2
    out = lead.gamma_rate * d2 / ((e - lead.gamma_center) ** 2 + d2)
    if out.ndim == 0:
        return float(out)
    return out


def rate_in(energy, lead: LeadParams):
    """0 -> 1 transition rate: window times Fermi occupation."""
    return tunneling_rate(energy, lead) * fermi(energy, lead.chem_potential, lead.temperature)


def rate_out(energy, lead: LeadParams):
    """1 -> 0 transition rate: window times hole occupation 1 - f."""
    return tunneling_rate(energy, lead) * (1.0 - fermi(energy, lead.chem_potential, lead.temperature))


@dataclass(frozen=True)
class CorrelationTrace:
    """Lead bath-correlation functions on a time grid (times in ns).

    ``c_out`` is the hole-sector correlator (Fourier transform of
    window * (1-f) with kernel e^{-i w s}), ``c_in`` the particle-sector
    one (window * f with kernel e^{+i w s}).  ``decay_time`` is the
    first time after which both envelopes stay below
    ``threshold * |C(0)|``; ``converged`` is False when that never
    happens inside the grid.
    """

    label: str
    times: np.ndarray
    c_out: np.ndarray
    c_in: np.ndarray
    threshold: float
    decay_time: float
    converged: bool


def bath_correlation(
    lead: LeadParams,
    times: np.ndarray | None = None,
    *,
    threshold: float = 0.01,
    min_points: int = 2**14,
) -> CorrelationTrace:
    """Evaluate both bath correlators and estimate the memory time.

    The Fourier integrals are taken over a frequency grid wide enough
    that the tunneling window has decayed below 1e-6 of its peak at the
    edges, with spacing fine enough to resolve both the window width and
    the thermal smearing.  Times are in ns (the reciprocal of the
    angular-GHz energy unit).
    """
    if times is None:
        # memory time is set by the window width and temperature; 2 ns
        # covers the reference parameter scale with a wide margin
        t_scale = max(1.0 / lead.delta, 1.0 / lead.temperature)
        times = np.linspace(0.0, max(2.0, 20.0 * t_scale), 801)
    times = np.asarray(times, dtype=float)

    # half-width: design floor |gamma| + 50*max(delta, T), then pushed out
    # until the Lorentzian edge value is below 1e-6 * gamma_rate
    half = abs(lead.gamma_center) + max(
        50.0 * max(lead.delta, lead.temperature),
        lead.delta * 1.0e3,
    )
    spacing = min(lead.delta, lead.temperature) / 16.0
    n = max(min_points, int(np.ceil(2.0 * half / spacing)))
    n = 1 << int(np.ceil(np.log2(n)))
    w = np.linspace(-half, half, n)
    dw = w[1] - w[0]

    g_out = rate_out(w, lead)
    g_in = rate_in(w, lead)
    weights = np.full(n, dw)
    weights[0] *= 0.5
    weights[-1] *= 0.5

    # chunk the frequency axis: the full times x freq phase matrix would
    # not fit in memory at the finest grids
    c_out = np.zeros(times.size, dtype=complex)
    c_in = np.zeros(times.size, dtype=complex)
    chunk = 1 << 13
    for start in range(0, n, chunk):
        sl = slice(start, start + chunk)
        phase = np.exp(-1j * np.outer(times, w[sl]))
        c_out += phase @ (weights[sl] * g_out[sl])
        c_in += np.conj(phase) @ (weights[sl] * g_in[sl])
    c_out /= 2.0 * np.pi
    c_in /= 2.0 * np.pi

    env = np.maximum(np.abs(c_out) / abs(c_out[0]), np.abs(c_in) / abs(c_in[0]))
    above = np.nonzero(env >= threshold)[0]
    if above.size == 0:
        decay_time, converged = float(times[0]), True
    elif above[-1] == times.size - 1:
        decay_time, converged = float("nan"), False
    else:
        decay_time, converged = float(times[above[-1] + 1]), True

    return CorrelationTrace(
        label=lead.label,
        times=times,
        c_out=c_out,
        c_in=c_in,
        threshold=threshold,
        decay_time=decay_time,
        converged=converged,
    )
