"""Independent reference implementations used to check the package.

Everything here is written from the defining formulas with plain loops,
quadrature, or matrix exponentials, deliberately avoiding the package's
own factored algebra and vectorized code paths.  Slow and small-N only.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.special import gammaln


# --- ladder operators and displacement ---------------------------------


def ladder(n: int) -> np.ndarray:
    """Lowering operator b with b|k> = sqrt(k)|k-1>."""
    b = np.zeros((n, n))
    for k in range(1, n):
        b[k - 1, k] = math.sqrt(k)
    return b


def displacement_expm(lam: float, n_cut: int, pad: int = 40) -> np.ndarray:
    """<k| exp(lam (b^dag - b)) |l> via a padded matrix exponential."""
    n = n_cut + pad
    b = ladder(n)
    d = expm(lam * (b.T - b))
    return d[:n_cut, :n_cut]


def coherent_vector(beta: complex, n_cut: int) -> np.ndarray:
    """Fock expansion of |beta>, log-stabilized."""
    k = np.arange(n_cut)
    mag = np.abs(beta)
    if mag == 0.0:
        vec = np.zeros(n_cut, dtype=complex)
        vec[0] = 1.0
        return vec
    log_mag = -0.5 * mag**2 + k * math.log(mag) - 0.5 * gammaln(k + 1.0)
    phase = np.exp(1j * k * np.angle(beta))
    return np.exp(log_mag) * phase


def thermal_matrix(nbar: float, n_cut: int) -> np.ndarray:
    """Gibbs oscillator state with mean occupation nbar, renormalized."""
    if nbar == 0.0:
        rho = np.zeros((n_cut, n_cut))
        rho[0, 0] = 1.0
        return rho
    q = nbar / (1.0 + nbar)
    pops = (1.0 - q) * q ** np.arange(n_cut)
    pops /= pops.sum()
    return np.diag(pops)


# --- lead spectral functions --------------------------------------------


def fermi_ref(energy: float, mu: float, temperature: float) -> float:
    x = (energy - mu) / temperature
    if x > 700.0:
        return 0.0
    if x < -700.0:
        return 1.0
    return 1.0 / (math.exp(x) + 1.0)


def lorentz_ref(energy, gamma_rate, delta, center) -> float:
    return gamma_rate * delta**2 / ((energy - center) ** 2 + delta**2)


def rate_in_ref(energy, lead) -> float:
    return lorentz_ref(
        energy, lead.gamma_rate, lead.delta, lead.gamma_center
    ) * fermi_ref(energy, lead.chem_potential, lead.temperature)


def rate_out_ref(energy, lead) -> float:
    return lorentz_ref(
        energy, lead.gamma_rate, lead.delta, lead.gamma_center
    ) * (1.0 - fermi_ref(energy, lead.chem_potential, lead.temperature))


def rate_equation_current(mu_tilde: float, lead_l, lead_r) -> float:
    """Two-state dot current at zero coupling: g_L g_R / (g_L + g_R) (f_L - f_R)."""
    g_l = lorentz_ref(mu_tilde, lead_l.gamma_rate, lead_l.delta, lead_l.gamma_center)
    g_r = lorentz_ref(mu_tilde, lead_r.gamma_rate, lead_r.delta, lead_r.gamma_center)
    f_l = fermi_ref(mu_tilde, lead_l.chem_potential, lead_l.temperature)
    f_r = fermi_ref(mu_tilde, lead_r.chem_potential, lead_r.temperature)
    return g_l * g_r / (g_l + g_r) * (f_l - f_r)


def bath_correlation_zero_time(lead, kind: str) -> float:
    """C(0) by adaptive quadrature of the rate spectrum over frequency."""
    rate = rate_out_ref if kind == "out" else rate_in_ref

    def integrand(w):
        return rate(w, lead)

    center = lead.gamma_center
    span = 200.0 * lead.delta + 50.0 * lead.temperature
    total = 0.0
    for lo, hi in (
        (-math.inf, center - span),
        (center - span, center + span),
        (center + span, math.inf),
    ):
        part, _ = quad(integrand, lo, hi, limit=400)
        total += part
    return total / (2.0 * math.pi)


# --- rank-4 transition tensors, literal loops ----------------------------


def tensors_dense_ref(mu_tilde: float, omega: float, lead, disp: np.ndarray) -> dict:
    """The four rank-4 tensors written out element by element.

    Transition energies are mu_tilde - omega (k - l) for a hop that
    changes the phonon index from l to k; each tensor is the symmetrized
    half-sum of the two operator orderings.
    """
    n = disp.shape[0]

    def e_in(k, l):
        return mu_tilde - omega * (k - l)

    w_in = np.zeros((n, n))
    w_out = np.zeros((n, n))
    v_in = np.zeros((n, n))
    v_out = np.zeros((n, n))
    for a in range(n):
        for b in range(n):
            w_in[a, b] = sum(
                rate_in_ref(e_in(a, i), lead) * disp[i, a] * disp[i, b] for i in range(n)
            )
            w_out[a, b] = sum(
                rate_out_ref(e_in(i, a), lead) * disp[a, i] * disp[b, i] for i in range(n)
            )
            v_in[a, b] = disp[a, b] * rate_in_ref(e_in(b, a), lead)
            v_out[a, b] = disp[b, a] * rate_out_ref(e_in(a, b), lead)

    r00 = np.zeros((n, n, n, n))
    r01 = np.zeros((n, n, n, n))
    r11 = np.zeros((n, n, n, n))
    r10 = np.zeros((n, n, n, n))
    for j in range(n):
        for m in range(n):
            for k in range(n):
                for l in range(n):
                    r00[j, m, k, l] = 0.5 * (
                        w_in[k, j] * (m == l) + w_in[l, m] * (k == j)
                    )
                    r01[j, m, k, l] = 0.5 * (
                        v_in[j, k] * disp[m, l] + disp[j, k] * v_in[m, l]
                    )
                    r11[j, m, k, l] = 0.5 * (
                        w_out[k, j] * (m == l) + w_out[l, m] * (k == j)
                    )
                    r10[j, m, k, l] = 0.5 * (
                        v_out[j, k] * disp[l, m] + disp[k, j] * v_out[m, l]
                    )
    return {"r00": r00, "r01": r01, "r11": r11, "r10": r10}


def master_rhs_ref(
    omega: float,
    dense_by_lead: list[dict],
    rho0: np.ndarray,
    rho1: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise time derivative of both blocks."""
    n = rho0.shape[0]
    d0 = np.zeros_like(rho0)
    d1 = np.zeros_like(rho1)
    for j in range(n):
        for m in range(n):
            d0[j, m] += -1j * omega * (j - m) * rho0[j, m]
            d1[j, m] += -1j * omega * (j - m) * rho1[j, m]
            for dense in dense_by_lead:
                for k in range(n):
                    for l in range(n):
                        d0[j, m] += (
                            -dense["r00"][j, m, k, l] * rho0[k, l]
                            + dense["r10"][j, m, k, l] * rho1[k, l]
                        )
                        d1[j, m] += (
                            -dense["r11"][j, m, k, l] * rho1[k, l]
                            + dense["r01"][j, m, k, l] * rho0[k, l]
                        )
    return d0, d1


def liouvillian_matrix_ref(omega: float, dense_by_lead: list[dict], n: int) -> np.ndarray:
    """Full generator matrix assembled column by column from the dense tensors."""
    jm = np.arange(n)
    phase = -1j * omega * (jm[:, None] - jm[None, :])

    def action(rho0, rho1):
        d0 = phase * rho0
        d1 = phase * rho1
        for dense in dense_by_lead:
            d0 -= np.einsum("jmkl,kl->jm", dense["r00"], rho0)
            d0 += np.einsum("jmkl,kl->jm", dense["r10"], rho1)
            d1 -= np.einsum("jmkl,kl->jm", dense["r11"], rho1)
            d1 += np.einsum("jmkl,kl->jm", dense["r01"], rho0)
        return np.concatenate([d0.ravel(), d1.ravel()])

    dim = 2 * n * n
    matrix = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        basis = np.zeros(dim, dtype=complex)
        basis[col] = 1.0
        matrix[:, col] = action(
            basis[: n * n].reshape(n, n), basis[n * n :].reshape(n, n)
        )
    return matrix


def steady_state_expm(matrix: np.ndarray, n_cut: int, t_step: float = 50.0) -> tuple[np.ndarray, np.ndarray]:
    """Long-time propagation of a maximally mixed start until stationary."""
    dim = 2 * n_cut * n_cut
    rho0 = np.eye(n_cut, dtype=complex) / (2 * n_cut)
    rho1 = np.eye(n_cut, dtype=complex) / (2 * n_cut)
    vec = np.concatenate([rho0.ravel(), rho1.ravel()])
    prop = expm(matrix * t_step)
    for _ in range(60):
        vec = prop @ vec
        if np.abs(matrix @ vec).max() < 1e-12:
            break
    return vec[: dim // 2].reshape(n_cut, n_cut), vec[dim // 2 :].reshape(n_cut, n_cut)


# --- phase space ----------------------------------------------------------


def husimi_fock(m: int, alpha: complex) -> float:
    r2 = abs(alpha) ** 2
    return math.exp(-r2) * r2**m / (math.pi * math.factorial(m))


def husimi_coherent(beta: complex, alpha: complex) -> float:
    return math.exp(-abs(alpha - beta) ** 2) / math.pi


def husimi_thermal(nbar: float, alpha: complex) -> float:
    return math.exp(-abs(alpha) ** 2 / (1.0 + nbar)) / (math.pi * (1.0 + nbar))


def rearrangement_gap_ref(radii, values, dr: float) -> float:
    """Radius-weighted distance to the sorted-descending profile, by loop."""
    ordered = sorted(values, reverse=True)
    total = 0.0
    for r, q, q_sorted in zip(radii, values, ordered):
        total += r * (q - q_sorted) * dr
    return total


def passive_energy_brute(rho: np.ndarray, omega: float) -> float:
    """Minimum energy over all population permutations (factorial cost)."""
    from itertools import permutations

    pops = np.linalg.eigvalsh(rho)
    levels = omega * np.arange(rho.shape[0])
    return min(float(np.dot(perm, levels)) for perm in permutations(pops))
