"""Plane-plane geometry: Fresnel reflection amplitudes, translation
factors through a possibly dissipative medium, and the interaction energy
per unit area.

In the plane-wave basis every channel (frequency, transverse momentum q,
polarization) decouples, so the round-trip operator is a scalar per
channel and the energy is a double integral over frequency and q.

Two evaluation paths are provided. The production path integrates along
the imaginary frequency axis, where the integrand is real, negative and
smooth. The real-frequency path evaluates the same per-channel expression
Im log(1 - r1 r2 e^{2 i kz L}) literally; it iterates with q outermost
because at fixed q the frequency integrand decays like 1/w^4, while at
fixed frequency the q-integral picks up a non-decaying grazing-incidence
shell. Both paths agree channel by channel, which is checked in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import C_LIGHT, HBAR, EnergyResult, QuadratureSpec, gauss_legendre_01
from .errors import DomainError, NotConverged, OscillatoryFailure
from .materials import (
    MaterialModel,
    Medium,
    PerfectMirror,
    VACUUM,
    eps_imag_axis,
    eps_real_axis,
    is_dissipative,
)

POLARIZATIONS = ("TE", "TM")


@dataclass(frozen=True)
class PlaneChannel:
    """One plane-wave channel: transverse momentum, polarization, and a
    frequency that lives either on the imaginary axis (xi > 0) or on the
    real axis (omega > 0)."""

    q: float
    pol: str
    xi: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if self.q < 0:
            raise DomainError("transverse momentum must be >= 0")
        if self.pol not in POLARIZATIONS:
            raise DomainError(f"polarization must be one of {POLARIZATIONS}")
        if (self.xi > 0) == (self.omega > 0):
            raise DomainError("set exactly one of xi (imaginary axis) or omega")


@dataclass(frozen=True)
class PlaneSystem:
    """Two half-spaces facing each other across a gap of width L."""

    mat1: MaterialModel
    mat2: MaterialModel
    medium: Medium = VACUUM
    L: float = 1e-6

    def __post_init__(self):
        if self.L <= 0:
            raise DomainError("separation must be > 0")


def _sqrt_im_pos(z):
    """Principal square root folded onto Im >= 0 (decay, not gain)."""
    s = np.sqrt(np.asarray(z, dtype=complex))
    return np.where(s.imag < 0, -s, s)


def kappa_imag_axis(medium, xi, q):
    """Transverse decay constant kappa = sqrt(eps(i xi) xi^2/c^2 + q^2)."""
    return np.sqrt(eps_imag_axis(medium, xi) * (xi / C_LIGHT) ** 2 + np.asarray(q) ** 2)


def fresnel_r(mat, medium, ch: PlaneChannel):
    """Fresnel reflection amplitude of a half-space seen from the medium.

    Imaginary axis: with kappa_m/p = sqrt(eps_{m/p} xi^2/c^2 + q^2),

        r_TE = (kappa_m - kappa_p) / (kappa_m + kappa_p)
        r_TM = (eps_p kappa_m - eps_m kappa_p) / (eps_p kappa_m + eps_m kappa_p)

    and the result is real. Real axis: the analytic continuation with
    kz = sqrt(eps w^2/c^2 - q^2), Im kz >= 0. A perfect mirror gives
    exactly (-1, +1) for (TE, TM) on either axis.
    """
    if isinstance(medium, PerfectMirror):
        raise DomainError("the medium cannot be a perfect mirror")
    if isinstance(mat, PerfectMirror):
        return -1.0 if ch.pol == "TE" else 1.0
    if ch.xi > 0:
        em = eps_imag_axis(medium, ch.xi)
        ep = eps_imag_axis(mat, ch.xi)
        km = kappa_imag_axis(medium, ch.xi, ch.q)
        kp = np.sqrt(ep * (ch.xi / C_LIGHT) ** 2 + ch.q**2)
        if ch.pol == "TE":
            return float((km - kp) / (km + kp))
        return float((ep * km - em * kp) / (ep * km + em * kp))
    em = eps_real_axis(medium, ch.omega)
    ep = eps_real_axis(mat, ch.omega)
    km = complex(_sqrt_im_pos(em * (ch.omega / C_LIGHT) ** 2 - ch.q**2))
    kp = complex(_sqrt_im_pos(ep * (ch.omega / C_LIGHT) ** 2 - ch.q**2))
    if ch.pol == "TE":
        return (km - kp) / (km + kp)
    return (ep * km - em * kp) / (ep * km + em * kp)


def translation_factor(medium, ch: PlaneChannel, L):
    """One-way propagation factor across the gap.

    exp(-kappa_m L) on the imaginary axis, exp(i kz L) with Im kz >= 0 on
    the real axis; the modulus never exceeds one (passive propagation).
    """
    if L < 0:
        raise DomainError("separation must be >= 0")
    if ch.xi > 0:
        return float(np.exp(-kappa_imag_axis(medium, ch.xi, ch.q) * L))
    em = eps_real_axis(medium, ch.omega)
    kz = complex(_sqrt_im_pos(em * (ch.omega / C_LIGHT) ** 2 - ch.q**2))
    return complex(np.exp(1j * kz * L))


def ideal_energy_per_area(L):
    """Closed form for two perfect mirrors in vacuum: -pi^2 hbar c / (720 L^3)."""
    return -np.pi**2 * HBAR * C_LIGHT / (720.0 * np.asarray(L, dtype=float) ** 3)


def _fresnel_imag_grid(mat, em, km, xi_col, q_sq):
    """Vectorized (n_xi, n_q) imaginary-axis Fresnel amplitudes."""
    if isinstance(mat, PerfectMirror):
        return -1.0, 1.0
    ep = np.asarray(eps_imag_axis(mat, xi_col[:, 0]))[:, None]
    kp = np.sqrt(ep * (xi_col / C_LIGHT) ** 2 + q_sq)
    rte = (km - kp) / (km + kp)
    rtm = (ep * km - em * kp) / (ep * km + em * kp)
    return rte, rtm


def lifshitz_integrand(sys: PlaneSystem, xi, q):
    """Sum over polarizations of log(1 - r1 r2 e^{-2 kappa_m L}) on the
    (xi, q) grid; broadcast as (n_xi, n_q). Non-positive for identical
    passive mirrors."""
    xi_col = np.atleast_1d(np.asarray(xi, dtype=float))[:, None]
    q_row = np.atleast_1d(np.asarray(q, dtype=float))[None, :]
    q_sq = q_row**2
    em = np.asarray(eps_imag_axis(sys.medium, xi_col[:, 0]))[:, None]
    km = np.sqrt(em * (xi_col / C_LIGHT) ** 2 + q_sq)
    r1te, r1tm = _fresnel_imag_grid(sys.mat1, em, km, xi_col, q_sq)
    r2te, r2tm = _fresnel_imag_grid(sys.mat2, em, km, xi_col, q_sq)
    damp = np.exp(-2.0 * km * sys.L)
    return np.log1p(-r1te * r2te * damp) + np.log1p(-r1tm * r2tm * damp)


def energy_per_area(sys: PlaneSystem, quad: QuadratureSpec = QuadratureSpec()):
    """Interaction energy per unit area, imaginary-axis evaluation.

    E/A = hbar/(4 pi^2) int_0^inf dxi int_0^inf q dq
          sum_pol log(1 - r1 r2 e^{-2 kappa_m L})

    Both integrals use the substitution x = s u/(1-u) with Gauss-Legendre
    nodes in u; the orders double together until the relative change is
    below ``quad.tol``.

    Returns
    -------
    EnergyResult
        value in J/m^2; error_estimate is the last doubling change.

    Raises
    ------
    NotConverged
        With the best EnergyResult attached, if the doubling budget is
        exhausted first.
    """
    warnings = []
    if sys.L < 1e-9:
        warnings.append("separation below 1 nm: continuum dielectric models are suspect")
    s_xi = C_LIGHT / sys.L
    s_q = 1.0 / sys.L
    prev = None
    value = None
    err = np.inf
    order = quad.base_order
    orders = []
    for _ in range(quad.max_doublings + 1):
        u, wu = gauss_legendre_01(order)
        xi = s_xi * u / (1.0 - u)
        jxi = s_xi * wu / (1.0 - u) ** 2
        q = s_q * u / (1.0 - u)
        jq = s_q * wu / (1.0 - u) ** 2
        grid = lifshitz_integrand(sys, xi, q)
        inner = grid @ (jq * q)
        value = HBAR / (4 * np.pi**2) * float(jxi @ inner)
        orders.append(order)
        if prev is not None:
            err = abs(value - prev)
            if err <= quad.tol * max(abs(value), 1e-300):
                return EnergyResult(
                    value=value,
                    error_estimate=err,
                    metadata={"orders": orders, "axis": "imaginary", "warnings": warnings},
                )
        prev = value
        order *= 2
    best = EnergyResult(
        value=value,
        error_estimate=err,
        metadata={
            "orders": orders,
            "axis": "imaginary",
            "warnings": warnings + ["not converged"],
        },
    )
    raise NotConverged(
        f"plane energy quadrature not converged (last change {err:.3e})", result=best
    )


def _real_axis_channel_values(sys: PlaneSystem, q, pol, omega):
    """Im log(1 - r1 r2 e^{2 i kz L}) for an array of real frequencies at
    fixed transverse momentum."""
    w = np.asarray(omega, dtype=float)
    em = np.asarray(eps_real_axis(sys.medium, w), dtype=complex)
    kzm = _sqrt_im_pos(em * (w / C_LIGHT) ** 2 - q**2)
    rs = []
    for mat in (sys.mat1, sys.mat2):
        if isinstance(mat, PerfectMirror):
            rs.append(np.full_like(w, -1.0 if pol == "TE" else 1.0, dtype=complex))
            continue
        ep = np.asarray(eps_real_axis(mat, w), dtype=complex)
        kzp = _sqrt_im_pos(ep * (w / C_LIGHT) ** 2 - q**2)
        if pol == "TE":
            rs.append((kzm - kzp) / (kzm + kzp))
        else:
            rs.append((ep * kzm - em * kzp) / (ep * kzm + em * kzp))
    return np.log(1.0 - rs[0] * rs[1] * np.exp(2j * kzm * sys.L)).imag


def _adaptive_panels(f, edges, rel_tol, abs_floor, max_rounds=40):
    """Integrate f over [edges[0], edges[-1]] with per-panel Gauss-Legendre
    of orders 8 and 16; panels whose order difference dominates the error
    budget are bisected. Returns (value, error_estimate).

    ``f`` must accept an ndarray of abscissae.
    """
    x8, w8 = gauss_legendre_01(8)
    x16, w16 = gauss_legendre_01(16)

    def panel_eval(a_arr, b_arr):
        width = b_arr - a_arr
        pts = np.concatenate(
            [a_arr[:, None] + width[:, None] * x8[None, :],
             a_arr[:, None] + width[:, None] * x16[None, :]],
            axis=1,
        )
        vals = f(pts.ravel()).reshape(len(a_arr), 24)
        coarse = (vals[:, :8] @ w8) * width
        fine = (vals[:, 8:] @ w16) * width
        return fine, np.abs(fine - coarse)

    a = np.asarray(edges[:-1], dtype=float)
    b = np.asarray(edges[1:], dtype=float)
    vals, errs = panel_eval(a, b)
    for _ in range(max_rounds):
        total = float(np.sum(vals))
        total_err = float(np.sum(errs))
        budget = max(rel_tol * abs(total), abs_floor)
        if total_err <= budget:
            return total, total_err
        worst = errs > budget / max(len(errs), 1)
        if not np.any(worst):
            worst = errs >= np.max(errs)
        mid = (a[worst] + b[worst]) / 2
        new_a = np.concatenate([a[~worst], a[worst], mid])
        new_b = np.concatenate([b[~worst], mid, b[worst]])
        keep_vals, keep_errs = vals[~worst], errs[~worst]
        nv, ne = panel_eval(
            np.concatenate([a[worst], mid]), np.concatenate([mid, b[worst]])
        )
        a, b = new_a, new_b
        vals = np.concatenate([keep_vals, nv])
        errs = np.concatenate([keep_errs, ne])
    raise OscillatoryFailure(
        f"adaptive frequency integration exceeded {max_rounds} refinement rounds"
    )


def energy_per_area_real_axis(
    sys: PlaneSystem, omega_max, quad: QuadratureSpec = QuadratureSpec(base_order=48)
):
    """Interaction energy per unit area evaluated on the real frequency axis:

    E/A = hbar/(4 pi^2) sum_pol int_0^inf q dq int_0^omega_max dw
          Im log(1 - r1 r2 e^{2 i kz L})

    Requires strictly dissipative mirror materials (positive damping), so
    that |r1 r2 e^{2 i kz L}| < 1 and the principal branch is safe. The
    frequency integral at fixed q decays like 1/w^4; the tail beyond
    ``omega_max`` is estimated from that envelope and folded into the
    error estimate.

    Raises
    ------
    DomainError
        If either mirror material has no damping.
    OscillatoryFailure
        If the per-channel adaptive refinement cannot resolve the
        oscillatory integrand.
    NotConverged
        If the outer q refinement stalls above ``quad.tol`` against the
        imaginary-axis scale of the problem.
    """
    for mat in (sys.mat1, sys.mat2):
        if not is_dissipative(mat):
            raise DomainError(
                "real-axis evaluation requires strictly dissipative mirrors"
            )
    if omega_max <= 0:
        raise DomainError("omega_max must be > 0")
    L = sys.L
    # Channels beyond q_max contribute at the e^{-2 q L} level; their exact
    # real-axis values are exponentially small results of O(1) oscillatory
    # cancellation, so they are cut off and bounded instead of evaluated.
    q_max = 8.0 / L
    # panel edges: half-period of e^{2 i w L / c}
    n_panels = max(int(np.ceil(omega_max / (np.pi * C_LIGHT / (2 * L)))), 8)

    def inner(q):
        edges = np.linspace(0.0, omega_max, n_panels + 1)
        edges[0] = omega_max * 1e-12
        wq = C_LIGHT * q
        if 0 < wq < omega_max:  # branch point of kz at w = c q
            edges = np.unique(np.concatenate([edges, [wq]]))
        total = 0.0
        err = 0.0
        for pol in POLARIZATIONS:
            v, e = _adaptive_panels(
                lambda w, p=pol: _real_axis_channel_values(sys, q, p, w),
                edges,
                rel_tol=1e-6,
                abs_floor=1e-9 * omega_max / n_panels,
            )
            total += v
            err += e
        # tail bound: envelope |r1 r2| ~ C / w^4 beyond omega_max
        probe = _real_axis_channel_values(sys, q, "TM", np.array([omega_max]))
        tail = abs(float(probe[0])) * omega_max / 3.0
        return total, err + tail

    prev = None
    value = None
    err_total = np.inf
    order = quad.base_order
    orders = []
    tol = max(quad.tol, 1e-4)
    q_tail = 0.0
    for _ in range(quad.max_doublings + 1):
        v, wv = gauss_legendre_01(order)
        q = q_max * v
        jq = q_max * wv
        inner_vals = np.empty(order)
        inner_errs = np.empty(order)
        for i, qi in enumerate(q):
            inner_vals[i], inner_errs[i] = inner(qi)
        value = HBAR / (4 * np.pi**2) * float(np.sum(jq * q * inner_vals))
        # cut-off remainder, from the exponential model inner ~ e^{-2qL}
        edge, _ = inner(q_max)
        q_tail = (
            HBAR / (4 * np.pi**2) * abs(edge) * (q_max / (2 * L) + 1 / (4 * L**2))
        )
        orders.append(order)
        if prev is not None:
            err_total = abs(value - prev)
            if err_total <= tol * max(abs(value), 1e-300):
                inner_err = HBAR / (4 * np.pi**2) * float(np.sum(jq * q * inner_errs))
                return EnergyResult(
                    value=value,
                    error_estimate=err_total + inner_err + q_tail,
                    metadata={"orders": orders, "axis": "real", "omega_max": omega_max},
                )
        prev = value
        order *= 2
    best = EnergyResult(
        value=value,
        error_estimate=err_total + q_tail,
        metadata={"orders": orders, "axis": "real", "warnings": ["not converged"]},
    )
    raise NotConverged(
        f"real-axis energy not converged (last change {err_total:.3e})", result=best
    )
