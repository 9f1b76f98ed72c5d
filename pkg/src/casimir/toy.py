"""Single-channel lossy Fabry-Perot toy: two lossy mirrors joined by a
phase-accumulating translation, all embedded in unitary scattering
matrices through dilation.

The toy exercises the equivalence of the two energy bookkeepings for a
frequency band [a, b]: integrating the scattering phase shift, and
integrating the density-of-states change weighted by the mode energy.
The two are related by an integration by parts, so the phase-shift route
carries the boundary term (hbar/2 pi) [w dphi]_a^b; with it included the
routes agree to quadrature accuracy. The distance-dependent phase is
referenced against the bare translation so that removing the mirrors
gives exactly zero.
"""

from __future__ import annotations

import numpy as np

from . import blockmat
from .core import C_LIGHT, HBAR, gauss_legendre_01
from .errors import BranchJump, NotContraction
from .scattering import (
    ScatteringMatrix,
    matched_phase_increment,
    promote_internal,
    star,
    translation_scatterer,
)


def lossy_mirror(r, t, facing):
    """Unitary scatterer for a mirror with scalar reflection r and
    transmission amplitude t, in the beamsplitter phase convention
    [[r, it], [it, r]] (passive iff r^2 + t^2 <= 1; strict means loss).

    ``facing`` selects which physical port is the internal channel:
    'right' for the left mirror of a cavity, 'left' for the right one.
    The two loss ports from the dilation are external.
    """
    k = np.array([[r, 1j * t], [1j * t, r]], dtype=complex)
    try:
        u = blockmat.unitary_dilation(k)
    except NotContraction as exc:
        raise NotContraction(f"mirror (r={r}, t={t}) is not passive") from exc
    internal = [1] if facing == "right" else [0]
    return ScatteringMatrix.from_full(u, internal)


def cavity(omega, L, r, t, mirrors=None):
    """Assembled unitary scattering matrix of the lossy cavity at a real
    frequency, plus the bare translation reference.

    ``mirrors`` allows reusing the (frequency-independent) mirror pair
    across calls.
    """
    if mirrors is None:
        mirrors = (lossy_mirror(r, t, "right"), lossy_mirror(r, t, "left"))
    m1, m2 = mirrors
    sl = translation_scatterer(np.array([[np.exp(1j * omega * L / C_LIGHT)]]))
    mid = promote_internal(star(sl, m2), 1)
    full = star(m1, mid)
    return full, sl


def phase_profile(samples):
    """Branch-continuous phase shifts for a sequence of unitary matrices.

    The first value is the principal phase shift; subsequent values follow
    by nearest-branch matching of the eigenphases between neighbours.
    """
    out = np.empty(len(samples))
    args = np.angle(np.linalg.eigvals(samples[0].assemble()))
    out[0] = 0.5 * float(np.sum(args))
    for i in range(1, len(samples)):
        inc, worst = matched_phase_increment(samples[i - 1], samples[i])
        if worst >= np.pi / 2:
            raise BranchJump("grid too coarse for branch-continuous phases")
        out[i] = out[i - 1] + inc
    return out


def _dos_rel(omega, h, L, r, t, mirrors):
    """Richardson-extrapolated density-of-states change of the cavity
    relative to the bare translation."""

    def delta(step):
        pair = [cavity(w, L, r, t, mirrors) for w in (omega - step, omega + step)]
        inc, worst = matched_phase_increment(pair[0][0], pair[1][0])
        inc_ref, worst_ref = matched_phase_increment(pair[0][1], pair[1][1])
        if max(worst, worst_ref) >= np.pi / 2:
            raise BranchJump("dos step too large")
        return (inc - inc_ref) / (2 * step) / np.pi

    d1 = delta(h)
    d2 = delta(h / 2)
    return (4.0 * d2 - d1) / 3.0


def band_energies(L, r, t, band, panels=None, order=16):
    """Band-limited vacuum-energy change of the toy cavity, two ways.

    Returns a dict with

    - ``phase_route``: -(hbar/2 pi) int dphi dw + (hbar/2 pi) [w dphi]_a^b
    - ``dos_route``: int (hbar w / 2) deta dw
    - ``rows``: per-node (omega, dphi, deta)

    dphi is the branch-continuous phase shift of the cavity relative to
    the bare translation; deta its frequency derivative over pi. The band
    is integrated by composite Gauss-Legendre panels sized to resolve the
    cavity resonances (width ~ (1 - r^2) c / L).
    """
    a, b = band
    if not 0 < a < b:
        raise ValueError("band must satisfy 0 < a < b")
    if panels is None:
        resonance_width = max(1.0 - r * r, 0.02) * C_LIGHT / L
        panels = int(np.clip(np.ceil(3 * (b - a) / resonance_width), 8, 150))
    u, wq = gauss_legendre_01(order)
    edges = np.linspace(a, b, panels + 1)
    omegas = np.concatenate(
        [[a]] + [e0 + (e1 - e0) * u for e0, e1 in zip(edges[:-1], edges[1:])] + [[b]]
    )
    weights = np.concatenate(
        [[0.0]] + [(e1 - e0) * wq for e0, e1 in zip(edges[:-1], edges[1:])] + [[0.0]]
    )

    mirrors = (lossy_mirror(r, t, "right"), lossy_mirror(r, t, "left"))
    full_samples = []
    sl_samples = []
    for w in omegas:
        full, sl = cavity(w, L, r, t, mirrors)
        full_samples.append(full)
        sl_samples.append(sl)
    dphi = phase_profile(full_samples) - phase_profile(sl_samples)
    # the relative phase carries a constant offset (branch anchor plus the
    # frequency-independent mirror phases); both routes are invariant to it

    h = (b - a) * 1e-5
    deta = np.array([_dos_rel(w, h, L, r, t, mirrors) for w in omegas])

    integral_dphi = float(np.sum(weights * dphi))
    boundary = b * dphi[-1] - a * dphi[0]
    phase_route = HBAR / (2 * np.pi) * (boundary - integral_dphi)
    dos_route = float(np.sum(weights * omegas * deta)) * HBAR / 2.0
    return {
        "phase_route": phase_route,
        "dos_route": dos_route,
        "rows": list(zip(omegas.tolist(), dphi.tolist(), deta.tolist())),
    }
