"""Channel-partitioned scattering matrices and their composition.

A scatterer couples *internal* channels (the ones linking it to the next
scatterer in a chain) to *external* channels (everything else, including
the ports that carry dissipated photons). Composition of two scatterers
sharing their internal channels is the star product; it is not a plain
matrix product because waves bounce back and forth along the internal
channels an arbitrary number of times.

Channel ordering convention, used everywhere: internal channels first,
then external channels. For a star product the external channels of the
result are ordered [left factor's externals..., right factor's externals...];
for a translation scatterer the externals are ordered [far-side channels,
environment ports]. This fixed ordering is what makes the determinant
identities below exact including their signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import blockmat
from .blockmat import UNITARITY_TOL, as_complex_matrix, logdet
from .errors import BranchJump, ChannelMismatch, ResonantSingular


@dataclass(frozen=True)
class ScatteringMatrix:
    """Block form [[ii, ie], [ei, ee]] of a scatterer with n_int internal
    and n_ext external channels."""

    ii: np.ndarray
    ie: np.ndarray
    ei: np.ndarray
    ee: np.ndarray

    def __post_init__(self):
        ii = np.atleast_2d(np.asarray(self.ii, dtype=complex))
        ie = np.atleast_2d(np.asarray(self.ie, dtype=complex))
        ei = np.atleast_2d(np.asarray(self.ei, dtype=complex))
        ee = np.atleast_2d(np.asarray(self.ee, dtype=complex))
        n_int = ii.shape[0]
        n_ext = ee.shape[0]
        if ii.shape != (n_int, n_int) or ee.shape != (n_ext, n_ext):
            raise ChannelMismatch("ii and ee blocks must be square")
        if ie.shape != (n_int, n_ext) or ei.shape != (n_ext, n_int):
            raise ChannelMismatch(
                f"coupling blocks have shapes {ie.shape}, {ei.shape}; "
                f"expected {(n_int, n_ext)}, {(n_ext, n_int)}"
            )
        if n_int + n_ext < 1:
            raise ChannelMismatch("at least one channel required")
        for name, b in (("ii", ii), ("ie", ie), ("ei", ei), ("ee", ee)):
            if b.size and not np.all(np.isfinite(b)):
                raise ValueError(f"block {name} contains non-finite entries")
        object.__setattr__(self, "ii", ii)
        object.__setattr__(self, "ie", ie)
        object.__setattr__(self, "ei", ei)
        object.__setattr__(self, "ee", ee)

    @property
    def n_int(self):
        return self.ii.shape[0]

    @property
    def n_ext(self):
        return self.ee.shape[0]

    def assemble(self):
        """Full (n_int + n_ext) square matrix, internal channels first."""
        return np.block([[self.ii, self.ie], [self.ei, self.ee]])

    @classmethod
    def from_full(cls, full, internal):
        """Partition a square matrix into a ScatteringMatrix.

        Parameters
        ----------
        full : array_like
            Square matrix over all channels.
        internal : int or sequence of int
            Either the number of leading channels that are internal, or an
            explicit list of channel indices to treat as internal (the
            matrix is permuted so those come first, in the given order).
        """
        full = as_complex_matrix(full)
        n = full.shape[0]
        if full.shape[1] != n:
            raise ChannelMismatch("full scattering matrix must be square")
        if np.isscalar(internal):
            k = int(internal)
        else:
            idx = list(internal)
            rest = [j for j in range(n) if j not in idx]
            order = idx + rest
            full = full[np.ix_(order, order)]
            k = len(idx)
        if not 0 <= k <= n:
            raise ChannelMismatch("internal channel count out of range")
        return cls(full[:k, :k], full[:k, k:], full[k:, :k], full[k:, k:])

    def unitarity_defect(self):
        return blockmat.unitarity_defect(self.assemble())

    def is_unitary(self, tol=UNITARITY_TOL):
        return self.unitarity_defect() <= tol

    def require_unitary(self, tol=UNITARITY_TOL, name="scattering matrix"):
        blockmat.require_unitary(self.assemble(), tol=tol, name=name)


def transparent(n_int, n_ext=None):
    """Pass-through scatterer: no backscattering, unit transmission."""
    n_ext = n_int if n_ext is None else n_ext
    if n_ext != n_int:
        raise ChannelMismatch("transparent scatterer needs n_ext = n_int")
    z = np.zeros((n_int, n_int))
    eye = np.eye(n_int)
    return ScatteringMatrix(z, eye, eye, z)


@dataclass(frozen=True)
class RoundTrip:
    """Resolvents of the two round-trip operators between two scatterers."""

    D12: np.ndarray
    D21: np.ndarray
    spectral_radius_estimate: float


def round_trip(s1_ii, s2_ii):
    """Round-trip resolvents D12 = (1 - S2ii S1ii)^-1 and D21 = (1 - S1ii S2ii)^-1.

    Their determinants coincide (Sylvester); the spectral radius estimate of
    S2ii S1ii is included for diagnostics.

    Raises
    ------
    ResonantSingular
        If 1 - S2ii S1ii is singular at the pivot threshold.
    """
    a = as_complex_matrix(s1_ii, "S1ii")
    b = as_complex_matrix(s2_ii, "S2ii")
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ChannelMismatch("internal blocks must be square with equal size")
    n = a.shape[0]
    eye = np.eye(n)
    d12 = blockmat.solve(eye - b @ a, eye, err=ResonantSingular)
    d21 = blockmat.solve(eye - a @ b, eye, err=ResonantSingular)
    rho = float(np.max(np.abs(np.linalg.eigvals(b @ a)))) if n else 0.0
    return RoundTrip(D12=d12, D21=d21, spectral_radius_estimate=rho)


def round_trip_series(s1_ii, s2_ii, terms):
    """Truncated Neumann series sum_{k=0}^{terms} (S2ii S1ii)^k.

    Converges to D12 when the spectral radius of S2ii S1ii is below one;
    the truncation error is bounded by rho^(terms+1) / (1 - rho) in norm.
    Divergent inputs are allowed; the caller checks the spectral radius.
    """
    a = as_complex_matrix(s1_ii, "S1ii")
    b = as_complex_matrix(s2_ii, "S2ii")
    m = b @ a
    n = m.shape[0]
    acc = np.eye(n, dtype=complex)
    power = np.eye(n, dtype=complex)
    for _ in range(int(terms)):
        power = power @ m
        acc += power
    return acc


def star(s1: ScatteringMatrix, s2: ScatteringMatrix):
    """Star product of two scatterers sharing their internal channels.

    The result couples the n_ext1 + n_ext2 external channels only (its
    internal channel count is zero), with blocks

        S11 = S1ee + S1ei S2ii D21 S1ie      S12 = S1ei D12 S2ie
        S21 = S2ei D21 S1ie                  S22 = S2ee + S2ei S1ii D12 S2ie

    where D12, D21 are the round-trip resolvents.
    """
    if s1.n_int != s2.n_int:
        raise ChannelMismatch(
            f"internal channel mismatch: {s1.n_int} != {s2.n_int}"
        )
    rt = round_trip(s1.ii, s2.ii)
    s11 = s1.ee + s1.ei @ s2.ii @ rt.D21 @ s1.ie
    s12 = s1.ei @ rt.D12 @ s2.ie
    s21 = s2.ei @ rt.D21 @ s1.ie
    s22 = s2.ee + s2.ei @ s1.ii @ rt.D12 @ s2.ie
    ee = np.block([[s11, s12], [s21, s22]])
    n_ext = s1.n_ext + s2.n_ext
    return ScatteringMatrix(
        np.zeros((0, 0)), np.zeros((0, n_ext)), np.zeros((n_ext, 0)), ee
    )


def promote_internal(s: ScatteringMatrix, k):
    """Reinterpret the first k external channels as internal ones.

    Used when chaining: after SL * S2 the channels that faced the previous
    scatterer sit first among the externals and become internal for the
    next star product. Pure relabeling; the assembled matrix is unchanged.
    """
    if s.n_int != 0:
        raise ChannelMismatch("promote_internal expects a fully external matrix")
    if not 0 <= k <= s.n_ext:
        raise ChannelMismatch("cannot promote more channels than exist")
    return ScatteringMatrix.from_full(s.ee, k)


def chain(scatterers):
    """Left-to-right chain composition S1 * SL * ... * Sn.

    Every interior scatterer must expose its right-facing channels as
    internal and its left-facing channels as the first block of its
    externals (translation scatterers are built this way). Returns a fully
    external ScatteringMatrix.
    """
    if not scatterers:
        raise ChannelMismatch("empty chain")
    # fold right-to-left; after star(s, result) the leading externals are
    # s's left-facing channels, which become internal for the next factor
    result = scatterers[-1]
    for i in range(len(scatterers) - 2, -1, -1):
        result = star(scatterers[i], result)
        if i > 0:
            result = promote_internal(result, scatterers[i].n_int)
    return result


def translation_scatterer(t):
    """Unitary scatterer for one-way propagation with transmission matrix t.

    Models a stretch of (possibly lossy) medium: no backscattering, so the
    internal-internal block vanishes; the environment ports required to
    restore unitarity come from the unitary dilation of [[0, t], [t, 0]].

    The returned matrix has n_int = n channels facing the *next* scatterer
    and n_ext = 3n channels ordered [far-side channels (n), environment
    ports (2n)]. For unit-modulus (lossless) t the environment coupling
    blocks vanish.
    """
    t = as_complex_matrix(t, "t")
    n = t.shape[0]
    if t.shape[1] != n:
        raise ChannelMismatch("transmission matrix must be square")
    k = np.zeros((2 * n, 2 * n), dtype=complex)
    k[:n, n:] = t
    k[n:, :n] = t
    u = blockmat.unitary_dilation(k)
    # dilation channel order: [side1 (n), side2 (n), env (2n)];
    # internal = side2 channels, externals = [side1, env]
    side2 = list(range(n, 2 * n))
    return ScatteringMatrix.from_full(u, side2)


def det_composition_residual(s1: ScatteringMatrix, s2: ScatteringMatrix):
    """Defect of the determinant composition theorem

        det(S1 * S2) = (-1)^n_int det(S1) det(S2) det(D21)/det(D21)*

    Both sides are unit-modulus for unitary inputs; the residual is the
    distance |lhs - rhs| between them evaluated through log-determinants
    (phases effectively compared modulo 2 pi).
    """
    s1.require_unitary(name="S1")
    s2.require_unitary(name="S2")
    composed = star(s1, s2)
    ld_lhs = logdet(composed.ee)
    n = s1.n_int
    ld_d21inv = logdet(np.eye(n) - s1.ii @ s2.ii)
    # det(D21)/det(D21)^* is the pure phase exp(-2i Im log det(1 - S1ii S2ii))
    phase = -2j * ld_d21inv.imag
    ld_rhs = logdet(s1.assemble()) + logdet(s2.assemble()) + phase
    sign = -1.0 if n % 2 else 1.0
    return float(abs(np.exp(ld_lhs) - sign * np.exp(ld_rhs)))


def alpha_phase(s1: ScatteringMatrix, s2: ScatteringMatrix):
    """Phase factor alpha = det(S2ii^dag - S1ii) / det(S1ii - S2ii^dag).

    For unitary scatterers this equals (-1)^n_int; evaluating it numerically
    exercises the determinant algebra that collapses the composition
    theorem's leftover factor to a sign.
    """
    s1.require_unitary(name="S1")
    s2.require_unitary(name="S2")
    x = s2.ii.conj().T - s1.ii
    return complex(np.exp(logdet(x) - logdet(-x)))


def chain3_factorization_residual(
    s1: ScatteringMatrix, sl: ScatteringMatrix, s2: ScatteringMatrix, t12=None, t21=None
):
    """Defect of the three-factor chain identity

        det(S1 * SL * S2) = det(S1) det(S2) det(SL) det(D21)/det(D21)*

    with D21 = (1 - S1ii T12 S2ii T21)^-1, plus the intermediate identity
    det(SL * S2) = (-1)^n_int det(SL) det(S2) that holds because the
    translation scatterer cannot produce internal round trips (SLii = 0).

    Parameters
    ----------
    s1, sl, s2 : ScatteringMatrix
        Chain factors; sl must have a vanishing internal-internal block and
        externals ordered [left-facing channels, environment ports].
    t12, t21 : array_like, optional
        One-way transmission blocks of sl. Default: read off sl (its ie /
        ei couplings between the two object-facing sides).

    Returns
    -------
    float
        Max of the two identity residuals, |lhs - rhs| on the unit circle.
    """
    s1.require_unitary(name="S1")
    sl.require_unitary(name="SL")
    s2.require_unitary(name="S2")
    n = s1.n_int
    if sl.n_int != n or s2.n_int != n:
        raise ChannelMismatch("chain factors must share the internal channel count")
    if np.max(np.abs(sl.ii)) > 1e-12:
        raise ChannelMismatch("translation scatterer must have SLii = 0")
    if t12 is None:
        t12 = sl.ie[:, :n]  # transmission from the side-1 externals to side 2
    if t21 is None:
        t21 = sl.ei[:n, :]
    t12 = as_complex_matrix(t12, "T12")
    t21 = as_complex_matrix(t21, "T21")

    # intermediate: det(SL * S2) = (-1)^n det(SL) det(S2)
    mid = star(sl, s2)
    sign = -1.0 if n % 2 else 1.0
    res_mid = abs(
        np.exp(logdet(mid.ee))
        - sign * np.exp(logdet(sl.assemble()) + logdet(s2.assemble()))
    )

    # full chain determinant versus the factorized form
    full = star(s1, promote_internal(mid, n))
    ld_lhs = logdet(full.ee)
    ld_d21inv = logdet(np.eye(n) - s1.ii @ t12 @ s2.ii @ t21)
    ld_rhs = (
        logdet(s1.assemble())
        + logdet(s2.assemble())
        + logdet(sl.assemble())
        - 2j * ld_d21inv.imag
    )
    res_full = abs(np.exp(ld_lhs) - np.exp(ld_rhs))
    return float(max(res_mid, res_full))


def phase_shift(s: ScatteringMatrix, tol=UNITARITY_TOL):
    """Total scattering phase shift (1/2i) log det S.

    Computed as half the sum of the principal arguments of the eigenvalues
    of the assembled matrix, hence real and defined modulo pi.
    """
    full = s.assemble() if isinstance(s, ScatteringMatrix) else as_complex_matrix(s)
    blockmat.require_unitary(full, tol=tol, name="S")
    args = np.angle(np.linalg.eigvals(full))
    return float(0.5 * np.sum(args))


def matched_phase_increment(s_a, s_b):
    """Continuity-preserving increment of the phase shift between two
    nearby unitary matrices.

    Eigenphases of both matrices are sorted on the circle and matched over
    all cyclic alignments (allowing a +-2 pi wrap) by minimizing the largest
    single-phase jump. Returns (delta_phase_shift, max_single_jump).
    """
    a = s_a.assemble() if isinstance(s_a, ScatteringMatrix) else np.asarray(s_a)
    b = s_b.assemble() if isinstance(s_b, ScatteringMatrix) else np.asarray(s_b)
    pa = np.sort(np.angle(np.linalg.eigvals(a)))
    pb = np.sort(np.angle(np.linalg.eigvals(b)))
    n = len(pa)
    ext = np.concatenate([pb - 2 * np.pi, pb, pb + 2 * np.pi])
    best = None
    for k in range(2 * n + 1):
        window = ext[k : k + n]
        diffs = window - pa
        worst = np.max(np.abs(diffs))
        if best is None or worst < best[1]:
            best = (0.5 * float(np.sum(diffs)), float(worst))
    return best


def dos_change(sampler, omega, h):
    """Change of the density of states: (1/pi) d(phase shift)/d omega.

    Central difference over [omega - h, omega + h] with eigenphase
    continuity enforced by nearest-branch matching between the two samples.

    Parameters
    ----------
    sampler : callable
        omega -> unitary ScatteringMatrix (or plain unitary matrix).
    omega, h : float
        Evaluation frequency and half step, rad/s.

    Raises
    ------
    BranchJump
        If an eigenphase moves by pi/2 or more between the two samples
        (halve h and retry).
    """
    s_minus = sampler(omega - h)
    s_plus = sampler(omega + h)
    for s in (s_minus, s_plus):
        full = s.assemble() if isinstance(s, ScatteringMatrix) else s
        blockmat.require_unitary(full, name="sampled S")
    delta, worst = matched_phase_increment(s_minus, s_plus)
    if worst >= np.pi / 2:
        raise BranchJump(
            f"eigenphase moved by {worst:.3f} rad over 2h; reduce the step"
        )
    return float(delta / (2 * h) / np.pi)
