"""Geometry-independent pieces of the energy formula: round-trip operator
assembly, branch-safe log det(1 - M), and the shared semi-infinite
quadrature driver.

Physical constants live here so every module prices energies identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import blockmat
from .blockmat import as_complex_matrix
from .errors import BranchRisk, ChannelMismatch, NotConverged

HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m / s


@dataclass(frozen=True)
class RoundTripAssembly:
    """Factors of one inter-object round trip: reflection blocks of the two
    objects and the one-way translation blocks through the medium.

    The translation blocks may be non-unitary (lossy medium); branch safety
    of the resulting log-determinant only needs the spectral radius of the
    product to stay below one.
    """

    S1ii: np.ndarray
    T12: np.ndarray
    S2ii: np.ndarray
    T21: np.ndarray

    def __post_init__(self):
        blocks = {}
        n = None
        for name in ("S1ii", "T12", "S2ii", "T21"):
            b = as_complex_matrix(getattr(self, name), name)
            if b.shape[0] != b.shape[1]:
                raise ChannelMismatch(f"{name} must be square")
            if n is None:
                n = b.shape[0]
            elif b.shape[0] != n:
                raise ChannelMismatch("round-trip factors must share one size")
            blocks[name] = b
        for name, b in blocks.items():
            object.__setattr__(self, name, b)


def round_trip_matrix(assembly: RoundTripAssembly):
    """M = S1ii T12 S2ii T21, the operator whose resolvent sums all
    inter-object bounces."""
    a = assembly
    return a.S1ii @ a.T12 @ a.S2ii @ a.T21


def spectral_radius_estimate(m, iterations=30, tol=1e-6, seed=0):
    """Power-iteration estimate of the largest eigenvalue modulus.

    Cheap guard used before committing to the principal branch of
    log det(1 - M). The random start is seeded per call; no global state.
    """
    m = as_complex_matrix(m)
    n = m.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    rho = 0.0
    for _ in range(iterations):
        w = m @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new_rho = nw
        v = w / nw
        if abs(new_rho - rho) < tol * max(new_rho, 1e-30):
            rho = new_rho
            break
        rho = new_rho
    return float(rho)


def log_det_one_minus(m, branch_check=True):
    """log det(1 - M) as a sum of principal logs over the eigenvalues of M.

    With every |lambda_i| < 1 each factor satisfies Re(1 - lambda_i) > 0,
    so the per-eigenvalue principal branch can never wrap: the result is
    branch-safe by construction. For the Hermitian-symmetric problems that
    arise on the imaginary frequency axis the result is real and <= 0.

    Raises
    ------
    BranchRisk
        If the spectral radius (power-iteration estimate when
        ``branch_check`` is on, and always the exact eigenvalue moduli)
        reaches 1 - 1e-9.
    """
    m = as_complex_matrix(m)
    if branch_check:
        rho = spectral_radius_estimate(m)
        if rho >= 1 - 1e-9:
            raise BranchRisk(f"spectral radius estimate {rho:.12f} >= 1")
    lam = np.linalg.eigvals(m)
    rho_exact = float(np.max(np.abs(lam))) if lam.size else 0.0
    if rho_exact >= 1 - 1e-9:
        raise BranchRisk(f"spectral radius {rho_exact:.12f} >= 1")
    return complex(np.sum(np.log(1.0 - lam)))


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre order, doubling budget and relative tolerance."""

    base_order: int = 64
    max_doublings: int = 6
    tol: float = 1e-8

    def __post_init__(self):
        if self.base_order < 8:
            raise ValueError("base_order must be >= 8")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_doublings < 0:
            raise ValueError("max_doublings must be >= 0")


@dataclass
class EnergyResult:
    """Energy value with a quadrature error estimate and run metadata."""

    value: float
    error_estimate: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")


_GL_CACHE = {}


def gauss_legendre_01(order):
    """Cached Gauss-Legendre nodes and weights mapped to (0, 1)."""
    order = int(order)
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = ((x + 1.0) / 2.0, w / 2.0)
    return _GL_CACHE[order]


def integrate_semiinfinite(f, quad: QuadratureSpec = QuadratureSpec(), scale=1.0):
    """Integrate f over (0, inf) via the map xi = scale * u / (1 - u).

    Gauss-Legendre in u with the order doubled until the relative change
    drops below ``quad.tol``. ``f`` must accept an ndarray of xi values and
    return the integrand values elementwise.

    Returns
    -------
    (value, error_estimate, history)
        ``history`` lists (order, value) for each refinement.

    Raises
    ------
    NotConverged
        After ``quad.max_doublings`` doublings; the best (value,
        error_estimate, history) triple is attached to the exception.
    """
    history = []
    prev = None
    order = quad.base_order
    value = None
    err = np.inf
    for attempt in range(quad.max_doublings + 1):
        u, w = gauss_legendre_01(order)
        xi = scale * u / (1.0 - u)
        jac = scale / (1.0 - u) ** 2
        value = float(np.sum(w * jac * np.asarray(f(xi), dtype=float)))
        history.append((order, value))
        if prev is not None:
            err = abs(value - prev)
            if err <= quad.tol * max(abs(value), 1e-300):
                return value, err, history
        prev = value
        order *= 2
    raise NotConverged(
        f"semi-infinite quadrature not converged after {quad.max_doublings} "
        f"doublings (last change {err:.3e})",
        result=(value, err, history),
    )


def logdet_one_minus_factorized(m):
    """Cross-check path: log det(1 - M) through pivoted factorization."""
    n = m.shape[0]
    return blockmat.logdet(np.eye(n) - m)
