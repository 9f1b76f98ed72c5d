"""Sphere-sphere interaction in the multipole basis.

At large separation the energy of two conducting spheres approaches the
dipole-limit law E = -(143/16 pi) hbar c R1^3 R2^3 / L^7, built from the
static polarizabilities alpha = R^3 and beta = -R^3/2. At moderate
separation higher multipoles matter and the truncation order is doubled
until the energy stabilizes.
"""

import numpy as np

from casimir.core import C_LIGHT, HBAR, QuadratureSpec
from casimir.materials import PerfectMirror
from casimir.sphere import SphereSystem, mie_amplitudes, sphere_energy, translation_block

pec = PerfectMirror()
R = 100e-9

print("=== sphere reflection amplitudes (conducting, small size parameter) ===")
xi = 1e12
x = xi * R / C_LIGHT
a1, b1 = mie_amplitudes(pec, R, xi, 1)
print(f"x = {x:.2e}: a1/x^3 = {a1 / x**3:+.6f} (alpha/R^3 * 2/3),"
      f" b1/x^3 = {b1 / x**3:+.6f} (beta/R^3 * 2/3)")

print("\n=== translation block (dipole sector, m = 0 and 1) ===")
print("m=0:\n", translation_block(1, 0, 1e15, 1e-6).round(5))
print("m=1:\n", translation_block(1, 1, 1e15, 1e-6).round(5))

print("\n=== dipole-limit asymptote at L/R = 50 ===")
L = 50 * R
quad = QuadratureSpec(base_order=64, tol=1e-7)
res = sphere_energy(SphereSystem(R, R, L, pec, pec, lmax=1), quad, adaptive_lmax=False)
dimless = res.value * L**7 / (HBAR * C_LIGHT * R**6)
print(f"E L^7 / (hbar c R1^3 R2^3) = {dimless:.5f}")
print(f"-143/(16 pi)               = {-143 / (16 * np.pi):.5f}")

print("\n=== truncation convergence at a moderate gap (L/R = 6) ===")
L = 6 * R
prev = None
for lmax in (2, 4, 8, 16):
    res = sphere_energy(
        SphereSystem(R, R, L, pec, pec, lmax=lmax),
        QuadratureSpec(base_order=32, tol=1e-6),
        adaptive_lmax=False,
    )
    change = "" if prev is None else f"  (rel change {(res.value - prev) / prev:+.2e})"
    print(f"lmax = {lmax:2d}: E = {res.value:.8e} J{change}")
    prev = res.value

print("\n=== automatic truncation ===")
res = sphere_energy(SphereSystem(R, R, L, pec, pec), QuadratureSpec(base_order=32, tol=1e-6))
print(f"converged at lmax = {res.metadata['lmax']}: E = {res.value:.8e} J "
      f"(error estimate {res.error_estimate:.1e})")
