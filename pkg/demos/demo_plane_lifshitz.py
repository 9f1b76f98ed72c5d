"""Plane-plane interaction energies: ideal mirrors, lossless plasma and
Ohmic (Drude) metals, plus the real-frequency cross-check.

The imaginary-axis evaluation is the production path: the per-channel
round-trip factor r1 r2 e^{-2 kappa L} is real and below one, so the
integrand is smooth and strictly negative. The real-frequency evaluation
of the same formula is oscillatory but agrees channel by channel.
"""

import numpy as np

from casimir.core import QuadratureSpec
from casimir.materials import Drude, PerfectMirror, Plasma, VACUUM
from casimir.plane import (
    PlaneSystem,
    energy_per_area,
    energy_per_area_real_axis,
    ideal_energy_per_area,
)

gold = Drude(omega_p=1.37e16, gamma=5.3e13)
plasma = Plasma(omega_p=1.37e16)
mirror = PerfectMirror()

print("=== energy per area vs separation ===")
print(f"{'L [nm]':>8} {'ideal':>12} {'plasma':>12} {'Drude':>12} "
      f"{'plasma/ideal':>13} {'Drude/ideal':>12}")
for L in np.geomspace(50e-9, 2e-6, 6):
    e_ideal = energy_per_area(PlaneSystem(mirror, mirror, VACUUM, L)).value
    e_plasma = energy_per_area(PlaneSystem(plasma, plasma, VACUUM, L)).value
    e_drude = energy_per_area(PlaneSystem(gold, gold, VACUUM, L)).value
    print(f"{L * 1e9:8.1f} {e_ideal:12.3e} {e_plasma:12.3e} {e_drude:12.3e} "
          f"{e_plasma / e_ideal:13.4f} {e_drude / e_ideal:12.4f}")

print("\nclosed form at 1 um:", f"{float(ideal_energy_per_area(1e-6)):.6e} J/m^2")

print("\n=== real-frequency axis cross-check (Drude-Drude, 200 nm) ===")
sys_ = PlaneSystem(gold, gold, VACUUM, 200e-9)
imag = energy_per_area(sys_, QuadratureSpec(base_order=64, tol=1e-9))
real = energy_per_area_real_axis(
    sys_, omega_max=20 * gold.omega_p,
    quad=QuadratureSpec(base_order=48, tol=1e-4, max_doublings=2),
)
print(f"imaginary axis: {imag.value:.8e} J/m^2")
print(f"real axis:      {real.value:.8e} J/m^2  "
      f"(error estimate {real.error_estimate:.1e})")
print(f"relative difference: {abs(real.value - imag.value) / abs(imag.value):.2e}")
