"""Lossy Fabry-Perot toy: the two band-energy bookkeepings must agree."""

import numpy as np
import pytest

from casimir.core import C_LIGHT
from casimir.errors import NotContraction
from casimir.scattering import dos_change
from casimir.toy import band_energies, cavity, lossy_mirror


class TestLossyMirror:
    def test_unitary_with_loss_ports(self):
        m = lossy_mirror(0.9, 0.3, "right")
        assert m.n_int == 1 and m.n_ext == 3
        assert m.unitarity_defect() < 1e-10

    def test_overactive_mirror_rejected(self):
        with pytest.raises(NotContraction):
            lossy_mirror(0.9, 0.5, "right")


class TestCavity:
    def test_unitary_chain(self):
        full, sl = cavity(2.3e15, 1e-6, 0.9, 0.3)
        assert full.unitarity_defect() < 1e-9
        assert sl.unitarity_defect() < 1e-10

    def test_dos_relative_to_translation(self):
        # single-mode cavity: the density-of-states change relative to the
        # bare translation integrates peaks at the resonances
        L = 1e-6
        mirrors = (lossy_mirror(0.7, 0.3, "right"), lossy_mirror(0.7, 0.3, "left"))

        def full_sampler(w):
            return cavity(w, L, 0.7, 0.3, mirrors)[0]

        def sl_sampler(w):
            return cavity(w, L, 0.7, 0.3, mirrors)[1]

        w_res = np.pi * C_LIGHT / L  # round-trip phase 2 w L / c = 2 pi
        h = 1e-6 * C_LIGHT / L
        on = dos_change(full_sampler, w_res, h) - dos_change(sl_sampler, w_res, h)
        off = dos_change(full_sampler, 1.5 * w_res, h) - dos_change(
            sl_sampler, 1.5 * w_res, h
        )
        # analytic single-mode values: rho/(1 -+ rho) * 2L/(pi c) at/between
        # resonances, with rho = r^2 the round-trip amplitude
        rho = 0.49
        assert on == pytest.approx(rho / (1 - rho) * 2 * L / (np.pi * C_LIGHT), rel=1e-4)
        assert off == pytest.approx(-rho / (1 + rho) * 2 * L / (np.pi * C_LIGHT), rel=1e-4)


class TestBandEnergies:
    def test_transparent_mirrors_zero(self):
        L = 1e-6
        s = C_LIGHT / L
        res = band_energies(L, 0.0, 1.0, (0.5 * s, 3 * s), panels=8, order=8)
        # zero up to finite-difference rounding noise, many orders below
        # the lossy-cavity scale of ~1e-20 J
        assert abs(res["phase_route"]) < 1e-28
        assert abs(res["dos_route"]) < 1e-28
        assert max(abs(d) for _, _, d in res["rows"]) < 1e-9 * L / C_LIGHT

    def test_lossy_routes_agree(self):
        L = 1e-6
        s = C_LIGHT / L
        res = band_energies(L, 0.9, 0.3, (0.5 * s, 6 * s))
        e1, e3 = res["phase_route"], res["dos_route"]
        assert abs(e1 - e3) / abs(e1) < 1e-6
        assert e1 < 0

    def test_dissipation_is_implicit(self):
        # same internal reflection, different loss: identical band energy
        L = 1e-6
        s = C_LIGHT / L
        lossy = band_energies(L, 0.9, 0.3, (0.5 * s, 4 * s), panels=40)
        lossless = band_energies(L, 0.9, np.sqrt(1 - 0.81), (0.5 * s, 4 * s), panels=40)
        assert lossy["phase_route"] == pytest.approx(
            lossless["phase_route"], rel=1e-9
        )
