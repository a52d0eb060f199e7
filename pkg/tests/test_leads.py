"""Reservoir occupations, tunneling windows, and bath-memory diagnostics."""

import numpy as np
import pytest

from qdmr.leads import bath_correlation, fermi, rate_in, rate_out, tunneling_rate

from conftest import make_config
from oracles import bath_correlation_zero_time, fermi_ref, lorentz_ref


class TestFermi:
    @pytest.mark.parametrize("energy", [-40.0, -2.0, 0.0, 2.0, 40.0])
    def test_matches_reference(self, energy):
        assert fermi(energy, 1.5, 13.0) == pytest.approx(
            fermi_ref(energy, 1.5, 13.0), rel=1e-14
        )

    def test_overflow_clamps_to_exact_limits(self):
        assert fermi(1.0e6, 0.0, 1.0) == 0.0
        assert fermi(-1.0e6, 0.0, 1.0) == 1.0

    def test_half_filling_at_chemical_potential(self):
        assert fermi(3.7, 3.7, 8.0) == pytest.approx(0.5, rel=1e-15)

    def test_vectorized(self):
        e = np.linspace(-30.0, 30.0, 7)
        np.testing.assert_allclose(
            fermi(e, 2.0, 13.0), [fermi_ref(x, 2.0, 13.0) for x in e], rtol=1e-14
        )


class TestTunnelingWindow:
    def test_peak_value_at_center(self):
        lead = make_config().lead_L
        assert tunneling_rate(lead.gamma_center, lead) == pytest.approx(
            lead.gamma_rate, rel=1e-15
        )

    def test_half_maximum_at_half_width(self):
        lead = make_config().lead_L
        val = tunneling_rate(lead.gamma_center + lead.delta, lead)
        assert val == pytest.approx(0.5 * lead.gamma_rate, rel=1e-15)

    def test_matches_reference_formula(self):
        lead = make_config(delta_mu=30.0).lead_R
        e = np.linspace(-80.0, 80.0, 11)
        ref = [
            lorentz_ref(x, lead.gamma_rate, lead.delta, lead.gamma_center) for x in e
        ]
        np.testing.assert_allclose(tunneling_rate(e, lead), ref, rtol=1e-14)


class TestDirectionalRates:
    def test_in_plus_out_equals_window(self):
        lead = make_config(delta_mu=12.0, t_left_mk=80.0).lead_L
        e = np.linspace(-50.0, 50.0, 101)
        np.testing.assert_allclose(
            rate_in(e, lead) + rate_out(e, lead), tunneling_rate(e, lead), rtol=1e-14
        )

    def test_in_rate_vanishes_far_above_chemical_potential(self):
        lead = make_config().lead_L
        assert rate_in(lead.chem_potential + 1.0e5, lead) == 0.0


class TestBathCorrelation:
    def test_zero_time_values_match_quadrature(self):
        # The package grid stops where the window falls to 1e-6 of its
        # peak, which leaves O(1e-3) of the 1/E^2 tail mass outside; the
        # quadrature reference integrates the full tails, so agreement
        # at 2e-3 is the expected floor (a convention error would be
        # off by orders of magnitude).
        lead = make_config().lead_L
        trace = bath_correlation(lead)
        for kind, arr in (("out", trace.c_out), ("in", trace.c_in)):
            ref = bath_correlation_zero_time(lead, kind)
            assert arr[0].real == pytest.approx(ref, rel=2e-3)
            assert abs(arr[0].imag) < 1e-6 * abs(ref)

    def test_memory_time_is_short_at_reference_point(self):
        trace = bath_correlation(make_config().lead_L)
        assert trace.converged
        assert 0.0 < trace.decay_time < 1.0

    def test_envelope_respects_threshold_past_decay_time(self):
        trace = bath_correlation(make_config().lead_R, threshold=0.02)
        env = np.maximum(
            np.abs(trace.c_out) / abs(trace.c_out[0]),
            np.abs(trace.c_in) / abs(trace.c_in[0]),
        )
        past = trace.times >= trace.decay_time
        assert np.all(env[past] < 0.02)

    def test_custom_time_grid_is_respected(self):
        times = np.linspace(0.0, 3.0, 91)
        trace = bath_correlation(make_config().lead_L, times)
        np.testing.assert_array_equal(trace.times, times)
        assert trace.c_out.shape == times.shape
