import math

import pytest

from solitoncap.soliton import (
    PhysicalLink,
    energy_closed,
    energy_numeric,
    normalize,
    separation_margin,
    snr,
    waveform,
)


def _link(**over):
    base = dict(beta2=-1.0, gamma_nl=1.0, alpha=1.0, K_T=1.0, photon_energy=1.0, T_s=1.0, L=1.0)
    base.update(over)
    return PhysicalLink(**base)


def test_waveform_examples(oracle):
    assert waveform(1.0, 0.0) == 1.0
    assert waveform(2.0, 0.0) == 2.0
    assert waveform(1.0, 1.0) == pytest.approx(float(oracle["sech_1"]), rel=1e-15)


@pytest.mark.parametrize("t", [0.1, 1.0, 7.5, 400.0, 1e5])
def test_waveform_even_and_finite(t):
    assert waveform(1.3, t) == waveform(1.3, -t)
    assert math.isfinite(waveform(1.3, t))


def test_energy_closed():
    assert energy_closed(2.0) == 4.0
    assert energy_closed(0.5) == 1.0
    assert energy_closed(1.0) == 2.0


def test_energy_numeric_examples(oracle):
    assert energy_numeric(1.0, 40.0).value == pytest.approx(2.0, abs=1e-10)
    assert energy_numeric(3.0, 40.0).value == pytest.approx(6.0, abs=1e-10)
    # 2 tanh(0.5) from the extended-precision oracle
    assert energy_numeric(1.0, 0.5).value == pytest.approx(float(oracle["two_tanh_half"]), rel=1e-13)


@pytest.mark.parametrize("a0", [0.2, 1.0, 4.0])
@pytest.mark.parametrize("w", [0.3, 1.0, 2.5])
def test_energy_numeric_matches_tanh_law(a0, w):
    assert energy_numeric(a0, w).value == pytest.approx(2 * a0 * math.tanh(a0 * w), rel=1e-12)


def test_domain_errors():
    for fn in (energy_closed, separation_margin):
        with pytest.raises(ValueError):
            fn(0.0)
    with pytest.raises(ValueError):
        waveform(-1.0, 0.0)
    with pytest.raises(ValueError):
        energy_numeric(1.0, 0.0)


def test_separation_margin():
    m = separation_margin(10.0)
    assert m.margin == pytest.approx(4.54e-5, rel=1e-3)
    assert m.width == pytest.approx(0.1)
    assert separation_margin(math.log(100.0)).margin == pytest.approx(0.01, rel=1e-14)
    assert separation_margin(1e-12).margin == pytest.approx(1.0)


def test_normalize_unit_inputs():
    norm = normalize(_link())
    assert norm.L_s == 1.0
    assert norm.z_end == 1.0
    assert norm.sigma0_sq == 1.0
    assert norm.D == 0.5
    assert norm.sigma_n_sq == 0.25
    assert norm.power_scale == 1.0


def test_normalize_doubling_symbol_interval():
    one = normalize(_link(T_s=1.0, L=3.0))
    two = normalize(_link(T_s=2.0, L=3.0))
    assert two.L_s == pytest.approx(4 * one.L_s)
    assert two.D == pytest.approx(8 * one.D)
    assert two.z_end == pytest.approx(one.z_end / 4)
    assert two.sigma_n_sq == pytest.approx(2 * one.sigma_n_sq)


def test_ase_spectral_density():
    norm = normalize(_link(alpha=4.6e-5, K_T=1.13, photon_energy=1.28e-19))
    assert norm.sigma0_sq == pytest.approx(4.6e-5 * 1.13 * 1.28e-19, rel=1e-15)
    assert norm.sigma0_sq == pytest.approx(6.65e-24, rel=1e-3)


def test_normalized_invariant_holds():
    norm = normalize(_link(beta2=-2.1e-26, gamma_nl=1.3e-3, alpha=4.6e-5, K_T=1.13,
                           photon_energy=1.28e-19, T_s=50e-12, L=2e6))
    assert norm.sigma_n_sq == pytest.approx(norm.z_end * norm.D / 2, rel=1e-15)
    assert all(v > 0 for v in norm.as_dict().values())


@pytest.mark.parametrize("field,value", [("beta2", 0.0), ("beta2", 1.0), ("gamma_nl", 0.0),
                                         ("alpha", -1.0), ("T_s", 0.0), ("L", -5.0),
                                         ("K_T", 0.9), ("photon_energy", 0.0)])
def test_link_invariants(field, value):
    with pytest.raises(ValueError):
        _link(**{field: value})


def test_snr():
    assert snr(1.0, 1.0) == 2.0
    assert snr(50.0, 0.5) == 50.0
    assert snr(10.0, 2.0) == 40.0
    with pytest.raises(ValueError):
        snr(0.0, 1.0)
