import math

import pytest

from ringtrap.config import load_config
from ringtrap.errors import ConfigError

MINIMAL = """
[rf]
bx_g = 0.7
by_g = 0.7
alpha_deg = -90
freq_mhz = 1.5
"""


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_config_builds_trap(tmp_path):
    rc = load_config(write(tmp_path, MINIMAL))
    cfg = rc.trap()
    assert cfg.rf.b_x == pytest.approx(0.7e-4, rel=1e-14)
    assert cfg.rf.alpha == pytest.approx(-math.pi / 2, rel=1e-14)
    assert cfg.rf.omega == pytest.approx(2 * math.pi * 1.5e6, rel=1e-14)
    assert cfg.quad.gradient == pytest.approx(1.0, rel=1e-14)  # default 100 G/cm
    assert cfg.gravity_on is True  # physical default
    assert cfg.atom.label.startswith("87Rb")


def test_defaults_materialised_in_echo(tmp_path):
    rc = load_config(write(tmp_path, MINIMAL))
    echo = rc.resolved_ini()
    assert "[imaging]" in echo
    assert "temperature_uk = 20.0" in echo
    assert "n_phi = 64" in echo
    assert "gradient_g_per_cm = 100.0" in echo


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown config section"):
        load_config(write(tmp_path, MINIMAL + "\n[antenna]\nturns = 10\n"))


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write(tmp_path, MINIMAL + "\n[gravity]\nstrength = 2\n"))


def test_unit_suffix_mismatch_is_unknown_key(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write(tmp_path, "[rf]\nbx_mT = 0.07\n"))


def test_bad_number_diagnostic_names_field(tmp_path):
    with pytest.raises(ConfigError, match=r"\[rf\] freq_mhz"):
        load_config(write(tmp_path, "[rf]\nfreq_mhz = fast\n"))


def test_out_of_range_rejected(tmp_path):
    with pytest.raises(ConfigError, match="out of range"):
        load_config(write(tmp_path, "[rf]\nfreq_mhz = -2\n"))
    with pytest.raises(ConfigError, match="out of range"):
        load_config(write(tmp_path, "[imaging]\npixel_um = 0\n"))


def test_syntax_error_reports_line(tmp_path):
    with pytest.raises(ConfigError, match="syntax"):
        load_config(write(tmp_path, "[rf\nbx_g = 0.7\n"))


def test_overrides_applied_and_typed(tmp_path):
    rc = load_config(write(tmp_path, MINIMAL), overrides=["rf.freq_mhz=2.5", "gravity.enabled=false"])
    assert rc.trap().rf.omega == pytest.approx(2 * math.pi * 2.5e6, rel=1e-14)
    assert rc.trap().gravity_on is False


def test_override_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(write(tmp_path, MINIMAL), overrides=["rf.power_w=3"])
    with pytest.raises(ConfigError, match="--set"):
        load_config(write(tmp_path, MINIMAL), overrides=["rf.freq_mhz"])


def test_species_custom_requires_constants(tmp_path):
    with pytest.raises(ConfigError, match="species=custom requires"):
        load_config(write(tmp_path, "[atom]\nspecies = custom\n")).atom()
    rc = load_config(
        write(tmp_path, "[atom]\nspecies = custom\nmass_kg = 1.44316e-25\ng_f = 0.5\nm_f = 1\n")
    )
    assert rc.atom().m_F == 1


def test_species_preset_conflicts_with_explicit(tmp_path):
    rc = load_config(write(tmp_path, "[atom]\nspecies = Rb87\nm_f = 1\n"))
    with pytest.raises(ConfigError, match="conflict"):
        rc.atom()


def test_unknown_species_rejected(tmp_path):
    rc = load_config(write(tmp_path, "[atom]\nspecies = unobtainium\n"))
    with pytest.raises(ConfigError, match="unknown species"):
        rc.atom()


def test_unit_round_trip_fidelity(tmp_path):
    # config gauss -> tesla -> gauss identity to 1e-12 (criterion: unit fidelity)
    rc = load_config(write(tmp_path, "[rf]\nbx_g = 0.6283185307179586\n"))
    b_t = rc.trap().rf.b_x
    assert b_t * 1e4 == pytest.approx(0.6283185307179586, rel=1e-12)


def test_sweep_frequency_list_and_range(tmp_path):
    rc = load_config(write(tmp_path, MINIMAL))
    freqs = rc.sweep_frequencies_mhz()
    assert freqs[0] == 0.5 and freqs[-1] == 3.0 and len(freqs) == 11
    rc2 = load_config(write(tmp_path, MINIMAL + "\n[sweep]\nfreq_mhz_list = 1.0, 2.0\n"))
    assert rc2.sweep_frequencies_mhz() == [1.0, 2.0]
    with pytest.raises(ConfigError, match="conflict"):
        load_config(
            write(tmp_path, MINIMAL + "\n[sweep]\nfreq_mhz_list = 1.0\nfreq_mhz_start = 0.5\n")
        ).sweep_frequencies_mhz()


def test_amplitude_table_loaded_and_validated(tmp_path):
    table = tmp_path / "amps.csv"
    table.write_text("freq_MHz,bx_G,by_G,bz_G\n1.0,0.7,0.7,0\n2.0,0,0,0\n")
    rc = load_config(write(tmp_path, MINIMAL + "\n[sweep]\nfreq_mhz_list = 1.0, 2.0\namplitude_table = amps.csv\n"))
    rows = rc.amplitude_table_g(2, tmp_path)
    assert rows[0] == (1.0, 0.7, 0.7, 0.0)
    with pytest.raises(ConfigError, match="rows"):
        rc.amplitude_table_g(3, tmp_path)


def test_echo_deterministic(tmp_path):
    p = write(tmp_path, MINIMAL)
    assert load_config(p).resolved_ini() == load_config(p).resolved_ini()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.ini")
