"""Scenario presets for the standard measurement configurations.

Values are expressed in the config-file grammar (laboratory units in the key
names) so that presets, config files and command-line flags merge uniformly.
Rate constants default to the measured working values where available;
``theory`` asks for evaluation from the cross-section model instead.
"""

SCENARIOS = {
    # rf-shield decay at high offset field
    "27G-methodI": {
        "species": "52Cr",
        "mode": "rf_shield",
        "field_gauss": 27.0,
        "temp_uk": 275.0,
        "freq_x_hz": 120.0,
        "freq_y_hz": 120.0,
        "freq_z_hz": 73.0,
        "background_rate_hz": 0.005,
        "density_cm3": 1.0e11,
        "beta_event_cm3s": 2.5e-11,
        "beta_loss_cm3s": "theory",
        "beta2_cm3s": 1.1e-10,
        "polarization": 1.0,
        "duration_s": 60.0,
        "samples": 121,
    },
    # free evolution with sublevel-resolved detection at low offset field
    "0.7G-methodII": {
        "species": "52Cr",
        "mode": "free_evolution",
        "field_gauss": 0.7,
        "temp_uk": 50.0,
        "freq_x_hz": 806.0,
        "freq_y_hz": 806.0,
        "freq_z_hz": 42.0,
        "background_rate_hz": 0.005,
        "density_cm3": 1.3e10,
        "beta_event_cm3s": "theory",
        "beta_loss_cm3s": 3.1e-12,
        "beta2_cm3s": 1.1e-10,
        "polarization": 1.0,
        "duration_s": 15.0,
        "samples": 61,
    },
    # isotope-comparison heating run (switch species to 50Cr for the lighter one)
    "20G-isotope": {
        "species": "52Cr",
        "mode": "free_evolution",
        "field_gauss": 20.0,
        "temp_uk": 275.0,
        "freq_x_hz": 120.0,
        "freq_y_hz": 120.0,
        "freq_z_hz": 73.0,
        "background_rate_hz": 0.005,
        "density_cm3": 1.0e10,
        "beta_event_cm3s": "theory",
        "beta_loss_cm3s": "theory",
        "beta2_cm3s": 1.1e-10,
        "polarization": 1.0,
        "duration_s": 10.0,
        "samples": 51,
    },
}
