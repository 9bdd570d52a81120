"""Scenario configuration - defaults for every scenario file.

Upper stage from a 150 km, 5000 m/s, 30 deg state to a 300 x 36000 km GTO
with a linear thrust law. Scenario files and presets override any subset.
"""

config = {
    "name": "gto-linear",

    # Central body
    "constants": {
        "mu_m3s2": 3.986005e14,
        "earth_radius_m": 6378137.0,
        "g0_ms2": 9.80665,
    },

    # State at ignition
    "initial": {
        "altitude_km": 150.0,
        "velocity_ms": 5000.0,
        "gamma_deg": 30.0,
        "mass_kg": 10000.0,
        "longitude_deg": 0.0,
        "time_s": 0.0,
    },

    # Target orbit: apogee_km + perigee_km, energy_jkg + ang_momentum_m2s,
    # or semi_major_km + eccentricity
    "target": {
        "apogee_km": 36000.0,
        "perigee_km": 300.0,
    },

    # Engine: ve_ms or isp_s
    "propulsion": {
        "ve_ms": 2942.0,
        "dry_mass_kg": 0.0,
    },

    # Thrust law: linear (T1 N, T2 N/s) or bilevel (T1 N, T2 N, switch at t1_s)
    "profile": {
        "kind": "linear",
        "t1_s": None,
        "t1_grid_s": [],
        "guess": None,  # [T1, T2]
    },

    # Injection: perigee | apogee | first
    "mode": "perigee",

    "integrator": {
        "rel_tol": 1e-10,
        "abs_tol": 1e-6,
        "max_step_s": 10.0,
        "event_tol_rad": 1e-10,
        "max_time_s": 5000.0,
        "sample_step_s": 1.0,
    },

    "solver": {
        "residual": "apsides",  # apsides | energy
        "residual_tol_m": 10.0,
        "scaled_tol": 1e-7,
        "max_iter": 40,
        "fd_step": 1e-3,
        "max_halvings": 10,
        "twr": 0.25,
        "workers": 1,
        "verify": True,
    },

    "output": {
        "directory": "output",
    },
}
