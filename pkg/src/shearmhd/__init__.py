"""Pseudo-spectral laboratory for viscous non-resistive 2D MHD near Couette flow.

The package provides, in rough dependency order:

* ``grid``        -- Fourier lattice, spectral fields, moving-frame symbols,
                     projections, dealiased products
* ``weights``     -- the anisotropic time-dependent multipliers (lambda, m_L,
                     m, q, J, A), resonance geometry, frequency classifiers
* ``linear``      -- per-mode integration of the decoupled linearized system
                     and full-field linear baselines
* ``nonlinear``   -- the IFRK4 pseudo-spectral time stepper for (w, phi, v0x)
* ``diagnostics`` -- energy/dissipation functionals, nonlinear inner
                     products, the energy-identity residual
* ``echo``        -- the three-mode resonance model and chained echo cascades
* ``experiments`` -- stability / inflation / sweep / audit harnesses
* ``cli``         -- the ``shearmhd`` command-line front end

See demos/ for narrative walkthroughs of each capability.
"""

from .grid import (FlowState, Grid, SpectralField, apply_multiplier,
                   from_physical, make_grid, moving_symbol, project,
                   to_physical, transform_product, zero_field)
from .weights import (ResonanceLayout, WeightCache, WeightParams, WeightTable,
                      classify_pair, dq_ratio, in_S_t, lambda_at, log_A,
                      log_At, log_J, log_Jt, log_m, log_mL, log_q,
                      resonance_layout)
from .linear import (ModeState, ModeTrajectory, integrate_mode,
                     integrate_mode_batch, linear_field_solution,
                     linear_rhs_mode, mode_energy_report)
from .nonlinear import (SimState, StepperConfig, from_good_unknowns,
                        nonlinear_rhs, step, suggest_dt, to_good_unknowns)
from .diagnostics import (DiagnosticsRecord, diagnostics,
                          energy_identity_residual, gevrey_norm, l2_norm,
                          x_seminorm)
from .echo import (EchoConfig, chain_run, predicted_gain, regime_time_scale,
                   three_mode_integrate)
from .experiments import FitResult, RunConfig, fit_power_law, run_experiment
from .initial_data import gevrey_random_state, single_mode_state

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
