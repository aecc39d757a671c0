"""Current norm inflation at desk scale.

A single conjugate pair of magnetic-potential modes above the cutoff
(k0 = 4) rides the shear: the potential is nearly frozen while the
moving-frame Laplacian grows, so the current j = lap_t phi inflates
like t^2 and t<b> like t^2, while the nonlinear deviation from the
linear baseline stays small in the X-seminorm.

Small-scale version of the inflation experiment (32 x 64 grid,
eps = 1e-3); the acceptance suite runs 128 x 256 with eps down to 1e-4.
"""

import json
import tempfile

from shearmhd import RunConfig, run_experiment

out = tempfile.mkdtemp(prefix="inflation_demo_")
cfg = RunConfig(kind="inflation", out_dir=out, seed=1, n_x=32, n_y=64,
                epsilon=1e-3, t_end_policy="eps_minus_2_3", t_end_coeff=0.5,
                sample_stride=0.25, recipe="single_mode", k_mode=5,
                eta_mode=0.0, k0=4.0, fit_t_min=5.0)
summary = run_experiment(cfg)

print(json.dumps({k: v for k, v in summary.items() if k != "assertions"},
                 indent=2, sort_keys=True))
print("assertions:", summary["assertions"])
print(f"\nartifacts written to {out}/ (diagnostics.csv, summary.json);")
print("render them with the plots frontend, e.g.")
print("  node plots/dist/src/main.js --spec <spec.json>  # see plots/README.md")
