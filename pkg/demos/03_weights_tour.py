"""The anisotropic weight family in log space.

lambda(t) is the shrinking Gevrey radius; m_L and m absorb linear and
integrable-in-time growth; q encodes the resonant-interval staircase
that prices each echo; J and A compose them into the energy weights.
"""

import numpy as np

from shearmhd import (WeightParams, classify_pair, dq_ratio, in_S_t,
                      lambda_at, log_A, log_J, log_m, log_mL, log_q,
                      resonance_layout)

params = WeightParams()
print(f"params: N={params.N}, s={params.s}, lambda0={params.lambda0}, "
      f"rho={params.rho}")

print("\nGevrey radius decay:")
for t in [0.0, 1.0, 10.0, 100.0]:
    print(f"  lambda({t:>5g}) = {lambda_at(t, params):.6f}")

eta = 500.0
kmax = int(np.floor(eta ** (1 / 3)))
print(f"\nresonant staircase for eta = {eta:g} (k = {kmax}..1):")
for k in range(kmax, 0, -1):
    lay = resonance_layout(k, eta)
    print(f"  k={k}: critical time {lay.center:8.1f}, interval half-width "
          f"{(lay.t_plus - lay.t_minus) / 2:7.2f}, a = {lay.a:.3f}")

print(f"\nlog q(t, 1, {eta:g}) along the cascade (q = 1 after 2 eta):")
for t in [0.0, eta / 5, eta / 2, eta, 1.5 * eta, 2.5 * eta]:
    lq = log_q(t, 1, eta, params)
    rate = dq_ratio(t, 1, eta, params)
    print(f"  t = {t:7.1f}: log q = {lq:9.4f}, d/dt log q = {rate:.4f}")

print("\nweights at a mid-cascade point (t = eta/2, k = 2):")
t, k = eta / 2, 2
print(f"  log m_L = {log_mL(t, k, eta, params):9.3f}")
print(f"  log m   = {log_m(t, k, eta, params):9.3f}")
print(f"  log J   = {log_J(t, k, eta, params):9.3f}")
print(f"  log A   = {log_A(t, k, eta, params):9.3f}")

print("\nfrequency-pair classifier (paraproduct regions):")
for (k, e, l, x) in [(10, 0.0, 1, 0.0), (10, 0.0, 10, -1.0), (3, 1.0, 2, 1.5)]:
    print(f"  (k,eta)=({k},{e}), (l,xi)=({l},{x}) -> {classify_pair(k, e, l, x)}")
print("in_S_t(1, 3, 4):", in_S_t(1.0, 3, 4.0))
