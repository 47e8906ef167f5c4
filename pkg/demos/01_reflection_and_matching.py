"""Reflection responses of one atom-cavity system and the matching rules.

Walks through the basic objects: the two qubit-state reflection curves,
the external-coupling rule that balances them, and the success-probability
cost of trading the mirror reflectivity for unit conditional fidelity.
"""

import math

import numpy as np

from capsim import (InterfaceOptics, caps_longpulse, delay_matched_params,
                    r_opt, reflection_r0, reflection_r1)

GAMMA = 2 * math.pi * 0.24e6  # telecom-band alkaline-earth transition

params = delay_matched_params(100, GAMMA)
print("Delay- and reflectivity-matched system at C_in = 100:")
print(f"  g/2pi        = {params.g / (2 * math.pi) / 1e6:8.3f} MHz")
print(f"  kappa_in/2pi = {params.kappa_in / (2 * math.pi) / 1e6:8.3f} MHz")
print(f"  kappa_ex/2pi = {params.kappa_ex / (2 * math.pi) / 1e6:8.3f} MHz"
      f"   (= kappa_in * sqrt(1 + 2 C_in))")

print("\nOn-resonance reflection amplitudes (balanced by construction):")
print(f"  r_0(0) = {reflection_r0(params, 0.0).real:+.5f}")
print(f"  r_1(0) = {reflection_r1(params, 0.0).real:+.5f}")
print(f"  r_opt  = {r_opt(100):+.5f}")

print("\nReflection curves |r_j|^2 and phases across the linewidth:")
print(f"{'delta/gamma':>12} {'|r0|^2':>8} {'|r1|^2':>8} {'arg r0':>8} {'arg r1':>8}")
for d in np.linspace(-40, 40, 9):
    r0 = reflection_r0(params, d * GAMMA)
    r1 = reflection_r1(params, d * GAMMA)
    print(f"{d:12.1f} {abs(r0) ** 2:8.4f} {abs(r1) ** 2:8.4f} "
          f"{np.angle(r0):8.3f} {np.angle(r1):8.3f}")

print("\nSuccess probability: full mirror vs matched mirror")
print(f"{'C_in':>6} {'P (r_m = 1)':>12} {'1 - F_c':>10} {'P (matched)':>12} {'F_c':>5}")
for c_in in (1, 3, 10, 30, 100, 300):
    p = delay_matched_params(c_in, GAMMA)
    conv = caps_longpulse(p, InterfaceOptics(r_m=1.0))
    opt = caps_longpulse(p, InterfaceOptics(r_m=r_opt(c_in)))
    print(f"{c_in:6d} {conv.p_success:12.4f} {conv.infidelity:10.2e} "
          f"{opt.p_success:12.4f} {opt.f_c:5.2f}")

print("\nThe matched mirror sacrifices success probability (P -> 2P - 1)")
print("for conditional fidelity exactly 1 in the long-pulse limit.")
