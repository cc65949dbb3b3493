"""Tour of the five selectors on one value vector.

Run: python demos/01_mechanisms_tour.py
"""

import numpy as np

from softmech import (
    additive_gap,
    build_softmax_matrix,
    exp_mechanism,
    log_plsoftmax,
    multiplicative_gap,
    multiplicative_guarantee,
    plsoftmax,
    power_mechanism,
    sparsemax,
    worst_case_support_ok,
)

x = np.array([3.0, 2.6, 2.1, 0.4])
print(f"option values x = {x}\n")

print("Each selector maps the values to a probability vector over the options;")
print("the additive gap max(x) - <x, p> measures how much value it gives up.\n")

rows = [
    ("exp, lambda=2", exp_mechanism(x, 2.0)),
    ("pow, lambda=4", power_mechanism(x, 4.0)),
    ("plsoftmax, delta=1", plsoftmax(x, 1.0)),
    ("logplsoftmax, delta=0.5", log_plsoftmax(x, 0.5)),
    ("sparsemax", sparsemax(x)),
]
for name, p in rows:
    gap = additive_gap(x, p)
    mult = multiplicative_gap(x, p)
    support = int(np.count_nonzero(p > 1e-12))
    print(f"{name:26s} p = {np.round(p, 4)}  gap = {gap:.4f}  mult = {mult:.4f}  support = {support}")

print("\nThe piecewise-linear selector guarantees its support never leaves the")
print("delta-neighborhood of the max, which the exponential one cannot:")
p_pl = plsoftmax(x, 1.0)
p_exp = exp_mechanism(x, 2.0)
print(f"  plsoftmax support ok (delta=1):   {worst_case_support_ok(x, p_pl, 1.0)}")
print(f"  exp support ok (same delta):      {worst_case_support_ok(x, p_exp, 1.0)}")

print("\nInvariances: exp/plsoftmax ignore shifts, pow/logplsoftmax ignore scales.")
print(f"  plsoftmax(x+10) == plsoftmax(x): {np.allclose(plsoftmax(x + 10, 1.0), p_pl)}")
print(f"  pow(5x) == pow(x):               {np.allclose(power_mechanism(5 * x, 4.0), power_mechanism(x, 4.0))}")
print(f"  log-domain multiplicative slack for delta=0.5: {multiplicative_guarantee(0.5):.4f} (< 0.5)")

print("\nThe linear pieces come from exact rational matrices with zero column")
print("sums; the k=3 matrix inside dimension 4:")
print(build_softmax_matrix(3, 4).to_float())
