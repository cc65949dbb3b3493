"""Soft-max reserve selection with an incentive-compatibility audit.

Run: python demos/04_reserve_auction.py
"""

import numpy as np

from softmech.auctions import (
    AuctionInstance,
    ic_audit,
    ic_epsilon_for,
    reserve_grid,
    revenue_vector,
    sensitivity_l1_revenue,
    soft_maximizer,
    worst_case_revenue_check,
)
from softmech.mechanisms import MechanismSpec

inst = AuctionInstance(np.array([0.92, 0.55, 0.5, 0.12]), H=1.0, supply_k=4)
grid = reserve_grid(H=1.0, delta_price=0.25, floor_alpha=0.15)
print(f"digital-goods instance, bids {inst.bids}, H=1")
print(f"reserve grid: {np.round(grid.prices, 4)}")
print(f"revenue per reserve: {np.round(revenue_vector(inst, grid), 4)}\n")

mech = MechanismSpec("plsoftmax", 0.3)
out = soft_maximizer(inst, grid, mech, rng_seed=0)
print(f"selector {mech.label()} puts mass {np.round(out.selection_distribution, 4)}")
print(f"sampled price {grid.prices[out.chosen_price_index]:.4f} -> revenue {out.revenue:.4f}")
print(f"every supported price is near-optimal: {worst_case_revenue_check(inst, grid, mech)}\n")

print("A unilateral misreport moves the revenue vector by at most")
print(f"S1 = (1/delta - 1) H = {sensitivity_l1_revenue(grid):.2f}, so the selection")
print("distribution (and hence anyone's expected utility) moves by at most")
print("L * S1. Exhaustive audit over a 101-point deviation grid:\n")
for mech in [MechanismSpec("plsoftmax", 8.0), MechanismSpec("exp", 0.2)]:
    eps = ic_epsilon_for(mech, grid, inst.H)
    gain, _ = ic_audit(inst, grid, mech, resolution=101)
    print(f"  {mech.label():18s} max deviation gain {gain:.5f} <= guaranteed slack {eps:.3f}")
