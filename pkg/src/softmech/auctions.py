"""Reserve-price auction harness with soft-max price selection and IC audit.

The ground mechanisms are posted/second-price auctions at reserve prices on a
geometric grid below the value ceiling H.  A soft-max selector applied to the
per-reserve revenue vector picks the price to run; because the per-bidder
influence on that vector is bounded and the selector is smooth, the combined
mechanism is approximately incentive compatible, which ``ic_audit`` verifies
by exhaustive expected-utility enumeration on small instances.

Instance file format: JSON object {"H": number, "k": int, "bids": [numbers]}.
k equal to the number of bidders means unlimited supply (digital goods).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .mechanisms import MechanismSpec
from .seeding import spawn_rng
from .simplex import SUPPORT_EPS

_AUDIT_MAX_BIDDERS = 6
_AUDIT_MAX_GRID = 12


@dataclass(frozen=True)
class AuctionInstance:
    """Bid profile with value ceiling H and supply of identical items."""

    bids: np.ndarray
    H: float
    supply_k: int

    def __post_init__(self):
        bids = np.asarray(self.bids, dtype=float)
        object.__setattr__(self, "bids", bids)
        if bids.ndim != 1 or bids.size < 1:
            raise ValueError("need at least one bid")
        if self.H <= 0:
            raise ValueError("H must be positive")
        if np.any(bids < 0) or np.any(bids > self.H):
            raise ValueError("bids must lie in [0, H]")
        if not 1 <= self.supply_k <= bids.size:
            raise ValueError("supply_k must be in [1, number of bidders]")

    @property
    def n(self) -> int:
        return int(self.bids.size)

    @property
    def unlimited(self) -> bool:
        return self.supply_k >= self.n


def load_auction_json(path) -> AuctionInstance:
    with open(path, encoding="utf-8") as fh:
        spec = json.load(fh)
    try:
        return AuctionInstance(np.asarray(spec["bids"], dtype=float), float(spec["H"]), int(spec["k"]))
    except KeyError as exc:
        raise ValueError(f"{path}: missing auction field {exc}") from None


@dataclass(frozen=True)
class PriceGrid:
    """Descending geometric reserve prices H(1-delta)^i down to the floor.

    ``floor_alpha`` is the realized smallest grid price (at or below the
    requested floor).
    """

    prices: np.ndarray
    delta_price: float
    floor_alpha: float
    H: float

    @property
    def size(self) -> int:
        return int(self.prices.size)


def reserve_grid(H: float, delta_price: float, floor_alpha: float) -> PriceGrid:
    """Grid p_i = H(1-delta)^i, stopping at the first price <= floor_alpha.

    Needs 0 < delta_price <= 1/2 and 0 < floor_alpha < H; the resulting size
    is at most 2 log(H/alpha)/delta_price.
    """
    if H <= 0:
        raise ValueError("H must be positive")
    if not 0 < delta_price <= 0.5:
        raise ValueError("delta_price must be in (0, 1/2]")
    if not 0 < floor_alpha < H:
        raise ValueError("floor_alpha must be in (0, H)")
    prices = []
    p = H
    while True:
        p *= 1.0 - delta_price
        prices.append(p)
        if p <= floor_alpha:
            break
    return PriceGrid(np.array(prices), delta_price, float(prices[-1]), H)


def revenue_of_reserve(inst: AuctionInstance, r: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Revenue, win indicators and payments of the reserve-r ground auction.

    Unlimited supply: every bidder at or above r wins and pays r.  Limited
    supply: the top min(k, #eligible) bidders win (ties to the lower index)
    and each pays max(r, (k+1)-th highest bid overall), the uniform price
    that keeps the ground auction truthful.
    """
    if not 0 < r <= inst.H:
        raise ValueError("reserve must be in (0, H]")
    bids = inst.bids
    wins = np.zeros(inst.n, dtype=bool)
    payments = np.zeros(inst.n)
    eligible = bids >= r
    if inst.unlimited:
        wins[:] = eligible
        payments[wins] = r
    else:
        order = np.lexsort((np.arange(inst.n), -bids))
        winners = [i for i in order if eligible[i]][: inst.supply_k]
        desc = np.sort(bids)[::-1]
        runner_up = desc[inst.supply_k] if inst.n > inst.supply_k else 0.0
        price = max(r, float(runner_up))
        wins[winners] = True
        payments[winners] = price
    return float(payments.sum()), wins, payments


def revenue_vector(inst: AuctionInstance, grid: PriceGrid) -> np.ndarray:
    """Per-grid-price revenue; the input the price selector sees."""
    return np.array([revenue_of_reserve(inst, p)[0] for p in grid.prices])


@dataclass(frozen=True)
class MechanismOutcome:
    chosen_price_index: int
    selection_distribution: np.ndarray
    revenue: float
    allocations: np.ndarray
    payments: np.ndarray


def soft_maximizer(inst: AuctionInstance, grid: PriceGrid, mech: MechanismSpec, rng_seed: int) -> MechanismOutcome:
    """Run the soft-max selector on the revenue vector and realize one price."""
    x = revenue_vector(inst, grid)
    if grid.size == 1:
        dist = np.array([1.0])
    else:
        dist = mech(x)
    rng = spawn_rng(rng_seed, 0)
    idx = int(rng.choice(grid.size, p=dist))
    revenue, wins, payments = revenue_of_reserve(inst, float(grid.prices[idx]))
    return MechanismOutcome(idx, dist, revenue, wins, payments)


def sensitivity_l1_revenue(grid: PriceGrid) -> float:
    """Worst-case l1 change of the revenue vector when one bid changes.

    One bidder contributes at most p_i to the revenue at each grid price, so
    the total change is at most sum_i H(1-delta)^i <= (1/delta - 1) H.  This
    is the posted-price (unlimited supply) accounting; a limited-supply
    uniform price can move by more.
    """
    return (1.0 / grid.delta_price - 1.0) * grid.H


def ic_epsilon_for(mech: MechanismSpec, grid: PriceGrid, H: float) -> float:
    """Incentive-compatibility slack L * S1(revenue) in H-normalized utility.

    L is the selector's (l1, l1)-Lipschitz constant: 4/eta for the
    piecewise-linear selector (p=1 bound), 2*lambda for the exponential one.
    A unilateral misreport moves the revenue vector by at most S1, hence the
    selection distribution by L*S1 in l1, hence any bidder's expected
    utility (scaled to [0,1] by H) by at most L*S1.
    """
    if mech.kind == "plsoftmax":
        lipschitz = 4.0 / mech.param
    elif mech.kind == "exp":
        lipschitz = 2.0 * mech.param
    else:
        raise ValueError("IC bound available for plsoftmax and exp selectors only")
    if H <= 0:
        raise ValueError("H must be positive")
    return lipschitz * sensitivity_l1_revenue(grid)


def _expected_utility(true_value: float, bidder: int, reported: np.ndarray, inst: AuctionInstance,
                      grid: PriceGrid, dist: np.ndarray) -> float:
    total = 0.0
    shadow = AuctionInstance(reported, inst.H, inst.supply_k)
    for j, p in enumerate(grid.prices):
        if dist[j] == 0.0:
            continue
        _, wins, payments = revenue_of_reserve(shadow, float(p))
        if wins[bidder]:
            total += dist[j] * (true_value - payments[bidder])
    return total


def ic_audit(inst: AuctionInstance, grid: PriceGrid, mech: MechanismSpec,
             resolution: int = 101) -> tuple[float, list[tuple[int, float, float]]]:
    """Exhaustive deviation audit: max H-normalized expected-utility gain.

    For every bidder and every deviation bid on a uniform grid of [0, H],
    computes the exact expected utility (sum over the selection distribution)
    against truthful reporting.  Returns the max gain and per-deviation
    records (bidder, deviation_bid, utility_gain).  Instances beyond 6
    bidders or 12 grid prices are refused; the enumeration is exact, no
    sampling is involved.
    """
    if inst.n > _AUDIT_MAX_BIDDERS or grid.size > _AUDIT_MAX_GRID:
        raise ValueError(
            f"audit capacity exceeded (n <= {_AUDIT_MAX_BIDDERS}, grid <= {_AUDIT_MAX_GRID})"
        )
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    truthful_dist = mech(revenue_vector(inst, grid))
    records = []
    max_gain = 0.0
    for i in range(inst.n):
        true_value = float(inst.bids[i])
        base = _expected_utility(true_value, i, inst.bids, inst, grid, truthful_dist)
        for dev in np.linspace(0.0, inst.H, resolution):
            reported = inst.bids.copy()
            reported[i] = dev
            dist = mech(revenue_vector(AuctionInstance(reported, inst.H, inst.supply_k), grid))
            gain = (_expected_utility(true_value, i, reported, inst, grid, dist) - base) / inst.H
            records.append((i, float(dev), float(gain)))
            max_gain = max(max_gain, gain)
    return float(max_gain), records


def worst_case_revenue_check(inst: AuctionInstance, grid: PriceGrid, mech: MechanismSpec,
                             eta: float | None = None, tol: float = 1e-9) -> bool:
    """True iff every price in the selector's support earns at least
    (1 - delta_price) * best-grid-revenue - eta.

    The discretization forfeits a (1 - delta_price) factor and the soft
    selection forfeits eta; the piecewise-linear selector meets this on every
    realizable outcome, while a full-support selector generally does not.
    eta defaults to the plsoftmax parameter.
    """
    if eta is None:
        if mech.kind != "plsoftmax":
            raise ValueError("eta must be given explicitly for non-plsoftmax selectors")
        eta = mech.param
    x = revenue_vector(inst, grid)
    dist = mech(x)
    support = dist > SUPPORT_EPS
    threshold = (1.0 - grid.delta_price) * float(x.max()) - eta - tol
    return bool(np.all(x[support] >= threshold))


def write_audit_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bidder,deviation_bid,utility_gain\n")
        for bidder, dev, gain in records:
            fh.write(f"{bidder},{dev:.12g},{gain:.12g}\n")
