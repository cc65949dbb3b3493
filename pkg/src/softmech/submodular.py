"""Private greedy maximization of coverage under a cardinality constraint.

A coverage instance is a family of element sets over a finite universe; the
objective of a selection is the size of its union (monotone submodular).  The
private greedy loop replaces the argmax step with a soft-max draw over the
marginal gains, recording the exact per-step selection distributions, and the
manipulation test measures how much those distributions move when the ground
set is randomly thinned.

Set-family file format: one line per set, whitespace-separated nonnegative
integer element ids, blank lines ignored, UTF-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .distances import renyi_divergence
from .mechanisms import MechanismSpec
from .seeding import spawn_rng

_BRUTE_FORCE_CAP = 10**6


@dataclass(frozen=True)
class CoverageInstance:
    """Family of element-id sets over the universe [0, universe_size)."""

    universe_size: int
    sets: tuple[tuple[int, ...], ...]
    masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.universe_size < 1:
            raise ValueError("universe_size must be >= 1")
        if len(self.sets) < 2:
            raise ValueError("need at least 2 sets")
        masks = []
        for s in self.sets:
            mask = 0
            for e in s:
                if not 0 <= e < self.universe_size:
                    raise ValueError(f"element id {e} outside universe [0, {self.universe_size})")
                mask |= 1 << e
            masks.append(mask)
        object.__setattr__(self, "masks", tuple(masks))

    @property
    def num_sets(self) -> int:
        return len(self.sets)


def make_instance(universe_size: int, sets) -> CoverageInstance:
    return CoverageInstance(universe_size, tuple(tuple(int(e) for e in s) for s in sets))


def synthetic_coverage_instance(
    num_sets: int, universe_size: int, rng_seed: int, size_exponent: float = 0.8
) -> CoverageInstance:
    """Random instance with power-law set sizes: the rank-i set has about
    (universe/3) * (i+1)**-size_exponent elements drawn without replacement."""
    rng = spawn_rng(rng_seed, 0)
    top = max(2, universe_size // 3)
    sets = []
    for i in range(num_sets):
        size = max(1, int(round(top * (i + 1) ** (-size_exponent))))
        sets.append(sorted(rng.choice(universe_size, size=size, replace=False).tolist()))
    return make_instance(universe_size, sets)


def load_set_family(path, universe_size: int | None = None) -> CoverageInstance:
    """Read the one-line-per-set text format; universe defaults to max id + 1."""
    sets = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                ids = [int(tok) for tok in line.split()]
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
            if any(e < 0 for e in ids):
                raise ValueError(f"{path}: line {ln}: negative element id")
            sets.append(ids)
    if not sets:
        raise ValueError(f"{path}: no sets found")
    if universe_size is None:
        universe_size = 1 + max((max(s) for s in sets if s), default=0)
    return make_instance(universe_size, sets)


def save_set_family(inst: CoverageInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in inst.sets:
            fh.write(" ".join(str(e) for e in s) + "\n")


def _union_mask(inst: CoverageInstance, items) -> int:
    mask = 0
    for v in items:
        if not 0 <= v < inst.num_sets:
            raise ValueError(f"item index {v} out of range")
        mask |= inst.masks[v]
    return mask


def coverage_value(inst: CoverageInstance, items) -> int:
    """Number of universe elements covered by the union of the chosen sets."""
    return _union_mask(inst, items).bit_count()


def marginal_gains(inst: CoverageInstance, selected) -> tuple[list[int], np.ndarray]:
    """Remaining item indices and their marginal coverage gains at ``selected``."""
    covered = _union_mask(inst, selected)
    chosen = set(selected)
    items = [v for v in range(inst.num_sets) if v not in chosen]
    gains = np.array([(inst.masks[v] | covered).bit_count() - covered.bit_count() for v in items], dtype=float)
    return items, gains


@dataclass
class SelectionTrace:
    """Chosen items with the per-step selection distributions that produced them."""

    chosen: list[int]
    step_items: list[list[int]]
    step_distributions: list[np.ndarray]
    objective_values: list[int]


def _mechanism_distribution(mech: MechanismSpec, gains: np.ndarray) -> np.ndarray:
    """Selection distribution over remaining items; uniform when the power
    mechanism sees all-zero gains (no choice can improve the objective)."""
    if mech.kind == "pow" and not np.any(gains > 0):
        return np.full(gains.size, 1.0 / gains.size)
    return mech(gains)


def greedy(inst: CoverageInstance, k: int) -> SelectionTrace:
    """Deterministic argmax greedy, ties to the lowest item index."""
    if not 1 <= k <= inst.num_sets:
        raise ValueError("need 1 <= k <= number of sets")
    trace = SelectionTrace([], [], [], [])
    for _ in range(k):
        items, gains = marginal_gains(inst, trace.chosen)
        best = int(np.argmax(gains))  # first occurrence wins ties
        dist = np.zeros(len(items))
        dist[best] = 1.0
        trace.step_items.append(items)
        trace.step_distributions.append(dist)
        trace.chosen.append(items[best])
        trace.objective_values.append(coverage_value(inst, trace.chosen))
    return trace


def private_greedy(inst: CoverageInstance, k: int, mech: MechanismSpec, rng_seed: int) -> SelectionTrace:
    """Greedy loop with the argmax replaced by a soft-max draw over gains.

    Accepts the exponential and power mechanisms.  Each step applies the
    mechanism to the gain vector restricted to the remaining items, records
    the exact distribution, and samples one item; deterministic per seed.
    """
    if mech.kind not in ("exp", "pow"):
        raise ValueError("private greedy expects an exp or pow mechanism")
    if not 1 <= k <= inst.num_sets:
        raise ValueError("need 1 <= k <= number of sets")
    rng = spawn_rng(rng_seed, 1)
    trace = SelectionTrace([], [], [], [])
    for _ in range(k):
        items, gains = marginal_gains(inst, trace.chosen)
        dist = _mechanism_distribution(mech, gains)
        pick = items[int(rng.choice(len(items), p=dist))]
        trace.step_items.append(items)
        trace.step_distributions.append(dist)
        trace.chosen.append(pick)
        trace.objective_values.append(coverage_value(inst, trace.chosen))
    return trace


def first_step_distribution(inst: CoverageInstance, mech: MechanismSpec) -> np.ndarray:
    """Exact distribution of the first pick (all items still available)."""
    _, gains = marginal_gains(inst, [])
    return _mechanism_distribution(mech, gains)


def brute_force_opt(inst: CoverageInstance, k: int) -> tuple[int, tuple[int, ...]]:
    """Exhaustive optimum; refuses more than 10^6 candidate subsets."""
    if not 1 <= k <= inst.num_sets:
        raise ValueError("need 1 <= k <= number of sets")
    if math.comb(inst.num_sets, k) > _BRUTE_FORCE_CAP:
        raise ValueError(f"C({inst.num_sets},{k}) exceeds the enumeration cap {_BRUTE_FORCE_CAP}")
    best_val, best_set = -1, ()
    masks = inst.masks
    for combo in combinations(range(inst.num_sets), k):
        m = 0
        for v in combo:
            m |= masks[v]
        val = m.bit_count()
        if val > best_val:
            best_val, best_set = val, combo
    return best_val, best_set


@dataclass(frozen=True)
class PrivacyBudget:
    """Per-step and composed privacy parameters for a k-step loop.

    ``eps_total_advanced`` follows the stated composition expression
    (1/2) k^2 eps'^2 + sqrt(2 log(1/eta)) eps' verbatim;
    ``compose_privacy(..., standard_advanced=True)`` swaps in the textbook
    k eps'^2 / 2 + sqrt(2 k log(1/eta)) eps' form instead.
    """

    eps_step: float
    delta_step: float
    steps: int
    eta: float
    eps_total_basic: float
    delta_total_basic: float
    eps_total_advanced: float
    delta_total: float


def compose_privacy(
    eps_step: float, delta_step: float, steps: int, eta: float, standard_advanced: bool = False
) -> PrivacyBudget:
    """Basic and advanced composition over ``steps`` rounds."""
    if eps_step <= 0 or delta_step < 0 or steps < 1 or not 0 < eta < 1:
        raise ValueError("need eps_step > 0, delta_step >= 0, steps >= 1, eta in (0,1)")
    if standard_advanced:
        adv = 0.5 * steps * eps_step**2 + math.sqrt(2.0 * steps * math.log(1.0 / eta)) * eps_step
    else:
        adv = 0.5 * (steps * eps_step) ** 2 + math.sqrt(2.0 * math.log(1.0 / eta)) * eps_step
    return PrivacyBudget(
        eps_step=eps_step,
        delta_step=delta_step,
        steps=steps,
        eta=eta,
        eps_total_basic=steps * eps_step,
        delta_total_basic=steps * delta_step,
        eps_total_advanced=adv,
        delta_total=eta + steps * delta_step,
    )


def _check_neighbors(inst_a: CoverageInstance, inst_b: CoverageInstance) -> None:
    if inst_a.universe_size != inst_b.universe_size or inst_a.num_sets != inst_b.num_sets:
        raise ValueError("neighboring instances must share universe and set count")
    differing = sum(1 for a, b in zip(inst_a.masks, inst_b.masks) if a != b)
    if differing > 1:
        raise ValueError(f"instances differ in {differing} sets; neighbors differ in at most one")


def sensitivity_linf(inst_a: CoverageInstance, inst_b: CoverageInstance, contexts) -> float:
    """Max absolute marginal-gain change between one-record neighbors.

    ``contexts`` is an iterable of partial selections; the max runs over all
    of them and all remaining items.  For coverage the change is bounded by
    the size of the symmetric difference of the edited set.
    """
    _check_neighbors(inst_a, inst_b)
    worst = 0.0
    for selected in contexts:
        _, ga = marginal_gains(inst_a, selected)
        _, gb = marginal_gains(inst_b, selected)
        if ga.size:
            worst = max(worst, float(np.abs(ga - gb).max()))
    return worst


def _log_linf_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Sup-norm distance between log-gains; one-sided zeros give +inf and
    matching zeros are skipped."""
    gap = 0.0
    for x, y in zip(a, b):
        if x == 0.0 and y == 0.0:
            continue
        if x <= 0.0 or y <= 0.0:
            return float("inf")
        gap = max(gap, abs(math.log(x) - math.log(y)))
    return gap


def privacy_link_margin(inst_a: CoverageInstance, inst_b: CoverageInstance, mech: MechanismSpec, contexts=None) -> float:
    """Max over contexts of (selection-distribution max-divergence minus bound).

    The bound links smoothness to privacy: the power mechanism's divergence
    between neighbor selection distributions is at most lambda times the
    log-domain sup distance of the gain vectors; the exponential mechanism's
    is at most 2 lambda times the plain sup distance.  Nonpositive margins
    mean the link holds.
    """
    if mech.kind not in ("exp", "pow"):
        raise ValueError("privacy link applies to exp or pow mechanisms")
    _check_neighbors(inst_a, inst_b)
    if contexts is None:
        contexts = [[]]
    worst = float("-inf")
    for selected in contexts:
        _, ga = marginal_gains(inst_a, selected)
        _, gb = marginal_gains(inst_b, selected)
        if ga.size == 0:
            continue
        pa = _mechanism_distribution(mech, ga)
        pb = _mechanism_distribution(mech, gb)
        div = max(renyi_divergence(pa, pb, float("inf")), renyi_divergence(pb, pa, float("inf")))
        if mech.kind == "pow":
            bound = mech.param * _log_linf_gap(ga, gb)
        else:
            bound = 2.0 * mech.param * float(np.abs(ga - gb).max())
        margin = float("-inf") if np.isinf(bound) else div - bound
        worst = max(worst, margin)
    return worst


def insensitivity_t(inst_a: CoverageInstance, inst_b: CoverageInstance, s_inf: float, opt: float, contexts=None) -> float:
    """Largest t for which the one-record change keeps every shrinking gain
    above the (1 - (1/t) s_inf/opt) multiplicative floor.

    Larger t is a stronger property; +inf means no gain shrinks at all.
    """
    _check_neighbors(inst_a, inst_b)
    if s_inf <= 0 or opt <= 0:
        raise ValueError("s_inf and opt must be positive")
    if contexts is None:
        contexts = [[]]
    t_max = float("inf")
    for selected in contexts:
        _, ga = marginal_gains(inst_a, selected)
        _, gb = marginal_gains(inst_b, selected)
        for hi, lo in ((ga, gb), (gb, ga)):
            drop = hi > lo
            for h, l in zip(hi[drop], lo[drop]):
                if h <= 0:
                    continue
                t_max = min(t_max, (s_inf / opt) / (1.0 - l / h))
    return t_max


def pow_error_bound(k: int, d: int, eps: float, s_inf: float, opt: float, t: float = 1.0) -> float:
    """Closed-form approximation-loss fraction of the power-mechanism loop on
    t-multiplicatively-insensitive data: min(1/e + 2 sqrt(k) log(d) s_inf /
    (t eps opt), 1)."""
    if min(k, d) < 1 or eps <= 0 or s_inf < 0 or opt <= 0 or t <= 0:
        raise ValueError("bad bound arguments")
    return min(1.0 / math.e + 2.0 * math.sqrt(k) * math.log(d) * s_inf / (t * eps * opt), 1.0)


def exp_error_bound(k: int, d: int, eps: float, s_inf: float, opt: float) -> float:
    """Matching closed form for the exponential-mechanism loop: its loss term
    carries a factor k where the power mechanism carries 2 sqrt(k)."""
    if min(k, d) < 1 or eps <= 0 or s_inf < 0 or opt <= 0:
        raise ValueError("bad bound arguments")
    return min(1.0 / math.e + k * math.log(d) * s_inf / (eps * opt), 1.0)


def drop_elements(inst: CoverageInstance, drop_prob: float, rng: np.random.Generator) -> CoverageInstance:
    """Remove each universe element independently with probability drop_prob."""
    if not 0 <= drop_prob < 1:
        raise ValueError("drop_prob must be in [0, 1)")
    keep = rng.random(inst.universe_size) >= drop_prob
    sets = [[e for e in s if keep[e]] for s in inst.sets]
    return make_instance(inst.universe_size, sets)


def manipulation_records(inst: CoverageInstance, k: int, mech: MechanismSpec, drop_prob: float, seeds) -> list[dict]:
    """Per-seed manipulation results.

    Each seed thins the ground set, compares the exact first-pick
    distributions on the original vs thinned instance (l1 and sup distance),
    and runs the private greedy on the original instance to get its realized
    objective relative to the non-private greedy.
    """
    base = greedy(inst, k).objective_values[-1]
    records = []
    for seed in seeds:
        perturbed = drop_elements(inst, drop_prob, spawn_rng(seed, 0))
        p_orig = first_step_distribution(inst, mech)
        p_pert = first_step_distribution(perturbed, mech)
        run = private_greedy(inst, k, mech, seed)
        records.append(
            {
                "mechanism": mech.kind,
                "param": mech.param,
                "seed": int(seed),
                "obj_ratio": run.objective_values[-1] / base,
                "l1_dist": float(np.abs(p_orig - p_pert).sum()),
                "linf_dist": float(np.abs(p_orig - p_pert).max()),
            }
        )
    return records


def manipulation_test(inst: CoverageInstance, k: int, mech: MechanismSpec, drop_prob: float, seeds) -> tuple[float, float, float]:
    """Seed-averaged (objective ratio, l1 distance, sup distance)."""
    recs = manipulation_records(inst, k, mech, drop_prob, seeds)
    return (
        float(np.mean([r["obj_ratio"] for r in recs])),
        float(np.mean([r["l1_dist"] for r in recs])),
        float(np.mean([r["linf_dist"] for r in recs])),
    )
