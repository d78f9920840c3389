"""Matroids extracted from subdivision cells: exchange checks, quotients,
concordance, and the cell-concordance experiment runner.

The quotient test follows the basis-level definition (for every basis B
of the higher matroid and i outside B there is a basis B' <= B of the
lower matroid whose repair sets nest); an independent flats-based oracle
is kept alongside it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

from .core import DomainError, Subset, enumerate_subsets
from .geometry import (
    Cell,
    Edge,
    WeightedConfig,
    delta_edges,
    edges_of_polytope,
    make_edge,
    subdivision_cells,
)
from .realization import random_flag_matrix
from .tropical import (
    FlagInstance,
    PluckerVector,
    check_incidence,
    check_plucker,
)

ENUMERATION_BUDGET = 5  # largest ground set enumerate_matroids accepts by default


@dataclass(frozen=True)
class Matroid:
    """A matroid given by its bases; exchange is enforced at construction."""

    n: int
    rank: int
    bases: tuple[Subset, ...]

    def __post_init__(self):
        ok, witness = is_matroid(self.n, self.rank, self.bases)
        if not ok:
            raise DomainError(f"basis exchange fails at {describe_exchange_witness(witness)}")

    @classmethod
    def from_bases(cls, n: int, bases) -> "Matroid":
        bases = tuple(sorted(set(bases), key=lambda b: b.key))
        if not bases:
            raise DomainError("a matroid needs at least one basis")
        return cls(n, bases[0].card, bases)

    @classmethod
    def from_members(cls, n: int, families) -> "Matroid":
        return cls.from_bases(n, (Subset.from_members(n, f) for f in families))

    def basis_set(self) -> frozenset[Subset]:
        return frozenset(self.bases)


def uniform_matroid(n: int, rank: int) -> Matroid:
    return Matroid.from_bases(n, enumerate_subsets(n, rank))


def describe_exchange_witness(witness) -> str:
    if witness is None:
        return "no witness"
    b1, b2, x = witness
    return f"(B1={b1}, B2={b2}, x={x})"


def is_matroid(n: int, rank: int, bases) -> tuple[bool, tuple[Subset, Subset, int] | None]:
    """Basis exchange check: for B1, B2 and x in B1\\B2 some y in B2\\B1
    has B1 - x + y among the bases.  Returns (ok, witness)."""
    family = sorted(set(bases), key=lambda b: b.key)
    if not family:
        raise DomainError("basis family must be nonempty")
    for b in family:
        if b.n != n:
            raise DomainError(f"basis {b} not on ground set [{n}]")
        if b.card != rank:
            raise DomainError(f"mixed cardinalities: {b} has size {b.card}, expected {rank}")
    masks = {b.mask for b in family}
    for b1 in family:
        for b2 in family:
            out_mask = b1.mask & ~b2.mask
            if not out_mask:
                continue
            in_mask = b2.mask & ~b1.mask
            for x in Subset(n, out_mask):
                base = b1.mask & ~(1 << (x - 1))
                if not any(base | (1 << (y - 1)) in masks for y in Subset(n, in_mask)):
                    return False, (b1, b2, x)
    return True, None


def is_quotient(m_low: Matroid, m_high: Matroid) -> tuple[bool, tuple[Subset, int] | None]:
    """Basis-level quotient test: is m_low a quotient of m_high?

    For every basis B of m_high and i outside B there must be a basis
    B' <= B of m_low whose repair set {j : B' + i - j is a basis} is
    contained in the repair set of B.  Containments are non-strict, so
    every matroid is a quotient of itself.  Returns (ok, witness (B, i)).
    """
    if m_low.n != m_high.n:
        raise DomainError(f"ground-set mismatch: [{m_low.n}] vs [{m_high.n}]")
    if m_low.rank > m_high.rank:
        raise DomainError(
            f"quotient candidate has rank {m_low.rank} > {m_high.rank}; wrong order"
        )
    n = m_low.n
    high = {b.mask for b in m_high.bases}
    low = {b.mask for b in m_low.bases}
    low_subsets = sorted(low)
    for b in m_high.bases:
        for i in range(1, n + 1):
            if i in b:
                continue
            bit = 1 << (i - 1)
            extended = b.mask | bit
            left = _repair_set(extended, high, n)
            found = False
            for b_low in low_subsets:
                if b_low & ~b.mask:
                    continue
                right = _repair_set(b_low | bit, low, n)
                if right & ~left == 0:
                    found = True
                    break
            if not found:
                return False, (b, i)
    return True, None


def _repair_set(extended_mask: int, basis_masks: set[int], n: int) -> int:
    """Mask of j in the extended set whose removal lands in basis_masks."""
    out = 0
    rest = extended_mask
    while rest:
        bit = rest & -rest
        rest ^= bit
        if extended_mask ^ bit in basis_masks:
            out |= bit
    return out


def matroid_rank(m: Matroid, subset_mask: int) -> int:
    return max((subset_mask & b.mask).bit_count() for b in m.bases)


def closure(m: Matroid, subset_mask: int) -> int:
    r = matroid_rank(m, subset_mask)
    out = subset_mask
    for e in range(m.n):
        bit = 1 << e
        if not subset_mask & bit and matroid_rank(m, subset_mask | bit) == r:
            out |= bit
    return out


def flats(m: Matroid) -> tuple[Subset, ...]:
    """All flats (closed sets), by closing every subset of the ground set."""
    seen = set()
    for mask in range(1 << m.n):
        seen.add(closure(m, mask))
    return tuple(sorted((Subset(m.n, mask) for mask in seen), key=lambda s: s.key))


def is_quotient_via_flats(m_low: Matroid, m_high: Matroid) -> bool:
    """Strong-map oracle: m_low is a quotient of m_high iff every flat of
    m_low is a flat of m_high."""
    if m_low.n != m_high.n:
        raise DomainError(f"ground-set mismatch: [{m_low.n}] vs [{m_high.n}]")
    high_flats = {f.mask for f in flats(m_high)}
    return all(f.mask in high_flats for f in flats(m_low))


class LayerError(DomainError):
    """A concordance query received an unusable layer decomposition."""


def split_layers(vertices) -> tuple[int, dict[int, tuple[Subset, ...]]]:
    subsets = sorted({v if isinstance(v, Subset) else v.subset for v in vertices}, key=lambda s: s.key)
    if not subsets:
        raise LayerError("empty vertex set")
    n = subsets[0].n
    by_card: dict[int, list[Subset]] = {}
    for s in subsets:
        if s.n != n:
            raise LayerError("vertices on mixed ground sets")
        by_card.setdefault(s.card, []).append(s)
    return n, {card: tuple(group) for card, group in sorted(by_card.items())}


def is_concordant_polytope(vertices) -> bool:
    """Are the two layers of this vertex set concordant matroids?

    The lower layer plays the quotient candidate.  Raises LayerError when
    a layer is missing or fails basis exchange.
    """
    n, layers = split_layers(vertices)
    if len(layers) == 1:
        raise LayerError(f"layer q empty: only size-{next(iter(layers))} vertices present")
    if len(layers) != 2:
        raise LayerError(f"expected two layers, got sizes {sorted(layers)}")
    (p, bases_p), (q, bases_q) = sorted(layers.items())
    for card, family in ((p, bases_p), (q, bases_q)):
        ok, witness = is_matroid(n, card, family)
        if not ok:
            raise LayerError(
                f"layer {card} is not matroidal: exchange fails at {describe_exchange_witness(witness)}"
            )
    ok, _ = is_quotient(Matroid.from_bases(n, bases_p), Matroid.from_bases(n, bases_q))
    return ok


def internal_edges(vertices, p: int, q: int, n: int) -> tuple[Edge, ...]:
    """Edges of conv(vertices) that are not edges of Delta(p,q;n)."""
    subsets = sorted({v if isinstance(v, Subset) else v.subset for v in vertices}, key=lambda s: s.key)
    pairs = edges_of_polytope([s.indicator() for s in subsets])
    ambient = delta_edges(p, q, n)
    extra = [
        make_edge(subsets[i], subsets[j])
        for i, j in pairs
        if make_edge(subsets[i], subsets[j]) not in ambient
    ]
    return tuple(sorted(extra, key=lambda e: (e[0].key, e[1].key)))


@dataclass(frozen=True)
class CellAnalysis:
    """Matroid-level summary of one maximal cell."""

    cell: Cell
    bases_p: tuple[Subset, ...]
    bases_q: tuple[Subset, ...]
    matroidal_p: bool
    matroidal_q: bool
    exchange_witness_p: tuple[Subset, Subset, int] | None
    exchange_witness_q: tuple[Subset, Subset, int] | None
    concordant: bool | None
    quotient_witness: tuple[Subset, int] | None
    internal_edges: tuple[Edge, ...]

    @property
    def edge_free(self) -> bool:
        return not self.internal_edges

    @property
    def applicable(self) -> bool:
        return self.concordant is not None


def analyze_cells(cfg: WeightedConfig, method: str = "auto") -> tuple[CellAnalysis, ...]:
    """Full per-cell matroid analysis of the induced subdivision.

    Works whether or not the weights satisfy the relations; cells with an
    empty layer skip the concordance check (concordant = None).
    """
    subdivision = subdivision_cells(cfg, method)
    ambient = delta_edges(cfg.p, cfg.q, cfg.n)
    out = []
    for cell in subdivision.cells:
        bases_p = cell.layer_subsets(cfg.p)
        bases_q = cell.layer_subsets(cfg.q)
        witness_p = witness_q = None
        matroidal_p = matroidal_q = False
        if bases_p:
            matroidal_p, witness_p = is_matroid(cfg.n, cfg.p, bases_p)
        if bases_q:
            matroidal_q, witness_q = is_matroid(cfg.n, cfg.q, bases_q)
        concordant = None
        quotient_witness = None
        if bases_p and bases_q and matroidal_p and matroidal_q:
            concordant, quotient_witness = is_quotient(
                Matroid.from_bases(cfg.n, bases_p), Matroid.from_bases(cfg.n, bases_q)
            )
        pairs = edges_of_polytope([v.coords for v in cell.vertices])
        extra = tuple(
            sorted(
                (
                    make_edge(cell.vertices[i].subset, cell.vertices[j].subset)
                    for i, j in pairs
                    if make_edge(cell.vertices[i].subset, cell.vertices[j].subset) not in ambient
                ),
                key=lambda e: (e[0].key, e[1].key),
            )
        )
        out.append(
            CellAnalysis(
                cell,
                bases_p,
                bases_q,
                matroidal_p,
                matroidal_q,
                witness_p,
                witness_q,
                concordant,
                quotient_witness,
                extra,
            )
        )
    return tuple(out)


def enumerate_matroids(n: int, rank: int, allow_large: bool = False) -> tuple[Matroid, ...]:
    """Every matroid of the given rank on [n], by filtering all nonempty
    basis families through the exchange check.  Guarded at n <= 5."""
    if n > ENUMERATION_BUDGET and not allow_large:
        raise DomainError(
            f"enumerate_matroids(n={n}) exceeds the budget guard (n <= {ENUMERATION_BUDGET}); "
            "pass allow_large=True to override"
        )
    subsets = enumerate_subsets(n, rank)
    count = comb(n, rank)
    out = []
    for picks in range(1, 1 << count):
        family = tuple(subsets[i] for i in range(count) if picks >> i & 1)
        ok, _ = is_matroid(n, rank, family)
        if ok:
            out.append(Matroid(n, rank, family))
    return tuple(out)


# ---------------------------------------------------------------------------
# The cell-concordance experiment.

RANDOM_WEIGHT_PALETTE = (0, 0, 0, 0, 0, 1, 1, 2)
RESAMPLE_BUDGET = 50_000


class TrialGenerationError(RuntimeError):
    def __init__(self, trial: int, message: str):
        super().__init__(f"trial {trial}: {message}")
        self.trial = trial


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    flag: FlagInstance
    analyses: tuple[CellAnalysis, ...]
    resamples: int


@dataclass(frozen=True)
class ExperimentReport:
    """Tally of (edge-free, concordant) over all applicable cells.

    Off-diagonal cells are reported in full as counterexample records;
    the report takes no position on whether the equivalence holds in
    general.
    """

    n: int
    p: int
    q: int
    trials: int
    seed: int
    mode: str
    quadrants: dict[str, int]
    cells_total: int
    skipped_na: int
    resamples_total: int
    counterexamples: tuple[dict, ...]
    outcomes: tuple[TrialOutcome, ...]


def _random_valid_flag(n: int, p: int, q: int, rng: random.Random, budget: int):
    kp = comb(n, p)
    kq = comb(n, q)
    for attempt in range(budget):
        x = PluckerVector.from_values(n, p, [rng.choice(RANDOM_WEIGHT_PALETTE) for _ in range(kp)])
        y = PluckerVector.from_values(n, q, [rng.choice(RANDOM_WEIGHT_PALETTE) for _ in range(kq)])
        if check_plucker(x) or check_plucker(y) or check_incidence(x, y):
            continue
        return FlagInstance((x, y)), attempt
    raise RuntimeError(f"no relation-satisfying draw within {budget} attempts")


def run_trial(n: int, p: int, q: int, trial: int, seed: int, mode: str) -> TrialOutcome:
    trial_seed = seed + trial
    if mode == "random-weights":
        rng = random.Random(trial_seed)
        try:
            flag, resamples = _random_valid_flag(n, p, q, rng, RESAMPLE_BUDGET)
        except RuntimeError as exc:
            raise TrialGenerationError(trial, str(exc)) from exc
    elif mode == "realizable":
        try:
            matrix = random_flag_matrix(n, (p, q), trial_seed)
        except Exception as exc:
            raise TrialGenerationError(trial, str(exc)) from exc
        flag = matrix.tropicalized_layers()
        resamples = matrix.resamples
    else:
        raise DomainError(f"unknown experiment mode {mode!r}")
    analyses = analyze_cells(WeightedConfig.from_flag(flag))
    return TrialOutcome(trial, flag, analyses, resamples)


def possibility_experiment(
    n: int, p: int, q: int, trials: int, seed: int, mode: str
) -> ExperimentReport:
    """Search for cells where edge-freeness and concordance disagree."""
    quadrants = {
        "edge_free_concordant": 0,
        "edge_free_discordant": 0,
        "edged_concordant": 0,
        "edged_discordant": 0,
    }
    cells_total = 0
    skipped = 0
    resamples_total = 0
    counterexamples = []
    outcomes = []
    for trial in range(trials):
        outcome = run_trial(n, p, q, trial, seed, mode)
        outcomes.append(outcome)
        resamples_total += outcome.resamples
        for analysis in outcome.analyses:
            cells_total += 1
            if not analysis.applicable:
                skipped += 1
                continue
            edge_free = analysis.edge_free
            concordant = analysis.concordant
            key = ("edge_free_" if edge_free else "edged_") + (
                "concordant" if concordant else "discordant"
            )
            quadrants[key] += 1
            if edge_free != concordant:
                counterexamples.append(counterexample_record(outcome, analysis))
    return ExperimentReport(
        n,
        p,
        q,
        trials,
        seed,
        mode,
        quadrants,
        cells_total,
        skipped,
        resamples_total,
        tuple(counterexamples),
        tuple(outcomes),
    )


def counterexample_record(outcome: TrialOutcome, analysis: CellAnalysis) -> dict:
    """Replayable record of one off-diagonal cell (full instance embedded)."""
    from .files import instance_to_dict

    witness = analysis.quotient_witness
    return {
        "trial": outcome.trial,
        "instance": instance_to_dict(outcome.flag),
        "cell": [str(v.subset) for v in analysis.cell.vertices],
        "bases_p": [str(b) for b in analysis.bases_p],
        "bases_q": [str(b) for b in analysis.bases_q],
        "edge_free": analysis.edge_free,
        "concordant": analysis.concordant,
        "internal_edges": [[str(a), str(b)] for a, b in analysis.internal_edges],
        "quotient_witness": None if witness is None else {"B": str(witness[0]), "i": witness[1]},
    }


def replay_counterexample(record: dict) -> dict:
    """Recompute a counterexample record from its embedded instance."""
    from .files import instance_from_dict

    flag, _ = instance_from_dict(record["instance"])
    cfg = WeightedConfig.from_flag(flag)
    wanted = list(record["cell"])
    for analysis in analyze_cells(cfg):
        if [str(v.subset) for v in analysis.cell.vertices] == wanted:
            fake_outcome = TrialOutcome(record["trial"], flag, (), 0)
            return counterexample_record(fake_outcome, analysis)
    raise DomainError("recorded cell does not appear in the replayed subdivision")
