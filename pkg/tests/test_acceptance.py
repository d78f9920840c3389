"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines live.
The heavy sweeps share seeded instance streams through module caches, so
the self-consistency criterion replays exactly the instances the earlier
criteria used.
"""

import random
from fractions import Fraction
from functools import lru_cache

from common import ex1_layers, random_vector, subsets
from tropflag.core import Subset, enumerate_subsets
from tropflag.files import canonical_json
from tropflag.geometry import (
    WeightedConfig,
    _lower_hull_edges,
    cell_intersections_are_faces,
    covers_all_vertices,
    edges_of_polytope,
    face_ST,
    pn_edge_profile,
    pn_transform,
    pn_vertices,
    skeleton_equal,
    skeleton_equal_single,
    subdivision_cells,
    subdivision_cells_single,
    subdivision_edges,
    subdivision_edges_single,
)
from tropflag.matroid import (
    Matroid,
    analyze_cells,
    counterexample_record,
    enumerate_matroids,
    internal_edges,
    is_quotient,
    is_quotient_via_flats,
    possibility_experiment,
    replay_counterexample,
)
from tropflag.realization import random_flag_matrix
from tropflag.tropical import (
    check_flag,
    check_incidence,
    check_plucker,
    cocircuit,
    dualize,
    point_in_space,
)

SWEEP_CONFIGS = ((1, 2, 3), (1, 2, 4), (2, 3, 4), (1, 3, 4), (2, 3, 5))
SWEEP_COUNT = 200
REALIZABLE_PLAN = (
    ((1, 2), 3, 8),
    ((1, 2), 4, 8),
    ((1, 2), 5, 8),
    ((1, 2), 6, 8),
    ((2, 3), 4, 12),
    ((2, 3), 5, 12),
    ((2, 3), 6, 10),
    ((1, 3), 4, 12),
    ((1, 3), 5, 12),
    ((1, 3), 6, 10),
)


def report(number: int, ok: bool, detail: str = "") -> None:
    print(f"CRITERION {number:02d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {number} failed: {detail}"


@lru_cache(maxsize=None)
def sweep_instances(p: int, q: int, n: int):
    rng = random.Random(1_000_000 * p + 10_000 * q + 100 * n)
    return tuple(
        (random_vector(n, p, rng), random_vector(n, q, rng)) for _ in range(SWEEP_COUNT)
    )


@lru_cache(maxsize=None)
def single_layer_instances(d: int, n: int):
    rng = random.Random(77_000 + 100 * d + n)
    return tuple(random_vector(n, d, rng) for _ in range(SWEEP_COUNT))


@lru_cache(maxsize=None)
def realizable_flags():
    flags = []
    for dims, n, count in REALIZABLE_PLAN:
        for index in range(count):
            seed = 10_000 + 97 * len(flags) + index
            flags.append(random_flag_matrix(n, dims, seed).tropicalized_layers())
    assert len(flags) == 100
    return tuple(flags)


def test_criterion_01_example1_concordance():
    low = Matroid.from_members(4, [[1, 2], [1, 3], [2, 4], [3, 4]])
    high = Matroid.from_members(4, [[1, 2, 3], [1, 2, 4], [1, 3, 4]])
    ok, witness = is_quotient(low, high)
    good = not ok and witness == (Subset.from_members(4, [1, 2, 3]), 4)
    low_fixed = Matroid.from_members(4, [[1, 2], [1, 3], [2, 3], [2, 4], [3, 4]])
    good &= is_quotient(low_fixed, high)[0]
    high_fixed = Matroid.from_members(4, [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]])
    good &= is_quotient(low, high_fixed)[0]
    report(1, good, "quotient witness (123,4); both repairs concordant")


def test_criterion_02_example1_geometry():
    """Exactly as stated in the checklist: the demonstration polytope has no
    internal edges and its edge graph has 13 segments.

    The exact computation contradicts this: the polytope has the two
    additional edges (24,123) and (34,123), certified by the integer
    functionals (-1,3,1,0) and (-1,1,2,0), which expose exactly those
    vertex pairs while every functional tight on such a pair fails
    inside the full polytope (they are not ambient edges).  The criterion
    is asserted as written and is expected to fail; see the matching unit
    tests for the verified 15-edge graph.
    """
    verts = subsets(4, [1, 2], [1, 3], [2, 4], [3, 4], [1, 2, 3], [1, 2, 4], [1, 3, 4])
    extra = internal_edges(verts, 2, 3, 4)
    edge_count = len(edges_of_polytope([s.indicator() for s in verts]))
    detail = (
        f"internal edges {[(str(a), str(b)) for a, b in extra]} (expected none), "
        f"{edge_count} edges (expected 13)"
    )
    report(2, extra == () and edge_count == 13, detail)


def test_criterion_03_example1_relations():
    invalid, fixed_x23, fixed_y234 = ex1_layers()
    bad_report = check_flag(invalid, all_pairs=True)
    good = not bad_report.is_valid
    good &= any(
        v.S.members == (2,) and v.T.members == (1, 2, 3, 4)
        for _, _, violations in bad_report.incidence
        for v in violations
    )
    for flag in (fixed_x23, fixed_y234):
        good &= check_flag(flag, all_pairs=True).is_valid
    report(3, good, "invalid instance rejected; both repairs accepted")


def test_criterion_04_theorem2_sweep():
    total = 0
    for p, q, n in SWEEP_CONFIGS:
        for x, y in sweep_instances(p, q, n):
            relations_ok = (
                not check_plucker(x) and not check_plucker(y) and not check_incidence(x, y)
            )
            if skeleton_equal(WeightedConfig(x, y)).equal != relations_ok:
                report(4, False, f"disagreement at ({p},{q};{n})")
            total += 1
    report(4, total == SWEEP_COUNT * len(SWEEP_CONFIGS), f"{total} instances, 100% agreement")


def test_criterion_05_speyer_single_layer():
    total = 0
    for n in (4, 5):
        for p in single_layer_instances(2, n):
            if skeleton_equal_single(p).equal != (not check_plucker(p)):
                report(5, False, f"disagreement at d=2, n={n}")
            total += 1
    report(5, total == 2 * SWEEP_COUNT, f"{total} instances, 100% agreement")


def test_criterion_06_observation_concordant_cells():
    cells_seen = 0
    for flag in realizable_flags():
        analyses = analyze_cells(WeightedConfig.from_flag(flag))
        for analysis in analyses:
            if analysis.bases_p and analysis.bases_q:
                cells_seen += 1
                if analysis.concordant is not True:
                    report(6, False, f"non-concordant cell in dims {flag.dims}, n={flag.n}")
    report(6, cells_seen > 0, f"{cells_seen} mixed cells, all concordant")


def test_criterion_07_theorem1_forward_and_membership():
    for flag in realizable_flags():
        x, y = flag.layers
        if check_incidence(x, y):
            report(7, False, f"incidence violation on realizable flag n={flag.n}")
        for k in enumerate_subsets(flag.n, x.d - 1):
            if not point_in_space(y, cocircuit(x, k)):
                report(7, False, f"cocircuit outside larger space, n={flag.n}")
    report(7, True, "100 flags: incidence + cocircuit membership")


def test_criterion_08_duality_suite():
    rng = random.Random(880)
    vectors = []
    while len(vectors) < 250:
        n = rng.randint(4, 6)
        d = rng.randint(2, n - 2)  # relation-bearing sizes, mostly invalid draws
        vectors.append(random_vector(n, d, rng))
    seed = 0
    while len(vectors) < 500:
        n = rng.randint(3, 6)
        d = rng.randint(1, n - 1)
        vectors.append(random_flag_matrix(n, (d,), seed).tropicalized_layers().layers[0])
        seed += 1
    valid_seen = invalid_seen = 0
    for p in vectors:
        if dualize(dualize(p)) != p:
            report(8, False, "dualize is not an involution")
        valid = not check_plucker(p)
        if valid != (not check_plucker(dualize(p))):
            report(8, False, "dualize does not preserve validity")
        valid_seen += valid
        invalid_seen += not valid
    report(8, valid_seen > 100 and invalid_seen > 100,
           f"500 vectors ({valid_seen} valid / {invalid_seen} invalid)")


def test_criterion_09_quotient_oracle_equivalence():
    rank2 = enumerate_matroids(4, 2)
    rank3 = enumerate_matroids(4, 3)
    checked = 0
    for low in rank2:
        for high in rank3:
            if is_quotient(low, high)[0] != is_quotient_via_flats(low, high):
                report(9, False, f"disagreement on [4]: {low.bases} vs {high.bases}")
            checked += 1
    five_low = enumerate_matroids(5, 2)
    five_high = enumerate_matroids(5, 3)
    rng = random.Random(990)
    for _ in range(500):
        low = rng.choice(five_low)
        high = rng.choice(five_high)
        mine, witness = is_quotient(low, high)
        oracle = is_quotient_via_flats(low, high)
        if mine != oracle:
            report(
                9,
                False,
                f"disagreement on [5]: {[str(b) for b in low.bases]} vs "
                f"{[str(b) for b in high.bases]}; basis-level={mine} witness={witness}, "
                f"flats oracle={oracle}",
            )
        checked += 1
    report(9, checked == len(rank2) * len(rank3) + 500, f"{checked} ordered pairs agree")


def _self_consistent(subdiv, pair_edges, vertices) -> bool:
    return (
        subdiv.edges() == pair_edges
        and covers_all_vertices(subdiv, vertices)
        and cell_intersections_are_faces(subdiv)
    )


def test_criterion_10_geometry_self_consistency():
    checked = 0
    for p, q, n in SWEEP_CONFIGS:
        for x, y in sweep_instances(p, q, n):
            cfg = WeightedConfig(x, y)
            if not _self_consistent(subdivision_cells(cfg), subdivision_edges(cfg), cfg.vertices()):
                report(10, False, f"two-layer inconsistency at ({p},{q};{n})")
            checked += 1
    for n in (4, 5):
        for p in single_layer_instances(2, n):
            subdiv = subdivision_cells_single(p)
            from tropflag.geometry import hypersimplex_vertices

            if not _self_consistent(subdiv, subdivision_edges_single(p), hypersimplex_vertices(2, n)):
                report(10, False, f"single-layer inconsistency at d=2, n={n}")
            checked += 1
    for flag in realizable_flags():
        cfg = WeightedConfig.from_flag(flag)
        if not _self_consistent(subdivision_cells(cfg), subdivision_edges(cfg), cfg.vertices()):
            report(10, False, f"realizable inconsistency dims={flag.dims} n={flag.n}")
        checked += 1
    # supporting certificates and model bijections, exhaustively for n <= 5
    for n in range(3, 6):
        for p in range(1, n):
            for q in range(p + 1, n):
                for s in enumerate_subsets(n, p - 1):
                    for t in enumerate_subsets(n, q + 1):
                        if s.issubset(t):
                            face_ST(s, t, p, q, n)  # raises on certificate failure
                            pn_transform(s, t)  # verified pointwise inside
    report(10, True, f"{checked} instances self-consistent; certificates verified")


def test_criterion_11_antipodal_edge_profile():
    rng = random.Random(1100)
    checked = 0
    for m in (2, 3, 4):
        for _ in range(200):
            psi_plus = [Fraction(rng.randint(-3, 3)) for _ in range(m)]
            psi_minus = [Fraction(rng.randint(-3, 3)) for _ in range(m)]
            hull = _lower_hull_edges(pn_vertices(m), psi_plus + psi_minus)
            antipodal = {i + 1 for i in range(m) if (i, i + m) in hull}
            if antipodal != set(pn_edge_profile(psi_plus, psi_minus)):
                report(11, False, f"profile mismatch at m={m}")
            checked += 1
    report(11, checked == 600, f"{checked} lifts, profile matches the LP subdivision")


def test_criterion_12_possibility_experiment():
    summaries = []
    for n in (4, 5):
        for mode in ("random-weights", "realizable"):
            result = possibility_experiment(n, 2, 3, trials=50, seed=0, mode=mode)
            well_formed = (
                result.cells_total == sum(result.quadrants.values()) + result.skipped_na
                and result.trials == 50
            )
            if not well_formed:
                report(12, False, f"malformed report for n={n}, {mode}")
            for record in result.counterexamples:
                if replay_counterexample(record) != record:
                    report(12, False, f"counterexample replay drifted (n={n}, {mode})")
            # replay machinery is exercised even when no counterexample exists
            sample = counterexample_record(result.outcomes[0], result.outcomes[0].analyses[0])
            if replay_counterexample(sample) != sample:
                report(12, False, f"record replay drifted (n={n}, {mode})")
            summaries.append(
                f"({n},2,3) {mode}: {canonical_json(result.quadrants)}"
                f" counterexamples={len(result.counterexamples)}"
            )
    report(12, True, "; ".join(summaries))
