"""Exact polyhedral engine for weight polytopes and their regular subdivisions.

The configuration is the vertex set of Delta(p,q;n) (two hypersimplex
layers) or of a single hypersimplex Delta(d,n); weights lift the
vertices and the lower convex hull induces a subdivision.  Maximal
cells are vertices of the dual polyhedron {(a,b) : a.v + b <= w(v)};
they are enumerated either by brute force over constraint subsets or by
an exact perturb-and-coarsen sweep over lower-hull simplices, both
returning certified supporting functionals.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

from .core import DomainError, Subset, as_rational, enumerate_subsets
from .lp import Q, lp_max, support_margin  # lp_max re-exported as part of this module's surface
from .tropical import FlagInstance, PluckerVector

_ZERO = Q(0)
_ONE = Q(1)

# Above this many candidate constraint subsets the dual-vertex brute
# force hands over to the perturbation sweep.
BRUTE_FORCE_LIMIT = 2000


class GeometryError(RuntimeError):
    """Internal cross-validation failed; indicates an engine bug."""


@dataclass(frozen=True)
class LatticeVertex:
    """A 0/1 vertex of the weight polytope, labeled by its subset."""

    subset: Subset

    @property
    def layer(self) -> int:
        return self.subset.card

    @property
    def coords(self) -> tuple[int, ...]:
        return self.subset.indicator()

    @property
    def key(self):
        return self.subset.key

    def __str__(self) -> str:
        return str(self.subset)


Edge = tuple[Subset, Subset]


def make_edge(a: Subset, b: Subset) -> Edge:
    if a.key == b.key:
        raise DomainError("an edge needs two distinct vertices")
    return (a, b) if a.key < b.key else (b, a)


@dataclass(frozen=True)
class AffineFunctional:
    """x -> a.x + b with exact rational data."""

    a: tuple[Fraction, ...]
    b: Fraction

    def value(self, coords) -> Fraction:
        return sum((ai * ci for ai, ci in zip(self.a, coords)), Fraction(0)) + self.b


@dataclass(frozen=True)
class Cell:
    """A maximal cell with its certifying functional.

    The functional is tight (value == weight) exactly on the cell's
    vertices and strictly below the weight on every other configuration
    vertex.
    """

    vertices: tuple[LatticeVertex, ...]
    functional: AffineFunctional

    def subsets(self) -> tuple[Subset, ...]:
        return tuple(v.subset for v in self.vertices)

    def layer_subsets(self, size: int) -> tuple[Subset, ...]:
        return tuple(v.subset for v in self.vertices if v.layer == size)


@dataclass(frozen=True)
class Subdivision:
    """Maximal cells of a regular subdivision, in canonical order."""

    cells: tuple[Cell, ...]

    def edges(self) -> frozenset[Edge]:
        """Union of the polytope edges of all maximal cells."""
        decided: dict[Edge, bool] = {}
        for cell in sorted(self.cells, key=lambda c: len(c.vertices)):
            pts = [v.coords for v in cell.vertices]
            for i, j in combinations(range(len(pts)), 2):
                edge = make_edge(cell.vertices[i].subset, cell.vertices[j].subset)
                if edge in decided:
                    continue
                margin = support_margin(
                    [pts[i], pts[j]], [0, 0], [pts[k] for k in range(len(pts)) if k not in (i, j)],
                    [0] * (len(pts) - 2),
                )
                decided[edge] = margin is not None and margin > 0
        return frozenset(e for e, ok in decided.items() if ok)

    def vertex_subsets(self) -> frozenset[Subset]:
        return frozenset(v.subset for cell in self.cells for v in cell.vertices)


@dataclass(frozen=True)
class SkeletonReport:
    equal: bool
    new_edges: tuple[Edge, ...]


def delta_vertices(p: int, q: int, n: int) -> tuple[LatticeVertex, ...]:
    """Vertices of Delta(p,q;n): layer p first, lexicographic within layers."""
    if not (1 <= p < q <= n - 1):
        raise DomainError(f"need 1 <= p < q <= n-1, got p={p}, q={q}, n={n}")
    return tuple(
        LatticeVertex(s) for d in (p, q) for s in enumerate_subsets(n, d)
    )


def hypersimplex_vertices(d: int, n: int) -> tuple[LatticeVertex, ...]:
    if not (1 <= d <= n - 1):
        raise DomainError(f"need 1 <= d <= n-1, got d={d}, n={n}")
    return tuple(LatticeVertex(s) for s in enumerate_subsets(n, d))


@dataclass(frozen=True)
class WeightedConfig:
    """The weighted vertex configuration of Delta(p,q;n) built from two layers."""

    x: PluckerVector
    y: PluckerVector

    def __post_init__(self):
        if self.x.n != self.y.n:
            raise DomainError(f"ground-set mismatch: [{self.x.n}] vs [{self.y.n}]")
        if not (self.x.d < self.y.d):
            raise DomainError(f"need p < q, got p={self.x.d}, q={self.y.d}")

    @classmethod
    def from_flag(cls, flag: FlagInstance) -> "WeightedConfig":
        if len(flag.layers) != 2:
            raise DomainError(f"weight configuration needs exactly 2 layers, got {len(flag.layers)}")
        return cls(flag.layers[0], flag.layers[1])

    @property
    def n(self) -> int:
        return self.x.n

    @property
    def p(self) -> int:
        return self.x.d

    @property
    def q(self) -> int:
        return self.y.d

    def vertices(self) -> tuple[LatticeVertex, ...]:
        return delta_vertices(self.p, self.q, self.n)

    def weights(self) -> tuple[Fraction, ...]:
        # delta_vertices and PluckerVector.values share the enumeration order.
        return self.x.values + self.y.values

    def weight(self, s: Subset) -> Fraction:
        if s.card == self.p:
            return self.x[s]
        if s.card == self.q:
            return self.y[s]
        raise DomainError(f"{s} belongs to neither layer of Delta({self.p},{self.q};{self.n})")


# ---------------------------------------------------------------------------
# Exact linear algebra on small matrices (entries int or Q).


def _solve_square(rows, rhs):
    """Solve the square system rows . y = rhs exactly; None if singular."""
    size = len(rows)
    aug = [[Q(v) for v in row] + [Q(r)] for row, r in zip(rows, rhs)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = _ONE / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][size] for r in range(size)]


def _invert_square(rows):
    """Exact inverse of a square matrix, as a list of rows; None if singular."""
    size = len(rows)
    aug = [[Q(v) for v in row] + [_ONE if j == i else _ZERO for j in range(size)]
           for i, row in enumerate(rows)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = _ONE / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


def _nullspace_int(rows, width):
    """Integer basis of {y : row . y = 0 for all rows}."""
    mat = [[Fraction(v) for v in row] for row in rows]
    pivots = []
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                factor = mat[i][col]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    free_cols = [c for c in range(width) if c not in pivots]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * width
        vec[free] = Fraction(1)
        for row_idx, col in enumerate(pivots):
            vec[col] = -mat[row_idx][free]
        lcm = 1
        for v in vec:
            lcm = lcm * v.denominator // _gcd(lcm, v.denominator)
        basis.append(tuple(int(v * lcm) for v in vec))
    return basis


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# Regular subdivision engine.


class _TieBreakNeeded(Exception):
    """Perturbed sweep hit a tie; the caller redraws the perturbation."""


def _scaled_rows(points, weights):
    """Per-row clearing of denominators: (v,1).y <= w scaled to integers."""
    rows = []
    w_int = []
    for point, weight in zip(points, weights):
        coords = [as_rational(c) for c in point]
        weight = as_rational(weight)
        lam = 1
        for v in [*coords, weight]:
            lam = lam * v.denominator // _gcd(lam, v.denominator)
        rows.append(tuple(int(c * lam) for c in coords) + (lam,))
        w_int.append(int(weight * lam))
    return rows, w_int


def _dot(row, vec):
    return sum((r * v for r, v in zip(row, vec) if r), _ZERO)


def _regular_cells(points, weights, method: str = "auto"):
    """Maximal cells of the regular subdivision of a point configuration.

    Returns a sorted list of (tight_indices, functional) pairs where
    functional = (a, b) Fractions certifying the cell.  ``method`` picks
    the dual-vertex brute force, the perturbation sweep, or an automatic
    size-based choice.
    """
    m = len(points)
    if m == 0:
        raise DomainError("empty configuration")
    if len(set(map(tuple, points))) != m:
        raise DomainError("configuration points must be distinct")
    rows, w_int = _scaled_rows(points, weights)
    width = len(rows[0])
    null_basis = _nullspace_int(rows, width)
    dim_basis = width - len(null_basis)
    if m < dim_basis:
        raise DomainError("configuration does not affinely span its ambient space")
    if method == "auto":
        method = "brute" if comb(m, dim_basis) <= BRUTE_FORCE_LIMIT else "bfs"
    if method == "brute":
        cells = _cells_bruteforce(rows, w_int, null_basis, dim_basis)
    elif method == "bfs":
        cells = _cells_perturbed(rows, w_int, null_basis, dim_basis)
    else:
        raise DomainError(f"unknown method {method!r}")
    covered = set()
    for tight, _ in cells:
        covered.update(tight)
    if covered != set(range(m)):
        raise GeometryError("subdivision cells fail to cover all configuration vertices")
    return cells


def _finish_cell(rows, w_int, null_basis, subset_rows):
    """Solve the tightness system on subset_rows; feasibility-check and
    return (tight_indices, (a, b)) or None."""
    mat = [rows[i] for i in subset_rows] + list(null_basis)
    rhs = [w_int[i] for i in subset_rows] + [0] * len(null_basis)
    y = _solve_square(mat, rhs)
    if y is None:
        return None
    tight = []
    for z, row in enumerate(rows):
        slack = w_int[z] - _dot(row, y)
        if slack < 0:
            return None
        if slack == 0:
            tight.append(z)
    a = tuple(_as_fraction(v) for v in y[:-1])
    b = _as_fraction(y[-1])
    return tuple(tight), (a, b)


def _as_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _cells_bruteforce(rows, w_int, null_basis, dim_basis):
    """Every dual vertex via exhaustive enumeration of constraint subsets."""
    cells = {}
    for subset_rows in combinations(range(len(rows)), dim_basis):
        result = _finish_cell(rows, w_int, null_basis, subset_rows)
        if result is not None:
            tight, functional = result
            previous = cells.setdefault(tight, functional)
            if previous != functional:
                raise GeometryError("two functionals share one tight set")
    return sorted(cells.items())


def _cells_perturbed(rows, w_int, null_basis, dim_basis):
    """Perturb weights, sweep the lower-hull triangulation, coarsen back.

    The sweep is exact on the perturbed data; coarsening re-solves each
    simplex against the true weights and verifies feasibility, so the
    result is certified regardless of the draw.  Failed draws (ties or a
    too-coarse perturbation) are retried with fresh randomness.
    """
    digest = hashlib.sha256(repr((rows, w_int)).encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    m = len(rows)
    for attempt in range(32):
        scale = 1 << (24 + 8 * attempt)
        rho = rng.sample(range(1, 1 << 20), m)
        w_pert = [w * scale + r for w, r in zip(w_int, rho)]
        try:
            simplices = _sweep_triangulation(rows, w_pert, null_basis, dim_basis)
        except _TieBreakNeeded:
            continue
        cells = {}
        ok = True
        for simplex in simplices:
            result = _finish_cell(rows, w_int, null_basis, simplex)
            if result is None:
                ok = False  # perturbation too coarse; retry finer
                break
            tight, functional = result
            previous = cells.setdefault(tight, functional)
            if previous != functional:
                raise GeometryError("two functionals share one tight set")
        if ok:
            return sorted(cells.items())
    raise GeometryError("perturbation sweep failed to stabilize")


def _sweep_triangulation(rows, w_pert, null_basis, dim_basis):
    """All maximal simplices of the perturbed lower hull, by ridge BFS."""
    m = len(rows)
    width = len(rows[0])
    start = min(range(m), key=lambda i: w_pert[i])
    y = [_ZERO] * (width - 1) + [Q(w_pert[start])]
    face = [start]
    # Grow the starting vertex to a full simplex of the lower hull.
    while len(face) < dim_basis:
        pencil = _nullspace_int([rows[i] for i in face] + list(null_basis), width)
        delta = [Q(v) for v in pencil[0]]
        step = _ratio_step(rows, w_pert, y, delta, set(face))
        if step is None:
            delta = [-v for v in delta]
            step = _ratio_step(rows, w_pert, y, delta, set(face))
            if step is None:
                raise GeometryError("unbounded pencil during simplex growth")
        t_best, entering = step
        y = [v + t_best * d for v, d in zip(y, delta)]
        face.append(entering)
    first = tuple(sorted(face))
    seen = {first}
    queue = [(first, y)]
    out = []
    head = 0
    while head < len(queue):
        simplex, y = queue[head]
        head += 1
        out.append(simplex)
        matrix = [rows[i] for i in simplex] + list(null_basis)
        inverse = _invert_square(matrix)
        if inverse is None:
            raise GeometryError("simplex system singular during sweep")
        for pos, drop in enumerate(simplex):
            # Column `pos` of the inverse gives the pencil direction that
            # keeps the other rows tight; sign chosen to leave `drop`.
            delta = [-inverse[r][pos] for r in range(width)]
            step = _ratio_step(rows, w_pert, y, delta, set(simplex))
            if step is None:
                continue  # boundary ridge of the polytope
            t_best, entering = step
            neighbor = tuple(sorted([s for s in simplex if s != drop] + [entering]))
            if neighbor in seen:
                continue
            seen.add(neighbor)
            y_next = [v + t_best * d for v, d in zip(y, delta)]
            queue.append((neighbor, y_next))
    return out


def _ratio_step(rows, w_pert, y, delta, exclude):
    """Smallest positive step along delta until a new constraint is tight.

    Returns (t, entering_index), None if unbounded, and raises
    _TieBreakNeeded when the minimizer is not unique.
    """
    t_best = None
    entering = None
    tie = False
    for z, row in enumerate(rows):
        if z in exclude:
            continue
        denom = _dot(row, delta)
        if denom <= 0:
            continue
        t = (w_pert[z] - _dot(row, y)) / denom
        if t_best is None or t < t_best:
            t_best, entering, tie = t, z, False
        elif t == t_best:
            tie = True
    if t_best is None:
        return None
    if tie:
        raise _TieBreakNeeded
    return t_best, entering


# ---------------------------------------------------------------------------
# Public subdivision operations.


def _cells_to_subdivision(vertex_list, cells) -> Subdivision:
    out = []
    for tight, (a, b) in cells:
        verts = tuple(sorted((vertex_list[i] for i in tight), key=lambda v: v.key))
        out.append(Cell(verts, AffineFunctional(a, b)))
    out.sort(key=lambda c: tuple(v.key for v in c.vertices))
    return Subdivision(tuple(out))


def subdivision_cells(cfg: WeightedConfig, method: str = "auto") -> Subdivision:
    """Maximal cells of the regular subdivision of Delta(p,q;n) under cfg."""
    verts = cfg.vertices()
    cells = _regular_cells([v.coords for v in verts], cfg.weights(), method)
    return _cells_to_subdivision(verts, cells)


def subdivision_cells_single(p: PluckerVector, method: str = "auto") -> Subdivision:
    """Single-layer entry point: the same engine on Delta(d,n)."""
    verts = hypersimplex_vertices(p.d, p.n)
    cells = _regular_cells([v.coords for v in verts], p.values, method)
    return _cells_to_subdivision(verts, cells)


def _lower_hull_edges(points, weights) -> set[tuple[int, int]]:
    """Index pairs whose lifted segment lies on the lower hull (margin LP)."""
    m = len(points)
    out = set()
    for i, j in combinations(range(m), 2):
        others = [k for k in range(m) if k not in (i, j)]
        margin = support_margin(
            [points[i], points[j]],
            [weights[i], weights[j]],
            [points[k] for k in others],
            [weights[k] for k in others],
        )
        if margin is not None and margin > 0:
            out.add((i, j))
    return out


def subdivision_edges(cfg: WeightedConfig) -> frozenset[Edge]:
    """Edges of the subdivision, each certified by its own margin LP."""
    verts = cfg.vertices()
    pairs = _lower_hull_edges([v.coords for v in verts], cfg.weights())
    return frozenset(make_edge(verts[i].subset, verts[j].subset) for i, j in pairs)


def subdivision_edges_single(p: PluckerVector) -> frozenset[Edge]:
    verts = hypersimplex_vertices(p.d, p.n)
    pairs = _lower_hull_edges([v.coords for v in verts], p.values)
    return frozenset(make_edge(verts[i].subset, verts[j].subset) for i, j in pairs)


def is_face(points, candidate) -> bool:
    """Supporting-hyperplane test: candidate is a face of conv(points).

    ``candidate`` lists points that must occur among ``points``.  True
    iff some affine functional is tight on the candidate and strictly
    below zero on every other point.
    """
    pts = [tuple(as_rational(c) for c in p) for p in points]
    if len(set(pts)) != len(pts):
        raise DomainError("points must be distinct")
    index = {p: i for i, p in enumerate(pts)}
    cand_idx = []
    for c in candidate:
        key = tuple(as_rational(v) for v in c)
        if key not in index:
            raise DomainError(f"candidate point {c!r} is not in the configuration")
        cand_idx.append(index[key])
    if not cand_idx:
        raise DomainError("candidate must be nonempty")
    cand_set = set(cand_idx)
    others = [pts[i] for i in range(len(pts)) if i not in cand_set]
    margin = support_margin(
        [pts[i] for i in sorted(cand_set)], [0] * len(cand_set), others, [0] * len(others)
    )
    return margin is not None and margin > 0


def edges_of_polytope(points) -> list[tuple[int, int]]:
    """All index pairs forming edges of conv(points).

    Intended for vertex configurations in which every point is extreme
    and no three are collinear (0/1 and cross-polytope vertex sets).
    """
    pts = [tuple(as_rational(c) for c in p) for p in points]
    if len(set(pts)) != len(pts):
        raise DomainError("points must be distinct")
    out = []
    for i, j in combinations(range(len(pts)), 2):
        others = [pts[k] for k in range(len(pts)) if k not in (i, j)]
        margin = support_margin([pts[i], pts[j]], [0, 0], others, [0] * len(others))
        if margin is not None and margin > 0:
            out.append((i, j))
    return out


@lru_cache(maxsize=None)
def delta_edges(p: int, q: int, n: int) -> frozenset[Edge]:
    """Edge set of Delta(p,q;n).

    Mixed pairs are the containment pairs I < J; this combinatorial
    description is cross-validated against the LP-computed edges on
    every (first) call.  Same-layer edges come from the LP oracle.
    """
    verts = delta_vertices(p, q, n)
    pairs = edges_of_polytope([v.coords for v in verts])
    lp_edges = frozenset(make_edge(verts[i].subset, verts[j].subset) for i, j in pairs)
    lp_mixed = frozenset(e for e in lp_edges if e[0].card != e[1].card)
    containment = frozenset(
        make_edge(i_sub, j_sub)
        for i_sub in enumerate_subsets(n, p)
        for j_sub in enumerate_subsets(n, q)
        if i_sub.issubset(j_sub)
    )
    if lp_mixed != containment:
        raise GeometryError(
            f"mixed edges of Delta({p},{q};{n}) disagree with the containment rule"
        )
    return lp_edges


@lru_cache(maxsize=None)
def hypersimplex_edges(d: int, n: int) -> frozenset[Edge]:
    """Edge set of Delta(d,n), computed by the LP oracle."""
    verts = hypersimplex_vertices(d, n)
    pairs = edges_of_polytope([v.coords for v in verts])
    return frozenset(make_edge(verts[i].subset, verts[j].subset) for i, j in pairs)


def skeleton_equal(cfg: WeightedConfig) -> SkeletonReport:
    """Does the induced subdivision share Delta's 1-skeleton?

    Edges of Delta are never lost under refinement, so the test reduces
    to the absence of new edges.
    """
    new = subdivision_edges(cfg) - delta_edges(cfg.p, cfg.q, cfg.n)
    return SkeletonReport(not new, tuple(sorted(new, key=lambda e: (e[0].key, e[1].key))))


def skeleton_equal_single(p: PluckerVector) -> SkeletonReport:
    new = subdivision_edges_single(p) - hypersimplex_edges(p.d, p.n)
    return SkeletonReport(not new, tuple(sorted(new, key=lambda e: (e[0].key, e[1].key))))


# ---------------------------------------------------------------------------
# The distinguished faces Delta_{S,T} and the cross-polytope model.


@dataclass(frozen=True)
class FaceST:
    """The face of Delta attached to one incidence relation."""

    S: Subset
    T: Subset
    vertices: tuple[LatticeVertex, ...]
    functional: AffineFunctional
    tight_value: Fraction


def face_ST(s: Subset, t: Subset, p: int, q: int, n: int) -> FaceST:
    """Vertex set and verified certificate of the face Delta_{S,T}.

    Requires |S| = p-1, |T| = q+1 and S < T: for non-nested pairs the
    span of the relation's vertices is not a face of Delta, so no
    certificate exists.
    """
    if s.n != n or t.n != n:
        raise DomainError("S and T must live on the configuration's ground set")
    if s.card != p - 1:
        raise DomainError(f"|S| = {s.card}, expected p-1 = {p - 1}")
    if t.card != q + 1:
        raise DomainError(f"|T| = {t.card}, expected q+1 = {q + 1}")
    if not s.issubset(t):
        raise DomainError("face_ST requires S to be contained in T")
    members = set()
    for i in t.difference(s):
        members.add(s.with_element(i))
        members.add(t.without(i))
    claimed = tuple(sorted((LatticeVertex(m) for m in members), key=lambda v: v.key))
    a = tuple(
        Fraction(1) if j in s else (Fraction(-1) if j not in t else Fraction(0))
        for j in range(1, n + 1)
    )
    functional = AffineFunctional(a, Fraction(0))
    tight_value = Fraction(s.card)
    claimed_set = {v.subset for v in claimed}
    for vertex in delta_vertices(p, q, n):
        value = functional.value(vertex.coords)
        if vertex.subset in claimed_set:
            if value != tight_value:
                raise GeometryError(f"certificate not tight on {vertex}")
        elif value >= tight_value:
            raise GeometryError(f"certificate not strict at {vertex}")
    return FaceST(s, t, claimed, functional, tight_value)


def pn_vertices(m: int) -> list[tuple[int, ...]]:
    """Vertices of the cross-polytope P_m: e_1..e_m then -e_1..-e_m."""
    if m < 1:
        raise DomainError("P_m needs m >= 1")
    out = []
    for sign in (1, -1):
        for i in range(m):
            out.append(tuple(sign if j == i else 0 for j in range(m)))
    return out


@dataclass(frozen=True)
class PnTransform:
    """Affine identification of Delta_{S,T} with the cross-polytope P_m.

    ``order`` lists T\\S; element order[i] corresponds to coordinate i+1
    of P_m.  ``mapping`` sends each vertex subset of Delta_{S,T} to
    (index, sign) meaning sign * e_index.
    """

    S: Subset
    T: Subset
    order: tuple[int, ...]
    mapping: dict[Subset, tuple[int, int]]

    @property
    def m(self) -> int:
        return len(self.order)

    def apply(self, coords) -> tuple[Fraction, ...]:
        """The composed affine map (collapse S, relabel, then A x + b).

        Only defined for m >= 3; the m = 2 identification is not affine
        on the ambient space.
        """
        m = self.m
        if m < 3:
            raise DomainError("the affine model map needs m >= 3")
        collapsed = [
            as_rational(coords[element - 1]) for element in self.order
        ]
        total = sum(collapsed, Fraction(0))
        shift = Fraction(1, m - 2)
        return tuple(c - shift * total + shift for c in collapsed)


def pn_transform(s: Subset, t: Subset) -> PnTransform:
    """The vertex bijection Delta_{S,T} -> P_m, verified pointwise."""
    if s.n != t.n:
        raise DomainError("S and T must share a ground set")
    if not s.issubset(t):
        raise DomainError("pn_transform requires S to be contained in T")
    order = tuple(t.difference(s).members)
    m = len(order)
    if m < 2:
        raise DomainError(f"|T \\ S| = {m} is degenerate; need at least 2")
    position = {element: idx + 1 for idx, element in enumerate(order)}
    mapping: dict[Subset, tuple[int, int]] = {}
    for i in order:
        mapping[s.with_element(i)] = (position[i], 1)
        mapping[t.without(i)] = (position[i], -1)
    if m >= 3:
        transform = PnTransform(s, t, order, mapping)
        for subset, (index, sign) in mapping.items():
            image = transform.apply(subset.indicator())
            expected = tuple(
                Fraction(sign) if j == index - 1 else Fraction(0) for j in range(m)
            )
            if image != expected:
                raise GeometryError(f"model map sends {subset} to {image}, expected {expected}")
        return transform
    return PnTransform(s, t, order, mapping)


def pn_edge_profile(psi_plus, psi_minus) -> frozenset[int]:
    """Indices i (1-based) whose antipodal pair e_i,-e_i becomes an edge.

    The lifted cross-polytope gains the edge iff w_i = psi+_i + psi-_i
    is the unique minimum; ties introduce no new edges.
    """
    plus = [as_rational(v) for v in psi_plus]
    minus = [as_rational(v) for v in psi_minus]
    if len(plus) != len(minus) or len(plus) < 2:
        raise DomainError("need matching psi vectors of length >= 2")
    w = [a + b for a, b in zip(plus, minus)]
    lo = min(w)
    hits = [i + 1 for i, v in enumerate(w) if v == lo]
    return frozenset(hits) if len(hits) == 1 else frozenset()


# ---------------------------------------------------------------------------
# Complex-level consistency helpers (used by tests and the experiment code).


def covers_all_vertices(subdiv: Subdivision, vertices) -> bool:
    return {v.subset for v in vertices} <= subdiv.vertex_subsets()


def cell_intersections_are_faces(subdiv: Subdivision) -> bool:
    """Every pairwise cell intersection is a face of both cells."""
    for c1, c2 in combinations(subdiv.cells, 2):
        shared = set(c1.subsets()) & set(c2.subsets())
        if not shared:
            continue
        shared_pts = [LatticeVertex(s).coords for s in shared]
        for cell in (c1, c2):
            if not is_face([v.coords for v in cell.vertices], shared_pts):
                return False
    return True
