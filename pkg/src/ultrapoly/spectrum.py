"""Inverse systems of nerve complexes with non-stretching bonding maps.

A schedule fixes, per level, the ball scale p^-j(m), the threshold factor
p^k(m) and the diameter bound b(m).  Levels refine as m grows, each finer
block nests in one coarser block, and the induced vertex maps send every
simplex into a simplex of the next level.  Threads (one simplex per
level, linked by the maps) recover points: intersecting their preimages
over a separating schedule is the identity.

The finite truncation stops at the first separating level; all deeper
levels of the infinite-system picture are constant and carry nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .nerve import (
    NerveComplex,
    NestingError,
    Realization,
    ScaleCover,
    build_nerve,
    realize,
    scale_cover,
)
from .padic import GammaValue, PAdic, check_prime
from .spaces import (
    BaireCodes,
    C0Vector,
    UltraSpace,
    UnseparatedSpaceError,
    baire_encode,
    c0_embed,
    space_from_points,
)


class ScheduleError(ValueError):
    """Level schedule violates monotonicity or shape constraints."""


class SeparationError(ValueError):
    """The finest level fails to separate the points."""


class IncoherentThreadError(ValueError):
    """A thread's simplexes are not linked by the bonding maps."""


@dataclass(frozen=True)
class Schedule:
    """Per-level parameters: ball scales j, threshold factors k, bounds b.

    j must increase strictly (covers shrink), k must not increase, and
    the induced thresholds p^k * b then shrink level over level.
    """

    j: tuple[int, ...]
    k: tuple[int, ...]
    b: tuple[GammaValue, ...]

    def __post_init__(self) -> None:
        if not (len(self.j) == len(self.k) == len(self.b)):
            raise ScheduleError("schedule components must have equal length")
        if not self.j:
            raise ScheduleError("schedule must have at least one level")
        for a, b_ in zip(self.j, self.j[1:]):
            if b_ <= a:
                raise ScheduleError("ball scales j(m) must increase strictly")
        for a, b_ in zip(self.k, self.k[1:]):
            if b_ > a:
                raise ScheduleError("threshold factors must satisfy k(m+1) <= k(m)")

    @property
    def depth(self) -> int:
        return len(self.j)

    @classmethod
    def auto(cls, space: UltraSpace, k_shift: int = 0, b_shift: int = 0) -> "Schedule":
        """Default schedule: consecutive scales from one-block to separating.

        j runs from min(0, smallest exponent) through largest exponent + 1
        (further by k_shift, so a positive threshold factor still ends on a
        separating level); k(m) = k_shift, b(m) = p^-(j(m) + b_shift).
        b_shift > k_shift makes thresholds tighter than the ball diameters
        and is rejected when the nerves are built.
        """
        exponents = space.finite_exponents()
        if exponents:
            js = tuple(
                range(min(0, exponents[0]), exponents[-1] + 2 + max(0, k_shift))
            )
        else:
            js = (0,)
        return cls(
            j=js,
            k=tuple(k_shift for _ in js),
            b=tuple(GammaValue(j + b_shift) for j in js),
        )

    def to_json(self) -> dict:
        return {
            "j": list(self.j),
            "k": list(self.k),
            "b": [g.to_json() for g in self.b],
        }


@dataclass(frozen=True)
class Level:
    """One rung of the system: cover, nerve, realization, lookup tables."""

    m: int
    cover: ScaleCover
    nerve: NerveComplex
    realization: Realization
    rep_of: dict[int, int] = field(repr=False)
    simplex_of: dict[int, int] = field(repr=False)  # vertex -> maximal simplex index


def _make_level(
    space: UltraSpace,
    m: int,
    j: int,
    k: int,
    b: GammaValue,
    vectors: Sequence[C0Vector],
) -> Level:
    cover = scale_cover(space, j)
    nerve = build_nerve(space, cover, k=k, b=b, level=m)
    realization = realize(space, cover, nerve, vectors)
    rep_of = {point: block[0] for block in cover.blocks for point in block}
    simplex_of = {
        v: idx for idx, s in enumerate(nerve.maximal_simplexes) for v in s
    }
    return Level(
        m=m,
        cover=cover,
        nerve=nerve,
        realization=realization,
        rep_of=rep_of,
        simplex_of=simplex_of,
    )


@dataclass(frozen=True)
class BondingMap:
    """Vertex map from a finer level onto the coarser one by block containment.

    simplex_images records, per fine maximal simplex, its image vertex
    set and the index of the coarse maximal simplex containing it.
    """

    fine: int
    coarse: int
    vertex_map: dict[int, int]
    simplex_images: tuple[tuple[tuple[int, ...], int], ...]

    def to_json(self) -> dict:
        return {
            "from": self.fine,
            "to": self.coarse,
            "vertex_map": {str(v): w for v, w in sorted(self.vertex_map.items())},
        }


def bonding_map(fine: Level, coarse: Level) -> BondingMap:
    """Send each fine block to the coarse block containing it.

    Raises:
        NestingError: if some fine block crosses coarse blocks.
        NestingError: also when levels are not comparable at all.
    """
    vertex_map: dict[int, int] = {}
    for block in fine.cover.blocks:
        parents = {coarse.rep_of[point] for point in block}
        if len(parents) != 1:
            raise NestingError(
                f"block {block} of level {fine.m} crosses blocks of level {coarse.m}"
            )
        vertex_map[block[0]] = parents.pop()
    simplex_images = []
    for s in fine.nerve.maximal_simplexes:
        image = tuple(sorted({vertex_map[v] for v in s}))
        container = coarse.simplex_of[image[0]]
        if not set(image) <= set(coarse.nerve.maximal_simplexes[container]):
            raise NestingError(
                f"simplex {s} of level {fine.m} has no containing simplex at level {coarse.m}"
            )
        simplex_images.append((image, container))
    return BondingMap(
        fine=fine.m,
        coarse=coarse.m,
        vertex_map=vertex_map,
        simplex_images=tuple(simplex_images),
    )


@dataclass(frozen=True)
class NonstretchReport:
    """Exact witnesses for the non-stretching property of one bonding map.

    violations: vertex pairs whose realized image distance exceeds the
    source distance (must be empty).  merged: pairs collapsed to one
    vertex.  single_step_contraction: True when every merged pair sat at
    distance exactly p * p^-j(fine), the one-scale-step value forced by
    consecutive schedules; the map contracts those pairs to zero, all
    others keep their exact distance.
    """

    fine: int
    coarse: int
    violations: tuple[tuple[int, int], ...]
    merged: tuple[tuple[int, int], ...]
    preserved: int
    single_step_contraction: bool

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_nonstretching(bmap: BondingMap, fine: Level, coarse: Level) -> NonstretchReport:
    verts = fine.nerve.vertices
    violations = []
    merged = []
    preserved = 0
    fine_scale = fine.cover.level
    single_step = True
    for a in range(len(verts)):
        for b in range(a + 1, len(verts)):
            v, w = verts[a], verts[b]
            src = fine.realization.position(v).distance(fine.realization.position(w))
            iv, iw = bmap.vertex_map[v], bmap.vertex_map[w]
            if iv == iw:
                merged.append((v, w))
                if src.exponent != fine_scale - 1:
                    single_step = False
                continue
            img = coarse.realization.position(iv).distance(coarse.realization.position(iw))
            if img > src:
                violations.append((v, w))
            else:
                preserved += 1
    return NonstretchReport(
        fine=fine.m,
        coarse=coarse.m,
        violations=tuple(violations),
        merged=tuple(merged),
        preserved=preserved,
        single_step_contraction=single_step,
    )


@dataclass(frozen=True)
class DegeneracyReport:
    """Source simplexes with >= 2 vertices collapsing to a single image vertex."""

    fine: int
    coarse: int
    collapsed: tuple[int, ...]  # indices of flagged fine maximal simplexes

    @property
    def ok(self) -> bool:
        return not self.collapsed


def verify_nondegenerate(bmap: BondingMap, fine: Level) -> DegeneracyReport:
    collapsed = tuple(
        idx
        for idx, s in enumerate(fine.nerve.maximal_simplexes)
        if len(s) >= 2 and len(bmap.simplex_images[idx][0]) == 1
    )
    return DegeneracyReport(fine=bmap.fine, coarse=bmap.coarse, collapsed=collapsed)


@dataclass(frozen=True)
class Thread:
    """One simplex per level, all containing the point's block."""

    point: int
    simplexes: tuple[int, ...]  # maximal simplex index per level


@dataclass(frozen=True)
class Expansion:
    """The assembled inverse sequence over one space."""

    space: UltraSpace
    schedule: Schedule
    levels: tuple[Level, ...]
    bonding: tuple[BondingMap, ...]  # bonding[i]: level i+1 -> level i
    codes: BaireCodes
    vectors: tuple[C0Vector, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def direct_vertex_map(self, fine_m: int, coarse_m: int) -> dict[int, int]:
        """Containment map computed straight from the two covers."""
        if coarse_m > fine_m:
            raise ValueError("coarse level must not exceed fine level")
        fine, coarse = self.levels[fine_m], self.levels[coarse_m]
        return {v: coarse.rep_of[v] for v in fine.nerve.vertices}

    def composite_vertex_map(self, fine_m: int, coarse_m: int) -> dict[int, int]:
        """Chain of consecutive bonding maps from fine_m down to coarse_m."""
        if coarse_m > fine_m:
            raise ValueError("coarse level must not exceed fine level")
        current = {v: v for v in self.levels[fine_m].nerve.vertices}
        for m in range(fine_m, coarse_m, -1):
            step = self.bonding[m - 1].vertex_map
            current = {v: step[w] for v, w in current.items()}
        return current

    def verify_functoriality(self) -> list[tuple[int, int]]:
        """Level pairs where composites disagree with direct containment."""
        bad = []
        for fine_m in range(self.depth):
            for coarse_m in range(fine_m + 1):
                if self.composite_vertex_map(fine_m, coarse_m) != self.direct_vertex_map(
                    fine_m, coarse_m
                ):
                    bad.append((fine_m, coarse_m))
        return bad

    def thread(self, point: int) -> Thread:
        if not 0 <= point < self.space.n_points:
            raise KeyError(f"unknown point index {point}")
        simplexes = tuple(
            level.simplex_of[level.rep_of[point]] for level in self.levels
        )
        return Thread(point=point, simplexes=simplexes)

    def check_thread(self, thread: Thread) -> None:
        """Coherence: each bonding map sends the finer simplex into the coarser."""
        for m in range(self.depth - 1):
            fine_simplex = self.levels[m + 1].nerve.maximal_simplexes[
                thread.simplexes[m + 1]
            ]
            image = {self.bonding[m].vertex_map[v] for v in fine_simplex}
            coarse_simplex = set(
                self.levels[m].nerve.maximal_simplexes[thread.simplexes[m]]
            )
            if not image <= coarse_simplex:
                raise IncoherentThreadError(
                    f"thread breaks between levels {m + 1} and {m}"
                )

    def reconstruct(self, thread: Thread) -> frozenset[int]:
        """Intersect the preimages of the thread's simplexes over all levels."""
        self.check_thread(thread)
        points: set[int] | None = None
        for level, idx in zip(self.levels, thread.simplexes):
            support = set(level.realization.cells[idx].support)
            points = support if points is None else points & support
        return frozenset(points or set())

    def to_bundle(self, reports: dict | None = None) -> dict:
        bundle = {
            "schedule": self.schedule.to_json(),
            "space": self.space.to_json(),
            "levels": [
                dict(
                    level.nerve.to_json(),
                    blocks=[list(block) for block in level.cover.blocks],
                )
                for level in self.levels
            ],
            "bonding": [bmap.to_json() for bmap in self.bonding],
            "reports": reports or {},
        }
        return bundle


def assemble_expansion(space: UltraSpace, schedule: Schedule | None = None) -> Expansion:
    """Build covers, nerves, realizations and bonding maps for a schedule.

    The finest level must separate: every block a singleton and every
    simplex a single vertex.  Functoriality of the bonding maps is
    verified exhaustively before returning.
    """
    if schedule is None:
        schedule = Schedule.auto(space)
    if not space.is_separated:
        raise UnseparatedSpaceError("expansion requires a separated space")
    codes = baire_encode(space)
    vectors = c0_embed(codes)
    levels = tuple(
        _make_level(space, m, schedule.j[m], schedule.k[m], schedule.b[m], vectors)
        for m in range(schedule.depth)
    )
    finest = levels[-1]
    if any(len(block) > 1 for block in finest.cover.blocks) or any(
        len(s) > 1 for s in finest.nerve.maximal_simplexes
    ):
        raise SeparationError("the finest level does not separate the points")
    bonding = tuple(
        bonding_map(levels[m + 1], levels[m]) for m in range(len(levels) - 1)
    )
    expansion = Expansion(
        space=space,
        schedule=schedule,
        levels=levels,
        bonding=bonding,
        codes=codes,
        vectors=vectors,
    )
    bad = expansion.verify_functoriality()
    if bad:
        raise RuntimeError(f"bonding maps fail functoriality at {bad}")
    return expansion


@dataclass(frozen=True)
class IsometryReport:
    """Distances recovered from thread separation levels vs the true metric.

    A pair's recovered exponent is threshold_exponent(first differing
    level) - 1; under consecutive default schedules this equals the true
    exponent for every pair.  bound is max over levels of the threshold
    exponent step minus one: the worst-case recovery error for the
    schedule.
    """

    mismatches: tuple[tuple[int, int, int | None, int], ...]  # (x, y, recovered, actual)
    max_gap: int
    bound: int

    @property
    def ok(self) -> bool:
        return not self.mismatches


def limit_isometry_check(space: UltraSpace, expansion: Expansion) -> IsometryReport:
    taus = []
    for level in expansion.levels:
        e = level.nerve.threshold.exponent
        if e is None:
            raise ScheduleError("limit recovery needs finite level thresholds")
        taus.append(e)
    threads = [expansion.thread(x) for x in range(space.n_points)]
    mismatches = []
    max_gap = 0
    for x in range(space.n_points):
        for y in range(x + 1, space.n_points):
            first = None
            for m in range(expansion.depth):
                if threads[x].simplexes[m] != threads[y].simplexes[m]:
                    first = m
                    break
            actual = space.dist[x][y].exponent
            if first is None or actual is None:
                mismatches.append((x, y, None, actual if actual is not None else -1))
                continue
            recovered = taus[first] - 1
            if recovered != actual:
                mismatches.append((x, y, recovered, actual))
                max_gap = max(max_gap, abs(recovered - actual))
    steps = [b - a for a, b in zip(taus, taus[1:])]
    bound = max(steps) - 1 if steps else 0
    return IsometryReport(
        mismatches=tuple(mismatches), max_gap=max_gap, bound=bound
    )


def thread(expansion: Expansion, point: int) -> Thread:
    """The simplex containing the point's block, at every level."""
    return expansion.thread(point)


def reconstruct(expansion: Expansion, thread_: Thread) -> frozenset[int]:
    """Intersection of the thread's simplex preimages across the levels."""
    return expansion.reconstruct(thread_)


def _vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def residue_space(p: int, depth: int, subset: Iterable[int] | None = None) -> UltraSpace:
    """The additive group Z/p^depth (or a subset) under |x - y|_p."""
    check_prime(p)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    order = p**depth
    if subset is None:
        points = list(range(order))
    else:
        points = sorted(set(subset))
        if not points:
            raise ValueError("subset must be nonempty")
        if points[0] < 0 or points[-1] >= order:
            raise ValueError(f"subset members must lie in [0, {order})")
    padics = [PAdic.from_int(r, p, precision=depth) for r in points]
    return space_from_points(padics, labels=[str(r) for r in points])


def group_expansion(
    p: int, depth: int, subset: Iterable[int] | None = None
) -> tuple[Expansion, dict]:
    """Profinite demo: expand Z/p^depth and verify its group structure.

    For the full residue set the report certifies that level i carries
    exactly p^i blocks, that each bonding map is reduction mod p^i on
    representatives, and that the metric is invariant under adding any
    residue (mod p^depth).  Subsets skip the count and invariance checks.
    """
    space = residue_space(p, depth, subset)
    expansion = assemble_expansion(space)
    full = subset is None
    report: dict = {"full_group": full, "levels": expansion.depth}
    if full:
        counts = [len(level.cover.blocks) for level in expansion.levels]
        report["block_counts"] = counts
        report["block_counts_ok"] = counts == [p**i for i in range(expansion.depth)]
        reduction_ok = True
        for m in range(expansion.depth - 1):
            modulus = p ** expansion.levels[m].cover.level
            vmap = expansion.bonding[m].vertex_map
            for v, w in vmap.items():
                if w != v % modulus:
                    reduction_ok = False
        report["bonding_is_mod_reduction"] = reduction_ok
        order = p**depth
        invariant = True
        for c in range(order):
            for x in range(order):
                for y in range(x + 1, order):
                    dx = (x + c) % order - (y + c) % order
                    if _vp(dx, p) != _vp(x - y, p):
                        invariant = False
                        break
                if not invariant:
                    break
            if not invariant:
                break
        report["translation_invariant"] = invariant
    return expansion, report
