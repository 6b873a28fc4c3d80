"""Structural graph analysis for coordinated-motion solvers.

This module detects *havens* (three connected subgraphs meeting pairwise in a
single center vertex, each large enough to shelter every robot), classifies
vertices by how far they are from such structure, and computes truncated
per-robot motion domains that stay small even near high-degree hubs.

All analysis is component-local: a vertex's classification depends only on
the connected component containing it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import (
    Graph,
    InputError,
    Instance,
    connected_components,
)

# Constants hidden inside the asymptotic bounds of the motion-domain
# construction.  They are configurable per call and recorded in every
# MotionDomain so downstream comparisons can see exactly what was used.
DEFAULT_C1 = 1
DEFAULT_C2 = 2


class ClassificationError(RuntimeError):
    """A vertex fit no structural category.

    Every vertex of every graph is provably coverable, so reaching this is a
    correctness alarm in the classifier itself, never a property of the input.
    """


@dataclass(frozen=True)
class Haven:
    """A sheltered region around a center vertex ``center``.

    ``witnesses`` holds three connected vertex sets (C1, C2, C3) that
    pairwise intersect exactly in ``{center}``; the first two have at least
    ``k + 1`` vertices each and the third is ``{center, x}`` for the spare
    neighbor ``x``.  ``members`` is every vertex within distance ``k`` of the
    center inside the subgraph induced by ``{x} | C1 | C2``.
    """

    center: int
    witnesses: tuple[frozenset[int], frozenset[int], frozenset[int]]
    x: int
    members: frozenset[int]
    k: int


@dataclass(frozen=True)
class VertexTypeTag:
    """Classification of a vertex relative to nearby haven structure.

    ``kind`` is one of:

    - ``"nice"``: the vertex itself is a haven center (``haven`` set).
    - ``"type1"``: a nice vertex lies within distance ``3k`` (``witness``,
      ``distance`` set).
    - ``"type2"``: the vertex lies on a maximal degree-2 path both of whose
      attachment vertices are nice (``path``, ``endpoints`` set).
    - ``"type3"``: the vertex lies on a degree-2 path or in a pocket of at
      most ``8k`` vertices cut off by that path, with a nice vertex at the
      far attachment (``path``, ``pocket``, ``nice_end`` set).
    - ``"type4"``: the whole component is small or decomposes into one
      degree-2 path plus at most two pockets of at most ``8k`` vertices
      (``summary``, ``path``, ``pockets`` set).
    """

    kind: str
    haven: Haven | None = None
    witness: int | None = None
    distance: int | None = None
    path: tuple[int, ...] = ()
    endpoints: tuple[int, ...] = ()
    pocket: frozenset[int] | None = None
    nice_end: int | None = None
    summary: str = ""
    pockets: tuple[frozenset[int], ...] = ()


@dataclass(frozen=True)
class TwoPath:
    """A maximal path of degree-2 vertices.

    ``path`` lists the degree-2 vertices in path order.  ``attachments``
    holds the two boundary vertices of degree != 2 adjacent to the path ends
    (they may coincide); it is empty iff the component is a pure cycle of
    degree-2 vertices, in which case ``degenerate_cycle`` is True and
    ``path`` lists the full cycle in canonical rotation.
    """

    path: tuple[int, ...]
    attachments: tuple[int, ...]
    degenerate_cycle: bool = False


@dataclass(frozen=True)
class MotionDomain:
    """A truncated breadth-first vertex domain for one robot.

    ``applicable`` is False when the robot's start is not within ``lam`` of a
    nice vertex; in that case ``vertices`` falls back to the full vertex set.
    ``depth`` and ``degree_threshold`` record the bounds actually used:
    the search runs to depth ``c2 * (lam * k + k**4)`` and does not expand
    through vertices of degree >= ``c1 * k**4 + k + 1`` (except the start
    itself), but pads each such retained vertex with its
    ``c1 * k**4 + k + 1`` lowest-id neighbors.
    """

    robot: int
    vertices: frozenset[int]
    applicable: bool
    lam: int
    c1: int
    c2: int
    depth: int
    degree_threshold: int


def _check_vertex(graph: Graph, v: int) -> None:
    if not 0 <= v < graph.n:
        raise InputError(f"vertex {v} out of range")


def _check_k(k: int) -> None:
    if k < 1:
        raise InputError("k must be at least 1")


def _connected_sets_with(graph: Graph, root: int, size: int, banned):
    """Yield each connected vertex set of exactly ``size`` vertices that
    contains ``root`` and avoids ``banned``, exactly once, in a fixed order.

    Uses the standard exclusion-set enumeration: at each level the branches
    that skip a candidate keep it excluded in all deeper extensions, so no
    set is produced twice.
    """
    if size <= 0 or root in banned:
        return

    def rec(current: frozenset, excluded: frozenset):
        if len(current) == size:
            yield current
            return
        cands = sorted(
            {
                nb
                for u in current
                for nb in graph.neighbors(u)
            }
            - current
            - excluded
            - banned
        )
        for i, c in enumerate(cands):
            yield from rec(current | {c}, excluded | frozenset(cands[:i]))

    yield from rec(frozenset((root,)), frozenset())


def _haven_members(graph: Graph, center: int, universe: frozenset[int], k: int) -> frozenset[int]:
    """Vertices within distance k of ``center`` inside ``universe``."""
    dist = {center: 0}
    frontier = deque((center,))
    while frontier:
        u = frontier.popleft()
        if dist[u] == k:
            continue
        for nb in graph.neighbors(u):
            if nb in universe and nb not in dist:
                dist[nb] = dist[u] + 1
                frontier.append(nb)
    return frozenset(dist)


def _make_haven(graph: Graph, center: int, c1: frozenset, c2: frozenset, x: int, k: int) -> Haven:
    c3 = frozenset((center, x))
    universe = c1 | c2 | {x}
    members = _haven_members(graph, center, universe, k)
    return Haven(center=center, witnesses=(c1, c2, c3), x=x, members=members, k=k)


def is_nice(graph: Graph, v: int, k: int) -> Haven | None:
    """Return a witness Haven for ``v`` if one exists, else None.

    A vertex is *nice* when three connected subgraphs through it pairwise
    intersect in exactly the vertex itself, the first two having at least
    ``k + 1`` vertices and the third at least 2.  Vertices of degree >= 2k+1
    always qualify (star witnesses from the lowest-id neighbors); otherwise
    an exhaustive bounded enumeration of connected (k+1)-sets through ``v``
    decides the question exactly.
    """
    _check_vertex(graph, v)
    _check_k(k)
    deg = graph.degree(v)
    if deg < 3:
        # Three subgraphs meeting pairwise only at v need three disjoint
        # neighbors.
        return None
    if deg >= 2 * k + 1:
        nbs = graph.neighbors(v)[: 2 * k + 1]
        c1 = frozenset((v,) + nbs[:k])
        c2 = frozenset((v,) + nbs[k : 2 * k])
        return _make_haven(graph, v, c1, c2, nbs[2 * k], k)
    size = k + 1
    for c1 in _connected_sets_with(graph, v, size, frozenset()):
        banned = c1 - {v}
        for c2 in _connected_sets_with(graph, v, size, banned):
            used = c1 | c2
            for x in graph.neighbors(v):
                if x not in used:
                    return _make_haven(graph, v, c1, c2, x, k)
    return None


def check_haven(graph: Graph, haven: Haven) -> None:
    """Raise InputError unless ``haven`` satisfies every structural invariant."""
    _check_vertex(graph, haven.center)
    c1, c2, c3 = haven.witnesses
    k = haven.k
    _check_k(k)
    if len(c1) < k + 1 or len(c2) < k + 1 or len(c3) < 2:
        raise InputError("haven witness sets too small")
    for name, cs in (("first", c1), ("second", c2), ("third", c3)):
        for u in cs:
            _check_vertex(graph, u)
        if haven.center not in cs:
            raise InputError(f"{name} witness set misses the center")
        if not _is_connected_within(graph, cs):
            raise InputError(f"{name} witness set is not connected")
    center_only = frozenset((haven.center,))
    if c1 & c2 != center_only or c1 & c3 != center_only or c2 & c3 != center_only:
        raise InputError("witness sets must pairwise intersect exactly in the center")
    if haven.x not in c3 or haven.x == haven.center:
        raise InputError("spare vertex must be the non-center member of the third set")
    if not graph.has_edge(haven.center, haven.x):
        raise InputError("spare vertex must neighbor the center")
    expected = _haven_members(graph, haven.center, c1 | c2 | {haven.x}, k)
    if haven.members != expected:
        raise InputError("haven members disagree with distance-k reachability")


def _is_connected_within(graph: Graph, vertices: frozenset[int]) -> bool:
    if not vertices:
        return False
    start = next(iter(vertices))
    seen = {start}
    frontier = deque((start,))
    while frontier:
        u = frontier.popleft()
        for nb in graph.neighbors(u):
            if nb in vertices and nb not in seen:
                seen.add(nb)
                frontier.append(nb)
    return len(seen) == len(vertices)


def find_all_nice(graph: Graph, k: int) -> dict[int, Haven]:
    """Map each nice vertex to a witness Haven (non-nice vertices absent)."""
    _check_k(k)
    result = {}
    for v in range(graph.n):
        haven = is_nice(graph, v, k)
        if haven is not None:
            result[v] = haven
    return result


def two_path_around(graph: Graph, v: int) -> TwoPath:
    """The maximal degree-2 path through ``v`` with its attachment vertices.

    Raises InputError when ``v`` does not have degree 2.  When the whole
    component is a cycle of degree-2 vertices the result is flagged
    ``degenerate_cycle`` with no attachments.
    """
    _check_vertex(graph, v)
    if graph.degree(v) != 2:
        raise InputError(f"vertex {v} has degree {graph.degree(v)}, not 2")

    def walk(first: int):
        chain = []
        prev, cur = v, first
        while graph.degree(cur) == 2 and cur != v:
            chain.append(cur)
            a, b = graph.neighbors(cur)
            prev, cur = cur, (b if a == prev else a)
        return chain, cur

    n1, n2 = graph.neighbors(v)
    left_chain, left_end = walk(n1)
    if left_end == v:
        # Walked all the way around: pure cycle. Canonical rotation starts at
        # the lowest vertex, heading toward its lower cycle neighbor.
        order = [v] + left_chain
        i = order.index(min(order))
        rot = order[i:] + order[:i]
        if len(rot) > 2 and rot[1] > rot[-1]:
            rot = [rot[0]] + rot[:0:-1]
        return TwoPath(path=tuple(rot), attachments=(), degenerate_cycle=True)
    right_chain, right_end = walk(n2)
    path = list(reversed(left_chain)) + [v] + right_chain
    atts = (left_end, right_end)
    if atts[0] > atts[1] or (atts[0] == atts[1] and path[0] > path[-1]):
        path.reverse()
        atts = (atts[1], atts[0])
    return TwoPath(path=tuple(path), attachments=atts, degenerate_cycle=False)


def _component_of(graph: Graph, v: int) -> frozenset[int]:
    seen = {v}
    frontier = deque((v,))
    while frontier:
        u = frontier.popleft()
        for nb in graph.neighbors(u):
            if nb not in seen:
                seen.add(nb)
                frontier.append(nb)
    return frozenset(seen)


def _components_without(graph: Graph, component: frozenset[int], removed) -> list[frozenset[int]]:
    """Connected components of ``component`` minus ``removed``."""
    removed = set(removed)
    remaining = set(component) - removed
    comps = []
    while remaining:
        start = min(remaining)
        seen = {start}
        frontier = deque((start,))
        while frontier:
            u = frontier.popleft()
            for nb in graph.neighbors(u):
                if nb in remaining and nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
        comps.append(frozenset(seen))
        remaining -= seen
    return comps


def _ball(graph: Graph, v: int, radius: int) -> list[int]:
    """Vertices within ``radius`` of v, in (distance, id) order."""
    dist = {v: 0}
    order = [v]
    frontier = [v]
    d = 0
    while frontier and d < radius:
        d += 1
        nxt = set()
        for u in frontier:
            for nb in graph.neighbors(u):
                if nb not in dist:
                    nxt.add(nb)
        frontier = sorted(nxt)
        for u in frontier:
            dist[u] = d
        order.extend(frontier)
    return order


def classify_vertex(
    graph: Graph,
    v: int,
    k: int,
    nice_cache: dict | None = None,
) -> VertexTypeTag:
    """Assign ``v`` the least-index structural category it satisfies.

    Categories are checked in order nice, type1, type2, type3, type4 and are
    therefore mutually exclusive.  ``nice_cache`` may be shared across calls
    on the same (graph, k) to memoize per-vertex niceness.

    Raises ClassificationError when no category applies; this is an internal
    correctness alarm (the decomposition argument guarantees coverage).
    """
    _check_vertex(graph, v)
    _check_k(k)
    cache = nice_cache if nice_cache is not None else {}

    def nice(u: int) -> Haven | None:
        if u not in cache:
            cache[u] = is_nice(graph, u, k)
        return cache[u]

    own = nice(v)
    if own is not None:
        return VertexTypeTag(kind="nice", haven=own)

    # type1: a nice vertex within distance 3k (nearest first, lowest id).
    dist = {v: 0}
    frontier = [v]
    d = 0
    while frontier and d < 3 * k:
        d += 1
        nxt = set()
        for u in frontier:
            for nb in graph.neighbors(u):
                if nb not in dist:
                    nxt.add(nb)
        frontier = sorted(nxt)
        for u in frontier:
            dist[u] = d
            if nice(u) is not None:
                return VertexTypeTag(kind="type1", witness=u, distance=d)

    # type2: v on a degree-2 path with both attachments nice.
    if graph.degree(v) == 2:
        tp = two_path_around(graph, v)
        if not tp.degenerate_cycle:
            a1, a2 = tp.attachments
            if nice(a1) is not None and nice(a2) is not None:
                return VertexTypeTag(kind="type2", path=tp.path, endpoints=tp.attachments)

    # type3: v on a degree-2 path, or inside a pocket of <= 8k vertices cut
    # off by one, with a nice vertex at the far attachment.  All relevant
    # structure touches the ball of radius 8k + 1 around v.
    component = _component_of(graph, v)
    ball = _ball(graph, v, 8 * k + 1)
    candidates = []
    seen_path_vertices = set()
    for u in ball:
        if graph.degree(u) != 2 or u in seen_path_vertices:
            continue
        tp = two_path_around(graph, u)
        seen_path_vertices.update(tp.path)
        if tp.degenerate_cycle:
            continue
        a1, a2 = tp.attachments
        if a1 == a2:
            continue
        comps = _components_without(graph, component, tp.path)
        comp_of = {}
        for comp in comps:
            for w in comp:
                comp_of[w] = comp
        for aj, ao in ((a1, a2), (a2, a1)):
            q = comp_of[aj]
            if len(q) <= 8 * k and ao not in q and nice(ao) is not None:
                if v in q or v in tp.path:
                    candidates.append((len(q), tuple(sorted(q)), tp.path, q, ao))
    for c in ball:
        if c == v or nice(c) is None:
            continue
        comps = _components_without(graph, component, (c,))
        if len(comps) < 2:
            continue
        for q in comps:
            if v in q and len(q) <= 8 * k:
                candidates.append((len(q), tuple(sorted(q)), (), q, c))
    if candidates:
        candidates.sort(key=lambda cand: (cand[0], cand[1], cand[2]))
        _, _, path, pocket, nice_end = candidates[0]
        return VertexTypeTag(kind="type3", path=path, pocket=pocket, nice_end=nice_end)

    # type4: the component is globally simple.
    if len(component) <= 8 * k:
        return VertexTypeTag(
            kind="type4",
            summary="small-component",
            pockets=(component,),
        )
    if all(graph.degree(u) == 2 for u in component):
        # Pure cycle: peel the lowest vertex off as a one-vertex pocket so
        # the rest is a single degree-2 path.
        tp = two_path_around(graph, min(component))
        m = tp.path[0]
        return VertexTypeTag(
            kind="type4",
            summary="cycle",
            path=tp.path[1:],
            pockets=(frozenset((m,)),),
        )
    type4 = []
    seen_path_vertices = set()
    for u in sorted(component):
        if graph.degree(u) != 2 or u in seen_path_vertices:
            continue
        tp = two_path_around(graph, u)
        seen_path_vertices.update(tp.path)
        if tp.degenerate_cycle:
            continue
        comps = _components_without(graph, component, tp.path)
        if len(comps) <= 2 and all(len(c) <= 8 * k for c in comps):
            type4.append((-len(tp.path), tp.path, comps))
    if type4:
        type4.sort(key=lambda cand: (cand[0], cand[1]))
        _, path, comps = type4[0]
        pockets = tuple(sorted(comps, key=lambda c: tuple(sorted(c))))
        return VertexTypeTag(
            kind="type4",
            summary="two-path-with-pockets",
            path=path,
            pockets=pockets,
        )
    raise ClassificationError(
        f"vertex {v} fits no structural category (k={k}); "
        "this indicates a classifier defect, not an input problem"
    )


def compute_motion_domain(
    instance: Instance,
    robot: int,
    lam: int,
    c1: int = DEFAULT_C1,
    c2: int = DEFAULT_C2,
) -> MotionDomain:
    """Truncated breadth-first domain for the robot with id ``robot``.

    The search from the robot's start runs to depth ``c2 * (lam*k + k**4)``
    and never expands through a vertex of degree >= ``c1*k**4 + k + 1``
    (the start itself always expands so the domain is never a singleton by
    accident); each retained high-degree vertex is padded with its
    ``c1*k**4 + k + 1`` lowest-id neighbors.  When no nice vertex lies
    within ``lam`` of the start the result is flagged not applicable and
    falls back to the full vertex set.
    """
    if lam < 0:
        raise InputError("lam must be nonnegative")
    if c1 < 1 or c2 < 1:
        raise InputError("constants c1 and c2 must be at least 1")
    matches = [r for r in instance.robots if r.id == robot]
    if not matches:
        raise InputError(f"no robot with id {robot}")
    start = matches[0].start
    graph = instance.graph
    k = instance.k
    depth = c2 * (lam * k + k**4)
    threshold = c1 * k**4 + k + 1

    applicable = False
    for u in _ball(graph, start, lam):
        if is_nice(graph, u, k) is not None:
            applicable = True
            break
    if not applicable:
        return MotionDomain(
            robot=robot,
            vertices=frozenset(range(graph.n)),
            applicable=False,
            lam=lam,
            c1=c1,
            c2=c2,
            depth=depth,
            degree_threshold=threshold,
        )

    visited = {start}
    frontier = [start]
    d = 0
    while frontier and d < depth:
        d += 1
        nxt = []
        for u in frontier:
            if u != start and graph.degree(u) >= threshold:
                continue
            for nb in graph.neighbors(u):
                if nb not in visited:
                    visited.add(nb)
                    nxt.append(nb)
        frontier = nxt
    domain = set(visited)
    for u in visited:
        if graph.degree(u) >= threshold:
            domain.update(graph.neighbors(u)[:threshold])
    return MotionDomain(
        robot=robot,
        vertices=frozenset(domain),
        applicable=True,
        lam=lam,
        c1=c1,
        c2=c2,
        depth=depth,
        degree_threshold=threshold,
    )
