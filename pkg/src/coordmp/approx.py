"""Constructive bounded-overhead solving and budget-ball preprocessing.

Three entry points:

* :func:`approximate` builds a valid schedule whose energy exceeds the
  distance lower bound by an additive term polynomial in the robot count,
  by parking robots in pairwise-disjoint havens and routing the
  destination-bearing ones through haven detours.
* :func:`solve_gcmp1` solves single-destination instances exactly by
  restricting each free robot to a small motion domain.
* :func:`energy_ball_restrict` shrinks a budgeted instance to the union of
  budget-radius balls around the robots that must move, preserving the
  yes/no answer.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from coordmp.core import (
    Graph,
    InfeasibleError,
    InputError,
    Instance,
    LimitError,
    Robot,
    Route,
    Schedule,
    UnsupportedStructureError,
    bfs_distances,
    connected_components,
    induced_subgraph,
    shortest_path,
    shortest_path_distance,
    validate_schedule,
)
from coordmp.havenswap import HavenConfiguration, MoveStep, swap
from coordmp.oracle import (
    Limits,
    SearchResult,
    check_feasible,
    critical_vertices,
    default_limits,
    solve_critical,
    solve_exact,
    solve_restricted,
)
from coordmp.structure import Haven, classify_vertex, compute_motion_domain, is_nice

# Every robot endpoint must lie within NICE_RADIUS_FACTOR * k of a nice
# vertex for the constructive pipeline to apply.
NICE_RADIUS_FACTOR = 11
# Free robots in degenerate regions are confined to this many vertices
# around their start (times k).
POCKET_DOMAIN_FACTOR = 9


@dataclass(frozen=True)
class ApproxReport:
    """Constructive solve outcome and its overhead over the distance sum."""

    schedule: Schedule
    energy: int
    lower_bound: int
    overhead: int


@dataclass(frozen=True)
class RestrictionResult:
    """Budget-ball preprocessing outcome.

    When ``no_instance`` is true the budget is provably insufficient and no
    sub-instance exists; otherwise ``instance`` is the restriction and
    ``vertex_map`` sends original vertex ids to sub-instance ids.
    """

    instance: Instance | None
    vertex_map: dict[int, int] = field(default_factory=dict)
    no_instance: bool = False
    reason: str | None = None


# ---------------------------------------------------------------------------
# path and haven-discovery helpers


def _path_avoiding(graph, source, targets, banned):
    """Shortest path from source to any target avoiding banned vertices."""
    if source in targets:
        return [source]
    parent = {source: source}
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b in graph.neighbors(a):
            if b in parent or b in banned:
                continue
            parent[b] = a
            if b in targets:
                path = [b]
                while path[-1] != source:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(b)
    return None


def _nearest_nice(graph, v, k, radius, cache):
    """Nearest nice vertex within the radius (ties to the lowest id)."""
    seen = {v}
    layer = [v]
    for _ in range(radius + 1):
        if not layer:
            break
        for u in sorted(layer):
            if u not in cache:
                cache[u] = is_nice(graph, u, k)
            if cache[u] is not None:
                return u
        grown = []
        for u in layer:
            for w in graph.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    grown.append(w)
        layer = grown
    return None


def _nearest_vertices(graph, start, count):
    """The closest ``count`` vertices to start, by (distance, id)."""
    out = []
    seen = {start}
    layer = [start]
    while layer and len(out) < count:
        out.extend(sorted(layer))
        grown = []
        for u in layer:
            for w in graph.neighbors(u):
                if w not in seen:
                    seen.add(w)
                    grown.append(w)
        layer = grown
    return frozenset(out[:count])


def _schedule_to_steps(schedule: Schedule, robots) -> list[MoveStep]:
    """Flatten a schedule into per-step move tuples, dropping waits."""
    steps = []
    for t in range(schedule.horizon):
        moves = tuple(
            (robots[i].id, route.positions[t], route.positions[t + 1])
            for i, route in enumerate(schedule.routes)
            if route.positions[t] != route.positions[t + 1]
        )
        if moves:
            steps.append(moves)
    return steps


def _steps_to_schedule(instance: Instance, steps) -> Schedule:
    rows = {r.id: [r.start] for r in instance.robots}
    for step in steps:
        moved = {rid: v for rid, _, v in step}
        for rid, row in rows.items():
            row.append(moved.get(rid, row[-1]))
    return Schedule(tuple(Route(tuple(rows[r.id])) for r in instance.robots))


# ---------------------------------------------------------------------------
# the constructive pipeline


class _Pipeline:
    """Sequential gather-then-deliver routing over disjoint parking havens.

    Invariant between routing episodes: every robot is pinned at its goal,
    parked on some selected haven's members, or still waiting to be
    gathered; at most one robot walks at a time, so a snapshot of the other
    robots' positions stays valid for a whole episode.
    """

    def __init__(self, graph, robots, havens, limits):
        self.graph = graph
        self.robots = robots
        self.havens = havens
        self.limits = limits
        self.member_index = {v: h for h in havens for v in h.members}
        self.pos = {r.id: r.start for r in robots}
        self.goal = {r.id: r.goal for r in robots}
        self.pinned: dict[int, int] = {}
        self.steps: list[MoveStep] = []
        self.center_dist = {h.center: bfs_distances(graph, h.center) for h in havens}

    # -- state primitives ---------------------------------------------

    def occupants(self, haven):
        return [rid for rid in sorted(self.pos) if self.pos[rid] in haven.members]

    def in_haven(self, rid):
        return self.member_index.get(self.pos[rid])

    def pinned_vertices(self):
        return set(self.pinned.values())

    def free_member(self, haven, forbidden):
        for v in sorted(haven.members):
            if v not in forbidden:
                return v
        raise RuntimeError("internal error: haven capacity exhausted")

    def emit_move(self, rid, v):
        u = self.pos[rid]
        for other, p in self.pos.items():
            if other != rid and p == v:
                raise UnsupportedStructureError(
                    f"robot {rid} is blocked at vertex {v} by robot {other} "
                    "outside any haven"
                )
        self.steps.append(((rid, u, v),))
        self.pos[rid] = v

    def emit_swap(self, haven, targets):
        parts = {rid: self.pos[rid] for rid in self.occupants(haven)}
        to = dict(parts)
        to.update(targets)
        if to == parts:
            return
        moves = swap(
            self.graph,
            haven,
            HavenConfiguration(haven, parts),
            HavenConfiguration(haven, to),
        )
        self.steps.extend(moves)
        for rid, v in to.items():
            self.pos[rid] = v

    def relocation(self, haven, rid, q):
        """Swap targets placing rid at q and evicting whoever holds q."""
        targets = {rid: q}
        for other in self.occupants(haven):
            if other != rid and self.pos[other] == q:
                forbidden = (
                    {q}
                    | self.pinned_vertices()
                    | {self.pos[o] for o in self.occupants(haven)}
                    | set(targets.values())
                )
                targets[other] = self.free_member(haven, forbidden)
        return targets

    # -- walking with haven detours -------------------------------------

    def follow(self, rid, path):
        """Advance rid along path, detouring through occupied havens."""
        i = 0
        while i < len(path) - 1:
            nxt = path[i + 1]
            haven = self.member_index.get(nxt)
            if haven is None:
                self.emit_move(rid, nxt)
                i += 1
                continue
            j = max(t for t in range(i + 1, len(path)) if path[t] in haven.members)
            q = path[j]
            others = [o for o in self.occupants(haven) if o != rid]
            if self.in_haven(rid) is haven:
                self.emit_swap(haven, self.relocation(haven, rid, q))
                i = j
                continue
            if not others:
                self.emit_move(rid, nxt)
                i += 1
                continue
            entry = nxt
            blocker = next((o for o in others if self.pos[o] == entry), None)
            if blocker is not None:
                forbidden = (
                    {entry, q}
                    | self.pinned_vertices()
                    | {self.pos[o] for o in others}
                )
                self.emit_swap(
                    haven, {blocker: self.free_member(haven, forbidden)}
                )
            self.emit_move(rid, entry)
            if q != entry:
                self.emit_swap(haven, self.relocation(haven, rid, q))
            i = j

    def route(self, rid, targets, extra_banned):
        banned = (self.pinned_vertices() | extra_banned) - {self.pos[rid]}
        reachable_targets = set(targets) - banned
        if not reachable_targets:
            return False
        path = _path_avoiding(self.graph, self.pos[rid], reachable_targets, banned)
        if path is None:
            return False
        try:
            self.follow(rid, path)
        except UnsupportedStructureError:
            return False
        return True

    # -- phases ----------------------------------------------------------

    def haven_depth(self, v):
        return min(
            (self.center_dist[h.center][v], h.center)
            for h in self.havens
            if self.center_dist[h.center][v] is not None
        )

    def gather(self):
        waiting = sorted(
            rid
            for rid in self.pos
            if rid not in self.pinned and self.in_haven(rid) is None
        )
        while waiting:
            progressed = False
            for rid in list(waiting):
                target = min(
                    self.havens,
                    key=lambda h: (
                        self.center_dist[h.center][self.pos[rid]]
                        if self.center_dist[h.center][self.pos[rid]] is not None
                        else self.graph.n + 1,
                        h.center,
                    ),
                )
                outside = {
                    self.pos[o]
                    for o in self.pos
                    if o != rid
                    and o not in self.pinned
                    and self.in_haven(o) is None
                }
                if self.route(rid, target.members, outside):
                    waiting.remove(rid)
                    progressed = True
            if not progressed:
                return False
        return True

    def deliver(self):
        # Deepest goals first: a shortest path from a haven to a shallower
        # goal never needs to run through a deeper, already-pinned one.
        pending = [
            rid
            for rid in self.pos
            if self.goal[rid] is not None and rid not in self.pinned
        ]
        for rid in sorted(
            pending, key=lambda rid: (-self.haven_depth(self.goal[rid])[0], rid)
        ):
            if self.pos[rid] != self.goal[rid]:
                if not self.route(rid, {self.goal[rid]}, set()):
                    return False
            self.pinned[rid] = self.goal[rid]
        return True

    def run(self):
        for r in sorted(self.robots, key=lambda r: r.id):
            if r.goal is not None and r.goal == r.start:
                self.pinned[r.id] = r.goal
        if self.gather() and self.deliver():
            return self.steps
        return self.fallback()

    def fallback(self):
        """Blocked routing: discard the prefix, solve the component exactly."""
        inst = Instance(self.graph, self.robots)
        result = solve_exact(inst, self.limits)
        if result.status == "optimal":
            return _schedule_to_steps(result.schedule, self.robots)
        if result.status == "infeasible":
            raise InfeasibleError("component goals are unreachable")
        raise LimitError(
            "constructive routing was blocked and the exact completion "
            "exceeded the state limit"
        )


def _solve_component(graph, robots, limits) -> list[MoveStep]:
    if len(robots) == 1:
        robot = robots[0]
        if robot.goal is None or robot.goal == robot.start:
            return []
        path = shortest_path(graph, robot.start, robot.goal)
        return [((robot.id, a, b),) for a, b in zip(path, path[1:])]
    k = len(robots)
    endpoints = sorted(
        {r.start for r in robots} | {r.goal for r in robots if r.goal is not None}
    )
    cache: dict[int, Haven | None] = {}
    centers = {}
    offender = None
    for v in endpoints:
        c = _nearest_nice(graph, v, k, NICE_RADIUS_FACTOR * k, cache)
        if c is None:
            offender = v
            break
        centers[v] = c
    if offender is not None:
        return _degenerate_component(graph, robots, offender, k, limits)
    havens = []
    used: set[int] = set()
    for c in sorted(set(centers.values())):
        h = cache[c]
        if h.members & used:
            continue
        havens.append(h)
        used |= h.members
    return _Pipeline(graph, robots, havens, limits).run()


def _degenerate_component(graph, robots, offender, k, limits) -> list[MoveStep]:
    """No haven cover: fall back to the exact corridor-compressed search."""
    inst = Instance(graph, robots)
    critical = critical_vertices(inst)
    estimate = (len(critical) + 2 * k + 2) ** k
    if estimate <= limits.max_states:
        result = solve_critical(inst, limits)
        if result.status == "optimal":
            return _schedule_to_steps(result.schedule, robots)
        if result.status == "infeasible":
            raise InfeasibleError("component goals are unreachable")
    tag = classify_vertex(graph, offender, k)
    err = UnsupportedStructureError(
        f"vertex {offender} is farther than {NICE_RADIUS_FACTOR}*k from every "
        f"nice vertex (classified {tag.kind}) and the exact fallback is out "
        "of reach"
    )
    err.tag = tag
    raise err


def _report(instance, schedule, lower_bound):
    check = validate_schedule(instance, schedule)
    if not check.ok:
        raise RuntimeError(
            f"internal error: constructed schedule invalid: {check.violation}"
        )
    return ApproxReport(
        schedule, check.energy, lower_bound, check.energy - lower_bound
    )


def approximate(instance: Instance, limits: Limits | None = None) -> ApproxReport:
    """Valid schedule with additive overhead polynomial in the robot count.

    Robots are parked in pairwise-disjoint havens near their starts, then
    destination-bearing robots walk to their goals one at a time, crossing
    occupied havens via bounded internal rearrangements; blocked routings
    degrade to exact search.  Raises InfeasibleError for unreachable goals
    and UnsupportedStructureError when some robot endpoint has no nice
    vertex within ``NICE_RADIUS_FACTOR * k`` and the exact fallback is out
    of reach.
    """
    limits = limits or default_limits()
    lower_bound = 0
    for r in instance.movers:
        d = shortest_path_distance(instance.graph, r.start, r.goal)
        if d is None:
            raise InfeasibleError(
                f"robot {r.id}: goal {r.goal} unreachable from start {r.start}"
            )
        lower_bound += d
    verdict = check_feasible(instance, limits)
    if verdict == "infeasible":
        raise InfeasibleError("no schedule reaches the goal configuration")
    if verdict == "state-limit":
        raise LimitError("feasibility precheck exceeded the state limit")
    if all(r.start == r.goal for r in instance.movers):
        return _report(
            instance,
            Schedule(tuple(Route((r.start,)) for r in instance.robots)),
            lower_bound,
        )
    if instance.k == 1:
        path = shortest_path(
            instance.graph, instance.robots[0].start, instance.robots[0].goal
        )
        return _report(instance, Schedule((Route(tuple(path)),)), lower_bound)
    comp_of = {}
    comps = connected_components(instance.graph)
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    steps: list[MoveStep] = []
    for ci in range(len(comps)):
        robots = tuple(r for r in instance.robots if comp_of[r.start] == ci)
        if not any(r.goal is not None and r.goal != r.start for r in robots):
            continue
        steps.extend(_solve_component(instance.graph, robots, limits))
    return _report(instance, _steps_to_schedule(instance, steps), lower_bound)


# ---------------------------------------------------------------------------
# single-destination exact solving


def _pocket_domain(graph, start, k):
    return _nearest_vertices(graph, start, POCKET_DOMAIN_FACTOR * k)


def solve_gcmp1(instance: Instance, limits: Limits | None = None) -> SearchResult:
    """Exact solve when exactly one robot has a destination.

    The destination-bearing robot keeps the full vertex set; each free
    robot is confined to its motion domain (or, in degenerate regions, to
    the closest ``9k`` vertices around its start), which preserves the
    optimum while shrinking the searched configuration space.
    """
    limits = limits or default_limits()
    movers = instance.movers
    if len(movers) != 1:
        raise InputError(
            f"exactly one destination-bearing robot required, got {len(movers)}"
        )
    mover = movers[0]
    k = instance.k
    full = frozenset(range(instance.graph.n))
    domains = []
    for r in instance.robots:
        if r.id == mover.id:
            domains.append(full)
            continue
        d = shortest_path_distance(instance.graph, r.start, mover.start)
        if d is None:
            # Different component: nothing there ever needs to move.
            domains.append(frozenset({r.start}))
            continue
        domain = compute_motion_domain(instance, r.id, d + 3 * k)
        if domain.applicable:
            domains.append(domain.vertices)
        else:
            domains.append(_pocket_domain(instance.graph, r.start, k))
    return solve_restricted(instance, domains, limits)


# ---------------------------------------------------------------------------
# budget-ball preprocessing


def energy_ball_restrict(instance: Instance) -> RestrictionResult:
    """Restrict a budgeted instance to budget-radius balls around movers.

    Keeps exactly the vertices within ``budget`` of some robot that must
    move, drops robots starting outside, and preserves the yes/no answer
    at the budget.  Returns ``no_instance`` without building anything when
    more robots must move than the budget allows, or when a single robot's
    distance already exceeds it.
    """
    if instance.budget is None:
        raise InputError("an energy budget is required")
    budget = instance.budget
    moving = [
        r for r in instance.robots if r.goal is not None and r.goal != r.start
    ]
    if len(moving) > budget:
        return RestrictionResult(
            None,
            no_instance=True,
            reason=(
                f"{len(moving)} robots must each move at least once but the "
                f"budget is {budget}"
            ),
        )
    ball_union: set[int] = set()
    for r in moving:
        dist = bfs_distances(instance.graph, r.start)
        if dist[r.goal] is None or dist[r.goal] > budget:
            return RestrictionResult(
                None,
                no_instance=True,
                reason=f"robot {r.id} alone needs more than {budget} moves",
            )
        ball_union.update(
            v for v, d in enumerate(dist) if d is not None and d <= budget
        )
    sub, _, new_of_old = induced_subgraph(instance.graph, ball_union)
    kept = tuple(
        Robot(
            r.id,
            new_of_old[r.start],
            new_of_old[r.goal] if r.goal is not None else None,
        )
        for r in instance.robots
        if r.start in ball_union
    )
    return RestrictionResult(Instance(sub, kept, budget), dict(new_of_old))


# ---------------------------------------------------------------------------
# standalone haven-detour routing


def route_through_havens(
    instance: Instance, robot: int, path, havens
) -> list[MoveStep]:
    """Move one robot along a walk, detouring through occupied havens.

    ``havens`` is an iterable of pairwise-disjoint havens; robots parked on
    their members are shuffled internally to let the walker through and are
    otherwise left in place.  A walk vertex occupied by a robot outside
    every haven raises UnsupportedStructureError.
    """
    havens = list(havens)
    used: set[int] = set()
    for h in havens:
        if h.members & used:
            raise InputError("havens must be pairwise disjoint")
        used |= h.members
    matches = [r for r in instance.robots if r.id == robot]
    if not matches:
        raise InputError(f"unknown robot id {robot}")
    walker = matches[0]
    path = list(path)
    if not path or path[0] != walker.start:
        raise InputError("path must begin at the robot's start")
    for v in path:
        if not 0 <= v < instance.graph.n:
            raise InputError(f"path vertex {v} out of range")
    for a, b in zip(path, path[1:]):
        if a != b and not instance.graph.has_edge(a, b):
            raise InputError(f"path step {a}-{b} is not an edge")
    compact = [path[0]]
    for v in path[1:]:
        if v != compact[-1]:
            compact.append(v)
    pipe = _Pipeline(instance.graph, instance.robots, havens, default_limits())
    pipe.follow(robot, compact)
    return pipe.steps
