"""Reconfiguration of robots inside a haven, and schedule normalization.

``swap`` moves any robot subset inside a haven from one placement to any
other using O(k^3) individual moves, all confined to the haven's members.
``normalize_around_haven`` rewrites a schedule so every robot crosses the
haven boundary at most once in each direction, without adding outside moves
and with O(k^4) moves inside.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import (
    Graph,
    InputError,
    Instance,
    LimitError,
    Route,
    Schedule,
    validate_schedule,
)
from .structure import Haven, check_haven

# State cap for the exact fallback searches on the haven's configuration
# graph (only reached in rare placements the incremental procedure cannot
# finish; the configuration space is tiny for the k values in scope).
DEFAULT_SEARCH_CAP = 2_000_000

MoveStep = tuple[tuple[int, int, int], ...]


@dataclass
class HavenConfiguration:
    """An injective placement of a robot subset on haven member vertices."""

    haven: Haven
    placement: dict[int, int]

    def __post_init__(self):
        seen = set()
        for robot, vertex in self.placement.items():
            if vertex not in self.haven.members:
                raise InputError(
                    f"robot {robot} placed at {vertex}, outside the haven"
                )
            if vertex in seen:
                raise InputError("placement is not injective")
            seen.add(vertex)
        if len(self.placement) > self.haven.k:
            raise InputError(
                f"{len(self.placement)} robots exceed the haven capacity "
                f"k={self.haven.k}"
            )


@dataclass
class _Tree:
    """A BFS tree over one witness set, rooted at the haven center."""

    root: int
    parent: dict[int, int]
    depth: dict[int, int]
    vertices: frozenset[int]

    def root_path(self, u: int) -> list[int]:
        """Vertices from u up to (and including) the root."""
        path = [u]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]])
        return path


def _bfs_tree(graph: Graph, root: int, vertices: frozenset[int]) -> _Tree:
    parent = {}
    depth = {root: 0}
    frontier = deque((root,))
    while frontier:
        u = frontier.popleft()
        for nb in graph.neighbors(u):
            if nb in vertices and nb not in depth:
                parent[nb] = u
                depth[nb] = depth[u] + 1
                frontier.append(nb)
    return _Tree(root=root, parent=parent, depth=depth, vertices=vertices)


class _SwapState:
    """Mutable robot positions plus the emitted move steps."""

    def __init__(self, positions: dict[int, int]):
        self.pos = dict(positions)
        self.occ = {v: r for r, v in positions.items()}
        self.steps: list[MoveStep] = []

    def emit(self, moves: list[tuple[int, int, int]]) -> None:
        vacated = {u for _, u, _ in moves}
        for robot, u, v in moves:
            assert self.pos[robot] == u, "move source out of sync"
            assert self.occ.get(v) is None or v in vacated, "move target occupied"
        for robot, u, _ in moves:
            del self.occ[u]
        for robot, _, v in moves:
            assert v not in self.occ, "two robots moved to one vertex"
            self.occ[v] = robot
            self.pos[robot] = v
        self.steps.append(tuple(moves))

    def walk(self, robot: int, path: list[int]) -> None:
        for u, v in zip(path, path[1:]):
            self.emit([(robot, u, v)])

    def move_count(self) -> int:
        return sum(len(step) for step in self.steps)


def _cascade(state: _SwapState, tree: _Tree, target: int) -> None:
    """One parallel step shifting every robot on the root->target path one
    edge deeper, filling ``target`` and freeing the root."""
    path = tree.root_path(target)[::-1]  # root ... target
    moves = []
    for u, v in zip(path, path[1:]):
        moves.append((state.occ[u], u, v))
    moves.reverse()  # leader (deepest) first, for readability only
    state.emit(moves)


def _absorb(state: _SwapState, tree: _Tree, blocked: set[int]) -> bool:
    """Push the robot at the tree root one cascade deeper into the tree.

    Targets the shallowest (then lowest-id) free vertex whose root path
    avoids ``blocked`` entirely; minimality makes that path fully occupied,
    so a single cascade realizes the push.  Returns False when no admissible
    target exists (caller falls back to exact search).
    """
    assert tree.root in state.occ, "absorb called with a free root"
    best = None
    for v in tree.vertices:
        if v == tree.root or v in state.occ or v in blocked:
            continue
        path = tree.root_path(v)
        if any(p in blocked for p in path):
            continue
        key = (tree.depth[v], v)
        if best is None or key < best:
            best = key
    if best is None:
        return False
    _cascade(state, tree, best[1])
    return True


def _config_search(
    graph: Graph,
    members: frozenset[int],
    robot_ids: list[int],
    start: dict[int, int],
    target: dict[int, int],
    cap: int,
) -> list[MoveStep]:
    """Minimum-move single-step search on the haven configuration graph."""
    order = sorted(robot_ids)
    s0 = tuple(start[r] for r in order)
    goal = tuple(target[r] for r in order)
    if s0 == goal:
        return []
    parents: dict[tuple, tuple | None] = {s0: None}
    moves_taken: dict[tuple, tuple[int, int, int]] = {}
    frontier = deque((s0,))
    while frontier:
        cfg = frontier.popleft()
        occupied = set(cfg)
        for i, u in enumerate(cfg):
            for nb in graph.neighbors(u):
                if nb not in members or nb in occupied:
                    continue
                nxt = cfg[:i] + (nb,) + cfg[i + 1 :]
                if nxt in parents:
                    continue
                parents[nxt] = cfg
                moves_taken[nxt] = (order[i], u, nb)
                if nxt == goal:
                    seq = []
                    cur = nxt
                    while parents[cur] is not None:
                        seq.append((moves_taken[cur],))
                        cur = parents[cur]
                    seq.reverse()
                    return seq
                frontier.append(nxt)
        if len(parents) > cap:
            raise LimitError(
                "haven reconfiguration fallback exceeded the state cap"
            )
    raise LimitError("haven reconfiguration fallback found no route")


def swap(
    graph: Graph,
    haven: Haven,
    from_config: HavenConfiguration,
    to_config: HavenConfiguration,
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> list[MoveStep]:
    """Move steps taking ``from_config`` to ``to_config`` inside the haven.

    Returns a list of time steps, each a tuple of (robot, from-vertex,
    to-vertex) moves that happen simultaneously (cascades are
    follow-the-leader chains).  Every visited vertex is a haven member and
    the total number of moves is O(k^3).

    Three phases: (1) evacuate every robot into the tree on the first
    witness set, (2) deliver robots destined for the second witness set,
    deepest destination first, routing through the center and its spare
    neighbor, (3) deliver robots destined inside the first witness set, then
    place center/spare-destined robots.  Placements the incremental phases
    cannot finish (delivered robots walling off a path) are completed by an
    exact minimum-move search on the haven's configuration graph.
    """
    check_haven(graph, haven)
    if from_config.haven != haven or to_config.haven != haven:
        raise InputError("configurations refer to a different haven")
    if set(from_config.placement) != set(to_config.placement):
        raise InputError("configurations place different robot sets")
    if from_config.placement == to_config.placement:
        return []

    c1, c2, _ = haven.witnesses
    w = haven.center
    x = haven.x
    t1 = _bfs_tree(graph, w, c1)
    t2 = _bfs_tree(graph, w, c2)
    state = _SwapState(from_config.placement)
    target = dict(to_config.placement)
    robot_ids = sorted(target)

    def fallback() -> list[MoveStep]:
        tail = _config_search(
            graph, haven.members, robot_ids, state.pos, target, search_cap
        )
        return state.steps + tail

    # Phase 1: evacuate everything into the first tree.
    outside = sorted(r for r, v in state.pos.items() if v not in c1)
    outside.sort(
        key=lambda r: (0, 0, r)
        if state.pos[r] == x
        else (1, t2.depth[state.pos[r]], r)
    )
    for robot in outside:
        if w in state.occ and not _absorb(state, t1, set()):
            return fallback()
        u = state.pos[robot]
        state.walk(robot, [x, w] if u == x else t2.root_path(u))
    if w in state.occ and not _absorb(state, t1, set()):
        return fallback()

    # Phases 2 and 3 share one episode shape: clear the blockers off the
    # mover's exit path and the destination's root path, parking them in the
    # second tree; park the mover at the spare vertex while the parked
    # robots return; descend to the destination.
    delivered1: set[int] = set()
    delivered2: set[int] = set()

    def episode(robot: int, dest: int, dest_tree: _Tree) -> bool:
        p = state.pos[robot]
        p_tree = t1  # movers always start episodes inside the first tree
        clear_vertices = set(p_tree.root_path(p)[1:-1])
        clear_vertices |= set(dest_tree.root_path(dest)[:-1])
        clear_vertices.discard(p)
        delivered_all = delivered1 | delivered2
        if any(v in delivered_all for v in clear_vertices if v in state.occ):
            return False
        blockers = [
            state.occ[v]
            for v in clear_vertices
            if v in state.occ and state.occ[v] != robot
        ]
        if any(state.pos[b] not in t1.depth for b in blockers):
            return False
        if not blockers:
            state.walk(robot, p_tree.root_path(p))
            state.walk(robot, dest_tree.root_path(dest)[::-1])
            return True
        both = blockers + [robot]
        both.sort(key=lambda r: (t1.depth[state.pos[r]], r))
        temps = []
        for b in both:
            q = state.pos[b]
            state.walk(b, t1.root_path(q))
            if b == robot:
                state.walk(b, [w, x])
            else:
                if not _absorb(state, t2, set(delivered2)):
                    return False
                temps.append(b)
        temps.sort(key=lambda r: (t2.depth[state.pos[r]], r))
        restore_blocked = set(delivered1)
        if dest in t1.vertices:
            # Returning helpers must not re-block the mover's descent.
            restore_blocked.update(t1.root_path(dest)[:-1])
        for b in temps:
            state.walk(b, t2.root_path(state.pos[b]))
            if not _absorb(state, t1, restore_blocked):
                return False
        state.walk(robot, [x, w])
        state.walk(robot, dest_tree.root_path(dest)[::-1])
        return True

    # Phase 2: second-tree destinations, deepest first.
    phase2 = [r for r in robot_ids if target[r] in c2 and target[r] != w]
    phase2.sort(key=lambda r: (-t2.depth[target[r]], target[r]))
    for robot in phase2:
        if not episode(robot, target[robot], t2):
            return fallback()
        delivered2.add(target[robot])

    # Phase 3: first-tree destinations, deepest first.
    phase3 = [r for r in robot_ids if target[r] in c1 and target[r] != w]
    phase3.sort(key=lambda r: (-t1.depth[target[r]], target[r]))
    for robot in phase3:
        if not episode(robot, target[robot], t1):
            return fallback()
        delivered1.add(target[robot])

    # Endgame: robots destined for the center or the spare vertex.  The
    # incremental phases leave them in the first tree; the exact search
    # finishes (and is also the safety net above).
    if any(target[r] in (w, x) for r in robot_ids):
        return fallback()
    return state.steps


def apply_steps(
    positions: dict[int, int], steps: list[MoveStep]
) -> dict[int, int]:
    """Replay move steps over a placement, validating each move."""
    pos = dict(positions)
    occ = {v: r for r, v in pos.items()}
    if len(occ) != len(pos):
        raise InputError("placement is not injective")
    for step in steps:
        vacated = set()
        entered = {}
        for robot, u, v in step:
            if pos.get(robot) != u:
                raise InputError(f"robot {robot} is not at {u}")
            vacated.add(u)
            if v in entered:
                raise InputError(f"two robots moved to {v}")
            entered[v] = robot
        for v, robot in entered.items():
            if v in occ and v not in vacated:
                raise InputError(f"vertex {v} is occupied")
        for robot, u, v in step:
            del occ[u]
        for v, robot in entered.items():
            occ[v] = robot
            pos[robot] = v
    return pos


def _swap_block(
    graph: Graph,
    haven: Haven,
    current: dict[int, int],
    target: dict[int, int],
) -> list[MoveStep]:
    if current == target:
        return []
    return swap(
        graph,
        haven,
        HavenConfiguration(haven, dict(current)),
        HavenConfiguration(haven, dict(target)),
    )


def _block_target(
    haven: Haven,
    current: dict[int, int],
    exiters: list[tuple[int, int]],
    enterers: list[tuple[int, int]],
) -> dict[int, int]:
    """Deterministic pre-crossing placement: exiting robots at their exit
    vertices, entry vertices free (unless a simultaneous exiter holds one),
    everyone else kept in place when possible."""
    target: dict[int, int] = {}
    taken: set[int] = set()
    for robot, vertex in exiters:
        target[robot] = vertex
        taken.add(vertex)
    entry_vertices = {v for _, v in enterers}
    moved = [r for r in sorted(current) if r not in target]
    spill = []
    for robot in moved:
        v = current[robot]
        if v in taken or v in entry_vertices:
            spill.append(robot)
        else:
            target[robot] = v
            taken.add(v)
    free = [
        v
        for v in sorted(haven.members)
        if v not in taken and v not in entry_vertices
    ]
    for robot, v in zip(spill, free):
        target[robot] = v
        taken.add(v)
    if len(target) != len(current):
        raise InputError("haven has no room for the pre-crossing placement")
    return target


def normalize_around_haven(
    instance: Instance, schedule: Schedule, haven: Haven
) -> Schedule:
    """Rewrite ``schedule`` so each robot enters and leaves the haven at most
    once, outside moves do not increase, and inside moves are O(k^4).

    Robots keep their original trajectories outside the haven, at their
    original step indices (with uniform waits inserted while the haven
    reconfigures); between boundary crossings they are parked inside, and a
    terminal reconfiguration restores the original final placement.
    """
    check_haven(instance.graph, haven)
    if haven.k != instance.k:
        raise InputError(
            f"haven was built for k={haven.k}, instance has k={instance.k}"
        )
    res = validate_schedule(instance, schedule)
    if not res.ok:
        raise InputError(f"invalid input schedule: {res.violation}")

    members = haven.members
    routes = schedule.routes
    horizon = schedule.horizon
    touching = [
        i
        for i in range(instance.k)
        if any(p in members for p in routes[i].positions)
    ]
    if not touching:
        return schedule

    first = {
        i: min(t for t, p in enumerate(routes[i].positions) if p in members)
        for i in touching
    }
    last = {
        i: max(t for t, p in enumerate(routes[i].positions) if p in members)
        for i in touching
    }
    entries: dict[int, list[tuple[int, int]]] = {}
    exits: dict[int, list[tuple[int, int]]] = {}
    for i in touching:
        if first[i] > 0:
            entries.setdefault(first[i], []).append(
                (i, routes[i].positions[first[i]])
            )
        if last[i] < horizon:
            exits.setdefault(last[i] + 1, []).append(
                (i, routes[i].positions[last[i]])
            )

    positions = {i: [routes[i].positions[0]] for i in range(instance.k)}
    inside = {
        i: routes[i].positions[0] for i in touching if first[i] == 0
    }

    def emit(moves: dict[int, int]) -> None:
        # One output step: robots in ``moves`` go to their new vertex,
        # everyone else waits.  Swap blocks key robots by index, so the
        # emitted triples translate directly.
        for i in range(instance.k):
            positions[i].append(moves.get(i, positions[i][-1]))

    for t in range(1, horizon + 1):
        step_exits = exits.get(t, [])
        step_entries = entries.get(t, [])
        if step_exits or step_entries:
            target = _block_target(haven, inside, step_exits, step_entries)
            for step in _swap_block(instance.graph, haven, inside, target):
                emit({robot: v for robot, _, v in step})
            inside = target
        moves: dict[int, int] = {}
        for i, vertex in step_entries:
            moves[i] = vertex
            inside[i] = vertex
        for i, vertex in step_exits:
            assert inside.get(i) == vertex, "exiter misplaced before crossing"
            del inside[i]
            moves[i] = routes[i].positions[t]
        for i in range(instance.k):
            if i in inside or i in moves:
                continue
            if i in touching and first[i] <= t <= last[i]:
                continue  # parked inside (handled via ``inside``)
            prev = positions[i][-1]
            nxt = routes[i].positions[t]
            if nxt != prev:
                moves[i] = nxt
        if moves:
            emit(moves)
    # Terminal block: restore original final placement of inside robots.
    final_target = {i: routes[i].positions[horizon] for i in inside}
    for step in _swap_block(instance.graph, haven, inside, final_target):
        emit({robot: v for robot, _, v in step})
    inside = final_target

    result = Schedule(tuple(Route(tuple(positions[i])) for i in range(instance.k)))
    check = validate_schedule(instance, result)
    assert check.ok, f"normalization produced an invalid schedule: {check.violation}"
    return result
