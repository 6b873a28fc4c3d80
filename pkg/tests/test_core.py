"""Model and format tests: conflicts, validation, energy, parse/render."""
from __future__ import annotations

import random

import pytest

from coordmp.core import (
    ConflictReport,
    Graph,
    InputError,
    Instance,
    Robot,
    Route,
    Schedule,
    bfs_distances,
    conflicts,
    connected_components,
    energy,
    induced_subgraph,
    parse_instance,
    parse_schedule,
    render_instance,
    render_schedule,
    shortest_path,
    shortest_path_distance,
    validate_schedule,
)


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def test_graph_rejects_bad_edges():
    with pytest.raises(InputError):
        Graph(3, [(0, 0)])
    with pytest.raises(InputError):
        Graph(3, [(0, 3)])


def test_graph_canonical_neighbors_sorted():
    g = Graph(4, [(2, 0), (0, 1), (3, 0)])
    assert g.neighbors(0) == (1, 2, 3)
    assert g.has_edge(3, 0) and g.has_edge(0, 3)
    assert g.degree(0) == 3 and g.degree(2) == 1


def test_instance_rejects_duplicate_starts_and_goals():
    g = path_graph(3)
    with pytest.raises(InputError):
        Instance(g, (Robot(0, 1, 0), Robot(1, 1, 2)))
    with pytest.raises(InputError):
        Instance(g, (Robot(0, 0, 2), Robot(1, 1, 2)))


def test_edge_swap_conflict_detected_at_step_1():
    a = Route((0, 1))
    b = Route((1, 0))
    assert conflicts(a, b) == ConflictReport("edge-swap", 1)


def test_follow_the_leader_is_legal():
    a = Route((0, 1))
    b = Route((1, 2))
    assert conflicts(a, b) is None


def test_vertex_conflict_detected():
    a = Route((0, 1))
    b = Route((2, 1))
    assert conflicts(a, b) == ConflictReport("vertex", 1)


def test_conflicts_horizon_mismatch_is_input_error():
    with pytest.raises(InputError):
        conflicts(Route((0, 1)), Route((0, 1, 2)))


def test_validate_flags_missed_goal_with_robot_id():
    inst = Instance(path_graph(3), (Robot(0, 0, 2),))
    sched = Schedule((Route((0, 1)),))
    res = validate_schedule(inst, sched)
    assert not res.ok
    assert "robot 0" in res.violation and "ends at 1" in res.violation


def test_validate_flags_missing_edge():
    inst = Instance(path_graph(3), (Robot(0, 0, 2),))
    res = validate_schedule(inst, Schedule((Route((0, 2)),)))
    assert not res.ok and "missing edge" in res.violation


def test_validate_never_constrains_free_robot_final_vertex():
    inst = Instance(path_graph(3), (Robot(0, 0, None),))
    assert validate_schedule(inst, Schedule((Route((0, 1, 2)),))).ok
    assert validate_schedule(inst, Schedule((Route((0,)),))).ok


def test_energy_counts_moves_not_waits():
    # Five moves along a path plus waits cost exactly 5.
    route = Route((0, 0, 1, 2, 2, 3, 4, 5, 5))
    sched = Schedule((route,))
    assert energy(sched) == 5
    all_wait = Schedule((Route((3, 3, 3)),))
    assert energy(all_wait) == 0


def test_validate_over_budget_flagged_but_ok():
    inst = Instance(path_graph(4), (Robot(0, 0, 3),), budget=1)
    sched = Schedule((Route((0, 1, 2, 3)),))
    res = validate_schedule(inst, sched)
    assert res.ok and res.over_budget and res.energy == 3


def test_parse_render_round_trip_bit_exact():
    text = "gcmp 1\nn 4\ne 0 1\ne 1 2\ne 2 3\nr 0 0 3\nr 1 1 -\nbudget 9\n"
    inst = parse_instance(text)
    assert render_instance(inst) == text
    again = parse_instance(render_instance(inst))
    assert again == inst


def test_parse_instance_named_vertices_first_appearance_order():
    text = "gcmp 1\nn 3\ne left mid\ne mid right\nr 0 left right\n"
    inst = parse_instance(text)
    # left=0, mid=1, right=2 by first appearance.
    assert sorted(inst.graph.edges) == [(0, 1), (1, 2)]
    assert inst.robots[0].start == 0 and inst.robots[0].goal == 2


def test_parse_instance_errors_carry_line_numbers():
    with pytest.raises(InputError, match="line 1"):
        parse_instance("gcmp 2\nn 1\n")
    with pytest.raises(InputError, match="line 3"):
        parse_instance("gcmp 1\nn 2\nbogus stuff here\n")


def test_parse_instance_comments_and_blank_lines_ignored():
    text = "# header comment\ngcmp 1\n\nn 2  # two vertices\ne 0 1\nr 0 0 1\n"
    inst = parse_instance(text)
    assert inst.graph.n == 2 and inst.k == 1


def test_schedule_round_trip_and_structural_checks():
    inst = parse_instance("gcmp 1\nn 3\ne 0 1\ne 1 2\nr 0 0 2\nr 1 1 -\n")
    text = "sched 2 2\nrobot 0: 0 1 2\nrobot 1: 1 2 2\n"
    sched = parse_schedule(text, inst)
    assert render_schedule(sched) == text
    with pytest.raises(InputError, match="expected 3"):
        parse_schedule("sched 2 2\nrobot 0: 0 1\nrobot 1: 1 2 2\n", inst)
    with pytest.raises(InputError):
        parse_schedule("sched 1 2\nrobot 0: 0 1 2\n", inst)


def test_shortest_path_helpers():
    g = path_graph(6)
    assert shortest_path_distance(g, 0, 5) == 5
    assert shortest_path(g, 0, 3) == [0, 1, 2, 3]
    assert bfs_distances(g, 0)[5] == 5
    disconnected = Graph(4, [(0, 1), (2, 3)])
    assert shortest_path_distance(disconnected, 0, 3) is None
    assert connected_components(disconnected) == [[0, 1], [2, 3]]


def test_induced_subgraph_maps_ids():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    sub, old_of_new, new_of_old = induced_subgraph(g, [1, 2, 4])
    assert sub.n == 3
    assert old_of_new == [1, 2, 4]
    assert sub.has_edge(new_of_old[1], new_of_old[2])
    assert sub.degree(new_of_old[4]) == 0


def test_conflicts_symmetry_property():
    rng = random.Random(7)
    g = Graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)])
    for _ in range(300):
        horizon = rng.randrange(1, 6)
        routes = []
        for _ in range(2):
            pos = [rng.randrange(6)]
            for _ in range(horizon):
                choices = (pos[-1],) + g.neighbors(pos[-1])
                pos.append(rng.choice(choices))
            routes.append(Route(tuple(pos)))
        assert conflicts(routes[0], routes[1]) == conflicts(routes[1], routes[0])


def test_wait_extension_preserves_validity_and_energy():
    rng = random.Random(11)
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)])
    for trial in range(100):
        starts = rng.sample(range(5), 2)
        inst = Instance(g, (Robot(0, starts[0], None), Robot(1, starts[1], None)))
        # Random valid schedule built by sequential single moves.
        positions = [[starts[0]], [starts[1]]]
        occupied = set(starts)
        for _ in range(rng.randrange(5)):
            i = rng.randrange(2)
            cur = positions[i][-1]
            free = [w for w in g.neighbors(cur) if w not in occupied]
            step_to = rng.choice(free) if free else cur
            occupied.discard(cur)
            occupied.add(step_to)
            positions[i].append(step_to)
            positions[1 - i].append(positions[1 - i][-1])
        sched = Schedule(tuple(Route(tuple(p)) for p in positions))
        res = validate_schedule(inst, sched)
        assert res.ok
        extended = Schedule(
            tuple(Route(tuple(p) + (p[-1],)) for p in positions)
        )
        res2 = validate_schedule(inst, extended)
        assert res2.ok and res2.energy == res.energy


def test_energy_lower_bound_sum_of_distances():
    # Any valid schedule spends at least dist(start, goal) per mover.
    g = Graph(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 5)])
    inst = Instance(g, (Robot(0, 0, 6), Robot(1, 2, None)))
    sched = Schedule(
        (Route((0, 1, 5, 6, 6)), Route((2, 2, 2, 2, 3)))
    )
    res = validate_schedule(inst, sched)
    assert res.ok
    bound = shortest_path_distance(g, 0, 6)
    assert res.energy >= bound
