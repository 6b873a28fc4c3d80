"""Tests for the schedule renderers."""
import pytest

from coordmp.core import Graph, InputError, Instance, Robot, Route, Schedule
from coordmp.render import render_dot, render_frames, render_text_trace


def _p3_instance():
    return Instance(Graph(3, [(0, 1), (1, 2)]), (Robot(0, 0, 2),))


def _walk_schedule():
    return Schedule((Route((0, 1, 2)),))


def test_trace_lists_movers_per_step():
    text = render_text_trace(_p3_instance(), _walk_schedule())
    lines = text.splitlines()
    assert lines[0] == "trace 1 2"
    assert lines[1] == "step 1: robot 0 0->1"
    assert lines[2] == "step 2: robot 0 1->2"
    assert len(lines) - 1 == 2  # step count equals the horizon


def test_trace_marks_all_wait_steps():
    inst = Instance(Graph(3, [(0, 1), (1, 2)]), (Robot(0, 1, 1),))
    sched = Schedule((Route((1, 1, 1)),))
    lines = render_text_trace(inst, sched).splitlines()
    assert lines[1:] == ["step 1: -", "step 2: -"]


def test_trace_rejects_mismatched_robot_count():
    with pytest.raises(InputError):
        render_text_trace(_p3_instance(), Schedule((Route((0,)), Route((1,)))))


def test_dot_describes_graph_and_endpoints():
    dot = render_dot(_p3_instance(), _walk_schedule())
    assert dot.startswith("graph gcmp {")
    assert "v0 -- v1;" in dot and "v1 -- v2;" in dot
    assert "start r0" in dot and "goal r0" in dot and "end r0" in dot
    bare = render_dot(_p3_instance())
    assert "end r0" not in bare


def test_frames_one_per_time_step():
    frames = render_frames(_p3_instance(), _walk_schedule())
    assert len(frames) == 3  # 2-step schedule: initial state plus each step
    for frame in frames:
        assert frame.startswith("<svg ") and frame.rstrip().endswith("</svg>")
    assert len(set(frames)) == 3  # the robot moves, so every frame differs


def test_all_wait_frames_are_identical():
    inst = Instance(Graph(4, [(0, 1), (1, 2), (2, 3)]), (Robot(0, 2, 2),))
    sched = Schedule((Route((2, 2, 2, 2)),))
    frames = render_frames(inst, sched)
    assert len(frames) == 4
    assert len(set(frames)) == 1


def test_frames_mark_goals():
    frames = render_frames(_p3_instance(), _walk_schedule())
    assert "stroke-dasharray" in frames[0]  # goal ring drawn
