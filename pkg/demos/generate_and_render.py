"""Generate a seeded grid instance, solve it, and render every output form.

Writes the instance, schedule, text trace, DOT description, and per-step
SVG frames into ./demo_output so the full file-format surface is visible
in one place.
"""
import os

from coordmp import (
    generate,
    render_dot,
    render_frames,
    render_instance,
    render_schedule,
    render_text_trace,
    solve_exact,
)

OUT = "demo_output"


def main():
    inst = generate("grid", width=3, height=3, robots=3, seed=7)
    res = solve_exact(inst)
    print(f"3x3 grid, 3 robots, seed 7: status={res.status} "
          f"energy={res.energy}, horizon={res.schedule.horizon}")

    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "instance.gcmp"), "w") as fh:
        fh.write(render_instance(inst))
    with open(os.path.join(OUT, "schedule.txt"), "w") as fh:
        fh.write(render_schedule(res.schedule))
    with open(os.path.join(OUT, "trace.txt"), "w") as fh:
        fh.write(render_text_trace(inst, res.schedule))
    with open(os.path.join(OUT, "graph.dot"), "w") as fh:
        fh.write(render_dot(inst, res.schedule))
    frames = render_frames(inst, res.schedule)
    for i, frame in enumerate(frames):
        with open(os.path.join(OUT, f"frame_{i:03d}.svg"), "w") as fh:
            fh.write(frame)
    print(f"wrote instance, schedule, trace, dot, and {len(frames)} frames "
          f"to ./{OUT}/")
    print()
    print(render_text_trace(inst, res.schedule).rstrip())


if __name__ == "__main__":
    main()
