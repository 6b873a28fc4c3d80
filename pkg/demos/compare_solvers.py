"""Run every solver on a handful of small instances and tabulate energies.

The exact search is the ground truth; the critical-vertex search and the
checkpoint dynamic program match it exactly, the single-destination solver
matches it on its supported inputs, and the constructive approximation is
allowed bounded overhead.
"""
from coordmp import (
    Graph,
    Instance,
    Robot,
    UnsupportedStructureError,
    approximate,
    solve_critical,
    solve_exact,
    solve_gcmp1,
    solve_twdp,
)


def named_instances():
    p4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    cycle = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    pocket = Graph(5, [(0, 1), (1, 2), (2, 3), (1, 4)])
    yield "walk the path", Instance(p4, (Robot(0, 0, 3),))
    yield "swap via star", Instance(star, (Robot(0, 1, 2), Robot(1, 2, 1)))
    yield "rotate the cycle", Instance(
        cycle, (Robot(0, 0, 1), Robot(1, 1, 2), Robot(2, 2, 3))
    )
    yield "dodge into pocket", Instance(pocket, (Robot(0, 0, 3), Robot(1, 1, None)))


def run(name, instance):
    exact = solve_exact(instance)
    row = {"exact": exact.energy if exact.status == "optimal" else exact.status}
    crit = solve_critical(instance)
    row["critical"] = crit.energy if crit.status == "optimal" else crit.status
    if len(instance.movers) == 1:
        g1 = solve_gcmp1(instance)
        row["gcmp1"] = g1.energy if g1.status == "optimal" else g1.status
    else:
        row["gcmp1"] = "n/a"
    dp = solve_twdp(instance, 12, entry_cap=1_000_000)
    row["twdp"] = dp.energy if dp.status == "optimal" else dp.status
    try:
        row["approx"] = approximate(instance).energy
    except UnsupportedStructureError:
        row["approx"] = "n/a"
    print(f"{name:>20}: " + "  ".join(f"{k}={v}" for k, v in row.items()))


def main():
    print("energy per solver (ground truth first):")
    for name, instance in named_instances():
        run(name, instance)


if __name__ == "__main__":
    main()
