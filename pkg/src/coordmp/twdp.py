"""Width-parameterized exact solving over nice tree decompositions.

The solver views each decomposition node as a boundaried subgraph whose
boundary is the node's bag.  A schedule interacts with that boundary at
*checkpoints*: steps in which some robot moves onto or off a bag vertex.
The per-node DP table maps *checkpoint sequences* (chained pairs of
configuration tuples over the bag) to the cheapest semi-schedule cost
below the node realizing that boundary interaction.

Symbols inside configuration tuples: a bag vertex id, ``UP`` (robot is
outside the node's subtree), or ``DOWN`` (robot is strictly below the
bag).  Consecutive pairs share their middle tuple, so a sequence is a
walk over configuration tuples whose every step is a genuine checkpoint.

Terminals (all starts and goals) are kept in every bag, which pins the
first tuple to the starts and the movers' coordinates of the last tuple
to the goals.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from coordmp.core import (
    Graph,
    InputError,
    Instance,
    LimitError,
)
from coordmp.oracle import Limits, SearchResult, default_limits, solve_exact

UP = -1
DOWN = -2

# Enumeration throttles: per-robot visit/exit caps inside one sequence and
# a cap on generated table entries (LimitError beyond it).
DEFAULT_VISIT_CAP = 2
DEFAULT_ENTRY_CAP = 200_000
# Exact elimination search is limited to this many vertices.
TD_EXACT_LIMIT = 13


# ---------------------------------------------------------------------------
# nice tree decompositions


@dataclass(frozen=True)
class TDNode:
    """One decomposition node: kind is leaf|introduce|forget|join|root."""

    id: int
    kind: str
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None  # the introduced / forgotten vertex


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Rooted nice decomposition with terminals kept in every bag."""

    nodes: dict[int, TDNode]
    root: int
    width: int
    base_width: int
    gamma: dict[int, frozenset[int]]


def _exact_elimination_order(graph: Graph) -> tuple[list[int], int]:
    """Minimum-width elimination order via the subset dynamic program."""
    n = graph.n
    if n == 0:
        return [], -1
    if n > TD_EXACT_LIMIT:
        raise LimitError(
            f"exact decomposition supports at most {TD_EXACT_LIMIT} vertices "
            f"(got {n}); supply a decomposition file instead"
        )
    adj = [set(graph.neighbors(v)) for v in range(n)]

    def reach_count(mask: int, v: int) -> int:
        # Vertices outside mask∪{v} reachable from v through mask.
        seen = 1 << v
        stack = [v]
        count = 0
        while stack:
            u = stack.pop()
            for w in adj[u]:
                bit = 1 << w
                if seen & bit:
                    continue
                seen |= bit
                if mask & bit:
                    stack.append(w)
                else:
                    count += 1
        return count

    best = {0: -1}
    choice: dict[int, int] = {}
    masks_by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1 << n):
        masks_by_size[bin(mask).count("1")].append(mask)
    for size in range(1, n + 1):
        for mask in masks_by_size[size]:
            value, pick = None, None
            sub = mask
            for v in range(n):
                bit = 1 << v
                if not mask & bit:
                    continue
                rest = mask ^ bit
                cand = max(best[rest], reach_count(rest, v))
                if value is None or cand < value or (cand == value and v < pick):
                    value, pick = cand, v
            best[mask] = value
            choice[mask] = pick
    order_rev = []
    mask = (1 << n) - 1
    while mask:
        v = choice[mask]
        order_rev.append(v)
        mask ^= 1 << v
    order = order_rev[::-1]
    return order, best[(1 << n) - 1]


def _elimination_bags(graph: Graph, order: list[int]):
    """Per-vertex bags and tree links from simulated elimination."""
    position = {v: i for i, v in enumerate(order)}
    adj = [set(graph.neighbors(v)) for v in range(graph.n)]
    bags = {}
    parent_vertex = {}
    for v in order:
        nbs = {u for u in adj[v] if position[u] > position[v]}
        bags[v] = frozenset({v} | nbs)
        for a in nbs:
            for b in nbs:
                if a != b:
                    adj[a].add(b)
        if nbs:
            parent_vertex[v] = min(nbs, key=lambda u: position[u])
    return bags, parent_vertex


class _Builder:
    def __init__(self):
        self.nodes: dict[int, TDNode] = {}

    def add(self, kind, bag, children=(), vertex=None) -> int:
        nid = len(self.nodes)
        self.nodes[nid] = TDNode(nid, kind, frozenset(bag), tuple(children), vertex)
        return nid

    def chain_to(self, nid: int, target: frozenset[int]) -> int:
        """Forget then introduce, one vertex per node, toward the target bag."""
        bag = self.nodes[nid].bag
        for v in sorted(bag - target):
            bag = bag - {v}
            nid = self.add("forget", bag, (nid,), v)
        for v in sorted(target - bag):
            bag = bag | {v}
            nid = self.add("introduce", bag, (nid,), v)
        return nid


def build_nice_td(graph: Graph, terminals) -> NiceTreeDecomposition:
    """Nice tree decomposition with the terminal set kept in every bag.

    The underlying decomposition has exact minimum width (computed by the
    elimination-order subset search, hence limited to small graphs); its
    bags are then augmented with the terminals, and leaf and root bags
    equal the terminal set.  Raises LimitError on graphs too large for the
    exact search, with the advice to supply a decomposition file.
    """
    terminals = frozenset(terminals)
    for t in terminals:
        if not 0 <= t < graph.n:
            raise InputError(f"terminal {t} out of range")
    order, base_width = _exact_elimination_order(graph)
    bags, parent_vertex = _elimination_bags(graph, order)
    children_of: dict[int, list[int]] = {v: [] for v in order}
    roots = []
    for v in order:
        if v in parent_vertex:
            children_of[parent_vertex[v]].append(v)
        else:
            roots.append(v)
    builder = _Builder()

    def build_vertex(v: int) -> int:
        bag = frozenset(bags[v] | terminals)
        kids = [builder.chain_to(build_vertex(c), bag) for c in sorted(children_of[v])]
        if not kids:
            leaf = builder.add("leaf", terminals)
            return builder.chain_to(leaf, bag)
        nid = kids[0]
        for other in kids[1:]:
            nid = builder.add("join", bag, (nid, other))
        return nid

    tops = [builder.chain_to(build_vertex(r), terminals) for r in sorted(roots)]
    if not tops:
        tops = [builder.add("leaf", terminals)]
    top = tops[0]
    for other in tops[1:]:
        top = builder.add("join", terminals, (top, other))
    root = builder.add("root", terminals, (top,))
    nodes = builder.nodes
    width = max(len(n.bag) for n in nodes.values()) - 1
    gamma = _compute_gamma(nodes, root)
    td = NiceTreeDecomposition(nodes, root, width, base_width, gamma)
    validate_td(td, graph, terminals)
    return td


def _compute_gamma(nodes, root):
    gamma: dict[int, frozenset[int]] = {}

    def rec(nid):
        node = nodes[nid]
        acc = set(node.bag)
        for c in node.children:
            rec(c)
            acc |= gamma[c]
        gamma[nid] = frozenset(acc)

    rec(root)
    return gamma


def validate_td(td: NiceTreeDecomposition, graph: Graph, terminals) -> None:
    """Check all decomposition axioms; raises InputError naming the failure."""
    terminals = frozenset(terminals)
    nodes = td.nodes
    if td.root not in nodes:
        raise InputError("root node missing")
    seen = set()
    stack = [td.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise InputError(f"node {nid} reachable twice (not a tree)")
        seen.add(nid)
        node = nodes[nid]
        for c in node.children:
            if c not in nodes:
                raise InputError(f"node {nid} links to unknown child {c}")
            stack.append(c)
    if seen != set(nodes):
        raise InputError("decomposition graph is not a single rooted tree")
    covered = set()
    for node in nodes.values():
        covered |= node.bag
        for v in node.bag:
            if not 0 <= v < graph.n:
                raise InputError(f"node {node.id}: bag vertex {v} out of range")
    if covered != set(range(graph.n)):
        missing = sorted(set(range(graph.n)) - covered)
        raise InputError(f"vertices {missing} appear in no bag")
    for u, v in graph.edges:
        if not any({u, v} <= node.bag for node in nodes.values()):
            raise InputError(f"edge ({u}, {v}) appears in no bag")
    parent = {}
    for node in nodes.values():
        for c in node.children:
            parent[c] = node.id
    for v in range(graph.n):
        holders = [n.id for n in nodes.values() if v in n.bag]
        anchor = holders[0]
        reached = {anchor}
        frontier = deque([anchor])
        holder_set = set(holders)
        while frontier:
            nid = frontier.popleft()
            near = list(nodes[nid].children)
            if nid in parent:
                near.append(parent[nid])
            for other in near:
                if other in holder_set and other not in reached:
                    reached.add(other)
                    frontier.append(other)
        if reached != holder_set:
            raise InputError(f"vertex {v} has a disconnected occurrence set")
    for node in nodes.values():
        kind = node.kind
        kids = [nodes[c] for c in node.children]
        if kind == "leaf":
            if kids:
                raise InputError(f"leaf {node.id} has children")
            if node.bag != terminals:
                raise InputError(f"leaf {node.id} bag must equal the terminal set")
        elif kind == "introduce":
            if len(kids) != 1 or node.vertex is None:
                raise InputError(f"introduce {node.id} malformed")
            if node.bag != kids[0].bag | {node.vertex} or node.vertex in kids[0].bag:
                raise InputError(f"introduce {node.id} does not add exactly one vertex")
        elif kind == "forget":
            if len(kids) != 1 or node.vertex is None:
                raise InputError(f"forget {node.id} malformed")
            if node.bag != kids[0].bag - {node.vertex} or node.vertex not in kids[0].bag:
                raise InputError(f"forget {node.id} does not drop exactly one vertex")
        elif kind == "join":
            if len(kids) != 2 or any(k.bag != node.bag for k in kids):
                raise InputError(f"join {node.id} needs two children with equal bags")
        elif kind == "root":
            if len(kids) != 1 or kids[0].bag != node.bag:
                raise InputError(f"root {node.id} needs one child with an equal bag")
            if node.bag != terminals:
                raise InputError("root bag must equal the terminal set")
            if node.id != td.root:
                raise InputError("kind root on a non-root node")
        else:
            raise InputError(f"node {node.id}: unknown kind {kind!r}")
    if nodes[td.root].kind != "root":
        raise InputError("root node must have kind root")


def render_td(td: NiceTreeDecomposition) -> str:
    """Serialize a decomposition in the td text format."""
    lines = ["td 1"]
    for nid in sorted(td.nodes):
        node = td.nodes[nid]
        bag = " ".join(str(v) for v in sorted(node.bag))
        lines.append(f"node {nid} {node.kind} {bag}".rstrip())
    for nid in sorted(td.nodes):
        for c in td.nodes[nid].children:
            lines.append(f"edge {nid} {c}")
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> NiceTreeDecomposition:
    """Parse the td text format (header, node lines, parent-child edges)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "td 1":
        raise InputError("decomposition file must start with 'td 1'")
    raw: dict[int, tuple[str, frozenset[int]]] = {}
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "node":
            if len(parts) < 3:
                raise InputError(f"malformed node line: {ln!r}")
            try:
                nid = int(parts[1])
                bag = frozenset(int(x) for x in parts[3:])
            except ValueError:
                raise InputError(f"malformed node line: {ln!r}") from None
            if nid in raw:
                raise InputError(f"duplicate node id {nid}")
            raw[nid] = (parts[2], bag)
        elif parts[0] == "edge":
            if len(parts) != 3:
                raise InputError(f"malformed edge line: {ln!r}")
            try:
                edges.append((int(parts[1]), int(parts[2])))
            except ValueError:
                raise InputError(f"malformed edge line: {ln!r}") from None
        else:
            raise InputError(f"unknown line kind: {ln!r}")
    children: dict[int, list[int]] = {nid: [] for nid in raw}
    has_parent = set()
    for p, c in edges:
        if p not in raw or c not in raw:
            raise InputError(f"edge ({p}, {c}) references unknown node")
        children[p].append(c)
        if c in has_parent:
            raise InputError(f"node {c} has two parents")
        has_parent.add(c)
    roots = [nid for nid in raw if nid not in has_parent]
    if len(roots) != 1:
        raise InputError(f"expected exactly one root, found {len(roots)}")
    nodes = {}
    for nid, (kind, bag) in raw.items():
        vertex = None
        kids = children[nid]
        if kind in ("introduce", "forget") and len(kids) == 1:
            other = raw[kids[0]][1]
            delta = (bag ^ other)
            if len(delta) == 1:
                vertex = next(iter(delta))
        nodes[nid] = TDNode(nid, kind, bag, tuple(kids), vertex)
    root = roots[0]
    width = max(len(n.bag) for n in nodes.values()) - 1
    gamma = _compute_gamma(nodes, root)
    return NiceTreeDecomposition(nodes, root, width, width, gamma)


# ---------------------------------------------------------------------------
# checkpoint sequences and goodness


def _is_symbol(x) -> bool:
    return x == UP or x == DOWN


def _check_shape(seq, bag, k) -> None:
    for pair in seq:
        if len(pair) != 2:
            raise InputError("sequence items must be tuple pairs")
        for tup in pair:
            if len(tup) != k:
                raise InputError(f"configuration tuples must have {k} entries")
            for c in tup:
                if not _is_symbol(c) and c not in bag:
                    raise InputError(f"symbol {c!r} is not a bag vertex")


def _pair_changes(pair):
    a, b = pair
    return [j for j in range(len(a)) if a[j] != b[j]]


def _is_checkpoint_pair(pair, bag) -> bool:
    a, b = pair
    return any(
        a[j] != b[j] and (a[j] in bag or b[j] in bag) for j in range(len(a))
    )


def sequence_violations(seq, bag, graph: Graph, instance: Instance) -> list[int]:
    """Numbers of the signature properties the sequence violates.

    Property 3 (constant tuples between checkpoints) is encoded by the
    chained-pair representation itself; a chaining break reports 3.
    """
    bag = frozenset(bag)
    seq = tuple(tuple(p) for p in seq)
    k = instance.k
    _check_shape(seq, bag, k)
    bad: set[int] = set()
    if seq:
        first, last = seq[0][0], seq[-1][1]
        for i, r in enumerate(instance.robots):
            if r.start in bag:
                if first[i] != r.start:
                    bad.add(1)
            elif not _is_symbol(first[i]):
                bad.add(1)
            if r.goal is None:
                continue
            if r.goal in bag:
                if last[i] != r.goal:
                    bad.add(1)
            elif not _is_symbol(last[i]):
                bad.add(1)
    else:
        if any(r.goal is not None and r.goal != r.start for r in instance.robots):
            bad.add(1)
        return sorted(bad)
    if not _is_checkpoint_pair(seq[0], bag) or not _is_checkpoint_pair(seq[-1], bag):
        bad.add(2)
    for prev, nxt in zip(seq, seq[1:]):
        if prev[1] != nxt[0]:
            bad.add(3)
    for pair in seq[1:-1]:
        if not _is_checkpoint_pair(pair, bag):
            bad.add(4)
    for a, b in seq:
        for j in range(k):
            if (a[j] == UP and b[j] == DOWN) or (a[j] == DOWN and b[j] == UP):
                bad.add(5)
    tuples = [seq[0][0]] + [p[1] for p in seq]
    for tup in tuples:
        seen = set()
        for c in tup:
            if not _is_symbol(c):
                if c in seen:
                    bad.add(6)
                seen.add(c)
    for a, b in seq:
        for j in range(k):
            v = b[j]
            if _is_symbol(v) or a[j] == v:
                continue
            for jp in range(k):
                if jp != j and a[jp] == v and b[jp] == v:
                    bad.add(7)
    for a, b in seq:
        used = set()
        for j in range(k):
            if a[j] == b[j] or _is_symbol(a[j]) or _is_symbol(b[j]):
                continue
            if not graph.has_edge(a[j], b[j]):
                bad.add(8)
                continue
            edge = (min(a[j], b[j]), max(a[j], b[j]))
            if edge in used:
                bad.add(8)
            used.add(edge)
    return sorted(bad)


def is_good_sequence(seq, bag, graph: Graph, instance: Instance) -> bool:
    """True when the sequence satisfies every signature property."""
    return not sequence_violations(seq, bag, graph, instance)


# ---------------------------------------------------------------------------
# DP tables


@dataclass
class DPTable:
    """Finite checkpoint-sequence entries for one node; absent = sentinel."""

    node: int
    rho: int
    entries: dict = field(default_factory=dict)

    @property
    def sentinel(self) -> int:
        return self.rho + 1

    def get(self, seq) -> int:
        return self.entries.get(tuple(tuple(p) for p in seq), self.sentinel)

    def put_min(self, seq, value: int) -> None:
        if value > self.rho:
            return
        cur = self.entries.get(seq)
        if cur is None or value < cur:
            self.entries[seq] = value


def _default_rho(instance: Instance) -> int:
    return max(1, instance.graph.n**3 * max(1, instance.k))


def _end_ok(tup, instance: Instance) -> bool:
    for i, r in enumerate(instance.robots):
        if r.goal is not None and tup[i] != r.goal:
            return False
    return True


def dp_leaf(
    node: TDNode,
    instance: Instance,
    budget: int,
    *,
    rho: int | None = None,
    visit_cap: int = DEFAULT_VISIT_CAP,
    entry_cap: int = DEFAULT_ENTRY_CAP,
    exterior: frozenset[int] | None = None,
) -> DPTable:
    """Brute-force table for a leaf: its bag is the whole visible subgraph.

    Every sequence entry is realized by an explicit chain of parallel
    steps among bag vertices (plus vanish/reappear at the boundary), so
    the stored value simply counts the bag-internal moves of the chain.
    ``budget`` counts configuration tuples, so ``budget // 2`` chained
    pairs are explored.  ``exterior``, when given, limits vanishing and
    reappearing to bag vertices that actually have a neighbor outside the
    node's subtree (a crossing must use a real edge).
    """
    rho = _default_rho(instance) if rho is None else rho
    bag = node.bag
    g = instance.graph
    k = instance.k
    for r in instance.robots:
        if r.start not in bag or (r.goal is not None and r.goal not in bag):
            raise InputError("leaf bag must contain every robot start and goal")
    pairs_max = max(0, budget // 2)
    bag_sorted = sorted(bag)
    adj = {v: [u for u in g.neighbors(v) if u in bag] for v in bag_sorted}
    portals = bag if exterior is None else frozenset(bag & exterior)
    portal_sorted = sorted(portals)
    start = tuple(r.start for r in instance.robots)
    table = DPTable(node.id, rho)
    counter = [0]

    def successors(cur):
        options = []
        for i in range(k):
            c = cur[i]
            opts = [(c, 0)]
            if c == UP:
                opts.extend((z, 0) for z in portal_sorted)
            else:
                if c in portals:
                    opts.append((UP, 0))
                opts.extend((z, 1) for z in adj[c])
            options.append(opts)
        combos = [((), 0)]
        for opts in options:
            combos = [
                (prefix + (val,), cost + c)
                for prefix, cost in combos
                for val, c in opts
            ]
        for nxt, cost in combos:
            if nxt == cur:
                continue
            occupied = [c for c in nxt if c != UP]
            if len(occupied) != len(set(occupied)):
                continue
            used_edges = set()
            ok = True
            for j in range(k):
                if cur[j] == nxt[j] or cur[j] == UP or nxt[j] == UP:
                    continue
                edge = (min(cur[j], nxt[j]), max(cur[j], nxt[j]))
                if edge in used_edges:
                    ok = False
                    break
                used_edges.add(edge)
            if ok:
                yield nxt, cost

    def dfs(cur, chain, cost, visits, exits):
        counter[0] += 1
        if counter[0] > entry_cap:
            raise LimitError("leaf checkpoint enumeration exceeded the entry cap")
        if _end_ok(cur, instance):
            table.put_min(tuple(chain), cost)
        if len(chain) >= pairs_max:
            return
        for nxt, step_cost in successors(cur):
            total = cost + step_cost
            if total > rho:
                continue
            new_visits = None
            new_exits = None
            feasible = True
            for j in range(k):
                if nxt[j] == cur[j]:
                    continue
                if nxt[j] == UP:
                    cnt = exits.get(j, 0) + 1
                    if cnt > visit_cap:
                        feasible = False
                        break
                    if new_exits is None:
                        new_exits = dict(exits)
                    new_exits[j] = cnt
                else:
                    key = (j, nxt[j])
                    cnt = visits.get(key, 0) + 1
                    if cnt > visit_cap:
                        feasible = False
                        break
                    if new_visits is None:
                        new_visits = dict(visits)
                    new_visits[key] = cnt
            if not feasible:
                continue
            chain.append((cur, nxt))
            dfs(
                nxt,
                chain,
                total,
                new_visits if new_visits is not None else visits,
                new_exits if new_exits is not None else exits,
            )
            chain.pop()

    dfs(start, [], 0, {}, {})
    return table


def _project_forget(seq, v):
    out = []
    for a, b in seq:
        pa = tuple(DOWN if c == v else c for c in a)
        pb = tuple(DOWN if c == v else c for c in b)
        if pa != pb:
            out.append((pa, pb))
    return tuple(out)


def dp_forget(
    node: TDNode,
    child_table: DPTable,
    budget: int,
    *,
    instance: Instance,
) -> DPTable:
    """Forget-node table: drop the forgotten vertex from the child's view.

    Each child entry projects to this node's alphabet by renaming the
    forgotten vertex to DOWN and deleting pairs that become changeless;
    ``budget`` caps how many pairs a contributing child entry may lose
    this way (the child's extra boundary interactions with the forgotten
    vertex).  Projected sequences failing any signature property are
    discarded.
    """
    v = node.vertex
    table = DPTable(node.id, child_table.rho)
    g = instance.graph
    for seq, value in child_table.entries.items():
        proj = _project_forget(seq, v)
        if len(seq) - len(proj) > budget:
            continue
        if not is_good_sequence(proj, node.bag, g, instance):
            continue
        table.put_min(proj, value)
    return table


def dp_introduce(
    node: TDNode,
    child_table: DPTable,
    *,
    instance: Instance,
    budget: int | None = None,
    visit_cap: int = DEFAULT_VISIT_CAP,
    entry_cap: int = DEFAULT_ENTRY_CAP,
    exterior: frozenset[int] | None = None,
) -> DPTable:
    """Introduce-node table: weave visits of the new vertex into child entries.

    The new vertex is separated from everything strictly below the bag, so
    a robot can only reach it from a bag neighbor (a visible move, which
    adds one to the entry value) or from outside the subtree (free here,
    paid where that move becomes visible).  Robots parked on the new
    vertex ride existing checkpoints unchanged.  ``exterior``, when given,
    names the vertices with a neighbor outside the node's subtree; the
    new vertex can then host arrivals from above only if it is one.
    """
    v = node.vertex
    bag = node.bag
    g = instance.graph
    k = instance.k
    rho = child_table.rho
    vn = frozenset(u for u in g.neighbors(v) if u in bag)
    v_portal = exterior is None or v in exterior
    pairs_max = None if budget is None else max(0, budget // 2)
    table = DPTable(node.id, rho)
    counter = [0]

    def bump():
        counter[0] += 1
        if counter[0] > entry_cap:
            raise LimitError("introduce lifting exceeded the entry cap")

    for seq, value in child_table.entries.items():
        states = [seq[0][0]] if seq else [tuple(r.start for r in instance.robots)]
        for pair in seq:
            states.append(pair[1])

        def record(chain, mu):
            lifted = tuple(chain)
            if is_good_sequence(lifted, bag, g, instance):
                table.put_min(lifted, value + mu)

        def lift(idx, cur, at_v, chain, mu, visits):
            bump()
            if pairs_max is not None and len(chain) > pairs_max:
                return
            if value + mu > rho:
                return
            if idx == len(seq):
                record(chain, mu)
            # Insert a visit event: a robot outside the subtree steps onto
            # the new vertex, or leaves it back outside.  Either move uses
            # an edge leaving the subtree, so the new vertex must have one.
            if at_v is None:
                if v_portal:
                    for i in range(k):
                        if cur[i] != UP or visits[i] >= visit_cap:
                            continue
                        nxt = cur[:i] + (v,) + cur[i + 1 :]
                        chain.append((cur, nxt))
                        new_visits = list(visits)
                        new_visits[i] += 1
                        lift(idx, nxt, i, chain, mu, new_visits)
                        chain.pop()
            elif v_portal:
                i = at_v
                nxt = cur[:i] + (UP,) + cur[i + 1 :]
                chain.append((cur, nxt))
                lift(idx, nxt, None, chain, mu, visits)
                chain.pop()
            if idx == len(seq):
                return
            a, b = seq[idx]
            # Lift the original pair: robots interacting with the outside
            # may route through the new vertex instead.
            choice_sets = []
            for i in range(k):
                ai = cur[i]
                bi = b[i]
                opts = []
                if a[i] == UP and b[i] == UP:
                    opts.append((v, 0) if at_v == i else (UP, 0))
                elif a[i] == UP:
                    if at_v == i:
                        if bi in vn:
                            opts.append((bi, 1))
                    elif exterior is None or bi in exterior:
                        opts.append((bi, 0))
                elif b[i] == UP:
                    if exterior is None or a[i] in exterior:
                        opts.append((UP, 0))
                    if at_v is None and a[i] in vn and visits[i] < visit_cap:
                        opts.append((v, 1))
                else:
                    opts.append((bi, 0))
                choice_sets.append(opts)
            combos = [((), 0, None)]
            for i, opts in enumerate(choice_sets):
                grown = []
                for prefix, add, owner in combos:
                    for val, cost in opts:
                        nown = owner
                        if val == v:
                            if owner is not None:
                                continue
                            nown = i
                        grown.append((prefix + (val,), add + cost, nown))
                combos = grown
            for nxt, add, owner in combos:
                new_visits = visits
                if owner is not None and at_v != owner:
                    new_visits = list(visits)
                    new_visits[owner] += 1
                if nxt == cur:
                    continue
                chain.append((cur, nxt))
                lift(idx + 1, nxt, owner, chain, mu + add, new_visits)
                chain.pop()

        start_state = states[0]
        lift(0, start_state, None, [], 0, [0] * k)
    return table


def _crosses_outside_non_portal(seq, k, exterior) -> bool:
    """True when some step moves between UP and a vertex with no edge out."""
    for a, b in seq:
        for j in range(k):
            if a[j] == UP and not _is_symbol(b[j]) and b[j] not in exterior:
                return True
            if b[j] == UP and not _is_symbol(a[j]) and a[j] not in exterior:
                return True
    return False


def _merge_coord(c1, c2):
    if c1 == c2:
        return None if c1 == DOWN else c1
    if c1 == DOWN and c2 == UP:
        return DOWN
    if c1 == UP and c2 == DOWN:
        return DOWN
    return None


def _zip_merge(s1, s2, k):
    merged = []
    for (a1, b1), (a2, b2) in zip(s1, s2):
        ma = []
        mb = []
        for j in range(k):
            x = _merge_coord(a1[j], a2[j])
            y = _merge_coord(b1[j], b2[j])
            if x is None or y is None:
                return None
            ma.append(x)
            mb.append(y)
        merged.append((tuple(ma), tuple(mb)))
    return tuple(merged)


def dp_join(
    node: TDNode,
    left_table: DPTable,
    right_table: DPTable,
    *,
    instance: Instance,
    exterior: frozenset[int] | None = None,
) -> DPTable:
    """Join-node table: combine sibling entries checkpoint for checkpoint.

    Every checkpoint shows a bag-vertex change, so both children see every
    checkpoint of the combined view; sequences therefore merge pairwise,
    with DOWN meaning "in exactly one child's interior".  Moves between
    two bag vertices were paid in both children and are refunded once.
    ``exterior``, when given, prunes merged sequences that cross between a
    bag vertex and the outside where no such crossing edge remains.
    """
    g = instance.graph
    k = instance.k
    table = DPTable(node.id, min(left_table.rho, right_table.rho))
    by_len: dict[int, list] = {}
    for s2, h2 in right_table.entries.items():
        by_len.setdefault(len(s2), []).append((s2, h2))
    for s1, h1 in left_table.entries.items():
        for s2, h2 in by_len.get(len(s1), ()):
            merged = _zip_merge(s1, s2, k)
            if merged is None:
                continue
            if exterior is not None and _crosses_outside_non_portal(
                merged, k, exterior
            ):
                continue
            mu = 0
            for a, b in merged:
                for j in range(k):
                    if (
                        a[j] != b[j]
                        and not _is_symbol(a[j])
                        and not _is_symbol(b[j])
                    ):
                        mu += 1
            if not is_good_sequence(merged, node.bag, g, instance):
                continue
            table.put_min(merged, h1 + h2 - mu)
    return table


# ---------------------------------------------------------------------------
# the solver


def _has_up(seq) -> bool:
    for a, b in seq:
        if UP in a or UP in b:
            return True
    return False


def solve_twdp(
    instance: Instance,
    checkpoint_budget: int | None = None,
    *,
    visit_cap: int = DEFAULT_VISIT_CAP,
    td: NiceTreeDecomposition | None = None,
    limits: Limits | None = None,
    entry_cap: int = DEFAULT_ENTRY_CAP,
    certify: bool = True,
    audit: bool = False,
) -> SearchResult:
    """Energy optimum via the checkpoint-sequence dynamic program.

    ``checkpoint_budget`` caps the tuple length of every per-node sequence
    (default ``2k(w+1)·min(visit_cap, 8)``).  The returned status is
    ``optimal`` only when an independent exact run confirms the value (or
    the instance is trivial); otherwise ``budget-limited`` admits that a
    larger budget might find a cheaper schedule.  With a budget present on
    the instance, a confirmed value above it reports ``budget-exceeded``.
    """
    limits = limits or default_limits()
    if instance.k == 0 or all(
        r.goal is None or r.goal == r.start for r in instance.robots
    ):
        from coordmp.core import Route, Schedule

        sched = Schedule(tuple(Route((r.start,)) for r in instance.robots))
        return SearchResult("optimal", 0, sched, 0)
    terminals = frozenset(
        {r.start for r in instance.robots}
        | {r.goal for r in instance.robots if r.goal is not None}
    )
    if td is None:
        td = build_nice_td(instance.graph, terminals)
    else:
        validate_td(td, instance.graph, terminals)
    w = td.width
    k = instance.k
    budget = (
        checkpoint_budget
        if checkpoint_budget is not None
        else 2 * k * (w + 1) * min(visit_cap, 8)
    )
    if budget < 2:
        raise InputError("checkpoint budget must be at least 2")
    rho = _upper_bound(instance)
    pairs_budget = budget // 2
    exterior_of = {
        nid: frozenset(
            v
            for v in td.nodes[nid].bag
            if any(u not in td.gamma[nid] for u in instance.graph.neighbors(v))
        )
        for nid in td.nodes
    }

    def compute(nid: int) -> DPTable:
        node = td.nodes[nid]
        if node.kind == "leaf":
            table = dp_leaf(
                node,
                instance,
                budget,
                rho=rho,
                visit_cap=visit_cap,
                entry_cap=entry_cap,
                exterior=exterior_of[nid],
            )
        elif node.kind == "introduce":
            child = compute(node.children[0])
            table = dp_introduce(
                node,
                child,
                instance=instance,
                budget=budget,
                visit_cap=visit_cap,
                entry_cap=entry_cap,
                exterior=exterior_of[nid],
            )
        elif node.kind == "forget":
            child = compute(node.children[0])
            table = dp_forget(node, child, pairs_budget, instance=instance)
        elif node.kind == "join":
            left = compute(node.children[0])
            right = compute(node.children[1])
            table = dp_join(
                node, left, right, instance=instance, exterior=exterior_of[nid]
            )
        elif node.kind == "root":
            table = compute(node.children[0])
        else:
            raise InputError(f"unknown node kind {node.kind!r}")
        if len(table.entries) > entry_cap:
            raise LimitError(
                "checkpoint table exceeded the entry cap; lower the budget "
                "or raise entry_cap"
            )
        return table

    root_table = compute(td.root)
    if audit:
        _audit(td, instance, budget, rho, visit_cap, entry_cap, root_table)
    finite = [
        value for seq, value in root_table.entries.items() if not _has_up(seq)
    ]
    value = min(finite) if finite else None
    states = len(root_table.entries)
    reference = None
    if certify:
        unbudgeted = Instance(instance.graph, instance.robots)
        reference = solve_exact(unbudgeted, limits)
    if value is None:
        if reference is not None and reference.status == "infeasible":
            return SearchResult("infeasible", None, None, states)
        return SearchResult("budget-limited", None, None, states)
    certified = (
        reference is not None
        and reference.status == "optimal"
        and reference.energy == value
    )
    if certified:
        if instance.budget is not None and value > instance.budget:
            return SearchResult("budget-exceeded", value, None, states)
        return SearchResult("optimal", value, None, states)
    return SearchResult("budget-limited", value, None, states)


def _upper_bound(instance: Instance) -> int:
    try:
        from coordmp.approx import approximate

        return approximate(instance).energy
    except Exception:
        return _default_rho(instance)


def _audit(td, instance, budget, rho, visit_cap, entry_cap, root_table):
    """Re-derive leaf entries and recompute the pipeline deterministically."""
    g = instance.graph
    for node in td.nodes.values():
        if node.kind != "leaf":
            continue
        leaf = dp_leaf(
            node, instance, budget, rho=rho, visit_cap=visit_cap, entry_cap=entry_cap
        )
        for seq, value in leaf.entries.items():
            if not is_good_sequence(seq, node.bag, g, instance):
                raise RuntimeError("audit: leaf entry fails the signature checks")
            recount = sum(
                1
                for a, b in seq
                for j in range(instance.k)
                if a[j] != b[j] and not _is_symbol(a[j]) and not _is_symbol(b[j])
            )
            if recount != value:
                raise RuntimeError("audit: leaf entry value mismatch on replay")
