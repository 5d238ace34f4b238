"""Round-robin picking and envy-cycle elimination over exact utilities."""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence

from .core import Allocation, Instance, as_allocation, envies

RotationHook = Callable[[Allocation, Allocation, tuple], None]


def round_robin(inst: Instance, start_alloc, pool: Iterable[int], order: Sequence[int]) -> Allocation:
    """Agents in ``order`` take turns picking their most valuable remaining pool item.

    Ties go to the smallest item index.
    """
    bundles = [set(b) for b in start_alloc]
    remaining = sorted(set(pool))
    allocated = set().union(*bundles) if bundles else set()
    if allocated & set(remaining):
        raise ValueError("pool overlaps the starting allocation")
    if remaining and not order:
        raise ValueError("empty picking order with a non-empty pool")
    turn = 0
    while remaining:
        agent = order[turn % len(order)]
        row = inst.row(agent)
        pick = max(remaining, key=lambda g: (row[g], -g))
        bundles[agent].add(pick)
        remaining.remove(pick)
        turn += 1
    return as_allocation(bundles)


def envy_graph(inst: Instance, alloc) -> list:
    return [[k for k in range(inst.n) if k != i and envies(inst, alloc, i, k)] for i in range(inst.n)]


def find_envy_cycle(inst: Instance, alloc) -> Optional[tuple]:
    """Return an envy cycle as a tuple of agents, or None if the envy graph is acyclic.

    Search is depth-first from the smallest-index agent with an outgoing arc,
    neighbours in index order; the first cycle closed is returned.
    """
    graph = envy_graph(inst, alloc)
    done = set()

    def visit(agent, path):
        path.append(agent)
        for nxt in graph[agent]:
            if nxt in path:
                return tuple(path[path.index(nxt):])
            if nxt not in done:
                found = visit(nxt, path)
                if found:
                    return found
        path.pop()
        done.add(agent)
        return None

    for root in range(inst.n):
        if graph[root] and root not in done:
            found = visit(root, [])
            if found:
                return found
    return None


def rotate(alloc, cycle: Sequence[int]) -> Allocation:
    """Each agent on ``cycle`` takes the bundle of the agent it envies (its successor)."""
    bundles = list(alloc)
    for pos, agent in enumerate(cycle):
        bundles[agent] = alloc[cycle[(pos + 1) % len(cycle)]]
    return tuple(bundles)


def eliminate_cycles(inst: Instance, alloc, on_rotate: Optional[RotationHook] = None) -> Allocation:
    alloc = as_allocation(alloc)
    while True:
        cycle = find_envy_cycle(inst, alloc)
        if cycle is None:
            return alloc
        rotated = rotate(alloc, cycle)
        if on_rotate is not None:
            on_rotate(alloc, rotated, cycle)
        alloc = rotated


def ece_complete(inst: Instance, start_alloc, pool: Sequence[int],
                 on_rotate: Optional[RotationHook] = None) -> Allocation:
    """Complete ``start_alloc`` with the items of ``pool`` (in sequence order) by envy-cycle elimination.

    Before each item is placed every envy cycle is rotated away; the item then
    goes to the smallest-index agent nobody envies.  Cycles left after the last
    item are eliminated too.  ``on_rotate(before, after, cycle)`` is called for
    every rotation.
    """
    alloc = as_allocation(start_alloc)
    allocated = set().union(*alloc) if alloc else set()
    if allocated & set(pool):
        raise ValueError("pool overlaps the starting allocation")
    for g in pool:
        alloc = eliminate_cycles(inst, alloc, on_rotate)
        graph = envy_graph(inst, alloc)
        envied = {k for arcs in graph for k in arcs}
        source = min(a for a in range(inst.n) if a not in envied)
        bundles = list(alloc)
        bundles[source] = bundles[source] | {g}
        alloc = tuple(bundles)
    return eliminate_cycles(inst, alloc, on_rotate)
