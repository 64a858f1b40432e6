"""Precedence graphs and spectral quantities: SCCs, Karp means, eigenspace, cycle-time vector."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NoCircuit, NotIrreducible
from .maxplus import (
    EPS,
    MaxPlusMatrix,
    mat_add,
    mat_mul,
    require_regular,
    require_square,
    scalar_mat_mul,
)


@dataclass(frozen=True)
class PrecedenceGraph:
    node_count: int
    edges: tuple  # (source j, target i, weight A(i,j)), 0-based nodes

    def successors(self):
        out = [[] for _ in range(self.node_count)]
        for j, i, w in self.edges:
            out[j].append((i, w))
        return out

    def predecessors(self):
        inc = [[] for _ in range(self.node_count)]
        for j, i, w in self.edges:
            inc[i].append((j, w))
        return inc


@dataclass(frozen=True)
class SpectralData:
    lam: Fraction
    critical_nodes: frozenset
    a_lambda_plus: MaxPlusMatrix


def precedence_graph(A: MaxPlusMatrix) -> PrecedenceGraph:
    require_square(A)
    edges = tuple(
        (j, i, a)
        for i, row in enumerate(A.entries)
        for j, a in enumerate(row)
        if a is not EPS
    )
    return PrecedenceGraph(A.rows, edges)


def strongly_connected_components(graph: PrecedenceGraph):
    """Tarjan's algorithm, iterative. Components come out in reverse topological order."""
    succ = [[i for i, _ in lst] for lst in graph.successors()]
    n = graph.node_count
    index = [None] * n
    low = [0] * n
    on_stack = [False] * n
    stack = []
    comps = []
    counter = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def is_irreducible(A: MaxPlusMatrix) -> bool:
    g = precedence_graph(A)
    return len(strongly_connected_components(g)) == 1


def _karp(nodes, preds):
    """Maximum cycle mean of a strongly connected node set, or None if it has no cycle."""
    local = {v: t for t, v in enumerate(nodes)}
    s = len(nodes)
    inc = [[(local[u], w) for u, w in preds[v] if u in local] for v in nodes]
    if s == 1 and not inc[0]:
        return None
    # D[k][v]: max weight of a k-edge walk from node 0 to v
    D = [[None] * s for _ in range(s + 1)]
    D[0][0] = Fraction(0)
    for k in range(1, s + 1):
        prev, cur = D[k - 1], D[k]
        for v in range(s):
            best = None
            for u, w in inc[v]:
                if prev[u] is not None:
                    cand = prev[u] + w
                    if best is None or cand > best:
                        best = cand
            cur[v] = best
    result = None
    for v in range(s):
        if D[s][v] is None:
            continue
        worst = None
        for k in range(s):
            if D[k][v] is not None:
                q = (D[s][v] - D[k][v]) / (s - k)
                if worst is None or q < worst:
                    worst = q
        if worst is not None and (result is None or worst > result):
            result = worst
    return result


def component_means(A: MaxPlusMatrix):
    """List of (component nodes, max cycle mean or None) in reverse topological order."""
    g = precedence_graph(A)
    preds = g.predecessors()
    return [(comp, _karp(comp, preds)) for comp in strongly_connected_components(g)]


def max_cycle_mean(A: MaxPlusMatrix) -> Fraction:
    means = [m for _, m in component_means(A) if m is not None]
    if not means:
        raise NoCircuit("the precedence graph has no circuit")
    return max(means)


def cycle_time_vector(A: MaxPlusMatrix) -> list:
    """Per-node asymptotic growth rate: best mean among the components reaching the node."""
    require_regular(A)
    g = precedence_graph(A)
    preds = g.predecessors()
    comps = strongly_connected_components(g)
    comp_of = {}
    for c, nodes in enumerate(comps):
        for v in nodes:
            comp_of[v] = c
    rate = [_karp(nodes, preds) for nodes in comps]
    # Tarjan emits sinks first, so walk the list backwards to visit sources first.
    for c in reversed(range(len(comps))):
        for v in comps[c]:
            for u, _ in preds[v]:
                cu = comp_of[u]
                if cu != c and rate[cu] is not None and (rate[c] is None or rate[cu] > rate[c]):
                    rate[c] = rate[cu]
    # regular matrices always reach every node from some circuit
    return [rate[comp_of[v]] for v in range(A.rows)]


def spectral_data(A: MaxPlusMatrix) -> SpectralData:
    require_square(A)
    if not is_irreducible(A):
        raise NotIrreducible("eigenspace needs an irreducible matrix")
    lam = max_cycle_mean(A)
    B = scalar_mat_mul(-lam, A)
    acc = B
    power = B
    for _ in range(A.rows - 1):
        power = mat_mul(B, power)
        acc = mat_add(acc, power)
    critical = frozenset(j for j in range(A.rows) if acc[j, j] == 0)
    return SpectralData(lam, critical, acc)


def eigenspace(A: MaxPlusMatrix):
    """Return (lambda, generators): critical columns of A_lambda^+, deduplicated up to shift."""
    data = spectral_data(A)
    seen = set()
    gens = []
    for j in sorted(data.critical_nodes):
        col = data.a_lambda_plus.column(j)
        values = col.to_list()
        base = next(v for v in values if v is not EPS)
        key = tuple(EPS if v is EPS else v - base for v in values)
        if key not in seen:
            seen.add(key)
            gens.append(col)
    return data.lam, gens
