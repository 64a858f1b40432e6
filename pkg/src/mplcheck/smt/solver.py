"""Embedded DPLL(T) solver for rational difference logic.

Boolean search is a conflict-driven clause-learning loop with two watched
literals, first-UIP learning, activity-based branching, phase saving and Luby
restarts. The theory part keeps the asserted bounds as a constraint graph
(an atom ``u - v <= w`` is an edge ``v -> u`` of weight ``w``) together with a
feasible potential function, and rejects an edge as soon as it closes a
negative cycle (incremental Dijkstra on reduced costs). Strict bounds carry an
infinitesimal; weights ``(c, -delta)`` are encoded exactly as integers
``c*S*K - 1`` where ``S`` clears all denominators and ``K`` exceeds the length
of any simple cycle.

Scopes (push/pop) are implemented with selector literals passed as
assumptions, so learnt clauses stay valid across pops.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm

from ..errors import SolverError
from .formula import (
    ZERO,
    RAnd,
    RAtom,
    RdlFormula,
    RFalse,
    RNot,
    ROr,
    RTrue,
    evaluate,
)


class Status(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"


@dataclass
class SolverResult:
    status: Status
    model: dict | None = None

    @property
    def is_sat(self):
        return self.status is Status.SAT

    @property
    def is_unsat(self):
        return self.status is Status.UNSAT


@dataclass
class SolverStats:
    checks: int = 0
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    theory_checks: int = 0
    theory_conflicts: int = 0
    theory_propagations: int = 0
    restarts: int = 0
    learnt_clauses: int = 0
    time: float = 0.0

    def as_dict(self):
        return dict(self.__dict__)

    def merge(self, other: "SolverStats"):
        for k, v in other.__dict__.items():
            setattr(self, k, getattr(self, k) + v)


def _luby(i):
    # i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ...
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


PROPAGATION_REACH = 16


class _Timeout(Exception):
    pass


class DifferenceSolver:
    """Incremental satisfiability checker for QF-RDL formulas."""

    def __init__(self, verify_models: bool = True, restart_base: int = 100, theory_propagation: bool = True):
        self.verify_models = verify_models
        self.theory_propagation = theory_propagation
        self.restart_base = restart_base
        self.stats = SolverStats()
        # Boolean state; literal of var v is 2v (positive) or 2v+1 (negative)
        self.nvars = 0
        self.lval = [0, 0]
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.phase = [False]
        # only variables occurring in live clauses are decided; atoms left
        # behind by popped scopes stay unassigned
        self.relevant = [False]
        self.watches = [[], []]
        self.clauses = []
        self.learnts = []
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.var_inc = 1.0
        self.heap = []
        self.inconsistent = False
        # theory atoms: var -> (p, q, c, strict) meaning x_p - x_q <= c (strict: <)
        self.atom_of = [None]
        self.atom_var = {}
        self.node_id = {ZERO: 0}
        self.node_names = [ZERO]
        self.edge_pos = [None]
        self.edge_neg = [None]
        self.scale = None
        self.denominators = 1
        self.unweighted = []  # atoms added since the weights were last computed
        # Tseitin and scopes
        self.lit_cache = {}
        self.true_lit = None
        self.scopes = []
        self.assertions = []  # (formula, scope depth)
        self.pending_pops = 0
        self.hinted = set()
        self.true_lit = self._new_var() * 2
        self._add_clause([self.true_lit])

    # ------------------------------------------------------------------
    # public API

    def add(self, formula: RdlFormula):
        """Assert formula in the current scope."""
        self._backtrack(0)
        self.assertions.append((formula, len(self.scopes)))
        guard = [self.scopes[-1] ^ 1] if self.scopes else []
        stack = [formula]
        while stack:
            f = stack.pop()
            if isinstance(f, RAnd):
                stack.extend(reversed(f.args))
            elif isinstance(f, ROr):
                self._add_clause([self._lit(a) for a in f.args] + guard)
            elif isinstance(f, RAtom) and f.rel == "=":
                stack.append(RAtom(f.vi, f.vj, ">=", f.c))
                stack.append(RAtom(f.vj, f.vi, ">=", -f.c))
            else:
                self._add_clause([self._lit(f)] + guard)

    def push(self):
        self._backtrack(0)
        sel = self._new_var() * 2
        self.scopes.append(sel)

    def pop(self):
        if not self.scopes:
            raise SolverError("pop without matching push")
        self._backtrack(0)
        depth = len(self.scopes)
        sel = self.scopes.pop()
        self.assertions = [(f, d) for f, d in self.assertions if d < depth]
        self._add_clause([sel ^ 1])
        self.pending_pops += 1

    def hint(self, model: dict):
        """Warm start for the next check: decide literals the way model would.

        The model only steers decisions; it need not satisfy anything.
        """
        memo = {}
        for f, lit in self.lit_cache.items():
            v = lit >> 1
            self.phase[v] = evaluate(f, model, memo) != bool(lit & 1)
            self.hinted.add(v)

    def check(self, timeout: float | None = None, max_conflicts: int | None = None) -> SolverResult:
        start = time.perf_counter()
        self.stats.checks += 1
        try:
            res = self._solve(start, timeout, max_conflicts)
        except _Timeout:
            self._backtrack(0)
            res = SolverResult(Status.TIMEOUT)
        self.stats.time += time.perf_counter() - start
        self.hinted.clear()
        if res.is_sat and self.verify_models:
            for f, _ in self.assertions:
                if not evaluate(f, res.model):
                    raise SolverError(f"internal error: model violates an assertion: {f}")
        return res

    # ------------------------------------------------------------------
    # variables, literals, clauses

    def _new_var(self):
        self.nvars += 1
        v = self.nvars
        self.lval += [0, 0]
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        self.relevant.append(False)
        self.watches += [[], []]
        self.atom_of.append(None)
        self.edge_pos.append(None)
        self.edge_neg.append(None)
        heapq.heappush(self.heap, (0.0, v))
        return v

    def _node(self, name):
        idx = self.node_id.get(name)
        if idx is None:
            idx = len(self.node_names)
            self.node_id[name] = idx
            self.node_names.append(name)
            self.scale = None
        return idx

    def _theory_lit(self, p, q, c, strict):
        """Literal for x_p - x_q <= c (or < c when strict)."""
        if p == q:
            holds = c > 0 or (c == 0 and not strict)
            return self.true_lit if holds else self.true_lit ^ 1
        if p > q:
            # x_p - x_q <= c  is the negation of  x_q - x_p < -c  (and vice versa)
            return self._theory_lit(q, p, -c, not strict) ^ 1
        key = (p, q, c, strict)
        v = self.atom_var.get(key)
        if v is None:
            v = self._new_var()
            self.atom_var[key] = v
            self.atom_of[v] = key
            self.unweighted.append(v)
        return 2 * v

    def _lit(self, f):
        lit = self.lit_cache.get(f)
        if lit is not None:
            return lit
        if isinstance(f, RTrue):
            lit = self.true_lit
        elif isinstance(f, RFalse):
            lit = self.true_lit ^ 1
        elif isinstance(f, RAtom):
            a, b = self._node(f.vi), self._node(f.vj)
            if f.rel == ">=":
                lit = self._theory_lit(b, a, -f.c, False)
            elif f.rel == ">":
                lit = self._theory_lit(b, a, -f.c, True)
            else:
                ge1 = self._lit(RAtom(f.vi, f.vj, ">=", f.c))
                ge2 = self._lit(RAtom(f.vj, f.vi, ">=", -f.c))
                lit = self._gate_and([ge1, ge2])
        elif isinstance(f, RNot):
            lit = self._lit(f.arg) ^ 1
        elif isinstance(f, RAnd):
            lit = self._gate_and([self._lit(a) for a in f.args])
        elif isinstance(f, ROr):
            lit = self._gate_and([self._lit(a) ^ 1 for a in f.args]) ^ 1
        else:
            raise TypeError(f"not an RDL formula: {f!r}")
        self.lit_cache[f] = lit
        return lit

    def _gate_and(self, lits):
        g = 2 * self._new_var()
        for x in lits:
            self._add_clause([g ^ 1, x])
        self._add_clause([g] + [x ^ 1 for x in lits])
        return g

    def _add_clause(self, lits):
        """Add a problem clause at decision level 0."""
        if self.inconsistent:
            return
        lval = self.lval
        seen = set()
        out = []
        for x in lits:
            if lval[x] == 1 or (x ^ 1) in seen:
                return  # satisfied or tautological
            if lval[x] == -1 or x in seen:
                continue
            seen.add(x)
            out.append(x)
        self._mark_relevant(out)
        if not out:
            self.inconsistent = True
        elif len(out) == 1:
            self._enqueue(out[0], None)
        else:
            self.clauses.append(out)
            self.watches[out[0]].append(out)
            self.watches[out[1]].append(out)

    def _mark_relevant(self, lits):
        rel = self.relevant
        for x in lits:
            v = x >> 1
            if not rel[v]:
                rel[v] = True
                if self.lval[x] == 0:
                    heapq.heappush(self.heap, (-self.activity[v], v))

    def _enqueue(self, lit, reason):
        self.lval[lit] = 1
        self.lval[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    # ------------------------------------------------------------------
    # theory

    def _prepare_theory(self):
        """Recompute integer weights and reset the constraint graph (at level 0)."""
        if self.scale is not None and all(
            self.denominators % self.atom_of[v][2].denominator == 0 for v in self.unweighted
        ):
            todo = self.unweighted
        else:
            s = 1
            for p, q, c, strict in self.atom_var:
                s = lcm(s, c.denominator)
            self.denominators = s
            self.scale = s * (len(self.node_names) + 1)
            todo = self.atom_var.values()
        scale = self.scale
        for v in todo:
            p, q, c, strict = self.atom_of[v]
            cs = c.numerator * (scale // c.denominator)
            # true: x_p - x_q <= w, edge q -> p. false: x_q - x_p <= -w - 1 (strictness flips)
            self.edge_pos[v] = (q, p, cs - (1 if strict else 0))
            self.edge_neg[v] = (p, q, -cs - (0 if strict else 1))
        self.unweighted = []
        n = len(self.node_names)
        self.out = [[] for _ in range(n)]
        self.inn = [[] for _ in range(n)]
        self.pot = [0] * n
        self.tstack = []
        # candidate edges for propagation, by source node
        self.atom_edges = [[] for _ in range(n)]
        for v in self.atom_var.values():
            if self.relevant[v]:
                s, t, w = self.edge_pos[v]
                self.atom_edges[s].append((t, w, 2 * v))
                s, t, w = self.edge_neg[v]
                self.atom_edges[s].append((t, w, 2 * v + 1))

    def _assert_theory(self, lit, tidx):
        """Add the edge of a theory literal; return a conflict clause or None."""
        v = lit >> 1
        edge = self.edge_neg[v] if lit & 1 else self.edge_pos[v]
        s, t, w = edge
        pot = self.pot
        self.stats.theory_checks += 1
        gamma0 = pot[s] + w - pot[t]
        if gamma0 < 0:
            out = self.out
            gamma = {t: gamma0}
            pred = {t: None}
            done = {}
            heap = [(gamma0, t)]
            while heap:
                g, x = heapq.heappop(heap)
                if x in done or gamma[x] != g:
                    continue
                px = pot[x] + g
                done[x] = px
                for y, wy, ly in out[x]:
                    if y in done:
                        continue
                    gy = px + wy - pot[y]
                    if gy < 0 and gy < gamma.get(y, 0):
                        if y == s:
                            # negative cycle: new edge s->t, path t ~> x, edge x->s
                            confl = [lit ^ 1, ly ^ 1]
                            z = x
                            while pred[z] is not None:
                                pz, lz = pred[z]
                                confl.append(lz ^ 1)
                                z = pz
                            self.stats.theory_conflicts += 1
                            return confl
                        gamma[y] = gy
                        pred[y] = (x, ly)
                        heapq.heappush(heap, (gy, y))
            for x, px in done.items():
                pot[x] = px
        self.out[s].append((t, w, lit))
        self.inn[t].append((s, w, lit))
        self.tstack.append((tidx, s, t))
        # level-0 edges are re-asserted on every check; propagating them would be quadratic
        if self.theory_propagation and self.trail_lim:
            self._imply(s, t, w, lit)
        return None

    def _reach(self, start, adj, forward):
        """Dijkstra on reduced costs from start, settling at most PROPAGATION_REACH nodes.

        Returns {node: (reduced length, pred)}; every entry is the length of a
        real path even when the search stops early, so partial results stay sound.
        """
        pot = self.pot
        dist = {start: (0, None)}
        done = set()
        heap = [(0, start)]
        while heap and len(done) < PROPAGATION_REACH:
            d, x = heapq.heappop(heap)
            if x in done:
                continue
            done.add(x)
            for y, w, ly in adj[x]:
                rc = (pot[x] + w - pot[y]) if forward else (pot[y] + w - pot[x])
                dy = d + rc
                old = dist.get(y)
                if old is None or dy < old[0]:
                    dist[y] = (dy, (x, ly))
                    heapq.heappush(heap, (dy, y))
        return dist

    def _imply(self, s, t, w, lit):
        """Enqueue unassigned atoms entailed by a path through the new edge s -> t."""
        lval, pot = self.lval, self.pot
        back = self._reach(s, self.inn, False)
        fwd = None
        edges = self.atom_edges
        for u, (bu, _) in back.items():
            cand = [e for e in edges[u] if lval[e[2]] == 0]
            if not cand:
                continue
            if fwd is None:
                fwd = self._reach(t, self.out, True)
            du = bu + pot[s] - pot[u]
            for v, wa, la in cand:
                hit = fwd.get(v)
                if hit is None or lval[la] != 0:
                    continue
                if du + w + hit[0] + pot[v] - pot[t] <= wa:
                    reason = [la, lit ^ 1]
                    x = u
                    while x != s:
                        nxt, lx = back[x][1]
                        reason.append(lx ^ 1)
                        x = nxt
                    x = v
                    while x != t:
                        prv, lx = fwd[x][1]
                        reason.append(lx ^ 1)
                        x = prv
                    self.stats.theory_propagations += 1
                    self._enqueue(la, reason)

    def _model(self):
        """Shortest-path potentials from a virtual source, shifted so ZERO is 0."""
        n = len(self.node_names)
        dist = [0] * n
        out = self.out
        queue = list(range(n))
        inq = [True] * n
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            inq[u] = False
            du = dist[u]
            for y, w, _ in out[u]:
                if du + w < dist[y]:
                    dist[y] = du + w
                    if not inq[y]:
                        inq[y] = True
                        queue.append(y)
            if head > 4096 and head * 2 > len(queue):
                queue = queue[head:]
                head = 0
        base = dist[0]
        scale = self.scale
        return {
            name: Fraction(dist[i] - base, scale)
            for i, name in enumerate(self.node_names)
            if name != ZERO
        }

    # ------------------------------------------------------------------
    # search

    def _propagate(self):
        lval = self.lval
        watches = self.watches
        trail = self.trail
        atom_of = self.atom_of
        while self.qhead < len(trail):
            p = trail[self.qhead]
            tidx = self.qhead
            self.qhead += 1
            self.stats.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if lval[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if lval[c[k]] != -1:
                        c[1], c[k] = c[k], false_lit
                        watches[c[1]].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if lval[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return c
                    self._enqueue(first, c)
            del ws[j:]
            if atom_of[p >> 1] is not None:
                confl = self._assert_theory(p, tidx)
                if confl is not None:
                    return confl
        return None

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        lval, reason, phase, act = self.lval, self.reason, self.phase, self.activity
        for idx in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[idx]
            v = lit >> 1
            lval[lit] = 0
            lval[lit ^ 1] = 0
            reason[v] = None
            phase[v] = not (lit & 1)
            heapq.heappush(self.heap, (-act[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, stop)
        if len(self.heap) > 8 * self.nvars + 1024:
            self.heap = [(-act[u], u) for u in range(1, self.nvars + 1) if lval[2 * u] == 0]
            heapq.heapify(self.heap)
        ts = getattr(self, "tstack", None)
        if ts:
            out = self.out
            inn = self.inn
            while ts and ts[-1][0] >= stop:
                _, s, t = ts.pop()
                out[s].pop()
                inn[t].pop()

    def _bump(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.nvars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.nvars + 1) if self.lval[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.lval[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl):
        seen = set()
        learnt = [None]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level = self.level
        while True:
            for q in confl:
                if q == p:
                    continue
                v = q >> 1
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while (self.trail[idx] >> 1) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen.discard(p >> 1)
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[p >> 1]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda t: level[learnt[t] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _pick(self):
        heap, lval, act, rel = self.heap, self.lval, self.activity, self.relevant
        while heap:
            a, v = heapq.heappop(heap)
            if lval[2 * v] == 0 and -a == act[v] and rel[v]:
                return v
        # stale entries exhausted: fall back to a scan
        for v in range(1, self.nvars + 1):
            if lval[2 * v] == 0 and rel[v]:
                return v
        return None

    def _polarity(self, v):
        """Theory atoms take the side the current potentials satisfy; others reuse their last phase."""
        if v not in self.hinted and self.atom_of[v] is not None and self.edge_pos[v] is not None:
            s, t, w = self.edge_pos[v]
            pot = self.pot
            return 2 * v if pot[t] <= pot[s] + w else 2 * v + 1
        return 2 * v + (0 if self.phase[v] else 1)

    def _simplify(self):
        """Drop clauses satisfied at level 0 (mostly those guarded by popped scopes)."""
        lval = self.lval

        def keep(c):
            return not any(lval[x] == 1 and self.level[x >> 1] == 0 for x in c)

        self.clauses = [c for c in self.clauses if keep(c)]
        self.learnts = [c for c in self.learnts if keep(c)]
        self.watches = [[] for _ in self.watches]
        survivors = []
        for c in self.clauses + self.learnts:
            c[:] = [x for x in c if lval[x] == 0]
            if len(c) >= 2:
                self.watches[c[0]].append(c)
                self.watches[c[1]].append(c)
                survivors.append(c)
            elif len(c) == 1:
                self._enqueue(c[0], None)
            else:
                self.inconsistent = True
        self.relevant = [False] * (self.nvars + 1)
        for c in survivors:
            self._mark_relevant(c)
        self._mark_relevant(self.scopes)
        ids = {id(c) for c in survivors}
        self.clauses = [c for c in self.clauses if id(c) in ids]
        self.learnts = [c for c in self.learnts if id(c) in ids]
        self.pending_pops = 0

    def _solve(self, start, timeout, max_conflicts):
        self._backtrack(0)
        if self.inconsistent:
            return SolverResult(Status.UNSAT)
        self._prepare_theory()
        self.qhead = 0
        if self._propagate() is not None:
            self.inconsistent = True
            return SolverResult(Status.UNSAT)
        if self.pending_pops:
            self._simplify()
            if self.inconsistent or self._propagate() is not None:
                self.inconsistent = True
                return SolverResult(Status.UNSAT)
        assumptions = list(self.scopes)
        stats = self.stats
        conflicts = 0
        restart_no = 0
        restart_at = self.restart_base * _luby(0)
        since_restart = 0
        ticks = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                stats.conflicts += 1
                conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.inconsistent = True
                    return SolverResult(Status.UNSAT)
                learnt, bt = self._analyze(confl)
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self._mark_relevant(learnt)
                    stats.learnt_clauses += 1
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                self.var_inc *= 1.05
                if max_conflicts is not None and conflicts >= max_conflicts:
                    raise _Timeout()
                continue
            ticks += 1
            if timeout is not None and ticks & 255 == 0 and time.perf_counter() - start > timeout:
                raise _Timeout()
            if since_restart >= restart_at:
                restart_no += 1
                stats.restarts += 1
                since_restart = 0
                restart_at = self.restart_base * _luby(restart_no)
                self._backtrack(0)
                continue
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                if self.lval[a] == -1:
                    self._backtrack(0)
                    return SolverResult(Status.UNSAT)
                self.trail_lim.append(len(self.trail))
                if self.lval[a] == 0:
                    self._enqueue(a, None)
                continue
            v = self._pick()
            if v is None:
                model = self._model()
                self._backtrack(0)
                return SolverResult(Status.SAT, model)
            stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(self._polarity(v), None)


def check_sat(formula: RdlFormula, timeout: float | None = None) -> SolverResult:
    """One-shot satisfiability check."""
    s = DifferenceSolver()
    s.add(formula)
    return s.check(timeout=timeout)
