"""A small CDCL propositional solver with assumptions.

Variables are positive integers, literals are signed integers.  The
solver keeps learned clauses between calls, so repeated ``solve`` calls
with different assumptions are cheap.  Decisions follow a fixed variable
order with negative phase first, which keeps results deterministic.
"""

from __future__ import annotations


class Solver:
    def __init__(self):
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.units: list[int] = []
        self.empty = False
        self.order: list[int] = []

    def new_var(self) -> int:
        self.nvars += 1
        self.order.append(self.nvars)
        return self.nvars

    def add_clause(self, lits) -> None:
        clause = sorted(set(lits), key=abs)
        if any(-l in clause for l in clause):
            return
        if not clause:
            self.empty = True
        elif len(clause) == 1:
            self.units.append(clause[0])
        else:
            self._attach(clause)

    def _attach(self, clause: list[int]) -> int:
        idx = len(self.clauses)
        self.clauses.append(clause)
        self.watches.setdefault(clause[0], []).append(idx)
        self.watches.setdefault(clause[1], []).append(idx)
        return idx

    # search -------------------------------------------------------------

    def solve(self, assumptions=()) -> bool:
        """True iff satisfiable under ``assumptions``; then ``self.model`` is set."""
        self.model = None
        if self.empty:
            return False
        n = self.nvars
        self.value = [0] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason: list = [None] * (n + 1)
        self.trail: list[int] = []
        self.lim: list[int] = []
        self.qhead = 0
        for lit in self.units:
            if not self._enqueue(lit, None):
                return False
        if self._propagate() is not None:
            return False
        assumptions = list(assumptions)
        order = self.order
        pos = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if not self.lim:
                    self.empty = True
                    return False
                learned, back = self._analyze(conflict)
                self._cancel(back)
                pos = 0
                if len(learned) == 1:
                    self.units.append(learned[0])
                    self._enqueue(learned[0], None)
                else:
                    self._enqueue(learned[0], self._attach(learned))
                continue
            depth = len(self.lim)
            if depth < len(assumptions):
                lit = assumptions[depth]
                v = self.value[abs(lit)]
                self.lim.append(len(self.trail))
                if v == 0:
                    self._enqueue(lit, None)
                elif (v > 0) != (lit > 0):
                    return False
                continue
            while pos < len(order) and self.value[order[pos]] != 0:
                pos += 1
            if pos == len(order):
                self.model = {v: self.value[v] > 0 for v in range(1, n + 1)}
                return True
            self.lim.append(len(self.trail))
            self._enqueue(-order[pos], None)

    def _enqueue(self, lit: int, reason) -> bool:
        v = self.value[abs(lit)]
        if v != 0:
            return (v > 0) == (lit > 0)
        self.value[abs(lit)] = 1 if lit > 0 else -1
        self.level[abs(lit)] = len(self.lim)
        self.reason[abs(lit)] = reason
        self.trail.append(lit)
        return True

    def _propagate(self):
        value = self.value
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            watching = self.watches.get(false_lit)
            if not watching:
                continue
            keep = []
            i = 0
            while i < len(watching):
                idx = watching[i]
                i += 1
                clause = self.clauses[idx]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                fv = value[abs(first)]
                if fv != 0 and (fv > 0) == (first > 0):
                    keep.append(idx)
                    continue
                for k in range(2, len(clause)):
                    lk = clause[k]
                    vk = value[abs(lk)]
                    if vk == 0 or (vk > 0) == (lk > 0):
                        clause[1], clause[k] = lk, clause[1]
                        self.watches.setdefault(lk, []).append(idx)
                        break
                else:
                    keep.append(idx)
                    if fv == 0:
                        self._enqueue(first, idx)
                    else:
                        keep.extend(watching[i:])
                        self.watches[false_lit] = keep
                        return idx
            self.watches[false_lit] = keep
        return None

    def _analyze(self, conflict: int):
        current = len(self.lim)
        seen = set()
        learned = [None]
        counter = 0
        clause = self.clauses[conflict]
        idx = len(self.trail) - 1
        lit = None
        while True:
            for q in clause:
                if lit is not None and q == lit:
                    continue
                v = abs(q)
                if v in seen:
                    continue
                seen.add(v)
                if self.level[v] == current:
                    counter += 1
                elif self.level[v] > 0:
                    learned.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            r = self.reason[abs(lit)]
            clause = self.clauses[r] if r is not None else [lit]
        learned[0] = -lit
        if len(learned) == 1:
            return learned, 0
        best = max(range(1, len(learned)), key=lambda j: self.level[abs(learned[j])])
        learned[1], learned[best] = learned[best], learned[1]
        return learned, self.level[abs(learned[1])]

    def _cancel(self, level: int) -> None:
        if len(self.lim) <= level:
            return
        stop = self.lim[level]
        for lit in self.trail[stop:]:
            self.value[abs(lit)] = 0
            self.reason[abs(lit)] = None
        del self.trail[stop:]
        del self.lim[level:]
        self.qhead = len(self.trail)


def lex_min_model(solver: Solver, order: list[int], assumptions=()) -> dict | None:
    """The model that is least in ``order`` (false before true), or None.

    Fixes variables one at a time, keeping the previous model whenever it
    already agrees with the prefix.
    """
    fixed = list(assumptions)
    if not solver.solve(fixed):
        return None
    model = solver.model
    for v in order:
        if model[v]:
            if solver.solve(fixed + [-v]):
                model = solver.model
                fixed.append(-v)
            else:
                fixed.append(v)
        else:
            fixed.append(-v)
    return model
