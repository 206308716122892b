"""Binding analysis for well-named formulas.

Provides the binder map, the dependency order on bound variables, alternation
depths, the priority table used by evaluation games and trace automata, active
variables and the closure operator.
"""

from __future__ import annotations

from .syntax import Formula, Mu, Nu, Var, big_or
from .normalize import well_named_violations


class BindingInfo:
    def __init__(self, formula: Formula):
        problems = well_named_violations(formula)
        if problems:
            raise ValueError(f"formula is not well-named: {problems[0]}")
        self.formula = formula
        self.binders: dict[str, Formula] = {}
        self.bodies: dict[str, Formula] = {}
        self.kinds: dict[str, str] = {}

        def walk(g: Formula):
            if isinstance(g, (Mu, Nu)):
                self.binders[g.var] = g
                self.bodies[g.var] = g.body
                self.kinds[g.var] = "mu" if isinstance(g, Mu) else "nu"
            for c in g.children():
                walk(c)

        walk(formula)
        self.bound = frozenset(self.binders)
        # x -> {y : x in Free(body(y))}, i.e. successors under the
        # immediate dependency relation
        self.dep_succ: dict[str, set] = {x: set() for x in self.bound}
        for y, body in self.bodies.items():
            for x in body.free_vars & self.bound:
                self.dep_succ[x].add(y)
        self.dep_order: dict[str, frozenset] = {}
        for x in self.bound:
            seen: set = set()
            stack = list(self.dep_succ[x])
            while stack:
                y = stack.pop()
                if y in seen:
                    continue
                seen.add(y)
                stack.extend(self.dep_succ[y])
            self.dep_order[x] = frozenset(seen)
        self._alt_cache: dict[str, int] = {}
        self._priorities: dict[Formula, int] | None = None

    # -- alternation ----------------------------------------------------------

    def _longest_chain(self, x: str, within: frozenset, memo: dict,
                       onstack: frozenset = frozenset()) -> int:
        if x in memo:
            return memo[x]
        best = 1
        for y in self.dep_succ[x]:
            if y != x and y in within and y not in onstack and \
               self.kinds[y] != self.kinds[x]:
                best = max(best, 1 + self._longest_chain(y, within, memo,
                                                         onstack | {x}))
        memo[x] = best
        return best

    def alternation_depth(self) -> int:
        return self.alt_of_subformula(self.formula)

    def alt_of_subformula(self, g: Formula) -> int:
        within = frozenset(g.bound_vars & self.bound)
        memo: dict = {}
        return max((self._longest_chain(x, within, memo) for x in within), default=0)

    def alt_of_binder(self, x: str) -> int:
        if x not in self._alt_cache:
            self._alt_cache[x] = self.alt_of_subformula(self.binders[x])
        return self._alt_cache[x]

    # -- priorities -------------------------------------------------------------

    def priorities(self) -> dict[Formula, int]:
        """Priority of every binder body; every other subformula has priority 0.

        For the body psi of the binder of x: the largest number of the same
        parity as the binder kind (odd for mu, even for nu) that is at most
        alt of the binder subformula.
        """
        if self._priorities is None:
            table: dict[Formula, int] = {}
            for x, body in self.bodies.items():
                a = self.alt_of_binder(x)
                if self.kinds[x] == "mu":
                    table[body] = a if a % 2 == 1 else a - 1
                else:
                    table[body] = a if a % 2 == 0 else a - 1
            self._priorities = table
        return self._priorities

    def priority_of(self, psi: Formula) -> int:
        return self.priorities().get(psi, 0)

    def max_priority(self) -> int:
        return max(self.priorities().values(), default=0)

    # -- active variables ---------------------------------------------------------

    def active_in(self, x: str, psi: Formula) -> bool:
        """x is active in psi if x or some dependency-successor of x occurs in psi."""
        reach = self.dep_order[x] | {x}
        return any(y in reach for y in psi.bound_vars | (psi.free_vars & self.bound))

    # -- closure -------------------------------------------------------------------

    def closure(self, gamma: Formula) -> frozenset:
        """Least set containing gamma and closed under taking parts of junctions,
        unfolding binders and regenerating bound variables."""
        from .syntax import And, Or

        out: set = set()
        stack = [gamma]
        while stack:
            g = stack.pop()
            if g in out:
                continue
            out.add(g)
            if isinstance(g, (And, Or)):
                stack.append(g.left)
                stack.append(g.right)
            elif isinstance(g, (Mu, Nu)):
                stack.append(g.body)
            elif isinstance(g, Var) and g.name in self.bound:
                stack.append(self.bodies[g.name])
        return frozenset(out)

    def reducible_in(self, gamma: Formula, label: frozenset) -> bool:
        """gamma is reducible in label if no other member regenerates it."""
        return all(gamma not in self.closure(other) for other in label if other != gamma)


def alternation_depth(f: Formula) -> int:
    return BindingInfo(f).alternation_depth()


def priorities(f: Formula) -> dict[Formula, int]:
    return BindingInfo(f).priorities()


def closure(gamma: Formula, context: Formula) -> frozenset:
    return BindingInfo(context).closure(gamma)
