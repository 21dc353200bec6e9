"""Exhaustive search for normalized H(q, 1) whose row code F_H is F_p-additive.

With lambda = 1 every nonzero row of F_H restricted to columns 1..q-1 is a
permutation of the nonzero field elements, and F_H is an e-dimensional
F_p-space.  Column permutations are a symmetry, so the first generator is
fixed to g_1 = (0, 1, 2, ..., q-1) in element codes.  The remaining
generators are filled in one coordinate at a time; a value is rejected as
soon as some new combination row would repeat an entry or hit zero.

With a target rank rho, rank(C_H) = rank_q(F_H) + 1, so the generators must
span an F_q-space of dimension rho - 1.  Once the span reaches that size the
remaining generators are drawn from it directly instead of coordinate-wise.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .finite_field import FieldSpec, make_field
from .gh_matrix import GHMatrix
from .invariants import fq_basis


class SearchError(ValueError):
    pass


class UnsupportedLambdaError(SearchError):
    pass


class BudgetExceededError(SearchError):
    """Raised in strict mode; ``result`` holds the partial search."""

    def __init__(self, result: "SearchResult"):
        super().__init__(f"budget exhausted after {result.nodes} nodes with {len(result.solutions)} found")
        self.result = result


DEFAULT_NODE_BUDGET = 10**9
DEFAULT_TIME_BUDGET = 15 * 60.0
COMPLETE_MAX_Q = 9


class _OutOfBudget(Exception):
    pass


@dataclass(frozen=True)
class SearchSpec:
    field: FieldSpec
    lam: int = 1
    target_rank: int | None = None
    max_nodes: int = DEFAULT_NODE_BUDGET
    max_seconds: float = DEFAULT_TIME_BUDGET
    allow_incomplete: bool = False

    def __post_init__(self):
        if self.lam != 1:
            raise UnsupportedLambdaError(f"only lambda = 1 is searched, got {self.lam}")
        if self.field.q > COMPLETE_MAX_Q and not self.allow_incomplete:
            raise SearchError(f"q = {self.field.q} > {COMPLETE_MAX_Q} needs allow_incomplete")


@dataclass
class SearchResult:
    spec: SearchSpec
    solutions: list[GHMatrix] = field(default_factory=list)
    complete: bool = False
    nodes: int = 0
    seconds: float = 0.0

    @property
    def budget_exceeded(self) -> bool:
        return not self.complete

    def progress_line(self) -> str:
        return f"PROGRESS nodes={self.nodes} found={len(self.solutions)}"


class _Searcher:
    def __init__(self, spec: SearchSpec, progress: Callable[[str], None] | None, every: int):
        self.spec = spec
        F = spec.field
        self.F = F
        self.q = F.q
        self.add = F.add_table.tolist()
        self.mul = F.mul_table.tolist()
        self.nodes = 0
        self.t0 = time.monotonic()
        self.progress = progress
        self.every = every
        self.found: dict[bytes, GHMatrix] = {}
        self.order: list[bytes] = []

    # budget ---------------------------------------------------------------
    def tick(self):
        self.nodes += 1
        if self.nodes % 4096 == 0:
            if self.nodes > self.spec.max_nodes or time.monotonic() - self.t0 > self.spec.max_seconds:
                raise _OutOfBudget
        if self.progress is not None and self.nodes % self.every == 0:
            self.progress(f"PROGRESS nodes={self.nodes} found={len(self.found)}")

    # helpers --------------------------------------------------------------
    def span_rows(self, gens: list[list[int]]) -> list[list[int]]:
        """All F_p-combinations, first generator's coefficient most significant."""
        p, q = self.F.p, self.q
        rows = [[0] * q]
        for g in reversed(gens):
            new = []
            for a in range(p):
                ag = [self.mul[a][x] for x in g]
                for r in rows:
                    new.append([self.add[u][v] for u, v in zip(ag, r)])
            rows = new
        return rows

    def fq_dim(self, gens: list[list[int]]) -> int:
        return len(fq_basis(self.F, np.array(gens, dtype=np.int64)))

    def record(self, gens: list[list[int]]):
        rows = np.array(sorted(map(tuple, self.span_rows(gens))), dtype=np.int64)
        key = rows.tobytes()
        if key not in self.found:
            self.found[key] = GHMatrix(self.F, rows)
            self.order.append(key)

    def admissible_extra(self, base: list[list[int]], g: list[int]) -> bool:
        """Every row x + a*g (x in span(base), a != 0) is zero then a permutation of F_q^*."""
        q = self.q
        for a in range(1, self.F.p):
            ag = [self.mul[a][x] for x in g]
            for x in base:
                seen = 0
                for c in range(1, q):
                    v = self.add[x[c]][ag[c]]
                    bit = 1 << v
                    if v == 0 or seen & bit:
                        return False
                    seen |= bit
        return True

    # search ---------------------------------------------------------------
    def run(self):
        F = self.F
        e = F.e
        g1 = list(range(self.q))
        self.extend([g1], e - 1)

    def extend(self, gens: list[list[int]], remaining: int):
        if remaining == 0:
            rho = self.spec.target_rank
            if rho is None or self.fq_dim(gens) + 1 == rho:
                self.record(gens)
            return
        rho = self.spec.target_rank
        d = self.fq_dim(gens)
        base = self.span_rows(gens)
        if rho is not None:
            need = rho - 1
            if d > need or d + remaining < need:
                return
            if d == need:
                # the rest of the generators must lie in the current F_q-span
                basis = fq_basis(self.F, np.array(gens, dtype=np.int64)).tolist()
                for coeffs in itertools.product(range(self.q), repeat=len(basis)):
                    self.tick()
                    g = [0] * self.q
                    for cf, b in zip(coeffs, basis):
                        g = [self.add[u][self.mul[cf][v]] for u, v in zip(g, b)]
                    if self.admissible_extra(base, g):
                        self.extend(gens + [g], remaining - 1)
                return
        # coordinate-wise fill of the next generator
        combos = [(x, a) for a in range(1, self.F.p) for x in base]
        self.fill(gens, remaining, base, combos, [0], [0] * len(combos))

    def fill(self, gens, remaining, base, combos, g, masks):
        c = len(g)
        if c == self.q:
            self.extend(gens + [list(g)], remaining - 1)
            return
        add, mul = self.add, self.mul
        for v in range(self.q):
            self.tick()
            new_masks = []
            ok = True
            for (x, a), m in zip(combos, masks):
                w = add[x[c]][mul[a][v]]
                bit = 1 << w
                if w == 0 or m & bit:
                    ok = False
                    break
                new_masks.append(m | bit)
            if ok:
                g.append(v)
                self.fill(gens, remaining, base, combos, g, new_masks)
                g.pop()


def search_additive_gh(spec: SearchSpec, progress: Callable[[str], None] | None = None,
                       progress_every: int = 100_000, strict: bool = False) -> SearchResult:
    """All F_p-additive normalized H(q, 1) with g_1 = (0, 1, ..., q-1), deduplicated by row set.

    Solutions come out in sorted row-set order.  ``complete`` is False when
    the node or time budget ran out; the partial list is still returned, or
    raised inside :class:`BudgetExceededError` when ``strict`` is set.
    """
    s = _Searcher(spec, progress, progress_every)
    complete = True
    try:
        s.run()
    except _OutOfBudget:
        complete = False
    keys = sorted(s.order)
    res = SearchResult(spec, [s.found[k] for k in keys], complete, s.nodes, time.monotonic() - s.t0)
    if progress is not None:
        progress(res.progress_line())
    if strict and not complete:
        raise BudgetExceededError(res)
    return res


def search(p: int, e: int, target_rank: int | None = None, **kw) -> SearchResult:
    progress = kw.pop("progress", None)
    strict = kw.pop("strict", False)
    return search_additive_gh(SearchSpec(make_field(p, e), target_rank=target_rank, **kw),
                              progress, strict=strict)


def record_in_planner(result: SearchResult) -> None:
    """Hand a completed search to the planner's record of nonexistence results."""
    from .bounds_planner import record_search_result

    F = result.spec.field
    rho = result.spec.target_rank
    if rho is None or not result.complete:
        return
    # lambda = 1 gives t = e, and the kernel of any such nonlinear code is 1
    record_search_result(F.p, F.e, F.e, rho, 1, complete=True, found=len(result.solutions))
