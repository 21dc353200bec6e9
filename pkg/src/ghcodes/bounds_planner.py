"""Which (rank, kernel) pairs F_p-additive GH codes can have, and how to build them.

Two layers of knowledge are kept apart:

* the *generic* layer uses only the bounds and the p-independent
  constructions (Sylvester, projection, switching, Kronecker chains and the
  q = p^2 Frobenius matrix).  This is what the printed tables show;
* the *specific* layer adds facts about individual fields: the three fixed
  examples, Kronecker chains built from them, and nonexistence established by
  exhaustive search.

A pair inside the bounds that neither layer settles is ``OpenUnknown``; the
planner never guesses.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .constructions import (Declared, Fixed, GHp2, Kron, Projection, Recipe, Sylvester, SwitchI,
                            SwitchII, SwitchIII, kron_chain)
from .gh_matrix import GHMatrix
from .invariants import (CodeTooLargeError, QDimension, code_cells, invariant_report,
                         max_cells)


class PlannerError(ValueError):
    pass


class ParamRangeError(PlannerError):
    pass


class InadmissibleKernelError(PlannerError):
    pass


class NotConstructibleError(PlannerError):
    pass


class SeedUnverifiedError(PlannerError):
    pass


class VerificationFailedError(AssertionError):
    """A recipe built a matrix whose measured invariants contradict its declaration."""


IMPOSSIBLE = "Impossible"
CONSTRUCTIBLE = "Constructible"
OPEN = "OpenUnknown"


def _check(e: int, t: int):
    if e <= 1 or t < e:
        raise ParamRangeError(f"need e > 1 and t >= e, got e={e}, t={t}")


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


# ---------------------------------------------------------------------------
# bounds

def admissible_kernels(p: int, e: int, t: int) -> set[int]:
    """Kernel dimensions allowed by the bounds: 1..floor(t/e), plus 1 + t/e when e | t."""
    _check(e, t)
    ks = set(range(1, t // e + 1))
    if t % e == 0:
        ks.add(1 + t // e)
    return ks


def rank_bounds(e: int, t: int, k: int) -> tuple[int, int]:
    """(lo, hi) for the rank of an additive code with kernel k."""
    _check(e, t)
    if k not in admissible_kernels(0, e, t):
        raise InadmissibleKernelError(f"kernel {k} is not admissible for e={e}, t={t}")
    if t % e == 0 and k == 1 + t // e:
        return k, k
    return _ceil_div(e + t - k, e - 1), 1 + t - (e - 1) * (k - 1)


def switching_lower(e: int, t: int, k: int) -> int:
    """Smallest rank reached by the switching-based constructions for 2 <= k <= floor(t/e)."""
    h = t // e
    if t % e == 0:
        return 2 * h - k + 2
    return 2 * h - k + t + e - h * e


# ---------------------------------------------------------------------------
# pair status

@dataclass(frozen=True)
class PairStatus:
    p: int
    e: int
    t: int
    r: int
    k: int
    verdict: str
    reason: str = ""
    recipe: Recipe | None = None

    @property
    def rank_p(self) -> QDimension:
        return QDimension(self.e + self.t, self.e)

    def __str__(self):
        tail = f" via {self.recipe}" if self.recipe is not None else (f" ({self.reason})" if self.reason else "")
        return f"(r={self.r}, k={self.k}) t={self.t} q={self.p}^{self.e}: {self.verdict}{tail}"


# exhaustive-search outcomes: (p, e, t, r, k) -> True when no matrix exists
_SEARCH_RECORDS: dict[tuple[int, int, int, int, int], bool] = {}


def record_search_result(p: int, e: int, t: int, r: int, k: int, *, complete: bool, found: int) -> None:
    """Store the outcome of an exhaustive search so the specific layer can use it."""
    if complete:
        _SEARCH_RECORDS[(p, e, t, r, k)] = found == 0


def clear_search_records() -> None:
    _SEARCH_RECORDS.clear()


def _switching_recipe(p: int, e: int, h: int, k: int, r: int) -> Recipe | None:
    """A switching matrix of order q^h with kernel k and rank r, if one of the three covers it."""
    m = h - k + 1
    total = r - h - 1
    if not (1 <= m <= h - 1 and m <= total <= m * (e - 1)):
        return None
    if h == 2 and m == 1 and total == 1:
        return SwitchI(p, e)
    s = [1] * m
    extra = total - m
    for z in range(m):
        add = min(extra, e - 2)
        s[z] += add
        extra -= add
    if m == 1:
        return SwitchII(p, e, h, s[0])
    return SwitchIII(p, e, h, tuple(s))


def _generic_candidates(p: int, e: int, t: int, r: int, k: int) -> list[Recipe]:
    out: list[Recipe] = []
    h, rem = divmod(t, e)
    lo, hi = rank_bounds(e, t, k)
    if rem == 0 and k == h + 1:
        out.append(Sylvester(p, e, h))
        return out
    if t == e:
        if k == 1 and e == 2 and r == 3 and p != 2:
            out.append(GHp2(p))
        return out
    if k == 1 and r == t + 1:
        out.append(Projection(p, e, t))
    if k >= 2:
        if rem == 0:
            rec = _switching_recipe(p, e, h, k, r)
            if rec is not None:
                out.append(rec)
        if r == hi and t - (k - 1) * e > e:
            out.append(kron_chain([Sylvester(p, e, 1)] * (k - 1) + [Projection(p, e, t - (k - 1) * e)]))
        if rem and h >= 3 and k <= h - 1 and switching_lower(e, t, k) <= r <= hi:
            base = Projection(p, e, e + rem)
            d = _switching_recipe(p, e, h - 1, k, r - (e + rem))
            if d is not None:
                out.append(Kron(d, base))
    return out


def _fixed_chains(p: int, e: int, t: int, r: int, k: int) -> list[Recipe]:
    """Kernel-1 codes over GF(p^4), p in {3, 5}, from Kronecker sums with the rank-3 examples."""
    if e != 4 or p not in (3, 5) or k != 1:
        return []
    fixed = Fixed("H81_3" if p == 3 else "H81_5")
    out = []
    for j in range(1, t // 4 + 1):
        rest = t - 4 * j
        if r != t + 1 - 2 * j:
            continue
        if rest == 0:
            out.append(kron_chain([fixed] * j))
        elif rest > 4:
            out.append(kron_chain([fixed] * j + [Projection(p, e, rest)]))
    return out


def _specific_candidates(p: int, e: int, t: int, r: int, k: int) -> list[Recipe]:
    out = []
    if (p, e, t, r, k) == (2, 3, 3, 4, 1):
        out.append(Fixed("H8_rank4"))
    out.extend(_fixed_chains(p, e, t, r, k))
    return out


def _best(recipes: Iterable[Recipe]) -> Recipe | None:
    recipes = list(recipes)
    return min(recipes, key=lambda rec: rec.sort_key()) if recipes else None


def pair_status(p: int, e: int, t: int, r: int, k: int, specific: bool = True) -> PairStatus:
    """Verdict for one (r, k) pair at length p^t over GF(p^e)."""
    _check(e, t)
    if k not in admissible_kernels(p, e, t):
        return PairStatus(p, e, t, r, k, IMPOSSIBLE, f"kernel {k} not admissible")
    lo, hi = rank_bounds(e, t, k)
    if not lo <= r <= hi:
        return PairStatus(p, e, t, r, k, IMPOSSIBLE, f"rank outside [{lo}, {hi}]")
    if e == 2 and r + k != t + 2:
        return PairStatus(p, e, t, r, k, IMPOSSIBLE, "e = 2 forces r + k = t + 2")
    if (p, e, t, k) == (2, 2, 2, 1):
        return PairStatus(p, e, t, r, k, IMPOSSIBLE, "the only H(4,1) is the linear S_4")
    cands = _generic_candidates(p, e, t, r, k)
    if specific:
        cands += _specific_candidates(p, e, t, r, k)
    best = _best(cands)
    if best is not None:
        return PairStatus(p, e, t, r, k, CONSTRUCTIBLE, recipe=best)
    if specific and _SEARCH_RECORDS.get((p, e, t, r, k)):
        return PairStatus(p, e, t, r, k, IMPOSSIBLE, "exhaustive search found none")
    return PairStatus(p, e, t, r, k, OPEN, "no known construction")


def pairs_in_bounds(p: int, e: int, t: int) -> list[tuple[int, int]]:
    """All (r, k) allowed by the bounds, k ascending then r ascending."""
    out = []
    for k in sorted(admissible_kernels(p, e, t)):
        lo, hi = rank_bounds(e, t, k)
        for r in range(lo, hi + 1):
            if e == 2 and r + k != t + 2:
                continue
            out.append((r, k))
    return out


def catalog(p: int, e: int, t: int, specific: bool = True) -> list[PairStatus]:
    return [pair_status(p, e, t, r, k, specific) for r, k in pairs_in_bounds(p, e, t)]


# ---------------------------------------------------------------------------
# building

@dataclass
class BuildResult:
    recipe: Recipe
    matrix: GHMatrix
    verified: bool
    measured: tuple[int, int] | None = None
    note: str = ""

    def __iter__(self):
        yield self.recipe
        yield self.matrix


def build_and_check(recipe: Recipe, verify: bool = True, budget: int | None = None) -> BuildResult:
    """Materialize a recipe and, within budget, measure (rank, ker) against its declaration."""
    M = recipe.build()
    d = recipe.declared()
    budget = max_cells() if budget is None else budget
    if not verify:
        return BuildResult(recipe, M, False, note="declared, not verified")
    if code_cells(M) > budget:
        return BuildResult(recipe, M, False, note="declared, unverified at this size")
    try:
        rep = invariant_report(M, budget)
    except CodeTooLargeError:
        return BuildResult(recipe, M, False, note="declared, unverified at this size")
    measured = (rep.rank, rep.ker)
    if measured != (d.rank, d.ker) or not rep.is_p_additive:
        raise VerificationFailedError(
            f"{recipe} declares (r, k) = ({d.rank}, {d.ker}) but measures {measured}, "
            f"additive={rep.is_p_additive}")
    return BuildResult(recipe, M, True, measured, "measured")


def plan_and_build(p: int, e: int, t: int, r: int, k: int, verify: bool = True,
                   specific: bool = True, budget: int | None = None) -> BuildResult:
    st = pair_status(p, e, t, r, k, specific)
    if st.verdict != CONSTRUCTIBLE:
        raise NotConstructibleError(str(st))
    return build_and_check(st.recipe, verify, budget)


# ---------------------------------------------------------------------------
# tables

def _rank_cells(statuses: Sequence[PairStatus]) -> str:
    """Ranks ascending with runs of open entries wrapped in braces: '{3,4},5'."""
    parts: list[str] = []
    run: list[str] = []
    for st in statuses:
        if st.verdict == OPEN:
            run.append(str(st.r))
            continue
        if run:
            parts.append("{" + ",".join(run) + "}")
            run = []
        parts.append(str(st.r))
    if run:
        parts.append("{" + ",".join(run) + "}")
    return ",".join(parts)


@dataclass
class PairTable:
    p: int
    e: int
    ts: list[int]
    rows: dict[int, list[PairStatus]] = field(default_factory=dict)

    def statuses(self) -> list[PairStatus]:
        return [st for t in self.ts for st in self.rows[t]]

    def text_lines(self) -> list[str]:
        """Canonical rows.

        e = 2: ``t | (r,k) (r,k) ... | rank_p`` with k ascending.
        e > 2: ``t | k | ranks | rank_p`` with k descending and open ranks in braces.
        """
        lines = []
        for t in self.ts:
            sts = self.rows[t]
            rp = str(QDimension(self.e + t, self.e))
            if self.e == 2:
                cells = []
                for st in sts:
                    c = f"({st.r},{st.k})"
                    cells.append("{" + c + "}" if st.verdict == OPEN else c)
                lines.append(f"{t} | {' '.join(cells)} | {rp}")
            else:
                for k in sorted({st.k for st in sts}, reverse=True):
                    group = [st for st in sts if st.k == k]
                    lines.append(f"{t} | {k} | {_rank_cells(group)} | {rp}")
        return lines

    def text(self) -> str:
        return "\n".join(self.text_lines()) + "\n"

    def aligned(self) -> str:
        """The canonical rows padded into columns for reading."""
        rows = [line.split(" | ") for line in self.text_lines()]
        if self.e == 2:
            head = ["t", "(rank, ker)", "rank_p = ker_p"]
        else:
            head = ["t", "ker", "rank", "rank_p = ker_p"]
        table = [head] + rows
        widths = [max(len(r[i]) for r in table) for i in range(len(head))]
        out, last_t = [], None
        for idx, r in enumerate(table):
            cells = list(r)
            if idx and cells[0] == last_t:
                cells[0] = ""
            else:
                last_t = cells[0]
            out.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip())
        return "\n".join(out) + "\n"

    def csv(self, verified: dict[tuple[int, int, int], bool] | None = None) -> str:
        verified = verified or {}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "e", "t", "k", "r", "verdict", "recipe", "rank_p_num", "rank_p_den", "verified"])
        for st in self.statuses():
            w.writerow([st.p, st.e, st.t, st.k, st.r, st.verdict,
                        str(st.recipe) if st.recipe is not None else st.reason,
                        st.e + st.t, st.e, str(verified.get((st.t, st.r, st.k), False)).lower()])
        return buf.getvalue()


def emit_pair_table(p: int, e: int, t_range: Iterable[int], specific: bool = False) -> PairTable:
    """All pairs within the bounds for each t, with their verdicts.

    The default uses the generic layer only, matching the published tables;
    ``specific=True`` also applies the per-field facts.
    """
    ts = list(t_range)
    table = PairTable(p, e, ts)
    for t in ts:
        table.rows[t] = catalog(p, e, t, specific)
    return table


# ---------------------------------------------------------------------------
# conditional extension

@dataclass(frozen=True)
class Seed(Recipe):
    """A caller-supplied, verified matrix used as a Kronecker building block."""

    label: str
    matrix: GHMatrix
    p: int
    e: int
    t: int
    rank: int
    cost = 1

    def build(self):
        return self.matrix

    def declared(self):
        return Declared(self.p, self.e, self.t, self.rank, 1)

    def to_json(self):
        return {"kind": "seed", "label": self.label, "t": self.t, "rank": self.rank}

    def __str__(self):
        return f"Seed({self.label})"

    def __hash__(self):
        return hash((self.label, self.t, self.rank))


def make_seed(M: GHMatrix, label: str | None = None, budget: int | None = None) -> Seed:
    """Measure M and wrap it as a seed; it must be additive with kernel 1."""
    try:
        rep = invariant_report(M, budget)
    except CodeTooLargeError as exc:
        raise SeedUnverifiedError(f"cannot measure seed: {exc}") from exc
    if not rep.is_p_additive or rep.ker != 1 or rep.t is None:
        raise SeedUnverifiedError(
            f"seed must be additive with kernel 1, got additive={rep.is_p_additive}, k={rep.ker}")
    label = label or f"seed_t{rep.t}_r{rep.rank}"
    return Seed(label, M, rep.p, rep.e, rep.t, rep.rank)


def extend_with_seed(seeds: Sequence[Seed | GHMatrix | Recipe], p: int, e: int, t: int,
                     specific: bool = True) -> dict[tuple[int, int], Recipe]:
    """Constructible (r, k) at length p^t once the seeds are added to the toolbox.

    Starting from the standard catalog, every Kronecker sum of blocks taken from
    {S_q, projections, seeds} with total length t is added.  Recipe costs decide
    ties, so pairs already in the catalog keep their standard recipe.
    """
    _check(e, t)
    blocks: list[tuple[int, int, int, Recipe]] = []  # (t, r, k, recipe)
    for s in seeds:
        if isinstance(s, GHMatrix):
            s = make_seed(s)
        d = s.declared()
        if d.ker != 1:
            raise SeedUnverifiedError(f"seed {s} does not declare kernel 1")
        if (d.p, d.e) != (p, e):
            raise SeedUnverifiedError(f"seed {s} lives over GF({d.p}^{d.e}), not GF({p}^{e})")
        blocks.append((d.t, d.rank, d.ker, s))

    out: dict[tuple[int, int], Recipe] = {}
    for st in catalog(p, e, t, specific):
        if st.verdict == CONSTRUCTIBLE:
            out[(st.r, st.k)] = st.recipe
    if not blocks:
        return out
    blocks.append((e, 2, 2, Sylvester(p, e, 1)))
    for tt in range(e + 1, t + 1):
        blocks.append((tt, tt + 1, 1, Projection(p, e, tt)))

    # reach[L] maps (r, k) -> cheapest recipe of total length L
    reach: dict[int, dict[tuple[int, int], Recipe]] = {0: {}}
    for L in range(1, t + 1):
        cur: dict[tuple[int, int], Recipe] = {}
        for bt, br, bk, brec in blocks:
            if bt > L:
                continue
            if bt == L:
                cands = [((br, bk), brec)]
            else:
                cands = [((br + r2 - 1, bk + k2 - 1), Kron(brec, rec2))
                         for (r2, k2), rec2 in reach.get(L - bt, {}).items()]
            for key, rec in cands:
                if key not in cur or rec.sort_key() < cur[key].sort_key():
                    cur[key] = rec
        reach[L] = cur
    for key, rec in reach[t].items():
        out.setdefault(key, rec)
    return out
