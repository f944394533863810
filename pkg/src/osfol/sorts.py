"""Sort hierarchies: finite partial orders of sorts with TOP/BOT and glb queries."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

TOP = "TOP"
BOT = "BOT"

# Reserved prefix for sorts inserted by synthesize_glbs. The parser rejects
# user sorts with this prefix, and such sorts are exempt from the
# inhabitation check (they exist only to make meets unique).
SYNTH_PREFIX = "GLB_"


class SortModuleError(Exception):
    """A sort module or hierarchy violates the required structure."""


@dataclass(frozen=True)
class NoGlb:
    """Report returned when a sort set has no unique greatest lower bound."""

    sorts: tuple[str, ...]
    maximal_lower_bounds: tuple[str, ...]

    def __str__(self) -> str:
        return "no unique glb of {%s}: maximal lower bounds {%s}" % (
            ", ".join(self.sorts),
            ", ".join(self.maximal_lower_bounds),
        )


class SortHierarchy:
    """Immutable partial order of sorts with greatest element TOP and least BOT.

    `edges` are declared subsort facts (child, parent); ordering queries run
    over the reflexive-transitive closure. `witnesses` maps a sort to the
    constant symbols declared to inhabit it directly.
    """

    def __init__(
        self,
        sorts: Iterable[str] = (),
        edges: Iterable[tuple[str, str]] = (),
        witnesses: Mapping[str, Iterable[str]] | None = None,
    ):
        names = set(sorts) | {TOP, BOT}
        edge_set = set()
        for child, parent in edges:
            names.add(child)
            names.add(parent)
            if child != parent:
                edge_set.add((child, parent))
        self._sorts = frozenset(names)
        self._edges = frozenset(edge_set)
        self._witnesses = {
            s: frozenset(ws) for s, ws in (witnesses or {}).items() if ws
        }
        for s in self._witnesses:
            if s not in self._sorts:
                raise SortModuleError(f"witness declared for unknown sort {s!r}")
        self._up = self._close()
        self._down: dict[str, frozenset[str]] = {s: frozenset() for s in self._sorts}
        down: dict[str, set[str]] = {s: set() for s in self._sorts}
        for s, ups in self._up.items():
            for t in ups:
                down[t].add(s)
        self._down = {s: frozenset(v) for s, v in down.items()}
        self._check_antisymmetry()

    def _close(self) -> dict[str, frozenset[str]]:
        up: dict[str, set[str]] = {s: {s, TOP} for s in self._sorts}
        up[BOT] = set(self._sorts)
        for child, parent in self._edges:
            up[child].add(parent)
        changed = True
        while changed:
            changed = False
            for s in self._sorts:
                grown = set(up[s])
                for t in up[s]:
                    grown |= up[t]
                if grown != up[s]:
                    up[s] = grown
                    changed = True
        return {s: frozenset(v) for s, v in up.items()}

    def _check_antisymmetry(self) -> None:
        for s in self._sorts:
            for t in self._up[s]:
                if t != s and s in self._up[t]:
                    raise SortModuleError(
                        f"sorts {s!r} and {t!r} are mutually ordered (not a partial order)"
                    )

    # -- basic queries ----------------------------------------------------

    @property
    def sorts(self) -> frozenset[str]:
        return self._sorts

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return self._edges

    @property
    def witnesses(self) -> dict[str, frozenset[str]]:
        return dict(self._witnesses)

    def has_sort(self, s: str) -> bool:
        return s in self._sorts

    def _require(self, s: str) -> None:
        if s not in self._sorts:
            raise SortModuleError(f"unknown sort {s!r}")

    def leq(self, s1: str, s2: str) -> bool:
        """True iff s1 is a subsort of s2 in the reflexive-transitive closure."""
        self._require(s1)
        self._require(s2)
        return s2 in self._up[s1]

    def lt(self, s1: str, s2: str) -> bool:
        return s1 != s2 and self.leq(s1, s2)

    def comparable(self, s1: str, s2: str) -> bool:
        return self.leq(s1, s2) or self.leq(s2, s1)

    def lower_bounds(self, sorts: Iterable[str]) -> set[str]:
        sorts = list(sorts)
        for s in sorts:
            self._require(s)
        common = set(self._down[sorts[0]]) if sorts else set(self._sorts)
        for s in sorts[1:]:
            common &= self._down[s]
        return common

    def glb(self, sorts: Iterable[str]) -> str | NoGlb:
        """Unique greatest lower bound of a nonempty sort set, or a NoGlb report."""
        query = tuple(sorts)
        if not query:
            raise SortModuleError("glb of an empty sort set")
        lower = self.lower_bounds(query)
        maximal = sorted(t for t in lower if len(self._up[t] & lower) == 1)
        if len(maximal) == 1:
            return maximal[0]
        return NoGlb(query, tuple(maximal))

    def pairs_missing_glb(self) -> list[tuple[str, str]]:
        """All sort pairs whose lower-bound set has no unique maximum."""
        missing = []
        for s1, s2 in combinations(sorted(self._sorts), 2):
            if isinstance(self.glb((s1, s2)), NoGlb):
                missing.append((s1, s2))
        return missing

    # -- inhabitation ------------------------------------------------------

    def witnesses_for(self, s: str) -> frozenset[str]:
        """Witness constants for s, counting constants declared at subsorts."""
        self._require(s)
        found: set[str] = set()
        for t, ws in self._witnesses.items():
            if self.leq(t, s):
                found |= ws
        return frozenset(found)

    def uninhabited_sorts(self) -> list[str]:
        """Sorts (other than TOP, BOT, and synthetic glbs) without any witness."""
        return sorted(
            s
            for s in self._sorts
            if s not in (TOP, BOT)
            and not s.startswith(SYNTH_PREFIX)
            and not self.witnesses_for(s)
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SortHierarchy)
            and self._sorts == other._sorts
            and self._up == other._up
            and self._witnesses == other._witnesses
        )

    def __hash__(self) -> int:
        return hash((self._sorts, frozenset(self._up.items())))

    def __repr__(self) -> str:
        return f"SortHierarchy({len(self._sorts)} sorts, {len(self._edges)} edges)"


def synthesize_glbs(h: SortHierarchy) -> SortHierarchy:
    """Complete a hierarchy to a lower semilattice by inserting synthetic meets.

    For every pair without a unique glb, a fresh sort is inserted below the
    pair and above its maximal common lower bounds. Synthetic names derive
    deterministically from the base sorts they are meets of, so repeated
    loads are identical. Original ordering facts are preserved.
    """
    components: dict[str, frozenset[str]] = {s: frozenset((s,)) for s in h.sorts}
    current = h
    while True:
        missing = current.pairs_missing_glb()
        if not missing:
            return current
        edges = set(current.edges)
        new_sorts = set(current.sorts)
        for s1, s2 in missing:
            glb = current.glb((s1, s2))
            assert isinstance(glb, NoGlb)
            name = SYNTH_PREFIX + "_".join(sorted(components[s1] | components[s2]))
            if name in new_sorts:
                continue  # a second offending pair resolved by the same meet
            components[name] = components[s1] | components[s2]
            new_sorts.add(name)
            edges.add((name, s1))
            edges.add((name, s2))
            for m in glb.maximal_lower_bounds:
                if m != BOT:
                    edges.add((m, name))
        current = SortHierarchy(new_sorts, edges, current.witnesses)


def load_sort_module(
    clauses: Iterable, *, synthesize: bool = False
) -> SortHierarchy:
    """Build a hierarchy from a definite-program sort module.

    Accepted clause shapes: a subsort axiom {~s1(x:TOP), s2(x:TOP)} or a
    ground fact {s(c)}. Anything else is rejected: the full definite-program
    form would make sort reasoning undecidable, and these two shapes express
    every hierarchy used in practice.
    """
    from .language import App, Var  # deferred: language imports this module

    edges: list[tuple[str, str]] = []
    witnesses: dict[str, set[str]] = {}
    sorts: set[str] = set()

    for clause in clauses:
        lits = sorted(clause.literals, key=lambda l: (l.positive, l.pred))
        if len(lits) == 1 and lits[0].positive:
            (lit,) = lits
            if len(lit.args) != 1 or not isinstance(lit.args[0], App) or lit.args[0].args:
                raise SortModuleError(
                    f"sort fact must apply a sort to a constant: {clause}"
                )
            sorts.add(lit.pred)
            witnesses.setdefault(lit.pred, set()).add(lit.args[0].fn)
        elif len(lits) == 2 and not lits[0].positive and lits[1].positive:
            neg, pos = lits
            args_ok = (
                len(neg.args) == 1
                and len(pos.args) == 1
                and isinstance(neg.args[0], Var)
                and neg.args[0] == pos.args[0]
                and neg.args[0].sort == TOP
            )
            if not args_ok:
                raise SortModuleError(
                    f"subsort axiom must relate one TOP variable: {clause}"
                )
            sorts |= {neg.pred, pos.pred}
            edges.append((neg.pred, pos.pred))
        else:
            raise SortModuleError(
                f"clause is not a subsort axiom or ground sort fact: {clause}"
            )

    hierarchy = SortHierarchy(sorts, edges, witnesses)
    uninhabited = hierarchy.uninhabited_sorts()
    if uninhabited:
        raise SortModuleError(
            "uninhabited sorts (no witness constant): " + ", ".join(uninhabited)
        )
    if synthesize:
        return synthesize_glbs(hierarchy)
    missing = hierarchy.pairs_missing_glb()
    if missing:
        pairs = ", ".join(f"({a}, {b})" for a, b in missing)
        raise SortModuleError(
            f"sort pairs without a unique glb: {pairs} (enable glb synthesis)"
        )
    return hierarchy
