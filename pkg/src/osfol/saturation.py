"""Resolution proof search: resolvents, factoring, subsumption, saturation.

The given-clause loop alternates age-based and weight-based selection so
every retained clause is eventually processed. Each retained clause carries
provenance, and a refutation is reported as an ordered trace that `replay`
can recompute step by step.

Saturation adjoins the sort theory of the signature (witness facts, subsort
implications, and function range facts) as background clauses: they carry
the content of the built-in sort module, which resolution needs to refute
clause sets that constrain sort predicates. Background clauses and their
pure-background consequences are excluded from the clause-set exports used
by the distributed procedure.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .language import (
    App,
    Atom,
    Clause,
    Literal,
    Signature,
    Substitution,
    Term,
    Var,
    apply_substitution,
    is_tautology,
    normalize_clause,
    variant_clauses,
)
from .sorts import BOT, TOP
from .unification import UnifyFailure, unify_atoms


@dataclass(frozen=True)
class Limits:
    max_clauses: int = 100_000
    timeout_secs: float = 60.0
    age_weight_ratio: tuple[int, int] = (1, 4)


@dataclass(frozen=True)
class TraceStep:
    step_id: int
    literals: tuple[Literal, ...]  # in the order literal indices refer to
    rule: str  # "input" | "theory" | "received" | "res" | "factor"
    refs: tuple[tuple[int, int], ...] = ()  # (parent id, 1-based literal index)
    note: str = ""

    @property
    def clause(self) -> Clause:
        return Clause(frozenset(self.literals))


def format_trace_step(step: TraceStep) -> str:
    clause = "[]" if not step.literals else " | ".join(str(l) for l in step.literals)
    if step.rule in ("input", "theory"):
        rule = step.rule
    elif step.rule == "received":
        rule = f"received {step.note}".rstrip()
    else:
        rule = f"{step.rule} " + " + ".join(f"{p}({i})" for p, i in step.refs)
    return f"{step.step_id}. {clause} ; {rule}"


def format_trace(steps: Iterable[TraceStep]) -> str:
    return "\n".join(format_trace_step(s) for s in steps)


@dataclass(frozen=True)
class Proved:
    trace: tuple[TraceStep, ...]


@dataclass(frozen=True)
class Saturated:
    pass


@dataclass(frozen=True)
class ResourceLimit:
    kind: str  # "clauses" | "time"


ProofResult = Proved | Saturated | ResourceLimit


# -- inference rules ----------------------------------------------------------------


@dataclass(frozen=True)
class Inference:
    clause: Clause
    substitution: Substitution
    index1: int  # 1-based position in the first parent's reference order
    index2: int  # 1-based position in the second parent's (or same) order


def resolvents(
    c1: Clause,
    c2: Clause,
    sig: Signature,
    *,
    lits1: Sequence[Literal] | None = None,
    lits2: Sequence[Literal] | None = None,
) -> list[Inference]:
    """All binary resolvents of two clauses (standardized apart internally).

    Literal indices in the result refer to the given literal orders, which
    default to the clauses' canonical orders.
    """
    lits1 = tuple(lits1 if lits1 is not None else c1.ordered())
    lits2 = tuple(lits2 if lits2 is not None else c2.ordered())
    renaming: dict[Var, Term] = {}
    taken = {v.name for v in Clause(frozenset(lits1)).variables()}
    taken |= {v.name for v in Clause(frozenset(lits2)).variables()}
    for v in Clause(frozenset(lits2)).variables():
        if any(v.name == w.name for w in Clause(frozenset(lits1)).variables()):
            name = v.name
            while name in taken:
                name += "'"
            taken.add(name)
            renaming[v] = Var(name, v.sort)
    lits2_apart = tuple(apply_substitution(renaming, l) for l in lits2)

    out: list[Inference] = []
    for i, l1 in enumerate(lits1, start=1):
        for j, l2 in enumerate(lits2_apart, start=1):
            if l1.positive == l2.positive or l1.pred != l2.pred:
                continue
            sigma = unify_atoms([Atom(l1.pred, l1.args), Atom(l2.pred, l2.args)], sig)
            if isinstance(sigma, UnifyFailure):
                continue
            rest = [apply_substitution(sigma, l) for k, l in enumerate(lits1, 1) if k != i]
            rest += [
                apply_substitution(sigma, l) for k, l in enumerate(lits2_apart, 1) if k != j
            ]
            out.append(Inference(Clause(frozenset(rest)), sigma, i, j))
    return out


def factor(
    c: Clause, sig: Signature, *, lits: Sequence[Literal] | None = None
) -> list[Inference]:
    """All factors of a clause: unify two same-polarity literals, keep one."""
    lits = tuple(lits if lits is not None else c.ordered())
    out: list[Inference] = []
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            l1, l2 = lits[i], lits[j]
            if l1.positive != l2.positive or l1.pred != l2.pred:
                continue
            sigma = unify_atoms([Atom(l1.pred, l1.args), Atom(l2.pred, l2.args)], sig)
            if isinstance(sigma, UnifyFailure):
                continue
            merged = Clause(frozenset(apply_substitution(sigma, l) for l in lits))
            out.append(Inference(merged, sigma, i + 1, j + 1))
    return out


# -- subsumption ---------------------------------------------------------------------


def _match_term(pattern: Term, target: Term, binding: dict, sig: Signature) -> dict | None:
    """One-sided matching; pattern variables bind down the sort order."""
    if isinstance(pattern, Var):
        if pattern in binding:
            return binding if binding[pattern] == target else None
        if not sig.hierarchy.leq(sig.sort_of(target), pattern.sort):
            return None
        out = dict(binding)
        out[pattern] = target
        return out
    if isinstance(target, App) and pattern.fn == target.fn and len(pattern.args) == len(target.args):
        for p, t in zip(pattern.args, target.args):
            binding = _match_term(p, t, binding, sig)
            if binding is None:
                return None
        return binding
    return None


def subsumes(c1: Clause, c2: Clause, sig: Signature) -> bool:
    """True iff some well-sorted substitution maps c1 into a subset of c2."""
    if c1.is_empty:
        return True
    lits1 = c1.ordered()
    lits2 = c2.ordered()

    def backtrack(i: int, binding: dict) -> bool:
        if i == len(lits1):
            return True
        l1 = lits1[i]
        for l2 in lits2:
            if l1.positive != l2.positive or l1.pred != l2.pred:
                continue
            if len(l1.args) != len(l2.args):
                continue
            attempt = binding
            for p, t in zip(l1.args, l2.args):
                attempt = _match_term(p, t, attempt, sig)
                if attempt is None:
                    break
            if attempt is not None and backtrack(i + 1, attempt):
                return True
        return False

    return backtrack(0, {})


# -- sort theory ---------------------------------------------------------------------


def sort_theory(sig: Signature) -> tuple[Clause, ...]:
    """Clauses carrying the sort module and declaration facts.

    Witness and constant facts s(c), function range facts s(f(x1:s1, ...)),
    and one implication per subsort edge. These make sort-predicate
    reasoning available to resolution.
    """
    clauses: list[Clause] = []
    hierarchy = sig.hierarchy
    for child, parent in sorted(hierarchy.edges):
        if child == BOT or parent in (TOP, BOT):
            continue
        x = Var("x", TOP)
        clauses.append(
            Clause.of(Literal(False, child, (x,)), Literal(True, parent, (x,)))
        )
    for name, decl in sorted(sig.functions.items()):
        if decl.result in (TOP, BOT):
            continue
        args = tuple(
            Var(f"x{i}", s) for i, s in enumerate(decl.arg_sorts, start=1)
        )
        clauses.append(Clause.of(Literal(True, decl.result, (App(name, args),))))
    seen = set()
    unique = []
    for c in clauses:
        if c not in seen:
            seen.add(c)
            unique.append(c)
    return tuple(unique)


# -- the clause database and saturation loop -----------------------------------------


@dataclass
class Entry:
    clause_id: int
    clause: Clause
    ordered: tuple[Literal, ...]
    rule: str
    refs: tuple[tuple[int, int], ...]
    note: str
    tainted: bool  # descends from an input or received clause
    alive: bool = True

    def step(self) -> TraceStep:
        return TraceStep(self.clause_id, self.ordered, self.rule, self.refs, self.note)


class ClauseDB:
    """Clauses with stable ids and provenance, as grown by one saturation run."""

    def __init__(self) -> None:
        self.entries: list[Entry] = []
        self._by_form: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, clause_id: int) -> Entry:
        return self.entries[clause_id - 1]

    def add(
        self,
        clause: Clause,
        rule: str,
        refs: tuple[tuple[int, int], ...] = (),
        note: str = "",
        tainted: bool = True,
    ) -> Entry | None:
        """Store a normalized clause; exact duplicates are not re-added."""
        clause = normalize_clause(clause)
        key = str(clause)
        if key in self._by_form:
            existing = self.entries[self._by_form[key] - 1]
            if existing.alive:
                existing.tainted = existing.tainted or tainted
                return None
        entry = Entry(
            clause_id=len(self.entries) + 1,
            clause=clause,
            ordered=clause.ordered(),
            rule=rule,
            refs=refs,
            note=note,
            tainted=tainted,
        )
        self.entries.append(entry)
        self._by_form[key] = entry.clause_id
        return entry

    def alive_entries(self) -> list[Entry]:
        return [e for e in self.entries if e.alive]

    def exported_clauses(self) -> list[Clause]:
        """Live clauses that descend from real input (not pure sort theory)."""
        return [e.clause for e in self.entries if e.alive and e.tainted]

    def trace_to(self, entry: Entry) -> tuple[TraceStep, ...]:
        needed: set[int] = set()

        def visit(e: Entry) -> None:
            if e.clause_id in needed:
                return
            needed.add(e.clause_id)
            for parent_id, _ in e.refs:
                visit(self.get(parent_id))

        visit(entry)
        return tuple(self.get(i).step() for i in sorted(needed))


def saturate(
    inputs: Iterable[Clause | tuple[Clause, str, str]],
    sig: Signature,
    limits: Limits = Limits(),
    *,
    with_theory: bool = True,
) -> tuple[ProofResult, ClauseDB]:
    """Run the given-clause loop to a refutation, a fixpoint, or a limit.

    `inputs` may mix bare clauses and (clause, rule, note) triples so callers
    can label received clauses. Returns the verdict and the clause database,
    whose provenance replays to the reported trace.
    """
    db = ClauseDB()
    deadline = time.monotonic() + limits.timeout_secs
    age_queue: deque[int] = deque()
    weight_heap: list[tuple[int, int]] = []

    def enqueue(entry: Entry) -> None:
        age_queue.append(entry.clause_id)
        heapq.heappush(weight_heap, (entry.clause.weight(), entry.clause_id))

    def admit(clause: Clause, rule: str, refs=(), note="", tainted=True) -> Entry | None:
        if is_tautology(clause):
            return None
        entry = db.add(clause, rule, refs, note, tainted)
        if entry is None:
            return None
        for other in db.alive_entries():
            if other.clause_id == entry.clause_id:
                continue
            if len(other.clause.literals) <= len(entry.clause.literals) and subsumes(
                other.clause, entry.clause, sig
            ):
                entry.alive = False
                return None
        for other in db.alive_entries():
            if other.clause_id == entry.clause_id:
                continue
            if len(entry.clause.literals) <= len(other.clause.literals) and subsumes(
                entry.clause, other.clause, sig
            ):
                other.alive = False
        enqueue(entry)
        return entry

    for item in inputs:
        clause, rule, note = item if isinstance(item, tuple) else (item, "input", "")
        entry = admit(clause, rule, note=note, tainted=True)
        if entry is not None and entry.clause.is_empty:
            return Proved(db.trace_to(entry)), db
    if with_theory:
        for clause in sort_theory(sig):
            admit(clause, "theory", tainted=False)

    processed: list[int] = []
    processed_ids: set[int] = set()
    picks = 0
    age_share, weight_share = limits.age_weight_ratio
    cycle = age_share + weight_share

    def select() -> Entry | None:
        nonlocal picks
        while age_queue or weight_heap:
            use_age = picks % cycle < age_share
            picks += 1
            if use_age and age_queue:
                cid = age_queue.popleft()
            elif weight_heap:
                _, cid = heapq.heappop(weight_heap)
            elif age_queue:
                cid = age_queue.popleft()
            else:
                break
            entry = db.get(cid)
            if entry.alive and cid not in processed_ids:
                return entry
        return None

    while True:
        if time.monotonic() > deadline:
            return ResourceLimit("time"), db
        if len(db.alive_entries()) > limits.max_clauses:
            return ResourceLimit("clauses"), db
        given = select()
        if given is None:
            return Saturated(), db
        processed.append(given.clause_id)
        processed_ids.add(given.clause_id)

        new: list[tuple[Clause, str, tuple[tuple[int, int], ...], bool]] = []
        for inf in factor(given.clause, sig, lits=given.ordered):
            new.append(
                (
                    inf.clause,
                    "factor",
                    ((given.clause_id, inf.index1), (given.clause_id, inf.index2)),
                    given.tainted,
                )
            )
        for pid in processed:
            partner = db.get(pid)
            if not partner.alive:
                continue
            for inf in resolvents(
                given.clause, partner.clause, sig, lits1=given.ordered, lits2=partner.ordered
            ):
                new.append(
                    (
                        inf.clause,
                        "res",
                        ((given.clause_id, inf.index1), (partner.clause_id, inf.index2)),
                        given.tainted or partner.tainted,
                    )
                )
        for clause, rule, refs, tainted in new:
            entry = admit(clause, rule, refs, tainted=tainted)
            if entry is not None and entry.clause.is_empty:
                return Proved(db.trace_to(entry)), db


# -- trace replay --------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayMismatch:
    step_id: int
    reason: str

    def __str__(self) -> str:
        return f"step {self.step_id}: {self.reason}"


def replay(steps: Sequence[TraceStep], sig: Signature) -> ReplayMismatch | None:
    """Recompute every derived step of a trace and confirm it clause-for-clause.

    Given steps (inputs, theory, received) are accepted as stated; resolution
    and factoring steps are recomputed from their parents at the recorded
    literal positions and compared up to variable renaming. Returns None when
    the whole trace checks out.
    """
    seen: dict[int, TraceStep] = {}
    for step in steps:
        if step.step_id in seen:
            return ReplayMismatch(step.step_id, "duplicate step id")
        if step.rule in ("input", "theory", "received"):
            seen[step.step_id] = step
            continue
        if step.rule not in ("res", "factor"):
            return ReplayMismatch(step.step_id, f"unknown rule {step.rule!r}")
        if len(step.refs) != 2:
            return ReplayMismatch(step.step_id, "expected two parent references")
        for pid, idx in step.refs:
            if pid not in seen:
                return ReplayMismatch(step.step_id, f"parent {pid} not seen earlier")
            if not 1 <= idx <= len(seen[pid].literals):
                return ReplayMismatch(step.step_id, f"literal index {idx} out of range")

        (p1, i1), (p2, i2) = step.refs
        if step.rule == "factor":
            if p1 != p2:
                return ReplayMismatch(step.step_id, "factoring needs one parent clause")
            if i1 == i2:
                return ReplayMismatch(step.step_id, "factoring needs two literals")
            parent = seen[p1]
            candidates = [
                inf.clause
                for inf in factor(parent.clause, sig, lits=parent.literals)
                if {inf.index1, inf.index2} == {i1, i2}
            ]
        else:
            parent1, parent2 = seen[p1], seen[p2]
            l1, l2 = parent1.literals[i1 - 1], parent2.literals[i2 - 1]
            if l1.positive == l2.positive or l1.pred != l2.pred:
                return ReplayMismatch(
                    step.step_id, "referenced literals are not complementary"
                )
            candidates = [
                inf.clause
                for inf in resolvents(
                    parent1.clause, parent2.clause, sig,
                    lits1=parent1.literals, lits2=parent2.literals,
                )
                if inf.index1 == i1 and inf.index2 == i2
            ]
        if not candidates:
            return ReplayMismatch(step.step_id, "inference does not apply")
        if not any(variant_clauses(c, step.clause) for c in candidates):
            return ReplayMismatch(
                step.step_id,
                f"recomputed {candidates[0]} differs from recorded {step.clause}",
            )
        seen[step.step_id] = step
    return None
