"""Order-sorted unification yielding a most general well-sorted unifier.

Equations are processed by five rules: drop trivial variable equations,
orient term/variable pairs, decompose applications, bind a variable to a
term of a smaller sort (with occurs check), and merge two variables at
their sorts' greatest common subsort via a fresh variable. A deterministic
worklist applies the rules in that priority order; an optional shuffled
selection exists so tests can confirm order independence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .language import (
    App,
    Atom,
    FreshNames,
    Literal,
    Signature,
    Substitution,
    Term,
    Var,
    occurs_in,
    term_variables,
    variable_base_name,
)
from .sorts import BOT, NoGlb, SortModuleError


@dataclass(frozen=True)
class UnifyFailure:
    """Why unification failed: which rule rejected the equation set."""

    rule: str  # "predicate" | "clash" | "occurs" | "sort" | "bottom-glb"
    detail: str = ""

    def __str__(self) -> str:
        return f"not unifiable ({self.rule}): {self.detail}"


_RULE_DROP = 1
_RULE_ORIENT = 2
_RULE_DECOMPOSE = 3
_RULE_BIND = 4
_RULE_MERGE = 5


def _rule_of(left: Term, right: Term) -> int:
    if isinstance(left, Var):
        if left == right:
            return _RULE_DROP
        if isinstance(right, App):
            return _RULE_BIND
        return _RULE_MERGE
    if isinstance(right, Var):
        return _RULE_ORIENT
    return _RULE_DECOMPOSE


class _VarSource:
    """Fresh merge variables that avoid every name seen in the problem."""

    def __init__(self, avoid: set[str], fresh: FreshNames | None):
        self._fresh = fresh
        self._avoid = avoid
        self._k = 0

    def new(self, sort: str) -> Var:
        if self._fresh is not None:
            return self._fresh.variable(sort)
        base = variable_base_name(sort)
        while True:
            self._k += 1
            name = f"{base}_{self._k}"
            if name not in self._avoid:
                self._avoid.add(name)
                return Var(name, sort)


def solve_equations(
    equations: Iterable[tuple[Term, Term]],
    sig: Signature,
    fresh: FreshNames | None = None,
    shuffle: random.Random | None = None,
) -> Substitution | UnifyFailure:
    """Run the unification rules on temporary equations until only permanent
    variable bindings remain, and return those bindings as a substitution."""
    temp: list[tuple[Term, Term]] = list(equations)
    perm: dict[Var, Term] = {}
    avoid = set()
    for l, r in temp:
        avoid.update(v.name for v in term_variables(l) + term_variables(r))
    source = _VarSource(avoid, fresh)

    def substitute(binding: dict[Var, Term], skip: int) -> None:
        from .language import apply_substitution

        for i, (l, r) in enumerate(temp):
            if i != skip:
                temp[i] = (apply_substitution(binding, l), apply_substitution(binding, r))
        for v in list(perm):
            perm[v] = apply_substitution(binding, perm[v])

    def bind(v: Var, t: Term, skip: int) -> None:
        substitute({v: t}, skip)
        perm[v] = t

    while temp:
        if shuffle is None:
            idx = min(range(len(temp)), key=lambda i: _rule_of(*temp[i]))
        else:
            idx = shuffle.randrange(len(temp))
        left, right = temp[idx]
        rule = _rule_of(left, right)

        if rule == _RULE_DROP:
            temp.pop(idx)
        elif rule == _RULE_ORIENT:
            temp[idx] = (right, left)
        elif rule == _RULE_DECOMPOSE:
            assert isinstance(left, App) and isinstance(right, App)
            if left.fn != right.fn or len(left.args) != len(right.args):
                return UnifyFailure("clash", f"{left} vs {right}")
            temp.pop(idx)
            temp.extend(zip(left.args, right.args))
        elif rule == _RULE_BIND:
            assert isinstance(left, Var) and isinstance(right, App)
            if occurs_in(left, right):
                return UnifyFailure("occurs", f"{left} occurs in {right}")
            term_sort = sig.sort_of(right)
            if not sig.hierarchy.leq(term_sort, left.sort):
                return UnifyFailure(
                    "sort", f"{right} has sort {term_sort}, not a subsort of {left.sort}"
                )
            bind(left, right, idx)
            temp.pop(idx)
        else:
            assert isinstance(left, Var) and isinstance(right, Var) and left != right
            if sig.hierarchy.leq(right.sort, left.sort):
                bind(left, right, idx)
                temp.pop(idx)
            elif sig.hierarchy.lt(left.sort, right.sort):
                bind(right, left, idx)
                temp.pop(idx)
            else:
                meet = sig.hierarchy.glb((left.sort, right.sort))
                if isinstance(meet, NoGlb):
                    raise SortModuleError(
                        f"hierarchy lacks a unique glb for {left.sort}, {right.sort}; "
                        "synthesize glbs before unifying"
                    )
                if meet == BOT:
                    return UnifyFailure(
                        "bottom-glb",
                        f"sorts {left.sort} and {right.sort} share no common subsort",
                    )
                x = source.new(meet)
                substitute({left: x, right: x}, idx)
                perm[left] = x
                perm[right] = x
                temp.pop(idx)

    return Substitution(perm)


def unify_terms(
    t1: Term,
    t2: Term,
    sig: Signature,
    fresh: FreshNames | None = None,
    shuffle: random.Random | None = None,
) -> Substitution | UnifyFailure:
    return solve_equations([(t1, t2)], sig, fresh, shuffle)


def unify_atoms(
    atoms: Sequence[Atom | Literal],
    sig: Signature,
    fresh: FreshNames | None = None,
    shuffle: random.Random | None = None,
) -> Substitution | UnifyFailure:
    """Most general well-sorted unifier of a set of atomic formulas.

    All atoms must share one predicate symbol; different symbols cannot be
    unified at all. Identical atoms need nothing, so duplicates are dropped
    before equations are extracted.
    """
    distinct: list[Atom | Literal] = []
    for a in atoms:
        key = (a.pred, a.args)
        if all((d.pred, d.args) != key for d in distinct):
            distinct.append(a)
    if len(distinct) <= 1:
        return Substitution()
    first = distinct[0]
    for other in distinct[1:]:
        if other.pred != first.pred or len(other.args) != len(first.args):
            return UnifyFailure("predicate", f"{first.pred} vs {other.pred}")
    equations = []
    for prev, nxt in zip(distinct, distinct[1:]):
        equations.extend(zip(prev.args, nxt.args))
    return solve_equations(equations, sig, fresh, shuffle)


def merge_variables(
    v1: Var, v2: Var, sig: Signature, fresh: FreshNames | None = None
) -> tuple[Var, Substitution] | UnifyFailure:
    """Merge two incomparably sorted variables at their greatest common subsort."""
    if v1 == v2:
        raise ValueError("variables must be distinct")
    if sig.hierarchy.comparable(v1.sort, v2.sort):
        raise ValueError(
            f"sorts {v1.sort} and {v2.sort} are comparable; merging only applies "
            "to incomparable sorts"
        )
    meet = sig.hierarchy.glb((v1.sort, v2.sort))
    if isinstance(meet, NoGlb):
        raise SortModuleError(str(meet))
    if meet == BOT:
        return UnifyFailure(
            "bottom-glb", f"sorts {v1.sort} and {v2.sort} share no common subsort"
        )
    if fresh is not None:
        x = fresh.variable(meet)
    else:
        x = _VarSource({v1.name, v2.name}, None).new(meet)
    return x, Substitution({v1: x, v2: x})
