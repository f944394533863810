"""Formula normalization and the inverse direction for clause sets.

Forward pipeline: negation normal form, bound-variable renaming, prenex
form, Skolemization (fresh function symbols over the governing universals,
declared at the existential variable's sort), and naive CNF distribution.

Inverse direction: un-Skolemization of a clause set whose designated symbols
satisfy the acceptability conditions. The set is partitioned so that no two
partitions share a designated symbol; within a partition, variables are
renamed apart, same-symbol expressions are merged by sort-preserving
renaming, argument sets are aligned into a chain across arities, and each
symbol is replaced by an existential variable placed right after the
universals it depended on. Formulas from one partition share their
existential variables; re-Skolemizing them as a group restores shared
witnesses, which is what keeps the round trip equisatisfiable.

Relativization translates sorted formulas and signatures into unsorted form
via sort predicates and closure axioms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .language import (
    And,
    App,
    Atom,
    Clause,
    Exists,
    ForAll,
    Formula,
    FreshNames,
    FunctionDecl,
    Implies,
    Literal,
    Not,
    Or,
    Signature,
    Substitution,
    Term,
    Var,
    apply_substitution,
    conj,
    disj,
    format_formula,
    free_variables,
    literal_to_formula,
    subterms,
    term_variables,
)
from .sorts import BOT, TOP, SortHierarchy


@dataclass(frozen=True)
class SkolemInfo:
    arg_sorts: tuple[str, ...]
    result: str
    owner: str


class SkolemTable(dict):
    """Registry of Skolem symbols minted during a session."""

    def register(self, name: str, info: SkolemInfo) -> None:
        if name in self:
            raise ValueError(f"Skolem symbol {name!r} minted twice")
        self[name] = info


# -- negation normal form and prenexing --------------------------------------------


def negation_normal_form(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Implies):
        return negation_normal_form(Or(Not(f.left), f.right))
    if isinstance(f, And):
        return And(negation_normal_form(f.left), negation_normal_form(f.right))
    if isinstance(f, Or):
        return Or(negation_normal_form(f.left), negation_normal_form(f.right))
    if isinstance(f, ForAll):
        return ForAll(f.var, negation_normal_form(f.body))
    if isinstance(f, Exists):
        return Exists(f.var, negation_normal_form(f.body))
    body = f.body
    if isinstance(body, Atom):
        return f
    if isinstance(body, Not):
        return negation_normal_form(body.body)
    if isinstance(body, Implies):
        return negation_normal_form(And(body.left, Not(body.right)))
    if isinstance(body, And):
        return Or(
            negation_normal_form(Not(body.left)), negation_normal_form(Not(body.right))
        )
    if isinstance(body, Or):
        return And(
            negation_normal_form(Not(body.left)), negation_normal_form(Not(body.right))
        )
    if isinstance(body, ForAll):
        return Exists(body.var, negation_normal_form(Not(body.body)))
    return ForAll(body.var, negation_normal_form(Not(body.body)))


def rename_bound_apart(f: Formula) -> Formula:
    """Give every quantifier a distinct variable so prenexing cannot capture."""
    seen: set[str] = set()

    def walk(g: Formula, env: dict[Var, Var]) -> Formula:
        if isinstance(g, Atom):
            return apply_substitution(env, g)
        if isinstance(g, Not):
            return Not(walk(g.body, env))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(walk(g.left, env), walk(g.right, env))
        v = g.var
        if v.name in seen:
            name = v.name
            while name in seen:
                name += "'"
            new = Var(name, v.sort)
        else:
            new = v
        seen.add(new.name)
        return type(g)(new, walk(g.body, {**env, v: new}))

    return walk(f, {})


def to_prenex(f: Formula) -> Formula:
    """Equivalent prenex form; quantified-variable sorts are preserved."""
    g = rename_bound_apart(negation_normal_form(f))

    def pull(h: Formula) -> tuple[list[tuple[str, Var]], Formula]:
        if isinstance(h, (ForAll, Exists)):
            kind = "forall" if isinstance(h, ForAll) else "exists"
            prefix, matrix = pull(h.body)
            return [(kind, h.var)] + prefix, matrix
        if isinstance(h, (And, Or)):
            lp, lm = pull(h.left)
            rp, rm = pull(h.right)
            return lp + rp, type(h)(lm, rm)
        return [], h

    prefix, matrix = pull(g)
    out = matrix
    for kind, v in reversed(prefix):
        out = ForAll(v, out) if kind == "forall" else Exists(v, out)
    return out


def prefix_and_matrix(f: Formula) -> tuple[tuple[tuple[str, Var], ...], Formula]:
    prefix = []
    while isinstance(f, (ForAll, Exists)):
        prefix.append(("forall" if isinstance(f, ForAll) else "exists", f.var))
        f = f.body
    return tuple(prefix), f


# -- Skolemization ------------------------------------------------------------------


def skolemize(
    f: Formula,
    sig: Signature,
    fresh: FreshNames,
    *,
    table: SkolemTable | None = None,
    owner: str = "",
    emit_sort_atoms: bool = False,
) -> Formula:
    """Remove existential quantifiers from a prenex formula.

    Each existential y:s under universals x1..xn is replaced by sk(x1..xn)
    for a fresh symbol sk declared with result sort s in `sig`. When
    `emit_sort_atoms` is set, the sort atom s(sk(x1..xn)) is conjoined to the
    matrix as well, making the sort information explicit in clause form.
    """
    prefix, matrix = prefix_and_matrix(f)
    universals: list[Var] = []
    replacement: dict[Var, Term] = {}
    sort_atoms: list[Formula] = []
    for kind, v in prefix:
        if kind == "forall":
            universals.append(v)
            continue
        name = fresh.symbol()
        arg_sorts = tuple(u.sort for u in universals)
        sig.declare_function(name, arg_sorts, v.sort)
        if table is not None:
            table.register(name, SkolemInfo(arg_sorts, v.sort, owner))
        replacement[v] = App(name, tuple(universals))
        if emit_sort_atoms and v.sort not in (TOP, BOT):
            sort_atoms.append(Atom(v.sort, (replacement[v],)))
    body = apply_substitution(replacement, matrix)
    if sort_atoms:
        body = conj([body] + sort_atoms)
    for u in reversed(universals):
        body = ForAll(u, body)
    return body


def matrix_to_clauses(matrix: Formula) -> frozenset[Clause]:
    """Distribute a quantifier-free NNF matrix into a set of clauses."""

    def walk(f: Formula) -> frozenset[frozenset[Literal]]:
        if isinstance(f, Atom):
            return frozenset((frozenset((Literal(True, f.pred, f.args),)),))
        if isinstance(f, Not):
            assert isinstance(f.body, Atom), "matrix must be in negation normal form"
            return frozenset((frozenset((Literal(False, f.body.pred, f.body.args),)),))
        if isinstance(f, And):
            return walk(f.left) | walk(f.right)
        if isinstance(f, Or):
            return frozenset(a | b for a in walk(f.left) for b in walk(f.right))
        raise ValueError(f"not a quantifier-free matrix: {format_formula(f)}")

    return frozenset(Clause(lits) for lits in walk(matrix))


def clausify(
    f: Formula,
    sig: Signature,
    fresh: FreshNames,
    *,
    table: SkolemTable | None = None,
    owner: str = "",
    emit_sort_atoms: bool = False,
) -> tuple[Clause, ...]:
    """Full pipeline from a closed formula to an equisatisfiable clause set."""
    if free_variables(f):
        raise ValueError(f"clausify requires a closed formula: {format_formula(f)}")
    prenexed = to_prenex(f)
    skolemized = skolemize(
        prenexed, sig, fresh, table=table, owner=owner, emit_sort_atoms=emit_sort_atoms
    )
    _, matrix = prefix_and_matrix(skolemized)
    return tuple(sorted(matrix_to_clauses(matrix), key=str))


# -- acceptability of designated symbols ------------------------------------------


@dataclass(frozen=True)
class AcceptabilityViolation:
    condition: str  # "i" | "ii" | "iii"
    clause: Clause
    detail: str

    def __str__(self) -> str:
        return f"condition ({self.condition}) violated in {self.clause}: {self.detail}"


def skolem_expressions(c: Clause, skolems: Iterable[str]) -> list[App]:
    """Distinct subterms headed by a designated symbol, in occurrence order."""
    names = set(skolems)
    found: list[App] = []
    for lit in c.ordered():
        for arg in lit.args:
            for t in subterms(arg):
                if isinstance(t, App) and t.fn in names and t not in found:
                    found.append(t)
    return found


def check_acceptable(
    clauses: Iterable[Clause], skolems: Iterable[str]
) -> list[AcceptabilityViolation]:
    """Check the three un-Skolemizability conditions on every clause.

    (i) each designated expression applies to pairwise-distinct variables,
    (ii) within a clause, the argument set of a lower-arity expression is
    contained in that of any higher-arity one, and (iii) no two distinct
    expressions in one clause share a head symbol.
    """
    violations: list[AcceptabilityViolation] = []
    skolems = set(skolems)
    for c in clauses:
        exprs = skolem_expressions(c, skolems)
        for e in exprs:
            if any(not isinstance(a, Var) for a in e.args):
                violations.append(
                    AcceptabilityViolation("i", c, f"{e} has a non-variable argument")
                )
            elif len(set(e.args)) != len(e.args):
                violations.append(
                    AcceptabilityViolation("i", c, f"{e} repeats an argument variable")
                )
        by_symbol: dict[str, list[App]] = {}
        for e in exprs:
            by_symbol.setdefault(e.fn, []).append(e)
        for name, group in by_symbol.items():
            if len(group) > 1:
                violations.append(
                    AcceptabilityViolation(
                        "iii", c, f"{name} heads {len(group)} distinct expressions"
                    )
                )
        for a in exprs:
            for b in exprs:
                if len(a.args) <= len(b.args) and a.fn != b.fn:
                    if not set(a.args) <= set(b.args):
                        violations.append(
                            AcceptabilityViolation(
                                "ii", c, f"arguments of {a} not contained in {b}"
                            )
                        )
    return violations


# -- un-Skolemization ---------------------------------------------------------------


@dataclass(frozen=True)
class UnskolemizedGroup:
    """Formulas from one partition, sharing one quantifier prefix.

    The formulas reuse the same existential variables; Skolemizing them as a
    group (one fresh symbol per existential, shared across the group)
    reconstructs a clause set with shared witnesses.
    """

    prefix: tuple[tuple[str, Var], ...]
    formulas: tuple[Formula, ...]


@dataclass(frozen=True)
class UnskolemizeFailure:
    step: str  # "acceptability" | "step3" | "step4"
    detail: str

    def __str__(self) -> str:
        return f"un-Skolemization failed at {self.step}: {self.detail}"


def _clause_var_names(clauses: Iterable[Clause]) -> set[str]:
    names = set()
    for c in clauses:
        names.update(v.name for v in c.variables())
    return names


def _partition_by_symbol(
    clauses: Sequence[Clause], skolems: set[str]
) -> list[list[int]]:
    parent = list(range(len(clauses)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        parent[find(i)] = find(j)

    owner: dict[str, int] = {}
    for i, c in enumerate(clauses):
        for e in skolem_expressions(c, skolems):
            if e.fn in owner:
                union(i, owner[e.fn])
            else:
                owner[e.fn] = i
    groups: dict[int, list[int]] = {}
    for i in range(len(clauses)):
        groups.setdefault(find(i), []).append(i)
    return [groups[root] for root in sorted(groups, key=lambda r: min(groups[r]))]


class _Partition:
    """Mutable view of one partition while steps 2 through 5 run."""

    def __init__(self, clauses: list[Clause], skolems: set[str]):
        self.clauses = clauses
        self.skolems = skolems

    def var_first_occurrence(self) -> dict[Var, int]:
        order: dict[Var, int] = {}
        for c in self.clauses:
            for v in c.variables():
                order.setdefault(v, len(order))
        return order

    def symbol_occurrences(self) -> dict[str, list[App]]:
        """Designated symbols to their distinct expressions, in scan order."""
        out: dict[str, list[App]] = {}
        for c in self.clauses:
            for e in skolem_expressions(c, self.skolems):
                out.setdefault(e.fn, [])
                if e not in out[e.fn]:
                    out[e.fn].append(e)
        return out

    def rename(self, mapping: dict[Var, Var]) -> UnskolemizeFailure | None:
        """Apply a variable renaming partition-wide.

        A renaming that would merge two variables of one clause changes the
        clause's meaning, so it is rejected; acceptable inputs never need
        such a merge.
        """
        if any(v.sort != w.sort for v, w in mapping.items()):
            diffs = [f"{v}/{w}" for v, w in mapping.items() if v.sort != w.sort]
            return UnskolemizeFailure("step3", "sort mismatch: " + ", ".join(diffs))
        for c in self.clauses:
            present = set(c.variables())
            for v, w in mapping.items():
                if v in present and w in present:
                    return UnskolemizeFailure(
                        "step3", f"renaming {v}/{w} would merge variables in {c}"
                    )
        self.clauses = [apply_substitution(mapping, c) for c in self.clauses]
        return None


def _align_argument_sets(
    part: _Partition, step: str, canon_args: Sequence[Var], other_args: Sequence[Var]
) -> UnskolemizeFailure | None:
    """Rename `other_args` variables onto `canon_args` (shared ones stay)."""
    order = part.var_first_occurrence()
    extra = sorted(set(other_args) - set(canon_args), key=order.__getitem__)
    targets = sorted(set(canon_args) - set(other_args), key=order.__getitem__)
    if len(extra) > len(targets):
        return UnskolemizeFailure(step, "argument sets cannot be aligned")
    mapping = dict(zip(extra, targets))
    if not mapping:
        return None
    for v, w in mapping.items():
        if v.sort != w.sort:
            return UnskolemizeFailure(
                step, f"cannot rename {v} to {w}: different sorts"
            )
    failure = part.rename(mapping)
    if failure is not None:
        return UnskolemizeFailure(step, failure.detail)
    return None


def _unskolemize_partition(
    clauses: list[Clause], skolems: set[str], sig: Signature, fresh: FreshNames
) -> UnskolemizedGroup | UnskolemizeFailure:
    part = _Partition(clauses, skolems)

    # Step 2: make variable sets of distinct clauses disjoint.
    all_names = _clause_var_names(part.clauses)
    used: set[str] = set()
    renamed = []
    for c in part.clauses:
        mapping: dict[Var, Var] = {}
        for v in c.variables():
            if v.name in used:
                k = 0
                while True:
                    k += 1
                    name = f"{v.name}_{k}"
                    if name not in all_names and name not in used:
                        break
                all_names.add(name)
                mapping[v] = Var(name, v.sort)
        c = apply_substitution(mapping, c) if mapping else c
        used.update(v.name for v in c.variables())
        renamed.append(c)
    part.clauses = renamed

    # Step 3: one expression per designated symbol, by renaming onto the
    # first occurrence.
    for sym in list(part.symbol_occurrences()):
        while True:
            exprs = part.symbol_occurrences().get(sym, [])
            if len(exprs) <= 1:
                break
            canon, other = exprs[0], exprs[1]
            mapping = {}
            for u, w in zip(canon.args, other.args):
                if u == w:
                    continue
                if not isinstance(w, Var) or not isinstance(u, Var):
                    return UnskolemizeFailure("step3", f"non-variable argument in {other}")
                mapping[w] = u
            failure = part.rename(mapping)
            if failure is not None:
                return failure

    # Step 4: same arity means same argument set, and argument sets nest
    # across arities.
    exprs_by_symbol = part.symbol_occurrences()
    arity_of = {sym: len(es[0].args) for sym, es in exprs_by_symbol.items()}
    symbol_order = list(exprs_by_symbol)  # first-occurrence order
    arities = sorted(set(arity_of.values()))
    for arity in arities:
        syms = [s for s in symbol_order if arity_of[s] == arity]
        canon_args = list(part.symbol_occurrences()[syms[0]][0].args)
        for sym in syms[1:]:
            other_args = list(part.symbol_occurrences()[sym][0].args)
            failure = _align_argument_sets(part, "step4", canon_args, other_args)
            if failure is not None:
                return failure
    for small, big in zip(arities, arities[1:]):
        small_sym = next(s for s in symbol_order if arity_of[s] == small)
        big_sym = next(s for s in symbol_order if arity_of[s] == big)
        big_args = list(part.symbol_occurrences()[big_sym][0].args)
        small_args = list(part.symbol_occurrences()[small_sym][0].args)
        if not set(small_args) <= set(big_args):
            failure = _align_argument_sets(part, "step4", big_args, small_args)
            if failure is not None:
                return failure

    # Step 5: build the shared quantifier prefix and substitute existential
    # variables for the designated expressions.
    final_exprs = {sym: es[0] for sym, es in part.symbol_occurrences().items()}
    order = part.var_first_occurrence()
    chain: list[Var] = []
    for arity in arities:
        if arity == 0:
            continue
        sym = next(s for s in symbol_order if arity_of[s] == arity)
        args = sorted(set(final_exprs[sym].args), key=order.__getitem__)
        for v in args:
            if v not in chain:
                chain.append(v)
        if len(chain) != arity:
            return UnskolemizeFailure("step4", "argument sets do not form a chain")
    leftover = [v for v in sorted(order, key=order.__getitem__) if v not in chain]

    existential_of: dict[str, Var] = {}
    for sym in sorted(symbol_order, key=lambda s: (arity_of[s], symbol_order.index(s))):
        decl = sig.function_decl(sym)
        if decl is None:
            return UnskolemizeFailure("step3", f"undeclared designated symbol {sym!r}")
        existential_of[sym] = fresh.variable(decl.result, "v")

    prefix: list[tuple[str, Var]] = []
    by_arity: dict[int, list[str]] = {}
    for sym in symbol_order:
        by_arity.setdefault(arity_of[sym], []).append(sym)
    for sym in by_arity.get(0, ()):
        prefix.append(("exists", existential_of[sym]))
    for depth, u in enumerate(chain, start=1):
        prefix.append(("forall", u))
        for sym in by_arity.get(depth, ()):
            prefix.append(("exists", existential_of[sym]))
    for u in leftover:
        prefix.append(("forall", u))

    def replace(t: Term) -> Term:
        if isinstance(t, App):
            if t.fn in final_exprs:
                return existential_of[t.fn]
            return App(t.fn, tuple(replace(a) for a in t.args))
        return t

    replaced_vars = set(existential_of.values())
    formulas: list[Formula] = []
    for c in part.clauses:
        lits = []
        for lit in c.ordered():
            new = Literal(lit.positive, lit.pred, tuple(replace(a) for a in lit.args))
            # Sort atoms over a fresh existential variable restate the
            # Skolem symbol's declared result sort; omit them.
            if (
                new.positive
                and sig.is_sort_predicate(new.pred)
                and len(new.args) == 1
                and new.args[0] in replaced_vars
                and sig.hierarchy.leq(new.args[0].sort, new.pred)
            ):
                continue
            lits.append(new)
        if not lits:
            continue
        body = disj([literal_to_formula(l) for l in lits])
        for kind, v in reversed(prefix):
            body = ForAll(v, body) if kind == "forall" else Exists(v, body)
        formulas.append(body)

    return UnskolemizedGroup(tuple(prefix), tuple(formulas))


def unskolemize(
    clauses: Sequence[Clause],
    skolems: Iterable[str],
    sig: Signature,
    fresh: FreshNames,
) -> list[UnskolemizedGroup] | UnskolemizeFailure:
    """Invert Skolemization over the designated symbols of a clause set.

    Returns one group per partition; a group's formulas share the partition's
    quantifier prefix. Fails when the merging or alignment steps would need
    anything other than a sort-preserving variable renaming.
    """
    clauses = [c for c in clauses]
    if any(c.is_empty for c in clauses):
        raise ValueError("the empty clause cannot be un-Skolemized")
    skolems = set(skolems)
    violations = check_acceptable(clauses, skolems)
    if violations:
        return UnskolemizeFailure("acceptability", "; ".join(map(str, violations)))
    groups: list[UnskolemizedGroup] = []
    for indices in _partition_by_symbol(clauses, skolems):
        result = _unskolemize_partition(
            [clauses[i] for i in indices], skolems, sig, fresh
        )
        if isinstance(result, UnskolemizeFailure):
            return result
        groups.append(result)
    return groups


def skolemize_group(
    group: UnskolemizedGroup,
    sig: Signature,
    fresh: FreshNames,
    *,
    table: SkolemTable | None = None,
    owner: str = "",
    emit_sort_atoms: bool = True,
) -> tuple[Clause, ...]:
    """Skolemize a group's formulas with shared witnesses.

    One fresh symbol is minted per existential variable of the group prefix
    and reused across all formulas, so the sharing expressed by the common
    prefix survives. Sort atoms for the minted terms are emitted once per
    symbol when requested.
    """
    universals: list[Var] = []
    replacement: dict[Var, Term] = {}
    sort_atom_clauses: list[Clause] = []
    for kind, v in group.prefix:
        if kind == "forall":
            universals.append(v)
            continue
        name = fresh.symbol()
        arg_sorts = tuple(u.sort for u in universals)
        sig.declare_function(name, arg_sorts, v.sort)
        if table is not None:
            table.register(name, SkolemInfo(arg_sorts, v.sort, owner))
        replacement[v] = App(name, tuple(universals))
        if emit_sort_atoms and v.sort not in (TOP, BOT):
            sort_atom_clauses.append(
                Clause.of(Literal(True, v.sort, (replacement[v],)))
            )
    out: list[Clause] = []
    for f in group.formulas:
        _, matrix = prefix_and_matrix(f)
        matrix = apply_substitution(replacement, matrix)
        for c in sorted(matrix_to_clauses(matrix), key=str):
            if c not in out:
                out.append(c)
    for c in sort_atom_clauses:
        if c not in out:
            out.append(c)
    return tuple(out)


# -- relativization to unsorted form ------------------------------------------------


def _strip_sorts_term(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(t.name, TOP)
    return App(t.fn, tuple(_strip_sorts_term(a) for a in t.args))


def relativize_formula(f: Formula) -> Formula:
    """Unsorted counterpart: sorted quantifiers become guarded ones."""

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return Atom(g.pred, tuple(_strip_sorts_term(a) for a in g.args))
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(walk(g.left), walk(g.right))
        v = Var(g.var.name, TOP)
        body = walk(g.body)
        if g.var.sort == TOP:
            return type(g)(v, body)
        guard = Atom(g.var.sort, (v,))
        if isinstance(g, ForAll):
            return ForAll(v, Implies(guard, body))
        return Exists(v, And(guard, body))

    return walk(rename_bound_apart(f))


def relativize_signature(sig: Signature) -> list[Formula]:
    """Closure axioms making the sort discipline explicit in unsorted form."""
    axioms: list[Formula] = []
    hierarchy = sig.hierarchy
    for child, parent in sorted(hierarchy.edges):
        if child == BOT or parent in (TOP, BOT):
            continue
        x = Var("x", TOP)
        axioms.append(ForAll(x, Implies(Atom(child, (x,)), Atom(parent, (x,)))))
    for name, decl in sorted(sig.functions.items()):
        if decl.result in (TOP, BOT):
            continue
        if not decl.arg_sorts:
            axioms.append(Atom(decl.result, (App(name),)))
            continue
        xs = [Var(f"x{i}", TOP) for i in range(1, len(decl.arg_sorts) + 1)]
        guards = [
            Atom(s, (x,)) for x, s in zip(xs, decl.arg_sorts) if s not in (TOP, BOT)
        ]
        head = Atom(decl.result, (App(name, tuple(xs)),))
        body = Implies(conj(guards), head) if guards else head
        for x in reversed(xs):
            body = ForAll(x, body)
        axioms.append(body)
    return axioms


def relativize(item, sig: Signature | None = None) -> list[Formula]:
    """Unsorted formula set for a formula or a whole signature."""
    if isinstance(item, Signature):
        return relativize_signature(item)
    return [relativize_formula(item)]


def unsorted_signature(sig: Signature) -> Signature:
    """Degenerate counterpart: one universe, sort predicates become ordinary."""
    flat = Signature(SortHierarchy())
    for s in sorted(sig.hierarchy.sorts):
        if s not in (TOP, BOT):
            flat.declare_predicate(s, (TOP,))
    for name, arg_sorts in sorted(sig.predicates.items()):
        flat.declare_predicate(name, tuple(TOP for _ in arg_sorts))
    for name, decl in sorted(sig.functions.items()):
        flat.functions[name] = FunctionDecl(tuple(TOP for _ in decl.arg_sorts), TOP)
    return flat
