"""Well-sorted terms, literals, clauses, formulas, signatures, and substitutions.

Values are immutable. Variable identity is the (name, sort) pair, so the same
name at two sorts is two distinct variables. Clauses are duplicate-free
literal sets read as the universal closure of their disjunction; a canonical
literal order makes printing deterministic.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import NamedTuple, Union

from .sorts import BOT, TOP, SortHierarchy


class WellSortednessError(Exception):
    """A term, literal, clause, or formula violates the sort discipline."""


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return f"{self.name}:{self.sort}"

    __repr__ = __str__


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.fn
        return f"{self.fn}({', '.join(str(a) for a in self.args)})"

    __repr__ = __str__


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


def term_variables(t: Term, acc: list[Var] | None = None) -> list[Var]:
    """Variables of a term in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t not in acc:
            acc.append(t)
    else:
        for a in t.args:
            term_variables(a, acc)
    return acc


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def subterms(t: Term) -> Iterable[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def occurs_in(v: Var, t: Term) -> bool:
    return any(s == v for s in subterms(t))


# -- literals and clauses ------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    positive: bool
    pred: str
    args: tuple[Term, ...] = ()

    def negated(self) -> "Literal":
        return Literal(not self.positive, self.pred, self.args)

    def __str__(self) -> str:
        body = self.pred
        if self.args:
            body += f"({', '.join(str(a) for a in self.args)})"
        return body if self.positive else "~" + body

    __repr__ = __str__


def _term_shape(t: Term) -> tuple:
    """Structural key that ignores variable names (but keeps sorts)."""
    if isinstance(t, Var):
        return ("v", t.sort)
    return ("f", t.fn, tuple(_term_shape(a) for a in t.args))


def literal_key(lit: Literal) -> tuple:
    """Total order on literals: predicate, polarity, shape, spelling."""
    return (lit.pred, not lit.positive, tuple(_term_shape(a) for a in lit.args), str(lit))


@dataclass(frozen=True)
class Clause:
    literals: frozenset[Literal]

    @classmethod
    def of(cls, *lits: Literal) -> "Clause":
        return cls(frozenset(lits))

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def ordered(self) -> tuple[Literal, ...]:
        return tuple(sorted(self.literals, key=literal_key))

    def variables(self) -> list[Var]:
        acc: list[Var] = []
        for lit in self.ordered():
            for t in lit.args:
                term_variables(t, acc)
        return acc

    def predicates(self) -> frozenset[str]:
        return frozenset(l.pred for l in self.literals)

    def symbols(self) -> frozenset[str]:
        """All predicate and function symbols occurring in the clause."""
        syms = set()
        for lit in self.literals:
            syms.add(lit.pred)
            for t in lit.args:
                for s in subterms(t):
                    if isinstance(s, App):
                        syms.add(s.fn)
        return frozenset(syms)

    def weight(self) -> int:
        return sum(1 + sum(term_size(a) for a in lit.args) for lit in self.literals)

    def __str__(self) -> str:
        if self.is_empty:
            return "[]"
        return " | ".join(str(l) for l in self.ordered())

    __repr__ = __str__


EMPTY_CLAUSE = Clause(frozenset())


def is_tautology(c: Clause) -> bool:
    return any(l.negated() in c.literals for l in c.literals)


# -- formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, ForAll, Exists]


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def literal_to_formula(lit: Literal) -> Formula:
    atom = Atom(lit.pred, lit.args)
    return atom if lit.positive else Not(atom)


def clause_to_formula(c: Clause) -> Formula:
    """Universal closure of the clause's disjunction."""
    if c.is_empty:
        raise ValueError("the empty clause has no formula form")
    body = disj([literal_to_formula(l) for l in c.ordered()])
    for v in reversed(c.variables()):
        body = ForAll(v, body)
    return body


_PREC = {Implies: 1, Or: 2, And: 3}


def format_formula(f: Formula, parent_prec: int = 0) -> str:
    if isinstance(f, Atom):
        return str(Literal(True, f.pred, f.args))
    if isinstance(f, Not):
        return "~" + format_formula(f.body, 9)
    if isinstance(f, (ForAll, Exists)):
        word = "forall" if isinstance(f, ForAll) else "exists"
        text = f"{word} {f.var}. {format_formula(f.body, 0)}"
        return f"({text})" if parent_prec > 0 else text
    op = {And: " & ", Or: " | ", Implies: " -> "}[type(f)]
    prec = _PREC[type(f)]
    left = format_formula(f.left, prec + (1 if isinstance(f, Implies) else 0))
    right = format_formula(f.right, prec)
    text = left + op + right
    return f"({text})" if parent_prec >= prec else text


def formula_atoms(f: Formula) -> Iterable[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from formula_atoms(f.body)
    elif isinstance(f, (And, Or, Implies)):
        yield from formula_atoms(f.left)
        yield from formula_atoms(f.right)
    else:
        yield from formula_atoms(f.body)


def formula_symbols(f: Formula) -> frozenset[str]:
    syms: set[str] = set()
    for atom in formula_atoms(f):
        syms.add(atom.pred)
        for t in atom.args:
            for s in subterms(t):
                if isinstance(s, App):
                    syms.add(s.fn)
    return frozenset(syms)


def free_variables(f: Formula, bound: frozenset[Var] = frozenset()) -> set[Var]:
    if isinstance(f, Atom):
        out = set()
        for t in f.args:
            out |= {v for v in term_variables(t) if v not in bound}
        return out
    if isinstance(f, Not):
        return free_variables(f.body, bound)
    if isinstance(f, (And, Or, Implies)):
        return free_variables(f.left, bound) | free_variables(f.right, bound)
    return free_variables(f.body, bound | {f.var})


# -- signatures ---------------------------------------------------------------


class FunctionDecl(NamedTuple):
    arg_sorts: tuple[str, ...]
    result: str


class Signature:
    """Predicate and function declarations over a shared sort hierarchy.

    Sort predicates (one per sort other than TOP/BOT, with argument sort TOP)
    and the sort module's witness constants are implicit: they belong to every
    signature and are excluded from the non-logical symbol set used for
    common-language computations.
    """

    def __init__(self, hierarchy: SortHierarchy):
        self.hierarchy = hierarchy
        self.predicates: dict[str, tuple[str, ...]] = {}
        self.functions: dict[str, FunctionDecl] = {}
        self._module_constants: set[str] = set()
        for sort, consts in hierarchy.witnesses.items():
            for c in consts:
                self.functions[c] = FunctionDecl((), sort)
                self._module_constants.add(c)

    # -- declarations --

    def _check_sorts(self, sorts: Iterable[str]) -> None:
        for s in sorts:
            if not self.hierarchy.has_sort(s):
                raise WellSortednessError(f"declaration mentions unknown sort {s!r}")
            if s == BOT:
                raise WellSortednessError("declarations may not use the bottom sort")

    def _check_name_free(self, name: str) -> None:
        if self.hierarchy.has_sort(name):
            raise WellSortednessError(
                f"{name!r} is a sort name (its sort predicate is implicit)"
            )
        if name in self.predicates or name in self.functions:
            raise WellSortednessError(f"symbol {name!r} is already declared")

    def declare_predicate(self, name: str, arg_sorts: Iterable[str]) -> None:
        arg_sorts = tuple(arg_sorts)
        self._check_sorts(arg_sorts)
        self._check_name_free(name)
        self.predicates[name] = arg_sorts

    def declare_function(self, name: str, arg_sorts: Iterable[str], result: str) -> None:
        arg_sorts = tuple(arg_sorts)
        self._check_sorts(arg_sorts)
        self._check_sorts((result,))
        self._check_name_free(name)
        self.functions[name] = FunctionDecl(arg_sorts, result)

    # -- lookups --

    def is_sort_predicate(self, name: str) -> bool:
        return self.hierarchy.has_sort(name) and name not in (TOP, BOT)

    def predicate_sorts(self, name: str) -> tuple[str, ...] | None:
        if name in self.predicates:
            return self.predicates[name]
        if self.is_sort_predicate(name):
            return (TOP,)
        return None

    def function_decl(self, name: str) -> FunctionDecl | None:
        return self.functions.get(name)

    def is_module_constant(self, name: str) -> bool:
        return name in self._module_constants

    def non_logical_symbols(self) -> frozenset[str]:
        """Declared symbols, excluding the implicit sort-module vocabulary."""
        return frozenset(self.predicates) | frozenset(
            f for f in self.functions if f not in self._module_constants
        )

    def sort_of(self, t: Term) -> str:
        if isinstance(t, Var):
            return t.sort
        decl = self.functions.get(t.fn)
        if decl is None:
            raise WellSortednessError(f"undeclared function symbol {t.fn!r}")
        return decl.result

    def copy(self) -> "Signature":
        dup = Signature(self.hierarchy)
        dup.predicates = dict(self.predicates)
        dup.functions = dict(self.functions)
        dup._module_constants = set(self._module_constants)
        return dup

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; conflicting declarations are rejected."""
        if self.hierarchy != other.hierarchy:
            raise WellSortednessError("cannot merge signatures over different hierarchies")
        out = self.copy()
        for name, sorts in other.predicates.items():
            if name in out.predicates:
                if out.predicates[name] != sorts:
                    raise WellSortednessError(f"conflicting declarations for predicate {name!r}")
            else:
                out.predicates[name] = sorts
        for name, decl in other.functions.items():
            if name in out.functions:
                if out.functions[name] != decl:
                    raise WellSortednessError(f"conflicting declarations for function {name!r}")
            else:
                out.functions[name] = decl
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Signature)
            and self.hierarchy == other.hierarchy
            and self.predicates == other.predicates
            and self.functions == other.functions
        )


# -- well-sortedness checking ---------------------------------------------------


def check_term(t: Term, sig: Signature) -> str:
    """Validate a term and return its sort."""
    if isinstance(t, Var):
        if not sig.hierarchy.has_sort(t.sort):
            raise WellSortednessError(f"variable {t} has unknown sort {t.sort!r}")
        return t.sort
    decl = sig.function_decl(t.fn)
    if decl is None:
        raise WellSortednessError(f"undeclared function symbol {t.fn!r} in {t}")
    if len(t.args) != len(decl.arg_sorts):
        raise WellSortednessError(
            f"{t.fn!r} expects {len(decl.arg_sorts)} arguments, got {len(t.args)} in {t}"
        )
    for i, (arg, expected) in enumerate(zip(t.args, decl.arg_sorts), start=1):
        actual = check_term(arg, sig)
        if not sig.hierarchy.leq(actual, expected):
            raise WellSortednessError(
                f"argument {i} of {t}: sort {actual} is not a subsort of {expected}"
            )
    return decl.result


def check_atom(pred: str, args: tuple[Term, ...], sig: Signature) -> None:
    expected = sig.predicate_sorts(pred)
    if expected is None:
        raise WellSortednessError(f"undeclared predicate symbol {pred!r}")
    if len(args) != len(expected):
        raise WellSortednessError(
            f"{pred!r} expects {len(expected)} arguments, got {len(args)}"
        )
    for i, (arg, exp) in enumerate(zip(args, expected), start=1):
        actual = check_term(arg, sig)
        if not sig.hierarchy.leq(actual, exp):
            raise WellSortednessError(
                f"argument {i} of {pred}({', '.join(map(str, args))}): "
                f"sort {actual} is not a subsort of {exp}"
            )


def check_literal(lit: Literal, sig: Signature) -> None:
    check_atom(lit.pred, lit.args, sig)


def check_clause(c: Clause, sig: Signature) -> None:
    for lit in c.ordered():
        check_literal(lit, sig)


def check_formula(f: Formula, sig: Signature) -> None:
    if isinstance(f, Atom):
        check_atom(f.pred, f.args, sig)
    elif isinstance(f, Not):
        check_formula(f.body, sig)
    elif isinstance(f, (And, Or, Implies)):
        check_formula(f.left, sig)
        check_formula(f.right, sig)
    else:
        if not sig.hierarchy.has_sort(f.var.sort):
            raise WellSortednessError(f"quantified variable {f.var} has unknown sort")
        if f.var.sort == BOT:
            raise WellSortednessError(f"quantified variable {f.var} ranges over the empty sort")
        check_formula(f.body, sig)


def check_well_sorted(item, sig: Signature) -> None:
    """Dispatching validity check for terms, literals, clauses, and formulas."""
    if isinstance(item, (Var, App)):
        check_term(item, sig)
    elif isinstance(item, Literal):
        check_literal(item, sig)
    elif isinstance(item, Clause):
        check_clause(item, sig)
    else:
        check_formula(item, sig)


# -- substitutions ---------------------------------------------------------------


class Substitution(Mapping):
    """Finite map from variables to terms; identity bindings are dropped.

    Well-sorted substitutions additionally satisfy sort descent ([t] below
    [x] for every binding x/t) and the idempotent form (no bound variable
    occurs in any right-hand side); see `is_well_sorted`.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()):
        self._bindings = {v: t for v, t in dict(bindings).items() if t != v}

    def __getitem__(self, v: Var) -> Term:
        return self._bindings[v]

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def is_well_sorted(self, sig: Signature) -> bool:
        for v, t in self._bindings.items():
            if not sig.hierarchy.leq(sig.sort_of(t), v.sort):
                return False
        rhs_vars = set()
        for t in self._bindings.values():
            rhs_vars.update(term_variables(t))
        return not (rhs_vars & set(self._bindings))

    def __str__(self) -> str:
        if not self._bindings:
            return "{}"
        items = sorted(self._bindings.items(), key=lambda kv: str(kv[0]))
        return "{" + ", ".join(f"{v}/{t}" for v, t in items) + "}"

    __repr__ = __str__


EMPTY_SUBSTITUTION = Substitution()


def apply_substitution(sub: Mapping, target):
    """Homomorphic application of a substitution to any syntactic value."""
    if isinstance(target, Var):
        return sub.get(target, target)
    if isinstance(target, App):
        return App(target.fn, tuple(apply_substitution(sub, a) for a in target.args))
    if isinstance(target, Literal):
        return Literal(
            target.positive, target.pred, tuple(apply_substitution(sub, a) for a in target.args)
        )
    if isinstance(target, Clause):
        return Clause(frozenset(apply_substitution(sub, l) for l in target.literals))
    if isinstance(target, Atom):
        return Atom(target.pred, tuple(apply_substitution(sub, a) for a in target.args))
    if isinstance(target, Not):
        return Not(apply_substitution(sub, target.body))
    if isinstance(target, (And, Or, Implies)):
        return type(target)(
            apply_substitution(sub, target.left), apply_substitution(sub, target.right)
        )
    if isinstance(target, (ForAll, Exists)):
        inner = {v: t for v, t in sub.items() if v != target.var}
        return type(target)(target.var, apply_substitution(inner, target.body))
    raise TypeError(f"cannot apply a substitution to {type(target).__name__}")


# -- fresh names and renaming ------------------------------------------------------


class FreshNames:
    """Session-scoped source of fresh symbols and variables.

    Counters are monotone per prefix and never reuse a reserved name, so
    Skolem symbols and renamed variables are fresh for the whole session.
    """

    def __init__(self, reserved: Iterable[str] = ()):
        self._used: set[str] = set(reserved)
        self._counters: dict[str, int] = {}

    def reserve(self, names: Iterable[str]) -> None:
        self._used.update(names)

    def symbol(self, prefix: str = "SK") -> str:
        k = self._counters.get(prefix, 0)
        while True:
            k += 1
            name = f"{prefix}{k}"
            if name not in self._used:
                break
        self._counters[prefix] = k
        self._used.add(name)
        return name

    def variable(self, sort: str, base: str | None = None) -> Var:
        if base is None:
            base = "".join(ch for ch in sort.lower() if ch.isalnum()) or "v"
        return Var(self.symbol(base), sort)


def variable_base_name(sort: str) -> str:
    return "".join(ch for ch in sort.lower() if ch.isalnum()) or "v"


def standardize_apart(c1: Clause, c2: Clause) -> tuple[Clause, Clause]:
    """Rename c2's variables away from c1's; sorts are preserved."""
    taken = {v.name for v in c1.variables()} | {v.name for v in c2.variables()}
    renaming: dict[Var, Term] = {}
    for v in c2.variables():
        if any(v.name == w.name for w in c1.variables()):
            name = v.name
            while name in taken:
                name += "'"
            taken.add(name)
            renaming[v] = Var(name, v.sort)
    if not renaming:
        return c1, c2
    return c1, apply_substitution(renaming, c2)


def normalize_clause(c: Clause) -> Clause:
    """Canonical variant: variables renamed by first occurrence, sort-based names.

    Best-effort canonicalization used for pretty printing and cheap duplicate
    detection; full equality up to renaming is decided by `variant_clauses`.
    """
    renaming: dict[Var, Term] = {}
    counters: dict[str, int] = {}
    for v in c.variables():
        base = variable_base_name(v.sort)
        counters[base] = counters.get(base, 0) + 1
        renaming[v] = Var(f"{base}{counters[base]}", v.sort)
    return apply_substitution(renaming, c)


# -- equality up to renaming -------------------------------------------------------


def _match_terms_bijective(t1: Term, t2: Term, fwd: dict, bwd: dict) -> bool:
    if isinstance(t1, Var) and isinstance(t2, Var):
        if t1.sort != t2.sort:
            return False
        if t1 in fwd:
            return fwd[t1] == t2
        if t2 in bwd:
            return False
        fwd[t1] = t2
        bwd[t2] = t1
        return True
    if isinstance(t1, App) and isinstance(t2, App):
        if t1.fn != t2.fn or len(t1.args) != len(t2.args):
            return False
        return all(
            _match_terms_bijective(a, b, fwd, bwd) for a, b in zip(t1.args, t2.args)
        )
    return False


def variant_clauses(c1: Clause, c2: Clause) -> bool:
    """True iff some sort-preserving variable bijection maps c1 onto c2."""
    if len(c1.literals) != len(c2.literals):
        return False

    lits1 = c1.ordered()
    lits2 = list(c2.literals)

    def backtrack(i: int, used: set[int], fwd: dict, bwd: dict) -> bool:
        if i == len(lits1):
            return True
        l1 = lits1[i]
        for j, l2 in enumerate(lits2):
            if j in used or l1.positive != l2.positive or l1.pred != l2.pred:
                continue
            if len(l1.args) != len(l2.args):
                continue
            fwd2, bwd2 = dict(fwd), dict(bwd)
            if all(
                _match_terms_bijective(a, b, fwd2, bwd2)
                for a, b in zip(l1.args, l2.args)
            ):
                if backtrack(i + 1, used | {j}, fwd2, bwd2):
                    return True
        return False

    return backtrack(0, set(), {}, {})


def alpha_equal(f1: Formula, f2: Formula, env1=None, env2=None) -> bool:
    """Structural equality of formulas up to renaming of bound variables."""
    env1 = env1 or {}
    env2 = env2 or {}
    if type(f1) is not type(f2):
        return False
    if isinstance(f1, Atom):
        if f1.pred != f2.pred or len(f1.args) != len(f2.args):
            return False

        def terms_equal(t1: Term, t2: Term) -> bool:
            if isinstance(t1, Var) and isinstance(t2, Var):
                if t1.sort != t2.sort:
                    return False
                return env1.get(t1, t1.name) == env2.get(t2, t2.name)
            if isinstance(t1, App) and isinstance(t2, App):
                return (
                    t1.fn == t2.fn
                    and len(t1.args) == len(t2.args)
                    and all(terms_equal(a, b) for a, b in zip(t1.args, t2.args))
                )
            return False

        return all(terms_equal(a, b) for a, b in zip(f1.args, f2.args))
    if isinstance(f1, Not):
        return alpha_equal(f1.body, f2.body, env1, env2)
    if isinstance(f1, (And, Or, Implies)):
        return alpha_equal(f1.left, f2.left, env1, env2) and alpha_equal(
            f1.right, f2.right, env1, env2
        )
    if f1.var.sort != f2.var.sort:
        return False
    marker = object()
    return alpha_equal(
        f1.body, f2.body, {**env1, f1.var: marker}, {**env2, f2.var: marker}
    )
