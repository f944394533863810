"""Shared test utilities: builders, brute-force oracles, random generators.

The oracles here are deliberately independent of the library's algorithms:
lower bounds by enumeration, subsumption by substitution enumeration,
most-generality by ground-unifier enumeration, and semantic checks by
finite-model evaluation of relativized formulas.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product

from osfol.language import (
    And,
    App,
    Atom,
    Clause,
    Exists,
    ForAll,
    Formula,
    FreshNames,
    Implies,
    Literal,
    Not,
    Or,
    Signature,
    Substitution,
    Term,
    Var,
    apply_substitution,
    term_variables,
    variant_clauses,
)
from osfol.network import Agent, AgentNetwork
from osfol.sorts import BOT, TOP, SortHierarchy, synthesize_glbs
from osfol.saturation import Limits, Proved, ResourceLimit, Saturated, saturate
from osfol.transform import clausify, relativize_formula, relativize_signature, unsorted_signature


def V(name: str, sort: str) -> Var:
    return Var(name, sort)


def fn(name: str, *args: Term) -> App:
    return App(name, tuple(args))


def lit(pred: str, *args: Term, positive: bool = True) -> Literal:
    return Literal(positive, pred, tuple(args))


def neg(pred: str, *args: Term) -> Literal:
    return Literal(False, pred, tuple(args))


def clause(*lits: Literal) -> Clause:
    return Clause(frozenset(lits))


# -- Figure 1 style setup -------------------------------------------------------------


def fig1_hierarchy() -> SortHierarchy:
    edges = [("W", "A"), ("F", "A"), ("B", "A"), ("C", "A"), ("S", "A"), ("G", "P")]
    witnesses = {s: {s.lower()} for s in ("W", "F", "B", "C", "S", "G")}
    return SortHierarchy(edges=edges, witnesses=witnesses)


def fig1_signature() -> Signature:
    sig = Signature(fig1_hierarchy())
    sig.declare_predicate("E", ("A", TOP))
    sig.declare_predicate("M", ("A", "A"))
    sig.declare_function("j", ("A", "A"), "G")
    sig.declare_function("h", ("C",), "P")
    sig.declare_function("i", ("S",), "P")
    return sig


# -- brute force oracles ---------------------------------------------------------------


def brute_glb(h: SortHierarchy, sorts) -> str | None:
    """Unique maximum of the common lower bounds, by direct enumeration."""
    lower = [t for t in h.sorts if all(h.leq(t, s) for s in sorts)]
    maxima = [t for t in lower if all(not (t != u and h.leq(t, u)) for u in lower)]
    return maxima[0] if len(maxima) == 1 else None


def ground_terms(sig: Signature, max_depth: int = 2) -> list[App]:
    """All ground terms of the signature up to a nesting depth."""
    layers: list[list[App]] = [
        [App(name) for name, decl in sorted(sig.functions.items()) if not decl.arg_sorts]
    ]
    for _ in range(max_depth - 1):
        pool = [t for layer in layers for t in layer]
        nxt = []
        for name, decl in sorted(sig.functions.items()):
            if not decl.arg_sorts:
                continue
            options = []
            for s in decl.arg_sorts:
                fits = [t for t in pool if sig.hierarchy.leq(sig.sort_of(t), s)]
                options.append(fits)
            for combo in product(*options):
                t = App(name, combo)
                if t not in pool and t not in nxt:
                    nxt.append(t)
        if not nxt:
            break
        layers.append(nxt)
    return [t for layer in layers for t in layer]


def all_sort_descending_substitutions(variables, candidates, sig):
    """Every substitution mapping the variables into the candidate terms."""
    variables = list(dict.fromkeys(variables))
    pools = []
    for v in variables:
        pool = [t for t in candidates if sig.hierarchy.leq(sig.sort_of(t), v.sort)]
        pools.append(pool)
    for combo in product(*pools):
        yield Substitution(dict(zip(variables, combo)))


def brute_subsumes(c1: Clause, c2: Clause, sig: Signature) -> bool:
    """Subsumption by enumerating substitutions into the target's subterms."""
    if c1.is_empty:
        return True
    from osfol.language import subterms

    targets: list[Term] = []
    for l in c2.ordered():
        for a in l.args:
            for t in subterms(a):
                if t not in targets:
                    targets.append(t)
    for sub in all_sort_descending_substitutions(c1.variables(), targets, sig):
        if set(apply_substitution(sub, c1).literals) <= set(c2.literals):
            return True
    return False


def brute_ground_unifiers(atoms, sig, max_depth=2):
    """All ground substitutions making the atoms syntactically identical."""
    variables: list[Var] = []
    for a in atoms:
        for t in a.args:
            term_variables(t, variables)
    terms = ground_terms(sig, max_depth)
    out = []
    for sub in all_sort_descending_substitutions(variables, terms, sig):
        images = {
            (a.pred, tuple(apply_substitution(sub, t) for t in a.args)) for a in atoms
        }
        if len(images) == 1:
            out.append(sub)
    return out


def matches_onto(general: Substitution, specific: Substitution, variables, sig) -> bool:
    """True iff some lambda satisfies specific = lambda after general (on the variables)."""
    binding: dict[Var, Term] = {}

    def match(pattern: Term, target: Term) -> bool:
        if isinstance(pattern, Var):
            if pattern in binding:
                return binding[pattern] == target
            if not sig.hierarchy.leq(sig.sort_of(target), pattern.sort):
                return False
            binding[pattern] = target
            return True
        if isinstance(target, App) and pattern.fn == target.fn:
            return all(match(p, t) for p, t in zip(pattern.args, target.args))
        return False

    for v in variables:
        if not match(apply_substitution(general, v), apply_substitution(specific, v)):
            return False
    return True


# -- finite models over the unsorted fragment -------------------------------------------


@dataclass
class Model:
    size: int
    consts: dict[str, int]
    funcs: dict[str, dict[tuple, int]]
    preds: dict[str, frozenset]

    def eval_term(self, t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        if not t.args:
            return self.consts[t.fn]
        return self.funcs[t.fn][tuple(self.eval_term(a, env) for a in t.args)]

    def eval(self, f: Formula, env: dict[str, int] | None = None) -> bool:
        env = env or {}
        if isinstance(f, Atom):
            return tuple(self.eval_term(a, env) for a in f.args) in self.preds[f.pred]
        if isinstance(f, Not):
            return not self.eval(f.body, env)
        if isinstance(f, And):
            return self.eval(f.left, env) and self.eval(f.right, env)
        if isinstance(f, Or):
            return self.eval(f.left, env) or self.eval(f.right, env)
        if isinstance(f, Implies):
            return (not self.eval(f.left, env)) or self.eval(f.right, env)
        if isinstance(f, ForAll):
            return all(self.eval(f.body, {**env, f.var.name: d}) for d in range(self.size))
        return any(self.eval(f.body, {**env, f.var.name: d}) for d in range(self.size))


def formula_vocabulary(formulas) -> tuple[dict[str, int], dict[str, int]]:
    """(predicate -> arity, function -> arity) over a formula collection."""
    from osfol.language import formula_atoms, subterms

    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    for f in formulas:
        for atom in formula_atoms(f):
            preds[atom.pred] = len(atom.args)
            for arg in atom.args:
                for t in subterms(arg):
                    if isinstance(t, App):
                        funcs[t.fn] = len(t.args)
    return preds, funcs


def enumerate_models(formulas, size: int, limit: int | None = None):
    """All models of the given size over the formulas' vocabulary."""
    preds, funcs = formula_vocabulary(formulas)
    domain = list(range(size))
    const_names = sorted(n for n, a in funcs.items() if a == 0)
    func_names = sorted((n, a) for n, a in funcs.items() if a > 0)
    pred_names = sorted(preds.items())

    const_choices = list(product(domain, repeat=len(const_names)))
    func_choices = []
    for name, arity in func_names:
        keys = list(product(domain, repeat=arity))
        func_choices.append([dict(zip(keys, vals)) for vals in product(domain, repeat=len(keys))])
    pred_choices = []
    for name, arity in pred_names:
        keys = list(product(domain, repeat=arity))
        subsets = []
        for mask in range(2 ** len(keys)):
            subsets.append(frozenset(k for i, k in enumerate(keys) if mask >> i & 1))
        pred_choices.append(subsets)

    count = 0
    for consts in const_choices:
        for funcs_combo in product(*func_choices) if func_choices else [()]:
            for preds_combo in product(*pred_choices) if pred_choices else [()]:
                yield Model(
                    size,
                    dict(zip(const_names, consts)),
                    {name: table for (name, _), table in zip(func_names, funcs_combo)},
                    {name: table for (name, _), table in zip(pred_names, preds_combo)},
                )
                count += 1
                if limit is not None and count >= limit:
                    return


def truth_equivalent(
    f1: Formula, f2: Formula, sig: Signature, size: int = 2, limit: int = 30000
) -> bool:
    """Compare two sorted sentences on finite models of their relativizations.

    Only models satisfying the relativized signature axioms count: sorted
    equivalence presumes the sort discipline (nonempty sorts, function
    ranges), which unrestricted unsorted models may violate.
    """
    r1, r2 = relativize_formula(f1), relativize_formula(f2)
    axioms = relativize_signature(sig)
    for model in enumerate_models([r1, r2, *axioms], size, limit):
        if not all(model.eval(a) for a in axioms):
            continue
        if model.eval(r1) != model.eval(r2):
            return False
    return True


# -- saturation verdicts -----------------------------------------------------------------


def verdict(clauses, sig, limits=Limits(max_clauses=3000, timeout_secs=10.0)) -> str:
    result, _ = saturate(clauses, sig, limits)
    if isinstance(result, Proved):
        return "proved"
    if isinstance(result, Saturated):
        return "saturated"
    return "limit"


def sorted_verdict(sentence: Formula, sig: Signature, limits=None) -> str:
    sig = sig.copy()
    fresh = FreshNames(sig.non_logical_symbols())
    clauses = clausify(sentence, sig, fresh)
    return verdict(clauses, sig, limits or Limits(max_clauses=3000, timeout_secs=10.0))


def relativized_verdict(sentence: Formula, sig: Signature, limits=None) -> str:
    flat = unsorted_signature(sig)
    fresh = FreshNames(flat.non_logical_symbols())
    formulas = [relativize_formula(sentence)] + relativize_signature(sig)
    clauses = []
    for f in formulas:
        clauses.extend(clausify(f, flat, fresh))
    return verdict(clauses, flat, limits or Limits(max_clauses=3000, timeout_secs=10.0))


# -- clause set comparison up to renaming --------------------------------------------------


def clause_sets_variant(set1, set2) -> bool:
    """Multiset equality of clauses up to per-clause variable renaming."""
    remaining = list(set2)
    for c1 in set1:
        for i, c2 in enumerate(remaining):
            if variant_clauses(c1, c2):
                del remaining[i]
                break
        else:
            return False
    return not remaining


def clause_sets_variant_modulo_symbols(set1, set2, renameable: set[str]) -> bool:
    """Like clause_sets_variant, but also tries bijections of the given symbols."""
    from itertools import permutations

    set1, set2 = list(set1), list(set2)
    if len(set1) != len(set2) or len(renameable) > 6:
        return False

    def rename_symbols(c: Clause, mapping: dict[str, str]) -> Clause:
        def walk(t: Term) -> Term:
            if isinstance(t, Var):
                return t
            return App(mapping.get(t.fn, t.fn), tuple(walk(a) for a in t.args))

        return Clause(
            frozenset(
                Literal(l.positive, mapping.get(l.pred, l.pred), tuple(walk(a) for a in l.args))
                for l in c.literals
            )
        )

    names = sorted(renameable)
    for perm in permutations(names):
        mapping = dict(zip(names, perm))
        if clause_sets_variant([rename_symbols(c, mapping) for c in set1], set2):
            return True
    return False


# -- random generators ----------------------------------------------------------------------


def random_hierarchy(rng: random.Random, n_sorts: int, synthesize: bool = True) -> SortHierarchy:
    names = [f"S{i}" for i in range(n_sorts)]
    edges = []
    for i, child in enumerate(names):
        for parent in names[:i]:
            if rng.random() < 0.35:
                edges.append((child, parent))
    witnesses = {name: {f"w_{name.lower()}"} for name in names}
    h = SortHierarchy(names, edges, witnesses)
    return synthesize_glbs(h) if synthesize else h


def declarable_sorts(hierarchy: SortHierarchy) -> list[str]:
    """User sorts that are safe in declarations (synthetic meets excluded)."""
    return sorted(
        s
        for s in hierarchy.sorts
        if s not in (TOP, BOT) and not s.startswith("GLB_")
    )


def random_signature(
    rng: random.Random,
    hierarchy: SortHierarchy,
    n_preds: int = 3,
    n_funcs: int = 1,
    n_consts: int = 2,
) -> Signature:
    sig = Signature(hierarchy)
    user_sorts = declarable_sorts(hierarchy)

    def pick_sort() -> str:
        return rng.choice(user_sorts + [TOP])

    for i in range(n_preds):
        arity = rng.randint(1, 2)
        sig.declare_predicate(f"P{i}", tuple(pick_sort() for _ in range(arity)))
    for i in range(n_funcs):
        result = rng.choice(user_sorts)
        sig.declare_function(f"f{i}", (pick_sort(),), result)
    for i in range(n_consts):
        sig.declare_function(f"c{i}", (), rng.choice(user_sorts))
    return sig


def random_term(
    rng: random.Random, sig: Signature, bound: str, depth: int, variables: list[Var]
) -> Term:
    """A term whose sort is below `bound`, drawing from variables and functions."""
    fits_var = [v for v in variables if sig.hierarchy.leq(v.sort, bound)]
    fits_fn = [
        (name, decl)
        for name, decl in sorted(sig.functions.items())
        if sig.hierarchy.leq(decl.result, bound) and (depth > 0 or not decl.arg_sorts)
    ]
    if fits_var and (rng.random() < 0.5 or not fits_fn):
        return rng.choice(fits_var)
    if not fits_fn:
        if fits_var:
            return rng.choice(fits_var)
        raise ValueError(f"no term available below sort {bound}")
    name, decl = rng.choice(fits_fn)
    return App(
        name,
        tuple(random_term(rng, sig, s, depth - 1, variables) for s in decl.arg_sorts),
    )


def random_atom(rng: random.Random, sig: Signature, variables: list[Var], depth: int = 1) -> Atom:
    user_sorts = declarable_sorts(sig.hierarchy)
    choices = sorted(sig.predicates.items()) + [(s, (TOP,)) for s in user_sorts]
    pred, arg_sorts = rng.choice(choices)
    return Atom(pred, tuple(random_term(rng, sig, s, depth, variables) for s in arg_sorts))


def random_sentence(rng: random.Random, sig: Signature, depth: int = 3) -> Formula:
    user_sorts = declarable_sorts(sig.hierarchy)

    def gen(d: int, scope: list[Var]) -> Formula:
        if d == 0:
            atom = random_atom(rng, sig, scope)
            return atom if rng.random() < 0.7 else Not(atom)
        roll = rng.random()
        if roll < 0.35:
            sort = rng.choice(user_sorts + [TOP])
            v = Var(f"q{len(scope)}", sort)
            body = gen(d - 1, scope + [v])
            return (ForAll if rng.random() < 0.5 else Exists)(v, body)
        if roll < 0.55:
            return And(gen(d - 1, scope), gen(d - 1, scope))
        if roll < 0.75:
            return Or(gen(d - 1, scope), gen(d - 1, scope))
        if roll < 0.85:
            return Implies(gen(d - 1, scope), gen(d - 1, scope))
        return Not(gen(d - 1, scope))

    f = gen(depth, [])
    from osfol.language import free_variables

    for v in sorted(free_variables(f), key=str):
        f = ForAll(v, f) if rng.random() < 0.5 else Exists(v, f)
    return f


def random_network(rng: random.Random) -> tuple[AgentNetwork, Formula]:
    """A certified signature tree with acceptable functions, plus a query."""
    n_agents = rng.randint(2, 6)
    ids = [f"a{i}" for i in range(n_agents)]
    decider = ids[0]
    parent = {ids[i]: ids[rng.randrange(i)] for i in range(1, n_agents)}
    edges = [(child, par) for child, par in parent.items()]

    n_sorts = rng.randint(1, 3)
    hierarchy = random_hierarchy(rng, n_sorts)
    user_sorts = declarable_sorts(hierarchy)

    children_of: dict[str, list[str]] = {a: [] for a in ids}
    for child, par in parent.items():
        children_of[par].append(child)

    def path_closed_carrier(peak: str) -> set[str]:
        carrier = {peak}
        frontier = [peak]
        while frontier:
            node = frontier.pop()
            for child in children_of[node]:
                if rng.random() < 0.6:
                    carrier.add(child)
                    frontier.append(child)
        return carrier

    n_preds = rng.randint(2, 4)
    pred_decl = {}
    pred_carrier = {}
    pred_decl["P0"] = tuple(rng.choice(user_sorts + [TOP]) for _ in range(rng.randint(1, 2)))
    pred_carrier["P0"] = set(ids)
    for k in range(1, n_preds):
        name = f"P{k}"
        pred_decl[name] = tuple(
            rng.choice(user_sorts + [TOP]) for _ in range(rng.randint(1, 2))
        )
        pred_carrier[name] = path_closed_carrier(rng.choice(ids))

    agents: dict[str, Agent] = {}
    for a in ids:
        sig = Signature(hierarchy)
        for name in sorted(pred_decl):
            if a in pred_carrier[name]:
                sig.declare_predicate(name, pred_decl[name])
        # Private vocabulary stays nullary so that every clause any agent can
        # derive keeps acceptable Skolem expressions (the completeness
        # theorem's standing assumption).
        if rng.random() < 0.5:
            sig.declare_function(f"k_{a}", (), rng.choice(user_sorts))
        if a == decider and rng.random() < 0.25:
            arg = rng.choice(user_sorts)
            sig.declare_function(f"g_{a}", (arg,), rng.choice(user_sorts))
        agents[a] = Agent(a, sig)

    for a in ids:
        sig = agents[a].signature
        preds = sorted(sig.predicates)
        n_clauses = rng.randint(1, 3)
        for _ in range(n_clauses):
            if rng.random() < 0.55:
                # ground fact over constants (module witnesses or private)
                pred = rng.choice(preds)
                try:
                    args = tuple(
                        random_term(rng, sig, s, 1, []) for s in sig.predicates[pred]
                    )
                except ValueError:
                    continue
                agents[a].kb.append(clause(lit(pred, *args)))
            else:
                # one- or two-literal rule over shared variables
                pred1 = rng.choice(preds)
                pred2 = rng.choice(preds)
                vs = [Var(f"x{i}", rng.choice(user_sorts)) for i in range(2)]
                try:
                    args1 = tuple(
                        random_term(rng, sig, s, 0, vs) for s in sig.predicates[pred1]
                    )
                    args2 = tuple(
                        random_term(rng, sig, s, 0, vs) for s in sig.predicates[pred2]
                    )
                except ValueError:
                    continue
                agents[a].kb.append(
                    clause(
                        Literal(False, pred1, args1),
                        Literal(rng.random() < 0.8, pred2, args2),
                    )
                )

    net = AgentNetwork(agents, edges, decider)

    decider_sig = agents[decider].signature
    pred = rng.choice(sorted(decider_sig.predicates))
    try:
        args = tuple(random_term(rng, decider_sig, s, 1, []) for s in decider_sig.predicates[pred])
        query: Formula = Atom(pred, args)
    except ValueError:
        sort = rng.choice(user_sorts)
        v = Var("q0", sort)
        query = Exists(v, Atom(pred, tuple(v for _ in decider_sig.predicates[pred])))
    return net, query
