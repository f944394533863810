"""Text formats: problem files, clauses, formulas, with positioned diagnostics.

A problem file is line oriented. Bracketed headers open sections: `[sorts]`
holds the sort module (`sort W < A`, `witness w : W`), `[agent ID]` holds
one agent's role (`decider` or `reports-to ID`), declarations
(`pred E : (A, TOP)`, `func h : (C) -> P`, `const b2 : B`) and clauses
(`clause Lit | Lit | ...`), and `[query]` holds one closed formula.
Variables are written `name:Sort` at every occurrence; negation is `~`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .language import (
    And,
    App,
    Atom,
    Clause,
    Exists,
    ForAll,
    Formula,
    Implies,
    Literal,
    Not,
    Or,
    Signature,
    Term,
    Var,
    WellSortednessError,
    check_clause,
    check_formula,
    format_formula,
    free_variables,
)
from .network import Agent, AgentNetwork
from .sorts import BOT, SYNTH_PREFIX, TOP, SortHierarchy, SortModuleError, load_sort_module, synthesize_glbs


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN = re.compile(
    r"\s*(->|[A-Za-z_][A-Za-z0-9_']*|[(),.:~&|<]|\S)"
)


class _Tokens:
    """Token stream over one line, tracking columns for diagnostics."""

    def __init__(self, text: str, line: int, start_column: int = 1):
        self.line = line
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                break
            token = m.group(1)
            self.tokens.append((token, start_column + m.start(1)))
            pos = m.end()
        self.index = 0

    def peek(self) -> str | None:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    @property
    def column(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        if self.tokens:
            return self.tokens[-1][1] + len(self.tokens[-1][0])
        return 1

    def next(self, expected: str | None = None) -> str:
        token = self.peek()
        if token is None:
            raise ParseError(
                f"unexpected end of line (expected {expected or 'more input'})",
                self.line,
                self.column,
            )
        if expected is not None and token != expected:
            raise ParseError(f"expected {expected!r}, found {token!r}", self.line, self.column)
        self.index += 1
        return token

    def ident(self, what: str = "identifier") -> str:
        token = self.peek()
        if token is None or not _IDENT.fullmatch(token):
            raise ParseError(f"expected {what}, found {token!r}", self.line, self.column)
        self.index += 1
        return token

    def done(self) -> None:
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()!r}", self.line, self.column)


# -- terms, literals, formulas ------------------------------------------------------


def _parse_term(ts: _Tokens) -> Term:
    name = ts.ident("term")
    if ts.peek() == ":":
        ts.next(":")
        sort = ts.ident("sort name")
        return Var(name, sort)
    if ts.peek() == "(":
        ts.next("(")
        args = [_parse_term(ts)]
        while ts.peek() == ",":
            ts.next(",")
            args.append(_parse_term(ts))
        ts.next(")")
        return App(name, tuple(args))
    return App(name, ())


def _parse_atom(ts: _Tokens) -> Atom:
    name = ts.ident("predicate")
    args: tuple[Term, ...] = ()
    if ts.peek() == "(":
        ts.next("(")
        parsed = [_parse_term(ts)]
        while ts.peek() == ",":
            ts.next(",")
            parsed.append(_parse_term(ts))
        ts.next(")")
        args = tuple(parsed)
    return Atom(name, args)


def _parse_literal(ts: _Tokens) -> Literal:
    positive = True
    if ts.peek() == "~":
        ts.next("~")
        positive = False
    atom = _parse_atom(ts)
    return Literal(positive, atom.pred, atom.args)


def _parse_formula(ts: _Tokens) -> Formula:
    return _parse_implies(ts)


def _parse_implies(ts: _Tokens) -> Formula:
    left = _parse_or(ts)
    if ts.peek() == "->":
        ts.next("->")
        return Implies(left, _parse_implies(ts))
    return left


def _parse_or(ts: _Tokens) -> Formula:
    out = _parse_and(ts)
    while ts.peek() == "|":
        ts.next("|")
        out = Or(out, _parse_and(ts))
    return out


def _parse_and(ts: _Tokens) -> Formula:
    out = _parse_unary(ts)
    while ts.peek() == "&":
        ts.next("&")
        out = And(out, _parse_unary(ts))
    return out


def _parse_unary(ts: _Tokens) -> Formula:
    token = ts.peek()
    if token == "~":
        ts.next("~")
        return Not(_parse_unary(ts))
    if token == "(":
        ts.next("(")
        inner = _parse_formula(ts)
        ts.next(")")
        return inner
    if token in ("forall", "exists"):
        ts.next()
        name = ts.ident("variable")
        ts.next(":")
        sort = ts.ident("sort name")
        ts.next(".")
        body = _parse_formula(ts)
        return (ForAll if token == "forall" else Exists)(Var(name, sort), body)
    return _parse_atom(ts)


def parse_literals(text: str, line: int = 1, column: int = 1) -> tuple[Literal, ...]:
    """Parse `Lit | Lit | ...` keeping the written literal order."""
    ts = _Tokens(text, line, column)
    literals = [_parse_literal(ts)]
    while ts.peek() == "|":
        ts.next("|")
        literals.append(_parse_literal(ts))
    ts.done()
    return tuple(literals)


def parse_clause(text: str, sig: Signature | None = None) -> Clause:
    clause = Clause(frozenset(parse_literals(text)))
    if sig is not None:
        check_clause(clause, sig)
    return clause


def parse_formula(text: str, sig: Signature | None = None) -> Formula:
    ts = _Tokens(text, 1)
    formula = _parse_formula(ts)
    ts.done()
    if sig is not None:
        check_formula(formula, sig)
    return formula


# -- problem files -------------------------------------------------------------------


@dataclass
class AgentSection:
    agent_id: str
    reports_to: str | None = None
    is_decider: bool = False
    predicates: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)
    functions: list[tuple[str, tuple[str, ...], str]] = field(default_factory=list)
    clauses: list[Clause] = field(default_factory=list)


@dataclass
class ProblemFile:
    hierarchy: SortHierarchy
    network: AgentNetwork
    query: Formula | None
    sort_lines: list[str]
    agent_sections: list[AgentSection]


def _split_sections(text: str) -> list[tuple[str, int, list[tuple[int, str]]]]:
    sections: list[tuple[str, int, list[tuple[int, str]]]] = []
    current: list[tuple[int, str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError("unterminated section header", lineno)
            header = line[1:-1].strip()
            current = []
            sections.append((header, lineno, current))
        else:
            if current is None:
                raise ParseError("content before the first section header", lineno)
            current.append((lineno, line))
    return sections


def parse_problem(text: str, *, synthesize_glbs_flag: bool = False) -> ProblemFile:
    """Parse and validate a whole problem file.

    Builds the sort hierarchy first, then each agent's signature and
    clauses (fully sort-checked), then the network, then the query under the
    decider's signature. Errors carry the offending line.
    """
    sections = _split_sections(text)
    sort_decls: list[tuple[int, str]] = []
    agent_headers: list[tuple[str, int, list[tuple[int, str]]]] = []
    query_lines: list[tuple[int, str]] = []
    for header, lineno, lines in sections:
        if header == "sorts":
            sort_decls.extend(lines)
        elif header.startswith("agent"):
            agent_headers.append((header, lineno, lines))
        elif header == "query":
            query_lines.extend(lines)
        else:
            raise ParseError(f"unknown section [{header}]", lineno)

    # Sort module: assemble the definite clauses the loader expects.
    module_clauses: list[Clause] = []
    sort_lines: list[str] = []
    for lineno, line in sort_decls:
        ts = _Tokens(line, lineno)
        keyword = ts.ident("declaration keyword")
        if keyword == "sort":
            child = ts.ident("sort name")
            parent = TOP
            if ts.peek() == "<":
                ts.next("<")
                parent = ts.ident("sort name")
            ts.done()
            for name in (child, parent):
                if name.startswith(SYNTH_PREFIX):
                    raise ParseError(
                        f"sort names may not start with {SYNTH_PREFIX!r}", lineno
                    )
            if child in (TOP, BOT):
                raise ParseError(f"cannot redeclare {child}", lineno)
            x = Var("x", TOP)
            module_clauses.append(
                Clause.of(Literal(False, child, (x,)), Literal(True, parent, (x,)))
            )
            sort_lines.append(f"sort {child} < {parent}" if parent != TOP else f"sort {child}")
        elif keyword == "witness":
            const_name = ts.ident("constant name")
            ts.next(":")
            sort = ts.ident("sort name")
            ts.done()
            module_clauses.append(Clause.of(Literal(True, sort, (App(const_name),))))
            sort_lines.append(f"witness {const_name} : {sort}")
        else:
            raise ParseError(f"unknown sort declaration {keyword!r}", lineno)
    try:
        hierarchy = load_sort_module(module_clauses, synthesize=synthesize_glbs_flag)
    except SortModuleError as exc:
        raise ParseError(str(exc), sort_decls[0][0] if sort_decls else 1) from exc

    # Agents.
    agent_sections: list[AgentSection] = []
    agents: dict[str, Agent] = {}
    edges: list[tuple[str, str]] = []
    decider: str | None = None
    pending_clauses: list[tuple[str, int, str]] = []
    for header, header_line, lines in agent_headers:
        parts = header.split()
        if len(parts) != 2:
            raise ParseError("agent header must be [agent ID]", header_line)
        agent_id = parts[1]
        if agent_id in agents:
            raise ParseError(f"duplicate agent {agent_id!r}", header_line)
        section = AgentSection(agent_id)
        sig = Signature(hierarchy)
        for lineno, line in lines:
            ts = _Tokens(line, lineno)
            keyword = ts.ident("declaration keyword")
            try:
                if keyword == "decider":
                    ts.done()
                    section.is_decider = True
                elif keyword == "reports":
                    ts.next("-")
                    if ts.ident("'to'") != "to":
                        raise ParseError("use `reports-to ID`", lineno)
                    section.reports_to = ts.ident("agent id")
                    ts.done()
                elif keyword == "pred":
                    name = ts.ident("predicate name")
                    ts.next(":")
                    ts.next("(")
                    sorts: list[str] = []
                    if ts.peek() != ")":
                        sorts.append(ts.ident("sort name"))
                        while ts.peek() == ",":
                            ts.next(",")
                            sorts.append(ts.ident("sort name"))
                    ts.next(")")
                    ts.done()
                    sig.declare_predicate(name, tuple(sorts))
                    section.predicates.append((name, tuple(sorts)))
                elif keyword == "func":
                    name = ts.ident("function name")
                    ts.next(":")
                    ts.next("(")
                    sorts = []
                    if ts.peek() != ")":
                        sorts.append(ts.ident("sort name"))
                        while ts.peek() == ",":
                            ts.next(",")
                            sorts.append(ts.ident("sort name"))
                    ts.next(")")
                    ts.next("->")
                    result = ts.ident("sort name")
                    ts.done()
                    sig.declare_function(name, tuple(sorts), result)
                    section.functions.append((name, tuple(sorts), result))
                elif keyword == "const":
                    name = ts.ident("constant name")
                    ts.next(":")
                    sort = ts.ident("sort name")
                    ts.done()
                    sig.declare_function(name, (), sort)
                    section.functions.append((name, (), sort))
                elif keyword == "clause":
                    parts_ = line.split(None, 1)
                    rest = parts_[1] if len(parts_) > 1 else ""
                    pending_clauses.append((agent_id, lineno, rest))
                    ts.index = len(ts.tokens)  # consumed as raw text
                else:
                    raise ParseError(f"unknown declaration {keyword!r}", lineno)
            except WellSortednessError as exc:
                raise ParseError(str(exc), lineno) from exc
        if section.is_decider:
            if decider is not None:
                raise ParseError(f"two deciders: {decider!r} and {agent_id!r}", header_line)
            decider = agent_id
        if section.reports_to is not None:
            edges.append((agent_id, section.reports_to))
        agents[agent_id] = Agent(agent_id, sig, [])
        agent_sections.append(section)

    if decider is None:
        raise ParseError("no agent is marked `decider`", 1)
    for u, v in edges:
        if v not in agents:
            raise ParseError(f"agent {u!r} reports to unknown agent {v!r}", 1)

    # Clauses are parsed after all declarations of their agent exist.
    for agent_id, lineno, rest in pending_clauses:
        if not rest:
            raise ParseError("empty clause line", lineno)
        try:
            literals = parse_literals(rest, lineno)
            clause = Clause(frozenset(literals))
            check_clause(clause, agents[agent_id].signature)
        except WellSortednessError as exc:
            raise ParseError(str(exc), lineno) from exc
        agents[agent_id].kb.append(clause)
        for section in agent_sections:
            if section.agent_id == agent_id:
                section.clauses.append(clause)

    network = AgentNetwork(agents, edges, decider)

    query: Formula | None = None
    if query_lines:
        if len(query_lines) > 1:
            raise ParseError("the query section must hold a single formula line", query_lines[1][0])
        lineno, line = query_lines[0]
        ts = _Tokens(line, lineno)
        query = _parse_formula(ts)
        ts.done()
        try:
            check_formula(query, agents[decider].signature)
        except WellSortednessError as exc:
            raise ParseError(str(exc), lineno) from exc
        if free_variables(query):
            raise ParseError("query must be a closed formula", lineno)

    return ProblemFile(hierarchy, network, query, sort_lines, agent_sections)


def print_problem(problem: ProblemFile) -> str:
    """Canonical text for a problem; parse(print(p)) reproduces p."""
    lines: list[str] = ["[sorts]"]
    hierarchy = problem.hierarchy
    for child, parent in sorted(hierarchy.edges):
        if parent == TOP:
            lines.append(f"sort {child}")
        else:
            lines.append(f"sort {child} < {parent}")
    mentioned = {c for c, _ in hierarchy.edges} | {p for _, p in hierarchy.edges}
    for s in sorted(hierarchy.sorts - mentioned - {TOP, BOT}):
        lines.append(f"sort {s}")
    for sort in sorted(hierarchy.witnesses):
        for const_name in sorted(hierarchy.witnesses[sort]):
            lines.append(f"witness {const_name} : {sort}")
    for section in problem.agent_sections:
        lines.append("")
        lines.append(f"[agent {section.agent_id}]")
        if section.is_decider:
            lines.append("decider")
        if section.reports_to:
            lines.append(f"reports-to {section.reports_to}")
        for name, sorts in section.predicates:
            lines.append(f"pred {name} : ({', '.join(sorts)})")
        for name, sorts, result in section.functions:
            if sorts:
                lines.append(f"func {name} : ({', '.join(sorts)}) -> {result}")
            else:
                lines.append(f"const {name} : {result}")
        for clause in section.clauses:
            lines.append(f"clause {clause}")
    if problem.query is not None:
        lines.append("")
        lines.append("[query]")
        lines.append(format_formula(problem.query))
    return "\n".join(lines) + "\n"
