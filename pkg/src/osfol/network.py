"""Agent networks: signature-labeled report graphs and their validation.

An agent network is a DAG of agents where an edge (u, v) means u reports to
v. The report procedure is refutation-complete only on signature trees:
every non-decider has exactly one outgoing edge, one decider is reachable
from everywhere, shared symbols pass through parents on the way to the
decider (the peak condition), and every edge has a nonempty common
predicate vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .language import Clause, Signature
from .sorts import BOT, TOP


@dataclass
class Agent:
    """One agent: a signature label and a knowledge base inside its language."""

    agent_id: str
    signature: Signature
    kb: list[Clause] = field(default_factory=list)


@dataclass
class AgentNetwork:
    agents: dict[str, Agent]
    edges: list[tuple[str, str]]
    decider: str

    def successors(self, agent_id: str) -> list[str]:
        return [v for u, v in self.edges if u == agent_id]

    def predecessors(self, agent_id: str) -> list[str]:
        return [u for u, v in self.edges if v == agent_id]

    def subtree(self, agent_id: str) -> set[str]:
        """The agent together with everything that (transitively) reports to it."""
        seen = {agent_id}
        frontier = [agent_id]
        while frontier:
            node = frontier.pop()
            for pred in self.predecessors(node):
                if pred not in seen:
                    seen.add(pred)
                    frontier.append(pred)
        return seen


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]
    warnings: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            suffix = f" ({c.detail})" if c.detail else ""
            lines.append(f"check {c.name}: {status}{suffix}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        lines.append(f"certified: {'yes' if self.certified else 'no'}")
        return "\n".join(lines)


def common_language(u: Agent, v: Agent) -> frozenset[str]:
    """Symbols both agents may use on their channel.

    The intersection of the declared non-logical vocabularies, plus the
    global sort-module vocabulary (sort predicates and witness constants),
    which every agent shares and which never blocks a send.
    """
    shared = u.signature.non_logical_symbols() & v.signature.non_logical_symbols()
    hierarchy = u.signature.hierarchy
    sort_preds = frozenset(s for s in hierarchy.sorts if s not in (TOP, BOT))
    witnesses = frozenset(
        c for consts in hierarchy.witnesses.values() for c in consts
    )
    return shared | sort_preds | witnesses


def common_predicates(u: Agent, v: Agent) -> frozenset[str]:
    """Declared predicates both agents know (sort predicates excluded)."""
    return frozenset(u.signature.predicates) & frozenset(v.signature.predicates)


def combined_kb(net: AgentNetwork) -> list[Clause]:
    """Union of all agents' knowledge bases, in stable agent order."""
    out: list[Clause] = []
    seen: set[frozenset] = set()
    for agent in net.agents.values():
        for c in agent.kb:
            if c.literals not in seen:
                seen.add(c.literals)
                out.append(c)
    return out


def combined_signature(net: AgentNetwork) -> Signature:
    sig = None
    for agent in net.agents.values():
        sig = agent.signature.copy() if sig is None else sig.merge(agent.signature)
    if sig is None:
        raise ValueError("network has no agents")
    return sig


def _topological_order(net: AgentNetwork) -> list[str] | None:
    indegree = {a: 0 for a in net.agents}
    for _, v in net.edges:
        indegree[v] += 1
    ready = sorted(a for a, d in indegree.items() if d == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for u, v in net.edges:
            if u == node:
                indegree[v] -= 1
                if indegree[v] == 0:
                    ready.append(v)
        ready.sort()
    return order if len(order) == len(net.agents) else None


def distance_to_decider(net: AgentNetwork) -> dict[str, int]:
    """Report distance of every agent; the decider is at distance zero.

    On trees this is the unique path length; on other pointed DAGs the
    longest path is used so that every edge decreases the distance.
    """
    order = _topological_order(net)
    if order is None:
        raise ValueError("network has a cycle")
    dist = {net.decider: 0}
    for node in reversed(order):
        if node == net.decider:
            continue
        next_hops = [dist[v] for v in net.successors(node) if v in dist]
        if next_hops:
            dist[node] = 1 + max(next_hops)
    missing = set(net.agents) - set(dist)
    if missing:
        raise ValueError(f"agents cannot reach the decider: {sorted(missing)}")
    return dist


def _peak_condition_failures(net: AgentNetwork) -> list[str]:
    """Per-symbol pass-through condition used by the completeness argument.

    If a non-decider u shares a symbol with any agent outside u's subtree,
    the symbol must also belong to u's parent; otherwise information about
    it could not travel through the tree.
    """
    failures = []
    for u, v in net.edges:
        inside = net.subtree(u)
        outside = [a for a in net.agents if a not in inside]
        u_syms = net.agents[u].signature.non_logical_symbols()
        v_syms = net.agents[v].signature.non_logical_symbols()
        for s in sorted(u_syms - v_syms):
            carriers = [
                w for w in outside
                if s in net.agents[w].signature.non_logical_symbols()
            ]
            if carriers:
                failures.append(
                    f"symbol {s!r} shared by {u!r} and {carriers[0]!r} "
                    f"but missing from parent {v!r}"
                )
    return failures


def _exhaustive_peak_failures(net: AgentNetwork) -> list[str]:
    """Brute-force peak property over every subset of non-logical symbols."""
    symbols = sorted(
        {s for a in net.agents.values() for s in a.signature.non_logical_symbols()}
    )
    failures = []
    for size in range(1, len(symbols) + 1):
        for omega in combinations(symbols, size):
            carrier = [
                a
                for a in net.agents
                if set(omega) <= net.agents[a].signature.non_logical_symbols()
            ]
            if not carrier:
                continue
            sub_edges = [(u, v) for u, v in net.edges if u in carrier and v in carrier]

            def reaches(x: str, y: str) -> bool:
                seen, frontier = {x}, [x]
                while frontier:
                    n = frontier.pop()
                    if n == y:
                        return True
                    for a, b in sub_edges:
                        if a == n and b not in seen:
                            seen.add(b)
                            frontier.append(b)
                return x == y

            if not any(all(reaches(x, d) for x in carrier) for d in carrier):
                failures.append(f"symbols {set(omega)} induce a subgraph with no decider")
    return failures


def validate_tree(net: AgentNetwork, *, exhaustive_peak: bool = False) -> ValidationReport:
    """Check the signature-tree conditions and report each one separately."""
    checks: list[CheckResult] = []
    warnings: list[str] = []

    order = _topological_order(net)
    checks.append(CheckResult("acyclic", order is not None))

    if net.decider not in net.agents:
        checks.append(CheckResult("decider", False, f"unknown agent {net.decider!r}"))
        return ValidationReport(tuple(checks), tuple(warnings))
    if order is not None:
        try:
            distance_to_decider(net)
            checks.append(CheckResult("decider", True))
        except ValueError as exc:
            checks.append(CheckResult("decider", False, str(exc)))
    else:
        checks.append(CheckResult("decider", False, "graph is cyclic"))

    bad_out = [
        a
        for a in net.agents
        if a != net.decider and len(net.successors(a)) != 1
    ]
    if net.successors(net.decider):
        bad_out.append(net.decider)
    checks.append(
        CheckResult(
            "tree-shape",
            not bad_out,
            "" if not bad_out else "wrong out-degree: " + ", ".join(sorted(bad_out)),
        )
    )

    peak_failures = _peak_condition_failures(net)
    if exhaustive_peak:
        symbols = {
            s for a in net.agents.values() for s in a.signature.non_logical_symbols()
        }
        if len(symbols) <= 12:
            peak_failures += _exhaustive_peak_failures(net)
        else:
            warnings.append("exhaustive peak check skipped: more than 12 symbols")
    checks.append(
        CheckResult(
            "peak-property",
            not peak_failures,
            peak_failures[0] if peak_failures else "",
        )
    )

    empty_edges = [
        (u, v)
        for u, v in net.edges
        if not common_predicates(net.agents[u], net.agents[v])
    ]
    checks.append(
        CheckResult(
            "edge-predicates",
            not empty_edges,
            "" if not empty_edges else "no common predicate on " + str(empty_edges[0]),
        )
    )

    if net.agents:
        hierarchy = next(iter(net.agents.values())).signature.hierarchy
        uninhabited = hierarchy.uninhabited_sorts()
        checks.append(
            CheckResult(
                "inhabitation",
                not uninhabited,
                "" if not uninhabited else "no witness for " + ", ".join(uninhabited),
            )
        )
        synthetic = sorted(
            s for s in hierarchy.sorts if s.startswith("GLB_")
        )
        if synthetic:
            warnings.append(
                "synthetic glb sorts exempt from inhabitation: " + ", ".join(synthetic)
            )

    return ValidationReport(tuple(checks), tuple(warnings))
