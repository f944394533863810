"""The distributed report procedure: language-filtered send, receive, report.

Sending from u to v forwards the clauses of u's working set whose predicates
are common to both agents. Clauses mentioning private function or constant
symbols are first un-Skolemized over exactly those symbols; the resulting
quantified formulas travel grouped by partition so the receiver can restore
shared witnesses. Receiving Skolemizes each group with symbols fresh at the
receiver, which also records them in its signature. The report procedure
runs agents in decreasing distance from the decider, each saturating its
working set and sending once to its successor; the decider saturates last
and decides.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .language import (
    Clause,
    Formula,
    FreshNames,
    Not,
    Signature,
    WellSortednessError,
    check_formula,
    format_formula,
    formula_symbols,
    free_variables,
)
from .network import (
    Agent,
    AgentNetwork,
    ValidationReport,
    common_language,
    common_predicates,
    distance_to_decider,
    validate_tree,
)
from .saturation import (
    ClauseDB,
    Limits,
    Proved,
    ProofResult,
    ResourceLimit,
    Saturated,
    saturate,
)
from .sorts import BOT, TOP
from .transform import (
    SkolemTable,
    UnskolemizedGroup,
    UnskolemizeFailure,
    clausify,
    skolemize_group,
    unskolemize,
)


class SendError(Exception):
    """A clause eligible for sending could not be put into the common language."""

    def __init__(self, sender: str, receiver: str, reason: str):
        super().__init__(f"send {sender} -> {receiver} failed: {reason}")
        self.sender = sender
        self.receiver = receiver
        self.reason = reason


class ReportInputError(Exception):
    """The query or network violates a precondition of the report procedure."""


@dataclass(frozen=True)
class Message:
    """One transmission: pass-through clauses plus un-Skolemized groups."""

    sender: str
    receiver: str
    clauses: tuple[Clause, ...]
    groups: tuple[UnskolemizedGroup, ...]

    @property
    def formulas(self) -> tuple[Formula, ...]:
        return tuple(f for g in self.groups for f in g.formulas)

    def payload_size(self) -> int:
        return len(self.clauses) + len(self.formulas)

    def format(self) -> str:
        parts = [str(c) for c in self.clauses]
        parts += [format_formula(f) for f in self.formulas]
        return (
            f"{self.sender} -> {self.receiver} [{self.payload_size()}] : "
            + " ; ".join(parts)
        )


@dataclass
class AgentState:
    """Session-scoped working state of one agent."""

    agent: Agent
    signature: Signature  # session copy; receives minted Skolem declarations
    kprime: list[Clause] = field(default_factory=list)
    saturation: ProofResult | None = None


@dataclass
class ReportOutcome:
    status: str  # "proved" | "saturated" | "resource-limit" | "send-failure"
    result: ProofResult | None
    messages: list[Message]
    log: list[str]
    decider_clauses: tuple[Clause, ...]  # K' at the decider before its run
    decider_db: ClauseDB | None
    validation: ValidationReport
    failure: SendError | None = None
    agent_results: dict[str, ProofResult] = field(default_factory=dict)

    @property
    def any_resource_limit(self) -> bool:
        return any(isinstance(r, ResourceLimit) for r in self.agent_results.values())


def _clause_symbols_and_preds(c: Clause, sig: Signature) -> tuple[set[str], set[str]]:
    preds = {p for p in c.predicates() if not sig.is_sort_predicate(p)}
    return set(c.symbols()), preds


def osfol_send(
    sender: AgentState, receiver: AgentState, session_fresh: FreshNames
) -> Message:
    """Build the message from sender to receiver out of the sender's working set.

    A clause is eligible when its (non-sort) predicates are all common, or it
    is the empty clause. Eligible clauses whose remaining symbols are all
    common pass through unchanged; the rest are un-Skolemized over their
    private symbols. Ineligible clauses stay at the sender.
    """
    u, v = sender.agent, receiver.agent
    shared_preds = common_predicates(u, v)
    transmissible = common_language(u, v)

    direct: list[Clause] = []
    pending: list[Clause] = []
    private_symbols: set[str] = set()
    for clause in sender.kprime:
        symbols, preds = _clause_symbols_and_preds(clause, sender.signature)
        if not clause.is_empty and not preds <= shared_preds:
            continue  # retained at the sender
        leftover = symbols - transmissible
        if not leftover or clause.is_empty:
            direct.append(clause)
        else:
            pending.append(clause)
            private_symbols |= leftover

    groups: tuple[UnskolemizedGroup, ...] = ()
    if pending:
        outcome = unskolemize(pending, private_symbols, sender.signature, session_fresh)
        if isinstance(outcome, UnskolemizeFailure):
            raise SendError(u.agent_id, v.agent_id, str(outcome))
        for group in outcome:
            for f in group.formulas:
                stray = formula_symbols(f) - transmissible
                if stray:
                    raise SendError(
                        u.agent_id,
                        v.agent_id,
                        f"un-Skolemized formula still mentions {sorted(stray)}",
                    )
        groups = tuple(g for g in outcome if g.formulas)

    message = Message(u.agent_id, v.agent_id, tuple(direct), groups)
    for clause in message.clauses:
        stray = clause.symbols() - transmissible
        if stray and not clause.is_empty:
            raise SendError(
                u.agent_id, v.agent_id, f"clause {clause} mentions {sorted(stray)}"
            )
    return message


def osfol_recv(
    message: Message,
    receiver: AgentState,
    session_fresh: FreshNames,
    table: SkolemTable | None = None,
) -> list[Clause]:
    """Add a message's content to the receiver's working set.

    Quantifier-free clauses pass through; each formula group is Skolemized
    with symbols fresh at the receiver (shared within the group), which also
    enter the receiver's signature. Sort atoms for the minted terms are
    emitted so the received clause set states their sorts explicitly.
    """
    added: list[Clause] = []
    for clause in message.clauses:
        receiver.kprime.append(clause)
        added.append(clause)
    for group in message.groups:
        for clause in skolemize_group(
            group,
            receiver.signature,
            session_fresh,
            table=table,
            owner=receiver.agent.agent_id,
            emit_sort_atoms=True,
        ):
            receiver.kprime.append(clause)
            added.append(clause)
    return added


def _check_query(query: Formula, decider: AgentState) -> None:
    if free_variables(query):
        raise ReportInputError("query must be a closed formula")
    try:
        check_formula(query, decider.signature)
    except WellSortednessError as exc:
        raise ReportInputError(
            f"query is outside the decider's language: {exc}"
        ) from exc
    allowed = decider.signature.non_logical_symbols()
    hierarchy = decider.signature.hierarchy
    allowed |= {s for s in hierarchy.sorts if s not in (TOP, BOT)}
    allowed |= {c for ws in hierarchy.witnesses.values() for c in ws}
    stray = formula_symbols(query) - allowed
    if stray:
        raise ReportInputError(
            f"query mentions symbols outside the decider's language: {sorted(stray)}"
        )


def run_report(
    net: AgentNetwork,
    query: Formula,
    limits: Limits = Limits(),
    *,
    seed: int | None = None,
    allow_non_tree: bool = False,
    validation: ValidationReport | None = None,
    record_proved: bool = True,
) -> ReportOutcome:
    """Prove a query at the decider by tree-ordered saturation and reporting.

    Agents run in strictly decreasing distance from the decider, so every
    agent has received from all its predecessors before it saturates and
    sends. A seed permutes the order of same-distance agents, which must not
    change the verdict. On success the query's clause form is appended to
    the decider's knowledge base.
    """
    if validation is None:
        validation = validate_tree(net)
    log: list[str] = []
    if not validation.certified:
        hard = [
            c for c in validation.checks
            if c.name in ("acyclic", "decider", "edge-predicates") and not c.passed
        ]
        if hard:
            raise ReportInputError(
                "network rejected: " + "; ".join(c.name for c in hard)
            )
        if not allow_non_tree:
            raise ReportInputError(
                "network is not a certified signature tree "
                "(pass allow_non_tree to run without the completeness guarantee)"
            )
        log.append(
            "warning: network is not a certified signature tree; "
            "the report procedure has no completeness guarantee here"
        )

    # Session state: copied signatures, working sets seeded from the KBs.
    states = {
        a.agent_id: AgentState(a, a.signature.copy(), list(a.kb))
        for a in net.agents.values()
    }
    session_fresh = FreshNames(
        {s for st in states.values() for s in st.signature.non_logical_symbols()}
        | {c for ws in net.agents[net.decider].signature.hierarchy.witnesses.values() for c in ws}
    )
    table = SkolemTable()

    decider = states[net.decider]
    _check_query(query, decider)
    negated = clausify(
        Not(query), decider.signature, session_fresh, table=table, owner=net.decider
    )
    decider.kprime.extend(negated)
    log.append(f"decider {net.decider}: added {len(negated)} clause(s) from the negated query")

    distances = distance_to_decider(net)
    rng = random.Random(seed)
    messages: list[Message] = []
    received_from: dict[str, dict[frozenset, str]] = {a: {} for a in net.agents}

    for d in sorted(set(distances.values()), reverse=True):
        if d == 0:
            continue
        level = sorted(a for a, dist in distances.items() if dist == d)
        if seed is not None:
            rng.shuffle(level)
        for agent_id in level:
            state = states[agent_id]
            result, db = saturate(
                [(c, "input", "") for c in state.kprime], state.signature, limits
            )
            state.saturation = result
            state.kprime = db.exported_clauses()
            if isinstance(result, ResourceLimit):
                log.append(
                    f"agent {agent_id}: saturation hit the {result.kind} limit; "
                    "sending what it has"
                )
            for successor in net.successors(agent_id):
                message = osfol_send(state, states[successor], session_fresh)
                added = osfol_recv(message, states[successor], session_fresh, table)
                for clause in added:
                    received_from[successor].setdefault(clause.literals, message.sender)
                messages.append(message)
                log.append(message.format())

    decider_inputs: list[tuple[Clause, str, str]] = []
    for clause in decider.kprime:
        sender = received_from[net.decider].get(clause.literals)
        if sender is None:
            decider_inputs.append((clause, "input", ""))
        else:
            decider_inputs.append((clause, "received", sender))
    snapshot = tuple(decider.kprime)

    result, db = saturate(decider_inputs, decider.signature, limits)
    decider.saturation = result

    if isinstance(result, Proved):
        status = "proved"
        if record_proved:
            proved_clauses = clausify(
                query, net.agents[net.decider].signature, session_fresh, owner=net.decider
            )
            net.agents[net.decider].kb.extend(proved_clauses)
            log.append(
                f"query proved; {len(proved_clauses)} clause(s) appended to K({net.decider})"
            )
    elif isinstance(result, Saturated):
        status = "saturated"
    else:
        status = "resource-limit"

    return ReportOutcome(
        status=status,
        result=result,
        messages=messages,
        log=log,
        decider_clauses=snapshot,
        decider_db=db,
        validation=validation,
        agent_results={a: s.saturation for a, s in states.items() if s.saturation},
    )


def prove_centralized(
    net: AgentNetwork, query: Formula, limits: Limits = Limits()
) -> ProofResult:
    """Saturate the combined knowledge base against the negated query.

    The oracle the distributed procedure is measured against: a certified
    signature tree must reach the same verdict either way.
    """
    from .network import combined_kb, combined_signature

    sig = combined_signature(net)
    fresh = FreshNames(sig.non_logical_symbols())
    clauses: list[Clause] = list(combined_kb(net))
    clauses += clausify(Not(query), sig, fresh)
    result, _ = saturate(clauses, sig, limits)
    return result


def run_report_safe(net: AgentNetwork, query: Formula, limits: Limits = Limits(), **kw) -> ReportOutcome:
    """Like run_report, but a send failure becomes an outcome, not an exception."""
    try:
        return run_report(net, query, limits, **kw)
    except SendError as failure:
        validation = kw.get("validation") or validate_tree(net)
        return ReportOutcome(
            status="send-failure",
            result=None,
            messages=[],
            log=[str(failure)],
            decider_clauses=(),
            decider_db=None,
            validation=validation,
            failure=failure,
        )
