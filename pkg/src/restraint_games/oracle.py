"""Brute-force weak-PBE search on a finite signal grid.

This module is the independent verifier for the closed-form conditions in
:mod:`restraint_games.conditions`: it discretizes the signal space to a
finite grid, enumerates every pure strategy profile, and certifies a
profile as a weak perfect Bayesian equilibrium when

(a) posteriors at on-path messages follow Bayes' rule from the prior,
(b) State B's t1 choice at every message is optimal under its posterior
    there -- off-path posteriors are free, and because B's expected payoff
    is affine in the belief, the set of supporting beliefs is a closed
    interval computed exactly,
(c) each type's t2 action is optimal at its cell, for every cell on or
    off the path, and
(d) no type can improve its continuation value by sending a different
    message, given B's strategy and the profile's own t2 play.

Indifference always admits either action (weak optimality), with the same
absolute tolerance used by the closed forms, so boundary parameter points
certify on both routes.

Certified profiles are classed by shape. Pooling profiles (both types at
one message) are ``PoolingOnRestraint`` when nobody fights or exploits on
path, else ``PoolingOther``. Profiles with distinct messages are
``Separating`` only when the signal is informative in action: B fights
after the aggressive type's message, stands down after the restrained
type's, and the restrained type restrains on path. Distinct-message
profiles without that shape -- e.g. ones where B fights after every
message and the labels only differ because conflict payoffs are
message-independent -- are ``Hybrid``; they satisfy weak-PBE mechanics but
carry no information, and counting them as separating would contradict
the non-existence theorems the oracle is meant to check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from . import conditions
from .game import (
    TOL,
    MechanismSpec,
    ModelParams,
    Outcome,
    ParameterError,
    TypeLabel,
    payoff,
)

#: Nominal number of pure profiles the enumerator refuses to exceed.
DEFAULT_PROFILE_BUDGET = 10**8


class BudgetExceededError(RuntimeError):
    """Enumeration would exceed the configured profile budget."""

    def __init__(self, n_profiles: int, budget: int):
        self.n_profiles = n_profiles
        self.budget = budget
        super().__init__(
            f"profile enumeration size {n_profiles} exceeds budget {budget}"
        )


class PBEClass(Enum):
    POOLING_ON_RESTRAINT = "PoolingOnRestraint"
    POOLING_OTHER = "PoolingOther"
    SEPARATING = "Separating"
    HYBRID = "Hybrid"


@dataclass(frozen=True)
class DiscreteGame:
    """A restraint-signaling game restricted to a finite signal grid.

    ``messages`` must be strictly ascending, nonnegative, and contain 0
    (the null signal every non-existence argument deviates to).
    """

    spec: MechanismSpec
    params: ModelParams
    messages: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(float(m) for m in self.messages))
        self.params.validate()
        if not self.messages:
            raise ParameterError("messages nonempty")
        if any(m < 0 for m in self.messages):
            raise ParameterError("messages >= 0", f"messages={self.messages}")
        if any(a >= b for a, b in zip(self.messages, self.messages[1:])):
            raise ParameterError(
                "messages strictly ascending", f"messages={self.messages}"
            )
        if 0.0 not in self.messages:
            raise ParameterError("messages contain 0", f"messages={self.messages}")


@dataclass(frozen=True)
class StrategyProfile:
    """Pure strategies for both players at every decision point."""

    signal_of: dict[TypeLabel, float]
    fight_after: dict[float, bool]
    t2_action: dict[tuple[TypeLabel, float], Outcome]

    def to_dict(self) -> dict:
        return {
            "signal_of": {t.name.lower(): m for t, m in self.signal_of.items()},
            "fight_after": [[m, bool(f)] for m, f in sorted(self.fight_after.items())],
            "t2_action": [
                [t.name.lower(), m, a.value]
                for (t, m), a in sorted(
                    self.t2_action.items(), key=lambda kv: (kv[0][0].value, kv[0][1])
                )
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StrategyProfile":
        return cls(
            signal_of={TypeLabel[t.upper()]: float(m) for t, m in d["signal_of"].items()},
            fight_after={float(m): bool(f) for m, f in d["fight_after"]},
            t2_action={
                (TypeLabel[t.upper()], float(m)): Outcome(a)
                for t, m, a in d["t2_action"]
            },
        )


@dataclass(frozen=True)
class BeliefAssignment:
    """Posterior probability that State A is restrained, per message."""

    posterior: dict[float, float]

    def to_dict(self) -> dict:
        return {"posterior": [[m, q] for m, q in sorted(self.posterior.items())]}


@dataclass(frozen=True)
class PBECertificate:
    profile: StrategyProfile
    beliefs: BeliefAssignment
    pbe_class: PBEClass

    def to_dict(self) -> dict:
        return {
            "class": self.pbe_class.value,
            "profile": self.profile.to_dict(),
            "beliefs": self.beliefs.to_dict(),
        }


def supporting_belief_interval(
    u_b_restrained_action: float,
    u_b_aggressive_action: float,
    u_b_fight: float,
    fight: bool,
    tol: float = TOL,
) -> Optional[tuple[float, float]]:
    """Beliefs q = P(restrained) making B's t1 choice weakly optimal.

    B's payoff from standing down is affine in q:
    ``f(q) = q * u_b_restrained_action + (1 - q) * u_b_aggressive_action``,
    so the supporting set within [0, 1] is a closed interval, returned
    exactly (or None when empty).
    """
    slope = u_b_restrained_action - u_b_aggressive_action
    intercept = u_b_aggressive_action
    if fight:
        # need f(q) <= u_b_fight + tol
        threshold = u_b_fight + tol
        if slope == 0.0:
            return (0.0, 1.0) if intercept <= threshold else None
        q_cut = (threshold - intercept) / slope
        if slope > 0:
            lo, hi = 0.0, min(1.0, q_cut)
        else:
            lo, hi = max(0.0, q_cut), 1.0
    else:
        # need f(q) >= u_b_fight - tol
        threshold = u_b_fight - tol
        if slope == 0.0:
            return (0.0, 1.0) if intercept >= threshold else None
        q_cut = (threshold - intercept) / slope
        if slope > 0:
            lo, hi = max(0.0, q_cut), 1.0
        else:
            lo, hi = 0.0, min(1.0, q_cut)
    if lo > hi:
        return None
    return (lo, hi)


class _GameTable:
    """Per-game payoff tables flattened to plain floats for fast checks."""

    def __init__(self, game: DiscreteGame):
        self.game = game
        self.messages = game.messages
        self.n = len(game.messages)
        self.index = {m: j for j, m in enumerate(game.messages)}
        p = game.params
        self.prior = p.prior
        self.u_b_fight = -p.c
        self.u_b_exploit = -p.V_B
        self.u_b_restraint = 0.0
        # u_A by [type][message index] for each of A's three fates
        self.uA_conflict: dict[TypeLabel, list[float]] = {}
        self.uA_exploit: dict[TypeLabel, list[float]] = {}
        self.uA_restraint: dict[TypeLabel, list[float]] = {}
        # weakly optimal t2 actions per cell, in canonical order
        self.t2_options: dict[tuple[TypeLabel, int], tuple[Outcome, ...]] = {}
        for t in TypeLabel:
            self.uA_conflict[t] = [
                payoff(game.spec, p, t, Outcome.PREVENTIVE_CONFLICT, m).u_A
                for m in game.messages
            ]
            self.uA_exploit[t] = [
                payoff(game.spec, p, t, Outcome.EXPLOIT, m).u_A for m in game.messages
            ]
            self.uA_restraint[t] = [
                payoff(game.spec, p, t, Outcome.RESTRAINT, m).u_A for m in game.messages
            ]
            for j in range(self.n):
                ue, ur = self.uA_exploit[t][j], self.uA_restraint[t][j]
                opts = []
                if ue >= ur - TOL:
                    opts.append(Outcome.EXPLOIT)
                if ur >= ue - TOL:
                    opts.append(Outcome.RESTRAINT)
                self.t2_options[(t, j)] = tuple(opts)

    def u_b_of_action(self, action: Outcome) -> float:
        return self.u_b_exploit if action is Outcome.EXPLOIT else self.u_b_restraint

    def uA_after_no_fight(self, t: TypeLabel, j: int, action: Outcome) -> float:
        if action is Outcome.EXPLOIT:
            return self.uA_exploit[t][j]
        return self.uA_restraint[t][j]


def _check_profile(
    table: _GameTable,
    j_R: int,
    j_A: int,
    t2: dict[tuple[TypeLabel, int], Outcome],
    fight: tuple[bool, ...],
) -> Optional[dict[float, float]]:
    """Run checks (a)-(d); return a supporting belief map or None."""
    R, A = TypeLabel.RESTRAINED, TypeLabel.AGGRESSIVE
    u_fight = table.u_b_fight
    beliefs: dict[float, float] = {}

    for j in range(table.n):
        u_b_R = table.u_b_of_action(t2[(R, j)])
        u_b_A = table.u_b_of_action(t2[(A, j)])
        if j == j_R and j == j_A:
            q: Optional[float] = table.prior
        elif j == j_R:
            q = 1.0
        elif j == j_A:
            q = 0.0
        else:
            q = None  # off path: belief free
        if q is not None:
            stand_down = q * u_b_R + (1.0 - q) * u_b_A
            if fight[j]:
                if not u_fight >= stand_down - TOL:
                    return None
            else:
                if not stand_down >= u_fight - TOL:
                    return None
            beliefs[table.messages[j]] = q
        else:
            interval = supporting_belief_interval(u_b_R, u_b_A, u_fight, fight[j])
            if interval is None:
                return None
            beliefs[table.messages[j]] = 0.5 * (interval[0] + interval[1])

    # (c) t2 optimality at every cell
    for t in TypeLabel:
        for j in range(table.n):
            chosen = table.uA_after_no_fight(t, j, t2[(t, j)])
            other = (
                Outcome.RESTRAINT
                if t2[(t, j)] is Outcome.EXPLOIT
                else Outcome.EXPLOIT
            )
            if chosen < table.uA_after_no_fight(t, j, other) - TOL:
                return None

    # (d) t0 optimality: continuation value of each message for each type
    for t, j_own in ((R, j_R), (A, j_A)):
        values = [
            table.uA_conflict[t][j]
            if fight[j]
            else table.uA_after_no_fight(t, j, t2[(t, j)])
            for j in range(table.n)
        ]
        if values[j_own] < max(values) - TOL:
            return None

    return beliefs


def _classify(
    table: _GameTable,
    j_R: int,
    j_A: int,
    t2: dict[tuple[TypeLabel, int], Outcome],
    fight: tuple[bool, ...],
) -> PBEClass:
    R, A = TypeLabel.RESTRAINED, TypeLabel.AGGRESSIVE
    if j_R == j_A:
        on_restraint = (
            not fight[j_R]
            and t2[(R, j_R)] is Outcome.RESTRAINT
            and t2[(A, j_A)] is Outcome.RESTRAINT
        )
        return PBEClass.POOLING_ON_RESTRAINT if on_restraint else PBEClass.POOLING_OTHER
    informative = (
        not fight[j_R] and fight[j_A] and t2[(R, j_R)] is Outcome.RESTRAINT
    )
    return PBEClass.SEPARATING if informative else PBEClass.HYBRID


def is_weak_pbe(game: DiscreteGame, profile: StrategyProfile) -> Optional[PBECertificate]:
    """Certify one profile, or return None when no supporting beliefs exist."""
    table = _GameTable(game)
    try:
        j_R = table.index[profile.signal_of[TypeLabel.RESTRAINED]]
        j_A = table.index[profile.signal_of[TypeLabel.AGGRESSIVE]]
        fight = tuple(profile.fight_after[m] for m in game.messages)
        t2 = {
            (t, j): profile.t2_action[(t, m)]
            for t in TypeLabel
            for j, m in enumerate(game.messages)
        }
    except KeyError as exc:
        raise ParameterError(
            "profile total over message grid", f"missing entry {exc}"
        ) from exc
    beliefs = _check_profile(table, j_R, j_A, t2, fight)
    if beliefs is None:
        return None
    return PBECertificate(
        profile=profile,
        beliefs=BeliefAssignment(posterior=beliefs),
        pbe_class=_classify(table, j_R, j_A, t2, fight),
    )


def profile_count(n_messages: int) -> int:
    """Nominal enumeration size: signals x fight rules x t2 assignments."""
    return n_messages**2 * 2**n_messages * 2 ** (2 * n_messages)


def find_all_pbe(
    game: DiscreteGame, budget: int = DEFAULT_PROFILE_BUDGET
) -> list[PBECertificate]:
    """Enumerate every pure profile and return all weak-PBE certificates.

    Results are deterministic and sorted in the canonical lexicographic
    order of the profile encoding (signal indices, then t2 actions, then
    fight pattern). Profiles whose t2 actions are not cell-optimal are
    skipped up front; they can never certify.
    """
    n = len(game.messages)
    nominal = profile_count(n)
    if nominal > budget:
        raise BudgetExceededError(nominal, budget)

    table = _GameTable(game)
    R, A = TypeLabel.RESTRAINED, TypeLabel.AGGRESSIVE
    cells = [(R, j) for j in range(n)] + [(A, j) for j in range(n)]
    cell_options = [table.t2_options[cell] for cell in cells]
    fight_patterns = list(itertools.product((False, True), repeat=n))

    found: list[tuple[tuple, PBECertificate]] = []
    for j_R in range(n):
        for j_A in range(n):
            for actions in itertools.product(*cell_options):
                t2 = dict(zip(cells, actions))
                for fight in fight_patterns:
                    beliefs = _check_profile(table, j_R, j_A, t2, fight)
                    if beliefs is None:
                        continue
                    profile = StrategyProfile(
                        signal_of={R: game.messages[j_R], A: game.messages[j_A]},
                        fight_after=dict(zip(game.messages, fight)),
                        t2_action={
                            (t, game.messages[j]): a for (t, j), a in t2.items()
                        },
                    )
                    cert = PBECertificate(
                        profile=profile,
                        beliefs=BeliefAssignment(posterior=beliefs),
                        pbe_class=_classify(table, j_R, j_A, t2, fight),
                    )
                    key = (
                        j_R,
                        j_A,
                        tuple(a is Outcome.RESTRAINT for a in actions),
                        fight,
                    )
                    found.append((key, cert))
    found.sort(key=lambda kc: kc[0])
    return [cert for _, cert in found]


@dataclass(frozen=True)
class Discrepancy:
    """One grid point where the closed forms and the oracle disagree."""

    params: ModelParams
    m: float
    closed_form_verdict: dict[str, bool]
    oracle_verdict: dict[str, bool]
    certificates: tuple[PBECertificate, ...]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "m": self.m,
            "closed_form_verdict": dict(self.closed_form_verdict),
            "oracle_verdict": dict(self.oracle_verdict),
            "certificates": [c.to_dict() for c in self.certificates],
        }


@dataclass(frozen=True)
class DiscrepancyReport:
    spec: MechanismSpec
    entries: tuple[Discrepancy, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.entries

    def to_json_list(self) -> list[dict]:
        return [e.to_dict() for e in self.entries]


class DiscrepancyError(RuntimeError):
    """A sweep's oracle cross-check found closed-form/oracle mismatches."""

    def __init__(self, report: DiscrepancyReport):
        self.report = report
        first = report.entries[0]
        super().__init__(
            f"oracle disagrees with closed forms at {len(report.entries)} point(s); "
            f"first: params={first.params.to_dict()}, m={first.m}, "
            f"closed={first.closed_form_verdict}, oracle={first.oracle_verdict}"
        )


def verify_against_closed_form(
    spec: MechanismSpec,
    grid: Iterable[tuple[ModelParams, float]],
    budget: int = DEFAULT_PROFILE_BUDGET,
) -> DiscrepancyReport:
    """Compare closed-form verdicts against oracle findings on M = {0, m}.

    Pooling agreement means a PoolingOnRestraint certificate pooled at m
    exists exactly when the closed form holds; separating agreement means
    a Separating certificate with the restrained type at m exists exactly
    when the closed form holds. An empty report is full agreement.
    """
    R = TypeLabel.RESTRAINED
    entries: list[Discrepancy] = []
    for params, m in grid:
        closed = {
            "pooling": conditions.pooling_exists(spec, params, m).holds,
            "separating": conditions.separating_exists(spec, params, m).holds,
        }
        messages = (0.0,) if m == 0 else (0.0, float(m))
        certs = find_all_pbe(DiscreteGame(spec, params, messages), budget=budget)
        relevant = [
            c
            for c in certs
            if (
                c.pbe_class is PBEClass.POOLING_ON_RESTRAINT
                or c.pbe_class is PBEClass.SEPARATING
            )
            and c.profile.signal_of[R] == m
        ]
        oracle = {
            "pooling": any(
                c.pbe_class is PBEClass.POOLING_ON_RESTRAINT for c in relevant
            ),
            "separating": any(c.pbe_class is PBEClass.SEPARATING for c in relevant),
        }
        if oracle != closed:
            entries.append(
                Discrepancy(
                    params=params,
                    m=m,
                    closed_form_verdict=closed,
                    oracle_verdict=oracle,
                    certificates=tuple(relevant),
                )
            )
    return DiscrepancyReport(spec=spec, entries=tuple(entries))
