"""Core definitions for the restraint-signaling game.

Two states interact over three stages. State A privately knows its type:
restrained (it gains nothing from exploiting a future decisive advantage)
or aggressive (it gains V_D). At t0 A chooses a signal level m >= 0 whose
cost structure depends on the commitment mechanism; at t1 State B observes
m and decides whether to launch a preventive conflict (ending the game at
-c for each side); at t2, if no conflict occurred, A holds the advantage
and decides whether to exploit it (costing B the worst-case loss V_B) or
to show restraint (the zero-point outcome for both).

Four mechanisms differ only in where the signal cost m lands:

* tying hands   -- m is paid only if the commitment is broken (subtracted
                   from the exploit payoff);
* sunk costs    -- m is paid immediately, no matter what follows
                   (subtracted from every one of A's payoffs);
* installment   -- m falls due later regardless of action (subtracted from
                   exploit and restraint, but not from the t1 conflict);
* reducible     -- m is paid up front but recouped if the commitment is
                   honoured (subtracted from conflict and exploit only).

Each mechanism comes in a base flavour and a "risk" flavour in which an
aggressive type that leaves the advantage unexploited bears an extra cost
r (it worries the advantage will erode). The base flavour is exactly the
risk flavour with r forced to 0, so a single payoff table serves both.

Payoffs are plain double-precision reals; conflict payoffs never depend on
the type or on r (only the signal-cost terms vary by mechanism).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

#: Absolute tolerance for every weak inequality in the package. A boundary
#: point (slack exactly 0) counts as satisfied; indifference breaks toward
#: restraint.
TOL = 1e-9


class ParameterError(ValueError):
    """Raised when inputs violate a model constraint.

    ``constraint`` holds the violated condition (e.g. ``"V_B > c"``) so
    callers can surface it verbatim.
    """

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        message = f"constraint violated: {constraint}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class TypeLabel(Enum):
    """State A's private disposition. ``theta`` is 0 or 1."""

    RESTRAINED = 0
    AGGRESSIVE = 1

    @property
    def theta(self) -> int:
        return self.value


class Mechanism(Enum):
    """Which cost structure the signal m carries."""

    TYING_HANDS = "tying-hands"
    SUNK = "sunk"
    INSTALLMENT = "installment"
    REDUCIBLE = "reducible"


class Variant(Enum):
    """Base game, or the variant where an aggressive type bears risk r
    when it leaves the advantage unexploited."""

    BASE = "base"
    RISK = "risk"


class Outcome(Enum):
    """Terminal outcomes. Conflict ends the game at t1; the other two at t2."""

    PREVENTIVE_CONFLICT = "conflict"
    EXPLOIT = "exploit"
    RESTRAINT = "restraint"


@dataclass(frozen=True)
class MechanismSpec:
    """A mechanism together with its variant flag."""

    mechanism: Mechanism
    variant: Variant = Variant.BASE

    def effective_r(self, params: "ModelParams") -> float:
        """Risk borne by an unexploiting aggressive type: r, or 0 in base."""
        return params.r if self.variant is Variant.RISK else 0.0

    def to_dict(self) -> dict:
        return {"mechanism": self.mechanism.value, "variant": self.variant.value}

    @classmethod
    def from_dict(cls, d: dict) -> "MechanismSpec":
        return cls(Mechanism(d["mechanism"]), Variant(d.get("variant", "base")))


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters shared by every game in the family.

    c      -- cost of preventive conflict to each side (strictly positive)
    V_D    -- aggressive type's gain from exploiting the advantage
    V_B    -- State B's loss when exploited (must exceed c)
    r      -- aggressive type's cost of leaving the advantage unexploited
              (used by risk variants only)
    p      -- probability a restrained type drifts to aggressive before t2
    prior  -- common prior probability that State A is restrained
    """

    c: float
    V_D: float
    V_B: float
    r: float = 0.0
    p: float = 0.0
    prior: float = 0.5

    def validate(self, allow_degenerate_prior: bool = False) -> None:
        """Raise :class:`ParameterError` naming the first violated constraint."""
        if not self.c > 0:
            raise ParameterError("c > 0", f"c={self.c}")
        if not self.V_D > 0:
            raise ParameterError("V_D > 0", f"V_D={self.V_D}")
        if not self.V_B > self.c:
            raise ParameterError("V_B > c", f"V_B={self.V_B}, c={self.c}")
        if not self.r >= 0:
            raise ParameterError("r >= 0", f"r={self.r}")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError("0 <= p <= 1", f"p={self.p}")
        if allow_degenerate_prior:
            if not 0.0 <= self.prior <= 1.0:
                raise ParameterError("0 <= prior <= 1", f"prior={self.prior}")
        elif not 0.0 < self.prior < 1.0:
            raise ParameterError("0 < prior < 1", f"prior={self.prior}")

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "V_D": self.V_D,
            "V_B": self.V_B,
            "r": self.r,
            "p": self.p,
            "prior": self.prior,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(
            c=float(d["c"]),
            V_D=float(d["V_D"]),
            V_B=float(d["V_B"]),
            r=float(d.get("r", 0.0)),
            p=float(d.get("p", 0.0)),
            prior=float(d.get("prior", 0.5)),
        )


class PayoffPair(NamedTuple):
    """Utilities (u_A, u_B) at one terminal outcome."""

    u_A: float
    u_B: float


def validate_signal(m: float) -> None:
    if not m >= 0:
        raise ParameterError("m >= 0", f"m={m}")


def payoff(
    spec: MechanismSpec,
    params: ModelParams,
    theta: TypeLabel,
    outcome: Outcome,
    m: float,
) -> PayoffPair:
    """Payoff pair for one (mechanism, variant, type, outcome, signal) cell.

    The full table, with t = theta and re = r (risk variant) or 0 (base):

    ==============  ============  ==================  ================
    mechanism       conflict      exploit             restraint
    ==============  ============  ==================  ================
    tying hands     (-c, -c)      (t*V_D - m, -V_B)   (-t*re, 0)
    sunk costs      (-c - m, -c)  (t*V_D - m, -V_B)   (-t*re - m, 0)
    installment     (-c, -c)      (t*V_D - m, -V_B)   (-t*re - m, 0)
    reducible       (-c - m, -c)  (t*V_D - m, -V_B)   (-t*re, 0)
    ==============  ============  ==================  ================
    """
    params.validate()
    validate_signal(m)

    t = theta.theta
    re = spec.effective_r(params)
    mech = spec.mechanism

    if outcome is Outcome.PREVENTIVE_CONFLICT:
        if mech in (Mechanism.SUNK, Mechanism.REDUCIBLE):
            return PayoffPair(-params.c - m, -params.c)
        return PayoffPair(-params.c, -params.c)

    if outcome is Outcome.EXPLOIT:
        return PayoffPair(t * params.V_D - m, -params.V_B)

    # Restraint: the peace dividend is the zero point; only the signal-cost
    # term and the aggressive type's risk term can pull u_A below it.
    if mech in (Mechanism.SUNK, Mechanism.INSTALLMENT):
        return PayoffPair(-t * re - m, 0.0)
    return PayoffPair(-t * re, 0.0)
