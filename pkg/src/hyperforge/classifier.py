"""Exceptional-exterior classifier and the base-case hyperbolicity
certifiers (alternating and augmented alternating).

The chain move is admissible unless the rational tangle outside the ball
is one of four excluded values; shifted by the template's k twists those
are always {inf, 0, -1, -1/2}.  The "-2 -k" value is computed through the
tangle module rather than hard-coded, so a convention error there would
break the shift-consistency check loudly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from . import diagram as _dg
from .diagram import DEFAULT_STEP_BUDGET, LinkDiagram
from .errors import SiteError
from .tangle import ConwaySequence, Fraction, fraction, twist_add


class ExceptionKind(enum.Enum):
    Infinity = "Infinity"
    MinusK = "MinusK"
    MinusKPlus1 = "MinusKPlus1"
    MinusTwoMinusK = "MinusTwoMinusK"


class RefusalReason(enum.Enum):
    NotAlternating = "NotAlternating"
    NotReduced = "NotReduced"
    NotPrime = "NotPrime"
    Split = "Split"
    TwoBraid = "TwoBraid"
    Trivial = "Trivial"
    Unknown2Braid = "Unknown2Braid"
    BadAugmenting = "BadAugmenting"


@dataclass(frozen=True)
class Refusal:
    """A certifier's structured no, with the failing witness when there is one."""

    reason: RefusalReason
    witness: tuple = ()
    detail: str = ""

    def __str__(self):
        parts = [self.reason.value]
        if self.witness:
            parts.append(str(self.witness))
        if self.detail:
            parts.append(self.detail)
        return " ".join(parts)


# -- exterior evidence (consumed here, carried by certificates) -----------------


@dataclass(frozen=True)
class Rational:
    """The exterior tangle is the rational tangle of this sequence."""

    sequence: ConwaySequence

    def __post_init__(self):
        if not isinstance(self.sequence, ConwaySequence):
            object.__setattr__(self, "sequence", ConwaySequence(tuple(self.sequence)))


@dataclass(frozen=True)
class DeclaredNonRational:
    """Trusted declaration that the exterior is not a rational tangle."""

    justification: str = ""


@dataclass(frozen=True)
class Unchecked:
    """No exterior evidence; moves run, but certificates never validate."""


ExteriorEvidence = Union[Rational, DeclaredNonRational, Unchecked]


# -- the classifier ----------------------------------------------------------------


def minus_two_minus_k(k: int) -> Fraction:
    """The fraction of the '-2 -k' tangle: -k - 1/2 for every integer k."""
    return twist_add(fraction([-2, 0]), -k)


def excluded_exterior(f: Fraction, k: int) -> Optional[ExceptionKind]:
    """The exception kind when f is an excluded exterior for the k-template.

    Equivalently: some kind is returned iff f + k lies in
    exception_base_set().  The infinity case is a precondition failure of
    the move (the original link was not prime), not a move failure.
    """
    if f.is_infinite:
        return ExceptionKind.Infinity
    if f == Fraction(-k):
        return ExceptionKind.MinusK
    if f == Fraction(-(k + 1)):
        return ExceptionKind.MinusKPlus1
    if f == minus_two_minus_k(k):
        return ExceptionKind.MinusTwoMinusK
    return None


def exception_base_set() -> frozenset[Fraction]:
    """The k = 0 normal form of the exception set: {inf, 0, -1, -1/2}."""
    return frozenset(
        {fraction([0, 0]), fraction([0]), fraction([-1]), fraction([-2, 0])}
    )


# -- base certifiers ---------------------------------------------------------------


def menasco_certify(d: LinkDiagram, budget: int = DEFAULT_STEP_BUDGET):
    """Certificate for a reduced prime alternating non-split non-2-braid
    diagram of a nontrivial link; Refusal otherwise."""
    d.require_valid()
    if _dg.is_split(d):
        return Refusal(RefusalReason.Split)
    # conservative triviality check by budgeted R1/R2 reduction; on a
    # reduced alternating diagram this is a no-op (Tait: such diagrams
    # realize the crossing number, so a nontrivial link never reduces out)
    reduced, _, stable = _dg.reduce_diagram(d, budget)
    if not stable:
        return Refusal(
            RefusalReason.Unknown2Braid,
            detail="R1/R2 reduction budget exhausted; refusing conservatively",
        )
    if len(reduced.crossings) == 0:
        if reduced.loops == 1:
            return Refusal(RefusalReason.Trivial)
        return Refusal(RefusalReason.Split, detail="reduces to crossing-free loops")
    cuts = _dg.two_edge_cuts(d)
    if cuts:
        return Refusal(RefusalReason.NotPrime, witness=cuts[0])
    nug = _dg.nugatory_crossings(d)
    if nug:
        return Refusal(RefusalReason.NotReduced, witness=nug)
    if not _dg.is_alternating(d):
        return Refusal(RefusalReason.NotAlternating)
    status = _dg.two_braid_status(d, budget)
    if status == "yes":
        return Refusal(RefusalReason.TwoBraid)
    if status == "unknown":
        return Refusal(
            RefusalReason.Unknown2Braid,
            detail="R1/R2 reduction budget exhausted; refusing conservatively",
        )
    from .certificate import Certificate  # deferred: certificate imports moves

    return Certificate(base="MenascoAlternating", base_diagram=d, subject=d)


def augmented_alternating_certify(
    d: LinkDiagram, augmenting: frozenset[int] | set[int], budget: int = DEFAULT_STEP_BUDGET
):
    """Certificate for an alternating base plus trivial augmenting circles.

    Each augmenting component must bound a recognizable twice-punctured
    disk; the diagram minus the augmenting components must pass
    menasco_certify.
    """
    d.require_valid()
    augmenting = frozenset(augmenting)
    if not augmenting:
        return menasco_certify(d, budget)
    from .moves import _disk_runs, remove_component  # deferred: moves imports us

    for comp in sorted(augmenting):
        try:
            _disk_runs(d, comp)
        except SiteError as err:
            return Refusal(
                RefusalReason.BadAugmenting, witness=(comp,), detail=str(err)
            )
    rest = d
    for comp in sorted(augmenting, reverse=True):
        rest = remove_component(rest, comp)
    inner = menasco_certify(rest, budget)
    if isinstance(inner, Refusal):
        return Refusal(inner.reason, witness=inner.witness, detail="base link refused")
    from .certificate import Certificate

    return Certificate(
        base="AugmentedAlternating",
        base_diagram=d,
        subject=d,
        augmenting=tuple(sorted(augmenting)),
    )


def exceptional_links() -> tuple[LinkDiagram, ...]:
    """The four exceptional closures: exteriors inf, 0, -1, and -2 0 at k = 0."""
    from .generators import tk_closure  # deferred: generators imports moves

    return tuple(
        tk_closure(s, 0) for s in ([0, 0], [0], [-1], [-2, 0])
    )
