"""Hyperbolicity certificates: derivation trees over moves with premises
and exterior evidence, plus a verifier that re-plays derivations.

A certificate is valid relative to its premises: DeclaredNonRational
exterior evidence and GeodesicArc premises are trusted (and flagged in
the verdict report); Rational evidence is machine-checked against the
exceptional-exterior classifier; Unchecked evidence never validates.
Where the verifier can independently confirm a DeclaredNonRational claim
(the exterior contains a closed component, which no rational tangle
allows), it marks the evidence machine-checked instead of trusted.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, replace
from typing import Optional, Union

from . import classifier as _cls
from . import moves as _moves
from .classifier import (
    DeclaredNonRational,
    ExteriorEvidence,
    Rational,
    Unchecked,
    excluded_exterior,
)
from .diagram import LinkDiagram, components, diagram_isomorphic, format_pd, parse_pd
from .errors import (
    CertificateError,
    ExcludedExteriorError,
    GlueError,
    PremiseError,
    SiteError,
)
from .moves import ChainSite, Handedness, SwitchSite
from .tangle import ConwaySequence, fraction

FORMAT_VERSION = 1


@dataclass(frozen=True)
class Premise:
    kind: str  # GeodesicArc | AmbientHyperbolic | BoundaryTorusGluing
    justification: str = ""
    trusted: bool = True

    _KINDS = ("GeodesicArc", "AmbientHyperbolic", "BoundaryTorusGluing")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise PremiseError(f"unknown premise kind {self.kind!r}")


@dataclass(frozen=True)
class AbstractManifold:
    """What a non-diagram certificate is about: boundaries and link parts."""

    name: str
    boundaries: tuple[tuple[str, str], ...] = ()  # (label, 'torus'|'klein')
    link_components: tuple[str, ...] = ()
    hyperbolic: bool = False

    def boundary_kind(self, label: str) -> str:
        for lab, kind in self.boundaries:
            if lab == label:
                return kind
        raise GlueError(f"manifold {self.name} has no boundary {label!r}")


@dataclass(frozen=True)
class ChainStep:
    trivial_component: int
    strands: tuple[int, int]
    k: int
    evidence: ExteriorEvidence


@dataclass(frozen=True)
class AugChainStep:
    trivial_component: int
    strands: tuple[int, int]
    k: int
    evidence: ExteriorEvidence


@dataclass(frozen=True)
class SwitchStep:
    arc_g: int
    arc_g2: int
    handedness: Handedness
    premise: Optional[Premise] = None


@dataclass(frozen=True)
class HalfTwistStep:
    component: int
    direction: int


@dataclass(frozen=True)
class GlueStep:
    other: "Certificate"
    boundary_self: str
    boundary_other: str
    premises: tuple[Premise, ...] = ()


Step = Union[ChainStep, AugChainStep, SwitchStep, HalfTwistStep, GlueStep]


@dataclass(frozen=True)
class Certificate:
    """base + steps + subject; replaying the steps from the base must
    reproduce the subject."""

    base: str  # MenascoAlternating | AugmentedAlternating | ExternallyAsserted
    subject: Union[LinkDiagram, AbstractManifold]
    base_diagram: Optional[LinkDiagram] = None
    base_manifold: Optional[AbstractManifold] = None
    augmenting: tuple[int, ...] = ()
    description: str = ""
    steps: tuple[Step, ...] = ()


@dataclass(frozen=True)
class Verdict:
    valid: bool
    failed_step: Optional[int] = None  # -1 means the base, None means ok
    reason: str = ""
    step_reports: tuple[str, ...] = ()
    trusted_premises: tuple[str, ...] = ()

    def __bool__(self):
        return self.valid


def base_certificate(d: LinkDiagram):
    """Menasco base certificate or a Refusal."""
    return _cls.menasco_certify(d)


def _chain_site_for(d: LinkDiagram, comp: int, strands: tuple[int, int]) -> ChainSite:
    for site in _moves.find_chain_sites(d):
        if site.trivial_component == comp and {site.strand1, site.strand2} == set(strands):
            return site
    raise SiteError(f"no chain site at component {comp} strands {strands}")


def _exterior_has_closed_component(d: LinkDiagram, site: ChainSite) -> bool:
    """True when some link component avoids the move's ball entirely; a
    rational tangle exterior has no closed components."""
    part = components(d)
    involved = {
        site.trivial_component,
        part.component_of(site.strand1),
        part.component_of(site.strand2),
    }
    return part.count > len(involved)


def _apply_step(d: LinkDiagram, step: Step) -> LinkDiagram:
    if isinstance(step, ChainStep):
        site = _chain_site_for(d, step.trivial_component, step.strands)
        return _moves.chain_move(d, site, step.k, step.evidence)
    if isinstance(step, AugChainStep):
        site = _chain_site_for(d, step.trivial_component, step.strands)
        return _moves.augmented_chain_move(d, site, step.k, step.evidence)
    if isinstance(step, SwitchStep):
        return _moves.switch_move(
            d, SwitchSite(step.arc_g, step.arc_g2), step.handedness
        )
    if isinstance(step, HalfTwistStep):
        return _moves.half_twist(d, step.component, step.direction)
    raise CertificateError(f"cannot apply {type(step).__name__} to a diagram")


def extend(cert: Certificate, step: Step) -> Certificate:
    """Apply a move to the certificate's subject and record the step.

    Evidence and premises are gated here: inadmissible rational evidence
    raises ExcludedExteriorError; a SwitchStep without a GeodesicArc
    premise raises PremiseError.  Unchecked evidence is allowed through
    (the move itself is legal) but the certificate will never verify.
    """
    if isinstance(step, GlueStep):
        raise CertificateError("use glue() for gluing steps")
    if not isinstance(cert.subject, LinkDiagram):
        raise CertificateError("cannot extend an abstract-manifold certificate")
    if isinstance(step, SwitchStep):
        if step.premise is None or step.premise.kind != "GeodesicArc":
            raise PremiseError("switch step needs a GeodesicArc premise")
    new_subject = _apply_step(cert.subject, step)
    return replace(cert, subject=new_subject, steps=cert.steps + (step,))


def verify(cert: Certificate) -> Verdict:
    """Re-play the derivation from the base and re-check every gate."""
    if isinstance(cert.subject, AbstractManifold):
        return _verify_abstract(cert)
    reports: list[str] = []
    trusted: list[str] = []
    if cert.base == "MenascoAlternating":
        got = _cls.menasco_certify(cert.base_diagram)
        if isinstance(got, _cls.Refusal):
            return Verdict(False, -1, f"base refused: {got}")
        reports.append("base: MenascoAlternating accepted")
    elif cert.base == "AugmentedAlternating":
        got = _cls.augmented_alternating_certify(
            cert.base_diagram, frozenset(cert.augmenting)
        )
        if isinstance(got, _cls.Refusal):
            return Verdict(False, -1, f"base refused: {got}")
        reports.append(
            f"base: AugmentedAlternating accepted (augmenting {cert.augmenting})"
        )
    elif cert.base == "ExternallyAsserted":
        trusted.append(f"base asserted externally: {cert.description}")
        reports.append("base: ExternallyAsserted (trusted)")
    else:
        return Verdict(False, -1, f"unknown base {cert.base!r}")

    current = cert.base_diagram
    saw_admissible_chain = False
    for i, step in enumerate(cert.steps):
        if isinstance(step, (ChainStep, AugChainStep)):
            ev = step.evidence
            if isinstance(ev, Unchecked):
                return Verdict(
                    False, i, "unchecked exterior evidence never validates",
                    tuple(reports), tuple(trusted),
                )
            if isinstance(ev, Rational):
                kind = excluded_exterior(fraction(ev.sequence), step.k)
                if kind is not None:
                    return Verdict(
                        False, i, f"excluded exterior: {kind.value}",
                        tuple(reports), tuple(trusted),
                    )
                reports.append(f"step {i}: rational exterior admissible (k={step.k})")
                saw_admissible_chain = True
            else:
                try:
                    site = _chain_site_for(current, step.trivial_component, step.strands)
                    checked = _exterior_has_closed_component(current, site)
                except SiteError:
                    checked = False
                if checked:
                    reports.append(
                        f"step {i}: non-rational exterior machine-checked "
                        "(closed component outside the ball)"
                    )
                elif saw_admissible_chain:
                    reports.append(
                        f"step {i}: admissibility inherited from an earlier "
                        "chain step (repeated application)"
                    )
                    trusted.append(f"step {i}: {ev.justification or 'declared non-rational'}")
                else:
                    trusted.append(f"step {i}: {ev.justification or 'declared non-rational'}")
                    reports.append(f"step {i}: non-rational exterior (trusted)")
                saw_admissible_chain = True
        if isinstance(step, SwitchStep):
            if step.premise is None or step.premise.kind != "GeodesicArc":
                return Verdict(
                    False, i, "switch step lacks its GeodesicArc premise",
                    tuple(reports), tuple(trusted),
                )
            trusted.append(f"step {i}: geodesic arc ({step.premise.justification})")
            reports.append(
                f"step {i}: switch move; the geodesic hypothesis is recorded, "
                "not checked (no finite certificate exists for it)"
            )
        try:
            before = components(current).count
            current = _apply_step(current, step)
            after = components(current).count
        except (SiteError, ExcludedExteriorError, CertificateError) as err:
            return Verdict(False, i, f"replay failed: {err}", tuple(reports), tuple(trusted))
        if isinstance(step, ChainStep) and after - before != 1:
            return Verdict(False, i, "chain step must add exactly one component",
                           tuple(reports), tuple(trusted))
        if isinstance(step, AugChainStep) and after - before != 2:
            return Verdict(False, i, "augmented chain step must add exactly two components",
                           tuple(reports), tuple(trusted))
    if not diagram_isomorphic(current, cert.subject):
        return Verdict(
            False, len(cert.steps), "final diagram does not match the subject",
            tuple(reports), tuple(trusted),
        )
    reports.append("final diagram matches the subject")
    return Verdict(True, None, "", tuple(reports), tuple(trusted))


def _verify_abstract(cert: Certificate) -> Verdict:
    reports: list[str] = []
    trusted: list[str] = []
    if cert.base != "ExternallyAsserted" or cert.base_manifold is None:
        return Verdict(False, -1, "abstract certificates need an externally asserted base manifold")
    if not cert.base_manifold.hyperbolic:
        return Verdict(False, -1, "base manifold is not asserted hyperbolic")
    trusted.append(f"base manifold {cert.base_manifold.name}: {cert.description}")
    current = cert.base_manifold
    for i, step in enumerate(cert.steps):
        if not isinstance(step, GlueStep):
            return Verdict(False, i, "abstract certificates admit only glue steps",
                           tuple(reports), tuple(trusted))
        inner = verify(step.other)
        if not inner.valid:
            return Verdict(False, i, f"glued certificate invalid: {inner.reason}",
                           tuple(reports), tuple(trusted))
        other_m = step.other.subject
        if not isinstance(other_m, AbstractManifold):
            return Verdict(False, i, "glue step needs an abstract-manifold certificate",
                           tuple(reports), tuple(trusted))
        try:
            k1 = current.boundary_kind(step.boundary_self)
            k2 = other_m.boundary_kind(step.boundary_other)
        except GlueError as err:
            return Verdict(False, i, str(err), tuple(reports), tuple(trusted))
        if k1 != k2:
            return Verdict(False, i, f"boundary mismatch: {k1} glued to {k2}",
                           tuple(reports), tuple(trusted))
        geo = [p for p in step.premises if p.kind == "GeodesicArc"]
        if len(geo) < 2:
            return Verdict(False, i, "glue step needs two GeodesicArc premises",
                           tuple(reports), tuple(trusted))
        for p in geo:
            trusted.append(f"step {i}: geodesic arc ({p.justification})")
        current = _merge_manifolds(current, other_m, step.boundary_self, step.boundary_other)
        reports.append(f"step {i}: glued {other_m.name} along {step.boundary_self}")
    if current != cert.subject:
        return Verdict(False, len(cert.steps), "glued manifold does not match the subject",
                       tuple(reports), tuple(trusted))
    return Verdict(True, None, "", tuple(reports), tuple(trusted))


def _merge_manifolds(
    m1: AbstractManifold, m2: AbstractManifold, b1: str, b2: str
) -> AbstractManifold:
    boundaries = tuple(b for b in m1.boundaries if b[0] != b1) + tuple(
        b for b in m2.boundaries if b[0] != b2
    )
    return AbstractManifold(
        name=f"glue({m1.name},{m2.name})",
        boundaries=boundaries,
        link_components=m1.link_components + m2.link_components + ("C",),
        hyperbolic=True,
    )


def glue(
    c1: Certificate,
    c2: Certificate,
    boundary_self: str,
    boundary_other: str,
    premises: tuple[Premise, ...],
) -> Certificate:
    """The switch-move gluing operation on abstract-manifold certificates."""
    for c in (c1, c2):
        if not isinstance(c.subject, AbstractManifold):
            raise GlueError("glue operates on abstract-manifold certificates")
        if not verify(c).valid:
            raise GlueError("cannot glue an uncertified manifold")
    m1: AbstractManifold = c1.subject
    m2: AbstractManifold = c2.subject
    if m1.boundary_kind(boundary_self) != m2.boundary_kind(boundary_other):
        raise GlueError(
            f"boundaries must both be tori or both Klein bottles, got "
            f"{m1.boundary_kind(boundary_self)} and {m2.boundary_kind(boundary_other)}"
        )
    geo = [p for p in premises if p.kind == "GeodesicArc"]
    if len(geo) < 2:
        raise PremiseError("gluing needs the two geodesic-arc premises")
    step = GlueStep(c2, boundary_self, boundary_other, tuple(premises))
    merged = _merge_manifolds(m1, m2, boundary_self, boundary_other)
    return replace(c1, subject=merged, steps=c1.steps + (step,))


# -- serialization ------------------------------------------------------------------


def _evidence_doc(ev: ExteriorEvidence) -> dict:
    if isinstance(ev, Rational):
        return {"kind": "Rational", "sequence": list(ev.sequence.entries)}
    if isinstance(ev, DeclaredNonRational):
        return {"kind": "DeclaredNonRational", "justification": ev.justification}
    return {"kind": "Unchecked"}


def _evidence_from(doc: dict) -> ExteriorEvidence:
    kind = doc.get("kind")
    if kind == "Rational":
        return Rational(ConwaySequence(tuple(doc["sequence"])))
    if kind == "DeclaredNonRational":
        return DeclaredNonRational(doc.get("justification", ""))
    if kind == "Unchecked":
        return Unchecked()
    raise CertificateError(f"unknown evidence kind {kind!r}")


def _premise_doc(p: Premise) -> dict:
    return {"kind": p.kind, "justification": p.justification, "trusted": p.trusted}


def _premise_from(doc: dict) -> Premise:
    return Premise(doc["kind"], doc.get("justification", ""), doc.get("trusted", True))


def _manifold_doc(m: AbstractManifold) -> dict:
    return {
        "name": m.name,
        "boundaries": [list(b) for b in m.boundaries],
        "link_components": list(m.link_components),
        "hyperbolic": m.hyperbolic,
    }


def _manifold_from(doc: dict) -> AbstractManifold:
    return AbstractManifold(
        name=doc["name"],
        boundaries=tuple((b[0], b[1]) for b in doc.get("boundaries", [])),
        link_components=tuple(doc.get("link_components", [])),
        hyperbolic=bool(doc.get("hyperbolic", False)),
    )


def _step_doc(step: Step) -> dict:
    if isinstance(step, ChainStep):
        return {
            "kind": "ChainStep",
            "component": step.trivial_component,
            "strands": list(step.strands),
            "k": step.k,
            "evidence": _evidence_doc(step.evidence),
        }
    if isinstance(step, AugChainStep):
        return {
            "kind": "AugChainStep",
            "component": step.trivial_component,
            "strands": list(step.strands),
            "k": step.k,
            "evidence": _evidence_doc(step.evidence),
        }
    if isinstance(step, SwitchStep):
        return {
            "kind": "SwitchStep",
            "arc_g": step.arc_g,
            "arc_g2": step.arc_g2,
            "handedness": step.handedness.value,
            "premise": _premise_doc(step.premise) if step.premise else None,
        }
    if isinstance(step, HalfTwistStep):
        return {
            "kind": "HalfTwistStep",
            "component": step.component,
            "direction": step.direction,
        }
    if isinstance(step, GlueStep):
        return {
            "kind": "GlueStep",
            "other": _cert_doc(step.other),
            "boundary_self": step.boundary_self,
            "boundary_other": step.boundary_other,
            "premises": [_premise_doc(p) for p in step.premises],
        }
    raise CertificateError(f"unknown step {type(step).__name__}")


def _step_from(doc: dict) -> Step:
    kind = doc.get("kind")
    if kind == "ChainStep":
        return ChainStep(
            doc["component"], tuple(doc["strands"]), doc["k"], _evidence_from(doc["evidence"])
        )
    if kind == "AugChainStep":
        return AugChainStep(
            doc["component"], tuple(doc["strands"]), doc["k"], _evidence_from(doc["evidence"])
        )
    if kind == "SwitchStep":
        return SwitchStep(
            doc["arc_g"],
            doc["arc_g2"],
            Handedness(doc["handedness"]),
            _premise_from(doc["premise"]) if doc.get("premise") else None,
        )
    if kind == "HalfTwistStep":
        return HalfTwistStep(doc["component"], doc["direction"])
    if kind == "GlueStep":
        return GlueStep(
            _cert_from(doc["other"]),
            doc["boundary_self"],
            doc["boundary_other"],
            tuple(_premise_from(p) for p in doc.get("premises", [])),
        )
    raise CertificateError(f"unknown step kind {kind!r}")


def _collect_premises(cert: Certificate) -> list[dict]:
    out = []
    for step in cert.steps:
        if isinstance(step, SwitchStep) and step.premise is not None:
            out.append(_premise_doc(step.premise))
        if isinstance(step, GlueStep):
            out.extend(_premise_doc(p) for p in step.premises)
    return out


def _cert_doc(cert: Certificate) -> dict:
    doc: dict = {
        "version": FORMAT_VERSION,
        "base": cert.base,
        "description": cert.description,
        "augmenting": list(cert.augmenting),
        "steps": [_step_doc(s) for s in cert.steps],
        # derived summary of every recorded premise; the steps stay
        # authoritative on load
        "premises": [],
    }
    doc["premises"] = _collect_premises(cert)
    if cert.base_diagram is not None:
        doc["base_diagram"] = format_pd(cert.base_diagram)
    if cert.base_manifold is not None:
        doc["base_manifold"] = _manifold_doc(cert.base_manifold)
    if isinstance(cert.subject, LinkDiagram):
        doc["subject"] = {"kind": "diagram", "pd": format_pd(cert.subject)}
    else:
        doc["subject"] = {"kind": "manifold", "manifold": _manifold_doc(cert.subject)}
    return doc


def _cert_from(doc: dict) -> Certificate:
    if doc.get("version") != FORMAT_VERSION:
        raise CertificateError(f"unsupported certificate version {doc.get('version')!r}")
    subject_doc = doc.get("subject")
    if not isinstance(subject_doc, dict):
        raise CertificateError("certificate lacks a subject")
    if subject_doc.get("kind") == "diagram":
        subject: Union[LinkDiagram, AbstractManifold] = parse_pd(subject_doc["pd"])
    elif subject_doc.get("kind") == "manifold":
        subject = _manifold_from(subject_doc["manifold"])
    else:
        raise CertificateError("unknown subject kind")
    return Certificate(
        base=doc["base"],
        subject=subject,
        base_diagram=parse_pd(doc["base_diagram"]) if "base_diagram" in doc else None,
        base_manifold=_manifold_from(doc["base_manifold"]) if "base_manifold" in doc else None,
        augmenting=tuple(doc.get("augmenting", [])),
        description=doc.get("description", ""),
        steps=tuple(_step_from(s) for s in doc.get("steps", [])),
    )


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def serialize(cert: Certificate) -> str:
    """Canonical JSON document with a sha256 self-hash."""
    doc = _cert_doc(cert)
    doc["sha256"] = hashlib.sha256(canonical_json(doc).encode()).hexdigest()
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def deserialize(text: str) -> Certificate:
    """Parse a certificate document.

    A wrong self-hash does not reject the document; verify() re-derives
    everything semantically anyway, which is what catches tampering.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise CertificateError(f"not a certificate document: {err}") from err
    if not isinstance(doc, dict):
        raise CertificateError("certificate document must be a JSON object")
    return _cert_from(doc)


def hash_ok(text: str) -> bool:
    doc = json.loads(text)
    claimed = doc.pop("sha256", None)
    return claimed == hashlib.sha256(canonical_json(doc).encode()).hexdigest()
