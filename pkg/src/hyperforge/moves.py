"""The diagram rewrites: chain move, augmented chain move, switch move,
half-twist on a twice-punctured disk, plus site scanning and the Tk
template.

A chain site is a trivial component C with exactly four crossings, two
with each of two strands passing through its disk.  Both clasp phases
are accepted: when the crossings around C alternate, the replacement
implicitly performs the type-I Reidemeister normalization (the spliced
template absorbs the kink), so outputs carry no stray crossing.

Moves are local: crossings not incident to the site are preserved
verbatim, arc labels outside the ball unchanged.  The one exception is a
half twist that genuinely reverses a strand segment, which re-expresses
the under-crossings along that segment (slot rotation by two; labels
still unchanged).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Optional

from . import tangle as _tangle
from .classifier import ExteriorEvidence, Rational, excluded_exterior
from .diagram import (
    DiagramBuilder,
    LinkDiagram,
    components,
    validate,
)
from .errors import ExcludedExteriorError, InvalidDiagramError, SiteError

# Clasp chirality of the Tk template (gamma1-C1, C1-C2, C2-gamma2).
# Calibrated so the template's exceptional closures are the genuine
# non-hyperbolic links: the bare closure with the 0-tangle exterior is the
# non-alternating 3-chain, and the "-2 0" exterior closure carries the
# parallel-component linking structure of the fourth exceptional link
# (all four nonzero pairwise linking numbers equal).  See the calibration
# tests in tests/test_moves.py.
TK_CLASP_CHIRALITY = (-1, +1, -1)
SWITCH_CLASP_CHIRALITY = (+1, +1)
# Chirality of one positive half-twist in a twist region (k > 0, gap twists,
# half_twist(+1)); must match the tangle module's east region for the Tk
# closure identity.
TWIST_CHIRALITY_POS = _tangle.EAST_CHIRALITY_POS


class Handedness(enum.Enum):
    """The two switch-move variants (the two half-twist parity classes)."""

    PositiveSkew = "pos"
    NegativeSkew = "neg"


@dataclass(frozen=True)
class ChainSite:
    """A trivial component C clasping two strands through its disk.

    ``crossings`` are C's four crossings in C-cyclic order (q0 q1 q2 q3)
    with clasp pairs (q0, q1) and (q2, q3); ``strand1``/``strand2`` are the
    inner arcs between each pair; ``stubs`` are the four outer strand arcs
    at q0..q3 (the ball boundary).  ``pattern`` records whether C's own
    over/under word alternates or not (both phases admit the move).
    """

    trivial_component: int
    strand1: int
    strand2: int
    crossings: tuple[int, int, int, int]
    stubs: tuple[int, int, int, int]
    pattern: str

    def key(self) -> tuple:
        return (self.trivial_component, self.strand1, self.strand2)


@dataclass(frozen=True)
class SwitchSite:
    """Two arcs g, g' to surger, plus the recorded geodesic premise."""

    arc_g: int
    arc_g2: int
    geodesic_premise: bool = True


@dataclass(frozen=True)
class TkTemplate:
    """The two-component insert: C1 clasps gamma1, C1 clasps C2, C2 clasps
    gamma2, with |k| half-twists flush against the SW/SE boundary pair."""

    k: int

    @property
    def crossing_count(self) -> int:
        return 6 + abs(self.k)

    def emit(self, bld: DiagramBuilder) -> dict:
        """Build the fragment; returns NW/NE/SW/SE boundary ports.

        gamma1 runs NW..NE along the top; gamma2 runs SW..SE along the
        bottom with the twist region between its legs at the boundary.
        """
        x1, x2, x3 = TK_CLASP_CHIRALITY
        c1 = bld.twist_region(2, x1)
        c2 = bld.twist_region(2, x2)
        c3 = bld.twist_region(2, x3)
        chi = TWIST_CHIRALITY_POS * (1 if self.k >= 0 else -1)
        tw = bld.twist_region(abs(self.k), chi)
        # horizontal clasp regions stacked top to bottom; in the rotated
        # frame the north rail is (in_r, out_r), the south rail (in_l, out_l).
        # gamma1 rides c1's north rail; C1 = c1 south + c2 north;
        # C2 = c2 south + c3 north; gamma2 rides c3's south rail with its
        # legs dropping through the twist region to the SW/SE boundary.
        bld.weld(c1["in_l"], c2["in_r"])
        bld.weld(c1["out_l"], c2["out_r"])
        bld.weld(c2["in_l"], c3["in_r"])
        bld.weld(c2["out_l"], c3["out_r"])
        bld.weld(c3["in_l"], tw["in_l"])
        bld.weld(c3["out_l"], tw["in_r"])
        return {
            "NW": c1["in_r"],
            "NE": c1["out_r"],
            "SW": tw["out_l"],
            "SE": tw["out_r"],
        }


def build_tk(k: int) -> TkTemplate:
    return TkTemplate(k)


# -- site scanning ----------------------------------------------------------------


def _passages(d: LinkDiagram, comp: int) -> list[tuple[int, int]]:
    """(crossing, slot) passages of a component, in traversal order."""
    steps = d._analysis.steps
    if comp >= len(steps):
        return []
    return [(ci, si) for _, (ci, si) in steps[comp]]


def _other_strand_arcs(d: LinkDiagram, ci: int, si: int) -> tuple[int, int]:
    """The two arcs of the strand crossing ``comp``'s passage (ci, si)."""
    x = d.crossings[ci]
    if si % 2 == 0:
        return (x.slots[1], x.slots[3])
    return (x.slots[0], x.slots[2])


def find_chain_sites(d: LinkDiagram) -> tuple[ChainSite, ...]:
    """All components matching the chain-site pattern (either clasp phase)."""
    d.require_valid()
    part = components(d)
    sites: list[ChainSite] = []
    for comp in range(len(part.cycles)):
        pas = _passages(d, comp)
        if len(pas) != 4:
            continue
        comp_arcs = set(part.arcs_of(comp))
        if any(
            set(_other_strand_arcs(d, ci, si)) & comp_arcs for ci, si in pas
        ):
            continue  # C crosses itself
        word = [si % 2 for _, si in pas]
        alternating = all(word[i] != word[(i + 1) % 4] for i in range(4))
        pattern = "alternating" if alternating else "parallel"
        for shift in (0, 1):
            order = [pas[(shift + j) % 4] for j in range(4)]
            pairs = [(order[0], order[1]), (order[2], order[3])]
            inners: list[int] = []
            stubs: list[int] = []
            ok = True
            for (ca, sa), (cb, sb) in pairs:
                if d.sign(ca) != d.sign(cb):
                    ok = False
                    break
                arcs_a = set(_other_strand_arcs(d, ca, sa))
                arcs_b = set(_other_strand_arcs(d, cb, sb))
                shared = {
                    x
                    for x in arcs_a & arcs_b
                    if {o[0] for o in d._analysis.occ[x]} == {ca, cb}
                }
                if len(shared) != 1:
                    ok = False
                    break
                inner = shared.pop()
                inners.append(inner)
                outer_a = (arcs_a - {inner}).pop() if arcs_a - {inner} else inner
                outer_b = (arcs_b - {inner}).pop() if arcs_b - {inner} else inner
                stubs.extend([outer_a, outer_b])
            if not ok or len(inners) != 2 or inners[0] == inners[1]:
                continue
            sites.append(
                ChainSite(
                    trivial_component=comp,
                    strand1=inners[0],
                    strand2=inners[1],
                    crossings=tuple(ci for ci, _ in pairs[0] + pairs[1]),
                    stubs=tuple(stubs),
                    pattern=pattern,
                )
            )
    uniq: dict[tuple, ChainSite] = {}
    for s in sites:
        uniq.setdefault((s.trivial_component, frozenset((s.strand1, s.strand2))), s)
    return tuple(sorted(uniq.values(), key=lambda s: s.key()))


def _resolve_chain_site(d: LinkDiagram, site: ChainSite) -> ChainSite:
    for s in find_chain_sites(d):
        if s.key() == site.key():
            return s
    raise SiteError(
        f"no chain site at component {site.trivial_component} "
        f"strands ({site.strand1}, {site.strand2})"
    )


def _gate_evidence(evidence: ExteriorEvidence, k: int) -> None:
    if isinstance(evidence, Rational):
        f = _tangle.fraction(evidence.sequence)
        kind = excluded_exterior(f, k)
        if kind is not None:
            raise ExcludedExteriorError(kind, f, k)


# -- the chain moves ----------------------------------------------------------------


def chain_move(
    d: LinkDiagram, site: ChainSite, k: int, evidence: ExteriorEvidence
) -> LinkDiagram:
    """Replace the trivial component C by the Tk template."""
    site = _resolve_chain_site(d, site)
    _gate_evidence(evidence, k)
    # strand1's freed ends take the gamma1 boundary, strand2's the
    # gamma2/twist side; the stub cyclic order around the removed ball can
    # run either way, so try both orientations (first planar one wins)
    last_err: Optional[Exception] = None
    for asg in (("NE", "NW", "SW", "SE"), ("NW", "NE", "SE", "SW")):
        bld = DiagramBuilder(base=d, remove=set(site.crossings))
        ports = TkTemplate(k).emit(bld)
        for stub_arc, port in zip(site.stubs, asg):
            bld.weld(bld.stub(stub_arc), ports[port])
        try:
            out = bld.build()
        except (AssertionError, InvalidDiagramError) as err:
            last_err = err
            continue
        if validate(out).valid:
            return out
    raise SiteError(f"chain splice found no planar wiring ({last_err})")


def augmented_chain_move(
    d: LinkDiagram, site: ChainSite, k: int, evidence: ExteriorEvidence
) -> LinkDiagram:
    """Chain move that keeps C: splice Tk into the strands inside C's disk."""
    site = _resolve_chain_site(d, site)
    _gate_evidence(evidence, k)
    q = site.crossings
    last_err: Optional[Exception] = None
    for flip_x, flip_y in ((0, 0), (0, 1), (1, 0), (1, 1)):
        bld = DiagramBuilder(base=d)
        x_t, x_h = bld.cut(site.strand1)
        y_t, y_h = bld.cut(site.strand2)
        # match cut ends to C-cyclic crossings q0..q3
        x_at_q0 = d.tail_of(site.strand1)[0] == q[0]
        y_at_q2 = d.tail_of(site.strand2)[0] == q[2]
        e_nw, e_ne = (x_t, x_h) if x_at_q0 != bool(flip_x) else (x_h, x_t)
        e_se, e_sw = (y_t, y_h) if y_at_q2 != bool(flip_y) else (y_h, y_t)
        ports = TkTemplate(k).emit(bld)
        try:
            bld.weld(e_nw, ports["NW"])
            bld.weld(e_ne, ports["NE"])
            bld.weld(e_se, ports["SE"])
            bld.weld(e_sw, ports["SW"])
            out = bld.build()
        except (AssertionError, InvalidDiagramError) as err:
            last_err = err
            continue
        if validate(out).valid:
            return out
    raise SiteError(f"augmented chain splice found no planar wiring ({last_err})")


# -- switch move and half-twist -------------------------------------------------------


def _new_ring_component(d: LinkDiagram, new_crossings: set[int]) -> int:
    part = components(d)
    for comp in range(len(part.cycles)):
        pas = _passages(d, comp)
        if len(pas) == 4 and {ci for ci, _ in pas} <= new_crossings:
            arcs = set(part.arcs_of(comp))
            others = set()
            for ci, si in pas:
                others |= set(_other_strand_arcs(d, ci, si))
            if not (others & arcs):
                return comp
    raise AssertionError("inserted ring not found")


def switch_move(d: LinkDiagram, site: SwitchSite, h: Handedness) -> LinkDiagram:
    """Surger arcs g, g' and add a trivial component C encircling both.

    The two variants are the two half-twist parity classes: NegativeSkew
    keeps the new strands parallel inside the ball; PositiveSkew applies
    one positive half-twist along C's disk.
    """
    d.require_valid()
    g, u = site.arc_g, site.arc_g2
    if g == u:
        raise SiteError("switch move needs two distinct arcs")
    for arc in (g, u):
        if arc not in d._analysis.occ:
            raise SiteError(f"no arc {arc}")
    if not any(g in fa and u in fa for fa in d._analysis.face_arcs):
        raise SiteError(f"arcs {g} and {u} do not share a face")
    n_old = len(d.crossings)
    result = _insert_clasped_ring(d, g, u, switched=True)
    if h is Handedness.PositiveSkew:
        ring = _new_ring_component(result, set(range(n_old, n_old + 4)))
        result = half_twist(result, ring, +1)
    return result


def _insert_clasped_ring(d: LinkDiagram, g: int, u: int, switched: bool) -> LinkDiagram:
    """Cut arcs g and u and thread them through a new trivial ring's disk.

    With ``switched`` the surgered strands reconnect g-end to u-end where
    the face geometry allows it; the ring C rides between the two strand
    rails (zigzag, so the disk pattern stays recognizable).  The first
    planar end-assignment in preference order wins.
    """
    xa, xb = SWITCH_CLASP_CHIRALITY
    # candidate assignments of the four cut ends onto (ca.in_l, ca.out_l,
    # cb.in_r, cb.out_r); 'switched' pairings route one g-end and one u-end
    # through each clasp
    switched_assignments = []
    unswitched_assignments = []
    for a_pair, b_pair in (
        (("g_t", "u_h"), ("u_t", "g_h")),
        (("g_t", "u_t"), ("u_h", "g_h")),
        (("g_h", "u_t"), ("u_h", "g_t")),
        (("g_h", "u_h"), ("u_t", "g_t")),
    ):
        for fa in (0, 1):
            for fb in (0, 1):
                pa = a_pair if not fa else a_pair[::-1]
                pb = b_pair if not fb else b_pair[::-1]
                switched_assignments.append(pa + pb)
    for a_pair, b_pair in ((("g_t", "g_h"), ("u_t", "u_h")),):
        for fa in (0, 1):
            for fb in (0, 1):
                pa = a_pair if not fa else a_pair[::-1]
                pb = b_pair if not fb else b_pair[::-1]
                unswitched_assignments.append(pa + pb)
    order = switched_assignments + unswitched_assignments
    if not switched:
        order = unswitched_assignments + switched_assignments
    last_err: Optional[Exception] = None
    for asg in order:
        bld = DiagramBuilder(base=d)
        g_t, g_h = bld.cut(g)
        u_t, u_h = bld.cut(u)
        ends = {"g_t": g_t, "g_h": g_h, "u_t": u_t, "u_h": u_h}
        ca = bld.twist_region(2, xa)
        cb = bld.twist_region(2, xb)
        bld.weld(ca["in_r"], cb["in_l"])
        bld.weld(cb["out_l"], ca["out_r"])
        try:
            bld.weld(ends[asg[0]], ca["in_l"])
            bld.weld(ends[asg[1]], ca["out_l"])
            bld.weld(ends[asg[2]], cb["in_r"])
            bld.weld(ends[asg[3]], cb["out_r"])
            cand = bld.build()
        except (AssertionError, InvalidDiagramError) as err:
            last_err = err
            continue
        if validate(cand).valid:
            return cand
    raise SiteError(f"no planar ring insertion for arcs {g}, {u} ({last_err})")


def _disk_runs(d: LinkDiagram, comp: int):
    """Pattern scan for a twice-punctured-disk boundary component.

    Returns (passage pairs, run1 arcs, run2 arcs) where each run is the
    chain of strand arcs through the disk between a clasp pair (possibly
    through twist crossings inserted by earlier half-twists).
    """
    d.require_valid()
    part = components(d)
    if comp >= len(part.cycles):
        raise SiteError(f"component {comp} has no crossings")
    pas = _passages(d, comp)
    if len(pas) != 4:
        raise SiteError(
            f"component {comp} crosses {len(pas)} times; the pattern needs 4"
        )
    comp_arcs = set(part.arcs_of(comp))
    if any(set(_other_strand_arcs(d, ci, si)) & comp_arcs for ci, si in pas):
        raise SiteError(f"component {comp} crosses itself")
    c_crossings = {ci for ci, _ in pas}

    def inner_run(ca: int, sa: int, cb: int) -> Optional[set[int]]:
        # follow the other strand from crossing ca to the first return to C;
        # the inner side is the shortest walk that lands on the pair partner
        candidates = []
        for start in _other_strand_arcs(d, ca, sa):
            run = {start}
            occs = [o for o in d._analysis.occ[start] if o[0] != ca]
            if not occs:
                continue  # both ends at ca
            cur = occs[0]
            steps = 0
            dead = False
            while cur[0] not in c_crossings:
                out = (cur[0], (cur[1] + 2) % 4)
                nxt_arc = d.crossings[out[0]].slots[out[1]]
                run.add(nxt_arc)
                a, b = d._analysis.occ[nxt_arc]
                cur = b if a == out else a
                steps += 1
                if steps > 4 * len(d.crossings):
                    dead = True
                    break
            if not dead and cur[0] == cb:
                candidates.append(run)
        if not candidates:
            return None
        return min(candidates, key=len)

    # adjacent pairings are clasps (equal signs = genuinely linked); the
    # diagonal pairing appears after a half twist rotates the punctures.
    # Among valid pairings the one with the shortest runs is the disk
    # interior (outer detours around the rest of the link are longer).
    candidates = [
        (((pas[0], pas[1]), (pas[2], pas[3])), True),
        (((pas[1], pas[2]), (pas[3], pas[0])), True),
        (((pas[0], pas[2]), (pas[1], pas[3])), False),
    ]
    found = []
    for pairs, check_signs in candidates:
        if check_signs and any(d.sign(pa[0]) != d.sign(pb[0]) for pa, pb in pairs):
            continue
        runs = []
        for (ca, sa), (cb, sb) in pairs:
            run = inner_run(ca, sa, cb)
            if run is None:
                break
            runs.append(run)
        if len(runs) == 2 and not (runs[0] & runs[1]):
            found.append((len(runs[0]) + len(runs[1]), len(found), pairs, runs))
    if not found:
        raise SiteError(f"component {comp} does not bound a recognizable disk")
    _, _, pairs, runs = min(found)
    return pairs, runs[0], runs[1]


def half_twist(d: LinkDiagram, c: int, direction: int) -> LinkDiagram:
    """Cut along c's twice-punctured disk, twist a half turn, reglue.

    One crossing of the given handedness appears between the two strands
    inside the disk and their exits swap (rotating the punctures forces
    the cross-joined reconnection, so the strands' component membership
    can change).  The crossing is placed flush against c's least-labeled
    arc whose face touches both strand runs, so repeated half-twists
    stack and opposite pairs cancel by an R2 move.
    """
    if direction not in (+1, -1):
        raise SiteError("direction must be +1 or -1")
    pairs, run1, run2 = _disk_runs(d, c)
    part = components(d)
    c_arcs = sorted(part.arcs_of(c))
    spot = None
    for e in c_arcs:
        for face, arcs_in_face in zip(d._analysis.faces, d._analysis.face_arcs):
            if e not in arcs_in_face:
                continue
            k = len(arcs_in_face)
            for i in range(k):
                if arcs_in_face[i] != e:
                    continue
                alpha = arcs_in_face[(i - 1) % k]
                beta = arcs_in_face[(i + 1) % k]
                if alpha in run1 and beta in run2:
                    spot = (alpha, beta)
                elif alpha in run2 and beta in run1:
                    spot = (beta, alpha)
                if spot:
                    break
            if spot:
                break
        if spot:
            break
    if spot is None:
        raise SiteError(f"no insertion face inside component {c}'s disk")
    alpha, beta = spot
    chi = TWIST_CHIRALITY_POS * direction
    # Rotating the disk's punctures by a half turn exchanges where the two
    # strands exit, so the cut pieces cross-join through the new crossing
    # (legs interleave around the insertion face); opposite directions give
    # opposite crossing chirality, which is why a +1/-1 pair cancels by R2.
    canonical = ("a_t", "b_t", "b_h", "a_h")  # ports in_l, in_r, out_r, out_l
    perms = [canonical] + [
        p for p in itertools.permutations(("a_t", "a_h", "b_t", "b_h")) if p != canonical
    ]
    last_err: Optional[Exception] = None
    # strict pass first; the reorienting pass covers twists whose
    # cross-join genuinely reverses a strand segment of one component
    for allow_reorient in (False, True):
        for asg in perms:
            bld = DiagramBuilder(base=d)
            a_t, a_h = bld.cut(alpha)
            b_t, b_h = bld.cut(beta)
            ends = {"a_t": a_t, "a_h": a_h, "b_t": b_t, "b_h": b_h}
            x = bld.twist_region(1, chi)
            try:
                bld.weld(ends[asg[0]], x["in_l"])
                bld.weld(ends[asg[1]], x["in_r"])
                bld.weld(ends[asg[2]], x["out_r"])
                bld.weld(ends[asg[3]], x["out_l"])
                cand = bld.build(allow_reorient=allow_reorient)
            except (AssertionError, InvalidDiagramError) as err:
                last_err = err
                continue
            if validate(cand).valid:
                return cand
    raise SiteError(f"half twist found no planar wiring ({last_err})")


def augmenting_circle(d: LinkDiagram, arc_a: int, arc_b: int) -> LinkDiagram:
    """Add a trivial circle clasping two co-face arcs (no surgery).

    This is the switch move's ring insertion alone; useful for building
    augmented alternating diagrams.
    """
    d.require_valid()
    if arc_a == arc_b:
        raise SiteError("need two distinct arcs")
    if not any(arc_a in fa and arc_b in fa for fa in d._analysis.face_arcs):
        raise SiteError(f"arcs {arc_a} and {arc_b} do not share a face")
    return _insert_clasped_ring(d, arc_a, arc_b, switched=False)


def remove_component(d: LinkDiagram, comp: int) -> LinkDiagram:
    """Delete a component; strands that crossed it continue straight."""
    d.require_valid()
    part = components(d)
    if comp >= len(part.cycles):
        if comp >= part.count:
            raise SiteError(f"no component {comp}")
        return LinkDiagram(d.crossings, loops=d.loops - 1, ambient=d.ambient)
    comp_arcs = set(part.arcs_of(comp))
    removed = {ci for ci, _ in _passages(d, comp)}
    parent: dict[int, int] = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for ci in removed:
        x = d.crossings[ci]
        for pair in (x.under(), x.over()):
            if pair[0] in comp_arcs or pair[1] in comp_arcs:
                continue
            union(pair[0], pair[1])
    keep_idx = [i for i in range(len(d.crossings)) if i not in removed]
    remap = {old: new for new, old in enumerate(keep_idx)}
    crossings = [d.crossings[i] for i in keep_idx]
    occ = d._analysis.occ
    loops = d.loops
    groups: dict[int, set[int]] = {}
    for a in parent:
        groups.setdefault(find(a), set()).add(a)
    from .diagram import _relabel_occurrence

    for root, members in groups.items():
        far = [o for a in members for o in occ[a] if o[0] not in removed]
        if not far:
            loops += 1
            continue
        for o in far:
            _relabel_occurrence(crossings, (remap[o[0]], o[1]), root)
    out = LinkDiagram(tuple(crossings), loops=loops, ambient=d.ambient)
    out.require_valid()
    return out
