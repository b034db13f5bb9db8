"""Link diagrams as labeled PD codes.

Conventions (fixed once, used by the text format and every move):

* A crossing is a 4-tuple of arc labels in counterclockwise rotation
  starting at the incoming under-strand.  Slots 0 and 2 carry the
  under-strand, slots 1 and 3 the over-strand.
* Components are oriented.  Orientation is forced wherever a component
  passes under (it must enter at slot 0); a component that never goes
  under is oriented from its least arc toward the smaller neighbor.
* Crossing sign: +1 when the over-strand enters at slot 3, -1 when it
  enters at slot 1.
* Crossing-free unknot components cannot be expressed by crossing
  tuples; they are stored as a count (``loops``).

Every value here is immutable and every operation is a pure function.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import FormatError, InvalidDiagramError, SiteError

DEFAULT_STEP_BUDGET = 1000

Slot = tuple[int, int]  # (crossing index, slot index)


@dataclass(frozen=True)
class Crossing:
    """One crossing: arc labels CCW from the incoming under-strand."""

    slots: tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if len(self.slots) != 4 or any(
            not isinstance(a, int) or a < 1 for a in self.slots
        ):
            raise FormatError(f"crossing needs 4 positive arc labels, got {self.slots}")

    def under(self) -> tuple[int, int]:
        return (self.slots[0], self.slots[2])

    def over(self) -> tuple[int, int]:
        return (self.slots[1], self.slots[3])

    def rotated(self, r: int) -> "Crossing":
        s = self.slots
        return Crossing(tuple(s[(i + r) % 4] for i in range(4)))


@dataclass(frozen=True)
class ValidityReport:
    double_occurrence: bool
    component_consistent: bool
    planar: bool
    vertices: int
    edges: int
    faces: int
    graph_components: int
    problems: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return self.double_occurrence and self.component_consistent and self.planar

    def summary(self) -> str:
        if self.valid:
            return (
                f"valid (V={self.vertices} E={self.edges} F={self.faces} "
                f"c={self.graph_components})"
            )
        return "; ".join(self.problems) or "invalid"


@dataclass(frozen=True)
class ComponentPartition:
    """Arc cycles (oriented, least-arc first) followed by crossing-free loops."""

    cycles: tuple[tuple[int, ...], ...]
    loops: int

    @property
    def count(self) -> int:
        return len(self.cycles) + self.loops

    def arcs_of(self, comp: int) -> tuple[int, ...]:
        if comp < len(self.cycles):
            return self.cycles[comp]
        if comp < self.count:
            return ()
        raise SiteError(f"no component {comp}")

    def component_of(self, arc: int) -> int:
        for i, cyc in enumerate(self.cycles):
            if arc in cyc:
                return i
        raise SiteError(f"arc {arc} not in any component")


class _Analysis:
    """One-pass derivation of everything validate/components/signs need."""

    def __init__(self, diagram: "LinkDiagram"):
        self.d = diagram
        self.problems: list[str] = []
        self.occ: dict[int, list[Slot]] = {}
        self.steps: list[list[tuple[int, Slot]]] = []  # per component: (arc, head)
        self.cycles: list[tuple[int, ...]] = []
        self.head: dict[int, Slot] = {}
        self.signs: dict[int, int] = {}
        self.faces: list[tuple[Slot, ...]] = []
        self.face_arcs: list[tuple[int, ...]] = []
        self.graph_comp_of: dict[int, int] = {}
        self.n_graph_comps = 0
        self.double_ok = self._index_occurrences()
        self.consistent = self.double_ok and self._trace()
        self.planar_ok = self.double_ok and self._faces_and_euler()

    # stage 1: occurrences

    def _index_occurrences(self) -> bool:
        ok = True
        for ci, x in enumerate(self.d.crossings):
            for si, arc in enumerate(x.slots):
                self.occ.setdefault(arc, []).append((ci, si))
        for arc, places in sorted(self.occ.items()):
            if len(places) != 2:
                self.problems.append(f"arc {arc} used {len(places)} times (need 2)")
                ok = False
        return ok

    # stage 2: strand tracing and orientation

    def _other(self, arc: int, slot: Slot) -> Slot:
        a, b = self.occ[arc]
        return b if slot == a else a

    def _walk(self, arc: int, head_index: int) -> list[tuple[int, Slot]]:
        start = (arc, self.occ[arc][head_index])
        steps = [start]
        cur = start
        while True:
            ci, si = cur[1]
            out = (si + 2) % 4
            nxt_arc = self.d.crossings[ci].slots[out]
            nxt = (nxt_arc, self._other(nxt_arc, (ci, out)))
            if nxt == start:
                return steps
            steps.append(nxt)
            cur = nxt
            if len(steps) > 4 * len(self.d.crossings) + 4:
                raise AssertionError("strand walk did not close")

    def _choose_direction(
        self, arc: int, frozen: set[int]
    ) -> tuple[list[tuple[int, Slot]], bool]:
        """Pick the traversal direction of arc's component.

        Frozen crossings vote through their under-slots; with no votes the
        component is oriented from its least arc toward the smaller
        neighbor.  Returns (steps, votes_conflict).
        """
        fwd = self._walk(arc, 1)
        ups = any(si == 0 and ci in frozen for _, (ci, si) in fwd)
        downs = any(si == 2 and ci in frozen for _, (ci, si) in fwd)
        if ups and downs:
            return fwd, True
        if downs:
            return self._walk(arc, 0), False
        if not ups:
            rev = self._walk(arc, 0)
            if len(fwd) > 1 and rev[1][0] < fwd[1][0]:
                return rev, False
        return fwd, False

    def _trace(self) -> bool:
        seen: set[int] = set()
        ok = True
        frozen = set(range(len(self.d.crossings)))
        for arc in sorted(self.occ):
            if arc in seen:
                continue
            steps, conflict = self._choose_direction(arc, frozen)
            if conflict:
                self.problems.append(
                    f"component of arc {arc} has conflicting under-strand directions"
                )
                ok = False
            arcs = [a for a, _ in steps]
            i = arcs.index(min(arcs))
            steps = steps[i:] + steps[:i]
            for a, head in steps:
                seen.add(a)
                self.head[a] = head
            self.steps.append(steps)
            for a, (ci, si) in steps:
                if si == 1:
                    self.signs[ci] = -1
                elif si == 3:
                    self.signs[ci] = +1
        self.steps.sort(key=lambda st: st[0][0])
        self.cycles = [tuple(a for a, _ in st) for st in self.steps]
        if ok:
            for ci in range(len(self.d.crossings)):
                if ci not in self.signs:
                    self.problems.append(f"crossing {ci} never traversed as over-strand")
                    ok = False
        return ok

    # stage 3: faces and the Euler check

    def _faces_and_euler(self) -> bool:
        d = self.d
        n = len(d.crossings)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for places in self.occ.values():
            (c1, _), (c2, _) = places
            r1, r2 = find(c1), find(c2)
            if r1 != r2:
                parent[r1] = r2
        comp_ids: dict[int, int] = {}
        for ci in range(n):
            comp_ids.setdefault(find(ci), len(comp_ids))
        self.graph_comp_of = {ci: comp_ids[find(ci)] for ci in range(n)}
        self.n_graph_comps = len(comp_ids)

        # darts: (arc, head occurrence index); face turn: arrive at (ci, si),
        # leave along the arc at slot (si + 1) % 4
        visited: set[tuple[int, int]] = set()
        for arc in sorted(self.occ):
            for e in (0, 1):
                if (arc, e) in visited:
                    continue
                corners: list[Slot] = []
                arcs_here: list[int] = []
                cur = (arc, e)
                while cur not in visited:
                    visited.add(cur)
                    a, idx = cur
                    arcs_here.append(a)
                    ci, si = self.occ[a][idx]
                    corners.append((ci, si))
                    out = (si + 1) % 4
                    nxt = self.d.crossings[ci].slots[out]
                    o1, _ = self.occ[nxt]
                    nxt_idx = 1 if o1 == (ci, out) else 0
                    cur = (nxt, nxt_idx)
                self.faces.append(tuple(corners))
                self.face_arcs.append(tuple(arcs_here))

        ok = True
        v = [0] * self.n_graph_comps
        e = [0] * self.n_graph_comps
        f = [0] * self.n_graph_comps
        for ci in range(n):
            v[self.graph_comp_of[ci]] += 1
        for places in self.occ.values():
            e[self.graph_comp_of[places[0][0]]] += 1
        for face in self.faces:
            f[self.graph_comp_of[face[0][0]]] += 1
        for g in range(self.n_graph_comps):
            if v[g] - e[g] + f[g] != 2:
                self.problems.append(
                    f"graph component {g} fails Euler check: "
                    f"V={v[g]} E={e[g]} F={f[g]}"
                )
                ok = False
        return ok

    def report(self) -> ValidityReport:
        n = len(self.d.crossings)
        total_comps = self.n_graph_comps + self.d.loops
        # shared outer face across all pieces of the diagram
        f_total = len(self.faces) + 2 * self.d.loops
        if total_comps > 1:
            f_total -= total_comps - 1
        return ValidityReport(
            double_occurrence=self.double_ok,
            component_consistent=self.consistent,
            planar=self.planar_ok,
            vertices=n,
            edges=sum(len(p) for p in self.occ.values()) // 2,
            faces=f_total,
            graph_components=total_comps,
            problems=tuple(self.problems),
        )


@dataclass(frozen=True)
class LinkDiagram:
    """A link diagram: crossings plus a count of crossing-free loops."""

    crossings: tuple[Crossing, ...] = ()
    loops: int = 0
    ambient: str = "S3"

    def __post_init__(self):
        object.__setattr__(self, "crossings", tuple(self.crossings))
        if self.loops < 0:
            raise FormatError("loop count must be nonnegative")

    @cached_property
    def _analysis(self) -> _Analysis:
        return _Analysis(self)

    @cached_property
    def arcs(self) -> tuple[int, ...]:
        return tuple(sorted(self._analysis.occ))

    def occurrences(self, arc: int) -> tuple[Slot, ...]:
        return tuple(self._analysis.occ[arc])

    def require_valid(self) -> None:
        rep = self._analysis.report()
        if not rep.valid:
            raise InvalidDiagramError(rep)

    def sign(self, ci: int) -> int:
        self.require_valid()
        return self._analysis.signs[ci]

    def head_of(self, arc: int) -> Slot:
        """The occurrence an arc flows into (per the assigned orientation)."""
        self.require_valid()
        return self._analysis.head[arc]

    def tail_of(self, arc: int) -> Slot:
        self.require_valid()
        return self._analysis._other(arc, self._analysis.head[arc])

    def faces(self) -> tuple[tuple[Slot, ...], ...]:
        self.require_valid()
        return tuple(self._analysis.faces)

    def face_arcs(self) -> tuple[tuple[int, ...], ...]:
        self.require_valid()
        return tuple(self._analysis.face_arcs)

    def fresh_arc(self) -> int:
        return (max(self.arcs) if self.arcs else 0) + 1

    def __repr__(self):
        return f"LinkDiagram({len(self.crossings)} crossings, {self.loops} loops)"


# -- basic operations ----------------------------------------------------------


def validate(d: LinkDiagram) -> ValidityReport:
    """Check double-occurrence, orientation consistency, and planarity."""
    return d._analysis.report()


def components(d: LinkDiagram) -> ComponentPartition:
    d.require_valid()
    return ComponentPartition(cycles=tuple(d._analysis.cycles), loops=d.loops)


def linking_number(d: LinkDiagram, a: int, b: int) -> int:
    """Half the signed count of crossings between components a and b."""
    if a == b:
        raise SiteError("linking number needs two distinct components")
    part = components(d)
    arcs_a = set(part.arcs_of(a))
    arcs_b = set(part.arcs_of(b))
    total = 0
    for ci, x in enumerate(d.crossings):
        under, over = x.slots[0], x.slots[1]
        if (under in arcs_a and over in arcs_b) or (under in arcs_b and over in arcs_a):
            total += d.sign(ci)
    if total % 2 != 0:
        raise AssertionError("odd signed crossing sum between two components")
    return total // 2


def is_alternating(d: LinkDiagram) -> bool:
    d.require_valid()
    for steps in d._analysis.steps:
        word = [si % 2 for _, (_, si) in steps]
        if not word:
            continue
        if len(word) % 2 == 1:
            return False
        if any(word[i] == word[(i + 1) % len(word)] for i in range(len(word))):
            return False
    return True


def nugatory_crossings(d: LinkDiagram) -> tuple[int, ...]:
    """Crossings with two opposite corners on the same face."""
    d.require_valid()
    out = set()
    for face in d._analysis.faces:
        seen: dict[int, set[int]] = {}
        for ci, k in face:
            seen.setdefault(ci, set()).add(k)
        for ci, ks in seen.items():
            if any((k + 2) % 4 in ks for k in ks):
                out.add(ci)
    return tuple(sorted(out))


def is_reduced(d: LinkDiagram) -> bool:
    return not nugatory_crossings(d)


def is_split(d: LinkDiagram) -> bool:
    d.require_valid()
    return d._analysis.n_graph_comps + d.loops > 1


def two_edge_cuts(d: LinkDiagram) -> tuple[tuple[int, int], ...]:
    """Arc pairs whose removal disconnects crossings from crossings."""
    d.require_valid()
    n = len(d.crossings)
    if n < 2:
        return ()
    occ = d._analysis.occ
    arcs = sorted(occ)
    cuts = []
    for e, f in itertools.combinations(arcs, 2):
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for arc in arcs:
            if arc in (e, f):
                continue
            (c1, _), (c2, _) = occ[arc]
            r1, r2 = find(c1), find(c2)
            if r1 != r2:
                parent[r1] = r2
        if len({find(ci) for ci in range(n)}) > 1:
            cuts.append((e, f))
    return tuple(cuts)


def is_prime_diagram(d: LinkDiagram) -> bool:
    """No 2-edge cut of the plane graph separating crossings on both sides."""
    if is_split(d):
        return False
    if len(d.crossings) < 2:
        return True
    return not two_edge_cuts(d)


# -- normalization helper --------------------------------------------------------


def _renormalize(
    crossings: Sequence[Crossing],
    loops: int,
    frozen: set[int],
    ambient: str = "S3",
    allow_reorient: bool = False,
) -> LinkDiagram:
    """Rotate non-frozen crossings by 2 where needed to meet the convention.

    Frozen crossings vote for strand directions through their under-slots;
    non-frozen ones rotate so the incoming under-strand sits at slot 0.
    CCW rotation and the under/over split are never changed.  With
    ``allow_reorient`` a conflicted component (a move genuinely reversed a
    strand segment, as a half twist on two strands of one component does)
    takes the direction of its first frozen under-passage and the minority
    frozen crossings rotate by 2 as well; arc labels never change.
    """
    probe = LinkDiagram(tuple(crossings), loops=loops, ambient=ambient)
    ana = probe._analysis
    if not ana.double_ok:
        raise InvalidDiagramError(ana.report())
    out = list(crossings)
    seen: set[int] = set()
    for arc in sorted(ana.occ):
        if arc in seen:
            continue
        steps, conflict = ana._choose_direction(arc, frozen)
        if conflict:
            if not allow_reorient:
                raise AssertionError("frozen crossings disagree on strand direction")
            fwd = ana._walk(arc, 1)
            first = next(
                (si for _, (ci, si) in fwd if ci in frozen and si in (0, 2)), 0
            )
            steps = fwd if first == 0 else ana._walk(arc, 0)
        for a, _ in steps:
            seen.add(a)
        for a, (ci, si) in steps:
            if si == 2:
                if ci in frozen and not allow_reorient:
                    raise AssertionError(
                        "frozen crossing would need rotation; a move reversed a strand"
                    )
                out[ci] = out[ci].rotated(2)
    return LinkDiagram(tuple(out), loops=loops, ambient=ambient)


def _relabel_occurrence(crossings: list[Crossing], at: Slot, new_arc: int) -> None:
    ci, si = at
    s = list(crossings[ci].slots)
    s[si] = new_arc
    crossings[ci] = Crossing(tuple(s))


# -- fragment builder --------------------------------------------------------------


class DiagramBuilder:
    """Assemble diagrams and spliced fragments from twist regions and welds.

    Ports are (crossing index, slot) pairs or terminals.  Crossing protos
    put the under-strand on slots {0, 2}; the final rotation by 2 (to put
    the *incoming* under-strand at slot 0) happens at build time.  When a
    base diagram is given, its kept crossings are frozen; ``stub`` and
    ``cut`` wire new fragments onto its existing arcs.
    """

    def __init__(self, base: Optional[LinkDiagram] = None, remove: Iterable[int] = ()):
        self.base = base
        self.removed = frozenset(remove)
        self.protos: list[list] = []
        self._old_to_new: dict[int, int] = {}
        if base is not None:
            base.require_valid()
            for ci, x in enumerate(base.crossings):
                if ci not in self.removed:
                    self._old_to_new[ci] = len(self.protos)
                    self.protos.append(list(x.slots))
        self.n_frozen = len(self.protos)
        self.loops = base.loops if base is not None else 0
        self.ambient = base.ambient if base is not None else "S3"
        self.welds: dict = {}
        self.stub_labels: dict = {}
        self._terminal_count = 0
        self._next_arc = base.fresh_arc() if base is not None else 1

    # ports

    def crossing(self) -> int:
        self.protos.append([None, None, None, None])
        return len(self.protos) - 1

    def terminal(self, name: str = "t"):
        self._terminal_count += 1
        return ("t", self._terminal_count, name)

    def stub(self, arc: int):
        """Terminal carrying the freed end of existing arc ``arc``."""
        t = self.terminal(f"stub:{arc}")
        self.stub_labels[t] = arc
        return t

    def fresh_label(self) -> int:
        label = self._next_arc
        self._next_arc += 1
        return label

    def cut(self, arc: int) -> tuple:
        """Cut a base arc; returns (tail-side stub, head-side stub).

        The piece at the arc's tail keeps the label; the head occurrence is
        relabeled fresh.  Both pieces stay attached to their far crossings.
        """
        if self.base is None:
            raise AssertionError("cut needs a base diagram")
        head = self.base.head_of(arc)
        if head[0] in self.removed:
            raise AssertionError("cut arc ends at a removed crossing; use stub")
        fresh = self.fresh_label()
        proto_at = (self._old_to_new[head[0]], head[1])
        self.protos[proto_at[0]][proto_at[1]] = fresh
        return self.stub(arc), self.stub(fresh)

    def weld(self, p, q) -> None:
        for port in (p, q):
            self.welds.setdefault(port, [])
            if len(self.welds[port]) >= self._capacity(port):
                raise AssertionError(f"over-welded port {port}")
        self.welds[p].append(q)
        self.welds[q].append(p)

    def _capacity(self, port) -> int:
        if isinstance(port, tuple) and len(port) == 3 and port[0] == "t":
            return 1 if port in self.stub_labels else 2
        return 1

    def add_loops(self, n: int) -> None:
        self.loops += n

    # twist unit

    def twist_crossing(self, chirality: int) -> dict:
        """One crossing of a two-rail twist region.

        chirality +1: the strand entering on the left rail goes over;
        chirality -1: the right one does.  Rails swap below the crossing.
        """
        ci = self.crossing()
        if chirality > 0:
            # under: in_r -> out_l; CCW from in_r: (in_r, in_l, out_l, out_r)
            return {"in_r": (ci, 0), "in_l": (ci, 1), "out_l": (ci, 2), "out_r": (ci, 3)}
        # under: in_l -> out_r; CCW from in_l: (in_l, out_l, out_r, in_r)
        return {"in_l": (ci, 0), "out_l": (ci, 1), "out_r": (ci, 2), "in_r": (ci, 3)}

    def twist_region(self, n: int, chirality: int) -> dict:
        """n same-handed crossings; for n = 0 the rails pass straight through."""
        if n < 0:
            raise AssertionError("twist_region wants a count, not a signed twist")
        if n == 0:
            t1, t2 = self.terminal("pass_l"), self.terminal("pass_r")
            return {"in_l": t1, "out_l": t1, "in_r": t2, "out_r": t2}
        first = self.twist_crossing(chirality)
        cur = first
        for _ in range(n - 1):
            nxt = self.twist_crossing(chirality)
            self.weld(cur["out_l"], nxt["in_l"])
            self.weld(cur["out_r"], nxt["in_r"])
            cur = nxt
        return {
            "in_l": first["in_l"],
            "in_r": first["in_r"],
            "out_l": cur["out_l"],
            "out_r": cur["out_r"],
        }

    # build

    def _is_terminal(self, port) -> bool:
        return isinstance(port, tuple) and len(port) == 3 and port[0] == "t"

    def build(self, allow_reorient: bool = False) -> LinkDiagram:
        open_slots = [
            (ci, si)
            for ci, proto in enumerate(self.protos)
            for si in range(4)
            if proto[si] is None
        ]
        for p in open_slots:
            if len(self.welds.get(p, [])) != 1:
                raise AssertionError(f"unwelded crossing slot {p}")
        for t in self.welds:
            if self._is_terminal(t) and len(self.welds[t]) != self._capacity(t):
                raise AssertionError(f"incomplete terminal {t}")

        consumed: set = set()
        loops = self.loops
        for start in sorted(open_slots):
            if self.protos[start[0]][start[1]] is not None:
                continue
            label = None
            prev, cur = start, self.welds[start][0]
            while self._is_terminal(cur):
                consumed.add(cur)
                if cur in self.stub_labels:
                    label = self.stub_labels[cur]
                    cur = None
                    break
                nbrs = self.welds[cur]
                nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
                prev, cur = cur, nxt
            if cur is None:
                self.protos[start[0]][start[1]] = label
            else:
                label = self.fresh_label()
                self.protos[start[0]][start[1]] = label
                self.protos[cur[0]][cur[1]] = label
        # unconsumed plain terminals must form closed cycles: crossing-free loops
        for t in sorted(self.welds, key=str):
            if not self._is_terminal(t) or t in consumed or t in self.stub_labels:
                continue
            cyc = [t]
            consumed.add(t)
            prev, cur = t, self.welds[t][0]
            closed = True
            while cur != t:
                if not self._is_terminal(cur) or cur in self.stub_labels:
                    closed = False
                    break
                consumed.add(cur)
                nbrs = self.welds[cur]
                nxt = nbrs[0] if nbrs[0] != prev else nbrs[1]
                prev, cur = cur, nxt
            if not closed:
                raise AssertionError("dangling terminal chain")
            loops += 1
        for t in self.stub_labels:
            if t in self.welds and t not in consumed:
                raise AssertionError(f"stub {t} never reached from a crossing slot")
        crossings = [Crossing(tuple(p)) for p in self.protos]
        return _renormalize(
            crossings,
            loops,
            frozen=set(range(self.n_frozen)),
            ambient=self.ambient,
            allow_reorient=allow_reorient,
        )


# -- Reidemeister moves --------------------------------------------------------


def reidemeister1(d: LinkDiagram, arc: Optional[int], handedness: int) -> LinkDiagram:
    """Add a kink on ``arc`` (or on a crossing-free loop when arc is None)."""
    if handedness not in (+1, -1):
        raise SiteError("handedness must be +1 or -1")
    d.require_valid()
    if arc is None:
        if d.loops < 1:
            raise SiteError("no crossing-free loop to kink")
        m1, m2 = d.fresh_arc(), d.fresh_arc() + 1
        kink = Crossing((m1, m1, m2, m2)) if handedness > 0 else Crossing((m1, m2, m2, m1))
        return LinkDiagram(d.crossings + (kink,), loops=d.loops - 1, ambient=d.ambient)
    if arc not in d._analysis.occ:
        raise SiteError(f"no arc {arc}")
    m1, m2 = d.fresh_arc(), d.fresh_arc() + 1
    crossings = list(d.crossings)
    _relabel_occurrence(crossings, d.head_of(arc), m2)
    kink = Crossing((arc, m2, m1, m1)) if handedness > 0 else Crossing((arc, m1, m1, m2))
    crossings.append(kink)
    return _renormalize(
        crossings, d.loops, frozen=set(range(len(d.crossings))), ambient=d.ambient
    )


def find_kinks(d: LinkDiagram) -> tuple[int, ...]:
    """Crossings carrying an arc on two adjacent slots (R1-removable)."""
    d.require_valid()
    out = []
    for ci, x in enumerate(d.crossings):
        if any(x.slots[s] == x.slots[(s + 1) % 4] for s in range(4)):
            out.append(ci)
    return tuple(out)


def reidemeister1_undo(d: LinkDiagram, ci: int) -> LinkDiagram:
    d.require_valid()
    if not 0 <= ci < len(d.crossings):
        raise SiteError(f"no crossing {ci}")
    x = d.crossings[ci]
    pair = next((s for s in range(4) if x.slots[s] == x.slots[(s + 1) % 4]), None)
    if pair is None:
        raise SiteError(f"crossing {ci} is not a kink")
    p = x.slots[(pair + 2) % 4]
    q = x.slots[(pair + 3) % 4]
    crossings = [c for i, c in enumerate(d.crossings) if i != ci]
    remap = {old: new for new, old in enumerate(i for i in range(len(d.crossings)) if i != ci)}
    loops = d.loops
    if p == q:
        loops += 1
    else:
        keep, drop = min(p, q), max(p, q)
        for o in d._analysis.occ[drop]:
            if o[0] != ci:
                _relabel_occurrence(crossings, (remap[o[0]], o[1]), keep)
    return LinkDiagram(tuple(crossings), loops=loops, ambient=d.ambient)


def reidemeister2(
    d: LinkDiagram, arc_pair: tuple[int, int], layering: str = "first_over"
) -> LinkDiagram:
    """Push arc_pair[0] across arc_pair[1] through a face they share."""
    a, b = arc_pair
    d.require_valid()
    if a == b:
        raise SiteError("R2 needs two distinct arcs")
    for arc in (a, b):
        if arc not in d._analysis.occ:
            raise SiteError(f"no arc {arc}")
    if not any(a in fa and b in fa for fa in d._analysis.face_arcs):
        raise SiteError(f"arcs {a} and {b} do not share a face")
    if layering not in ("first_over", "second_over"):
        raise SiteError("layering must be first_over or second_over")
    over, under = (a, b) if layering == "first_over" else (b, a)
    last_err = None
    for flip_o in (False, True):
        for flip_u in (False, True):
            bld = DiagramBuilder(base=d)
            o_tail, o_head = bld.cut(over)
            u_tail, u_head = bld.cut(under)
            if flip_o:
                o_tail, o_head = o_head, o_tail
            if flip_u:
                u_tail, u_head = u_head, u_tail
            # the over strand rides the left rail and stays on top: the
            # second crossing flips chirality because the rails swap
            c1 = bld.twist_crossing(+1)
            c2 = bld.twist_crossing(-1)
            bld.weld(c1["out_l"], c2["in_l"])
            bld.weld(c1["out_r"], c2["in_r"])
            bld.weld(o_tail, c1["in_l"])
            bld.weld(o_head, c2["out_l"])
            bld.weld(u_tail, c1["in_r"])
            bld.weld(u_head, c2["out_r"])
            try:
                cand = bld.build()
            except (AssertionError, InvalidDiagramError) as err:
                last_err = err
                continue
            if validate(cand).valid:
                return cand
    raise SiteError(f"R2 site admits no planar wiring ({last_err})")


def find_r2_bigons(d: LinkDiagram) -> tuple[tuple[int, int], ...]:
    """Bigon faces where one strand is over at both crossings."""
    d.require_valid()
    out = set()
    for face in d._analysis.faces:
        if len(face) != 2:
            continue
        (c1, _), (c2, _) = face
        if c1 == c2:
            continue
        shared = set(d.crossings[c1].slots) & set(d.crossings[c2].slots)
        over_both = [a for a in shared if all(o[1] % 2 == 1 for o in d._analysis.occ[a])]
        under_both = [a for a in shared if all(o[1] % 2 == 0 for o in d._analysis.occ[a])]
        if over_both and under_both:
            out.add((min(c1, c2), max(c1, c2)))
    return tuple(sorted(out))


def reidemeister2_undo(d: LinkDiagram, pair: tuple[int, int]) -> LinkDiagram:
    ci, cj = min(pair), max(pair)
    if (ci, cj) not in find_r2_bigons(d):
        raise SiteError(f"crossings {pair} do not bound an R2 bigon")
    occ = d._analysis.occ
    x1, x2 = d.crossings[ci], d.crossings[cj]
    shared = set(x1.slots) & set(x2.slots)
    ma = next(a for a in shared if all(o[1] % 2 == 1 for o in occ[a]))
    mb = next(a for a in shared if all(o[1] % 2 == 0 for o in occ[a]))

    def outer(x: Crossing, inner: int, odd: bool) -> int:
        idxs = (1, 3) if odd else (0, 2)
        vals = [x.slots[i] for i in idxs]
        vals.remove(inner)
        return vals[0]

    pa, qa = outer(x1, ma, True), outer(x2, ma, True)
    pb, qb = outer(x1, mb, False), outer(x2, mb, False)

    parent: dict[int, int] = {}

    def find(u):
        parent.setdefault(u, u)
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(u, v):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)

    union(pa, qa)
    union(pb, qb)
    removed = {ci, cj}
    keep_idx = [i for i in range(len(d.crossings)) if i not in removed]
    remap = {old: new for new, old in enumerate(keep_idx)}
    crossings = [d.crossings[i] for i in keep_idx]
    loops = d.loops
    groups: dict[int, set[int]] = {}
    for u in {pa, qa, pb, qb}:
        groups.setdefault(find(u), set()).add(u)
    for root, members in groups.items():
        far = [o for u in members for o in occ[u] if o[0] not in removed]
        if not far:
            loops += 1
            continue
        for o in far:
            _relabel_occurrence(crossings, (remap[o[0]], o[1]), root)
    return LinkDiagram(tuple(crossings), loops=loops, ambient=d.ambient)


def reduce_diagram(
    d: LinkDiagram, budget: int = DEFAULT_STEP_BUDGET
) -> tuple[LinkDiagram, int, bool]:
    """Greedy crossing-reducing R1/R2 until stable or out of budget.

    Returns (diagram, steps used, reached a stable form).
    """
    steps = 0
    cur = d
    while steps < budget:
        kinks = find_kinks(cur)
        if kinks:
            cur = reidemeister1_undo(cur, kinks[0])
            steps += 1
            continue
        bigons = find_r2_bigons(cur)
        if bigons:
            cur = reidemeister2_undo(cur, bigons[0])
            steps += 1
            continue
        return cur, steps, True
    stable = not find_kinks(cur) and not find_r2_bigons(cur)
    return cur, steps, stable


# -- the standard (2, n) closed-braid template ----------------------------------


def braid2_template(n: int, mirror: bool = False) -> LinkDiagram:
    """Standard diagram of the (2, n) torus link: an n-twist region closed up."""
    if n < 1:
        raise SiteError("template needs at least one crossing")
    bld = DiagramBuilder()
    region = bld.twist_region(n, +1 if not mirror else -1)
    bld.weld(region["out_l"], region["in_l"])
    bld.weld(region["out_r"], region["in_r"])
    return bld.build()


def two_braid_status(d: LinkDiagram, budget: int = DEFAULT_STEP_BUDGET) -> str:
    """'yes' / 'no' / 'unknown': does d R1/R2-reduce to a (2, n) template?"""
    reduced, _, stable = reduce_diagram(d, budget)
    if not stable:
        return "unknown"
    n = len(reduced.crossings)
    if n < 2 or reduced.loops:
        return "no"
    return (
        "yes"
        if any(diagram_isomorphic(reduced, braid2_template(n, m)) for m in (False, True))
        else "no"
    )


def is_2braid(d: LinkDiagram, budget: int = DEFAULT_STEP_BUDGET) -> bool:
    return two_braid_status(d, budget) == "yes"


# -- diagram isomorphism ---------------------------------------------------------


def diagram_isomorphic(d1: LinkDiagram, d2: LinkDiagram) -> bool:
    """Unoriented-diagram isomorphism.

    Searches for a crossing bijection with per-crossing slot rotation by 0
    or 2 (preserving CCW rotation and over/under) that induces a consistent
    arc bijection.  Mirrors are NOT identified.
    """
    d1.require_valid()
    d2.require_valid()
    if len(d1.crossings) != len(d2.crossings) or d1.loops != d2.loops:
        return False
    n = len(d1.crossings)
    if n == 0:
        return True
    occ1, occ2 = d1._analysis.occ, d2._analysis.occ
    if len(occ1) != len(occ2):
        return False

    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for places in occ1.values():
        (c1, _), (c2, _) = places
        adj[c1].add(c2)
        adj[c2].add(c1)
    order: list[int] = []
    seen: set[int] = set()
    for start in range(n):
        if start in seen:
            continue
        stack = [start]
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            order.append(c)
            stack.extend(nb for nb in sorted(adj[c], reverse=True) if nb not in seen)

    amap: dict[int, int] = {}
    amap_inv: dict[int, int] = {}
    used: set[int] = set()

    def try_assign(c1: int, c2: int, rot: int, undo: list) -> bool:
        for s in range(4):
            x = d1.crossings[c1].slots[s]
            y = d2.crossings[c2].slots[(s + rot) % 4]
            if x in amap:
                if amap[x] != y:
                    return False
            elif y in amap_inv:
                return False
            else:
                amap[x] = y
                amap_inv[y] = x
                undo.append((x, y))
        return True

    def backtrack(pos: int) -> bool:
        if pos == n:
            return True
        c1 = order[pos]
        cands: Iterable[int] = range(n)
        for s in range(4):
            x = d1.crossings[c1].slots[s]
            if x in amap:
                cands = sorted({o[0] for o in occ2[amap[x]]})
                break
        for c2 in cands:
            if c2 in used:
                continue
            for rot in (0, 2):
                undo: list = []
                ok = try_assign(c1, c2, rot, undo)
                if ok:
                    used.add(c2)
                    if backtrack(pos + 1):
                        return True
                    used.discard(c2)
                for x, y in undo:
                    del amap[x]
                    del amap_inv[y]
        return False

    return backtrack(0)


# -- Gauss codes -----------------------------------------------------------------


@dataclass(frozen=True)
class GaussCode:
    """Per-component sequences of (crossing id, over?, sign); ids are 1-based."""

    components: tuple[tuple[tuple[int, bool, int], ...], ...]
    loops: int = 0


def to_gauss(d: LinkDiagram) -> GaussCode:
    d.require_valid()
    comps = []
    for steps in d._analysis.steps:
        comps.append(
            tuple((ci + 1, si % 2 == 1, d._analysis.signs[ci]) for _, (ci, si) in steps)
        )
    return GaussCode(components=tuple(comps), loops=d.loops)


def from_gauss(g: GaussCode) -> LinkDiagram:
    info: dict[int, dict] = {}
    for comp in g.components:
        for cid, over, sign in comp:
            if sign not in (+1, -1):
                raise FormatError(f"crossing {cid}: sign must be +1 or -1")
            rec = info.setdefault(cid, {"over": False, "under": False, "sign": sign})
            if rec["sign"] != sign:
                raise FormatError(f"crossing {cid}: inconsistent signs")
            key = "over" if over else "under"
            if rec[key]:
                raise FormatError(f"crossing {cid}: duplicate {key} passage")
            rec[key] = True
    if sorted(info) != list(range(1, len(info) + 1)):
        raise FormatError("crossing ids must be 1..n")
    for cid, rec in info.items():
        if not (rec["over"] and rec["under"]):
            raise FormatError(f"crossing {cid}: needs one over and one under passage")

    slots: list[list[Optional[int]]] = [[None] * 4 for _ in range(len(info))]
    arc = 0
    for comp in g.components:
        if not comp:
            continue
        entries = []
        for cid, over, sign in comp:
            arc += 1
            entries.append((cid, over, sign, arc))
        for i, (cid, over, sign, in_arc) in enumerate(entries):
            out_arc = entries[(i + 1) % len(entries)][3]
            ci = cid - 1
            if not over:
                slots[ci][0] = in_arc
                slots[ci][2] = out_arc
            elif sign > 0:
                slots[ci][3] = in_arc
                slots[ci][1] = out_arc
            else:
                slots[ci][1] = in_arc
                slots[ci][3] = out_arc
    if any(s is None for row in slots for s in row):
        raise FormatError("incomplete Gauss code")
    loops = g.loops + sum(1 for comp in g.components if not comp)
    d = LinkDiagram(tuple(Crossing(tuple(row)) for row in slots), loops=loops)
    rep = validate(d)
    if not rep.valid:
        raise InvalidDiagramError(rep)
    return d


# -- text formats -----------------------------------------------------------------

_X_RE = re.compile(r"X\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")
_O_RE = re.compile(r"O\s*\(\s*(\d+)\s*\)")


def parse_pd(text: str) -> LinkDiagram:
    """Parse PD text: X(a,b,c,d) and O(n) tokens, # comments."""
    stripped = re.sub(r"#[^\n]*", "", text)
    crossings = []
    loops = 0
    for m in re.finditer(r"X\s*\([^)]*\)|O\s*\([^)]*\)|\S", stripped):
        tok = m.group(0)
        if tok[0] == "X":
            xm = _X_RE.fullmatch(tok)
            if not xm:
                raise FormatError(f"bad crossing token: {tok!r}")
            crossings.append(Crossing(tuple(int(g) for g in xm.groups())))
        elif tok[0] == "O":
            om = _O_RE.fullmatch(tok)
            if not om:
                raise FormatError(f"bad loop token: {tok!r}")
            loops += int(om.group(1))
        else:
            raise FormatError(f"unexpected token: {tok!r}")
    return LinkDiagram(tuple(crossings), loops=loops)


def format_pd(d: LinkDiagram) -> str:
    lines = [f"X({x.slots[0]},{x.slots[1]},{x.slots[2]},{x.slots[3]})" for x in d.crossings]
    if d.loops:
        lines.append(f"O({d.loops})")
    return "\n".join(lines) + "\n" if lines else ""


_GAUSS_ENTRY_RE = re.compile(r"([+-])(\d+)([ou])")


def parse_gauss(text: str) -> GaussCode:
    comps = []
    loops = 0
    for line in text.splitlines():
        line = re.sub(r"#.*", "", line).strip()
        if not line:
            continue
        if ":" not in line:
            raise FormatError(f"gauss line needs 'C: entries': {line!r}")
        _, _, rest = line.partition(":")
        rest = rest.strip()
        if not rest:
            loops += 1
            continue
        seq = []
        for part in rest.split(","):
            m = _GAUSS_ENTRY_RE.fullmatch(part.strip())
            if not m:
                raise FormatError(f"bad gauss entry: {part.strip()!r}")
            seq.append((int(m.group(2)), m.group(3) == "o", 1 if m.group(1) == "+" else -1))
        comps.append(tuple(seq))
    return GaussCode(components=tuple(comps), loops=loops)


def format_gauss(g: GaussCode) -> str:
    lines = []
    idx = 1
    for comp in g.components:
        parts = [f"{'+' if s > 0 else '-'}{cid}{'o' if over else 'u'}" for cid, over, s in comp]
        lines.append(f"{idx}: " + ", ".join(parts))
        idx += 1
    for _ in range(g.loops):
        lines.append(f"{idx}:")
        idx += 1
    return "\n".join(lines) + "\n" if lines else ""
