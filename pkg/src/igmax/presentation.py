"""Presentations of the maximal subgroup attached to a D-class grid.

One generator X_<row>_<col> per group cell, relators in three flavors:
anchors equal 1 (type 1), Schreier parent edges identify generators (type 2),
singular squares equate column transitions across rows (type 3).  Includes
the Graham-Houghton graph, cycle rank, Tietze simplification, and the
elimination of all generators sitting in partial-domain rows.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import StructuralError
from .ptrans import Monoid
from .squares import Square, SingularityWitness, complete_to_singular_square

if TYPE_CHECKING:
    from .dclass import DClassGrid
    from .schreier import SchreierSystem

Relator = tuple[tuple[int, int], ...]

TYPE1 = "type1"
TYPE2 = "type2"
TYPE3 = "type3"
TIETZE = "tietze"


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[Relator, ...]
    provenance: tuple[str, ...]
    # grid cell per generator when the presentation came from a grid
    cells: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        if len(self.relators) != len(self.provenance):
            raise ValueError("one provenance tag per relator required")
        if self.cells is not None and len(self.cells) != len(self.generators):
            raise ValueError("one cell per generator required")
        ngens = len(self.generators)
        for rel in self.relators:
            for g, e in rel:
                if not 0 <= g < ngens or e not in (1, -1):
                    raise ValueError(f"malformed relator letter ({g},{e})")
            for a, b in zip(rel, rel[1:]):
                if a[0] == b[0] and a[1] == -b[1]:
                    raise ValueError("relator is not freely reduced")

    def counts_by_type(self) -> dict[str, int]:
        counts = Counter(self.provenance)
        return {t: counts.get(t, 0) for t in (TYPE1, TYPE2, TYPE3, TIETZE)}


def free_reduce(rel: Relator) -> Relator:
    out: list[tuple[int, int]] = []
    for g, e in rel:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def cyclically_reduce(rel: Relator) -> Relator:
    rel = free_reduce(rel)
    while len(rel) >= 2 and rel[0][0] == rel[-1][0] and rel[0][1] == -rel[-1][1]:
        rel = free_reduce(rel[1:-1])
    return rel


def invert(rel: Relator) -> Relator:
    return tuple((g, -e) for g, e in reversed(rel))


def canonical_form(rel: Relator) -> Relator:
    """Least rotation of the relator or its inverse; the dedup key."""
    if not rel:
        return ()
    best = None
    for w in (rel, invert(rel)):
        for s in range(len(w)):
            rot = w[s:] + w[:s]
            if best is None or rot < best:
                best = rot
    return best


def generator_name(cell: tuple[int, int]) -> str:
    return f"X_{cell[0] + 1}_{cell[1] + 1}"


def build_presentation(
    grid: "DClassGrid",
    sys: "SchreierSystem",
    anchors_map: dict[int, int],
    singulars: tuple[tuple[Square, SingularityWitness], ...],
) -> GroupPresentation:
    cells = tuple(sorted(grid.group_cells))
    gid = {cell: idx for idx, cell in enumerate(cells)}
    names = tuple(generator_name(cell) for cell in cells)

    rels: list[Relator] = []
    tags: list[str] = []
    seen: set[Relator] = set()

    def add(rel: Relator, tag: str) -> None:
        rel = free_reduce(rel)
        if not rel:
            return
        canon = canonical_form(rel)
        if canon in seen:
            return
        seen.add(canon)
        rels.append(rel)
        tags.append(tag)

    for i in range(len(grid.rows)):
        add(((gid[(i, anchors_map[i])], 1),), TYPE1)

    # type 2: literal word equality r[lam] + e_{i,mu} == r[mu]
    for mu in range(len(grid.cols)):
        w = sys.r[mu]
        if not w:
            continue
        i, target = w[-1]
        if target != mu or (i, mu) not in grid.group_cells:
            continue
        prefix = w[:-1]
        for lam in range(len(grid.cols)):
            if lam != mu and sys.r[lam] == prefix and (i, lam) in grid.group_cells:
                add(((gid[(i, lam)], 1), (gid[(i, mu)], -1)), TYPE2)

    for sq, _ in singulars:
        i, j = sq.rows
        lam, mu = sq.cols
        add(
            (
                (gid[(i, lam)], -1),
                (gid[(i, mu)], 1),
                (gid[(j, mu)], -1),
                (gid[(j, lam)], 1),
            ),
            TYPE3,
        )

    return GroupPresentation(names, tuple(rels), tuple(tags), cells)


@dataclass(frozen=True)
class GHGraph:
    """Bipartite 1-skeleton: row and column vertices, one edge per group cell."""

    n_rows: int
    n_cols: int
    edges: tuple[tuple[int, int], ...]


def gh_graph(grid: "DClassGrid") -> GHGraph:
    return GHGraph(len(grid.rows), len(grid.cols), tuple(sorted(grid.group_cells)))


def free_rank(g: GHGraph, root_cell: tuple[int, int]) -> int:
    """Cycle rank E - V + 1 of the connected component containing root_cell."""
    if root_cell not in set(g.edges):
        raise ValueError(f"{root_cell} is not an edge of the graph")
    adj: dict[int, list[int]] = {}
    for i, c in g.edges:
        u, v = i, g.n_rows + c
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    comp = {root_cell[0]}
    queue = deque([root_cell[0]])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in comp:
                comp.add(v)
                queue.append(v)
    e_c = sum(1 for i, c in g.edges if i in comp)
    return e_c - len(comp) + 1


def tietze_simplify(p: GroupPresentation) -> GroupPresentation:
    """Kill trivial relators and eliminate once-occurring generators to a fixpoint.

    Deterministic priority: shortest relator first, then least generator, then
    oldest relator.  The isomorphism class of the presented group is preserved.
    """
    rels: list[Relator | None] = []
    tags: list[str] = []
    canon_of: dict[Relator, int] = {}
    for rel, tag in zip(p.relators, p.provenance):
        rel = cyclically_reduce(rel)
        if not rel:
            continue
        canon = canonical_form(rel)
        if canon in canon_of:
            continue
        canon_of[canon] = len(rels)
        rels.append(rel)
        tags.append(tag)

    alive = [True] * len(p.generators)

    while True:
        best = None
        for rid, rel in enumerate(rels):
            if rel is None:
                continue
            counts = Counter(g for g, _ in rel)
            once = [g for g, cnt in counts.items() if cnt == 1]
            if not once:
                continue
            key = (len(rel), min(once), rid)
            if best is None or key < best:
                best = key
        if best is None:
            break
        _, x, rid = best
        rel = rels[rid]
        idx = next(pos for pos, (g, _) in enumerate(rel) if g == x)
        sign = rel[idx][1]
        rest = rel[idx + 1 :] + rel[:idx]
        sub = invert(rest) if sign == 1 else rest  # now x = sub holds
        rels[rid] = None
        alive[x] = False
        for rid2, rel2 in enumerate(rels):
            if rel2 is None or all(g != x for g, _ in rel2):
                continue
            new: list[tuple[int, int]] = []
            for g, e in rel2:
                if g == x:
                    new.extend(sub if e == 1 else invert(sub))
                else:
                    new.append((g, e))
            reduced = cyclically_reduce(tuple(new))
            if not reduced:
                rels[rid2] = None
                continue
            canon = canonical_form(reduced)
            other = canon_of.get(canon)
            if (
                other is not None
                and other != rid2
                and rels[other] is not None
                and canonical_form(rels[other]) == canon
            ):
                rels[rid2] = None
                continue
            canon_of[canon] = rid2
            rels[rid2] = reduced
            tags[rid2] = TIETZE

    return _rebuild(p, alive, rels, tags)


def _rebuild(
    p: GroupPresentation, alive: list[bool], rels: list[Relator | None], tags: list[str]
) -> GroupPresentation:
    keep = [g for g in range(len(p.generators)) if alive[g]]
    remap = {g: i for i, g in enumerate(keep)}
    out_rels = []
    out_tags = []
    for rel, tag in zip(rels, tags):
        if rel is None:
            continue
        out_rels.append(tuple((remap[g], e) for g, e in rel))
        out_tags.append(tag)
    return GroupPresentation(
        generators=tuple(p.generators[g] for g in keep),
        relators=tuple(out_rels),
        provenance=tuple(out_tags),
        cells=None if p.cells is None else tuple(p.cells[g] for g in keep),
    )


def eliminate_partial_rows(
    p: GroupPresentation,
    grid: "DClassGrid",
    singulars: tuple[tuple[Square, SingularityWitness], ...],
) -> GroupPresentation:
    """Rewrite every generator in a partial-domain row through a total row.

    For a partial row i with anchor column lam_i, completing the idempotent
    pair (cell(i, lam_i), cell(i, lam)) lands in a total row j and gives the
    substitution X_{i,lam} = X_{j,lam_i}^-1 * X_{j,lam}; anchor generators of
    partial rows become empty.  The singular square backing each rewrite must
    have been enumerated, otherwise the grid data is inconsistent.
    """
    if grid.monoid is not Monoid.PARTIAL:
        raise ValueError("only partial grids carry partial rows")
    if p.cells is None:
        raise ValueError("presentation is not grid-derived")
    gid = {cell: i for i, cell in enumerate(p.cells)}
    total = set(grid.total_rows())

    anchors_map: dict[int, int] = {}
    for rel, tag in zip(p.relators, p.provenance):
        if tag == TYPE1 and len(rel) == 1:
            i, lam = p.cells[rel[0][0]]
            anchors_map[i] = lam
    for i in range(len(grid.rows)):
        if i not in anchors_map:
            raise ValueError(f"presentation has no type-1 anchor relator for row {i}")

    seen_squares = {(frozenset(sq.rows), frozenset(sq.cols)) for sq, _ in singulars}

    sub: dict[int, Relator] = {}
    for g, (i, lam) in enumerate(p.cells):
        if i in total:
            continue
        lam_i = anchors_map[i]
        if lam == lam_i:
            sub[g] = ()
            continue
        alpha = grid.cell(i, lam_i)
        beta = grid.cell(i, lam)
        alpha_t, beta_t, _ = complete_to_singular_square(alpha, beta)
        j = grid.row_of[alpha_t.kernel()]
        if j not in total:
            raise StructuralError("completion row is not total")
        if (frozenset((i, j)), frozenset((lam_i, lam))) not in seen_squares:
            raise StructuralError(
                f"no singular square eliminates generator {p.generators[g]}"
            )
        try:
            sub[g] = ((gid[(j, lam_i)], -1), (gid[(j, lam)], 1))
        except KeyError as exc:
            raise StructuralError(f"completion cell missing from the grid: {exc}") from exc

    rels: list[Relator] = []
    tags: list[str] = []
    seen: set[Relator] = set()
    for rel, tag in zip(p.relators, p.provenance):
        out: list[tuple[int, int]] = []
        changed = False
        for g, e in rel:
            if g in sub:
                changed = True
                out.extend(sub[g] if e == 1 else invert(sub[g]))
            else:
                out.append((g, e))
        reduced = free_reduce(tuple(out))
        if not reduced:
            continue
        canon = canonical_form(reduced)
        if canon in seen:
            continue
        seen.add(canon)
        rels.append(reduced)
        tags.append(TIETZE if changed else tag)

    alive = [cell[0] in total for cell in p.cells]
    return _rebuild(p, alive, rels, tags)


def to_gap(p: GroupPresentation) -> str:
    """GAP input: a free group, the relator list, and the quotient."""
    names = ", ".join(f'"{name}"' for name in p.generators)
    lines = [f"F := FreeGroup({names});"]
    terms = []
    for rel in p.relators:
        terms.append("*".join(f"F.{g + 1}" + ("" if e == 1 else "^-1") for g, e in rel))
    lines.append("rels := [ " + ", ".join(terms) + " ];")
    lines.append("G := F / rels;")
    return "\n".join(lines) + "\n"


def to_dot(g: GHGraph) -> str:
    """Graham-Houghton graph in DOT: rows as boxes, columns as circles."""
    lines = ["graph gh {"]
    lines.append("  node [shape=box];")
    for i in range(g.n_rows):
        lines.append(f'  r{i + 1} [label="R{i + 1}"];')
    lines.append("  node [shape=circle];")
    for c in range(g.n_cols):
        lines.append(f'  c{c + 1} [label="L{c + 1}"];')
    for i, c in g.edges:
        lines.append(f"  r{i + 1} -- c{c + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def presentation_to_json(p: GroupPresentation) -> dict:
    return {
        "generators": list(p.generators),
        "relators": [[[p.generators[g], e] for g, e in rel] for rel in p.relators],
        "provenance": list(p.provenance),
        "counts": p.counts_by_type(),
    }
