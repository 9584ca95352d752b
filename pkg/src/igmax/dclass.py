"""The rank-k D-class of T_n or PT_n as a grid of H-classes.

Rows are kernel partitions (R-classes), columns are image sets (L-classes),
and a cell is a group exactly when the column is a transversal of the row.
Group cells carry their unique idempotent; the base cell plays the role of
the distinguished corner whose idempotent generates everything downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import StructuralError
from .ptrans import (
    KernelPartition,
    Monoid,
    PartialMap,
    compose,
    idempotent_from_cell,
    kernels_of_rank,
)
from . import schreier as _schreier

ANCHOR_RULES = ("lex", "lexmax", "two-step")

Permutation = tuple[int, ...]


@dataclass
class DClassGrid:
    n: int
    k: int
    monoid: Monoid
    rows: tuple[KernelPartition, ...]
    cols: tuple[tuple[int, ...], ...]
    group_cells: dict[tuple[int, int], PartialMap]
    base: tuple[int, int]
    row_of: dict[KernelPartition, int] = field(repr=False, default_factory=dict)
    col_of: dict[tuple[int, ...], int] = field(repr=False, default_factory=dict)
    cells_in_row: tuple[tuple[int, ...], ...] = field(repr=False, default=())
    cells_in_col: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    @property
    def degenerate(self) -> bool:
        return self.k in (0, self.n)

    @property
    def base_idempotent(self) -> PartialMap:
        return self.group_cells[self.base]

    def cell(self, row: int, col: int) -> PartialMap:
        return self.group_cells[(row, col)]

    def total_rows(self) -> tuple[int, ...]:
        return tuple(i for i, kp in enumerate(self.rows) if len(kp.domain) == self.n)


def default_base(n: int, k: int) -> PartialMap:
    """Total idempotent fixing 1..k and sending everything above k to k."""
    if k == 0:
        return PartialMap.empty(n)
    return PartialMap(tuple(x if x < k else k - 1 for x in range(n)))


def build_grid(n: int, k: int, monoid: Monoid, base: PartialMap | None = None) -> DClassGrid:
    if not 0 <= k <= n:
        raise ValueError(f"rank {k} out of range for n={n}")
    if monoid is Monoid.TOTAL and k == 0:
        raise ValueError("T_n has no rank-0 class")

    rows = tuple(kernels_of_rank(n, k, monoid))
    cols = tuple(itertools.combinations(range(n), k))
    row_of = {kp: i for i, kp in enumerate(rows)}
    col_of = {im: c for c, im in enumerate(cols)}

    cells: dict[tuple[int, int], PartialMap] = {}
    in_row: list[list[int]] = [[] for _ in rows]
    in_col: list[list[int]] = [[] for _ in cols]
    for i, kp in enumerate(rows):
        for c, im in enumerate(cols):
            if kp.is_transversal(im):
                cells[(i, c)] = idempotent_from_cell(n, kp, im)
                in_row[i].append(c)
                in_col[c].append(i)

    if base is None:
        base = default_base(n, k)
    else:
        if base.n != n:
            raise ValueError("base idempotent has the wrong ground set")
        if base.rank() != k:
            raise ValueError(f"base idempotent has rank {base.rank()}, expected {k}")
        if not base.is_idempotent():
            raise ValueError("base element is not idempotent")
        if monoid is Monoid.TOTAL and not base.is_total:
            raise ValueError("base idempotent must be total in T_n")
    base_cell = (row_of[base.kernel()], col_of[base.image()])
    if base_cell not in cells:
        raise StructuralError("base cell of an idempotent must be a group cell")

    return DClassGrid(
        n=n,
        k=k,
        monoid=monoid,
        rows=rows,
        cols=cols,
        group_cells=cells,
        base=base_cell,
        row_of=row_of,
        col_of=col_of,
        cells_in_row=tuple(tuple(cs) for cs in in_row),
        cells_in_col=tuple(tuple(rs) for rs in in_col),
    )


def anchors(grid: DClassGrid, rule: str = "lex") -> dict[int, int]:
    """Pick one group column per row; the base row is pinned to the base column."""
    if rule not in ANCHOR_RULES:
        raise ValueError(f"anchor rule must be one of {ANCHOR_RULES}")
    for i in range(len(grid.rows)):
        if not grid.cells_in_row[i]:
            raise StructuralError(f"row {i} has no group cell")
    out: dict[int, int] = {}
    if rule == "two-step":
        # total rows first (their choice matches the total grid), then the rest
        for i in grid.total_rows():
            out[i] = grid.cells_in_row[i][0]
        for i in range(len(grid.rows)):
            if i not in out:
                out[i] = grid.cells_in_row[i][0]
    else:
        pick = 0 if rule == "lex" else -1
        for i in range(len(grid.rows)):
            out[i] = grid.cells_in_row[i][pick]
    out[grid.base[0]] = grid.base[1]
    return out


def _member_of_cell(grid: DClassGrid, m: PartialMap, row: int, col: int, what: str) -> None:
    if m.kernel() != grid.rows[row] or m.image() != grid.cols[col]:
        raise StructuralError(f"{what} fell out of its H-class")


def _restrict_to_base(grid: DClassGrid, m: PartialMap) -> Permutation:
    base_im = grid.cols[grid.base[1]]
    pos = {x: idx for idx, x in enumerate(base_im)}
    perm = tuple(pos[m.entries[x]] for x in base_im)
    if len(set(perm)) != len(perm):
        raise StructuralError("restriction to the base image is not a bijection")
    return perm


def _q_element(grid: DClassGrid, sys: "_schreier.SchreierSystem", col: int) -> PartialMap:
    q = compose(grid.base_idempotent, _schreier.word_value(grid, sys.r[col]))
    _member_of_cell(grid, q, grid.base[0], col, f"column representative q[{col}]")
    return q


def _t_element(
    grid: DClassGrid, sys: "_schreier.SchreierSystem", anchors_map: dict[int, int], row: int
) -> PartialMap:
    a = anchors_map[row]
    t = compose(grid.cell(row, a), _schreier.word_value(grid, sys.r_inv[a]))
    _member_of_cell(grid, t, row, grid.base[1], f"row representative t[{row}]")
    return t


def _entry(grid: DClassGrid, q: PartialMap, t: PartialMap, col: int, row: int) -> Permutation | None:
    prod = compose(q, t)
    if prod.rank() == grid.k:
        if (row, col) not in grid.group_cells:
            raise StructuralError(f"nonzero sandwich entry at non-group cell ({row},{col})")
        _member_of_cell(grid, prod, grid.base[0], grid.base[1], "sandwich product")
        return _restrict_to_base(grid, prod)
    if (row, col) in grid.group_cells:
        raise StructuralError(f"zero sandwich entry at group cell ({row},{col})")
    return None


def sandwich(
    grid: DClassGrid,
    sys: "_schreier.SchreierSystem",
    anchors_map: dict[int, int],
    col: int,
    row: int,
) -> Permutation | None:
    """Rees sandwich entry p_{col,row}: a permutation of the base image, or None (zero).

    The entry is the product of the column representative (base idempotent
    pushed along r[col]) with the row representative (anchor cell pulled back
    along r_inv of the anchor column).  It is nonzero exactly on group cells.
    """
    q = _q_element(grid, sys, col)
    t = _t_element(grid, sys, anchors_map, row)
    return _entry(grid, q, t, col, row)


def sandwich_matrix(
    grid: DClassGrid, sys: "_schreier.SchreierSystem", anchors_map: dict[int, int]
) -> dict[tuple[int, int], Permutation | None]:
    """All sandwich entries keyed by (col, row), zero pattern checked."""
    qs = [_q_element(grid, sys, c) for c in range(len(grid.cols))]
    ts = [_t_element(grid, sys, anchors_map, i) for i in range(len(grid.rows))]
    out: dict[tuple[int, int], Permutation | None] = {}
    for c, q in enumerate(qs):
        for i, t in enumerate(ts):
            out[(c, i)] = _entry(grid, q, t, c, i)
    return out
