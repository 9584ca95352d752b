import pytest

from igmax.dclass import anchors, build_grid, default_base, sandwich, sandwich_matrix
from igmax.groupid import perm_identity
from igmax.ptrans import Monoid, PartialMap, compose
from helpers import all_maps, brute_idempotents, pipeline

PT = Monoid.PARTIAL
T = Monoid.TOTAL


class TestBuildGrid:
    @pytest.mark.parametrize(
        "n,k,monoid,rows,cols,cells",
        [
            (3, 2, PT, 6, 3, 9),
            (3, 2, T, 3, 3, 6),
            (4, 2, PT, 25, 6, 54),
        ],
    )
    def test_known_shapes(self, n, k, monoid, rows, cols, cells):
        grid = build_grid(n, k, monoid)
        assert (len(grid.rows), len(grid.cols), len(grid.group_cells)) == (rows, cols, cells)

    def test_cells_are_idempotents_in_place(self):
        grid = build_grid(4, 2, PT)
        for (i, c), m in grid.group_cells.items():
            assert m.is_idempotent()
            assert m.kernel() == grid.rows[i]
            assert m.image() == grid.cols[c]

    def test_group_cell_count_equals_idempotent_count(self):
        for n in range(1, 5):
            for monoid in (T, PT):
                lo = 1 if monoid is T else 0
                for k in range(lo, n + 1):
                    grid = build_grid(n, k, monoid)
                    assert len(grid.group_cells) == len(brute_idempotents(n, k, monoid))

    def test_group_cell_iff_h_class_has_idempotent(self):
        # scan every element of every H-class of the rank-k class for n <= 3
        for monoid in (T, PT):
            n = 3
            for k in (1, 2):
                grid = build_grid(n, k, monoid)
                members: dict[tuple[int, int], list[PartialMap]] = {}
                for m in all_maps(n, monoid):
                    if m.rank() != k:
                        continue
                    cell = (grid.row_of[m.kernel()], grid.col_of[m.image()])
                    members.setdefault(cell, []).append(m)
                for cell, ms in members.items():
                    has_idem = any(x.is_idempotent() for x in ms)
                    assert has_idem == (cell in grid.group_cells)
                    assert grid.rows[cell[0]].is_transversal(grid.cols[cell[1]]) == has_idem

    def test_total_grid_embeds_in_partial(self):
        for n in range(2, 6):
            for k in range(1, n):
                gt = build_grid(n, k, T)
                gp = build_grid(n, k, PT)
                assert gt.cols == gp.cols
                row_map = {i: gp.row_of[kp] for i, kp in enumerate(gt.rows)}
                total_rows = set(gp.total_rows())
                assert set(row_map.values()) == total_rows
                mapped = {(row_map[i], c): m for (i, c), m in gt.group_cells.items()}
                partial_in_total = {
                    cell: m for cell, m in gp.group_cells.items() if cell[0] in total_rows
                }
                assert mapped == partial_in_total

    def test_default_base_is_total_retraction(self):
        e = default_base(5, 3)
        assert e.is_total and e.is_idempotent() and e.rank() == 3
        assert e == PartialMap.from_text("[1,2,3,3,3]")
        grid = build_grid(5, 3, PT)
        assert grid.base_idempotent == e

    def test_custom_base_accepted(self):
        e = PartialMap.from_text("[1,1,3]")
        grid = build_grid(3, 2, PT, base=e)
        assert grid.base_idempotent == e

    def test_custom_base_validation(self):
        with pytest.raises(ValueError):
            build_grid(3, 2, PT, base=PartialMap.from_text("[1,1,1]"))  # wrong rank
        with pytest.raises(ValueError):
            build_grid(3, 2, PT, base=PartialMap.from_text("[2,1,3]"))  # not idempotent
        with pytest.raises(ValueError):
            build_grid(3, 2, T, base=PartialMap.from_text("[1,2,-]"))  # not total

    def test_degenerate_grids(self):
        g0 = build_grid(3, 0, PT)
        assert g0.degenerate
        assert (len(g0.rows), len(g0.cols), len(g0.group_cells)) == (1, 1, 1)
        assert g0.base_idempotent == PartialMap.empty(3)
        gn = build_grid(3, 3, PT)
        assert gn.degenerate
        assert gn.base_idempotent == PartialMap.identity(3)
        with pytest.raises(ValueError):
            build_grid(3, 0, T)


class TestAnchors:
    def test_lex_least_transversal_examples(self):
        grid = build_grid(3, 2, PT)
        am = anchors(grid)
        row_singletons = grid.row_of[PartialMap.from_text("[1,2,-]").kernel()]
        assert grid.cols[am[row_singletons]] == (0, 1)
        row_merged = grid.row_of[PartialMap.from_text("[1,1,3]").kernel()]
        assert grid.cols[am[row_merged]] == (0, 2)

    def test_every_anchor_is_a_group_cell(self):
        for n in range(2, 6):
            for monoid in (T, PT):
                for k in range(1, n):
                    grid = build_grid(n, k, monoid)
                    for rule in ("lex", "lexmax", "two-step"):
                        am = anchors(grid, rule)
                        assert set(am) == set(range(len(grid.rows)))
                        for i, c in am.items():
                            assert (i, c) in grid.group_cells

    def test_base_row_pinned_to_base_column(self):
        grid = build_grid(4, 2, PT)
        for rule in ("lex", "lexmax", "two-step"):
            assert anchors(grid, rule)[grid.base[0]] == grid.base[1]

    def test_unknown_rule_rejected(self):
        grid = build_grid(3, 2, PT)
        with pytest.raises(ValueError):
            anchors(grid, "alphabetical")


class TestSandwich:
    def test_zero_pattern_matches_group_cells(self):
        grid, am, sys_, _, _ = pipeline("pt", 3, 2)
        mat = sandwich_matrix(grid, sys_, am)
        for c in range(len(grid.cols)):
            for i in range(len(grid.rows)):
                assert (mat[(c, i)] is not None) == ((i, c) in grid.group_cells)

    def test_anchor_entries_never_zero(self):
        grid, am, sys_, _, _ = pipeline("pt", 4, 2)
        for i in range(len(grid.rows)):
            assert sandwich(grid, sys_, am, am[i], i) is not None

    def test_base_entry_is_identity(self):
        for key, n, k in [("pt", 3, 2), ("pt", 4, 2), ("t", 4, 2)]:
            grid, am, sys_, _, _ = pipeline(key, n, k)
            assert sandwich(grid, sys_, am, grid.base[1], grid.base[0]) == perm_identity(k)

    def test_matches_longhand_products(self):
        # recompute every entry by plain composition of the chosen representatives
        grid, am, sys_, _, _ = pipeline("pt", 3, 2)
        base_im = grid.cols[grid.base[1]]
        pos = {x: idx for idx, x in enumerate(base_im)}
        e = grid.base_idempotent
        for c in range(len(grid.cols)):
            q = e
            for cell in sys_.r[c]:
                q = compose(q, grid.group_cells[cell])
            for i in range(len(grid.rows)):
                t = grid.cell(i, am[i])
                for cell in sys_.r_inv[am[i]]:
                    t = compose(t, grid.group_cells[cell])
                prod = compose(q, t)
                entry = sandwich(grid, sys_, am, c, i)
                if prod.rank() == grid.k:
                    assert entry == tuple(pos[prod.entries[x]] for x in base_im)
                else:
                    assert entry is None
