from __future__ import annotations

import math
from itertools import combinations
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    FIG_PASS_CELLS,
    FIG_TRACE_CELLS,
    cell_center,
    fig_scenario,
    identity_layout,
    make_challenge,
    random_messy_trace,
)
from oracles import (
    oracle_bfs_distance,
    oracle_is_subsequence,
    oracle_map_polyline,
    oracle_verify,
)

from curvepass.errors import (
    DuplicateImageId,
    EmptyPolyline,
    NoEligibleCells,
    UnknownImageId,
    WrongImageCount,
)
from curvepass.scheme import (
    CellTrace,
    ChallengeConfig,
    GridSpec,
    Password,
    Polyline,
    Reason,
    generate_challenge,
    generate_layout,
    jitter_trace,
    map_polyline_to_cells,
    max_trace_length,
    select_head_tail,
    shortest_leg,
    synthesize_trace,
    trace_is_continuous,
    trace_length,
    verify_trace,
)


def ids_for(grid: GridSpec) -> list[str]:
    return [f"img{i:02d}" for i in range(grid.n_cells)]


# --- max_trace_length --------------------------------------------------------

def test_max_trace_length_default_template():
    assert max_trace_length(GridSpec(4, 6), 5) == 60


def test_max_trace_length_degenerate_and_small():
    assert max_trace_length(GridSpec(4, 6), 0) == 10
    assert max_trace_length(GridSpec(3, 3), 2) == 18


# --- generate_layout ---------------------------------------------------------

def test_layout_is_bijection(grid46):
    ids = ids_for(grid46)
    layout = generate_layout(ids, grid46, seed=42)
    assert sorted(layout.cell_to_image) == sorted(ids)


def test_layout_deterministic_per_seed(grid46):
    ids = ids_for(grid46)
    a = generate_layout(ids, grid46, seed=7)
    b = generate_layout(ids, grid46, seed=7)
    assert a == b


def test_distinct_seeds_give_distinct_layouts(grid46):
    ids = ids_for(grid46)
    layouts = {generate_layout(ids, grid46, seed=s).cell_to_image for s in range(100)}
    assert len(layouts) == 100


def test_layout_input_validation(grid46):
    with pytest.raises(WrongImageCount):
        generate_layout(ids_for(grid46)[:-1], grid46, seed=0)
    bad = ids_for(grid46)
    bad[1] = bad[0]
    with pytest.raises(DuplicateImageId):
        generate_layout(bad, grid46, seed=0)


# --- select_head_tail ----------------------------------------------------------

def test_head_tail_avoid_pass_images(grid46):
    layout = identity_layout(grid46)
    password = Password(tuple(layout.cell_to_image[:5]))
    for seed in range(200):
        head, tail = select_head_tail(layout, password, seed)
        assert head != tail
        assert layout.image_at(head) not in password.image_ids
        assert layout.image_at(tail) not in password.image_ids


def test_head_tail_forced_case(grid23):
    layout = identity_layout(grid23)
    password = Password(tuple(layout.cell_to_image[:4]))  # n = N_cells - 2
    head, tail = select_head_tail(layout, password, seed=5)
    assert {head, tail} == {4, 5}


def test_head_tail_no_eligible_cells(grid23):
    layout = identity_layout(grid23)
    password = Password(tuple(layout.cell_to_image[:5]))
    with pytest.raises(NoEligibleCells):
        select_head_tail(layout, password, seed=0)


def test_head_tail_uniform_over_ordered_decoy_pairs(grid23):
    # 6-cell grid, n=2 -> 4 decoys -> 12 ordered pairs; 10k draws should put
    # every pair within 3 sigma of the uniform expectation.
    layout = identity_layout(grid23)
    password = Password((layout.image_at(0), layout.image_at(3)))
    draws = 10_000
    rng = Random(999)
    counts: dict[tuple[int, int], int] = {}
    for _ in range(draws):
        pair = select_head_tail(layout, password, rng.getrandbits(64))
        counts[pair] = counts.get(pair, 0) + 1
    assert len(counts) == 12
    p = 1 / 12
    sigma = math.sqrt(draws * p * (1 - p))
    for pair, count in counts.items():
        assert abs(count - draws * p) <= 3 * sigma, (pair, count)


# --- generate_challenge --------------------------------------------------------

def test_challenge_defaults(grid46):
    ids = ids_for(grid46)
    password = Password(tuple(ids[:5]))
    ch = generate_challenge(password, ids, grid46, seed=1)
    assert ch.max_len == 60
    assert ch.head_cell != ch.tail_cell
    assert ch.layout.image_at(ch.head_cell) not in password.image_ids
    assert ch.layout.image_at(ch.tail_cell) not in password.image_ids


def test_challenge_same_seed_same_randomness_fresh_nonce(grid46):
    ids = ids_for(grid46)
    password = Password(tuple(ids[:5]))
    a = generate_challenge(password, ids, grid46, seed=3)
    b = generate_challenge(password, ids, grid46, seed=3)
    assert a.layout == b.layout
    assert (a.head_cell, a.tail_cell) == (b.head_cell, b.tail_cell)
    assert a.nonce != b.nonce


def test_challenge_max_len_override(grid46):
    ids = ids_for(grid46)
    password = Password(tuple(ids[:5]))
    cfg = ChallengeConfig(max_len_override=40)
    ch = generate_challenge(password, ids, grid46, config=cfg, seed=3)
    assert ch.max_len == 40


def test_challenge_rejects_foreign_pass_image(grid46):
    ids = ids_for(grid46)
    password = Password(("not-in-catalog",) + tuple(ids[:4]))
    with pytest.raises(UnknownImageId):
        generate_challenge(password, ids, grid46, seed=0)


# --- map_polyline_to_cells -------------------------------------------------------

def test_single_point_maps_to_its_cell(grid46):
    cell = grid46.cell(2, 1)
    trace = map_polyline_to_cells(Polyline((cell_center(grid46, cell),)), grid46)
    assert trace.cells == (cell,)


def test_horizontal_segment_crosses_row(grid46):
    y = 0.5 / grid46.rows
    poly = Polyline(((0.5 / grid46.cols, y), (3.5 / grid46.cols, y)))
    assert map_polyline_to_cells(poly, grid46).cells == (0, 1, 2, 3)


def test_diagonal_across_2x2_matches_fine_oracle():
    grid = GridSpec(2, 2)
    poly = Polyline(((0.05, 0.05), (0.95, 0.95)))
    trace = map_polyline_to_cells(poly, grid)
    assert 2 <= len(trace) <= 3
    assert trace_is_continuous(trace, grid)
    assert list(trace.cells) == oracle_map_polyline(poly.points, 2, 2, factor=10)


def test_empty_polyline_rejected(grid46):
    with pytest.raises(EmptyPolyline):
        Polyline(())


def test_coordinates_clamped_and_edge_maps_to_last_column(grid46):
    poly = Polyline(((1.0, 1.0), (1.2, -0.3)))
    trace = map_polyline_to_cells(poly, grid46)
    assert all(grid46.contains(c) for c in trace.cells)
    assert trace.cells[0] == grid46.cell(grid46.rows - 1, grid46.cols - 1)


def _random_polyline(rng: Random, n_points: int) -> Polyline:
    return Polyline(tuple((rng.random(), rng.random()) for _ in range(n_points)))


def test_mapping_invariants_on_random_polylines(grid46):
    rng = Random(2024)
    for _ in range(300):
        poly = _random_polyline(rng, rng.randint(1, 8))
        trace = map_polyline_to_cells(poly, grid46)
        assert trace_is_continuous(trace, grid46)
        # appending a duplicate of the final point changes nothing
        again = Polyline(poly.points + (poly.points[-1],))
        assert map_polyline_to_cells(again, grid46) == trace
        # the trace embeds into the 10x-finer oracle sequence, endpoints equal
        fine = oracle_map_polyline(poly.points, grid46.cols, grid46.rows)
        assert oracle_is_subsequence(trace.cells, fine)
        assert trace.cells[0] == fine[0] and trace.cells[-1] == fine[-1]


@given(st.lists(st.tuples(st.floats(-0.2, 1.2), st.floats(-0.2, 1.2)),
                min_size=1, max_size=6))
@settings(max_examples=200, deadline=None)
def test_mapping_always_yields_valid_trace(points):
    grid = GridSpec(3, 4)
    trace = map_polyline_to_cells(Polyline(tuple(points)), grid)
    assert trace_is_continuous(trace, grid)


# --- trace_length ------------------------------------------------------------

def test_trace_length_counts_entry_events():
    assert trace_length(CellTrace((0,))) == 1
    assert trace_length(CellTrace((0, 1, 2))) == 3
    assert trace_length(CellTrace((0, 1, 0))) == 3  # revisit re-counted


# --- shortest_leg ------------------------------------------------------------

def test_shortest_leg_trivial_and_row(grid46):
    assert shortest_leg(grid46, 5, 5).cells == (5,)
    assert shortest_leg(grid46, 0, 3).cells == (0, 1, 2, 3)


def test_shortest_leg_matches_bfs_on_all_pairs(grid46):
    for a, b in combinations(range(grid46.n_cells), 2):
        leg = shortest_leg(grid46, a, b)
        expected = oracle_bfs_distance(grid46.cols, grid46.rows, a, b) + 1
        assert len(leg) == expected
        assert trace_is_continuous(leg, grid46)
        assert leg.cells[0] == a and leg.cells[-1] == b


# --- verify_trace: hand vectors ------------------------------------------------

def test_fig_trace_accepted():
    challenge, password = fig_scenario()
    trace = CellTrace(FIG_TRACE_CELLS)
    assert trace_length(trace) == 19
    decision = verify_trace(challenge, password, trace)
    assert decision.accepted and decision.reason is Reason.OK


def test_fig_trace_bypassing_third_pass_image_rejected():
    challenge, password = fig_scenario()
    # detour around cell 9 via the diagonal through cell 13
    cells = list(FIG_TRACE_CELLS)
    cells[cells.index(9)] = 13
    trace = CellTrace(tuple(cells))
    assert trace_length(trace) == 19
    assert trace_is_continuous(trace, challenge.grid)
    decision = verify_trace(challenge, password, trace)
    assert not decision.accepted
    assert decision.reason is Reason.ORDER_VIOLATION


def _boustrophedon(grid: GridSpec) -> list[int]:
    cells = []
    for r in range(grid.rows):
        cols = range(grid.cols) if r % 2 == 0 else range(grid.cols - 1, -1, -1)
        cells.extend(grid.cell(r, c) for c in cols)
    return cells


def test_snake_path_too_long(grid46):
    forward = _boustrophedon(grid46)
    cells = (forward + forward[-2::-1] + forward[1:])[:61]
    layout = identity_layout(grid46)
    password = Password(tuple(layout.image_at(c) for c in FIG_PASS_CELLS))
    challenge = make_challenge(grid46, head=cells[0], tail=cells[-1],
                               max_len=60, layout=layout)
    trace = CellTrace(tuple(cells))
    assert trace_is_continuous(trace, grid46)
    assert trace_length(trace) == 61
    decision = verify_trace(challenge, password, trace)
    assert decision.reason is Reason.TOO_LONG


def test_verify_reports_discontinuous_and_endpoint_mismatch():
    challenge, password = fig_scenario()
    teleport = CellTrace((0, 1, 23))
    assert verify_trace(challenge, password, teleport).reason is Reason.DISCONTINUOUS
    dup = CellTrace((0, 0, 1))
    assert verify_trace(challenge, password, dup).reason is Reason.DISCONTINUOUS
    wrong_start = CellTrace(FIG_TRACE_CELLS[1:])
    assert verify_trace(challenge, password, wrong_start).reason is Reason.ENDPOINT_MISMATCH
    empty = CellTrace(())
    assert verify_trace(challenge, password, empty).reason is Reason.DISCONTINUOUS


# --- synthesize_trace ------------------------------------------------------------

def test_synthesize_zero_waypoints_is_head_tail_leg(grid46):
    layout = identity_layout(grid46)
    challenge = make_challenge(grid46, head=0, tail=3, max_len=10, layout=layout)
    trace = synthesize_trace(challenge, None)
    assert trace == shortest_leg(grid46, 0, 3)


def test_synthesize_round_trip_random_instances():
    rng = Random(77)
    for _ in range(1000):
        cols, rows = rng.randint(3, 6), rng.randint(3, 8)
        grid = GridSpec(cols, rows)
        n = rng.randint(1, 6)
        ids = [f"i{k}" for k in range(grid.n_cells)]
        password = Password(tuple(rng.sample(ids, n)))
        challenge = generate_challenge(password, ids, grid, seed=rng.getrandbits(64))
        trace = synthesize_trace(challenge, password)
        bound = 1 + (n + 1) * (cols + rows - 2)
        assert trace_length(trace) <= bound < challenge.max_len
        assert verify_trace(challenge, password, trace).accepted


def test_synthesize_corner_hopping_worst_case(grid46):
    layout = identity_layout(grid46)
    # waypoints bounce between the top and bottom edges, near opposite corners
    pass_cells = (3, 21, 0, 22, 1)
    head, tail = 20, 23
    challenge = make_challenge(grid46, head, tail, max_len=60, layout=layout)
    password = Password(tuple(layout.image_at(c) for c in pass_cells))
    trace = synthesize_trace(challenge, password)
    assert verify_trace(challenge, password, trace).accepted
    assert trace_length(trace) <= 1 + 6 * (4 + 6 - 2) == 49


# --- jitter_trace ------------------------------------------------------------

def test_jitter_budget_zero_is_identity():
    challenge, password = fig_scenario()
    trace = synthesize_trace(challenge, password)
    assert jitter_trace(trace, challenge, password, 0, seed=1) == trace


def test_jitter_grows_at_most_budget_and_stays_accepted():
    rng = Random(31)
    ok = 0
    for _ in range(500):
        grid = GridSpec(rng.randint(3, 5), rng.randint(3, 6))
        ids = [f"i{k}" for k in range(grid.n_cells)]
        n = rng.randint(1, 4)
        password = Password(tuple(rng.sample(ids, n)))
        challenge = generate_challenge(password, ids, grid, seed=rng.getrandbits(64))
        base = synthesize_trace(challenge, password)
        budget = rng.randint(0, 6)
        jittered = jitter_trace(base, challenge, password, budget, rng.getrandbits(64))
        assert trace_length(jittered) <= trace_length(base) + budget
        assert trace_length(jittered) <= challenge.max_len
        assert verify_trace(challenge, password, jittered).accepted
        ok += 1
    assert ok == 500


def test_jitter_detours_cross_only_decoys():
    challenge, password = fig_scenario()
    base = synthesize_trace(challenge, password)
    jittered = jitter_trace(base, challenge, password, 5, seed=99)
    base_counts = {c: base.cells.count(c) for c in set(base.cells)}
    for cell in jittered.cells:
        if jittered.cells.count(cell) > base_counts.get(cell, 0):
            assert challenge.layout.image_at(cell) not in password.image_ids


# --- mutation properties ---------------------------------------------------------

def _reroute_around(trace: CellTrace, avoid: int, grid: GridSpec) -> CellTrace:
    """Replace every visit of ``avoid`` with a short 8-adjacent detour found
    by BFS on the grid minus that cell."""
    from collections import deque

    def bfs_path(src: int, dst: int) -> list[int]:
        prev = {src: None}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            if cur == dst:
                path = [cur]
                while prev[cur] is not None:
                    cur = prev[cur]
                    path.append(cur)
                return path[::-1]
            r, c = divmod(cur, grid.cols)
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == dc == 0:
                        continue
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < grid.rows and 0 <= cc < grid.cols:
                        nxt = rr * grid.cols + cc
                        if nxt != avoid and nxt not in prev:
                            prev[nxt] = cur
                            queue.append(nxt)
        raise AssertionError("detour must exist on a grid minus one cell")

    cells = list(trace.cells)
    while avoid in cells:
        i = cells.index(avoid)
        detour = bfs_path(cells[i - 1], cells[i + 1])
        cells = cells[: i - 1] + detour + cells[i + 2 :]
    return CellTrace(tuple(cells))


def test_deleting_any_pass_image_crossing_yields_order_violation():
    rng = Random(13)
    for _ in range(50):
        grid = GridSpec(4, 6)
        ids = ids_for(grid)
        password = Password(tuple(rng.sample(ids, 5)))
        challenge = generate_challenge(password, ids, grid, seed=rng.getrandbits(64))
        trace = synthesize_trace(challenge, password)
        victim = rng.choice(password.image_ids)
        mutated = _reroute_around(trace, challenge.layout.cell_of(victim), grid)
        assert trace_is_continuous(mutated, grid)
        decision = verify_trace(challenge, password, mutated)
        assert decision.reason is Reason.ORDER_VIOLATION


def test_swapped_legs_agree_with_subsequence_oracle():
    rng = Random(17)
    violations = 0
    for _ in range(100):
        grid = GridSpec(4, 6)
        ids = ids_for(grid)
        password = Password(tuple(rng.sample(ids, 5)))
        challenge = generate_challenge(password, ids, grid, seed=rng.getrandbits(64))
        order = list(password.image_ids)
        i, j = sorted(rng.sample(range(5), 2))
        order[i], order[j] = order[j], order[i]
        swapped_trace = synthesize_trace(challenge, Password(tuple(order)))
        decision = verify_trace(challenge, password, swapped_trace)
        crossed = [challenge.layout.image_at(c) for c in swapped_trace.cells]
        assert decision.accepted == oracle_is_subsequence(password.image_ids, crossed)
        violations += not decision.accepted
    assert violations > 0  # the mutation does reject in practice


# --- full agreement with the brute-force checker -----------------------------------

def test_verify_agrees_with_brute_force_on_10k_random_traces(grid23):
    rng = Random(4242)
    ids = [f"i{k}" for k in range(grid23.n_cells)]
    reasons_seen = set()
    for _ in range(10_000):
        password = Password(tuple(rng.sample(ids, 2)))
        challenge = generate_challenge(
            password, ids, grid23, seed=rng.getrandbits(64),
            config=ChallengeConfig(max_len_override=rng.choice([4, 6, 10, 30])),
        )
        trace = random_messy_trace(rng, grid23, challenge)
        decision = verify_trace(challenge, password, trace)
        expected_ok, expected_reason = oracle_verify(challenge, password, trace)
        assert decision.accepted == expected_ok
        assert decision.reason.value == expected_reason
        reasons_seen.add(expected_reason)
    assert reasons_seen == {"Ok", "EndpointMismatch", "OrderViolation",
                            "TooLong", "Discontinuous"}
