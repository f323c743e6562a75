from __future__ import annotations

import time
from random import Random

import pytest

from curvepass.images import DegradeParams
from curvepass.scheme import (
    CellTrace,
    Challenge,
    GridSpec,
    Layout,
    Password,
    synthesize_trace,
)


def identity_layout(grid: GridSpec) -> Layout:
    """Layout where cell i holds image 'img<i>'; handy for hand vectors."""
    return Layout(cell_to_image=tuple(f"img{i:02d}" for i in range(grid.n_cells)))


def make_challenge(grid: GridSpec, head: int, tail: int, max_len: int,
                   layout: Layout | None = None, ttl: float = 3600.0) -> Challenge:
    return Challenge(
        nonce="test-nonce",
        grid=grid,
        layout=layout if layout is not None else identity_layout(grid),
        head_cell=head,
        tail_cell=tail,
        max_len=max_len,
        degrade=DegradeParams(),
        expires_at=time.time() + ttl,
    )


def cell_center(grid: GridSpec, cell: int) -> tuple[float, float]:
    row, col = divmod(cell, grid.cols)
    return (col + 0.5) / grid.cols, (row + 0.5) / grid.rows


@pytest.fixture
def grid46() -> GridSpec:
    return GridSpec(cols=4, rows=6)


@pytest.fixture
def grid23() -> GridSpec:
    return GridSpec(cols=2, rows=3)


# A 19-entry hand-built boustrophedon walk on the 4x6 grid: starts at cell 0,
# snakes through the first four and a bit rows, ends at cell 18. Five
# pass-image cells sit strictly inside it, crossed in password order.
FIG_TRACE_CELLS = (0, 1, 2, 3, 7, 6, 5, 4, 8, 9, 10, 11, 15, 14, 13, 12, 16, 17, 18)
FIG_PASS_CELLS = (2, 6, 9, 14, 16)
FIG_HEAD, FIG_TAIL = 0, 18


def fig_scenario() -> tuple[Challenge, Password]:
    grid = GridSpec(cols=4, rows=6)
    layout = identity_layout(grid)
    challenge = make_challenge(grid, FIG_HEAD, FIG_TAIL, max_len=60, layout=layout)
    password = Password(tuple(layout.image_at(c) for c in FIG_PASS_CELLS))
    return challenge, password


def random_messy_trace(rng: Random, grid: GridSpec, challenge: Challenge) -> CellTrace:
    """Adversarial trace generator covering every rejection reason: honest
    synthesized traces, endpoint-pinned random walks, free walks, and walks
    with injected teleports or duplicates."""
    mode = rng.randrange(4)
    if mode == 0:
        ids = list(challenge.layout.cell_to_image)
        password = Password(tuple(rng.sample(ids, 2)))
        return synthesize_trace(challenge, password)
    start = challenge.head_cell if mode != 1 else rng.randrange(grid.n_cells)
    cells = [start]
    for _ in range(rng.randint(0, 10)):
        r, c = divmod(cells[-1], grid.cols)
        steps = [
            (rr, cc)
            for rr in (r - 1, r, r + 1)
            for cc in (c - 1, c, c + 1)
            if 0 <= rr < grid.rows and 0 <= cc < grid.cols and (rr, cc) != (r, c)
        ]
        rr, cc = rng.choice(steps)
        cells.append(rr * grid.cols + cc)
    if mode == 3 and len(cells) > 2:
        k = rng.randrange(1, len(cells))
        cells[k] = rng.randrange(grid.n_cells) if rng.random() < 0.5 else cells[k - 1]
    if mode != 1 and rng.random() < 0.7:
        cells[-1] = challenge.tail_cell if rng.random() < 0.9 else cells[-1]
    return CellTrace(tuple(cells))
