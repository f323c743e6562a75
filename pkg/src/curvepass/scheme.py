"""Core curve-trace password protocol.

A user's password is an ordered sequence of images. At login the catalog is
shuffled onto a grid and the user draws one continuous curve that starts on
a system-chosen head cell, crosses the pass-images in order (freely crossing
decoys in between), and ends on a tail cell. Head and tail are decoys so the
first and last crossings reveal nothing.

Conventions used throughout:

- Cells are row-major 0-based indices; cell = row * cols + col.
- A trace is the sequence of cell-entry events: the starting cell counts,
  consecutive duplicates are collapsed, and re-entering a cell after leaving
  it counts again. Its length is therefore just ``len(cells)``.
- Validation accepts 8-adjacent steps (a curve may cut a corner); synthesis
  emits 4-adjacent paths, which trivially validate.
- All randomness comes from explicit 64-bit seeds; functions are pure and
  values immutable, so everything here is safe for concurrent use.
"""

from __future__ import annotations

import math
import secrets
import time
from dataclasses import dataclass, field
from enum import Enum
from random import Random
from typing import Iterable, Sequence

from .errors import (
    DuplicateImageId,
    EmptyPolyline,
    NoEligibleCells,
    UnknownImageId,
    WrongImageCount,
)
from .images import DegradeParams


@dataclass(frozen=True)
class GridSpec:
    """Grid dimensions: ``cols`` images per row, ``rows`` images per column."""

    cols: int = 4
    rows: int = 6

    def __post_init__(self):
        if self.cols < 2 or self.rows < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.cols}x{self.rows}")

    @property
    def n_cells(self) -> int:
        return self.cols * self.rows

    def cell(self, row: int, col: int) -> int:
        return row * self.cols + col

    def coords(self, cell: int) -> tuple[int, int]:
        return divmod(cell, self.cols)

    def contains(self, cell: int) -> bool:
        return 0 <= cell < self.n_cells

    def adjacent8(self, a: int, b: int) -> bool:
        """True when b is one king-move step from a (not a == b)."""
        ra, ca = divmod(a, self.cols)
        rb, cb = divmod(b, self.cols)
        return a != b and abs(ra - rb) <= 1 and abs(ca - cb) <= 1


@dataclass(frozen=True)
class Password:
    """Ordered sequence of distinct pass-image ids."""

    image_ids: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "image_ids", tuple(self.image_ids))
        if not self.image_ids:
            raise ValueError("password must contain at least one image")
        if len(set(self.image_ids)) != len(self.image_ids):
            raise ValueError("pass-images must be distinct")

    def __len__(self) -> int:
        return len(self.image_ids)


@dataclass(frozen=True)
class Layout:
    """Bijective assignment of catalog images to cells, row-major."""

    cell_to_image: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "cell_to_image", tuple(self.cell_to_image))

    def image_at(self, cell: int) -> str:
        return self.cell_to_image[cell]

    def cell_of(self, image_id: str) -> int:
        try:
            return self.cell_to_image.index(image_id)
        except ValueError:
            raise UnknownImageId(image_id) from None


@dataclass(frozen=True)
class Challenge:
    """One login round: a fresh layout, decoy endpoints, and a length budget."""

    nonce: str
    grid: GridSpec
    layout: Layout
    head_cell: int
    tail_cell: int
    max_len: int
    degrade: DegradeParams
    expires_at: float


@dataclass(frozen=True)
class CellTrace:
    """Ordered cell-entry events of a drawn curve.

    Deliberately unvalidated at construction: verification must be able to
    examine ill-formed traces and reject them with ``Discontinuous``.
    """

    cells: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class Polyline:
    """Stylus input in normalized [0,1]^2 drawing-surface coordinates.

    Coordinates are clamped at construction; an empty point list is invalid.
    """

    points: tuple[tuple[float, float], ...]
    timestamps_ms: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.points:
            raise EmptyPolyline("polyline has no points")
        clamped = tuple(
            (min(1.0, max(0.0, float(x))), min(1.0, max(0.0, float(y))))
            for x, y in self.points
        )
        object.__setattr__(self, "points", clamped)
        if self.timestamps_ms is not None:
            object.__setattr__(self, "timestamps_ms", tuple(float(t) for t in self.timestamps_ms))


class Reason(str, Enum):
    OK = "Ok"
    ENDPOINT_MISMATCH = "EndpointMismatch"
    ORDER_VIOLATION = "OrderViolation"
    TOO_LONG = "TooLong"
    DISCONTINUOUS = "Discontinuous"


@dataclass(frozen=True)
class Decision:
    accepted: bool
    reason: Reason

    def __post_init__(self):
        assert self.accepted == (self.reason is Reason.OK)


@dataclass(frozen=True)
class ChallengeConfig:
    """Tunable challenge parameters; the length bound may be overridden."""

    ttl_seconds: float = 120.0
    max_len_override: int | None = None
    degrade: DegradeParams = field(default_factory=DegradeParams)


def max_trace_length(grid: GridSpec, n: int) -> int:
    """Default trace-length tolerance: (cols + rows) * (n + 1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return (grid.cols + grid.rows) * (n + 1)


def generate_layout(image_ids: Sequence[str], grid: GridSpec, seed: int) -> Layout:
    """Place the catalog on the grid as a uniformly random permutation."""
    ids = list(image_ids)
    if len(set(ids)) != len(ids):
        raise DuplicateImageId("catalog ids must be distinct")
    if len(ids) != grid.n_cells:
        raise WrongImageCount(
            f"grid has {grid.n_cells} cells but {len(ids)} images were given"
        )
    rng = Random(seed)
    rng.shuffle(ids)
    return Layout(cell_to_image=tuple(ids))


def select_head_tail(layout: Layout, password: Password, seed: int) -> tuple[int, int]:
    """Draw the two endpoint cells uniformly from the non-pass-image cells.

    Head and tail exist to hide the first and last pass-image, so they are
    never pass-image cells themselves.
    """
    pass_set = set(password.image_ids)
    eligible = [c for c, img in enumerate(layout.cell_to_image) if img not in pass_set]
    if len(eligible) < 2:
        raise NoEligibleCells(
            f"only {len(eligible)} decoy cells left; need 2 for head and tail"
        )
    rng = Random(seed)
    head, tail = rng.sample(eligible, 2)
    return head, tail


def generate_challenge(
    password: Password,
    catalog_ids: Sequence[str],
    grid: GridSpec,
    config: ChallengeConfig | None = None,
    seed: int | None = None,
) -> Challenge:
    """Compose a fresh challenge: random layout, decoy endpoints, length bound.

    The layout and endpoints are deterministic for a fixed seed; the nonce is
    always fresh (it is an anti-replay token, not part of the randomness
    contract).
    """
    config = config or ChallengeConfig()
    missing = set(password.image_ids) - set(catalog_ids)
    if missing:
        raise UnknownImageId(f"pass-images not in catalog: {sorted(missing)}")
    rng = Random(seed if seed is not None else secrets.randbits(64))
    layout = generate_layout(catalog_ids, grid, rng.getrandbits(64))
    head, tail = select_head_tail(layout, password, rng.getrandbits(64))
    max_len = (
        config.max_len_override
        if config.max_len_override is not None
        else max_trace_length(grid, len(password))
    )
    return Challenge(
        nonce=secrets.token_urlsafe(16),
        grid=grid,
        layout=layout,
        head_cell=head,
        tail_cell=tail,
        max_len=max_len,
        degrade=config.degrade,
        expires_at=time.time() + config.ttl_seconds,
    )


def map_polyline_to_cells(polyline: Polyline, grid: GridSpec) -> CellTrace:
    """Convert stylus points to the sequence of cells the curve enters.

    Segments are supersampled at an arc-length step of a quarter cell, which
    guarantees consecutive samples land in the same or an 8-adjacent cell, so
    the resulting trace always satisfies the continuity invariant. Points on
    a cell boundary resolve by floor (x = 1 belongs to the last column).
    """
    if not polyline.points:
        raise EmptyPolyline("polyline has no points")
    step = 0.25 * min(1.0 / grid.cols, 1.0 / grid.rows)
    cells: list[int] = []

    def push(x: float, y: float) -> None:
        col = min(int(x * grid.cols), grid.cols - 1)
        row = min(int(y * grid.rows), grid.rows - 1)
        c = row * grid.cols + col
        if not cells or cells[-1] != c:
            cells.append(c)

    pts = polyline.points
    push(*pts[0])
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        dist = math.hypot(x1 - x0, y1 - y0)
        if dist == 0.0:
            continue
        k = math.ceil(dist / step)
        for j in range(1, k):
            t = j / k
            push(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t)
        push(x1, y1)  # exact endpoint, no interpolation drift
    return CellTrace(tuple(cells))


def trace_length(trace: CellTrace) -> int:
    """Number of cell-entry events (start included, revisits re-counted)."""
    return len(trace.cells)


def trace_is_continuous(trace: CellTrace, grid: GridSpec) -> bool:
    """Check the trace invariant: non-empty, in range, 8-adjacent steps."""
    cells = trace.cells
    if not cells:
        return False
    if not all(grid.contains(c) for c in cells):
        return False
    return all(grid.adjacent8(a, b) for a, b in zip(cells, cells[1:]))


def is_ordered_subsequence(needle: Sequence, haystack: Iterable) -> bool:
    """Greedy subsequence test; greedy matching is exact for this predicate."""
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def verify_trace(challenge: Challenge, password: Password, trace: CellTrace) -> Decision:
    """Apply the acceptance rules to a submitted trace.

    Accepts iff the trace is continuous, starts on the head cell and ends on
    the tail cell, stays within the length tolerance, and crosses the
    pass-images in password order. Checks run in a fixed order and the reason
    reports the first failure, so rejection is deterministic.
    """
    if not trace_is_continuous(trace, challenge.grid):
        return Decision(False, Reason.DISCONTINUOUS)
    cells = trace.cells
    if cells[0] != challenge.head_cell or cells[-1] != challenge.tail_cell:
        return Decision(False, Reason.ENDPOINT_MISMATCH)
    if trace_length(trace) > challenge.max_len:
        return Decision(False, Reason.TOO_LONG)
    crossed = (challenge.layout.image_at(c) for c in cells)
    if not is_ordered_subsequence(password.image_ids, crossed):
        return Decision(False, Reason.ORDER_VIOLATION)
    return Decision(True, Reason.OK)


def shortest_leg(grid: GridSpec, a: int, b: int) -> CellTrace:
    """Minimal 4-adjacent path from a to b: walk the row first, then the column.

    Length is always Manhattan(a, b) + 1; the horizontal-then-vertical order
    is the documented deterministic tie-break.
    """
    ra, ca = divmod(a, grid.cols)
    rb, cb = divmod(b, grid.cols)
    cells = [a]
    r, c = ra, ca
    dc = 1 if cb > c else -1
    while c != cb:
        c += dc
        cells.append(r * grid.cols + c)
    dr = 1 if rb > r else -1
    while r != rb:
        r += dr
        cells.append(r * grid.cols + c)
    return CellTrace(tuple(cells))


def synthesize_trace(challenge: Challenge, password: Password | None) -> CellTrace:
    """Build an always-accepted trace: shortest legs head -> p1 .. pn -> tail.

    Junction cells shared by consecutive legs are emitted once. The result
    has at most 1 + (n+1)(cols+rows-2) entries, strictly below the default
    tolerance, so synthesis is feasible for every valid challenge. ``None``
    stands for the degenerate zero-waypoint case: just the head-to-tail leg.
    """
    layout = challenge.layout
    waypoints = [challenge.head_cell]
    if password is not None:
        waypoints.extend(layout.cell_of(img) for img in password.image_ids)
    waypoints.append(challenge.tail_cell)
    cells: list[int] = [waypoints[0]]
    for a, b in zip(waypoints, waypoints[1:]):
        cells.extend(shortest_leg(challenge.grid, a, b).cells[1:])
    return CellTrace(tuple(cells))


def jitter_trace(
    trace: CellTrace,
    challenge: Challenge,
    password: Password,
    detour_budget: int,
    seed: int,
) -> CellTrace:
    """Pad an accepted trace with random one-cell detours through decoys.

    Extra decoy crossings confuse an observer without affecting acceptance:
    inserting cells preserves endpoints, continuity (each detour cell is
    8-adjacent to both neighbors) and the pass-image subsequence. Length
    grows by at most ``detour_budget`` and never beyond the tolerance. If no
    detour fits, the input is returned unchanged.
    """
    if detour_budget < 0:
        raise ValueError("detour_budget must be >= 0")
    rng = Random(seed)
    grid = challenge.grid
    pass_set = set(password.image_ids)
    cells = list(trace.cells)
    for _ in range(detour_budget):
        if len(cells) + 1 > challenge.max_len:
            break
        positions = list(range(len(cells) - 1))
        rng.shuffle(positions)
        inserted = False
        for i in positions:
            a, b = cells[i], cells[i + 1]
            options = [
                c
                for c in range(grid.n_cells)
                if c != a
                and c != b
                and grid.adjacent8(a, c)
                and grid.adjacent8(c, b)
                and challenge.layout.image_at(c) not in pass_set
            ]
            if options:
                cells.insert(i + 1, rng.choice(options))
                inserted = True
                break
        if not inserted:
            break
    return CellTrace(tuple(cells))
