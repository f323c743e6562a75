"""Security-analysis lab: password-space accounting, random-guess simulation,
and shoulder-surfing candidate-set analysis.

The observer model: an attacker watching (or recording) a login sees the
grid layout and the marked head/tail cells, and records some subset of the
images the curve crosses. Trace erasure on screen is modeled as a retention
probability ``rho``: each interior crossing is observed independently with
probability rho, while head and tail are always known. A full recording is
rho = 1.

Candidate reasoning distinguishes complete from partial observations. A
complete observation pins the exact crossing sequence, so a candidate must
be an ordered subsequence of it; the true password is then never excluded.
A partial observation is handled by a documented heuristic: the observer
assumes the crossings it retained of any image are all the crossings of
that image, and rules out candidates whose retained images appear out of
order. That heuristic can evict the true password (an unseen early crossing
may explain the order), which is the price of extracting signal from an
incomplete record; soundness is only guaranteed at rho = 1. Either way no
candidate may contain a head/tail image of any observed session, since
endpoints are decoys by construction and the attacker knows it.
"""

from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import dataclass
from random import Random
from typing import Iterator, Sequence

from .errors import InvalidRange, SpaceTooLarge
from .scheme import (
    CellTrace,
    Challenge,
    ChallengeConfig,
    GridSpec,
    Password,
    generate_challenge,
    is_ordered_subsequence,
    jitter_trace,
    synthesize_trace,
    verify_trace,
)

DEFAULT_SET_GUARD = 10_000_000


def password_space(n_images: int, n: int) -> int:
    """Ordered selections without repetition: N * (N-1) * ... * (N-n+1)."""
    if n < 1 or n > n_images:
        raise InvalidRange(f"need 1 <= n <= N, got n={n}, N={n_images}")
    return math.perm(n_images, n)


def entropy_bits(n_images: int, n: int) -> float:
    """log2 of the password space."""
    return math.log2(password_space(n_images, n))


def enumerate_passwords(
    n_images: int, n: int, guard: int = DEFAULT_SET_GUARD
) -> Iterator[tuple[int, ...]]:
    """Lexicographic brute-force enumeration over image indices 0..N-1."""
    if password_space(n_images, n) > guard:
        raise SpaceTooLarge(
            f"{n_images} P {n} = {password_space(n_images, n)} exceeds guard {guard}"
        )
    return itertools.permutations(range(n_images), n)


def _rate_with_3sigma(successes: int, trials: int) -> tuple[float, float, float]:
    p = successes / trials
    sigma = math.sqrt(p * (1.0 - p) / trials)
    return p, p - 3 * sigma, p + 3 * sigma


@dataclass(frozen=True)
class GuessAttackResult:
    """Two estimators fall out of the same Monte Carlo run.

    ``exact_matches`` counts trials where the guess equals the password: a
    correct guess always authenticates (synthesis round-trip), so its rate
    converges to 1 / password_space, the classical guessing bound.

    ``accepted`` counts trials where the verifier accepted the guess's trace
    at all. It is never smaller: a wrong guess's curve can cross the true
    pass-images in order by coincidence, and on small grids that leniency
    dominates. Keeping both separates "guessed the password" from "lucked
    into an accepting curve".
    """

    trials: int
    accepted: int
    exact_matches: int

    @property
    def accept_rate(self) -> float:
        return self.accepted / self.trials

    @property
    def exact_rate(self) -> float:
        return self.exact_matches / self.trials

    @property
    def accept_interval_3sigma(self) -> tuple[float, float]:
        _, lo, hi = _rate_with_3sigma(self.accepted, self.trials)
        return lo, hi

    @property
    def exact_interval_3sigma(self) -> tuple[float, float]:
        _, lo, hi = _rate_with_3sigma(self.exact_matches, self.trials)
        return lo, hi


def simulate_guess_attack(
    catalog_ids: Sequence[str],
    grid: GridSpec,
    n: int,
    trials: int,
    seed: int,
    config: ChallengeConfig | None = None,
    force_correct: bool = False,
) -> GuessAttackResult:
    """Monte Carlo random-guess attack against the full verification path.

    Each trial fixes a uniform random true password, generates a fresh
    challenge for it, and has the attacker submit the synthesized trace of a
    uniform random guessed password. The result reports both how often the
    verifier accepted and how often the guess was actually right.
    ``force_correct`` is a sanity mode where the guess always equals the
    truth, so both rates must come out 1.0.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = Random(seed)
    ids = list(catalog_ids)
    accepted = 0
    exact = 0
    for _ in range(trials):
        truth = Password(tuple(rng.sample(ids, n)))
        challenge = generate_challenge(
            truth, ids, grid, config=config, seed=rng.getrandbits(64)
        )
        guess = truth if force_correct else Password(tuple(rng.sample(ids, n)))
        if guess == truth:
            exact += 1
        trace = synthesize_trace(challenge, guess)
        if verify_trace(challenge, truth, trace).accepted:
            accepted += 1
    return GuessAttackResult(trials=trials, accepted=accepted, exact_matches=exact)


@dataclass(frozen=True)
class Observation:
    """What a shoulder-surfer retains from one login session.

    ``image_sequence`` starts with the head image and ends with the tail
    image; interior entries are the retained crossings in order. ``complete``
    records whether the observer knows the retention was exhaustive (a full
    recording), which licenses strictly stronger inferences.
    """

    session_id: str
    image_sequence: tuple[str, ...]
    head_image: str
    tail_image: str
    complete: bool
    layout_known: bool = True

    @property
    def interior(self) -> tuple[str, ...]:
        return self.image_sequence[1:-1]


@dataclass(frozen=True)
class CandidateSet:
    """Ordered n-tuples still consistent with every incorporated observation."""

    passwords: frozenset[tuple[str, ...]]

    def __len__(self) -> int:
        return len(self.passwords)

    def __contains__(self, candidate: tuple[str, ...]) -> bool:
        return tuple(candidate) in self.passwords


def observe_session(
    challenge: Challenge,
    trace: CellTrace,
    retention: float,
    seed: int,
    session_id: str | None = None,
) -> Observation:
    """Record a login session through the erasure model.

    Head and tail crossings are always observed (the cells are visibly
    marked); each interior crossing survives independently with probability
    ``retention``.
    """
    if not 0.0 <= retention <= 1.0:
        raise ValueError(f"retention must be in [0, 1], got {retention}")
    imgs = [challenge.layout.image_at(c) for c in trace.cells]
    if len(imgs) < 2:
        raise ValueError("observed trace must have at least head and tail entries")
    rng = Random(seed)
    kept = [imgs[0]]
    kept.extend(img for img in imgs[1:-1] if rng.random() < retention)
    kept.append(imgs[-1])
    return Observation(
        session_id=session_id if session_id is not None else challenge.nonce,
        image_sequence=tuple(kept),
        head_image=imgs[0],
        tail_image=imgs[-1],
        complete=retention >= 1.0,
    )


def _consistent(obs: Observation, candidate: tuple[str, ...]) -> bool:
    if obs.head_image in candidate or obs.tail_image in candidate:
        return False
    if obs.complete:
        return is_ordered_subsequence(candidate, obs.interior)
    retained = set(obs.interior)
    projected = [img for img in candidate if img in retained]
    return is_ordered_subsequence(projected, obs.interior)


def _distinct_subsequences(
    seq: Sequence[str], n: int, excluded: set[str], guard: int
) -> set[tuple[str, ...]]:
    """All distinct-entry n-subsequences of seq avoiding excluded images.

    Depth-first over positions; at each level every image is tried once, at
    its earliest remaining position, which enumerates each tuple exactly
    once without a post-hoc dedup pass.
    """
    out: set[tuple[str, ...]] = set()
    prefix: list[str] = []

    def rec(start: int) -> None:
        if len(prefix) == n:
            out.add(tuple(prefix))
            if len(out) > guard:
                raise SpaceTooLarge(f"candidate set exceeded guard {guard}")
            return
        tried: set[str] = set()
        for i in range(start, len(seq)):
            img = seq[i]
            if img in excluded or img in tried or img in prefix:
                continue
            tried.add(img)
            prefix.append(img)
            rec(i + 1)
            prefix.pop()

    rec(0)
    return out


def intersect_candidates(
    observations: Sequence[Observation],
    n: int,
    catalog_ids: Sequence[str],
    guard: int = DEFAULT_SET_GUARD,
) -> CandidateSet:
    """Passwords consistent with every observation, intersected incrementally.

    Needs the catalog because the observer sees the full grid: with no
    complete observation the starting universe is every ordered n-tuple over
    the catalog minus the known endpoint decoys.
    """
    if n < 1:
        raise InvalidRange("n must be >= 1")
    if not observations:
        raise ValueError("need at least one observation")
    excluded = {o.head_image for o in observations} | {o.tail_image for o in observations}
    complete = [o for o in observations if o.complete]
    if complete:
        base = min(complete, key=lambda o: len(o.interior))
        candidates = _distinct_subsequences(base.interior, n, excluded, guard)
    else:
        eligible = [i for i in catalog_ids if i not in excluded]
        if len(eligible) >= n and math.perm(len(eligible), n) > guard:
            raise SpaceTooLarge(
                f"{len(eligible)} P {n} initial candidates exceed guard {guard}"
            )
        candidates = set(itertools.permutations(eligible, n))
    for obs in observations:
        candidates = {c for c in candidates if _consistent(obs, c)}
    return CandidateSet(passwords=frozenset(candidates))


@dataclass(frozen=True)
class ShoulderSurfRow:
    trial: int
    observations: int
    candidates: int


@dataclass(frozen=True)
class ShoulderSurfReport:
    rows: tuple[ShoulderSurfRow, ...]

    def sizes_after(self, k: int) -> list[int]:
        return [r.candidates for r in self.rows if r.observations == k]

    def mean_after(self, k: int) -> float:
        return statistics.fmean(self.sizes_after(k))

    def median_after(self, k: int) -> float:
        return statistics.median(self.sizes_after(k))

    def as_table(self) -> str:
        """Delimited text table: trial, observations, candidates."""
        lines = ["trial\tobservations\tcandidates"]
        lines.extend(f"{r.trial}\t{r.observations}\t{r.candidates}" for r in self.rows)
        return "\n".join(lines)


def shoulder_surf_experiment(
    catalog_ids: Sequence[str],
    grid: GridSpec,
    n: int,
    sessions: int,
    retention: float,
    trials: int,
    seed: int,
    jitter_budget: int = 0,
    config: ChallengeConfig | None = None,
    guard: int = DEFAULT_SET_GUARD,
) -> ShoulderSurfReport:
    """Observe repeated logins of a fixed password and track candidate decay.

    Per trial: fix a password, run ``sessions`` challenged logins (synthesis
    plus optional jitter), observe each at the given retention, and record
    the candidate-set size after 1..sessions observations. Trials use seeds
    derived by trial index, so results are reproducible and trials could run
    in parallel and merge deterministically.
    """
    if sessions < 1 or trials < 1:
        raise ValueError("sessions and trials must be >= 1")
    root = Random(seed)
    trial_seeds = [root.getrandbits(64) for _ in range(trials)]
    ids = list(catalog_ids)
    rows: list[ShoulderSurfRow] = []
    for trial, tseed in enumerate(trial_seeds):
        rng = Random(tseed)
        password = Password(tuple(rng.sample(ids, n)))
        observations: list[Observation] = []
        for s in range(1, sessions + 1):
            challenge = generate_challenge(
                password, ids, grid, config=config, seed=rng.getrandbits(64)
            )
            trace = synthesize_trace(challenge, password)
            if jitter_budget:
                trace = jitter_trace(
                    trace, challenge, password, jitter_budget, rng.getrandbits(64)
                )
            observations.append(
                observe_session(challenge, trace, retention, rng.getrandbits(64))
            )
            size = len(intersect_candidates(observations, n, ids, guard))
            rows.append(ShoulderSurfRow(trial=trial, observations=s, candidates=size))
    return ShoulderSurfReport(rows=tuple(rows))
