"""Session logging and the usability-study statistics.

Implements the classical machinery used to compare login-time samples:
per-group summaries (mean, sample s.d., max, min), the pooled-variance
two-sample t-test (two-tailed), and one-way ANOVA with trial index as the
group factor (upper-tail F). Both p-values reduce to the regularized
incomplete beta function.

The log is an append-only CSV, one record per line, field order:
timestamp, user, scheme, trial, outcome, duration.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from scipy.special import betainc

from .errors import CorruptRecord, TooFewSamples

LOG_FIELDS = ("timestamp", "user", "scheme", "trial", "outcome", "duration")


@dataclass(frozen=True)
class Summary:
    avg: float
    sd: float
    max: float
    min: float
    count: int


@dataclass(frozen=True)
class SessionRecord:
    user: str
    scheme: str
    trial: int
    success: bool
    duration: float
    timestamp: datetime

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.trial < 1:
            raise ValueError("trial index must be >= 1")


def summarize(durations: Sequence[float]) -> Summary:
    """Mean, sample standard deviation (n-1), max, min over >= 2 values."""
    n = len(durations)
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    avg = sum(durations) / n
    var = sum((x - avg) ** 2 for x in durations) / (n - 1)
    return Summary(avg=avg, sd=math.sqrt(var), max=max(durations),
                   min=min(durations), count=n)


def _mean_var(sample: Sequence[float]) -> tuple[float, float, int]:
    n = len(sample)
    m = sum(sample) / n
    v = sum((x - m) ** 2 for x in sample) / (n - 1)
    return m, v, n


def t_test_two_tailed(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Pooled-variance two-sample t statistic and two-tailed p-value.

    Degenerate variance is handled rather than raised: if both samples are
    constant and equal the statistic is undefined and (0.0, 1.0) is
    returned; constant samples with different means give (+-inf, 0.0).
    """
    if len(a) < 2 or len(b) < 2:
        raise TooFewSamples("each sample needs at least 2 values")
    ma, va, na = _mean_var(a)
    mb, vb, nb = _mean_var(b)
    df = na + nb - 2
    pooled = ((na - 1) * va + (nb - 1) * vb) / df
    diff = ma - mb
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0, 1.0
        return math.copysign(math.inf, diff), 0.0
    t = diff / math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    # two-tailed p via the regularized incomplete beta: I_x(df/2, 1/2)
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return t, p


def anova_f_one_tailed(groups: Sequence[Sequence[float]]) -> tuple[float, float]:
    """One-way ANOVA F statistic over the groups and its upper-tail p-value.

    With two groups F equals the square of the pooled t statistic. All-equal
    degenerate input returns (0.0, 1.0); zero within-group variance with
    differing means returns (inf, 0.0).
    """
    if len(groups) < 2 or any(len(g) < 2 for g in groups):
        raise TooFewSamples("need >= 2 groups with >= 2 values each")
    total_n = sum(len(g) for g in groups)
    grand = sum(sum(g) for g in groups) / total_n
    means = [sum(g) / len(g) for g in groups]
    ss_between = sum(len(g) * (m - grand) ** 2 for g, m in zip(groups, means))
    ss_within = sum(
        sum((x - m) ** 2 for x in g) for g, m in zip(groups, means)
    )
    df_between = len(groups) - 1
    df_within = total_n - len(groups)
    if ss_within == 0.0:
        if ss_between == 0.0:
            return 0.0, 1.0
        return math.inf, 0.0
    f = (ss_between / df_between) / (ss_within / df_within)
    p = float(betainc(df_within / 2.0, df_between / 2.0,
                      df_within / (df_within + df_between * f)))
    return f, p


def append_session(log: str | Path, record: SessionRecord) -> None:
    """Append one record to the log file, creating it if needed."""
    path = Path(log)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            record.timestamp.astimezone(timezone.utc).isoformat(),
            record.user,
            record.scheme,
            record.trial,
            "success" if record.success else "failure",
            repr(record.duration),
        ])


def load_sessions(log: str | Path) -> list[SessionRecord]:
    """Read the log back in order; malformed lines report their line number."""
    path = Path(log)
    records: list[SessionRecord] = []
    with path.open("r", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue  # blank line, e.g. trailing newline
            if len(row) != len(LOG_FIELDS):
                raise CorruptRecord(lineno, f"expected {len(LOG_FIELDS)} fields, got {len(row)}")
            ts_raw, user, scheme, trial_raw, outcome, duration_raw = row
            try:
                timestamp = datetime.fromisoformat(ts_raw)
                trial = int(trial_raw)
                duration = float(duration_raw)
            except ValueError as exc:
                raise CorruptRecord(lineno, str(exc)) from exc
            if outcome not in ("success", "failure"):
                raise CorruptRecord(lineno, f"bad outcome {outcome!r}")
            try:
                records.append(SessionRecord(
                    user=user, scheme=scheme, trial=trial,
                    success=outcome == "success",
                    duration=duration, timestamp=timestamp,
                ))
            except ValueError as exc:
                raise CorruptRecord(lineno, str(exc)) from exc
    return records


@dataclass(frozen=True)
class SchemeReport:
    scheme: str
    summary: Summary
    success_rate: float
    trend_f: float | None
    trend_p: float | None


@dataclass(frozen=True)
class LogAnalysis:
    schemes: tuple[SchemeReport, ...]
    t_stat: float | None
    t_p: float | None


def analyze_sessions(records: Sequence[SessionRecord]) -> LogAnalysis:
    """Summary table over a session log, in the shape of a usability study.

    Per scheme tag: login-time summary over correct inputs, success rate,
    and the learning-trend F-test over trial-index groups. When exactly two
    schemes have enough data, the between-scheme t-test is included.
    """
    by_scheme: dict[str, list[SessionRecord]] = {}
    for r in records:
        by_scheme.setdefault(r.scheme, []).append(r)
    reports = []
    correct_durations: dict[str, list[float]] = {}
    for scheme, recs in sorted(by_scheme.items()):
        durations = [r.duration for r in recs if r.success]
        if len(durations) < 2:
            continue
        correct_durations[scheme] = durations
        by_trial: dict[int, list[float]] = {}
        for r in recs:
            if r.success:
                by_trial.setdefault(r.trial, []).append(r.duration)
        trend_groups = [g for g in by_trial.values() if len(g) >= 2]
        if len(trend_groups) >= 2:
            trend_f, trend_p = anova_f_one_tailed(trend_groups)
        else:
            trend_f = trend_p = None
        reports.append(SchemeReport(
            scheme=scheme,
            summary=summarize(durations),
            success_rate=sum(r.success for r in recs) / len(recs),
            trend_f=trend_f,
            trend_p=trend_p,
        ))
    t_stat = t_p = None
    if len(correct_durations) == 2:
        a, b = (correct_durations[r.scheme] for r in reports)
        t_stat, t_p = t_test_two_tailed(a, b)
    return LogAnalysis(schemes=tuple(reports), t_stat=t_stat, t_p=t_p)


def format_analysis(analysis: LogAnalysis) -> str:
    """Render the analysis as a fixed-width text table."""
    lines = [f"{'Group':<10}{'Avg.':>8}{'S.d.':>8}{'Max':>8}{'Min':>8}{'Count':>7}{'Success':>9}"]
    for rep in analysis.schemes:
        s = rep.summary
        lines.append(
            f"{rep.scheme:<10}{s.avg:>8.2f}{s.sd:>8.2f}{s.max:>8.2f}{s.min:>8.2f}"
            f"{s.count:>7d}{rep.success_rate:>8.1%}"
        )
    if analysis.t_stat is not None:
        lines.append(f"t-test (two tails): t={analysis.t_stat:.3f}, p={analysis.t_p:.4g}")
    for rep in analysis.schemes:
        if rep.trend_f is not None:
            lines.append(
                f"{rep.scheme} trend over trials (one tail): F={rep.trend_f:.3f}, p={rep.trend_p:.4g}"
            )
    return "\n".join(lines)
