"""Run-level quality metrics.

Cost charges cloud compute hours at the server rent price (edge layers are
free).  Privacy is the weighted fraction of tasks processed privately:
user-layer work counts fully, cloud work counts with coefficient K, RSU
work counts zero; outcomes explicitly flagged privacy-preserved count
fully wherever they ran.  QoR is mean per-task result accuracy.  The
composite score multiplies 1/(cost+1), 1/(missed deadlines+1), the privacy
fraction, and QoR.
"""

from __future__ import annotations

from dataclasses import dataclass

from .infrastructure import Layer, Platform
from .policy import ExecutionMode
from .simengine import SimOptions, TraceReport
from .workload import RealTimeClass

__all__ = [
    "MetricsReport",
    "cost",
    "nmd",
    "privacy",
    "qor",
    "qos",
    "summarize",
    "metrics_to_dict",
]


@dataclass(frozen=True)
class MetricsReport:
    """Headline metrics for one run plus per-layer task counts."""

    cost: float
    nmd: int
    privacy_fraction: float
    privacy_percent: float
    qor: float
    qos: float
    ep_ul: int
    ep_rsu: int
    cp: int


def cost(outcomes, srp: float) -> float:
    """Dollars paid for cloud processing time; user layer and RSUs are free."""
    if srp < 0:
        raise ValueError(f"srp must be >= 0, got {srp}")
    return sum(o.processing_hours * srp for o in outcomes if o.layer is Layer.CLOUD)


def nmd(outcomes, scope: str = "all") -> int:
    """Number of missed deadlines; scope 'exclude_soft' ignores soft real-time misses."""
    if scope not in ("all", "exclude_soft"):
        raise ValueError(f"nmd scope must be 'all' or 'exclude_soft', got {scope!r}")
    count = 0
    for o in outcomes:
        if o.deadline_met:
            continue
        if scope == "exclude_soft" and o.rt_class is RealTimeClass.SOFT:
            continue
        count += 1
    return count


def privacy(outcomes, k: float, weighting: str = "count") -> float:
    """Weighted private fraction in [0, 1]; cloud outcomes contribute with weight k."""
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"k must be in [0, 1], got {k}")
    if weighting not in ("count", "work"):
        raise ValueError(f"weighting must be 'count' or 'work', got {weighting!r}")
    if not outcomes:
        raise ValueError("privacy is undefined for zero tasks")
    numerator = 0.0
    denominator = 0.0
    for o in outcomes:
        w = 1.0 if weighting == "count" else o.size
        denominator += w
        if o.privacy_preserved:
            numerator += w
        elif o.layer is Layer.CLOUD:
            numerator += k * w
    return numerator / denominator


def qor(outcomes, approx_accuracy: float = 0.95) -> float:
    """Mean per-task result accuracy: 1.0 for accurate mode, approx_accuracy otherwise."""
    if not outcomes:
        raise ValueError("qor is undefined for zero tasks")
    total = sum(1.0 if o.mode is ExecutionMode.ACCURATE else approx_accuracy for o in outcomes)
    return total / len(outcomes)


def qos(cost: float, nmd: int, privacy_fraction: float, qor: float) -> float:
    """Composite service quality; privacy enters as a fraction, not a percentage."""
    if cost < 0:
        raise ValueError(f"cost must be >= 0, got {cost}")
    if nmd < 0:
        raise ValueError(f"nmd must be >= 0, got {nmd}")
    if not 0.0 <= privacy_fraction <= 1.0:
        raise ValueError(f"privacy_fraction must be in [0, 1], got {privacy_fraction}")
    if not 0.0 <= qor <= 1.0:
        raise ValueError(f"qor must be in [0, 1], got {qor}")
    return (1.0 / (cost + 1.0)) * (1.0 / (nmd + 1.0)) * privacy_fraction * qor


def summarize(trace: TraceReport, platform: Platform, opts: SimOptions | None = None) -> MetricsReport:
    """Compute the full metric report for one trace."""
    opts = opts if opts is not None else SimOptions()
    outcomes = trace.outcomes
    if not outcomes:
        raise ValueError("metrics are undefined for an empty trace")
    ep_ul = sum(1 for o in outcomes if o.layer is Layer.USER_LAYER)
    ep_rsu = sum(1 for o in outcomes if o.layer is Layer.RSU)
    cp = sum(1 for o in outcomes if o.layer is Layer.CLOUD)
    run_cost = cost(outcomes, platform.srp)
    misses = nmd(outcomes, opts.nmd_scope)
    privacy_fraction = privacy(outcomes, platform.k_cloud, opts.privacy_weighting)
    result_quality = qor(outcomes, opts.approx_accuracy)
    return MetricsReport(
        cost=run_cost,
        nmd=misses,
        privacy_fraction=privacy_fraction,
        privacy_percent=100.0 * privacy_fraction,
        qor=result_quality,
        qos=qos(run_cost, misses, privacy_fraction, result_quality),
        ep_ul=ep_ul,
        ep_rsu=ep_rsu,
        cp=cp,
    )


def metrics_to_dict(report: MetricsReport) -> dict:
    return {
        "cost": report.cost,
        "nmd": report.nmd,
        "privacy_fraction": report.privacy_fraction,
        "privacy_percent": report.privacy_percent,
        "qor": report.qor,
        "qos": report.qos,
        "ep_ul": report.ep_ul,
        "ep_rsu": report.ep_rsu,
        "cp": report.cp,
    }
