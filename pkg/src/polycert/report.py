"""Serializable run reports.

The machine format is a single JSON document described by
``report.schema.json`` (shipped with the package).  Keys are sorted and
floats use Python's shortest round-trip repr, so identical runs produce
identical bytes apart from the ``timing`` block.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Any

from . import __version__
from .asymptotics import SignKind
from .certify import RESIDUAL_GRID, Inconclusive, Unbounded
from .sampling import AlphaEstimate, required_samples

SCHEMA_ID = "polycert.report/1"


def load_schema() -> dict:
    text = resources.files("polycert").joinpath("report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _num(x):
    """JSON-safe float: non-finite values become null."""
    x = float(x)
    return x if math.isfinite(x) else None


def _profile_dict(i, prof):
    sign = prof.sign
    return {
        "index": i,
        "role": "objective" if i == 0 else "constraint",
        "mu": None if prof.mu == -math.inf else int(prof.mu),
        "leading_value": _num(prof.leading_value),
        "sign": sign.kind.value,
        "slope": _num(sign.value) if sign.kind is SignKind.FINITE else None,
        "ray_coefficients": [_num(c) for c in prof.ray_coefficients],
        "near_zero": [
            {"degree": nz.degree, "magnitude": nz.magnitude, "threshold": nz.threshold}
            for nz in prof.near_zero
        ],
    }


@dataclass
class Report:
    schema: str
    verdict: str
    direction: list[float] | None
    source: str | None
    sample_index: Any
    witness_T: float | None
    profiles: list[dict]
    robustness: dict | None
    sampling: dict
    statistics: dict
    tolerance_flags: list[dict]
    provenance: dict
    notes: list[str] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def to_dict(self, *, timing: bool = True) -> dict:
        out = asdict(self)
        if not timing:
            out.pop("timing")
        return out

    def to_json(self, *, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing=timing), sort_keys=True, indent=2,
                          allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def build_report(problem, outcome: Unbounded | Inconclusive, *, config, tol,
                 probe_enabled: bool = False, alpha_estimate: AlphaEstimate | None = None,
                 exhaustive: bool = False, wall_ms: float | None = None) -> Report:
    stats = outcome.stats
    unbounded = isinstance(outcome, Unbounded)

    floors = list(RESIDUAL_GRID)
    if config.alpha_floor is not None and config.alpha_floor not in floors:
        floors.append(config.alpha_floor)
    statistics: dict = {
        "residual_table": (
            [{"alpha_floor": a, "probability": p} for a, p in outcome.residual_table]
            if not unbounded else None
        ),
        "required_samples": None,
        "alpha_estimate": None,
    }
    if config.delta is not None:
        statistics["required_samples"] = [
            {"alpha_floor": a, "delta": config.delta,
             "N": required_samples(a, config.delta) if a < 1.0 else 1}
            for a in floors
        ]
    if alpha_estimate is not None:
        statistics["alpha_estimate"] = {
            "hits": alpha_estimate.hits,
            "samples": alpha_estimate.samples,
            "alpha_hat": alpha_estimate.alpha_hat,
            "interval": list(alpha_estimate.interval),
            "confidence": 0.95,
        }

    hits = stats.hits if stats is not None else None
    sampling = {
        "N": config.count,
        "seed": config.seed,
        "hits": len(hits) if hits is not None else None,
        "hit_indices": list(hits[:100]) if hits is not None else None,
        "exhaustive": exhaustive,
    }

    flags = []
    if not unbounded:
        for fl in outcome.tolerance_flags:
            flags.append({
                "source": fl.source,
                "count": fl.count,
                "examples": list(fl.examples),
                "details": [
                    {"polynomial": i, "degree": nz.degree, "magnitude": nz.magnitude,
                     "threshold": nz.threshold}
                    for i, nz in fl.details
                ],
            })

    provenance = {
        "tool": "polycert",
        "version": __version__,
        "problem_name": problem.name,
        "dimension": problem.dimension,
        "constraints": problem.m,
        "tolerance": {"abs": tol.abs, "rel": tol.rel},
        "probe_enabled": probe_enabled,
    }

    timing = {}
    if stats is not None:
        per_k = stats.sampling_ms / (config.count / 1000.0) if config.count else None
        timing = {
            "decomposition_ms": stats.decomposition_ms,
            "sampling_ms": stats.sampling_ms,
            "per_1000_samples_ms": per_k,
            "probe_ms": stats.probe_ms,
        }
        if wall_ms is not None:
            timing["total_ms"] = wall_ms

    notes = list(stats.notes) if stats is not None else []
    if unbounded:
        return Report(
            schema=SCHEMA_ID,
            verdict="unbounded",
            direction=[float(v) for v in outcome.direction],
            source=outcome.source,
            sample_index=outcome.sample_index,
            witness_T=float(outcome.witness_T),
            profiles=[_profile_dict(i, p) for i, p in enumerate(outcome.profiles)],
            robustness={
                "class": "robust" if outcome.robustness.robust else "degenerate",
                "vanishing_indices": list(outcome.robustness.vanishing_indices),
            },
            sampling=sampling,
            statistics=statistics,
            tolerance_flags=flags,
            provenance=provenance,
            notes=notes,
            timing=timing,
        )
    return Report(
        schema=SCHEMA_ID,
        verdict="inconclusive",
        direction=None,
        source=None,
        sample_index=None,
        witness_T=None,
        profiles=[],
        robustness=None,
        sampling=sampling,
        statistics=statistics,
        tolerance_flags=flags,
        provenance=provenance,
        notes=notes,
        timing=timing,
    )


def _fmt(x, spec=".6g"):
    return "-" if x is None else format(x, spec)


def format_human(report: Report) -> str:
    lines = []
    name = report.provenance.get("problem_name") or "(unnamed problem)"
    lines.append(f"problem      {name}  (n = {report.provenance['dimension']}, "
                 f"m = {report.provenance['constraints']})")
    lines.append(f"verdict      {report.verdict.upper()}")
    if report.verdict == "unbounded":
        d = ", ".join(f"{v:.6f}" for v in report.direction)
        where = report.source if report.source != "sample" else f"sample #{report.sample_index}"
        lines.append(f"direction    ({d})  [{where}]")
        lines.append(f"witness T    {report.witness_T:.6g}")
        rob = report.robustness
        if rob["class"] == "robust":
            lines.append("robustness   robust")
        else:
            idx = ", ".join(f"g{i}" for i in rob["vanishing_indices"])
            lines.append(f"robustness   degenerate (leading form not negative: {idx})")
        lines.append("")
        lines.append(f"  {'poly':<6}{'mu':>4}  {'leading value':>16}  {'asymptotic':>14}")
        for p in report.profiles:
            sign = p["sign"] if p["sign"] != "finite" else f"slope {_fmt(p['slope'])}"
            lines.append(f"  g{p['index']:<5}{_fmt(p['mu'], 'd'):>4}  "
                         f"{_fmt(p['leading_value'], '.9g'):>16}  {sign:>14}")
    else:
        s = report.sampling
        lines.append(f"samples      N = {s['N']}, seed = {s['seed']}")
        lines.append("")
        lines.append(f"  {'alpha_0':>10}  {'P(miss | alpha >= alpha_0)':>28}")
        for row in report.statistics["residual_table"]:
            lines.append(f"  {row['alpha_floor']:>10g}  {row['probability']:>28.6g}")
    req = report.statistics.get("required_samples")
    if req:
        lines.append("")
        lines.append(f"  {'alpha_0':>10}  {'delta':>8}  {'required N':>10}")
        for row in req:
            lines.append(f"  {row['alpha_floor']:>10g}  {row['delta']:>8g}  {row['N']:>10d}")
    est = report.statistics.get("alpha_estimate")
    if est:
        lo, hi = est["interval"]
        lines.append("")
        lines.append(f"alpha hat    {est['alpha_hat']:.6g}  ({est['hits']}/{est['samples']}, "
                     f"95% CI [{lo:.4g}, {hi:.4g}])")
    for fl in report.tolerance_flags:
        lines.append(f"tolerance    {fl['count']} {fl['source']} direction(s) had a coefficient "
                     f"declared zero within 10x of the threshold")
    for note in report.notes:
        lines.append(f"note         {note}")
    t = report.timing
    if t:
        lines.append(f"timing       decomposition {t['decomposition_ms']:.3f} ms, "
                     f"sampling {t['sampling_ms']:.1f} ms")
    return "\n".join(lines) + "\n"
