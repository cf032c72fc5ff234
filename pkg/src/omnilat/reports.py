"""Report serialisation, spectrum strips, and a content-addressed result cache.

Every JSON document this package emits carries ``schema_version`` and a run
manifest (command line, seed, budget, worker count, package version, input
hashes, timestamps), and validates against ``schema/report.schema.json``.

Spectrum results are cached under a key derived from the square's canonical
bytes and the budget class.  Exhaustive verdicts are final and are never
recomputed; a node-capped entry only serves requests with an equal or
smaller cap.  Wall-clock budgets depend on the machine, so they bypass the
cache entirely.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .engine import (
    ABSENT,
    ACHIEVED,
    FORBIDDEN,
    TIMEOUT,
    SearchBudget,
    SpectrumReport,
    spectrum,
)
from .classify import LengthVerdict
from .latin import LatinSquare, square_hash

SCHEMA_VERSION = 1
SCHEMA_PATH = Path(__file__).parent / "schema" / "report.schema.json"

CACHE_ENV = "OMNILAT_CACHE_DIR"


class ReportFormatError(ValueError):
    """A report dict does not carry the expected schema version or shape."""


# ---------------------------------------------------------------------------
# run manifests


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def budget_to_dict(budget: SearchBudget | None) -> dict:
    if budget is None:
        return {"policy": "per-order-default"}
    return {
        "node_limit": budget.node_limit,
        "wall_secs": budget.wall_secs,
        "exhaustive": budget.is_exhaustive,
    }


@dataclass
class RunManifest:
    """Provenance block embedded in every emitted report."""

    command: tuple[str, ...]
    seed: int | None = None
    budget: dict = field(default_factory=lambda: budget_to_dict(None))
    jobs: int = 1
    artifact_version: str = __version__
    input_hashes: dict = field(default_factory=dict)
    started: str = field(default_factory=_utcnow)
    finished: str | None = None

    def finish(self) -> "RunManifest":
        self.finished = _utcnow()
        return self

    def as_dict(self) -> dict:
        if self.finished is None:
            self.finish()
        return {
            "command": list(self.command),
            "seed": self.seed,
            "budget": self.budget,
            "jobs": self.jobs,
            "artifact_version": self.artifact_version,
            "input_hashes": dict(self.input_hashes),
            "started": self.started,
            "finished": self.finished,
        }


# ---------------------------------------------------------------------------
# report <-> dict


def status_to_dict(st) -> dict:
    d: dict = {"status": st.status, "nodes": st.nodes, "millis": round(st.millis, 3)}
    if st.witness is not None:
        d["witness"] = [list(t) for t in st.witness]
    if st.reason is not None:
        d["reason"] = st.reason
    rule = getattr(st, "rule", None)
    if rule is not None:
        d["rule"] = rule
    how = getattr(st, "how", None)
    if how is not None:
        d["how"] = how
    return d


def report_to_dict(report: SpectrumReport, manifest: RunManifest | None = None) -> dict:
    d = {
        "schema_version": SCHEMA_VERSION,
        "kind": "spectrum",
        "order": report.order,
        "square_hash": report.square_hash,
        "label": report.label,
        "backend": report.backend,
        "range": [report.low, report.high],
        "lengths": {
            str(ell): status_to_dict(report.statuses[ell])
            for ell in range(report.low, report.high + 1)
        },
        "achieved": report.achieved,
        "missing": report.missing,
        "undecided": report.undecided,
        "verdict": report.verdict,
        "mu": report.mu,
        "elapsed_secs": round(report.elapsed, 6),
    }
    if manifest is not None:
        d["manifest"] = manifest.as_dict()
    return d


def report_from_dict(d: dict) -> SpectrumReport:
    """Rebuild a SpectrumReport; statuses come back as LengthVerdict objects."""
    if d.get("schema_version") != SCHEMA_VERSION or d.get("kind") != "spectrum":
        raise ReportFormatError(f"not a version-{SCHEMA_VERSION} spectrum report")
    lo, hi = d["range"]
    statuses = {}
    for key, sd in d["lengths"].items():
        ell = int(key)
        witness = sd.get("witness")
        statuses[ell] = LengthVerdict(
            length=ell,
            status=sd["status"],
            witness=None if witness is None else tuple(tuple(t) for t in witness),
            reason=sd.get("reason"),
            nodes=sd.get("nodes", 0),
            millis=sd.get("millis", 0.0),
            rule=sd.get("rule"),
            how=sd.get("how"),
        )
    return SpectrumReport(
        order=d["order"],
        square_hash=d["square_hash"],
        low=lo,
        high=hi,
        statuses=dict(sorted(statuses.items())),
        backend=d.get("backend", "unknown"),
        label=d.get("label"),
        elapsed=d.get("elapsed_secs", 0.0),
    )


def classification_to_dict(results, manifest: RunManifest | None = None) -> dict:
    """Serialise [(Group, SpectrumReport)] pairs from classify_order runs."""
    groups = []
    for g, rep in results:
        entry = report_to_dict(rep)
        del entry["schema_version"], entry["kind"]
        entry["name"] = g.name
        groups.append(entry)
    d = {
        "schema_version": SCHEMA_VERSION,
        "kind": "classification",
        "orders": sorted({g.order for g, _ in results}),
        "groups": groups,
        "missing_pairs": [[g.name, ell] for g, rep in results for ell in rep.missing],
    }
    if manifest is not None:
        d["manifest"] = manifest.as_dict()
    return d


# ---------------------------------------------------------------------------
# rendering

STRIP_GLYPHS = {ACHIEVED: "●", ABSENT: "○", TIMEOUT: "?", FORBIDDEN: "×"}
STRIP_LEGEND = (
    "● achieved   ○ proven-absent   ? timeout   × forbidden"
)


def render_spectrum_strip(report: SpectrumReport, *, legend: bool = False) -> str:
    """One-line per-length strip, e.g. ``4●5●6●7●8●`` for an omniversal order 8."""
    strip = "".join(
        f"{ell}{STRIP_GLYPHS[report.statuses[ell].status]}"
        for ell in range(report.low, report.high + 1)
    )
    return f"{strip}\n{STRIP_LEGEND}" if legend else strip


_SVG_FILL = {
    ACHIEVED: "#2f7d4f",
    ABSENT: "#c9ccd1",
    TIMEOUT: "#d99a26",
    FORBIDDEN: "#b3362c",
}


def render_spectrum_svg(report: SpectrumReport) -> str:
    """Self-contained SVG strip: one rectangle per length, no external assets."""
    cell, pad, h = 30, 4, 46
    count = report.high - report.low + 1
    width = pad * 2 + cell * count
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{h}" '
        f'viewBox="0 0 {width} {h}">',
        f'<title>{report.label or report.square_hash[:12]}: {report.verdict}</title>',
    ]
    for i, ell in enumerate(range(report.low, report.high + 1)):
        st = report.statuses[ell]
        x = pad + i * cell
        parts.append(
            f'<rect x="{x}" y="{pad}" width="{cell - 2}" height="{h - 2 * pad - 14}" '
            f'fill="{_SVG_FILL[st.status]}"><title>{ell}: {st.status}</title></rect>'
        )
        parts.append(
            f'<text x="{x + (cell - 2) / 2}" y="{h - 6}" font-size="11" '
            f'font-family="monospace" text-anchor="middle">{ell}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def render_classification_markdown(results) -> str:
    """Census table for classify runs: one row per group, spectra as strips."""
    lines = [
        "| group | order | spectrum | missing | verdict |",
        "|---|---|---|---|---|",
    ]
    for g, rep in results:
        missing = ", ".join(map(str, rep.missing)) or "-"
        mu = f" (mu={rep.mu})" if rep.mu is not None else ""
        lines.append(
            f"| {g.name} | {g.order} | {render_spectrum_strip(rep)} "
            f"| {missing} | {rep.verdict}{mu} |"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# content-addressed spectrum cache


def cache_dir() -> Path:
    override = os.environ.get(CACHE_ENV)
    if override:
        return Path(override)
    return Path.home() / ".cache" / "omnilat"


def _budget_class(budget: SearchBudget) -> str | None:
    """Cache class: exhaustive, node-capped, or None for uncacheable budgets."""
    if budget.is_exhaustive:
        return "exhaustive"
    if budget.wall_secs is None:
        return f"nodes{budget.node_limit}"
    return None


def cache_path(square: LatinSquare, budget: SearchBudget) -> Path | None:
    cls = _budget_class(budget)
    if cls is None:
        return None
    return cache_dir() / f"{square_hash(square)}.{cls}.json"


def cache_store(square: LatinSquare, budget: SearchBudget, report_dict: dict) -> Path | None:
    path = cache_path(square, budget)
    if path is None:
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(report_dict, indent=2, sort_keys=True))
    os.replace(tmp, path)
    return path


def _load_entry(path: Path) -> dict | None:
    """Parse one cache file; corrupt or wrong-version entries are evicted."""
    try:
        d = json.loads(path.read_text())
        if d.get("schema_version") != SCHEMA_VERSION or "lengths" not in d:
            raise ReportFormatError(path.name)
        return d
    except (OSError, ValueError):
        try:
            path.unlink()
        except OSError:
            pass
        return None


def cache_load(square: LatinSquare, budget: SearchBudget) -> dict | None:
    """Serve a cached report if one covers the requested budget.

    An exhaustive entry answers any request.  A node-capped request is also
    answered by any entry whose cap is at least as large; asking for more
    nodes than any stored run, or for exhaustive, forces a recompute.
    """
    base = cache_dir()
    h = square_hash(square)
    exhaustive = base / f"{h}.exhaustive.json"
    if exhaustive.exists():
        d = _load_entry(exhaustive)
        if d is not None:
            return d
    cls = _budget_class(budget)
    if cls is None or budget.is_exhaustive:
        return None
    best: tuple[int, dict] | None = None
    for path in base.glob(f"{h}.nodes*.json"):
        try:
            cap = int(path.name.split(".nodes")[1].split(".json")[0])
        except ValueError:
            continue
        if cap < (budget.node_limit or 0):
            continue
        d = _load_entry(path)
        if d is not None and (best is None or cap > best[0]):
            best = (cap, d)
    return best[1] if best else None


def cached_spectrum(
    square: LatinSquare,
    budget: SearchBudget,
    *,
    jobs: int = 1,
    label: str | None = None,
    manifest: RunManifest | None = None,
    use_cache: bool = True,
) -> tuple[dict, bool]:
    """Spectrum report dict for a square, served from cache when possible.

    Returns (report dict, True if it came from the cache).  Fresh results
    are stored back under the square hash and budget class.
    """
    if use_cache:
        hit = cache_load(square, budget)
        if hit is not None:
            if label is not None and hit.get("label") != label:
                hit = dict(hit, label=label)
            return hit, True
    rep = spectrum(square, budget, jobs=jobs, label=label)
    d = report_to_dict(rep, manifest)
    if use_cache:
        cache_store(square, budget, d)
    return d, False
