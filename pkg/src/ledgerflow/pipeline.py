"""Pipeline orchestration and report assembly.

``run_pipeline`` executes ingest, topology, significance, triads,
recirculation, and report stages against one ledger file, writing every
table as CSV and/or JSON plus a manifest describing inputs, seeds,
versions, and stage wall times. Outputs are fully determined by the
configuration (the manifest's wall times are the one exception).
"""

from __future__ import annotations

import hashlib
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Mapping, Sequence

import numpy
import scipy

from .degrees import degree_stats
from .errors import ConfigError
from .graph import aggregate
from .ingest import ColumnMapping, FilterSpec, parse_ledger, write_transactions
from .nullmodel import EnsembleSpec, SignificanceCell, SwapMode, run_ensemble, significance
from .recirculation import (
    ClassifiedOps,
    CrosstabResult,
    FrequencyCategory,
    TemporalSignature,
    classify_ops,
    crosstab,
    extract_ops,
    user_signatures,
)
from .synthetic import ScenarioSpec, generate_synthetic
from .topology import (
    CATEGORY_ORDER,
    CategoryRow,
    OneTimeUserTable,
    TopologyPartition,
    category_stats,
    categorize,
    one_time_users,
)
from .triads import DEFAULT_CENSUS_CATEGORIES, TRIAD_LABELS, category_census, triad_significance
from .util import format_duration, write_csv, write_json

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "StrategySignalReport",
    "run_pipeline",
    "strategy_report",
    "write_scenario",
]

_COLLECTOR_CATEGORIES = ("in-single-node", "dag0", "dagTin")


@dataclass(frozen=True)
class PipelineConfig:
    input_path: Path
    output_dir: Path
    column_mapping: ColumnMapping = field(default_factory=ColumnMapping)
    filter_spec: FilterSpec = field(default_factory=FilterSpec)
    modes: tuple[SwapMode, ...] = (SwapMode.TARGET, SwapMode.SOURCE, SwapMode.BOTH)
    replicas: int = 1000
    master_seed: int = 0
    max_repair_attempts: int = 100
    jobs: int = 1
    formats: tuple[str, ...] = ("csv", "json")

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        for fmt in self.formats:
            if fmt not in ("csv", "json"):
                raise ConfigError(f"unknown format {fmt!r}")
        if not self.modes:
            raise ConfigError("at least one swap mode is required")


@dataclass(frozen=True)
class PipelineResult:
    manifest: dict
    output_files: tuple[Path, ...]


@dataclass(frozen=True)
class StrategySignalReport:
    """Usage-strategy signals assembled from the upstream tables.

    ``one_time_collector_share``: fraction of total volume sent by one-time
    users sitting in the collector-prone categories (in-single-node, dag0,
    dagTin). ``dag_collector_volume_share``: dagTin volume net of its
    one-time users, as a fraction of total volume.
    ``hfq1_only_user_share``: fraction of recirculating users whose whole
    signature is HFQ1, with their node-category breakdown.
    """

    one_time_collector_share: float
    dag_collector_volume_share: float
    hfq1_only_user_share: float
    hfq1_only_breakdown: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "one_time_collector_share": self.one_time_collector_share,
            "dag_collector_volume_share": self.dag_collector_volume_share,
            "hfq1_only_user_share": self.hfq1_only_user_share,
            "hfq1_only_breakdown": self.hfq1_only_breakdown,
        }


def strategy_report(
    total_volume: Decimal,
    stats: Mapping[str, CategoryRow],
    one_time: OneTimeUserTable,
    signatures: Sequence[TemporalSignature],
    partition: TopologyPartition,
) -> StrategySignalReport:
    """Compute the strategy shares from existing tables (no new graph work)."""
    total = float(total_volume) if total_volume else 0.0

    one_time_out = sum(
        float(one_time.rows[label].outgoing_volume)
        for label in _COLLECTOR_CATEGORIES
        if label in one_time.rows
    )
    one_time_share = one_time_out / total if total else 0.0

    dagtin_row = one_time.rows.get("dagTin")
    dagtin_one_time = (
        float(dagtin_row.outgoing_volume + dagtin_row.incoming_volume) if dagtin_row else 0.0
    )
    dag_collector = float(stats["dagTin"].volume) - dagtin_one_time
    dag_collector_share = max(0.0, dag_collector) / total if total else 0.0

    hfq1_only = [
        s for s in signatures if s.categories == frozenset({FrequencyCategory.HFQ1})
    ]
    hfq1_share = len(hfq1_only) / len(signatures) if signatures else 0.0
    breakdown: dict[str, float] = {}
    if hfq1_only:
        for signature in hfq1_only:
            label = partition.node_category[signature.user].value
            breakdown[label] = breakdown.get(label, 0) + 1
        breakdown = {label: count / len(hfq1_only) for label, count in sorted(breakdown.items())}

    return StrategySignalReport(
        one_time_collector_share=one_time_share,
        dag_collector_volume_share=dag_collector_share,
        hfq1_only_user_share=hfq1_share,
        hfq1_only_breakdown=breakdown,
    )


def _iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


class _Writer:
    def __init__(self, out_dir: Path, formats: tuple[str, ...]):
        self.out_dir = out_dir
        self.formats = formats
        self.written: list[Path] = []

    def csv(self, name: str, header, rows) -> None:
        if "csv" in self.formats:
            path = self.out_dir / f"{name}.csv"
            write_csv(path, header, rows)
            self.written.append(path)

    def json(self, name: str, obj, always: bool = False) -> None:
        if always or "json" in self.formats:
            path = self.out_dir / f"{name}.json"
            write_json(path, obj)
            self.written.append(path)


def _category_stats_rows(stats: Mapping[str, CategoryRow]):
    for label in CATEGORY_ORDER:
        row = stats[label]
        is_edge = label.startswith("edge_")
        yield (
            "-" if is_edge else label,
            label if is_edge else "=",
            row.scc_count if label.startswith("scc") else None,
            row.wcc_count,
            row.node_count,
            row.link_count,
            row.tx_count,
            row.volume,
        )


def _significance_rows(cells: Sequence[SignificanceCell], mode: str):
    for cell in cells:
        yield (
            mode,
            cell.category,
            cell.feature,
            cell.empirical,
            cell.null_mean,
            cell.null_sd,
            cell.null_median,
            cell.null_iqr,
            cell.z,
            cell.robust_z,
            cell.ad_statistic,
            cell.ad_p_value,
            cell.normality,
            cell.preferred,
        )


_SIGNIFICANCE_HEADER = (
    "mode", "category", "feature", "empirical", "null_mean", "null_sd",
    "null_median", "null_iqr", "z", "robust_z", "ad_statistic", "ad_p_value",
    "normality", "preferred",
)


def _cell_dict(cell: SignificanceCell, mode: str) -> dict:
    return {"mode": mode, **cell.__dict__}


ALL_STAGES: tuple[str, ...] = (
    "ingest", "topology", "significance", "triads", "recirculation", "report",
)

# Which stages each CLI subcommand writes; upstream results are computed in
# memory as needed but not written.
_COMMAND_STAGES: dict[str, frozenset[str]] = {
    "ingest": frozenset({"ingest"}),
    "topology": frozenset({"topology"}),
    "significance": frozenset({"significance"}),
    "triads": frozenset({"triads"}),
    "recirculation": frozenset({"recirculation"}),
    "report": frozenset({"report"}),
    "run": frozenset(ALL_STAGES),
}


def run_stage_subset(config: PipelineConfig, command: str) -> PipelineResult:
    return run_pipeline(config, stages=_COMMAND_STAGES[command])


def run_pipeline(
    config: PipelineConfig,
    stages: frozenset[str] = frozenset(ALL_STAGES),
) -> PipelineResult:
    """Execute the selected stages and write the report bundle."""
    out_dir = Path(config.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {out_dir}: {exc}") from None
    writer = _Writer(out_dir, tuple(config.formats))
    stage_times: list[dict] = []

    def stage(name: str):
        stage_times.append({"name": name, "started": time.perf_counter()})

    def stage_done():
        entry = stage_times[-1]
        entry["seconds"] = round(time.perf_counter() - entry.pop("started"), 6)

    # ingest
    stage("ingest")
    transactions, diagnostics = parse_ledger(
        config.input_path, config.column_mapping, config.filter_spec
    )
    graph, agg_diag = aggregate(transactions)
    diagnostics.self_transfers_dropped = agg_diag.self_transfers_dropped
    clean = [t for t in transactions if t.source != t.target]
    if "ingest" in stages:
        write_transactions(out_dir / "transactions_normalized.csv", transactions)
        writer.written.append(out_dir / "transactions_normalized.csv")
        writer.json("ingest_diagnostics", diagnostics.as_dict(), always=True)
        writer.json(
            "ledger_totals",
            {
                "nodes": graph.node_count,
                "links": graph.link_count,
                "transactions": graph.tx_count,
                "volume": graph.volume,
            },
            always=True,
        )
        if graph.node_count:
            writer.json("degree_stats", degree_stats(graph).as_dict(), always=True)
    stage_done()

    # topology
    stage("topology")
    partition = categorize(graph)
    stats = category_stats(graph, partition)
    one_time = one_time_users(graph, partition)
    if "topology" in stages:
        writer.csv(
            "node_assignment",
            ("node_id", "category", "component_id"),
            (
                (v, partition.node_category[v].value, partition.node_component[v])
                for v in graph.nodes
            ),
        )
        writer.csv(
            "edge_assignment",
            ("source", "target", "kind", "component_id", "category_label"),
            (
                (s, t, a.kind.value, a.component_id, partition.edge_label((s, t)))
                for (s, t), a in partition.edge_assignment.items()
            ),
        )
        writer.csv(
            "category_stats",
            ("node_label", "edge_label", "sccs", "wccs", "nodes", "links", "transactions", "volume"),
            _category_stats_rows(stats),
        )
        writer.json(
            "category_stats",
            {
                label: {
                    "scc_count": stats[label].scc_count,
                    "wcc_count": stats[label].wcc_count,
                    "node_count": stats[label].node_count,
                    "link_count": stats[label].link_count,
                    "tx_count": stats[label].tx_count,
                    "volume": stats[label].volume,
                }
                for label in CATEGORY_ORDER
            },
        )
        writer.csv(
            "one_time_users",
            ("category", "one_outgoing", "one_incoming", "outgoing_volume", "incoming_volume"),
            [
                (label, row.one_outgoing, row.one_incoming, row.outgoing_volume, row.incoming_volume)
                for label, row in one_time.rows.items()
            ]
            + [
                (
                    "total",
                    one_time.total.one_outgoing,
                    one_time.total.one_incoming,
                    one_time.total.outgoing_volume,
                    one_time.total.incoming_volume,
                )
            ],
        )
        writer.json(
            "one_time_users",
            {
                "rows": {label: row.__dict__ for label, row in one_time.rows.items()},
                "total": one_time.total.__dict__,
            },
        )
    stage_done()

    # significance
    seeds: dict[str, int] = {}
    if "significance" in stages:
        stage("significance")
        for mode in config.modes:
            spec = EnsembleSpec(
                mode=mode,
                replicas=config.replicas,
                master_seed=config.master_seed,
                max_repair_attempts=config.max_repair_attempts,
            )
            seeds[f"significance_{mode.value}"] = config.master_seed
            ensemble = run_ensemble(graph, spec, jobs=config.jobs)
            cells = significance(stats, ensemble)
            writer.csv(
                f"significance_{mode.value}",
                _SIGNIFICANCE_HEADER,
                _significance_rows(cells, mode.value),
            )
            writer.json(
                f"significance_{mode.value}",
                [_cell_dict(cell, mode.value) for cell in cells],
            )
        stage_done()

    # triads
    if "triads" in stages:
        stage("triads")
        census_tables = category_census(graph, partition, DEFAULT_CENSUS_CATEGORIES)
        writer.csv(
            "triad_census",
            ("category",) + TRIAD_LABELS,
            (
                (label,) + tuple(census_tables[label][t] for t in TRIAD_LABELS)
                for label in census_tables
            ),
        )
        writer.json("triad_census", census_tables)
        for mode in config.modes:
            spec = EnsembleSpec(
                mode=mode,
                replicas=config.replicas,
                master_seed=config.master_seed,
                max_repair_attempts=config.max_repair_attempts,
            )
            seeds[f"triads_{mode.value}"] = config.master_seed
            cells = triad_significance(graph, partition, spec, jobs=config.jobs)
            writer.csv(
                f"triad_significance_{mode.value}",
                _SIGNIFICANCE_HEADER,
                _significance_rows(cells, mode.value),
            )
            writer.json(
                f"triad_significance_{mode.value}",
                [_cell_dict(cell, mode.value) for cell in cells],
            )
        stage_done()

    # recirculation
    signatures: list[TemporalSignature] = []
    if "recirculation" in stages or "report" in stages:
        stage("recirculation")
        ops = extract_ops(clean)
        if ops:
            classified = classify_ops(ops)
            signatures = user_signatures(classified)
            if "recirculation" in stages:
                tables = crosstab(graph, partition, classified, signatures, clean)
                _write_recirculation(writer, classified, signatures, tables, partition)
        elif "recirculation" in stages:
            writer.json("recirculation_coverage", {"op_count": 0}, always=True)
        stage_done()

    # report
    if "report" in stages:
        stage("report")
        strategy = strategy_report(graph.volume, stats, one_time, signatures, partition)
        writer.json("strategy_report", strategy.as_dict(), always=True)
        stage_done()

    manifest = {
        "input": {
            "path": str(config.input_path),
            "sha256": hashlib.sha256(Path(config.input_path).read_bytes()).hexdigest(),
        },
        "config": {
            "modes": [m.value for m in config.modes],
            "replicas": config.replicas,
            "master_seed": config.master_seed,
            "max_repair_attempts": config.max_repair_attempts,
            "jobs": config.jobs,
            "formats": list(config.formats),
            "keep_subtypes": list(config.filter_spec.keep_subtypes),
            "exclude_accounts": sorted(config.filter_spec.exclude_accounts),
        },
        "seeds": seeds,
        "versions": {
            "ledgerflow": _package_version(),
            "python": sys.version.split()[0],
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
        "stages": stage_times,
        "outputs": sorted(str(p.name) for p in writer.written),
    }
    write_json(out_dir / "manifest.json", manifest)
    writer.written.append(out_dir / "manifest.json")
    return PipelineResult(manifest=manifest, output_files=tuple(writer.written))


def _write_recirculation(
    writer: _Writer,
    classified: ClassifiedOps,
    signatures: Sequence[TemporalSignature],
    tables: CrosstabResult,
    partition: TopologyPartition,
) -> None:
    writer.csv(
        "operations",
        ("user", "first_in", "last_out", "duration_seconds", "n_in", "n_out", "category"),
        (
            (
                op.user,
                _iso(op.first_in),
                _iso(op.last_out),
                op.duration,
                len(op.in_tx_ids),
                len(op.out_tx_ids),
                category.value,
            )
            for op, category in zip(classified.ops, classified.categories)
        ),
    )
    boundaries = classified.boundaries
    writer.json(
        "recirculation_boundaries",
        {
            "q1_seconds": boundaries.q1,
            "q2_seconds": boundaries.q2,
            "q3_seconds": boundaries.q3,
            "q1": format_duration(boundaries.q1),
            "q2": format_duration(boundaries.q2),
            "q3": format_duration(boundaries.q3),
            "modes": {
                category.value: (None if mode is None else {"seconds": mode.value, "count": mode.count})
                for category, mode in classified.modes.items()
            },
            "global_mode": {
                "seconds": classified.global_mode.value,
                "count": classified.global_mode.count,
            },
        },
        always=True,
    )
    writer.csv(
        "user_signatures",
        ("user", "signature", "node_category"),
        (
            (s.user, s.key, partition.node_category[s.user].value)
            for s in signatures
        ),
    )
    freq_labels = tuple(c.value for c in FrequencyCategory)
    writer.csv(
        "recirculation_tx_crosstab",
        ("category",) + freq_labels + ("total",),
        (
            (label,)
            + tuple(tables.tx_table[label][f] for f in freq_labels)
            + (sum(tables.tx_table[label].values()),)
            for label in sorted(tables.tx_table)
        ),
    )
    writer.csv(
        "recirculation_user_crosstab",
        ("node_category", "signature", "users"),
        (
            (label, signature, count)
            for label in sorted(tables.user_table)
            for signature, count in sorted(tables.user_table[label].items())
        ),
    )
    writer.json(
        "recirculation_coverage",
        {
            "op_count": tables.coverage.op_count,
            "tx_in_ops": tables.coverage.tx_in_ops,
            "tx_share": tables.coverage.tx_share,
            "volume_in_ops": tables.coverage.volume_in_ops,
            "volume_share": tables.coverage.volume_share,
            "tx_counted_twice": tables.coverage.tx_counted_twice,
            "recirculating_users": tables.coverage.recirculating_users,
            "user_share": tables.coverage.user_share,
        },
        always=True,
    )


def _package_version() -> str:
    from . import __version__

    return __version__


def write_scenario(out_dir: Path, spec: ScenarioSpec, seed: int) -> tuple[Path, Path]:
    """Write a synthetic ledger plus its ground-truth categories."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ledger = generate_synthetic(spec, seed)
    ledger_path = out_dir / "ledger.csv"
    truth_path = out_dir / "ground_truth.csv"
    write_transactions(ledger_path, ledger.transactions)
    write_csv(
        truth_path,
        ("node_id", "category"),
        sorted(ledger.node_category.items()),
    )
    return ledger_path, truth_path
