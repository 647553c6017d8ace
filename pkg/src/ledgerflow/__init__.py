"""ledgerflow: topology, null-model significance, and recirculation analytics
for timestamped transaction ledgers.

The pipeline: parse a ledger CSV into transactions, aggregate them into a
weighted directed simple graph, partition the graph into exclusive
topological categories, test category sizes and triad counts against
degree-preserving null ensembles, and extract per-user recirculation
operations with quartile frequency categories.
"""

from .errors import AnalysisError, ConfigError, DataError, LedgerflowError
from .graph import AggregateDiagnostics, LedgerGraph, LinkRecord, aggregate
from .ingest import (
    ColumnMapping,
    FilterSpec,
    IngestDiagnostics,
    Transaction,
    parse_ledger,
    write_transactions,
)
from .degrees import DegreeStats, PowerLawFit, degree_stats
from .topology import (
    CATEGORY_ORDER,
    CategoryRow,
    NodeCategory,
    OneTimeUserTable,
    TopologyPartition,
    categorize,
    category_stats,
    one_time_users,
    verify_partition,
)
from .nullmodel import (
    EnsembleSpec,
    RandomizationError,
    SignificanceCell,
    SwapMode,
    derive_seed,
    randomize,
    randomize_endpoints,
    run_ensemble,
    significance,
)
from .triads import (
    TRIAD_LABELS,
    category_census,
    census,
    census_of_graph,
    triad_significance,
)
from .recirculation import (
    ClassifiedOps,
    FrequencyCategory,
    RecirculationOp,
    TemporalSignature,
    classify_ops,
    crosstab,
    extract_ops,
    user_signatures,
)
from .synthetic import ScenarioSpec, SyntheticLedger, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "ConfigError",
    "DataError",
    "LedgerflowError",
    "AggregateDiagnostics",
    "LedgerGraph",
    "LinkRecord",
    "aggregate",
    "ColumnMapping",
    "FilterSpec",
    "IngestDiagnostics",
    "Transaction",
    "parse_ledger",
    "write_transactions",
    "DegreeStats",
    "PowerLawFit",
    "degree_stats",
    "CATEGORY_ORDER",
    "CategoryRow",
    "NodeCategory",
    "OneTimeUserTable",
    "TopologyPartition",
    "categorize",
    "category_stats",
    "one_time_users",
    "verify_partition",
    "EnsembleSpec",
    "RandomizationError",
    "SignificanceCell",
    "SwapMode",
    "derive_seed",
    "randomize",
    "randomize_endpoints",
    "run_ensemble",
    "significance",
    "TRIAD_LABELS",
    "category_census",
    "census",
    "census_of_graph",
    "triad_significance",
    "ClassifiedOps",
    "FrequencyCategory",
    "RecirculationOp",
    "TemporalSignature",
    "classify_ops",
    "crosstab",
    "extract_ops",
    "user_signatures",
    "ScenarioSpec",
    "SyntheticLedger",
    "generate_synthetic",
    "__version__",
]
