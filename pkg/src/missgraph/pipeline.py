"""End-to-end analysis: parse, augment, impute, transform, fit, pool, report.

Stage order is fixed: completeness indicators are derived from the mask,
missing cells are hot-deck imputed into K complete members, each member is
rank-Gaussianized, gets its own regularization level (permutation criterion
by default), is fitted by the graphical lasso and de-biased, and the
resulting partial correlations are Fisher-pooled across members before arcs
are extracted.

Seeding: member k (1-based) imputes with ``split_seed(seed, k)`` and selects
its regularization with ``split_seed(split_seed(seed, k), RIC_STREAM)``, so
the whole run is a pure function of (config, seed).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .augment import make_completeness_indicators
from .dataset import DEFAULT_NA_TOKENS, Dataset, load_schema, missing_profile
from .errors import ConfigError, ContractError, stage
from .ggm import fit_precision, select_lambda_ric
from .impute import hot_deck_impute, split_seed
from .npn import nonparanormal_transform
from .pooling import (
    MissingnessArc,
    MnarFinding,
    PooledEdgeTable,
    detect_mnar,
    edge_p_values,
    extract_missingness_arcs,
    pool_partial_correlations,
)
from .report import AnalysisReport, render_arcs_csv, render_dot

#: Stream index separating the RIC permutation RNG from the imputation RNG.
RIC_STREAM = 7919

NO_INDICATOR_WARNING = "no completeness indicators generated"


@dataclass
class AnalysisConfig:
    """Knobs of one analysis run; flags > config file > these defaults."""

    input: Path | None = None
    schema: Path | None = None
    alpha: float = 0.01
    n_imputations: int = 25
    seed: int = 0
    lambda_method: str = "ric"  # "ric" | "fixed"
    lambda_value: float | None = None
    n_rotations: int = 20
    out: Path | None = None
    na_tokens: frozenset[str] = DEFAULT_NA_TOKENS
    dump_members: bool = False

    def validate(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be inside (0, 1), got {self.alpha}")
        if self.n_imputations < 1:
            raise ConfigError(
                f"n_imputations must be >= 1, got {self.n_imputations}"
            )
        if self.lambda_method not in ("ric", "fixed"):
            raise ConfigError(
                f"lambda_method must be 'ric' or 'fixed', got {self.lambda_method!r}"
            )
        if self.lambda_method == "fixed":
            if self.lambda_value is None or self.lambda_value < 0:
                raise ConfigError(
                    "lambda_method 'fixed' needs a non-negative lambda_value"
                )
        if self.n_rotations < 1:
            raise ConfigError(f"n_rotations must be >= 1, got {self.n_rotations}")

    def to_dict(self) -> dict:
        return {
            "input": str(self.input) if self.input else None,
            "schema": str(self.schema) if self.schema else None,
            "alpha": self.alpha,
            "n_imputations": self.n_imputations,
            "seed": self.seed,
            "lambda_method": self.lambda_method,
            "lambda_value": self.lambda_value,
            "n_rotations": self.n_rotations,
            "na_tokens": sorted(self.na_tokens),
            "dump_members": self.dump_members,
        }


@dataclass
class AnalysisResult:
    """In-memory companion of the JSON report, for library callers."""

    report: AnalysisReport
    table: PooledEdgeTable
    arcs: list[MissingnessArc]
    findings: list[MnarFinding]
    lambdas: list[float]
    members: list[np.ndarray] = field(default_factory=list)


def analyze_dataset(dataset: Dataset, config: AnalysisConfig) -> AnalysisResult:
    """Run the full pipeline on an in-memory dataset."""
    config.validate()
    started = time.perf_counter()
    with stage("augment"):
        augmented = make_completeness_indicators(dataset)
    warnings_list: list[str] = []
    if not augmented.indicator_metas:
        warnings_list.append(NO_INDICATOR_WARNING)
    metas = augmented.metas
    if len(metas) < 2:
        raise ContractError("analysis needs at least 2 variables")
    names = augmented.names
    fits = []
    lambdas = []
    members: list[np.ndarray] = []
    for k in range(1, config.n_imputations + 1):
        member_seed = split_seed(config.seed, k)
        with stage("impute"):
            member = hot_deck_impute(augmented, member_seed)
        if config.dump_members:
            members.append(member)
        with stage("transform"):
            transformed = nonparanormal_transform(member, names)
        if config.lambda_method == "ric":
            with stage("select_lambda"):
                lam = select_lambda_ric(
                    transformed,
                    n_rotations=config.n_rotations,
                    seed=split_seed(member_seed, RIC_STREAM),
                )
        else:
            lam = float(config.lambda_value)
        lambdas.append(lam)
        with stage("fit"):
            fits.append(fit_precision(transformed, lam))
    with stage("pool"):
        table = pool_partial_correlations(fits, metas)
        table = edge_p_values(table)
    with stage("inference"):
        arcs = extract_missingness_arcs(table, config.alpha)
        findings = detect_mnar(arcs, table, config.alpha)
    elapsed = time.perf_counter() - started
    report = _build_report(
        dataset, config, table, arcs, findings, lambdas,
        list(augmented.excluded_constant), warnings_list, elapsed,
    )
    return AnalysisResult(
        report=report,
        table=table,
        arcs=arcs,
        findings=findings,
        lambdas=lambdas,
        members=members,
    )


def _build_report(
    dataset: Dataset,
    config: AnalysisConfig,
    table: PooledEdgeTable,
    arcs: list[MissingnessArc],
    findings: list[MnarFinding],
    lambdas: list[float],
    excluded: list[str],
    warnings_list: list[str],
    elapsed: float,
) -> AnalysisReport:
    variables = [
        {
            "name": m.name,
            "category": m.category.value,
            "kind": m.kind.value,
            "parent": m.parent,
        }
        for m in table.metas
    ]
    profile = [
        {
            "name": row.name,
            "category": row.category.value,
            "missing_proportion": row.missing_proportion,
        }
        for row in missing_profile(dataset)
    ]
    edges = []
    for i, j, meta_i, meta_j in table.pairs():
        edges.append(
            {
                "var_a": meta_i.name,
                "var_b": meta_j.name,
                "pooled_rho": float(table.pooled_rho[i, j]),
                "p_value": float(table.p_value[i, j]),
                "support_count": int(table.support_count[i, j]),
                "member_rhos": [float(r) for r in table.member_rho[:, i, j]],
            }
        )
    arc_dicts = [
        {
            "obs_var": a.observation_var,
            "comp_var": a.completeness_var,
            "rho": a.pooled_rho,
            "p": a.p_value,
            "sign": a.sign,
            "counterpart_rho": a.counterpart_rho,
            "counterpart_p": a.counterpart_p,
        }
        for a in arcs
    ]
    finding_dicts = [
        {
            "variable": f.variable,
            "self_arc_rho": f.self_arc_rho,
            "self_arc_p": f.self_arc_p,
            "witnesses": list(f.witnesses),
        }
        for f in findings
    ]
    meta = {
        "package": "missgraph",
        "version": __version__,
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "seed": config.seed,
        "n_rows": dataset.n_rows,
        "config": config.to_dict(),
        "runtime": {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "elapsed_seconds": elapsed,
        },
    }
    return AnalysisReport(
        meta=meta,
        variables=variables,
        missing_profile=profile,
        excluded_constant=excluded,
        warnings=warnings_list,
        lambdas=lambdas,
        edges=edges,
        arcs=arc_dicts,
        mnar_findings=finding_dicts,
    )


def run_analysis(config: AnalysisConfig) -> tuple[AnalysisResult, list[Path]]:
    """File-level analyze: parse the input CSV, run, write the output files.

    Writes ``report.json``, ``arcs.csv`` and ``graph.dot`` into ``config.out``
    (plus ``member_###.csv`` when member dumping is on).  Output files are
    written only after the whole computation succeeded; a failed write cleans
    up whatever was already on disk.
    """
    from .dataset import parse_csv  # local import keeps module load light

    config.validate()
    if config.input is None:
        raise ConfigError("analyze needs an input file")
    if config.out is None:
        raise ConfigError("analyze needs an output directory")
    with stage("parse"):
        schema = load_schema(config.schema) if config.schema else None
        dataset = parse_csv(config.input, na_tokens=config.na_tokens, schema=schema)
    result = analyze_dataset(dataset, config)
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        report_path = outdir / "report.json"
        report_path.write_text(result.report.to_json(), encoding="utf-8")
        written.append(report_path)
        arcs_path = outdir / "arcs.csv"
        arcs_path.write_text(render_arcs_csv(result.report), encoding="utf-8")
        written.append(arcs_path)
        dot_path = outdir / "graph.dot"
        dot_path.write_text(render_dot(result.report), encoding="utf-8")
        written.append(dot_path)
        if config.dump_members:
            for idx, member in enumerate(result.members, start=1):
                member_path = outdir / f"member_{idx:03d}.csv"
                _write_member_csv(member, result.table.names, member_path)
                written.append(member_path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return result, written


def _write_member_csv(member: np.ndarray, names: list[str], path: Path) -> None:
    import csv as _csv

    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = _csv.writer(handle)
        writer.writerow(names)
        for row in member:
            writer.writerow([repr(float(v)) for v in row])
