"""Synthetic Gaussian data with controlled missingness mechanisms.

Mechanisms use a logistic link so every cell has an analytic missingness
probability:

    MCAR   P(missing_i) = rate
    MAR    P(missing_i) = expit(logit(rate) + slope * driver_i)
    MNAR   P(missing_i) = expit(logit(rate) + slope * target_i)

MAR reads the probability off another (fully observed) variable; MNAR reads
it off the target's own latent value.  The latent values and per-cell
probabilities are retained in :class:`GroundTruth` so detection results can
be scored against what actually generated the data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit

from .dataset import Category, Dataset, VariableMeta
from .errors import ContractError
from .impute import split_seed


class MechanismKind(str, enum.Enum):
    MCAR = "MCAR"
    MAR = "MAR"
    MNAR = "MNAR"


@dataclass(frozen=True)
class MechanismSpec:
    """One missingness mechanism acting on one target variable."""

    kind: MechanismKind
    target: str
    rate: float
    driver: str | None = None
    slope: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", MechanismKind(self.kind))
        if not 0.0 < self.rate < 1.0:
            raise ContractError(f"rate must be inside (0, 1), got {self.rate}")
        if self.kind is MechanismKind.MAR:
            if not self.driver:
                raise ContractError("MAR mechanism needs a driver variable")
            if self.driver == self.target:
                raise ContractError("MAR driver must differ from the target")
        elif self.driver is not None:
            raise ContractError(f"{self.kind.value} mechanism takes no driver")
        if not np.isfinite(self.slope):
            raise ContractError("slope must be finite")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "target": self.target,
            "rate": self.rate,
            "driver": self.driver,
            "slope": self.slope,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MechanismSpec":
        return cls(
            kind=MechanismKind(d["kind"]),
            target=d["target"],
            rate=float(d["rate"]),
            driver=d.get("driver"),
            slope=float(d.get("slope", 0.0)),
            seed=int(d.get("seed", 0)),
        )


@dataclass(frozen=True)
class GroundTruth:
    """Everything needed to regenerate and score one synthetic dataset."""

    precision: np.ndarray
    specs: tuple[MechanismSpec, ...]
    probabilities: np.ndarray  # (n, p) true per-cell missingness probability
    names: tuple[str, ...]
    n: int
    seed: int
    latent: np.ndarray | None = field(default=None, repr=False)

    def expected_arcs(self) -> set[tuple[str, str]]:
        """(observation, completeness-parent) pairs the mechanisms imply."""
        from .augment import indicator_name

        arcs = set()
        for spec in self.specs:
            comp = indicator_name(spec.target)
            if spec.kind is MechanismKind.MNAR:
                arcs.add((spec.target, comp))
            elif spec.kind is MechanismKind.MAR:
                arcs.add((spec.driver, comp))
        return arcs

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "n": self.n,
            "seed": self.seed,
            "precision": self.precision.tolist(),
            "mechanisms": [s.to_dict() for s in self.specs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        specs = tuple(MechanismSpec.from_dict(s) for s in d["mechanisms"])
        precision = np.asarray(d["precision"], dtype=float)
        names = tuple(d["names"])
        n = int(d["n"])
        seed = int(d["seed"])
        latent = generate_gaussian(precision, n, split_seed(seed, 1))
        probabilities = _probability_matrix(latent, names, specs)
        return cls(
            precision=precision,
            specs=specs,
            probabilities=probabilities,
            names=names,
            n=n,
            seed=seed,
            latent=latent,
        )


def _require_spd(precision: np.ndarray) -> np.ndarray:
    m = np.asarray(precision, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError("precision matrix must be square")
    if not np.allclose(m, m.T, atol=1e-10):
        raise ContractError("precision matrix must be symmetric")
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise ContractError("precision matrix must be positive definite") from None
    return m


def generate_gaussian(precision: np.ndarray, n: int, seed: int) -> np.ndarray:
    """Draw n i.i.d. rows from N(0, precision^{-1}), deterministically per seed."""
    m = _require_spd(precision)
    cov = np.linalg.inv(m)
    cov = (cov + cov.T) / 2.0
    chol = np.linalg.cholesky(cov)
    rng = np.random.default_rng(int(seed))
    return rng.standard_normal((int(n), m.shape[0])) @ chol.T


def ar1_precision(p: int, rho: float) -> np.ndarray:
    """Tridiagonal precision of an AR(1) chain with lag-one correlation rho."""
    if not -1.0 < rho < 1.0:
        raise ContractError("AR(1) correlation must be inside (-1, 1)")
    theta = np.zeros((p, p))
    scale = 1.0 / (1.0 - rho * rho)
    for i in range(p):
        theta[i, i] = scale * (1.0 + rho * rho) if 0 < i < p - 1 else scale
    for i in range(p - 1):
        theta[i, i + 1] = theta[i + 1, i] = -rho * scale
    return theta


def _probability_column(
    latent: np.ndarray, names: tuple[str, ...], spec: MechanismSpec
) -> np.ndarray:
    name_list = list(names)
    if spec.target not in name_list:
        raise ContractError(f"mechanism target {spec.target!r} not in variables")
    if spec.kind is MechanismKind.MCAR:
        return np.full(latent.shape[0], spec.rate)
    if spec.kind is MechanismKind.MAR:
        if spec.driver not in name_list:
            raise ContractError(f"mechanism driver {spec.driver!r} not in variables")
        driver = latent[:, name_list.index(spec.driver)]
        return expit(logit(spec.rate) + spec.slope * driver)
    target = latent[:, name_list.index(spec.target)]
    return expit(logit(spec.rate) + spec.slope * target)


def _probability_matrix(
    latent: np.ndarray, names: tuple[str, ...], specs: tuple[MechanismSpec, ...]
) -> np.ndarray:
    probs = np.zeros_like(latent)
    name_list = list(names)
    for spec in specs:
        probs[:, name_list.index(spec.target)] = _probability_column(
            latent, names, spec
        )
    return probs


def apply_mechanism(
    matrix: np.ndarray,
    names: list[str] | tuple[str, ...],
    spec: MechanismSpec,
    categories: dict[str, Category] | None = None,
) -> Dataset:
    """Mask the target column of a complete matrix according to one mechanism."""
    return apply_mechanisms(matrix, names, [spec], categories)


def apply_mechanisms(
    matrix: np.ndarray,
    names: list[str] | tuple[str, ...],
    specs: list[MechanismSpec] | tuple[MechanismSpec, ...],
    categories: dict[str, Category] | None = None,
) -> Dataset:
    """Mask several target columns, one mechanism per target."""
    latent = np.asarray(matrix, dtype=float)
    names = tuple(names)
    targets = [s.target for s in specs]
    if len(set(targets)) != len(targets):
        raise ContractError("each target may carry at most one mechanism")
    mask = np.ones(latent.shape, dtype=bool)
    for spec in specs:
        probs = _probability_column(latent, names, spec)
        rng = np.random.default_rng(int(spec.seed))
        missing = rng.random(latent.shape[0]) < probs
        mask[:, list(names).index(spec.target)] = ~missing
    values = latent.copy()
    values[~mask] = np.nan
    categories = categories or {}
    metas = tuple(
        VariableMeta(name=name, category=categories.get(name, Category.OTHER))
        for name in names
    )
    return Dataset(metas=metas, values=values, mask=mask)


def simulate_dataset(
    precision: np.ndarray,
    n: int,
    names: list[str] | tuple[str, ...],
    specs: list[MechanismSpec] | tuple[MechanismSpec, ...],
    seed: int = 0,
    categories: dict[str, Category] | None = None,
) -> tuple[Dataset, GroundTruth]:
    """Generate a masked dataset plus the ground truth that produced it.

    The latent draw uses ``split_seed(seed, 1)``; mechanism ``i`` (0-based)
    draws with ``split_seed(seed, 2 + i)`` unless its spec carries a nonzero
    seed of its own.
    """
    names = tuple(names)
    precision = _require_spd(precision)
    if len(names) != precision.shape[0]:
        raise ContractError("one name per precision row required")
    latent = generate_gaussian(precision, n, split_seed(seed, 1))
    seeded = tuple(
        spec
        if spec.seed
        else MechanismSpec(
            kind=spec.kind,
            target=spec.target,
            rate=spec.rate,
            driver=spec.driver,
            slope=spec.slope,
            seed=split_seed(seed, 2 + i),
        )
        for i, spec in enumerate(specs)
    )
    dataset = apply_mechanisms(latent, names, seeded, categories)
    truth = GroundTruth(
        precision=precision,
        specs=seeded,
        probabilities=_probability_matrix(latent, names, seeded),
        names=names,
        n=int(n),
        seed=int(seed),
        latent=latent,
    )
    return dataset, truth


def regenerate_dataset(truth: GroundTruth) -> Dataset:
    """Rebuild the masked dataset a GroundTruth describes, bit-identically."""
    latent = (
        truth.latent
        if truth.latent is not None
        else generate_gaussian(truth.precision, truth.n, split_seed(truth.seed, 1))
    )
    return apply_mechanisms(latent, truth.names, truth.specs)


def run_benchmark(truths: list[GroundTruth], config=None) -> dict:
    """Score arc recovery of the full pipeline against known mechanisms.

    Every ground truth is replayed through the analysis pipeline; recovered
    arcs are compared with the arcs its mechanisms imply.  Replicate-level
    pipeline errors are recorded and do not abort the batch.

    Returns a JSON-ready dict with, per mechanism kind:

    - MNAR: ``self_arc_power`` (share of targets whose target/indicator arc
      was flagged) and ``witness_rate`` (share of flagged targets with at
      least one witness);
    - MAR: ``driver_arc_power`` and ``self_arc_rate`` (false self arcs);
    - every kind: ``false_arc_rate``, the share of observation/indicator
      pairs flagged although no mechanism implies them.
    """
    from .augment import indicator_name
    from .errors import MissgraphError
    from .pipeline import AnalysisConfig, analyze_dataset

    if not truths:
        raise ContractError("benchmark needs at least one replicate")
    config = config or AnalysisConfig()
    counters: dict[str, dict[str, float]] = {}

    def bucket(kind: str) -> dict[str, float]:
        return counters.setdefault(
            kind,
            {
                "replicates": 0,
                "errors": 0,
                "mnar_self_hits": 0,
                "mar_self_hits": 0,
                "driver_arc_hits": 0,
                "witness_hits": 0,
                "mnar_targets": 0,
                "mar_targets": 0,
                "false_arcs": 0,
                "mixed_pairs": 0,
            },
        )

    failures: list[str] = []
    for truth in truths:
        kinds = sorted({s.kind.value for s in truth.specs})
        label = "+".join(kinds) if kinds else "none"
        stats = bucket(label)
        stats["replicates"] += 1
        try:
            dataset = regenerate_dataset(truth)
            result = analyze_dataset(dataset, config)
        except MissgraphError as exc:
            stats["errors"] += 1
            failures.append(f"{label}: {exc}")
            continue
        found = {(a.observation_var, a.completeness_var) for a in result.arcs}
        expected = truth.expected_arcs()
        n_indicators = sum(
            1 for v in result.report.variables if v["kind"] == "Completeness"
        )
        n_observation = len(result.report.variables) - n_indicators
        stats["mixed_pairs"] += n_indicators * n_observation
        stats["false_arcs"] += len(found - expected)
        for spec in truth.specs:
            comp = indicator_name(spec.target)
            if spec.kind is MechanismKind.MNAR:
                stats["mnar_targets"] += 1
                if (spec.target, comp) in found:
                    stats["mnar_self_hits"] += 1
                    if any(
                        f.witnesses
                        for f in result.findings
                        if f.variable == spec.target
                    ):
                        stats["witness_hits"] += 1
            elif spec.kind is MechanismKind.MAR:
                stats["mar_targets"] += 1
                if (spec.driver, comp) in found:
                    stats["driver_arc_hits"] += 1
                if (spec.target, comp) in found:
                    stats["mar_self_hits"] += 1

    summary: dict[str, dict] = {}
    for label, s in counters.items():
        entry: dict[str, float] = {
            "replicates": int(s["replicates"]),
            "errors": int(s["errors"]),
        }
        if s["mnar_targets"]:
            entry["self_arc_power"] = s["mnar_self_hits"] / s["mnar_targets"]
            entry["witness_rate"] = (
                s["witness_hits"] / s["mnar_self_hits"]
                if s["mnar_self_hits"]
                else 0.0
            )
        if s["mar_targets"]:
            entry["driver_arc_power"] = s["driver_arc_hits"] / s["mar_targets"]
            entry["self_arc_rate"] = s["mar_self_hits"] / s["mar_targets"]
        if s["mixed_pairs"]:
            entry["false_arc_rate"] = s["false_arcs"] / s["mixed_pairs"]
        summary[label] = entry
    return {"mechanisms": summary, "failures": failures}
