"""Hot-deck imputation: fill each missing cell with a uniform draw (with
replacement) from the observed entries of the same column.

Mechanism-blind draws are essential here: an imputed column is marginally
uncorrelated with its own completeness indicator, so any surviving partial
correlation between the two must be carried by third variables.  Model-based
imputation would destroy that null and is deliberately out of scope.

Seeding
-------
Member ``k`` (1-based) of an ensemble uses ``split_seed(master_seed, k)``
where ``split_seed(s, k) = (s XOR (k * 0x9E3779B97F4A7C15)) mod 2**64``.
The constant is the 64-bit golden-ratio multiplier; the rule is fixed so runs
reproduce bit-identically across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import AugmentedDataset
from .errors import ContractError, UnimputableColumnError

SEED_SPLIT_CONSTANT = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def split_seed(master_seed: int, k: int) -> int:
    """Derive the k-th child seed from a master seed (documented XOR rule)."""
    return (int(master_seed) ^ ((k * SEED_SPLIT_CONSTANT) & _MASK64)) & _MASK64


@dataclass(frozen=True)
class ImputationEnsemble:
    """K complete copies of an augmented dataset, one per split seed."""

    members: tuple[np.ndarray, ...]
    seeds: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.members)


def hot_deck_impute(augmented: AugmentedDataset, seed: int) -> np.ndarray:
    """Return one complete matrix over the augmented variable set.

    Base columns have their missing cells replaced by seeded uniform draws
    from the observed entries of the same column; observed cells and the
    indicator columns pass through unchanged.

    Raises
    ------
    UnimputableColumnError if a column has missing cells but nothing observed.
    """
    rng = np.random.default_rng(int(seed) & _MASK64)
    base = augmented.base
    filled = base.values.copy()
    for j, meta in enumerate(base.metas):
        observed = base.mask[:, j]
        n_missing = int((~observed).sum())
        if n_missing == 0:
            continue
        pool = base.values[observed, j]
        if pool.size == 0:
            raise UnimputableColumnError(meta.name)
        filled[~observed, j] = rng.choice(pool, size=n_missing, replace=True)
    return np.hstack([filled, augmented.indicator_values])


def make_ensemble(
    augmented: AugmentedDataset, k: int = 25, master_seed: int = 0
) -> ImputationEnsemble:
    """Generate K complete matrices from seeds split off ``master_seed``."""
    if k < 1:
        raise ContractError(f"ensemble size must be >= 1, got {k}")
    seeds = tuple(split_seed(master_seed, i) for i in range(1, k + 1))
    members = tuple(hot_deck_impute(augmented, seed) for seed in seeds)
    return ImputationEnsemble(members=members, seeds=seeds)
