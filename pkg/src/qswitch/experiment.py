"""Emulation of the photonic switch experiment at the level of photon counts.

Each depolarizing channel is realised as a uniformly random unitary from an
orthogonal basis (Paulis for qubits). Every configuration of unitaries is run
through the switch separately; counts for the six single-qubit projectors are
drawn from Poisson laws and accumulated over configurations, and the output
state is recovered by linear-inversion tomography. Error bars come from a
parametric bootstrap that resamples every count cell.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._constants import RANK_TOL
from .channels import PAULI_LABELS, DensityMatrix, KrausChannel, named_ket, unitary_basis, unitary_channel
from .exceptions import DimensionError, InsufficientDataError, ValidationError
from .qmath import eig_herm, herm_sqrt, projector
from .switch import ConditionalOutcome, OrderSet, SwitchSpec, run_switch

__all__ = [
    "DEFAULT_RATE",
    "DEFAULT_SECONDS",
    "FidelityEstimate",
    "MeasurementBasis",
    "SampledRun",
    "TomographyDataset",
    "accumulate_configs",
    "config_label",
    "config_outcome",
    "enumerate_configs",
    "expected_counts",
    "monte_carlo_fidelity",
    "reconstruct_from_totals",
    "run_sampled",
    "simulate_counts",
    "tomography_reconstruct",
    "uhlmann_fidelity",
]

#: detected two-photon coincidences per second
DEFAULT_RATE = 116.8
#: acquisition time per projector and configuration, seconds
DEFAULT_SECONDS = 1.0

MAX_CONFIG_N = 8

PauliConfig = tuple[int, ...]


def enumerate_configs(n: int, d: int = 2) -> list[PauliConfig]:
    """All ``(d**2)**n`` unitary assignments in lexicographic order.

    For qubits ``(0, 0, 0, 0)`` (IIII) comes first and ``(3, 3, 3, 3)``
    (ZZZZ) last.
    """
    if not 1 <= n <= MAX_CONFIG_N:
        raise ValidationError(f"number of channels must be in 1..{MAX_CONFIG_N}, got {n}")
    if d < 2:
        raise ValidationError(f"dimension must be at least 2, got {d}")
    return list(itertools.product(range(d * d), repeat=n))


def config_label(config: PauliConfig) -> str:
    """``(0, 1, 3)`` -> ``"IXZ"`` for qubit configurations."""
    return "".join(PAULI_LABELS[i] for i in config)


@functools.lru_cache(maxsize=None)
def _basis_channels(d: int) -> tuple[KrausChannel, ...]:
    labels = PAULI_LABELS if d == 2 else [str(i) for i in range(d * d)]
    return tuple(unitary_channel(u, label=lab) for u, lab in zip(unitary_basis(d), labels))


def config_outcome(
    config: PauliConfig,
    order_set: OrderSet,
    rho: DensityMatrix,
    control: np.ndarray | None = None,
) -> ConditionalOutcome:
    """Switch outcome when channel ``j`` is the fixed unitary ``config[j]``.

    ``control`` is used both to prepare and to post-select the control; it
    defaults to the uniform superposition.
    """
    if len(config) != order_set.n:
        raise DimensionError(f"configuration has {len(config)} entries, order set expects {order_set.n}")
    basis = _basis_channels(rho.dim)
    channels = tuple(basis[i] for i in config)
    return run_switch(SwitchSpec(channels, order_set, control, control), rho)


def accumulate_configs(
    configs: Sequence[PauliConfig],
    order_set: OrderSet,
    rho: DensityMatrix,
    control: np.ndarray | None = None,
) -> ConditionalOutcome:
    """Uniform average of the per-configuration conditional states.

    Over all configurations this reproduces the switch of depolarizing
    channels, by linearity.
    """
    if len(configs) == 0:
        raise ValidationError("no configurations to accumulate")
    total = sum(config_outcome(c, order_set, rho, control).unnormalized for c in configs)
    return ConditionalOutcome.from_unnormalized(total / len(configs))


@dataclass(frozen=True)
class MeasurementBasis:
    """Six qubit projectors, grouped as the Z, X and Y bases."""

    labels: tuple[str, ...] = ("0", "1", "D", "A", "R", "L")
    pairs: tuple[tuple[str, str], ...] = (("0", "1"), ("D", "A"), ("R", "L"))
    projectors: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if sorted(self.labels) != sorted(x for p in self.pairs for x in p):
            raise ValidationError("every projector must belong to exactly one basis pair")
        ops = []
        for label in self.labels:
            op = projector(named_ket(label))
            op.flags.writeable = False
            ops.append(op)
        object.__setattr__(self, "projectors", tuple(ops))

    def index(self, label: str) -> int:
        return self.labels.index(label)


SIX_STATE = MeasurementBasis()

# Pauli observable estimated by each pair: Z, X, Y
_PAIR_AXES = {("0", "1"): 2, ("D", "A"): 0, ("R", "L"): 1}


@dataclass(frozen=True)
class TomographyDataset:
    """Photon counts per (configuration, projector) cell.

    ``counts[i, j]`` is the count for ``configs[i]`` and ``basis.labels[j]``.
    """

    configs: tuple[PauliConfig, ...]
    counts: np.ndarray
    shots_per_projector: float
    seed: int | None
    n: int
    basis: MeasurementBasis = SIX_STATE

    def __post_init__(self):
        counts = np.array(self.counts, copy=True)
        if counts.shape != (len(self.configs), len(self.basis.labels)):
            raise DimensionError(
                f"counts shape {counts.shape} does not match "
                f"{len(self.configs)} configurations x {len(self.basis.labels)} projectors"
            )
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(counts == np.round(counts)):
                raise ValidationError("counts must be integers")
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise ValidationError("counts must be nonnegative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "configs", tuple(tuple(c) for c in self.configs))
        if any(len(c) != self.n for c in self.configs):
            raise DimensionError(f"every configuration must have {self.n} entries")

    def count(self, config: PauliConfig, label: str) -> int:
        return int(self.counts[self.configs.index(tuple(config)), self.basis.index(label)])

    def as_dict(self) -> dict[tuple[PauliConfig, str], int]:
        return {
            (c, label): int(self.counts[i, j])
            for i, c in enumerate(self.configs)
            for j, label in enumerate(self.basis.labels)
        }

    def totals(self) -> dict[str, int]:
        """Counts per projector, summed over configurations."""
        return dict(zip(self.basis.labels, (int(x) for x in self.counts.sum(axis=0))))


@dataclass(frozen=True)
class FidelityEstimate:
    mean: float
    stddev: float
    trials: int


def expected_counts(
    outcomes: Sequence[ConditionalOutcome],
    basis: MeasurementBasis = SIX_STATE,
    rate: float = DEFAULT_RATE,
    seconds: float = DEFAULT_SECONDS,
) -> np.ndarray:
    """Mean count per cell: ``rate * seconds * p_success * <projector>``.

    Each configuration gets the same acquisition time, so the uniform
    weighting over configurations is implicit.
    """
    if rate <= 0 or seconds <= 0:
        raise ValidationError("rate and acquisition time must be positive")
    means = np.array(
        [[np.trace(p @ o.unnormalized).real for p in basis.projectors] for o in outcomes]
    )
    return rate * seconds * np.clip(means, 0.0, None)


def simulate_counts(
    outcomes: Sequence[ConditionalOutcome],
    configs: Sequence[PauliConfig],
    basis: MeasurementBasis = SIX_STATE,
    rate: float = DEFAULT_RATE,
    seconds: float = DEFAULT_SECONDS,
    seed: int = 0,
) -> TomographyDataset:
    """Draw Poisson counts for every (configuration, projector) cell.

    Cell ``(i, j)`` uses its own generator seeded from ``(seed, i, j)``, so
    any cell can be regenerated independently of the others.
    """
    if len(outcomes) != len(configs):
        raise DimensionError("one outcome per configuration is required")
    if seed < 0:
        raise ValidationError("seed must be nonnegative")
    means = expected_counts(outcomes, basis, rate, seconds)
    counts = np.empty(means.shape, dtype=np.int64)
    for i, j in np.ndindex(*means.shape):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i, j]))
        counts[i, j] = rng.poisson(means[i, j])
    n = len(configs[0]) if configs else 0
    return TomographyDataset(tuple(configs), counts, rate * seconds, seed, n, basis)


def _psd_project(m: np.ndarray) -> np.ndarray:
    """Nearest unit-trace PSD matrix by eigenvalue clipping."""
    vals, vecs = eig_herm(m)
    vals = np.clip(vals, 0.0, None)
    vals /= vals.sum()
    return (vecs * vals) @ vecs.conj().T


def reconstruct_from_totals(totals: Mapping[str, float], basis: MeasurementBasis = SIX_STATE) -> DensityMatrix:
    """Linear-inversion qubit tomography from per-projector totals.

    Each basis pair gives one Bloch component ``(n_+ - n_-)/(n_+ + n_-)``;
    the resulting matrix is projected back onto the set of states.
    """
    bloch = np.zeros(3)
    for plus, minus in basis.pairs:
        n_plus, n_minus = float(totals[plus]), float(totals[minus])
        if n_plus + n_minus <= 0:
            raise InsufficientDataError(f"no counts in the {plus}/{minus} basis")
        bloch[_PAIR_AXES[(plus, minus)]] = (n_plus - n_minus) / (n_plus + n_minus)
    x, y, z = bloch
    raw = 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
    return DensityMatrix(_psd_project(raw))


def tomography_reconstruct(ds: TomographyDataset) -> DensityMatrix:
    return reconstruct_from_totals(ds.totals(), ds.basis)


def uhlmann_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``, clamped to [0, 1]."""
    if rho.dim != sigma.dim:
        raise DimensionError(f"cannot compare states of dimension {rho.dim} and {sigma.dim}")
    for a, b in ((rho, sigma), (sigma, rho)):
        vals, vecs = eig_herm(a.matrix)
        if np.all(vals[1:] < RANK_TOL):
            # rank one: square roots of round-off eigenvalues would cost ~1e-8
            v = vecs[:, 0]
            f = vals[0] * (v.conj() @ b.matrix @ v).real
            return float(min(max(f, 0.0), 1.0))
    s = herm_sqrt(rho.matrix)
    inner = s @ sigma.matrix @ s
    f = np.trace(herm_sqrt(0.5 * (inner + inner.conj().T))).real ** 2
    return float(min(max(f, 0.0), 1.0))


def monte_carlo_fidelity(ds: TomographyDataset, target: DensityMatrix, trials: int = 1000, seed: int = 0) -> FidelityEstimate:
    """Parametric bootstrap of the reconstructed fidelity.

    Every trial redraws each cell from Poisson(observed count), reconstructs
    the state and scores it against ``target``. Trial ``t`` uses a generator
    seeded from ``(seed, t)``.
    """
    if trials < 2:
        raise ValidationError("at least two Monte Carlo trials are needed for a standard deviation")
    if seed < 0:
        raise ValidationError("seed must be nonnegative")
    fids = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        totals = rng.poisson(ds.counts).sum(axis=0)
        rho = reconstruct_from_totals(dict(zip(ds.basis.labels, totals)), ds.basis)
        fids[t] = uhlmann_fidelity(target, rho)
    return FidelityEstimate(float(fids.mean()), float(fids.std(ddof=1)), trials)


@dataclass(frozen=True)
class SampledRun:
    dataset: TomographyDataset
    reconstructed: DensityMatrix
    fidelity: FidelityEstimate
    success_probability: float


def run_sampled(
    rho: DensityMatrix,
    order_set: OrderSet,
    rate: float = DEFAULT_RATE,
    seconds: float = DEFAULT_SECONDS,
    trials: int = 1000,
    seed: int = 0,
    control: np.ndarray | None = None,
) -> SampledRun:
    """Full count-level pipeline for one input state.

    Configurations -> Poisson counts -> tomography -> bootstrap fidelity.
    Count simulation and bootstrap use independent streams derived from
    ``seed``.
    """
    if rho.dim != 2:
        raise DimensionError("the six-state measurement is defined for qubits only")
    configs = enumerate_configs(order_set.n, rho.dim)
    outcomes = [config_outcome(c, order_set, rho, control) for c in configs]
    count_seed, mc_seed = (int(s) for s in np.random.SeedSequence(seed).generate_state(2, np.uint32))
    ds = simulate_counts(outcomes, configs, SIX_STATE, rate, seconds, count_seed)
    estimate = monte_carlo_fidelity(ds, rho, trials, mc_seed)
    p = float(np.mean([o.probability for o in outcomes]))
    return SampledRun(ds, tomography_reconstruct(ds), estimate, p)
