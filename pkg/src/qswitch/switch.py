"""Quantum switch over N channels with a coherent superposition of orders.

The joint space is ``control ⊗ target``. Control basis state ``|k>`` selects
order ``k`` of an :class:`OrderSet`; an order ``(a, b, c)`` means channel
``a`` acts first, so the corresponding target operator is ``K_c K_b K_a``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._constants import ZERO_PROBABILITY
from .channels import DensityMatrix, KrausChannel
from .exceptions import DimensionError, ValidationError
from .qmath import as_state_vector, dagger, partial_trace_control, projector

__all__ = [
    "ConditionalOutcome",
    "OrderSet",
    "SwitchSpec",
    "cyclic_orders",
    "effective_channel_prediction",
    "fixed_order",
    "full_orders",
    "iter_switch_kraus",
    "plus_state",
    "run_switch",
    "success_probability",
    "switch_kraus",
]

ORDER_KINDS = ("cyclic", "full", "fixed")
MAX_FULL_ORDER_N = 6


@dataclass(frozen=True)
class OrderSet:
    n: int
    orders: tuple[tuple[int, ...], ...]
    kind: str

    def __post_init__(self):
        orders = tuple(tuple(int(i) for i in o) for o in self.orders)
        object.__setattr__(self, "orders", orders)
        if self.n < 1:
            raise ValidationError(f"number of channels must be positive, got {self.n}")
        if self.kind not in ORDER_KINDS:
            raise ValidationError(f"unknown order kind {self.kind!r}")
        for o in orders:
            if sorted(o) != list(range(self.n)):
                raise ValidationError(f"{o} is not a permutation of 0..{self.n - 1}")
        expected = {"cyclic": self.n, "full": math.factorial(self.n), "fixed": 1}[self.kind]
        if len(orders) != expected:
            raise ValidationError(f"{self.kind} order set for n={self.n} needs {expected} orders, got {len(orders)}")
        if self.kind == "cyclic" and orders != _cyclic(self.n):
            raise ValidationError("cyclic order set must list the rotations of (0, ..., n-1) in order")
        if len(set(orders)) != len(orders):
            raise ValidationError("order set contains duplicate orders")

    def __len__(self) -> int:
        return len(self.orders)


def _cyclic(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple((k + j) % n for j in range(n)) for k in range(n))


def cyclic_orders(n: int) -> OrderSet:
    """The ``n`` cyclic rotations; order ``k`` is ``(k, k+1, ..., n-1, 0, ..., k-1)``."""
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    return OrderSet(n, _cyclic(n), "cyclic")


def full_orders(n: int) -> OrderSet:
    """All ``n!`` permutations in lexicographic order."""
    if not 1 <= n <= MAX_FULL_ORDER_N:
        raise ValidationError(f"full order sets are limited to 1 <= n <= {MAX_FULL_ORDER_N}, got {n}")
    return OrderSet(n, tuple(itertools.permutations(range(n))), "full")


def fixed_order(n: int, order: Sequence[int] | None = None) -> OrderSet:
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    return OrderSet(n, (tuple(range(n)) if order is None else tuple(order),), "fixed")


def plus_state(m: int) -> np.ndarray:
    """Uniform superposition ``(|0> + ... + |m-1>)/sqrt(m)``."""
    if m < 1:
        raise ValidationError(f"control dimension must be positive, got {m}")
    return np.full(m, 1.0 / np.sqrt(m), dtype=np.complex128)


@dataclass(frozen=True)
class SwitchSpec:
    """Channels, the orders they are superposed in, and the control preparation/projection.

    ``control_in`` and ``control_projector`` default to the uniform
    superposition over the orders.
    """

    channels: tuple[KrausChannel, ...]
    order_set: OrderSet
    control_in: np.ndarray | None = None
    control_projector: np.ndarray | None = None

    def __post_init__(self):
        channels = tuple(self.channels)
        object.__setattr__(self, "channels", channels)
        if len(channels) != self.order_set.n:
            raise DimensionError(f"order set is for {self.order_set.n} channels, got {len(channels)}")
        if len({c.dim for c in channels}) != 1:
            raise DimensionError("all channels must act on the same dimension")
        m = len(self.order_set)
        for name in ("control_in", "control_projector"):
            v = getattr(self, name)
            v = plus_state(m) if v is None else as_state_vector(v).copy()
            if v.shape != (m,):
                raise DimensionError(f"{name} has dimension {v.shape[0]}, expected {m} (one per order)")
            v.flags.writeable = False
            object.__setattr__(self, name, v)

    @property
    def dim(self) -> int:
        return self.channels[0].dim

    @property
    def control_dim(self) -> int:
        return len(self.order_set)


@dataclass(frozen=True)
class ConditionalOutcome:
    """Target state after post-selecting the control, plus the success probability.

    ``normalized`` is ``None`` when the probability is below
    :data:`~qswitch._constants.ZERO_PROBABILITY`.
    """

    unnormalized: np.ndarray
    probability: float
    normalized: DensityMatrix | None

    @classmethod
    def from_unnormalized(cls, unnormalized: np.ndarray) -> "ConditionalOutcome":
        unnormalized = 0.5 * (unnormalized + dagger(unnormalized))
        unnormalized.flags.writeable = False
        p = float(np.trace(unnormalized).real)
        if p <= ZERO_PROBABILITY:
            return cls(unnormalized, max(p, 0.0), None)
        return cls(unnormalized, min(p, 1.0), DensityMatrix(unnormalized / p))


def iter_switch_kraus(spec: SwitchSpec) -> Iterator[np.ndarray]:
    """Yield the joint Kraus operators of the switch one at a time.

    One operator per tuple of Kraus indices ``(i_0, ..., i_{N-1})``:
    ``W = sum_k |k><k| ⊗ K_{o_k[-1]} ... K_{o_k[0]}``.
    """
    d = spec.dim
    m = spec.control_dim
    orders = spec.order_set.orders
    for idx in itertools.product(*(range(len(c)) for c in spec.channels)):
        ops = [c.kraus[i] for c, i in zip(spec.channels, idx)]
        w = np.zeros((m * d, m * d), dtype=np.complex128)
        for k, order in enumerate(orders):
            block = ops[order[0]]
            for ch in order[1:]:
                block = ops[ch] @ block
            w[k * d:(k + 1) * d, k * d:(k + 1) * d] = block
        yield w


def switch_kraus(spec: SwitchSpec) -> list[np.ndarray]:
    return list(iter_switch_kraus(spec))


def run_switch(spec: SwitchSpec, rho: DensityMatrix) -> ConditionalOutcome:
    """Send ``rho`` through the switch and post-select the control.

    The joint state ``|c_in><c_in| ⊗ rho`` is evolved by every joint Kraus
    operator, the control is projected on ``control_projector`` and traced
    out.
    """
    d = spec.dim
    if rho.dim != d:
        raise DimensionError(f"state has dimension {rho.dim}, channels act on {d}")
    m = spec.control_dim
    joint_in = np.kron(projector(spec.control_in), rho.matrix)
    evolved = np.zeros_like(joint_in)
    for w in iter_switch_kraus(spec):
        evolved += w @ joint_in @ dagger(w)
    post = np.kron(projector(spec.control_projector), np.eye(d))
    return ConditionalOutcome.from_unnormalized(partial_trace_control(post @ evolved @ post, m, d))


def effective_channel_prediction(n: int, d: int, rho: DensityMatrix) -> DensityMatrix:
    """Closed-form post-selected output of ``n`` depolarizing channels in cyclic superposition.

    ``(n-1)/(n-1+d^2) * rho + d^2/(n-1+d^2) * I/d``
    """
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n}")
    if d < 2:
        raise ValidationError(f"d must be at least 2, got {d}")
    if rho.dim != d:
        raise DimensionError(f"state has dimension {rho.dim}, expected {d}")
    keep = (n - 1) / (n - 1 + d * d)
    return DensityMatrix(keep * rho.matrix + (1.0 - keep) * np.eye(d) / d)


def success_probability(spec: SwitchSpec) -> float:
    """Post-selection probability of the switch, evaluated on ``I/d``.

    For depolarizing channels this does not depend on the input state.
    """
    return run_switch(spec, DensityMatrix.maximally_mixed(spec.dim)).probability
