"""Random states and operators for property tests."""

import numpy as np

from qswitch.channels import DensityMatrix, KrausChannel

SIX_STATE_LABELS = ("0", "1", "D", "A", "R", "L")

# pass/fail lines collected by test_acceptance and printed in the terminal summary
ACCEPTANCE: list[str] = []


def random_ket(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_pure(d, rng):
    return DensityMatrix.from_ket(random_ket(d, rng))


def random_mixed(d, rng, rank=None):
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_state(d, rng):
    return random_pure(d, rng) if rng.random() < 0.5 else random_mixed(d, rng)


def random_hermitian(d, rng):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


def random_unitary(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(d, rng, n_kraus=3):
    """Random CPTP map from a Haar isometry C^d -> C^(d*n_kraus)."""
    v = random_unitary(d * n_kraus, rng)[:, :d]
    return KrausChannel(tuple(v[k * d:(k + 1) * d] for k in range(n_kraus)), label="random")


def max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
