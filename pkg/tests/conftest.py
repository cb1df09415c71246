import numpy as np
import pytest

from trapwalk import coins

MARGIN = 0.05


def draw_type_i(rng, margin=MARGIN) -> coins.TypeIParams:
    while True:
        d1, d2 = rng.uniform(margin, np.pi / 2 - margin, 2)
        if abs(d1 - d2) >= margin:
            break
    return coins.TypeIParams(d1, d2, *rng.uniform(0, 2 * np.pi, 5))


def draw_type_iia(rng, margin=MARGIN) -> coins.TypeIIaParams:
    d1, d2, d3 = rng.uniform(margin, np.pi / 2 - margin, 3)
    eta = float(rng.choice([-1.0, 1.0]) * rng.uniform(margin, np.pi))
    return coins.TypeIIaParams(d1, d2, d3, eta, *rng.uniform(0, 2 * np.pi, 5))


def draw_type_iib(rng, margin=MARGIN) -> coins.TypeIIbParams:
    return coins.TypeIIbParams(
        variant=int(rng.integers(1, 3)),
        delta=float(rng.uniform(margin, np.pi / 2 - margin)),
        phi=float(rng.uniform(0, np.pi - margin)),
        alpha=float(rng.uniform(0, 2 * np.pi)),
        beta=float(rng.uniform(0, 2 * np.pi)),
        gamma=float(rng.uniform(0, 2 * np.pi)),
        phi_f=float(rng.uniform(0, 2 * np.pi)),
    )


DRAWERS = {"TypeI": draw_type_i, "TypeIIa": draw_type_iia, "TypeIIb": draw_type_iib}


def random_unitary(rng, n=4) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r))).conj()


def hadamard_tensor_coin() -> np.ndarray:
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    return np.kron(h, h)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
