"""Trapping detection, family classification, escaping states, trapped weight.

Constant eigenvalues of the momentum-space walk operator are detected by
sampling it at pseudo-random quasi-momenta: the spreading bands are
non-constant analytic functions, so agreement at nine generic points to
1e-8 identifies a flat band beyond reasonable doubt at double precision.
Families follow from the rank of the stationary amplitude matrix A
(4, 3, 2 for Types I, IIa, IIb).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import coins as _coins
from . import laurent as _laurent
from .errors import NotTrappingError
from .linalg import RANK_TOL, numerical_rank, require_unitary
from .spectral import momentum_operator

__all__ = [
    "CLUSTER_TOL",
    "ClassificationResult",
    "detect_point_spectrum",
    "classify_coin",
    "escaping_subspace",
    "trapped_weight",
    "recover_parameters",
    "classification_to_json",
]

CLUSTER_TOL = 1e-8
_DEFAULT_SEED = 20210507


def _sample_momenta(n_samples: int, seed: int) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    ks = [(0.0, 0.0)]
    ks.extend((float(kx), float(ky)) for kx, ky in rng.uniform(-np.pi, np.pi, (n_samples, 2)))
    return ks


def _point_spectrum(coin, n_samples: int, seed: int, tol: float):
    """Constant eigenvalues with minimal multiplicities, plus the cluster margin."""
    c = require_unitary(coin)
    samples = [np.linalg.eigvals(momentum_operator(c, kx, ky))
               for kx, ky in _sample_momenta(n_samples, seed)]
    # Cluster the first sample into candidates.
    candidates: list[list[complex]] = []
    for lam in samples[0]:
        for group in candidates:
            if abs(lam - group[0]) < tol:
                group.append(lam)
                break
        else:
            candidates.append([lam])
    results = []
    margin = math.inf
    for group in candidates:
        center = group[0] / abs(group[0])
        mult = len(group)
        alive = True
        for ev in samples[1:]:
            dist = np.abs(ev - center)
            count = int(np.sum(dist < tol))
            if count == 0:
                alive = False
                break
            mult = min(mult, count)
        if not alive:
            continue
        for ev in samples:
            dist = np.abs(ev - center)
            outside = dist[dist >= tol]
            if outside.size:
                margin = min(margin, float(outside.min()))
        results.append((complex(center), mult))

    def _canonical_angle(lam: complex) -> float:
        ang = float(np.angle(lam)) % (2 * np.pi)
        return 0.0 if ang > 2 * np.pi - 1e-9 else ang

    results.sort(key=lambda item: _canonical_angle(item[0]))
    return results, margin


def detect_point_spectrum(coin, n_samples: int = 8, seed: int = _DEFAULT_SEED,
                          tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Eigenvalues of the momentum walk operator common to all sampled momenta.

    Parameters
    ----------
    coin : array_like
        Unitary 4x4 coin.
    n_samples : int
        Number of pseudo-random momentum pairs, in addition to k = (0, 0).

    Returns
    -------
    list of (eigenphase, multiplicity)
        Sorted by principal angle; empty for non-trapping coins.
    """
    if n_samples < 4:
        raise ValueError("need at least 4 momentum samples")
    spectrum, _ = _point_spectrum(coin, n_samples, seed, tol)
    return spectrum


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of :func:`classify_coin`.

    ``family`` is one of NotTrapping, TypeI, TypeIIa, TypeIIb,
    DirectSumDegenerate.  ``variant`` distinguishes the two rank-2
    arrangements.  ``fully_trapped`` marks coins with four constant
    eigenvalues (no state can leave the 3x3 neighborhood of its start).
    ``marginal`` flags eigenvalue clusters separated from the rest by less
    than ten times the clustering tolerance.
    """

    trapping: bool
    eigenphases: tuple[tuple[complex, int], ...]
    family: str
    rank_a: int | None = None
    escaping_dim: int | None = None
    variant: int | None = None
    params: _coins.FamilyParams | None = None
    fully_trapped: bool = False
    marginal: bool = False


def _seed_phases(eigenphases) -> list[complex]:
    """One representative per chiral pair: eigenphases with angle in [0, pi)."""
    out = []
    for lam, _ in eigenphases:
        ang = np.angle(lam)
        if -1e-12 <= ang < np.pi - 1e-12:
            out.append(lam)
    return out


def _all_cells(coin, eigenphases) -> list[_coins.AmplitudeCell]:
    """Localized cells of every seed eigenphase, chiral partners included."""
    cells = []
    for lam in _seed_phases(eigenphases):
        for cell in _laurent.localized_cells(coin, lam):
            cells.append(cell)
            cells.append(cell.chiral_partner())
    return cells


def _escaping_from_cells(cells, rank_tol: float) -> np.ndarray:
    columns = [_coins.balance_matrices(cell).a for cell in cells]
    _, kernel = numerical_rank(np.hstack(columns), rank_tol)
    return kernel


def escaping_subspace(coin, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the coin states orthogonal to every localized state.

    Returns a (4, k) array whose columns span the escaping subspace; k = 0
    for strong trapping, 1 for Type IIa, 2 for Type IIb, 0 again when the
    dynamics is fully trapped.

    Raises
    ------
    NotTrappingError
        If the coin has no constant eigenvalue.
    """
    c = require_unitary(coin)
    spectrum = detect_point_spectrum(c)
    if not spectrum:
        raise NotTrappingError("coin is not trapping; every coin state escapes")
    return _escaping_from_cells(_all_cells(c, spectrum), rank_tol)


def trapped_weight(coin, initial_coin_state, grid_n: int = 256) -> float:
    """Long-time average probability of finding the walker at the origin.

    Computes the origin component of the projection onto each flat-band
    eigenspace by quadrature of the normalized bounded-support eigenvector
    over the Brillouin zone, then sums the squared norms over the constant
    eigenphases.  Zero exactly when the initial coin state is escaping.
    """
    c = require_unitary(coin)
    psi = np.asarray(initial_coin_state, dtype=np.complex128).reshape(4)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"initial coin state must be normalized, |psi| = {nrm!r}")
    spectrum = detect_point_spectrum(c)
    if not spectrum:
        raise NotTrappingError("coin is not trapping")
    k = -np.pi + 2.0 * np.pi * (np.arange(grid_n) + 0.5) / grid_n
    x = np.exp(1j * k)[:, None] * np.ones(grid_n)[None, :]
    y = np.exp(1j * k)[None, :] * np.ones(grid_n)[:, None]
    x = x.ravel()
    y = y.ravel()
    weight = 0.0
    for lam, _ in spectrum:
        band = np.zeros((4, 4), dtype=np.complex128)
        for cell in _laurent.localized_cells(c, lam):
            xi = cell.local_states()
            # Ansatz eigenvector at each momentum, normalized per point.
            vec = (xi[0, 0][None, :] + x[:, None] * xi[1, 0][None, :]
                   + y[:, None] * xi[0, 1][None, :]
                   + (x * y)[:, None] * xi[1, 1][None, :])
            norms = np.linalg.norm(vec, axis=1)
            keep = norms > 1e-12
            unit = vec[keep] / norms[keep, None]
            # Distinct cells of a direct sum live in orthogonal sectors, so
            # their rank-one projectors add without re-orthonormalization.
            band += np.einsum("ki,kj->ij", unit, unit.conj()) / x.size
        weight += float(np.linalg.norm(band @ psi) ** 2)
    return weight


_FAMILY_BY_RANK = {4: "TypeI", 3: "TypeIIa", 2: "TypeIIb"}


def _iib_variant(coin, tol: float = 1e-8) -> int | None:
    c = np.asarray(coin)
    if (abs(c[1, 1]) < tol and abs(c[2, 2]) < tol and abs(abs(c[1, 2]) - 1.0) < tol):
        return 1
    if (abs(c[0, 0]) < tol and abs(c[3, 3]) < tol and abs(abs(c[0, 3]) - 1.0) < tol):
        return 2
    return None


def classify_coin(coin, rank_tol: float = RANK_TOL, n_samples: int = 8,
                  seed: int = _DEFAULT_SEED) -> ClassificationResult:
    """Full classification of an arbitrary unitary coin.

    Detects the point spectrum, extracts a localized eigenstate, forms the
    amplitude matrix A and maps rank 4/3/2 to Type I/IIa/IIb.  Coins whose
    constant eigenvalues carry multiplicity two or more are direct sums of
    one-dimensional trapping coins and are reported as DirectSumDegenerate.
    Parameter recovery is attempted for non-degenerate Type I/IIa coins.
    """
    c = require_unitary(coin)
    spectrum, margin = _point_spectrum(c, n_samples, seed, CLUSTER_TOL)
    marginal = margin < 10 * CLUSTER_TOL
    if not spectrum:
        return ClassificationResult(
            trapping=False, eigenphases=(), family="NotTrapping", marginal=marginal,
        )
    total_mult = sum(m for _, m in spectrum)
    fully = total_mult >= 4
    phases = tuple(spectrum)
    cells_by_seed = {lam: _laurent.localized_cells(c, lam) for lam in _seed_phases(spectrum)}
    all_cells = [cc for group in cells_by_seed.values()
                 for cell in group for cc in (cell, cell.chiral_partner())]
    esc_dim = _escaping_from_cells(all_cells, rank_tol).shape[1]

    if any(m >= 2 for _, m in spectrum):
        return ClassificationResult(
            trapping=True, eigenphases=phases, family="DirectSumDegenerate",
            escaping_dim=esc_dim, fully_trapped=fully, marginal=marginal,
        )

    cells = next(iter(cells_by_seed.values()))
    rank, _ = numerical_rank(_coins.balance_matrices(cells[0]).a, rank_tol)
    family = _FAMILY_BY_RANK.get(rank)
    if family is None:
        raise NotTrappingError(f"amplitude matrix has unexpected rank {rank}")

    variant = _iib_variant(c) if family == "TypeIIb" else None
    params = None
    if not fully and family in ("TypeI", "TypeIIa"):
        try:
            params = recover_parameters(cells[0], family, coin=c)
        except (ValueError, ArithmeticError):
            params = None
    return ClassificationResult(
        trapping=True, eigenphases=phases, family=family, rank_a=rank,
        escaping_dim=esc_dim, variant=variant, params=params,
        fully_trapped=fully, marginal=marginal,
    )


def _phase_of(z: complex, mag: float, tol: float = 1e-9) -> float | None:
    return float(np.angle(z)) % (2 * np.pi) if mag > tol else None


def recover_parameters(cell: _coins.AmplitudeCell, family: str,
                       coin=None) -> _coins.FamilyParams:
    """Family parameters reproducing a given stationary cell.

    The gauge fixes the phase of the first amplitude to zero.  For the
    rank-3 family the cell does not determine the extra rotation angle
    ``eta``, so the coin itself is required: ``eta`` is read off the
    structured product form by a Frobenius projection.

    Raises
    ------
    ValueError
        If the cell violates the magnitude pattern of the requested family,
        or if ``family='TypeIIa'`` and no coin is supplied.
    """
    amps = cell.amplitudes
    # Align the global phase with the first non-negligible amplitude.
    idx = int(np.argmax(np.abs(amps) > 1e-9))
    amps = amps * np.conj(amps[idx] / abs(amps[idx]))
    a, b, c, d, e, f, g, h = amps

    if family == "TypeI":
        if not (cell.is_full_rank_case() and not cell.is_rank_deficient_case()):
            raise ValueError("cell does not satisfy the full-rank magnitude pattern")
        delta1 = math.atan2(abs(a), abs(b))
        delta2 = math.atan2(abs(c), abs(d))
        s1, c1 = math.sin(delta1), math.cos(delta1)
        s2, c2 = math.sin(delta2), math.cos(delta2)
        phi_f = _phase_of(f, s2) or 0.0
        phi_h = _phase_of(h, s1)
        if phi_h is None:
            arg_c = _phase_of(c, s2)
            phi_h = (phi_f + arg_c) if arg_c is not None else 0.0
        phi_e = _phase_of(e, c2) or 0.0
        phi_g = _phase_of(g, c1) or 0.0
        phi_d = _phase_of(d, c2)
        if phi_d is None:
            arg_b = _phase_of(b, c1)
            phi_d = (arg_b - phi_e + phi_g) if arg_b is not None else 0.0
        return _coins.TypeIParams(delta1, delta2, phi_d, phi_e, phi_f, phi_g, phi_h)

    if family == "TypeIIa":
        if not cell.is_rank_deficient_case():
            raise ValueError("cell does not satisfy the rank-deficient magnitude pattern")
        if coin is None:
            raise ValueError("recovering eta for the rank-3 family requires the coin")
        delta1 = math.atan2(math.hypot(abs(a), abs(c)), math.hypot(abs(b), abs(e)))
        delta3 = math.atan2(abs(a), abs(c))
        delta2 = math.atan2(abs(b), abs(e))
        phi_f = _phase_of(f, abs(f)) or 0.0
        phi_h = _phase_of(h, abs(h))
        if phi_h is None:
            arg_c = _phase_of(c, abs(c))
            phi_h = (phi_f + arg_c) if arg_c is not None else 0.0
        phi_e = _phase_of(e, abs(e)) or 0.0
        phi_g = _phase_of(g, abs(g)) or 0.0
        phi_d = _phase_of(d, abs(d))
        if phi_d is None:
            arg_b = _phase_of(b, abs(b))
            phi_d = (arg_b - phi_e + phi_g) if arg_b is not None else 0.0
        eta = _recover_eta(coin, delta1, delta2, delta3,
                           phi_d, phi_e, phi_f, phi_g, phi_h)
        return _coins.TypeIIaParams(delta1, delta2, delta3, eta,
                                    phi_d, phi_e, phi_f, phi_g, phi_h)

    raise ValueError(f"parameter recovery supports TypeI and TypeIIa, not {family!r}")


def _recover_eta(coin, delta1, delta2, delta3, phi_d, phi_e, phi_f, phi_g, phi_h) -> float:
    """Read eta off the structured form C = C0 (I + xi |k><k|).

    The coin is linear in xi with matrix coefficient C0 |k><k| of unit
    Frobenius norm, so xi is a plain inner product; eta = arg(1 + xi).
    """
    # the kernel state does not depend on eta; pi is only a placeholder
    probe = _coins.TypeIIaParams(delta1, delta2, delta3, math.pi,
                                 phi_d, phi_e, phi_f, phi_g, phi_h)
    k = _coins.escaping_state(probe)
    swap = np.zeros((4, 4), dtype=np.complex128)
    swap[3, 0] = np.exp(1j * phi_f)
    swap[0, 3] = np.exp(-1j * phi_f)
    swap[2, 1] = np.exp(1j * (phi_g - phi_e))
    swap[1, 2] = np.exp(-1j * (phi_g - phi_e))
    direction = swap @ np.outer(k, k.conj())
    xi = complex(np.vdot(direction, np.asarray(coin, dtype=complex) - swap)
                 / np.vdot(direction, direction))
    eta = float(np.angle(1.0 + xi))
    if eta == 0.0:
        raise ValueError("recovered eta is zero; coin is not a rank-3 family member")
    return eta


def classification_to_json(result: ClassificationResult) -> str:
    """Serialize a classification result to the JSON wire format."""
    phases = []
    for lam, mult in result.eigenphases:
        phases.extend([[float(lam.real), float(lam.imag)]] * mult)
    doc = {
        "trapping": result.trapping,
        "eigenphases": phases,
        "family": result.family,
        "rankA": result.rank_a,
        "escaping_dim": result.escaping_dim,
        "params": _coins.params_to_dict(result.params) if result.params else None,
        "variant": result.variant,
        "fully_trapped": result.fully_trapped,
    }
    if result.marginal:
        doc["marginal"] = True
    return json.dumps(doc, indent=2)
