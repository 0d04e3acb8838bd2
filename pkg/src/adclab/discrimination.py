"""Minimum-error discrimination of quantum states.

Two equiprobable states are handled in closed form through the trace distance.
Larger ensembles use the fixed-point iteration

    M_i <- G^{-1/2} R_i M_i R_i G^{-1/2},    G = sum_j R_j M_j R_j,   R_i = p_i rho_i,

and every answer is certified with the Yuen-Kennedy-Lax conditions: for
Y = 1/2 sum_i (R_i M_i + M_i R_i), the POVM is optimal iff Y - R_i >= 0 for all i.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .errors import BadPriors, DimensionMismatch, NotConverged
from .matcore import HERM_TOL, as_matrix, psd_sqrt_inv

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000
REGULARIZATION = 1e-12
# Helstrom tie-break: eigenvalues of rho_a - rho_b this close to 0 go to outcome b
ZERO_EIG = 1e-12


@dataclass(frozen=True)
class Povm:
    """Measurement operators paired with the message each outcome announces."""

    elements: tuple[np.ndarray, ...]
    outcome_labels: tuple = ()

    def __post_init__(self):
        els = tuple(as_matrix(e) for e in self.elements)
        if not els:
            raise ValueError("a POVM needs at least one element")
        if any(e.shape != els[0].shape for e in els):
            raise DimensionMismatch("POVM elements must share one shape")
        object.__setattr__(self, "elements", els)
        labels = tuple(self.outcome_labels) or tuple(range(len(els)))
        if len(labels) != len(els):
            raise ValueError("one label per POVM element is required")
        object.__setattr__(self, "outcome_labels", labels)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def completeness_error(self) -> float:
        return float(np.max(np.abs(sum(self.elements) - np.eye(self.dim))))

    def is_valid(self, tol: float = HERM_TOL) -> bool:
        from .matcore import is_psd

        return self.completeness_error() <= tol and all(is_psd(e, tol) for e in self.elements)


@dataclass(frozen=True)
class DiscriminationResult:
    success_probability: float
    povm: Povm
    dual_gap: float
    iterations: int
    converged: bool = True


def _check_priors(priors, n: int) -> np.ndarray:
    if priors is None:
        return np.full(n, 1.0 / n)
    p = np.asarray(priors, dtype=float)
    if p.shape != (n,):
        raise BadPriors(f"expected {n} priors, got {p.shape}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise BadPriors("priors must be non-negative and sum to 1")
    return p


def _check_states(states) -> list[np.ndarray]:
    states = [as_matrix(s) for s in states]
    if any(s.shape != states[0].shape for s in states):
        raise DimensionMismatch("all states must share one dimension")
    return states


def _clamp(p: float) -> float:
    if -1e-10 <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + 1e-10:
        return 1.0
    return p


def povm_success(povm: Povm, states: Sequence, priors=None) -> float:
    """Average probability of announcing the right message: sum_i p_i tr(rho_i M_i)."""
    states = _check_states(states)
    if len(povm.elements) != len(states):
        raise DimensionMismatch(f"{len(povm.elements)} POVM elements for {len(states)} states")
    if povm.dim != states[0].shape[0]:
        raise DimensionMismatch("POVM and states act on different dimensions")
    p = _check_priors(priors, len(states))
    total = sum(pi * np.trace(rho @ m).real for pi, rho, m in zip(p, states, povm.elements))
    return _clamp(float(total))


def ykl_gap(povm: Povm, states: Sequence, priors=None) -> float:
    """Largest violation of Y - p_i rho_i >= 0; zero or below certifies optimality."""
    states = _check_states(states)
    if len(povm.elements) != len(states):
        raise DimensionMismatch(f"{len(povm.elements)} POVM elements for {len(states)} states")
    p = _check_priors(priors, len(states))
    weighted = [pi * rho for pi, rho in zip(p, states)]
    return _gap(weighted, povm.elements)[1]


def _gap(weighted, elements) -> tuple[float, float]:
    y = sum(r @ m for r, m in zip(weighted, elements))
    y = 0.5 * (y + y.conj().T)
    gap = max(-np.linalg.eigvalsh(y - r)[0] for r in weighted)
    return float(np.trace(y).real), float(gap)


def helstrom(rho_a, rho_b) -> DiscriminationResult:
    """Optimal discrimination of two equiprobable states."""
    rho_a, rho_b = _check_states([rho_a, rho_b])
    diff = rho_a - rho_b
    diff = 0.5 * (diff + diff.conj().T)
    w, v = np.linalg.eigh(diff)
    keep = w > ZERO_EIG
    m_a = v[:, keep] @ v[:, keep].conj().T
    povm = Povm((m_a, np.eye(diff.shape[0]) - m_a), (0, 1))
    p = _clamp(0.5 + 0.25 * float(np.sum(np.abs(w))))
    gap = ykl_gap(povm, [rho_a, rho_b])
    return DiscriminationResult(p, povm, gap, 0)


def trace_distance(rho_a, rho_b) -> float:
    d = as_matrix(rho_a) - as_matrix(rho_b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))


def _common_part(weighted) -> np.ndarray:
    """Largest multiple of the average weighted state lying below every R_i.

    Subtracting a common PSD part from every R_i leaves the optimal POVM
    unchanged but removes the near-degenerate direction that slows the
    fixed-point iteration when the states are almost identical.
    """
    avg = sum(weighted) / len(weighted)
    w, v = np.linalg.eigh(avg)
    keep = w > ZERO_EIG * max(w.max(), 1.0)
    if not np.any(keep):
        return np.zeros_like(avg)
    # restrict to the support of the average so the whitening is well defined
    basis = v[:, keep] / np.sqrt(w[keep])
    t = min(np.linalg.eigvalsh(basis.conj().T @ r @ basis).min() for r in weighted)
    if t <= 0:
        return np.zeros_like(avg)
    return t * (1.0 - 1e-6) * avg


def _fixed_point(weighted, tol, max_iter, check_every):
    d = weighted[0].shape[0]
    n = len(weighted)
    shifted = [r - _common_part(weighted) for r in weighted]
    elements = [np.eye(d, dtype=complex) / n for _ in weighted]
    best = None
    it = 0
    while True:
        if it % check_every == 0 or it >= max_iter:
            succ, gap = _gap(weighted, elements)
            if best is None or gap < best[1]:
                best = (succ, gap, [e.copy() for e in elements], it)
            if gap <= tol or it >= max_iter:
                break
        g = sum(r @ m @ r for r, m in zip(shifted, elements))
        g_isqrt = psd_sqrt_inv(g, REGULARIZATION)
        elements = [g_isqrt @ r @ m @ r @ g_isqrt for r, m in zip(shifted, elements)]
        # regularization leaves a small PSD deficit I - sum M_i; share it out evenly
        deficit = (np.eye(d) - sum(elements)) / n
        elements = [0.5 * (m + m.conj().T) + deficit for m in elements]
        it += 1
    return best


SDP_SETTINGS = {"tol_gap_abs": 1e-12, "tol_gap_rel": 1e-12, "tol_feas": 1e-12}


def _sdp(weighted):
    """Primal semidefinite program solved with Clarabel, projected back onto valid POVMs.

    Real symmetric variables are used when every state is real, which halves the
    problem size and lets the solver reach a much smaller certificate gap.
    """
    import warnings

    import cvxpy as cp

    d = weighted[0].shape[0]
    real = all(np.max(np.abs(r.imag)) < 1e-14 for r in weighted)
    data = [r.real for r in weighted] if real else weighted
    ms = [cp.Variable((d, d), symmetric=True) if real else cp.Variable((d, d), hermitian=True)
          for _ in weighted]
    value = sum(cp.trace(r @ m) for r, m in zip(data, ms))
    objective = cp.Maximize(value if real else cp.real(value))
    constraints = [m >> 0 for m in ms] + [sum(ms) == np.eye(d)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            cp.Problem(objective, constraints).solve(solver=cp.CLARABEL, **SDP_SETTINGS)
        except cp.error.SolverError:
            return None
    if any(m.value is None for m in ms):
        return None
    elements = []
    for m in ms:
        w, v = np.linalg.eigh(0.5 * (m.value + m.value.conj().T))
        elements.append((v * np.clip(w, 0.0, None)) @ v.conj().T)
    s_isqrt = psd_sqrt_inv(sum(elements))
    elements = [(s_isqrt @ m @ s_isqrt).astype(complex) for m in elements]
    succ, gap = _gap(weighted, elements)
    return succ, gap, elements, -1


def optimal_multi(
    states: Sequence,
    priors=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    check_every: int = 10,
    fallback: bool = True,
) -> DiscriminationResult:
    """Certified minimum-error POVM for an ensemble of states.

    Runs the fixed-point iteration first; if its YKL gap stays above ``tol``
    and ``fallback`` is set, the semidefinite program is solved directly and
    the better-certified of the two POVMs is kept. Raises :class:`NotConverged`
    (carrying the best POVM found) when neither reaches ``tol``. A result with
    ``iterations == -1`` came from the SDP solver.
    """
    states = _check_states(states)
    if len(states) < 2:
        raise ValueError("need at least two states")
    p = _check_priors(priors, len(states))
    weighted = [pi * rho for pi, rho in zip(p, states)]

    best = _fixed_point(weighted, tol, max_iter, check_every)
    if best[1] > tol and fallback:
        alt = _sdp(weighted)
        if alt is not None and alt[1] < best[1]:
            best = alt

    succ, gap, els, best_it = best
    result = DiscriminationResult(_clamp(succ), Povm(tuple(els)), gap, best_it, gap <= tol)
    if not result.converged:
        raise NotConverged(f"YKL gap {gap:.3e} above tolerance {tol:.1e}", result)
    return result


def symmetric_power(a, n: int) -> np.ndarray:
    """Action of ``a^{(x)n}`` on the symmetric subspace of n qubits, in the Dicke basis.

    Column l holds the coefficients of ``(a00 x + a10 y)^(n-l) (a01 x + a11 y)^l``
    rescaled by sqrt(C(n, l) / C(n, k)) so the basis stays orthonormal.
    """
    a = as_matrix(a)
    if a.shape != (2, 2):
        raise DimensionMismatch("symmetric powers are defined here for 2x2 matrices")
    col0 = np.array([a[0, 0], a[1, 0]])
    col1 = np.array([a[0, 1], a[1, 1]])
    binom = np.array([comb(n, k) for k in range(n + 1)], dtype=float)
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for l in range(n + 1):
        poly = np.array([1.0 + 0j])
        for _ in range(n - l):
            poly = np.convolve(poly, col0)
        for _ in range(l):
            poly = np.convolve(poly, col1)
        out[:, l] = poly * np.sqrt(binom[l] / binom)
    return out


def product_trace_norm(a, b, copies: int) -> float:
    """Trace norm of ``a^{(x)M} - b^{(x)M}`` for 2x2 Hermitian ``a``, ``b``.

    Both tensor powers commute with qubit permutations, so the difference splits
    into irreducible blocks: for k = 0..M//2 the block det(.)^k Sym^{M-2k}(.) of
    size M-2k+1 appears C(M,k) - C(M,k-1) times.
    """
    a, b = as_matrix(a), as_matrix(b)
    det_a, det_b = np.linalg.det(a), np.linalg.det(b)
    total = 0.0
    for k in range(copies // 2 + 1):
        mult = comb(copies, k) - (comb(copies, k - 1) if k else 0)
        n = copies - 2 * k
        block = det_a**k * symmetric_power(a, n) - det_b**k * symmetric_power(b, n)
        total += mult * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (block + block.conj().T)))))
    return total
