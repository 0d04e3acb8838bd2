"""Success probabilities of the one-bit and two-bit coding schemes.

Conventions used throughout:

* ``ry(t)|b>`` is the rotated classical bit; the coherent schemes encode bit b
  as ``ry(theta_enc)|b>`` on every channel use and undo it with a free decoder
  rotation ``ry(theta_dec)`` before a Z measurement.
* The one-bit quantum scheme sends ``ry(theta_b)|0>`` on every use and decodes
  with the optimal (Helstrom) measurement.
* Gains are relative to the best classical scheme at the same gamma.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .channels import _check_gamma, adc_kraus, apply_channel, z_channel_string_prob
from .circuits import Layout, ansatz_circuit, build_v, circuit_unitary, measurement_povm, ry
from .discrimination import (
    DEFAULT_TOL,
    NotConverged,
    optimal_multi,
    povm_success,
    product_trace_norm,
)
from .errors import OutOfRange
from .matcore import projector, tensor
from .optimize import maximize_scalar, maximize_simplex, wrap_angle

ONEBIT_USES = (1, 2, 4, 8)


class SchemeId(str, enum.Enum):
    CLASSICAL = "classical"
    COHERENT = "coherent"
    QUANTUM = "quantum"
    CIRCUIT = "circuit"
    CLASSICAL_TWOBIT = "classical_twobit"
    COHERENT_TWOBIT = "coherent_twobit"
    QUANTUM_TWOBIT = "quantum_twobit"
    ANSATZ = "ansatz"


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    scheme: str
    uses: int
    message_bits: int
    success_probability: float
    gain_vs_classical: float
    params: dict = field(default_factory=dict)
    converged: bool = True


@dataclass(frozen=True)
class SchemeCurve:
    records: tuple[SweepRecord, ...]

    def __post_init__(self):
        gammas = [r.gamma for r in self.records]
        if any(b <= a for a, b in zip(gammas, gammas[1:])):
            raise ValueError("records must have strictly increasing gamma")

    @property
    def gammas(self) -> np.ndarray:
        return np.array([r.gamma for r in self.records])

    @property
    def success(self) -> np.ndarray:
        return np.array([r.success_probability for r in self.records])


@dataclass(frozen=True)
class Codebook:
    message_bits: int
    block_length: int
    codewords: tuple[str, ...]
    decode_map: dict

    def __post_init__(self):
        if len(set(self.codewords)) != len(self.codewords):
            raise ValueError("codewords must be distinct")
        if sorted(self.decode_map) != all_strings(self.block_length):
            raise ValueError("decode_map must cover every received string exactly once")


def gain(p: float, p_classical: float) -> float:
    """Relative improvement (P - P_c) / P_c."""
    if p_classical <= 0:
        raise ZeroDivisionError("classical success probability must be positive")
    return p / p_classical - 1.0


def _record(gamma, scheme, uses, bits, success, classical, params, converged=True) -> SweepRecord:
    success = float(success)
    return SweepRecord(float(gamma), str(scheme.value if isinstance(scheme, SchemeId) else scheme),
                       int(uses), int(bits), success, gain(success, classical), dict(params), converged)


def all_strings(n: int) -> list[str]:
    return ["".join(b) for b in itertools.product("01", repeat=n)]


def _check_uses(m: int, allowed=None) -> int:
    m = int(m)
    if m < 1 or (allowed is not None and m not in allowed):
        raise OutOfRange(f"number of channel uses {m} not supported (allowed: {allowed or '>= 1'})")
    return m


def _bit_matrix(n: int) -> np.ndarray:
    return np.array(list(itertools.product((0, 1), repeat=n)))


def _likelihoods(p_zero: Sequence[float], n: int) -> np.ndarray:
    """L[c, r] = P(read r | sent c) for independent uses with P(read 0 | bit b) = p_zero[b]."""
    bits = _bit_matrix(n)
    p0 = np.asarray(p_zero, dtype=float)[bits]  # p0[c, k]
    read0 = bits[None, :, :] == 0
    return np.prod(np.where(read0, p0[:, None, :], 1.0 - p0[:, None, :]), axis=2)


# ---------------------------------------------------------------------------
# one bit, classical


def classical_success(gamma: float, m: int) -> float:
    """Repetition code with the "any 1 means 1" decoder: 1 - gamma^m / 2."""
    gamma = _check_gamma(gamma)
    m = _check_uses(m)
    return 1.0 - gamma**m / 2.0


def best_two_codeword_success(gamma: float, m: int) -> tuple[float, tuple[str, str]]:
    """Exhaustive search over codeword pairs with maximum-likelihood decoding."""
    gamma = _check_gamma(gamma)
    strings = all_strings(m)
    like = _likelihoods([1.0, gamma], m)
    best, pair = -1.0, None
    for i, j in itertools.combinations(range(len(strings)), 2):
        s = 0.5 * float(np.sum(np.maximum(like[i], like[j])))
        if s > best:
            best, pair = s, (strings[i], strings[j])
    return best, pair


def verify_classical_optimality(gamma: float, m: int) -> bool:
    gamma = _check_gamma(gamma)
    if not 1 <= m <= 4:
        raise OutOfRange("exhaustive verification is limited to m <= 4")
    best, _ = best_two_codeword_success(gamma, m)
    return best <= classical_success(gamma, m) + 1e-12


def classical_onebit(gamma: float, m: int) -> SweepRecord:
    p = classical_success(gamma, m)
    return _record(gamma, SchemeId.CLASSICAL, m, 1, p, p, {})


# ---------------------------------------------------------------------------
# one bit, coherent


def _p_read_zero(gamma, theta_enc, theta_dec, bit):
    """P(Z reads 0) after ry(theta_enc)|bit> -> ADC -> ry(theta_dec); broadcasts over arrays."""
    a = np.asarray(theta_enc, dtype=float) + np.pi * bit
    c, s = np.cos(a / 2), np.sin(a / 2)
    r00 = c * c + gamma * s * s
    r01 = c * s * np.sqrt(1.0 - gamma)
    r11 = (1.0 - gamma) * s * s
    u0, u1 = np.cos(np.asarray(theta_dec) / 2), -np.sin(np.asarray(theta_dec) / 2)
    return u0 * u0 * r00 + 2 * u0 * u1 * r01 + u1 * u1 * r11


def coherent_onebit_success(gamma: float, m: int, theta_enc, theta_dec):
    """Success of the coherent repetition scheme with the "any 1 means 1" decoder."""
    p0 = _p_read_zero(gamma, theta_enc, theta_dec, 0)
    p1 = _p_read_zero(gamma, theta_enc, theta_dec, 1)
    return 0.5 * (p0**m + 1.0 - p1**m)


def _maximize_2d(objective_grid, objective, ranges, grid=97):
    """Grid scan of a vectorized objective followed by a Nelder-Mead polish."""
    (a0, a1), (b0, b1) = ranges
    xs, ys = np.linspace(a0, a1, grid), np.linspace(b0, b1, grid)
    vals = objective_grid(xs[:, None], ys[None, :])
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    res = maximize_simplex(lambda p: objective(*p), (xs[i], ys[j]), restarts=1, tol=1e-11,
                           step=(a1 - a0) / grid)
    if res.best_value >= vals[i, j]:
        return res.best_params, res.best_value
    return (float(xs[i]), float(ys[j])), float(vals[i, j])


def coherent_onebit(gamma: float, m: int) -> SweepRecord:
    gamma = _check_gamma(gamma)
    m = _check_uses(m, ONEBIT_USES)

    def f(te, td):
        return coherent_onebit_success(gamma, m, te, td)

    (te, td), value = _maximize_2d(f, lambda a, b: float(f(a, b)), ((0.0, np.pi), (0.0, 2 * np.pi)))
    te, td = wrap_angle(te), wrap_angle(td)
    value = float(f(te, td))
    return _record(gamma, SchemeId.COHERENT, m, 1, value, classical_success(gamma, m),
                   {"theta_enc": te, "theta_dec": td})


# ---------------------------------------------------------------------------
# one bit, optimal quantum decoder


def rotated_output(gamma: float, theta: float, bit: int = 0) -> np.ndarray:
    """Channel output for the input ry(theta)|bit>."""
    psi = ry(theta)[:, bit]
    return apply_channel(adc_kraus(gamma), projector(psi))


def quantum_onebit_success(gamma: float, m: int, theta0: float, theta1: float) -> float:
    """Helstrom success for codewords ry(theta_b)|0> sent over m uses."""
    s0, s1 = rotated_output(gamma, theta0), rotated_output(gamma, theta1)
    return min(0.5 + 0.25 * product_trace_norm(s0, s1, m), 1.0)


def quantum_onebit(gamma: float, m: int) -> SweepRecord:
    gamma = _check_gamma(gamma)
    m = _check_uses(m, ONEBIT_USES)

    def f(t0, t1):
        return quantum_onebit_success(gamma, m, t0, t1)

    sym = maximize_scalar(lambda t: f(t, -t), 0.0, np.pi)
    orth = maximize_scalar(lambda t: f(t, t + np.pi), 0.0, np.pi)
    (t,) = sym.best_params
    start = (t, -t)
    if orth.best_value > sym.best_value:
        (t,) = orth.best_params
        start = (t, t + np.pi)
    seed_value = max(sym.best_value, orth.best_value)
    res = maximize_simplex(lambda p: f(*p), start, restarts=1, tol=1e-10, step=0.05)
    params = res.best_params if res.best_value > seed_value else start
    t0, t1 = wrap_angle(params[0]), wrap_angle(params[1])
    return _record(gamma, SchemeId.QUANTUM, m, 1, f(t0, t1), classical_success(gamma, m),
                   {"theta0": t0, "theta1": t1})


# ---------------------------------------------------------------------------
# one bit, two uses, fixed circuit decoder


def plus_minus_alpha(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """The pair sqrt(alpha)|0> +- sqrt(1 - alpha)|1>."""
    a, b = np.sqrt(alpha), np.sqrt(1.0 - alpha)
    return np.array([a, b], dtype=complex), np.array([a, -b], dtype=complex)


def circuit_decoder_states(gamma: float, alpha: float = 0.5) -> list[np.ndarray]:
    ch = adc_kraus(gamma)
    plus, minus = (apply_channel(ch, projector(v)) for v in plus_minus_alpha(alpha))
    return [tensor(plus, plus), tensor(minus, minus)]


def _circuit_success(gamma: float, alpha: float = 0.5) -> float:
    return povm_success(measurement_povm(build_v(), 0), circuit_decoder_states(gamma, alpha))


def circuit_decoder_onebit(gamma: float) -> SweepRecord:
    gamma = _check_gamma(gamma)
    return _record(gamma, SchemeId.CIRCUIT, 2, 1, _circuit_success(gamma), classical_success(gamma, 2),
                   {"alpha": 0.5})


def alpha_encoder_sweep(gamma: float, alphas: Sequence[float]):
    """Circuit-decoder success for the encoder family |+-> _alpha; returns (best_alpha, curve)."""
    gamma = _check_gamma(gamma)
    curve = []
    for a in alphas:
        if not 0.5 <= a < 1.0:
            raise OutOfRange(f"alpha must lie in [1/2, 1), got {a}")
        curve.append((float(a), _circuit_success(gamma, a)))
    best_alpha = max(curve, key=lambda c: c[1])[0]
    return best_alpha, curve


# ---------------------------------------------------------------------------
# two bits over three uses

TWOBIT_LENGTH = 3
TWOBIT_SUBSETS = tuple(itertools.combinations(range(2**TWOBIT_LENGTH), 4))


def _subset_successes(like: np.ndarray) -> np.ndarray:
    """ML success of every 4-codeword subset for a likelihood table L[c, r]."""
    subsets = np.array(TWOBIT_SUBSETS)
    return like[subsets].max(axis=1).sum(axis=1) / 4.0


def _codebook(subset, like) -> Codebook:
    strings = all_strings(TWOBIT_LENGTH)
    rows = like[list(subset)]
    decode = {r: int(np.argmax(rows[:, k])) for k, r in enumerate(strings)}
    return Codebook(2, TWOBIT_LENGTH, tuple(strings[c] for c in subset), decode)


def classical_twobit(gamma: float) -> tuple[SweepRecord, Codebook]:
    gamma = _check_gamma(gamma)
    like = _likelihoods([1.0, gamma], TWOBIT_LENGTH)
    values = _subset_successes(like)
    k = int(np.argmax(values))
    rec = _record(gamma, SchemeId.CLASSICAL_TWOBIT, TWOBIT_LENGTH, 2, values[k], values[k], {"subset": k})
    return rec, _codebook(TWOBIT_SUBSETS[k], like)


def _z_channel_likelihoods(gamma: float) -> np.ndarray:
    """Likelihood table built string by string; reference for the vectorized one."""
    strings = all_strings(TWOBIT_LENGTH)
    return np.array([[z_channel_string_prob(gamma, s, r) for r in strings] for s in strings])


def coherent_twobit_success(gamma: float, theta_enc: float, theta_dec: float) -> tuple[float, int]:
    p_zero = [float(_p_read_zero(gamma, theta_enc, theta_dec, b)) for b in (0, 1)]
    values = _subset_successes(_likelihoods(p_zero, TWOBIT_LENGTH))
    k = int(np.argmax(values))
    return float(values[k]), k


def coherent_twobit(gamma: float) -> SweepRecord:
    gamma = _check_gamma(gamma)
    subsets = np.array(TWOBIT_SUBSETS)
    bits = _bit_matrix(TWOBIT_LENGTH)

    def grid(te, td):
        p0 = _p_read_zero(gamma, te, td, 0)
        p1 = _p_read_zero(gamma, te, td, 1)
        pz = np.stack([p0, p1], axis=-1)  # (..., 2)
        pc = pz[..., bits]  # (..., c, k)
        read0 = bits == 0  # (r, k)
        like = np.prod(np.where(read0[None, :, :], pc[..., :, None, :], 1 - pc[..., :, None, :]), axis=-1)
        per_subset = like[..., subsets, :].max(axis=-2).sum(axis=-1) / 4.0
        return per_subset.max(axis=-1)

    (te, td), _ = _maximize_2d(grid, lambda a, b: coherent_twobit_success(gamma, a, b)[0],
                               ((0.0, np.pi), (0.0, 2 * np.pi)), grid=61)
    te, td = wrap_angle(te), wrap_angle(td)
    value, k = coherent_twobit_success(gamma, te, td)
    classical = classical_twobit(gamma)[0].success_probability
    return _record(gamma, SchemeId.COHERENT_TWOBIT, TWOBIT_LENGTH, 2, value, classical,
                   {"theta_enc": te, "theta_dec": td, "subset": k})


def _subset_orbit_representatives() -> list[int]:
    """Indices of one subset per orbit under permutations of the three channel uses."""
    strings = all_strings(TWOBIT_LENGTH)
    index = {s: i for i, s in enumerate(strings)}
    seen, reps = set(), []
    for k, subset in enumerate(TWOBIT_SUBSETS):
        if k in seen:
            continue
        reps.append(k)
        for perm in itertools.permutations(range(TWOBIT_LENGTH)):
            image = tuple(sorted(index["".join(strings[c][p] for p in perm)] for c in subset))
            seen.add(TWOBIT_SUBSETS.index(image))
    return reps


TWOBIT_ORBITS = tuple(_subset_orbit_representatives())


def twobit_code_states(gamma: float, theta: float, subset) -> list[np.ndarray]:
    """Channel outputs of the product codewords ry(theta)^(x)3 |c> for c in ``subset``."""
    single = [rotated_output(gamma, theta, b) for b in (0, 1)]
    strings = all_strings(TWOBIT_LENGTH)
    return [tensor(*(single[int(b)] for b in strings[c])) for c in TWOBIT_SUBSETS[subset]]


def _quick_optimum(states, max_iter) -> float:
    try:
        return optimal_multi(states, tol=1e-9, max_iter=max_iter, fallback=False).success_probability
    except NotConverged as exc:
        return exc.result.success_probability


def quantum_twobit(gamma: float, tol: float = DEFAULT_TOL, search_iter: int = 200,
                   keep_orbits: int = 3) -> SweepRecord:
    """Best subset and encoding angle with the certified optimal joint measurement.

    The encoding angle is searched on [0, pi/2]: theta -> -theta is a Z
    conjugation that commutes with the channel, and theta -> theta + pi swaps
    every codeword for its complement, which the subset search already covers.
    Subsets are reduced to one representative per orbit under permutations of
    the channel uses. Each orbit is scanned coarsely with a capped iteration
    budget; only the ``keep_orbits`` best are refined.
    """
    gamma = _check_gamma(gamma)
    thetas = np.linspace(0.0, np.pi / 2, 9)

    def value(theta, k):
        return _quick_optimum(twobit_code_states(gamma, theta, k), search_iter)

    coarse = sorted(((max(value(t, k) for t in thetas), k) for k in TWOBIT_ORBITS), reverse=True)
    best = None
    for _, k in coarse[:keep_orbits]:
        res = maximize_scalar(lambda t: value(t, k), 0.0, np.pi / 2, tol=1e-5, scan_points=9)
        if best is None or res.best_value > best[0]:
            best = (res.best_value, res.best_params[0], k)
    _, theta, k = best
    converged = True
    try:
        out = optimal_multi(twobit_code_states(gamma, theta, k), tol=tol)
    except NotConverged as exc:
        out, converged = exc.result, False
    classical = classical_twobit(gamma)[0].success_probability
    return _record(gamma, SchemeId.QUANTUM_TWOBIT, TWOBIT_LENGTH, 2, out.success_probability, classical,
                   {"theta_enc": wrap_angle(theta), "subset": k, "dual_gap": out.dual_gap}, converged)


# ---------------------------------------------------------------------------
# entangling encoder / decoder ansatz comparison (one bit, two uses)


class Mode(str, enum.Enum):
    PER_GAMMA = "per_gamma"
    FIXED_AVERAGE = "fixed_average"


def _ry_pair(a, b):
    return np.kron(ry(a), ry(b))


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _block_unitary(params, entangling):
    u = _ry_pair(params[0], params[1])
    if entangling:
        u = _ry_pair(params[2], params[3]) @ _CNOT @ u
    return u


def ansatz_unitaries(layout: Layout, params) -> tuple[tuple[np.ndarray, np.ndarray], np.ndarray]:
    """((encoder for bit 0, encoder for bit 1), decoder) as matrices.

    Same result as compiling :func:`ansatz_circuit`, without the gate objects.
    """
    layout = Layout(layout)
    params = list(params)
    if len(params) != layout.num_params:
        ansatz_circuit(layout, params)  # raises ParamCountMismatch
    enc_ent, dec_ent = layout.blocks
    split = layout.encoder_params
    if layout.per_bit_encoder:
        encoders = (_block_unitary(params[0:2], False), _block_unitary(params[2:4], False))
    else:
        enc = _block_unitary(params[:split], enc_ent)
        encoders = (enc, enc)
    return encoders, _block_unitary(params[split:], dec_ent)


def _two_use_kraus(gamma: float) -> np.ndarray:
    ops = adc_kraus(gamma).kraus_ops
    return np.array([np.kron(a, b) for a in ops for b in ops])


def _any_one_success(gamma: float, encoders, decoder) -> float:
    """Encoder -> ADC on each qubit -> decoder -> Z on both; any 1 decodes to 1."""
    return float(_any_one_success_stack(_two_use_kraus(gamma)[None], encoders, decoder)[0])


def _any_one_success_stack(kraus_stack: np.ndarray, encoders, decoder) -> np.ndarray:
    """Success for a stack of two-use Kraus sets, shape (gammas, 4, 4, 4).

    P(read 00) = sum_k |<00| D K_k |psi>|^2 over the two-use Kraus products K_k.
    """
    rows = np.einsum("j,gkjl->gkl", decoder[0], kraus_stack)
    p00 = [np.sum(np.abs(rows @ encoders[b][:, 3 * b]) ** 2, axis=1) for b in (0, 1)]
    return 0.5 * (p00[0] + 1.0 - p00[1])


def ansatz_success(gamma: float, layout: Layout, params) -> float:
    encoders, decoder = ansatz_unitaries(layout, params)
    return _any_one_success(gamma, encoders, decoder)


def compile_ansatz_success(gamma: float, layout: Layout, params) -> float:
    """Reference evaluation that goes through the gate-level circuits."""
    ans = ansatz_circuit(layout, params)
    encoders = tuple(circuit_unitary(c) for c in ans.encoders)
    return _any_one_success(gamma, encoders, circuit_unitary(ans.decoder))


def ansatz_compare(gamma_grid: Sequence[float], layout: Layout | str, mode: Mode | str = Mode.PER_GAMMA,
                   restarts: int = 8, seed: int = 0, tol: float = 1e-8) -> SchemeCurve:
    layout, mode = Layout(layout), Mode(mode)
    gammas = [_check_gamma(g) for g in gamma_grid]
    x0 = np.zeros(layout.num_params)
    records = []
    if mode is Mode.PER_GAMMA:
        for g in gammas:
            res = maximize_simplex(lambda p: ansatz_success(g, layout, p), x0, restarts, tol, seed)
            params = [wrap_angle(p) for p in res.best_params]
            records.append(_ansatz_record(g, layout, mode, params))
    else:
        stack = np.array([_two_use_kraus(g) for g in gammas])

        def average(p):
            encoders, decoder = ansatz_unitaries(layout, p)
            return float(np.mean(_any_one_success_stack(stack, encoders, decoder)))

        res = maximize_simplex(average, x0, restarts, tol, seed)
        params = [wrap_angle(p) for p in res.best_params]
        records = [_ansatz_record(g, layout, mode, params) for g in gammas]
    return SchemeCurve(tuple(records))


def _ansatz_record(gamma, layout, mode, params) -> SweepRecord:
    p = ansatz_success(gamma, layout, params)
    named = {f"p{i}": v for i, v in enumerate(params)}
    rec = _record(gamma, f"ansatz_{layout.value}_{Mode(mode).value}", 2, 1, p, classical_success(gamma, 2), named)
    return rec


def reevaluate(record: SweepRecord) -> float:
    """Recompute a record's success probability from its stored parameters."""
    g, p = record.gamma, record.params
    scheme = record.scheme
    if scheme == SchemeId.CLASSICAL.value:
        return classical_success(g, record.uses)
    if scheme == SchemeId.COHERENT.value:
        return float(coherent_onebit_success(g, record.uses, p["theta_enc"], p["theta_dec"]))
    if scheme == SchemeId.QUANTUM.value:
        return quantum_onebit_success(g, record.uses, p["theta0"], p["theta1"])
    if scheme == SchemeId.CIRCUIT.value:
        return _circuit_success(g, p.get("alpha", 0.5))
    if scheme == SchemeId.CLASSICAL_TWOBIT.value:
        return float(_subset_successes(_likelihoods([1.0, g], TWOBIT_LENGTH))[int(p["subset"])])
    if scheme == SchemeId.COHERENT_TWOBIT.value:
        pz = [float(_p_read_zero(g, p["theta_enc"], p["theta_dec"], b)) for b in (0, 1)]
        return float(_subset_successes(_likelihoods(pz, TWOBIT_LENGTH))[int(p["subset"])])
    if scheme == SchemeId.QUANTUM_TWOBIT.value:
        states = twobit_code_states(g, p["theta_enc"], int(p["subset"]))
        return optimal_multi(states).success_probability
    if scheme.startswith("ansatz_"):
        body = scheme[len("ansatz_"):]
        mode = next(m for m in Mode if body.endswith(f"_{m.value}"))
        layout = Layout(body[: -len(mode.value) - 1])
        return ansatz_success(g, layout, [p[f"p{i}"] for i in range(layout.num_params)])
    raise ValueError(f"unknown scheme {scheme!r}")


def with_gain(record: SweepRecord, classical: float) -> SweepRecord:
    return replace(record, gain_vs_classical=gain(record.success_probability, classical))


def first_crossing(gammas: Sequence[float], values: Sequence[float], baseline: Sequence[float],
                   margin: float = 0.0) -> float | None:
    """First gamma where ``values`` rises above ``baseline + margin`` after being at or below it.

    Linear interpolation between grid points; ``None`` when there is no crossing.
    """
    d = np.asarray(values) - np.asarray(baseline) - margin
    g = np.asarray(gammas, dtype=float)
    for i in range(1, len(d)):
        if d[i - 1] <= 0 < d[i]:
            return float(g[i - 1] + (g[i] - g[i - 1]) * (-d[i - 1]) / (d[i] - d[i - 1]))
    return None
