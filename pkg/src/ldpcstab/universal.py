"""Universality analysis for capacity-achieving BEC sequences under BP decoding.

Closed forms for f_(N)(x) = ε λ(1 - ρ(1 - x)) and its first two derivatives,
equiboundedness checks, the ξ constant and the matched-capacity violation test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .channel import Channel, ChannelFamily, conv_var_power, entropy_inverse
from .degseq import (EULER_GAMMA, DegreePair, ValidationError, harmonic, heavy_tail_poisson,
                     right_regular, rr_alpha, rr_binomial_terms, rr_lambda_alpha)

KINDS = ("poisson", "right_regular")
GRID_POINTS = 4097
LIMIT_F1_AT_EPS = 1.0 - math.exp(-math.exp(-EULER_GAMMA))
SERIES_TOL = 1e-18


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValidationError(f"sequence kind must be one of {KINDS}, got {kind!r}")


@lru_cache(maxsize=32)
def _pair(kind: str, N: int, eps: float) -> DegreePair:
    return heavy_tail_poisson(N, eps) if kind == "poisson" else right_regular(N, eps)


def _series(coef: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Σ_k coef[k] y^k by Horner, dropping the tail once max|y|^k |coef| is negligible."""
    ymax = float(np.max(np.abs(y), initial=0.0))
    K = coef.size
    if 0 < ymax < 1:
        cmax = float(np.max(np.abs(coef)))
        if cmax > 0:
            cut = int(math.log(SERIES_TOL / cmax) / math.log(ymax)) + 2
            K = min(K, max(cut, 1))
    elif ymax == 0:
        K = 1
    out = np.full_like(y, coef[K - 1], dtype=float)
    for c in coef[K - 2::-1]:
        out = out * y + c
    return out


def _rr_parts(N: int, eps: float):
    a = rr_alpha(N, eps)
    lam = rr_binomial_terms(N, a)[:-1] / rr_lambda_alpha(N, eps)  # λ_{i+1}, i = 1..N-1
    return 1.0 / a, lam


def _poisson_fprime(alpha: float, N: int, x):
    with np.errstate(divide="ignore"):
        return -np.expm1((N - 1) * np.log1p(-np.exp(-alpha * x)))


def f(kind: str, N: int, eps: float, x):
    """f_(N)(x) with the untruncated check side."""
    _check_kind(kind)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if kind == "poisson":
        alpha = harmonic(N - 1) / eps
        # f(x) = ∫_0^x f'(t) dt = x ∫_0^1 f'(xs) ds
        val, _ = integrate.quad_vec(lambda s: _poisson_fprime(alpha, N, x * s), 0.0, 1.0,
                                    epsabs=1e-14, epsrel=1e-12)
        out = x * val
    else:
        r, lam = _rr_parts(N, eps)
        y = 1.0 - np.power(1.0 - x, r)
        out = eps * y * _series(lam, y)
    return out if out.size > 1 else float(out[0])


def f_prime(kind: str, N: int, eps: float, x):
    _check_kind(kind)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if kind == "poisson":
        out = _poisson_fprime(harmonic(N - 1) / eps, N, x)
    else:
        r, lam = _rr_parts(N, eps)
        u = 1.0 - x
        y = 1.0 - np.power(u, r)
        i = np.arange(1, N)
        out = eps * r * np.power(u, r - 1) * _series(i * lam, y)
    return out if out.size > 1 else float(out[0])


def rr_F0_F1(N: int, eps: float, x):
    """(F⁰, F¹) whose sum, times ε r (1-x)^{r-2}, is the right-regular f''."""
    r, lam = _rr_parts(N, eps)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.power(1.0 - x, r)
    y = 1.0 - u
    F0 = np.full_like(x, -lam[0] * (r - 1))
    if N < 3:
        return F0, np.zeros_like(x)
    i = np.arange(2, N)
    w = i * lam[1:]
    F1 = u * _series(w * (i * r - 1), y) - (r - 1) * _series(w, y)
    return F0, F1


def f_double_prime(kind: str, N: int, eps: float, x):
    _check_kind(kind)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if kind == "poisson":
        alpha = harmonic(N - 1) / eps
        e = np.exp(-alpha * x)
        with np.errstate(divide="ignore"):
            out = -alpha * e * (N - 1) * np.exp((N - 2) * np.log1p(-e))
        out = np.where(x == 0, 0.0 if N > 2 else -alpha, out)
    else:
        r, _ = _rr_parts(N, eps)
        F0, F1 = rr_F0_F1(N, eps, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            pre = eps * r * np.power(1.0 - x, r - 2)
        out = pre * (F0 + F1)
    return out if out.size > 1 else float(out[0])


def poisson_f1_eps_envelope(N: int) -> tuple[float, float]:
    """Two-sided bounds on f'_(N)(ε) for the heavy-tail Poisson pair (any ε)."""
    low_pow = (1.0 - math.exp(-EULER_GAMMA) / (N - 1)) ** (N - 1)
    high_pow = math.exp(-math.exp(-EULER_GAMMA)) * math.exp(math.exp(-EULER_GAMMA) / (2 * (N - 1)))
    return 1.0 - high_pow, 1.0 - low_pow


def poisson_f2_eps_upper(N: int, eps: float) -> float:
    """f''_(N)(ε) <= -ε⁻¹ e⁻² (1 - e⁻¹)(ln(N-1) + 1)."""
    return -(math.exp(-2) * (1 - math.exp(-1)) * (math.log(N - 1) + 1)) / eps


def poisson_f2_bound(N: int, eps: float, kappa: float) -> float:
    """(2e²/ε) N ln N exp(-e^{-(γ+1/2)κ/ε} N^{1-κ/ε}), valid on [0, κ] for N >= 3."""
    q = kappa / eps
    return (2 * math.e ** 2 / eps) * N * math.log(N) * math.exp(
        -math.exp(-(EULER_GAMMA + 0.5) * q) * N ** (1 - q))


@dataclass
class EquiboundResult:
    kind: str
    eps: float
    kappa: float
    N_list: list
    sups: list
    bounds: list = field(default_factory=list)
    M: float = 0.0
    verdict: bool = True
    empirical: bool = False


def equibounded_check(kind: str, eps: float, kappa: float, N_max: int,
                      threshold: float = 0.1, N_list=None) -> EquiboundResult:
    """sup_{x∈[0,κ]} |f''_(N)(x)| over a grid, for N in powers of two up to N_max.

    Poisson verdicts compare each supremum with the explicit bound; right-regular
    verdicts are empirical: every supremum for N >= 2^9 must be below ``threshold``.
    """
    _check_kind(kind)
    if not 0 <= kappa < eps:
        raise ValidationError("need 0 <= kappa < eps")
    if N_list is None:
        lo = 3 if kind == "poisson" else max(3, int(math.floor(1 / (1 - eps))) + 1)
        N_list = sorted({lo, *[2 ** k for k in range(2, 64) if lo <= 2 ** k <= N_max], N_max})
    x = np.linspace(0.0, kappa, GRID_POINTS) if kappa > 0 else np.array([0.0])
    res = EquiboundResult(kind, eps, kappa, list(N_list), [], empirical=(kind == "right_regular"))
    for N in N_list:
        s = float(np.max(np.abs(np.atleast_1d(f_double_prime(kind, N, eps, x)))))
        res.sups.append(s)
        if kind == "poisson":
            b = poisson_f2_bound(N, eps, kappa) if N >= 3 else math.inf
            res.bounds.append(b)
            res.verdict &= s <= b * (1 + 1e-12)
        elif N >= 2 ** 9:
            res.verdict &= s < threshold
    res.M = max(res.sups) if res.sups else 0.0
    return res


# ξ machinery --------------------------------------------------------------------

def beta_theta(mu: float, l: int) -> tuple[np.ndarray, np.ndarray]:
    lvl = np.arange(l + 1)
    beta = mu ** lvl - mu ** lvl / 2.0 ** (l - lvl + 2)
    theta = 0.5 * mu ** (lvl + 1) / 2.0 ** (l - lvl + 2)
    beta[0] = 1.0
    theta[0] = 0.5 * mu / 2.0 ** (l + 1)
    return beta, theta


def xi_bound(mu_infinity: float, l: int, kappa: float) -> float:
    """ξ = min{κ/μ^{l+1}, min_ℓ 2θ(ℓ)/β(ℓ)²}."""
    if mu_infinity <= 1:
        raise ValidationError("need mu_infinity > 1")
    if l < 1 or not 0 < kappa < 1:
        raise ValidationError("need l >= 1 and kappa in (0, 1)")
    beta, theta = beta_theta(mu_infinity, l)
    return float(min(kappa / mu_infinity ** (l + 1), np.min(2 * theta / beta ** 2)))


def error_prob_power(channel, l: int) -> float:
    """E(c^{⊛l}) from closed forms for a :class:`Channel`, by atom/grid convolution otherwise."""
    if isinstance(channel, Channel):
        return channel.error_prob_power(l)
    return conv_var_power(channel, l).error_prob()


def choose_l(channel, mu_infinity: float, cap: int = 64) -> int:
    """Smallest l <= cap with E(c^{⊛ℓ}) μ^ℓ > 1 for ℓ = l and l + 1."""
    b = channel.bhattacharyya()
    if b * mu_infinity <= 1:
        raise ValidationError(f"B(c) mu = {b * mu_infinity} <= 1; no l exists")
    ok = [error_prob_power(channel, k) * mu_infinity ** k > 1 for k in range(1, cap + 2)]
    for l in range(1, cap + 1):
        if ok[l - 1] and ok[l]:
            return l
    raise ValidationError(f"no l <= {cap} found")


# sequences ---------------------------------------------------------------------------

@dataclass
class SequenceAnalysis:
    sequence_kind: str
    eps: float
    N_list: list
    mu_N: list
    mu_infinity: float


def mu_infinity(kind: str, eps: float) -> float:
    """lim λ'(0)ρ'(1) = 1/ε for both sequences."""
    _check_kind(kind)
    return 1.0 / eps


def analyze_sequence(kind: str, eps: float, N_list) -> SequenceAnalysis:
    _check_kind(kind)
    mus = [_pair(kind, int(N), eps).mu for N in N_list]
    return SequenceAnalysis(kind, eps, list(N_list), mus, mu_infinity(kind, eps))


@dataclass
class UniversalityVerdict:
    b_mu: float
    violated: bool


def check_universality_violation(kind: str, eps: float, channel) -> UniversalityVerdict:
    """B(c) μ_∞ and whether it exceeds 1 (which rules out BP universality)."""
    _check_kind(kind)
    if not 0 < eps < 1:
        raise ValidationError("eps must lie in (0, 1)")
    b_mu = channel.bhattacharyya() / eps
    return UniversalityVerdict(b_mu, b_mu > 1.0)


def bsc_matched(eps: float) -> Channel:
    """BSC with capacity 1 - eps, i.e. crossover h2⁻¹(eps)."""
    return Channel("BSC", entropy_inverse(ChannelFamily("BSC"), eps, tol=1e-13))
