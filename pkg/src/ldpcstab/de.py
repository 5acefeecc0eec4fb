"""Density evolution: scalar BEC recursion, general L-density recursion, thresholds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Channel, ChannelFamily, LDensity, conv_check, conv_var, entropy_inverse, mixture
from .degseq import DegreePair, ValidationError

DECODE_TOL = 1e-10
STUCK_DELTA = 1e-12
STUCK_WINDOW = 50
STUCK_FLOOR = 1e-6
MAX_ITERS = 2000


@dataclass(frozen=True)
class DeState:
    iteration: int
    density: LDensity
    error_prob: float
    bhattacharyya: float

    @classmethod
    def of(cls, iteration: int, density: LDensity) -> "DeState":
        return cls(iteration, density, density.error_prob(), density.bhattacharyya())


def _as_density(c, grid: bool) -> LDensity:
    d = c.density() if isinstance(c, Channel) else c
    return d.to_grid() if grid and d.is_atomic else d


def _poly_var(coeffs: np.ndarray, x: LDensity) -> LDensity:
    """Σ_i coeffs[i] x^{⊛(i-1)}."""
    parts = []
    power = LDensity.delta_zero() if x.is_atomic else LDensity.delta_zero().to_grid(x.delta, x.W)
    for i in range(1, coeffs.size):
        if i > 1:
            power = conv_var(power, x)
        if coeffs[i] > 0:
            parts.append((coeffs[i], power))
    return mixture(parts)


def _poly_check(coeffs: np.ndarray, x: LDensity) -> LDensity:
    """Σ_i coeffs[i] x^{⊠(i-1)}."""
    parts = []
    power = LDensity.delta_inf() if x.is_atomic else LDensity.delta_inf().to_grid(x.delta, x.W)
    for i in range(1, coeffs.size):
        if i > 1:
            power = conv_check(power, x)
        if coeffs[i] > 0:
            parts.append((coeffs[i], power))
    return mixture(parts)


def de_step(channel, pair: DegreePair, state: DeState, grid: bool = False) -> DeState:
    """x_ℓ = c ⊛ λ(ρ(x_{ℓ-1})) with the ⊛/⊠ polynomial evaluations."""
    c = _as_density(channel, grid)
    x = _as_density(state.density, grid)
    out = conv_var(c, _poly_var(pair.lam, _poly_check(pair.rho, x)))
    out = out.scaled(1.0 / out.total_mass())  # rounding drift compounds through high powers
    return DeState.of(state.iteration + 1, out)


def initial_state(channel, grid: bool = False) -> DeState:
    return DeState.of(0, _as_density(channel, grid))


def run_de(channel, pair: DegreePair, iters: int, grid: bool = False) -> list[DeState]:
    states = [initial_state(channel, grid)]
    for _ in range(iters):
        states.append(de_step(channel, pair, states[-1], grid))
    return states


def de_verdict(channel, pair: DegreePair, max_iters: int = MAX_ITERS, grid: bool = False) -> str:
    """'decodes', 'stuck' or 'indeterminate' under the fixed convergence cutoffs."""
    state = initial_state(channel, grid)
    history = [state.error_prob]
    for _ in range(max_iters):
        state = de_step(channel, pair, state, grid)
        e = state.error_prob
        history.append(e)
        if e < DECODE_TOL:
            return "decodes"
        if (len(history) > STUCK_WINDOW and e > STUCK_FLOOR
                and abs(history[-1 - STUCK_WINDOW] - e) < STUCK_DELTA):
            return "stuck"
    return "indeterminate"


# scalar BEC recursion ----------------------------------------------------------

def bec_de_f(pair: DegreePair, eps: float, x, analytic: bool = True):
    """f(x) = ε λ(1 - ρ(1 - x)).

    With ``analytic`` the untruncated check side is used: e^{-αx} for the
    heavy-tail Poisson pair and (1-x)^{1/α} for the right-regular pair.
    """
    x = np.asarray(x, dtype=float)
    if analytic and pair.kind == "poisson":
        inner = 1.0 - np.exp(-pair.meta["alpha"] * x)
    elif analytic and pair.kind == "right_regular":
        inner = 1.0 - np.power(np.clip(1.0 - x, 0.0, None), pair.check_exponent)
    else:
        inner = 1.0 - pair.rho_poly(1.0 - x)
    out = eps * pair.lam_poly(inner)
    return float(out) if out.ndim == 0 else out


def bec_scalar_de(pair: DegreePair, eps: float, iters: int, analytic: bool = False) -> np.ndarray:
    """Erasure fractions x_0 = ε, x_ℓ = f(x_{ℓ-1}) for ℓ = 0..iters."""
    xs = np.empty(iters + 1)
    xs[0] = eps
    for i in range(iters):
        xs[i + 1] = bec_de_f(pair, eps, xs[i], analytic)
    return xs


def bec_scalar_bit_error(pair: DegreePair, eps: float, l: int) -> float:
    """½ ε L(1 - ρ(1 - x_{ℓ-1})): erasures decided by a fair coin, matching :func:`bp_bit_error`."""
    x = bec_scalar_de(pair, eps, l - 1)[-1]
    return float(0.5 * eps * pair.L_poly(1.0 - pair.rho_poly(1.0 - x)))


# thresholds -------------------------------------------------------------------------

def _family(family) -> ChannelFamily:
    return ChannelFamily(family) if isinstance(family, str) else family


def _bisect(pred, lo: float, hi: float, tol: float) -> float:
    """Largest h in [lo, hi] with pred(h) true, assuming monotonicity."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bp_threshold(family, pair: DegreePair, tol: float = 1e-4, max_iters: int = MAX_ITERS,
                 method: str = "de") -> float:
    """BP threshold in entropy.

    ``method="de"`` bisects on the DE verdict (scalar recursion on the BEC).
    ``method="fixed_point"`` (BEC only) returns inf_{x∈(0,1]} x / λ(1-ρ(1-x))
    on a fine grid, the exact erasure threshold without an iteration cap.
    """
    fam = _family(family)
    if method == "fixed_point":
        if fam.kind != "BEC":
            raise ValidationError("the fixed-point route exists only for the BEC")
        x = np.linspace(1e-7, 1.0, 200_001)
        denom = pair.lam_poly(1.0 - pair.rho_poly(1.0 - x))
        with np.errstate(divide="ignore"):
            ratio = np.where(denom > 0, x / denom, np.inf)
        return float(min(1.0, ratio.min()))
    if method != "de":
        raise ValidationError(f"unknown method {method!r}")

    if fam.kind == "BEC":
        def decodes(h):
            x = h
            for _ in range(max_iters):
                x = bec_de_f(pair, h, x, analytic=False)
                if x / 2 < DECODE_TOL:
                    return True
            return False
    else:
        def decodes(h):
            ch = fam.channel(entropy_inverse(fam, h))
            return de_verdict(ch, pair, max_iters) == "decodes"
    return _bisect(decodes, 0.0, 1.0, tol)


def stability_threshold(family, pair: DegreePair, tol: float = 1e-10) -> float:
    """inf{h : B(c_h) λ'(0) ρ'(1) > 1}, or 1 when the product never exceeds 1."""
    fam = _family(family)
    mu = pair.mu
    if mu <= 1.0:  # B(c_1) = 1 for every complete family
        return 1.0
    if fam.kind == "BEC":
        return 1.0 / mu
    stable = lambda h: fam.channel(entropy_inverse(fam, h, tol=tol * 0.1)).bhattacharyya() * mu <= 1.0
    return _bisect(stable, 0.0, 1.0, tol)


def bsc_cycle_stability_root() -> float:
    """Crossover p* with 4 sqrt(p(1-p)) = 1, i.e. p* = (1 - sqrt(3)/2)/2."""
    return (1.0 - math.sqrt(3.0) / 2.0) / 2.0


def bp_bit_error(channel, pair: DegreePair, l: int, grid: bool = False) -> float:
    """E(c ⊛ L(ρ(x_{ℓ-1}))) with x_0 = c."""
    if l < 1:
        raise ValidationError("need l >= 1")
    state = initial_state(channel, grid)
    for _ in range(l - 1):
        state = de_step(channel, pair, state, grid)
    c = _as_density(channel, grid)
    y = _poly_check(pair.rho, state.density)
    # Σ L_i y^{⊛i} in the Σ a_i y^{⊛(i-1)} layout of _poly_var
    node = pair.L
    shifted = np.zeros(node.size + 1)
    shifted[1:] = node
    return conv_var(c, _poly_var(shifted, y)).error_prob()
