"""Degree-distribution pairs and the two capacity-achieving BEC sequences.

Coefficients are stored as dense numpy arrays indexed by degree, so
``lam[i]`` is the fraction of edges attached to variable nodes of degree
``i`` (edge perspective).  Index 0 is always zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

EULER_GAMMA = 0.5772156649015329
NORM_TOL = 1e-12
POISSON_TAIL = 1e-12


class ValidationError(ValueError):
    """Raised when a distribution or parameter is outside its valid range."""


def _as_array(coeffs) -> np.ndarray:
    if isinstance(coeffs, dict):
        if not coeffs:
            raise ValidationError("empty distribution")
        top = max(coeffs)
        arr = np.zeros(top + 1)
        for d, c in coeffs.items():
            if d < 1:
                raise ValidationError(f"degree {d} < 1")
            arr[d] = c
        return arr
    arr = np.asarray(coeffs, dtype=float).copy()
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError("coefficient array must be 1-d with a degree-1 slot")
    return arr


def _check_normalized(arr: np.ndarray, name: str) -> None:
    if np.any(arr < -NORM_TOL) or np.any(arr > 1 + NORM_TOL):
        raise ValidationError(f"{name} coefficients outside [0, 1]")
    if arr[0] != 0.0:
        raise ValidationError(f"{name} has mass on degree 0")
    s = arr.sum()
    # rounding in long coefficient vectors grows like sqrt(size)
    if abs(s - 1.0) > NORM_TOL * max(1.0, math.sqrt(arr.size)):
        raise ValidationError(f"{name} sums to {s!r}, not 1")


def node_to_edge(L) -> np.ndarray:
    """Convert node-perspective fractions L_i to edge-perspective λ_i = i L_i / L'(1)."""
    L = _as_array(L)
    _check_normalized(L, "L")
    deg = np.arange(L.size)
    w = deg * L
    return w / w.sum()


def edge_to_node(lam) -> np.ndarray:
    """Inverse of :func:`node_to_edge`: L_i = (λ_i / i) / Σ_j λ_j / j."""
    lam = _as_array(lam)
    _check_normalized(lam, "lambda")
    deg = np.arange(lam.size)
    w = np.zeros_like(lam)
    w[1:] = lam[1:] / deg[1:]
    return w / w.sum()


def _trim(arr: np.ndarray) -> np.ndarray:
    nz = np.nonzero(arr)[0]
    return arr[: nz[-1] + 1] if nz.size else arr[:2]


@dataclass(frozen=True, eq=False)
class DegreePair:
    """Design degree-distribution pair (λ, ρ) with finite maximum degrees.

    ``kind``/``N``/``eps`` record which constructor produced the pair so
    analytic formulas (untruncated Poisson check side, real right-regular
    check exponent) can be used where they exist.  ``rho_slope`` overrides
    the polynomial value of ρ'(1) when the exact value is known.
    """

    lam: np.ndarray
    rho: np.ndarray
    kind: str = "generic"
    N: int | None = None
    eps: float | None = None
    check_exponent: float | None = None
    rho_slope: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = _trim(_as_array(self.lam))
        rho = _trim(_as_array(self.rho))
        _check_normalized(lam, "lambda")
        _check_normalized(rho, "rho")
        lam = np.clip(lam, 0.0, None)
        rho = np.clip(rho, 0.0, None)
        object.__setattr__(self, "lam", lam / lam.sum())
        object.__setattr__(self, "rho", rho / rho.sum())

    @property
    def max_var_degree(self) -> int:
        return self.lam.size - 1

    @property
    def max_check_degree(self) -> int:
        return self.rho.size - 1

    def lam_poly(self, x):
        """λ(x) = Σ λ_i x^{i-1}."""
        return np.polynomial.polynomial.polyval(x, self.lam[1:])

    def rho_poly(self, x):
        return np.polynomial.polynomial.polyval(x, self.rho[1:])

    @property
    def L(self) -> np.ndarray:
        return edge_to_node(self.lam)

    @property
    def R(self) -> np.ndarray:
        return edge_to_node(self.rho)

    def L_poly(self, x):
        return np.polynomial.polynomial.polyval(x, self.L)

    @property
    def L_prime1(self) -> float:
        deg = np.arange(1, self.lam.size)
        return 1.0 / np.sum(self.lam[1:] / deg)

    @property
    def R_prime1(self) -> float:
        deg = np.arange(1, self.rho.size)
        return 1.0 / np.sum(self.rho[1:] / deg)

    @property
    def design_rate(self) -> float:
        return 1.0 - self.L_prime1 / self.R_prime1

    @property
    def lambda_prime0(self) -> float:
        return float(self.lam[2]) if self.lam.size > 2 else 0.0

    @property
    def rho_prime1(self) -> float:
        if self.rho_slope is not None:
            return self.rho_slope
        deg = np.arange(self.rho.size)
        return float(np.sum((deg[1:] - 1) * self.rho[1:]))

    @property
    def mu(self) -> float:
        """λ'(0) ρ'(1)."""
        return self.lambda_prime0 * self.rho_prime1

    @property
    def L2(self) -> float:
        return fraction_deg2_nodes(self)

    def to_text(self) -> str:
        lines = [f"lambda {i} {c:.17g}" for i, c in enumerate(self.lam) if c > 0]
        lines += [f"rho {i} {c:.17g}" for i, c in enumerate(self.rho) if c > 0]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DegreePair":
        lam, rho = {}, {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in ("lambda", "rho"):
                raise ValidationError(f"bad degree line: {raw!r}")
            target = lam if parts[0] == "lambda" else rho
            target[int(parts[1])] = float(parts[2])
        return cls(lam, rho)


def regular_pair(dv: int, dc: int) -> DegreePair:
    return DegreePair({dv: 1.0}, {dc: 1.0}, kind="regular")


def cycle_pair() -> DegreePair:
    """λ(x) = x, ρ(x) = x²: all variable nodes of degree two, checks of degree three."""
    return DegreePair({2: 1.0}, {3: 1.0}, kind="cycle")


def harmonic(N: int) -> float:
    """H_N = Σ_{k=1}^N 1/k, summed from the small terms up."""
    if N < 0:
        raise ValidationError("N must be nonnegative")
    if N == 0:
        return 0.0
    return math.fsum(1.0 / k for k in range(N, 0, -1))


def harmonic_bounds(N: int) -> tuple[float, float]:
    """(ln N + γ, ln N + γ + 1/(2N)), valid strict bounds on H_N for N ≥ 2."""
    lo = math.log(N) + EULER_GAMMA
    return lo, lo + 1.0 / (2 * N)


def check_harmonic_bounds(N: int) -> bool:
    h = harmonic(N)
    lo, hi = harmonic_bounds(N)
    return lo < h < hi


def _check_params(N: int, eps: float) -> None:
    if int(N) != N or N < 2:
        raise ValidationError(f"N must be an integer >= 2, got {N}")
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")


def heavy_tail_poisson(N: int, eps: float) -> DegreePair:
    """Heavy-tail Poisson pair: λ_{i+1} = 1/(i H_{N-1}), ρ(x) = exp((x-1) H_{N-1}/eps).

    The check side is a Poisson(α) profile with α = H_{N-1}/eps, truncated at
    the first degree whose remaining tail mass drops below 1e-12.  The exact
    slope ρ'(1) = α is kept in ``rho_slope``.
    """
    _check_params(N, eps)
    H = harmonic(N - 1)
    i = np.arange(1, N)
    lam = np.zeros(N + 1)
    lam[2:] = 1.0 / (i * H)
    alpha = H / eps
    kmax = int(poisson.isf(POISSON_TAIL, alpha)) + 1
    while poisson.sf(kmax, alpha) >= POISSON_TAIL:
        kmax += 1
    k = np.arange(kmax + 1)
    rho = np.zeros(kmax + 2)
    rho[1:] = poisson.pmf(k, alpha)
    return DegreePair(lam, rho, kind="poisson", N=N, eps=eps, rho_slope=alpha,
                      meta={"alpha": alpha, "H": H})


def rr_alpha(N: int, eps: float) -> float:
    return math.log(1.0 / (1.0 - eps)) / math.log(N)


def rr_binomial_terms(N: int, alpha: float) -> np.ndarray:
    """t_i = binom(α, i)(-1)^{i-1} for i = 1..N, via the ratio (i-α)/(i+1) in log space."""
    i = np.arange(1, N)
    logs = np.empty(N)
    logs[0] = math.log(alpha)
    logs[1:] = np.log(i - alpha) - np.log(i + 1.0)
    return np.exp(np.cumsum(logs))


def rr_lambda_alpha(N: int, eps: float) -> float:
    """λ_α = 1 - (N/α) binom(α, N)(-1)^{N-1}, which equals 1/(λ'(0)ρ'(1))."""
    a = rr_alpha(N, eps)
    t = rr_binomial_terms(N, a)
    return 1.0 - (N / a) * t[-1]


def right_regular(N: int, eps: float, rounding: str = "nearest") -> DegreePair:
    """Right-regular pair with λ_{i+1} ∝ binom(α,i)(-1)^{i-1} and ρ(x) = x^{1/α}.

    The real check exponent 1/α is stored in ``check_exponent`` and used for
    ρ'(1); the sampleable check degree is the exponent rounded per ``rounding``
    (``nearest``, ``floor`` or ``ceil``) plus one.
    """
    _check_params(N, eps)
    a = rr_alpha(N, eps)
    if not 0.0 < a < 1.0:
        raise ValidationError(f"alpha={a} outside (0,1); need N > 1/(1-eps)")
    t = rr_binomial_terms(N, a)
    lam_alpha = 1.0 - (N / a) * t[-1]
    lam = np.zeros(N + 1)
    lam[2:] = t[:-1] / lam_alpha
    r = 1.0 / a
    rnd = {"nearest": round, "floor": math.floor, "ceil": math.ceil}[rounding]
    dc = max(2, int(rnd(r))) + 1
    rho = np.zeros(dc + 1)
    rho[dc] = 1.0
    return DegreePair(lam, rho, kind="right_regular", N=N, eps=eps,
                      check_exponent=r, rho_slope=r,
                      meta={"alpha": a, "lambda_alpha": lam_alpha})


def rr_c0_c1(alpha: float, N: int) -> tuple[float, float]:
    g = EULER_GAMMA
    z2 = math.pi ** 2 / 6
    c0 = (1 - alpha) ** z2 * math.exp(alpha * (z2 - g + 1 / (2 * N)))
    c1 = (1 - alpha) * math.exp(alpha * (1 - g + 1 / N))
    return c0, c1


def rr_c_minus_plus(alpha: float) -> tuple[float, float]:
    """(c⁻, c⁺) = ((1-α)² e^{α(1-γ)}, (1-α) e^{α(3-γ)})."""
    g = EULER_GAMMA
    return (1 - alpha) ** 2 * math.exp(alpha * (1 - g)), (1 - alpha) * math.exp(alpha * (3 - g))


def rr_inverse_mu_bounds(N: int, eps: float) -> tuple[float, float]:
    """Interval [1 - c1 ε̄, 1 - c0 ε̄] containing λ_α = 1/(λ'(0)ρ'(1))."""
    c0, c1 = rr_c0_c1(rr_alpha(N, eps), N)
    return 1 - c1 * (1 - eps), 1 - c0 * (1 - eps)


def rr_lambda_bound_check(N: int, eps: float) -> bool:
    """c⁻α/i^{α+1} <= λ_α λ_{i+1} <= c⁺α/i^{α+1} for all 1 <= i <= N-1."""
    a = rr_alpha(N, eps)
    t = rr_binomial_terms(N, a)[:-1]          # λ_α λ_{i+1} = t_i
    i = np.arange(1, N, dtype=float)
    cm, cp = rr_c_minus_plus(a)
    base = a / i ** (a + 1)
    slack = 1e-12 * base
    return bool(np.all(cm * base <= t + slack) and np.all(t <= cp * base + slack))


def fraction_deg2_nodes(pair: DegreePair) -> float:
    """L_2 = (λ_2/2) / Σ_i λ_i / i."""
    if pair.lam.size <= 2:
        return 0.0
    deg = np.arange(1, pair.lam.size)
    return float((pair.lam[2] / 2) / np.sum(pair.lam[1:] / deg))


RR_L2_LIMITS = (1 / math.log(9 * math.exp(4 / 3) / 4), 1 / math.log(9 * math.e / 4))


@dataclass(frozen=True, eq=False)
class ResidualPair:
    """Residual edge-perspective coefficients after removing edge masses φ, ψ.

    Coefficients stay normalized by the original edge count, so the degree-one
    slots absorb the removed mass.
    """

    base: DegreePair
    phi: np.ndarray
    psi: np.ndarray
    epsilon_budget: float
    lam_hat: np.ndarray
    rho_hat: np.ndarray

    @property
    def lambda_prime0(self) -> float:
        return float(self.lam_hat[2]) if self.lam_hat.size > 2 else 0.0

    @property
    def rho_prime1(self) -> float:
        deg = np.arange(self.rho_hat.size)
        return float(np.sum((deg[1:] - 1) * self.rho_hat[1:]))

    @property
    def mu(self) -> float:
        return self.lambda_prime0 * self.rho_prime1


def _mass_vec(m, size: int, name: str) -> np.ndarray:
    arr = np.zeros(size)
    if m is None:
        return arr
    src = _as_array(m) if isinstance(m, dict) else np.asarray(m, dtype=float)
    if src.size > size:
        if np.any(src[size:] != 0):
            raise ValidationError(f"{name} has mass beyond the maximum degree")
        src = src[:size]
    arr[: src.size] = src
    return arr


def residual(pair: DegreePair, phi=None, psi=None, eps: float = 0.0) -> ResidualPair:
    """Residual pair λ̂_i = (i L_i - φ_i)/L'(1), ρ̂_i = (i R_i - ψ_i/(1-r))/R'(1)."""
    L, R = pair.L, pair.R
    r = pair.design_rate
    phi = _mass_vec(phi, L.size, "phi")
    psi = _mass_vec(psi, R.size, "psi")
    tol = 1e-12
    for i in range(L.size):
        if phi[i] < -tol or phi[i] > i * L[i] + tol:
            raise ValidationError(f"phi at degree {i} violates 0 <= phi_i <= i L_i")
    for i in range(R.size):
        if psi[i] < -tol or psi[i] > i * R[i] * (1 - r) + tol:
            raise ValidationError(f"psi at degree {i} violates 0 <= psi_i <= i R_i (1-r)")
    if abs(phi.sum() - psi.sum()) > 1e-9:
        raise ValidationError("sum of phi must equal sum of psi")
    if phi.sum() > eps + tol:
        raise ValidationError(f"removed mass {phi.sum()} exceeds budget {eps}")
    deg_l = np.arange(L.size)
    deg_r = np.arange(R.size)
    lam_hat = (deg_l * L - phi) / pair.L_prime1
    rho_hat = (deg_r * R - psi / (1 - r)) / pair.R_prime1
    lam_hat[1] = 1.0 - lam_hat[2:].sum()
    rho_hat[1] = 1.0 - rho_hat[2:].sum()
    if lam_hat[1] < -tol or rho_hat[1] < -tol:
        raise ValidationError("residual degree-one coefficient negative")
    return ResidualPair(pair, phi, psi, eps, lam_hat, rho_hat)


def residual_mu_lower_bound(pair: DegreePair, eps: float) -> float:
    """λ'(0)ρ'(1) - (ρ'(1)/L'(1) + 2 L_2 r²/L'(1)²) ε, with r the maximum check degree."""
    Lp = pair.L_prime1
    rmax = pair.max_check_degree
    return pair.mu - (pair.rho_prime1 / Lp + 2 * pair.L2 * rmax ** 2 / Lp ** 2) * eps
