"""BMS channels as L-densities: functionals, convolutions, degradation, sampling.

An :class:`LDensity` holds up to three parts: exact atoms (location, mass),
an optional uniform grid on [-W, W] with spacing ``delta``, and a point mass
at +infinity.  BEC and BSC densities and their finite convolutions stay in
atom form; anything involving a grid is carried out on the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.signal import fftconvolve
from scipy.stats import norm

from .degseq import ValidationError

DELTA = 2.0 ** -6
WIDTH = 30.0
ATOM_RES = 1e-9
MAX_ATOMS = 20000
LN2 = math.log(2.0)


def _phi(x):
    """-ln tanh(x/2) for x >= 0; an involution on (0, inf]."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.log1p(np.exp(-x)) - np.log(-np.expm1(-x))
    return np.where(x == 0, np.inf, np.where(np.isinf(x), 0.0, out))


def check_combine(a, b):
    """2 atanh(tanh(a/2) tanh(b/2)), evaluated through the magnitude involution."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mag = _phi(_phi(np.abs(a)) + _phi(np.abs(b)))
    return np.sign(a) * np.sign(b) * mag


@dataclass(frozen=True, eq=False)
class LDensity:
    atom_loc: np.ndarray
    atom_mass: np.ndarray
    grid: np.ndarray | None = None
    delta: float = DELTA
    W: float = WIDTH
    pinf: float = 0.0

    # construction -------------------------------------------------------
    @classmethod
    def from_atoms(cls, locs, masses, pinf: float = 0.0) -> "LDensity":
        locs = np.asarray(locs, dtype=float).ravel()
        masses = np.asarray(masses, dtype=float).ravel()
        if locs.shape != masses.shape:
            raise ValidationError("atom locations and masses differ in length")
        if np.any(np.isinf(locs)):
            pos = np.isposinf(locs)
            pinf = pinf + masses[pos].sum()
            if np.any(np.isneginf(locs)):
                raise ValidationError("mass at -inf is not allowed")
            locs, masses = locs[~pos], masses[~pos]
        locs, masses = _merge_atoms(locs, masses)
        return cls(locs, masses, None, DELTA, WIDTH, float(pinf))

    @classmethod
    def from_grid(cls, grid, delta: float = DELTA, W: float = WIDTH, pinf: float = 0.0) -> "LDensity":
        grid = np.asarray(grid, dtype=float)
        K = _bins(delta, W)
        if grid.size != 2 * K + 1:
            raise ValidationError(f"grid must have {2 * K + 1} bins")
        return cls(np.zeros(0), np.zeros(0), grid, delta, W, float(pinf))

    @classmethod
    def delta_inf(cls) -> "LDensity":
        return cls(np.zeros(0), np.zeros(0), None, DELTA, WIDTH, 1.0)

    @classmethod
    def delta_zero(cls) -> "LDensity":
        return cls(np.array([0.0]), np.array([1.0]), None, DELTA, WIDTH, 0.0)

    # views ------------------------------------------------------------------
    @property
    def K(self) -> int:
        return _bins(self.delta, self.W)

    @property
    def is_atomic(self) -> bool:
        return self.grid is None

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        """All finite mass as (locations, masses), atoms first then grid bins."""
        if self.grid is None:
            return self.atom_loc, self.atom_mass
        K = self.K
        gl = np.arange(-K, K + 1) * self.delta
        nz = self.grid != 0
        return (np.concatenate([self.atom_loc, gl[nz]]),
                np.concatenate([self.atom_mass, self.grid[nz]]))

    def finite_mass(self) -> float:
        total = self.atom_mass.sum()
        if self.grid is not None:
            total += self.grid.sum()
        return float(total)

    def total_mass(self) -> float:
        return self.finite_mass() + self.pinf

    def to_grid(self, delta: float | None = None, W: float | None = None) -> "LDensity":
        """Quantize atoms to the nearest bin (clipped to ±W)."""
        delta = self.delta if delta is None else delta
        W = self.W if W is None else W
        K = _bins(delta, W)
        if self.grid is not None and delta == self.delta and W == self.W:
            g = self.grid.copy()
        else:
            g = np.zeros(2 * K + 1)
            if self.grid is not None:
                loc, m = self.grid_points()
                idx = np.clip(np.rint(loc / delta).astype(int), -K, K) + K
                np.add.at(g, idx, m)
        if self.atom_loc.size:
            idx = np.clip(np.rint(self.atom_loc / delta).astype(int), -K, K) + K
            np.add.at(g, idx, self.atom_mass)
        return LDensity(np.zeros(0), np.zeros(0), g, delta, W, self.pinf)

    def grid_points(self):
        K = self.K
        return np.arange(-K, K + 1) * self.delta, self.grid

    def scaled(self, w: float) -> "LDensity":
        g = None if self.grid is None else self.grid * w
        return LDensity(self.atom_loc, self.atom_mass * w, g, self.delta, self.W, self.pinf * w)

    # functionals ---------------------------------------------------------------
    def entropy(self) -> float:
        y, m = self.points()
        return float(np.sum(m * np.logaddexp(0.0, -y)) / LN2)

    def bhattacharyya(self) -> float:
        y, m = self.points()
        return float(np.sum(m * np.exp(-y / 2)))

    def error_prob(self) -> float:
        y, m = self.points()
        return float(0.5 * np.sum(m * np.exp(-(np.abs(y) / 2 + y / 2))))

    def truncated_error_prob(self, M: float) -> float:
        """½ ∫_{-M}^{M} e^{-(|y/2|+y/2)} c(y) dy over the closed interval."""
        if M <= 0:
            return 0.0
        y, m = self.points()
        keep = np.abs(y) <= M * (1 + 1e-12) + 1e-12
        y, m = y[keep], m[keep]
        return float(0.5 * np.sum(m * np.exp(-(np.abs(y) / 2 + y / 2))))

    def mass_in(self, a: float, b: float) -> float:
        """Mass on the closed interval [a, b]."""
        y, m = self.points()
        tol = 1e-12 * max(1.0, abs(a), abs(b))
        return float(m[(y >= a - tol) & (y <= b + tol)].sum())

    def symmetry_defect(self) -> float:
        """max over y > 0 of |c(-y) - e^{-y} c(y)| (atoms matched by location, grid bin-wise)."""
        worst = 0.0
        if self.atom_loc.size:
            loc, m = self.atom_loc, self.atom_mass
            key = np.rint(loc / ATOM_RES).astype(np.int64)
            table = dict(zip(key.tolist(), m.tolist()))
            for k, y, w in zip(key.tolist(), loc.tolist(), m.tolist()):
                if y > 0:
                    worst = max(worst, abs(table.get(-k, 0.0) - math.exp(-y) * w))
                elif y < 0 and k not in table:
                    worst = max(worst, w)
            for k, y, w in zip(key.tolist(), loc.tolist(), m.tolist()):
                if y < 0 and -k not in table:
                    worst = max(worst, w)
        if self.grid is not None:
            K = self.K
            pos = self.grid[K + 1:]
            neg = self.grid[:K][::-1]
            y = np.arange(1, K + 1) * self.delta
            worst = max(worst, float(np.max(np.abs(neg - np.exp(-y) * pos), initial=0.0)))
        return worst

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        y, m = self.points()
        locs = np.concatenate([y, [np.inf]])
        probs = np.concatenate([m, [self.pinf]])
        probs = probs / probs.sum()
        return locs[rng.choice(locs.size, size=size, p=probs)]

    # serialization -------------------------------------------------------------
    def to_text(self) -> str:
        y, m = self.points()
        head = f"atoms {y.size}  grid {self.delta:.17g} {self.W:.17g}  pinf {self.pinf:.17g}"
        body = [f"{a:.17g} {b:.17g}" for a, b in zip(y, m)]
        return "\n".join([head] + body) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LDensity":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "atoms" or head[2] != "grid" or head[5] != "pinf":
            raise ValidationError("bad LDensity header")
        k = int(head[1])
        delta, W, pinf = float(head[3]), float(head[4]), float(head[6])
        rows = [ln.split() for ln in lines[1:1 + k]]
        if len(rows) != k:
            raise ValidationError("LDensity body shorter than declared")
        locs = np.array([float(r[0]) for r in rows])
        masses = np.array([float(r[1]) for r in rows])
        locs, masses = _merge_atoms(locs, masses)
        return cls(locs, masses, None, delta, W, pinf)


@lru_cache(maxsize=None)
def _bins(delta: float, W: float) -> int:
    return int(round(W / delta))


def _merge_atoms(locs: np.ndarray, masses: np.ndarray):
    keep = masses != 0
    locs, masses = locs[keep], masses[keep]
    if locs.size == 0:
        return np.zeros(0), np.zeros(0)
    key = np.rint(locs / ATOM_RES).astype(np.int64)
    uniq, first, inv = np.unique(key, return_index=True, return_inverse=True)
    merged = np.bincount(inv, weights=masses)
    return locs[first], merged


def mixture(parts: list[tuple[float, LDensity]]) -> LDensity:
    """Σ w_k c_k, staying atomic when every component is atomic."""
    parts = [(w, c) for w, c in parts if w != 0]
    if not parts:
        return LDensity(np.zeros(0), np.zeros(0), None, DELTA, WIDTH, 0.0)
    pinf = sum(w * c.pinf for w, c in parts)
    if all(c.is_atomic for _, c in parts):
        locs = np.concatenate([c.atom_loc for _, c in parts])
        masses = np.concatenate([w * c.atom_mass for w, c in parts])
        locs, masses = _merge_atoms(locs, masses)
        return LDensity(locs, masses, None, parts[0][1].delta, parts[0][1].W, pinf)
    ref = next(c for _, c in parts if not c.is_atomic)
    g = np.zeros(2 * ref.K + 1)
    for w, c in parts:
        g += w * c.to_grid(ref.delta, ref.W).grid
    return LDensity(np.zeros(0), np.zeros(0), g, ref.delta, ref.W, pinf)


def _maybe_grid(c: LDensity) -> LDensity:
    return c.to_grid() if c.is_atomic and c.atom_loc.size > MAX_ATOMS else c


def _fold(full: np.ndarray, K: int) -> np.ndarray:
    """Fold a length-(4K+1) convolution centered at 2K back onto [-K, K]."""
    out = full[K:3 * K + 1].copy()
    out[0] += full[:K].sum()
    out[-1] += full[3 * K + 1:].sum()
    return out


def _linear_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    nza, nzb = np.nonzero(a)[0], np.nonzero(b)[0]
    n = a.size + b.size - 1
    if nza.size == 0 or nzb.size == 0:
        return np.zeros(n)
    a0, a1 = nza[0], nza[-1] + 1
    b0, b1 = nzb[0], nzb[-1] + 1
    sa, sb = a[a0:a1], b[b0:b1]
    if sa.size * sb.size <= 200_000:
        part = np.convolve(sa, sb)
    else:
        part = np.clip(fftconvolve(sa, sb), 0.0, None)
    out = np.zeros(n)
    out[a0 + b0: a0 + b0 + part.size] = part
    return out


def conv_var(c1: LDensity, c2: LDensity) -> LDensity:
    """Variable-node convolution: the density of L1 + L2."""
    t1, t2 = c1.total_mass(), c2.total_mass()
    pinf = c1.pinf * t2 + (t1 - c1.pinf) * c2.pinf
    if c1.is_atomic and c2.is_atomic:
        locs = np.add.outer(c1.atom_loc, c2.atom_loc).ravel()
        masses = np.multiply.outer(c1.atom_mass, c2.atom_mass).ravel()
        locs, masses = _merge_atoms(locs, masses)
        return _maybe_grid(LDensity(locs, masses, None, c1.delta, c1.W, pinf))
    ref = c1 if not c1.is_atomic else c2
    g1 = c1.to_grid(ref.delta, ref.W).grid
    g2 = c2.to_grid(ref.delta, ref.W).grid
    g = _fold(_linear_conv(g1, g2), ref.K)
    return LDensity(np.zeros(0), np.zeros(0), g, ref.delta, ref.W, pinf)


@lru_cache(maxsize=4)
def _check_table(delta: float, K: int) -> np.ndarray:
    mags = np.arange(K + 1) * delta
    ph = _phi(mags)
    out = _phi(ph[:, None] + ph[None, :])
    return np.rint(out / delta).astype(np.int32)


def _check_finite_grid(g1: np.ndarray, g2: np.ndarray, delta: float, K: int) -> np.ndarray:
    def split(g):
        pos = g[K:].copy()
        neg = np.zeros(K + 1)
        neg[1:] = g[:K][::-1]
        return pos, neg

    p1, n1 = split(g1)
    p2, n2 = split(g2)
    i1 = np.nonzero(p1 + n1)[0]
    i2 = np.nonzero(p2 + n2)[0]
    out = np.zeros(2 * K + 1)
    if i1.size == 0 or i2.size == 0:
        return out
    T = _check_table(delta, K)[np.ix_(i1, i2)].ravel()
    same = (np.outer(p1[i1], p2[i2]) + np.outer(n1[i1], n2[i2])).ravel()
    diff = (np.outer(p1[i1], n2[i2]) + np.outer(n1[i1], p2[i2])).ravel()
    pos = np.bincount(T, weights=same, minlength=K + 1)
    neg = np.bincount(T, weights=diff, minlength=K + 1)
    out[K:] += pos
    out[K] += neg[0]
    out[:K] += neg[1:][::-1]
    return out


def conv_check(c1: LDensity, c2: LDensity) -> LDensity:
    """Check-node convolution: the density of 2 atanh(tanh(L1/2) tanh(L2/2))."""
    pinf = c1.pinf * c2.pinf
    if c1.is_atomic and c2.is_atomic:
        locs = check_combine(c1.atom_loc[:, None], c2.atom_loc[None, :]).ravel()
        masses = np.multiply.outer(c1.atom_mass, c2.atom_mass).ravel()
        locs = np.concatenate([locs, c1.atom_loc, c2.atom_loc])
        masses = np.concatenate([masses, c1.atom_mass * c2.pinf, c2.atom_mass * c1.pinf])
        locs, masses = _merge_atoms(locs, masses)
        return _maybe_grid(LDensity(locs, masses, None, c1.delta, c1.W, pinf))
    ref = c1 if not c1.is_atomic else c2
    g1 = c1.to_grid(ref.delta, ref.W).grid
    g2 = c2.to_grid(ref.delta, ref.W).grid
    g = _check_finite_grid(g1, g2, ref.delta, ref.K)
    g += c2.pinf * g1 + c1.pinf * g2
    return LDensity(np.zeros(0), np.zeros(0), g, ref.delta, ref.W, pinf)


def conv_var_power(c: LDensity, k: int) -> LDensity:
    out = LDensity.delta_zero()
    for _ in range(k):
        out = conv_var(out, c)
    return out


# channels -------------------------------------------------------------------

def h2(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def _gauss_entropy(sigma: float) -> float:
    m = 2.0 / sigma ** 2
    s = math.sqrt(2 * m)
    f = lambda y: norm.pdf(y, m, s) * np.logaddexp(0.0, -y) / LN2
    val, _ = integrate.quad(f, m - 40 * s, m + 40 * s, limit=400, epsabs=1e-14, epsrel=1e-12)
    return float(val)


KINDS = ("BEC", "BSC", "BAWGNC")


@dataclass(frozen=True)
class Channel:
    """One member of a standard BMS family, with exact functionals where available."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown channel kind {self.kind!r}")
        p = self.param
        if self.kind == "BEC" and not 0.0 <= p <= 1.0:
            raise ValidationError("BEC erasure probability must lie in [0, 1]")
        if self.kind == "BSC" and not 0.0 <= p <= 0.5:
            raise ValidationError("BSC crossover probability must lie in [0, 1/2]")
        if self.kind == "BAWGNC" and not p > 0.0:
            raise ValidationError("BAWGNC noise level must be positive")

    def density(self, delta: float = DELTA, W: float = WIDTH) -> LDensity:
        p = self.param
        if self.kind == "BEC":
            return LDensity.from_atoms([0.0], [p], pinf=1.0 - p)
        if self.kind == "BSC":
            if p == 0.0:
                return LDensity.delta_inf()
            a = math.log((1 - p) / p)
            return LDensity.from_atoms([a, -a], [1 - p, p])
        m = 2.0 / p ** 2
        s = math.sqrt(2 * m)
        K = _bins(delta, W)
        edges = (np.arange(-K, K + 2) - 0.5) * delta
        cdf = norm.cdf(edges, m, s)
        g = np.diff(cdf)
        g[0] += cdf[0]
        g[-1] += 1.0 - cdf[-1]
        return LDensity(np.zeros(0), np.zeros(0), g, delta, W, 0.0)

    def entropy(self) -> float:
        if self.kind == "BEC":
            return self.param
        if self.kind == "BSC":
            return h2(self.param)
        return _gauss_entropy(self.param)

    def bhattacharyya(self) -> float:
        p = self.param
        if self.kind == "BEC":
            return p
        if self.kind == "BSC":
            return 2.0 * math.sqrt(p * (1 - p))
        return math.exp(-1.0 / (2 * p ** 2))

    def error_prob(self) -> float:
        return self.error_prob_power(1)

    def error_prob_power(self, l: int) -> float:
        """E(c^{⊛l}) from closed forms."""
        p = self.param
        if self.kind == "BEC":
            return 0.5 * p ** l
        if self.kind == "BSC":
            # sum = a (#correct - #flipped); error when negative, half credit at zero
            total = 0.0
            for k in range(l + 1):
                w = math.comb(l, k) * p ** k * (1 - p) ** (l - k)
                if 2 * k > l:
                    total += w
                elif 2 * k == l:
                    total += 0.5 * w
            return total
        return float(norm.cdf(-math.sqrt(l) / p))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        p = self.param
        if self.kind == "BEC":
            return np.where(rng.random(size) < p, 0.0, np.inf)
        if self.kind == "BSC":
            if p == 0.0:
                return np.full(size, np.inf)
            a = math.log((1 - p) / p)
            return np.where(rng.random(size) < p, -a, a)
        m = 2.0 / p ** 2
        return rng.normal(m, math.sqrt(2 * m), size)


def make_channel(kind: str, parameter: float) -> LDensity:
    return Channel(kind, parameter).density()


def sample_llr(channel, rng: np.random.Generator, size: int | None = None):
    """Draw channel LLRs given that +1 was sent."""
    n = 1 if size is None else size
    out = channel.sample(rng, n)
    return float(out[0]) if size is None else out


# families ---------------------------------------------------------------------

_RANGES = {"BEC": (0.0, 1.0), "BSC": (0.0, 0.5), "BAWGNC": (0.02, 1e4)}


@dataclass(frozen=True)
class ChannelFamily:
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown channel kind {self.kind!r}")

    @property
    def parameter_range(self) -> tuple[float, float]:
        return _RANGES[self.kind]

    def channel(self, param: float) -> Channel:
        return Channel(self.kind, param)

    def at_entropy(self, h: float) -> Channel:
        return Channel(self.kind, entropy_inverse(self, h))


def entropy_inverse(family: ChannelFamily | str, h: float, tol: float = 1e-9) -> float:
    """Parameter σ with |H(c_σ) - h| < tol, by bisection on the monotone entropy."""
    if isinstance(family, str):
        family = ChannelFamily(family)
    if not 0.0 <= h <= 1.0:
        raise ValidationError("entropy must lie in [0, 1]")
    kind = family.kind
    if kind == "BEC":
        return h
    lo, hi = family.parameter_range
    H = (lambda s: h2(s)) if kind == "BSC" else _gauss_entropy
    if kind == "BAWGNC":
        if h <= H(lo):
            return lo
        if h >= H(hi):
            return hi
        lo, hi = math.log(lo), math.log(hi)
        f = lambda t: H(math.exp(t))
    else:
        f = H
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = f(mid)
        if abs(v - h) < tol * 0.1 or hi - lo < 1e-16:
            lo = hi = mid
            break
        if v < h:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return math.exp(x) if kind == "BAWGNC" else x


# degradation ------------------------------------------------------------------

def _abs_d(c: LDensity):
    y, m = c.points()
    d = np.tanh(np.abs(y) / 2)
    return np.concatenate([d, [1.0]]), np.concatenate([m, [c.pinf]])


def degradation_integral(c: LDensity, z: np.ndarray) -> np.ndarray:
    """∫_z^1 |C|(x) dx where |C| is the CDF of |D| = |tanh(L/2)|."""
    d, w = _abs_d(c)
    return np.array([np.sum(w * (1.0 - np.maximum(zz, d))) for zz in z])


def is_degraded(c: LDensity, c_prime: LDensity, npts: int = 1024, tol: float = 1e-12) -> bool:
    """True when c is degraded with respect to c_prime on the z test grid."""
    z = np.linspace(0.0, 1.0, npts)
    return bool(np.all(degradation_integral(c, z) >= degradation_integral(c_prime, z) - tol))


# binomial window lemma ------------------------------------------------------------

def partial_binomial_sum(k0: int, k1: int, l: int, p) -> Fraction | float:
    """B(k0; k1) = Σ_{i=k0}^{k1} binom(l, i) p^{l-i} (1-p)^i, exact for rational p."""
    if not 0 <= k0 <= k1 <= l:
        raise ValidationError("need 0 <= k0 <= k1 <= l")
    q = 1 - p
    return sum(math.comb(l, i) * p ** (l - i) * q ** i for i in range(k0, k1 + 1))


def check_bsc_sum_lemma(l: int, p) -> bool:
    """B(0; (l-1)/2) <= B(k; k + (l-1)/2) for all 0 <= k <= (l+1)/2 (odd l)."""
    if l < 1 or l % 2 == 0:
        raise ValidationError("the window lemma needs an odd l")
    if isinstance(p, float):
        p = Fraction(p).limit_denominator(10 ** 12)
    h = (l - 1) // 2
    base = partial_binomial_sum(0, h, l, p)
    return all(base <= partial_binomial_sum(k, k + h, l, p) for k in range(0, (l + 1) // 2 + 1)
               if k + h <= l)


# admissibility ----------------------------------------------------------------------

def _sum_density(channel, l: int):
    """Return a function giving the mass of the l-fold LLR sum on closed [a, b]."""
    if isinstance(channel, Channel) and channel.kind == "BAWGNC":
        m = 2.0 / channel.param ** 2
        mean, sd = l * m, math.sqrt(2 * l * m)
        return lambda a, b: float(norm.cdf(b, mean, sd) - norm.cdf(a, mean, sd))
    c = channel.density() if isinstance(channel, Channel) else channel
    s = conv_var_power(c, l)
    return s.mass_in


def admissibility_gap(channel, l: int, M: float, npts: int = 512) -> float:
    """max over m in [0, M] of ∫_{-M}^0 c^{⊛l} - ∫_{-m}^{M-m} c^{⊛l}."""
    if l < 1 or M < 0:
        raise ValidationError("need l >= 1 and M >= 0")
    mass = _sum_density(channel, l)
    left = mass(-M, 0.0)
    ms = np.unique(np.concatenate([np.linspace(0.0, M, npts), [0.0, M]]))
    return max(left - mass(-m, M - m) for m in ms)


def is_admissible(channel, l: int, M: float, slack: float = 1e-9) -> bool:
    return admissibility_gap(channel, l, M) <= slack


def truncated_error_prob(c, l: int, M: float) -> float:
    """Ê(c^{⊛l}) = ½ ∫_{-M}^{M} e^{-(|y/2|+y/2)} c^{⊛l}(y) dy."""
    d = c.density() if isinstance(c, Channel) else c
    return conv_var_power(d, l).truncated_error_prob(M)


def beta_constant(b_channel: float, b: float) -> float:
    """β = (B(c) e)^{3/2} sqrt(2 ln(B(c)/B)) / (9π) for 0 < B < B(c)."""
    if not 0 < b < b_channel:
        raise ValidationError("need 0 < B < B(c)")
    return (b_channel * math.e) ** 1.5 * math.sqrt(2 * math.log(b_channel / b)) / (9 * math.pi)
