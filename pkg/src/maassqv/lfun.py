"""Gamma factors, approximate-functional-equation weights, truncated
central values L(1/2, psi x phi_2k), auxiliary values at s=1, and the
leading constants of the variance asymptotics.

Numeric conventions used throughout:
  - t_m = pi*m/log(eps_D) is the spectral parameter of the index-m
    dihedral form; the index passed around is m = 2k.
  - gamma(s) = pi^{-2s} prod_{+-,+-} Gamma((s +- i t_psi +- i t_2k)/2).
  - All truncated Dirichlet series use a smooth exponential cutoff
    e^{-n/X}; the cutoff's Mellin corrections are applied where the
    shifted values are available in closed form and reported otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NegativeCentralValue,
    PoleInput,
    QuadratureNonconvergent,
    TableExhausted,
    TruncationInsufficient,
)
from .hecke import HeckeSource, vartheta
from .ideals import kronecker, kronecker_chi, r_D
from .quadfield import FieldParams

# ---------------------------------------------------------------------------
# log Gamma: upward recursion into the Stirling regime + asymptotic series.

# B_{2n} / (2n (2n-1)) for n = 1..10
_STIRLING = (
    1.0 / 12,
    -1.0 / 360,
    1.0 / 1260,
    -1.0 / 1680,
    1.0 / 1188,
    -691.0 / 360360,
    1.0 / 156,
    -3617.0 / 122400,
    43867.0 / 244188,
    -174611.0 / 125400,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma, accurate to ~1e-13 relative on
    Re z in [-50, 50], |Im z| <= 1e4."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleInput(f"log_gamma pole at z={z}")
    acc = 0.0 + 0.0j
    w = z
    # shift until the asymptotic series applies (large modulus, right of
    # the negative real axis or far from it)
    while not (abs(w) >= 16.0 and (w.real >= 0.0 or abs(w.imag) >= 16.0)):
        acc -= cmath.log(w)
        w += 1.0
    series = 0.0 + 0.0j
    winv2 = 1.0 / (w * w)
    term = 1.0 / w
    for c in _STIRLING:
        series += c * term
        term *= winv2
    return acc + (w - 0.5) * cmath.log(w) - w + _HALF_LOG_2PI + series


def spectral_parameter(F: FieldParams, m: int) -> float:
    """t_m = pi * m / log eps_D for the index-m dihedral form."""
    return math.pi * m / F.log_eps


def gamma_factor(s: complex, t_psi: float, t_2k: float) -> complex:
    """pi^{-2s} prod over both sign choices of Gamma((s +- i t_psi +- i t_2k)/2)."""
    total = -2.0 * complex(s) * math.log(math.pi)
    for e1 in (1.0, -1.0):
        for e2 in (1.0, -1.0):
            total += log_gamma((s + 1j * (e1 * t_psi + e2 * t_2k)) / 2.0)
    return cmath.exp(total)


def gamma_ratio_stirling(t_psi: float, t_2k: float) -> tuple[float, float]:
    """The central Gamma-modulus ratio
    |G((1/2+i t_psi+i t_2k)/2)|^2 |G((1/2-i t_psi+i t_2k)/2)|^2 / |G((1+i t_2k)/2)|^4
    and its large-t_2k asymptotic 2/t_2k (= log eps_D / (pi k) at t_2k = 2 pi k/log eps)."""
    if t_2k <= abs(t_psi):
        raise PoleInput("ratio asymptotic needs t_2k > |t_psi|")
    a1 = (0.5 + 1j * (t_psi + t_2k)) / 2.0
    a2 = (0.5 + 1j * (t_2k - t_psi)) / 2.0
    a3 = (1.0 + 1j * t_2k) / 2.0
    exact = math.exp(
        2.0 * log_gamma(a1).real + 2.0 * log_gamma(a2).real - 4.0 * log_gamma(a3).real
    )
    return exact, 2.0 / t_2k


def classical_variance(t_psi: float) -> float:
    """|Gamma(1/4 + i t_psi/2)|^4 / (2 pi |Gamma(1/2 + i t_psi)|^2)."""
    num = 4.0 * log_gamma(0.25 + 0.5j * t_psi).real
    den = 2.0 * log_gamma(0.5 + 1j * t_psi).real
    return math.exp(num - den) / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# Fast lattice tables (numpy): one representative per principal ideal.

_SCAN_CACHE: dict[int, tuple[int, np.ndarray, np.ndarray]] = {}


def ideal_scan(F: FieldParams, nmax: int) -> tuple[np.ndarray, np.ndarray]:
    """(norms, thetas) over all principal ideals with 1 <= |N| <= nmax.

    Enumerates one generator per ideal directly: the generator with
    positive real embedding y and theta = 2 log y - log|N| in [0, 2 log eps).
    Results are cached per field with power-of-two rounding of nmax.
    """
    bound = 1 << max(nmax - 1, 1).bit_length()
    hit = _SCAN_CACHE.get(F.D)
    if hit is not None and hit[0] >= bound:
        norms, thetas = hit[1], hit[2]
        if hit[0] == nmax:
            return norms, thetas
        cut = int(np.searchsorted(norms, nmax, side="right"))
        return norms[:cut], thetas[:cut]

    eps_val = math.exp(F.log_eps)
    B = math.sqrt(bound) * eps_val * (1.0 + 1e-12)
    om = F.omega
    c_norm = F.omega_norm  # n^2 coefficient of the norm form
    n_hi = int((eps_val + 1.0) * math.sqrt(bound) / F.sqrtD) + 2

    norm_parts: list[np.ndarray] = []
    theta_parts: list[np.ndarray] = []
    width = int(B) + 2
    chunk = max(1, (1 << 24) // width)
    rows = np.arange(-n_hi, n_hi + 1, dtype=np.int64)
    for i0 in range(0, rows.size, chunk):
        nn = rows[i0 : i0 + chunk, None]
        m_start = np.ceil(-nn * om).astype(np.int64)
        mm = m_start + np.arange(width, dtype=np.int64)[None, :]
        y = mm + nn * om
        q = mm * mm + mm * nn + c_norm * nn * nn
        aq = np.abs(q)
        y2 = y * y
        ok = (
            (y > 0.0)
            & (aq >= 1)
            & (aq <= bound)
            & (y2 >= aq * (1.0 - 1e-9))
            & (y2 < aq * (eps_val * eps_val) * (1.0 - 1e-9))
        )
        if ok.any():
            norm_parts.append(aq[ok])
            theta_parts.append(np.log(y2[ok] / aq[ok]))
    norms = np.concatenate(norm_parts) if norm_parts else np.empty(0, np.int64)
    thetas = np.concatenate(theta_parts) if theta_parts else np.empty(0, np.float64)
    order = np.argsort(norms, kind="stable")
    norms, thetas = norms[order], thetas[order]
    _SCAN_CACHE[F.D] = (bound, norms, thetas)
    if bound == nmax:
        return norms, thetas
    cut = int(np.searchsorted(norms, nmax, side="right"))
    return norms[:cut], thetas[:cut]


def dihedral_lambda_table(F: FieldParams, m: int, nmax: int) -> np.ndarray:
    """Dense numpy table [lambda_m(0) .. lambda_m(nmax)] of the index-m
    dihedral Hecke eigenvalues (index 0 unused, 0.0)."""
    norms, thetas = ideal_scan(F, nmax)
    out = np.zeros(nmax + 1)
    # Xi_m(ideal) = exp(i pi m theta / log eps); the n-sums are real
    np.add.at(out, norms, np.cos((math.pi * m / F.log_eps) * thetas))
    return out


def lambda_psi_table(src: HeckeSource, nmax: int) -> np.ndarray:
    """Dense numpy table [lambda_psi(0) .. lambda_psi(nmax)] via a
    multiplicative sieve (one slice update per prime power)."""
    out = np.ones(nmax + 1)
    out[0] = 0.0
    sieve = np.ones(nmax + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(nmax)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    primes = np.flatnonzero(sieve)
    try:
        for p in primes.tolist():
            prev = 1.0
            b = 1
            pb = p
            while pb <= nmax:
                cur = src.lambda_pp(p, b)
                if abs(prev) < 1e-300:
                    raise ZeroDivisionError
                out[pb::pb] *= cur / prev
                prev = cur
                b += 1
                pb *= p
    except ZeroDivisionError:
        # a vanishing lambda(p^b) breaks the ratio trick: fall back to
        # an exact (slower) fill for the affected entries
        from .hecke import lambda_psi

        for n in range(1, nmax + 1):
            out[n] = lambda_psi(src, n)
    except Exception as exc:  # table-backed source ran out of primes
        raise TableExhausted(f"prime table exhausted below {nmax}") from exc
    return out


# ---------------------------------------------------------------------------
# Approximate functional equation weight.


@dataclass(frozen=True)
class AfeConfig:
    contour_re: float = 1.0  # the line c > 0
    im_cutoff: float = 8.0
    quad_step: float = 0.05
    series_cutoff_multiplier: float = 100.0  # terms up to mult * k^2 * D^{3/2}

    def __post_init__(self):
        if not (self.contour_re > 0):
            raise ValueError("contour_re must be positive")
        if self.im_cutoff <= 1.0 or self.quad_step <= 0.0:
            raise ValueError("bad quadrature parameters")
        if self.series_cutoff_multiplier <= 0.0:
            raise ValueError("series_cutoff_multiplier must be positive")


def _dirichlet_l_line(F: FieldParams, s_nodes: np.ndarray, nterms: int = 40000) -> np.ndarray:
    """L(s, chi_D) at an array of points with Re s >= 2 (plain truncated
    Dirichlet series; tail << |s| D / nterms^2 by partial summation)."""
    chi = np.array([kronecker(F.D, n) for n in range(F.D)], dtype=np.float64)
    n = np.arange(1, nterms + 1)
    chin = chi[n % F.D]
    logn = np.log(n)
    out = np.empty(s_nodes.size, dtype=np.complex128)
    for i, s in enumerate(s_nodes):
        out[i] = np.sum(chin * np.exp(-s * logn))
    return out


_L_NODE_CACHE: dict[tuple, np.ndarray] = {}
_AFE_NODE_CACHE: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _afe_nodes(
    cfg: AfeConfig, F: FieldParams, k: int, s: complex, t_psi: float
) -> tuple[np.ndarray, np.ndarray]:
    """(w_nodes, g_nodes) on the upper half of the contour Re w = c, where
    g(w) = L(2w+2s, chi_D) * gamma(s+w)/gamma(s) * e^{w^2} * trapezoid
    weight / w; the xi-dependence (D^{3/2}/(xi k^2))^w is applied later."""
    key = (id(F), F.D, k, complex(s), t_psi, cfg.contour_re, cfg.im_cutoff, cfg.quad_step)
    hit = _AFE_NODE_CACHE.get(key)
    if hit is not None:
        return hit
    c = cfg.contour_re
    taus = np.arange(0.0, cfg.im_cutoff + cfg.quad_step / 2, cfg.quad_step)
    w = c + 1j * taus
    lkey = (F.D, complex(s), cfg.contour_re, cfg.im_cutoff, cfg.quad_step)
    lvals = _L_NODE_CACHE.get(lkey)
    if lvals is None:
        lvals = _dirichlet_l_line(F, 2.0 * w + 2.0 * s)
        _L_NODE_CACHE[lkey] = lvals
    t2k = spectral_parameter(F, 2 * k)
    log_g0 = -2.0 * complex(s) * math.log(math.pi)
    for e1 in (1.0, -1.0):
        for e2 in (1.0, -1.0):
            log_g0 += log_gamma((s + 1j * (e1 * t_psi + e2 * t2k)) / 2.0)
    g = np.empty(w.size, dtype=np.complex128)
    for i, wi in enumerate(w):
        lg = -2.0 * (s + wi) * math.log(math.pi)
        for e1 in (1.0, -1.0):
            for e2 in (1.0, -1.0):
                lg += log_gamma((s + wi + 1j * (e1 * t_psi + e2 * t2k)) / 2.0)
        g[i] = cmath.exp(lg - log_g0 + wi * wi) / wi
    g *= lvals
    # endpoint must be negligible for the trapezoid tail to be safe
    ref = max(abs(g[0]), 1.0)
    if abs(g[-1]) > 1e-10 * ref:
        raise QuadratureNonconvergent(
            f"contour tail {abs(g[-1]):.2e} not below 1e-10 x {ref:.2e}"
        )
    g[0] *= 0.5
    g[-1] *= 0.5
    out = (w, g * (cfg.quad_step / math.pi))
    _AFE_NODE_CACHE[key] = out
    return out


def afe_weight_many(
    cfg: AfeConfig,
    s: complex,
    xis: np.ndarray,
    F: FieldParams,
    k: int,
    t_psi: float = 1.0,
) -> np.ndarray:
    """W_s(xi) for an array of positive xi (vectorized contour quadrature)."""
    if k == 0:
        raise PoleInput("k = 0 has no cuspidal dihedral form")
    w, g = _afe_nodes(cfg, F, abs(k), complex(s), t_psi)
    xis = np.asarray(xis, dtype=np.float64)
    if np.any(xis <= 0):
        raise ValueError("xi must be positive")
    logx = 1.5 * math.log(F.D) - np.log(xis) - 2.0 * math.log(abs(k))
    out = np.empty(xis.size)
    chunk = max(1, (1 << 22) // w.size)
    for i0 in range(0, xis.size, chunk):
        lx = logx[i0 : i0 + chunk, None]
        # Re[e^{lx w} g] summed over nodes; split to avoid complex temporaries
        out[i0 : i0 + chunk] = (
            np.exp(lx * w[None, :].real)
            * (np.cos(lx * w[None, :].imag) * g.real - np.sin(lx * w[None, :].imag) * g.imag)
        ).sum(axis=1)
    return out


def afe_weight(
    cfg: AfeConfig, s: complex, xi: float, F: FieldParams, k: int, t_psi: float = 1.0
) -> float:
    """W_s(xi): smoothed-cutoff weight of the approximate functional
    equation; W(xi) -> L(1, chi_D) as xi -> 0 and decays rapidly once
    xi k^2 >> D^{3/2}."""
    return float(afe_weight_many(cfg, s, np.array([xi]), F, k, t_psi)[0])


def afe_tail_bound(cfg: AfeConfig, F: FieldParams, xi: float) -> float:
    """Heuristic bound for |W(xi')| at xi' >= xi: contour shift to the
    optimal Re w = A gives exp(-log(R)^2/4) with R = 4 log(eps)^2 xi/D^{3/2}."""
    R = 4.0 * F.log_eps**2 * xi / F.D**1.5
    if R <= 1.0:
        return 3.0
    return 30.0 * math.exp(-0.25 * math.log(R) ** 2)


def central_value(src: HeckeSource, F: FieldParams, cfg: AfeConfig, k: int) -> float:
    """L(1/2, psi x phi_2k) by the approximate functional equation:
    2 * sum_n lambda_2k(n) lambda_psi(n) n^{-1/2} W(n/k^2) when the root
    number eta_psi(D) = +1, and exactly 0 when eta_psi(D) = -1."""
    if k == 0:
        raise PoleInput("k = 0 has no cuspidal dihedral form")
    if src.eta_D == -1:
        return 0.0
    k = abs(k)
    N = int(cfg.series_cutoff_multiplier * k * k * F.D**1.5)
    if N < 4:
        raise TruncationInsufficient("series cutoff below 4 terms")
    lam2k = dihedral_lambda_table(F, 2 * k, N)
    lpsi = lambda_psi_table(src, N)
    n = np.arange(1, N + 1)
    # W is smooth in log(xi): evaluate on a geometric grid and interpolate
    grid = np.geomspace(1.0 / (k * k), (N + 1.0) / (k * k), 48 * 8 + 2)
    wgrid = afe_weight_many(cfg, 0.5, grid, F, k, src.t_psi)
    wvals = np.interp(np.log(n / (k * k)), np.log(grid), wgrid)
    half = float(np.sum(lam2k[1:] * lpsi[1:] / np.sqrt(n) * wvals))
    value = half + src.eta_D * half
    if value < -1e-3 - afe_tail_bound(cfg, F, N / (k * k)):
        raise NegativeCentralValue(f"L(1/2) = {value:.6g} at k={k}")
    return value


# ---------------------------------------------------------------------------
# Values at s = 1 and on the central line for the constants.


def zeta_d_two(F: FieldParams) -> float:
    """zeta_D(2) = zeta(2) (1 - p1^{-2})(1 - p2^{-2}) in closed form."""
    return (math.pi**2 / 6.0) * (1.0 - F.p1**-2) * (1.0 - F.p2**-2)


def _smoothed_over_n(coeffs: np.ndarray, X: float) -> float:
    """sum_{n>=1} a_n e^{-n/X} / n for a dense coefficient table a[0..N]."""
    n = np.arange(1, coeffs.size)
    return float(np.sum(coeffs[1:] * np.exp(-n / X) / n))


_L_ONE_CHI_CACHE: dict[tuple[int, float], float] = {}


def dirichlet_l_one(F: FieldParams, X: float = 20000.0) -> float:
    """L(1, chi_D) by smoothed character sum; the exponential cutoff's
    Mellin corrections vanish to O(X^{-4}) for even chi_D except the
    X^{-2} L(-1, chi_D)/2 term, which is added in closed form."""
    if X < 100:
        raise TruncationInsufficient("cutoff X too small")
    key = (F.D, float(X))
    hit = _L_ONE_CHI_CACHE.get(key)
    if hit is not None:
        return hit
    N = int(40 * X)
    n = np.arange(1, N + 1)
    chi = np.array([kronecker(F.D, r) for r in range(F.D)], dtype=np.float64)
    S = float(np.sum(chi[n % F.D] / n * np.exp(-n / X)))
    # L(-1, chi) = -B_{2,chi}/2 with B_{2,chi} = D sum_a chi(a) B_2(a/D)
    a = np.arange(F.D)
    b2 = (a / F.D) ** 2 - (a / F.D) + 1.0 / 6.0
    l_minus1 = -0.5 * F.D * float(np.sum(chi[a % F.D] * b2))
    out = S - 0.5 * l_minus1 / X**2
    _L_ONE_CHI_CACHE[key] = out
    return out


_L_ONE_PHI_CACHE: dict[tuple[int, int, float], float] = {}


def l_one_phi(F: FieldParams, m: int, X: float | None = None) -> float:
    """L(1, phi_m) = sum lambda_m(n)/n, smoothed; m = 2k, k != 0.

    The exponential cutoff leaves Mellin corrections X^{-j} L(1-j, phi_m)/j!
    with |L(1-j)| of size (t_m sqrt(D)/2pi)^{2j-1}; the j=1 term is removed
    by Richardson extrapolation between cutoffs X and X/2, and X (when not
    given) is scaled with the conductor so the j>=2 terms stay small."""
    if m == 0:
        raise PoleInput("phi_0 is not cuspidal: L(1, phi_0) has a pole")
    if X is None:
        scale = (spectral_parameter(F, abs(m)) * math.sqrt(F.D) / (2.0 * math.pi)) ** 2
        X = max(20000.0, 8.0 * scale)
    if X < 100:
        raise TruncationInsufficient("cutoff X too small")
    key = (F.D, abs(m), float(X))
    hit = _L_ONE_PHI_CACHE.get(key)
    if hit is not None:
        return hit
    N = int(30 * X)
    tab = dihedral_lambda_table(F, abs(m), N)
    out = 2.0 * _smoothed_over_n(tab, X) - _smoothed_over_n(tab, X / 2.0)
    _L_ONE_PHI_CACHE[key] = out
    return out


def l_one_sym2(src: HeckeSource, F: FieldParams, X: float = 20000.0) -> float:
    """L(1, sym^2 psi) = zeta_D(2) * sum_n lambda_psi(n^2)/n (smoothed).

    The identity sum lambda(n^2) n^{-s} = L(s, sym^2 psi)/zeta_D(2s) holds
    with the ramified model lambda_psi(p) = +-p^{-1/2} at p | D, whose
    squares give the local factor (1 - p^{-s-1})^{-1} on the sym^2 side.
    """
    if X < 100:
        raise TruncationInsufficient("cutoff X too small")
    key = (id(src), float(X))
    hit = _L_SYM2_CACHE.get(key)
    if hit is not None and hit[0] is src:
        return hit[1]
    N = int(math.isqrt(int(40 * X)))
    m = np.arange(1, N + 1)
    if N * N + 1 <= 1 << 22:
        lpsi = lambda_psi_table(src, N * N + 1)
        vals = lpsi[(m * m).astype(np.int64)]
    else:
        # dense sieve up to N^2 would be too large: build lambda(m^2)
        # directly from the factorization of m
        vals = lambda_square_table(src, N)[1:]
    out = zeta_d_two(F) * float(np.sum(vals / m * np.exp(-m * m / X)))
    _L_SYM2_CACHE[key] = (src, out)
    return out


_L_SYM2_CACHE: dict[tuple, tuple] = {}


def lambda_square_table(src: HeckeSource, m_max: int, a: int = 1) -> np.ndarray:
    """Dense table [lambda_psi(a * 0^2) .. lambda_psi(a * m_max^2)] built
    from a smallest-prime-factor sieve (index 0 unused, 0.0)."""
    spf = np.zeros(m_max + 1, dtype=np.int64)
    for p in range(2, int(math.isqrt(m_max)) + 1):
        mask = spf[p::p] == 0
        spf[p::p][mask] = p
    from sympy import factorint

    a_fac = dict(factorint(a)) if a > 1 else {}
    out = np.zeros(m_max + 1)
    for m in range(1, m_max + 1):
        e: dict[int, int] = dict(a_fac)
        r = m
        while r > 1:
            p = int(spf[r]) or r
            b = 0
            while r % p == 0:
                r //= p
                b += 1
            e[p] = e.get(p, 0) + 2 * b
        v = 1.0
        for p, b in e.items():
            v *= src.lambda_pp(p, b)
        out[m] = v
    return out


def _gl2_central(
    src: HeckeSource,
    F: FieldParams,
    twist_by_chi: bool,
    cfg: AfeConfig | None = None,
) -> float:
    """Desk-scale L(1/2, psi) (or L(1/2, psi x chi_D)): one-sided
    approximate functional equation 2 sum lambda(n) chi(n) n^{-1/2} V(n)
    assuming root number +1 (a -1 root number drives the sum itself to 0)."""
    if cfg is None:
        cfg = AfeConfig()
    key = (id(src), F.D, twist_by_chi, cfg.contour_re, cfg.im_cutoff, cfg.quad_step)
    hit = _GL2_CACHE.get(key)
    if hit is not None and hit[0] is src:
        return hit[1]
    q = float(F.D * F.D) if twist_by_chi else float(F.D)
    t = src.t_psi
    c = cfg.contour_re
    taus = np.arange(0.0, cfg.im_cutoff + cfg.quad_step / 2, cfg.quad_step)
    w = c + 1j * taus
    log_g0 = (
        -0.5 * math.log(math.pi)
        + log_gamma((0.5 + 1j * t) / 2.0)
        + log_gamma((0.5 - 1j * t) / 2.0)
    )
    g = np.empty(w.size, dtype=np.complex128)
    for i, wi in enumerate(w):
        lg = (
            -(0.5 + wi) * math.log(math.pi)
            + log_gamma((0.5 + wi + 1j * t) / 2.0)
            + log_gamma((0.5 + wi - 1j * t) / 2.0)
        )
        g[i] = cmath.exp(lg - log_g0 + wi * wi) / wi
    g[0] *= 0.5
    g[-1] *= 0.5
    g *= cfg.quad_step / math.pi
    N = int(200.0 * math.sqrt(q) * max(1.0, t))
    lpsi = lambda_psi_table(src, N)
    if twist_by_chi:
        n_all = np.arange(N + 1)
        chi = np.array([kronecker(F.D, r) for r in range(F.D)], dtype=np.float64)
        lpsi = lpsi * chi[n_all % F.D]
    n = np.arange(1, N + 1)
    logx = 0.5 * math.log(q) - np.log(n)
    V = (
        np.exp(logx[:, None] * w[None, :].real)
        * (
            np.cos(logx[:, None] * w[None, :].imag) * g.real
            - np.sin(logx[:, None] * w[None, :].imag) * g.imag
        )
    ).sum(axis=1)
    out = 2.0 * float(np.sum(lpsi[1:] / np.sqrt(n) * V))
    _GL2_CACHE[key] = (src, out)
    return out


_GL2_CACHE: dict[tuple, tuple] = {}


def l_values(F: FieldParams, src: HeckeSource, k: int, X: float = 20000.0) -> dict:
    """The auxiliary values feeding the constants, as a dict with keys
    L1_chi, zeta_D2, L1_phi2k, L1_sym2."""
    if k == 0:
        raise PoleInput("k = 0 has no cuspidal dihedral form")
    return {
        "L1_chi": dirichlet_l_one(F, X),
        "zeta_D2": zeta_d_two(F),
        "L1_phi2k": l_one_phi(F, 2 * k, X),
        "L1_sym2": l_one_sym2(src, F, X),
    }


def ramified_sum_factor(src: HeckeSource, F: FieldParams) -> float:
    """1 + lambda(p1)/sqrt(p1) + lambda(p2)/sqrt(p2) + lambda(D)/sqrt(D);
    equals (1 + lambda(p1)/sqrt(p1))(1 + lambda(p2)/sqrt(p2)) under the
    multiplicative ramified model."""
    l1 = src.lambda_p(F.p1)
    l2 = src.lambda_p(F.p2)
    return (
        1.0
        + l1 / math.sqrt(F.p1)
        + l2 / math.sqrt(F.p2)
        + l1 * l2 / math.sqrt(F.D)
    )


def constants(
    F: FieldParams,
    src: HeckeSource,
    p_max: int = 100000,
    X: float = 20000.0,
) -> dict:
    """The three leading constants of the asymptotics:
      C_Dpsi       = 2 L(1,chi_D)/zeta_D(2) L(1,sym2 psi) (1 + ramified sums)
      C_Dpsi_prime = Euler product over p coprime to D times prod_{p|D}(1-1/p)^2
      A_h          = L(1/2,psi) L(1/2,psi x chi_D) pi log(eps)
                     / (2 D^2 zeta_D(2) L(1,chi_D)) * (1 + ramified sums)
    The C' Euler product truncation error is reported under
    'C_Dpsi_prime_tail' (relative)."""
    if p_max < 1000:
        raise TruncationInsufficient("Euler product cutoff too small")
    # the character sum converges outright: a moderate cutoff is exact to
    # machine precision, and large X would only inflate the dense arrays
    l1chi = dirichlet_l_one(F, min(X, 1.0e5))
    zd2 = zeta_d_two(F)
    ram = ramified_sum_factor(src, F)
    c_dpsi = 2.0 * l1chi / zd2 * l_one_sym2(src, F, X) * ram

    sieve = np.ones(p_max + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(p_max)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    log_prod = 0.0
    for p in np.flatnonzero(sieve).tolist():
        if F.D % p == 0:
            continue
        th = vartheta(src, p)
        rd = r_D(F, p)
        chi = kronecker_chi(F, p)
        term = -2.0 * th * rd * p**-1.5 + 2.0 * th * rd * chi * p**-2.5 + p**-5.0
        if p <= 500:
            from .hecke import h_fn

            term += (3.0 * chi + h_fn(src, F, p * p, nmax_hint=1 << 12)) / p**3
        else:
            term += 3.0 * chi / p**3  # |h(p^2)| <= 6/p^{...}: negligible here
        log_prod += math.log1p(term)
    c_prime = math.exp(log_prod) * (1.0 - 1.0 / F.p1) ** 2 * (1.0 - 1.0 / F.p2) ** 2
    tail = 16.0 / (math.sqrt(p_max) * math.log(p_max))

    a_h = (
        _gl2_central(src, F, False)
        * _gl2_central(src, F, True)
        * math.pi
        * F.log_eps
        / (2.0 * F.D**2 * zd2 * l1chi)
        * ram
    )
    return {
        "C_Dpsi": c_dpsi,
        "C_Dpsi_prime": c_prime,
        "A_h": a_h,
        "C_Dpsi_prime_tail": tail,
    }


# ---------------------------------------------------------------------------
# Watson-Ichino assembly.


def nu_index(n: int) -> int:
    """nu(n) = n prod_{p|n} (1 + 1/p)."""
    from sympy import factorint

    v = n
    for p in factorint(n):
        v += v // p
    return v


def watson_ichino_mu2(
    F: FieldParams,
    src: HeckeSource,
    k: int,
    cfg: AfeConfig | None = None,
    l_half_cross: float | None = None,
    l_one_phi_val: float | None = None,
    l_sym2_val: float | None = None,
) -> float:
    """|mu_k(psi)|^2 assembled from completed L-values:
    1/(8 sqrt(D) nu(D/D1)) * La(1/2,psi) La(1/2,psi x chi_D) La(1/2,psi x phi_2k)
    / (La(1,sym2 psi) La(1,chi_D)^2 La(1,phi_2k)^2), with D1 = level of psi.

    Odd psi gives exactly 0. l_half_cross / l_one_phi_val / l_sym2_val
    optionally supply precomputed L(1/2, psi x phi_2k), L(1, phi_2k) and
    L(1, sym^2 psi) (bulk loops compute these once or at matched cutoffs)."""
    if src.parity == "odd":
        return 0.0
    if k == 0:
        raise PoleInput("k = 0 has no cuspidal dihedral form")
    if cfg is None:
        cfg = AfeConfig()
    D = F.D
    t = src.t_psi
    t2k = spectral_parameter(F, 2 * abs(k))
    ln_pi = math.log(math.pi)

    def log_gamma2(s: float, tpar: float) -> float:
        return -s * ln_pi + 2.0 * log_gamma((s + 1j * tpar) / 2.0).real

    # the archimedean factors of numerator and denominator individually
    # underflow (e^{-pi t_2k/2} scale) at large k: assemble the whole
    # ratio in log-magnitude space, tracking signs of the L-values
    if l_half_cross is None:
        l_half_cross = central_value(src, F, cfg, k)
    if l_sym2_val is None:
        l_sym2_val = l_one_sym2(src, F)
    if l_one_phi_val is None:
        l_one_phi_val = l_one_phi(F, 2 * abs(k))
    v_psi = _gl2_central(src, F, False, cfg)
    v_cross = _gl2_central(src, F, True, cfg)
    l_chi = dirichlet_l_one(F)
    finite = (v_psi, v_cross, l_half_cross, l_sym2_val, l_chi, l_one_phi_val)
    if any(v == 0.0 for v in finite):
        return 0.0
    sign = 1.0
    log_mag = 0.0
    for v in (v_psi, v_cross, l_half_cross):
        sign *= math.copysign(1.0, v)
        log_mag += math.log(abs(v))
    for v, mult_pow in ((l_sym2_val, 1), (l_chi, 2), (l_one_phi_val, 2)):
        sign *= math.copysign(1.0, v) ** mult_pow
        log_mag -= mult_pow * math.log(abs(v))
    # conductor powers: D^{1/4} D^{1/2} D^{3/4} / (D * D * D) / sqrt(D)
    log_mag += (0.25 + 0.5 + 0.75 - 1.0 - 1.0 - 1.0 - 0.5) * math.log(D)
    # gamma factors
    log_mag += 2.0 * log_gamma2(0.5, t)  # psi and psi x chi_D
    log_mag += -2.0 * 0.5 * ln_pi + sum(  # |gamma(1/2, psi x phi_2k)|
        log_gamma((0.5 + 1j * (e1 * t + e2 * t2k)) / 2.0).real
        for e1 in (1.0, -1.0)
        for e2 in (1.0, -1.0)
    )
    log_mag -= (
        -1.5 * ln_pi
        + 2.0 * log_gamma((1.0 + 2j * t) / 2.0).real
        + log_gamma(0.5).real
    )  # sym^2 at 1
    log_mag -= 2.0 * (-0.5 * ln_pi + log_gamma(0.5).real)  # chi_D at 1, squared
    log_mag -= 2.0 * log_gamma2(1.0, t2k)  # phi_2k at 1, squared
    d1 = src.level
    log_mag -= math.log(8.0 * nu_index(D // d1))
    return sign * math.exp(log_mag)
