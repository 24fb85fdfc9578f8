"""Hecke eigenvalue sources for the fixed even newform psi of level D with
trivial nebentypus, plus the multiplicative functions built on top of them:
the local series L(s, p^b) and its closed form, vartheta = L(1, .), the
ideal-weighted h, the sieve weight g, and the short Moebius-type mu_2k.

Sources are either table-backed (one lambda_psi(p) per prime, extended by
the Hecke recursion) or synthetic: lambda_psi(p) = 2 cos(theta_p) with
theta_p uniform in [0, pi] for p not dividing D, and lambda_psi(p) =
+-p^{-1/2} with lambda(p^b) = lambda(p)^b at the two ramified primes.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from sympy import factorint, isprime

from .errors import (
    DivergentDenominator,
    MalformedTable,
    MissingPrime,
    ScanBoundExceeded,
)
from .ideals import elements_of_norm, kronecker_chi, lambda_k
from .lattice import n_beta
from .quadfield import FieldParams


def _chi0(D: int, p: int) -> int:
    """Principal character mod D at p."""
    return 0 if D % p == 0 else 1


@dataclass
class HeckeSource:
    level: int  # = D
    t_psi: float
    eta_D: int  # Atkin-Lehner eigenvalue in {-1, +1}
    parity: str  # "even" | "odd"
    prime_values: dict[int, float]  # p -> lambda_psi(p); None-backed if synthetic
    seed: int | None = None  # synthetic mode when not None
    _pp_cache: dict[tuple[int, int], float] = field(default_factory=dict, repr=False)
    _n_cache: dict[int, float] = field(default_factory=dict, repr=False)

    def lambda_p(self, p: int) -> float:
        if p in self.prime_values:
            return self.prime_values[p]
        if self.seed is None:
            raise MissingPrime(f"p={p} beyond table range")
        v = _synthetic_lambda_p(self.seed, self.level, p)
        self.prime_values[p] = v
        return v

    def lambda_pp(self, p: int, b: int) -> float:
        """lambda_psi(p^b) by the Hecke recursion (ramified: power model)."""
        if b < 0:
            return 0.0
        if b == 0:
            return 1.0
        key = (p, b)
        if key in self._pp_cache:
            return self._pp_cache[key]
        lp = self.lambda_p(p)
        if self.level % p == 0:
            v = lp**b
        else:
            prev2, prev1 = 1.0, lp
            for _ in range(b - 1):
                prev2, prev1 = prev1, lp * prev1 - prev2
            v = prev1
        self._pp_cache[key] = v
        return v


def _synthetic_lambda_p(seed: int, D: int, p: int) -> float:
    h = hashlib.sha256(f"{seed}:{p}".encode()).digest()
    u = int.from_bytes(h[:8], "big") / 2**64  # uniform [0,1)
    if D % p == 0:
        return (1.0 if u < 0.5 else -1.0) / math.sqrt(p)
    return 2.0 * math.cos(math.pi * u)


def make_source(
    *,
    table: str | None = None,
    synthetic: int | None = None,
    D: int | None = None,
    t_psi: float = 1.0,
    eta: int = 1,
    parity: str = "even",
) -> HeckeSource:
    if (table is None) == (synthetic is None):
        raise ValueError("exactly one of table=, synthetic= required")
    if table is not None:
        return read_table(table)
    assert D is not None
    return HeckeSource(
        level=D, t_psi=t_psi, eta_D=eta, parity=parity,
        prime_values={}, seed=synthetic,
    )


def read_table(path: str) -> HeckeSource:
    header = None
    values: dict[int, float] = {}
    last_p = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header is None:
                    header = line
                continue
            parts = line.split()
            if len(parts) != 2:
                raise MalformedTable(f"{path}:{lineno}: need '<prime> <lambda>'")
            try:
                p, lam = int(parts[0]), float(parts[1])
            except ValueError as exc:
                raise MalformedTable(f"{path}:{lineno}: {exc}") from exc
            if not isprime(p):
                raise MalformedTable(f"{path}:{lineno}: {p} is not prime")
            if p <= last_p:
                raise MalformedTable(f"{path}:{lineno}: primes must ascend")
            last_p = p
            values[p] = lam
    if header is None:
        raise MalformedTable(f"{path}: missing header line")
    meta: dict[str, str] = {}
    for tok in header.lstrip("#").split():
        if "=" not in tok:
            raise MalformedTable(f"{path}: bad header token {tok!r}")
        k, v = tok.split("=", 1)
        meta[k] = v
    try:
        return HeckeSource(
            level=int(meta["D"]),
            t_psi=float(meta["t_psi"]),
            eta_D={"+1": 1, "1": 1, "-1": -1}[meta["eta"]],
            parity=meta["parity"],
            prime_values=values,
        )
    except KeyError as exc:
        raise MalformedTable(f"{path}: header missing {exc}") from exc


def write_table(src: HeckeSource, path: str, pmax: int) -> None:
    from sympy import primerange

    eta = "+1" if src.eta_D > 0 else "-1"
    with open(path, "w") as fh:
        fh.write(f"# D={src.level} t_psi={src.t_psi!r} eta={eta} parity={src.parity}\n")
        for p in primerange(2, pmax + 1):
            fh.write(f"{p} {src.lambda_p(p):.17g}\n")


def lambda_psi(src: HeckeSource, n: int) -> float:
    """Multiplicative extension; lambda(-n) = lambda(n), lambda(0) = 0."""
    n = abs(n)
    if n == 0:
        return 0.0
    if n == 1:
        return 1.0
    v = src._n_cache.get(n)
    if v is None:
        v = 1.0
        for p, b in factorint(n).items():
            v *= src.lambda_pp(p, b)
        src._n_cache[n] = v
    return v


def lambda_psi_at(src: HeckeSource, x: float) -> float:
    """lambda_psi extended by zero off the integers."""
    r = round(x)
    if abs(x - r) > 1e-9:
        return 0.0
    return lambda_psi(src, r)


def local_series(
    src: HeckeSource, s: complex, p: int, b: int, J: int = 60
) -> tuple[complex, complex]:
    """(closed, truncated) for the local ratio
    sum_j lambda(p^{b+2j}) p^{-js} / sum_j lambda(p^{2j}) p^{-js}."""
    assert J >= 1
    chi0 = _chi0(src.level, p)
    ps = p ** (-s)
    if b == 0:
        closed = 1.0 + 0.0j  # numerator and denominator series coincide
    else:
        closed = (src.lambda_pp(p, b) - chi0 * src.lambda_pp(p, b - 2) * ps) / (
            1 + chi0 * ps
        )
    num = sum(src.lambda_pp(p, b + 2 * j) * ps**j for j in range(J + 1))
    den = sum(src.lambda_pp(p, 2 * j) * ps**j for j in range(J + 1))
    if abs(den) < 1e-12:
        raise DivergentDenominator(f"local denominator ~0 at p={p}, s={s}")
    return closed, num / den


def vartheta(src: HeckeSource, n: int) -> float:
    """Multiplicative; local value = closed local series at s=1."""
    assert n >= 1
    v = 1.0
    for p, b in factorint(n).items():
        chi0 = _chi0(src.level, p)
        v *= (src.lambda_pp(p, b) - chi0 * src.lambda_pp(p, b - 2) / p) / (
            1 + chi0 / p
        )
    return v


def h_fn(src: HeckeSource, F: FieldParams, n: int, nmax_hint: int = 0) -> float:
    """sum over principal ideals of norm n of vartheta(|n_beta|)/sqrt(|n_beta|)."""
    assert n >= 1
    total = 0.0
    for rep in elements_of_norm(F, n, nmax_hint):
        _, nb = n_beta(F, rep.gen)
        total += vartheta(src, nb) / math.sqrt(nb)
    return total


def g_fn(src: HeckeSource, F: FieldParams, n: int) -> float:
    """Multiplicative sieve weight: g(p) = -2h(p), g(p^2) = 3chi(p)+h(p^2),
    g(p^3) = -2chi(p)h(p), g(p^4) = chi(p)^2, zero on higher powers."""
    assert n >= 1
    v = 1.0
    for p, b in factorint(n).items():
        chi = kronecker_chi(F, p)
        if b == 1:
            v *= -2.0 * h_fn(src, F, p)
        elif b == 2:
            v *= 3.0 * chi + h_fn(src, F, p * p)
        elif b == 3:
            v *= -2.0 * chi * h_fn(src, F, p)
        elif b == 4:
            v *= float(chi * chi)
        else:
            return 0.0
    return v


def mu_2k(F: FieldParams, k: int, n: int, nmax_hint: int = 0) -> float:
    """mu_2k(p) = -lambda_2k(p), mu_2k(p^2) = chi_D(p), zero on cubes."""
    assert n >= 1
    v = 1.0
    for p, b in factorint(n).items():
        if b == 1:
            v *= -lambda_k(F, 2 * k, p, nmax_hint)
        elif b == 2:
            v *= kronecker_chi(F, p)
        else:
            return 0.0
    return v


def mu_2k_closed(F: FieldParams, k: int, n: int, nmax_hint: int = 0) -> float:
    """Closed form: for n = r^2 s with s squarefree,
    chi_D(r) mu^2(r) mu(s) lambda_2k(s) when (r, s) = 1, else 0."""
    assert n >= 1
    r = 1
    s = 1
    mob_s = 1
    sqfree_r = True
    for p, b in factorint(n).items():
        if b % 2 == 1:
            s *= p
            mob_s = -mob_s
            if b > 1:
                return 0.0  # p | r and p | s
        else:
            r *= p ** (b // 2)
            if b // 2 > 1 or b > 2:
                sqfree_r = False
    if not sqfree_r:
        return 0.0
    return kronecker_chi(F, r) * mob_s * lambda_k(F, 2 * k, s, nmax_hint)


def satake_square(src: HeckeSource, F: FieldParams, k: int, p: int) -> float:
    """Second coefficient of the Rankin-Selberg local factor:
    (lambda_psi(p^2) - 1)(lambda_4k(p) + 1 - chi_D(p))."""
    return (src.lambda_pp(p, 2) - 1.0) * (
        lambda_k(F, 4 * k, p) + 1.0 - kronecker_chi(F, p)
    )
