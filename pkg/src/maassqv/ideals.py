"""Principal ideals of Q(sqrt(D)) by norm, Grossencharacters, and the
dihedral eigenvalues lambda_k(n) = sum over ideals of norm n of Xi_k.

Enumeration scans the box of (m, n)-coordinates whose two real embeddings
are bounded by sqrt(norm)*eps, then dedupes through canonical_generator;
for a canonical-window generator both embeddings obey that bound, so the
scan is exhaustive.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ScanBoundExceeded
from .quadfield import FieldParams, QuadInt, angle, canonical_generator, norm

_SCAN_MAX = 10**7  # largest norm the box scan will attempt


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), all integers, via quadratic reciprocity."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    # factor out 2s: (a/2) = 0 for even a, +1 for a = +-1 mod 8, else -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            sign = -sign
    # Jacobi loop for odd n > 0
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        # reciprocity flip: both odd
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a, n = n % a, a
    return sign if n == 1 else 0


def kronecker_chi(F: FieldParams, n: int) -> int:
    """The real character chi_D(n) = (D/n)."""
    return kronecker(F.D, n)


def r_D(F: FieldParams, n: int) -> int:
    """Ideal-counting function sum_{d|n} chi_D(d)."""
    assert n >= 1
    total = 0
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            total += kronecker_chi(F, d)
            if d != n // d:
                total += kronecker_chi(F, n // d)
    return total


@dataclass(frozen=True)
class IdealRep:
    gen: QuadInt  # canonical generator, theta in [0, 2 log eps)
    norm_abs: int
    theta: float


@lru_cache(maxsize=32)
def _ideal_table(F: FieldParams, nmax: int) -> tuple[dict[int, tuple[IdealRep, ...]], ...]:
    """Map |norm| -> sorted tuple of canonical ideals, for all norms <= nmax."""
    if nmax > _SCAN_MAX:
        raise ScanBoundExceeded(f"norm bound {nmax} exceeds scan limit")
    eps_val = math.exp(F.log_eps)
    B = math.sqrt(nmax) * eps_val + 1e-9
    om = F.omega
    omc = (1.0 - F.sqrtD) / 2.0
    seen: set[tuple[int, int]] = set()
    table: dict[int, list[IdealRep]] = {}
    kmax = int((2 * B) / F.sqrtD) + 2
    for k in range(-kmax, kmax + 1):
        lo = max(-B - k * om, -B - k * omc)
        hi = min(B - k * om, B - k * omc)
        for m in range(math.ceil(lo), math.floor(hi) + 1):
            if m == 0 and k == 0:
                continue
            q = m * m + m * k + k * k * F.omega_norm
            if not 1 <= abs(q) <= nmax:
                continue
            c = canonical_generator(F, QuadInt(m, k))
            key = (c.m, c.n)
            if key in seen:
                continue
            seen.add(key)
            table.setdefault(abs(q), []).append(
                IdealRep(gen=c, norm_abs=abs(q), theta=angle(F, c))
            )
    for v in table.values():
        v.sort(key=lambda r: (r.theta, r.gen.m, r.gen.n))
    return ({n: tuple(v) for n, v in table.items()},)


def elements_of_norm(F: FieldParams, n: int, nmax_hint: int = 0) -> list[IdealRep]:
    """All distinct principal ideals with |N| = n, canonical representatives."""
    assert n >= 1
    bound = max(n, nmax_hint)
    # round the cache key up so nearby queries share one scan
    bound = 1 << max(bound - 1, 1).bit_length()
    (table,) = _ideal_table(F, bound)
    return list(table.get(n, ()))


def grossenchar(F: FieldParams, k: int, a: IdealRep) -> complex:
    """Xi_k(ideal) = e(k * theta / (2 log eps)), unit modulus."""
    return cmath.exp(1j * math.pi * k * a.theta / F.log_eps)


def lambda_k(F: FieldParams, k: int, n: int, nmax_hint: int = 0) -> float:
    """Dihedral Hecke eigenvalue: sum of Xi_k over ideals of norm n."""
    total = 0.0 + 0.0j
    for a in elements_of_norm(F, n, nmax_hint):
        total += grossenchar(F, k, a)
    assert abs(total.imag) <= 1e-9 * max(1.0, abs(total.real)) + 1e-9
    return total.real


def lambda_k_table(F: FieldParams, k: int, nmax: int) -> list[float]:
    """Dense table [lambda_k(0)..lambda_k(nmax)]; index 0 unused (0.0)."""
    (table,) = _ideal_table(F, 1 << max(nmax - 1, 1).bit_length())
    out = [0.0] * (nmax + 1)
    for n in range(1, nmax + 1):
        tot = 0.0 + 0.0j
        for a in table.get(n, ()):
            tot += grossenchar(F, k, a)
        out[n] = tot.real
    return out
