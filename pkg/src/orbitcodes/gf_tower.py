"""Finite field tower F_p <= F_q <= F_{q^n} in discrete-log (Zech) form.

Nonzero elements are stored as their discrete logarithm ``i`` with respect to
a primitive element ``gamma`` (the root of the defining polynomial); the zero
element is the sentinel :data:`ZERO`. Multiplication, inversion and
projective classes are index arithmetic modulo ``q^n - 1``; addition goes
through the Zech table ``1 + gamma^i = gamma^Z(i)``.

The additive ("vector") form of an element is the integer whose base-``p``
digits are its coefficients in the polynomial basis ``1, gamma, ...,
gamma^(m-1)`` with ``m = e*n``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources
from typing import Iterator, Sequence

import numpy as np

from .exceptions import FieldError

ZERO = -1
"""Sentinel for the zero element in log form."""

MAX_ORDER = 1 << 24
POLY_TABLE_ENV = "ORBITCODES_POLY_TABLE"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    r = math.isqrt(p)
    return all(p % d for d in range(3, r + 1, 2))


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q = p^e``; raise :class:`FieldError` if ``q`` is not a prime power."""
    if q < 2:
        raise FieldError(f"q={q} is not a prime power")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise FieldError(f"q={q} is not a prime power")
    p = fs[0]
    e = round(math.log(q, p))
    if p**e != q:
        raise FieldError(f"q={q} is not a prime power")
    return p, e


# -- polynomials over F_p, coefficient lists low degree first ---------------


def _polymulmod(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    m = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    # f is monic
    for d in range(len(prod) - 1, m - 1, -1):
        c = prod[d]
        if c:
            for j in range(m + 1):
                prod[d - m + j] = (prod[d - m + j] - c * f[j]) % p
    return prod[:m] + [0] * (m - len(prod[:m]))


def _x_pow_mod(exponent: int, f: list[int], p: int) -> list[int]:
    m = len(f) - 1
    result = [1] + [0] * (m - 1)
    base = _polymulmod([0, 1], [1], f, p) if m > 1 else [(-f[0]) % p]
    while exponent:
        if exponent & 1:
            result = _polymulmod(result, base, f, p)
        base = _polymulmod(base, base, f, p)
        exponent >>= 1
    return result


def _monic(coeffs: Sequence[int], p: int) -> list[int]:
    c = [int(x) % p for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if len(c) < 2:
        raise FieldError("modulus must have degree >= 1")
    inv = pow(c[-1], p - 2, p)
    return [(x * inv) % p for x in c]


def is_primitive(coeffs: Sequence[int], p: int) -> bool:
    """True iff the polynomial is primitive over F_p.

    Checks that ``x`` has multiplicative order exactly ``p^m - 1`` modulo the
    polynomial, which also forces irreducibility.
    """
    f = _monic(coeffs, p)
    m = len(f) - 1
    if f[0] == 0:
        return False
    N = p**m - 1
    one = [1] + [0] * (m - 1)
    if _x_pow_mod(N, f, p) != one:
        return False
    return all(_x_pow_mod(N // r, f, p) != one for r in prime_factors(N))


def primitive_polynomials(p: int, m: int) -> Iterator[list[int]]:
    """Monic primitive polynomials of degree ``m`` over F_p in lexicographic order."""
    for code in range(1, p**m):
        low = [(code // p**j) % p for j in range(m)]
        if low[0] == 0:
            continue
        f = low + [1]
        if is_primitive(f, p):
            yield f


@lru_cache(maxsize=None)
def _poly_table() -> dict[str, list[int]]:
    path = os.environ.get(POLY_TABLE_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    text = resources.files("orbitcodes.data").joinpath("primitive_polys.json").read_text()
    return json.loads(text)


def default_modulus(p: int, m: int) -> list[int]:
    """Default primitive polynomial of degree ``m`` over F_p (table, else search)."""
    table = _poly_table()
    key = f"{p},{m}"
    if key in table:
        return list(table[key])
    return next(primitive_polynomials(p, m))


# -- field context -----------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """Parameters of the tower: ``q = p^e`` and the extension degree ``n``."""

    p: int
    e: int
    n: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def degree(self) -> int:
        return self.e * self.n

    def to_dict(self) -> dict:
        return {"p": self.p, "e": self.e, "n": self.n, "modulus": list(self.modulus)}

    @classmethod
    def from_dict(cls, d: dict) -> FieldSpec:
        return cls(int(d["p"]), int(d["e"]), int(d["n"]), tuple(int(c) for c in d["modulus"]))


def _divisors(n: int) -> list[int]:
    return [t for t in range(1, n + 1) if n % t == 0]


class FieldCtx:
    """Immutable exp/log/Zech tables for F_{q^n}, plus the subfield lattice over F_q."""

    def __init__(self, spec: FieldSpec, exp: np.ndarray, log: np.ndarray):
        self.spec = spec
        self.p, self.e, self.n = spec.p, spec.e, spec.n
        self.q = spec.q
        self.m = spec.degree
        self.order = self.p**self.m
        self.N = self.order - 1
        self.exp = exp
        self.log = log
        self.exp.setflags(write=False)
        self.log.setflags(write=False)
        self.divisors = _divisors(self.n)
        # cofactor (q^n-1)/(q^t-1): F_{q^t}^* = <gamma^cofactor>
        self.cofactors = {t: self.N // (self.q**t - 1) for t in self.divisors}

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, e={self.e}, n={self.n}, modulus={list(self.spec.modulus)})"

    def __reduce__(self):
        return (_ctx_from_spec, (self.spec,))

    @cached_property
    def zech(self) -> np.ndarray:
        """``zech[i] = log(1 + gamma^i)``, or ``ZERO`` when the sum vanishes."""
        v = self.exp
        if self.p == 2:
            w = v ^ 1
        else:
            w = np.where(v % self.p == self.p - 1, v - (self.p - 1), v + 1)
        z = self.log[w]
        z.setflags(write=False)
        return z

    @property
    def d(self) -> int:
        """Number of projective points ``(q^n-1)/(q-1)``."""
        return self.cofactors[1]

    # -- scalar arithmetic ---------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        if a == ZERO or b == ZERO:
            return ZERO
        return (a + b) % self.N

    def inv(self, a: int) -> int:
        if a == ZERO:
            raise ZeroDivisionError("inverse of zero")
        return (-a) % self.N

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == ZERO:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0 if k == 0 else ZERO
        return (a * k) % self.N

    def add(self, a: int, b: int) -> int:
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        z = int(self.zech[(a - b) % self.N])
        return ZERO if z == ZERO else (b + z) % self.N

    def neg(self, a: int) -> int:
        if a == ZERO or self.p == 2:
            return a
        return (a + self.N // 2) % self.N

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    # -- vectorized arithmetic on log arrays -----------------------------------

    def add_arrays(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        z = self.zech[(a - b) % self.N]
        out = np.where(z == ZERO, ZERO, (b + z) % self.N)
        out = np.where(a == ZERO, b, out)
        return np.where(b == ZERO, a, out)

    def mul_arrays(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.where((a == ZERO) | (b == ZERO), ZERO, (a + b) % self.N)

    # -- representations -------------------------------------------------------

    def to_vec(self, a: int) -> int:
        return 0 if a == ZERO else int(self.exp[a % self.N])

    def from_vec(self, v: int) -> int:
        if not 0 <= v < self.order:
            raise FieldError(f"vector {v} outside field of order {self.order}")
        return int(self.log[v])

    def from_poly(self, coeffs: Sequence[int]) -> int:
        """Element ``sum c_j gamma^j`` for F_p-coefficients (``len <= m``)."""
        if len(coeffs) > self.m:
            raise FieldError("too many coefficients")
        v = sum((int(c) % self.p) * self.p**j for j, c in enumerate(coeffs))
        return int(self.log[v])

    def digits(self, vecs) -> np.ndarray:
        """Base-p digit matrix (..., m) of vector-form integers."""
        vecs = np.asarray(vecs, dtype=np.int64)
        pw = self.p ** np.arange(self.m, dtype=np.int64)
        return (vecs[..., None] // pw) % self.p

    @cached_property
    def powers_of_p(self) -> np.ndarray:
        return self.p ** np.arange(self.m, dtype=np.int64)

    # -- subfields and projective classes -----------------------------------

    def _check_divisor(self, t: int) -> None:
        if t not in self.cofactors:
            raise FieldError(f"t={t} does not divide n={self.n}")

    def subfield_logs(self, t: int) -> np.ndarray:
        """Logs of the nonzero elements of F_{q^t}."""
        self._check_divisor(t)
        c = self.cofactors[t]
        return np.arange(0, self.N, c, dtype=np.int64)

    @cached_property
    def scalar_logs(self) -> np.ndarray:
        """Logs of F_q^*."""
        return self.subfield_logs(1)

    @cached_property
    def prime_scalar_logs(self) -> np.ndarray:
        """Logs of an F_p-basis ``1, zeta, ..., zeta^(e-1)`` of F_q."""
        zeta = self.cofactors[1]
        return np.array([(j * zeta) % self.N for j in range(self.e)], dtype=np.int64)

    def in_subfield(self, a: int, t: int) -> bool:
        self._check_divisor(t)
        return a == ZERO or a % self.cofactors[t] == 0

    def proj_class(self, a: int, t: int = 1) -> int:
        """Index of the class ``a F_{q^t}^*`` in ``[0, (q^n-1)/(q^t-1))``."""
        if a == ZERO:
            raise ValueError("zero has no projective class")
        self._check_divisor(t)
        return a % self.cofactors[t]

    def subfield_sizes(self) -> dict[int, int]:
        """``{t: |F_{q^t}|}`` counted from the tables, for every divisor t of n."""
        out = {}
        for t in self.divisors:
            c = self.cofactors[t]
            out[t] = 1 + int(np.count_nonzero(np.arange(self.N) % c == 0))
        return out


def isomorphism(src: FieldCtx, dst: FieldCtx) -> int:
    """Log ``j`` in ``dst`` of a root of ``src``'s modulus.

    ``gamma_src^i -> gamma_dst^(i*j)`` is then a field isomorphism; raises
    :class:`FieldError` if the fields differ or no root exists.
    """
    if (src.p, src.m) != (dst.p, dst.m):
        raise FieldError("fields of different order")
    N = dst.N
    js = np.arange(N, dtype=np.int64)
    acc = np.full(N, ZERO, dtype=np.int64)
    for i, c in enumerate(src.spec.modulus):
        if c == 0:
            continue
        term = (js * i + int(dst.log[c])) % N
        acc = dst.add_arrays(acc, term)
    roots = [int(j) for j in np.flatnonzero(acc == ZERO) if math.gcd(int(j), N) == 1]
    if not roots:
        raise FieldError("no primitive root of the source modulus in the target field")
    return roots[0]


def _build_tables(p: int, m: int, f: list[int]) -> tuple[np.ndarray, np.ndarray]:
    order = p**m
    N = order - 1
    exp = np.empty(N, dtype=np.int64)
    log = np.full(order, ZERO, dtype=np.int64)
    if p == 2:
        full = sum(c << j for j, c in enumerate(f))
        top = 1 << m
        v = 1
        for i in range(N):
            if log[v] != ZERO:
                raise FieldError("modulus is not primitive (root has order < p^m - 1)")
            exp[i] = v
            log[v] = i
            v <<= 1
            if v & top:
                v ^= full
    else:
        pw = [p**j for j in range(m)]
        d = [1] + [0] * (m - 1)
        low = f[:m]
        for i in range(N):
            v = sum(dj * w for dj, w in zip(d, pw))
            if v == 0 or log[v] != ZERO:
                raise FieldError("modulus is not primitive (root has order < p^m - 1)")
            exp[i] = v
            log[v] = i
            top = d[-1]
            d = [0] + d[:-1]
            if top:
                d = [(dj - top * fj) % p for dj, fj in zip(d, low)]
    if N and exp[0] != 1:
        raise FieldError("modulus is not primitive")
    return exp, log


def build_field(p: int, e: int, n: int, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Build F_{q^n}, q = p^e, from a primitive polynomial of degree ``e*n``.

    ``modulus`` is a coefficient list over F_p, low degree first. When omitted
    the default table entry is used; the polynomial actually used is recorded
    in ``ctx.spec.modulus``.
    """
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if e < 1 or n < 1:
        raise FieldError("e and n must be positive")
    m = e * n
    if p**m > MAX_ORDER:
        raise FieldError(f"field order {p}^{m} exceeds the cap 2^24")
    f = _monic(modulus, p) if modulus is not None else default_modulus(p, m)
    if len(f) - 1 != m:
        raise FieldError(f"modulus has degree {len(f) - 1}, expected {m}")
    if f[0] == 0:
        raise FieldError("modulus is reducible (divisible by x)")
    return _cached_field(FieldSpec(p, e, n, tuple(f)))


@lru_cache(maxsize=16)
def _cached_field(spec: FieldSpec) -> FieldCtx:
    exp, log = _build_tables(spec.p, spec.e * spec.n, list(spec.modulus))
    return FieldCtx(spec, exp, log)


def field_for(q: int, n: int, modulus: Sequence[int] | None = None) -> FieldCtx:
    """Convenience: build F_{q^n} from the prime power ``q``."""
    p, e = prime_power(q)
    return build_field(p, e, n, modulus)


def _ctx_from_spec(spec: FieldSpec) -> FieldCtx:
    return build_field(spec.p, spec.e, spec.n, spec.modulus)


def ctx_from_spec(spec: FieldSpec) -> FieldCtx:
    """Cached reconstruction, used by worker processes."""
    return _ctx_from_spec(spec)
