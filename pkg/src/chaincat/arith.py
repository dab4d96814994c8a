"""Exact arithmetic and canonical linear algebra over Z/p^e.

Everything here works on row vectors: a matrix ``a`` acts as ``x -> x @ a``
and "span" always means row span.  Public functions take and return
:class:`ResidueMatrix`; the underscore helpers operate on plain ``int64``
arrays and are what the rest of the package calls in hot loops.

Products of two residues must fit in a signed 64-bit word, so the modulus is
kept below ``2**31``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotAUnit

MAX_MODULUS = 2**31


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class ChainRing:
    """The finite chain ring Z/p^e."""

    __slots__ = ("p", "e", "modulus")

    def __init__(self, p: int, e: int):
        p, e = int(p), int(e)
        if p > 2**31 or not _is_prime(p):
            raise InputError(f"p={p} is not a prime <= 2^31")
        if e < 1:
            raise InputError(f"exponent e={e} must be >= 1")
        modulus = p**e
        if modulus >= MAX_MODULUS:
            raise InputError(f"p^e = {p}^{e} does not fit the 31-bit residue budget")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, name, value):
        raise AttributeError("ChainRing is immutable")

    def __eq__(self, other):
        return isinstance(other, ChainRing) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    def __repr__(self):
        return f"ChainRing(p={self.p}, e={self.e})"

    def __reduce__(self):
        return (ChainRing, (self.p, self.e))

    def valuation(self, x: int) -> int:
        return valuation(x, self)

    def unit_inverse(self, x: int) -> int:
        return unit_inverse(x, self)


def valuation(x: int, ring: ChainRing) -> int:
    """Largest k <= e with p^k | x; zero gets the maximum e."""
    x = int(x) % ring.modulus
    if x == 0:
        return ring.e
    k = 0
    while x % ring.p == 0:
        x //= ring.p
        k += 1
    return k


def unit_inverse(x: int, ring: ChainRing) -> int:
    x = int(x) % ring.modulus
    if x % ring.p == 0:
        raise NotAUnit(f"{x} is not a unit modulo {ring.modulus}")
    return pow(x, -1, ring.modulus)


def valuations(a: np.ndarray, ring: ChainRing, cap: int | None = None) -> np.ndarray:
    """Elementwise valuation of an integer array; zero maps to ``cap`` (default e)."""
    a = np.asarray(a, dtype=np.int64) % ring.modulus
    top = ring.e if cap is None else cap
    out = np.full(a.shape, top, dtype=np.int64)
    # iterate downward so the smallest k with p^(k+1) not dividing wins
    for k in range(min(top, ring.e) - 1, -1, -1):
        out[a % ring.p ** (k + 1) != 0] = k
    return out


@dataclass(frozen=True, eq=False)
class ResidueMatrix:
    """A dense matrix with entries reduced modulo p^e."""

    ring: ChainRing
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        if arr.ndim != 2:
            raise InputError("ResidueMatrix data must be two-dimensional")
        arr %= self.ring.modulus
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, ring: ChainRing, rows, cols: int | None = None) -> "ResidueMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(ring, np.zeros((0, cols or 0), dtype=np.int64))
        return cls(ring, np.array(rows, dtype=np.int64))

    @classmethod
    def identity(cls, ring: ChainRing, size: int) -> "ResidueMatrix":
        return cls(ring, np.eye(size, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def __eq__(self, other):
        if not isinstance(other, ResidueMatrix):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.ring, self.data.shape, self.data.tobytes()))

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        return ResidueMatrix(self.ring, matmul_mod(self.data, other.data, self.ring.modulus))

    def __repr__(self):
        return f"ResidueMatrix(mod {self.ring.modulus}, {self.tolist()})"


def as_rows(a, width: int) -> np.ndarray:
    """View ``a`` as a 2-d int64 array with ``width`` columns (width 0 allowed)."""
    a = np.asarray(a, dtype=np.int64)
    if width == 0:
        return np.zeros((a.shape[0] if a.ndim == 2 else 0, 0), dtype=np.int64)
    return a.reshape(-1, width)


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """``a @ b mod q`` without int64 overflow.

    Works for stacked (batched) operands as well.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner * (q - 1) ** 2 < 2**62:
        return (a @ b) % q
    return ((a.astype(object) @ b.astype(object)) % q).astype(np.int64)


# ---------------------------------------------------------------------------
# Howell form


def _howell(a: np.ndarray, ring: ChainRing) -> np.ndarray:
    q, p, e = ring.modulus, ring.p, ring.e
    a = np.asarray(a, dtype=np.int64)
    ncols = a.shape[1] if a.ndim == 2 else 0
    work = as_rows(a, ncols) % q
    work = work[np.any(work != 0, axis=1)]
    pivots: list[np.ndarray] = []
    pivot_cols: list[int] = []
    for c in range(ncols):
        if work.shape[0] == 0:
            break
        col = work[:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        vals = valuations(col[nz], ring)
        best = nz[int(np.argmin(vals))]
        k = int(vals.min())
        unit = int(col[best]) // p**k
        piv = (work[best] * pow(unit, -1, q)) % q
        others = nz[nz != best]
        rest_mask = np.ones(work.shape[0], dtype=bool)
        rest_mask[best] = False
        if others.size:
            factors = work[others, c] // p**k
            work[others] = (work[others] - factors[:, None] * piv[None, :]) % q
        extra = []
        if k > 0:
            extra.append((piv * p ** (e - k)) % q)
        work = work[rest_mask]
        if extra:
            work = np.vstack([work, np.array(extra, dtype=np.int64)])
        work = work[np.any(work != 0, axis=1)]
        pivots.append(piv)
        pivot_cols.append(c)
    if not pivots:
        return np.zeros((0, ncols), dtype=np.int64)
    h = np.array(pivots, dtype=np.int64)
    for j, c in enumerate(pivot_cols):
        if j == 0:
            continue
        pk = h[j, c]
        t = h[:j, c] // pk
        if np.any(t):
            h[:j] = (h[:j] - t[:, None] * h[j][None, :]) % q
    return h


def _pivot_cols(h: np.ndarray) -> np.ndarray:
    if h.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return np.argmax(h != 0, axis=1)


def _span_order_exponent(h: np.ndarray, ring: ChainRing) -> int:
    """log_p of the number of elements in the span of a Howell basis."""
    if h.shape[0] == 0:
        return 0
    piv = h[np.arange(h.shape[0]), _pivot_cols(h)]
    return int(np.sum(ring.e - valuations(piv, ring)))


def _coefficients(y: np.ndarray, h: np.ndarray, ring: ChainRing) -> tuple[np.ndarray, np.ndarray]:
    """Greedy coefficients of a batch of vectors against a Howell basis.

    Returns ``(c, residual)`` with ``y = c @ h + residual``; the residual is
    zero exactly when ``y`` lies in the span.
    """
    q = ring.modulus
    y = np.array(y, dtype=np.int64, copy=True) % q
    single = y.ndim == 1
    if single:
        y = y[None, :]
    c = np.zeros((y.shape[0], h.shape[0]), dtype=np.int64)
    for t, col in enumerate(_pivot_cols(h)):
        pk = int(h[t, col])
        ok = y[:, col] % pk == 0
        ct = np.where(ok, y[:, col] // pk, 0)
        c[:, t] = ct
        y = (y - ct[:, None] * h[t][None, :]) % q
    if single:
        return c[0], y[0]
    return c, y


def _normal_form(y: np.ndarray, h: np.ndarray, ring: ChainRing) -> np.ndarray:
    """Canonical representative of ``y`` modulo the span of a Howell basis."""
    q = ring.modulus
    y = np.array(y, dtype=np.int64, copy=True) % q
    single = y.ndim == 1
    if single:
        y = y[None, :]
    for t, col in enumerate(_pivot_cols(h)):
        pk = int(h[t, col])
        ct = y[:, col] // pk
        y = (y - ct[:, None] * h[t][None, :]) % q
    return y[0] if single else y


def _kernel(a: np.ndarray, ring: ChainRing) -> np.ndarray:
    """Howell basis of ``{x : x @ a = 0}``."""
    a = np.asarray(a, dtype=np.int64) % ring.modulus
    m, c = a.shape
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.hstack([a, np.eye(m, dtype=np.int64)])
    h = _howell(aug, ring)
    pc = _pivot_cols(h)
    kern = h[pc >= c, c:]
    return _howell(kern, ring)


def _solve(a: np.ndarray, b: np.ndarray, ring: ChainRing) -> np.ndarray | None:
    q = ring.modulus
    a = np.asarray(a, dtype=np.int64) % q
    b = np.asarray(b, dtype=np.int64) % q
    m, c = a.shape
    if m == 0:
        return np.zeros(0, dtype=np.int64) if not np.any(b) else None
    aug = np.hstack([a, np.eye(m, dtype=np.int64)])
    h = _howell(aug, ring)
    v = np.concatenate([b, np.zeros(m, dtype=np.int64)])
    for t, col in enumerate(_pivot_cols(h)):
        if col >= c:
            break
        pk = int(h[t, col])
        if v[col] % pk:
            return None
        v = (v - (v[col] // pk) * h[t]) % q
    if np.any(v[:c]):
        return None
    return (-v[c:]) % q


def _smith(r: np.ndarray, ring: ChainRing, size: int):
    """Smith form of the relation rows ``r`` acting on (Z/q)^size.

    Returns ``(exps, Q, Qinv)``: the quotient (Z/q)^size / span(r) is the sum
    of Z/p^exps[i], coordinate ``i`` of a vector ``c`` being ``(c @ Q)[i]``.
    """
    q, p, e = ring.modulus, ring.p, ring.e
    work = as_rows(r, size) % q
    Q = np.eye(size, dtype=np.int64)
    Qinv = np.eye(size, dtype=np.int64)
    diag: list[int] = []
    t = 0
    while t < min(work.shape[0], size):
        sub = work[t:, t:]
        if not np.any(sub):
            break
        vals = valuations(sub, ring, cap=e + 1)
        i, j = np.unravel_index(int(np.argmin(vals)), sub.shape)
        i, j = i + t, j + t
        k = int(vals[i - t, j - t])
        work[[t, i]] = work[[i, t]]
        work[:, [t, j]] = work[:, [j, t]]
        Q[:, [t, j]] = Q[:, [j, t]]
        Qinv[[t, j]] = Qinv[[j, t]]
        unit = int(work[t, t]) // p**k
        work[t] = (work[t] * pow(unit, -1, q)) % q
        pk = p**k
        below = work[t + 1 :, t] // pk
        work[t + 1 :] = (work[t + 1 :] - below[:, None] * work[t][None, :]) % q
        right = work[t, t + 1 :] // pk
        for s_off, f in enumerate(right.tolist()):
            if f == 0:
                continue
            s = t + 1 + s_off
            work[:, s] = (work[:, s] - f * work[:, t]) % q
            Q[:, s] = (Q[:, s] - f * Q[:, t]) % q
            Qinv[t] = (Qinv[t] + f * Qinv[s]) % q
        diag.append(k)
        t += 1
    exps = diag + [e] * (size - len(diag))
    return exps, Q, Qinv


# ---------------------------------------------------------------------------
# public wrappers


def howell_form(m: ResidueMatrix) -> ResidueMatrix:
    """Canonical Howell basis of the row span of ``m`` (no zero rows)."""
    return ResidueMatrix(m.ring, as_rows(_howell(m.data, m.ring), m.cols))


def solve_kernel(a: ResidueMatrix) -> ResidueMatrix:
    """Howell basis of the left kernel ``{x : x @ a = 0}``."""
    k = _kernel(a.data, a.ring)
    return ResidueMatrix(a.ring, as_rows(k, a.rows))


def solve_particular(a: ResidueMatrix, b) -> np.ndarray | None:
    """Some ``x`` with ``x @ a = b``, or ``None`` when there is none."""
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if b.shape[0] != a.cols:
        raise InputError(f"right-hand side has length {b.shape[0]}, expected {a.cols}")
    return _solve(a.data, b, a.ring)


def span_order(m: ResidueMatrix) -> int:
    """Number of elements in the row span of ``m``."""
    h = _howell(m.data, m.ring)
    return m.ring.p ** _span_order_exponent(h, m.ring)
