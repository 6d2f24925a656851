"""Exact Gaussian-integer scalars, vectors and matrices.

Vectors and matrices keep their real and imaginary parts in two numpy arrays of
``dtype=object`` holding Python ints, so every product is arbitrary precision and
nothing is ever rounded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_GAUSS_RE = re.compile(r"^\s*([+-]?\d+)\s*([+-])\s*(\d*)\s*i\s*$")
_INT_RE = re.compile(r"^\s*[+-]?\d+\s*$")
_IMAG_RE = re.compile(r"^\s*([+-]?)\s*(\d*)\s*i\s*$")


class DimensionError(ValueError):
    pass


class NotSelfAdjointError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class GaussianInt:
    re: int = 0
    im: int = 0

    def __post_init__(self):
        # accept numpy ints etc. but always store Python ints
        object.__setattr__(self, "re", int(self.re))
        object.__setattr__(self, "im", int(self.im))

    @classmethod
    def coerce(cls, z) -> GaussianInt:
        if isinstance(z, GaussianInt):
            return z
        if isinstance(z, str):
            return parse_gauss(z)
        if isinstance(z, complex):
            if z.real != int(z.real) or z.imag != int(z.imag):
                raise ValueError(f"{z!r} is not a Gaussian integer")
            return cls(int(z.real), int(z.imag))
        return cls(int(z), 0)

    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussianInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussianInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussianInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers leave the Gaussian integers")
        out, base = GaussianInt(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __complex__(self):
        return complex(self.re, self.im)

    def conj(self) -> GaussianInt:
        return GaussianInt(self.re, -self.im)

    def norm2(self) -> int:
        """|z|^2 as an ordinary (nonnegative) integer."""
        return self.re * self.re + self.im * self.im

    def exact_div(self, other) -> GaussianInt:
        """Quotient in Z[i]; raises ArithmeticError when it is not a Gaussian integer."""
        o = GaussianInt.coerce(other)
        d = o.norm2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian integer")
        num = self * o.conj()
        if num.re % d or num.im % d:
            raise ArithmeticError(f"{self} is not divisible by {o} in Z[i]")
        return GaussianInt(num.re // d, num.im // d)

    def __str__(self):
        return format_gauss(self)

    def __repr__(self):
        return f"GaussianInt({self.re}, {self.im})"


def _maybe(x):
    if isinstance(x, GaussianInt):
        return x
    if isinstance(x, (int, np.integer)):
        return GaussianInt(int(x), 0)
    return None


I = GaussianInt(0, 1)
UNITS = (GaussianInt(1), GaussianInt(-1), GaussianInt(0, 1), GaussianInt(0, -1))


def parse_gauss(s: str) -> GaussianInt:
    """Parse ``"a+bi"`` / ``"a-bi"``; ``"a"``, ``"bi"`` and a missing unit ``"1-i"`` are also accepted."""
    m = _GAUSS_RE.match(s)
    if m:
        im = int(m.group(3) or 1)
        return GaussianInt(int(m.group(1)), im if m.group(2) == "+" else -im)
    if _INT_RE.match(s):
        return GaussianInt(int(s), 0)
    m = _IMAG_RE.match(s)
    if m:
        im = int(m.group(2) or 1)
        return GaussianInt(0, -im if m.group(1) == "-" else im)
    raise ValueError(f"cannot parse Gaussian integer from {s!r}")


def format_gauss(z: GaussianInt) -> str:
    return f"{z.re}{'+' if z.im >= 0 else '-'}{abs(z.im)}i"


def _obj(a) -> np.ndarray:
    out = np.empty(np.shape(a), dtype=object)
    flat = np.asarray(a, dtype=object).ravel()
    out.ravel()[:] = [int(x) for x in flat] if flat.size else []
    return out


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _split_entries(entries) -> tuple[list, list]:
    zs = [GaussianInt.coerce(z) for z in entries]
    return [z.re for z in zs], [z.im for z in zs]


class GaussVector:
    """Immutable vector over Z[i]."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        re = _obj(re)
        im = np.zeros(re.shape, dtype=object) if im is None else _obj(im)
        if re.ndim != 1 or re.shape != im.shape:
            raise DimensionError("vector parts must be 1-D and of equal length")
        self.re = _freeze(re)
        self.im = _freeze(im)

    @classmethod
    def of(cls, entries: Iterable) -> GaussVector:
        r, i = _split_entries(entries)
        return cls(r, i)

    @classmethod
    def zeros(cls, dim: int) -> GaussVector:
        return cls([0] * dim, [0] * dim)

    @classmethod
    def basis(cls, dim: int, k: int) -> GaussVector:
        r = [0] * dim
        r[k] = 1
        return cls(r)

    def __len__(self):
        return self.re.shape[0]

    @property
    def dim(self) -> int:
        return len(self)

    def __getitem__(self, k) -> GaussianInt:
        return GaussianInt(self.re[k], self.im[k])

    def __iter__(self):
        return (GaussianInt(a, b) for a, b in zip(self.re, self.im))

    def _check(self, other: GaussVector):
        if len(self) != len(other):
            raise DimensionError(f"dimension mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other: GaussVector) -> GaussVector:
        self._check(other)
        return GaussVector(self.re + other.re, self.im + other.im)

    def __sub__(self, other: GaussVector) -> GaussVector:
        self._check(other)
        return GaussVector(self.re - other.re, self.im - other.im)

    def __neg__(self) -> GaussVector:
        return GaussVector(-self.re, -self.im)

    def scale(self, z) -> GaussVector:
        z = GaussianInt.coerce(z)
        return GaussVector(z.re * self.re - z.im * self.im, z.re * self.im + z.im * self.re)

    def __rmul__(self, z) -> GaussVector:
        return self.scale(z)

    def conj(self) -> GaussVector:
        return GaussVector(self.re, -self.im)

    def vdot(self, other: GaussVector) -> GaussianInt:
        """Sum of conj(self_a) * other_a."""
        self._check(other)
        r = int(np.dot(self.re, other.re) + np.dot(self.im, other.im)) if len(self) else 0
        i = int(np.dot(self.re, other.im) - np.dot(self.im, other.re)) if len(self) else 0
        return GaussianInt(r, i)

    def is_zero(self) -> bool:
        return not any(self.re) and not any(self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussVector):
            return NotImplemented
        return len(self) == len(other) and all(self.re == other.re) and all(self.im == other.im)

    def __hash__(self):
        return hash((tuple(self.re), tuple(self.im)))

    def to_complex(self) -> np.ndarray:
        return self.re.astype(float) + 1j * self.im.astype(float)

    def to_strings(self) -> list[str]:
        return [format_gauss(z) for z in self]

    def __repr__(self):
        return f"GaussVector([{', '.join(self.to_strings())}])"


class GaussMatrix:
    """Immutable dense square matrix over Z[i]."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        re = _obj(re)
        im = np.zeros(re.shape, dtype=object) if im is None else _obj(im)
        if re.ndim != 2 or re.shape[0] != re.shape[1] or re.shape != im.shape:
            raise DimensionError("matrix must be square with matching real/imaginary parts")
        self.re = _freeze(re)
        self.im = _freeze(im)

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> GaussMatrix:
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionError("matrix rows must have equal length matching row count")
        r, i = _split_entries([z for row in rows for z in row])
        return cls(np.reshape(np.array(r, dtype=object), (n, n)), np.reshape(np.array(i, dtype=object), (n, n)))

    @classmethod
    def identity(cls, dim: int) -> GaussMatrix:
        r = np.zeros((dim, dim), dtype=object)
        for k in range(dim):
            r[k, k] = 1
        return cls(r)

    @classmethod
    def zeros(cls, dim: int) -> GaussMatrix:
        return cls(np.zeros((dim, dim), dtype=object))

    @classmethod
    def diag(cls, entries) -> GaussMatrix:
        zs = [GaussianInt.coerce(z) for z in entries]
        n = len(zs)
        r = np.zeros((n, n), dtype=object)
        i = np.zeros((n, n), dtype=object)
        for k, z in enumerate(zs):
            r[k, k], i[k, k] = z.re, z.im
        return cls(r, i)

    @property
    def dim(self) -> int:
        return self.re.shape[0]

    def __getitem__(self, idx) -> GaussianInt:
        a, b = idx
        return GaussianInt(self.re[a, b], self.im[a, b])

    def _check(self, other: GaussMatrix):
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: GaussMatrix) -> GaussMatrix:
        self._check(other)
        return GaussMatrix(self.re + other.re, self.im + other.im)

    def __sub__(self, other: GaussMatrix) -> GaussMatrix:
        self._check(other)
        return GaussMatrix(self.re - other.re, self.im - other.im)

    def __neg__(self) -> GaussMatrix:
        return GaussMatrix(-self.re, -self.im)

    def scale(self, z) -> GaussMatrix:
        z = GaussianInt.coerce(z)
        return GaussMatrix(z.re * self.re - z.im * self.im, z.re * self.im + z.im * self.re)

    def __rmul__(self, z) -> GaussMatrix:
        return self.scale(z)

    def __matmul__(self, other):
        if isinstance(other, GaussVector):
            return mat_apply(self, other)
        if not isinstance(other, GaussMatrix):
            return NotImplemented
        self._check(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussMatrix(a @ c - b @ d, a @ d + b @ c)

    def __pow__(self, k: int) -> GaussMatrix:
        out, base = GaussMatrix.identity(self.dim), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def dagger(self) -> GaussMatrix:
        return GaussMatrix(self.re.T.copy(), (-self.im).T.copy())

    def transpose(self) -> GaussMatrix:
        return GaussMatrix(self.re.T.copy(), self.im.T.copy())

    def is_zero(self) -> bool:
        return not self.re.any() and not self.im.any()

    def __eq__(self, other):
        if not isinstance(other, GaussMatrix):
            return NotImplemented
        return self.dim == other.dim and bool((self.re == other.re).all() and (self.im == other.im).all())

    def __hash__(self):
        return hash((tuple(self.re.ravel()), tuple(self.im.ravel())))

    def to_complex(self) -> np.ndarray:
        return self.re.astype(float) + 1j * self.im.astype(float)

    def to_strings(self) -> list[list[str]]:
        return [[format_gauss(self[a, b]) for b in range(self.dim)] for a in range(self.dim)]

    def __repr__(self):
        return f"GaussMatrix({self.to_strings()})"


def mat_apply(M: GaussMatrix, v: GaussVector) -> GaussVector:
    if M.dim != len(v):
        raise DimensionError(f"matrix of dim {M.dim} applied to vector of length {len(v)}")
    if M.dim == 0:
        return GaussVector([])
    return GaussVector(M.re @ v.re - M.im @ v.im, M.re @ v.im + M.im @ v.re)


def is_self_adjoint(M: GaussMatrix) -> bool:
    return bool((M.re == M.re.T).all() and (M.im == -M.im.T).all())


def commutes(G: GaussMatrix, H: GaussMatrix) -> bool:
    if G.dim != H.dim:
        raise DimensionError(f"dimension mismatch: {G.dim} vs {H.dim}")
    return (G @ H - H @ G).is_zero()


def polynomial(H: GaussMatrix, coeffs: Sequence) -> GaussMatrix:
    """sum_k coeffs[k] * H^k, evaluated by Horner's rule."""
    out = GaussMatrix.zeros(H.dim)
    for c in reversed(list(coeffs)):
        out = out @ H + GaussMatrix.identity(H.dim).scale(c)
    return out


def det(M: GaussMatrix) -> GaussianInt:
    """Exact determinant by fraction-free (Bareiss) elimination over Z[i]."""
    n = M.dim
    a = [[M[r, c] for c in range(n)] for r in range(n)]
    sign, prev = 1, GaussianInt(1)
    for k in range(n - 1):
        if not a[k][k]:
            piv = next((r for r in range(k + 1, n) if a[r][k]), None)
            if piv is None:
                return GaussianInt(0)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[r][c] = (a[r][c] * a[k][k] - a[r][k] * a[k][c]).exact_div(prev)
        prev = a[k][k]
    if n == 0:
        return GaussianInt(1)
    return a[n - 1][n - 1] * sign


@dataclass(frozen=True)
class HamiltonianSpec:
    """Self-adjoint H together with its split H = h_S + i h_A."""

    H: GaussMatrix
    h_S: np.ndarray
    h_A: np.ndarray

    @property
    def dim(self) -> int:
        return self.H.dim

    def recombine(self) -> GaussMatrix:
        return GaussMatrix(self.h_S, self.h_A)

    def to_complex(self) -> np.ndarray:
        return self.H.to_complex()


def split_hamiltonian(H: GaussMatrix) -> HamiltonianSpec:
    if not is_self_adjoint(H):
        raise NotSelfAdjointError("Hamiltonian must equal its conjugate transpose")
    h_S = _freeze(H.re.copy())
    h_A = _freeze(H.im.copy())
    return HamiltonianSpec(H, h_S, h_A)


def as_hamiltonian(H) -> HamiltonianSpec:
    if isinstance(H, HamiltonianSpec):
        return H
    if not isinstance(H, GaussMatrix):
        H = GaussMatrix.of(H)
    return split_hamiltonian(H)
