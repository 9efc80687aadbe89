"""Exact-coefficient arithmetic for mappings C^n -> C^n truncated at total degree 4.

Series coefficients are stored densely per total degree, with the monomials of
each degree enumerated in graded-lexicographic order (ascending exponent
tuples within a degree).  The truncation order is fixed at 4: the deepest
consumer of the algebra is the fourth homogeneous block, and a fixed order
keeps the matrix-inversion recursion closed-form.

All types are immutable after construction and all operations are pure
functions, so values are safe to share across threads.
"""

from __future__ import annotations

from functools import lru_cache
from numbers import Number

import numpy as np

from . import kernels

ORDER = 4


def _compositions(total, n):
    if n == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, n - 1):
            yield (first,) + rest


class _Basis:
    """Monomial bookkeeping for one ambient dimension.

    Holds the graded monomial bases together with the index tables used by
    products, derivatives and monomial-value recursions.  Instances are cached
    per dimension and treated as read-only.
    """

    def __init__(self, n):
        self.n = n
        self.exponents = []
        self.index = {}
        for d in range(ORDER + 1):
            tuples = sorted(_compositions(d, n))
            self.exponents.append(tuples)
            for i, e in enumerate(tuples):
                self.index[e] = (d, i)
        self.sizes = [len(t) for t in self.exponents]
        self.expo = [
            np.array(self.exponents[d], dtype=np.int32).reshape(self.sizes[d], n)
            for d in range(ORDER + 1)
        ]
        # prod[(d1, d2)][i, j] = position of exponent sum inside degree d1+d2
        self.prod = {}
        for d1 in range(ORDER + 1):
            for d2 in range(ORDER + 1 - d1):
                tab = np.empty((self.sizes[d1], self.sizes[d2]), dtype=np.int32)
                for i, e1 in enumerate(self.exponents[d1]):
                    for j, e2 in enumerate(self.exponents[d2]):
                        s = tuple(a + b for a, b in zip(e1, e2))
                        tab[i, j] = self.index[s][1]
                self.prod[(d1, d2)] = tab
        # diff[d][v] maps degree-d coefficients to the degree-(d-1)
        # coefficients of the v-th partial derivative (dense matmul)
        self.diff = [None]
        for d in range(1, ORDER + 1):
            per_var = []
            for v in range(n):
                mat = np.zeros((self.sizes[d - 1], self.sizes[d]))
                for i, e in enumerate(self.exponents[d]):
                    if e[v] > 0:
                        t = e[:v] + (e[v] - 1,) + e[v + 1:]
                        mat[self.index[t][1], i] = float(e[v])
                per_var.append(mat)
            self.diff.append(per_var)
        # rec[d][i] = (variable v, parent position in degree d-1) with v the
        # lowest variable of positive exponent; used to build monomial values
        self.rec = [None]
        for d in range(1, ORDER + 1):
            pairs = []
            for e in self.exponents[d]:
                v = next(k for k, ek in enumerate(e) if ek > 0)
                parent = e[:v] + (e[v] - 1,) + e[v + 1:]
                pairs.append((v, self.index[parent][1]))
            self.rec.append(pairs)


@lru_cache(maxsize=None)
def basis(n):
    if n < 1:
        raise ValueError(f"ambient dimension must be >= 1, got {n}")
    return _Basis(n)


def _frozen(arr):
    arr.setflags(write=False)
    return arr


def monomial_values(n, point):
    """Values of every monomial of degree 0..4 at one point, per degree."""
    b = basis(n)
    vals = [np.ones(1, dtype=np.complex128)]
    for d in range(1, ORDER + 1):
        cur = np.empty(b.sizes[d], dtype=np.complex128)
        for i, (v, parent) in enumerate(b.rec[d]):
            cur[i] = point[v] * vals[d - 1][parent]
        vals.append(cur)
    return vals


def monomial_values_batch(n, points):
    """Same as :func:`monomial_values` for a batch of points of shape (S, n)."""
    b = basis(n)
    pts = np.asarray(points, dtype=np.complex128)
    vals = [np.ones((pts.shape[0], 1), dtype=np.complex128)]
    for d in range(1, ORDER + 1):
        cur = np.empty((pts.shape[0], b.sizes[d]), dtype=np.complex128)
        for i, (v, parent) in enumerate(b.rec[d]):
            cur[:, i] = pts[:, v] * vals[d - 1][:, parent]
        vals.append(cur)
    return vals


class ScalarSeries:
    """One component of a mapping: a polynomial in n variables, degree <= 4."""

    __slots__ = ("n", "parts", "nz")

    def __init__(self, n, parts):
        self.n = n
        self.parts = tuple(_frozen(np.asarray(p, dtype=np.complex128)) for p in parts)
        self.nz = tuple(bool(p.any()) for p in self.parts)

    @classmethod
    def _trusted(cls, n, parts, nz=None):
        # internal: parts are freshly allocated complex128 arrays; nz may
        # overstate (a degree flagged nonzero that cancelled to zero is fine)
        obj = cls.__new__(cls)
        obj.n = n
        for p in parts:
            p.setflags(write=False)
        obj.parts = tuple(parts)
        obj.nz = tuple(nz) if nz is not None else tuple(bool(p.any()) for p in parts)
        return obj

    @classmethod
    def zero(cls, n):
        b = basis(n)
        return cls(n, [np.zeros(b.sizes[d]) for d in range(ORDER + 1)])

    @classmethod
    def constant(cls, n, value):
        s = cls.zero(n)
        parts = [p.copy() for p in s.parts]
        parts[0][0] = value
        return cls(n, parts)

    @classmethod
    def variable(cls, n, k):
        if not 0 <= k < n:
            raise ValueError(f"variable index {k} out of range for dimension {n}")
        b = basis(n)
        e = tuple(1 if i == k else 0 for i in range(n))
        parts = [np.zeros(b.sizes[d]) for d in range(ORDER + 1)]
        parts[1][b.index[e][1]] = 1.0
        return cls(n, parts)

    @classmethod
    def from_coefficients(cls, n, mapping):
        """Build a series from a sparse {exponent tuple: coefficient} map."""
        b = basis(n)
        parts = [np.zeros(b.sizes[d], dtype=np.complex128) for d in range(ORDER + 1)]
        for e, c in mapping.items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise ValueError(f"exponent tuple {e} does not match dimension {n}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            if sum(e) > ORDER:
                raise ValueError(f"monomial {e} exceeds truncation order {ORDER}")
            d, i = b.index[e]
            parts[d][i] += c
        return cls(n, parts)

    def _check(self, other):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, Number):
            other = ScalarSeries.constant(self.n, other)
        self._check(other)
        return ScalarSeries._trusted(
            self.n, [a + b for a, b in zip(self.parts, other.parts)],
            [x or y for x, y in zip(self.nz, other.nz)])

    __radd__ = __add__

    def __neg__(self):
        return ScalarSeries._trusted(self.n, [-p for p in self.parts], self.nz)

    def __sub__(self, other):
        if isinstance(other, Number):
            other = ScalarSeries.constant(self.n, other)
        self._check(other)
        return ScalarSeries._trusted(
            self.n, [a - b for a, b in zip(self.parts, other.parts)],
            [x or y for x, y in zip(self.nz, other.nz)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            if other == 0:
                return ScalarSeries.zero(self.n)
            return ScalarSeries._trusted(self.n, [p * other for p in self.parts], self.nz)
        self._check(other)
        b = basis(self.n)
        out = [np.zeros(b.sizes[d], dtype=np.complex128) for d in range(ORDER + 1)]
        nz = [False] * (ORDER + 1)
        for d1 in range(ORDER + 1):
            if not self.nz[d1]:
                continue
            for d2 in range(ORDER + 1 - d1):
                if not other.nz[d2]:
                    continue
                kernels.conv_acc(self.parts[d1], other.parts[d2], b.prod[(d1, d2)], out[d1 + d2])
                nz[d1 + d2] = True
        return ScalarSeries._trusted(self.n, out, nz)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Number):
            return NotImplemented
        return self * (1.0 / other)

    def __eq__(self, other):
        if not isinstance(other, ScalarSeries) or self.n != other.n:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.parts, other.parts))

    __hash__ = None

    def coefficient(self, exponents):
        e = tuple(int(x) for x in exponents)
        d, i = basis(self.n).index[e]
        return complex(self.parts[d][i])

    def items(self):
        """Yield (exponent tuple, coefficient) for nonzero terms in graded-lex order."""
        b = basis(self.n)
        for d in range(ORDER + 1):
            for i, c in enumerate(self.parts[d]):
                if c != 0:
                    yield b.exponents[d][i], complex(c)

    def degree_part(self, d):
        return self.parts[d].copy()

    def truncate_below(self, d):
        """Series keeping only the degree-d homogeneous piece."""
        parts = [np.zeros_like(p) for p in self.parts]
        parts[d] = self.parts[d].copy()
        return ScalarSeries(self.n, parts)

    def euler_scaled(self, weights):
        """Series with the degree-d part multiplied by weights[d].

        Contractions against the radial field reduce to degree scaling:
        sum_k z_k d_k f has weights d, and sum_{k,l} z_k z_l d_k d_l f has
        weights d(d-1), per homogeneous degree d.
        """
        parts = [p * weights[d] for d, p in enumerate(self.parts)]
        nz = [self.nz[d] and weights[d] != 0 for d in range(ORDER + 1)]
        return ScalarSeries._trusted(self.n, parts, nz)

    def max_abs(self):
        return max(float(np.max(np.abs(p))) if p.size else 0.0 for p in self.parts)

    def is_zero(self, tol=0.0):
        return self.max_abs() <= tol

    def derivative(self, v):
        """Formal partial derivative with respect to variable v."""
        b = basis(self.n)
        parts = [np.zeros(b.sizes[d], dtype=np.complex128) for d in range(ORDER + 1)]
        nz = [False] * (ORDER + 1)
        for d in range(1, ORDER + 1):
            if self.nz[d]:
                parts[d - 1] = b.diff[d][v] @ self.parts[d]
                nz[d - 1] = True
        return ScalarSeries._trusted(self.n, parts, nz)

    def inverse(self):
        """Multiplicative inverse through degree 4; requires nonzero constant term."""
        a0 = complex(self.parts[0][0])
        if a0 == 0:
            raise ValueError("series with zero constant term has no inverse")
        b = basis(self.n)
        out = [np.zeros(b.sizes[d], dtype=np.complex128) for d in range(ORDER + 1)]
        out[0][0] = 1.0 / a0
        for d in range(1, ORDER + 1):
            acc = np.zeros(b.sizes[d], dtype=np.complex128)
            for j in range(1, d + 1):
                if self.nz[j] and out[d - j].any():
                    kernels.conv_acc(self.parts[j], out[d - j], b.prod[(j, d - j)], acc)
            out[d] = -acc / a0
        return ScalarSeries(self.n, out)

    def evaluate(self, point):
        vals = monomial_values(self.n, np.asarray(point, dtype=np.complex128))
        return complex(sum(np.dot(self.parts[d], vals[d]) for d in range(ORDER + 1)))

    def evaluate_batch(self, points):
        vals = monomial_values_batch(self.n, points)
        out = np.zeros(np.asarray(points).shape[0], dtype=np.complex128)
        for d in range(ORDER + 1):
            if self.nz[d]:
                out += vals[d] @ self.parts[d]
        return out

    def __repr__(self):
        terms = ", ".join(f"{e}: {c:.6g}" for e, c in self.items())
        return f"ScalarSeries(n={self.n}, {{{terms}}})"


def series_add(a, b):
    """Coefficient-wise sum of two series of the same dimension."""
    return a + b


def series_mul(a, b):
    """Cauchy product truncated at total degree 4."""
    return a * b


class VectorJet:
    """Degree-<=4 expansion of a mapping C^n -> C^n at the origin.

    The degree-m block is D^m f(0)(z^m)/m!.  When ``normalized`` is set the
    constant term of every component must vanish and the linear part must be
    the identity; this is validated at construction.
    """

    __slots__ = ("components", "normalized")

    def __init__(self, components, normalized=False):
        components = tuple(components)
        if not components:
            raise ValueError("a jet needs at least one component")
        n = components[0].n
        if len(components) != n or any(c.n != n for c in components):
            raise ValueError("jet must have exactly n components of dimension n")
        if normalized:
            b = basis(n)
            for p, comp in enumerate(components):
                if comp.parts[0][0] != 0:
                    raise ValueError(f"normalized jet has nonzero constant in component {p + 1}")
                e = tuple(1 if i == p else 0 for i in range(n))
                want = np.zeros(b.sizes[1], dtype=np.complex128)
                want[b.index[e][1]] = 1.0
                if not np.array_equal(comp.parts[1], want):
                    raise ValueError(f"normalized jet needs identity linear part in component {p + 1}")
        self.components = components
        self.normalized = normalized

    @property
    def n(self):
        return self.components[0].n

    @classmethod
    def identity(cls, n):
        return cls([ScalarSeries.variable(n, k) for k in range(n)], normalized=True)

    @classmethod
    def from_coefficients(cls, n, mapping, normalized=False):
        """Build a jet from {(component index, exponent tuple): coefficient}."""
        per = [dict() for _ in range(n)]
        for (p, e), c in mapping.items():
            if not 0 <= p < n:
                raise ValueError(f"component index {p} out of range")
            per[p][tuple(e)] = per[p].get(tuple(e), 0) + c
        return cls([ScalarSeries.from_coefficients(n, m) for m in per], normalized=normalized)

    def component(self, p):
        return self.components[p]

    def __add__(self, other):
        if not isinstance(other, VectorJet):
            return NotImplemented
        return VectorJet([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        if not isinstance(other, VectorJet):
            return NotImplemented
        return VectorJet([a - b for a, b in zip(self.components, other.components)])

    def __mul__(self, scalar):
        return VectorJet([c * scalar for c in self.components])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorJet):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def degree_block(self, m):
        """Dense (n, N(m)) coefficient array of the degree-m block."""
        return np.stack([c.parts[m] for c in self.components])

    def jacobian(self):
        return jacobian(self)

    def max_abs(self):
        return max(c.max_abs() for c in self.components)

    def to_text(self):
        lines = ["# polyjet jet, one 'component e1 .. en re im' line per coefficient"]
        for p, comp in enumerate(self.components):
            for e, c in comp.items():
                es = " ".join(str(x) for x in e)
                lines.append(f"{p + 1} {es} {c.real!r} {c.imag!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, normalized=False):
        """Parse the jet text format: `component e1 .. en re im` per line.

        Component indices are 1-based.  Lines starting with `#` and blank
        lines are ignored.  Degrees above 4 and duplicate keys are rejected.
        """
        entries = []
        n = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) < 4:
                raise ValueError(f"line {lineno}: expected 'component e1 .. en re im'")
            this_n = len(fields) - 3
            if n is None:
                n = this_n
            elif this_n != n:
                raise ValueError(f"line {lineno}: inconsistent dimension ({this_n} vs {n})")
            try:
                p = int(fields[0])
                e = tuple(int(x) for x in fields[1:1 + n])
                c = complex(float(fields[-2]), float(fields[-1]))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            if not 1 <= p <= n:
                raise ValueError(f"line {lineno}: component index {p} out of range 1..{n}")
            if any(x < 0 for x in e):
                raise ValueError(f"line {lineno}: negative exponent")
            if sum(e) > ORDER:
                raise ValueError(f"line {lineno}: degree {sum(e)} exceeds truncation order {ORDER}")
            entries.append((lineno, p - 1, e, c))
        if n is None:
            raise ValueError("empty jet file")
        seen = {}
        for lineno, p, e, c in entries:
            if (p, e) in seen:
                raise ValueError(f"line {lineno}: duplicate key for component {p + 1}, exponents {e}")
            seen[(p, e)] = c
        return cls.from_coefficients(n, seen, normalized=normalized)

    def to_file(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_file(cls, path, normalized=False):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), normalized=normalized)

    def __repr__(self):
        return f"VectorJet(n={self.n}, normalized={self.normalized})"


class MatrixSeries:
    """n x n grid of truncated series, stored per degree as (n, n, N(d)) blocks."""

    __slots__ = ("n", "parts")

    def __init__(self, n, parts):
        self.n = n
        self.parts = tuple(_frozen(np.asarray(p, dtype=np.complex128)) for p in parts)

    @classmethod
    def zero(cls, n):
        b = basis(n)
        return cls(n, [np.zeros((n, n, b.sizes[d])) for d in range(ORDER + 1)])

    @classmethod
    def identity(cls, n):
        b = basis(n)
        parts = [np.zeros((n, n, b.sizes[d]), dtype=np.complex128) for d in range(ORDER + 1)]
        for p in range(n):
            parts[0][p, p, 0] = 1.0
        return cls(n, parts)

    @classmethod
    def from_entries(cls, grid):
        n = len(grid)
        b = basis(n)
        parts = [np.zeros((n, n, b.sizes[d]), dtype=np.complex128) for d in range(ORDER + 1)]
        for p in range(n):
            if len(grid[p]) != n:
                raise ValueError("matrix grid must be n x n")
            for k in range(n):
                s = grid[p][k]
                if s.n != n:
                    raise ValueError("dimension mismatch in matrix entry")
                for d in range(ORDER + 1):
                    parts[d][p, k] = s.parts[d]
        return cls(n, parts)

    def entry(self, p, k):
        return ScalarSeries(self.n, [self.parts[d][p, k] for d in range(ORDER + 1)])

    def constant_matrix(self):
        return self.parts[0][:, :, 0].copy()

    @staticmethod
    def _acc_rows(target, table, prod):
        # prod has shape (..., N1, N2); accumulate into target of shape (..., N3)
        tgt = target.reshape(-1, target.shape[-1])
        rows = tgt.shape[0]
        nout = tgt.shape[1]
        flat = prod.reshape(rows, -1)
        idx = (table.ravel()[None, :] + (np.arange(rows) * nout)[:, None]).ravel()
        w = flat.ravel()
        tgt += (np.bincount(idx, w.real, minlength=rows * nout)
                + 1j * np.bincount(idx, w.imag, minlength=rows * nout)).reshape(rows, nout)

    def __matmul__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        b = basis(self.n)
        out = [np.zeros_like(p) for p in MatrixSeries.zero(self.n).parts]
        for d1 in range(ORDER + 1):
            if not self.parts[d1].any():
                continue
            for d2 in range(ORDER + 1 - d1):
                if not other.parts[d2].any():
                    continue
                prod = np.einsum("pli,lqj->pqij", self.parts[d1], other.parts[d2])
                self._acc_rows(out[d1 + d2], b.prod[(d1, d2)], prod)
        return MatrixSeries(self.n, out)

    def apply_vector(self, vec):
        """Matrix-series times a vector of series; returns a list of series."""
        if len(vec) != self.n or any(s.n != self.n for s in vec):
            raise ValueError("dimension mismatch")
        b = basis(self.n)
        vparts = [np.stack([s.parts[d] for s in vec]) for d in range(ORDER + 1)]
        out = [np.zeros((self.n, b.sizes[d]), dtype=np.complex128) for d in range(ORDER + 1)]
        for d1 in range(ORDER + 1):
            if not self.parts[d1].any():
                continue
            for d2 in range(ORDER + 1 - d1):
                if not vparts[d2].any():
                    continue
                prod = np.einsum("pki,kj->pij", self.parts[d1], vparts[d2])
                self._acc_rows(out[d1 + d2], b.prod[(d1, d2)], prod)
        return [ScalarSeries(self.n, [out[d][p] for d in range(ORDER + 1)])
                for p in range(self.n)]

    def apply_coordinates(self):
        """The vector of series M(z) z."""
        return self.apply_vector([ScalarSeries.variable(self.n, k) for k in range(self.n)])

    def inverse(self):
        """Degree-by-degree Neumann inverse B_k = -A0^{-1} sum A_j B_{k-j}."""
        a0 = self.constant_matrix()
        ident = np.eye(self.n, dtype=np.complex128)
        if np.array_equal(a0, ident):
            b0 = ident
        else:
            try:
                b0 = np.linalg.inv(a0)
            except np.linalg.LinAlgError:
                raise ValueError("singular constant term: matrix series is not invertible") from None
            if not np.all(np.isfinite(b0)) or np.abs(np.linalg.det(a0)) < 1e-300:
                raise ValueError("singular constant term: matrix series is not invertible")
        b = basis(self.n)
        out = [np.zeros((self.n, self.n, b.sizes[d]), dtype=np.complex128)
               for d in range(ORDER + 1)]
        out[0][:, :, 0] = b0
        for d in range(1, ORDER + 1):
            acc = np.zeros((self.n, self.n, b.sizes[d]), dtype=np.complex128)
            for j in range(1, d + 1):
                if not self.parts[j].any() or not out[d - j].any():
                    continue
                prod = np.einsum("pli,lqj->pqij", self.parts[j], out[d - j])
                self._acc_rows(acc, b.prod[(j, d - j)], prod)
            out[d] = -np.einsum("pl,lqi->pqi", b0, acc)
        return MatrixSeries(self.n, out)

    def max_abs(self):
        return max(float(np.max(np.abs(p))) if p.size else 0.0 for p in self.parts)

    def __sub__(self, other):
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return MatrixSeries(self.n, [a - b for a, b in zip(self.parts, other.parts)])

    def __repr__(self):
        return f"MatrixSeries(n={self.n})"


def jacobian(jet):
    """Df(z) as a matrix series: entry (p, k) is d f_p / d z_k, degree <= 3."""
    n = jet.n
    grid = [[jet.components[p].derivative(k) for k in range(n)] for p in range(n)]
    return MatrixSeries.from_entries(grid)


def matrix_series_inverse(m):
    """Inverse of a matrix series with invertible constant term, through degree 3."""
    return m.inverse()


def extract_homogeneous(jet, m):
    """The degree-m block D^m f(0)(z^m)/m! as a homogeneous vector polynomial."""
    from .forms import HomogeneousPoly

    if not 1 <= m <= ORDER:
        raise ValueError(f"homogeneous degree must be in 1..{ORDER}, got {m}")
    return HomogeneousPoly(jet.n, m, jet.degree_block(m))


def apply_to_diagonal(jet, m, point):
    """Evaluate the degree-m block of the jet at a concrete point."""
    if not 1 <= m <= ORDER:
        raise ValueError(f"homogeneous degree must be in 1..{ORDER}, got {m}")
    vals = monomial_values(jet.n, np.asarray(point, dtype=np.complex128))
    return jet.degree_block(m) @ vals[m]
