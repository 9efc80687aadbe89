"""Homogeneous vector polynomials on the polydisk and their norms.

Covers polarization into symmetric multilinear forms, mixed-argument
evaluation of quadratic blocks via the difference-of-squares identity, and
sup-norm estimation over the distinguished boundary torus.  Sup norms are
certified lower bounds: every estimate is attained at its reported maximizing
point.  The search is a uniform phase grid followed by coordinate-wise
golden-section refinement from several value-distinct start points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .jets import ORDER, ScalarSeries, basis, monomial_values, monomial_values_batch

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class UnsupportedArityError(ValueError):
    """Raised for form-norm requests of arity other than 2."""


def default_resolution(n):
    if n <= 3:
        return 64
    if n <= 5:
        return 32
    return 16


@dataclass(frozen=True)
class GridConfig:
    """Torus search parameters: grid resolution plus refinement depth."""

    resolution: int | None = None
    refine_steps: int = 40
    refine_cycles: int = 2
    starts: int = 10

    def resolve(self, n):
        g = self.resolution if self.resolution is not None else default_resolution(n)
        if g < 8:
            raise ValueError(f"resolution too small: {g} < 8")
        if self.starts < 1:
            raise ValueError("need at least one refinement start")
        return g


@dataclass(frozen=True)
class NormEstimate:
    """Attained lower bound for a sup norm, with the point that attains it."""

    value: float
    resolution: int
    refine_steps: int
    phases: tuple[float, ...]
    argmax: tuple[complex, ...]

    def to_dict(self):
        return {
            "value": self.value,
            "grid": self.resolution,
            "depth": self.refine_steps,
            "argmax_phases": [round(p, 15) for p in self.phases],
        }


class HomogeneousPoly:
    """Homogeneous vector polynomial of one total degree on C^n."""

    __slots__ = ("n", "degree", "coeffs")

    def __init__(self, n, degree, coeffs):
        if not 0 <= degree <= ORDER:
            raise ValueError(f"degree must be in 0..{ORDER}, got {degree}")
        b = basis(n)
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.ndim != 2 or coeffs.shape[1] != b.sizes[degree]:
            raise ValueError(f"coefficients must have shape (components, {b.sizes[degree]})")
        coeffs = coeffs.copy()
        coeffs.setflags(write=False)
        self.n = n
        self.degree = degree
        self.coeffs = coeffs

    @classmethod
    def from_coefficients(cls, n, degree, mapping, components=None):
        """Build from a sparse {(component, exponent tuple): coefficient} map."""
        b = basis(n)
        ncomp = components if components is not None else \
            (max(p for p, _ in mapping) + 1 if mapping else 1)
        out = np.zeros((ncomp, b.sizes[degree]), dtype=np.complex128)
        for (p, e), c in mapping.items():
            e = tuple(int(x) for x in e)
            if sum(e) != degree:
                raise ValueError(f"monomial {e} does not have degree {degree}")
            out[p, b.index[e][1]] += c
        return cls(n, degree, out)

    @classmethod
    def from_series(cls, vec, degree):
        """Extract one homogeneous block from a vector of series."""
        return cls(vec[0].n, degree, np.stack([s.parts[degree] for s in vec]))

    @property
    def components(self):
        return self.coeffs.shape[0]

    def is_zero(self):
        return not self.coeffs.any()

    def __mul__(self, scalar):
        return HomogeneousPoly(self.n, self.degree, self.coeffs * scalar)

    __rmul__ = __mul__

    def __add__(self, other):
        if self.n != other.n or self.degree != other.degree:
            raise ValueError("can only add homogeneous polynomials of equal dimension and degree")
        return HomogeneousPoly(self.n, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self + (other * (-1.0))

    def evaluate(self, point):
        """Component values at a concrete point of C^n."""
        vals = monomial_values(self.n, np.asarray(point, dtype=np.complex128))
        return self.coeffs @ vals[self.degree]

    def evaluate_batch(self, points):
        vals = monomial_values_batch(self.n, points)
        return vals[self.degree] @ self.coeffs.T

    def apply_series(self, vec):
        """Substitute a vector of series for the variables; truncates at degree 4."""
        if len(vec) != self.n:
            raise ValueError("substitution needs one series per variable")
        b = basis(self.n)
        nv = vec[0].n
        if self.degree == 0:
            monomials = [ScalarSeries.constant(nv, 1.0)]
        else:
            prev = None  # degree-0 monomial is the constant 1
            for d in range(1, self.degree + 1):
                cur = []
                for v, parent in b.rec[d]:
                    cur.append(vec[v] if prev is None else vec[v] * prev[parent])
                prev = cur
            monomials = prev
        bv = basis(nv)
        out = []
        for c in range(self.components):
            parts = [np.zeros(bv.sizes[d], dtype=np.complex128) for d in range(ORDER + 1)]
            nz = [False] * (ORDER + 1)
            for i, coef in enumerate(self.coeffs[c]):
                if coef == 0:
                    continue
                mono = monomials[i]
                for d in range(ORDER + 1):
                    if mono.nz[d]:
                        parts[d] += coef * mono.parts[d]
                        nz[d] = True
            out.append(ScalarSeries._trusted(nv, parts, nz))
        return out

    def as_series(self):
        """The polynomial itself as a vector of series in its own variables."""
        out = []
        for c in range(self.components):
            parts = [np.zeros(basis(self.n).sizes[d], dtype=np.complex128)
                     for d in range(ORDER + 1)]
            parts[self.degree] = self.coeffs[c].copy()
            out.append(ScalarSeries(self.n, parts))
        return out

    def __repr__(self):
        return f"HomogeneousPoly(n={self.n}, degree={self.degree}, components={self.components})"


def _combine(points, signs):
    first = points[0]
    if isinstance(first[0], ScalarSeries):
        n = len(first)
        out = []
        for i in range(n):
            acc = first[i] * signs[0]
            for p, s in zip(points[1:], signs[1:]):
                acc = acc + p[i] * s
            out.append(acc)
        return out
    acc = signs[0] * np.asarray(first, dtype=np.complex128)
    for p, s in zip(points[1:], signs[1:]):
        acc = acc + s * np.asarray(p, dtype=np.complex128)
    return acc


def _eval_any(poly, point):
    if isinstance(point, list) and point and isinstance(point[0], ScalarSeries):
        return poly.apply_series(point)
    return poly.evaluate(point)


def polarize(poly, args):
    """The symmetric multilinear form of a homogeneous polynomial.

    Evaluates L(x_1, ..., x_m) through the polarization identity
    L = (1/(2^m m!)) sum over sign patterns of e_1...e_m P(sum e_i x_i).
    Identical argument objects are grouped, which turns the sign patterns of
    a repeated argument into one binomially weighted multiplier and saves
    evaluations.  Arguments may be concrete points of C^n or vectors of
    series (then the result is a vector of series, truncated at degree 4).
    """
    m = poly.degree
    if len(args) != m:
        raise ValueError(f"arity mismatch: polynomial of degree {m} needs {m} arguments")
    groups = []
    for a in args:
        for g in groups:
            if g[0] is a:
                g[1] += 1
                break
        else:
            groups.append([a, 1])
    scale = 1.0 / (2 ** m * math.factorial(m))
    total = None
    for plus_counts in itertools.product(*(range(k + 1) for _, k in groups)):
        weight = scale
        sigmas = []
        for j, (_, k) in zip(plus_counts, groups):
            weight *= math.comb(k, j) * (-1.0) ** (k - j)
            sigmas.append(float(2 * j - k))
        val = _eval_any(poly, _combine([g[0] for g in groups], sigmas))
        if isinstance(val, list):
            term = [s * weight for s in val]
            total = term if total is None else [a + b for a, b in zip(total, term)]
        else:
            term = weight * val
            total = term if total is None else total + term
    return total


def mixed_d2(poly, z, w):
    """Mixed evaluation of a quadratic block via the difference-of-squares identity.

    Returns B(z, w) = [P(z+w) - P(z-w)]/4, the symmetric bilinear form whose
    diagonal is the degree-2 polynomial P.
    """
    if poly.degree != 2:
        raise ValueError(f"mixed_d2 needs a quadratic block, got degree {poly.degree}")
    if isinstance(z, list) and z and isinstance(z[0], ScalarSeries):
        plus = poly.apply_series([a + b for a, b in zip(z, w)])
        minus = poly.apply_series([a - b for a, b in zip(z, w)])
        return [(p - m) * 0.25 for p, m in zip(plus, minus)]
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    return (poly.evaluate(z + w) - poly.evaluate(z - w)) / 4.0


def _phase_powers(n, g):
    theta = 2.0 * np.pi * np.arange(g) / g
    pp = np.empty((n, ORDER + 1, g), dtype=np.complex128)
    for e in range(ORDER + 1):
        pp[:, e, :] = np.exp(1j * e * theta)[None, :]
    return pp


def _golden_max(fun, lo, hi, steps):
    best_x, best_f = lo, fun(lo)
    fhi = fun(hi)
    if fhi > best_f:
        best_x, best_f = hi, fhi
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    for x, f in ((c, fc), (d, fd)):
        if f > best_f:
            best_x, best_f = x, f
    for _ in range(steps):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fun(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fun(d)
            if fd > best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def _coordinate_refine(fun, theta0, halfwidth, steps, cycles):
    theta = np.array(theta0, dtype=np.float64)
    best = fun(theta)
    for _ in range(cycles):
        for v in range(theta.size):
            center = theta[v]

            def line(x, _v=v):
                t = theta.copy()
                t[_v] = x
                return fun(t)

            x, f = _golden_max(line, center - halfwidth, center + halfwidth, steps)
            if f > best:
                best = f
                theta[v] = x
    return best, theta


def _search(grid_topk, valfun, n, cfg, extra_starts=()):
    g = cfg.resolve(n)
    vals, flats = grid_topk(g)
    if len(vals) == 0:
        raise ValueError("empty grid sweep")
    step = 2.0 * np.pi / g
    starts = []
    for v0, flat in zip(vals, flats):
        idx = np.unravel_index(int(flat), (g,) * n)
        starts.append(np.array(idx, dtype=np.float64) * step)
    starts.extend(np.asarray(s, dtype=np.float64) for s in extra_starts)
    best_val = -1.0
    best_theta = None
    for theta0 in starts:
        val = valfun(theta0)
        rv, rtheta = _coordinate_refine(valfun, theta0, step, cfg.refine_steps, cfg.refine_cycles)
        if rv > val:
            val, theta0 = rv, rtheta
        if val > best_val:
            best_val = val
            best_theta = theta0
    return best_val, best_theta, g


def poly_sup_norm(poly, cfg=None):
    """Sup of max_k |P_k| over the closed polydisk.

    The maximum modulus principle puts the maximum on the distinguished
    boundary torus, so the search runs over n phases only.
    """
    cfg = cfg or GridConfig()
    n = poly.n
    expo = basis(n).expo[poly.degree]
    expo_f = expo.astype(np.float64)
    coeffs = poly.coeffs

    def valfun(theta):
        mono = np.exp(1j * (expo_f @ theta))
        return float(np.max(np.abs(coeffs @ mono)))

    def grid_topk(g):
        pp = _phase_powers(n, g)
        return kernels.poly_grid_topk(coeffs, expo, pp, cfg.starts)

    value, theta, g = _search(grid_topk, valfun, n, cfg)
    value = valfun(theta)
    point = tuple(np.exp(1j * theta))
    return NormEstimate(value, g, cfg.refine_steps, tuple(float(t) for t in theta), point)


@dataclass(frozen=True)
class SymmetricForm:
    """Symmetric m-linear form represented by its diagonal restriction."""

    diagonal: HomogeneousPoly

    @property
    def n(self):
        return self.diagonal.n

    @property
    def arity(self):
        return self.diagonal.degree

    def __call__(self, *args):
        return polarize(self.diagonal, list(args))

    def coefficient_matrices(self):
        """Per-component symmetric matrices A with L_c(x, y) = x^T A_c y (arity 2)."""
        if self.arity != 2:
            raise UnsupportedArityError(
                f"only arity 2 is supported, got {self.arity}")
        b = basis(self.n)
        c = self.diagonal.components
        amat = np.zeros((c, self.n, self.n), dtype=np.complex128)
        for pos, e in enumerate(b.exponents[2]):
            nz = [v for v, x in enumerate(e) if x > 0]
            if len(nz) == 1:
                amat[:, nz[0], nz[0]] = self.diagonal.coeffs[:, pos]
            else:
                i, j = nz
                amat[:, i, j] = self.diagonal.coeffs[:, pos] / 2.0
                amat[:, j, i] = self.diagonal.coeffs[:, pos] / 2.0
        return amat

    def sup_norm(self, cfg=None):
        return form_sup_norm(self, cfg)


def form_sup_norm(form, cfg=None, extra_starts=()):
    """Sup of max_c |L_c(x, y)| over independent torus points x and y.

    For fixed x the inner maximization over y is exact: the best torus y
    aligns the phases of the linear functional y -> L_c(x, y), so its value
    is the absolute row sum of A_c x.  The search therefore runs over the x
    phases only and reconstructs the maximizing y afterwards.
    """
    cfg = cfg or GridConfig()
    amat = form.coefficient_matrices()
    n = form.n

    def valfun(theta):
        x = np.exp(1j * theta)
        return float(np.max(np.abs(amat @ x).sum(axis=1)))

    def grid_topk(g):
        pp = _phase_powers(n, g)
        return kernels.bilinear_grid_topk(amat, np.ascontiguousarray(pp[:, 1, :]), cfg.starts)

    value, theta, g = _search(grid_topk, valfun, n, cfg, extra_starts)
    x = np.exp(1j * theta)
    rows = amat @ x
    comp = int(np.argmax(np.abs(rows).sum(axis=1)))
    r = rows[comp]
    y = np.where(np.abs(r) > 0, np.conj(r) / np.where(np.abs(r) > 0, np.abs(r), 1.0), 1.0)
    pair = polarize(form.diagonal, [x, y])
    value = max(float(valfun(theta)), float(np.max(np.abs(pair))))
    phases = tuple(float(t) for t in theta) + tuple(float(p) for p in np.angle(y))
    return NormEstimate(value, g, cfg.refine_steps, phases, tuple(x) + tuple(y))


def polarization_ratio(poly, cfg=None):
    """Ratio of the bilinear-form norm to the diagonal polynomial norm.

    Bounded by 1 for n = 2 and by (3/4)*sqrt(3) for n >= 3 (quadratics on
    the max-norm polydisk); both sides are attained lower-bound estimates.
    """
    if poly.degree != 2:
        raise ValueError(f"polarization ratio is defined for quadratics, got degree {poly.degree}")
    if poly.is_zero():
        raise ValueError("zero polynomial has no polarization ratio")
    cfg = cfg or GridConfig()
    poly_est = poly_sup_norm(poly, cfg)
    # the diagonal restriction y = x makes the form norm at least the
    # polynomial norm, so the polynomial maximizer seeds the form search
    form_est = form_sup_norm(SymmetricForm(poly), cfg, extra_starts=(poly_est.phases,))
    return form_est.value / poly_est.value


def coefficient_row_max(rows):
    """Maximum absolute row sum, the constant M of the structured-block bound."""
    rows = np.asarray(rows, dtype=np.complex128)
    if rows.ndim != 2:
        raise ValueError("expected a 2-d coefficient matrix")
    return float(np.max(np.abs(rows).sum(axis=1)))
