"""Mapping catalog, the two g-operators, derivative identities, membership tests.

The catalog holds the extremal families of the sharp bounds as diagonal maps
(the same one-variable function in every coordinate), together with diagonal
products of mixed one-variable families and user-supplied jets.  For diagonal
families the membership criterion Re{g_j(z)/z_j} >= alpha is evaluated in
closed form per coordinate, so the certificates cover the true mappings and
not a truncation; user jets are certified only through their degree-4 jet and
the certificate says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .forms import HomogeneousPoly, mixed_d2, polarize
from .jets import ORDER, ScalarSeries, VectorJet, apply_to_diagonal, extract_homogeneous, jacobian

QUASI_CONVEX = "quasi_convex_b"
ALMOST_STARLIKE = "almost_starlike"
_CLASS_TAGS = (QUASI_CONVEX, ALMOST_STARLIKE)


# ---------------------------------------------------------------------------
# g-operators on jets


def second_derivative_contraction(jet):
    """D^2 f(z)(z, z) as a vector of series.

    Contracting both slots of the Hessian against z collapses to degree
    scaling: the degree-d homogeneous part picks up the factor d(d-1).
    """
    weights = [d * (d - 1.0) for d in range(ORDER + 1)]
    return [c.euler_scaled(weights) for c in jet.components]


def g_quasi(jet):
    """The quasi-convexity operator (Df(z))^{-1} (D^2 f(z)(z^2) + Df(z) z)."""
    if not jet.normalized:
        raise ValueError("g_quasi needs a normalized jet")
    inv = jacobian(jet).inverse()
    # D^2 f(z)(z^2) + Df(z) z scales the degree-d part by d(d-1) + d = d^2
    weights = [float(d * d) for d in range(ORDER + 1)]
    bracket = [c.euler_scaled(weights) for c in jet.components]
    return VectorJet(inv.apply_vector(bracket), normalized=True)


def g_star(jet):
    """The starlikeness operator (Df(z))^{-1} f(z)."""
    if not jet.normalized:
        raise ValueError("g_star needs a normalized jet")
    inv = jacobian(jet).inverse()
    return VectorJet(inv.apply_vector(list(jet.components)), normalized=True)


def _block_residual(lhs, rhs_parts, degree):
    diff = [a - b for a, b in zip(lhs, rhs_parts)]
    return max(float(np.max(np.abs(s.parts[degree]))) for s in diff)


def lemma23_residual(jet):
    """Residuals of the two derivative identities for the quasi operator.

    Degree 2: g-block equals twice the f-block.  Degree 3: g-block equals
    6*(f-block) - 4*B(x, w) with B the quadratic bilinear form and
    w = D^2 f(0)(x^2)/2!.  Returns (degree-2 residual, degree-3 residual); the
    residual is the largest absolute coefficient of the difference.
    """
    g = g_quasi(jet)
    n = jet.n
    xvec = [ScalarSeries.variable(n, k) for k in range(n)]
    p2 = extract_homogeneous(jet, 2)
    w2 = p2.as_series()
    mixed = mixed_d2(p2, xvec, w2)
    rhs2 = [c * 2.0 for c in jet.components]
    rhs3 = [f * 6.0 - m * 4.0 for f, m in zip(jet.components, mixed)]
    r2 = _block_residual(list(g.components), rhs2, 2)
    r3 = _block_residual(list(g.components), rhs3, 3)
    return r2, r3


def lemma24_residual(jet):
    """Residuals of the three derivative identities for the starlike operator.

    Degree 2: -1 times the f-block.  Degree 3: -2*(f-block) + 2*B(x, w2).
    Degree 4: -3*(f-block) + 3*L3(x, x, w2) + 4*B(x, w3) - 4*B(x, B(x, w2)),
    with L3 the trilinear form of the cubic block, evaluated by polarization.
    Returns residuals for degrees (2, 3, 4).
    """
    g = g_star(jet)
    n = jet.n
    xvec = [ScalarSeries.variable(n, k) for k in range(n)]
    p2 = extract_homogeneous(jet, 2)
    p3 = extract_homogeneous(jet, 3)
    w2 = p2.as_series()
    w3 = p3.as_series()
    b_x_w2 = mixed_d2(p2, xvec, w2)
    tri = polarize(p3, [xvec, xvec, w2])
    b_x_w3 = mixed_d2(p2, xvec, w3)
    nested = mixed_d2(p2, xvec, b_x_w2)
    rhs2 = [c * (-1.0) for c in jet.components]
    rhs3 = [f * (-2.0) + m * 2.0 for f, m in zip(jet.components, b_x_w2)]
    rhs4 = [f * (-3.0) + t * 3.0 + a * 4.0 - b * 4.0
            for f, t, a, b in zip(jet.components, tri, b_x_w3, nested)]
    r2 = _block_residual(list(g.components), rhs2, 2)
    r3 = _block_residual(list(g.components), rhs3, 3)
    r4 = _block_residual(list(g.components), rhs4, 4)
    return r2, r3, r4


# ---------------------------------------------------------------------------
# supporting functional on the max-norm space


@dataclass(frozen=True)
class SupportingFunctional:
    """Phase-corrected coordinate projection at a max-modulus index."""

    index: int
    phase: complex

    @classmethod
    def at(cls, z):
        z = np.asarray(z, dtype=np.complex128)
        if not np.abs(z).max() > 0:
            raise ValueError("supporting functional undefined at z = 0")
        j = int(np.argmax(np.abs(z)))  # first maximum: lowest index on ties
        return cls(j, abs(z[j]) / z[j])

    def __call__(self, v):
        return self.phase * complex(np.asarray(v, dtype=np.complex128)[self.index])


def supporting_apply(z, v):
    """T_z(v) = (|z_j|/z_j) v_j with j the lowest index achieving max_k |z_k|."""
    return SupportingFunctional.at(z)(v)


# ---------------------------------------------------------------------------
# one-variable catalog families


@dataclass(frozen=True)
class OneVarFamily:
    """A one-variable normalized function with closed-form class data."""

    kind: str  # "quasi_convex" | "almost_starlike" | "identity"
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("quasi_convex", "almost_starlike", "identity"):
            raise ValueError(f"unknown one-variable family {self.kind!r}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")

    def taylor(self):
        """Exact Taylor coefficients a_1..a_4."""
        a = self.alpha
        if self.kind == "identity":
            return (1.0, 0.0, 0.0, 0.0)
        if self.kind == "quasi_convex":
            if abs(a - 0.5) < 1e-15:
                # -log(1-z) branch
                return tuple(1.0 / m for m in range(1, ORDER + 1))
            coeffs = [1.0]
            for m in range(2, ORDER + 1):
                coeffs.append(coeffs[-1] * (m - 2.0 * a) / m)
            return tuple(coeffs)
        if abs(a - 0.5) < 1e-15:
            # z e^z branch
            return tuple(1.0 / math.factorial(m - 1) for m in range(1, ORDER + 1))
        coeffs = [1.0]
        for m in range(2, ORDER + 1):
            coeffs.append(coeffs[-1] * (m - 2.0 * a * (m - 1.0)) / (m - 1.0))
        return tuple(coeffs)

    def g_ratio(self, class_tag, z):
        """Closed-form g(z)/z for this coordinate under the requested operator."""
        z = np.asarray(z, dtype=np.complex128)
        a = self.alpha
        if self.kind == "identity":
            return np.ones_like(z)
        if self.kind == "quasi_convex":
            if class_tag == QUASI_CONVEX:
                return 1.0 + 2.0 * (1.0 - a) * z / (1.0 - z)
            if abs(2.0 * a - 1.0) < 1e-9:
                return -(1.0 - z) * np.log(1.0 - z) / z
            return ((1.0 - z) ** (2.0 - 2.0 * a) - (1.0 - z)) / ((2.0 * a - 1.0) * z)
        # almost starlike extremal
        if class_tag == ALMOST_STARLIKE:
            return (1.0 - (1.0 - 2.0 * a) * z) / (1.0 + z)
        c = 1.0 - 2.0 * a
        num = (3.0 - 4.0 * a) * (1.0 + z) + 1.0 - c * z
        return 1.0 + z * num / ((1.0 - c * z) * (1.0 + z))

    def own_class(self):
        if self.kind == "quasi_convex":
            return QUASI_CONVEX
        if self.kind == "almost_starlike":
            return ALMOST_STARLIKE
        return None


# ---------------------------------------------------------------------------
# mapping families


@dataclass(frozen=True)
class MappingFamily:
    """A catalog mapping: diagonal families with exact data, or a user jet."""

    kind: str
    n: int
    alpha: float = 0.0
    direction: int = 0
    coords: tuple[OneVarFamily, ...] = ()
    user_jet: VectorJet | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if not 0 <= self.direction < self.n:
            raise ValueError("direction index out of range")
        if self.kind == "user_jet":
            if self.user_jet is None or self.user_jet.n != self.n:
                raise ValueError("user jet missing or of wrong dimension")
            if not self.user_jet.normalized:
                raise ValueError("user jets must be normalized")
        elif len(self.coords) != self.n:
            raise ValueError("diagonal family needs one coordinate family per variable")

    @classmethod
    def quasi_convex_extremal(cls, alpha, n, direction=0):
        coord = OneVarFamily("quasi_convex", alpha)
        return cls("quasi_convex_extremal", n, alpha, direction, (coord,) * n)

    @classmethod
    def almost_starlike_extremal(cls, alpha, n, direction=0):
        coord = OneVarFamily("almost_starlike", alpha)
        return cls("almost_starlike_extremal", n, alpha, direction, (coord,) * n)

    @classmethod
    def identity(cls, n, direction=0):
        return cls("identity", n, 0.0, direction, (OneVarFamily("identity"),) * n)

    @classmethod
    def diagonal_product(cls, coords, direction=0):
        coords = tuple(coords)
        return cls("diagonal_product", len(coords), 0.0, direction, coords)

    @classmethod
    def from_jet(cls, jet, direction=0):
        return cls("user_jet", jet.n, 0.0, direction, (), jet)

    @property
    def is_diagonal(self):
        return self.kind != "user_jet"

    @property
    def direction_vector(self):
        u = np.zeros(self.n, dtype=np.complex128)
        u[self.direction] = 1.0
        return u

    def label(self):
        if self.kind == "user_jet":
            return "user_jet"
        if self.kind == "diagonal_product":
            inner = ",".join(
                c.kind if c.kind == "identity" else f"{c.kind}({c.alpha:g})"
                for c in self.coords)
            return f"diagonal[{inner}]"
        if self.kind == "identity":
            return "identity"
        return f"{self.kind}(alpha={self.alpha:g})"

    def jet(self, order=ORDER):
        return jet_of(self, order)

    def g_ratio(self, class_tag, coordinate, z):
        if not self.is_diagonal:
            raise ValueError("closed-form g is only available for diagonal families")
        return self.coords[coordinate].g_ratio(class_tag, z)

    def own_class(self):
        """(class tag, alpha) the family is designed to belong to, if any."""
        if self.kind == "quasi_convex_extremal":
            return QUASI_CONVEX, self.alpha
        if self.kind == "almost_starlike_extremal":
            return ALMOST_STARLIKE, self.alpha
        if self.kind == "identity":
            return None
        return None


def jet_of(family, order=ORDER):
    """Exact Taylor coefficients of a catalog family through degree 4."""
    if order != ORDER:
        raise ValueError(f"only truncation order {ORDER} is supported")
    if family.kind == "user_jet":
        return family.user_jet
    n = family.n
    mapping = {}
    for k, coord in enumerate(family.coords):
        coeffs = coord.taylor()
        for m in range(1, ORDER + 1):
            e = tuple(m if i == k else 0 for i in range(n))
            if coeffs[m - 1] != 0:
                mapping[(k, e)] = coeffs[m - 1]
    return VectorJet.from_coefficients(n, mapping, normalized=True)


# ---------------------------------------------------------------------------
# membership certification


@dataclass(frozen=True)
class MembershipConfig:
    """Sampling plan: shells of constant max-norm times phase grids."""

    radii: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9, 0.99)
    phases: int = 64
    fill_samples: int = 8  # off-coordinate draws per phase for truncated jets
    seed: int = 0


@dataclass(frozen=True)
class ClassCertificate:
    """Outcome of a sampled membership test."""

    class_tag: str
    alpha: float
    min_real: float
    argmin: tuple[complex, ...]
    samples: int
    verdict: str
    truncated: bool
    note: str = ""

    def to_dict(self):
        return {
            "class": self.class_tag,
            "alpha": self.alpha,
            "min_re": self.min_real,
            "samples": self.samples,
            "verdict": self.verdict,
            "truncated": self.truncated,
            "note": self.note,
        }


STAT_TOL = 1e-9
_TRUNCATION_SAFE_RADIUS = 0.7


def membership_test(family, class_tag, alpha, cfg=None):
    """Sampled check of Re{g_j(z)/z_j} >= alpha at achieving coordinates j.

    Diagonal catalog families are evaluated in closed form per coordinate, so
    the certificate covers the true mapping.  User jets are tested through
    the degree-4 truncation of g; a sub-alpha sample beyond the truncation
    radius only makes the certificate inconclusive near the boundary.
    """
    if class_tag not in _CLASS_TAGS:
        raise ValueError(f"unknown class tag {class_tag!r}")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    cfg = cfg or MembershipConfig()
    if not cfg.radii or cfg.phases < 1:
        raise ValueError("empty sampling plan")
    n = family.n
    theta = 2.0 * np.pi * np.arange(cfg.phases) / cfg.phases
    ring = np.exp(1j * theta)

    best = math.inf
    best_point = None
    best_radius = 0.0
    count = 0

    if family.is_diagonal:
        for j in range(n):
            for r in cfg.radii:
                z = r * ring
                vals = np.real(family.g_ratio(class_tag, j, z))
                count += vals.size
                i = int(np.argmin(vals))
                if vals[i] < best:
                    best = float(vals[i])
                    point = np.zeros(n, dtype=np.complex128)
                    point[j] = z[i]
                    best_point = tuple(point)
                    best_radius = r
        truncated = False
    else:
        jet = family.user_jet
        g = g_quasi(jet) if class_tag == QUASI_CONVEX else g_star(jet)
        rng = np.random.default_rng(cfg.seed)
        for j in range(n):
            for r in cfg.radii:
                fills = max(1, cfg.fill_samples) if n > 1 else 1
                pts = np.zeros((cfg.phases * fills, n), dtype=np.complex128)
                pts[:, j] = np.repeat(r * ring, fills)
                if n > 1:
                    others = [k for k in range(n) if k != j]
                    moduli = rng.uniform(0.0, 0.999 * r, size=(pts.shape[0], n - 1))
                    args = rng.uniform(0.0, 2.0 * np.pi, size=(pts.shape[0], n - 1))
                    pts[:, others] = moduli * np.exp(1j * args)
                vals = np.real(g.components[j].evaluate_batch(pts) / pts[:, j])
                count += vals.size
                i = int(np.argmin(vals))
                if vals[i] < best:
                    best = float(vals[i])
                    best_point = tuple(pts[i])
                    best_radius = r
        truncated = True

    note = ""
    if best >= alpha - STAT_TOL:
        verdict = "pass"
        if truncated:
            note = "degree-4 truncation: inconclusive beyond truncation"
    elif truncated and best_radius > _TRUNCATION_SAFE_RADIUS:
        verdict = "inconclusive_near_boundary"
        note = ("witness lies beyond the truncation-safe radius; "
                "degree-4 jets cannot certify boundary behaviour")
    else:
        verdict = "fail"
        if truncated:
            note = "degree-4 truncation: inconclusive beyond truncation"
    return ClassCertificate(class_tag, alpha, best, best_point, count, verdict, truncated, note)
