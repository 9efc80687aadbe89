"""Numpy fallback for the hot kernels.

Contracts shared with the compiled backend:

conv_acc(a, b, table, out)
    Accumulate the graded Cauchy product piece: out[table[i, j]] += a[i]*b[j].

poly_grid_topk(coeffs, expo, pp, k)
    Sweep the full phase grid of the torus.  coeffs is (C, K) complex, expo
    is (K, n) int32, pp is the per-variable phase-power table of shape
    (n, maxexp+1, G) with pp[v, e, g] = exp(1j*e*theta_g).  Returns the top-k
    *value-distinct* grid maxima of max_c |P_c| as (values, flat_indices),
    ordered by descending value; ties and same-value batches keep the first
    point in lexicographic grid order.

bilinear_grid_topk(amat, phases, k)
    Same contract for the exact-inner-argument bilinear landscape
    value(x) = max_c sum_k |(A_c x)_k|, with phases of shape (n, G) holding
    exp(1j*theta_g) per variable.
"""

import numpy as np

_DISTINCT_RTOL = 1e-9


def conv_acc(a, b, table, out):
    w = np.outer(a, b).ravel()
    idx = table.ravel()
    out += (np.bincount(idx, w.real, minlength=out.shape[0])
            + 1j * np.bincount(idx, w.imag, minlength=out.shape[0]))


def _merge_topk(vals, flats, k):
    vals = np.asarray(vals, dtype=np.float64)
    flats = np.asarray(flats, dtype=np.int64)
    order = np.lexsort((flats, -vals))
    picked_v, picked_f = [], []
    vmax = vals[order[0]] if order.size else 0.0
    tol = max(_DISTINCT_RTOL * vmax, 1e-300)
    for idx in order:
        v = vals[idx]
        if any(abs(v - pv) <= tol for pv in picked_v):
            continue
        picked_v.append(float(v))
        picked_f.append(int(flats[idx]))
        if len(picked_v) == k:
            break
    return np.array(picked_v), np.array(picked_f, dtype=np.int64)


def _poly_slab(coeffs, expo, pp, fixed):
    """max_c |P_c| on the grid slab with the leading variable pinned (or full grid)."""
    C, K = coeffs.shape
    n = expo.shape[1]
    G = pp.shape[2]
    lead = 0 if fixed is None else 1
    shape = (G,) * (n - lead)
    best = None
    for c in range(C):
        acc = np.zeros(shape, dtype=np.complex128)
        for kk in range(K):
            coef = coeffs[c, kk]
            if coef == 0:
                continue
            if fixed is not None:
                coef = coef * pp[0, expo[kk, 0], fixed]
            term = np.asarray(coef, dtype=np.complex128)
            for v in range(lead, n):
                term = term[..., None] * pp[v, expo[kk, v]]
            acc += term
        mag = np.abs(acc)
        best = mag if best is None else np.maximum(best, mag)
    return best


def poly_grid_topk(coeffs, expo, pp, k):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    expo = np.ascontiguousarray(expo, dtype=np.int32)
    n = expo.shape[1]
    G = pp.shape[2]
    total = G ** n
    cand_per = max(4 * k, 16)
    vals, flats = [], []
    if total <= (1 << 20):
        slab = _poly_slab(coeffs, expo, pp, None).ravel()
        # same-value batches along the diagonal torus orbit have up to G
        # members, so top-k distinct values need ~k*G raw candidates
        m = min(2 * k * G, slab.size)
        part = np.argpartition(slab, slab.size - m)[slab.size - m:] if m < slab.size \
            else np.arange(slab.size)
        vals.append(slab[part])
        flats.append(part)
    else:
        stride = G ** (n - 1)
        for g0 in range(G):
            slab = _poly_slab(coeffs, expo, pp, g0).ravel()
            m = min(cand_per, slab.size)
            part = np.argpartition(slab, slab.size - m)[slab.size - m:] if m < slab.size \
                else np.arange(slab.size)
            vals.append(slab[part])
            flats.append(part + g0 * stride)
    return _merge_topk(np.concatenate(vals), np.concatenate(flats), k)


def bilinear_grid_topk(amat, phases, k):
    amat = np.ascontiguousarray(amat, dtype=np.complex128)
    n = amat.shape[1]
    G = phases.shape[1]
    total = G ** n
    cand_per = max(4 * k, 16)
    vals, flats = [], []

    def slab_values(base, axes):
        grids = np.meshgrid(*[phases[v] for v in axes], indexing="ij")
        x = np.stack([g.ravel() for g in grids], axis=-1)
        if base is not None:
            x = np.concatenate([np.full((x.shape[0], 1), base), x], axis=1)
        rows = np.einsum("cki,si->sck", amat, x)
        return np.abs(rows).sum(axis=2).max(axis=1)

    if total <= (1 << 20):
        v = slab_values(None, range(n))
        m = min(2 * k * G, v.size)
        part = np.argpartition(v, v.size - m)[v.size - m:] if m < v.size else np.arange(v.size)
        vals.append(v[part])
        flats.append(part)
    else:
        stride = G ** (n - 1)
        for g0 in range(G):
            v = slab_values(phases[0, g0], range(1, n))
            m = min(cand_per, v.size)
            part = np.argpartition(v, v.size - m)[v.size - m:] if m < v.size else np.arange(v.size)
            vals.append(v[part])
            flats.append(part + g0 * stride)
    return _merge_topk(np.concatenate(vals), np.concatenate(flats), k)
