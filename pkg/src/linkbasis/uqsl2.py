"""Exact representation engine for the generic-q quantum deformation of sl2.

Irreducibles: M_d has basis e_0, ..., e_{d-1} (s = d - 1) with

    K.e_l = q^{s-2l} e_l,   F.e_l = e_{l+1} (0 at the top),
    E.e_l = [l][s-l+1] e_{l-1} (0 at the bottom).

Tensor products are taken in REVERSED order: the tensor product over points
1..p is M_{d_p} (x) ... (x) M_{d_1}, i.e. point i sits at tensor position
p - i + 1 from the left.  A TensorVector stores coefficients against the
point-indexed multi-index (l_1, ..., l_p); every coproduct leg is translated
through this convention here and nowhere else:

  * E acts at point i with a factor q^{sum_{j<i} (s_j - 2 l_j)}  (K legs sit
    to the right of the E leg, i.e. at smaller point indices),
  * F acts at point i with a factor q^{-sum_{j>i} (s_j - 2 l_j)}  (K^{-1}
    legs sit to the left, i.e. at larger point indices),
  * K is diagonal with eigenvalue q^{sum_i (s_i - 2 l_i)}.

Two-point Clebsch-Gordan data (highest weight vectors, towers, and the dual
extraction functionals) are memoized per dimension pair; all pair projections
and embeddings are built from them.  The trivial factor M_1 is identified
with the scalars via its Clebsch-Gordan generator and omitted from shapes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from .linalg import solve_unique
from .qfield import (ExactScalar, S_ONE, S_ZERO, parse_scalar, qfact, qint,
                     render_scalar)

# A shape is the tuple of factor dimensions (d_1, ..., d_p), point-indexed.
TensorShape = tuple[int, ...]

Q = ExactScalar.q_power
QMINUS_QINV = Q(1) - Q(-1)      # q - q^{-1}


@dataclass(frozen=True)
class TensorVector:
    """Sparse exact-coefficient vector in M_{d_p} (x) ... (x) M_{d_1}."""
    shape: TensorShape
    coeffs: dict[tuple[int, ...], ExactScalar]

    @staticmethod
    def of(shape, coeffs) -> "TensorVector":
        shape = tuple(shape)
        clean = {}
        for idx, v in coeffs.items():
            idx = tuple(idx)
            if len(idx) != len(shape) or any(not 0 <= l < d for l, d in zip(idx, shape)):
                raise ValueError(f"index {idx} out of bounds for shape {shape}")
            if v:
                clean[idx] = v
        return TensorVector(shape, clean)

    @staticmethod
    def basis_vector(shape, index) -> "TensorVector":
        return TensorVector.of(shape, {tuple(index): S_ONE})

    @staticmethod
    def zero(shape) -> "TensorVector":
        return TensorVector(tuple(shape), {})

    @staticmethod
    def scalar(value: ExactScalar) -> "TensorVector":
        """A vector in the empty tensor product (rank-0 shape)."""
        return TensorVector.of((), {(): value})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return (isinstance(other, TensorVector)
                and self.shape == other.shape and self.coeffs == other.coeffs)

    __hash__ = None

    def __add__(self, other: "TensorVector") -> "TensorVector":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = dict(self.coeffs)
        for idx, v in other.coeffs.items():
            w = out.get(idx)
            w = v if w is None else w + v
            if w:
                out[idx] = w
            else:
                out.pop(idx, None)
        return TensorVector(self.shape, out)

    def __sub__(self, other: "TensorVector") -> "TensorVector":
        return self + other.scale(S_MINUS_ONE)

    def scale(self, k: ExactScalar) -> "TensorVector":
        if not k:
            return TensorVector(self.shape, {})
        return TensorVector(self.shape, {i: v * k for i, v in self.coeffs.items()})

    def coefficient(self, index) -> ExactScalar:
        return self.coeffs.get(tuple(index), S_ZERO)

    def to_json(self) -> str:
        return json.dumps({
            "shape": list(self.shape),
            "coeffs": [{"index": list(i), "value": render_scalar(self.coeffs[i])}
                       for i in sorted(self.coeffs)],
        }, separators=(",", ":"))

    @staticmethod
    def from_json(s: str) -> "TensorVector":
        d = json.loads(s)
        return TensorVector.of(d["shape"],
                               {tuple(c["index"]): parse_scalar(c["value"])
                                for c in d["coeffs"]})

    def __repr__(self) -> str:
        return f"TensorVector(shape={self.shape}, {len(self.coeffs)} terms)"


S_MINUS_ONE = ExactScalar.from_int(-1)


def tensor(low: TensorVector, high: TensorVector) -> TensorVector:
    """Tensor product with `low` occupying the lower point indices."""
    out: dict[tuple[int, ...], ExactScalar] = {}
    for i1, v1 in low.coeffs.items():
        for i2, v2 in high.coeffs.items():
            out[i1 + i2] = v1 * v2
    return TensorVector(low.shape + high.shape, out)


# -- generator actions ---------------------------------------------------------

def act_K(v: TensorVector, power: int = 1) -> TensorVector:
    out = {}
    for idx, val in v.coeffs.items():
        w = sum(d - 1 - 2 * l for d, l in zip(v.shape, idx))
        out[idx] = val * Q(power * w)
    return TensorVector(v.shape, out)


def act_E(v: TensorVector) -> TensorVector:
    out: dict[tuple[int, ...], ExactScalar] = {}
    for idx, val in v.coeffs.items():
        wleft = 0  # sum_{j<i} (s_j - 2 l_j)
        for i, (d, l) in enumerate(zip(v.shape, idx)):
            if l > 0:
                c = qint(l) * qint(d - l) * Q(wleft) * val
                if c:
                    nidx = idx[:i] + (l - 1,) + idx[i + 1:]
                    w = out.get(nidx)
                    w = c if w is None else w + c
                    if w:
                        out[nidx] = w
                    else:
                        out.pop(nidx, None)
            wleft += d - 1 - 2 * l
    return TensorVector(v.shape, out)


def act_F(v: TensorVector) -> TensorVector:
    out: dict[tuple[int, ...], ExactScalar] = {}
    total = {idx: sum(d - 1 - 2 * l for d, l in zip(v.shape, idx))
             for idx in v.coeffs}
    for idx, val in v.coeffs.items():
        wleft = 0
        for i, (d, l) in enumerate(zip(v.shape, idx)):
            if l < d - 1:
                wright = total[idx] - wleft - (d - 1 - 2 * l)
                c = Q(-wright) * val
                nidx = idx[:i] + (l + 1,) + idx[i + 1:]
                w = out.get(nidx)
                w = c if w is None else w + c
                if w:
                    out[nidx] = w
                else:
                    out.pop(nidx, None)
            wleft += d - 1 - 2 * l
    return TensorVector(v.shape, out)


def act_F_power(v: TensorVector, k: int) -> TensorVector:
    for _ in range(k):
        v = act_F(v)
    return v


def weight_of(v: TensorVector) -> int:
    """The K-exponent, defined only for weight-homogeneous vectors."""
    ws = {sum(d - 1 - 2 * l for d, l in zip(v.shape, idx)) for idx in v.coeffs}
    if len(ws) != 1:
        raise ValueError("vector is not weight-homogeneous")
    return ws.pop()


# -- Clebsch-Gordan data for a pair of factors ---------------------------------

def cg_range(d1: int, d2: int) -> list[int]:
    return list(range(d1 + d2 - 1, abs(d1 - d2), -2))


def cg_hwv(d: int, d1: int, d2: int) -> TensorVector:
    """The highest weight vector of the M_d component of M_{d2} (x) M_{d1},
    on the two-point shape (d1, d2)."""
    s1, s2 = d1 - 1, d2 - 1
    if d not in cg_range(d1, d2):
        raise ValueError(f"M_{d} does not occur in M_{d2} (x) M_{d1}")
    m = (d1 + d2 - 1 - d) // 2
    denom = QMINUS_QINV ** m
    coeffs = {}
    for l1 in range(max(0, m - s2), min(m, s1) + 1):
        l2 = m - l1
        c = (qfact(s1 - l1) * qfact(s2 - l2)
             / (qfact(l1) * qfact(s1) * qfact(l2) * qfact(s2)))
        c = c * Q(l1 * (s1 - l1 + 1), (-1) ** l1) / denom
        coeffs[(l1, l2)] = c
    return TensorVector.of((d1, d2), coeffs)


class _CGData:
    """Towers tau_l^{(d)} and the dual extraction rows for one (d1, d2)."""

    def __init__(self, d1: int, d2: int):
        self.d1, self.d2 = d1, d2
        self.tower: dict[tuple[int, int], TensorVector] = {}
        for d in cg_range(d1, d2):
            t = cg_hwv(d, d1, d2)
            for l in range(d):
                self.tower[(d, l)] = t
                t = act_F(t)
        # invert each weight block: labels (d, l) <-> local coords (l1, l2)
        self.extract: dict[tuple[int, int], list[tuple[tuple[int, int], ExactScalar]]] = {}
        s1s2 = (d1 - 1) + (d2 - 1)
        for w in range(s1s2 + 1):
            coords = [(l1, w - l1) for l1 in range(max(0, w - (d2 - 1)), min(d1 - 1, w) + 1)]
            labels = [(d, l) for (d, l) in self.tower
                      if (d1 + d2 - 1 - d) // 2 + l == w]
            labels.sort()
            if len(labels) != len(coords):
                raise AssertionError("CG weight block is not square")
            # The extraction row y for a label solves M^T y = e_label, where
            # M has columns tower[label] restricted to this weight block.
            mt = [{i: self.tower[lab].coefficient(c) for i, c in enumerate(coords)}
                  for lab in labels]
            for k, lab in enumerate(labels):
                rhs = [S_ONE if kk == k else S_ZERO for kk in range(len(labels))]
                y = solve_unique(mt, rhs, len(coords))
                for i, c in enumerate(coords):
                    if y[i]:
                        self.extract.setdefault(c, []).append((lab, y[i]))


@lru_cache(maxsize=None)
def _cg(d1: int, d2: int) -> _CGData:
    return _CGData(d1, d2)


def cg_basis(d1: int, d2: int) -> dict[tuple[int, int], TensorVector]:
    """The full family tau_l^{(d)} indexed by (d, l); a basis of the pair."""
    return dict(_cg(d1, d2).tower)


# -- pair projections and embeddings -------------------------------------------

def reduce_pair(v: TensorVector, j: int, d: int) -> TensorVector:
    """pi-hat_j^{(d)}: keep the M_d component of points (j, j+1), re-expressed
    on a single factor at position j (dropped entirely when d == 1)."""
    p = len(v.shape)
    if not 1 <= j <= p - 1:
        raise ValueError(f"pair position {j} out of range for {p} points")
    d1, d2 = v.shape[j - 1], v.shape[j]
    if d not in cg_range(d1, d2):
        raise ValueError(f"component M_{d} not in range of pair ({d1},{d2})")
    data = _cg(d1, d2)
    if d == 1:
        out_shape = v.shape[:j - 1] + v.shape[j + 1:]
    else:
        out_shape = v.shape[:j - 1] + (d,) + v.shape[j + 1:]
    out: dict[tuple[int, ...], ExactScalar] = {}
    for idx, val in v.coeffs.items():
        local = (idx[j - 1], idx[j])
        for (dd, l), sc in data.extract.get(local, ()):
            if dd != d:
                continue
            if d == 1:
                nidx = idx[:j - 1] + idx[j + 1:]
            else:
                nidx = idx[:j - 1] + (l,) + idx[j + 1:]
            c = sc * val
            w = out.get(nidx)
            w = c if w is None else w + c
            if w:
                out[nidx] = w
            else:
                out.pop(nidx, None)
    return TensorVector(out_shape, out)


def embed_pair(v: TensorVector, j: int, d1: int, d2: int) -> TensorVector:
    """iota_j^{(d; d1, d2)}: expand the dimension-d factor at position j into
    the tau-tower of the pair (d1, d2)."""
    d = v.shape[j - 1]
    data = _cg(d1, d2)
    out_shape = v.shape[:j - 1] + (d1, d2) + v.shape[j:]
    out: dict[tuple[int, ...], ExactScalar] = {}
    for idx, val in v.coeffs.items():
        l = idx[j - 1]
        for (l1, l2), sc in data.tower[(d, l)].coeffs.items():
            nidx = idx[:j - 1] + (l1, l2) + idx[j:]
            c = sc * val
            w = out.get(nidx)
            w = c if w is None else w + c
            if w:
                out[nidx] = w
            else:
                out.pop(nidx, None)
    return TensorVector(out_shape, out)


def project_pair(v: TensorVector, j: int, d: int) -> TensorVector:
    """pi_j^{(d)} = iota_j . pi-hat_j: the idempotent onto the M_d component."""
    d1, d2 = v.shape[j - 1], v.shape[j]
    return embed_pair(reduce_pair(v, j, d), j, d1, d2)


def project_general(v: TensorVector, j: int, m: int) -> TensorVector:
    """pi-tilde_j^{(delta)}: lower the pair (d_j, d_{j+1}) by m, keeping the
    top component of the lowered pair; trivial factors are omitted."""
    d1, d2 = v.shape[j - 1], v.shape[j]
    if not 1 <= m <= min(d1, d2) - 1:
        raise ValueError(f"m={m} out of range for pair ({d1},{d2})")
    delta = d1 + d2 - 1 - 2 * m
    w = reduce_pair(v, j, delta)
    nd1, nd2 = d1 - m, d2 - m
    if nd1 == 1 or nd2 == 1:
        # the reduced pair is M_delta (x) M_1 or M_1 (x) M_delta; both are
        # identified with the single factor already produced by reduce_pair
        return w
    return embed_pair(w, j, nd1, nd2)


# -- tensor powers of the two-dimensional irreducible ---------------------------

@lru_cache(maxsize=None)
def theta(l: int, s: int) -> TensorVector:
    """theta_l^{(s)} = F^l.(e_0 (x) ... (x) e_0) in M_2^(x s), by the closed
    subset-sum formula (slots r counted from the left are points s+1-r)."""
    if not 0 <= l <= s:
        raise ValueError(f"theta index l={l} out of range for s={s}")
    from itertools import combinations
    pref = qfact(l) * Q(l * (l - 1) // 2)
    coeffs = {}
    for rho in combinations(range(1, s + 1), l):
        idx = [0] * s
        for r in rho:
            idx[s - r] = 1
        coeffs[tuple(idx)] = pref * Q(sum(1 - r for r in rho))
    return TensorVector.of((2,) * s, coeffs)


def embed_theta(v: TensorVector, sizes: tuple[int, ...]) -> TensorVector:
    """I^{(sizes)}: substitute theta_{l_i}^{(sizes_i)} for each coordinate,
    mapping a shape (sizes_1+1, ..., sizes_k+1) vector into M_2^(x n)."""
    if v.shape != tuple(r + 1 for r in sizes):
        raise ValueError("shape does not match block sizes")
    out_coeffs: dict[tuple[int, ...], ExactScalar] = {}
    for idx, val in v.coeffs.items():
        partial: dict[tuple[int, ...], ExactScalar] = {(): val}
        for i, r in enumerate(sizes):
            th = theta(idx[i], r)
            nxt: dict[tuple[int, ...], ExactScalar] = {}
            for base, bval in partial.items():
                for tidx, tval in th.coeffs.items():
                    nxt[base + tidx] = bval * tval
            partial = nxt
        for full, fval in partial.items():
            w = out_coeffs.get(full)
            w = fval if w is None else w + fval
            if w:
                out_coeffs[full] = w
            else:
                out_coeffs.pop(full, None)
    n = sum(sizes)
    return TensorVector((2,) * n, out_coeffs)


def project_blocks(v: TensorVector, valences, s: int) -> TensorVector:
    """p-hat^{(valences, s)}: fuse consecutive M_2 blocks of sizes
    (valences_1, ..., valences_p, s) onto their top components, producing a
    vector on the shape (d_1, ..., d_p[, s+1]).  The leading block of size s
    occupies the highest point indices (leftmost tensor factors); it is
    omitted when s = 0."""
    valences = tuple(valences)
    sizes = valences + ((s,) if s else ())
    n = sum(sizes)
    if v.shape != (2,) * n:
        raise ValueError(f"expected M_2^(x{n}), got shape {v.shape}")
    pos = 1
    for r in sizes:
        # fuse the r factors now at positions pos..pos+r-1 onto the top
        for _ in range(r - 1):
            d1, d2 = v.shape[pos - 1], v.shape[pos]
            v = reduce_pair(v, pos, d1 + d2 - 1)
        pos += 1
    return v


def embed_blocks(v: TensorVector, valences, s: int) -> TensorVector:
    """I^{(valences, s)}: the theta-substitution inverse of project_blocks."""
    valences = tuple(valences)
    sizes = valences + ((s,) if s else ())
    return embed_theta(v, sizes)


# -- highest weight spaces -------------------------------------------------------

def weight_indices(dims: TensorShape, s: int) -> list[tuple[int, ...]]:
    """All multi-indices of K-weight q^s, in lexicographic order."""
    n = sum(d - 1 for d in dims)
    if (n - s) % 2 or s > n:
        return []
    target = (n - s) // 2

    out: list[tuple[int, ...]] = []

    def rec(i: int, left: int, prefix: tuple[int, ...]):
        if i == len(dims):
            if left == 0:
                out.append(prefix)
            return
        remaining = sum(d - 1 for d in dims[i + 1:])
        for l in range(min(dims[i] - 1, left) + 1):
            if left - l <= remaining:
                rec(i + 1, left - l, prefix + (l,))

    rec(0, target, ())
    return out


def hw_space(valences, s: int) -> list[TensorVector]:
    """Exact basis of {v : E.v = 0, K.v = q^s v} in the tensor product with
    d_i = valences_i + 1, by eliminating the E-action on the weight-q^s
    coordinate subspace."""
    from .linalg import kernel_basis
    dims = tuple(v + 1 for v in valences)
    cols = weight_indices(dims, s)
    if not cols:
        return []
    col_pos = {c: i for i, c in enumerate(cols)}
    rows_by_out: dict[tuple[int, ...], dict[int, ExactScalar]] = {}
    for idx in cols:
        e_img = act_E(TensorVector.basis_vector(dims, idx))
        for oidx, val in e_img.coeffs.items():
            rows_by_out.setdefault(oidx, {})[col_pos[idx]] = val
    rows = [rows_by_out[k] for k in sorted(rows_by_out)]
    basis = []
    for vec in kernel_basis(rows, len(cols)):
        basis.append(TensorVector(dims, {cols[c]: v for c, v in vec.items()}))
    return basis


# -- the R maps and the cyclic S map --------------------------------------------

class RMapError(ValueError):
    """Raised when the defining expansion of an R map fails to reconstruct
    the input, i.e. the input was not in the map's domain."""


def _check_expansion(v: TensorVector, tau0: TensorVector, s: int, front: bool) -> None:
    recon = TensorVector.zero(v.shape)
    term = tau0
    for k in range(s + 1):           # term = F^k tau0, paired with l = s - k
        l = s - k
        c = Q((l - 1) * (s - l) if front else (l + 1) * (s - l), (-1) ** (s - l))
        piece = {}
        for idx, val in term.coeffs.items():
            nidx = ((l,) + idx) if front else (idx + (l,))
            piece[nidx] = val * c
        recon = recon + TensorVector(v.shape, piece)
        if k < s:
            term = act_F(term)
    if recon != v:
        raise RMapError("input vector is not in the domain of the R map")


def r_plus(v: TensorVector, verify: bool = True) -> TensorVector:
    """R_+: extract tau_0^+ from v = sum_l (-1)^{s-l} q^{(l+1)(s-l)}
    e_l (x) F^{s-l}.tau_0^+, the extremal factor being the LAST point."""
    if not v.shape:
        raise ValueError("r_plus needs at least one tensor factor")
    s = v.shape[-1] - 1
    tau0 = TensorVector(v.shape[:-1],
                        {idx[:-1]: val for idx, val in v.coeffs.items()
                         if idx[-1] == s})
    if verify:
        _check_expansion(v, tau0, s, front=False)
    return tau0


def r_minus(v: TensorVector, verify: bool = True) -> TensorVector:
    """R_-: extract tau_0^- from v = sum_l (-1)^{s-l} q^{(l-1)(s-l)}
    F^{s-l}.tau_0^- (x) e_l, the extremal factor being the FIRST point."""
    if not v.shape:
        raise ValueError("r_minus needs at least one tensor factor")
    s = v.shape[0] - 1
    tau0 = TensorVector(v.shape[1:],
                        {idx[1:]: val for idx, val in v.coeffs.items()
                         if idx[0] == s})
    if verify:
        _check_expansion(v, tau0, s, front=True)
    return tau0


def r_minus_inverse(tau0: TensorVector, s: int) -> TensorVector:
    """Rebuild the defect-free vector with extremal first factor M_{s+1}."""
    shape = (s + 1,) + tau0.shape
    out = TensorVector.zero(shape)
    term = tau0
    for k in range(s + 1):
        l = s - k
        c = Q((l - 1) * (s - l), (-1) ** (s - l))
        piece = {(l,) + idx: val * c for idx, val in term.coeffs.items()}
        out = out + TensorVector(shape, piece)
        if k < s:
            term = act_F(term)
    return out


def r_plus_inverse(tau0: TensorVector, s: int) -> TensorVector:
    """Rebuild the defect-free vector with extremal last factor M_{s+1}."""
    shape = tau0.shape + (s + 1,)
    out = TensorVector.zero(shape)
    term = tau0
    for k in range(s + 1):
        l = s - k
        c = Q((l + 1) * (s - l), (-1) ** (s - l))
        piece = {idx + (l,): val * c for idx, val in term.coeffs.items()}
        out = out + TensorVector(shape, piece)
        if k < s:
            term = act_F(term)
    return out


def smap(v: TensorVector) -> TensorVector:
    """S = R_-^{-1} . R_+: cyclically permute the extremal tensor factor
    from the last point to the first."""
    s = v.shape[-1] - 1
    return r_minus_inverse(r_plus(v), s)
