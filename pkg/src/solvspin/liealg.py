"""Metric Lie algebras: connection, curvature, Ricci, standard decompositions,
nilsoliton solving and the Einstein extension construction.

Frames are always pseudo-orthonormal: the metric is diag(eps_1, ..., eps_n)
with eps_i = +-1.  Structure constants c[i][j][k] give [e_i, e_j] = sum_k
c[i][j][k] e_k; entries may be Fractions, TowerScalars or FloatScalars, and
every operation below is generic over those.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import FloatScalar, TowerScalar, _square_part, sqrt_scalar
from .linalg import (
    identity,
    mat_equal,
    mat_mul,
    mat_vec,
    mat_from_rows,
    mat_scale,
    mat_sub,
    rref,
    transpose,
    vec_add,
    zeros,
)

F0 = Fraction(0)
F1 = Fraction(1)
HALF = Fraction(1, 2)


class StructureError(ValueError):
    """Ill-formed structure constants (duplicates, antisymmetry, Jacobi)."""


class NotStandardError(ValueError):
    """The given index split is not a standard decomposition."""


class DerivationError(ValueError):
    """An endomorphism fails the derivation or symmetry requirement."""


class IsotropicPivotError(ValueError):
    """Exact Gram-Schmidt hit an isotropic pivot."""


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants in a fixed frame; antisymmetry is enforced."""

    dim: int
    structure: tuple  # structure[i][j][k] = coefficient of e_k in [e_i, e_j]

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict) -> "LieAlgebra":
        """Build from {(i, j): {k: coeff}} with 0-based i < j."""
        c = [[[F0 for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
        for (i, j), comps in brackets.items():
            if not (0 <= i < j < dim):
                raise StructureError("bracket pair (%d, %d) needs 0 <= i < j < dim" % (i, j))
            items = comps.items() if isinstance(comps, dict) else comps
            for k, coeff in items:
                if not (0 <= k < dim):
                    raise StructureError("component index %d out of range" % k)
                c[i][j][k] = coeff
                c[j][i][k] = -coeff
        return cls(dim, tuple(tuple(tuple(row) for row in plane) for plane in c))

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebra":
        return cls.from_brackets(dim, {})

    def bracket_basis(self, i: int, j: int) -> tuple:
        return self.structure[i][j]

    def bracket(self, x: Sequence, y: Sequence) -> tuple:
        out = [F0] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                row = self.structure[i][j]
                for k in range(self.dim):
                    if not row[k] == 0:
                        out[k] = out[k] + xi * yj * row[k]
        return tuple(out)

    def ad_basis(self, i: int) -> tuple:
        """Matrix of ad e_i: v -> [e_i, v]."""
        n = self.dim
        return tuple(tuple(self.structure[i][j][k] for j in range(n)) for k in range(n))

    def ad(self, v: Sequence) -> tuple:
        n = self.dim
        cols = [self.bracket(v, _basis_vec(n, j)) for j in range(n)]
        return tuple(tuple(cols[j][k] for j in range(n)) for k in range(n))


def _basis_vec(n: int, i: int) -> tuple:
    return tuple(F1 if j == i else F0 for j in range(n))


def jacobi_check(L: LieAlgebra) -> list[tuple[int, int, int]]:
    """Triples (i, j, k), i < j < k, where the Jacobi identity fails."""
    n = L.dim
    bad = []
    for i in range(n):
        ei = _basis_vec(n, i)
        for j in range(i + 1, n):
            ej = _basis_vec(n, j)
            bij = L.structure[i][j]
            for k in range(j + 1, n):
                ek = _basis_vec(n, k)
                total = vec_add(
                    vec_add(L.bracket(bij, ek), L.bracket(L.structure[j][k], ei)),
                    L.bracket(L.structure[k][i], ej),
                )
                if any(not t == 0 for t in total):
                    bad.append((i, j, k))
    return bad


def lower_central_series(L: LieAlgebra) -> tuple[list[int], bool]:
    """Dimensions of the descending series g, [g,g], [g,[g,g]], ...; nilpotency flag."""
    n = L.dim
    dims = [n]
    current = [_basis_vec(n, i) for i in range(n)]
    while True:
        gens = []
        for i in range(n):
            for w in current:
                v = L.bracket(_basis_vec(n, i), w)
                if any(not x == 0 for x in v):
                    gens.append(list(v))
        if not gens:
            dims.append(0)
            return dims, True
        d = len(rref(gens, n))
        dims.append(d)
        if d == dims[-2]:
            return dims, False
        current = [tuple(row) for row in gens[:d]]


@dataclass(frozen=True)
class MetricLieAlgebra:
    """Lie algebra plus a diagonal +-1 metric in the fixed frame."""

    algebra: LieAlgebra
    signs: tuple

    def __post_init__(self):
        if len(self.signs) != self.algebra.dim:
            raise ValueError("signature length must match dimension")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signature entries must be +-1")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def inner(self, v: Sequence, w: Sequence):
        acc = F0
        for s, a, b in zip(self.signs, v, w):
            if a == 0 or b == 0:
                continue
            acc = acc + s * a * b
        return acc

    def transpose(self, f):
        return metric_transpose(f, self.signs)

    def symmetric_part(self, f):
        return symmetric_part(f, self.signs)


def metric_transpose(f, signs) -> tuple:
    """Metric transpose: g(f* v, w) = g(v, f w) for the diagonal metric."""
    n = len(signs)
    return tuple(
        tuple(signs[i] * signs[j] * f[j][i] for j in range(n)) for i in range(n)
    )


def symmetric_part(f, signs) -> tuple:
    ft = metric_transpose(f, signs)
    return tuple(
        tuple(HALF * (f[i][j] + ft[i][j]) for j in range(len(signs)))
        for i in range(len(signs))
    )


def is_metric_symmetric(f, signs) -> bool:
    return mat_equal(f, metric_transpose(f, signs))


def is_metric_skew(f, signs) -> bool:
    ft = metric_transpose(f, signs)
    return all(
        all(f[i][j] + ft[i][j] == 0 for j in range(len(signs)))
        for i in range(len(signs))
    )


def trace(f):
    acc = f[0][0]
    for i in range(1, len(f)):
        acc = acc + f[i][i]
    return acc


@dataclass(frozen=True)
class Connection:
    """Levi-Civita table: gamma[i][j][k] with nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k."""

    gamma: tuple

    def nabla(self, i: int) -> tuple:
        """Matrix of w -> nabla_{e_i} w (covariant derivative in direction e_i)."""
        n = len(self.gamma)
        return tuple(tuple(self.gamma[i][j][k] for j in range(n)) for k in range(n))

    def derivative(self, i: int, j: int) -> tuple:
        return self.gamma[i][j]


def levi_civita(M: MetricLieAlgebra) -> Connection:
    """Connection from the operator form of the Koszul formula.

    nabla_w v = -ad(v)^s w - (1/2) ad(w)* v for left-invariant fields; the
    result is checked to be torsion-free and metric-compatible.
    """
    L, signs = M.algebra, M.signs
    n = L.dim
    ads = [L.ad_basis(i) for i in range(n)]
    ad_sym = [symmetric_part(a, signs) for a in ads]
    ad_star = [metric_transpose(a, signs) for a in ads]
    gamma = []
    for i in range(n):
        plane = []
        for j in range(n):
            v1 = mat_vec(ad_sym[j], _basis_vec(n, i))
            v2 = mat_vec(ad_star[i], _basis_vec(n, j))
            plane.append(tuple(-(a) - HALF * b for a, b in zip(v1, v2)))
        gamma.append(tuple(plane))
    conn = Connection(tuple(gamma))
    _check_connection(M, conn)
    return conn


def _check_connection(M: MetricLieAlgebra, conn: Connection):
    n = M.dim
    g = conn.gamma
    eps = M.signs
    for i in range(n):
        for j in range(n):
            for k in range(n):
                # metric compatibility: g(nabla_i e_j, e_k) + g(e_j, nabla_i e_k) = 0
                if not (g[i][j][k] * eps[k] + g[i][k][j] * eps[j]) == 0:
                    raise StructureError("connection is not metric-compatible")
                # zero torsion: nabla_i e_j - nabla_j e_i = [e_i, e_j]
                if not (g[i][j][k] - g[j][i][k]) == M.algebra.structure[i][j][k]:
                    raise StructureError("connection has torsion")


def curvature(M: MetricLieAlgebra, conn: Connection) -> tuple:
    """R[i][j][k][l]: coefficient of e_l in R(e_i, e_j) e_k.

    R(x, y) = nabla_x nabla_y - nabla_y nabla_x - nabla_{[x, y]}.
    """
    n = M.dim
    A = [conn.nabla(i) for i in range(n)]
    R = []
    for i in range(n):
        plane = []
        for j in range(n):
            op = mat_sub(mat_mul(A[i], A[j]), mat_mul(A[j], A[i]))
            for k in range(n):
                coeff = M.algebra.structure[i][j][k]
                if not coeff == 0:
                    op = mat_sub(op, mat_scale(coeff, A[k]))
            # op columns are R(e_i, e_j) e_k
            plane.append(tuple(tuple(op[l][k] for l in range(n)) for k in range(n)))
        R.append(tuple(plane))
    return tuple(R)


@dataclass(frozen=True)
class RicciData:
    ric: tuple        # symmetric bilinear form, ric[i][j]
    operator: tuple   # Ric with g(Ric v, w) = ric(v, w)
    scalar: object    # s = sum_i eps_i ric(e_i, e_i)


def _ricci_from_form(ric, signs) -> RicciData:
    n = len(signs)
    op = tuple(tuple(signs[k] * ric[j][k] for j in range(n)) for k in range(n))
    s = F0
    for i in range(n):
        s = s + signs[i] * ric[i][i]
    return RicciData(mat_from_rows(ric), op, s)


def ricci(M: MetricLieAlgebra, R=None) -> RicciData:
    """Ricci tensor as the trace of curvature, ric(y, z) = sum_i R[i][y][z][i].

    The sign convention makes heis3 with the definite metric give
    ric = diag(-1/2, -1/2, 1/2) and hyperbolic models a negative Einstein
    constant.
    """
    if R is None:
        R = curvature(M, levi_civita(M))
    n = M.dim
    ric = [[F0] * n for _ in range(n)]
    for y in range(n):
        for z in range(n):
            acc = F0
            for i in range(n):
                acc = acc + R[i][y][z][i]
            ric[y][z] = acc
    return _ricci_from_form(ric, M.signs)


def scalar_curvature(M: MetricLieAlgebra):
    return ricci(M).scalar


# ---------------------------------------------------------------------------
# standard decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StandardDecomposition:
    """Frame split into a nilpotent-ideal part and an abelian part.

    phi[alpha] is the matrix of phi_alpha = -ad e_alpha restricted to the
    nilpotent part, written in nil-index order.
    """

    nil_indices: tuple
    abelian_indices: tuple
    phi: tuple


def standard_decomposition(M: MetricLieAlgebra, abelian_indices: Sequence[int]) -> StandardDecomposition:
    n = M.dim
    ab = tuple(sorted(abelian_indices))
    nil = tuple(i for i in range(n) if i not in set(ab))
    if set(ab) | set(nil) != set(range(n)) or len(set(ab)) != len(ab):
        raise NotStandardError("index split must partition the frame")
    phis = []
    for a in ab:
        ada = M.algebra.ad_basis(a)
        phis.append(tuple(tuple(-ada[nil[p]][nil[q]] for q in range(len(nil))) for p in range(len(nil))))
    return StandardDecomposition(nil, ab, tuple(phis))


def restrict(M: MetricLieAlgebra, indices: Sequence[int]) -> MetricLieAlgebra:
    """Metric subalgebra spanned by the given frame indices (must close)."""
    idx = list(indices)
    pos = {i: p for p, i in enumerate(idx)}
    n = len(idx)
    c = [[[F0] * n for _ in range(n)] for _ in range(n)]
    full = M.algebra.structure
    for p, i in enumerate(idx):
        for q, j in enumerate(idx):
            for k in range(M.dim):
                coeff = full[i][j][k]
                if coeff == 0:
                    continue
                if k not in pos:
                    raise NotStandardError(
                        "span of indices %r does not close under the bracket" % (idx,))
                c[p][q][pos[k]] = coeff
    alg = LieAlgebra(n, tuple(tuple(tuple(r) for r in pl) for pl in c))
    return MetricLieAlgebra(alg, tuple(M.signs[i] for i in idx))


@dataclass(frozen=True)
class StandardReport:
    is_standard: bool
    is_pseudo_iwasawa: bool
    failures: tuple


def check_standard(M: MetricLieAlgebra, decomp: StandardDecomposition) -> StandardReport:
    failures = []
    n = M.dim
    nil, ab = decomp.nil_indices, decomp.abelian_indices
    if sorted(nil + ab) != list(range(n)):
        return StandardReport(False, False, ("index split must partition the frame",))
    nil_set = set(nil)
    full = M.algebra.structure
    # a abelian
    for a in ab:
        for b in ab:
            if any(not x == 0 for x in full[a][b]):
                failures.append("abelian part brackets nontrivially: [e_%d, e_%d] != 0" % (a, b))
    # g an ideal: [anything, g] stays in g
    for i in range(n):
        for j in nil:
            for k in range(n):
                if k not in nil_set and not full[i][j][k] == 0:
                    failures.append("nil part is not an ideal: [e_%d, e_%d] leaks to e_%d" % (i, j, k))
    nilpotent = True
    if not failures:
        sub = restrict(M, nil) if nil else None
        if sub is not None and nil:
            _, nilpotent = lower_central_series(sub.algebra)
            if not nilpotent:
                failures.append("nil part is not nilpotent")
    is_standard = not failures
    is_pi = is_standard
    if is_standard:
        nil_signs = tuple(M.signs[i] for i in nil)
        for a_pos, a in enumerate(ab):
            if not is_metric_symmetric(decomp.phi[a_pos], nil_signs):
                is_pi = False
                failures.append("phi_%d is not metric-symmetric" % a)
    return StandardReport(is_standard, is_pi, tuple(failures))


def ricci_standard(M: MetricLieAlgebra, decomp: StandardDecomposition) -> RicciData:
    """Ricci of the full metric from nil-level data and the phi_alpha maps.

    Implements the three block formulas relating ric of the nilpotent part to
    ric of the whole algebra; raises NotStandardError when the decomposition
    does not validate.
    """
    report = check_standard(M, decomp)
    if not report.is_standard:
        raise NotStandardError("not a standard decomposition: %s" % "; ".join(report.failures))
    n = M.dim
    nil, ab = decomp.nil_indices, decomp.abelian_indices
    nil_signs = tuple(M.signs[i] for i in nil)
    ng = len(nil)
    sub = restrict(M, nil)
    ric_g = ricci(sub).ric if ng else ()
    ric = [[F0] * n for _ in range(n)]
    phi_star = [metric_transpose(p, nil_signs) for p in decomp.phi]
    phi_sym = [symmetric_part(p, nil_signs) for p in decomp.phi]
    # nil block
    for p in range(ng):
        for q in range(ng):
            acc = ric_g[p][q]
            for a_pos, a in enumerate(ab):
                eps_a = M.signs[a]
                comm = mat_sub(
                    mat_mul(decomp.phi[a_pos], phi_star[a_pos]),
                    mat_mul(phi_star[a_pos], decomp.phi[a_pos]),
                )
                acc = acc + HALF * eps_a * _inner_entry(comm, p, q, nil_signs)
                tr = trace(decomp.phi[a_pos])
                acc = acc - eps_a * tr * _inner_entry(phi_sym[a_pos], p, q, nil_signs)
            ric[nil[p]][nil[q]] = acc
    # mixed block: ric(v, e_alpha) = (1/2) Tr(ad v o phi_alpha*)
    for p in range(ng):
        adp = sub.algebra.ad_basis(p)
        for a_pos, a in enumerate(ab):
            val = HALF * trace(mat_mul(adp, phi_star[a_pos]))
            ric[nil[p]][a] = val
            ric[a][nil[p]] = val
    # abelian block: ric(e_alpha, e_beta) = -Tr(phi_alpha^s o phi_beta)
    for a_pos, a in enumerate(ab):
        for b_pos, b in enumerate(ab):
            ric[a][b] = -trace(mat_mul(phi_sym[a_pos], decomp.phi[b_pos]))
    return _ricci_from_form(ric, M.signs)


def _inner_entry(f, p, q, signs):
    """g(f e_p, e_q) for the diagonal metric on the subframe."""
    return signs[q] * f[q][p]


def standard_connection_identities(M: MetricLieAlgebra, decomp: StandardDecomposition) -> list[str]:
    """Check the four pseudo-Iwasawa connection identities entrywise.

    Returns failure descriptions (empty when all hold): nabla_{e_alpha} = 0 on
    everything, nabla_w e_alpha = phi_alpha w, and nabla_w v differing from the
    nil-level connection only by -sum_alpha g(phi_alpha w, v) eps_alpha e_alpha.
    """
    conn = levi_civita(M)
    nil, ab = decomp.nil_indices, decomp.abelian_indices
    nil_signs = tuple(M.signs[i] for i in nil)
    sub = restrict(M, nil)
    sub_conn = levi_civita(sub)
    fails = []
    n = M.dim
    for a in ab:
        for j in range(n):
            if any(not x == 0 for x in conn.derivative(a, j)):
                fails.append("nabla_{e_%d} e_%d != 0" % (a, j))
    for w_pos, w in enumerate(nil):
        for a_pos, a in enumerate(ab):
            got = conn.derivative(w, a)
            want = [F0] * n
            for p in range(len(nil)):
                want[nil[p]] = decomp.phi[a_pos][p][w_pos]
            if any(not g == t for g, t in zip(got, want)):
                fails.append("nabla_{e_%d} e_%d != phi_%d e_%d" % (w, a, a, w))
    for w_pos, w in enumerate(nil):
        for v_pos, v in enumerate(nil):
            got = conn.derivative(w, v)
            want = [F0] * n
            for k in range(len(nil)):
                want[nil[k]] = sub_conn.gamma[w_pos][v_pos][k]
            for a_pos, a in enumerate(ab):
                phv = tuple(decomp.phi[a_pos][p][w_pos] for p in range(len(nil)))
                inner = F0
                for p in range(len(nil)):
                    inner = inner + nil_signs[p] * phv[p] * (F1 if p == v_pos else F0)
                want[a] = want[a] - M.signs[a] * inner
            if any(not g == t for g, t in zip(got, want)):
                fails.append("nabla_{e_%d} e_%d mixed-term identity fails" % (w, v))
    return fails


# ---------------------------------------------------------------------------
# nilsolitons and Einstein extensions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NilsolitonResult:
    lam: object
    derivation: tuple


def _sign_of(x) -> int:
    if isinstance(x, FloatScalar):
        v = x.value
    elif isinstance(x, TowerScalar):
        v = x.as_fraction()
    else:
        v = x
    return 1 if v > 0 else (-1 if v < 0 else 0)


def is_derivation(L: LieAlgebra, D) -> bool:
    n = L.dim
    for i in range(n):
        for j in range(i + 1, n):
            lhs = mat_vec(D, L.structure[i][j])
            di = tuple(D[k][i] for k in range(n))
            dj = tuple(D[k][j] for k in range(n))
            rhs = vec_add(L.bracket(di, _basis_vec(n, j)), L.bracket(_basis_vec(n, i), dj))
            if any(not a == b for a, b in zip(lhs, rhs)):
                return False
    return True


def nilsoliton_solve(M: MetricLieAlgebra) -> Optional[NilsolitonResult]:
    """Solve Ric = lam I + D with D a derivation, for nilpotent M.

    The derivation condition is affine in lam; a unique lam exists whenever the
    bracket is nonzero.  Returns None when no lam works; the abelian case
    returns lam = 0, D = 0 by convention.
    """
    L = M.algebra
    if jacobi_check(L):
        raise StructureError("Jacobi identity fails")
    _, nilpotent = lower_central_series(L)
    if not nilpotent:
        raise ValueError("nilsoliton_solve needs a nilpotent algebra")
    n = L.dim
    ric_op = ricci(M).operator
    # condition: Ric[x,y] + lam [x,y] = [Ric x, y] + [x, Ric y]
    lam = None
    pending = []  # (coef, rhs) with coef * lam = rhs
    for i in range(n):
        for j in range(i + 1, n):
            bij = L.structure[i][j]
            ri = tuple(ric_op[k][i] for k in range(n))
            rj = tuple(ric_op[k][j] for k in range(n))
            rhs_vec = vec_add(L.bracket(ri, _basis_vec(n, j)), L.bracket(_basis_vec(n, i), rj))
            lhs_vec = mat_vec(ric_op, bij)
            for k in range(n):
                coef = bij[k]
                rhs = rhs_vec[k] - lhs_vec[k]
                if coef == 0:
                    if not rhs == 0:
                        return None
                else:
                    pending.append((coef, rhs))
    if not pending:
        zero = F0
        return NilsolitonResult(zero, zeros(n, n))
    coef0, rhs0 = pending[0]
    lam = rhs0 / coef0
    for coef, rhs in pending[1:]:
        if not coef * lam == rhs:
            return None
    D = mat_sub(ric_op, mat_scale(lam, identity(n)))
    if not is_derivation(L, D):
        return None
    return NilsolitonResult(lam, D)


def extend_by_derivation(M: MetricLieAlgebra, D, eps0: int):
    """Append a frame vector acting by -D: the extension g x|_D R.

    The new vector sits at the last frame index with sign eps0, bracket
    [e_new, v] = -D v, so phi_new = D; the output is standard and, for
    metric-symmetric D, pseudo-Iwasawa.
    """
    if eps0 not in (1, -1):
        raise ValueError("eps0 must be +-1")
    L = M.algebra
    n = L.dim
    if not is_derivation(L, D):
        raise DerivationError("D is not a derivation")
    if not is_metric_symmetric(D, M.signs):
        raise DerivationError("D is not metric-symmetric")
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            comps = {k: L.structure[i][j][k] for k in range(n) if not L.structure[i][j][k] == 0}
            if comps:
                brackets[(i, j)] = comps
    for j in range(n):
        comps = {k: -D[k][j] for k in range(n) if not D[k][j] == 0}
        if comps:
            brackets[(j, n)] = {k: -v for k, v in comps.items()}
    ext_alg = LieAlgebra.from_brackets(n + 1, brackets)
    ext = MetricLieAlgebra(ext_alg, tuple(M.signs) + (eps0,))
    decomp = standard_decomposition(ext, (n,))
    return ext, decomp


def einstein_check(M: MetricLieAlgebra):
    """Return lam with ric = lam g (exact entrywise), or None."""
    data = ricci(M)
    n = M.dim
    lam = None
    for i in range(n):
        for j in range(n):
            want_zero = i != j
            entry = data.ric[i][j]
            if want_zero:
                if not entry == 0:
                    return None
            else:
                val = entry * M.signs[i]  # ric_ii = lam * eps_i
                if lam is None:
                    lam = val
                elif not lam == val:
                    return None
    return lam


def einstein_extension(M: MetricLieAlgebra, eps0: Optional[int] = None):
    """Einstein extension of a nilsoliton: scale D and extend, then verify.

    Solves the nilsoliton equation, rescales the derivation so the extended
    metric is Einstein (requires Tr D != 0), and checks the result with
    einstein_check before returning (extension, decomposition, lam).
    """
    res = nilsoliton_solve(M)
    if res is None:
        raise ValueError("metric is not a nilsoliton")
    D = res.derivation
    tr = trace(D)
    tr2 = trace(mat_mul(D, D))
    if tr2 == 0 or tr == 0:
        raise ValueError("no Einstein extension: Tr D^2 = 0 or Tr D = 0")
    sign_tr = _sign_of(tr)
    if eps0 is None:
        eps0 = sign_tr
    elif eps0 != sign_tr:
        raise ValueError("eps0 must match the sign of Tr D for a real scaling")
    c = sqrt_scalar(1 / (eps0 * tr))
    phi0 = mat_scale(c, D)
    ext, decomp = extend_by_derivation(M, phi0, eps0)
    lam = einstein_check(ext)
    if lam is None:
        raise RuntimeError("scaled extension failed the Einstein check")
    return ext, decomp, lam


# ---------------------------------------------------------------------------
# exact Gram-Schmidt (for users with non-orthonormal metric input)
# ---------------------------------------------------------------------------

def orthonormalize_gram(G) -> tuple:
    """Congruence-diagonalize a rational Gram matrix to diag(+-1).

    Returns (P, signs) with P^T G P = diag(signs).  Fails loudly on isotropic
    pivots (zero diagonal at elimination time) and when normalization would
    need an irrational scale.
    """
    n = len(G)
    work = [[Fraction(x) for x in row] for row in G]
    P = [[F1 if i == j else F0 for j in range(n)] for i in range(n)]
    for k in range(n):
        if work[k][k] == 0:
            swap = next((m for m in range(k + 1, n) if work[m][m] != 0), None)
            if swap is None:
                raise IsotropicPivotError("isotropic pivot at position %d" % k)
            for r in range(n):
                work[r][k], work[r][swap] = work[r][swap], work[r][k]
            work[k], work[swap] = work[swap], work[k]
            for r in range(n):
                P[r][k], P[r][swap] = P[r][swap], P[r][k]
        piv = work[k][k]
        for m in range(k + 1, n):
            f = work[m][k] / piv
            if f == 0:
                continue
            for c in range(n):
                work[m][c] -= f * work[k][c]
            for r in range(n):
                work[r][m] -= f * work[r][k]
                P[r][m] -= f * P[r][k]
    signs = []
    for k in range(n):
        d = work[k][k]
        mag = abs(d)
        num_s, num_f = _square_part(mag.numerator)
        den_s, den_f = _square_part(mag.denominator)
        if num_f != 1 or den_f != 1:
            raise ValueError(
                "normalization of pivot %s needs an irrational scale" % (d,))
        scale = Fraction(den_s, num_s)
        for r in range(n):
            P[r][k] *= scale
        signs.append(1 if d > 0 else -1)
    return mat_from_rows(P), tuple(signs)
