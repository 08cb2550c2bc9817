"""Clifford algebra representations on complex spinor spaces.

Generators gamma_a of size 2^floor(n/2) satisfy

    gamma_a gamma_b + gamma_b gamma_a = -2 eps_a delta_ab I,

so a frame vector acts with v.v.psi = -g(v, v) psi.  Matrices have entries in
Q(i) (stored as TowerScalar) and are built by iterated doubling, which keeps
them signed-permutation sparse; for odd n the representation is pinned down by
normalizing the volume element to act as +1 or +i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .exact import TS_I, TS_ONE, TS_ZERO, TowerScalar
from .linalg import mat_from_rows, nullspace
from .liealg import is_metric_skew

F0 = Fraction(0)
F1 = Fraction(1)
QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class CliffordRep:
    signs: tuple
    gammas: tuple                  # n dense N x N matrices over Q(i)
    volume_power: int | None       # odd n: volume element acts as i**k

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def spinor_dim(self) -> int:
        return len(self.gammas[0]) if self.gammas else 1

    def sparse_rows(self, a: int) -> tuple:
        cache = self.__dict__.get("_sparse")
        if cache is None:
            cache = tuple(_sparse_rows(g) for g in self.gammas)
            object.__setattr__(self, "_sparse", cache)
        return cache[a]


def _sparse_rows(mat) -> tuple:
    return tuple(
        tuple((j, v) for j, v in enumerate(row) if not v.is_zero) for row in mat
    )


def _sparse_mul(A_rows, B_rows, ncols: int):
    """Product of sparse-row matrices, returned in sparse-row form."""
    out = []
    for entries in A_rows:
        acc: dict[int, TowerScalar] = {}
        for k, val in entries:
            for j, w in B_rows[k]:
                prev = acc.get(j)
                nv = val * w if prev is None else prev + val * w
                if nv.is_zero:
                    acc.pop(j, None)
                else:
                    acc[j] = nv
        out.append(tuple(sorted(acc.items())))
    return tuple(out)


def _dense(rows_sparse, ncols: int) -> tuple:
    out = []
    for entries in rows_sparse:
        row = [TS_ZERO] * ncols
        for j, v in entries:
            row[j] = v
        out.append(tuple(row))
    return tuple(out)


def _tensor(small, big) -> tuple:
    """Kronecker product small (x) big for dense TowerScalar matrices."""
    sn = len(small)
    bn = len(big)
    out = []
    for i in range(sn):
        for bi in range(bn):
            row = []
            for j in range(sn):
                s = small[i][j]
                if s.is_zero:
                    row.extend([TS_ZERO] * bn)
                else:
                    row.extend([s * x for x in big[bi]])
            out.append(tuple(row))
    return tuple(out)


_PAULI_Z = ((TS_ONE, TS_ZERO), (TS_ZERO, -TS_ONE))


@lru_cache(maxsize=None)
def _definite_generators(n: int) -> tuple:
    """Generators squaring to -I for the all-plus signature, even n (cached)."""
    g1 = ((TS_ZERO, TS_ONE), (-TS_ONE, TS_ZERO))
    g2 = ((TS_ZERO, TS_I), (TS_I, TS_ZERO))
    gens = [g1, g2]
    size = 2
    while len(gens) < n:
        eye = tuple(
            tuple(TS_ONE if i == j else TS_ZERO for j in range(size)) for i in range(size)
        )
        new = [_tensor(_PAULI_Z, g) for g in gens]
        ieye = tuple(tuple(TS_I if i == j else TS_ZERO for j in range(size)) for i in range(size))
        new.append(_tensor(((TS_ZERO, TS_ONE), (TS_ONE, TS_ZERO)), ieye))
        new.append(_tensor(((TS_ZERO, TS_ONE), (-TS_ONE, TS_ZERO)), eye))
        gens = new
        size *= 2
    return tuple(gens)


def _scalar_of(mat) -> TowerScalar | None:
    """The scalar s when mat = s I, else None."""
    n = len(mat)
    s = mat[0][0]
    for i in range(n):
        for j in range(n):
            want = s if i == j else TS_ZERO
            if not mat[i][j] == want:
                return None
    return s


def build_gammas(signs: Sequence[int]) -> CliffordRep:
    """Representation of the Clifford algebra for a +-1 signature list."""
    signs = tuple(signs)
    n = len(signs)
    if n < 1:
        raise ValueError("need n >= 1")
    if any(s not in (1, -1) for s in signs):
        raise ValueError("signature entries must be +-1")
    if n == 1:
        gens = [((TS_I,),)]
    elif n % 2 == 0:
        gens = list(_definite_generators(n))
    else:
        gens = list(_odd_definite_generators(n))
    # sign fix: gamma_a -> i gamma_a wherever eps_a = -1
    gammas = []
    for a in range(n):
        g = gens[a]
        if signs[a] == -1:
            g = tuple(
                tuple(TS_I * x if not x.is_zero else TS_ZERO for x in row) for row in g
            )
        gammas.append(g)
    volume_power = None
    if n % 2 == 1:
        size = len(gammas[0])
        rows = _sparse_rows(gammas[0])
        for g in gammas[1:]:
            rows = _sparse_mul(rows, _sparse_rows(g), size)
        s = _scalar_of(_dense(rows, size))
        if s is None:
            raise RuntimeError("volume element is not scalar")
        if s == TowerScalar.rational(-1) or s == -TS_I:
            gammas[-1] = tuple(
                tuple(-x if not x.is_zero else TS_ZERO for x in row) for row in gammas[-1]
            )
            s = -s
        volume_power = 0 if s == TS_ONE else 1
    return CliffordRep(signs, tuple(gammas), volume_power)


@lru_cache(maxsize=None)
def _odd_definite_generators(n: int) -> tuple:
    """Odd n: the even set plus a normalized product of all of them (cached)."""
    gens = list(_definite_generators(n - 1))
    size = len(gens[0])
    rows = _sparse_rows(gens[0])
    for g in gens[1:]:
        rows = _sparse_mul(rows, _sparse_rows(g), size)
    prod = _dense(rows, size)
    sq_rows = _sparse_mul(_sparse_rows(prod), _sparse_rows(prod), size)
    s = _scalar_of(_dense(sq_rows, size))
    factor = TS_ONE if s == TowerScalar.rational(-1) else TS_I
    gens.append(tuple(
        tuple(factor * x if not x.is_zero else TS_ZERO for x in row) for row in prod
    ))
    return tuple(gens)


def clifford_violations(rep: CliffordRep) -> list[tuple[int, int]]:
    """Pairs (a, b) where the anticommutator relation fails (exact check).

    The doubling construction yields signed-permutation matrices (one entry
    per row), so the anticommutator of a pair touches at most two columns per
    row; a dict-based fallback covers general matrices.
    """
    n = rep.n
    N = rep.spinor_dim
    perms = []
    for a in range(n):
        rows = rep.sparse_rows(a)
        if any(len(r) != 1 for r in rows):
            perms = None
            break
        perms.append(([r[0][0] for r in rows], [r[0][1] for r in rows]))
    bad = []
    for a in range(n):
        for b in range(a, n):
            if perms is not None:
                ok = _anticommutator_ok_perm(perms[a], perms[b], rep.signs[a], a == b, N)
            else:
                ok = _anticommutator_ok_dict(rep, a, b, N)
            if not ok:
                bad.append((a, b))
    return bad


def _anticommutator_ok_perm(pa, pb, sign_a, diagonal, N) -> bool:
    col_a, val_a = pa
    col_b, val_b = pb
    if diagonal:
        want = TowerScalar.rational(-sign_a)  # each of the two equal terms
        for i in range(N):
            j = col_b[col_a[i]]
            if j != i:
                return False
            if not val_a[i] * val_b[col_a[i]] == want:
                return False
        return True
    for i in range(N):
        j1 = col_b[col_a[i]]
        j2 = col_a[col_b[i]]
        if j1 != j2:
            return False  # unit entries cannot cancel across columns
        v = val_a[i] * val_b[col_a[i]] + val_b[i] * val_a[col_b[i]]
        if not v.is_zero:
            return False
    return True


def _anticommutator_ok_dict(rep, a, b, N) -> bool:
    ab = _sparse_mul(rep.sparse_rows(a), rep.sparse_rows(b), N)
    ba = _sparse_mul(rep.sparse_rows(b), rep.sparse_rows(a), N) if b != a else ab
    want = TowerScalar.rational(-2 * rep.signs[a]) if a == b else TS_ZERO
    for i in range(N):
        acc = {j: v for j, v in ab[i]}
        for j, v in ba[i]:
            acc[j] = acc.get(j, TS_ZERO) + v
        for j in range(N):
            expect = want if (j == i and a == b) else TS_ZERO
            if not acc.get(j, TS_ZERO) == expect:
                return False
    return True


def gamma_of_vector(rep: CliffordRep, v: Sequence) -> tuple:
    """Dense matrix of Clifford multiplication by the frame vector v."""
    N = rep.spinor_dim
    acc = [[TS_ZERO] * N for _ in range(N)]
    for a, coeff in enumerate(v):
        if coeff == 0:
            continue
        for i, entries in enumerate(rep.sparse_rows(a)):
            for j, val in entries:
                acc[i][j] = acc[i][j] + coeff * val
    return mat_from_rows(acc)


def clifford_mul(rep: CliffordRep, v: Sequence, psi: Sequence) -> tuple:
    """v . psi, linear in both arguments; v.v.psi = -g(v, v) psi."""
    N = rep.spinor_dim
    out = [TS_ZERO] * N
    for a, coeff in enumerate(v):
        if coeff == 0:
            continue
        for i, entries in enumerate(rep.sparse_rows(a)):
            for j, val in entries:
                term = coeff * val * psi[j]
                out[i] = out[i] + term
    return tuple(out)


def spin_lift(rep: CliffordRep, A) -> tuple:
    """Spinor action of a metric-skew endomorphism.

    lift(A) = (1/4) sum_j eps_j gamma_j gamma(A e_j); it satisfies
    [lift(A), v.] = (A v). for all vectors v.
    """
    if not is_metric_skew(A, rep.signs):
        raise ValueError("endomorphism is not metric-skew")
    return _spin_lift_unchecked(rep, A)


def _spin_lift_unchecked(rep: CliffordRep, A) -> tuple:
    n = rep.n
    N = rep.spinor_dim
    acc: dict[tuple[int, int], TowerScalar] = {}
    prods = _pair_products(rep)
    for j in range(n):
        col = [A[k][j] for k in range(n)]
        for k in range(n):
            coeff = col[k]
            if coeff == 0:
                continue
            c = QUARTER * rep.signs[j] * coeff
            for (i, jj), val in prods[(j, k)]:
                key = (i, jj)
                acc[key] = acc.get(key, TS_ZERO) + c * val
    return _dense_from_dict(acc, N)


def spin_lift_basis_form(rep: CliffordRep, A) -> tuple:
    """Same operator from the half-sum over ordered index pairs.

    (1/2) sum_{k<j} theta_kj eps_j gamma_j gamma_k with theta = A; equals
    spin_lift exactly when A is metric-skew.
    """
    n = rep.n
    N = rep.spinor_dim
    acc: dict[tuple[int, int], TowerScalar] = {}
    prods = _pair_products(rep)
    half = Fraction(1, 2)
    for j in range(n):
        for k in range(j):
            coeff = A[k][j]
            if coeff == 0:
                continue
            c = half * rep.signs[j] * coeff
            for (i, jj), val in prods[(j, k)]:
                key = (i, jj)
                acc[key] = acc.get(key, TS_ZERO) + c * val
    return _dense_from_dict(acc, N)


def _pair_products(rep: CliffordRep) -> dict:
    """Per-rep cache of gamma_a gamma_b as sparse (i, j) -> value listings."""
    cached = rep.__dict__.get("_products")
    if cached is not None:
        return cached
    n = rep.n
    N = rep.spinor_dim
    sparse = [rep.sparse_rows(a) for a in range(n)]
    out = {}
    for a in range(n):
        for b in range(n):
            rows = _sparse_mul(sparse[a], sparse[b], N)
            out[(a, b)] = tuple(
                ((i, j), v) for i, entries in enumerate(rows) for j, v in entries
            )
    object.__setattr__(rep, "_products", out)
    return out


def _dense_from_dict(acc: dict, N: int) -> tuple:
    out = [[TS_ZERO] * N for _ in range(N)]
    for (i, j), v in acc.items():
        if not v.is_zero:
            out[i][j] = v
    return mat_from_rows(out)


def two_tensor_action(rep: CliffordRep, T) -> tuple:
    """Action of a 2-tensor sum_ij T_ij e_i (x) e_j as sum_ij T_ij gamma_i gamma_j."""
    n = rep.n
    N = rep.spinor_dim
    acc: dict[tuple[int, int], TowerScalar] = {}
    prods = _pair_products(rep)
    for a in range(n):
        for b in range(n):
            coeff = T[a][b]
            if coeff == 0:
                continue
            for (i, j), val in prods[(a, b)]:
                acc[(i, j)] = acc.get((i, j), TS_ZERO) + coeff * val
    return _dense_from_dict(acc, N)


def raise_endomorphism(signs: Sequence[int], f) -> tuple:
    """Index-raised tensor of an endomorphism: T_ij = eps_i f[j][i]."""
    n = len(signs)
    return tuple(tuple(signs[i] * f[j][i] for j in range(n)) for i in range(n))


# ---------------------------------------------------------------------------
# kernels attached to a spinor
# ---------------------------------------------------------------------------

def _real_component_rows(row: Sequence) -> list[list[Fraction]]:
    """Split one Q(i)(w)-linear equation in rational unknowns into rational rows."""
    comps = [[], [], [], []]
    for x in row:
        if not isinstance(x, TowerScalar):
            x = TowerScalar.rational(x)
        comps[0].append(x.a)
        comps[1].append(x.b)
        comps[2].append(x.c)
        comps[3].append(x.d)
    return [c for c in comps if any(v != 0 for v in c)]


def annihilator_kernel(rep: CliffordRep, psi: Sequence) -> list[tuple]:
    """Basis of V_psi = {real vectors v with v . psi = 0}."""
    n = rep.n
    N = rep.spinor_dim
    images = [clifford_mul(rep, _unit(n, a), psi) for a in range(n)]
    rows = []
    for h in range(N):
        rows.extend(_real_component_rows([images[a][h] for a in range(n)]))
    if not rows:
        return [tuple(_unit(n, a)) for a in range(n)]
    return nullspace(rows, n)


def _unit(n: int, a: int) -> list:
    v = [F0] * n
    v[a] = F1
    return v


@dataclass(frozen=True)
class CommutantKernel:
    """Solution set of {f metric-symmetric : f(X).psi = X.psi for all X}.

    The set is the identity plus the span of homogeneous_basis (symmetric maps
    with image inside V_psi); it reduces to {id} exactly when V_psi = 0.
    """

    homogeneous_basis: tuple
    v_psi_dimension: int

    @property
    def dimension(self) -> int:
        return len(self.homogeneous_basis)

    @property
    def is_identity_only(self) -> bool:
        return not self.homogeneous_basis


def symmetric_commutant_kernel(rep: CliffordRep, psi: Sequence, method: str = "factored") -> CommutantKernel:
    """Exact affine solution set of f(X).psi = X.psi over symmetric f.

    `factored` solves via the annihilator V_psi (columns of f - id must land in
    V_psi); `dense` eliminates the n(n+1)/2 symmetric unknowns directly and is
    kept as an independent cross-check.
    """
    if all(x == 0 for x in psi):
        raise ValueError("psi must be nonzero")
    if method == "dense":
        return _commutant_dense(rep, psi)
    n = rep.n
    V = annihilator_kernel(rep, psi)
    d = len(V)
    if d == 0:
        return CommutantKernel((), 0)
    # columns u_k of the homogeneous f lie in V_psi: u_k = sum_j t[j][k] V_j;
    # symmetry of f means eps_i u_k[i] = eps_k u_i[k].
    nvars = d * n
    rows = []
    for i in range(n):
        for k in range(i + 1, n):
            row = [F0] * nvars
            for j in range(d):
                row[j * n + k] += rep.signs[i] * V[j][i]
                row[j * n + i] -= rep.signs[k] * V[j][k]
            rows.append(row)
    sols = nullspace(rows, nvars) if rows else [tuple(_unit(nvars, q)) for q in range(nvars)]
    basis = []
    for t in sols:
        f = [[F0] * n for _ in range(n)]
        for k in range(n):
            for j in range(d):
                coeff = t[j * n + k]
                if coeff == 0:
                    continue
                for i in range(n):
                    f[i][k] += coeff * V[j][i]
        if any(any(x != 0 for x in row) for row in f):
            basis.append(mat_from_rows(f))
    return CommutantKernel(tuple(basis), d)


def _commutant_dense(rep: CliffordRep, psi: Sequence) -> CommutantKernel:
    n = rep.n
    N = rep.spinor_dim
    images = [clifford_mul(rep, _unit(n, a), psi) for a in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index = {p: q for q, p in enumerate(pairs)}
    rows = []
    # unknowns h_ij = h_ji with f[i][k] = eps_i h_ik; f(e_k).psi = 0
    for k in range(n):
        for h in range(N):
            row_c = []
            for (i, j) in pairs:
                coeff = TS_ZERO
                if j == k:
                    coeff = coeff + rep.signs[i] * images[i][h]
                if i == k and i != j:
                    coeff = coeff + rep.signs[j] * images[j][h]
                row_c.append(coeff)
            rows.extend(_real_component_rows(row_c))
    sols = nullspace(rows, len(pairs)) if rows else []
    basis = []
    for sol in sols:
        f = [[F0] * n for _ in range(n)]
        for (i, j), q in index.items():
            f[i][j] = rep.signs[i] * sol[q]
            f[j][i] = rep.signs[j] * sol[q]
        basis.append(mat_from_rows(f))
    V = annihilator_kernel(rep, psi)
    return CommutantKernel(tuple(basis), len(V))


# ---------------------------------------------------------------------------
# JSON export
# ---------------------------------------------------------------------------

def rep_to_json_dict(rep: CliffordRep) -> dict:
    """Gamma matrices as arrays of [re, im] rational-string pairs."""
    def entry(x: TowerScalar):
        return [str(x.a), str(x.b)]

    return {
        "n": rep.n,
        "signs": list(rep.signs),
        "spinor_dim": rep.spinor_dim,
        "volume_power": rep.volume_power,
        "gammas": [[[entry(x) for x in row] for row in g] for g in rep.gammas],
    }
