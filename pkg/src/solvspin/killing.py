"""Invariant Killing spinor solver, Ricci filter, and the pseudo-Iwasawa
classifier.

The classifier runs the obstruction chain for arbitrary (not necessarily
invariant) Killing spinors on a pseudo-Iwasawa solvmanifold: nilradical
abelian, Killing constant realizable, phi_alpha squared to a multiple of the
identity, abelian rank one, trace normalization, and finally phi_0 a scalar.
A metric that passes everything is the hyperbolic half-space H^eps_r with
r = 1/(2|lambda|); the solver, in contrast, handles only invariant spinors,
whose equation is a finite linear system on the fiber.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import TS_ZERO, TowerScalar, format_rational, sqrt_to_tower
from .clifford import CliffordRep, gamma_of_vector
from .liealg import (
    MetricLieAlgebra,
    StandardDecomposition,
    check_standard,
    levi_civita,
    restrict,
    ricci,
    trace,
)
from .linalg import (
    identity,
    mat_equal,
    mat_from_rows,
    mat_mul,
    mat_scale,
    mat_sub,
    normalize_vector,
    nullspace,
)

F0 = Fraction(0)
QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class LambdaCandidate:
    """One branch of lambda = +-sqrt(s / (4 n (n-1)))."""

    lam: TowerScalar
    lam_squared: Fraction
    branch: int  # +1 or -1


def lambda_candidates(M: MetricLieAlgebra) -> list[LambdaCandidate]:
    """Possible Killing constants from the scalar curvature identity.

    s = 4 n (n-1) lambda^2 forces lambda^2; the degenerate lambda = 0 case
    (parallel spinors) is excluded, so s = 0 yields no candidates.
    """
    n = M.dim
    if n < 2:
        raise ValueError("need dimension >= 2")
    s = _as_fraction(ricci(M).scalar)
    if s == 0:
        return []
    lam_sq = s / (4 * n * (n - 1))
    root = sqrt_to_tower(lam_sq)
    return [
        LambdaCandidate(root, lam_sq, 1),
        LambdaCandidate(-root, lam_sq, -1),
    ]


def _as_fraction(x) -> Fraction:
    if isinstance(x, TowerScalar):
        return x.as_fraction()
    return Fraction(x)


def invariant_spin_connection(M: MetricLieAlgebra, rep: CliffordRep) -> list[tuple]:
    """Spinor-space operator of nabla_{e_i} on invariant spinors, per direction.

    For constant coefficients the derivative term drops and the operator is
    (1/4) sum_j eps_j gamma_j gamma(nabla_{e_i} e_j).
    """
    if tuple(rep.signs) != tuple(M.signs):
        raise ValueError("representation signature does not match the metric")
    n = M.dim
    N = rep.spinor_dim
    conn = levi_civita(M)
    ops = []
    for i in range(n):
        acc = [[TS_ZERO] * N for _ in range(N)]
        for j in range(n):
            dv = conn.derivative(i, j)
            if all(x == 0 for x in dv):
                continue
            gd = gamma_of_vector(rep, dv)
            coeff = QUARTER * M.signs[j]
            for r, entries in enumerate(rep.sparse_rows(j)):
                for cidx, val in entries:
                    f = coeff * val
                    row = gd[cidx]
                    for cc in range(N):
                        if not row[cc].is_zero:
                            acc[r][cc] = acc[r][cc] + f * row[cc]
        ops.append(mat_from_rows(acc))
    return ops


@dataclass(frozen=True)
class CandidateResult:
    candidate: LambdaCandidate
    kernel_basis: tuple          # invariant solutions, each a spinor tuple
    ricci_filter_dimension: int


@dataclass(frozen=True)
class KillingReport:
    """Invariant-spinor solve; non-invariant spinors are out of its scope."""

    candidates: tuple
    invariant_only: bool = True

    def to_json_dict(self) -> dict:
        return {
            "invariant_only": self.invariant_only,
            "candidates": [
                {
                    "branch": c.candidate.branch,
                    "lambda": c.candidate.lam.to_dict(),
                    "lambda_squared": format_rational(c.candidate.lam_squared),
                    "kernel_dimension": len(c.kernel_basis),
                    "ricci_filter_dimension": c.ricci_filter_dimension,
                    "basis": [[x.to_dict() for x in psi] for psi in c.kernel_basis],
                }
                for c in self.candidates
            ],
        }


def solve_invariant_killing(M: MetricLieAlgebra, rep: CliffordRep) -> KillingReport:
    """Joint kernel of (nabla_{e_i} - lambda gamma_i) over all frame directions.

    Every returned basis spinor is re-substituted into the equation; exact
    arithmetic throughout.
    """
    ops = invariant_spin_connection(M, rep)
    n = M.dim
    N = rep.spinor_dim
    results = []
    for cand in lambda_candidates(M):
        rows = []
        mats = []
        for i in range(n):
            gi = rep.gammas[i]
            mat = mat_sub(ops[i], mat_scale(cand.lam, gi))
            mats.append(mat)
            rows.extend([list(r) for r in mat])
        basis = [normalize_vector(v) for v in nullspace(rows, N)]
        basis = tuple(tuple(_to_tower(x) for x in v) for v in basis)
        for psi in basis:
            for mat in mats:
                image = [sum((mat[r][c] * psi[c] for c in range(N)), TS_ZERO) for r in range(N)]
                if any(not x == 0 for x in image):
                    raise RuntimeError("solver returned a non-solution spinor")
        results.append(
            CandidateResult(cand, basis, ricci_filter(M, rep, cand.lam))
        )
    return KillingReport(tuple(results))


def _to_tower(x) -> TowerScalar:
    return x if isinstance(x, TowerScalar) else TowerScalar.rational(x)


def ricci_filter(M: MetricLieAlgebra, rep: CliffordRep, lam) -> int:
    """Dimension of {psi : (Ric(X) - 4(n-1) lambda^2 X).psi = 0 for all X}.

    Any Killing spinor with constant lambda lies in this space pointwise, so
    the dimension upper-bounds existence, invariant or not.
    """
    n = M.dim
    N = rep.spinor_dim
    lam_sq = _as_fraction(lam * lam) if isinstance(lam, TowerScalar) else Fraction(lam) ** 2
    data = ricci(M)
    rows = []
    factor = 4 * (n - 1) * lam_sq
    for i in range(n):
        w = [data.operator[k][i] - (factor if k == i else F0) for k in range(n)]
        if all(x == 0 for x in w):
            continue
        gw = gamma_of_vector(rep, w)
        rows.extend([list(r) for r in gw])
    if not rows:
        return N
    return len(nullspace(rows, N))


def phi_square_check(M: MetricLieAlgebra, decomp: StandardDecomposition, lam_sq: Fraction) -> list[bool]:
    """Per-alpha exact test of phi_alpha^2 = -4 eps_alpha lambda^2 id."""
    nil = decomp.nil_indices
    out = []
    for a_pos, a in enumerate(decomp.abelian_indices):
        phi = decomp.phi[a_pos]
        target = mat_scale(-4 * M.signs[a] * lam_sq, identity(len(nil)))
        out.append(mat_equal(mat_mul(phi, phi), target))
    return out


def absurd_count_has_solutions(bound: int = 64) -> bool:
    """Exhaustively test (n+k)(n+k-1) = nk for 1 <= n, k <= bound."""
    for n in range(1, bound + 1):
        for k in range(1, bound + 1):
            if (n + k) * (n + k - 1) == n * k:
                return True
    return False


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class Verdict:
    kind: str                       # HyperbolicHalfSpace | NoKillingSpinor | NotApplicable
    reason: str = ""
    r: Optional[Fraction] = None
    epsilon: Optional[tuple] = None
    sign_flipped: bool = False


@dataclass(frozen=True)
class ObstructionReport:
    verdict: Verdict
    checks: tuple

    def to_json_dict(self) -> dict:
        v = {"kind": self.verdict.kind}
        if self.verdict.reason:
            v["reason"] = self.verdict.reason
        if self.verdict.r is not None:
            v["r"] = format_rational(self.verdict.r)
        if self.verdict.epsilon is not None:
            v["epsilon"] = list(self.verdict.epsilon)
        if self.verdict.kind == "HyperbolicHalfSpace":
            v["sign_flipped"] = self.verdict.sign_flipped
        return {
            "verdict": v,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


def classify_pseudo_iwasawa(M: MetricLieAlgebra, decomp: StandardDecomposition) -> ObstructionReport:
    """Decide whether a pseudo-Iwasawa solvmanifold can carry a Killing spinor.

    Follows the obstruction chain of the classification proof; the only
    positive verdict is the hyperbolic half-space H^eps_r with r = 1/(2|lambda|),
    where every fiber spinor extends to a (non-invariant) Killing spinor.
    """
    checks: list[Check] = []
    std = check_standard(M, decomp)
    checks.append(Check("pseudo_iwasawa", std.is_standard and std.is_pseudo_iwasawa,
                        "; ".join(std.failures)))
    if not (std.is_standard and std.is_pseudo_iwasawa):
        return ObstructionReport(
            Verdict("NotApplicable", reason="not a pseudo-Iwasawa standard decomposition"),
            tuple(checks),
        )
    nil, ab = decomp.nil_indices, decomp.abelian_indices
    ng, k, n = len(nil), len(ab), M.dim
    sub = restrict(M, nil)
    g_abelian = all(
        all(x == 0 for x in sub.algebra.structure[i][j])
        for i in range(ng) for j in range(ng)
    )
    checks.append(Check("nilradical_abelian", g_abelian))
    if not g_abelian:
        return ObstructionReport(
            Verdict("NoKillingSpinor", reason="g non-abelian"), tuple(checks))
    s = _as_fraction(ricci(M).scalar)
    has_lambda = s != 0
    checks.append(Check("lambda_candidates", has_lambda,
                        "scalar curvature %s" % format_rational(s)))
    if not has_lambda:
        return ObstructionReport(
            Verdict("NoKillingSpinor", reason="no lambda candidate (scalar curvature is zero)"),
            tuple(checks))
    lam_sq = s / (4 * n * (n - 1))
    if k > 1:
        sq_ok = phi_square_check(M, decomp, lam_sq)
        checks.append(Check("phi_square", all(sq_ok),
                            "per-alpha results %s" % sq_ok))
        if not all(sq_ok):
            return ObstructionReport(
                Verdict("NoKillingSpinor",
                        reason="phi_alpha^2 != -4 eps_alpha lambda^2 id"),
                tuple(checks))
        assert not absurd_count_has_solutions(max(ng, k))
        checks.append(Check("abelian_rank", False,
                            "dim a = %d > 1: (n+k)(n+k-1) = nk has no solutions" % k))
        return ObstructionReport(
            Verdict("NoKillingSpinor",
                    reason="dim a = %d > 1: (n+k)(n+k-1) = nk has no integer solutions" % k),
            tuple(checks))
    # k = 1: trace normalization precedes the phi tests, mirroring the proof
    eps0 = M.signs[ab[0]]
    phi0 = decomp.phi[0]
    tr_phi = _as_fraction(trace(phi0))
    required_sq = -eps0 * (s - 4 * lam_sq * ng)
    trace_ok = tr_phi * tr_phi == required_sq
    checks.append(Check(
        "trace_identity", trace_ok,
        "(Tr phi_0)^2 = %s, identity needs %s"
        % (format_rational(tr_phi * tr_phi), format_rational(required_sq))))
    if not trace_ok:
        return ObstructionReport(
            Verdict("NoKillingSpinor",
                    reason="trace identity fails: (Tr phi_0)^2 = %s != %s"
                    % (format_rational(tr_phi * tr_phi), format_rational(required_sq))),
            tuple(checks))
    sq_ok = phi_square_check(M, decomp, lam_sq)
    checks.append(Check("phi_square", all(sq_ok)))
    if not all(sq_ok):
        return ObstructionReport(
            Verdict("NoKillingSpinor", reason="phi_0^2 != -4 eps_0 lambda^2 id"),
            tuple(checks))
    # eigenvalues are +-1/r with 1/r^2 = -4 eps_0 lambda^2; the trace identity
    # forces them all equal, so phi_0 must be +-(1/r) id exactly
    inv_r_sq = -4 * eps0 * lam_sq
    flipped = tr_phi < 0
    r = Fraction(ng) / abs(tr_phi) if tr_phi else None
    scalar_ok = False
    if r is not None and Fraction(1) / (r * r) == inv_r_sq:
        sign = -1 if flipped else 1
        target = mat_scale(Fraction(sign, 1) / r, identity(ng))
        scalar_ok = mat_equal(phi0, target)
    checks.append(Check("phi_scalar", scalar_ok,
                        "phi_0 == +-(1/r) id with r = %s" % (format_rational(r) if r else "?")))
    if not scalar_ok:
        return ObstructionReport(
            Verdict("NoKillingSpinor", reason="phi_0 is not +-(1/r) id"),
            tuple(checks))
    # cross-check r = 1/(2|lambda|): r^2 * 4 |lambda^2| = 1 exactly
    assert r * r * 4 * abs(lam_sq) == 1
    epsilon = tuple(M.signs[i] for i in nil) + (eps0,)
    return ObstructionReport(
        Verdict("HyperbolicHalfSpace", r=r, epsilon=epsilon, sign_flipped=bool(flipped)),
        tuple(checks),
    )
