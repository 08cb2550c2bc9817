"""Hyperbolic half-space models and the exact coordinate Killing-spinor solver.

The model H^eps_r is the metric (r^2/t^2)(sum eps_i dx_i^2 + eps_n dt^2) on
{t > 0}, presented as the extension of an abelian algebra by the identity
derivation scaled by 1/r; the t-direction is the last frame index.  Spinor
fields are expanded in the monomial lattice t^(k/2) x^m, which is closed under
the left-invariant frame derivations: the t-derivation is diagonal on
monomials, an x-derivation raises the t-exponent by one and lowers one
x-degree.  Solving the Killing equation inside a bounded window of that
lattice is an exact sparse linear problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import TowerScalar
from .clifford import CliffordRep, build_gammas
from .killing import invariant_spin_connection
from .liealg import LieAlgebra, MetricLieAlgebra, extend_by_derivation
from .linalg import identity, mat_scale, mat_sub, sparse_nullspace

F0 = Fraction(0)

Monomial = tuple  # (k, m): t^(k/2) * x^m with m a multi-index over x_1..x_{n-1}


class HalfSpaceModel:
    """H^eps_r as a metric Lie algebra plus its coordinate frame data."""

    def __init__(self, n: int, signs: Sequence[int], r: Fraction):
        if n < 2:
            raise ValueError("need total dimension n >= 2")
        signs = tuple(signs)
        if len(signs) != n:
            raise ValueError("need one sign per dimension")
        r = Fraction(r)
        if r <= 0:
            raise ValueError("r must be positive")
        self.n = n
        self.signs = signs
        self.r = r
        base = MetricLieAlgebra(LieAlgebra.abelian(n - 1), signs[:-1])
        # The orthonormal frame (t/r dx_1, ..., t/r dx_{n-1}, t/r dt) brackets
        # as [e_i, e_t] = -(1/r) e_i, so the t-direction acts by -(1/r) id and
        # the monomial calculus below has L_{e_t} t^(k/2) = +(k/2r) t^(k/2).
        D = mat_scale(Fraction(-1) / r, identity(n - 1))
        self.algebra, self.decomposition = extend_by_derivation(base, D, signs[-1])

    def clifford_rep(self) -> CliffordRep:
        return build_gammas(self.signs)

    def __repr__(self):
        return "HalfSpaceModel(n=%d, signs=%r, r=%s)" % (self.n, self.signs, self.r)


def parse_halfspace_spec(text: str) -> HalfSpaceModel:
    """Parse 'halfspace n=<int> r=<p/q> signs=<+1,-1,...>'."""
    tokens = text.split()
    if not tokens or tokens[0] != "halfspace":
        raise ValueError("half-space spec must start with 'halfspace'")
    fields = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ValueError("bad half-space token %r" % tok)
        key, val = tok.split("=", 1)
        fields[key] = val
    try:
        n = int(fields["n"])
        r = Fraction(fields["r"])
        signs = tuple(int(s) for s in fields["signs"].split(","))
    except KeyError as exc:
        raise ValueError("half-space spec needs n=, r=, signs=") from exc
    return HalfSpaceModel(n, signs, r)


class CoordFunction:
    """Finite sum of monomials t^(k/2) x^m with scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, coeff in dict(terms).items():
                if not coeff == 0:
                    k, m = mono
                    clean[(int(k), tuple(m))] = coeff
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("CoordFunction is immutable")

    @classmethod
    def zero(cls) -> "CoordFunction":
        return cls()

    @classmethod
    def monomial(cls, k: int, m: Sequence[int], coeff=Fraction(1)) -> "CoordFunction":
        return cls({(k, tuple(m)): coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CoordFunction") -> "CoordFunction":
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            cur = terms.get(mono)
            nv = coeff if cur is None else cur + coeff
            if nv == 0:
                terms.pop(mono, None)
            else:
                terms[mono] = nv
        return CoordFunction(terms)

    def __neg__(self) -> "CoordFunction":
        return CoordFunction({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "CoordFunction") -> "CoordFunction":
        return self + (-other)

    def scale(self, factor) -> "CoordFunction":
        if factor == 0:
            return CoordFunction()
        return CoordFunction({m: factor * c for m, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, CoordFunction):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        zero = F0
        return all(self.terms.get(k, zero) == other.terms.get(k, zero) for k in keys)

    __hash__ = None

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def __repr__(self):
        if self.is_zero:
            return "0"
        bits = []
        for (k, m), coeff in self.sorted_terms():
            mono = []
            if k:
                mono.append("t^(%d/2)" % k)
            for i, e in enumerate(m):
                if e:
                    mono.append("x%d^%d" % (i + 1, e))
            bits.append("(%s)%s" % (coeff, "*".join(mono) if mono else ""))
        return " + ".join(bits)


def frame_derivative(model: HalfSpaceModel, f: CoordFunction, direction: int) -> CoordFunction:
    """Derivative along the left-invariant frame.

    direction < n-1 is (t/r) d/dx_{direction+1}; the last direction is
    (t/r) d/dt, which is diagonal with eigenvalue k/(2r) on t^(k/2) x^m.
    """
    n = model.n
    r = model.r
    out: dict = {}
    if direction == n - 1:
        for (k, m), coeff in f.terms.items():
            if k:
                _acc(out, (k, m), coeff * Fraction(k, 2) / r)
    elif 0 <= direction < n - 1:
        for (k, m), coeff in f.terms.items():
            e = m[direction]
            if e:
                m2 = m[:direction] + (e - 1,) + m[direction + 1:]
                _acc(out, (k + 2, m2), coeff * e / r)
    else:
        raise ValueError("direction out of range")
    return CoordFunction(out)


def _acc(store: dict, mono, coeff):
    cur = store.get(mono)
    nv = coeff if cur is None else cur + coeff
    if nv == 0:
        store.pop(mono, None)
    else:
        store[mono] = nv


class CoordSpinorField:
    """Spinor field with CoordFunction components in a fixed trivialization."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[CoordFunction]):
        object.__setattr__(self, "components", tuple(components))

    def __setattr__(self, name, value):
        raise AttributeError("CoordSpinorField is immutable")

    @classmethod
    def zero(cls, N: int) -> "CoordSpinorField":
        return cls(tuple(CoordFunction() for _ in range(N)))

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __add__(self, other: "CoordSpinorField") -> "CoordSpinorField":
        return CoordSpinorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "CoordSpinorField") -> "CoordSpinorField":
        return CoordSpinorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, factor) -> "CoordSpinorField":
        return CoordSpinorField(tuple(c.scale(factor) for c in self.components))

    def apply_matrix(self, mat) -> "CoordSpinorField":
        """Constant endomorphism of the fiber acting componentwise."""
        N = len(self.components)
        out = []
        for i in range(N):
            acc = CoordFunction()
            for j in range(N):
                coeff = mat[i][j]
                if coeff == 0:
                    continue
                acc = acc + self.components[j].scale(coeff)
            out.append(acc)
        return CoordSpinorField(out)

    def derivative(self, model: HalfSpaceModel, direction: int) -> "CoordSpinorField":
        return CoordSpinorField(
            tuple(frame_derivative(model, c, direction) for c in self.components))

    def __eq__(self, other):
        if not isinstance(other, CoordSpinorField):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def to_json_dict(self) -> dict:
        out = {}
        for h, comp in enumerate(self.components):
            entries = {}
            for (k, m), coeff in comp.sorted_terms():
                key = "t^%d/2" % k + "".join(";x%d^%d" % (i + 1, e) for i, e in enumerate(m) if e)
                c = coeff if isinstance(coeff, TowerScalar) else TowerScalar.rational(coeff)
                entries[key] = c.to_dict()
            out["u_%d" % h] = entries
        return out


def killing_residual(model: HalfSpaceModel, rep: CliffordRep, psi: CoordSpinorField, lam) -> list[CoordSpinorField]:
    """Per-direction residual nabla_X psi - lambda X . psi.

    Vanishing of every monomial coefficient in every direction is exactly the
    Killing equation with constant lambda.
    """
    ops = invariant_spin_connection(model.algebra, rep)
    out = []
    for d in range(model.n):
        mat = mat_sub(ops[d], mat_scale(lam, rep.gammas[d]))
        res = psi.derivative(model, d) + psi.apply_matrix(mat)
        out.append(res)
    return out


def solve_killing_halfspace(
    model: HalfSpaceModel,
    rep: CliffordRep,
    lam,
    kmax: int = 1,
    mmax: int = 1,
) -> list[CoordSpinorField]:
    """Exact solution basis of the Killing equation in a bounded monomial window.

    The ansatz runs over t^(k/2) x^m with k in [-kmax, kmax] and |m| <= mmax;
    completeness inside the window is checked by the caller via saturation
    (enlarging the window must not increase the dimension).  Solutions are
    normalized so their first nonzero coefficient is one.
    """
    n = model.n
    N = rep.spinor_dim
    monos = _monomials(n - 1, kmax, mmax)
    var_index = {}
    for q, mono in enumerate(monos):
        for h in range(N):
            var_index[(mono, h)] = q * N + h
    nvars = len(monos) * N
    ops = invariant_spin_connection(model.algebra, rep)
    equations: dict = {}
    for d in range(n):
        mat = mat_sub(ops[d], mat_scale(lam, rep.gammas[d]))
        for mono in monos:
            k, m = mono
            # matrix part keeps the monomial
            for i in range(N):
                for j in range(N):
                    coeff = mat[i][j]
                    if coeff == 0:
                        continue
                    _acc_eq(equations, (d, mono, i), var_index[(mono, j)], coeff)
            # derivative part shifts it
            if d == n - 1:
                if k:
                    c = Fraction(k, 2) / model.r
                    for h in range(N):
                        _acc_eq(equations, (d, mono, h), var_index[(mono, h)], c)
            else:
                e = m[d]
                if e:
                    m2 = m[:d] + (e - 1,) + m[d + 1:]
                    c = Fraction(e) / model.r
                    target = (k + 2, m2)
                    for h in range(N):
                        _acc_eq(equations, (d, target, h), var_index[(mono, h)], c)
    basis = sparse_nullspace(list(equations.values()), nvars)
    fields = []
    for vec in basis:
        lead = next((x for x in vec if not x == 0), None)
        if lead is None:
            continue
        scaled = [x / lead for x in vec]
        comps = []
        for h in range(N):
            terms = {}
            for q, mono in enumerate(monos):
                coeff = scaled[q * N + h]
                if not coeff == 0:
                    terms[mono] = coeff if isinstance(coeff, TowerScalar) else TowerScalar.rational(coeff)
            comps.append(CoordFunction(terms))
        fields.append(CoordSpinorField(comps))
    return fields


def _monomials(nx: int, kmax: int, mmax: int) -> list[Monomial]:
    t_range = range(-kmax, kmax + 1)
    xs = _multi_indices(nx, mmax)
    return [(k, m) for k in t_range for m in xs]


def _multi_indices(nx: int, total: int) -> list[tuple]:
    if nx == 0:
        return [()]
    out = []
    def rec(prefix, remaining, slots):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, slots - 1)
    rec([], total, nx)
    return sorted(set(out))


def _acc_eq(equations: dict, eq_key, var: int, coeff):
    row = equations.setdefault(eq_key, {})
    cur = row.get(var)
    nv = coeff if cur is None else cur + coeff
    if nv == 0:
        row.pop(var, None)
    else:
        row[var] = nv


def verify_amended_identity(model: HalfSpaceModel, rep: CliffordRep, psi: CoordSpinorField, lam) -> bool:
    """Check 2 lambda^2 v.e_0.psi = lambda phi_0 v.psi - L_{phi_0 v} psi.

    Runs over all frame vectors v transverse to the t-direction; for the
    half-space phi_0 is a scalar multiple of the identity, so phi_0 v is
    proportional to v and the derivative term is a rescaled frame derivative.
    """
    n = model.n
    phi_scalar = model.decomposition.phi[0][0][0]
    lam_sq2 = 2 * lam * lam
    g_t = rep.gammas[n - 1]
    for i in range(n - 1):
        gi = rep.gammas[i]
        lhs = psi.apply_matrix(g_t).apply_matrix(gi).scale(lam_sq2)
        rhs = psi.apply_matrix(gi).scale(lam * phi_scalar) - psi.derivative(model, i).scale(phi_scalar)
        if not lhs == rhs:
            return False
    return True
