"""Small automorphisms representing [t], [r], [s] and t^k M."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geo import (
    CYCLIC, DIHEDRAL_GROUP, GeoModule, GeoMorphism, Point, PreconditionError, Sizes, compose,
    grid_module, sizes, u_functor, v_functor,
)
from .rings import (
    LAURENT, QQ, ElementaryWitness, RingMatrix, block_diag, elem_factor_monomial, mat_det,
    mat_inverse, monomial_inverse, to_scalar,
)

Q = Fraction


@dataclass(frozen=True)
class RepBundle:
    forward: GeoMorphism
    inverse: GeoMorphism
    claim: dict
    forward_sizes: Sizes
    inverse_sizes: Sizes
    witness: ElementaryWitness | None = None
    witness_target: RingMatrix | None = None

    @property
    def size(self) -> Fraction:
        return max(self.forward_sizes.size, self.inverse_sizes.size)

    def u_matrix(self) -> RingMatrix:
        return u_functor(self.forward)

    def determinant(self):
        return mat_det(self.u_matrix())

    def check(self) -> bool:
        """Inverse really inverts, and recorded sizes match recomputed ones."""
        one = GeoMorphism.identity(self.forward.source)
        return (compose(self.forward, self.inverse) == one
                and compose(self.inverse, self.forward) == one
                and sizes(self.forward) == self.forward_sizes
                and sizes(self.inverse) == self.inverse_sizes)


def _bundle(fwd, inv, claim, witness=None, target=None) -> RepBundle:
    return RepBundle(fwd, inv, claim, sizes(fwd), sizes(inv), witness, target)


def _one(sign=1) -> RingMatrix:
    return RingMatrix(QQ, [[sign]])


def xi_morphism(n: int, group=CYCLIC, inverse: bool = False) -> GeoMorphism:
    """The cyclic 1/n-step automorphism of the grid module Q[n], or its inverse.

    Forward: j/n -> (j+1)/n for 1 <= j <= n-2, (n-1)/n -> 1, and 0 -> 1/n with
    sign (-1)^(n+1).  For n = 1 this is the unit shift.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    M = grid_module(n, 1, group)
    sign = 1 if n % 2 else -1
    p = [Point(0, Q(i, n)) for i in range(n)]
    blocks = []
    if not inverse:
        blocks.append(((p[n - 1], Point(0, Q(n - 1, n) + Q(1, n))), _one()))
        if n >= 2:
            blocks.append(((p[0], p[1]), _one(sign)))
        blocks += [((p[j], p[j + 1]), _one()) for j in range(1, n - 1)]
    else:
        blocks.append(((p[0], Point(0, Q(-1, n))), _one()))
        if n >= 2:
            blocks.append(((p[1], p[0]), _one(sign)))
        blocks += [((p[j + 1], p[j]), _one()) for j in range(1, n - 1)]
    return GeoMorphism(M, M, blocks)


def nu_morphism(n: int, inverse: bool = False, group=CYCLIC) -> GeoMorphism:
    """Unit shift on the point 0, identity on the other grid points."""
    M = grid_module(n, 1, group)
    step = -1 if inverse else 1
    blocks = [((Point(0, 0), Point(0, step)), _one())]
    blocks += [((Point(0, Q(i, n)), Point(0, Q(i, n))), _one()) for i in range(1, n)]
    return GeoMorphism(M, M, blocks)


def xi_rep(n: int) -> RepBundle:
    fwd, inv = xi_morphism(n), xi_morphism(n, inverse=True)
    target = u_functor(fwd) * monomial_inverse(u_functor(nu_morphism(n)))
    return _bundle(fwd, inv, {"kind": "t-power", "k": 1}, elem_factor_monomial(target), target)


def nu_rep(n: int) -> RepBundle:
    if n < 1:
        raise ValueError("n must be at least 1")
    return _bundle(nu_morphism(n), nu_morphism(n, inverse=True), {"kind": "t-power", "k": 1})


def s_module() -> GeoModule:
    return GeoModule(DIHEDRAL_GROUP, {Point(0, 0): 1})


def s_morphism() -> GeoMorphism:
    P = s_module()
    return GeoMorphism(P, P, {(Point(0, 0), Point(1, 0)): _one()})


def s_rep() -> RepBundle:
    phi = s_morphism()
    return _bundle(phi, phi, {"kind": "group-element", "element": "s"})


def r_rep(n: int) -> RepBundle:
    fwd = xi_morphism(n, DIHEDRAL_GROUP)
    inv = xi_morphism(n, DIHEDRAL_GROUP, inverse=True)
    return _bundle(fwd, inv, {"kind": "group-element", "element": "r"})


# --------------------------------------------------------------------------
# Constant matrices and t^k M


def _checked_inverse(M: RingMatrix) -> RingMatrix:
    if M.rows != M.cols:
        raise ValueError("matrix must be square")
    try:
        return mat_inverse(M)
    except ValueError as exc:
        raise PreconditionError(f"matrix is not invertible: {exc}") from None


def _grid_for(budget: int, m: int, eps: Fraction) -> int:
    """Smallest N >= max(m, 1) with budget / N < eps."""
    eps = to_scalar(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    N = max(m, 1)
    if budget:
        N = max(N, int(budget / eps) + 1)
    while Fraction(budget, N) >= eps:
        N += 1
    return N


def stabilized(M: RingMatrix, N: int) -> RingMatrix:
    """diag(M, I_(N-m)) over the Laurent ring."""
    m = M.rows
    L = M.map(lambda v: v, LAURENT)
    if N == m:
        return L
    return block_diag(L, RingMatrix.identity(LAURENT, N - m))


def squeeze_constant(M: RingMatrix, eps) -> RepBundle:
    Minv = _checked_inverse(M)
    m = M.rows
    N = _grid_for(m - 1, m, eps)
    fwd = v_functor(stabilized(M, N), N)
    inv = v_functor(stabilized(Minv, N), N)
    return _bundle(fwd, inv, {"kind": "constant", "det": str(mat_det(M)), "N": N})


def xi_power(N: int, k: int) -> GeoMorphism:
    M = grid_module(N)
    out = GeoMorphism.identity(M)
    step = xi_morphism(N, inverse=k < 0)
    for _ in range(abs(k)):
        out = compose(step, out)
    return out


def squeeze_class(k: int, M: RingMatrix, eps) -> RepBundle:
    """xi_N^k after diag(M, I) on one 1/N grid, small enough for both factors together."""
    Minv = _checked_inverse(M)
    m = M.rows
    N = _grid_for(abs(k) + m - 1, m, eps)
    fwd = compose(xi_power(N, k), v_functor(stabilized(M, N), N))
    inv = compose(v_functor(stabilized(Minv, N), N), xi_power(N, -k))
    return _bundle(fwd, inv, {"kind": "class", "k": k, "det": str(mat_det(M)), "N": N})


def bundle_to_json(b: RepBundle) -> dict:
    from .rings import matrix_to_json
    out = {
        "claim": b.claim,
        "forward": b.forward.to_json(),
        "inverse": b.inverse.to_json(),
        "sizes": {"forward": b.forward_sizes.to_json(), "inverse": b.inverse_sizes.to_json()},
        "witness": None if b.witness is None else b.witness.to_json(),
    }
    if all(p.t == 1 for p in b.forward.source.points):
        U = b.u_matrix()
        out["u_matrix"] = matrix_to_json(U)
        try:
            d = mat_det(U)
            out["determinant"] = d.to_json()
        except ValueError as exc:
            out["determinant"] = None
            out["determinant_note"] = str(exc)
    return out


def bundle_from_json(d: dict) -> RepBundle:
    fwd = GeoMorphism.from_json(d["forward"])
    inv = GeoMorphism.from_json(d["inverse"])
    w = d.get("witness")
    return _bundle(fwd, inv, d.get("claim", {}),
                   None if w is None else ElementaryWitness.from_json(w))


__all__ = [
    "RepBundle", "xi_morphism", "nu_morphism", "xi_rep", "nu_rep", "s_module", "s_morphism",
    "s_rep", "r_rep", "squeeze_constant", "squeeze_class", "xi_power", "stabilized",
    "bundle_to_json", "bundle_from_json",
]
