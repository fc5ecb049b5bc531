"""Exact rings and matrices over them.

Scalars are Python ``int`` or ``fractions.Fraction``.  On top of them sit the
Laurent polynomial ring R[t, t^-1] and the group ring R[D_inf] of the infinite
dihedral group <r, s | s^2 = 1, rs = sr^-1>.  ``RingMatrix`` is a small dense
matrix type over any of these, and ``ElementaryWitness`` records a product of
elementary matrices.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

DEFAULT_DET_BOUND = 12


def to_scalar(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


def fmt_scalar(value) -> str:
    return str(Fraction(value))


# --------------------------------------------------------------------------
# Coefficient rings


class ScalarRing:
    """Coefficients: exact rationals (default) or integers."""

    commutative = True

    def __init__(self, integer: bool = False):
        self.integer = integer
        self.name = "ZZ" if integer else "QQ"

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, ScalarRing) and other.integer == self.integer

    def __hash__(self):
        return hash(("scalar", self.integer))

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def coerce(self, value) -> Fraction:
        v = to_scalar(value)
        if self.integer and v.denominator != 1:
            raise ValueError(f"{v} is not an integer")
        return v

    def is_unit(self, value) -> bool:
        v = to_scalar(value)
        if self.integer:
            return v in (1, -1)
        return v != 0

    def unit_inverse(self, value) -> Fraction:
        if not self.is_unit(value):
            raise ValueError(f"{value} is not a unit in {self.name}")
        return 1 / to_scalar(value)


QQ = ScalarRing()
ZZ = ScalarRing(integer=True)


def _clean(items: Iterable[tuple]) -> tuple:
    return tuple(sorted((k, Fraction(c)) for k, c in items if c != 0))


class LaurentPoly:
    """An element of R[t, t^-1], stored as sorted (exponent, coefficient) pairs."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, coeffs: Mapping[int, object] | Iterable[tuple] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Fraction] = {}
        for e, c in items:
            if not isinstance(e, int):
                raise TypeError("Laurent exponents must be integers")
            acc[e] = acc.get(e, 0) + to_scalar(c)
        self._terms = _clean(acc.items())
        self._hash = None

    @classmethod
    def monomial(cls, exp: int, coeff=1) -> LaurentPoly:
        return cls({exp: coeff})

    @classmethod
    def constant(cls, c) -> LaurentPoly:
        return cls({0: c})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def terms(self) -> tuple:
        return self._terms

    def exponents(self) -> list[int]:
        return [e for e, _ in self._terms]

    def coeff(self, exp: int) -> Fraction:
        for e, c in self._terms:
            if e == exp:
                return c
        return Fraction(0)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == _clean([(0, other)])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("L", self._terms))
        return self._hash

    @staticmethod
    def _lift(other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return LaurentPoly({0: other})
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in o._terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly([(e, -c) for e, c in self._terms])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return laurent_mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.unit_inverse() ** (-k)
        out = LaurentPoly({0: 1})
        for _ in range(k):
            out = out * self
        return out

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def unit_inverse(self) -> LaurentPoly:
        if not self.is_monomial():
            raise ValueError(f"{self} is not a monomial unit")
        (e, c), = self._terms
        return LaurentPoly({-e: 1 / c})

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms:
            if e == 0:
                parts.append(str(c))
            else:
                mono = "t" if e == 1 else f"t^{e}"
                parts.append(mono if c == 1 else ("-" + mono if c == -1 else f"{c}*{mono}"))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {str(e): fmt_scalar(c) for e, c in self._terms}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> LaurentPoly:
        return cls({int(k): to_scalar(v) for k, v in data.items()})


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Convolution of coefficient maps."""
    acc: dict[int, Fraction] = {}
    for e1, c1 in a.terms:
        for e2, c2 in b.terms:
            acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
    return LaurentPoly(acc)


def dihedral_word_mul(g: tuple[int, int], h: tuple[int, int]) -> tuple[int, int]:
    """(r^m s^n)(r^m' s^n') = r^(m + (-1)^n m') s^(n xor n')."""
    m, n = g
    m2, n2 = h
    return (m + (-m2 if n else m2), n ^ n2)


def dihedral_word_inv(g: tuple[int, int]) -> tuple[int, int]:
    m, n = g
    return (m, 1) if n else (-m, 0)


class DihedralElem:
    """An element sum c * r^m s^n of R[D_inf], keyed by (m, n) with n in {0, 1}."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, coeffs: Mapping[tuple, object] | Iterable[tuple] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[tuple[int, int], Fraction] = {}
        for key, c in items:
            m, n = key
            if n not in (0, 1):
                raise ValueError("s-exponent must be 0 or 1")
            acc[(m, n)] = acc.get((m, n), 0) + to_scalar(c)
        self._terms = _clean(acc.items())
        self._hash = None

    @classmethod
    def monomial(cls, m: int = 0, n: int = 0, coeff=1) -> DihedralElem:
        return cls({(m, n): coeff})

    @classmethod
    def r(cls, m: int = 1) -> DihedralElem:
        return cls.monomial(m, 0)

    @classmethod
    def s(cls) -> DihedralElem:
        return cls.monomial(0, 1)

    @property
    def coeffs(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    @property
    def terms(self) -> tuple:
        return self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, DihedralElem):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == _clean([((0, 0), other)])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("D", self._terms))
        return self._hash

    @staticmethod
    def _lift(other):
        if isinstance(other, DihedralElem):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return DihedralElem({(0, 0): other})
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for k, c in o._terms:
            acc[k] = acc.get(k, 0) + c
        return DihedralElem(acc)

    __radd__ = __add__

    def __neg__(self):
        return DihedralElem([(k, -c) for k, c in self._terms])

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return dihedral_mul(self, o)

    def __rmul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return dihedral_mul(o, self)

    def __pow__(self, k: int):
        if k < 0:
            return self.unit_inverse() ** (-k)
        out = DihedralElem({(0, 0): 1})
        for _ in range(k):
            out = out * self
        return out

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_rotation_only(self) -> bool:
        """True when the element lies in the commutative subring R[r, r^-1]."""
        return all(n == 0 for (_, n), _ in self._terms)

    def unit_inverse(self) -> DihedralElem:
        if not self.is_monomial():
            raise ValueError(f"{self} is not a monomial unit")
        (g, c), = self._terms
        return DihedralElem({dihedral_word_inv(g): 1 / c})

    def involution(self) -> DihedralElem:
        """The anti-automorphism sum c g -> sum c g^-1."""
        return DihedralElem([(dihedral_word_inv(g), c) for g, c in self._terms])

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for (m, n), c in self._terms:
            word = ("" if m == 0 else ("r" if m == 1 else f"r^{m}")) + ("s" if n else "")
            if not word:
                parts.append(str(c))
            else:
                parts.append(word if c == 1 else ("-" + word if c == -1 else f"{c}*{word}"))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {f"{m},{n}": fmt_scalar(c) for (m, n), c in self._terms}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> DihedralElem:
        out = {}
        for k, v in data.items():
            m, n = k.split(",")
            out[(int(m), int(n))] = to_scalar(v)
        return cls(out)


def dihedral_mul(a: DihedralElem, b: DihedralElem) -> DihedralElem:
    """Bilinear extension of the word product on r^m s^n."""
    acc: dict[tuple[int, int], Fraction] = {}
    for g, c1 in a.terms:
        for h, c2 in b.terms:
            k = dihedral_word_mul(g, h)
            acc[k] = acc.get(k, 0) + c1 * c2
    return DihedralElem(acc)


class LaurentRing:
    commutative = True

    def __init__(self, coeff: ScalarRing = QQ):
        self.coeff = coeff
        self.name = "laurent"

    def __repr__(self):
        return f"{self.coeff!r}[t,t^-1]"

    def __eq__(self, other):
        return isinstance(other, LaurentRing) and other.coeff == self.coeff

    def __hash__(self):
        return hash(("laurent", self.coeff))

    def zero(self):
        return LAURENT_ZERO

    def one(self):
        return LAURENT_ONE

    def coerce(self, value) -> LaurentPoly:
        if isinstance(value, LaurentPoly):
            for _, c in value.terms:
                self.coeff.coerce(c)
            return value
        return LaurentPoly({0: self.coeff.coerce(value)})

    def is_unit(self, value) -> bool:
        v = self.coerce(value)
        return v.is_monomial() and self.coeff.is_unit(v.terms[0][1])

    def unit_inverse(self, value) -> LaurentPoly:
        if not self.is_unit(value):
            raise ValueError(f"{value} is not a unit")
        return self.coerce(value).unit_inverse()


class DihedralRing:
    commutative = False

    def __init__(self, coeff: ScalarRing = QQ):
        self.coeff = coeff
        self.name = "dihedral"

    def __repr__(self):
        return f"{self.coeff!r}[D_inf]"

    def __eq__(self, other):
        return isinstance(other, DihedralRing) and other.coeff == self.coeff

    def __hash__(self):
        return hash(("dihedral", self.coeff))

    def zero(self):
        return DIHEDRAL_ZERO

    def one(self):
        return DIHEDRAL_ONE

    def coerce(self, value) -> DihedralElem:
        if isinstance(value, DihedralElem):
            return value
        return DihedralElem({(0, 0): self.coeff.coerce(value)})

    def is_unit(self, value) -> bool:
        v = self.coerce(value)
        return v.is_monomial() and self.coeff.is_unit(v.terms[0][1])

    def unit_inverse(self, value) -> DihedralElem:
        if not self.is_unit(value):
            raise ValueError(f"{value} is not a unit")
        return self.coerce(value).unit_inverse()


LAURENT_ZERO = LaurentPoly()
LAURENT_ONE = LaurentPoly({0: 1})
DIHEDRAL_ZERO = DihedralElem()
DIHEDRAL_ONE = DihedralElem({(0, 0): 1})
LAURENT = LaurentRing()
DIHEDRAL = DihedralRing()

T = LaurentPoly.monomial(1)


# --------------------------------------------------------------------------
# Matrices


class RingMatrix:
    """Dense immutable matrix over one of the rings above."""

    __slots__ = ("ring", "rows", "cols", "_data", "_hash")

    def __init__(self, ring, data: Sequence[Sequence], rows: int | None = None,
                 cols: int | None = None):
        self.ring = ring
        rows_ = tuple(tuple(ring.coerce(x) for x in row) for row in data)
        self.rows = len(rows_) if rows is None else rows
        if cols is None:
            cols = len(rows_[0]) if rows_ else 0
        self.cols = cols
        if len(rows_) != self.rows or any(len(r) != self.cols for r in rows_):
            raise ValueError("inconsistent matrix dimensions")
        self._data = rows_
        self._hash = None

    @classmethod
    def _raw(cls, ring, data: tuple, rows: int, cols: int) -> RingMatrix:
        m = object.__new__(cls)
        m.ring, m.rows, m.cols, m._data, m._hash = ring, rows, cols, data, None
        return m

    @classmethod
    def zeros(cls, ring, rows: int, cols: int) -> RingMatrix:
        z = ring.zero()
        return cls._raw(ring, tuple((z,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, ring, n: int) -> RingMatrix:
        z, o = ring.zero(), ring.one()
        return cls._raw(ring, tuple(tuple(o if i == j else z for j in range(n))
                                    for i in range(n)), n, n)

    @classmethod
    def from_entries(cls, ring, rows: int, cols: int,
                     entries: Mapping[tuple[int, int], object]) -> RingMatrix:
        z = ring.zero()
        grid = [[z] * cols for _ in range(rows)]
        for (i, j), v in entries.items():
            grid[i][j] = ring.coerce(v)
        return cls._raw(ring, tuple(tuple(r) for r in grid), rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> tuple:
        return self._data[i]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._data]

    def nonzero(self) -> dict[tuple[int, int], object]:
        return {(i, j): v for i, r in enumerate(self._data) for j, v in enumerate(r) if v}

    def is_zero(self) -> bool:
        return not any(v for r in self._data for v in r)

    def is_identity(self) -> bool:
        if self.rows != self.cols:
            return False
        return all((v == 1) if i == j else (not v)
                   for i, r in enumerate(self._data) for j, v in enumerate(r))

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self):
        return f"RingMatrix({self.ring!r}, {[list(r) for r in self._data]})"

    def map(self, fn: Callable, ring=None) -> RingMatrix:
        ring = self.ring if ring is None else ring
        return RingMatrix._raw(ring, tuple(tuple(ring.coerce(fn(v)) for v in r)
                                           for r in self._data), self.rows, self.cols)

    def __add__(self, other: RingMatrix) -> RingMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return RingMatrix._raw(self.ring, tuple(tuple(a + b for a, b in zip(r1, r2))
                                                for r1, r2 in zip(self._data, other._data)),
                               self.rows, self.cols)

    def __neg__(self) -> RingMatrix:
        return RingMatrix._raw(self.ring, tuple(tuple(-a for a in r) for r in self._data),
                               self.rows, self.cols)

    def __sub__(self, other: RingMatrix) -> RingMatrix:
        return self + (-other)

    def scale(self, c) -> RingMatrix:
        c = self.ring.coerce(c)
        return RingMatrix._raw(self.ring, tuple(tuple(c * a for a in r) for r in self._data),
                               self.rows, self.cols)

    def __mul__(self, other: RingMatrix) -> RingMatrix:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"inner dimensions disagree: {self.shape} * {other.shape}")
        z = self.ring.zero()
        other_rows = [[(j, v) for j, v in enumerate(r) if v] for r in other._data]
        out = []
        for r in self._data:
            acc: dict[int, object] = {}
            for k, a in enumerate(r):
                if not a:
                    continue
                for j, b in other_rows[k]:
                    p = a * b
                    acc[j] = acc[j] + p if j in acc else p
            out.append(tuple(acc.get(j, z) for j in range(other.cols)))
        return RingMatrix._raw(self.ring, tuple(out), self.rows, other.cols)

    def transpose(self) -> RingMatrix:
        return RingMatrix._raw(self.ring, tuple(zip(*self._data)) if self.rows else (),
                               self.cols, self.rows)

    def to_json(self) -> list:
        if isinstance(self.ring, ScalarRing):
            return [[fmt_scalar(v) for v in r] for r in self._data]
        return [[v.to_json() for v in r] for r in self._data]


def block_diag(*mats: RingMatrix) -> RingMatrix:
    ring = mats[0].ring
    n = sum(m.rows for m in mats)
    c = sum(m.cols for m in mats)
    entries = {}
    r0 = c0 = 0
    for m in mats:
        for (i, j), v in m.nonzero().items():
            entries[(r0 + i, c0 + j)] = v
        r0 += m.rows
        c0 += m.cols
    return RingMatrix.from_entries(ring, n, c, entries)


def scalar_matrix(rows: Sequence[Sequence], ring: ScalarRing = QQ) -> RingMatrix:
    return RingMatrix(ring, rows)


def laurent_matrix(rows: Sequence[Sequence]) -> RingMatrix:
    return RingMatrix(LAURENT, rows)


def det_bound() -> int:
    raw = os.environ.get("CTRLK_DET_BOUND")
    return int(raw) if raw else DEFAULT_DET_BOUND


def _is_commutative_matrix(A: RingMatrix) -> bool:
    if A.ring.commutative:
        return True
    return all(v.is_rotation_only() for v in A.nonzero().values())


def mat_det(A: RingMatrix, bound: int | None = None):
    """Exact determinant by cofactor expansion.

    Rows and columns with a single nonzero entry are expanded first without
    branching; ``bound`` limits the size of the residual core that needs a
    genuine branching expansion (default 12, env ``CTRLK_DET_BOUND``).
    """
    if A.rows != A.cols:
        raise ValueError(f"determinant of non-square {A.shape} matrix")
    if not _is_commutative_matrix(A):
        raise ValueError("determinant requires a commutative entry ring")
    bound = det_bound() if bound is None else bound
    ring = A.ring
    entries = A.nonzero()
    rows = list(range(A.rows))
    cols = list(range(A.cols))

    sign = 1
    factor = ring.one()
    # forced pivots: repeatedly expand along a row or column with one nonzero
    while True:
        by_row: dict[int, list[int]] = {i: [] for i in rows}
        by_col: dict[int, list[int]] = {j: [] for j in cols}
        for (i, j) in entries:
            by_row[i].append(j)
            by_col[j].append(i)
        if any(not v for v in by_row.values()) or any(not v for v in by_col.values()):
            return ring.zero()
        pivot = next(((i, v[0]) for i, v in by_row.items() if len(v) == 1), None)
        if pivot is None:
            pivot = next(((v[0], j) for j, v in by_col.items() if len(v) == 1), None)
        if pivot is None:
            break
        i, j = pivot
        ri, cj = rows.index(i), cols.index(j)
        if (ri + cj) % 2:
            sign = -sign
        factor = factor * entries[(i, j)]
        rows.remove(i)
        cols.remove(j)
        entries = {k: v for k, v in entries.items() if k[0] != i and k[1] != j}
        if not rows:
            break
    if not rows:
        return factor if sign == 1 else -factor
    if len(rows) > bound:
        raise ValueError(f"determinant core of size {len(rows)} exceeds bound {bound}")
    core = _cofactor(tuple(rows), tuple(cols), entries, ring, {})
    out = factor * core
    return out if sign == 1 else -out


def _cofactor(rows: tuple, cols: tuple, entries: dict, ring, memo: dict):
    if not rows:
        return ring.one()
    key = (rows, cols)
    if key in memo:
        return memo[key]
    # pivot on the sparsest row
    best = min(rows, key=lambda i: sum(1 for j in cols if (i, j) in entries))
    ri = rows.index(best)
    sub_rows = rows[:ri] + rows[ri + 1:]
    total = ring.zero()
    for cj, j in enumerate(cols):
        v = entries.get((best, j))
        if not v:
            continue
        minor = _cofactor(sub_rows, cols[:cj] + cols[cj + 1:], entries, ring, memo)
        if not minor:
            continue
        term = v * minor
        total = total - term if (ri + cj) % 2 else total + term
    memo[key] = total
    return total


def mat_inverse(A: RingMatrix) -> RingMatrix:
    """Inverse over QQ by Gauss-Jordan elimination; raises on singular input."""
    if not isinstance(A.ring, ScalarRing):
        raise ValueError("mat_inverse works over scalar coefficients only")
    n = A.rows
    if A.cols != n:
        raise ValueError("inverse of non-square matrix")
    aug = [list(A.row(i)) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise ValueError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    inv = RingMatrix(QQ, [row[n:] for row in aug])
    if A.ring.integer:
        return RingMatrix(A.ring, inv.tolist())
    return inv


def monomial_inverse(A: RingMatrix) -> RingMatrix:
    """Inverse of a generalized permutation matrix with unit entries."""
    nz = _monomial_positions(A)
    entries = {(j, i): A.ring.unit_inverse(v) for (i, j), v in nz.items()}
    return RingMatrix.from_entries(A.ring, A.cols, A.rows, entries)


def _monomial_positions(A: RingMatrix) -> dict:
    if A.rows != A.cols:
        raise ValueError("monomial matrix must be square")
    nz = A.nonzero()
    rows = [i for i, _ in nz]
    cols = [j for _, j in nz]
    if sorted(rows) != list(range(A.rows)) or sorted(cols) != list(range(A.cols)):
        raise ValueError("input is not a monomial (generalized permutation) matrix")
    for v in nz.values():
        if not A.ring.is_unit(v):
            raise ValueError(f"entry {v} is not a unit")
    return nz


# --------------------------------------------------------------------------
# Elementary witnesses


@dataclass(frozen=True)
class Elementary:
    """E(i, j, a): identity plus ``a`` at off-diagonal position (i, j), 0-based."""

    i: int
    j: int
    a: object

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("elementary factor needs i != j")

    def matrix(self, ring, n: int) -> RingMatrix:
        base = {(k, k): ring.one() for k in range(n)}
        base[(self.i, self.j)] = self.a
        return RingMatrix.from_entries(ring, n, n, base)

    def inverse(self) -> Elementary:
        return Elementary(self.i, self.j, -self.a)

    def __str__(self):
        return f"E({self.i},{self.j},{self.a})"


@dataclass(frozen=True)
class ElementaryWitness:
    """An ordered product of elementary factors, optionally times a residual.

    ``product() == factors[0] * factors[1] * ... * residual``.
    """

    ring: object
    size: int
    factors: tuple[Elementary, ...] = ()
    residual: RingMatrix | None = None

    def __post_init__(self):
        for f in self.factors:
            if not (0 <= f.i < self.size and 0 <= f.j < self.size):
                raise ValueError(f"factor {f} out of range for size {self.size}")
        if self.residual is not None:
            if self.residual.shape != (self.size, self.size):
                raise ValueError("residual has wrong size")
            nz = self.residual.nonzero()
            if any(i != j for i, j in nz) or len(nz) != self.size or \
                    not all(self.ring.is_unit(v) for v in nz.values()):
                raise ValueError("residual must be a diagonal matrix of units")

    def product(self) -> RingMatrix:
        # right-multiplying by E(i,j,a) adds a * column i to column j
        cols = [{k: self.ring.one()} for k in range(self.size)]
        for f in self.factors:
            src, dst = cols[f.i], dict(cols[f.j])
            for r, v in src.items():
                w = v * self.ring.coerce(f.a)
                dst[r] = dst[r] + w if r in dst else w
            cols[f.j] = {r: v for r, v in dst.items() if v}
        entries = {(r, c): v for c, col in enumerate(cols) for r, v in col.items()}
        out = RingMatrix.from_entries(self.ring, self.size, self.size, entries)
        if self.residual is not None:
            out = out * self.residual
        return out

    def inverse(self) -> ElementaryWitness:
        if self.residual is not None:
            raise ValueError("inverse of a witness with residual is not elementary")
        return ElementaryWitness(self.ring, self.size,
                                 tuple(f.inverse() for f in reversed(self.factors)))

    def __len__(self):
        return len(self.factors)

    def to_json(self) -> dict:
        enc = (lambda v: fmt_scalar(v)) if isinstance(self.ring, ScalarRing) else \
            (lambda v: self.ring.coerce(v).to_json())
        return {
            "ring": self.ring.name,
            "size": self.size,
            "factors": [{"i": f.i, "j": f.j, "a": enc(f.a)} for f in self.factors],
            "residual": None if self.residual is None else self.residual.to_json(),
        }

    @classmethod
    def from_json(cls, d: Mapping) -> ElementaryWitness:
        ring = {"QQ": QQ, "ZZ": ZZ, "laurent": LAURENT, "dihedral": DIHEDRAL}[d["ring"]]
        if isinstance(ring, ScalarRing):
            dec = to_scalar
        elif ring is LAURENT:
            dec = LaurentPoly.from_json
        else:
            dec = DihedralElem.from_json
        factors = tuple(Elementary(int(f["i"]), int(f["j"]), dec(f["a"])) for f in d["factors"])
        residual = None
        if d.get("residual") is not None:
            residual = matrix_from_json({"ring": d["ring"], "entries": d["residual"]})
        return cls(ring, int(d["size"]), factors, residual)


def verify_witness(w: ElementaryWitness, target: RingMatrix) -> bool:
    if target.shape != (w.size, w.size):
        raise ValueError(f"witness of size {w.size} against {target.shape} target")
    return w.product() == target


def _whitehead(i: int, j: int, v, ring) -> list[Elementary]:
    """E(i,j,v) E(j,i,-v^-1) E(i,j,v): v at (i,j), -v^-1 at (j,i), zeros on i,j diagonal."""
    vi = ring.unit_inverse(v)
    return [Elementary(i, j, v), Elementary(j, i, -vi), Elementary(i, j, v)]


def elem_factor_monomial(A: RingMatrix) -> ElementaryWitness:
    """Write a determinant-one monomial matrix as a product of elementary matrices."""
    ring = A.ring
    if not _is_commutative_matrix(A):
        raise ValueError("monomial factorization needs commutative entries")
    _monomial_positions(A)
    if mat_det(A) != 1:
        raise ValueError("monomial matrix does not have determinant 1")
    n = A.rows
    cur = [dict((j, v) for j, v in enumerate(A.row(i)) if v) for i in range(n)]
    factors: list[Elementary] = []

    def apply_left_inverse(ws: list[Elementary]):
        # cur <- (product ws)^-1 * cur; the first factor's inverse acts first.
        # E(i,j,a)^-1 * M: row i -= a * row j
        for f in ws:
            ri, rj = cur[f.i], cur[f.j]
            out = dict(ri)
            for c, v in rj.items():
                w = -f.a * v
                out[c] = out[c] + w if c in out else w
            cur[f.i] = {c: v for c, v in out.items() if v}

    for j in range(n):
        i = next(r for r in range(j, n) if j in cur[r])
        a = cur[i][j]
        if i != j:
            ws = _whitehead(i, j, a, ring)
            factors.extend(ws)
            apply_left_inverse(ws)
        elif a != 1:
            if j == n - 1:
                raise AssertionError("determinant bookkeeping failed")
            # diag(a, a^-1) on (j, j+1) = W(a) W(-1)
            ws = _whitehead(j, j + 1, a, ring) + _whitehead(j, j + 1, ring.coerce(-1), ring)
            factors.extend(ws)
            apply_left_inverse(ws)
    assert all(cur[k] == {k: 1} for k in range(n)), "reduction did not reach identity"
    return ElementaryWitness(ring, n, tuple(factors))


def permutations_det(A: RingMatrix):
    """Leibniz formula; exponential, used only as a test oracle."""
    n = A.rows
    total = A.ring.zero()
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = A.ring.one()
        for i in range(n):
            term = term * A[i, perm[i]]
            if not term:
                break
        total = total - term if inv % 2 else total + term
    return total


def matrix_from_json(data: Mapping) -> RingMatrix:
    """Decode a ``{"ring": ..., "entries": [[...]]}`` payload."""
    ring_name = data.get("ring", "laurent")
    rows = data["entries"]
    if ring_name == "laurent":
        return RingMatrix(LAURENT, [[LaurentPoly.from_json(v) for v in r] for r in rows])
    if ring_name == "dihedral":
        return RingMatrix(DIHEDRAL, [[DihedralElem.from_json(v) for v in r] for r in rows])
    if ring_name in ("QQ", "ZZ"):
        return RingMatrix(ZZ if ring_name == "ZZ" else QQ, [[to_scalar(v) for v in r] for r in rows])
    raise ValueError(f"unknown ring {ring_name!r}")


def matrix_to_json(A: RingMatrix) -> dict:
    return {"ring": A.ring.name, "rows": A.rows, "cols": A.cols, "entries": A.to_json()}


__all__ = [
    "QQ", "ZZ", "LAURENT", "DIHEDRAL", "T", "ScalarRing", "LaurentRing", "DihedralRing",
    "LaurentPoly", "DihedralElem", "RingMatrix", "Elementary", "ElementaryWitness",
    "laurent_mul", "dihedral_mul", "mat_det", "mat_inverse", "monomial_inverse",
    "elem_factor_monomial", "verify_witness", "block_diag", "to_scalar", "fmt_scalar",
    "permutations_det", "matrix_from_json", "matrix_to_json", "laurent_matrix",
    "scalar_matrix", "dihedral_word_mul", "dihedral_word_inv", "det_bound",
    "LAURENT_ZERO", "LAURENT_ONE", "DIHEDRAL_ZERO", "DIHEDRAL_ONE",
]
