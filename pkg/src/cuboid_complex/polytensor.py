"""Anisotropic tensor-product polynomials with exact rational coefficients.

A :class:`TensorPoly` stores the coefficients of a polynomial on the tensor
monomial basis ``t_x^i t_y^j t_z^l`` of the *reference* cube ``[0,1]^3``,
together with the geometry of the axis-aligned cell it lives on.  Physical
derivatives and integrals pick up the per-axis chain factors ``1/h`` and
``h`` from the cell geometry, so all calculus below is exact in
``fractions.Fraction`` arithmetic.

Mesh entities (vertices, edges, faces, cells) are described by
:class:`EntityRef`; traces onto entities and moments against weight
polynomials in entity-normalized coordinates are the building blocks the
element degrees of freedom are made of.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

AXIS_NAMES = ("x", "y", "z")

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Degree3:
    """Per-axis degree caps of an anisotropic tensor space Q_{kx,ky,kz}.

    A negative cap on any axis denotes the empty space: it contains no
    monomials at all (not even constants).  This is the natural convention
    for degree grids such as Q_{k-3,k-4} that vanish for small k.
    """

    kx: int
    ky: int
    kz: int

    @property
    def caps(self) -> tuple[int, int, int]:
        return (self.kx, self.ky, self.kz)

    @property
    def is_empty(self) -> bool:
        return self.kx < 0 or self.ky < 0 or self.kz < 0

    def dim(self) -> int:
        if self.is_empty:
            return 0
        return (self.kx + 1) * (self.ky + 1) * (self.kz + 1)

    def cap(self, axis: int) -> int:
        return self.caps[axis]

    def contains(self, exp: tuple[int, int, int]) -> bool:
        if self.is_empty:
            return False
        return all(0 <= exp[a] <= self.caps[a] for a in range(3))

    def exponents(self) -> Iterator[tuple[int, int, int]]:
        """All exponent triples, lexicographic with z fastest."""
        if self.is_empty:
            return
        for i in range(self.kx + 1):
            for j in range(self.ky + 1):
                for l in range(self.kz + 1):
                    yield (i, j, l)

    def index(self, exp: tuple[int, int, int]) -> int:
        if not self.contains(exp):
            raise IndexError(f"exponent {exp} outside degree grid {self.caps}")
        return (exp[0] * (self.ky + 1) + exp[1]) * (self.kz + 1) + exp[2]


def degree_from_caps(caps: dict[int, int], default: int) -> Degree3:
    """Degree grid with per-axis overrides, e.g. {0: k-2} over default k."""
    return Degree3(caps.get(0, default), caps.get(1, default), caps.get(2, default))


@dataclass(frozen=True)
class CellBox:
    """An axis-aligned box, possibly degenerate along some axes."""

    lo: tuple[Fraction, Fraction, Fraction]
    hi: tuple[Fraction, Fraction, Fraction]

    def __post_init__(self) -> None:
        for a in range(3):
            if self.lo[a] > self.hi[a]:
                raise ValueError(f"box extent reversed on axis {AXIS_NAMES[a]}")

    def h(self, axis: int) -> Fraction:
        return self.hi[axis] - self.lo[axis]

    def free_axes(self) -> tuple[int, ...]:
        return tuple(a for a in range(3) if self.lo[a] < self.hi[a])

    def measure(self) -> Fraction:
        m = _ONE
        for a in self.free_axes():
            m *= self.h(a)
        return m

    def to_reference(self, point: tuple[Fraction, Fraction, Fraction]) -> tuple[Fraction, ...]:
        out = []
        for a in range(3):
            h = self.h(a)
            if h == 0:
                if point[a] != self.lo[a]:
                    raise ValueError("point off the degenerate axis of the box")
                out.append(_ZERO)
            else:
                out.append(Fraction(point[a] - self.lo[a], 1) / h)
        return tuple(out)


def box(lox, hix, loy, hiy, loz, hiz) -> CellBox:
    fr = Fraction
    return CellBox((fr(lox), fr(loy), fr(loz)), (fr(hix), fr(hiy), fr(hiz)))


UNIT_BOX = box(0, 1, 0, 1, 0, 1)

_KIND_FOR_NFREE = {0: "vertex", 1: "edge", 2: "face", 3: "cell"}


@dataclass(frozen=True)
class EntityRef:
    """A mesh entity: its kind and geometric extent.

    ``extent`` is degenerate (lo == hi) exactly on the frozen axes; an edge
    has one free axis, a face two, a cell three.
    """

    kind: str
    extent: CellBox

    def __post_init__(self) -> None:
        expected = _KIND_FOR_NFREE[len(self.extent.free_axes())]
        if self.kind != expected:
            raise ValueError(f"entity tagged {self.kind!r} but extent says {expected!r}")

    @property
    def free_axes(self) -> tuple[int, ...]:
        return self.extent.free_axes()

    @property
    def tag(self) -> str:
        """Axis tag, e.g. 'x' for an x-directed edge, 'yz' for a face."""
        return "".join(AXIS_NAMES[a] for a in self.free_axes) or "pt"

    def measure(self) -> Fraction:
        return self.extent.measure()


def vertex_entity(point) -> EntityRef:
    p = tuple(Fraction(c) for c in point)
    return EntityRef("vertex", CellBox(p, p))


class TensorPoly:
    """A polynomial on an axis-aligned cell, in reference coordinates.

    Coefficients are stored densely on the monomial basis of ``degree``,
    flattened with z fastest.  The ``cell`` geometry is what makes
    ``differentiate`` and ``moment`` physical rather than merely formal.
    """

    __slots__ = ("degree", "coeffs", "cell")

    def __init__(self, degree: Degree3, coeffs, cell: CellBox = UNIT_BOX):
        self.degree = degree
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        if len(self.coeffs) != degree.dim():
            raise ValueError("coefficient count does not match degree grid")
        self.cell = cell

    # -- construction ---------------------------------------------------

    @classmethod
    def zero(cls, degree: Degree3, cell: CellBox = UNIT_BOX) -> "TensorPoly":
        return cls(degree, [0] * degree.dim(), cell)

    @classmethod
    def monomial(cls, exp: tuple[int, int, int], cell: CellBox = UNIT_BOX,
                 coeff: Fraction = _ONE) -> "TensorPoly":
        deg = Degree3(*exp)
        c = [_ZERO] * deg.dim()
        c[-1] = Fraction(coeff)
        return cls(deg, c, cell)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int, int], Fraction],
                   degree: Degree3 | None = None, cell: CellBox = UNIT_BOX) -> "TensorPoly":
        live = {e: Fraction(v) for e, v in terms.items() if v}
        if degree is None:
            if live:
                degree = Degree3(*(max(e[a] for e in live) for a in range(3)))
            else:
                degree = Degree3(0, 0, 0)
        c = [_ZERO] * degree.dim()
        for e, v in live.items():
            c[degree.index(e)] = v
        return cls(degree, c, cell)

    # -- access ----------------------------------------------------------

    def coeff(self, exp: tuple[int, int, int]) -> Fraction:
        if not self.degree.contains(exp):
            return _ZERO
        return self.coeffs[self.degree.index(exp)]

    def terms(self) -> Iterator[tuple[tuple[int, int, int], Fraction]]:
        for pos, e in enumerate(self.degree.exponents()):
            v = self.coeffs[pos]
            if v:
                yield e, v

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorPoly):
            return NotImplemented
        if self.cell != other.cell:
            return False
        return dict(self.terms()) == dict(other.terms())

    def __hash__(self):
        raise TypeError("TensorPoly is mutable-shaped; not hashable")

    def __repr__(self) -> str:
        parts = []
        for (i, j, l), v in self.terms():
            mono = "".join(
                f"{AXIS_NAMES[a]}^{e}" if e > 1 else (AXIS_NAMES[a] if e == 1 else "")
                for a, e in enumerate((i, j, l)))
            parts.append(f"{v}*{mono}" if mono else f"{v}")
        body = " + ".join(parts) if parts else "0"
        return f"TensorPoly({body})"

    # -- algebra ----------------------------------------------------------

    def _binop(self, other: "TensorPoly", sign: int) -> "TensorPoly":
        if self.cell != other.cell:
            raise ValueError("polynomials live on different cells")
        terms = dict(self.terms())
        for e, v in other.terms():
            terms[e] = terms.get(e, _ZERO) + sign * v
        deg = Degree3(*(max(self.degree.caps[a], other.degree.caps[a]) for a in range(3)))
        return TensorPoly.from_terms(terms, deg, self.cell)

    def __add__(self, other: "TensorPoly") -> "TensorPoly":
        return self._binop(other, 1)

    def __sub__(self, other: "TensorPoly") -> "TensorPoly":
        return self._binop(other, -1)

    def __neg__(self) -> "TensorPoly":
        return self.scale(-1)

    def scale(self, factor) -> "TensorPoly":
        f = Fraction(factor)
        return TensorPoly(self.degree, [f * c for c in self.coeffs], self.cell)

    def __mul__(self, other):
        if isinstance(other, TensorPoly):
            if self.cell != other.cell:
                raise ValueError("polynomials live on different cells")
            terms: dict[tuple[int, int, int], Fraction] = {}
            for e1, v1 in self.terms():
                for e2, v2 in other.terms():
                    e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                    terms[e] = terms.get(e, _ZERO) + v1 * v2
            deg = Degree3(*(self.degree.caps[a] + other.degree.caps[a] for a in range(3)))
            return TensorPoly.from_terms(terms, deg, self.cell)
        return self.scale(other)

    __rmul__ = __mul__

    # -- calculus ----------------------------------------------------------

    def differentiate(self, axis: int) -> "TensorPoly":
        """Physical partial derivative along ``axis`` (chain factor 1/h)."""
        h = self.cell.h(axis)
        if h == 0:
            raise ValueError(f"cannot differentiate along frozen axis {AXIS_NAMES[axis]}")
        caps = list(self.degree.caps)
        caps[axis] -= 1
        new_deg = Degree3(*caps)
        terms: dict[tuple[int, int, int], Fraction] = {}
        for e, v in self.terms():
            if e[axis] >= 1:
                ne = list(e)
                ne[axis] -= 1
                terms[tuple(ne)] = v * e[axis] / h
        if new_deg.is_empty:
            new_deg = Degree3(0, 0, 0)
        return TensorPoly.from_terms(terms, new_deg, self.cell)

    def differentiate_multi(self, orders: tuple[int, int, int]) -> "TensorPoly":
        p = self
        for a in range(3):
            for _ in range(orders[a]):
                p = p.differentiate(a)
        return p

    def antiderivative(self, axis: int) -> "TensorPoly":
        """Exact physical antiderivative from the cell's lower face.

        Returns ``F`` with ``dF/d(axis) = self`` and ``F = 0`` on the face
        where the axis coordinate equals the cell's lower bound.
        """
        h = self.cell.h(axis)
        if h == 0:
            raise ValueError(f"cannot integrate along frozen axis {AXIS_NAMES[axis]}")
        caps = list(self.degree.caps)
        caps[axis] += 1
        terms: dict[tuple[int, int, int], Fraction] = {}
        for e, v in self.terms():
            ne = list(e)
            ne[axis] += 1
            terms[tuple(ne)] = v * h / (e[axis] + 1)
        return TensorPoly.from_terms(terms, Degree3(*caps), self.cell)

    # -- restriction and evaluation ----------------------------------------

    def trace(self, entity: EntityRef) -> "TensorPoly":
        """Restrict to a boundary entity of the cell.

        The frozen axes of ``entity`` must sit at this cell's lower or upper
        face; the free axes must span exactly the cell's extent there.  The
        result lives on the entity, with entity-normalized coordinates that
        coincide with the cell's own reference coordinates on the free axes.
        """
        at: list[int | None] = [None, None, None]
        for a in range(3):
            elo, ehi = entity.extent.lo[a], entity.extent.hi[a]
            if elo == ehi:
                if elo == self.cell.lo[a]:
                    at[a] = 0
                elif elo == self.cell.hi[a]:
                    at[a] = 1
                else:
                    raise ValueError(f"entity not on the cell boundary (axis {AXIS_NAMES[a]})")
            else:
                if (elo, ehi) != (self.cell.lo[a], self.cell.hi[a]):
                    raise ValueError(f"entity extent mismatch on free axis {AXIS_NAMES[a]}")
        terms: dict[tuple[int, int, int], Fraction] = {}
        for e, v in self.terms():
            ne = list(e)
            keep = True
            for a in range(3):
                if at[a] is None:
                    continue
                if at[a] == 0:
                    if e[a] != 0:
                        keep = False
                        break
                else:
                    ne[a] = 0  # t=1: all powers contribute with weight 1
            if keep:
                ne_t = tuple(ne)
                terms[ne_t] = terms.get(ne_t, _ZERO) + v
        caps = tuple(self.degree.caps[a] if at[a] is None else 0 for a in range(3))
        return TensorPoly.from_terms(terms, Degree3(*caps), entity.extent)

    def eval_reference(self, t: tuple[Fraction, Fraction, Fraction]) -> Fraction:
        tx, ty, tz = (Fraction(c) for c in t)
        kx, ky, kz = self.degree.caps
        pz = [_ONE]
        for _ in range(kz):
            pz.append(pz[-1] * tz)
        total = _ZERO
        pos = 0
        px = _ONE
        for i in range(kx + 1):
            py = _ONE
            for j in range(ky + 1):
                xy = px * py
                for l in range(kz + 1):
                    c = self.coeffs[pos]
                    pos += 1
                    if c:
                        total += c * xy * pz[l]
                py *= ty
            px *= tx
        return total

    def eval_physical(self, point) -> Fraction:
        p = tuple(Fraction(c) for c in point)
        return self.eval_reference(self.cell.to_reference(p))


def moment(p: TensorPoly, weight: TensorPoly, entity: EntityRef) -> Fraction:
    """Physical integral of ``p * weight`` over ``entity``.

    ``p`` may live on the entity already (a trace) or on a cell having the
    entity on its boundary, in which case the trace is taken first.
    ``weight`` is a polynomial in the entity-normalized coordinates of the
    free axes (frozen-axis exponents must be zero).  Vertices are handled
    uniformly: the "integral" is the point value and the measure is 1.
    """
    if p.cell == entity.extent:
        q = p
    else:
        q = p.trace(entity)
    free = set(entity.free_axes)
    for e, _ in weight.terms():
        for a in range(3):
            if e[a] and a not in free:
                raise ValueError("weight uses a frozen axis of the entity")
    total = _ZERO
    for e1, v1 in q.terms():
        for e2, v2 in weight.terms():
            f = v1 * v2
            for a in free:
                f /= e1[a] + e2[a] + 1
            total += f
    return total * entity.measure()


def monomial_weight(exp: tuple[int, int, int], entity: EntityRef) -> TensorPoly:
    """The weight ``prod t_a^{exp_a}`` in entity-normalized coordinates."""
    for a in range(3):
        if exp[a] and a not in entity.free_axes:
            raise ValueError("weight exponent on a frozen axis")
    return TensorPoly.monomial(exp, entity.extent)


def exponent_range(degree: Degree3) -> list[tuple[int, int, int]]:
    """Exponent triples of a degree grid as a list (empty if the grid is)."""
    return list(degree.exponents())


def tensor_interval_points(n: int) -> list[Fraction]:
    """Deterministic interior sample points (i/(n+1) for i=1..n)."""
    return [Fraction(i, n + 1) for i in range(1, n + 1)]


def grid_points(n: int) -> list[tuple[Fraction, Fraction]]:
    pts = tensor_interval_points(n)
    return list(product(pts, pts))
