"""The element catalog: shape spaces, degrees of freedom, unisolvency.

Thirteen families are provided, identified by short names:

========== ===================================================== ======
name       space                                                 min k
========== ===================================================== ======
u          scalar, twice-differentiable across faces              3
sigma      symmetric matrix, tangential-tangential smooth         3
xi         traceless matrix, normal-row smooth                    3
q          vector, fully discontinuous (moment-matched)           3
sigma-red  reduced-regularity variant of ``sigma``                3
xi-red     reduced variant of ``xi`` with coupled diagonal        3
q-red      cell-moment-only variant of ``q``                      3
x          vector, continuous with extra tangential smoothness    2
phi        alias for ``sigma`` at order k+1                       2
gamma      symmetric matrix, normal-column smooth                 2
gamma-red  reduced-regularity variant of ``gamma``                2
z          vector, discontinuous, face-moment matched             2
z-red      cell-moment-only variant of ``z``                      2
========== ===================================================== ======

Every family is described per matrix/vector component by anisotropic
degree grids (see :class:`~cuboid_complex.polytensor.Degree3`) and by a
list of :class:`DofFunctional`.  DOFs attach to reference-cell entities;
derivative multi-indices never exceed one per axis, weights are monomials
in entity-normalized coordinates.  The traceless families store the
diagonal as the two independent components (xx, yy); zz is their negative
sum wherever it is needed.

Component patterns are generated parametrically in the axes, which bakes
in the cyclic x -> y -> z -> x covariance instead of asserting it after
the fact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping

from . import _exactcore
from .polytensor import (AXIS_NAMES, CellBox, Degree3, EntityRef, TensorPoly,
                         UNIT_BOX, degree_from_caps, moment, monomial_weight)

FAMILY_NAMES = ("u", "sigma", "xi", "q", "sigma-red", "xi-red", "q-red",
                "x", "phi", "gamma", "gamma-red", "z", "z-red")

_MIN_K = {"u": 3, "sigma": 3, "xi": 3, "q": 3, "sigma-red": 3, "xi-red": 3,
          "q-red": 3, "x": 2, "phi": 2, "gamma": 2, "gamma-red": 2,
          "z": 2, "z-red": 2}

# Storage component keys, in the fixed order used for DOF sorting.
COMPONENT_ORDER = ("s", "x", "y", "z",
                   "xx", "yy", "zz", "xy", "xz", "yx", "yz", "zx", "zy",
                   "diag")
_COMP_POS = {c: i for i, c in enumerate(COMPONENT_ORDER)}

_VEC_COMPS = ("x", "y", "z")
_SYM_COMPS = ("xx", "yy", "zz", "xy", "xz", "yz")
_DIAG_COMPS = ("xx", "yy", "zz")
_OFF_PAIRS_SYM = ((0, 1), (0, 2), (1, 2))
_OFF_PAIRS_FULL = ((0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1))


def comp_name(*axes: int) -> str:
    return "".join(AXIS_NAMES[a] for a in axes)


def _others(a: int) -> tuple[int, int]:
    """The two remaining axes, in increasing order."""
    return tuple(x for x in range(3) if x != a)  # type: ignore[return-value]


def _third(a: int, b: int) -> int:
    return 3 - a - b


def _unit(axis: int) -> tuple[int, int, int]:
    e = [0, 0, 0]
    e[axis] = 1
    return tuple(e)  # type: ignore[return-value]


def _dsum(d1, d2):
    return (d1[0] + d2[0], d1[1] + d2[1], d1[2] + d2[2])


_D0 = (0, 0, 0)


@dataclass(frozen=True)
class FamilyId:
    """A family name together with an admissible polynomial order."""

    name: str
    k: int

    def __post_init__(self) -> None:
        if self.name not in FAMILY_NAMES:
            raise ValueError(f"unknown family {self.name!r}")
        if self.k < _MIN_K[self.name]:
            raise ValueError(
                f"family {self.name!r} requires k >= {_MIN_K[self.name]}, got {self.k}")

    @property
    def min_k(self) -> int:
        return _MIN_K[self.name]


def family(name: str, k: int) -> FamilyId:
    return FamilyId(name, k)


def min_order(name: str) -> int:
    return _MIN_K[name]


def _resolve(fam: FamilyId) -> tuple[str, int]:
    """Fold the ``phi`` alias onto its base family."""
    if fam.name == "phi":
        return ("sigma", fam.k + 1)
    return (fam.name, fam.k)


# ---------------------------------------------------------------------------
# shape spaces


@dataclass(frozen=True)
class ComponentGroup:
    """Components whose DOFs and monomial coordinates form one block.

    For all families but the traceless diagonal this is a single component.
    The traceless diagonal couples (xx, yy, zz) with zz = -(xx + yy), so the
    group stores three components but only two independent ones.
    """

    name: str
    components: tuple[str, ...]
    independent: tuple[str, ...]


@dataclass(frozen=True)
class ShapeSpaceSpec:
    """Per-component degree grids plus the component group structure."""

    kind: str                     # "scalar" | "vector" | "matrix"
    symmetric: bool
    traceless: bool
    degrees: dict[str, Degree3]
    groups: tuple[ComponentGroup, ...]

    def group_coords(self, group: ComponentGroup) -> list[tuple[str, tuple[int, int, int]]]:
        """Independent monomial coordinates of a group, in canonical order."""
        out = []
        for c in group.independent:
            out.extend((c, e) for e in self.degrees[c].exponents())
        return out

    def group_full_coords(self, group: ComponentGroup) -> list[tuple[str, tuple[int, int, int]]]:
        out = []
        for c in group.components:
            out.extend((c, e) for e in self.degrees[c].exponents())
        return out

    def local_dimension(self) -> int:
        return sum(len(self.group_coords(g)) for g in self.groups)

    def group_of(self, component: str) -> ComponentGroup:
        for g in self.groups:
            if component in g.components or component == g.name:
                return g
        raise KeyError(component)


def shape_space(fam: FamilyId) -> ShapeSpaceSpec:
    name, k = _resolve(fam)
    if name == "u":
        return ShapeSpaceSpec("scalar", False, False,
                              {"s": Degree3(k, k, k)},
                              (ComponentGroup("s", ("s",), ("s",)),))
    if name in ("q", "q-red"):
        degs = {}
        for a in range(3):
            degs[comp_name(a)] = degree_from_caps({a: k - 2}, k - 1)
        groups = tuple(ComponentGroup(c, (c,), (c,)) for c in _VEC_COMPS)
        return ShapeSpaceSpec("vector", False, False, degs, groups)
    if name == "x":
        degs = {}
        for a in range(3):
            degs[comp_name(a)] = degree_from_caps({a: k}, k + 1)
        groups = tuple(ComponentGroup(c, (c,), (c,)) for c in _VEC_COMPS)
        return ShapeSpaceSpec("vector", False, False, degs, groups)
    if name in ("z", "z-red"):
        degs = {}
        for a in range(3):
            degs[comp_name(a)] = degree_from_caps({a: k}, k - 1)
        groups = tuple(ComponentGroup(c, (c,), (c,)) for c in _VEC_COMPS)
        return ShapeSpaceSpec("vector", False, False, degs, groups)
    if name in ("sigma", "sigma-red"):
        degs = {}
        for a in range(3):
            degs[comp_name(a, a)] = degree_from_caps({a: k - 2}, k)
        for a, b in _OFF_PAIRS_SYM:
            degs[comp_name(a, b)] = degree_from_caps({a: k - 1, b: k - 1}, k)
        groups = tuple(ComponentGroup(c, (c,), (c,)) for c in _SYM_COMPS)
        return ShapeSpaceSpec("matrix", True, False, degs, groups)
    if name in ("gamma", "gamma-red"):
        degs = {}
        for a in range(3):
            degs[comp_name(a, a)] = degree_from_caps({a: k + 1}, k - 1)
        for a, b in _OFF_PAIRS_SYM:
            degs[comp_name(a, b)] = degree_from_caps({a: k, b: k}, k - 1)
        groups = tuple(ComponentGroup(c, (c,), (c,)) for c in _SYM_COMPS)
        return ShapeSpaceSpec("matrix", True, False, degs, groups)
    if name in ("xi", "xi-red"):
        degs = {c: Degree3(k - 1, k - 1, k - 1) for c in _DIAG_COMPS}
        for a, b in _OFF_PAIRS_FULL:
            degs[comp_name(a, b)] = degree_from_caps({a: k - 2, b: k}, k - 1)
        groups = (ComponentGroup("diag", _DIAG_COMPS, ("xx", "yy")),) + tuple(
            ComponentGroup(comp_name(a, b), (comp_name(a, b),), (comp_name(a, b),))
            for a, b in _OFF_PAIRS_FULL)
        return ShapeSpaceSpec("matrix", False, True, degs, groups)
    raise ValueError(name)


# ---------------------------------------------------------------------------
# degrees of freedom


@dataclass(frozen=True)
class DofFunctional:
    """One degree of freedom.

    ``entity_label`` is the cell-local entity tag; ``entity`` its geometric
    realization (on the reference cell for catalog DOFs, on a physical cell
    after binding).  ``kind`` is "point", "moment" or "coupled"; a coupled
    DOF pairs the traceless diagonal against one member of the cell bubble
    basis, selected by ``bubble_index``.
    """

    entity_label: tuple
    entity: EntityRef
    component: str
    deriv: tuple[int, int, int]
    weight: tuple[int, int, int]
    kind: str
    bubble_index: int = -1

    def sort_key(self):
        return (_entity_sort_key(self.entity_label), _COMP_POS[self.component],
                self.deriv, self.weight, self.bubble_index)

    def dof_key(self, entity_id: tuple[str, int]):
        """Global identity of the functional, shared across adjacent cells."""
        return (entity_id, self.component, self.deriv, self.weight,
                self.kind, self.bubble_index)


_ENTITY_RANK = {"vertex": 0, "edge": 1, "face": 2, "cell": 3}

_VERTEX_CORNERS = [(ci, cj, cl) for ci in (0, 1) for cj in (0, 1) for cl in (0, 1)]
_EDGE_SIDES = [(0, 0), (0, 1), (1, 0), (1, 1)]


def _entity_sort_key(label: tuple) -> tuple[int, int]:
    kind = label[0]
    if kind == "vertex":
        c = label[1]
        return (0, 4 * c[0] + 2 * c[1] + c[2])
    if kind == "edge":
        _, axis, (s1, s2) = label
        return (1, 4 * axis + 2 * s1 + s2)
    if kind == "face":
        _, normal, side = label
        return (2, 2 * normal + side)
    return (3, 0)


def entity_ref_for(label: tuple, cell: CellBox) -> EntityRef:
    """Geometric realization of a local entity label on a given cell."""
    kind = label[0]
    if kind == "vertex":
        corner = label[1]
        p = tuple(cell.hi[a] if corner[a] else cell.lo[a] for a in range(3))
        return EntityRef("vertex", CellBox(p, p))
    if kind == "edge":
        _, axis, sides = label
        o1, o2 = _others(axis)
        lo = list(cell.lo)
        hi = list(cell.hi)
        for o, s in zip((o1, o2), sides):
            v = cell.hi[o] if s else cell.lo[o]
            lo[o] = hi[o] = v
        return EntityRef("edge", CellBox(tuple(lo), tuple(hi)))
    if kind == "face":
        _, normal, side = label
        lo = list(cell.lo)
        hi = list(cell.hi)
        v = cell.hi[normal] if side else cell.lo[normal]
        lo[normal] = hi[normal] = v
        return EntityRef("face", CellBox(tuple(lo), tuple(hi)))
    if kind == "cell":
        return EntityRef("cell", cell)
    raise ValueError(f"bad entity label {label!r}")


class _DofBuilder:
    """Accumulates raw DOF tuples for one family on one cell."""

    def __init__(self, cell: CellBox):
        self.cell = cell
        self.raw: list[DofFunctional] = []

    def _add(self, label, component, deriv, weight, kind, bubble_index=-1):
        self.raw.append(DofFunctional(label, entity_ref_for(label, self.cell),
                                      component, deriv, weight, kind, bubble_index))

    def at_vertices(self, component: str, derivs: Iterable[tuple[int, int, int]]):
        for corner in _VERTEX_CORNERS:
            for d in derivs:
                self._add(("vertex", corner), component, d, _D0, "point")

    def on_edges(self, component: str, axis: int,
                 derivs: Iterable[tuple[int, int, int]], weight_cap: int):
        if weight_cap < 0:
            return
        for sides in _EDGE_SIDES:
            for d in derivs:
                for w in range(weight_cap + 1):
                    wexp = [0, 0, 0]
                    wexp[axis] = w
                    self._add(("edge", axis, sides), component, d, tuple(wexp), "moment")

    def on_faces(self, component: str, normal: int,
                 derivs: Iterable[tuple[int, int, int]], caps: dict[int, int]):
        o1, o2 = _others(normal)
        grid = degree_from_caps({o1: caps.get(o1, 0), o2: caps.get(o2, 0), normal: 0}, 0)
        if grid.is_empty:
            return
        for side in (0, 1):
            for d in derivs:
                for w in grid.exponents():
                    self._add(("face", normal, side), component, d, w, "moment")

    def in_cell(self, component: str, caps: dict[int, int]):
        grid = degree_from_caps(caps, 0)
        if grid.is_empty:
            return
        for w in grid.exponents():
            self._add(("cell",), component, _D0, w, "moment")

    def coupled_cell(self, component: str, count: int):
        for i in range(count):
            self._add(("cell",), component, _D0, _D0, "coupled", i)


def _dofs_u(b: _DofBuilder, k: int) -> None:
    all_derivs = sorted(product((0, 1), repeat=3))
    b.at_vertices("s", all_derivs)
    for a in range(3):
        o1, o2 = _others(a)
        derivs = sorted([_D0, _unit(o1), _unit(o2), _dsum(_unit(o1), _unit(o2))])
        b.on_edges("s", a, derivs, k - 4)
    for n in range(3):
        o1, o2 = _others(n)
        b.on_faces("s", n, sorted([_D0, _unit(n)]), {o1: k - 4, o2: k - 4})
    b.in_cell("s", {0: k - 4, 1: k - 4, 2: k - 4})


def _dofs_sigma_diag(b: _DofBuilder, k: int, a: int, reduced: bool) -> None:
    comp = comp_name(a, a)
    o1, o2 = _others(a)
    if reduced:
        b.on_edges(comp, a, [_D0], k - 2)
    else:
        derivs = sorted([_D0, _unit(o1), _unit(o2), _dsum(_unit(o1), _unit(o2))])
        b.on_edges(comp, a, derivs, k - 2)
    tang_cap = k - 2 if reduced else k - 4
    # faces containing the axis a: normal o2 spans (a, o1), normal o1 spans (a, o2)
    for other, normal in ((o1, o2), (o2, o1)):
        derivs = [_D0] if reduced else sorted([_D0, _unit(normal)])
        b.on_faces(comp, normal, derivs, {a: k - 2, other: tang_cap})
    b.in_cell(comp, {a: k - 2, o1: tang_cap, o2: tang_cap})


def _dofs_sigma_off(b: _DofBuilder, k: int, a: int, bx: int, reduced: bool) -> None:
    comp = comp_name(a, bx)
    c = _third(a, bx)
    dz = _unit(c)
    b.at_vertices(comp, sorted([_D0, dz]))
    b.on_edges(comp, a, sorted([_D0, dz]), k - 3)
    b.on_edges(comp, bx, sorted([_D0, dz]), k - 3)
    b.on_edges(comp, c, [_D0], k - 4)
    face_ab_derivs = [_D0] if reduced else sorted([_D0, dz])
    b.on_faces(comp, c, face_ab_derivs, {a: k - 3, bx: k - 3})
    b.on_faces(comp, bx, [_D0], {a: k - 3, c: k - 4})
    b.on_faces(comp, a, [_D0], {bx: k - 3, c: k - 4})
    b.in_cell(comp, {a: k - 3, bx: k - 3, c: (k - 2 if reduced else k - 4)})


def _dofs_xi_diag(b: _DofBuilder, k: int) -> None:
    # Lagrange-style grids for the two independent diagonal components.
    for comp in ("xx", "yy"):
        b.at_vertices(comp, [_D0])
        for a in range(3):
            b.on_edges(comp, a, [_D0], k - 3)
        for n in range(3):
            o1, o2 = _others(n)
            b.on_faces(comp, n, [_D0], {o1: k - 3, o2: k - 3})
        b.in_cell(comp, {0: k - 3, 1: k - 3, 2: k - 3})


def _dofs_xi_off(b: _DofBuilder, k: int, a: int, bx: int) -> None:
    comp = comp_name(a, bx)
    c = _third(a, bx)
    db = _unit(bx)
    b.on_edges(comp, a, sorted([_D0, db]), k - 2)
    b.on_faces(comp, c, [_D0], {a: k - 2, bx: k - 4})
    b.on_faces(comp, bx, sorted([_D0, db]), {a: k - 2, c: k - 3})
    b.in_cell(comp, {a: k - 2, bx: k - 4, c: k - 3})


def _dofs_xired_diag(b: _DofBuilder, k: int) -> None:
    # Values and edge/face moments; the third diagonal component is
    # determined by the zero-trace constraint, so only two independent
    # values per vertex and per edge weight survive.  Face moments pick the
    # component matching the face normal; cell moments couple all three
    # against the divergence-free-trace bubble basis.
    for comp in ("xx", "yy"):
        b.at_vertices(comp, [_D0])
        for a in range(3):
            b.on_edges(comp, a, [_D0], k - 3)
    for n in range(3):
        o1, o2 = _others(n)
        b.on_faces(comp_name(n, n), n, [_D0], {o1: k - 3, o2: k - 3})
    b.coupled_cell("diag", 2 * (k - 2) ** 2 * (k + 1))


def _dofs_xired_off(b: _DofBuilder, k: int, a: int, bx: int) -> None:
    comp = comp_name(a, bx)
    c = _third(a, bx)
    b.on_faces(comp, bx, [_D0], {a: k - 2, c: k - 1})
    b.in_cell(comp, {a: k - 2, bx: k - 2, c: k - 1})


def _dofs_q(b: _DofBuilder, k: int, a: int) -> None:
    comp = comp_name(a)
    o1, o2 = _others(a)
    b.on_edges(comp, a, [_D0], k - 2)
    b.on_faces(comp, o2, [_D0], {a: k - 2, o1: k - 3})
    b.on_faces(comp, o1, [_D0], {a: k - 2, o2: k - 3})
    b.in_cell(comp, {a: k - 2, o1: k - 3, o2: k - 3})


def _dofs_qred(b: _DofBuilder, k: int, a: int) -> None:
    o1, o2 = _others(a)
    b.in_cell(comp_name(a), {a: k - 2, o1: k - 1, o2: k - 1})


def _dofs_x(b: _DofBuilder, k: int, a: int) -> None:
    comp = comp_name(a)
    # tangential axes in cyclic order: x -> (y, z), y -> (z, x), z -> (x, y)
    bb = (a + 1) % 3
    cc = (a + 2) % 3
    derivs4 = sorted([_D0, _unit(bb), _unit(cc), _dsum(_unit(bb), _unit(cc))])
    b.at_vertices(comp, derivs4)
    b.on_edges(comp, a, derivs4, k - 2)
    b.on_edges(comp, bb, sorted([_D0, _unit(cc)]), k - 3)
    b.on_edges(comp, cc, sorted([_D0, _unit(bb)]), k - 3)
    b.on_faces(comp, a, [_D0], {bb: k - 3, cc: k - 3})
    b.on_faces(comp, cc, sorted([_D0, _unit(cc)]), {a: k - 2, bb: k - 3})
    b.on_faces(comp, bb, sorted([_D0, _unit(bb)]), {a: k - 2, cc: k - 3})
    b.in_cell(comp, {a: k - 2, bb: k - 3, cc: k - 3})


def _dofs_gamma_diag(b: _DofBuilder, k: int, a: int, reduced: bool) -> None:
    comp = comp_name(a, a)
    o1, o2 = _others(a)
    derivs = [_D0] if reduced else sorted([_D0, _unit(a)])
    b.on_faces(comp, a, derivs, {o1: k - 1, o2: k - 1})
    b.in_cell(comp, {a: (k - 1 if reduced else k - 3), o1: k - 1, o2: k - 1})


def _dofs_gamma_off(b: _DofBuilder, k: int, a: int, bx: int) -> None:
    comp = comp_name(a, bx)
    c = _third(a, bx)
    b.on_edges(comp, c, [_D0], k - 1)
    b.on_faces(comp, bx, [_D0], {a: k - 2, c: k - 1})
    b.on_faces(comp, a, [_D0], {bx: k - 2, c: k - 1})
    b.in_cell(comp, {a: k - 2, bx: k - 2, c: k - 1})


def _dofs_z(b: _DofBuilder, k: int, a: int) -> None:
    comp = comp_name(a)
    o1, o2 = _others(a)
    b.on_faces(comp, a, [_D0], {o1: k - 1, o2: k - 1})
    b.in_cell(comp, {a: k - 2, o1: k - 1, o2: k - 1})


def _dofs_zred(b: _DofBuilder, k: int, a: int) -> None:
    o1, o2 = _others(a)
    b.in_cell(comp_name(a), {a: k, o1: k - 1, o2: k - 1})


def local_dofs(fam: FamilyId, cell: CellBox = UNIT_BOX) -> list[DofFunctional]:
    """The family's DOFs on one cell, in canonical local order.

    The order is (entity rank, local entity, component, derivative, weight);
    it matches the relative order of global entity ids on every cell of a
    structured mesh, which is what makes one reference DOF matrix reusable.
    """
    name, k = _resolve(fam)
    b = _DofBuilder(cell)
    if name == "u":
        _dofs_u(b, k)
    elif name in ("sigma", "sigma-red"):
        red = name.endswith("red")
        for a in range(3):
            _dofs_sigma_diag(b, k, a, red)
        for a, bx in _OFF_PAIRS_SYM:
            _dofs_sigma_off(b, k, a, bx, red)
    elif name == "xi":
        _dofs_xi_diag(b, k)
        for a, bx in _OFF_PAIRS_FULL:
            _dofs_xi_off(b, k, a, bx)
    elif name == "xi-red":
        _dofs_xired_diag(b, k)
        for a, bx in _OFF_PAIRS_FULL:
            _dofs_xired_off(b, k, a, bx)
    elif name == "q":
        for a in range(3):
            _dofs_q(b, k, a)
    elif name == "q-red":
        for a in range(3):
            _dofs_qred(b, k, a)
    elif name == "x":
        for a in range(3):
            _dofs_x(b, k, a)
    elif name in ("gamma", "gamma-red"):
        red = name.endswith("red")
        for a in range(3):
            _dofs_gamma_diag(b, k, a, red)
        for a, bx in _OFF_PAIRS_SYM:
            _dofs_gamma_off(b, k, a, bx)
    elif name == "z":
        for a in range(3):
            _dofs_z(b, k, a)
    elif name == "z-red":
        for a in range(3):
            _dofs_zred(b, k, a)
    else:
        raise ValueError(name)
    b.raw.sort(key=DofFunctional.sort_key)
    return b.raw


# ---------------------------------------------------------------------------
# bubble basis for the coupled diagonal


@dataclass(frozen=True)
class BubbleBasis:
    """Basis of diagonal triples (xx, yy, zz) in Q_{k-1,k-1,k-1}^3 that sum
    to zero pointwise and whose a-th component vanishes on both faces normal
    to axis a.  These are exactly the trial weights for the coupled cell
    moments of the reduced traceless family."""

    k: int
    triples: tuple[tuple[TensorPoly, TensorPoly, TensorPoly], ...]

    def __len__(self) -> int:
        return len(self.triples)


def _nullspace(rows: list[dict[int, Fraction]], ncols: int) -> list[list[Fraction]]:
    """Nullspace basis of a sparse rational matrix, deterministic RREF."""
    work = [dict(r) for r in rows if r]
    pivots: dict[int, dict[int, Fraction]] = {}  # pivot col -> normalized row
    for r in work:
        while r:
            c = min(r)
            if c in pivots:
                f = r.pop(c)
                for cc, v in pivots[c].items():
                    if cc != c:
                        w = r.get(cc, Fraction(0)) - f * v
                        if w:
                            r[cc] = w
                        else:
                            r.pop(cc, None)
            else:
                piv = r[c]
                row = {cc: v / piv for cc, v in r.items()}
                pivots[c] = row
                break
    # back-substitute so each pivot row has zeros in the other pivot columns
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for c2 in sorted(pivots):
            if c2 > c and c2 in row:
                f = row.pop(c2)
                for cc, v in pivots[c2].items():
                    if cc != c2:
                        w = row.get(cc, Fraction(0)) - f * v
                        if w:
                            row[cc] = w
                        else:
                            row.pop(cc, None)
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for pc, row in pivots.items():
            v = row.get(fc)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


@lru_cache(maxsize=None)
def bubble_basis_divT(k: int) -> BubbleBasis:
    """Construct the coupled-diagonal bubble basis at order ``k`` (k >= 3).

    Solved as the exact nullspace of the face-trace and pointwise-sum
    constraints on coefficient vectors of the two independent components.
    """
    if k < 3:
        raise ValueError("bubble basis needs k >= 3")
    grid = Degree3(k - 1, k - 1, k - 1)
    exps = list(grid.exponents())
    idx = {e: i for i, e in enumerate(exps)}
    n = len(exps)  # unknowns per component; components are (xx, yy)
    one = Fraction(1)
    rows: list[dict[int, Fraction]] = []

    def zero_trace_rows(comp_offset: int, axis: int, negate_sum: bool) -> None:
        o1, o2 = _others(axis)
        for e1 in range(k):
            for e2 in range(k):
                row0: dict[int, Fraction] = {}
                row1: dict[int, Fraction] = {}
                for ea in range(k):
                    e = [0, 0, 0]
                    e[axis] = ea
                    e[o1] = e1
                    e[o2] = e2
                    i = idx[tuple(e)]
                    if negate_sum:
                        # constraint on zz = -(xx + yy): both components enter
                        for off in (0, n):
                            if ea == 0:
                                row0[off + i] = one
                            row1[off + i] = one
                    else:
                        if ea == 0:
                            row0[comp_offset + i] = one
                        row1[comp_offset + i] = one
                rows.append(row0)
                rows.append(row1)

    zero_trace_rows(0, 0, False)      # xx vanishes at x = 0, 1
    zero_trace_rows(n, 1, False)      # yy vanishes at y = 0, 1
    zero_trace_rows(0, 2, True)       # zz = -(xx+yy) vanishes at z = 0, 1

    basis = _nullspace(rows, 2 * n)
    expected = 2 * (k - 2) ** 2 * (k + 1)
    if len(basis) != expected:
        raise AssertionError(
            f"bubble basis dimension {len(basis)} != {expected} at k={k}")
    triples = []
    for vec in basis:
        txx = TensorPoly(grid, vec[:n])
        tyy = TensorPoly(grid, vec[n:])
        tzz = TensorPoly(grid, [-(vec[i] + vec[n + i]) for i in range(n)])
        triples.append((txx, tyy, tzz))
    return BubbleBasis(k, tuple(triples))


# ---------------------------------------------------------------------------
# applying DOFs


def _component_poly(field: Mapping[str, TensorPoly], comp: str,
                    spec: ShapeSpaceSpec | None) -> TensorPoly | None:
    p = field.get(comp)
    if p is None and spec is not None and spec.symmetric and len(comp) == 2:
        p = field.get(comp[::-1])
    return p


def apply_dof(dof: DofFunctional, field: Mapping[str, TensorPoly],
              spec: ShapeSpaceSpec | None = None,
              bubbles: BubbleBasis | None = None) -> Fraction:
    """Evaluate one DOF on a componentwise polynomial field.

    ``field`` maps storage component keys to polynomials on the cell the
    DOF was bound to.  Missing components count as zero.  Coupled DOFs
    need the ``bubbles`` basis of the matching order.
    """
    if dof.kind == "coupled":
        if bubbles is None:
            raise ValueError("coupled DOF needs the bubble basis")
        trip = bubbles.triples[dof.bubble_index]
        total = Fraction(0)
        for comp, xi in zip(_DIAG_COMPS, trip):
            p = _component_poly(field, comp, spec)
            if p is None or p.is_zero():
                continue
            w = TensorPoly(xi.degree, xi.coeffs, dof.entity.extent)
            total += moment(p, w, dof.entity)
        return total
    p = _component_poly(field, dof.component, spec)
    if p is None:
        return Fraction(0)
    p = p.differentiate_multi(dof.deriv)
    if dof.kind == "point":
        return p.eval_physical(dof.entity.extent.lo)
    return moment(p, monomial_weight(dof.weight, dof.entity), dof.entity)


def _deriv_factor_frozen(e: int, d: int, side: int) -> int:
    """Value of d-th derivative of t^e at t = side, for d in {0, 1}."""
    if d == 0:
        if side == 0:
            return 1 if e == 0 else 0
        return 1
    if side == 0:
        return 1 if e == 1 else 0
    return e


def _deriv_factor_free(e: int, d: int, w: int) -> Fraction:
    """Reference integral of (d-th derivative of t^e) * t^w over [0, 1]."""
    if d == 0:
        return Fraction(1, e + w + 1)
    if e == 0:
        return Fraction(0)
    return Fraction(e, e + w)


def dof_entry(dof: DofFunctional, comp: str, exp: tuple[int, int, int],
              cell: CellBox, bubbles: BubbleBasis | None = None) -> Fraction:
    """Closed-form value of a DOF on the unit monomial of one component.

    This is the fast path used to build DOF matrices; ``apply_dof`` on a
    monomial field computes the same number through polynomial calculus and
    serves as its cross-check in the tests.
    """
    if dof.kind == "coupled":
        if comp not in _DIAG_COMPS:
            return Fraction(0)
        xi = bubbles.triples[dof.bubble_index][_DIAG_COMPS.index(comp)]
        total = Fraction(0)
        for e2, v in xi.terms():
            f = v
            for a in range(3):
                f *= Fraction(1, exp[a] + e2[a] + 1)
            total += f
        return total * cell.measure()
    if comp != dof.component:
        return Fraction(0)
    ext = dof.entity.extent
    free = set(ext.free_axes())
    value = Fraction(1)
    for a in range(3):
        d = dof.deriv[a]
        h = cell.h(a)
        if a in free:
            value *= _deriv_factor_free(exp[a], d, dof.weight[a]) * h
        else:
            side = 1 if ext.lo[a] == cell.hi[a] else 0
            value *= _deriv_factor_frozen(exp[a], d, side)
        if d:
            value /= h ** d
        if not value:
            return value
    return value


# ---------------------------------------------------------------------------
# DOF matrices and unisolvency


def group_dofs(fam: FamilyId, dofs: list[DofFunctional] | None = None
               ) -> dict[str, list[DofFunctional]]:
    """Split the catalog DOF list by component group, preserving order."""
    spec = shape_space(fam)
    if dofs is None:
        dofs = local_dofs(fam)
    out: dict[str, list[DofFunctional]] = {g.name: [] for g in spec.groups}
    for dof in dofs:
        out[spec.group_of(dof.component).name].append(dof)
    return out


def group_dof_matrix(fam: FamilyId, gname: str, cell: CellBox = UNIT_BOX
                     ) -> list[list[Fraction]]:
    """DOF-by-coordinate matrix of one component group (square iff unisolvent)."""
    spec = shape_space(fam)
    grp = next(g for g in spec.groups if g.name == gname)
    coords = spec.group_coords(grp)
    dofs = group_dofs(fam)[gname]
    name, k = _resolve(fam)
    bubbles = bubble_basis_divT(k) if name == "xi-red" else None
    rows = []
    for dof in dofs:
        dof_b = DofFunctional(dof.entity_label, entity_ref_for(dof.entity_label, cell),
                              dof.component, dof.deriv, dof.weight, dof.kind,
                              dof.bubble_index)
        row = []
        for comp, exp in coords:
            v = dof_entry(dof_b, comp, exp, cell, bubbles)
            if comp == "zz" and grp.name == "diag" and spec.traceless:
                raise AssertionError("independent coords must not include zz")
            row.append(v)
        # traceless diagonal: zz = -(xx + yy) folds into the independents
        if spec.traceless and grp.name == "diag":
            for pos, (comp, exp) in enumerate(coords):
                zz = dof_entry(dof_b, "zz", exp, cell, bubbles)
                if zz:
                    row[pos] -= zz
        rows.append(row)
    return rows


def local_dof_matrix(fam: FamilyId, cell: CellBox = UNIT_BOX) -> list[list[Fraction]]:
    """The full square DOF matrix, block diagonal across component groups."""
    spec = shape_space(fam)
    blocks = [group_dof_matrix(fam, g.name, cell) for g in spec.groups]
    total = sum(len(b) for b in blocks)
    width = sum(len(b[0]) if b else 0 for b in blocks)
    out = [[Fraction(0)] * width for _ in range(total)]
    r0 = c0 = 0
    for bmat in blocks:
        for i, row in enumerate(bmat):
            out[r0 + i][c0:c0 + len(row)] = row
        r0 += len(bmat)
        c0 += len(bmat[0]) if bmat else 0
    return out


def _int_rows(rows: list[list[Fraction]]) -> list[dict[int, int]]:
    """Clear denominators row by row; safe for rank computations."""
    out = []
    for row in rows:
        den = 1
        for v in row:
            den = den * v.denominator // _gcd(den, v.denominator)
        out.append({j: int(v * den) for j, v in enumerate(row) if v})
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def check_unisolvence(fam: FamilyId, cell: CellBox = UNIT_BOX) -> dict:
    """Exact unisolvency check: the DOF matrix is square and nonsingular.

    Works group by group (the matrix is block diagonal), which keeps the
    exact rank computation small.
    """
    spec = shape_space(fam)
    dim = spec.local_dimension()
    ndofs = len(local_dofs(fam))
    rank = 0
    square = ndofs == dim
    for g in spec.groups:
        block = group_dof_matrix(fam, g.name, cell)
        if not block:
            continue
        if len(block) != len(block[0]):
            square = False
        rank += _exactcore.ff_rank(_int_rows(block), len(block[0]))
    return {
        "family": fam.name,
        "k": fam.k,
        "local_dim": dim,
        "num_dofs": ndofs,
        "rank": rank,
        "square": square,
        "nonsingular": square and rank == dim,
    }


def local_dimension(fam: FamilyId) -> int:
    return shape_space(fam).local_dimension()


# ---------------------------------------------------------------------------
# global dimension formulas


def global_dimension_formula(fam: FamilyId, counts: tuple[int, int, int, int]) -> int:
    """Closed-form dimension of the assembled space from entity counts.

    ``counts`` is (vertices, edges, faces, cells).  These are the published
    per-entity dimension counts of each family; the assembled spaces are
    checked against them in the verification suite.
    """
    v, e, f, t = counts
    name, k = _resolve(fam)
    if name == "u":
        return 8 * v + 4 * (k - 3) * e + 2 * (k - 3) ** 2 * f + (k - 3) ** 3 * t
    if name == "sigma":
        diag = 4 * (k - 1) * e + 4 * (k - 1) * (k - 3) * f + 3 * (k - 1) * (k - 3) ** 2 * t
        off = (6 * v + (4 * (k - 2) + (k - 3)) * e
               + (2 * (k - 2) ** 2 + 2 * (k - 2) * (k - 3)) * f
               + 3 * (k - 2) ** 2 * (k - 3) * t)
        return diag + off
    if name == "sigma-red":
        diag = (k - 1) * e + 2 * (k - 1) ** 2 * f + 3 * (k - 1) ** 3 * t
        off = (6 * v + (4 * (k - 2) + (k - 3)) * e
               + ((k - 2) ** 2 + 2 * (k - 2) * (k - 3)) * f
               + 3 * (k - 2) ** 2 * (k - 1) * t)
        return diag + off
    if name == "xi":
        diag = 2 * v + 2 * (k - 2) * e + 2 * (k - 2) ** 2 * f + 2 * (k - 2) ** 3 * t
        off = (4 * (k - 1) * e
               + (2 * (k - 1) * (k - 3) + 4 * (k - 1) * (k - 2)) * f
               + 6 * (k - 1) * (k - 2) * (k - 3) * t)
        return diag + off
    if name == "xi-red":
        diag = (2 * v + 2 * (k - 2) * e + (k - 2) ** 2 * f
                + 2 * (k - 2) ** 2 * (k + 1) * t)
        off = 2 * (k - 1) * k * f + 6 * (k - 1) ** 2 * k * t
        return diag + off
    if name == "q":
        return (k - 1) * e + 2 * (k - 1) * (k - 2) * f + 3 * (k - 1) * (k - 2) ** 2 * t
    if name == "q-red":
        return 3 * (k - 1) * k ** 2 * t
    if name == "x":
        return (12 * v + (4 * (k - 1) + 4 * (k - 2)) * e
                + ((k - 2) ** 2 + 4 * (k - 1) * (k - 2)) * f
                + 3 * (k - 1) * (k - 2) ** 2 * t)
    if name == "gamma":
        return (k * e + (2 * k ** 2 + 2 * k * (k - 1)) * f
                + (3 * k ** 2 * (k - 2) + 3 * k * (k - 1) ** 2) * t)
    if name == "gamma-red":
        return (k * e + (k ** 2 + 2 * k * (k - 1)) * f
                + (3 * k ** 3 + 3 * k * (k - 1) ** 2) * t)
    if name == "z":
        return k ** 2 * f + 3 * (k - 1) * k ** 2 * t
    if name == "z-red":
        return 3 * (k + 1) * k ** 2 * t
    raise ValueError(name)
