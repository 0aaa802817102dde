"""Global space assembly and exact operator matrices.

A global space enumerates degrees of freedom over the mesh entities, with
every shared DOF identified once across adjacent cells.  The assembled
operator matrix of a differential map between two such spaces is built
cellwise through an exact reference pipeline:

    K_cell = D_dst  @  O  @  R_src

where ``R_src`` reconstructs monomial coordinates from source DOF values
(reference DOF matrix inverse, rescaled per cell shape), ``O`` applies the
operator in monomial coordinates, and ``D_dst`` evaluates the target DOFs.
The pipeline is cached per cell shape, so a uniform mesh pays for it once.

Scattering asserts conformity instead of assuming it: a shared target DOF
must receive the identical value from every adjacent cell, including the
implicit zero from cells where the source basis function is not supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import _exactcore
from .elements import (BubbleBasis, DofFunctional, FamilyId, _ENTITY_RANK,
                       _COMP_POS, _EDGE_SIDES, _VERTEX_CORNERS, apply_dof,
                       bubble_basis_divT, dof_entry, entity_ref_for,
                       local_dofs, shape_space, _resolve)
from .mesh import CuboidMesh
from .operators import (OPERATORS, PolyField, coordinate_field, field_coords,
                        field_to_coords)
from .polytensor import CellBox, TensorPoly

_F0 = Fraction(0)


# ---------------------------------------------------------------------------
# exact dense helpers (integer kernel plumbing)


def dense_to_int(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Clear a single common denominator from a dense rational matrix."""
    den = 1
    for row in rows:
        for v in row:
            if v:
                den = den * v.denominator // math.gcd(den, v.denominator)
    out = [[v.numerator * (den // v.denominator) for v in row] for row in rows]
    return out, den


def frac_mul(a: Sequence[Sequence[Fraction]],
             b: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Exact product of dense rational matrices via the integer kernel."""
    ia, da = dense_to_int(a)
    ib, db = dense_to_int(b)
    prod = _exactcore.imat_mul(ia, ib)
    den = da * db
    return [[Fraction(v, den) if v else _F0 for v in row] for row in prod]


# ---------------------------------------------------------------------------
# global DOF enumeration


def _dof_sort_key(key) -> tuple:
    (kind, gid), comp, deriv, weight, _tag, bub = key
    return (_ENTITY_RANK[kind], gid, _COMP_POS[comp], deriv, weight, bub)


def cell_entity_ids(mesh: CuboidMesh, ci: int) -> dict[tuple, tuple[str, int]]:
    """Map the cell-local entity labels onto global (kind, id) pairs."""
    out: dict[tuple, tuple[str, int]] = {}
    for corner, (gid, _ref) in zip(_VERTEX_CORNERS, mesh.cell_vertices(ci)):
        out[("vertex", corner)] = ("vertex", gid)
    labels = [(axis, sides) for axis in range(3) for sides in _EDGE_SIDES]
    for (axis, sides), (eaxis, gid, _ref) in zip(labels, mesh.cell_edges(ci)):
        assert axis == eaxis
        out[("edge", axis, sides)] = ("edge", gid)
    for normal, side, gid, _ref in mesh.cell_faces(ci):
        out[("face", normal, side)] = ("face", gid)
    out[("cell",)] = ("cell", ci)
    return out


@dataclass
class GlobalSpace:
    """An assembled finite element space on a cuboid mesh."""

    fam: FamilyId
    mesh: CuboidMesh
    keys: list
    index: dict
    cell_maps: list[list[int]]
    dof_cells: list[tuple[int, ...]]
    ref_dofs: list[DofFunctional]

    @property
    def dimension(self) -> int:
        return len(self.keys)

    def entity_of(self, i: int) -> tuple[str, int]:
        return self.keys[i][0]


def assemble_space(fam: FamilyId, mesh: CuboidMesh) -> GlobalSpace:
    ref = local_dofs(fam)
    seen: dict = {}
    per_cell_keys: list[list] = []
    for ci in range(mesh.num_cells):
        ids = cell_entity_ids(mesh, ci)
        keys = []
        for dof in ref:
            key = dof.dof_key(ids[dof.entity_label])
            keys.append(key)
            cells = seen.get(key)
            if cells is None:
                seen[key] = [ci]
            elif cells[-1] != ci:
                cells.append(ci)
        per_cell_keys.append(keys)
    ordered = sorted(seen, key=_dof_sort_key)
    index = {key: i for i, key in enumerate(ordered)}
    cell_maps = [[index[k] for k in keys] for keys in per_cell_keys]
    dof_cells = [tuple(seen[k]) for k in ordered]
    return GlobalSpace(fam, mesh, ordered, index, cell_maps, dof_cells, ref)


# ---------------------------------------------------------------------------
# reference pipeline, cached per family and cell shape


def _label_free_axes(label: tuple) -> tuple[int, ...]:
    kind = label[0]
    if kind == "vertex":
        return ()
    if kind == "edge":
        return (label[1],)
    if kind == "face":
        return tuple(a for a in range(3) if a != label[1])
    return (0, 1, 2)


def dof_scale(dof: DofFunctional, h: tuple[Fraction, Fraction, Fraction]) -> Fraction:
    """Physical/reference DOF ratio: entity measure over derivative factors."""
    s = Fraction(1)
    for a in _label_free_axes(dof.entity_label):
        s *= h[a]
    for a in range(3):
        if dof.deriv[a]:
            s /= h[a] ** dof.deriv[a]
    return s


def _bubbles_for(fam: FamilyId) -> BubbleBasis | None:
    name, k = _resolve(fam)
    return bubble_basis_divT(k) if name == "xi-red" else None


def full_dof_matrix(fam: FamilyId, cell: CellBox) -> list[list[Fraction]]:
    """DOF-by-coordinate matrix over the full catalog order on one cell."""
    spec = shape_space(fam)
    coords = field_coords(spec)
    bubbles = _bubbles_for(fam)
    fold = spec.traceless
    rows = []
    for dof in local_dofs(fam, cell):
        row = [dof_entry(dof, comp, exp, cell, bubbles) for comp, exp in coords]
        if fold:
            for pos, (comp, exp) in enumerate(coords):
                if comp in ("xx", "yy"):
                    zz = dof_entry(dof, "zz", exp, cell, bubbles)
                    if zz:
                        row[pos] -= zz
        rows.append(row)
    return rows


_ref_inv_cache: dict = {}


def _reference_inverse_blocks(fam: FamilyId):
    """Blockwise exact inverse of the reference DOF matrix.

    Returns (row positions, column offset, integer inverse, scale) per
    component group; the inverse of the full block-diagonal matrix is the
    union of the scaled blocks.
    """
    ck = (fam.name, fam.k)
    hit = _ref_inv_cache.get(ck)
    if hit is not None:
        return hit
    from .elements import group_dof_matrix, group_dofs
    spec = shape_space(fam)
    full = local_dofs(fam)
    pos_of_group: dict[str, list[int]] = {g.name: [] for g in spec.groups}
    for i, dof in enumerate(full):
        pos_of_group[spec.group_of(dof.component).name].append(i)
    blocks = []
    col_off = 0
    for g in spec.groups:
        mat = group_dof_matrix(fam, g.name)
        n = len(mat)
        if n != len(mat[0]):
            raise AssertionError(
                f"{fam.name} k={fam.k} group {g.name}: DOF matrix "
                f"{n}x{len(mat[0])} is not square")
        imat, den = dense_to_int(mat)
        inv, inv_den = _exactcore.fj_inverse(imat)
        blocks.append((pos_of_group[g.name], col_off, inv, Fraction(den, inv_den)))
        col_off += n
    result = (blocks, col_off, len(full))
    _ref_inv_cache[ck] = result
    return result


_local_cache: dict = {}


def local_reconstructor(fam: FamilyId, h: tuple) -> list[list[Fraction]]:
    """Matrix taking local DOF values to monomial coordinates on a cell of
    shape ``h``: the reference inverse with per-DOF rescaling folded in."""
    ck = ("R", fam.name, fam.k, h)
    hit = _local_cache.get(ck)
    if hit is not None:
        return hit
    blocks, ncoords, ndofs = _reference_inverse_blocks(fam)
    full = local_dofs(fam)
    scales = [dof_scale(d, h) for d in full]
    R = [[_F0] * ndofs for _ in range(ncoords)]
    for rows_pos, col_off, inv, scale in blocks:
        for a in range(len(rows_pos)):
            for b, p in enumerate(rows_pos):
                v = inv[a][b]
                if v:
                    R[col_off + a][p] = v * scale / scales[p]
    _local_cache[ck] = R
    return R


def _operator_coord_matrix(op_name: str, src: FamilyId, dst: FamilyId,
                           cell: CellBox) -> list[list[Fraction]]:
    """The operator in monomial coordinates, with target membership checks."""
    src_spec = shape_space(src)
    dst_spec = shape_space(dst)
    op = OPERATORS[op_name]
    cols = []
    for comp, exp in field_coords(src_spec):
        f = coordinate_field(src_spec, comp, exp, cell)
        cols.append(field_to_coords(op(f), dst_spec, strict=True))
    nrows = len(cols[0]) if cols else 0
    return [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]


def local_operator_block(op_name: str, src: FamilyId, dst: FamilyId,
                         h: tuple) -> list[list[Fraction]]:
    """K_cell for a cell of shape ``h``: target DOFs by source DOFs."""
    ck = ("K", op_name, src.name, src.k, dst.name, dst.k, h)
    hit = _local_cache.get(ck)
    if hit is not None:
        return hit
    cell = CellBox((_F0, _F0, _F0), h)
    O = _operator_coord_matrix(op_name, src, dst, cell)
    R = local_reconstructor(src, h)
    D = full_dof_matrix(dst, cell)
    K = frac_mul(D, frac_mul(O, R))
    _local_cache[ck] = K
    return K


# ---------------------------------------------------------------------------
# sparse global matrices


class SparseMatrix:
    """Row-sparse exact rational matrix."""

    def __init__(self, nrows: int, ncols: int,
                 rows: list[dict[int, Fraction]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def int_rows(self) -> list[dict[int, int]]:
        """Per-row denominator clearing (rank-preserving, not product-safe)."""
        out = []
        for r in self.rows:
            den = 1
            for v in r.values():
                den = den * v.denominator // math.gcd(den, v.denominator)
            out.append({j: v.numerator * (den // v.denominator)
                        for j, v in r.items()})
        return out

    def int_common(self) -> tuple[list[dict[int, int]], int]:
        """Single common denominator over the whole matrix (product-safe)."""
        den = 1
        for r in self.rows:
            for v in r.values():
                den = den * v.denominator // math.gcd(den, v.denominator)
        out = [{j: v.numerator * (den // v.denominator) for j, v in r.items()}
               for r in self.rows]
        return out, den

    def to_float_array(self):
        import numpy as np
        a = np.zeros((self.nrows, self.ncols))
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                a[i, j] = float(v)
        return a

    def matvec(self, vec: Sequence[Fraction]) -> list[Fraction]:
        return [sum((v * vec[j] for j, v in r.items()), _F0) for r in self.rows]

    def entries(self):
        for i, r in enumerate(self.rows):
            for j, v in sorted(r.items()):
                yield i, j, v


class ConformityError(AssertionError):
    """Adjacent cells disagreed about a shared target DOF value."""


#: the sanctioned (source family, operator, target family) edges
COMPLEX_EDGES = frozenset([
    ("u", "gradgrad", "sigma"), ("sigma", "curl", "xi"), ("xi", "div", "q"),
    ("u", "gradgrad", "sigma-red"), ("sigma-red", "curl", "xi-red"),
    ("xi-red", "div", "q-red"),
    ("x", "symgrad", "phi"), ("phi", "curlcurlt", "gamma"),
    ("gamma", "div", "z"),
    ("phi", "curlcurlt", "gamma-red"), ("gamma-red", "div", "z-red"),
])


def operator_matrix(op_name: str, src: GlobalSpace, dst: GlobalSpace) -> SparseMatrix:
    """Assemble the global operator matrix (target dim by source dim).

    Raises :class:`ConformityError` when two cells report different values
    for the same (target DOF, source DOF) pair, or when a nonzero column
    entry is missing a contribution from a cell adjacent to its target DOF.
    """
    if (src.fam.name, op_name, dst.fam.name) not in COMPLEX_EDGES:
        raise ValueError(
            f"({src.fam.name}, {op_name}, {dst.fam.name}) is not an edge of "
            f"either complex")
    if src.fam.k != dst.fam.k:
        raise ValueError("operator endpoints have different orders")
    if src.mesh is not dst.mesh and src.mesh != dst.mesh:
        raise ValueError("operator endpoints live on different meshes")
    mesh = src.mesh
    A = SparseMatrix(dst.dimension, src.dimension)
    rows = A.rows
    shapes = []
    for ci in range(mesh.num_cells):
        box = mesh.cell_box(ci)
        h = tuple(box.h(a) for a in range(3))
        shapes.append(h)
        K = local_operator_block(op_name, src.fam, dst.fam, h)
        dmap = dst.cell_maps[ci]
        smap = src.cell_maps[ci]
        for i, krow in enumerate(K):
            gi = dmap[i]
            row = rows[gi]
            for j, v in enumerate(krow):
                if v:
                    gj = smap[j]
                    old = row.get(gj)
                    if old is None:
                        row[gj] = v
                    elif old != v:
                        raise ConformityError(
                            f"cells disagree at target DOF {dst.keys[gi]}: "
                            f"{old} vs {v}")
    # second pass: a stored value must be reproduced (zeros included) by
    # every cell that carries both DOFs
    for ci in range(mesh.num_cells):
        K = local_operator_block(op_name, src.fam, dst.fam, shapes[ci])
        dmap = dst.cell_maps[ci]
        smap = src.cell_maps[ci]
        for i, krow in enumerate(K):
            row = rows[dmap[i]]
            if not row:
                continue
            for j, v in enumerate(krow):
                stored = row.get(smap[j])
                if stored is not None and stored != v:
                    raise ConformityError(
                        f"zero/nonzero clash at target DOF {dst.keys[dmap[i]]}")
    # adjacency audit: every cell at the target DOF must see the source DOF
    for gi, row in enumerate(rows):
        ci_set = set(dst.dof_cells[gi])
        for gj in row:
            if not ci_set.issubset(src.dof_cells[gj]):
                raise ConformityError(
                    f"target DOF {dst.keys[gi]} receives a one-sided "
                    f"contribution from source DOF {src.keys[gj]}")
    return A


# ---------------------------------------------------------------------------
# reconstruction and interpolation


def reconstruct_local(space: GlobalSpace, ci: int,
                      coeffs: Sequence[Fraction]) -> PolyField:
    """Restrict a global coefficient vector to one cell as a PolyField."""
    spec = shape_space(space.fam)
    box = space.mesh.cell_box(ci)
    h = tuple(box.h(a) for a in range(3))
    R = local_reconstructor(space.fam, h)
    local = [coeffs[g] for g in space.cell_maps[ci]]
    coords = [sum((row[j] * local[j] for j in range(len(local)) if row[j]), _F0)
              for row in R]
    comps: dict[str, TensorPoly] = {}
    off = 0
    for g in spec.groups:
        for comp in g.independent:
            grid = spec.degrees[comp]
            n = grid.dim()
            comps[comp] = TensorPoly(grid, coords[off:off + n], box)
            off += n
    if spec.traceless:
        comps["zz"] = -(comps["xx"] + comps["yy"])
    kind = spec.kind
    return PolyField(kind, comps, box, symmetric=spec.symmetric)


def interpolate(space: GlobalSpace,
                make_field: Callable[[int, CellBox], Mapping[str, TensorPoly]]
                ) -> list[Fraction]:
    """Apply every DOF to a globally smooth field given cell by cell.

    Shared DOFs are evaluated from each adjacent cell and must agree; a
    mismatch means the supplied field is not single-valued.
    """
    spec = shape_space(space.fam)
    bubbles = _bubbles_for(space.fam)
    vals: list[Fraction | None] = [None] * space.dimension
    for ci in range(space.mesh.num_cells):
        box = space.mesh.cell_box(ci)
        comps = make_field(ci, box)
        for dof, gi in zip(space.ref_dofs, space.cell_maps[ci]):
            bound = DofFunctional(dof.entity_label,
                                  entity_ref_for(dof.entity_label, box),
                                  dof.component, dof.deriv, dof.weight,
                                  dof.kind, dof.bubble_index)
            v = apply_dof(bound, comps, spec, bubbles)
            if vals[gi] is None:
                vals[gi] = v
            elif vals[gi] != v:
                raise AssertionError(
                    f"field is multivalued at DOF {space.keys[gi]}: "
                    f"{vals[gi]} vs {v}")
    return [v if v is not None else _F0 for v in vals]


# ---------------------------------------------------------------------------
# Matrix Market I/O


def write_matrix_market(path: str, mat: SparseMatrix, float_mode: bool = False,
                        comment: str | None = None) -> None:
    field = "real" if float_mode else "rational"
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate {field} general\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{mat.nrows} {mat.ncols} {mat.nnz}\n")
        for i, j, v in mat.entries():
            if float_mode:
                fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")
            else:
                fh.write(f"{i + 1} {j + 1} {v.numerator}/{v.denominator}\n")


def read_matrix_market(path: str) -> SparseMatrix:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("%%MatrixMarket matrix coordinate"):
            raise ValueError("not a coordinate MatrixMarket file")
        rational = "rational" in header
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        nrows, ncols, nnz = (int(t) for t in line.split())
        mat = SparseMatrix(nrows, ncols)
        count = 0
        for line in fh:
            if not line.strip():
                continue
            si, sj, sv = line.split()
            v = Fraction(sv) if rational else Fraction(float(sv))
            if v:
                mat.rows[int(si) - 1][int(sj) - 1] = v
            count += 1
        if count != nnz:
            raise ValueError(f"expected {nnz} entries, read {count}")
    return mat
