"""Computational verification of the discrete complexes.

The checks here are the point of the package: exact unisolvency and
dimension audits, exact ranks of the assembled operator matrices, zero
compositions, exactness of the two four-space ladders (full and reduced),
kernel identification, constructive divergence preimages, interelement
continuity of the advertised traces, and the commutation identities tying
the row-wise curl to gradients of the vector curl.

Rank certification is dual-route on request: fraction-free elimination
over the integers and a floating SVD must report the same number.
"""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import _exactcore
from .assembly import (GlobalSpace, SparseMatrix, assemble_space, frac_mul,
                       interpolate, operator_matrix, reconstruct_local,
                       _operator_coord_matrix)
from .elements import (FamilyId, comp_name, global_dimension_formula,
                       shape_space, _others)
from .mesh import CuboidMesh
from .operators import PolyField, check_identity_curl_symgrad, div_rows
from .polytensor import TensorPoly, UNIT_BOX, grid_points

_F0 = Fraction(0)

#: complex name -> (families, operators, kernel dimension, minimum order)
COMPLEXES = {
    "gradgrad": (("u", "sigma", "xi", "q"),
                 ("gradgrad", "curl", "div"), 4, 3),
    "gradgrad-reduced": (("u", "sigma-red", "xi-red", "q-red"),
                         ("gradgrad", "curl", "div"), 4, 3),
    "elasticity": (("x", "phi", "gamma", "z"),
                   ("symgrad", "curlcurlt", "div"), 6, 2),
    "elasticity-reduced": (("x", "phi", "gamma-red", "z-red"),
                           ("symgrad", "curlcurlt", "div"), 6, 2),
}

COMPLEX_NAMES = tuple(COMPLEXES)


# ---------------------------------------------------------------------------
# rank certification


def exact_rank(mat: SparseMatrix) -> int:
    rows = [r for r in mat.int_rows() if r]
    if not rows:
        return 0
    return _exactcore.ff_rank(rows, mat.ncols)


def float_rank(mat: SparseMatrix, rel_cutoff: float = 1e-9) -> int:
    import numpy as np
    if mat.nnz == 0:
        return 0
    s = np.linalg.svd(mat.to_float_array(), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int((s > rel_cutoff * s[0]).sum())


def _rank_workers() -> int:
    env = os.environ.get("CUBOID_COMPLEX_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 3


def certified_ranks(mats: list[SparseMatrix], arithmetic: str,
                    threads: int | None = None) -> tuple[list[int], list[int] | None]:
    """Ranks of the operator matrices under the requested arithmetic.

    Returns (ranks, float_ranks); in "both" mode a disagreement raises.
    """
    workers = threads if threads else _rank_workers()
    rational = arithmetic in ("rational", "both")
    floating = arithmetic in ("float", "both")
    ranks_r = None
    ranks_f = None
    if rational:
        with ThreadPoolExecutor(max_workers=min(workers, len(mats))) as pool:
            ranks_r = list(pool.map(exact_rank, mats))
    if floating:
        ranks_f = [float_rank(m) for m in mats]
    if rational and floating and ranks_r != ranks_f:
        raise AssertionError(
            f"rank cross-check failed: rational {ranks_r} vs float {ranks_f}")
    return (ranks_r if ranks_r is not None else ranks_f,  # type: ignore[return-value]
            ranks_f if rational else None)


def composition_is_zero(outer: SparseMatrix, inner: SparseMatrix) -> bool:
    """Exact test that outer @ inner vanishes (common-denominator integers)."""
    ia, _ = outer.int_common()
    ib, _ = inner.int_common()
    prod = _exactcore.spmul(ia, ib)
    return all(not row for row in prod)


# ---------------------------------------------------------------------------
# exactness of a ladder


@dataclass
class ExactnessReport:
    complex_name: str
    k: int
    mesh_shape: tuple[int, int, int]
    dims: list[int]
    ranks: list[int]
    ranks_float: list[int] | None
    composition_zero: bool
    kernel_dim_expected: int
    exact: bool
    cohomology_dim: int
    elapsed_ms: float
    arithmetic_mode: str
    seed: int | None = None

    def checks(self) -> dict[str, bool]:
        d, r = self.dims, self.ranks
        return {
            "kernel": d[0] - r[0] == self.kernel_dim_expected,
            "segment1": r[0] == d[1] - r[1],
            "segment2": r[1] == d[2] - r[2],
            "onto": r[2] == d[3],
            "compositions": self.composition_zero,
        }

    def to_dict(self) -> dict:
        return {
            "complex": self.complex_name,
            "k": self.k,
            "mesh": ",".join(str(n) for n in self.mesh_shape),
            "dims": self.dims,
            "ranks": self.ranks,
            "composition_zero": self.composition_zero,
            "exact": self.exact,
            "cohomology_dim": self.cohomology_dim,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "arithmetic_mode": self.arithmetic_mode,
            "seed": self.seed,
        }


def complex_spaces(name: str, k: int, mesh: CuboidMesh) -> list[GlobalSpace]:
    fams, _ops, _kd, min_k = COMPLEXES[name]
    if k < min_k:
        raise ValueError(f"complex {name!r} needs k >= {min_k}")
    return [assemble_space(FamilyId(f, k), mesh) for f in fams]


def complex_matrices(name: str, spaces: list[GlobalSpace]) -> list[SparseMatrix]:
    ops = COMPLEXES[name][1]
    return [operator_matrix(op, spaces[i], spaces[i + 1])
            for i, op in enumerate(ops)]


def verify_complex(name: str, k: int, mesh: CuboidMesh,
                   arithmetic: str = "rational",
                   threads: int | None = None) -> ExactnessReport:
    """Assemble one ladder and verify it is an exact complex."""
    t0 = time.monotonic()
    kernel_dim = COMPLEXES[name][2]
    spaces = complex_spaces(name, k, mesh)
    counts = mesh.entity_counts()
    for s in spaces:
        formula = global_dimension_formula(s.fam, counts)
        if s.dimension != formula:
            raise AssertionError(
                f"{s.fam.name} k={k}: assembled dimension {s.dimension} "
                f"!= formula {formula}")
    mats = complex_matrices(name, spaces)
    comp_zero = all(composition_is_zero(mats[i + 1], mats[i]) for i in range(2))
    ranks, ranks_f = certified_ranks(mats, arithmetic, threads)
    dims = [s.dimension for s in spaces]
    report = ExactnessReport(
        complex_name=name, k=k, mesh_shape=mesh.shape, dims=dims,
        ranks=ranks, ranks_float=ranks_f, composition_zero=comp_zero,
        kernel_dim_expected=kernel_dim, exact=False,
        cohomology_dim=dims[0] - ranks[0],
        elapsed_ms=(time.monotonic() - t0) * 1000.0,
        arithmetic_mode=arithmetic)
    report.exact = all(report.checks().values())
    return report


def verify_dimensions(fam: FamilyId, mesh: CuboidMesh) -> dict:
    space = assemble_space(fam, mesh)
    formula = global_dimension_formula(fam, mesh.entity_counts())
    return {
        "family": fam.name,
        "k": fam.k,
        "mesh": ",".join(str(n) for n in mesh.shape),
        "formula": formula,
        "assembled": space.dimension,
        "match": formula == space.dimension,
    }


def _dense_rank(m: list[list[Fraction]]) -> int:
    if not m:
        return 0
    sparse = SparseMatrix(len(m), len(m[0]),
                          [{j: v for j, v in enumerate(row) if v} for row in m])
    return exact_rank(sparse)


def verify_local_complex(name: str, k: int) -> dict:
    """Exactness of one ladder on the reference cell, no DOFs involved.

    The operators act directly on monomial coordinates of the shape
    spaces, so this isolates the polynomial sequence from everything the
    DOF layer adds (reduced ladders share these shape spaces).
    """
    if name not in ("gradgrad", "elasticity"):
        raise ValueError(
            f"local ladders exist for 'gradgrad' and 'elasticity', got {name!r}")
    fams, ops, kernel_dim, min_k = COMPLEXES[name]
    if k < min_k:
        raise ValueError(f"complex {name!r} needs k >= {min_k}")
    ids = [FamilyId(f, k) for f in fams]
    dims = [shape_space(f).local_dimension() for f in ids]
    mats = [_operator_coord_matrix(op, src, dst, UNIT_BOX)
            for op, src, dst in zip(ops, ids, ids[1:])]
    ranks = [_dense_rank(m) for m in mats]
    comp_zero = all(
        all(v == 0 for row in frac_mul(m2, m1) for v in row)
        for m1, m2 in zip(mats, mats[1:]))
    alternating = dims[0] - dims[1] + dims[2] - dims[3]
    exact = (dims[0] - ranks[0] == kernel_dim
             and ranks[0] == dims[1] - ranks[1]
             and ranks[1] == dims[2] - ranks[2]
             and ranks[2] == dims[3])
    return {
        "complex": name,
        "k": k,
        "dims": dims,
        "ranks": ranks,
        "alternating_sum": alternating,
        "composition_zero": comp_zero,
        "exact": exact and comp_zero,
        "cohomology_dim": kernel_dim,
    }


# ---------------------------------------------------------------------------
# kernel identification


def _affine_poly(box, const, lin) -> TensorPoly:
    """The physical affine polynomial const + lin . x on a cell."""
    c0 = Fraction(const) + sum(Fraction(lin[a]) * box.lo[a] for a in range(3))
    terms = {(0, 0, 0): c0}
    for a in range(3):
        if lin[a]:
            e = [0, 0, 0]
            e[a] = 1
            terms[tuple(e)] = Fraction(lin[a]) * box.h(a)
    return TensorPoly.from_terms(terms, cell=box)


def kernel_field_makers(name: str):
    """Cellwise representations of the global kernel fields.

    Scalar affines for the twice-differentiable ladder; translations plus
    infinitesimal rotations for the elasticity ladder.
    """
    if name.startswith("gradgrad"):
        specs = [(1, (0, 0, 0)), (0, (1, 0, 0)), (0, (0, 1, 0)), (0, (0, 0, 1))]
        return [lambda ci, box, c=c, l=l: {"s": _affine_poly(box, c, l)}
                for c, l in specs]
    rigid = [
        {"x": (1, (0, 0, 0))},
        {"y": (1, (0, 0, 0))},
        {"z": (1, (0, 0, 0))},
        {"y": (0, (0, 0, -1)), "z": (0, (0, 1, 0))},   # e_x cross position
        {"x": (0, (0, 0, 1)), "z": (0, (-1, 0, 0))},   # e_y cross position
        {"x": (0, (0, -1, 0)), "y": (0, (1, 0, 0))},   # e_z cross position
    ]
    def make(spec):
        return lambda ci, box: {c: _affine_poly(box, s0, s1)
                                for c, (s0, s1) in spec.items()}
    return [make(s) for s in rigid]


def kernel_identification(name: str, k: int, mesh: CuboidMesh) -> dict:
    """Confirm the kernel of the first operator is exactly the global fields.

    Each expected kernel field is interpolated (shared DOFs must agree),
    annihilated exactly by the matrix, and the interpolants must be linearly
    independent with count matching the nullity.
    """
    fams, ops, kernel_dim, _ = COMPLEXES[name]
    src = assemble_space(FamilyId(fams[0], k), mesh)
    dst = assemble_space(FamilyId(fams[1], k), mesh)
    a1 = operator_matrix(ops[0], src, dst)
    vecs = [interpolate(src, mk) for mk in kernel_field_makers(name)]
    annihilated = all(all(v == 0 for v in a1.matvec(vec)) for vec in vecs)
    interp = SparseMatrix(len(vecs), src.dimension,
                          [{j: v for j, v in enumerate(vec) if v} for vec in vecs])
    interp_rank = exact_rank(interp)
    nullity = src.dimension - exact_rank(a1)
    return {
        "complex": name,
        "k": k,
        "kernel_dim": kernel_dim,
        "annihilated": annihilated,
        "interpolant_rank": interp_rank,
        "nullity": nullity,
        "identified": annihilated and interp_rank == kernel_dim
                      and nullity == kernel_dim,
    }


# ---------------------------------------------------------------------------
# constructive divergence preimages


def _random_coeffs(n: int, rng: random.Random) -> list[Fraction]:
    return [Fraction(rng.randint(-9, 9)) for _ in range(n)]


def _preimage_routes(name: str) -> list[tuple[int, str, int]]:
    """(target component index, matrix component, integration axis) triples."""
    if name.startswith("elasticity"):
        return [(0, "xx", 0), (1, "yy", 1), (2, "zz", 2)]
    return [(0, "xy", 1), (1, "yz", 2), (2, "zx", 0)]


def _preimage_fields(name: str, q_space: GlobalSpace,
                     coeffs: list[Fraction]) -> list[dict[str, TensorPoly]]:
    """Per-cell matrix components whose row divergence reproduces ``coeffs``.

    Each target component is integrated along its designated axis cell by
    cell, carrying the accumulated boundary trace down every cell column so
    traces match across the faces the integration crosses.
    """
    mesh = q_space.mesh
    shape = mesh.shape
    qfields = [reconstruct_local(q_space, ci, coeffs)
               for ci in range(mesh.num_cells)]
    sigma: list[dict[str, TensorPoly]] = [dict() for _ in range(mesh.num_cells)]
    for qa, scomp, axis in _preimage_routes(name):
        o1, o2 = _others(axis)
        for t1 in range(shape[o1]):
            for t2 in range(shape[o2]):
                offset = None
                for ia in range(shape[axis]):
                    idx = [0, 0, 0]
                    idx[axis] = ia
                    idx[o1] = t1
                    idx[o2] = t2
                    ci = mesh.cell_id(*idx)
                    box = mesh.cell_box(ci)
                    t = qfields[ci].vec(qa).antiderivative(axis)
                    if offset is not None:
                        t = t + TensorPoly(offset.degree, offset.coeffs, box)
                    sigma[ci][scomp] = t
                    top = [idx[0], idx[1], idx[2]]
                    top[axis] += 1
                    offset = t.trace(mesh.face_entity(axis, *top))
    return sigma


def _div_preimage(name: str, q_space: GlobalSpace, coeffs: list[Fraction],
                  target: GlobalSpace | None) -> tuple[GlobalSpace, list[Fraction]]:
    fams, _ops, _kd, _min_k = COMPLEXES[name]
    if q_space.fam.name != fams[3]:
        raise ValueError(
            f"complex {name!r} takes targets in {fams[3]!r}, "
            f"got {q_space.fam.name!r}")
    if target is None:
        target = assemble_space(FamilyId(fams[2], q_space.fam.k), q_space.mesh)
    sigma = _preimage_fields(name, q_space, coeffs)
    out = interpolate(target, lambda ci, box: sigma[ci])
    for ci in range(q_space.mesh.num_cells):
        rec = reconstruct_local(target, ci, out)
        for comp, poly in sigma[ci].items():
            if not (rec.component(comp) - poly).is_zero():
                raise AssertionError(
                    f"preimage for cell {ci} left the {target.fam.name} "
                    f"shape space in component {comp}")
        for comp in rec.comps:
            if comp not in sigma[ci] and not rec.component(comp).is_zero():
                raise AssertionError(
                    f"preimage interpolation produced spurious component "
                    f"{comp} on cell {ci}")
    return target, out


def div_preimage_gradgrad(q_space: GlobalSpace, coeffs: list[Fraction],
                          target: GlobalSpace | None = None,
                          ) -> tuple[GlobalSpace, list[Fraction]]:
    """An explicit traceless-matrix preimage of a discrete vector target.

    The off-diagonal components xy, yz, zx are antiderivatives of the target
    components along y, z, x respectively; the shared-DOF agreement inside
    :func:`interpolate` certifies the construction is conforming.  Returns
    the matrix space and the coefficient vector of the preimage.
    """
    name = "gradgrad" if q_space.fam.name == "q" else "gradgrad-reduced"
    return _div_preimage(name, q_space, coeffs, target)


def div_preimage_elasticity(q_space: GlobalSpace, coeffs: list[Fraction],
                            target: GlobalSpace | None = None,
                            ) -> tuple[GlobalSpace, list[Fraction]]:
    """Same construction for the symmetric-matrix spaces, on the diagonal."""
    name = "elasticity" if q_space.fam.name == "z" else "elasticity-reduced"
    return _div_preimage(name, q_space, coeffs, target)


def div_preimage_check(name: str, k: int, mesh: CuboidMesh,
                       samples: int = 10, seed: int = 20260818) -> dict:
    """Round-trip random targets through the constructive preimage.

    The constructed matrix field must satisfy the divergence equation
    exactly per cell, be continuous across the faces its integration axes
    cross, interpolate into the matrix space without shared-DOF conflicts,
    and map back to the target coefficients through the assembled
    divergence matrix.
    """
    fams, _ops, _kd, min_k = COMPLEXES[name]
    if k < min_k:
        raise ValueError(f"complex {name!r} needs k >= {min_k}")
    q_space = assemble_space(FamilyId(fams[3], k), mesh)
    mat_space = assemble_space(FamilyId(fams[2], k), mesh)
    div_mat = operator_matrix("div", mat_space, q_space)
    preimage = (div_preimage_elasticity if name.startswith("elasticity")
                else div_preimage_gradgrad)
    symmetric = name.startswith("elasticity")
    rng = random.Random(seed)
    for _ in range(samples):
        coeffs = _random_coeffs(q_space.dimension, rng)
        sigma = _preimage_fields(name, q_space, coeffs)
        for ci in range(mesh.num_cells):
            box = mesh.cell_box(ci)
            field = PolyField("matrix", sigma[ci], box, symmetric=symmetric)
            dv = div_rows(field)
            qf = reconstruct_local(q_space, ci, coeffs)
            for a in range(3):
                if not (dv.vec(a) - qf.vec(a)).is_zero():
                    raise AssertionError(
                        f"preimage divergence mismatch, cell {ci} component "
                        f"{comp_name(a)}")
        for qa, scomp, axis in _preimage_routes(name):
            for normal, i, j, l in mesh.interior_faces():
                if normal != axis:
                    continue
                lo_ci, hi_ci = mesh.face_cells(normal, i, j, l)
                fent = mesh.face_entity(normal, i, j, l)
                if sigma[lo_ci][scomp].trace(fent) != sigma[hi_ci][scomp].trace(fent):
                    raise AssertionError(
                        f"preimage component {scomp} jumps across face "
                        f"({normal},{i},{j},{l})")
        _target, pvec = preimage(q_space, coeffs, mat_space)
        if div_mat.matvec(pvec) != coeffs:
            raise AssertionError("divergence matrix does not return the target")
    return {"complex": name, "k": k, "samples": samples, "exact": True}


# ---------------------------------------------------------------------------
# interelement continuity


def continuity_traces(family_name: str, normal: int) -> list[tuple[str, tuple[int, int, int]]]:
    """The (component, derivative) traces a family keeps single-valued
    across an interior face with the given normal."""
    d0 = (0, 0, 0)

    def dn() -> tuple[int, int, int]:
        e = [0, 0, 0]
        e[normal] = 1
        return tuple(e)  # type: ignore[return-value]

    out: list[tuple[str, tuple[int, int, int]]] = []
    if family_name == "u":
        return [("s", d0), ("s", dn())]
    if family_name in ("sigma", "sigma-red", "phi"):
        for a in range(3):
            if a != normal:
                out.append((comp_name(a, a), d0))
        for a in range(3):
            for b in range(a + 1, 3):
                out.append((comp_name(a, b), d0))
        if family_name == "phi":
            for a in range(3):
                if a != normal:
                    out.append((comp_name(a, a), dn()))
            for a in range(3):
                for b in range(a + 1, 3):
                    if normal not in (a, b):
                        out.append((comp_name(a, b), dn()))
        return out
    if family_name == "xi":
        out = [(c, d0) for c in ("xx", "yy", "zz")]
        for a in range(3):
            for b in range(3):
                if a != b and a != normal:
                    out.append((comp_name(a, b), d0))
        return out
    if family_name == "xi-red":
        out = [(comp_name(normal, normal), d0)]
        for a in range(3):
            for b in range(3):
                if a != b and b == normal:
                    out.append((comp_name(a, b), d0))
        return out
    if family_name == "x":
        return [(comp_name(a), d0) for a in range(3)]
    if family_name in ("gamma", "gamma-red"):
        out = [(comp_name(min(normal, b), max(normal, b)), d0) for b in range(3)]
        if family_name == "gamma":
            out.append((comp_name(normal, normal), dn()))
        return out
    if family_name == "z":
        return [(comp_name(normal), d0)]
    if family_name == "q":
        return [(comp_name(a), d0) for a in range(3) if a != normal]
    if family_name in ("q-red", "z-red"):
        return []
    raise ValueError(family_name)


def _face_sample_points(mesh: CuboidMesh, normal: int, i: int, j: int, l: int):
    fent = mesh.face_entity(normal, i, j, l)
    ext = fent.extent
    o1, o2 = _others(normal)
    pts = []
    for t1, t2 in grid_points(4):
        p = list(ext.lo)
        p[o1] = ext.lo[o1] + t1 * ext.h(o1)
        p[o2] = ext.lo[o2] + t2 * ext.h(o2)
        pts.append(tuple(p))
    return pts


def _trace_jumps(mesh: CuboidMesh, lo_field: PolyField, hi_field: PolyField,
                 face: tuple[int, int, int, int],
                 traces: list[tuple[str, tuple[int, int, int]]]) -> list[Fraction]:
    pts = _face_sample_points(mesh, *face)
    out: list[Fraction] = []
    for comp, deriv in traces:
        p1 = lo_field.component(comp).differentiate_multi(deriv)
        p2 = hi_field.component(comp).differentiate_multi(deriv)
        out.extend(p1.eval_physical(pt) - p2.eval_physical(pt) for pt in pts)
    return out


def face_jump(space: GlobalSpace, coeffs: list[Fraction],
              face: tuple[int, int, int, int],
              traces: list[tuple[str, tuple[int, int, int]]]) -> list[Fraction]:
    """Jumps of traced quantities across one interior face.

    ``face`` is (normal, i, j, l) with the index along the normal strictly
    inside the mesh; ``traces`` lists (component, derivative multi-order)
    pairs.  Each trace is sampled from both adjacent cells at a fixed 4x4
    rational grid on the face and the differences are returned flat, trace
    by trace.  All zeros certifies the sampled jump vanishes.
    """
    normal, i, j, l = face
    idx = (i, j, l)
    for a in range(3):
        hi = space.mesh.shape[a] - (0 if a == normal else 1)
        lo = 1 if a == normal else 0
        if not lo <= idx[a] <= hi:
            raise ValueError(f"face {face} is not interior")
    lo_ci, hi_ci = space.mesh.face_cells(normal, i, j, l)
    lo_field = reconstruct_local(space, lo_ci, coeffs)
    hi_field = reconstruct_local(space, hi_ci, coeffs)
    return _trace_jumps(space.mesh, lo_field, hi_field, face, traces)


def jump_check(fam: FamilyId, mesh: CuboidMesh, fields: int = 5,
               seed: int = 20260818) -> dict:
    """Sample the advertised traces of random members on interior faces."""
    space = assemble_space(fam, mesh)
    rng = random.Random(seed)
    faces = mesh.interior_faces()
    if not faces:
        raise ValueError("mesh has no interior faces")
    checked = 0
    for _ in range(fields):
        coeffs = _random_coeffs(space.dimension, rng)
        local = [reconstruct_local(space, ci, coeffs)
                 for ci in range(mesh.num_cells)]
        for face in faces:
            normal = face[0]
            lo_ci, hi_ci = mesh.face_cells(*face)
            for trace in continuity_traces(fam.name, normal):
                jumps = _trace_jumps(mesh, local[lo_ci], local[hi_ci],
                                     face, [trace])
                if any(jumps):
                    raise AssertionError(
                        f"{fam.name} k={fam.k}: jump in {trace[0]} "
                        f"deriv {trace[1]} across face {face}")
                checked += 1
    return {"family": fam.name, "k": fam.k, "fields": fields,
            "traces_checked": checked, "continuous": True}


def discontinuity_witness(fam: FamilyId, mesh: CuboidMesh, comp: str,
                          normal: int, seed: int = 20260818) -> bool:
    """True when a random member jumps in ``comp`` across some interior
    face of the given normal; the negative control for reduced families."""
    space = assemble_space(fam, mesh)
    rng = random.Random(seed)
    coeffs = _random_coeffs(space.dimension, rng)
    for face in mesh.interior_faces():
        if face[0] != normal:
            continue
        if any(face_jump(space, coeffs, face, [(comp, (0, 0, 0))])):
            return True
    return False


# ---------------------------------------------------------------------------
# curl/gradient commutation identities


def _fields_equal(f1: PolyField, f2: PolyField) -> bool:
    for a in range(3):
        for b in range(3):
            if not (f1.mat(a, b) - f2.mat(a, b)).is_zero():
                return False
    return True


def check_curl_identities(u: PolyField) -> bool:
    """Both commutation identities for one vector field, exactly.

    Row-wise curl of the symmetric gradient equals half the transposed
    Jacobian of the curl; the transposed variant drops the transpose.
    """
    res1, res2 = check_identity_curl_symgrad(u)
    zero = PolyField("matrix", {}, u.cell)
    return _fields_equal(res1, zero) and _fields_equal(res2, zero)


def random_member_field(fam: FamilyId, cell, rng: random.Random) -> PolyField:
    """A random element of the family's shape space on one cell."""
    spec = shape_space(fam)
    comps = {}
    for g in spec.groups:
        for comp in g.independent:
            grid = spec.degrees[comp]
            comps[comp] = TensorPoly(
                grid, [Fraction(rng.randint(-9, 9)) for _ in range(grid.dim())],
                cell)
    if spec.traceless:
        comps["zz"] = -(comps["xx"] + comps["yy"])
    return PolyField(spec.kind, comps, cell, symmetric=spec.symmetric)


def identity_suite(count: int = 50, seed: int = 20260818,
                   orders: tuple[int, ...] = (2, 3)) -> dict:
    """Random vector fields from the continuous family's shape spaces must
    satisfy both curl identities on unit and anisotropic cells."""
    from .polytensor import box
    rng = random.Random(seed)
    cells = [box(0, 1, 0, 1, 0, 1),
             box(0, Fraction(1, 2), 0, Fraction(1, 3), 0, Fraction(3, 4))]
    passed = 0
    for n in range(count):
        k = orders[n % len(orders)]
        cell = cells[n % len(cells)]
        u = random_member_field(FamilyId("x", k), cell, rng)
        if not check_curl_identities(u):
            raise AssertionError(f"curl identity failed at sample {n} (k={k})")
        passed += 1
    return {"checks": count, "passed": passed, "seed": seed}
