"""Verification layer: exactness reports, kernels, preimages, jumps."""

import random
from fractions import Fraction

import pytest

from cuboid_complex.assembly import assemble_space, operator_matrix
from cuboid_complex.elements import family
from cuboid_complex.mesh import uniform_unit_mesh
from cuboid_complex.polytensor import TensorPoly
from cuboid_complex.verify import (
    COMPLEX_NAMES, certified_ranks, continuity_traces, discontinuity_witness,
    div_preimage_check, div_preimage_elasticity, div_preimage_gradgrad,
    exact_rank, face_jump, float_rank, identity_suite, jump_check,
    kernel_identification, verify_complex, verify_dimensions,
    verify_local_complex,
)

F = Fraction

REPORT_KEYS = {
    "complex", "k", "mesh", "dims", "ranks", "composition_zero", "exact",
    "cohomology_dim", "elapsed_ms", "arithmetic_mode", "seed",
}


def test_verify_complex_unit_cell_gradgrad():
    rep = verify_complex("gradgrad", 3, uniform_unit_mesh(1, 1, 1),
                         arithmetic="both")
    assert rep.dims == [64, 204, 198, 54]
    assert rep.ranks == [60, 144, 54]
    assert rep.composition_zero and rep.exact
    assert rep.cohomology_dim == 4
    assert set(rep.to_dict()) == REPORT_KEYS
    assert all(rep.checks().values())


def test_verify_complex_unit_cell_elasticity():
    rep = verify_complex("elasticity", 2, uniform_unit_mesh(1, 1, 1),
                         arithmetic="both")
    assert rep.dims == [144, 204, 102, 36]
    assert rep.ranks == [138, 66, 36]
    assert rep.exact and rep.cohomology_dim == 6


def test_verify_complex_rejects_low_order():
    with pytest.raises(ValueError):
        verify_complex("gradgrad", 2, uniform_unit_mesh(1, 1, 1))


@pytest.mark.parametrize("name,k,dims,ranks", [
    ("gradgrad", 3, [64, 204, 198, 54], [60, 144, 54]),
    ("elasticity", 2, [144, 204, 102, 36], [138, 66, 36]),
    ("elasticity", 3, [300, 465, 279, 108], [294, 171, 108]),
])
def test_verify_local_complex(name, k, dims, ranks):
    rep = verify_local_complex(name, k)
    assert rep["dims"] == dims
    assert rep["ranks"] == ranks
    assert rep["composition_zero"] and rep["exact"]
    assert rep["alternating_sum"] == rep["cohomology_dim"]


def test_verify_local_complex_rejects_reduced_names():
    with pytest.raises(ValueError):
        verify_local_complex("gradgrad-reduced", 3)


def test_verify_dimensions_frozen_sample():
    r = verify_dimensions(family("xi", 3), uniform_unit_mesh(2, 2, 2))
    assert r["formula"] == r["assembled"] == 970 and r["match"]


def test_rank_modes_agree():
    mesh = uniform_unit_mesh(2, 1, 1)
    xi = assemble_space(family("xi", 3), mesh)
    q = assemble_space(family("q", 3), mesh)
    d = operator_matrix("div", xi, q)
    assert exact_rank(d) == float_rank(d) == 96
    assert certified_ranks([d], "both") == ([96], [96])


@pytest.mark.parametrize("name", COMPLEX_NAMES)
def test_kernel_identification_two_cells(name):
    k = 3 if name.startswith("gradgrad") else 2
    r = kernel_identification(name, k, uniform_unit_mesh(2, 1, 1))
    assert r["identified"]
    assert r["interpolant_rank"] == r["nullity"] == r["kernel_dim"]


def test_div_preimage_constant_target_by_hand():
    # q = (1, 0, 0) on the unit cell: tau_xy = y, everything else zero
    mesh = uniform_unit_mesh(1, 1, 1)
    q = assemble_space(family("q", 3), mesh)
    ones = interp_constant_x(q)
    xi, vec = div_preimage_gradgrad(q, ones)
    from cuboid_complex.assembly import reconstruct_local
    f = reconstruct_local(xi, 0, vec)
    assert f.component("xy") == TensorPoly.monomial((0, 1, 0))
    for comp in ("xx", "yy", "zz", "yz", "zx"):
        assert f.component(comp).is_zero()


def interp_constant_x(space):
    from cuboid_complex.assembly import interpolate
    return interpolate(space, lambda ci, box: {
        "x": TensorPoly.monomial((0, 0, 0), box)})


def test_div_preimage_elasticity_by_hand():
    # q = (x, 0, 0) on the unit cell: sigma_xx = x^2/2
    mesh = uniform_unit_mesh(1, 1, 1)
    z = assemble_space(family("z", 2), mesh)
    from cuboid_complex.assembly import interpolate, reconstruct_local
    vec = interpolate(z, lambda ci, box: {
        "x": TensorPoly.monomial((1, 0, 0), box)})
    gamma, pvec = div_preimage_elasticity(z, vec)
    f = reconstruct_local(gamma, 0, pvec)
    assert f.component("xx") == TensorPoly.monomial((2, 0, 0), coeff=F(1, 2))
    assert f.component("yy").is_zero() and f.component("xy").is_zero()


def test_div_preimage_zero_is_zero():
    mesh = uniform_unit_mesh(1, 1, 1)
    q = assemble_space(family("q-red", 3), mesh)
    _xi, vec = div_preimage_gradgrad(q, [F(0)] * q.dimension)
    assert all(v == 0 for v in vec)


def test_div_preimage_rejects_wrong_space():
    mesh = uniform_unit_mesh(1, 1, 1)
    z = assemble_space(family("z", 2), mesh)
    with pytest.raises(ValueError):
        div_preimage_gradgrad(z, [F(0)] * z.dimension)


def test_div_preimage_check_small():
    r = div_preimage_check("gradgrad", 3, uniform_unit_mesh(2, 1, 1), samples=3)
    assert r["exact"] and r["samples"] == 3


def test_continuity_trace_catalog():
    assert continuity_traces("u", 0) == [("s", (0, 0, 0)), ("s", (1, 0, 0))]
    assert continuity_traces("q-red", 1) == []
    assert continuity_traces("z-red", 2) == []
    assert ("xx", (0, 0, 0)) not in continuity_traces("sigma", 0)
    assert ("xx", (0, 0, 0)) in continuity_traces("sigma", 1)
    assert ("zz", (0, 0, 1)) in continuity_traces("gamma", 2)
    assert ("zz", (0, 0, 1)) not in continuity_traces("gamma-red", 2)


def test_jump_check_sigma_small():
    r = jump_check(family("sigma", 3), uniform_unit_mesh(2, 1, 1), fields=2)
    assert r["continuous"]


def test_face_jump_shared_derivative_moments():
    # sigma_xy with a normal derivative across a z-normal face: the face
    # DOFs pair values with d/dz moments, so the sampled jump vanishes
    mesh = uniform_unit_mesh(1, 1, 2)
    space = assemble_space(family("sigma", 3), mesh)
    rng = random.Random(20260818)
    coeffs = [F(rng.randint(-9, 9)) for _ in range(space.dimension)]
    jumps = face_jump(space, coeffs, (2, 0, 0, 1), [("xy", (0, 0, 1))])
    assert jumps and all(v == 0 for v in jumps)
    # and the Lagrange diagonal of xi is continuous across any interior face
    xi = assemble_space(family("xi", 3), mesh)
    coeffs = [F(rng.randint(-9, 9)) for _ in range(xi.dimension)]
    jumps = face_jump(xi, coeffs, (2, 0, 0, 1), [("xx", (0, 0, 0))])
    assert all(v == 0 for v in jumps)


def test_face_jump_boundary_rejected():
    mesh = uniform_unit_mesh(2, 1, 1)
    space = assemble_space(family("q", 3), mesh)
    with pytest.raises(ValueError):
        face_jump(space, [F(0)] * space.dimension, (0, 0, 0, 0), [])
    with pytest.raises(ValueError):
        face_jump(space, [F(0)] * space.dimension, (1, 0, 1, 0), [])


def test_negative_control_sigma_red():
    mesh = uniform_unit_mesh(2, 1, 1)
    assert discontinuity_witness(family("sigma-red", 3), mesh, "xx", 0)


def test_identity_suite_counts():
    r = identity_suite(count=6)
    assert r["checks"] == r["passed"] == 6
