"""Invariant forms, conic classification, arcs, eigenrays."""
import math
import random

import pytest

from pwlin import (
    ConicClass,
    FamilyId,
    Mat2,
    Params,
    QuadraticForm,
    Ray,
    Sector,
    arc_in_sector,
    eigenrays,
    invariant_form,
    level_through,
    word_matrix,
)
from pwlin.circle import angle_of
from pwlin.conics import classify, conic_class_of_trace
from pwlin.errors import AsymptoteInSectorError, DegenerateMatrixError
from pwlin.families import alpha0, piece_matrices, reference_sector

from conftest import A_SPECIAL, B_SPECIAL, C_SPECIAL


def _random_sl2(rng, params):
    word = "".join(rng.choice("+-") for _ in range(rng.randrange(1, 12)))
    return word_matrix(params, word)


def test_invariant_form_rotation_matrix():
    form = invariant_form(Mat2(0.0, -1.0, 1.0, 0.0))
    assert (form.A, form.B, form.C) == (1.0, 0.0, 1.0)
    assert form((0.7, -0.2)) == pytest.approx(0.7**2 + 0.2**2, abs=1e-15)


def test_invariant_form_rejects_identity():
    with pytest.raises(DegenerateMatrixError):
        invariant_form(Mat2.identity())
    with pytest.raises(DegenerateMatrixError):
        invariant_form(Mat2(-1.0, 0.0, 0.0, -1.0))
    with pytest.raises(DegenerateMatrixError):
        invariant_form(Mat2(2.0, 0.0, 0.0, 2.0))  # det 4


def test_invariant_form_elliptic_special_point():
    m1, _ = piece_matrices(FamilyId.EX_A, A_SPECIAL)
    form = invariant_form(m1)
    assert form.disc < 0.0


def test_form_is_invariant():
    rng = random.Random(50)
    p = Params(1.3, -0.6)
    for _ in range(300):
        m = _random_sl2(rng, p)
        try:
            form = invariant_form(m)
        except DegenerateMatrixError:
            continue
        for _ in range(10):
            v = (rng.uniform(-2, 2), rng.uniform(-2, 2))
            r2 = v[0] ** 2 + v[1] ** 2
            assert abs(form(m.apply(v)) - form(v)) <= 1e-10 * max(1.0, r2) * m.max_abs() ** 2


def test_commuting_matrix_preserves_partner_form(params_a12):
    m1, m2 = piece_matrices(FamilyId.EX_A, 1.2)
    form = invariant_form(m1)
    rng = random.Random(51)
    for _ in range(100):
        v = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert abs(form(m2.apply(v)) - form(v)) <= 1e-10 * max(1.0, v[0]**2 + v[1]**2)


def test_form_of_inverse_matches():
    rng = random.Random(52)
    p = Params(0.9, -1.4)
    for _ in range(100):
        m = _random_sl2(rng, p)
        try:
            f1 = invariant_form(m)
            f2 = invariant_form(m.inverse())
        except DegenerateMatrixError:
            continue
        assert abs(f1.A - f2.A) <= 1e-9
        assert abs(f1.B - f2.B) <= 1e-9
        assert abs(f1.C - f2.C) <= 1e-9


def test_classify_ellipse_regime():
    for a in (1.05, 1.2, 1.35):
        m1, _ = piece_matrices(FamilyId.EX_A, a)
        assert classify(m1) is ConicClass.ELLIPSE
        assert abs(m1.trace() - (3 * a - a**3)) <= 1e-12


def test_classify_threshold_cases():
    a0 = alpha0()
    _, m4 = piece_matrices(FamilyId.EX_B, a0)
    assert classify(m4) is ConicClass.PARALLEL_LINES
    _, m4h = piece_matrices(FamilyId.EX_B, 0.78615)
    assert classify(m4h) is ConicClass.HYPERBOLA
    _, m4e = piece_matrices(FamilyId.EX_B, 0.1)
    assert classify(m4e) is ConicClass.ELLIPSE


def test_classification_matches_disc_sign():
    rng = random.Random(53)
    p = Params(1.8, -2.1)
    for _ in range(200):
        m = _random_sl2(rng, p)
        try:
            form = invariant_form(m)
        except DegenerateMatrixError:
            continue
        cls = conic_class_of_trace(m.trace())
        if cls is ConicClass.ELLIPSE:
            assert form.disc < 0.0
        elif cls is ConicClass.HYPERBOLA:
            assert form.disc > 0.0


def test_level_through():
    circle = QuadraticForm(1.0, 0.0, 1.0)
    assert level_through(circle, (0.0, 1.0)) == 1.0
    rng = random.Random(54)
    form = QuadraticForm.normalized(0.6, -0.8, 0.3)
    for _ in range(50):
        v = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        if v == (0.0, 0.0):
            continue
        assert level_through(form, (2 * v[0], 2 * v[1])) == pytest.approx(
            4 * level_through(form, v), rel=1e-14)


def test_level_invariant_along_return(params_a12):
    from pwlin import iterate, return_map

    sector = reference_sector(FamilyId.EX_A, 1.2)
    rmap = return_map(params_a12, sector)
    orbit, _ = iterate(params_a12, (0.0, -1.0), 8)
    v4 = orbit[4]
    form = invariant_form(rmap.pieces[0].matrix)
    image = rmap.pieces[1].matrix.apply(v4)  # v4 sits on the second piece's ray
    assert abs(form(image) - form(v4)) <= 1e-10


def test_quarter_circle_arc():
    form = QuadraticForm(1.0, 0.0, 1.0)
    quadrant = Sector(Ray.through((1.0, 0.0)), Ray.through((0.0, 1.0)))
    arc = arc_in_sector(form, 1.0, quadrant, (1.0, 0.0), n_samples=101)
    assert arc.conic_class is ConicClass.ELLIPSE
    first, last = arc.samples[0], arc.samples[-1]
    assert math.hypot(first[0] - 1.0, first[1]) <= 1e-9
    assert math.hypot(last[0], last[1] - 1.0) <= 1e-9
    assert arc.max_level_residual() <= 1e-9
    angles = [angle_of(s) for s in arc.samples]
    assert all(b > a for a, b in zip(angles, angles[1:]))


def test_arc_continuity_across_sectors(params_a_special):
    from pwlin import (
        build_invariant_circle,
        orbit_relation,
    )

    rel = orbit_relation(params_a_special)
    circle = build_invariant_circle(params_a_special, rel)
    arcs = circle.arcs
    for i, arc in enumerate(arcs):
        nxt = arcs[(i + 1) % len(arcs)]
        pa, pb = arc.samples[-1], nxt.samples[0]
        assert math.hypot(pa[0] - pb[0], pa[1] - pb[1]) <= 1e-8 * max(
            1.0, math.hypot(*pa))


def test_arc_asymptote_in_sector(params_c_special):
    from pwlin import iterate, return_map

    sector = reference_sector(FamilyId.EX_C, C_SPECIAL)
    rmap = return_map(params_c_special, sector, budget=4000)
    form = invariant_form(rmap.pieces[0].matrix)
    orbit, _ = iterate(params_c_special, (0.0, -1.0), 13)
    anchor = orbit[9]
    with pytest.raises(AsymptoteInSectorError) as err:
        arc_in_sector(form, form(anchor), sector, anchor)
    assert err.value.eigenray is not None


def test_eigenrays_diagonal():
    rays = eigenrays(Mat2(2.0, 0.0, 0.0, 0.5))
    angles = sorted(r.angle for r in rays)
    assert len(rays) == 2
    assert abs(angles[0] - 0.0) <= 1e-12
    assert abs(angles[1] - math.pi / 2) <= 1e-12


def test_eigenrays_rotation_empty():
    assert eigenrays(Mat2(0.0, -1.0, 1.0, 0.0)) == []
    c, s = math.cos(0.3), math.sin(0.3)
    assert eigenrays(Mat2(c, -s, s, c)) == []


def test_eigenrays_divergent_family_inside_sector(params_c_special):
    from pwlin import return_map

    sector = reference_sector(FamilyId.EX_C, C_SPECIAL)
    rmap = return_map(params_c_special, sector, budget=4000)
    j1 = rmap.pieces[0].subsector
    rays = eigenrays(rmap.pieces[0].matrix)
    assert len(rays) == 2
    for ray in rays:
        d = ray.direction
        assert j1.contains(d) or j1.contains((-d[0], -d[1]))


def test_hyperbolic_arc_samples(params_c_special):
    # hyperbolic form, asymptotes outside the probed sector
    _, m4 = piece_matrices(FamilyId.EX_B, B_SPECIAL)
    form = invariant_form(m4)
    assert form.conic_class() is ConicClass.HYPERBOLA
    third = Sector(Ray.through((-1.0, 0.0)), Ray.through((0.0, -1.0)))
    anchor = (-1.0, 0.0)
    arc = arc_in_sector(form, form(anchor), third, anchor, n_samples=64)
    assert arc.max_level_residual() <= 1e-9
    angles = [angle_of(s) for s in arc.samples]
    assert all(b > a for a, b in zip(angles, angles[1:]))


def test_line_arc_samples():
    a0 = alpha0()
    _, m4 = piece_matrices(FamilyId.EX_B, a0)
    form = invariant_form(m4)
    third = Sector(Ray.through((-1.0, 0.0)), Ray.through((0.0, -1.0)))
    anchor = (-1.0, 0.0)
    arc = arc_in_sector(form, form(anchor), third, anchor, n_samples=64)
    assert arc.conic_class is ConicClass.PARALLEL_LINES
    # collinear samples
    p0, p1, pn = arc.samples[0], arc.samples[1], arc.samples[-1]
    cross = (p1[0] - p0[0]) * (pn[1] - p0[1]) - (p1[1] - p0[1]) * (pn[0] - p0[0])
    assert abs(cross) <= 1e-9
    assert arc.max_level_residual() <= 1e-9
