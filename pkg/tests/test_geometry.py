import math

import numpy as np
import pytest

from leggett_lab import (
    Direction,
    RigidRotation,
    angle_between,
    build_layout,
    from_cartesian,
    rotate_settings,
    to_cartesian,
)
from conftest import random_direction


def test_to_cartesian_examples():
    assert np.allclose(to_cartesian(Direction(0.0, 1.3)), [0, 0, 1], atol=1e-15)
    assert np.allclose(to_cartesian(Direction(np.pi / 2, np.pi / 2)), [0, 1, 0], atol=1e-15)
    assert np.allclose(
        to_cartesian(Direction(np.pi / 2, 0.25)), [np.cos(0.25), np.sin(0.25), 0], atol=1e-15
    )


def test_unit_norm_and_roundtrip(rng):
    for _ in range(200):
        d = random_direction(rng)
        v = to_cartesian(d)
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12
        assert np.allclose(to_cartesian(from_cartesian(v)), v, atol=1e-12)


def test_pole_azimuth_canonicalized():
    d = from_cartesian([0.0, 0.0, 1.0])
    assert d.phi == 0.0
    d = from_cartesian([0.0, 0.0, -1.0])
    assert d.phi == 0.0


def test_rotation_matrix_orthogonal(rng):
    for _ in range(100):
        r = RigidRotation(*rng.uniform(0, 2 * np.pi, 3))
        m = r.as_matrix()
        assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(m) - 1.0) < 1e-12


def test_identity_rotation_fixes_directions(rng):
    ident = RigidRotation.identity()
    for _ in range(50):
        d = random_direction(rng)
        assert np.allclose(to_cartesian(ident.apply(d)), to_cartesian(d), atol=1e-12)


def test_rotation_preserves_angles(rng):
    for _ in range(100):
        r = RigidRotation(*rng.uniform(0, 2 * np.pi, 3))
        a, b = random_direction(rng), random_direction(rng)
        assert abs(angle_between(r.apply(a), r.apply(b)) - angle_between(a, b)) < 1e-10


def test_layout_original():
    lay = build_layout("original", 0.4)
    assert len(lay.a_list) == 2 and len(lay.b_list) == 3
    # b3 stores the a2 duplication explicitly
    assert lay.b_list[2] == lay.a_list[1]
    assert abs(angle_between(lay.a_list[0], lay.b_list[0]) - 0.4) < 1e-12
    assert abs(angle_between(lay.a_list[1], lay.b_list[1]) - 0.4) < 1e-12


def test_layout_threeplus7_structure():
    phi = 0.25
    lay = build_layout("threeplus7", phi)
    assert len(lay.a_list) == 3 and len(lay.b_list) == 7
    # the three zero-angle settings coincide exactly
    assert lay.b_list[4] == lay.a_list[0]
    assert lay.b_list[5] == lay.a_list[1]
    assert lay.b_list[6] == lay.a_list[2]
    # b1 = (pi/2, phi)
    assert lay.b_list[0] == Direction(np.pi / 2, 0.25)
    # every phi-labelled pair has relative angle phi
    for i, j in [(0, 0), (1, 1), (1, 2), (2, 3)]:
        assert abs(angle_between(lay.a_list[i], lay.b_list[j]) - phi) < 1e-12


def test_layout_threeplus7_phi0_collapse():
    lay = build_layout("threeplus7", 0.0)
    pairs = [(0, 0), (1, 1), (1, 2), (2, 3), (0, 4), (1, 5), (2, 6)]
    for i, j in pairs:
        assert np.allclose(
            to_cartesian(lay.a_list[i]), to_cartesian(lay.b_list[j]), atol=1e-12
        )


def test_layout_threeplus6_vectors():
    phi = 0.8
    lay = build_layout("threeplus6", phi)
    assert len(lay.a_list) == 3 and len(lay.b_list) == 6
    assert lay.b_list[0] == Direction(np.pi / 2, 0.4)
    assert lay.b_list[1] == Direction(np.pi / 2, -0.4)
    # angle(a_i, b_i+-) = phi/2 for every group
    for w, terms in lay.groups:
        for i, j in terms:
            assert abs(angle_between(lay.a_list[i], lay.b_list[j]) - phi / 2) < 1e-10


def test_layout_threeplus6_difference_vectors_orthogonal():
    for phi in np.linspace(0.05, np.pi - 0.05, 25):
        lay = build_layout("threeplus6", phi)
        diffs = []
        for j, j2, _ in lay.bound_pairs:
            diffs.append(to_cartesian(lay.b_list[j]) - to_cartesian(lay.b_list[j2]))
        for k in range(3):
            for l in range(k + 1, 3):
                assert abs(np.dot(diffs[k], diffs[l])) < 1e-9


def test_layout_phi0_collapse_threeplus6():
    lay = build_layout("threeplus6", 0.0)
    for w, terms in lay.groups:
        for i, j in terms:
            assert np.allclose(
                to_cartesian(lay.a_list[i]), to_cartesian(lay.b_list[j]), atol=1e-12
            )


def test_layout_rejects_bad_input():
    with pytest.raises(ValueError):
        build_layout("nope", 0.1)
    with pytest.raises(ValueError):
        build_layout("threeplus6", -0.2)
    with pytest.raises(ValueError):
        build_layout("threeplus6", 3.5)


def test_rotate_settings_identity_and_axis():
    lay = build_layout("threeplus7", 0.3)
    same = rotate_settings(lay, RigidRotation.identity())
    for d, e in zip(lay.a_list + lay.b_list, same.a_list + same.b_list):
        assert np.allclose(to_cartesian(d), to_cartesian(e), atol=1e-12)
    # z-rotation by pi moves a1 = (pi/2, 0) to (pi/2, pi)
    rot = rotate_settings(lay, RigidRotation(np.pi, 0.0, 0.0))
    assert np.allclose(to_cartesian(rot.a_list[0]), [-1, 0, 0], atol=1e-12)


def test_rotate_settings_preserves_party_angles(rng):
    lay = build_layout("threeplus6", 0.7)
    for _ in range(20):
        ra = RigidRotation(*rng.uniform(0, 2 * np.pi, 3))
        rb = RigidRotation(*rng.uniform(0, 2 * np.pi, 3))
        rot = rotate_settings(lay, ra, rb)
        for lst, new in ((lay.a_list, rot.a_list), (lay.b_list, rot.b_list)):
            for i in range(len(lst)):
                for j in range(i + 1, len(lst)):
                    assert (
                        abs(angle_between(new[i], new[j]) - angle_between(lst[i], lst[j]))
                        < 1e-10
                    )


def test_rotate_settings_shared_mode():
    lay = build_layout("threeplus7", 0.2)
    r = RigidRotation(0.3, 1.1, -0.4)
    shared = rotate_settings(lay, r)
    both = rotate_settings(lay, r, r)
    for d, e in zip(shared.b_list, both.b_list):
        assert np.allclose(to_cartesian(d), to_cartesian(e), atol=1e-15)
