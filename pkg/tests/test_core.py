import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from herereg.core import (AxisAngle, ConsensusSet, Correspondence, CorrespondenceSet,
                          PipelineConfig, RigidTransform, Sampling, Stage, apply, consensus,
                          residual, residuals, rodrigues, rodrigues_raw)
from herereg.synth import random_rotation

from oracles import random_unit, rotation_about


def test_rodrigues_identity_and_quarter_turn():
    assert np.allclose(rodrigues(AxisAngle([0, 0, 1], 0.0)), np.eye(3), atol=1e-15)
    R = rodrigues(AxisAngle([0, 0, 1], np.pi / 2))
    assert np.allclose(R @ [1, 0, 0], [0, 1, 0], atol=1e-15)


def test_rodrigues_matches_matrix_exponential(rng):
    for _ in range(50):
        r = random_unit(rng)
        th = rng.uniform(0, 2 * np.pi)
        assert np.allclose(rodrigues_raw(r, th), rotation_about(r, th), atol=1e-12)


def test_rodrigues_fixes_axis(rng):
    for _ in range(1000):
        aa = AxisAngle(random_unit(rng), rng.uniform(-10, 10))
        R = rodrigues(aa)
        assert np.linalg.norm(R @ aa.r - aa.r) <= 1e-12
        assert np.linalg.norm(R.T @ aa.r - aa.r) <= 1e-12


def test_axis_angle_normalization_keeps_rotation(rng):
    for _ in range(200):
        r = random_unit(rng)
        th = rng.uniform(-7, 7)
        aa = AxisAngle(r, th)
        assert abs(np.linalg.norm(aa.r) - 1) <= 1e-12
        assert aa.r[2] >= 0
        assert 0 <= aa.theta < 2 * np.pi
        assert np.allclose(rodrigues(aa), rodrigues_raw(r, th), atol=1e-12)


def test_axis_angle_equator_tiebreak():
    aa = AxisAngle([0.0, -1.0, 0.0], 0.3)
    assert np.allclose(aa.r, [0, 1, 0]) and np.isclose(aa.theta, 2 * np.pi - 0.3)
    aa = AxisAngle([-1.0, 0.0, 0.0], 0.3)
    assert np.allclose(aa.r, [1, 0, 0])


def test_axis_angle_from_matrix_roundtrip(rng):
    for _ in range(300):
        R = random_rotation(rng)
        assert np.allclose(rodrigues(AxisAngle.from_matrix(R)), R, atol=1e-9)
    half = rotation_about(random_unit(rng), np.pi)
    assert np.allclose(rodrigues(AxisAngle.from_matrix(half)), half, atol=1e-9)
    assert np.allclose(rodrigues(AxisAngle.from_matrix(np.eye(3))), np.eye(3))


def test_axis_angle_rejects_zero_axis():
    with pytest.raises(ValueError):
        AxisAngle([0, 0, 0], 1.0)


def test_rigid_transform_validation():
    with pytest.raises(ValueError):
        RigidTransform(np.diag([1.0, 1.0, -1.0]), np.zeros(3))
    with pytest.raises(ValueError):
        RigidTransform(2 * np.eye(3), np.zeros(3))
    T = RigidTransform.identity()
    assert T.is_valid() and T.matrix().shape == (3, 4)


def test_apply_examples(rng):
    assert np.allclose(apply(RigidTransform.identity(), [1, 2, 3]), [1, 2, 3])
    assert np.allclose(apply(RigidTransform(np.eye(3), np.array([1.0, 0, 0])), [0, 0, 0]), [1, 0, 0])
    T = RigidTransform(random_rotation(rng), rng.normal(size=3))
    for _ in range(20):
        p = rng.normal(size=3)
        assert np.linalg.norm(apply(T, apply(T.inverse(), p)) - p) <= 1e-10
    assert np.allclose(T.compose(T.inverse()).R, np.eye(3), atol=1e-12)


def test_residual_examples(rng):
    T = RigidTransform(random_rotation(rng), rng.normal(size=3))
    x = rng.normal(size=3)
    assert residual(T, Correspondence(x, apply(T, x), 0)) <= 1e-12
    d = random_unit(rng) * 0.01
    assert abs(residual(T, Correspondence(x, apply(T, x) + d, 0)) - 0.01) <= 1e-12
    y = rng.normal(size=3)
    assert np.isclose(residual(T, Correspondence(x, y, 0)), np.linalg.norm(y - T.R @ x - T.t))


def test_consensus_matches_elementwise_filter(instance_09, instance_clean):
    cset, gt, _ = instance_clean
    assert len(consensus(gt, cset, 0.1)) == cset.N
    cset, gt, _ = instance_09
    got = consensus(gt, cset, 0.05)
    want = [i for i in range(cset.N) if residual(gt, cset[i]) <= 0.05]
    assert got.indices.tolist() == want
    empty = CorrespondenceSet(np.empty((0, 3)), np.empty((0, 3)))
    assert len(consensus(gt, empty, 0.1)) == 0


def test_consensus_boundary_is_closed():
    cset = CorrespondenceSet([[0.0, 0, 0]], [[0.5, 0, 0]])
    assert len(consensus(RigidTransform.identity(), cset, 0.5)) == 1


@settings(max_examples=50, deadline=None)
@given(st.floats(0.001, 1.0), st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_consensus_monotone_in_xi(xi1, extra, seed):
    rng = np.random.default_rng(seed)
    cset = CorrespondenceSet(rng.normal(size=(40, 3)), rng.normal(size=(40, 3)))
    T = RigidTransform(random_rotation(rng), rng.normal(size=3))
    a = consensus(T, cset, xi1).as_set()
    b = consensus(T, cset, xi1 + extra).as_set()
    assert a <= b


def test_consensus_set_sorted_unique():
    cs = ConsensusSet([5, 1, 5, 3], Stage.AXIS)
    assert cs.indices.tolist() == [1, 3, 5] and len(cs) == 3 and 3 in cs and 4 not in cs
    with pytest.raises(ValueError):
        ConsensusSet([-1])


def test_correspondence_set_indexing():
    cset = CorrespondenceSet(np.arange(6.0).reshape(2, 3), np.ones((2, 3)))
    c = cset[1]
    assert c.index == 1 and np.allclose(c.x, [3, 4, 5])
    assert [c.index for c in cset] == [0, 1]
    with pytest.raises(ValueError):
        CorrespondenceSet(np.zeros((2, 3)), np.zeros((3, 3)))


def test_pipeline_config_defaults_and_validation():
    cfg = PipelineConfig(xi=0.1)
    assert (cfg.k_t, cfg.m, cfg.k_r, cfg.n, cfg.psi) == (15, 2, 8, 2, 1e-3)
    assert cfg.sampling is Sampling.VALID
    assert PipelineConfig(xi=0.1, sampling="score").sampling is Sampling.SCORE
    for bad in ({"xi": 0}, {"xi": 0.1, "k_t": 0}, {"xi": 0.1, "m": 0}, {"xi": 0.1, "k_r": 0},
                {"xi": 0.1, "n": 0}, {"xi": 0.1, "psi": 0}):
        with pytest.raises(ValueError):
            PipelineConfig(**bad)


def test_residuals_vectorized(instance_09):
    cset, gt, _ = instance_09
    r = residuals(gt, cset)
    assert np.allclose(r[:10], [residual(gt, cset[i]) for i in range(10)])
