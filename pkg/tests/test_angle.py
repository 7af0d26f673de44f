import numpy as np
import pytest

from herereg.angle import angle_interval, assemble, solve_stage3
from herereg.core import (AxisAngle, ConsensusSet, Correspondence, CorrespondenceSet, NoAngle,
                          RigidTransform, residual)
from herereg.synth import SynthConfig, generate

from oracles import dense_angles, in_pieces, random_unit, rotate_about, rotation_about


def test_noiseless_inlier_contains_true_angle(rng):
    for _ in range(100):
        r, th = random_unit(rng), rng.uniform(0, 2 * np.pi)
        R = rotation_about(r, th)
        t = rng.normal(size=3)
        x = rng.normal(size=3)
        iv = angle_interval(Correspondence(x, R @ x + t, 0), t, r, 0.01)
        assert iv is not None
        assert in_pieces(np.array([th]), [(iv.theta_lo, iv.theta_hi)])[0]


def test_point_on_axis_is_full_or_empty():
    r = np.array([0.0, 0.0, 1.0])
    x = np.array([0.0, 0.0, 2.0])
    iv = angle_interval(Correspondence(x, np.array([0.0, 0.0, 2.05]), 0), np.zeros(3), r, 0.1)
    assert iv.is_full
    assert angle_interval(Correspondence(x, np.array([0.0, 0.0, 2.5]), 0), np.zeros(3), r, 0.1) is None


def test_angle_dense_membership(rng):
    th = dense_angles()
    for _ in range(300):
        r = random_unit(rng)
        t = rng.normal(size=3)
        x = rng.normal(size=3)
        y = rotation_about(r, rng.uniform(0, 7)) @ x + t + rng.normal(size=3) * 0.3
        xi = rng.uniform(0.05, 1.0)
        iv = angle_interval(Correspondence(x, y, 0), t, r, xi)
        res = np.linalg.norm(y - t - rotate_about(x, r, th)[:, 0], axis=1)
        inside = in_pieces(th, [(iv.theta_lo, iv.theta_hi)]) if iv else np.zeros(th.size, bool)
        assert not ((inside != (res <= xi)) & (np.abs(res - xi) > 1e-9)).any()


def test_stage3_all_full_circle():
    cset = CorrespondenceSet([[0, 0, 1.0], [0, 0, 2.0]], [[0, 0, 1.0], [0, 0, 2.0]])
    theta, I3 = solve_stage3(ConsensusSet([0, 1]), np.zeros(3), np.array([0, 0, 1.0]), cset, 0.1)
    assert I3.as_set() == {0, 1} and 0 <= theta < 2 * np.pi


def test_stage3_disjoint_arcs_tie_break():
    r = np.array([0.0, 0.0, 1.0])
    x = np.array([[1.0, 0, 0], [1.0, 0, 0]])
    y = np.array([[np.cos(1.0), np.sin(1.0), 0], [np.cos(3.0), np.sin(3.0), 0]])
    theta, I3 = solve_stage3(ConsensusSet([0, 1]), np.zeros(3), r, CorrespondenceSet(x, y), 0.05)
    assert len(I3) == 1 and 0 in I3 and abs(theta - 1.0) < 0.05


def test_stage3_no_angle():
    cset = CorrespondenceSet([[1.0, 0, 0]], [[5.0, 0, 0]])
    with pytest.raises(NoAngle):
        solve_stage3(ConsensusSet([0]), np.zeros(3), np.array([0, 0, 1.0]), cset, 0.1)


def test_stage3_members_satisfy_full_constraint():
    cset, gt, mask = generate(SynthConfig(N=100, rho=0.95, seed=6))
    aa = AxisAngle.from_matrix(gt.R)
    I2 = ConsensusSet(np.arange(cset.N))
    theta, I3 = solve_stage3(I2, gt.t, aa.r, cset, 0.02)
    T = RigidTransform(assemble(aa.r, theta), gt.t)
    for i in I3:
        assert residual(T, cset[i]) <= 0.02 + 1e-9
    # dense grid over theta at step 2π/10⁶ agrees on the best count
    grid = np.arange(1_000_000) * (2 * np.pi / 1_000_000)
    best = 0
    X = cset.x[I2.indices]
    A = cset.y[I2.indices] - gt.t
    for chunk in np.array_split(grid, 500):
        cnt = (np.linalg.norm(A[None] - rotate_about(X, aa.r, chunk), axis=2) <= 0.02).sum(axis=1)
        best = max(best, int(cnt.max()))
    assert len(I3) == best
