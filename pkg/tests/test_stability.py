import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from filippov_lab.canopy import Variant, f_tilde, origin_location
from filippov_lab.errors import PreconditionError
from filippov_lab.pws_model import QuadCorners
from filippov_lab.regularization import ARCTAN, ST, TANH
from filippov_lab.sliding_solver import solve_sigmas
from filippov_lab.stability import (
    GeometricType,
    Kind,
    RegIndependent,
    classify_stability,
    fast_jacobian,
    reg_independent_stability,
    s_values,
    stability_report,
    tangent_jacobian,
    type_from_geometry,
)

from helpers import S_MIXED, S_MIXED_ROOT, S_SYM, S_TWO, admissible, corners

REGS = [TANH, ARCTAN, ST]
coord = st.floats(-2, 2, allow_nan=False)
quad = st.lists(st.tuples(coord, coord), min_size=4, max_size=4).map(np.array)


def _branch(sols, sp, sf):
    (s,) = [s for s in sols if abs(s.sigma_psi - sp) < 1e-12 and abs(s.sigma_phi - sf) < 1e-12]
    return s


class TestJacobians:
    def test_sym(self):
        np.testing.assert_array_equal(tangent_jacobian(corners(S_SYM), 0, 0), -np.eye(2))

    def test_two(self):
        D = tangent_jacobian(corners(S_TWO), 0.5, -0.5)
        np.testing.assert_allclose(D, [[-0.5, 0.5], [1, 1]], atol=1e-15)
        assert np.linalg.det(D) == pytest.approx(-1.0)

    def test_constant_corners(self):
        np.testing.assert_array_equal(tangent_jacobian(corners([(0.4, -2.0)] * 4), 0.3, 0.1), np.zeros((2, 2)))

    def test_fast_identity(self):
        np.testing.assert_array_equal(fast_jacobian(-np.eye(2), 1, 1), -np.eye(2))

    def test_fast_scaling(self):
        np.testing.assert_array_equal(fast_jacobian(-np.eye(2), 2, 3), np.diag([-2.0, -3.0]))

    def test_fast_needs_positive(self):
        with pytest.raises(PreconditionError):
            fast_jacobian(np.eye(2), 0.0, 1.0)

    @settings(max_examples=200)
    @given(quad, st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
    def test_finite_difference(self, X, p, f):
        q = QuadCorners.from_xt(X)
        h = 1e-6
        fd = np.column_stack(
            [
                (f_tilde(q, p + h, f) - f_tilde(q, p - h, f)) / (2 * h),
                (f_tilde(q, p, f + h) - f_tilde(q, p, f - h)) / (2 * h),
            ]
        )
        np.testing.assert_allclose(tangent_jacobian(q, p, f), fd, atol=1e-8)


class TestClassify:
    @pytest.mark.parametrize(
        "J,kind",
        [
            (-np.eye(2), Kind.NODE_ATTRACTING),
            (np.eye(2), Kind.NODE_REPELLING),
            ([[0, 1], [-1, 0]], Kind.CENTER),
            ([[1, 0], [0, -1]], Kind.SADDLE),
            ([[-1, 2], [-2, -1]], Kind.FOCUS_ATTRACTING),
            ([[1, 2], [-2, 1]], Kind.FOCUS_REPELLING),
            ([[1, 0], [0, 0]], Kind.NON_HYPERBOLIC),
        ],
    )
    def test_examples(self, J, kind):
        assert classify_stability(np.array(J, float)) is kind

    @given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
    def test_agrees_with_eigenvalues(self, v):
        J = np.array(v).reshape(2, 2)
        ev = np.linalg.eigvals(J)
        det = np.linalg.det(J)
        assume(abs(det) > 1e-6 and abs(np.trace(J)) > 1e-6)
        k = classify_stability(J)
        if k is Kind.SADDLE:
            assert np.all(np.isreal(ev)) and ev.real.min() < 0 < ev.real.max()
        elif k.attracting:
            assert np.all(ev.real < 0)
        else:
            assert k.repelling and np.all(ev.real > 0)
        if k in (Kind.FOCUS_ATTRACTING, Kind.FOCUS_REPELLING):
            assert np.all(np.abs(ev.imag) > 0)


class TestGeometricType:
    def test_sym_node(self):
        q = corners(S_SYM)
        t, k = type_from_geometry(q, origin_location(q))
        assert t is GeometricType.NODE_FOCUS_CENTER and k == 1

    def test_reversed_convex_saddle(self):
        q = corners([(-1, -1), (-1, 1), (1, 1), (1, -1)])
        t, _ = type_from_geometry(q, origin_location(q))
        assert t is GeometricType.SADDLE

    def test_double_rejected(self):
        q = corners([(1.25, 2.0), (-0.75, 0.1), (1.25, -2.0), (-0.75, -0.1)])
        with pytest.raises(PreconditionError):
            type_from_geometry(q, origin_location(q))

    @settings(max_examples=400, deadline=None)
    @given(quad)
    def test_matches_jacobian_sign(self, X):
        assume(admissible(X))
        q = QuadCorners.from_xt(X)
        loc = origin_location(q)
        assume(loc.variant is Variant.UNIQUE)
        (s,) = solve_sigmas(q)
        d = np.linalg.det(tangent_jacobian(q, s.psi_star, s.phi_star))
        t, _ = type_from_geometry(q, loc)
        assert (t is GeometricType.SADDLE) == (d < 0)


class TestRegularizationIndependence:
    def test_sym_attracting(self):
        q = corners(S_SYM)
        (s,) = solve_sigmas(q)
        assert s_values(q, s.sigma_psi, s.sigma_phi) == (-2.0, -2.0)
        assert reg_independent_stability(q, s) is RegIndependent.ATTRACTING
        r = stability_report(q, s, TANH, TANH)
        np.testing.assert_array_equal(r.jacobian, -np.eye(2))
        assert r.kind is Kind.NODE_ATTRACTING and r.reg_independent

    def test_two_node_branch_repelling(self):
        q = corners(S_TWO)
        s = _branch(solve_sigmas(q), 0.25, 0.75)
        assert s_values(q, 0.25, 0.75) == pytest.approx((1.0, 2.0))
        assert reg_independent_stability(q, s) is RegIndependent.REPELLING
        for ry, rz in itertools.product(REGS, REGS):
            r = stability_report(q, s, ry, rz)
            assert r.trace_j > 0 and r.kind.repelling

    def test_two_saddle_branch(self):
        q = corners(S_TWO)
        s = _branch(solve_sigmas(q), 0.75, 0.25)
        r = stability_report(q, s, TANH, ARCTAN)
        assert r.kind is Kind.SADDLE and r.reg_independent
        with pytest.raises(PreconditionError):
            reg_independent_stability(q, s)

    def test_mixed_depends(self):
        q = QuadCorners.from_xt(S_MIXED)
        (s,) = solve_sigmas(q)
        assert (s.psi_star, s.phi_star) == pytest.approx(S_MIXED_ROOT, abs=1e-14)
        s1, s2 = s_values(q, s.sigma_psi, s.sigma_phi)
        assert s1 * s2 < 0
        assert reg_independent_stability(q, s) is RegIndependent.DEPENDS
        a = stability_report(q, s, TANH, TANH)
        b = stability_report(q, s, ST, ARCTAN)
        assert a.trace_j < -1e-6 and b.trace_j > 1e-6
        assert a.kind.attracting and b.kind.repelling
        assert not a.reg_independent

    @settings(max_examples=200, deadline=None)
    @given(quad, st.sampled_from(REGS), st.sampled_from(REGS))
    def test_trace_forms_agree(self, X, ry, rz):
        # the report raises on a trace mismatch, so building it is the check
        assume(admissible(X))
        q = QuadCorners.from_xt(X)
        for s in solve_sigmas(q):
            r = stability_report(q, s, ry, rz)
            assert np.trace(r.jacobian) == pytest.approx(r.trace_j)
            if r.verdict is RegIndependent.ATTRACTING:
                assert r.kind.attracting
            if r.verdict is RegIndependent.REPELLING:
                assert r.kind.repelling
