import json

import numpy as np
import pytest

from filippov_lab.bifurcation import (
    BifurcationEvent,
    EventKind,
    canard_candidate,
    equator_equilibria,
    scan,
)
from filippov_lab.canopy import canopy_invariants, det2
from filippov_lab.errors import PreconditionError
from filippov_lab.pws_model import FieldTriple, PolynomialScalar, PwsSystem, filippov_codim1, project
from filippov_lab.sliding_solver import solve_sigmas

from helpers import S_SYM, corners, edge_family, f_shift

P = PolynomialScalar


def _count(system, x):
    return len(solve_sigmas(project(system, x)))


def _sym_lifted():
    """S_sym with every gamma shifted by x: edge 1 sweeps through the origin at x = 1."""
    return PwsSystem(tuple(FieldTriple(P((1.0,)), P((b,)), P((g, 1.0))) for b, g in S_SYM), (0.0, 2.0))


class TestParabolicTangency:
    def test_f_shift(self):
        s = f_shift()
        ev = scan(s, -0.3, 0.5, n=200)
        assert [e.kind for e in ev] == [EventKind.PARABOLIC_TANGENCY]
        (e,) = ev
        assert e.x_star == pytest.approx(-0.25, abs=1e-8)
        assert e.bracket[0] < e.x_star < e.bracket[1]
        assert e.bracket[1] - e.bracket[0] <= 1.01e-10
        assert {_count(s, e.bracket[0] - 1e-6), _count(s, e.bracket[1] + 1e-6)} == {0, 2}

    def test_monitor_changes_sign(self):
        s = f_shift()
        (e,) = scan(s, -0.3, 0.5)
        d_lo = canopy_invariants(project(s, e.bracket[0])).Delta
        d_hi = canopy_invariants(project(s, e.bracket[1])).Delta
        assert d_lo * d_hi <= 0 and (d_lo, d_hi) != (0.0, 0.0)

    def test_refine_is_stable(self):
        a = scan(f_shift(), -0.3, 0.5)
        b = scan(f_shift(), -0.3, 0.5, refine=True)
        assert [(e.kind, round(e.x_star, 8)) for e in a] == [(e.kind, round(e.x_star, 8)) for e in b]

    def test_corner_exit_is_count_change(self):
        ev = scan(f_shift(), -0.3, 1.0)
        kinds = [e.kind for e in ev]
        assert kinds == [EventKind.PARABOLIC_TANGENCY, EventKind.COUNT_CHANGE]
        cc = ev[1]
        assert cc.x_star == pytest.approx(0.75, abs=1e-7)
        assert cc.diagnostics["from"] == 2 and cc.diagnostics["to"] == 0
        assert cc.diagnostics["min_corner_norm"] < 1e-7


class TestEdgeCrossing:
    def test_edge_family(self):
        s = edge_family()
        ev = scan(s, -0.5, 0.5, n=200)
        assert [e.kind for e in ev] == [EventKind.EDGE_CROSSING]
        (e,) = ev
        assert e.x_star == pytest.approx(0.0, abs=1e-8)
        assert e.diagnostics["edge"] == 3
        # edges 3 and 4 are collinear through the origin at x = 0, so both count
        assert e.diagnostics["edges"] == [3, 4]
        d_lo = det2(project(s, e.bracket[0]).corner(3), project(s, e.bracket[0]).corner(4))
        d_hi = det2(project(s, e.bracket[1]).corner(3), project(s, e.bracket[1]).corner(4))
        assert d_lo * d_hi < 0

    @pytest.mark.parametrize("n", [200, 201])
    def test_odd_and_even_sampling(self, n):
        # n = 201 puts a sample exactly on x = 0
        ev = scan(edge_family(), -0.5, 0.5, n=n)
        assert len(ev) == 1 and ev[0].kind is EventKind.EDGE_CROSSING

    def test_pi4_reversal(self):
        s = edge_family()
        (e,) = scan(s, -0.5, 0.5)
        left = filippov_codim1(s, 4, e.x_star - 1e-3).vector
        right = filippov_codim1(s, 4, e.x_star + 1e-3).vector
        # on Pi_4 (z = 0) the tangential components are x and y; y carries the reversal
        assert left[1] * right[1] < 0

    def test_generic_single_edge(self):
        s = _sym_lifted()
        ev = scan(s, 0.0, 2.0)
        assert [e.kind for e in ev] == [EventKind.EDGE_CROSSING]
        (e,) = ev
        assert e.x_star == pytest.approx(1.0, abs=1e-8)
        assert e.diagnostics["edges"] == [1]
        assert abs(e.diagnostics["count_left"] - e.diagnostics["count_right"]) == 1
        left = filippov_codim1(s, 1, e.x_star - 1e-3).vector
        right = filippov_codim1(s, 1, e.x_star + 1e-3).vector
        assert left[2] * right[2] < 0

    def test_corner_sweep_is_not_an_edge(self):
        # det(X3, X4) changes sign while the segment stays away from the origin
        fs = (
            FieldTriple.const(1, 2, 2),
            FieldTriple.const(1, -2, 2),
            FieldTriple(P((1,)), P((3,)), P((0, 1))),
            FieldTriple.const(1, 3, 1),
        )
        s = PwsSystem(fs, (-0.5, 0.5))
        assert not [e for e in scan(s, -0.5, 0.5) if e.kind is EventKind.EDGE_CROSSING]


class TestScanContract:
    def test_constant_is_empty(self):
        assert scan(PwsSystem.constant(S_SYM), -1, 1) == []

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            scan(f_shift(), -0.3, 0.5, n=2)
        with pytest.raises(PreconditionError):
            scan(f_shift(), 0.5, -0.3)

    def test_sorted_and_json(self):
        ev = scan(f_shift(alpha=(1, 1, -1, -1)), -0.3, 1.0)
        xs = [e.x_star for e in ev]
        assert xs == sorted(xs)
        blob = json.dumps([e.to_json() for e in ev])
        for item in json.loads(blob):
            assert set(item) == {"kind", "x_star", "bracket", "diagnostics"}

    def test_degenerate_sample_reported(self):
        # all four corners coincide at x = 0
        fs = tuple(FieldTriple(P((1,)), P((1, k)), P((1, -k))) for k in (1.0, 2.0, 3.0, 4.0))
        ev = scan(PwsSystem(fs, (-1, 1)), -1, 1, n=201)
        assert any(e.kind is EventKind.DEGENERACY for e in ev)


class TestCanard:
    def test_flagged(self):
        s = f_shift(alpha=(1, 1, -1, -1))
        ev = scan(s, -0.3, 0.5)
        kinds = [e.kind for e in ev]
        assert kinds == [EventKind.PARABOLIC_TANGENCY, EventKind.CANARD_CANDIDATE]
        chk = canard_candidate(s, ev[0])
        assert chk.a_rank_one and chk.b_speed_transversal and chk.c_unfolding
        assert chk.x_star == pytest.approx(-0.25, abs=1e-8)
        assert abs(chk.speed) <= 1e-12
        assert chk.d_delta_dx == pytest.approx(64.0, rel=1e-6)

    def test_generic_fold_not_flagged(self):
        s = f_shift()
        (e,) = scan(s, -0.3, 0.5)
        chk = canard_candidate(s, e)
        assert chk.speed == pytest.approx(1.0)
        assert not chk.b_speed_transversal and not chk.flagged

    def test_needs_tangency(self):
        s = edge_family()
        e = BifurcationEvent(0.0, EventKind.EDGE_CROSSING, (-1e-9, 1e-9))
        with pytest.raises(PreconditionError):
            canard_candidate(s, e)


class TestEquator:
    def _q1(self, b, g):
        return corners([(b, g), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0)])

    def test_two_equilibria(self):
        d = equator_equilibria(self._q1(-1.0, -1.0))[0]
        assert [(r.rho, r.stability) for r in d.roots] == [(0.0, "stable"), (1.0, "unstable")]

    def test_positivity(self):
        d = equator_equilibria(self._q1(-1.0, 1.0))[0]
        assert [r.rho for r in d.roots] == [0.0]

    def test_nonhyperbolic(self):
        d = equator_equilibria(self._q1(0.0, 1.0))[0]
        assert d.roots[0].stability == "nonhyperbolic"

    def test_all_quadrants(self):
        ds = equator_equilibria(corners(S_SYM))
        assert [d.quadrant for d in ds] == [1, 2, 3, 4]
        # S_sym points inward everywhere, so the reflected quadrants all look like quadrant 1
        assert len({tuple((r.rho, r.stability) for r in d.roots) for d in ds}) == 1

    def test_linearization(self):
        # derivative of rho (b - rho g) at each root matches the reported value
        b, g = 0.7, 1.4
        d = equator_equilibria(self._q1(b, g))[0]
        for r in d.roots:
            assert r.linearization == pytest.approx(b - 2 * r.rho * g)
        np.testing.assert_allclose([r.rho for r in d.roots], [0.0, 0.5])
