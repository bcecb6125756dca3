import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import hodgedec as hd
from hodgedec.errors import ConfigError, DomainError
from hodgedec.geometry import mesh_edge_lengths

# Frozen oracle outputs (see the oracle functions below, evaluated at high
# precision during development).
LN3 = 1.0986122886681098
EQUILATERAL_HYP_AREA = 0.38519903705571113  # sides (1,1,1) at a=1
FLAT_EQUILATERAL_AREA = 0.4330127018922193
BALL_AREA_RHO3 = 56.973800622341584  # 2*pi*(cosh 3 - 1)


def radial_integral_oracle(r, n=20000):
    """Independent oracle: midpoint quadrature of the radial metric 2/(1-s^2)."""
    s = (np.arange(n) + 0.5) * (r / n)
    return float(np.sum(2.0 / (1.0 - s * s)) * (r / n))


def geodesic_tangent(p, q):
    """Euclidean unit tangent at p of the model geodesic arc p -> q."""
    cross = np.imag(np.conj(p) * q)
    if abs(cross) < 1e-14 * max(1.0, abs(p) * abs(q)):
        t = q - p
        return t / abs(t)
    A = np.array([[p.real, p.imag], [q.real, q.imag]])
    b = np.array([(1 + abs(p) ** 2) / 2, (1 + abs(q) ** 2) / 2])
    cx, cy = np.linalg.solve(A, b)
    t = 1j * (p - complex(cx, cy))
    t /= abs(t)
    if t.real * (q - p).real + t.imag * (q - p).imag < 0:
        t = -t
    return t


def angle_defect_oracle(pts):
    """Area oracle from pure circle geometry: angles between geodesic arcs
    are Euclidean angles (the model is conformal), area = angle defect."""
    total = 0.0
    for i in range(3):
        p, q, r = pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3]
        t1, t2 = geodesic_tangent(p, q), geodesic_tangent(p, r)
        total += math.acos(np.clip(t1.real * t2.real + t1.imag * t2.imag, -1, 1))
    return math.pi - total


class TestDistance:
    def test_coincident(self):
        assert hd.distance((0, 0), (0, 0), 1.0) == 0.0

    def test_flat_3_4_5(self):
        assert hd.distance((0, 0), (0.3, 0.4), 0.0) == pytest.approx(0.5, rel=1e-15)

    def test_radial_log3(self):
        assert radial_integral_oracle(0.5) == pytest.approx(LN3, rel=1e-7)
        assert hd.distance((0, 0), (0.5, 0), 1.0) == pytest.approx(LN3, rel=1e-12)

    def test_curvature_rescales_lengths(self):
        d1 = hd.distance((0.1, 0.2), (-0.3, 0.4), 1.0)
        d2 = hd.distance((0.1, 0.2), (-0.3, 0.4), 2.0)
        assert d2 == pytest.approx(d1 / 2, rel=1e-12)

    def test_outside_disk_rejected(self):
        with pytest.raises(DomainError):
            hd.distance((0, 0), (1.0, 0.0), 1.0)
        # same point is fine on the plane
        assert hd.distance((0, 0), (1.0, 0.0), 0.0) == 1.0

    @settings(max_examples=120, deadline=None)
    @given(
        data=st.tuples(
            *[st.floats(-0.65, 0.65) for _ in range(6)],
        ),
        a=st.sampled_from([0.0, 0.5, 1.0, 2.0]),
    )
    def test_symmetry_and_triangle_inequality(self, data, a):
        p, q, r = (data[0], data[1]), (data[2], data[3]), (data[4], data[5])
        dpq = hd.distance(p, q, a)
        assert dpq == pytest.approx(hd.distance(q, p, a), abs=1e-12)
        assert dpq <= hd.distance(p, r, a) + hd.distance(r, q, a) + 1e-9


class TestTriangleArea:
    def test_flat_equilateral(self):
        assert hd.triangle_area(1, 1, 1, 0.0) == pytest.approx(FLAT_EQUILATERAL_AREA, rel=1e-14)

    def test_degenerate(self):
        assert hd.triangle_area(1, 1, 2, 0.0) == 0.0

    def test_hyperbolic_equilateral_vs_model_oracle(self):
        # place the equilateral triangle of side 1 in model coordinates
        delta = math.tanh(0.5)
        d2 = delta * delta
        u = ((3 - d2) - math.sqrt((3 - d2) ** 2 - 4 * d2 * d2)) / (2 * d2)
        r0 = math.sqrt(u)
        pts = [r0 * np.exp(2j * math.pi * k / 3) for k in range(3)]
        side = hd.distance((pts[0].real, pts[0].imag), (pts[1].real, pts[1].imag), 1.0)
        assert side == pytest.approx(1.0, rel=1e-12)
        assert angle_defect_oracle(pts) == pytest.approx(EQUILATERAL_HYP_AREA, rel=1e-12)
        assert hd.triangle_area(1, 1, 1, 1.0) == pytest.approx(EQUILATERAL_HYP_AREA, rel=1e-12)

    def test_violated_inequality(self):
        with pytest.raises(DomainError):
            hd.triangle_area(1, 1, 2.5, 0.0)
        with pytest.raises(DomainError):
            hd.triangle_area(0.0, 1, 1, 1.0)

    @settings(max_examples=60, deadline=None)
    @given(
        l1=st.floats(2e-4, 1e-3),
        l2=st.floats(2e-4, 1e-3),
        frac=st.floats(0.25, 0.95),
    )
    def test_flat_limit_for_tiny_triangles(self, l1, l2, frac):
        # third side strictly inside the admissible interval
        lo, hi = abs(l1 - l2), l1 + l2
        l3 = lo + frac * (hi - lo)
        if l3 <= 1e-7:
            return
        flat = hd.triangle_area(l1, l2, l3, 0.0)
        hyp = hd.triangle_area(l1, l2, l3, 1.0)
        if flat > 1e-12:
            assert hyp == pytest.approx(flat, rel=1e-5)


class TestBallMesh:
    def test_single_ring_example(self):
        mesh = hd.ball_mesh(0.0, 0.1, 0.1)
        assert mesh.num_vertices == 1 + round(2 * math.pi)  # center + 6
        v, t = mesh.vertices, mesh.triangles
        cross = (v[t[:, 1], 0] - v[t[:, 0], 0]) * (v[t[:, 2], 1] - v[t[:, 0], 1]) - (
            v[t[:, 1], 1] - v[t[:, 0], 1]
        ) * (v[t[:, 2], 0] - v[t[:, 0], 0])
        assert np.all(cross > 0)

    def test_ring_counts_hyperbolic(self):
        mesh = hd.ball_mesh(1.0, 0.4, 0.2)
        m1 = round(2 * math.pi * math.sinh(0.2) / 0.2)
        m2 = round(2 * math.pi * math.sinh(0.4) / 0.2)
        assert mesh.num_vertices == 1 + m1 + m2

    def test_hyperbolic_ball_area(self, discretize):
        mesh, _, _ = discretize(1.0, 3.0, 0.1)
        assert hd.mesh_area(mesh) == pytest.approx(BALL_AREA_RHO3, rel=0.02)

    def test_flat_ball_area(self, discretize):
        mesh, _, _ = discretize(0.0, 1.0, 0.1)
        assert hd.mesh_area(mesh) == pytest.approx(math.pi, rel=0.02)

    def test_edge_lengths_in_band(self, discretize):
        for (a, rho, h) in [(0.0, 1.0, 0.2), (1.0, 1.0, 0.2), (1.0, 2.0, 0.1)]:
            mesh, _, _ = discretize(a, rho, h)
            _, lengths = mesh_edge_lengths(mesh)
            assert lengths.min() >= h / 2 * (1 - 1e-9)
            assert lengths.max() <= 2 * h * (1 + 1e-9)

    def test_determinism(self):
        m1 = hd.ball_mesh(1.0, 1.2, 0.15)
        m2 = hd.ball_mesh(1.0, 1.2, 0.15)
        assert np.array_equal(m1.vertices, m2.vertices)
        assert np.array_equal(m1.triangles, m2.triangles)

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            hd.ball_mesh(1.0, -1.0, 0.1)
        with pytest.raises(ConfigError):
            hd.ball_mesh(1.0, 0.5, 0.8)
        with pytest.raises(DomainError):
            hd.ball_mesh(-1.0, 1.0, 0.1)

    def test_realized_radius_recorded(self):
        mesh = hd.ball_mesh(0.0, 1.05, 0.2)  # rounds to 5 rings
        assert mesh.provenance["rings"] == 5
        assert mesh.provenance["realized_radius"] == pytest.approx(1.0)


class TestCutoff:
    def test_profile_bounds(self):
        t = np.linspace(0, 3, 301)
        phi = hd.cutoff_profile(t)
        assert np.all((phi >= 0) & (phi <= 1))
        assert np.all(phi[t <= 1.0] == 1.0)
        assert np.all(phi[t >= 2.0] == 0.0)
        assert hd.cutoff_profile(1.5) == pytest.approx(0.5, abs=1e-15)

    def test_profile_slope_below_two(self):
        t = np.linspace(0, 3, 20001)
        phi = hd.cutoff_profile(t)
        slopes = np.abs(np.diff(phi) / np.diff(t))
        assert slopes.max() <= 1.5 + 1e-6

    def test_vertex_values(self, discretize):
        mesh, _, _ = discretize(1.0, 3.0, 0.2)
        R = 1.2
        phi = hd.cutoff_cochain(mesh, R)
        rho = hd.radial_distance(mesh.vertices, 1.0)
        assert np.all(phi.values[rho <= R] == 1.0)
        assert np.all(phi.values[rho >= 2 * R] == 0.0)

    def test_requires_scale_above_one(self, discretize):
        mesh, _, _ = discretize(1.0, 3.0, 0.2)
        with pytest.raises(DomainError):
            hd.cutoff_cochain(mesh, 1.0)

    def test_per_edge_slope_bound(self, discretize):
        # discrete form of the gradient bound |grad phi_R| <= 2/R, h <= R/10
        mesh, cx, stars = discretize(1.0, 3.0, 0.1)
        for R in (1.2, 1.5):
            phi = hd.cutoff_cochain(mesh, R).values
            slopes = np.abs(phi[cx.edges[:, 1]] - phi[cx.edges[:, 0]]) / stars.edge_lengths
            assert slopes.max() <= 2.0 / R + 1e-12
