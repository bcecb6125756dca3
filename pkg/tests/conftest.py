import numpy as np
import pytest

import hodgedec as hd


@pytest.fixture(scope="session")
def discretize():
    """Cached factory: (a, rho_max, h) -> (mesh, complex, stars)."""
    cache = {}

    def build(a, rho_max, h):
        key = (a, rho_max, h)
        if key not in cache:
            mesh = hd.ball_mesh(a, rho_max, h)
            cx = hd.build_complex(mesh)
            stars = hd.assemble_stars(mesh, cx)
            cache[key] = (mesh, cx, stars)
        return cache[key]

    return build


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def make_triangle_mesh():
    """Single flat unit equilateral triangle."""
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
    return hd.TriMesh(verts, np.array([[0, 1, 2]]), 0.0, {"edge_length": 1.0})


def make_rhombus_mesh():
    """Two flat unit equilateral triangles glued along edge (0, 1)."""
    s = np.sqrt(3) / 2
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, s], [0.5, -s]])
    tris = np.array([[0, 1, 2], [0, 3, 1]])
    return hd.TriMesh(verts, tris, 0.0, {"edge_length": 1.0})


def make_lattice_mesh(rows=5, cols=5, step=0.25):
    """Flat offset-row triangular lattice (near-equilateral grid patch)."""
    verts = []
    for r in range(rows):
        for c in range(cols):
            verts.append((c * step + (r % 2) * step / 2, r * step * np.sqrt(3) / 2))
    tris = []
    for r in range(rows - 1):
        for c in range(cols - 1):
            i = r * cols + c
            j = i + 1
            k = i + cols
            m = k + 1
            if r % 2 == 0:
                tris += [[i, j, k], [j, m, k]]
            else:
                tris += [[i, j, m], [i, m, k]]
    return hd.TriMesh(np.array(verts), np.array(tris), 0.0, {"edge_length": step})
