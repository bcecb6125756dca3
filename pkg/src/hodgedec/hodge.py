"""Three-way splits of 1-cochains, harmonicity diagnostics, stream functions,
and the cutoff truncation experiment.

`decompose` minimizes |alpha - d beta - delta omega| in the chosen inner
product over potentials supported away from the boundary collar, through the
joint block Gram system; the remainder gamma is the discrete harmonic part.
`stream_function` constructively realizes co-closed fields as delta of an
interior 2-cochain by integrating over a dual spanning tree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import dec
from .dec import InnerProductSpace, SolveConfig, StarWeights
from .errors import ConfigError, DegreeError, DomainError, PreconditionError
from .geometry import TriMesh, cutoff_cochain, radial_distance
from .simplicial import Cochain, SimplicialComplex, apply_d

__all__ = [
    "HodgeSplit",
    "SplitDiagnostics",
    "HarmonicReport",
    "StreamResult",
    "decompose",
    "harmonic_diagnostics",
    "stream_function",
    "truncation_distance",
]


@dataclass
class SplitDiagnostics:
    space: str
    norm_alpha: float
    norm_exact: float  # |d beta|
    norm_coexact: float  # |delta omega|
    norm_gamma: float
    reconstruction_residual: float  # |alpha - d beta - delta omega - gamma| / |alpha|
    ortho_exact_coexact: float  # <d beta, delta omega> in the space
    ortho_exact_harmonic: float
    ortho_coexact_harmonic: float
    pythagoras_defect: float  # relative to |alpha|^2
    norm_d_gamma_l2: float
    norm_delta_gamma_l2: float
    cross_block_max: float  # largest Gram entry coupling the two potential blocks
    iterations: int
    solver_residual: float

    def orthogonality_defect(self) -> float:
        """Largest pairwise inner product relative to |alpha|^2."""
        scale = max(self.norm_alpha**2, np.finfo(float).tiny)
        return (
            max(
                abs(self.ortho_exact_coexact),
                abs(self.ortho_exact_harmonic),
                abs(self.ortho_coexact_harmonic),
            )
            / scale
        )


@dataclass
class HodgeSplit:
    """alpha = d beta + delta omega + gamma, potentials supported on interior simplices."""

    beta: Cochain
    omega: Cochain
    gamma: Cochain
    diagnostics: SplitDiagnostics


@dataclass
class HarmonicReport:
    degenerate: bool
    energy: float  # |d gamma|^2 + |delta gamma|^2 + c |gamma|^2
    curvature_constant: float
    norm_l2_sq: float
    bound_ratio: Optional[float]  # energy / (2 c |gamma|^2), None when c = 0
    d_residual: float  # |d gamma| / |gamma|
    delta_residual: float


@dataclass
class StreamResult:
    """Per-face stream values f with omega = f * Vol and delta omega = input."""

    f: np.ndarray
    omega: Cochain
    residual: float  # |delta omega - v| / |v| in L2
    path_defect: float  # worst closure mismatch on non-tree dual edges


def _interior_l2_norm(c: Cochain, cx: SimplicialComplex, stars: StarWeights) -> float:
    """L2 norm over interior simplices (the weak-derivative test region)."""
    w = stars.star(c.degree) * dec.interior_mask(cx, c.degree)
    return float(np.sqrt(np.dot(c.values, w * c.values)))


def _metric_matrix(
    space: InnerProductSpace, cx: SimplicialComplex, stars: StarWeights
) -> sp.csr_matrix:
    """Matrix M with <u, v>_space = u^T M v on degree-1 cochains.

    H1 derivative terms are tested on interior simplices, matching `dec.inner`.
    """
    s1 = sp.diags(stars.star1)
    if space.tag == "l2":
        return s1.tocsr()
    c = space.curvature_constant
    star2_int = stars.star2 * dec.interior_mask(cx, 2)
    star0_int = dec.interior_mask(cx, 0) / stars.star0
    curl_part = cx.d1.T @ sp.diags(star2_int) @ cx.d1
    div_part = s1 @ cx.d0 @ sp.diags(star0_int) @ cx.d0.T @ s1
    return ((1.0 + c) * s1 + curl_part + div_part).tocsr()


def decompose(
    alpha: Cochain,
    space: InnerProductSpace,
    mesh: TriMesh,
    cx: SimplicialComplex,
    stars: StarWeights,
    cfg: Optional[SolveConfig] = None,
) -> HodgeSplit:
    """Split a 1-cochain into exact, co-exact and harmonic parts.

    Solves the joint least-squares problem over interior potentials via the
    block normal equations, assembled sparsely and solved by preconditioned
    conjugate gradients; gamma is the remainder. All orthogonality and
    reconstruction diagnostics are recomputed from the returned components.
    """
    if alpha.degree != 1 or space.degree != 1:
        raise DegreeError("decompose works on degree-1 cochains")
    if cfg is None:
        cfg = SolveConfig()

    vi = np.flatnonzero(cx.interior_vertices)
    fi = np.flatnonzero(cx.interior_faces)
    if vi.size == 0 or fi.size == 0:
        raise ConfigError("degenerate mesh: no interior vertices or faces to carry potentials")

    P = cx.d0.tocsc()[:, vi].tocsr()
    delta2 = dec.codifferential_matrix(2, cx, stars)
    Q = delta2.tocsc()[:, fi].tocsr()

    M = _metric_matrix(space, cx, stars)
    MP = (M @ P).tocsc()
    MQ = (M @ Q).tocsc()
    # the analytic cross Gram P^T M Q vanishes identically (d after d is zero);
    # its assembled magnitude is reported as a mesh-quality / roundoff metric
    cross = P.T @ MQ
    cross_block_max = float(np.abs(cross.data).max()) if cross.nnz else 0.0

    # cancellation-aware absolute scale for the normal-equation residuals:
    # the assembled right-hand sides can be tiny relative to their ingredients
    # (e.g. for inputs already orthogonal to the ranges), and a purely
    # rhs-relative stop would then demand sub-roundoff accuracy
    abs_M = M.copy()
    abs_M.data = np.abs(abs_M.data)
    abs_alpha = np.abs(alpha.values)
    roundoff = 100.0 * np.finfo(float).eps
    floor_b = roundoff * float(np.linalg.norm(np.abs(P).T @ (abs_M @ abs_alpha)))
    floor_w = roundoff * float(np.linalg.norm(np.abs(Q).T @ (abs_M @ abs_alpha)))

    # the blocks decouple exactly, so the joint normal equations split in two;
    # the H1 solves warm-start from the far better conditioned L2 ones (both
    # metrics recover the same unique direct-sum split)
    x0_b = x0_w = None
    if space.tag == "h1":
        s1 = sp.diags(stars.star1).tocsr()
        l2_cfg = SolveConfig(min(1e-8, cfg.tolerance * 100), cfg.max_iterations, cfg.deterministic)
        x0_b = dec.solve_spd(
            (P.T @ s1 @ P).tocsr(), P.T @ (s1 @ alpha.values), l2_cfg, residual_floor=floor_b
        ).x
        x0_w = dec.solve_spd(
            (Q.T @ s1 @ Q).tocsr(), Q.T @ (s1 @ alpha.values), l2_cfg, residual_floor=floor_w
        ).x
    sol_b = dec.solve_spd(
        (P.T @ MP).tocsr(), P.T @ (M @ alpha.values), cfg, x0=x0_b, residual_floor=floor_b
    )
    sol_w = dec.solve_spd(
        (Q.T @ MQ).tocsr(), Q.T @ (M @ alpha.values), cfg, x0=x0_w, residual_floor=floor_w
    )
    beta = np.zeros(cx.num_vertices)
    beta[vi] = sol_b.x
    omega = np.zeros(cx.num_faces)
    omega[fi] = sol_w.x

    d_beta = Cochain(1, cx.d0 @ beta)
    delta_omega = Cochain(1, delta2 @ omega)
    gamma = Cochain(1, alpha.values - d_beta.values - delta_omega.values)

    norm_alpha = dec.norm(alpha, space, cx, stars)
    recon = Cochain(1, alpha.values - d_beta.values - delta_omega.values - gamma.values)
    scale = max(norm_alpha, np.finfo(float).tiny)

    norms_sq = [
        dec.inner(w, w, space, cx, stars) for w in (d_beta, delta_omega, gamma)
    ]
    diagnostics = SplitDiagnostics(
        space=space.tag,
        norm_alpha=norm_alpha,
        norm_exact=float(np.sqrt(max(norms_sq[0], 0.0))),
        norm_coexact=float(np.sqrt(max(norms_sq[1], 0.0))),
        norm_gamma=float(np.sqrt(max(norms_sq[2], 0.0))),
        reconstruction_residual=dec.norm(recon, space, cx, stars) / scale,
        ortho_exact_coexact=dec.inner(d_beta, delta_omega, space, cx, stars),
        ortho_exact_harmonic=dec.inner(d_beta, gamma, space, cx, stars),
        ortho_coexact_harmonic=dec.inner(delta_omega, gamma, space, cx, stars),
        pythagoras_defect=abs(norm_alpha**2 - sum(norms_sq)) / max(norm_alpha**2, np.finfo(float).tiny),
        norm_d_gamma_l2=_interior_l2_norm(apply_d(gamma, cx), cx, stars),
        norm_delta_gamma_l2=_interior_l2_norm(dec.codifferential(gamma, cx, stars), cx, stars),
        cross_block_max=cross_block_max,
        iterations=sol_b.iterations + sol_w.iterations,
        solver_residual=max(sol_b.residual, sol_w.residual),
    )
    return HodgeSplit(
        beta=Cochain(0, beta), omega=Cochain(2, omega), gamma=gamma, diagnostics=diagnostics
    )


def harmonic_diagnostics(
    gamma: Cochain,
    space: InnerProductSpace,
    cx: SimplicialComplex,
    stars: StarWeights,
) -> HarmonicReport:
    """Energy and closedness report for a candidate harmonic 1-cochain.

    The energy |d gamma|^2 + |delta gamma|^2 + c |gamma|^2 is the discrete
    gradient energy; for an exactly closed and co-closed input it reduces to
    c |gamma|^2, half of the 2 c |gamma|^2 ceiling. Closedness is tested on
    interior simplices (against compact supports), consistent with the H1
    pairing.
    """
    if gamma.degree != 1:
        raise DegreeError("harmonic diagnostics need a degree-1 cochain")
    c = space.curvature_constant
    l2_1 = InnerProductSpace("l2", 1, space.curvature)
    norm_sq = dec.inner(gamma, gamma, l2_1, cx, stars)
    if norm_sq == 0.0:
        return HarmonicReport(True, 0.0, c, 0.0, None, 0.0, 0.0)
    d_sq = _interior_l2_norm(apply_d(gamma, cx), cx, stars) ** 2
    s_sq = _interior_l2_norm(dec.codifferential(gamma, cx, stars), cx, stars) ** 2
    energy = d_sq + s_sq + c * norm_sq
    ratio = energy / (2.0 * c * norm_sq) if c > 0 else None
    return HarmonicReport(
        degenerate=False,
        energy=energy,
        curvature_constant=c,
        norm_l2_sq=norm_sq,
        bound_ratio=ratio,
        d_residual=float(np.sqrt(d_sq / norm_sq)),
        delta_residual=float(np.sqrt(s_sq / norm_sq)),
    )


def _coclosedness_residual(v: Cochain, cx: SimplicialComplex, stars: StarWeights):
    """Per-vertex relative defect of d0^T (star1 v) against its term magnitude."""
    w = stars.star1 * v.values
    resid = cx.d0.T @ w
    abs_d0 = cx.d0.copy()
    abs_d0.data = np.abs(abs_d0.data)
    scale = abs_d0.T @ np.abs(w)
    return resid, np.abs(resid) / np.maximum(scale, np.finfo(float).tiny)


def stream_function(
    v: Cochain,
    mesh: TriMesh,
    cx: SimplicialComplex,
    stars: StarWeights,
    tol: float = 1e-10,
) -> StreamResult:
    """Reconstruct a co-closed interior 1-cochain as delta of a 2-cochain.

    Integrates star1 * v over a breadth-first spanning tree of the dual graph
    rooted at the lowest-index boundary-adjacent face, so the stream values f
    vanish on faces touching the boundary; omega = f * area gives
    star2 omega = f and delta omega = v. Closure on the remaining dual edges
    is verified (path independence), as is the final reconstruction.
    """
    if v.degree != 1:
        raise DegreeError("stream function needs a degree-1 cochain")
    collar = ~cx.interior_edges
    vmax = float(np.abs(v.values).max()) if v.values.size else 0.0
    if vmax == 0.0:
        f = np.zeros(cx.num_faces)
        return StreamResult(f, Cochain(2, f.copy()), 0.0, 0.0)
    if float(np.abs(v.values[collar]).max(initial=0.0)) > tol * vmax:
        raise PreconditionError("input does not vanish on the boundary collar")
    resid, rel = _coclosedness_residual(v, cx, stars)
    rel_int = rel[cx.interior_vertices]
    if rel_int.size and float(rel_int.max()) > tol:
        worst_local = int(np.argmax(rel_int))
        worst = int(np.flatnonzero(cx.interior_vertices)[worst_local])
        raise PreconditionError(
            f"input not co-closed: vertex {worst} has relative defect "
            f"{float(rel_int[worst_local]):.3e} (divergence {float(resid[worst]):.3e})"
        )

    w = stars.star1 * v.values
    # dual edges: interior primal edges and their two incident faces with signs
    face_of_edge = [[] for _ in range(cx.num_edges)]
    d1_coo = cx.d1.tocoo()
    for fidx, eidx, s in zip(d1_coo.row, d1_coo.col, d1_coo.data):
        face_of_edge[eidx].append((int(fidx), int(s)))

    boundary_adjacent = np.flatnonzero(~cx.interior_faces)
    root = int(boundary_adjacent[0]) if boundary_adjacent.size else 0

    f = np.full(cx.num_faces, np.nan)
    f[root] = 0.0
    queue = deque([root])
    # adjacency keyed by face for the BFS
    incident_edges = [[] for _ in range(cx.num_faces)]
    for eidx, pairs in enumerate(face_of_edge):
        if len(pairs) == 2:
            (fa, sa), (fb, sb) = pairs
            incident_edges[fa].append((eidx, fb, sa, sb))
            incident_edges[fb].append((eidx, fa, sb, sa))
    while queue:
        cur = queue.popleft()
        for eidx, other, s_cur, s_other in incident_edges[cur]:
            if np.isnan(f[other]):
                # s_cur f[cur] + s_other f[other] = w[e]
                f[other] = (w[eidx] - s_cur * f[cur]) * s_other
                queue.append(other)
    if np.any(np.isnan(f)):
        raise PreconditionError("dual graph is disconnected; cannot integrate stream values")
    f -= f[root]

    closure = cx.d1.T @ f - w
    defect_scale = max(vmax * float(stars.star1.max()), float(np.abs(f).max()), 1.0)
    path_defect = float(np.abs(closure).max()) / defect_scale
    if path_defect > 100 * tol:
        raise PreconditionError(
            f"path-dependent dual integration: closure defect {path_defect:.3e}"
        )

    omega = Cochain(2, f * stars.face_areas)
    delta_omega = dec.codifferential(omega, cx, stars)
    diff = delta_omega.values - v.values
    l2 = InnerProductSpace("l2", 1, stars.curvature)
    res = dec.norm(Cochain(1, diff), l2, cx, stars) / dec.norm(v, l2, cx, stars)
    return StreamResult(f, omega, float(res), path_defect)


def truncation_distance(
    gamma: Cochain,
    R: float,
    space: InnerProductSpace,
    mesh: TriMesh,
    cx: SimplicialComplex,
    stars: StarWeights,
) -> float:
    """Distance |gamma - phi_R gamma| in the chosen norm.

    phi_R multiplies each edge value by the mean of the cutoff at the edge
    endpoints. Requires the support scale 2R to stay inside the meshed ball.
    """
    if gamma.degree != 1:
        raise DegreeError("truncation distance works on degree-1 cochains")
    if R <= 1.0:
        raise DomainError("cutoff scale R must exceed 1")
    rho_max = float(radial_distance(mesh.vertices, mesh.curvature).max())
    if 2.0 * R > rho_max * (1.0 + 1e-12):
        raise DomainError(
            f"cutoff support 2R = {2 * R} exceeds the meshed radius {rho_max:.6g}"
        )
    phi = cutoff_cochain(mesh, R).values
    edge_factor = 0.5 * (phi[cx.edges[:, 0]] + phi[cx.edges[:, 1]])
    diff = Cochain(1, gamma.values - edge_factor * gamma.values)
    return dec.norm(diff, space, cx, stars)
