"""Ghost-cell boundary conditions and the finite-volume residual.

The residual of cell ``(i, j)`` is the negative volume-scaled sum of
length-weighted face fluxes,

``R_ij = -(1/vol_ij) * (L F|_{i+1} - L F|_i + L F|_{j+1} - L F|_j)``,

with every face flux evaluated along the fixed ``+i``/``+j`` normal
orientation, so each face contributes to its two neighbours with opposite
signs and the scheme is conservative by construction.

Reconstruction stencils reach two cells to each side, so the interior field
is embedded in an extended array with two ghost layers per side.  Corner
ghosts are never read by the axis-aligned stencils; they are filled with
copies of adjacent ghosts only to keep the array finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StateError
from .mesh import GridMetrics
from .numerics import ReconstructionScheme, reconstruct_pair, riemann_flux
from .state import FlowField, GasModel, cons_to_prim, is_physical_prim, prim_to_cons, normal_shock_states

__all__ = [
    "BC_KINDS",
    "SIDES",
    "BoundaryCondition",
    "BoundaryConditionSet",
    "GhostField",
    "normal_shock_bcs",
    "fill_ghosts",
    "ghost_dependency",
    "face_reconstruction",
    "residual",
]

BC_KINDS = ("supersonic_inflow", "zero_gradient", "fixed_pressure_outflow", "slip_wall", "periodic")
SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class BoundaryCondition:
    """One side's boundary treatment.

    ``state`` is the frozen conservative inflow state (supersonic_inflow
    only); ``pressure`` the imposed exit pressure (fixed_pressure_outflow
    only).
    """

    kind: str
    state: np.ndarray | None = None
    pressure: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in BC_KINDS:
            raise StateError(f"unknown boundary kind {self.kind!r}; choose one of {BC_KINDS}")
        if self.kind == "supersonic_inflow":
            if self.state is None:
                raise StateError("supersonic_inflow requires a conservative state")
            state = np.asarray(self.state, dtype=float)
            if state.shape != (4,):
                raise StateError(f"inflow state must have shape (4,), got {state.shape}")
            if not bool(is_physical_prim(cons_to_prim(state, GasModel()))):
                # gamma only affects the pressure sign through a positive factor
                raise StateError("inflow state has non-positive density or pressure")
            object.__setattr__(self, "state", state)
        elif self.state is not None:
            raise StateError(f"boundary kind {self.kind!r} takes no state")
        if self.kind == "fixed_pressure_outflow":
            if self.pressure is None or not (np.isfinite(self.pressure) and self.pressure > 0.0):
                raise StateError(f"fixed_pressure_outflow requires a positive pressure, got {self.pressure}")
        elif self.pressure is not None:
            raise StateError(f"boundary kind {self.kind!r} takes no pressure")

    @classmethod
    def supersonic_inflow(cls, state: np.ndarray) -> "BoundaryCondition":
        return cls(kind="supersonic_inflow", state=np.asarray(state, dtype=float))

    @classmethod
    def zero_gradient(cls) -> "BoundaryCondition":
        return cls(kind="zero_gradient")

    @classmethod
    def fixed_pressure_outflow(cls, pressure: float) -> "BoundaryCondition":
        return cls(kind="fixed_pressure_outflow", pressure=float(pressure))

    @classmethod
    def slip_wall(cls) -> "BoundaryCondition":
        return cls(kind="slip_wall")

    @classmethod
    def periodic(cls) -> "BoundaryCondition":
        return cls(kind="periodic")


@dataclass(frozen=True)
class BoundaryConditionSet:
    """Boundary conditions for the four sides of the structured grid.

    Periodicity couples opposite sides, so either both members of a pair are
    periodic or neither is.
    """

    left: BoundaryCondition
    right: BoundaryCondition
    bottom: BoundaryCondition
    top: BoundaryCondition

    def __post_init__(self) -> None:
        for a, b in (("left", "right"), ("bottom", "top")):
            ka = getattr(self, a).kind == "periodic"
            kb = getattr(self, b).kind == "periodic"
            if ka != kb:
                raise StateError(f"periodic boundaries must pair up: {a}/{b} disagree")

    def side(self, name: str) -> BoundaryCondition:
        return getattr(self, name)


def normal_shock_bcs(mach: float, gas: GasModel = GasModel()) -> BoundaryConditionSet:
    """Default boundaries for the normal-shock problem.

    Supersonic inflow frozen at the upstream state on the left, imposed
    downstream pressure on the right, periodic top/bottom.
    """
    up_prim, down_prim = normal_shock_states(mach, gas)
    return BoundaryConditionSet(
        left=BoundaryCondition.supersonic_inflow(prim_to_cons(up_prim, gas)),
        right=BoundaryCondition.fixed_pressure_outflow(down_prim[3]),
        bottom=BoundaryCondition.periodic(),
        top=BoundaryCondition.periodic(),
    )


@dataclass
class GhostField:
    """Interior field embedded in a two-layer ghost frame.

    ``ext`` has shape ``(ni + 4, nj + 4, 4)``; interior cell ``(i, j)`` sits
    at ``ext[i + 2, j + 2]``.
    """

    ext: np.ndarray
    ni: int
    nj: int

    @property
    def interior(self) -> np.ndarray:
        return self.ext[2:-2, 2:-2]


def _mirror_momentum(cells: np.ndarray, normal: np.ndarray) -> np.ndarray:
    """Reflect cell momentum about a wall with unit normal ``normal``.

    Density and total energy are unchanged: the reflection preserves kinetic
    energy exactly.
    """
    out = cells.copy()
    nx, ny = normal[..., 0], normal[..., 1]
    mn = cells[..., 1] * nx + cells[..., 2] * ny
    out[..., 1] = cells[..., 1] - 2.0 * mn * nx
    out[..., 2] = cells[..., 2] - 2.0 * mn * ny
    return out


def _exit_pressure_state(cells: np.ndarray, pressure: float, gas: GasModel) -> np.ndarray:
    prim = cons_to_prim(cells, gas)
    prim = prim.copy()
    prim[..., 3] = pressure
    return prim_to_cons(prim, gas)


def _side_ghosts(q: np.ndarray, bc: BoundaryCondition, wall_normal, gas: GasModel):
    """Ghost layers (adjacent, outer) for one side.

    ``q`` must be ordered with the boundary-normal axis first and the
    boundary-adjacent interior cell at index 0; the wrap cells for periodic
    sides are at indices -1 and -2.
    """
    if bc.kind == "supersonic_inflow":
        layer = np.broadcast_to(bc.state, q.shape[1:]).copy()
        return layer, layer.copy()
    if bc.kind == "zero_gradient":
        return q[0].copy(), q[0].copy()
    if bc.kind == "fixed_pressure_outflow":
        layer = _exit_pressure_state(q[0], bc.pressure, gas)
        return layer, layer.copy()
    if bc.kind == "slip_wall":
        return _mirror_momentum(q[0], wall_normal), _mirror_momentum(q[1], wall_normal)
    if bc.kind == "periodic":
        n = q.shape[0]
        return q[(n - 1) % n].copy(), q[(n - 2) % n].copy()
    raise StateError(f"unknown boundary kind {bc.kind!r}")


def fill_ghosts(field: FlowField, bc: BoundaryConditionSet, metrics: GridMetrics, gas: GasModel) -> GhostField:
    """Populate the two ghost layers on all four sides.

    Slip walls mirror layer ``k`` from interior cell ``k`` about the local
    boundary-face normal; zero-gradient and fixed-pressure sides replicate
    the adjacent interior cell (the latter with its pressure replaced);
    periodic sides wrap.
    """
    ni, nj = field.ni, field.nj
    if metrics.ni != ni or metrics.nj != nj:
        raise StateError(f"metrics are {metrics.ni} x {metrics.nj} but field is {ni} x {nj}")
    q = field.q
    ext = np.empty((ni + 4, nj + 4, 4))
    ext[2:-2, 2:-2] = q

    adj, outer = _side_ghosts(q, bc.left, metrics.iface_normal[0], gas)
    ext[1, 2:-2], ext[0, 2:-2] = adj, outer
    adj, outer = _side_ghosts(q[::-1], bc.right, metrics.iface_normal[ni], gas)
    ext[ni + 2, 2:-2], ext[ni + 3, 2:-2] = adj, outer
    adj, outer = _side_ghosts(q.transpose(1, 0, 2), bc.bottom, metrics.jface_normal[:, 0], gas)
    ext[2:-2, 1], ext[2:-2, 0] = adj, outer
    adj, outer = _side_ghosts(q.transpose(1, 0, 2)[::-1], bc.top, metrics.jface_normal[:, nj], gas)
    ext[2:-2, nj + 2], ext[2:-2, nj + 3] = adj, outer

    # Corner blocks are never read by the axis-aligned stencils; copy the
    # nearest j-ghost rows to keep every entry finite.
    ext[0:2, 0:2] = ext[0:2, 2:3]
    ext[0:2, -2:] = ext[0:2, -3:-2]
    ext[-2:, 0:2] = ext[-2:, 2:3]
    ext[-2:, -2:] = ext[-2:, -3:-2]
    return GhostField(ext=ext, ni=ni, nj=nj)


def _fixed_pressure_jacobian(cells: np.ndarray, pressure: float, gas: GasModel, delta: float) -> np.ndarray:
    """Central-difference Jacobian of the exit-pressure ghost map."""
    n = cells.shape[0]
    jac = np.empty((n, 4, 4))
    for c in range(4):
        e = np.zeros(4)
        e[c] = delta
        plus = _exit_pressure_state(cells + e, pressure, gas)
        minus = _exit_pressure_state(cells - e, pressure, gas)
        jac[:, :, c] = (plus - minus) / (2.0 * delta)
    return jac


def _mirror_jacobian(normal: np.ndarray) -> np.ndarray:
    """Exact Jacobian of the (linear) slip-wall reflection."""
    n = normal.shape[0]
    jac = np.zeros((n, 4, 4))
    nx, ny = normal[:, 0], normal[:, 1]
    jac[:, 0, 0] = 1.0
    jac[:, 3, 3] = 1.0
    jac[:, 1, 1] = 1.0 - 2.0 * nx * nx
    jac[:, 1, 2] = -2.0 * nx * ny
    jac[:, 2, 1] = -2.0 * nx * ny
    jac[:, 2, 2] = 1.0 - 2.0 * ny * ny
    return jac


def _side_dependency(dep_v, jac_v, q_v, block_v, bc_side, wall_normals, gas: GasModel, delta: float):
    """Fill ghost dependencies for one side through axis-normalized views.

    All views put the boundary-normal axis first with the adjacent ghost at
    index 1 and the outer ghost at index 0 of ``dep_v``/``jac_v``, while
    ``q_v``/``block_v`` hold interior data with the boundary-adjacent cell at
    index 0 (so periodic wrap targets sit at indices -1 and -2).
    """
    if bc_side.kind == "supersonic_inflow":
        return  # frozen state: no dependency on the unknowns
    m = block_v.shape[1]
    eye = np.broadcast_to(np.eye(4), (m, 4, 4))
    if bc_side.kind == "zero_gradient":
        dep_v[0] = dep_v[1] = block_v[0]
        jac_v[0] = jac_v[1] = eye
    elif bc_side.kind == "fixed_pressure_outflow":
        jmap = _fixed_pressure_jacobian(q_v[0], bc_side.pressure, gas, delta)
        dep_v[0] = dep_v[1] = block_v[0]
        jac_v[0] = jac_v[1] = jmap
    elif bc_side.kind == "slip_wall":
        jmap = _mirror_jacobian(wall_normals)
        dep_v[1], jac_v[1] = block_v[0], jmap
        dep_v[0], jac_v[0] = block_v[1], jmap
    elif bc_side.kind == "periodic":
        n = block_v.shape[0]
        dep_v[1], jac_v[1] = block_v[(n - 1) % n], eye
        dep_v[0], jac_v[0] = block_v[(n - 2) % n], eye


def ghost_dependency(
    base: FlowField,
    bc: BoundaryConditionSet,
    metrics: GridMetrics,
    gas: GasModel,
    delta: float = 1.0e-7,
):
    """Linearize every extended cell with respect to the interior unknowns.

    Returns ``(dep, jac)`` where ``dep`` maps each extended cell to the flat
    interior cell index it depends on (``-1`` for frozen inflow ghosts and
    unused corners) and ``jac`` holds the 4x4 derivative of the extended
    cell's state with respect to that interior cell.  Interior and periodic
    cells carry exact identities and slip walls their exact reflection;
    the (nonlinear) exit-pressure map is differenced centrally with step
    ``delta``.
    """
    ni, nj = base.ni, base.nj
    q = base.q
    dep = np.full((ni + 4, nj + 4), -1, dtype=np.int64)
    jac = np.zeros((ni + 4, nj + 4, 4, 4))

    ii, jj = np.meshgrid(np.arange(ni), np.arange(nj), indexing="ij")
    block = jj * ni + ii  # i-fastest flat cell index
    dep[2:-2, 2:-2] = block
    jac[2:-2, 2:-2] = np.eye(4)

    jac_i = jac[:, 2:-2]
    jac_j = jac[2:-2, :].transpose(1, 0, 2, 3)
    _side_dependency(
        dep[:, 2:-2], jac_i, q, block,
        bc.left, np.ascontiguousarray(metrics.iface_normal[0]), gas, delta,
    )
    _side_dependency(
        dep[::-1, 2:-2], jac_i[::-1], q[::-1], block[::-1],
        bc.right, np.ascontiguousarray(metrics.iface_normal[ni]), gas, delta,
    )
    _side_dependency(
        dep[2:-2, :].T, jac_j, q.transpose(1, 0, 2), block.T,
        bc.bottom, np.ascontiguousarray(metrics.jface_normal[:, 0]), gas, delta,
    )
    _side_dependency(
        dep[2:-2, ::-1].T, jac_j[::-1], q.transpose(1, 0, 2)[::-1], block.T[::-1],
        bc.top, np.ascontiguousarray(metrics.jface_normal[:, nj]), gas, delta,
    )
    return dep, jac


def _iface_stencils(ext: np.ndarray, ni: int, nj: int):
    """Four-cell stencils of all (ni+1, nj) i-faces, outermost-left first."""
    sl = ext[:, 2 : nj + 2]
    return sl[0 : ni + 1], sl[1 : ni + 2], sl[2 : ni + 3], sl[3 : ni + 4]


def _jface_stencils(ext: np.ndarray, ni: int, nj: int):
    """Four-cell stencils of all (ni, nj+1) j-faces, outermost-bottom first."""
    sl = ext[2 : ni + 2, :]
    return sl[:, 0 : nj + 1], sl[:, 1 : nj + 2], sl[:, 2 : nj + 3], sl[:, 3 : nj + 4]


def face_reconstruction(
    ghosts: GhostField,
    scheme: ReconstructionScheme,
    gas: GasModel,
    collect_fallback: bool = False,
):
    """Reconstructed left/right states on both face families.

    Returns ``(iface_lr, jface_lr, flags)`` where each ``*_lr`` is an
    ``(left, right)`` pair and ``flags`` (or ``None``) marks faces whose
    states needed the positivity fallback.
    """
    ni, nj = ghosts.ni, ghosts.nj
    flags = None
    fi = fj = None
    if collect_fallback:
        fi = np.zeros((ni + 1, nj), dtype=bool)
        fj = np.zeros((ni, nj + 1), dtype=bool)
        flags = {"iface": fi, "jface": fj}
    s0, s1, s2, s3 = _iface_stencils(ghosts.ext, ni, nj)
    iface_lr = reconstruct_pair(s0, s1, s2, s3, scheme, gas, fallback_flags=fi)
    t0, t1, t2, t3 = _jface_stencils(ghosts.ext, ni, nj)
    jface_lr = reconstruct_pair(t0, t1, t2, t3, scheme, gas, fallback_flags=fj)
    return iface_lr, jface_lr, flags


def residual(
    field: FlowField,
    ghosts: GhostField,
    metrics: GridMetrics,
    scheme: ReconstructionScheme,
    solver: str,
    gas: GasModel,
) -> np.ndarray:
    """Net volume-scaled flux balance ``dU/dt`` for every interior cell."""
    ni, nj = field.ni, field.nj
    if (ghosts.ni, ghosts.nj) != (ni, nj):
        raise StateError("ghost frame does not match the field")
    (il, ir), (jl, jr), _ = face_reconstruction(ghosts, scheme, gas)
    flux_i = riemann_flux(solver, il, ir, metrics.iface_normal, gas)
    flux_j = riemann_flux(solver, jl, jr, metrics.jface_normal, gas)
    lf_i = metrics.iface_len[..., None] * flux_i
    lf_j = metrics.jface_len[..., None] * flux_j
    net = (lf_i[1:] - lf_i[:-1]) + (lf_j[:, 1:] - lf_j[:, :-1])
    return -net / metrics.volume[..., None]
