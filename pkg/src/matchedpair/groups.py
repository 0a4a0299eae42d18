"""Matrix Lie groups, matched pairs of groups, and tangent-group laws.

Group elements are plain ``numpy`` matrices; jets are tuples ``(g, xi, ...)``
in left trivialization, with ``xi = g^-1 g'``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .algebra import LieAlgebra, MatchedPairTensors
from .kernel import DEFAULT_FD_STEP, fd_derivative, fd_second_derivative, uniform

MEMBERSHIP_TOL = 1e-8
DET_TOL = 1e-10


class NotInGroup(ValueError):
    """A matrix fails a membership or factorization precondition."""


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    """A matrix Lie group described by a real basis of its matrix algebra.

    ``hat``/``vee`` default to a least-squares fit against ``basis``; a closed
    form may be supplied. ``member`` returns a nonnegative defect that must be
    below ``MEMBERSHIP_TOL`` for group elements.
    """

    name: str
    basis: np.ndarray
    member: Callable[[np.ndarray], float]
    vee_fn: Callable | None = None
    project_fn: Callable | None = None
    metric: np.ndarray | None = None
    exp_fn: Callable | None = None

    def __post_init__(self):
        basis = np.array(self.basis)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        stacked = np.concatenate([basis.real.reshape(len(basis), -1),
                                  basis.imag.reshape(len(basis), -1)], axis=1).T
        object.__setattr__(self, "_stacked", stacked)
        object.__setattr__(self, "_pinv", np.linalg.pinv(stacked))
        c = np.zeros((self.dim,) * 3)
        for i in range(self.dim):
            for j in range(self.dim):
                c[i, j] = self.vee(basis[i] @ basis[j] - basis[j] @ basis[i])
        object.__setattr__(self, "algebra", LieAlgebra(c, self.metric, name=self.name))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.basis.shape[1]

    @property
    def dtype(self):
        return self.basis.dtype

    def identity(self) -> np.ndarray:
        return np.eye(self.size, dtype=self.dtype)

    def hat(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x, dtype=float), self.basis, axes=1)

    def vee(self, m) -> np.ndarray:
        if self.vee_fn is not None:
            return self.vee_fn(m)
        return self.vee_lstsq(m)

    def vee_lstsq(self, m) -> np.ndarray:
        m = np.asarray(m)
        flat = np.concatenate([m.real.ravel(), m.imag.ravel()])
        return self._pinv @ flat

    def mul(self, a, b) -> np.ndarray:
        return a @ b

    def inv(self, g) -> np.ndarray:
        return np.linalg.inv(g)

    def exp(self, x) -> np.ndarray:
        if self.exp_fn is not None:
            return self.exp_fn(x)
        return expm(self.hat(x))

    def Ad(self, g) -> np.ndarray:
        """Matrix of ``Ad_g`` on coordinates."""
        gi = self.inv(g)
        return np.column_stack([self.vee(g @ B @ gi) for B in self.basis])

    def Ad_star(self, g) -> np.ndarray:
        """Coadjoint matrix ``Ad*_g = (Ad_{g^-1})^T``."""
        return self.Ad(self.inv(g)).T

    def bracket(self, x, y) -> np.ndarray:
        return self.algebra.bracket(x, y)

    def membership_defect(self, g) -> float:
        return float(self.member(np.asarray(g)))

    def is_member(self, g, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.membership_defect(g) <= tol

    def project(self, g) -> np.ndarray:
        return g if self.project_fn is None else self.project_fn(g)

    def random(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return self.exp(scale * uniform(rng, self.dim))

    def random_vec(self, rng: np.random.Generator) -> np.ndarray:
        return uniform(rng, self.dim)


def _su2_member(g) -> float:
    return max(np.max(np.abs(g.conj().T @ g - np.eye(2))), abs(np.linalg.det(g) - 1.0))


def _su2_project(g) -> np.ndarray:
    u, _, vh = np.linalg.svd(g)
    q = u @ vh
    return q / np.sqrt(np.linalg.det(q))


def _k_member(g) -> float:
    d = np.diag(g)
    return max(abs(g[1, 0]), np.max(np.abs(d.imag)), float(np.any(d.real <= 0)),
               abs(np.linalg.det(g) - 1.0))


def _sl2_member(g) -> float:
    return abs(np.linalg.det(g) - 1.0)


def _unipotent_member(g) -> float:
    return max(np.max(np.abs(np.tril(g, -1))), np.max(np.abs(np.diag(g) - 1.0)),
               np.max(np.abs(np.imag(g))) if np.iscomplexobj(g) else 0.0)


def su2_basis() -> np.ndarray:
    """Half-Pauli basis ``e_j = -(i/2) sigma_j``, realizing ``[e1, e2] = e3``."""
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return np.array([-0.5j * s for s in (s1, s2, s3)])


_SU2_BASIS = su2_basis()


def k_basis() -> np.ndarray:
    """Basis of the upper-triangular algebra with ``[Y, Y~] = k x (Y x Y~)``."""
    f1 = np.array([[0, -1], [0, 0]], dtype=complex)
    f2 = np.array([[0, 1j], [0, 0]], dtype=complex)
    f3 = np.array([[-0.5, 0], [0, 0.5]], dtype=complex)
    return np.array([f1, f2, f3])


def su2_exp_closed(x) -> np.ndarray:
    """``exp(hat(x)) = cos(r/2) I + (2/r) sin(r/2) hat(x)`` with ``r = |x|``."""
    x = np.asarray(x, dtype=float)
    r = float(np.sqrt(x @ x))
    half = 0.5 * r
    # sin(r/2)/(r/2) via sinc, stable at r = 0
    s = np.sinc(half / np.pi)
    X = np.tensordot(x, _SU2_BASIS, axes=1)
    return np.cos(half) * np.eye(2, dtype=complex) + s * X


def su2_vee_closed(m) -> np.ndarray:
    m = np.asarray(m)
    return np.array([-2.0 * m[1, 0].imag, 2.0 * m[1, 0].real, (2j * m[0, 0]).real])


def k_vee_closed(m) -> np.ndarray:
    m = np.asarray(m)
    return np.array([-m[0, 1].real, m[0, 1].imag, 2.0 * m[1, 1].real])


def su2_group() -> MatrixGroup:
    return MatrixGroup("SU(2)", su2_basis(), _su2_member, su2_vee_closed, _su2_project,
                       exp_fn=su2_exp_closed)


def k_group() -> MatrixGroup:
    return MatrixGroup("K", k_basis(), _k_member, k_vee_closed)


def sl2c_group() -> MatrixGroup:
    return MatrixGroup("SL(2,C)", np.concatenate([su2_basis(), k_basis()]), _sl2_member)


def unipotent_group(name: str, basis: np.ndarray) -> MatrixGroup:
    return MatrixGroup(name, np.asarray(basis, dtype=float), _unipotent_member)


def factorize_su2k(m) -> tuple[np.ndarray, np.ndarray]:
    """Split ``M in SL(2,C)`` as ``M = U T`` with ``U in SU(2)`` and ``T in K``.

    Complex QR followed by a diagonal phase correction so that ``T`` has a
    positive real diagonal; this makes the factorization unique.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise NotInGroup("expected a finite 2x2 matrix")
    det = np.linalg.det(m)
    if abs(det - 1.0) > DET_TOL:
        raise NotInGroup(f"|det M - 1| = {abs(det - 1.0):.3e} exceeds {DET_TOL}")
    q, r = np.linalg.qr(m)
    d = np.diag(r)
    phase = d / np.abs(d)
    u = q * phase
    t = r / phase[:, None]
    return u, t


@dataclass(frozen=True, eq=False)
class MatchedGroupPair:
    """Two subgroups ``G, H`` of an ambient group with ``ambient = G H``.

    ``factorize(m)`` returns ``(g, h)`` with ``m = g h``. The mutual actions
    come from ``h g = (h |> g)(h <| g)``. ``tensors`` are the algebra-level
    actions used inside the jet formulas.
    """

    G: MatrixGroup
    H: MatrixGroup
    ambient: MatrixGroup
    factorize: Callable
    tensors: MatchedPairTensors
    fd_step: float = DEFAULT_FD_STEP

    def act_left(self, h, g) -> np.ndarray:
        return self.factorize(h @ g)[0]

    def act_right(self, h, g) -> np.ndarray:
        return self.factorize(h @ g)[1]

    def actions(self, h, g) -> tuple[np.ndarray, np.ndarray]:
        return self.factorize(h @ g)

    # Derivative lifts, by central differences along one-parameter subgroups.

    def h_on_g_alg(self, h, xi) -> np.ndarray:
        """``h |> xi`` in g: derivative of ``h |> exp(s xi)`` at ``s = 0``."""
        d = fd_derivative(lambda s: self.act_left(h, self.G.exp(s * xi)), 0.0, self.fd_step)
        return self.G.vee(d)

    def left_trivial_right_lift(self, h, xi) -> np.ndarray:
        """``T_h L_{h^-1}(h <| xi)``: left-trivialized derivative of ``h <| exp(s xi)``."""
        d = fd_derivative(lambda s: self.act_right(h, self.G.exp(s * xi)), 0.0, self.fd_step)
        return self.H.vee(self.H.inv(h) @ d)

    def right_trivial_right_lift(self, k, xi) -> np.ndarray:
        """``T_k R_{k^-1}(k <| xi)``: right-trivialized derivative of ``k <| exp(s xi)``."""
        d = fd_derivative(lambda s: self.act_right(k, self.G.exp(s * xi)), 0.0, self.fd_step)
        return self.H.vee(d @ self.H.inv(k))

    def eta_on_g_lift(self, eta, g) -> np.ndarray:
        """``T_g L_{g^-1}(eta |> g)``: derivative of ``exp(s eta) |> g``, left-trivialized."""
        d = fd_derivative(lambda s: self.act_left(self.H.exp(s * eta), g), 0.0, self.fd_step)
        return self.G.vee(self.G.inv(g) @ d)

    def eta_right_g(self, eta, g) -> np.ndarray:
        """``eta <| g`` in h: derivative of ``exp(s eta) <| g`` at ``s = 0``."""
        d = fd_derivative(lambda s: self.act_right(self.H.exp(s * eta), g), 0.0, self.fd_step)
        return self.H.vee(d)


# Double cross product of groups.

def dcp_mul(pair: MatchedGroupPair, a, b) -> tuple[np.ndarray, np.ndarray]:
    """``(g, h)(g~, h~) = (g (h |> g~), (h <| g~) h~)``."""
    g, h = a
    g2, h2 = b
    left, right = pair.actions(h, g2)
    return g @ left, right @ h2


def dcp_inv(pair: MatchedGroupPair, a) -> tuple[np.ndarray, np.ndarray]:
    g, h = a
    return pair.factorize(np.linalg.inv(g @ h))


def matched_group_residuals(pair: MatchedGroupPair, g1, g2, h1, h2) -> dict:
    """Residuals of the compatibility identities and the reassembly ``hg``."""
    G, H = pair.G, pair.H
    l12 = pair.act_left(h1, g1 @ g2)
    a, b = pair.actions(h1, g1)
    rhs = a @ pair.act_left(b, g2)
    r_left = np.max(np.abs(l12 - rhs))
    lhs = pair.act_right(h1 @ h2, g1)
    rhs = pair.act_right(h1, pair.act_left(h2, g1)) @ pair.act_right(h2, g1)
    r_right = np.max(np.abs(lhs - rhs))
    r_reassembly = np.max(np.abs(a @ b - h1 @ g1))
    r_member = max(G.membership_defect(a), H.membership_defect(b))
    return {"left_compat": float(r_left), "right_compat": float(r_right),
            "reassembly": float(r_reassembly), "membership": float(r_member)}


# Tangent groups of a single matrix group.

def tg_mul(G: MatrixGroup, a, b):
    g, x = a
    g2, y = b
    return g @ g2, y + G.Ad(G.inv(g2)) @ x


def tg_inv(G: MatrixGroup, a):
    g, x = a
    return G.inv(g), -G.Ad(g) @ x


def t2g_mul(G: MatrixGroup, a, b):
    g, x, xd = a
    g2, y, yd = b
    A = G.Ad(G.inv(g2))
    ax = A @ x
    return g @ g2, y + ax, yd + A @ xd - G.bracket(y, ax)


def t2g_inv(G: MatrixGroup, a):
    g, x, xd = a
    A = G.Ad(g)
    return G.inv(g), -A @ x, -A @ xd


def phi_cocycle(G: MatrixGroup, a, b) -> np.ndarray:
    """``phi((g, xi), (g~, xi~)) = -ad_{xi~} Ad_{g~^-1} xi``."""
    _, x = a
    g2, y = b
    return -G.bracket(y, G.Ad(G.inv(g2)) @ x)


def phi_coboundary(G: MatrixGroup, a, b, c) -> np.ndarray:
    """Four-term ``d phi`` with the right action ``v <| (g, xi) = Ad_{g^-1} v``."""
    return (phi_cocycle(G, b, c) - phi_cocycle(G, tg_mul(G, a, b), c)
            + phi_cocycle(G, a, tg_mul(G, b, c))
            - G.Ad(G.inv(c[0])) @ phi_cocycle(G, a, b))


def ttg_mul(G: MatrixGroup, a, b):
    """Iterated tangent group law in the (g, x1, x2, x3) trivialization."""
    g, x1, x2, x3 = a
    g2, y1, y2, y3 = b
    A = G.Ad(G.inv(g2))
    ax2 = A @ x2
    return g @ g2, y1 + A @ x1, y2 + ax2, y3 + A @ x3 + G.bracket(ax2, y1)


def ttg_inv(G: MatrixGroup, a):
    g, x1, x2, x3 = a
    A = G.Ad(g)
    ax1, ax2 = A @ x1, A @ x2
    return G.inv(g), -ax1, -ax2, -A @ x3 + G.bracket(ax2, ax1)


def ttg21_mul(G: MatrixGroup, a, b):
    """Law of the second realization ``(G x| g2) x| (g1 x g3)``, slots (g, x2, x1, x3).

    Derived from curves in ``TG = G x| g``: differentiating the product of two
    curves ``(g(s), x(s))`` at ``s = 0``.
    """
    g, x2, x1, x3 = a
    g2, y2, y1, y3 = b
    A = G.Ad(G.inv(g2))
    return g @ g2, y2 + A @ x2, y1 + A @ x1, y3 + A @ x3 + G.bracket(A @ x1, y2)


def ttg_12_to_21(G: MatrixGroup, a):
    g, x1, x2, x3 = a
    return g, x2, x1, x3 + G.bracket(x1, x2)


def ttg_21_to_12(G: MatrixGroup, a):
    g, x2, x1, x3 = a
    return g, x1, x2, x3 - G.bracket(x1, x2)


def ttg_realization_map(G: MatrixGroup, a, direction: str = "12->21"):
    if direction in ("12->21", "12to21"):
        return ttg_12_to_21(G, a)
    if direction in ("21->12", "21to12"):
        return ttg_21_to_12(G, a)
    raise ValueError(f"unknown direction {direction!r}; use '12->21' or '21->12'")


def t2g_to_ttg(a):
    g, x, xd = a
    return g, x, x, xd


def alg_to_ttg(G: MatrixGroup, x):
    z = np.zeros_like(np.asarray(x, dtype=float))
    return G.identity(), np.asarray(x, dtype=float), z, z.copy()


def ttg_from_g_and_t2g(G: MatrixGroup, xt, a):
    """``(e, xt, 0, 0)(g, xi, xi, xid) = (g, xi + Ad_{g^-1} xt, xi, xid)``."""
    g, x, xd = a
    return g, x + G.Ad(G.inv(g)) @ xt, np.array(x, dtype=float), np.array(xd, dtype=float)


def ttg_split(G: MatrixGroup, a):
    """Inverse of ``ttg_from_g_and_t2g``: returns ``(xt, (g, xi, xid))``."""
    g, x1, x2, x3 = a
    if not all(np.all(np.isfinite(v)) for v in (g, x1, x2, x3)):
        raise ValueError("non-finite TTG element")
    return G.Ad(g) @ (x1 - x2), (g, np.array(x2, dtype=float), np.array(x3, dtype=float))


def g_t2g_mutual_actions(G: MatrixGroup, a, xt):
    """Mutual actions of T^2G and g: ``(Ad_g xt, (g, xi, xid + ad_xi xt))``."""
    g, x, xd = a
    return G.Ad(g) @ xt, (g, np.array(x, dtype=float), xd + G.bracket(x, xt))


def g_t2g_factorization_residual(G: MatrixGroup, a, xt, literal: bool = False) -> float:
    """Residual of ``(g,xi,xi,xid)(e,xt,0,0) = (inclusion of a|>xt)(inclusion of a<|xt)``.

    ``literal=True`` places ``Ad_g xt`` in the second slot instead of the
    g-inclusion slot, which is how the identity is sometimes written; that
    variant does not hold and is kept only to demonstrate it.
    """
    lhs = ttg_mul(G, t2g_to_ttg(a), alg_to_ttg(G, xt))
    left, right = g_t2g_mutual_actions(G, a, xt)
    if literal:
        z = np.zeros_like(left)
        first = (G.identity(), z, left, z.copy())
    else:
        first = alg_to_ttg(G, left)
    rhs = ttg_mul(G, first, t2g_to_ttg(right))
    return jet_distance(lhs, rhs)


def tteg_mul(G: MatrixGroup, a, b):
    """``TT_eG`` law: ``(x1 + y1, x2 + y2, x3 + y3 + [x2, y1])``."""
    x1, x2, x3 = a
    y1, y2, y3 = b
    return x1 + y1, x2 + y2, x3 + y3 + G.bracket(x2, y1)


def semidirect_g_tteg_mul(G: MatrixGroup, a, b):
    """``G x| TT_eG`` with the diagonal action ``Ad_{g^-1}`` on all three slots."""
    g, x1, x2, x3 = a
    g2, y1, y2, y3 = b
    A = G.Ad(G.inv(g2))
    s = tteg_mul(G, (A @ x1, A @ x2, A @ x3), (y1, y2, y3))
    return (g @ g2,) + s


def phi_ttg(G: MatrixGroup, a, b) -> np.ndarray:
    """``phi_TTG((g,x1,x2), (g~,y1,y2)) = [Ad_{g~^-1} x2, y1]``."""
    _, _, x2 = a
    g2, y1, _ = b
    return G.bracket(G.Ad(G.inv(g2)) @ x2, y1)


def g_x_gg_mul(G: MatrixGroup, a, b):
    """``G x| (g1 x g2)`` with diagonal ``Ad_{g^-1}``."""
    g, x1, x2 = a
    g2, y1, y2 = b
    A = G.Ad(G.inv(g2))
    return g @ g2, y1 + A @ x1, y2 + A @ x2


def phi_ttg_coboundary(G: MatrixGroup, a, b, c) -> np.ndarray:
    return (phi_ttg(G, b, c) - phi_ttg(G, g_x_gg_mul(G, a, b), c)
            + phi_ttg(G, a, g_x_gg_mul(G, b, c))
            - G.Ad(G.inv(c[0])) @ phi_ttg(G, a, b))


def chi_cocycle(G: MatrixGroup, a, b) -> np.ndarray:
    """``chi((x1, x2), (y1, y2)) = [x2, y1]``."""
    return G.bracket(a[1], b[0])


def chi_coboundary(G: MatrixGroup, a, b, c) -> np.ndarray:
    # trivial action of g1 x g2 on g3
    ab = (a[0] + b[0], a[1] + b[1])
    bc = (b[0] + c[0], b[1] + c[1])
    return (chi_cocycle(G, b, c) - chi_cocycle(G, ab, c)
            + chi_cocycle(G, a, bc) - chi_cocycle(G, a, b))


def jet_distance(a, b) -> float:
    return float(max(np.max(np.abs(np.asarray(u) - np.asarray(v))) for u, v in zip(a, b)))


# Jets of curves, used as an independent oracle.

def jet_curve(G: MatrixGroup, a) -> Callable:
    """Curve ``t -> g exp(t xi + t^2/2 xid)`` whose left-trivialized 2-jet is ``a``."""
    g, x, xd = a
    X, Xd = G.hat(x), G.hat(xd)
    return lambda t: g @ expm(t * X + 0.5 * t * t * Xd)


def curve_jet(G: MatrixGroup, curve: Callable, h: float = 1e-3):
    """Left-trivialized 2-jet of ``curve`` at 0 by central differences.

    ``delta = r^-1 r'`` and ``delta' = r^-1 r'' - (r^-1 r')^2``.
    """
    r0 = curve(0.0)
    ri = np.linalg.inv(r0)
    d1 = ri @ fd_derivative(curve, 0.0, h)
    d2 = ri @ fd_second_derivative(curve, 0.0, h)
    return r0, G.vee(d1), G.vee(d2 - d1 @ d1)


# Second-order tangent groups of a matched pair.

def t2_assemble(pair: MatchedGroupPair, a, b):
    """Product ``(g, xi, xid)(h, eta, etad)`` of the two inclusions into T^2(G x H).

    Returns ``((g, h), (u, v), (ud, vd))`` in the trivialization of the double
    cross product, with the group-on-algebra lifts computed numerically.
    """
    g, x, xd = a
    h, y, yd = b
    mp, hi = pair.tensors, pair.H.inv(h)
    hx = pair.h_on_g_alg(hi, x)
    rx = pair.right_trivial_right_lift(hi, x)
    u = hx
    v = rx + y
    ud = pair.h_on_g_alg(hi, xd) - mp.left(y, hx)
    vd = (pair.H.bracket(rx, y) - mp.right(y, hx)
          + pair.right_trivial_right_lift(hi, xd) + yd)
    return (g, h), (u, v), (ud, vd)


def t2_split(pair: MatchedGroupPair, gh, vel, acc):
    """Inverse of ``t2_assemble`` via the A/B formulas.

    A1 = h|>xi, B1 = eta + T_hL_{h^-1}(h<|xi),
    A0 = h|>(B1|>xi) + h|>xid, B0 = etad + B1<|xi - T_{h^-1}R_h(h^-1<|A0) + [B1, eta].
    """
    g, h = gh
    x, y = vel
    xd, yd = acc
    mp, H = pair.tensors, pair.H
    A1 = pair.h_on_g_alg(h, x)
    B1 = y + pair.left_trivial_right_lift(h, x)
    A0 = pair.h_on_g_alg(h, mp.left(B1, x)) + pair.h_on_g_alg(h, xd)
    B0 = (yd + mp.right(B1, x) - pair.right_trivial_right_lift(H.inv(h), A0)
          + H.bracket(B1, y))
    return (g, A1, A0), (h, B1, B0)


def ambient_jet(pair: MatchedGroupPair, gh, vel, acc):
    """Same T^2(G x H) element as a jet of the ambient group."""
    g, h = gh
    return g @ h, np.concatenate(vel), np.concatenate(acc)


def t2_matched_actions(pair: MatchedGroupPair, b, a):
    """Closed-form mutual actions of T^2H on T^2G and T^2G on T^2H.

    ``b = (h, eta, etad)``, ``a = (g, xi, xid)``; returns ``(b |> a, b <| a)``.
    """
    h, y, yd = b
    g, x, xd = a
    mp, G, H = pair.tensors, pair.G, pair.H
    hg_left, k = pair.actions(h, g)          # h|>g, h<|g
    lift = pair.eta_on_g_lift(y, g)         # T_gL_{g^-1}(eta|>g)
    lift_d = pair.eta_on_g_lift(yd, g)
    tau = x + lift
    yg = pair.eta_right_g(y, g)             # eta<|g
    ydg = pair.eta_right_g(yd, g)
    B = pair.left_trivial_right_lift(k, tau)
    inner = xd + lift_d - G.bracket(x, lift) + mp.left(yg, x)
    left = (hg_left,
            pair.h_on_g_alg(k, tau),
            pair.h_on_g_alg(k, mp.left(yg, tau)) + pair.h_on_g_alg(k, mp.left(B, tau))
            + pair.h_on_g_alg(k, inner))
    right = (k,
             yg + B,
             ydg + mp.right(yg, x) + mp.right(yg, tau) + mp.right(B, tau)
             + pair.left_trivial_right_lift(k, mp.left(yg, tau))
             + pair.left_trivial_right_lift(k, mp.left(B, tau))
             + pair.left_trivial_right_lift(k, inner)
             + H.bracket(B, yg))
    return left, right


def t2_actions_by_split(pair: MatchedGroupPair, b, a):
    """Mutual actions via the ambient T^2 law followed by the A/B split."""
    h, y, yd = b
    g, x, xd = a
    A = pair.ambient
    zg, zh = np.zeros(pair.G.dim), np.zeros(pair.H.dim)
    p = (h, np.concatenate([zg, y]), np.concatenate([zg, yd]))
    q = (g, np.concatenate([x, zh]), np.concatenate([xd, zh]))
    m, v, vd = t2g_mul(A, p, q)
    n = pair.G.dim
    gh = pair.factorize(m)
    return t2_split(pair, gh, (v[:n], v[n:]), (vd[:n], vd[n:]))


def t2_actions_by_curves(pair: MatchedGroupPair, b, a, h: float = 1e-3):
    """Mutual actions from pointwise factorization of the ambient product curve.

    The curve ``t -> h(t) g(t)`` is split by ``factorize`` at each time and the
    2-jets of the two factors are read off by central differences.
    """
    hc = jet_curve(pair.H, b)
    gc = jet_curve(pair.G, a)
    left = curve_jet(pair.G, lambda t: pair.factorize(hc(t) @ gc(t))[0], h)
    right = curve_jet(pair.H, lambda t: pair.factorize(hc(t) @ gc(t))[1], h)
    return left, right


# JSON serialization of elements.

def matrix_to_json(m) -> list:
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return np.stack([m.real, m.imag], axis=-1).tolist()
    return m.tolist()


def matrix_from_json(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim == 3 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    return a


_JET_KEYS = {2: ("g", "xi"), 3: ("g", "xi", "xidot"), 4: ("g", "xi1", "xi2", "xi3")}


def jet_to_json(a) -> dict:
    keys = _JET_KEYS[len(a)]
    out = {keys[0]: matrix_to_json(a[0])}
    for k, v in zip(keys[1:], a[1:]):
        out[k] = np.asarray(v, dtype=float).tolist()
    return out


def jet_from_json(d: dict):
    for keys in _JET_KEYS.values():
        if set(keys) == set(d):
            return (matrix_from_json(d["g"]),) + tuple(np.asarray(d[k], dtype=float)
                                                     for k in keys[1:])
    raise ValueError(f"unrecognized jet keys {sorted(d)}")
