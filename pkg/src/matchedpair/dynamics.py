"""Reduced Lagrangians, equation-of-motion fields, integration and residuals.

Second-order systems live on the phase space ``(xi, xid, xidd)`` (for matched
systems ``xi`` stands for the concatenation ``(xi, eta)``). With
``D = dl/dxi - d/dt dl/dxid`` every second-order field solves
``dD/dt = -coad(xi, D)`` for the third derivative, where ``coad`` is the
coadjoint operator of the relevant algebra.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import LieAlgebra, MatchedPairTensors, ad_star, dcs_ad_star, dual_action_maps, flat, sharp
from .groups import MatchedGroupPair, MatrixGroup
from .kernel import (DEFAULT_DT, fd_derivative, fd_gradient, grid_derivative, rk4_integrate)

K_VEC = np.array([0.0, 0.0, 1.0])
SQRT3 = np.sqrt(3.0)


class ReconstructionError(RuntimeError):
    """Group path left the group beyond the allowed drift."""


@dataclass(frozen=True, eq=False)
class QuadraticLagrangian:
    """``l(x, xd) = 1/2 x.A x + 1/2 xd.B xd + x.C xd``.

    First-order systems use ``A`` only. ``B`` is the fiber Hessian of the
    second-order systems and must be symmetric positive definite.
    """

    A: np.ndarray
    B: np.ndarray | None = None
    C: np.ndarray | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        n = A.shape[0]
        B = np.zeros((n, n)) if self.B is None else np.atleast_2d(np.array(self.B, dtype=float))
        C = np.zeros((n, n)) if self.C is None else np.atleast_2d(np.array(self.C, dtype=float))
        for name, M in (("A", A), ("B", B), ("C", C)):
            if M.shape != (n, n):
                raise ValueError(f"block {name} must be {n}x{n}, got {M.shape}")
        if not np.allclose(A, A.T, atol=1e-14) or not np.allclose(B, B.T, atol=1e-14):
            raise ValueError("blocks A and B must be symmetric")
        for M in (A, B, C):
            M.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @classmethod
    def isotropic(cls, n: int, a: float = 1.0, b: float = 1.0) -> "QuadraticLagrangian":
        return cls(a * np.eye(n), b * np.eye(n))

    @classmethod
    def from_dict(cls, d: dict, n: int) -> "QuadraticLagrangian":
        if d.get("type", "quadratic") != "quadratic":
            raise ValueError(f"unsupported lagrangian type {d.get('type')!r}")
        blocks = d.get("blocks", {})

        def block(key, default):
            v = blocks.get(key)
            if v is None:
                return default
            v = np.asarray(v, dtype=float)
            return np.diag(v) if v.ndim == 1 else v

        return cls(block("A", np.eye(n)), block("B", np.eye(n)), block("C", np.zeros((n, n))))

    def value(self, x, xd=None) -> float:
        x = np.asarray(x, dtype=float)
        v = 0.5 * x @ self.A @ x
        if xd is not None:
            xd = np.asarray(xd, dtype=float)
            v += 0.5 * xd @ self.B @ xd + x @ self.C @ xd
        return float(v)

    def dl_dx(self, x, xd=None) -> np.ndarray:
        p = self.A @ x
        return p if xd is None else p + self.C @ xd

    def dl_dxd(self, x, xd) -> np.ndarray:
        return self.B @ xd + self.C.T @ x

    def solve_A(self, p) -> np.ndarray:
        return np.linalg.solve(self.A, p)

    def solve_B(self, p) -> np.ndarray:
        return np.linalg.solve(self.B, p)

    def energy(self, x) -> float:
        """First-order energy, equal to the Lagrangian for ``l = 1/2 x.A x``."""
        return self.value(x)


# Coadjoint operators on concatenated coordinates.

def algebra_coad(alg: LieAlgebra) -> Callable:
    return lambda x, mu: ad_star(alg, x, mu)


def matched_coad(mp: MatchedPairTensors) -> Callable:
    n = mp.g.dim

    def coad(x, mu):
        g, h = dcs_ad_star(mp, (x[:n], x[n:]), (mu[:n], mu[n:]))
        return np.concatenate([g, h])

    return coad


def split_state(state, N: int):
    state = np.asarray(state, dtype=float)
    if state.shape != (3 * N,):
        raise ValueError(f"expected a state of length {3 * N}, got {state.shape}")
    return state[:N], state[N:2 * N], state[2 * N:]


def d_form(L: QuadraticLagrangian, x, xd, xdd) -> np.ndarray:
    """``D = dl/dx - d/dt dl/dxd`` along a curve with the given jet."""
    return L.A @ x + L.C @ xd - L.B @ xdd - L.C.T @ xd


def third_from_ddot(L: QuadraticLagrangian, xd, xdd, dD) -> np.ndarray:
    """Solve ``dD/dt = A xd + (C - C^T) xdd - B xddd`` for ``xddd``."""
    return L.solve_B(L.A @ xd + (L.C - L.C.T) @ xdd - dD)


def generic_second_order(coad: Callable, L: QuadraticLagrangian, state) -> np.ndarray:
    x, xd, xdd = split_state(state, L.dim)
    D = d_form(L, x, xd, xdd)
    xddd = third_from_ddot(L, xd, xdd, -coad(x, D))
    return np.concatenate([xd, xdd, xddd])


# First-order fields.

def ep_field(alg: LieAlgebra, L: QuadraticLagrangian, xi) -> np.ndarray:
    """``d/dt dl/dxi = -ad*_xi dl/dxi`` solved for ``xid``."""
    xi = np.asarray(xi, dtype=float)
    return L.solve_A(-ad_star(alg, xi, L.A @ xi))


def matched_ep_field(mp: MatchedPairTensors, L: QuadraticLagrangian, xi, eta):
    n = mp.g.dim
    v = np.concatenate([xi, eta])
    out = L.solve_A(-matched_coad(mp)(v, L.A @ v))
    return out[:n], out[n:]


def matched_ep_termwise(mp: MatchedPairTensors, L: QuadraticLagrangian, xi, eta):
    """Same field assembled term by term from the four transposed actions."""
    n = mp.g.dim
    v = np.concatenate([xi, eta])
    p = L.A @ v
    mu, nu = p[:n], p[n:]
    d = dual_action_maps(mp)
    dmu = -ad_star(mp.g, xi, mu) + d.coright(mu, eta) + d.a_star(eta, nu)
    dnu = -ad_star(mp.h, eta, nu) - d.coleft(xi, nu) - d.b_star(xi, mu)
    out = L.solve_A(np.concatenate([dmu, dnu]))
    return out[:n], out[n:]


# Second-order fields.

def soep_field(alg: LieAlgebra, L: QuadraticLagrangian, state) -> np.ndarray:
    """``(d/dt + ad*_xi)(dl/dxi - d/dt dl/dxid) = 0`` in first-order form."""
    return generic_second_order(algebra_coad(alg), L, state)


def matched_soep_field(mp: MatchedPairTensors, L: QuadraticLagrangian, state,
                       zero_left_action: bool = False,
                       zero_right_action: bool = False) -> np.ndarray:
    """Second-order matched equations on the double cross sum.

    ``zero_left_action`` drops ``|>`` (and with it ``<|*`` and ``b*``);
    ``zero_right_action`` drops ``<|`` (and ``|>*``, ``a*``).
    """
    if zero_left_action or zero_right_action:
        mp = mp.zeroed(left=zero_left_action, right=zero_right_action)
    return generic_second_order(matched_coad(mp), L, state)


DEGENERATIONS = ("sd1", "sd2", "decoupled")


def degenerate_soep_field(mp: MatchedPairTensors, L: QuadraticLagrangian, state,
                          kind: str) -> np.ndarray:
    """The three degenerate systems, each coded with only its surviving terms.

    ``sd1``: trivial ``<|``, keeps ``D_xi <|* eta`` and ``b*_xi D_xi``.
    ``sd2``: trivial ``|>``, keeps ``a*_eta D_eta`` and ``xi |>* D_eta``.
    ``decoupled``: both actions trivial.
    """
    if kind not in DEGENERATIONS:
        raise ValueError(f"unknown degeneration {kind!r}")
    n = mp.g.dim
    x, xd, xdd = split_state(state, L.dim)
    D = d_form(L, x, xd, xdd)
    xi, eta, Dx, Dy = x[:n], x[n:], D[:n], D[n:]
    d = dual_action_maps(mp)
    dDx = -ad_star(mp.g, xi, Dx)
    dDy = -ad_star(mp.h, eta, Dy)
    if kind == "sd1":
        dDx = dDx + d.coright(Dx, eta)
        dDy = dDy - d.b_star(xi, Dx)
    elif kind == "sd2":
        dDx = dDx + d.a_star(eta, Dy)
        dDy = dDy - d.coleft(xi, Dy)
    xddd = third_from_ddot(L, xd, xdd, np.concatenate([dDx, dDy]))
    return np.concatenate([xd, xdd, xddd])


def _r3_parts(state, L):
    x, xd, xdd = split_state(state, 6)
    D = d_form(L, x, xd, xdd)
    return x, xd, xdd, x[:3], x[3:], D[:3], D[3:]


def r3_explicit_field(state, L: QuadraticLagrangian | None = None, form: str = "display",
                      k=K_VEC) -> np.ndarray:
    """Hand-coded second-order system on su(2) x K in R^3 notation.

    ``form="display"`` evaluates the two-line system in ``D_X``, ``D_Y`` for
    any quadratic Lagrangian. ``form="printed"`` evaluates the closed-form
    third-order equations stated for ``l = 1/2(X^2 + Y^2 + Xd^2 + Yd^2)``
    exactly as written (``L`` is ignored); ``form="corrected"`` is the same
    closed form with its two slips repaired.
    """
    k = np.asarray(k, dtype=float)
    if form in ("printed", "corrected"):
        x, xd, xdd = split_state(state, 6)
        X, Y, Xd, Yd, Xdd, Ydd = x[:3], x[3:], xd[:3], xd[3:], xdd[:3], xdd[3:]
        # the closed form as stated has (Xdd.X)k where (Xdd.k)Y belongs, and
        # drops (X.k)X - (X.X)k from the second line
        fixed = form == "corrected"
        odd = (Xdd @ k) * Y if fixed else (Xdd @ X) * k
        Xddd = ((Y @ k) * Xdd - np.cross(X, Xdd) - odd + np.cross(Y, Ydd)
                + Xd - (Y @ k) * X + (X @ k) * Y)
        Yddd = (-(k @ Y) * Ydd - np.cross(Ydd, X) + (Ydd @ Y) * k - (Xdd @ k) * X
                + (Xdd @ X) * k + Yd + (k @ Y) * Y + np.cross(Y, X) - (Y @ Y) * k)
        if fixed:
            Yddd = Yddd + (X @ k) * X - (X @ X) * k
        return np.concatenate([xd, xdd, Xddd, Yddd])
    if form != "display":
        raise ValueError(f"unknown form {form!r}; use 'display', 'printed' or 'corrected'")
    L = L or QuadraticLagrangian.isotropic(6)
    x, xd, xdd, X, Y, DX, DY = _r3_parts(state, L)
    dDX = (Y @ k) * DX - np.cross(X, DX) + np.cross(Y, DY) - (DX @ k) * Y
    dDY = -(k @ Y) * DY - np.cross(DY, X) - (DX @ k) * X + (DY @ Y + DX @ X) * k
    return np.concatenate([xd, xdd, third_from_ddot(L, xd, xdd, np.concatenate([dDX, dDY]))])


def r3_degenerate(state, L: QuadraticLagrangian, kind: str, k=K_VEC) -> np.ndarray:
    """Hand-coded degenerate R^3 systems.

    ``sd2``: trivial left action of K on SU(2); ``sd1``: trivial right action
    of SU(2) on K; ``decoupled``: both trivial.
    """
    if kind not in DEGENERATIONS:
        raise ValueError(f"unknown degeneration {kind!r}")
    k = np.asarray(k, dtype=float)
    x, xd, xdd, X, Y, DX, DY = _r3_parts(state, L)
    if kind == "sd2":
        dDX = -np.cross(X, DX) + np.cross(Y, DY)
        dDY = -(k @ Y) * DY - np.cross(DY, X) + (DY @ Y) * k
    elif kind == "sd1":
        dDX = (Y @ k) * DX - np.cross(X, DX) - (DX @ k) * Y
        dDY = -(k @ Y) * DY - (DX @ k) * X + (DY @ Y + DX @ X) * k
    else:
        dDX = -np.cross(X, DX)
        dDY = -(k @ Y) * DY + (DY @ Y) * k
    return np.concatenate([xd, xdd, third_from_ddot(L, xd, xdd, np.concatenate([dDX, dDY]))])


SPLINE_BRANCHES = ("+", "-")


def spline_coadjoint_display(desc: LieAlgebra, u, w):
    """``ad*_(x, xt)(mu, nu) = (ad*_x mu - ad*_xt(mu + nu), ad*_xt nu + ad*_x(mu + nu))``."""
    x, xt = u
    mu, nu = w
    s = mu + nu
    return (ad_star(desc, x, mu) - ad_star(desc, xt, s),
            ad_star(desc, xt, nu) + ad_star(desc, x, s))


def spline_field(desc: LieAlgebra, state, branch: str = "+", form: str = "bracket") -> np.ndarray:
    """2-spline equations on a self-paired class-2 nilpotent algebra.

    The state is ``(x, xt, xd, xtd, xdd, xtdd)``. ``branch`` picks the upper
    ("+") or lower ("-") signs. ``form="bracket"`` uses
    ``xddd = s([x, xdd] - [xt, xdd + xtdd])``,
    ``xtddd = s([xt, xtdd] + [x, xdd + xtdd])`` with ``s = +-1``;
    ``form="coadjoint"`` uses the same equations written with the coadjoint
    operator and the metric; the two forms agree only when the metric is
    bi-invariant.
    """
    if branch not in SPLINE_BRANCHES:
        raise ValueError(f"sign_branch must be '+' or '-', got {branch!r}")
    s = 1.0 if branch == "+" else -1.0
    n = desc.dim
    x, xd, xdd = split_state(state, 2 * n)
    a, at = x[:n], x[n:]
    b, bt = xdd[:n], xdd[n:]
    if form == "bracket":
        br = desc.bracket
        top = s * (br(a, b) - br(at, b + bt))
        bot = s * (br(at, bt) + br(a, b + bt))
    elif form == "coadjoint":
        # written with the transpose ad_x^T = -ad*_x, under which a bi-invariant
        # metric gives (ad_x^T eta_flat)_sharp = -[x, eta]
        mu, nu = flat(desc, b), flat(desc, bt)
        top = sharp(desc, s * (ad_star(desc, a, mu) - ad_star(desc, at, mu + nu)))
        bot = sharp(desc, s * (ad_star(desc, at, nu) + ad_star(desc, a, mu + nu)))
    else:
        raise ValueError(f"unknown form {form!r}; use 'bracket' or 'coadjoint'")
    return np.concatenate([xd, xdd, top, bot])


# Integration and reconstruction.

@dataclass
class Trajectory:
    ts: np.ndarray
    states: np.ndarray
    n: int
    m: int = 0
    order: int = 1
    position: bool = False

    def header(self) -> list[str]:
        cols = ["t"]
        prefixes = [("xi", "eta"), ("xid", "etad"), ("xidd", "etadd")][:3 if self.order == 3 else 1]
        for pg, ph in prefixes:
            cols += [f"{pg}_{i + 1}" for i in range(self.n)]
            cols += [f"{ph}_{i + 1}" for i in range(self.m)]
        if self.position:
            cols += [f"q_{i + 1}" for i in range(self.n + self.m)]
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for t, row in zip(self.ts, self.states):
            w.writerow(["%.17g" % t] + ["%.17g" % v for v in row])
        return buf.getvalue()


def integrate(field: Callable, s0, t_final: float, h: float = DEFAULT_DT,
              output_stride: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """RK4 orbit of the autonomous ``field`` sampled every ``output_stride`` steps."""
    return rk4_integrate(lambda t, y: field(y), s0, t_final, h, output_stride)


def _lagrange_weights(nodes: np.ndarray, t: float) -> np.ndarray:
    w = np.ones(len(nodes))
    for i, ti in enumerate(nodes):
        for j, tj in enumerate(nodes):
            if i != j:
                w[i] *= (t - tj) / (ti - tj)
    return w


def reconstruct(G: MatrixGroup, ts, xis, g0=None, project_tol: float = 1e-9,
                fail_tol: float = 1e-6) -> np.ndarray:
    """Solve ``g' = g hat(xi)`` on the sample grid by fourth-order Magnus steps.

    ``xi`` is interpolated at the two Gauss points of each step by the cubic
    through the four nearest samples. The path is re-projected onto the group
    when the membership defect exceeds ``project_tol``.
    """
    ts = np.asarray(ts, dtype=float)
    xis = np.asarray(xis, dtype=float)
    g = G.identity() if g0 is None else np.array(g0, dtype=G.dtype)
    out = np.empty((len(ts),) + g.shape, dtype=g.dtype)
    out[0] = g
    N = len(ts)
    c1, c2 = 0.5 - SQRT3 / 6.0, 0.5 + SQRT3 / 6.0
    for k in range(N - 1):
        h = ts[k + 1] - ts[k]
        if N >= 4:
            j0 = min(max(k - 1, 0), N - 4)
            idx = np.arange(j0, j0 + 4)
        else:
            idx = np.array([k, k + 1])
        nodes, vals = ts[idx], xis[idx]
        a1 = _lagrange_weights(nodes, ts[k] + c1 * h) @ vals
        a2 = _lagrange_weights(nodes, ts[k] + c2 * h) @ vals
        # right-multiplicative Magnus: commutator enters as [a1, a2]
        omega = 0.5 * h * (a1 + a2) + (SQRT3 * h * h / 12.0) * G.bracket(a1, a2)
        g = g @ G.exp(omega)
        if G.membership_defect(g) > project_tol and G.project_fn is not None:
            g = G.project(g)
        if G.membership_defect(g) > fail_tol:
            raise ReconstructionError(f"membership defect {G.membership_defect(g):.2e} at t={ts[k + 1]}")
        out[k + 1] = g
    return out


def spatial_momentum_probe(G: MatrixGroup, L: QuadraticLagrangian, xi0, t_final: float = 10.0,
                           h: float = 1e-3) -> dict:
    """Measure which transport of the body momentum ``m = dl/dxi`` is conserved.

    Candidates: ``Ad*_{g(t)} m`` and ``Ad*_{g(t)^-1} m``, with
    ``Ad*_g = (Ad_{g^-1})^T`` in coordinates.
    """
    alg = G.algebra
    ts, xs = integrate(lambda x: ep_field(alg, L, x), xi0, t_final, h, output_stride=1)
    gs = reconstruct(G, ts, xs)
    cands = {"Ad*_g": [], "Ad*_g^-1": []}
    for g, x in zip(gs, xs):
        m = L.A @ x
        cands["Ad*_g"].append(G.Ad_star(g) @ m)
        cands["Ad*_g^-1"].append(G.Ad_star(G.inv(g)) @ m)
    drift = {k: float(np.max(np.abs(np.array(v) - v[0]))) for k, v in cands.items()}
    return {"drift": drift, "ts": ts, "xis": xs, "gs": gs}


def energy_drift(alg: LieAlgebra, L: QuadraticLagrangian, xi0, t_final: float, h: float,
                 measure: str = "sup") -> float:
    """Energy error of the RK4 Euler-Poincare orbit up to ``t_final``.

    ``measure="sup"`` is ``max |E(t) - E(0)|`` over the run; ``"end"`` is the
    error at ``t_final`` only, which oscillates and can nearly vanish.
    """
    ts, xs = integrate(lambda x: ep_field(alg, L, x), xi0, t_final, h, output_stride=1)
    E = np.array([L.energy(x) for x in xs])
    if measure == "sup":
        return float(np.max(np.abs(E - E[0])))
    if measure == "end":
        return float(abs(E[-1] - E[0]))
    raise ValueError(f"unknown measure {measure!r}; use 'sup' or 'end'")


# Residual evaluators on sampled curves.

def _uniform_step(ts) -> float:
    ts = np.asarray(ts, dtype=float)
    d = np.diff(ts)
    if len(d) < 5 or np.max(np.abs(d - d[0])) > 1e-9 * abs(d[0]):
        raise ValueError("residuals need at least six uniformly spaced samples")
    return float(d[0])


def ttg_el_residuals(G: MatrixGroup, lag: Callable, ts, gs, xis, xids=None,
                     fiber_step: float = 1e-3, group_step: float = 1e-4) -> dict:
    """Residuals of the TTG Euler-Lagrange pair and of the combined equation.

    ``lag(g, xi, xid)`` is evaluated along the curve. With ``P = dl/dxi``,
    ``Q = dl/dxid`` and ``J = T*_e L_g dl/dg``::

        R1   = (d/dt + ad*_xi) P - J + ad*_xid Q
        R2   = (d/dt + ad*_xi) Q
        Rso  = (d/dt + ad*_xi)(P - dQ/dt) - J

    Time derivatives are fourth-order differences on the grid, so rows near
    the ends are NaN. ``combined = R1 - dR2/dt`` is returned for comparison.
    """
    h = _uniform_step(ts)
    xis = np.asarray(xis, dtype=float)
    xids = grid_derivative(xis, h) if xids is None else np.asarray(xids, dtype=float)
    alg, n = G.algebra, G.dim
    N = len(ts)
    P, Q, J = np.zeros((N, n)), np.zeros((N, n)), np.zeros((N, n))
    eye = np.eye(n)
    for k in range(N):
        g, x, xd = gs[k], xis[k], xids[k]
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xd))):
            P[k] = Q[k] = J[k] = np.nan
            continue
        P[k] = fd_gradient(lambda v: lag(g, v, xd), x, fiber_step)
        Q[k] = fd_gradient(lambda v: lag(g, x, v), xd, fiber_step)
        J[k] = [fd_derivative(lambda s: lag(g @ G.exp(s * eye[i]), x, xd), 0.0, group_step)
                for i in range(n)]
    adx = lambda M: np.array([ad_star(alg, x, m) for x, m in zip(xis, M)])  # noqa: E731
    Pd = grid_derivative(P, h)
    Qd = grid_derivative(Q, h)
    R1 = Pd + adx(P) - J + np.array([ad_star(alg, xd, q) for xd, q in zip(xids, Q)])
    R2 = Qd + adx(Q)
    D = P - Qd
    Rso = grid_derivative(D, h) + adx(D) - J
    return {"R1": R1, "R2": R2, "Rso": Rso, "combined": R1 - grid_derivative(R2, h),
            "P": P, "Q": Q, "J": J}


def matched_el2_residual(pair: MatchedGroupPair, lag: Callable, ts, gs, hs, vs, vds=None,
                         tensors: MatchedPairTensors | None = None,
                         fiber_step: float = 1e-3, group_step: float = 1e-4) -> dict:
    """Both lines of the second-order matched Euler-Lagrange system as residuals.

    ``lag(g, h, v, vd)`` with ``v = (xi, eta)`` concatenated. Returns arrays
    ``line1`` (g*-valued) and ``line2`` (h*-valued) on the grid, together with
    the group lifts used on the right-hand side.
    """
    mp = pair.tensors if tensors is None else tensors
    h = _uniform_step(ts)
    vs = np.asarray(vs, dtype=float)
    vds = grid_derivative(vs, h) if vds is None else np.asarray(vds, dtype=float)
    n, m = pair.G.dim, pair.H.dim
    N = len(ts)
    P, Q = np.zeros((N, n + m)), np.zeros((N, n + m))
    lift_g, sigma, lift_h = np.zeros((N, n)), np.zeros((N, n)), np.zeros((N, m))
    eg, eh = np.eye(n), np.eye(m)
    for k in range(N):
        g, hk, v, vd = gs[k], hs[k], vs[k], vds[k]
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(vd))):
            P[k] = Q[k] = np.nan
            lift_g[k] = sigma[k] = lift_h[k] = np.nan
            continue
        P[k] = fd_gradient(lambda w: lag(g, hk, w, vd), v, fiber_step)
        Q[k] = fd_gradient(lambda w: lag(g, hk, v, w), vd, fiber_step)
        Jg = np.array([fd_derivative(lambda s: lag(g @ pair.G.exp(s * eg[j]), hk, v, vd), 0.0,
                                     group_step) for j in range(n)])
        Mh = np.column_stack([pair.h_on_g_alg(hk, eg[i]) for i in range(n)])
        lift_g[k] = Mh.T @ Jg
        sigma[k] = [fd_derivative(lambda s: lag(g, pair.act_right(hk, pair.G.exp(s * eg[i])), v, vd),
                                  0.0, group_step) for i in range(n)]
        lift_h[k] = [fd_derivative(lambda s: lag(g, hk @ pair.H.exp(s * eh[a]), v, vd), 0.0,
                                   group_step) for a in range(m)]
    D = P - grid_derivative(Q, h)
    coad = matched_coad(mp)
    lhs = grid_derivative(D, h) + np.array([coad(v, d) for v, d in zip(vs, D)])
    return {"line1": lhs[:, :n] - lift_g - sigma, "line2": lhs[:, n:] - lift_h,
            "lift_g": lift_g, "sigma": sigma, "lift_h": lift_h}


def ambient_el2_residual(pair: MatchedGroupPair, lag: Callable, ts, gs, hs, vs, vds=None,
                         fiber_step: float = 1e-3, group_step: float = 1e-4) -> np.ndarray:
    """Second-order Euler-Lagrange residual computed in the ambient group.

    The ambient element is ``g h``; its lift is differentiated along
    ``g h exp(s E_i)`` and refactorized, and ``ad*`` is the ambient one.
    """
    A = pair.ambient

    def amb(mm, v, vd):
        gg, hh = pair.factorize(mm)
        return lag(gg, hh, v, vd)

    ms = np.array([g @ hh for g, hh in zip(gs, hs)])
    r = ttg_el_residuals(A, amb, ts, ms, vs, vds, fiber_step, group_step)
    return r["Rso"]


# Simulation driver used by the command line.

SYSTEMS = ("ep", "mep", "soep", "msoep", "spline", "r3_explicit")


def _initial_state(init, keys: list[tuple[str, int]], rng) -> np.ndarray:
    total = sum(d for _, d in keys)
    if init is None:
        return rng.uniform(-1.0, 1.0, total)
    if isinstance(init, (list, tuple)) or isinstance(init, np.ndarray):
        arr = np.asarray(init, dtype=float)
        if arr.shape != (total,):
            raise ValueError(f"initial state must have length {total}")
        return arr
    parts = []
    for key, d in keys:
        if d == 0:
            continue
        v = np.asarray(init.get(key, np.zeros(d)), dtype=float)
        if v.shape != (d,):
            raise ValueError(f"initial '{key}' must have length {d}")
        parts.append(v)
    return np.concatenate(parts)


def build_simulation(config: dict):
    """Turn a simulation config into ``(field, state0, n, m, order, position)``.

    With ``"position": true`` the state is extended by ``q`` with
    ``q' = (xi, eta)``, a straight integral of the velocity; for abelian
    instances this is the base curve itself.
    """
    from .instances import get_instance

    inst = get_instance(config.get("instance", "su2k"))
    system = config.get("system", "ep")
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")
    rng = np.random.default_rng(int(config.get("seed", 0)))
    mp = inst.tensors
    if config.get("tensors") == "printed":
        if inst.printed_tensors is None:
            raise ValueError(f"instance {inst.name} has no printed tensors")
        mp = inst.printed_tensors
    if "sign_b_star" in config:
        mp = mp.with_sign(int(config["sign_b_star"]))
    n_g = inst.algebra.dim
    matched = system in ("mep", "msoep", "spline", "r3_explicit")
    n, m = (mp.g.dim, mp.h.dim) if matched else (n_g, 0)
    order = 1 if system in ("ep", "mep") else 3
    L = QuadraticLagrangian.from_dict(config.get("lagrangian", {}), n + m)
    keys = [("xi", n), ("eta", m)]
    if order == 3:
        keys += [("xid", n), ("etad", m), ("xidd", n), ("etadd", m)]
    s0 = _initial_state(config.get("initial"), keys, rng)
    flags = config.get("degeneration_flags", {}) or {}
    if system == "ep":
        field = lambda s: ep_field(inst.algebra, L, s)  # noqa: E731
    elif system == "mep":
        field = lambda s: np.concatenate(matched_ep_field(mp, L, s[:n], s[n:]))  # noqa: E731
    elif system == "soep":
        field = lambda s: soep_field(inst.algebra, L, s)  # noqa: E731
    elif system == "msoep":
        zl = bool(flags.get("zero_left_action", False))
        zr = bool(flags.get("zero_right_action", False))
        field = lambda s: matched_soep_field(mp, L, s, zl, zr)  # noqa: E731
    elif system == "spline":
        if inst.name == "su2k":
            raise ValueError("spline system needs a class-2 nilpotent instance")
        branch = config.get("sign_branch", "+")
        form = config.get("form", "bracket")
        field = lambda s: spline_field(inst.algebra, s, branch, form)  # noqa: E731
    else:
        if inst.name != "su2k":
            raise ValueError("r3_explicit is defined for the su2k instance only")
        form = config.get("form", "display")
        field = lambda s: r3_explicit_field(s, L, form)  # noqa: E731
    position = bool(config.get("position", False))
    if position:
        size, base = len(s0), field
        field = lambda s: np.concatenate([base(s[:size]), s[:n + m]])  # noqa: E731
        s0 = np.concatenate([s0, np.zeros(n + m)])
    return field, s0, n, m, order, position


def run_simulation(config: dict) -> Trajectory:
    field, s0, n, m, order, position = build_simulation(config)
    h = float(config.get("h", DEFAULT_DT))
    t_final = float(config.get("t_final", 1.0))
    if not h > 0 or not t_final > 0:
        raise ValueError("h and t_final must be positive")
    stride = int(config.get("output_stride", 10))
    if stride < 1:
        raise ValueError("output_stride must be >= 1")
    ts, ys = integrate(field, s0, t_final, h, stride)
    return Trajectory(ts, ys, n, m, order, position)
