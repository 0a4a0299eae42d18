"""Lie algebras by structure constants and matched pairs of Lie algebras.

Vectors and covectors share one coordinate representation; the pairing is the
Euclidean dot product, so every dual map below is a plain matrix transpose.

Index conventions::

    [e_i, e_j]      = sum_k c[i, j, k] e_k
    f_a |> e_i      = sum_j L[a, i, j] e_j     (h acting on g)
    f_a <| e_i      = sum_b R[a, i, b] f_b     (g acting on h)
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .kernel import uniform
from .report import SuiteReport

STRUCTURE_TOL = 1e-12


class StructureError(ValueError):
    """Structure constants or action tensors violate a Lie-theoretic identity."""


class InconsistentDuals(ValueError):
    """Supplied dual maps are not the transposes of any bilinear action."""


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    c: np.ndarray
    metric: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[1] != c.shape[2]:
            raise StructureError(f"structure constants must have shape (n, n, n), got {c.shape}")
        n = c.shape[0]
        metric = np.eye(n) if self.metric is None else np.array(self.metric, dtype=float)
        if metric.shape != (n, n):
            raise StructureError("metric shape does not match dimension")
        if not np.allclose(metric, metric.T, atol=1e-14):
            raise StructureError("metric must be symmetric")
        if np.any(np.linalg.eigvalsh(metric) <= 0):
            raise StructureError("metric must be positive definite")
        c.setflags(write=False)
        metric.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "metric", metric)
        anti = np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0)
        if anti > STRUCTURE_TOL:
            raise StructureError(f"structure constants not antisymmetric (residual {anti:.2e})")
        jac = jacobi_residual(c)
        if jac > STRUCTURE_TOL:
            raise StructureError(f"Jacobi identity fails (residual {jac:.2e})")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def bracket(self, x, y) -> np.ndarray:
        return bracket(self, x, y)

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad_x`` acting on coordinate columns."""
        return np.einsum("i,ijk->kj", _vec(x, self.dim), self.c)

    def ad_star(self, x, mu) -> np.ndarray:
        return ad_star(self, x, mu)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "c": self.c.tolist(), "metric": self.metric.tolist()}

    @classmethod
    def from_dict(cls, d: dict, name: str = "") -> "LieAlgebra":
        alg = cls(np.array(d["c"], dtype=float), d.get("metric"), name=name)
        if "dim" in d and int(d["dim"]) != alg.dim:
            raise StructureError("declared dim does not match structure constants")
        return alg


def jacobi_residual(c: np.ndarray) -> float:
    # [[e_i,e_j],e_k] + cyclic, as a tensor J[i,j,k,m]
    t = np.einsum("ijl,lkm->ijkm", c, c)
    jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(jac), initial=0.0))


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra(np.zeros((n, n, n)), name=f"R^{n}")


def _vec(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {x.shape}")
    return x


def bracket(desc: LieAlgebra, x, y) -> np.ndarray:
    n = desc.dim
    return np.einsum("i,j,ijk->k", _vec(x, n), _vec(y, n), desc.c)


def ad_star(desc: LieAlgebra, x, mu) -> np.ndarray:
    """Coadjoint action, fixed by <ad*_x mu, z> = -<mu, [x, z]>."""
    n = desc.dim
    return -np.einsum("i,ijk,k->j", _vec(x, n), desc.c, _vec(mu, n))


def flat(desc: LieAlgebra, x) -> np.ndarray:
    return desc.metric @ _vec(x, desc.dim)


def sharp(desc: LieAlgebra, mu) -> np.ndarray:
    return np.linalg.solve(desc.metric, _vec(mu, desc.dim))


@dataclass(frozen=True, eq=False)
class MatchedPairTensors:
    """Mutual actions of a matched pair of Lie algebras as coefficient arrays.

    ``sign_b_star`` multiplies the transpose of ``b_x(y) = y |> x``. The
    default of -1 reproduces the dual maps as written for the su(2)/K example;
    +1 is the plain transpose (see ``verify.sign_resolution``).
    """

    g: LieAlgebra
    h: LieAlgebra
    act_left: np.ndarray
    act_right: np.ndarray
    sign_b_star: int = -1
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n, m = self.g.dim, self.h.dim
        L = np.array(self.act_left, dtype=float)
        R = np.array(self.act_right, dtype=float)
        if L.shape != (m, n, n):
            raise StructureError(f"act_left must have shape {(m, n, n)}, got {L.shape}")
        if R.shape != (m, n, m):
            raise StructureError(f"act_right must have shape {(m, n, m)}, got {R.shape}")
        if self.sign_b_star not in (1, -1):
            raise StructureError("sign_b_star must be +1 or -1")
        L.setflags(write=False)
        R.setflags(write=False)
        object.__setattr__(self, "act_left", L)
        object.__setattr__(self, "act_right", R)

    @property
    def dims(self) -> tuple[int, int]:
        return self.g.dim, self.h.dim

    def left(self, eta, xi) -> np.ndarray:
        """``eta |> xi`` in g."""
        return np.einsum("a,i,aij->j", eta, xi, self.act_left)

    def right(self, eta, xi) -> np.ndarray:
        """``eta <| xi`` in h."""
        return np.einsum("a,i,aib->b", eta, xi, self.act_right)

    def with_sign(self, sign: int) -> "MatchedPairTensors":
        return replace(self, sign_b_star=sign, _cache={})

    def zeroed(self, left: bool = False, right: bool = False) -> "MatchedPairTensors":
        """Copy with the left (|>) and/or right (<|) action set to zero."""
        L = np.zeros_like(self.act_left) if left else self.act_left
        R = np.zeros_like(self.act_right) if right else self.act_right
        return replace(self, act_left=L, act_right=R, _cache={})

    def descriptor(self) -> LieAlgebra:
        """The double cross sum as a single algebra on g + h (validated)."""
        return LieAlgebra(dcs_structure_constants(self), name=f"{self.g.name}><{self.h.name}")

    def to_dict(self) -> dict:
        return {"g": self.g.to_dict(), "h": self.h.to_dict(),
                "act_left": self.act_left.tolist(), "act_right": self.act_right.tolist(),
                "sign_b_star": self.sign_b_star}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "MatchedPairTensors":
        return cls(LieAlgebra.from_dict(d["g"]), LieAlgebra.from_dict(d["h"]),
                   np.array(d["act_left"], dtype=float), np.array(d["act_right"], dtype=float),
                   int(d.get("sign_b_star", -1)))

    @classmethod
    def from_json(cls, text: str) -> "MatchedPairTensors":
        return cls.from_dict(json.loads(text))


def dcs_bracket(mp: MatchedPairTensors, u, v) -> tuple[np.ndarray, np.ndarray]:
    """Bracket on g + h twisted by the mutual actions."""
    n, m = mp.dims
    x, a = _vec(u[0], n), _vec(u[1], m)
    y, b = _vec(v[0], n), _vec(v[1], m)
    g_part = bracket(mp.g, x, y) + mp.left(a, y) - mp.left(b, x)
    h_part = bracket(mp.h, a, b) + mp.right(a, y) - mp.right(b, x)
    return g_part, h_part


def dcs_structure_constants(mp: MatchedPairTensors) -> np.ndarray:
    n, m = mp.dims
    N = n + m
    c = np.zeros((N, N, N))
    eye = np.eye(N)
    for i in range(N):
        for j in range(N):
            gp, hp = dcs_bracket(mp, (eye[i, :n], eye[i, n:]), (eye[j, :n], eye[j, n:]))
            c[i, j] = np.concatenate([gp, hp])
    return c


@dataclass(frozen=True)
class DualMaps:
    """The four transposed actions used by the matched equations of motion.

    coright(mu, eta)  -> g*   ``mu <|* eta``,  <mu <|* eta, x> = <mu, eta |> x>
    coleft(xi, nu)    -> h*   ``xi |>* nu``,   <xi |>* nu, y> = <nu, y <| xi>
    a_star(eta, nu)   -> g*   transpose of x -> eta <| x
    b_star(xi, mu)    -> h*   sign_b_star * transpose of y -> y |> xi
    """

    coright: Callable
    coleft: Callable
    a_star: Callable
    b_star: Callable


def dual_action_maps(mp: MatchedPairTensors) -> DualMaps:
    L, R, s = mp.act_left, mp.act_right, mp.sign_b_star
    return DualMaps(
        coright=lambda mu, eta: np.einsum("a,aij,j->i", eta, L, mu),
        coleft=lambda xi, nu: np.einsum("i,aib,b->a", xi, R, nu),
        a_star=lambda eta, nu: np.einsum("a,aib,b->i", eta, R, nu),
        b_star=lambda xi, mu: s * np.einsum("i,aij,j->a", xi, L, mu),
    )


def recover_primal_actions(g: LieAlgebra, h: LieAlgebra, coright: Callable, coleft: Callable,
                           a_star: Callable | None = None, b_star: Callable | None = None,
                           tol: float = 1e-10) -> MatchedPairTensors:
    """Invert the transposition relations basis-wise.

    ``coright`` and ``coleft`` determine the primal tensors. If ``a_star`` is
    given it must be their transpose to ``tol``; ``b_star`` must equal the
    transpose up to an overall sign, which becomes ``sign_b_star``.
    """
    n, m = g.dim, h.dim
    eg, eh = np.eye(n), np.eye(m)
    L = np.zeros((m, n, n))
    R = np.zeros((m, n, m))
    for a in range(m):
        for i in range(n):
            for j in range(n):
                # <e_j, f_a |> e_i> = <e_j <|* f_a, e_i>
                L[a, i, j] = np.asarray(coright(eg[j], eh[a]), dtype=float)[i]
            for b in range(m):
                # <f_b, f_a <| e_i> = <e_i |>* f_b, f_a>
                R[a, i, b] = np.asarray(coleft(eg[i], eh[b]), dtype=float)[a]
    sign = -1
    if a_star is not None:
        worst = 0.0
        for a in range(m):
            for b in range(m):
                got = np.asarray(a_star(eh[a], eh[b]), dtype=float)
                worst = max(worst, np.max(np.abs(got - R[a, :, b])))
        if worst > tol:
            raise InconsistentDuals(f"a_star is not the transpose of <| (residual {worst:.2e})")
    if b_star is not None:
        res = {}
        for s in (1, -1):
            worst = 0.0
            for i in range(n):
                for j in range(n):
                    got = np.asarray(b_star(eg[i], eg[j]), dtype=float)
                    worst = max(worst, np.max(np.abs(got - s * L[:, i, j])))
            res[s] = worst
        ok = [s for s in (1, -1) if res[s] <= tol]
        if not ok:
            raise InconsistentDuals(f"b_star is not +/- the transpose of |> (residuals {res})")
        sign = ok[0]
    return MatchedPairTensors(g, h, L, R, sign_b_star=sign)


def matched_axiom_residuals(mp: MatchedPairTensors, x1, x2, y1, y2) -> tuple[float, float]:
    """Residuals of the two compatibility identities at one sample.

    eta |> [x, x~] = [eta|>x, x~] + [x, eta|>x~] + (eta<|x)|>x~ - (eta<|x~)|>x
    [eta, eta~] <| x = [eta, eta~<|x] + [eta<|x, eta~] + eta<|(eta~|>x) - eta~<|(eta|>x)
    """
    g, h = mp.g, mp.h
    lhs1 = mp.left(y1, bracket(g, x1, x2))
    rhs1 = (bracket(g, mp.left(y1, x1), x2) + bracket(g, x1, mp.left(y1, x2))
            + mp.left(mp.right(y1, x1), x2) - mp.left(mp.right(y1, x2), x1))
    lhs2 = mp.right(bracket(h, y1, y2), x1)
    rhs2 = (bracket(h, y1, mp.right(y2, x1)) + bracket(h, mp.right(y1, x1), y2)
            + mp.right(y1, mp.left(y2, x1)) - mp.right(y2, mp.left(y1, x1)))
    return float(np.max(np.abs(lhs1 - rhs1))), float(np.max(np.abs(lhs2 - rhs2)))


def check_matched_axioms(mp: MatchedPairTensors, samples: int = 100, seed: int = 0,
                         tol: float = 1e-12, instance: str = "") -> SuiteReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rep = SuiteReport("matched_axioms", instance or mp.name, samples, seed, tol)
    n, m = mp.dims
    eg, eh = np.eye(n), np.eye(m)
    for i in range(n):
        for j in range(n):
            for a in range(m):
                for b in range(m):
                    r1, r2 = matched_axiom_residuals(mp, eg[i], eg[j], eh[a], eh[b])
                    rep.observe(r1, {"basis": [i, j, a, b]}, "left_identity")
                    rep.observe(r2, {"basis": [i, j, a, b]}, "right_identity")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        x1, x2 = uniform(rng, n), uniform(rng, n)
        y1, y2 = uniform(rng, m), uniform(rng, m)
        r1, r2 = matched_axiom_residuals(mp, x1, x2, y1, y2)
        inputs = {"xi": x1, "xi_t": x2, "eta": y1, "eta_t": y2}
        rep.observe(r1, inputs, "left_identity")
        rep.observe(r2, inputs, "right_identity")
    return rep


def dcs_jacobi_residual(mp: MatchedPairTensors, u, v, w) -> float:
    def add(p, q):
        return p[0] + q[0], p[1] + q[1]

    br = lambda p, q: dcs_bracket(mp, p, q)  # noqa: E731
    j = add(add(br(u, br(v, w)), br(v, br(w, u))), br(w, br(u, v)))
    return float(max(np.max(np.abs(j[0])), np.max(np.abs(j[1]))))


def dcs_ad_star(mp: MatchedPairTensors, u, w) -> tuple[np.ndarray, np.ndarray]:
    """Coadjoint action on (g + h)* assembled from the transposed actions.

    ``(ad*_xi mu - mu <|* eta - a*_eta nu, ad*_eta nu + xi |>* nu + b*_xi mu)``
    With ``sign_b_star = +1`` this is the coadjoint action of ``dcs_bracket``.
    """
    x, a = u
    mu, nu = w
    d = dual_action_maps(mp)
    g_part = ad_star(mp.g, x, mu) - d.coright(mu, a) - d.a_star(a, nu)
    h_part = ad_star(mp.h, a, nu) + d.coleft(x, nu) + d.b_star(x, mu)
    return g_part, h_part
