"""Concrete algebras, groups and matched pairs shipped with the package."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import (LieAlgebra, MatchedPairTensors, StructureError, abelian,
                      recover_primal_actions)
from .groups import (MatchedGroupPair, MatrixGroup, factorize_su2k, k_group, sl2c_group,
                     su2_basis, su2_group, unipotent_group)

K_VEC = np.array([0.0, 0.0, 1.0])
ANTIHERMITIAN_TOL = 1e-10


class UnknownInstance(KeyError):
    pass


def su2_hat(x) -> np.ndarray:
    """``x -> -(i/2) sum_j x_j sigma_j``."""
    return np.tensordot(np.asarray(x, dtype=float), su2_basis(), axes=1)


def su2_vee(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    defect = max(np.max(np.abs(m + m.conj().T)), abs(np.trace(m)))
    if defect > ANTIHERMITIAN_TOL:
        raise ValueError(f"matrix is not anti-Hermitian traceless (defect {defect:.2e})")
    return np.array([-2.0 * m[1, 0].imag, 2.0 * m[1, 0].real, (2j * m[0, 0]).real])


def cross_algebra() -> LieAlgebra:
    """R^3 with the cross product."""
    c = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        c[i, j, k], c[j, i, k] = 1.0, -1.0
    return LieAlgebra(c, name="su(2)")


def rk_algebra(k=K_VEC) -> LieAlgebra:
    """R^3 with ``[Y1, Y2] = k x (Y1 x Y2)``."""
    k = np.asarray(k, dtype=float)
    eye = np.eye(3)
    c = np.array([[np.cross(k, np.cross(eye[i], eye[j])) for j in range(3)] for i in range(3)])
    return LieAlgebra(c, name="R^3_k")


def heisenberg_algebra() -> LieAlgebra:
    c = np.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
    return LieAlgebra(c, name="heisenberg")


def heisenberg_group() -> MatrixGroup:
    basis = np.zeros((3, 3, 3))
    basis[0, 0, 1] = basis[1, 1, 2] = basis[2, 0, 2] = 1.0
    return unipotent_group("Heisenberg", basis)


def abelian_group(n: int) -> MatrixGroup:
    basis = np.zeros((n, n + 1, n + 1))
    for i in range(n):
        basis[i, i, n] = 1.0
    return unipotent_group(f"R^{n}", basis)


def splitting_tensors(ambient: MatrixGroup, g: LieAlgebra, h: LieAlgebra,
                      sign_b_star: int = 1) -> MatchedPairTensors:
    """Mutual actions read off from ``[f_a, e_i] = f_a |> e_i + f_a <| e_i``.

    The ambient basis must list the g-basis first, then the h-basis.
    """
    n, m = g.dim, h.dim
    B = ambient.basis
    L = np.zeros((m, n, n))
    R = np.zeros((m, n, m))
    for a in range(m):
        for i in range(n):
            v = ambient.vee(B[n + a] @ B[i] - B[i] @ B[n + a])
            L[a, i], R[a, i] = v[:n], v[n:]
    return MatchedPairTensors(g, h, L, R, sign_b_star=sign_b_star, name="su2k")


def printed_duals(k=K_VEC) -> dict:
    """The four dual actions of the su(2)/K pair in their closed forms."""
    k = np.asarray(k, dtype=float)
    return {
        "coright": lambda phi, y: np.dot(y, k) * phi - np.dot(phi, k) * y,
        "coleft": lambda x, psi: np.cross(psi, x),
        "b_star": lambda x, phi: np.dot(phi, k) * x - np.dot(phi, x) * k,
        "a_star": lambda y, psi: np.cross(y, psi),
    }


def nilpotent_selfpair(desc: LieAlgebra, tol: float = 1e-12) -> MatchedPairTensors:
    """Self-pairing of a class-2 nilpotent algebra by the adjoint action.

    ``eta |> xi = -[eta, xi]`` and ``eta <| xi = [eta, xi]``; every multiple of
    ``ad`` satisfies the compatibility identities in class 2. The closed-form
    coadjoint operator used for 2-splines is not the coadjoint action of any
    antisymmetric bracket, so no choice of tensors reproduces it exactly; this
    one (with ``sign_b_star = -1``) is among those closest to it on basis pairs.
    """
    c = desc.c
    nested = np.einsum("ijl,lkm->ijkm", c, c)
    if np.max(np.abs(nested), initial=0.0) > tol:
        raise StructureError("algebra is not nilpotent of class 2")
    L = -c
    R = c.copy()
    return MatchedPairTensors(desc, desc, L, R, sign_b_star=-1, name=f"{desc.name} self-pair")


def zero_pair(g: LieAlgebra, h: LieAlgebra) -> MatchedPairTensors:
    return MatchedPairTensors(g, h, np.zeros((h.dim, g.dim, g.dim)),
                              np.zeros((h.dim, g.dim, h.dim)), name=f"{g.name}x{h.name}")


@dataclass(frozen=True, eq=False)
class Instance:
    """A named algebra with an optional matrix group and matched pair.

    ``tensors`` are the structural mutual actions (a genuine matched pair);
    ``printed_tensors`` hold an alternative set, where one exists, recovered
    from closed-form dual actions.
    """

    name: str
    algebra: LieAlgebra
    group: MatrixGroup | None
    tensors: MatchedPairTensors
    pair: MatchedGroupPair | None = None
    printed_tensors: MatchedPairTensors | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def is_abelian(self) -> bool:
        return not np.any(self.algebra.c)


@lru_cache(maxsize=None)
def su2k() -> Instance:
    G, H, A = su2_group(), k_group(), sl2c_group()
    g, h = cross_algebra(), rk_algebra()
    genuine = splitting_tensors(A, g, h, sign_b_star=1)
    d = printed_duals()
    printed = recover_primal_actions(g, h, d["coright"], d["coleft"], d["a_star"], d["b_star"])
    printed = MatchedPairTensors(g, h, printed.act_left, printed.act_right,
                                 printed.sign_b_star, name="su2k printed")
    pair = MatchedGroupPair(G, H, A, factorize_su2k, genuine)
    return Instance("su2k", g, G, genuine, pair, printed)


@lru_cache(maxsize=None)
def heisenberg() -> Instance:
    alg = heisenberg_algebra()
    return Instance("heisenberg", alg, heisenberg_group(), nilpotent_selfpair(alg),
                    notes=("identity metric is not bi-invariant; spline results are "
                           "convention-dependent",))


@lru_cache(maxsize=None)
def abelian_instance(n: int) -> Instance:
    if n < 1:
        raise UnknownInstance(f"abelian dimension must be >= 1, got {n}")
    alg = abelian(n)
    return Instance(f"abelian:{n}", alg, abelian_group(n), zero_pair(alg, alg))


INSTANCE_NAMES = ("su2k", "heisenberg", "abelian:<n>")


def get_instance(name: str) -> Instance:
    if name == "su2k":
        return su2k()
    if name == "heisenberg":
        return heisenberg()
    if name.startswith("abelian:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError:
            raise UnknownInstance(name) from None
        return abelian_instance(n)
    raise UnknownInstance(name)
