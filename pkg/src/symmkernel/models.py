"""
Builders for the three model families and their symmetry generators.

* Fully connected exciton network with ground state ``|0>`` and sites
  ``|1> .. |N>``; some sites exchange excitons with baths.
* Open XXX Heisenberg chain (Pauli convention) with either random
  SU(2)-invariant two-body dissipation or total-spin (Casimir) dissipation.
* One-dimensional open Hubbard chain with local spin dephasing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .operators import (
    HilbertSpace,
    Operator,
    basis_projector,
    embed,
    identity,
    jordan_wigner,
    pauli,
    zeros,
)
from .superop import OpenSystem

__all__ = [
    "NetworkParams",
    "HubbardParams",
    "RandomDissipationSpec",
    "GENERATOR_NAME",
    "DEFAULT_BATH_COUPLINGS",
    "network_space",
    "network_system",
    "exchange_operator",
    "network_symmetry_basis",
    "xxx_hamiltonian",
    "spin_exchange",
    "xxx_system_random",
    "xxx_system_casimir",
    "total_spin_ops",
    "total_spin_casimir",
    "hubbard_mode",
    "hubbard_annihilators",
    "hubbard_number_ops",
    "hubbard_symmetry_ops",
    "hubbard_hamiltonian",
    "hubbard_system",
    "SITE_ORDER_PAIR_FIRST",
]

GENERATOR_NAME = "numpy.random.Generator(PCG64)"

# (mu_minus, mu_plus) per bath, in the order baths are listed
DEFAULT_BATH_COUPLINGS = ((0.6, 0.3), (0.2, 0.5), (0.2, 0.8))


# -- quantum network -------------------------------------------------------------

@dataclass(frozen=True)
class NetworkParams:
    """Network size, energies and baths.

    ``baths`` holds ``(site, mu_plus, mu_minus)`` triples.
    """

    N: int
    baths: tuple[tuple[int, float, float], ...] = ()
    eps_g: float = 0.0
    eps: float = 10.0
    h: float = 20.0

    def __post_init__(self):
        baths = tuple((int(s), float(mp), float(mm)) for s, mp, mm in self.baths)
        object.__setattr__(self, "baths", baths)
        if self.N < 2:
            raise ValueError("network needs at least two sites")
        sites = [s for s, _, _ in baths]
        if len(set(sites)) != len(sites):
            raise ValueError("bath sites must be distinct")
        if any(not 1 <= s <= self.N for s in sites):
            raise ValueError(f"bath sites must lie in 1..{self.N}")

    @property
    def bath_sites(self) -> tuple[int, ...]:
        return tuple(s for s, _, _ in self.baths)

    @property
    def free_sites(self) -> tuple[int, ...]:
        taken = set(self.bath_sites)
        return tuple(i for i in range(1, self.N + 1) if i not in taken)

    @classmethod
    def with_baths(cls, N: int, bath_sites, **energies) -> "NetworkParams":
        """Baths on ``bath_sites`` with the default couplings, cycled if needed."""
        baths = []
        for k, site in enumerate(bath_sites):
            mu_minus, mu_plus = DEFAULT_BATH_COUPLINGS[k % len(DEFAULT_BATH_COUPLINGS)]
            baths.append((site, mu_plus, mu_minus))
        return cls(N, tuple(baths), **energies)

    @classmethod
    def table_default(cls, N: int) -> "NetworkParams":
        """Two baths on the last two sites."""
        return cls.with_baths(N, (N - 1, N))

    @classmethod
    def figure_default(cls) -> "NetworkParams":
        """Twelve sites, baths on 10, 11 and 12."""
        return cls.with_baths(12, (10, 11, 12))


def network_space(N: int) -> HilbertSpace:
    return HilbertSpace.single(N + 1, [str(i) for i in range(N + 1)])


def network_system(p: NetworkParams) -> OpenSystem:
    """Exciton network: ``|0>`` ground state, ``|i>`` exciton on site ``i``.

    Each bath on site ``j`` contributes ``mu_plus |j><0|`` and
    ``mu_minus |0><j|`` with unit rate.
    """
    space = network_space(p.N)
    d = p.N + 1
    H = np.full((d, d), p.h, dtype=float)
    np.fill_diagonal(H, p.eps)
    H[0, :] = 0.0
    H[:, 0] = 0.0
    H[0, 0] = p.eps_g
    jumps = []
    for site, mu_plus, mu_minus in p.baths:
        jumps.append((basis_projector(site, 0, space) * mu_plus, 1.0))
        jumps.append((basis_projector(0, site, space) * mu_minus, 1.0))
    return OpenSystem(Operator(H, space), tuple(jumps))


def exchange_operator(i: int, j: int, N: int) -> Operator:
    """Site exchange ``I - |i><i| - |j><j| + |i><j| + |j><i|``."""
    if not 1 <= i < j <= N:
        raise ValueError(f"need 1 <= i < j <= {N}, got ({i}, {j})")
    space = network_space(N)
    P = np.eye(N + 1)
    P[i, i] = P[j, j] = 0.0
    P[i, j] = P[j, i] = 1.0
    return Operator(P, space)


def network_symmetry_basis(N: int, free_sites) -> Operator:
    """Unitary from the configuration basis to the permutation-adapted basis.

    Column order: ``psi_1 .. psi_{n-1}``, ``phi_t``, ``|0>``, then the
    remaining (bath) sites in ascending order.  ``phi_t`` is the uniform
    superposition over the free sites; the ``psi_k`` are the remaining
    columns of the Householder reflection that maps the first free site onto
    ``phi_t``, so they are orthonormal and sum-zero.
    """
    free = sorted(int(s) for s in free_sites)
    if not free:
        raise ValueError("need at least one free site")
    if len(set(free)) != len(free) or any(not 1 <= s <= N for s in free):
        raise ValueError(f"free sites must be distinct and lie in 1..{N}")
    n = len(free)
    e1 = np.zeros(n)
    e1[0] = 1.0
    phi = np.full(n, 1.0 / math.sqrt(n))
    v = e1 - phi
    if np.linalg.norm(v) < 1e-14:
        R = np.eye(n)
    else:
        R = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    # R e1 = phi; columns 2..n are orthogonal to phi and sum to zero
    U = np.zeros((N + 1, N + 1))
    for k in range(1, n):
        U[free, k - 1] = R[:, k]
    U[free, n - 1] = phi
    U[0, n] = 1.0
    rest = [s for s in range(1, N + 1) if s not in set(free)]
    for k, s in enumerate(rest):
        U[s, n + 1 + k] = 1.0
    labels = [f"psi_{k}" for k in range(1, n)] + ["phi_t", "0"] + [str(s) for s in rest]
    return Operator(U, HilbertSpace.single(N + 1, labels))


# -- XXX chain -------------------------------------------------------------------

@dataclass(frozen=True)
class RandomDissipationSpec:
    """Number of random jump operators and the seed that draws them."""

    num_jumps: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.num_jumps < 1:
            raise ValueError("need at least one jump operator")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def coupling_matrices(self, N: int) -> list[np.ndarray]:
        """``N x N`` complex matrices with real and imaginary parts uniform on [-1, 1]."""
        rng = np.random.Generator(np.random.PCG64(self.seed))
        mats = []
        for _ in range(self.num_jumps):
            re = rng.uniform(-1.0, 1.0, size=(N, N))
            im = rng.uniform(-1.0, 1.0, size=(N, N))
            mats.append(re + 1j * im)
        return mats


@lru_cache(maxsize=64)
def spin_exchange(i: int, j: int, N: int) -> Operator:
    """``sigma_i . sigma_j`` on N qubits (``3 I`` when ``i == j``)."""
    space = HilbertSpace.uniform(2, N)
    total = zeros(space)
    for a in ("x", "y", "z"):
        total = total + embed(pauli(a), i, space) @ embed(pauli(a), j, space)
    return total


def xxx_hamiltonian(N: int) -> Operator:
    """Open-chain ``sum_{i<N} sigma_i . sigma_{i+1}``."""
    if N < 2:
        raise ValueError("XXX chain needs at least two sites")
    H = spin_exchange(1, 2, N)
    for i in range(2, N):
        H = H + spin_exchange(i, i + 1, N)
    return H


def xxx_system_random(N: int, spec: RandomDissipationSpec = RandomDissipationSpec()) -> OpenSystem:
    """XXX chain with jumps ``L_l = sum_{i,j} M_l[i,j] sigma_i . sigma_j``.

    The sum runs over all ordered pairs including ``i == j``; every rate is 1.
    """
    H = xxx_hamiltonian(N)
    jumps = []
    for M in spec.coupling_matrices(N):
        L = zeros(H.space)
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                L = L + spin_exchange(i, j, N) * complex(M[i - 1, j - 1])
        jumps.append((L, 1.0))
    return OpenSystem(H, tuple(jumps))


def total_spin_ops(N: int) -> tuple[Operator, Operator, Operator]:
    """Pauli sums ``S^a = sum_i sigma_i^a`` for ``a = x, y, z``."""
    space = HilbertSpace.uniform(2, N)
    out = []
    for a in ("x", "y", "z"):
        S = embed(pauli(a), 1, space)
        for i in range(2, N + 1):
            S = S + embed(pauli(a), i, space)
        out.append(S)
    return tuple(out)


def total_spin_casimir(N: int) -> Operator:
    Sx, Sy, Sz = total_spin_ops(N)
    return Sx @ Sx + Sy @ Sy + Sz @ Sz


def xxx_system_casimir(N: int, gamma: float = 1.0) -> OpenSystem:
    """XXX chain with the single jump ``L = S^2`` at rate ``gamma``."""
    return OpenSystem(xxx_hamiltonian(N), ((total_spin_casimir(N), gamma),))


# -- Hubbard chain ---------------------------------------------------------------

@dataclass(frozen=True)
class HubbardParams:
    """Hubbard chain parameters.

    ``interaction`` selects ``U sum (n_up - 1/2)(n_dn - 1/2)`` (``"symmetric"``,
    the default, which commutes with the eta operators) or the bare
    ``U sum n_up n_dn`` (``"bare"``).  The two differ by ``U/2`` times the
    total particle number plus a constant.
    """

    N: int
    t_hop: float = 1.0
    U: float = 2.0
    gamma: float = 1.0
    interaction: str = field(default="symmetric")

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("need at least one site")
        if self.gamma < 0:
            raise ValueError("dephasing rate must be nonnegative")
        if self.interaction not in ("symmetric", "bare"):
            raise ValueError("interaction must be 'symmetric' or 'bare'")


# basis permutation (vac, up-down, down, up) of one site in occupation order
SITE_ORDER_PAIR_FIRST = (0, 3, 1, 2)


def hubbard_mode(i: int, spin: str) -> int:
    """Mode index: ``2i - 1`` for spin up, ``2i`` for spin down."""
    if spin not in ("up", "down"):
        raise ValueError("spin must be 'up' or 'down'")
    return 2 * i - 1 if spin == "up" else 2 * i


def _hubbard_space(N: int) -> HilbertSpace:
    return HilbertSpace.uniform(4, N)


@lru_cache(maxsize=8)
def hubbard_annihilators(N: int) -> dict[tuple[int, str], Operator]:
    """Jordan-Wigner ``c_{i,sigma}`` on the ``4^N`` space."""
    space = _hubbard_space(N)
    return {
        (i, s): jordan_wigner(hubbard_mode(i, s), 2 * N).with_space(space)
        for i in range(1, N + 1) for s in ("up", "down")
    }


def _numbers(N: int) -> dict[tuple[int, str], Operator]:
    c = hubbard_annihilators(N)
    return {k: v.dag() @ v for k, v in c.items()}


def hubbard_number_ops(N: int) -> tuple[Operator, Operator]:
    """Total ``N_up`` and ``N_down``; both diagonal."""
    n = _numbers(N)
    space = _hubbard_space(N)
    up, dn = zeros(space), zeros(space)
    for i in range(1, N + 1):
        up = up + n[i, "up"]
        dn = dn + n[i, "down"]
    return up, dn


def hubbard_symmetry_ops(N: int) -> dict[str, Operator]:
    """Spin and eta generators.

    Keys ``S+ S- Sz Sx Sy`` and ``eta+ eta- etaz etax etay``.  ``S^z`` and
    ``eta^z`` carry the factor 1/2; ``eta^+`` uses the staggering
    ``(-1)^i`` with sites counted from 1.
    """
    c = hubbard_annihilators(N)
    n = _numbers(N)
    space = _hubbard_space(N)
    eye = identity(space)
    Sp, Sz, etap, etaz = zeros(space), zeros(space), zeros(space), zeros(space)
    for i in range(1, N + 1):
        cu, cd = c[i, "up"], c[i, "down"]
        Sp = Sp + cu.dag() @ cd
        Sz = Sz + (n[i, "up"] - n[i, "down"]) * 0.5
        etap = etap + cu.dag() @ cd.dag() * (-1) ** i
        etaz = etaz + (n[i, "up"] + n[i, "down"] - eye) * 0.5
    Sm, etam = Sp.dag(), etap.dag()
    return {
        "S+": Sp, "S-": Sm, "Sz": Sz,
        "Sx": (Sp + Sm) * 0.5, "Sy": (Sp - Sm) * -0.5j,
        "eta+": etap, "eta-": etam, "etaz": etaz,
        "etax": (etap + etam) * 0.5, "etay": (etap - etam) * -0.5j,
    }


def hubbard_hamiltonian(p: HubbardParams) -> Operator:
    """Nearest-neighbour hopping on an open chain plus on-site interaction."""
    c = hubbard_annihilators(p.N)
    n = _numbers(p.N)
    space = _hubbard_space(p.N)
    eye = identity(space)
    H = zeros(space)
    for i in range(1, p.N):
        for s in ("up", "down"):
            hop = c[i, s].dag() @ c[i + 1, s]
            H = H + (hop + hop.dag()) * (-p.t_hop)
    shift = 0.5 if p.interaction == "symmetric" else 0.0
    for i in range(1, p.N + 1):
        H = H + (n[i, "up"] - eye * shift) @ (n[i, "down"] - eye * shift) * p.U
    return H


def hubbard_system(p: HubbardParams) -> OpenSystem:
    """Hubbard chain with jumps ``s^z_l = (n_{l,up} - n_{l,down}) / 2`` at rate gamma."""
    if p.U == 0:
        warnings.warn(
            "U = 0 adds symmetry beyond SU(2) x U(1); the degeneracy may exceed the bound",
            stacklevel=2,
        )
    n = _numbers(p.N)
    jumps = tuple(((n[i, "up"] - n[i, "down"]) * 0.5, p.gamma) for i in range(1, p.N + 1))
    return OpenSystem(hubbard_hamiltonian(p), jumps)
