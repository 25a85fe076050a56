"""
Irreducible decompositions and lower bounds on the stationary-state count.

Spins and U(1) charges use doubled integers throughout: a spin-``s`` irrep
has ``dim = 2s + 1`` and a charge ``S^z`` is stored as ``2 S^z``.

For a strong symmetry group whose representation splits into irreps, the
kernel of the Liouvillian contains the algebra generated by the
representation.  Its dimension is the sum of ``D**2`` over *distinct*
irreps, which is what :func:`distinct_irrep_bound` returns.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg as sla

from .operators import DEFAULT_TOL, HilbertSpace, Operator, commutator, embed, max_abs, pauli
from .superop import rank_threshold

__all__ = [
    "IrrepLabel",
    "IrrepDecomposition",
    "EigenbasisResult",
    "CasimirCheck",
    "su2_chain_decompose",
    "network_decompose",
    "hubbard_decompose",
    "distinct_irrep_bound",
    "network_bound",
    "hubbard_bound",
    "casimir_degeneracy",
    "casimir_energy_check",
    "algebra_dimension",
    "simultaneous_eigenbasis",
    "FAMILIES",
    "MAX_ALGEBRA_DIM",
]

log = logging.getLogger(__name__)

FAMILIES = ("SU2", "U1", "SU2xU1", "SymGroup")
MAX_ALGEBRA_DIM = 256


@dataclass(frozen=True, order=True)
class IrrepLabel:
    """Irrep identified by family, dimension, doubled charge and optional tag."""

    family: str
    dim: int
    charge: int = 0
    tag: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown irrep family {self.family!r}")
        if self.dim < 1:
            raise ValueError("irrep dimension must be at least 1")
        if self.family == "SymGroup":
            if self.tag not in ("trivial", "standard"):
                raise ValueError("SymGroup irreps are tagged 'trivial' or 'standard'")
            if self.tag == "trivial" and self.dim != 1:
                raise ValueError("the trivial irrep has dimension 1")

    def __str__(self) -> str:
        text = str(self.dim)
        if self.family in ("U1", "SU2xU1"):
            text += f"_{self.charge}"
        if self.tag:
            text += f"[{self.tag}]"
        return text


@dataclass(frozen=True)
class IrrepDecomposition:
    """Multiset of irreps: label -> multiplicity.

    ``total_dim`` must equal ``sum(multiplicity * label.dim)``.
    """

    labels: Mapping[IrrepLabel, int]
    total_dim: int

    def __post_init__(self):
        clean = {lab: int(m) for lab, m in sorted(self.labels.items()) if m}
        if any(m < 0 for m in clean.values()):
            raise ValueError("multiplicities must be positive")
        counted = sum(m * lab.dim for lab, m in clean.items())
        if counted != self.total_dim:
            raise ValueError(f"irrep dimensions add up to {counted}, expected {self.total_dim}")
        object.__setattr__(self, "labels", clean)

    @classmethod
    def from_counts(cls, labels: Mapping[IrrepLabel, int]) -> "IrrepDecomposition":
        return cls(labels, sum(m * lab.dim for lab, m in labels.items()))

    def multiplicity(self, dim: int, charge: int = 0) -> int:
        return sum(m for lab, m in self.labels.items() if lab.dim == dim and lab.charge == charge)

    def by_dim(self) -> dict[int, int]:
        """Multiplicity per irrep dimension, charges merged."""
        out: Counter[int] = Counter()
        for lab, m in self.labels.items():
            out[lab.dim] += m
        return dict(sorted(out.items(), reverse=True))

    def to_json(self) -> list[dict]:
        return [
            {"family": lab.family, "dim": lab.dim, "charge": lab.charge,
             "tag": lab.tag, "multiplicity": m}
            for lab, m in sorted(self.labels.items(), key=lambda kv: (-kv[0].dim, -kv[0].charge))
        ]

    @classmethod
    def from_json(cls, items: Iterable[Mapping]) -> "IrrepDecomposition":
        counts = {
            IrrepLabel(it["family"], int(it["dim"]), int(it.get("charge", 0)), it.get("tag")):
                int(it["multiplicity"])
            for it in items
        }
        return cls.from_counts(counts)

    def describe(self) -> str:
        """Human-readable direct sum, e.g. ``5 + 3x3 + 2x1``."""
        parts = []
        for lab, m in sorted(self.labels.items(), key=lambda kv: (-kv[0].dim, -kv[0].charge)):
            parts.append(str(lab) if m == 1 else f"{m}x{lab}")
        return " + ".join(parts)


# -- decompositions --------------------------------------------------------------

def _su2_multiplicities(N: int) -> dict[int, int]:
    """Doubled spin -> multiplicity for N spin-1/2 sites."""
    mult = {1: 1}
    for _ in range(N - 1):
        nxt: Counter[int] = Counter()
        for two_s, m in mult.items():
            nxt[two_s + 1] += m
            if two_s > 0:
                nxt[two_s - 1] += m
        mult = dict(nxt)
    return mult


def su2_chain_decompose(N: int) -> IrrepDecomposition:
    """SU(2) content of ``2^{(x)N}``.

    Uses ``m[N, s] = m[N-1, s-1/2] + m[N-1, s+1/2]`` starting from a single
    doublet.
    """
    if N < 1:
        raise ValueError("need at least one site")
    mult = _su2_multiplicities(N)
    return IrrepDecomposition(
        {IrrepLabel("SU2", two_s + 1): m for two_s, m in mult.items()}, 2 ** N
    )


def network_decompose(N: int, free_sites: int) -> IrrepDecomposition:
    """Permutation-group content of the ``(N+1)``-dimensional network space.

    The natural representation on the free sites splits as trivial plus
    standard; the ground state and every bath site carry one more trivial
    copy each.
    """
    n = int(free_sites)
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= free_sites <= N, got {n}")
    labels = {IrrepLabel("SymGroup", 1, tag="trivial"): 1 + (N - n) + 1}
    if n >= 2:
        labels[IrrepLabel("SymGroup", n - 1, tag="standard")] = 1
    return IrrepDecomposition(labels, N + 1)


_HUBBARD_SITE = {
    IrrepLabel("SU2xU1", 2, 0): 1,
    IrrepLabel("SU2xU1", 1, 1): 1,
    IrrepLabel("SU2xU1", 1, -1): 1,
}


def hubbard_decompose(N: int) -> IrrepDecomposition:
    """SU(2) x U(1) content of the N-site dephased Hubbard chain.

    Each site contributes an eta-doublet with zero spin charge and two eta
    singlets with doubled spin charge +1 and -1.
    """
    if N < 1:
        raise ValueError("need at least one site")
    current: Counter[tuple[int, int]] = Counter({(lab.dim, lab.charge): m for lab, m in _HUBBARD_SITE.items()})
    for _ in range(N - 1):
        nxt: Counter[tuple[int, int]] = Counter()
        for (dim, q), m in current.items():
            # eta doublet: Clebsch-Gordan dimension rule
            nxt[(dim + 1, q)] += m
            if dim > 1:
                nxt[(dim - 1, q)] += m
            # spin-carrying singlets: shift the charge
            nxt[(dim, q + 1)] += m
            nxt[(dim, q - 1)] += m
        current = nxt
    return IrrepDecomposition(
        {IrrepLabel("SU2xU1", dim, q): m for (dim, q), m in current.items()}, 4 ** N
    )


# -- bounds ----------------------------------------------------------------------

def distinct_irrep_bound(dec: IrrepDecomposition) -> int:
    """Sum of ``D**2`` over distinct irreps, multiplicities ignored."""
    return sum(lab.dim ** 2 for lab in dec.labels)


def network_bound(n: int) -> int:
    """``(n-1)**2 + 1`` for ``n`` sites not coupled to a bath."""
    if n < 1:
        raise ValueError("need at least one free site")
    return (n - 1) ** 2 + 1


def hubbard_bound(N: int) -> int:
    """Closed form ``sum_{n=1}^{N+1} (N+2-n) n**2``."""
    if N < 1:
        raise ValueError("need at least one site")
    return sum((N + 2 - n) * n * n for n in range(1, N + 2))


@dataclass(frozen=True)
class CasimirCheck:
    """Refined stationary count for Casimir (total-spin) dissipation.

    ``class_sizes`` maps each irrep dimension to the sizes of the groups of
    degenerate energies among its highest-weight states.
    """

    count: int
    energies_distinct: bool
    class_sizes: dict[int, tuple[int, ...]] = field(default_factory=dict)


def _total_spin(N: int) -> tuple[Operator, Operator, Operator, Operator]:
    space = HilbertSpace.uniform(2, N)
    S = [sum((embed(pauli(a), i, space) for i in range(2, N + 1)), embed(pauli(a), 1, space))
         for a in ("x", "y", "z", "+")]
    return tuple(S)


def _cluster_sizes(values: np.ndarray, tol: float) -> tuple[int, ...]:
    if values.size == 0:
        return ()
    values = np.sort(values)
    sizes, run = [], 1
    for a, b in zip(values[:-1], values[1:]):
        if b - a <= tol:
            run += 1
        else:
            sizes.append(run)
            run = 1
    sizes.append(run)
    return tuple(sizes)


def casimir_energy_check(N: int, H: Operator, tol: float = 1e-8) -> CasimirCheck:
    """Count stationary states for ``L = S^2`` dissipation given the Hamiltonian.

    For each spin ``s`` the Hamiltonian is diagonalized on the highest-weight
    states (``S^z = 2s`` in Pauli units, annihilated by ``S^+``).  Each group
    of ``k`` degenerate energies contributes ``k**2 * D**2``.
    """
    Sx, Sy, Sz, Sp = _total_spin(N)
    if H.dim != 2 ** N:
        raise ValueError(f"Hamiltonian has dimension {H.dim}, expected {2 ** N}")
    scale = max(max_abs(H), 1.0)
    for S in (Sx, Sy, Sz):
        if max_abs(commutator(H, S)) > DEFAULT_TOL * scale * max_abs(S):
            raise ValueError("Hamiltonian is not SU(2) symmetric")
    h = H.dense()
    up = np.array([N - bin(i).count("1") for i in range(2 ** N)])  # basis bit 0 = spin up
    sp_mat = Sp.dense()
    mult = _su2_multiplicities(N)
    count = 0
    distinct = True
    classes = {}
    for two_s, m in sorted(mult.items(), reverse=True):
        # Pauli S^z = (#up - #down) = 2s on the top state
        n_up = (N + two_s) // 2
        idx = np.flatnonzero(up == n_up)
        target = np.flatnonzero(up == n_up + 1)
        if target.size:
            raise_op = sp_mat[np.ix_(target, idx)]
            _, s, vh = np.linalg.svd(raise_op)
            rank = int(np.sum(s > 1e-9 * max(s[0], 1.0)))
            hw = vh[rank:].conj().T
        else:
            hw = np.eye(idx.size)
        if hw.shape[1] != m:
            raise RuntimeError(f"found {hw.shape[1]} highest-weight states for 2s={two_s}, expected {m}")
        block = hw.conj().T @ h[np.ix_(idx, idx)] @ hw
        energies = np.linalg.eigvalsh((block + block.conj().T) / 2)
        sizes = _cluster_sizes(energies, tol * scale)
        classes[two_s + 1] = sizes
        distinct &= all(k == 1 for k in sizes)
        count += (two_s + 1) ** 2 * sum(k * k for k in sizes)
    return CasimirCheck(count, distinct, classes)


def casimir_degeneracy(N: int, energy_check: Operator | None = None, tol: float = 1e-8) -> int:
    """Stationary count ``sum_i M_i D_i**2`` for total-spin dissipation.

    Without ``energy_check`` the energies within every irrep are assumed
    distinct.  With a Hamiltonian, degenerate energy classes are accounted
    for (see :func:`casimir_energy_check`) and a warning is logged if the
    distinctness assumption fails.
    """
    if N < 1:
        raise ValueError("need at least one site")
    if energy_check is None:
        return sum(m * (two_s + 1) ** 2 for two_s, m in _su2_multiplicities(N).items())
    check = casimir_energy_check(N, energy_check, tol)
    if not check.energies_distinct:
        log.warning("degenerate energies inside an SU(2) sector: %s", check.class_sizes)
    return check.count


# -- numerical cross-checks ------------------------------------------------------

def algebra_dimension(generators: Sequence[Operator], tol: float = DEFAULT_TOL) -> int:
    """Dimension of the unital associative algebra generated by ``generators``.

    The span of ``{I}`` is repeatedly extended by left products with each
    generator until its rank, measured with the same singular-value rule as
    the kernel computations, stops growing.
    """
    if not generators:
        return 1
    d = generators[0].dim
    if d > MAX_ALGEBRA_DIM:
        raise ValueError(f"dimension {d} exceeds the algebra guard of {MAX_ALGEBRA_DIM}")
    gens = []
    for g in generators:
        if g.dim != d:
            raise ValueError("generators must share one space")
        m = g.dense()
        norm = np.linalg.norm(m, 2)
        if norm > 0:
            # unit spectral norm; products of round-off stay at round-off size
            gens.append(m / norm)
    basis = np.eye(d).reshape(1, -1) / math.sqrt(d)
    rank = 1
    while True:
        cands = []
        for b in basis:
            bm = b.reshape(d, d)
            for g in gens:
                cands.append((g @ bm).reshape(-1))
        stacked = np.vstack([basis] + cands) if cands else basis
        _, s, vh = sla.svd(stacked, full_matrices=False)
        new_rank = int(np.sum(s >= rank_threshold(s[0], d, tol)))
        if new_rank == rank:
            return rank
        rank = new_rank
        basis = vh[:rank]


@dataclass(frozen=True)
class EigenbasisResult:
    """Unitary whose columns diagonalize every input operator.

    ``sector_labels[k]`` is the tuple of eigenvalues of the inputs on
    column ``k``.
    """

    unitary: Operator
    sector_labels: tuple[tuple[float, ...], ...]

    def sectors(self) -> list[tuple[tuple[float, ...], list[int]]]:
        """Contiguous runs of columns sharing a label."""
        out: list[tuple[tuple[float, ...], list[int]]] = []
        for k, lab in enumerate(self.sector_labels):
            if out and out[-1][0] == lab:
                out[-1][1].append(k)
            else:
                out.append((lab, [k]))
        return out


def _split_by_eigenvalues(A: np.ndarray, V: np.ndarray, tol: float):
    """Diagonalize ``V^+ A V`` and group its eigenvectors by eigenvalue."""
    sub = V.conj().T @ A @ V
    sub = (sub + sub.conj().T) / 2
    if V.shape[1] == 1:
        return [(float(np.real(sub[0, 0])), V)]
    w, W = np.linalg.eigh(sub)
    spread = w[-1] - w[0]
    if spread <= tol:
        # A is a scalar here: keep the basis as it is
        return [(float(np.mean(w)), V)]
    groups, start = [], 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol:
            groups.append((float(np.mean(w[start:k])), V @ W[:, start:k]))
            start = k
    return groups


def _fix_phases(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        lead = np.flatnonzero(np.abs(col) > 1e-9 * np.abs(col).max())[0]
        V[:, k] = col * (abs(col[lead]) / col[lead])
    return V


def simultaneous_eigenbasis(ops: Sequence[Operator], tol: float = DEFAULT_TOL) -> EigenbasisResult:
    """Common eigenbasis of commuting Hermitian operators.

    Degenerate subspaces of one operator are refined by the next.  Columns
    are ordered by descending eigenvalue tuple, then by the index of their
    leading nonzero entry; each column's leading entry is real positive.
    """
    if not ops:
        raise ValueError("need at least one operator")
    d = ops[0].dim
    mats = []
    for op in ops:
        if not op.is_hermitian(tol):
            raise ValueError("simultaneous_eigenbasis needs Hermitian operators")
        mats.append(op.dense())
    for i, a in enumerate(ops):
        for b in ops[i + 1:]:
            if max_abs(commutator(a, b)) > tol * max(max_abs(a) * max_abs(b), 1.0):
                raise ValueError("operators do not commute")
    blocks: list[tuple[tuple[float, ...], np.ndarray]] = [((), np.eye(d, dtype=complex))]
    for A in mats:
        scale = max(np.abs(A).max(), 1.0)
        refined = []
        for lab, V in blocks:
            for val, W in _split_by_eigenvalues(A, V, 1e3 * tol * scale):
                refined.append((lab + (round(val, 9) + 0.0,), W))
        blocks = refined
    columns, labels = [], []
    for lab, V in blocks:
        V = _fix_phases(V)
        lead = [int(np.flatnonzero(np.abs(V[:, k]) > 1e-9)[0]) for k in range(V.shape[1])]
        for k in np.argsort(lead, kind="stable"):
            columns.append((tuple(-x for x in lab), lead[k], len(columns)))
            labels.append((lab, V[:, k]))
    order = sorted(range(len(columns)), key=lambda i: columns[i])
    U = np.column_stack([labels[i][1] for i in order])
    return EigenbasisResult(Operator(U, ops[0].space), tuple(labels[i][0] for i in order))
