"""
Liouvillian superoperators, strong symmetries and kernel dimensions.

Density matrices are vectorized row-major: ``|i><j|`` maps to component
``i*d + j``.  With that convention ``vec(A rho B) = (A kron B^T) vec(rho)``
and the Lindblad generator

    L(rho) = -i[H, rho] + sum_l gamma_l (2 L_l rho L_l^+ - {L_l^+ L_l, rho})

has the matrix

    -i(H x I - I x H^T) + sum_l gamma_l (2 L_l x conj(L_l) - L_l^+L_l x I - I x (L_l^+L_l)^T).

Kernel dimensions are read off singular values because the Liouvillian is
not normal.  A singular value counts as zero when it falls below
``tol * sigma_max * d`` with ``d`` the Hilbert-space dimension.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .operators import DEFAULT_TOL, Operator, commutator, max_abs

__all__ = [
    "BudgetError",
    "SymmetryError",
    "OpenSystem",
    "SuperOperator",
    "SectorBlock",
    "KernelResult",
    "SectorNullity",
    "NumericDegeneracy",
    "vectorize",
    "devectorize",
    "liouvillian",
    "adjoint_liouvillian",
    "apply_liouvillian",
    "is_strong_symmetry",
    "rank_threshold",
    "nullity",
    "kernel_basis",
    "charge_sectors",
    "sector_split",
    "degeneracy",
    "evolve",
    "GAP_RATIO_MIN",
    "MAX_DENSE_SIZE",
]

log = logging.getLogger(__name__)

GAP_RATIO_MIN = 1e3
# largest superoperator size (d^2) that is densified without sector information
MAX_DENSE_SIZE = 4096
THREADS_ENV = "SYMMKERNEL_THREADS"


class BudgetError(RuntimeError):
    """Requested computation exceeds the dense-decomposition budget."""


class SymmetryError(ValueError):
    """A supplied charge is not a usable strong symmetry."""


@dataclass(frozen=True)
class OpenSystem:
    """Hamiltonian plus weighted jump operators.

    ``jumps`` holds ``(L, gamma)`` pairs with ``gamma >= 0``.
    """

    H: Operator
    jumps: tuple[tuple[Operator, float], ...] = ()
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        jumps = tuple((L, float(g)) for L, g in self.jumps)
        object.__setattr__(self, "jumps", jumps)
        if not self.H.is_hermitian(self.tol):
            raise ValueError("Hamiltonian is not Hermitian within tolerance")
        for L, g in jumps:
            if not L.space.compatible(self.H.space):
                raise ValueError("jump operator lives on a different space than H")
            if not g >= 0 or not math.isfinite(g):
                raise ValueError(f"jump rate must be finite and nonnegative, got {g}")

    @property
    def dim(self) -> int:
        return self.H.dim

    @property
    def space(self):
        return self.H.space

    def transformed(self, U: Operator) -> "OpenSystem":
        """Same system written in the basis given by the columns of ``U``."""
        Ud = U.dag()
        H = Ud @ self.H @ U
        # round-off can leave a tiny anti-Hermitian part
        H = (H + H.dag()) * 0.5
        return OpenSystem(H, tuple((Ud @ L @ U, g) for L, g in self.jumps), self.tol)


@dataclass(frozen=True)
class SuperOperator:
    """``d^2 x d^2`` matrix acting on row-major vectorized operators."""

    space_dim: int
    matrix: np.ndarray | sp.csr_matrix

    def __post_init__(self):
        n = self.space_dim ** 2
        if self.matrix.shape != (n, n):
            raise ValueError(f"superoperator for d={self.space_dim} must be {n}x{n}")

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def as_operator(self) -> Operator:
        return Operator(self.matrix)

    def __call__(self, rho: Operator) -> Operator:
        return devectorize(self.matrix @ vectorize(rho), self.space_dim)


@dataclass(frozen=True)
class SectorBlock:
    """Restriction of the Liouvillian to operators mapping ``H_beta`` into ``H_alpha``.

    ``block`` acts on vectors indexed ``p*len(col_indices) + q`` for the
    matrix unit ``|row_indices[p]><col_indices[q]|``.
    """

    alpha_label: tuple
    beta_label: tuple
    row_indices: tuple[int, ...]
    col_indices: tuple[int, ...]
    block: np.ndarray

    @property
    def size(self) -> int:
        return self.block.shape[0]

    def full_indices(self, d: int) -> np.ndarray:
        """Positions of this block inside the full vectorized space."""
        rows = np.asarray(self.row_indices)
        cols = np.asarray(self.col_indices)
        return (rows[:, None] * d + cols[None, :]).ravel()


@dataclass(frozen=True)
class KernelResult:
    nullity: int
    kept_singulars: tuple[float, ...]
    dropped_singulars: tuple[float, ...]
    gap_ratio: float
    threshold: float

    @property
    def uncertain(self) -> bool:
        return self.gap_ratio < GAP_RATIO_MIN


@dataclass(frozen=True)
class SectorNullity:
    alpha: tuple
    beta: tuple
    block_dim: int
    nullity: int


@dataclass(frozen=True)
class NumericDegeneracy:
    """Kernel dimension of a Liouvillian, assembled from sector blocks."""

    nullity: int
    sectors: tuple[SectorNullity, ...]
    gap_ratio: float
    sigma_max: float
    threshold: float
    tol: float
    space_dim: int

    @property
    def uncertain(self) -> bool:
        return self.gap_ratio < GAP_RATIO_MIN


# -- vectorization -------------------------------------------------------------

def vectorize(rho: Operator | np.ndarray) -> np.ndarray:
    """Row-major stacking, component ``i*d + j`` is ``rho[i, j]``."""
    mat = rho.dense() if isinstance(rho, Operator) else np.asarray(rho)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    return mat.astype(np.complex128).reshape(-1)


def devectorize(v: np.ndarray, d: int | None = None) -> Operator:
    v = np.asarray(v).reshape(-1)
    n = v.shape[0]
    root = math.isqrt(n)
    if root * root != n:
        raise ValueError(f"vector length {n} is not a perfect square")
    if d is not None and d != root:
        raise ValueError(f"vector length {n} does not match d={d}")
    return Operator(v.reshape(root, root))


# -- assembly ------------------------------------------------------------------

def _lindblad_matrix(H, jumps, adjoint: bool, sparse: bool):
    """Kronecker assembly shared by the Liouvillian and its adjoint.

    ``H`` and the jump matrices may be dense arrays or CSR matrices.
    """
    d = H.shape[0]
    if sparse:
        kr = lambda a, b: sp.kron(a, b, format="csr")  # noqa: E731
        eye = sp.identity(d, dtype=np.complex128, format="csr")
        H = sp.csr_matrix(H)
    else:
        kr = np.kron
        eye = np.eye(d)
        H = np.asarray(H)
    sign = 1j if adjoint else -1j
    M = sign * (kr(H, eye) - kr(eye, H.T))
    for L, g in jumps:
        if g == 0:
            continue
        L = sp.csr_matrix(L) if sparse else np.asarray(L)
        Ld = L.conj().T
        LdL = Ld @ L
        if adjoint:
            # O -> 2 L^+ O L  ==  L^+ x L^T
            jump = 2 * kr(Ld, L.T)
        else:
            jump = 2 * kr(L, L.conj())
        M = M + g * (jump - kr(LdL, eye) - kr(eye, LdL.T))
    return M


def _raw(op: Operator, sparse: bool):
    return op.sparse() if sparse else op.dense()


def liouvillian(sys: OpenSystem, sparse: bool = False) -> SuperOperator:
    """Matrix of the Lindblad generator on row-major vectorized operators."""
    M = _lindblad_matrix(
        _raw(sys.H, sparse), [(_raw(L, sparse), g) for L, g in sys.jumps],
        adjoint=False, sparse=sparse,
    )
    return SuperOperator(sys.dim, M)


def adjoint_liouvillian(sys: OpenSystem, sparse: bool = False) -> SuperOperator:
    """Heisenberg-picture generator ``O -> i[H,O] + sum g(2 L^+ O L - {L^+L, O})``.

    Equal to the conjugate transpose of :func:`liouvillian`.
    """
    M = _lindblad_matrix(
        _raw(sys.H, sparse), [(_raw(L, sparse), g) for L, g in sys.jumps],
        adjoint=True, sparse=sparse,
    )
    return SuperOperator(sys.dim, M)


def apply_liouvillian(sys: OpenSystem, rho: Operator) -> Operator:
    """Evaluate the Lindblad right-hand side directly, without vectorizing."""
    H = sys.H
    out = (H @ rho - rho @ H) * -1j
    for L, g in sys.jumps:
        LdL = L.dag() @ L
        out = out + (L @ rho @ L.dag() * 2 - LdL @ rho - rho @ LdL) * g
    return out


def is_strong_symmetry(sys: OpenSystem, S: Operator, tol: float = DEFAULT_TOL) -> bool:
    """True if ``S`` commutes with ``H`` and with every ``L`` and ``L^+``.

    Each commutator's largest entry is compared with
    ``tol * max|X| * max|S|``.
    """
    s_scale = max_abs(S)
    candidates = [sys.H]
    for L, g in sys.jumps:
        if g > 0:
            candidates.extend((L, L.dag()))
    for X in candidates:
        if max_abs(commutator(X, S)) > tol * max_abs(X) * s_scale:
            return False
    return True


# -- kernel dimension ----------------------------------------------------------

def rank_threshold(sigma_max: float, dim: int, tol: float = DEFAULT_TOL) -> float:
    """Singular values strictly below this count as zero."""
    return tol * sigma_max * dim


def _gap_ratio(kept: np.ndarray, dropped: np.ndarray) -> float:
    if kept.size == 0 or dropped.size == 0:
        return math.inf
    top = float(np.max(dropped))
    if top == 0.0:
        return math.inf
    return float(np.min(kept)) / top


def _svdvals(mat: np.ndarray) -> np.ndarray:
    if mat.size == 0:
        return np.zeros(0)
    try:
        return sla.svdvals(mat, check_finite=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but robust
        return sla.svd(mat, compute_uv=False, lapack_driver="gesvd", check_finite=False)


def nullity(M: SuperOperator | np.ndarray, tol: float = DEFAULT_TOL,
            dim: int | None = None) -> KernelResult:
    """Kernel dimension from singular values.

    Parameters
    ----------
    M : SuperOperator or ndarray
        Square matrix.
    tol : float
        Relative tolerance; see :func:`rank_threshold`.
    dim : int, optional
        Dimension factor in the threshold.  Defaults to ``M.space_dim`` for a
        :class:`SuperOperator` and to ``ceil(sqrt(n))`` for an ``n x n`` array.
    """
    if isinstance(M, SuperOperator):
        mat = M.dense()
        dim = dim or M.space_dim
    else:
        mat = M.dense() if isinstance(M, Operator) else np.asarray(M)
        if dim is None:
            dim = max(1, math.isqrt(mat.shape[0] - 1) + 1) if mat.shape[0] else 1
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix has non-finite entries")
    s = _svdvals(mat)
    sigma_max = float(s[0]) if s.size else 0.0
    thr = rank_threshold(sigma_max, dim, tol)
    small = s < thr if sigma_max > 0 else np.ones_like(s, dtype=bool)
    kept, dropped = s[~small], s[small]
    return KernelResult(
        nullity=int(small.sum()),
        kept_singulars=tuple(float(x) for x in kept),
        dropped_singulars=tuple(float(x) for x in dropped),
        gap_ratio=_gap_ratio(kept, dropped),
        threshold=thr,
    )


def kernel_basis(M: SuperOperator | np.ndarray, tol: float = DEFAULT_TOL,
                 dim: int | None = None) -> np.ndarray:
    """Orthonormal kernel basis as columns (right singular vectors).

    The basis is returned as computed; no Hermitian projection is applied,
    since kernel elements of a non-Abelian problem need not be Hermitian.
    """
    if isinstance(M, SuperOperator):
        mat = M.dense()
        dim = dim or M.space_dim
    else:
        mat = np.asarray(M)
        dim = dim or max(1, math.isqrt(mat.shape[0] - 1) + 1)
    _, s, vh = sla.svd(mat, check_finite=False)
    thr = rank_threshold(float(s[0]) if s.size else 0.0, dim, tol)
    k = int(np.sum(s < thr)) if s.size and s[0] > 0 else mat.shape[0]
    return vh[mat.shape[0] - k:].conj().T


# -- symmetry sectors ----------------------------------------------------------

def _charge_label(values: np.ndarray) -> tuple:
    # integers stay integers so labels serialize cleanly
    out = []
    for v in values:
        r = round(float(v), 6) + 0.0
        out.append(int(round(r)) if abs(r - round(r)) < 1e-9 else r)
    return tuple(out)


def charge_sectors(charges: Sequence[Operator], tol: float = DEFAULT_TOL) -> list[tuple[tuple, np.ndarray]]:
    """Group basis indices by the joint eigenvalues of diagonal charges.

    Returns ``(label, indices)`` pairs sorted by label.
    """
    if not charges:
        raise ValueError("at least one charge is required")
    d = charges[0].dim
    diag = []
    for Q in charges:
        if Q.dim != d:
            raise SymmetryError("charges must share one space")
        if not Q.is_hermitian(tol):
            raise SymmetryError("charges must be Hermitian")
        if not Q.is_diagonal(tol):
            raise SymmetryError(
                "charge is not diagonal in the computational basis; rotate the "
                "system first with simultaneous_eigenbasis and OpenSystem.transformed"
            )
        diag.append(np.real(Q.dense().diagonal()))
    diag = np.array(diag)
    groups: dict[tuple, list[int]] = {}
    for i in range(d):
        groups.setdefault(_charge_label(diag[:, i]), []).append(i)
    return [(lab, np.array(idx)) for lab, idx in sorted(groups.items())]


def _restrict(op, rows, cols):
    return op[np.ix_(rows, cols)]


def _block_matrix(H, jumps, ia, ib):
    """Liouvillian restricted to ``|H_alpha>< H_beta|``.

    Valid only when ``H`` and every jump are block diagonal with respect to
    the sector partition.
    """
    Ha, Hb = _restrict(H, ia, ia), _restrict(H, ib, ib)
    na, nb = len(ia), len(ib)
    Ia, Ib = np.eye(na), np.eye(nb)
    M = -1j * (np.kron(Ha, Ib) - np.kron(Ia, Hb.T))
    for L, g in jumps:
        if g == 0:
            continue
        La, Lb = _restrict(L, ia, ia), _restrict(L, ib, ib)
        LdLa = La.conj().T @ La
        LdLb = Lb.conj().T @ Lb
        M += g * (2 * np.kron(La, Lb.conj()) - np.kron(LdLa, Ib) - np.kron(Ia, LdLb.T))
    return M


def _iter_blocks(sys: OpenSystem, sectors):
    H = sys.H.dense()
    jumps = [(L.dense(), g) for L, g in sys.jumps]
    for (la, ia), (lb, ib) in product(sectors, repeat=2):
        yield la, lb, ia, ib, (lambda ia=ia, ib=ib: _block_matrix(H, jumps, ia, ib))


def _validated_sectors(sys: OpenSystem, charges, tol):
    for Q in charges:
        if not is_strong_symmetry(sys, Q, tol):
            raise SymmetryError("a charge does not commute with H and all jump operators")
    return charge_sectors(charges, tol)


def sector_split(sys: OpenSystem, charges: Sequence[Operator] = (),
                 tol: float = DEFAULT_TOL) -> list[SectorBlock]:
    """Block decomposition of the Liouvillian by joint charge eigenvalues.

    One block per ordered pair of sectors ``(alpha, beta)``.  Without
    charges the single block is the full Liouvillian.
    """
    if not charges:
        idx = tuple(range(sys.dim))
        return [SectorBlock((), (), idx, idx, liouvillian(sys).dense())]
    sectors = _validated_sectors(sys, charges, tol)
    return [
        SectorBlock(la, lb, tuple(int(i) for i in ia), tuple(int(i) for i in ib), build())
        for la, lb, ia, ib, build in _iter_blocks(sys, sectors)
    ]


def _thread_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def degeneracy(sys: OpenSystem, charges: Sequence[Operator] | None = None,
               tol: float = DEFAULT_TOL, *, max_block: int = MAX_DENSE_SIZE,
               workers: int | None = None) -> NumericDegeneracy:
    """Dimension of the Liouvillian kernel, optionally sector by sector.

    Singular values of every block are pooled and thresholded against the
    global largest singular value, so the total equals the nullity of the
    full matrix.

    Parameters
    ----------
    sys : OpenSystem
    charges : sequence of Operator, optional
        Mutually commuting diagonal strong symmetries.
    tol : float
        Relative rank tolerance.
    max_block : int
        Largest block size that will be decomposed densely.
    workers : int, optional
        Parallel block jobs; defaults to ``$SYMMKERNEL_THREADS`` or 1.

    Raises
    ------
    BudgetError
        If a block (or the full matrix, without charges) exceeds ``max_block``.
    """
    d = sys.dim
    if charges:
        sectors = _validated_sectors(sys, charges, tol)
        jobs = list(_iter_blocks(sys, sectors))
    else:
        jobs = [((), (), np.arange(d), np.arange(d), lambda: liouvillian(sys).dense())]
    largest = max(len(ia) * len(ib) for _, _, ia, ib, _ in jobs)
    if largest > max_block:
        raise BudgetError(
            f"largest Liouvillian block has size {largest} > budget {max_block}; "
            "supply (finer) charges or raise max_block"
        )

    def run(job):
        return _svdvals(job[4]())

    n_workers = _thread_count(workers)
    if n_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            spectra = list(pool.map(run, jobs))
    else:
        spectra = [run(job) for job in jobs]

    sigma_max = max((float(s[0]) for s in spectra if s.size), default=0.0)
    thr = rank_threshold(sigma_max, d, tol)
    kept_min, dropped_max = math.inf, 0.0
    sectors_out = []
    total = 0
    for (la, lb, ia, ib, _), s in zip(jobs, spectra):
        small = s < thr if sigma_max > 0 else np.ones_like(s, dtype=bool)
        k = int(small.sum())
        total += k
        if (~small).any():
            kept_min = min(kept_min, float(s[~small].min()))
        if small.any():
            dropped_max = max(dropped_max, float(s[small].max()))
        sectors_out.append(SectorNullity(la, lb, len(ia) * len(ib), k))
    if kept_min == math.inf or total == 0 or dropped_max == 0.0:
        gap = math.inf
    else:
        gap = kept_min / dropped_max
    result = NumericDegeneracy(
        nullity=total, sectors=tuple(sectors_out), gap_ratio=gap,
        sigma_max=sigma_max, threshold=thr, tol=tol, space_dim=d,
    )
    if result.uncertain:
        log.warning("no clear spectral gap: gap ratio %.3g < %.0e", gap, GAP_RATIO_MIN)
    return result


# -- time evolution --------------------------------------------------------------

def _check_density_matrix(rho: Operator, tol: float) -> None:
    mat = rho.dense()
    if not rho.is_hermitian(tol):
        raise ValueError("initial state is not Hermitian")
    if abs(np.trace(mat) - 1) > 1e-9:
        raise ValueError("initial state does not have unit trace")
    if np.linalg.eigvalsh((mat + mat.conj().T) / 2).min() < -1e-8:
        raise ValueError("initial state is not positive semidefinite")


def evolve(sys: OpenSystem, rho0: Operator, T: float, dt: float,
           tol: float = DEFAULT_TOL) -> Operator:
    """Integrate the master equation with fixed-step classical RK4.

    The number of steps is ``round(T / dt)`` (at least one), with the step
    shrunk slightly so that they end exactly at ``T``.

    Raises
    ------
    RuntimeError
        If the trace drifts by more than 1e-9 or the final state has an
        eigenvalue below -1e-8; a smaller ``dt`` usually helps.
    """
    if T < 0 or dt <= 0:
        raise ValueError("need T >= 0 and dt > 0")
    _check_density_matrix(rho0, tol)
    d = sys.dim
    M = liouvillian(sys, sparse=d * d > MAX_DENSE_SIZE).matrix
    y = vectorize(rho0)
    steps = max(1, int(round(T / dt))) if T > 0 else 0
    h = T / steps if steps else 0.0
    trace_idx = np.arange(d) * (d + 1)
    for n in range(steps):
        k1 = M @ y
        k2 = M @ (y + 0.5 * h * k1)
        k3 = M @ (y + 0.5 * h * k2)
        k4 = M @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)) or abs(y[trace_idx].sum() - 1) > 1e-9:
            raise RuntimeError(
                f"integration unstable at step {n + 1} (trace drift); use a smaller dt"
            )
    rho = y.reshape(d, d)
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -1e-8:
        raise RuntimeError("evolved state lost positivity; use a smaller dt")
    return Operator(rho, sys.space)
