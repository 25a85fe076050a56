"""
Complex operators on finite tensor-product Hilbert spaces.

An :class:`Operator` wraps a square complex matrix together with the
:class:`HilbertSpace` it acts on.  Storage is either a dense ``numpy`` array
or a ``scipy.sparse`` CSR matrix; every operation gives the same matrix
regardless of which storage the inputs use.

Sites and fermion modes are numbered from 1, so that ``embed(op, 1, space)``
puts ``op`` in the leftmost Kronecker factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from numbers import Number
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "DimensionError",
    "HilbertSpace",
    "Operator",
    "add",
    "sub",
    "mul",
    "scale",
    "dagger",
    "commutator",
    "anticommutator",
    "kron",
    "embed",
    "identity",
    "zeros",
    "basis_projector",
    "jordan_wigner",
    "pauli",
    "max_abs",
    "dump_operator",
    "load_operator",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10


class DimensionError(ValueError):
    """Operands live on incompatible spaces or an index is out of range."""


@dataclass(frozen=True)
class HilbertSpace:
    """Finite tensor-product Hilbert space.

    Parameters
    ----------
    site_dims : tuple of int
        Local dimension of every Kronecker factor, leftmost first.
    basis_labels : tuple of str, optional
        One unique label per basis vector.
    """

    site_dims: tuple[int, ...]
    basis_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.site_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"site dimensions must be positive, got {self.site_dims}")
        object.__setattr__(self, "site_dims", dims)
        if self.basis_labels is not None:
            labels = tuple(str(lab) for lab in self.basis_labels)
            if len(labels) != self.dim:
                raise ValueError(
                    f"{len(labels)} basis labels given for a space of dimension {self.dim}"
                )
            if len(set(labels)) != len(labels):
                raise ValueError("basis labels must be unique")
            object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return int(np.prod(self.site_dims))

    @property
    def num_sites(self) -> int:
        return len(self.site_dims)

    @classmethod
    def single(cls, dim: int, labels: Sequence[str] | None = None) -> "HilbertSpace":
        return cls((dim,), None if labels is None else tuple(labels))

    @classmethod
    def uniform(cls, local_dim: int, num_sites: int) -> "HilbertSpace":
        return cls((local_dim,) * num_sites)

    def compatible(self, other: "HilbertSpace") -> bool:
        # labels are cosmetic; only the tensor structure has to agree
        return self.site_dims == other.site_dims

    def __mul__(self, other: "HilbertSpace") -> "HilbertSpace":
        labels = None
        if self.basis_labels is not None and other.basis_labels is not None:
            labels = tuple(a + b for a in self.basis_labels for b in other.basis_labels)
        return HilbertSpace(self.site_dims + other.site_dims, labels)


def _freeze_dense(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


class Operator:
    """Square complex matrix acting on a :class:`HilbertSpace`.

    Instances are immutable.  Arithmetic operators ``+ - @`` and scalar
    ``*`` / ``/`` are supported; ``A * B`` between two operators is rejected,
    use ``A @ B`` for the matrix product.
    """

    __slots__ = ("_data", "_space")
    __array_priority__ = 1000

    def __init__(self, data, space: HilbertSpace | None = None):
        if isinstance(data, Operator):
            space = space or data.space
            data = data._data
        if sp.issparse(data):
            mat = sp.csr_matrix(data, dtype=np.complex128, copy=True)
            mat.sum_duplicates()
            mat.eliminate_zeros()
            values = mat.data
        else:
            mat = _freeze_dense(data)
            values = mat
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"operator matrix must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("operator entries must be finite")
        if space is None:
            space = HilbertSpace.single(mat.shape[0])
        if space.dim != mat.shape[0]:
            raise DimensionError(
                f"matrix of size {mat.shape[0]} does not fit space of dimension {space.dim}"
            )
        self._data = mat
        self._space = space

    # -- storage ---------------------------------------------------------------
    @property
    def space(self) -> HilbertSpace:
        return self._space

    @property
    def dim(self) -> int:
        return self._space.dim

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self._data)

    @property
    def data(self):
        """Underlying matrix (read-only dense array or CSR matrix)."""
        return self._data

    def dense(self) -> np.ndarray:
        """Dense copy of the matrix."""
        if self.is_sparse:
            return self._data.toarray()
        return np.array(self._data)

    def sparse(self) -> sp.csr_matrix:
        """CSR copy of the matrix."""
        if self.is_sparse:
            return self._data.copy()
        return sp.csr_matrix(self._data)

    def to_dense(self) -> "Operator":
        return self if not self.is_sparse else Operator(self._data.toarray(), self._space)

    def to_sparse(self) -> "Operator":
        return self if self.is_sparse else Operator(sp.csr_matrix(self._data), self._space)

    def with_space(self, space: HilbertSpace) -> "Operator":
        return Operator(self._data, space)

    # -- arithmetic ------------------------------------------------------------
    def _check(self, other: "Operator"):
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if not self._space.compatible(other._space):
            raise DimensionError(
                f"space mismatch: {self._space.site_dims} vs {other._space.site_dims}"
            )

    # mixed sparse/dense operands give a dense result
    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(_add(self._data, other._data), self._space)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(_add(self._data, -other._data), self._space)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self._data @ other._data, self._space)

    def __mul__(self, c):
        if isinstance(c, Operator):
            raise TypeError("use A @ B for operator products")
        if not isinstance(c, Number):
            return NotImplemented
        return Operator(self._data * complex(c), self._space)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not isinstance(c, Number):
            return NotImplemented
        return Operator(self._data / complex(c), self._space)

    def __neg__(self) -> "Operator":
        return Operator(-self._data, self._space)

    def dag(self) -> "Operator":
        return Operator(self._data.conj().T, self._space)

    def trace(self) -> complex:
        return complex(self._data.diagonal().sum())

    def max_abs(self) -> float:
        return max_abs(self)

    def is_hermitian(self, tol: float = DEFAULT_TOL) -> bool:
        scale = max(self.max_abs(), 1.0)
        return max_abs(self - self.dag()) <= tol * scale

    def is_diagonal(self, tol: float = DEFAULT_TOL) -> bool:
        off = self.dense()
        np.fill_diagonal(off, 0)
        return np.max(np.abs(off), initial=0.0) <= tol * max(self.max_abs(), 1.0)

    def allclose(self, other: "Operator", atol: float = 1e-12, rtol: float = DEFAULT_TOL) -> bool:
        self._check(other)
        scale = max(self.max_abs(), other.max_abs())
        return max_abs(self - other) <= atol + rtol * scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, Operator) or not self._space.compatible(other._space):
            return False
        return np.array_equal(self.dense(), other.dense())

    __hash__ = None

    def __repr__(self) -> str:
        kind = "sparse" if self.is_sparse else "dense"
        return f"Operator(dim={self.dim}, site_dims={self._space.site_dims}, {kind})"


def _add(a, b):
    if sp.issparse(a) and sp.issparse(b):
        return a + b
    if sp.issparse(a):
        a = a.toarray()
    if sp.issparse(b):
        b = b.toarray()
    return a + b


def max_abs(op: Operator) -> float:
    """Largest entry magnitude."""
    data = op.data
    values = data.data if sp.issparse(data) else data
    return float(np.max(np.abs(values), initial=0.0))


def add(a: Operator, b: Operator) -> Operator:
    return a + b


def sub(a: Operator, b: Operator) -> Operator:
    return a - b


def mul(a: Operator, b: Operator) -> Operator:
    return a @ b


def scale(a: Operator, c: complex) -> Operator:
    return a * c


def dagger(a: Operator) -> Operator:
    """Conjugate transpose."""
    return a.dag()


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def anticommutator(a: Operator, b: Operator) -> Operator:
    return a @ b + b @ a


def kron(*ops: Operator) -> Operator:
    """Kronecker product, leftmost operand is the leftmost factor.

    The result stays sparse only if every operand is sparse.
    """
    if not ops:
        raise ValueError("kron needs at least one operand")

    def pair(a: Operator, b: Operator) -> Operator:
        space = a.space * b.space
        if a.is_sparse and b.is_sparse:
            return Operator(sp.kron(a.data, b.data, format="csr"), space)
        return Operator(np.kron(a.dense(), b.dense()), space)

    return reduce(pair, ops)


def identity(space: HilbertSpace | int, sparse: bool = False) -> Operator:
    if isinstance(space, int):
        space = HilbertSpace.single(space)
    if sparse:
        return Operator(sp.identity(space.dim, dtype=np.complex128, format="csr"), space)
    return Operator(np.eye(space.dim), space)


def zeros(space: HilbertSpace | int, sparse: bool = False) -> Operator:
    if isinstance(space, int):
        space = HilbertSpace.single(space)
    if sparse:
        return Operator(sp.csr_matrix((space.dim, space.dim), dtype=np.complex128), space)
    return Operator(np.zeros((space.dim, space.dim)), space)


def basis_projector(i: int, j: int, space: HilbertSpace | int) -> Operator:
    """Matrix unit ``|i><j|`` (0-based basis indices)."""
    if isinstance(space, int):
        space = HilbertSpace.single(space)
    if not (0 <= i < space.dim and 0 <= j < space.dim):
        raise DimensionError(f"basis index ({i}, {j}) outside dimension {space.dim}")
    mat = np.zeros((space.dim, space.dim))
    mat[i, j] = 1.0
    return Operator(mat, space)


def embed(local: Operator, site: int, space: HilbertSpace) -> Operator:
    """Place ``local`` on ``site`` (1-based) with identities elsewhere."""
    if not 1 <= site <= space.num_sites:
        raise DimensionError(f"site {site} outside 1..{space.num_sites}")
    if local.dim != space.site_dims[site - 1]:
        raise DimensionError(
            f"local operator of dimension {local.dim} does not match "
            f"site {site} of dimension {space.site_dims[site - 1]}"
        )
    sparse = local.is_sparse
    factors = [
        local.with_space(HilbertSpace.single(d)) if k == site
        else identity(d, sparse=sparse)
        for k, d in enumerate(space.site_dims, start=1)
    ]
    return kron(*factors).with_space(space)


_PAULI = {
    "I": np.eye(2),
    "x": np.array([[0, 1], [1, 0]]),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]]),
    # |0><1| and |1><0|
    "+": np.array([[0, 1], [0, 0]]),
    "-": np.array([[0, 0], [1, 0]]),
}


def pauli(which: str, sparse: bool = False) -> Operator:
    """Single-qubit Pauli matrix; ``which`` is one of ``I x y z + -``.

    ``"+"`` is ``|0><1|`` and ``"-"`` is ``|1><0|``.  With basis state 0
    read as spin up, ``"+"`` raises the spin.
    """
    try:
        mat = _PAULI[which]
    except KeyError:
        raise ValueError(f"unknown Pauli label {which!r}") from None
    op = Operator(mat)
    return op.to_sparse() if sparse else op


def jordan_wigner(mode: int, num_modes: int, sparse: bool = False) -> Operator:
    """Fermionic annihilation operator for ``mode`` (1-based).

    Occupation basis per mode: ``|0>`` empty, ``|1>`` occupied.  The
    string of ``sigma^z`` sits on the modes to the left.
    """
    if not 1 <= mode <= num_modes:
        raise DimensionError(f"mode {mode} outside 1..{num_modes}")
    z = Operator(np.diag([1.0, -1.0]))
    lower = Operator(np.array([[0.0, 1.0], [0.0, 0.0]]))  # |0><1|
    eye = Operator(np.eye(2))
    if sparse:
        z, lower, eye = z.to_sparse(), lower.to_sparse(), eye.to_sparse()
    factors = [z] * (mode - 1) + [lower] + [eye] * (num_modes - mode)
    return kron(*factors).with_space(HilbertSpace.uniform(2, num_modes))


def dump_operator(op: Operator, path: str | Path) -> None:
    """Write ``op`` in coordinate text form.

    Line 1 is ``dim nnz``; then one ``row col re im`` line per stored
    nonzero, 0-based, sorted row-major.
    """
    coo = op.sparse().tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{op.dim} {len(order)}"]
    for k in order:
        v = coo.data[k]
        lines.append(f"{coo.row[k]} {coo.col[k]} {float(v.real)!r} {float(v.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_operator(path: str | Path, space: HilbertSpace | None = None) -> Operator:
    """Inverse of :func:`dump_operator`; returns a sparse operator."""
    lines = Path(path).read_text().split("\n")
    dim, nnz = (int(t) for t in lines[0].split())
    rows, cols, vals = [], [], []
    for line in lines[1:1 + nnz]:
        r, c, re, im = line.split()
        rows.append(int(r))
        cols.append(int(c))
        vals.append(complex(float(re), float(im)))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=np.complex128)
    return Operator(mat, space)

