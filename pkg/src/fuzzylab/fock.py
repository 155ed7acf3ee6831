"""Truncated two-mode Fock space and the states living on it.

Space is generated by two bosonic modes a_1, a_2 acting on vectors
|n1, n2>.  Coordinates are realized as x_j = lam * a+ sigma_j a, the radius
as r = lam * (N + 1) with N the total number operator, and wave functions
are *operators* on the Fock space ("NC states") measured with the weighted
norm ||psi||^2 = 4 pi lam^2 Tr[psi+ r psi].

The space is truncated with a hard cutoff at total occupation ``n_max``:
a+ annihilates the top shell.  Identities that are exact in the full space
remain exact on the truncation only away from the cutoff shell, which is
what :func:`interior_projection` is for.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

__all__ = [
    "PAULI",
    "EPS3",
    "FockBasis",
    "FockMatrix",
    "NCState",
    "WeightedInnerProduct",
    "enumerate_basis",
    "ladder_matrix",
    "coordinate_matrix",
    "radial_matrix",
    "inner_product",
    "random_state",
    "interior_projection",
    "state_to_text",
    "state_from_text",
]

#: Pauli matrices sigma_1, sigma_2, sigma_3 (index 0..2).
PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

#: Totally antisymmetric symbol eps_{ijk}, eps_{123} = +1 (0-based indices).
EPS3 = np.zeros((3, 3, 3))
for _perm, _sgn in ((((0, 1, 2)), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                    ((2, 1, 0), -1), ((0, 2, 1), -1), ((1, 0, 2), -1)):
    EPS3[_perm] = _sgn

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class FockBasis:
    """Enumerated basis |n1, n2> with n1 + n2 <= n_max, grouped by shell.

    States are ordered by total occupation N = n1 + n2 (ascending) and,
    within a shell, by n1 descending; ``index`` is the inverse map of
    ``labels``.  dim = (n_max + 1)(n_max + 2) / 2.
    """

    n_max: int
    labels: tuple = field(repr=False)
    index: dict = field(repr=False)
    shells: np.ndarray = field(repr=False)  # total occupation per index

    @property
    def dim(self) -> int:
        return len(self.labels)

    def shell_slice(self, n: int) -> slice:
        """Contiguous index range of the shell N = n."""
        start = n * (n + 1) // 2
        return slice(start, start + n + 1)


def enumerate_basis(n_max: int) -> FockBasis:
    """Build the truncated two-mode basis with shell-contiguous ordering."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    labels = []
    for n in range(n_max + 1):
        for n1 in range(n, -1, -1):
            labels.append((n1, n - n1))
    index = {lab: i for i, lab in enumerate(labels)}
    shells = np.array([n1 + n2 for (n1, n2) in labels], dtype=np.int64)
    return FockBasis(n_max=n_max, labels=tuple(labels), index=index, shells=shells)


@dataclass
class FockMatrix:
    """A sparse operator on the truncated Fock space, with an optional tag."""

    basis: FockBasis
    matrix: sp.csr_matrix
    tag: str = ""

    def dagger(self) -> "FockMatrix":
        return FockMatrix(self.basis, self.matrix.conj().T.tocsr(),
                          tag=self.tag + "+" if self.tag else "")


def ladder_matrix(basis: FockBasis, mode: int, dagger: bool = False) -> FockMatrix:
    """Annihilation (or creation) matrix for mode 1 or 2.

    a_mode |n1,n2> = sqrt(n_mode) |..., n_mode - 1, ...>.  The creation
    matrix is the adjoint, so a+ maps the top shell N = n_max to zero;
    this is the declared truncation artifact.
    """
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    rows, cols, vals = [], [], []
    for i, (n1, n2) in enumerate(basis.labels):
        occ = (n1, n2)[mode - 1]
        if occ > 0:
            target = (n1 - 1, n2) if mode == 1 else (n1, n2 - 1)
            rows.append(basis.index[target])
            cols.append(i)
            vals.append(np.sqrt(occ))
    m = sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)),
                      shape=(basis.dim, basis.dim))
    if dagger:
        return FockMatrix(basis, m.conj().T.tocsr(), tag=f"a{mode}+")
    return FockMatrix(basis, m, tag=f"a{mode}")


def coordinate_matrix(basis: FockBasis, j: int, lam: float) -> FockMatrix:
    """x_j = lam * sigma^j_{ab} a+_a a_b.  Hermitian, shell-preserving."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    if lam <= 0:
        raise ValueError("lam must be positive")
    a = [ladder_matrix(basis, m).matrix for m in (1, 2)]
    ad = [m.conj().T.tocsr() for m in a]
    sig = PAULI[j - 1]
    x = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
    for al in range(2):
        for be in range(2):
            if sig[al, be] != 0:
                x = x + lam * sig[al, be] * (ad[al] @ a[be])
    return FockMatrix(basis, x.tocsr(), tag=f"x{j}")


def radial_matrix(basis: FockBasis, lam: float) -> FockMatrix:
    """r = lam * (N + 1): diagonal, strictly positive."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    diag = lam * (basis.shells.astype(float) + 1.0)
    return FockMatrix(basis, sp.diags(diag, format="csr", dtype=complex), tag="r")


def _to_coo(matrix: Matrix) -> sp.coo_matrix:
    if sp.issparse(matrix):
        return matrix.tocoo()
    return sp.coo_matrix(matrix)


def _absmax(matrix: Matrix) -> float:
    if sp.issparse(matrix):
        return 0.0 if matrix.nnz == 0 else float(np.abs(matrix.data).max())
    return float(np.abs(matrix).max()) if matrix.size else 0.0


@dataclass
class NCState:
    """An operator-valued wave function on the truncated Fock space.

    Physical (scalar) states have charge kappa = 0: only blocks with equal
    left/right total occupation are populated, so [N, psi] = 0.  The matrix
    may be dense or sparse; shell bookkeeping works on either.
    """

    basis: FockBasis
    matrix: Matrix

    def copy(self) -> "NCState":
        return NCState(self.basis, self.matrix.copy())

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)

    def kappa(self, tol: float = 0.0) -> Optional[int]:
        """The unique charge (left N) - (right N) over nonzero blocks.

        Returns None for the zero state or a mixed-charge superposition.
        """
        shells = self.basis.shells
        coo = _to_coo(self.matrix)
        scale = _absmax(self.matrix)
        kappas = set()
        for i, k, v in zip(coo.row, coo.col, coo.data):
            if abs(v) > tol * scale:
                kappas.add(int(shells[i] - shells[k]))
        if len(kappas) == 1:
            return kappas.pop()
        return None

    def support_max(self, tol: float = 0.0) -> int:
        """Largest shell max(N_left, N_right) carrying a nonzero block."""
        shells = self.basis.shells
        coo = _to_coo(self.matrix)
        scale = _absmax(self.matrix)
        out = -1
        for i, k, v in zip(coo.row, coo.col, coo.data):
            if abs(v) > tol * scale:
                out = max(out, int(shells[i]), int(shells[k]))
        return out

    def __add__(self, other: "NCState") -> "NCState":
        _check_same_basis(self, other)
        return NCState(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "NCState") -> "NCState":
        _check_same_basis(self, other)
        return NCState(self.basis, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "NCState":
        return NCState(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "NCState":
        return NCState(self.basis, -self.matrix)

    def absmax(self) -> float:
        return _absmax(self.matrix)


def _check_same_basis(a: NCState, b: NCState) -> None:
    if a.basis.n_max != b.basis.n_max:
        raise ValueError("states live on different bases "
                         f"(n_max {a.basis.n_max} vs {b.basis.n_max})")


@dataclass
class WeightedInnerProduct:
    """<phi, psi> = 4 pi lam^2 Tr[phi+ r psi] with r = lam (N + 1).

    The r weight is what makes the deformed Laplacian hermitian; it is
    strictly positive, so the form is positive definite.
    """

    basis: FockBasis
    lam: float

    def __post_init__(self):
        self.r_diag = self.lam * (self.basis.shells.astype(float) + 1.0)

    def __call__(self, phi: NCState, psi: NCState) -> complex:
        _check_same_basis(phi, psi)
        if phi.basis.n_max != self.basis.n_max:
            raise ValueError("state basis does not match inner product basis")
        a, b = phi.matrix, psi.matrix
        if sp.issparse(a) or sp.issparse(b):
            a = sp.csr_matrix(a)
            b = sp.csr_matrix(b)
            prod = a.conj().multiply(sp.diags(self.r_diag) @ b)
            tr = prod.sum()
        else:
            tr = np.sum(np.conj(a) * (self.r_diag[:, None] * b))
        return complex(4.0 * np.pi * self.lam**2 * tr)

    def norm(self, psi: NCState) -> float:
        val = self(psi, psi)
        return float(np.sqrt(max(val.real, 0.0)))


def inner_product(phi: NCState, psi: NCState, w: WeightedInnerProduct) -> complex:
    """Weighted inner product of two states (same basis required)."""
    return w(phi, psi)


def admissible_blocks(basis: FockBasis, kappa: int, support_max: int):
    """Shell pairs (N_left, N_right) allowed for the given charge/support."""
    pairs = []
    for nl in range(basis.n_max + 1):
        nr = nl - kappa
        if 0 <= nr <= basis.n_max and max(nl, nr) <= support_max:
            pairs.append((nl, nr))
    return pairs


def random_state(basis: FockBasis, seed: int, kappa: int, support_max: int,
                 w: WeightedInnerProduct) -> NCState:
    """Reproducible Gaussian state on the blocks fixed by (kappa, support_max).

    Entries are iid complex Gaussians on every admissible block, then the
    state is normalized to unit weighted norm.
    """
    if support_max > basis.n_max:
        raise ValueError("support_max exceeds n_max")
    if abs(kappa) > support_max:
        raise ValueError(f"no blocks with kappa={kappa} below shell {support_max}")
    rng = np.random.default_rng(seed)
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for nl, nr in admissible_blocks(basis, kappa, support_max):
        sl, sr = basis.shell_slice(nl), basis.shell_slice(nr)
        shape = (sl.stop - sl.start, sr.stop - sr.start)
        m[sl, sr] = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    state = NCState(basis, m)
    nrm = w.norm(state)
    if nrm == 0.0:
        raise ValueError("empty block set for the requested (kappa, support_max)")
    return state * (1.0 / nrm)


def interior_projection(psi: NCState, margin: int) -> NCState:
    """Zero every block touching a shell above n_max - margin.  Idempotent."""
    n_max = psi.basis.n_max
    if not 0 <= margin <= n_max:
        raise ValueError("margin must satisfy 0 <= margin <= n_max")
    cut = n_max - margin
    shells = psi.basis.shells
    if sp.issparse(psi.matrix):
        coo = _to_coo(psi.matrix)
        keep = (shells[coo.row] <= cut) & (shells[coo.col] <= cut)
        out = sp.coo_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])),
                            shape=coo.shape).tocsr()
        return NCState(psi.basis, out)
    mask = (shells[:, None] <= cut) & (shells[None, :] <= cut)
    return NCState(psi.basis, np.where(mask, psi.matrix, 0.0))


def state_to_text(psi: NCState, tol: float = 0.0) -> str:
    """Serialize a state as labeled COO text: ``n1 n2 | m1 m2 | re im``."""
    buf = io.StringIO()
    buf.write(f"# fuzzylab ncstate v1 n_max={psi.basis.n_max}\n")
    coo = _to_coo(psi.matrix)
    order = np.lexsort((coo.col, coo.row))
    labels = psi.basis.labels
    for k in order:
        v = coo.data[k]
        if abs(v) <= tol:
            continue
        (n1, n2), (m1, m2) = labels[coo.row[k]], labels[coo.col[k]]
        buf.write(f"{n1} {n2} | {m1} {m2} | {float(v.real)!r} {float(v.imag)!r}\n")
    return buf.getvalue()


def state_from_text(text: str) -> NCState:
    """Parse the format written by :func:`state_to_text`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# fuzzylab ncstate v1"):
        raise ValueError("not a fuzzylab ncstate v1 payload")
    n_max = int(lines[0].split("n_max=")[1])
    basis = enumerate_basis(n_max)
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    for ln in lines[1:]:
        left, mid, right = (part.strip() for part in ln.split("|"))
        n1, n2 = (int(t) for t in left.split())
        m1, m2 = (int(t) for t in mid.split())
        re, im = (float(t) for t in right.split())
        m[basis.index[(n1, n2)], basis.index[(m1, m2)]] = re + 1j * im
    return NCState(basis, m)
