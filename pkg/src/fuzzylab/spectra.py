"""Angular sectors, radial reduction, spectra, and the commutative oracle.

States of sharp angular momentum are built from monomials of total degree
2j with a radial profile pinned to one shell,

    psi_jm^(n)  ~  sum  (a+_1)^m1 (a+_2)^m2 / (m1! m2!) * P_n(r)
                        * (a_1)^n1 (-a_2)^n2 / (n1! n2!),

summed over m1 + m2 = n1 + n2 = j and (m1 - m2) - (n1 - n2) = 2m; the state
lives on the total shell N = n + j.  Only integer j occurs for charge-zero
states.  Reducing H = H0 + U(r) to such a sector through the weighted inner
product gives a hermitian tridiagonal radial matrix.

Two walls are available.  ``boundary="hard"`` keeps every shell of the
truncated arena, which is the cutoff itself (a+ annihilates the top shell)
and is what the full superoperator spectrum decomposes into.  With
``boundary="dirichlet"`` the radial basis stops one shell short of the
cutoff; every matrix entry is then exact (unaffected by truncation), which
realizes a hard Dirichlet wall and is the like-for-like counterpart of the
finite-difference oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .fock import NCState
from .operators import RadialFunction, Space, SuperOp

__all__ = [
    "AngularSector", "CentralPotential", "SpectrumResult",
    "build_sector", "shell_state", "reduce_hamiltonian", "reduce_superop",
    "eigen_solve", "commutative_oracle", "full_kappa0_spectrum",
    "v2_consistency", "convergence_study", "ConvergenceRecord",
]

#: central potentials are radial functions sampled on the shell grid
CentralPotential = RadialFunction

GRAM_CONDITION_LIMIT = 1e8


def _falling(n: int, k: int) -> float:
    """n (n-1) ... (n-k+1)."""
    out = 1.0
    for t in range(k):
        out *= n - t
    return out


def shell_state(space: Space, j: int, m: int, n: int) -> NCState:
    """The sector state with radial profile on shell n (unnormalized, sparse)."""
    basis = space.basis
    total = n + j
    if total > basis.n_max:
        raise ValueError("profile shell lies outside the truncated space")
    rows, cols, vals = [], [], []
    for m1 in range(j + 1):
        m2 = j - m1
        for n1 in range(j + 1):
            n2 = j - n1
            if (m1 - m2) - (n1 - n2) != 2 * m:
                continue
            pref = (-1.0) ** n2 / (math.factorial(m1) * math.factorial(m2)
                                   * math.factorial(n1) * math.factorial(n2))
            for q1 in range(n1, total - n2 + 1):
                q2 = total - q1
                p1, p2 = q1 - n1 + m1, q2 - n2 + m2
                amp = math.sqrt(_falling(q1, n1) * _falling(q2, n2)
                                * _falling(p1, m1) * _falling(p2, m2))
                rows.append(basis.index[(p1, p2)])
                cols.append(basis.index[(q1, q2)])
                vals.append(pref * amp)
    mat = sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)),
                        shape=(basis.dim, basis.dim))
    return NCState(basis, mat)


@dataclass
class AngularSector:
    """Orthonormal radial ladder of states with sharp (j, m)."""

    j: int
    m: int
    lam: float
    boundary: str
    states: List[NCState]
    shells: np.ndarray  # total shell per radial index

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def grid(self) -> np.ndarray:
        """Radial grid r = lam (N + 1) of the sector states."""
        return self.lam * (self.shells + 1.0)


def build_sector(space: Space, j: int, m: int, boundary: str = "hard") -> AngularSector:
    """Build and normalize the radial basis of the (j, m) sector.

    Half-integer j belongs to charged sectors and is rejected.
    """
    if int(j) != j or j < 0:
        raise ValueError("only integer j >= 0 occurs for charge-zero states; "
                         f"got j={j}")
    j = int(j)
    if abs(m) > j or int(m) != m:
        raise ValueError(f"m must be an integer with |m| <= j; got m={m}")
    if boundary not in ("hard", "dirichlet"):
        raise ValueError("boundary must be 'hard' or 'dirichlet'")
    top = space.n_max if boundary == "hard" else space.n_max - 1
    if top < j:
        raise ValueError(f"j={j} needs at least shell {j}; n_max too small")
    states, shells = [], []
    for n in range(0, top - j + 1):
        s = shell_state(space, j, int(m), n)
        nrm = space.ip.norm(s)
        if nrm == 0.0:
            raise ValueError(f"empty sector state (j={j}, m={m}, n={n})")
        states.append(s * (1.0 / nrm))
        shells.append(n + j)
    return AngularSector(j=j, m=int(m), lam=space.lam, boundary=boundary,
                         states=states, shells=np.asarray(shells, dtype=float))


def _gram_inverse_sqrt(space: Space, sector: AngularSector) -> np.ndarray:
    d = sector.dim
    g = np.empty((d, d), dtype=complex)
    for b, sb in enumerate(sector.states):
        for a in range(d):
            g[a, b] = space.ip(sector.states[a], sb)
    g = 0.5 * (g + g.conj().T)
    evals, evecs = np.linalg.eigh(g)
    if evals.min() <= 0 or evals.max() / evals.min() > GRAM_CONDITION_LIMIT:
        raise ValueError("ill-conditioned sector Gram matrix "
                         f"(cond ~ {evals.max() / max(evals.min(), 1e-300):.2e})")
    return (evecs * (1.0 / np.sqrt(evals))) @ evecs.conj().T


def reduce_superop(space: Space, sector: AngularSector, op: SuperOp) -> np.ndarray:
    """Matrix of a sector-preserving superoperator in the orthonormal radial basis."""
    d = sector.dim
    raw = np.empty((d, d), dtype=complex)
    for b, sb in enumerate(sector.states):
        u = op(sb)
        for a in range(d):
            raw[a, b] = space.ip(sector.states[a], u)
    ginv = _gram_inverse_sqrt(space, sector)
    return ginv @ raw @ ginv


def reduce_hamiltonian(space: Space, sector: AngularSector,
                       potential: Optional[CentralPotential] = None,
                       hermiticity_tol: float = 1e-12) -> np.ndarray:
    """Reduced H = H0 + U(r); hermitian to machine precision by construction."""
    mat = reduce_superop(space, sector, space.hamiltonian(potential))
    scale = max(np.abs(mat).max(), 1.0)
    herm_err = np.abs(mat - mat.conj().T).max() / scale
    if herm_err > hermiticity_tol:
        raise ValueError(f"reduced Hamiltonian not hermitian (err {herm_err:.2e})")
    return 0.5 * (mat + mat.conj().T)


@dataclass
class SpectrumResult:
    """Eigenvalues of one sector solve plus the context that produced them."""

    lam: float
    n_max: int
    j: int
    potential: str
    boundary: str
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def rows(self) -> List[dict]:
        return [{"lam": self.lam, "n_max": self.n_max, "j": self.j,
                 "potential": self.potential, "level": k, "energy": float(e)}
                for k, e in enumerate(self.eigenvalues)]


def eigen_solve(matrix: np.ndarray, residual_tol: float = 1e-8) -> tuple:
    """Ascending eigensystem of a hermitian matrix with a residual guard."""
    evals, evecs = np.linalg.eigh(matrix)
    scale = max(np.abs(matrix).max(), 1.0)
    for k in range(len(evals)):
        res = np.abs(matrix @ evecs[:, k] - evals[k] * evecs[:, k]).max()
        if res > residual_tol * scale:
            raise ValueError(f"eigenpair {k} residual {res:.2e} exceeds tolerance")
    return evals, evecs


def solve_sector(space: Space, j: int, potential: Optional[CentralPotential] = None,
                 m: Optional[int] = None, boundary: str = "hard") -> SpectrumResult:
    """Convenience: build the sector, reduce, and diagonalize."""
    sector = build_sector(space, j, j if m is None else m, boundary=boundary)
    mat = reduce_hamiltonian(space, sector, potential)
    evals, evecs = eigen_solve(mat)
    return SpectrumResult(
        lam=space.lam, n_max=space.n_max, j=j,
        potential=potential.name if potential is not None else "free",
        boundary=boundary, eigenvalues=evals, eigenvectors=evecs,
        metadata={"grid": sector.grid.tolist(),
                  "eigen_residual_tol": 1e-8,
                  "margin": 0 if boundary == "hard" else 1})


def commutative_oracle(grid: np.ndarray, h: float, j: int,
                       potential_values: Optional[np.ndarray] = None) -> np.ndarray:
    """Eigenvalues of the radial operator -(1/2)(d^2/dr^2 + (2/r) d/dr)
    + j(j+1)/(2 r^2) + U(r), central differences, Dirichlet at both ghost
    points of the uniform grid."""
    grid = np.asarray(grid, dtype=float)
    n = len(grid)
    u = np.zeros(n) if potential_values is None else np.asarray(potential_values)
    mat = np.zeros((n, n))
    for i in range(n):
        mat[i, i] = 1.0 / h**2 + j * (j + 1) / (2.0 * grid[i] ** 2) + u[i]
        if i + 1 < n:
            mat[i, i + 1] = -1.0 / (2 * h**2) - 1.0 / (2 * h * grid[i])
            mat[i + 1, i] = -1.0 / (2 * h**2) + 1.0 / (2 * h * grid[i + 1])
    # similarity by diag(r) symmetrizes the first-derivative term exactly
    sym = (grid[:, None] * mat) / grid[None, :]
    sym = 0.5 * (sym + sym.T)
    return np.linalg.eigvalsh(sym)


def full_kappa0_spectrum(space: Space,
                         potential: Optional[CentralPotential] = None) -> np.ndarray:
    """Brute-force spectrum of H on the whole charge-zero subspace.

    Builds the dense matrix of the superoperator over all block entries with
    equal left/right shell, symmetrized by the weighted norm.  Dimension
    grows like n_max^3 / 3; intended for small spaces.
    """
    basis = space.basis
    if basis.n_max > 8:
        raise ValueError("brute-force solve is meant for n_max <= 8")
    shells = basis.shells
    pairs = [(i, k) for i in range(basis.dim) for k in range(basis.dim)
             if shells[i] == shells[k]]
    dim = len(pairs)
    pos = {p: t for t, p in enumerate(pairs)}
    h = space.hamiltonian(potential)
    big = np.zeros((dim, dim), dtype=complex)
    for col, (i, k) in enumerate(pairs):
        e = np.zeros((basis.dim, basis.dim), dtype=complex)
        e[i, k] = 1.0
        u = h.func(e)
        u = u.toarray() if sp.issparse(u) else u
        for (i2, k2), row in pos.items():
            if u[i2, k2] != 0:
                big[row, col] = u[i2, k2]
    weights = np.sqrt(space.r_diag[[i for (i, _k) in pairs]])
    symm = (weights[:, None] * big) / weights[None, :]
    symm = 0.5 * (symm + symm.conj().T)
    return np.linalg.eigvalsh(symm)


def v2_consistency(space: Space, j: int, boundary: str = "dirichlet",
                   margin: int = 2) -> List[dict]:
    """Interior residual of V^2 = 2E - lam^2 E^2 on each free sector eigenvector.

    The quadratic map of the free eigenvalue reproduces the reduced V^2
    exactly on radial rows at least ``margin`` below the wall; the wall rows
    themselves carry the truncation and are excluded, mirroring the interior
    discipline used for all operator identities.
    """
    sector = build_sector(space, j, j, boundary=boundary)
    hmat = reduce_hamiltonian(space, sector)
    v2op = None
    for k in (1, 2, 3):
        v = space.velocity(k)
        t = v @ v
        v2op = t if v2op is None else v2op + t
    v2 = reduce_superop(space, sector, v2op)
    evals, evecs = eigen_solve(hmat)
    lam = space.lam
    out = []
    keep = sector.dim - margin
    for k, e in enumerate(evals):
        target = 2.0 * e - lam**2 * e**2
        resid = v2 @ evecs[:, k] - target * evecs[:, k]
        out.append({
            "level": k, "energy": float(e), "v2_target": float(target),
            "interior_residual": float(np.abs(resid[:keep]).max()) if keep > 0 else 0.0,
            "scale": float(max(abs(target), 1.0 / lam**2)),
        })
    return out


@dataclass
class ConvergenceRecord:
    lam: float
    n_max: int
    j: int
    level: int
    energy_nc: float
    energy_oracle: float
    gap: float

    def as_dict(self) -> dict:
        return {"lam": self.lam, "n_max": self.n_max, "j": self.j,
                "level": self.level, "E_nc": self.energy_nc,
                "E_oracle": self.energy_oracle, "gap": self.gap}


def convergence_study(schedule: Sequence[tuple], j: int,
                      potential_fn: Optional[Callable[[float], float]] = None,
                      potential_name: str = "free",
                      levels: int = 3) -> List[ConvergenceRecord]:
    """Compare NC and oracle spectra along a fixed-box schedule of (lam, n_max).

    The box R = lam (n_max + 1) should be held fixed along the schedule so
    the commutative limit lam -> 0 is taken at constant geometry.  Uses the
    Dirichlet wall on both sides of the comparison.
    """
    records = []
    for lam, n_max in schedule:
        space = Space(n_max, lam)
        pot = None
        if potential_fn is not None:
            pot = RadialFunction.from_callable(potential_fn, lam, n_max,
                                               name=potential_name)
        result = solve_sector(space, j, pot, boundary="dirichlet")
        sector_grid = np.asarray(result.metadata["grid"])
        uvals = None
        if potential_fn is not None:
            uvals = np.asarray([potential_fn(r) for r in sector_grid])
        oracle = commutative_oracle(sector_grid, lam, j, uvals)
        for level in range(min(levels, len(result.eigenvalues))):
            e_nc = float(result.eigenvalues[level])
            e_or = float(oracle[level])
            records.append(ConvergenceRecord(
                lam=lam, n_max=n_max, j=j, level=level,
                energy_nc=e_nc, energy_oracle=e_or, gap=abs(e_nc - e_or)))
    return records
