import numpy as np
import pytest

from fuzzylab.operators import RadialFunction, Space
from fuzzylab import spectra as spc


@pytest.fixture(scope="module")
def space():
    return Space(8, 0.5)


def test_sector_states_are_angular_eigenstates(space):
    for j, m in [(0, 0), (1, 1), (1, 0), (2, -1), (2, 0), (2, 2)]:
        sector = spc.build_sector(space, j, m)
        for psi in sector.states:
            l3 = space.angular_momentum(3)(psi)
            assert (l3 - m * psi).absmax() < 1e-12 * max(psi.absmax(), 1.0)
            l2 = None
            for k in (1, 2, 3):
                lk = space.angular_momentum(k)
                t = lk(lk(psi))
                l2 = t if l2 is None else l2 + t
            assert (l2 - j * (j + 1) * psi).absmax() \
                < 1e-11 * max(psi.absmax(), 1.0)


def test_sector_basis_orthonormal(space):
    sector = spc.build_sector(space, 1, 0)
    for a, sa in enumerate(sector.states):
        for b, sb in enumerate(sector.states):
            got = space.ip(sa, sb)
            assert abs(got - (1.0 if a == b else 0.0)) < 1e-12


def test_sector_dimensions_and_grid(space):
    hard = spc.build_sector(space, 2, 0, boundary="hard")
    diri = spc.build_sector(space, 2, 0, boundary="dirichlet")
    assert hard.dim == space.n_max - 2 + 1
    assert diri.dim == hard.dim - 1
    assert np.allclose(hard.grid, space.lam * (np.arange(2, 9) + 1.0))


def test_sector_rejections(space):
    with pytest.raises(ValueError, match="integer"):
        spc.build_sector(space, 0.5, 0.5)
    with pytest.raises(ValueError, match="m must"):
        spc.build_sector(space, 1, 2)
    with pytest.raises(ValueError):
        spc.build_sector(space, 12, 0)
    with pytest.raises(ValueError):
        spc.build_sector(space, 1, 0, boundary="soft")


def test_reduced_hamiltonian_hermitian_tridiagonal(space):
    for j in (0, 1, 2):
        sector = spc.build_sector(space, j, 0, boundary="dirichlet")
        mat = spc.reduce_hamiltonian(space, sector)
        assert np.abs(mat - mat.conj().T).max() < 1e-12 * np.abs(mat).max()
        d = len(mat)
        for a in range(d):
            for b in range(d):
                if abs(a - b) > 1:
                    assert abs(mat[a, b]) < 1e-12 * np.abs(mat).max()


def test_reduced_hamiltonian_m_independent(space):
    pot = RadialFunction.from_callable(lambda r: -1.0 / r, space.lam,
                                       space.n_max, name="coulomb")
    for j in (1, 2):
        mats = []
        for m in range(-j, j + 1):
            sector = spc.build_sector(space, j, m, boundary="dirichlet")
            mats.append(spc.reduce_hamiltonian(space, sector, pot))
        scale = np.abs(mats[0]).max()
        for mat in mats[1:]:
            assert np.abs(mat - mats[0]).max() < 1e-10 * scale


def test_constant_potential_shifts_diagonal(space):
    c = 2.25
    pot = RadialFunction.from_callable(lambda r: c, space.lam, space.n_max,
                                       name="const")
    sector = spc.build_sector(space, 1, 1, boundary="dirichlet")
    free = spc.reduce_hamiltonian(space, sector)
    shifted = spc.reduce_hamiltonian(space, sector, pot)
    want = free + c * np.eye(len(free))
    assert np.abs(shifted - want).max() < 1e-12 * np.abs(want).max()


def test_free_spectrum_inside_cutoff(space):
    lam = space.lam
    for j in (0, 1, 2):
        for boundary in ("hard", "dirichlet"):
            res = spc.solve_sector(space, j, boundary=boundary)
            assert res.eigenvalues.min() > -1e-8
            assert res.eigenvalues.max() < 2.0 / lam**2 + 1e-8 / lam**2


def test_eigen_solve_contracts():
    mat = np.array([[3.0]])
    evals, evecs = spc.eigen_solve(mat)
    assert evals[0] == 3.0 and abs(abs(evecs[0, 0]) - 1.0) < 1e-15
    rng = np.random.default_rng(0)
    h = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = h + h.conj().T
    evals, evecs = spc.eigen_solve(h)
    assert np.all(np.diff(evals) >= 0)
    with pytest.raises(ValueError):
        spc.eigen_solve(np.array([[0.0, 1.0], [0.0, 0.0]]))  # not hermitian


def test_eigenvalues_invariant_under_basis_reordering(space):
    sector = spc.build_sector(space, 0, 0, boundary="dirichlet")
    mat = spc.reduce_hamiltonian(space, sector)
    perm = np.random.default_rng(1).permutation(len(mat))
    permuted = mat[np.ix_(perm, perm)]
    a = np.linalg.eigvalsh(mat)
    b = np.linalg.eigvalsh(permuted)
    assert np.abs(a - b).max() < 1e-10 * np.abs(a).max()


def test_v2_consistency_interior(space):
    for j in (0, 1, 2):
        rows = spc.v2_consistency(space, j)
        for row in rows:
            assert row["interior_residual"] <= 1e-8 * row["scale"]


def test_oracle_box_levels_match_analytic():
    lam, n_max = 0.05, 79
    grid = lam * (np.arange(n_max + 1) + 1.0)
    evals = spc.commutative_oracle(grid, lam, 0)
    r_eff = lam * (n_max + 2)  # Dirichlet ghost point
    for k in (1, 2, 3):
        analytic = 0.5 * (np.pi * k / r_eff) ** 2
        assert abs(evals[k - 1] - analytic) < 0.02 * analytic


def test_oracle_constant_shift():
    lam, n_max = 0.2, 19
    grid = lam * (np.arange(n_max + 1) + 1.0)
    base = spc.commutative_oracle(grid, lam, 0)
    shifted = spc.commutative_oracle(grid, lam, 0, np.full(n_max + 1, 1.5))
    assert np.abs(shifted - base - 1.5).max() < 1e-10


def test_oracle_hydrogen_ground_state_converges():
    gaps = []
    for lam, n_max in [(0.4, 19), (0.2, 39), (0.1, 79)]:
        grid = lam * (np.arange(n_max + 1) + 1.0)
        evals = spc.commutative_oracle(grid, lam, 0, -1.0 / grid)
        gaps.append(abs(evals[0] + 0.5))
    assert gaps[1] < gaps[0] and gaps[2] < gaps[1]
    assert gaps[-1] < 0.05  # within 10% of -1/2 by the finest grid


def test_brute_force_matches_sector_union():
    lam = 0.5
    small = Space(5, lam)
    pot = RadialFunction.from_callable(lambda r: -1.0 / r, lam, 5,
                                       name="coulomb")
    for potential in (None, pot):
        full = np.sort(spc.full_kappa0_spectrum(small, potential))
        union = []
        for j in range(0, 6):
            res = spc.solve_sector(small, j, potential, boundary="hard")
            union.extend(list(res.eigenvalues) * (2 * j + 1))
        union = np.sort(np.asarray(union))
        assert len(union) == len(full) == sum((n + 1) ** 2 for n in range(6))
        assert np.abs(full - union).max() < 1e-8 * max(np.abs(full).max(), 1.0)


def test_brute_force_guards_size():
    with pytest.raises(ValueError):
        spc.full_kappa0_spectrum(Space(9, 0.5))


def test_convergence_study_free_and_coulomb():
    schedule = [(0.8, 9), (0.4, 19)]
    recs = spc.convergence_study(schedule, 1)
    assert len(recs) == 6
    for level in range(3):
        gaps = [r.gap for r in recs if r.level == level]
        assert gaps[1] < gaps[0]
    recs = spc.convergence_study(schedule, 0, lambda r: -1.0 / r, "coulomb",
                                 levels=1)
    for rec in recs:
        assert rec.gap < 1e-8 * max(abs(rec.energy_oracle), 1.0)


def test_bound_level_stabilizes_with_growing_box():
    # fixed lam, growing cutoff: the Coulomb ground level converges from above
    lam = 0.4
    levels = []
    for n_max in (19, 29, 39):
        pot = RadialFunction.from_callable(lambda r: -1.0 / r, lam, n_max,
                                           name="coulomb")
        res = spc.solve_sector(Space(n_max, lam), 0, pot,
                               boundary="dirichlet")
        levels.append(float(res.eigenvalues[0]))
    assert levels[1] <= levels[0] and levels[2] <= levels[1]
    assert abs(levels[2] - levels[1]) < abs(levels[1] - levels[0]) + 1e-12


def test_gram_condition_guard(space):
    sector = spc.build_sector(space, 0, 0)
    degenerate = spc.AngularSector(
        j=0, m=0, lam=space.lam, boundary="hard",
        states=[sector.states[0], sector.states[0]],
        shells=np.array([0.0, 0.0]))
    with pytest.raises(ValueError, match="Gram"):
        spc.reduce_hamiltonian(space, degenerate)


def test_spectrum_result_rows(space):
    res = spc.solve_sector(space, 0)
    rows = res.rows()
    assert len(rows) == len(res.eigenvalues)
    assert rows[0]["potential"] == "free"
    assert rows[3]["level"] == 3
