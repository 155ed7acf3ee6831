import numpy as np
import pytest

from fuzzylab.fock import EPS3, NCState
from fuzzylab.operators import RadialFunction, Space
from fuzzylab.spectra import shell_state


@pytest.fixture(scope="module")
def space():
    return Space(9, 0.7)


def _v2(space, psi):
    out = None
    for j in (1, 2, 3):
        vj = space.velocity(j)
        t = vj(vj(psi))
        out = t if out is None else out + t
    return out


def rel(space, diff, margin, scale):
    return space.ip.norm(space.interior(diff, margin)) / scale


def test_superop_linearity_bandwidth_and_charge(space):
    psi = space.random_state(3, 0, 5)
    phi = space.random_state(4, 0, 5)
    for op in (space.angular_momentum(2), space.position(1),
               space.velocity(3), space.velocity4(),
               space.free_hamiltonian(), space.w_vector(1)):
        a = op(0.5j * psi + 2.0 * phi)
        b = 0.5j * op(psi) + 2.0 * op(phi)
        assert (a - b).absmax() < 1e-12 * max(a.absmax(), 1.0)
        out = op(psi)
        assert out.support_max() <= psi.support_max() + op.bandwidth
        assert out.kappa() in (0, None)


def test_angular_momentum_so3(space):
    psi = space.random_state(1, 0, space.n_max)
    scale = space.ip.norm(psi)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            li, lj = space.angular_momentum(i), space.angular_momentum(j)
            got = li(lj(psi)) - lj(li(psi))
            for k in (1, 2, 3):
                if EPS3[i - 1, j - 1, k - 1]:
                    got = got - 1.0j * EPS3[i - 1, j - 1, k - 1] \
                        * space.angular_momentum(k)(psi)
            # bandwidth 0: exact on the full truncated space
            assert got.absmax() < 1e-12 * max(psi.absmax(), 1.0)
    del scale


def test_angular_momentum_eigenstate(space):
    psi = shell_state(space, 1, 1, 2)
    l3 = space.angular_momentum(3)(psi)
    assert (l3 - psi).absmax() < 1e-12 * psi.absmax()
    l2 = None
    for k in (1, 2, 3):
        lk = space.angular_momentum(k)
        t = lk(lk(psi))
        l2 = t if l2 is None else l2 + t
    assert (l2 - 2.0 * psi).absmax() < 1e-12 * psi.absmax()


def test_angular_momentum_commutes_with_radial(space):
    psi = space.random_state(2, 0, space.n_max)
    rop = space.radial()
    for k in (1, 2, 3):
        lk = space.angular_momentum(k)
        got = lk(rop(psi)) - rop(lk(psi))
        assert got.absmax() < 1e-12 * max(psi.absmax(), 1.0)


def test_position_commutators(space):
    lam = space.lam
    psi = space.random_state(5, 0, space.n_max)
    scale = space.ip.norm(psi)
    for i, j in ((1, 2), (2, 3), (1, 3)):
        xi, xj = space.position(i), space.position(j)
        got = xi(xj(psi)) - xj(xi(psi))
        for k in (1, 2, 3):
            if EPS3[i - 1, j - 1, k - 1]:
                got = got - 1.0j * lam**2 * EPS3[i - 1, j - 1, k - 1] \
                    * space.angular_momentum(k)(psi)
        assert space.ip.norm(got) < 1e-12 * scale
        li = space.angular_momentum(i)
        got = li(xj(psi)) - xj(li(psi))
        for k in (1, 2, 3):
            if EPS3[i - 1, j - 1, k - 1]:
                got = got - 1.0j * EPS3[i - 1, j - 1, k - 1] \
                    * space.position(k)(psi)
        assert space.ip.norm(got) < 1e-12 * scale


def test_left_right_position_difference_is_angular_momentum(space):
    psi = space.random_state(6, 0, space.n_max)
    for k in (1, 2, 3):
        got = space.position_left(k)(psi) - space.position_right(k)(psi) \
            - 2.0 * space.lam * space.angular_momentum(k)(psi)
        assert got.absmax() < 1e-12 * max(psi.absmax(), 1.0)


def test_free_hamiltonian_on_vacuum_projector(space):
    lam = space.lam
    basis = space.basis
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    m[basis.index[(0, 0)], basis.index[(0, 0)]] = 1.0
    p0 = NCState(basis, m)
    got = space.free_hamiltonian()(p0)
    lifted = None
    for al in range(2):
        t = space.ad[al] @ m @ space.a[al]
        lifted = t if lifted is None else lifted + t
    want = (1.0 / lam**2) * m - (1.0 / (4.0 * lam**2)) * lifted
    assert np.abs(got.dense() - want).max() < 1e-13 / lam**2


def test_velocity4_on_vacuum_projector(space):
    lam = space.lam
    basis = space.basis
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    m[basis.index[(0, 0)], basis.index[(0, 0)]] = 1.0
    p0 = NCState(basis, m)
    h0p0 = space.free_hamiltonian()(p0)
    want = (1.0 / lam) * p0 - lam * h0p0
    got = space.velocity4()(p0)
    assert (got - want).absmax() < 1e-13 / lam


def test_hamiltonian_forms_agree_on_interior(space):
    h0 = space.free_hamiltonian()
    lam, a, ad, rinv, r = space.lam, space.a, space.ad, space.rinv, space.r
    psi = space.random_state(8, 0, space.n_max - 1)
    m = psi.matrix
    s = (2.0 / lam) * (r @ m)
    for al in range(2):
        s = s - ad[al] @ m @ a[al] - a[al] @ m @ ad[al]
    zeta = NCState(space.basis, rinv @ s / (2.0 * lam))
    got = h0(psi)
    assert rel(space, got - zeta, 1, space.ip.norm(got)) < 1e-12


def test_hamiltonian_hermitian_and_positive(space):
    h0 = space.free_hamiltonian()
    for seed in range(4):
        phi = space.random_state(10 + seed, 0, space.n_max - 1)
        psi = space.random_state(20 + seed, 0, space.n_max - 1)
        a = space.ip(phi, h0(psi))
        b = space.ip(h0(phi), psi)
        assert abs(a - b) < 1e-10 * max(abs(a), 1.0)
        expect = space.ip(psi, h0(psi))
        assert expect.real > -1e-12


def test_velocity_forms_agree(space):
    h0 = space.free_hamiltonian()
    psi = space.random_state(30, 0, space.n_max - 1)
    for j in (1, 2, 3):
        xj = space.position(j)
        direct = -1.0j * (xj(h0(psi)) - h0(xj(psi)))
        v = space.velocity(j)(psi)
        w = space.velocity_w_form(j)(psi)
        scale = space.ip.norm(v)
        assert rel(space, v - direct, 1, scale) < 1e-12
        assert rel(space, v - w, 1, scale) < 1e-12
    v4a = space.velocity4()(psi)
    v4b = space.velocity4_cross_form()(psi)
    assert rel(space, v4a - v4b, 1, space.ip.norm(v4a)) < 1e-12


def test_superop_equality_by_full_matrix_at_small_cutoff():
    """Both velocity realizations have the same full matrix at n_max = 4
    on every unit state away from the cutoff shell (any charge)."""
    small = Space(4, 0.9)
    dim = small.basis.dim
    shells = small.basis.shells
    for j in (1, 2, 3):
        va, vb = small.velocity(j), small.velocity_w_form(j)
        for col_i in range(dim):
            for col_k in range(dim):
                if max(shells[col_i], shells[col_k]) > small.n_max - 1:
                    continue
                e = np.zeros((dim, dim), dtype=complex)
                e[col_i, col_k] = 1.0
                unit = NCState(small.basis, e)
                diff = (va(unit) - vb(unit)).absmax()
                assert diff < 1e-12 / small.lam


def test_velocity_on_coordinates(space):
    eye = space.identity_state()
    for i in (1, 2, 3):
        vi = space.velocity(i)
        for j in (1, 2, 3):
            got = vi(space.state(space.x[j - 1].astype(complex)))
            want = (-1.0j if i == j else 0.0) * eye
            assert rel(space, got - want, 1, 1.0) < 1e-12


def test_velocity_on_radial_function(space):
    # f = r^2 has exact central difference 2r
    f = space.state((space.r @ space.r).astype(complex))
    for j in (1, 2, 3):
        got = space.velocity(j)(f)
        want = space.state(-2.0j * ((space.x[j - 1] @ space.rinv) @ space.r))
        assert rel(space, got - want, 1, space.ip.norm(want)) < 1e-12


def test_leibniz_rule_with_correction(space):
    for seed in (0, 1):
        A = space.random_state(40 + seed, 0, space.n_max - 2)
        B = space.random_state(50 + seed, 0, space.n_max - 2)
        prod = NCState(space.basis, A.matrix @ B.matrix)
        for i in (1, 2, 3):
            vi = space.velocity(i)
            lhs = vi(prod)
            rhs = NCState(space.basis, vi(A).matrix @ B.matrix) \
                + NCState(space.basis, A.matrix @ vi(B).matrix) \
                + space.leibniz_correction(i, A, B)
            assert rel(space, lhs - rhs, 2, space.ip.norm(lhs)) < 1e-12


def test_correction_sum_gives_hamiltonian(space):
    lam = space.lam
    psi = space.random_state(60, 0, space.n_max - 2)
    h0psi = space.free_hamiltonian()(psi)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            xj = space.state(space.x[j - 1].astype(complex))
            got = 0.5 * (space.leibniz_correction(i, xj, psi)
                         + space.leibniz_correction(i, psi, xj))
            want = (1.0j * lam**2 if i == j else 0.0) * h0psi
            assert rel(space, got - want, 2, space.ip.norm(h0psi)) < 1e-12


def test_correction_with_identity_vanishes(space):
    psi = space.random_state(61, 0, space.n_max - 1)
    eye = space.identity_state()
    for i in (1, 2, 3):
        got = space.leibniz_correction(i, eye, psi)
        assert got.absmax() < 1e-13 * max(psi.absmax(), 1.0)


def test_uncertainty_deformation(space):
    lam = space.lam
    h0 = space.free_hamiltonian()
    psi = space.random_state(62, 0, space.n_max - 1)
    scale = space.ip.norm(psi)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            vi, xj = space.velocity(i), space.position(j)
            got = vi(xj(psi)) - xj(vi(psi))
            if i == j:
                got = got + 1.0j * (psi - lam**2 * h0(psi))
            assert rel(space, got, 1, scale) < 1e-12


def test_velocity_commutators_vanish(space):
    psi = space.random_state(63, 0, space.n_max - 2)
    ops = [space.velocity(1), space.velocity(2), space.velocity(3),
           space.velocity4()]
    scale = 1.0 / space.lam * space.ip.norm(psi)
    for i in range(4):
        for j in range(i + 1, 4):
            got = ops[i](ops[j](psi)) - ops[j](ops[i](psi))
            assert rel(space, got, 2, scale) < 1e-11


def test_quadratic_relation_and_casimir(space):
    lam = space.lam
    h0 = space.free_hamiltonian()
    psi = space.random_state(64, 0, space.n_max - 2)
    v2 = _v2(space, psi)
    h = h0(psi)
    want = 2.0 * h - lam**2 * h0(h)
    assert rel(space, v2 - want, 2, space.ip.norm(v2)) < 1e-12
    c2 = space.casimir2()(psi)
    assert rel(space, c2 - (1.0 / lam**2) * psi, 2,
               space.ip.norm(psi) / lam**2) < 1e-12


def test_pauli_lubanski_annihilates_charge_zero(space):
    psi = space.random_state(65, 0, space.n_max - 1)
    scale = space.ip.norm(psi) / space.lam
    for a in (1, 2, 3, 4):
        got = space.pauli_lubanski(a)(psi)
        assert rel(space, got, 1, scale) < 1e-12


def test_velocity_commutes_with_hamiltonian(space):
    h0 = space.free_hamiltonian()
    psi = space.random_state(66, 0, space.n_max - 2)
    scale = space.ip.norm(psi) / space.lam**3
    for i in (1, 2, 3):
        vi = space.velocity(i)
        got = vi(h0(psi)) - h0(vi(psi))
        assert rel(space, got, 2, scale) < 1e-12


def test_laplacian_is_minus_twice_hamiltonian(space):
    psi = space.random_state(90, 0, space.n_max - 1)
    got = space.laplacian()(psi)
    want = -2.0 * space.free_hamiltonian()(psi)
    assert (got - want).absmax() == 0.0


def test_radial_function_derivatives():
    lam, n_max = 0.3, 12
    ident = RadialFunction.from_callable(lambda r: r, lam, n_max, name="r")
    d1 = ident.lambda_derivative(1)
    # constant extension halves the one-sided difference at the flagged edges
    assert np.abs(d1.values[1:-1] - 1.0).max() < 1e-14
    sq = RadialFunction.from_callable(lambda r: r * r, lam, n_max, name="r2")
    grid = lam * (np.arange(n_max + 1) + 1.0)
    d1 = sq.lambda_derivative(1)
    d2 = sq.lambda_derivative(2)
    inner = slice(1, n_max)  # boundary shells use the constant extension
    assert np.abs(d1.values[inner] - 2.0 * grid[inner]).max() < 1e-12
    assert np.abs(d2.values[inner] - 2.0).max() < 1e-12
    assert d1.boundary_flags == (0, n_max)
    inv = RadialFunction.from_callable(lambda r: 1.0 / r, lam, n_max, name="1/r")
    d1 = inv.lambda_derivative(1)
    want = -1.0 / (grid[inner] ** 2 - lam**2)
    assert np.abs(d1.values[inner] - want).max() < 1e-12


def test_radial_derivative_rejects_bad_order():
    f = RadialFunction.from_callable(lambda r: r, 0.5, 4)
    with pytest.raises(ValueError):
        f.lambda_derivative(3)


@pytest.mark.parametrize("name,fn", [
    ("r2", lambda r: r * r),
    ("coulomb", lambda r: -1.0 / r),
    ("exp", lambda r: np.exp(-r)),
])
def test_acceleration_decomposition(space, name, fn):
    pot = RadialFunction.from_callable(fn, space.lam, space.n_max, name=name)
    psi = space.random_state(70, 0, space.n_max - 2)
    for i in (1, 2, 3):
        a = space.acceleration(i, pot)(psi)
        b = space.acceleration_decomposed(i, pot)(psi)
        scale = max(space.ip.norm(a), space.ip.norm(psi))
        assert rel(space, a - b, 2, scale) < 1e-12


def test_acceleration_constant_potential_vanishes(space):
    pot = RadialFunction.from_callable(lambda r: 2.5, space.lam, space.n_max,
                                       name="const")
    psi = space.random_state(71, 0, space.n_max - 1)
    for i in (1, 2, 3):
        got = space.acceleration(i, pot)(psi)
        assert rel(space, got, 1, space.ip.norm(psi) / space.lam) < 1e-13


def test_acceleration_ignores_kinetic_part(space):
    pot = RadialFunction.from_callable(lambda r: -1.0 / r, space.lam,
                                       space.n_max, name="coulomb")
    h = space.hamiltonian(pot)
    u = space.radial_multiplication(pot)
    psi = space.random_state(72, 0, space.n_max - 2)
    for i in (1, 2, 3):
        vi = space.velocity(i)
        full = -1.0j * (vi(h(psi)) - h(vi(psi)))
        pot_only = -1.0j * (vi(u(psi)) - u(vi(psi)))
        scale = max(space.ip.norm(full), space.ip.norm(psi))
        assert rel(space, full - pot_only, 2, scale) < 1e-11


def test_hermiticity_under_weighted_inner_product(space):
    ops = [space.angular_momentum(1), space.position(2), space.velocity(3),
           space.velocity4(), space.free_hamiltonian()]
    for op in ops:
        margin = op.bandwidth
        phi = space.random_state(80, 0, space.n_max - margin)
        psi = space.random_state(81, 0, space.n_max - margin)
        a = space.ip(phi, op(psi))
        b = space.ip(op(phi), psi)
        scale = max(space.ip.norm(op(psi)), 1e-300)
        assert abs(a - b) < 1e-11 * scale


def test_commutative_limit_of_velocity_gradient():
    box = 4.0
    ratios = []
    for lam in (0.2, 0.1, 0.05):
        n_max = int(round(box / lam)) - 1
        sub = Space(n_max, lam)
        shell_r = lam * (np.arange(n_max + 1) + 1.0)
        f_state = sub.state(sub.shell_diagonal(np.exp(-shell_r)))
        df = sub.shell_diagonal(-np.exp(-shell_r))
        worst = 0.0
        for j in (1, 2, 3):
            got = sub.velocity(j)(f_state)
            want = sub.state(-1.0j * ((sub.x[j - 1] @ sub.rinv) @ df))
            num = sub.ip.norm(sub.interior(got - want, 2))
            den = sub.ip.norm(sub.interior(want, 2))
            worst = max(worst, num / den)
        ratios.append(worst)
    assert ratios[1] < ratios[0] and ratios[2] < ratios[1]
    # central difference converges at second order: halving lam gains ~4x
    assert ratios[0] / ratios[2] > 8.0
