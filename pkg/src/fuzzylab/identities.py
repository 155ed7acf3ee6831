"""Symbolic operator library and the exact identity proofs.

Every operator of the theory is expressed in the rewriting algebra of
:mod:`fuzzylab.algebra` (charge-zero form, left radius ``r`` only) and the
structural identities are certified by reducing both sides to the canonical
normal form with exact rational arithmetic.  The same expressions can be
instantiated as numeric superoperators and cross-validated against the
matrix constructions in :mod:`fuzzylab.operators`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import sympy
from sympy import I as sI
from sympy import Rational

from .algebra import (LAM, R, UFUN, AlgebraExpr, aL, aL_dag, aR, aR_dag,
                      coeff, expr_to_text, one, to_superop)

__all__ = [
    "PAULI_SYM", "EPS4",
    "pauli_entry", "fierz_residual", "anticommutator_residual",
    "x_left", "position_op", "angular_momentum_op", "w_op", "velocity_op",
    "h0_zeta", "h0_raw", "velocity4_op", "w_vector_op",
    "leibniz_correction_coordinate",
    "IdentityResult", "IDENTITY_NAMES", "check_identity", "cross_validate",
]

#: exact Pauli matrices (Gaussian-rational entries)
PAULI_SYM = (
    ((sympy.S.Zero, sympy.S.One), (sympy.S.One, sympy.S.Zero)),
    ((sympy.S.Zero, -sI), (sI, sympy.S.Zero)),
    ((sympy.S.One, sympy.S.Zero), (sympy.S.Zero, -sympy.S.One)),
)

_EPS3 = {}
for _p, _s in ((((1, 2, 3)), 1), ((2, 3, 1), 1), ((3, 1, 2), 1),
               ((3, 2, 1), -1), ((1, 3, 2), -1), ((2, 1, 3), -1)):
    _EPS3[_p] = _s


def eps3(i: int, j: int, k: int) -> int:
    return _EPS3.get((i, j, k), 0)


def EPS4(a: int, b: int, c: int, d: int) -> int:
    """Totally antisymmetric symbol with EPS4(1,2,3,4) = +1."""
    perm = (a, b, c, d)
    if len(set(perm)) != 4:
        return 0
    sign, items = 1, list(perm)
    for i in range(3):
        m = min(range(i, 4), key=lambda t: items[t])
        if m != i:
            items[i], items[m] = items[m], items[i]
            sign = -sign
    return sign


def pauli_entry(j: int, al: int, be: int) -> sympy.Expr:
    """sigma^j_{al be} with 1-based indices everywhere."""
    return PAULI_SYM[j - 1][al - 1][be - 1]


def anticommutator_residual() -> sympy.Expr:
    """max |{sigma_i, sigma_j}_{ab} - 2 delta_ij delta_ab| as exact zero check."""
    worst = sympy.S.Zero
    for i in range(1, 4):
        for j in range(1, 4):
            for al in range(1, 3):
                for be in range(1, 3):
                    acc = sum(pauli_entry(i, al, g) * pauli_entry(j, g, be)
                              + pauli_entry(j, al, g) * pauli_entry(i, g, be)
                              for g in range(1, 3))
                    target = 2 * int(i == j) * int(al == be)
                    worst = worst + abs(sympy.simplify(acc - target))
    return sympy.simplify(worst)


def fierz_residual() -> sympy.Expr:
    """eps^{ijk} sig^i_{ab} sig^j_{gd} = i (sig^k_{ad} delta_{gb} - sig^k_{gb} delta_{ad})."""
    worst = sympy.S.Zero
    for k in range(1, 4):
        for al in range(1, 3):
            for be in range(1, 3):
                for ga in range(1, 3):
                    for de in range(1, 3):
                        lhs = sum(eps3(i, j, k) * pauli_entry(i, al, be)
                                  * pauli_entry(j, ga, de)
                                  for i in range(1, 4) for j in range(1, 4))
                        rhs = sI * (pauli_entry(k, al, de) * int(ga == be)
                                    - pauli_entry(k, ga, be) * int(al == de))
                        worst = worst + abs(sympy.simplify(lhs - rhs))
    return sympy.simplify(worst)


# -- operator library (charge-zero reduced form) -------------------------------

def _sigma_sum(j: int, factory) -> AlgebraExpr:
    out = None
    for al in range(1, 3):
        for be in range(1, 3):
            s = pauli_entry(j, al, be)
            if s == 0:
                continue
            term = s * factory(al, be)
            out = term if out is None else out + term
    return out


def x_left(j: int) -> AlgebraExpr:
    """Left multiplication by the coordinate x_j = lam sig^j_{ab} a+_a a_b."""
    return LAM * _sigma_sum(j, lambda al, be: aL_dag(al) * aL(be))


def position_op(j: int) -> AlgebraExpr:
    """X_j = (lam/2) sig^j_{ab} (aL+_a aL_b + aR+_a aR_b)."""
    return Rational(1, 2) * LAM * _sigma_sum(
        j, lambda al, be: aL_dag(al) * aL(be) + aR_dag(al) * aR(be))


def angular_momentum_op(k: int) -> AlgebraExpr:
    """L_k = (1/2) sig^k_{ab} (aL+_a aL_b - aR+_a aR_b)."""
    return Rational(1, 2) * _sigma_sum(
        k, lambda al, be: aL_dag(al) * aL(be) - aR_dag(al) * aR(be))


def w_op(al: int, be: int) -> AlgebraExpr:
    """w_ab psi = a+_a psi a_b - a_b psi a+_a."""
    return aL_dag(al) * aR(be) - aL(be) * aR_dag(al)


def velocity_op(j: int) -> AlgebraExpr:
    """V_j = (i/2r) sig^j_{ab} w_ab."""
    return coeff(sI / (2 * R)) * _sigma_sum(j, w_op)


def h0_zeta() -> AlgebraExpr:
    """Charge-zero kinetic Hamiltonian (2r/lam - aL+.aR - aR+.aL) / (2 lam r)."""
    adotb = sum((aL_dag(al) * aR(al) for al in (1, 2)), AlgebraExpr())
    bdota = sum((aR_dag(al) * aL(al) for al in (1, 2)), AlgebraExpr())
    return coeff(1 / LAM**2) * one() - coeff(1 / (2 * LAM * R)) * (adotb + bdota)


def h0_raw() -> AlgebraExpr:
    """Double-commutator form (a+_al [a_al, .] acting from both sides) / (2 lam r)."""
    s = AlgebraExpr()
    for al in (1, 2):
        s = s + (aL_dag(al) - aR_dag(al)) * (aL(al) - aR(al))
    return coeff(1 / (2 * LAM * R)) * s


def velocity4_op() -> AlgebraExpr:
    """V_4 psi = (a+_a psi a_a + a_a psi a+_a) / (2r)."""
    s = AlgebraExpr()
    for al in (1, 2):
        s = s + aL_dag(al) * aR(al) + aL(al) * aR_dag(al)
    return coeff(1 / (2 * R)) * s


def calW_op(al: int, be: int) -> AlgebraExpr:
    """[a_b, [a+_a, .]] = aL+_a aL_b + aR+_a aR_b - aL+_a aR_b - aL_b aR+_a."""
    return (aL_dag(al) * aL(be) + aR_dag(al) * aR(be)
            - aL_dag(al) * aR(be) - aL(be) * aR_dag(al))


def w_vector_op(i: int) -> AlgebraExpr:
    """W_i = (1/2r) sig^i_{ab} [a_b, [a+_a, .]]."""
    return coeff(1 / (2 * R)) * _sigma_sum(i, calW_op)


def A_hat(al: int, be: int) -> AlgebraExpr:
    """a+_a [a_b, .]"""
    return aL_dag(al) * (aL(be) - aR(be))


def B_hat(al: int, be: int) -> AlgebraExpr:
    """a_b [a+_a, .]"""
    return aL(be) * (aL_dag(al) - aR_dag(al))


def leibniz_correction_coordinate(i: int, j: int, coordinate_first: bool) -> AlgebraExpr:
    """K_i(x_j, .) (coordinate_first) or K_i(., x_j) as a superoperator.

    Uses [a+_a, x_j] = -lam sig^j_{ga} a+_g and [a_b, x_j] = lam sig^j_{bd} a_d;
    in the second slot the coordinate commutators multiply from the right.
    """
    total = AlgebraExpr()
    for al in range(1, 3):
        for be in range(1, 3):
            si = pauli_entry(i, al, be)
            if si == 0:
                continue
            if coordinate_first:
                t1 = AlgebraExpr()
                for ga in range(1, 3):
                    sj = pauli_entry(j, ga, al)
                    if sj != 0:
                        t1 = t1 + (-LAM * sj) * (aL_dag(ga) * (aL(be) - aR(be)))
                t2 = AlgebraExpr()
                for de in range(1, 3):
                    sj = pauli_entry(j, be, de)
                    if sj != 0:
                        t2 = t2 + (LAM * sj) * (aL(de) * (aL_dag(al) - aR_dag(al)))
                total = total + si * (t1 - t2)
            else:
                t1 = AlgebraExpr()
                for de in range(1, 3):
                    sj = pauli_entry(j, be, de)
                    if sj != 0:
                        t1 = t1 + (LAM * sj) * (aR(de) * (aL_dag(al) - aR_dag(al)))
                t2 = AlgebraExpr()
                for ga in range(1, 3):
                    sj = pauli_entry(j, ga, al)
                    if sj != 0:
                        t2 = t2 + (-LAM * sj) * (aR_dag(ga) * (aL(be) - aR(be)))
                total = total + si * (t1 - t2)
    return coeff(-sI / (2 * R)) * total


# -- identity proofs ---------------------------------------------------------

@dataclass
class IdentityResult:
    """Outcome of one exact proof: residual normal forms and intermediates."""

    name: str
    statement: str
    residuals: Dict[str, AlgebraExpr]
    intermediates: List[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(not r.terms for r in self.residuals.values()) and \
            all(flag for _label, _text, flag in self.intermediates)

    def transcript(self) -> str:
        lines = [f"identity: {self.name}", f"statement: {self.statement}"]
        for label, res in sorted(self.residuals.items()):
            lines.append(f"residual[{label}]: {expr_to_text(res)}")
        for label, text, flag in self.intermediates:
            lines.append(f"intermediate[{label}]: {'ok' if flag else 'MISMATCH'}: {text}")
        lines.append(f"verdict: {'proved' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"


def _residual(lhs: AlgebraExpr, rhs: AlgebraExpr) -> AlgebraExpr:
    """Charge-zero residual: normal order, then identify the two radii.

    The right radius enters through the right-family number relation even
    for expressions built from left-radius coefficients; identities of the
    theory hold on charge-zero states, where r_R = r block-wise.
    """
    return (lhs - rhs).kappa_reduce()


def _prove_velocity_form() -> IdentityResult:
    """-i [X_i, H0] reduces to (i/2r) sig^i w on charge-zero states."""
    residuals = {}
    h0 = h0_zeta()
    for i in (1, 2, 3):
        lhs = (-sI) * position_op(i).commutator(h0)
        residuals[f"i={i}"] = _residual(lhs, velocity_op(i))
    inter = []
    red = h0_raw().kappa_reduce()
    ok = _residual(red, h0) .terms == {}
    inter.append(("double-commutator kappa-reduces to the charge-zero form",
                  expr_to_text(red), ok))
    return IdentityResult(
        name="velocity-form",
        statement="-i[X_i, H0] = (i/2r) sigma^i_{ab} (a+_a . a_b - a_b . a+_a)",
        residuals=residuals, intermediates=inter)


def _prove_correction_sum() -> IdentityResult:
    """(K_i(x_j, .) + K_i(., x_j))/2 = i delta_ij lam^2 H0."""
    residuals = {}
    h0 = h0_zeta()
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            lhs = Rational(1, 2) * (leibniz_correction_coordinate(i, j, True)
                                    + leibniz_correction_coordinate(i, j, False))
            rhs = (sI * LAM**2 * int(i == j)) * h0
            residuals[f"i={i},j={j}"] = _residual(lhs, rhs)
    return IdentityResult(
        name="correction-sum",
        statement="(K_i(x_j,.) + K_i(.,x_j))/2 = i delta_ij lam^2 H0",
        residuals=residuals)


def _prove_velocity_commutator() -> IdentityResult:
    """[V_i, V_j] = 0 on charge-zero states, with the +-8i/r^2 L_k split."""
    residuals = {}
    unreduced_nonzero = True
    for i, j in ((1, 2), (2, 3), (1, 3)):
        full = velocity_op(i).commutator(velocity_op(j)).normal()
        unreduced_nonzero = unreduced_nonzero and bool(full.terms)
        residuals[f"[V{i},V{j}]"] = full.kappa_reduce()
    inter = [("commutator is nonzero before charge-zero reduction "
              "(every coefficient carries a factor r - r_R)",
              "unequal creation/annihilation counts give [V_i,V_j] != 0",
              unreduced_nonzero)]
    rinv = coeff(1 / R)
    for k in (1, 2, 3):
        t_ww = AlgebraExpr()
        t_rad = AlgebraExpr()
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                e = eps3(i, j, k)
                if e == 0:
                    continue
                for al in range(1, 3):
                    for be in range(1, 3):
                        si = pauli_entry(i, al, be)
                        if si == 0:
                            continue
                        for ga in range(1, 3):
                            for de in range(1, 3):
                                sj = pauli_entry(j, ga, de)
                                if sj == 0:
                                    continue
                                pref = e * si * sj
                                wab, wgd = w_op(al, be), w_op(ga, de)
                                t_ww = t_ww + pref * (coeff(1 / R**2)
                                                      * wab.commutator(wgd))
                                t_rad = t_rad + pref * (
                                    rinv * wab.commutator(rinv) * wgd
                                    + rinv * rinv.commutator(wgd) * wab)
        target = coeff(8 * sI / R**2) * angular_momentum_op(k)
        ok1 = _residual(t_ww, target).terms == {}
        ok2 = _residual(t_rad, (-1) * target).terms == {}
        inter.append((f"eps.sig.sig [w,w]/r^2 piece equals +8i/r^2 L_{k}",
                      expr_to_text(t_ww.kappa_reduce()), ok1))
        inter.append((f"radial-shift piece equals -8i/r^2 L_{k}",
                      expr_to_text(t_rad.kappa_reduce()), ok2))
    return IdentityResult(
        name="velocity-commutator",
        statement="[V_i, V_j] = 0 with intermediate +-(8i/r^2) L_k contributions",
        residuals=residuals, intermediates=inter)


def _prove_quadratic_relation() -> IdentityResult:
    """(1/lam^2 - H0)^2 = (1/lam^2)(1/lam^2 - V^2)."""
    h0 = h0_zeta()
    v2 = AlgebraExpr()
    for j in (1, 2, 3):
        v2 = v2 + velocity_op(j) * velocity_op(j)
    lhs_base = coeff(1 / LAM**2) * one() - h0
    lhs = lhs_base * lhs_base
    rhs = coeff(1 / LAM**2) * (coeff(1 / LAM**2) * one() - v2)
    residuals = {"endpoint": _residual(lhs, rhs)}
    # quoted closed forms of each side
    adotb = sum((aL_dag(al) * aR(al) for al in (1, 2)), AlgebraExpr())
    abdag = sum((aL(al) * aR_dag(al) for al in (1, 2)), AlgebraExpr())
    quoted_v2 = (coeff(1 / LAM**2) * one()
                 - coeff(1 / (4 * R * (R - LAM))) * (adotb * adotb + adotb * abdag)
                 - coeff(1 / (4 * R * (R + LAM))) * (abdag * abdag + abdag * adotb))
    ok_v2 = _residual(v2, quoted_v2).terms == {}
    inter = [("V^2 matches its contracted-bilinear closed form",
              expr_to_text(v2.kappa_reduce()), ok_v2)]
    # V_4^2 = (1/lam - lam H0)^2 reproduces 1/lam^2 - V^2 (Casimir route)
    v4 = velocity4_op()
    cas = _residual(v4 * v4, coeff(1 / LAM**2) * one() - v2)
    inter.append(("V_4^2 equals 1/lam^2 - V^2",
                  expr_to_text((v4 * v4).kappa_reduce()), cas.terms == {}))
    return IdentityResult(
        name="quadratic-relation",
        statement="(1/lam^2 - H0)^2 = (1/lam^2)(1/lam^2 - V^2)",
        residuals=residuals, intermediates=inter)


def _prove_acceleration() -> IdentityResult:
    """-i[V_i, U(r)] decomposes into gradient, L, W and V terms.

    The exact coefficients (with W_i = (1/2r) sig [a,[a+, .]]) are

        -i(V_i U) + U'(lam/r) L_i + lam U' W_i - (i lam^2/2) U'' V_i
    """
    du = (UFUN(R + LAM) - UFUN(R - LAM)) / (2 * LAM)
    ddu = (UFUN(R + LAM) - 2 * UFUN(R) + UFUN(R - LAM)) / LAM**2
    residuals = {}
    for i in (1, 2, 3):
        lhs = (-sI) * velocity_op(i).commutator(coeff(UFUN(R)))
        grad = coeff(-du / R) * x_left(i)  # -i * (V_i U) as a left multiplication
        term_l = coeff(du * LAM / R) * angular_momentum_op(i)
        term_w = coeff(LAM * du) * w_vector_op(i)
        term_v = coeff(-sI * LAM**2 * ddu / 2) * velocity_op(i)
        residuals[f"i={i}"] = _residual(lhs, grad + term_l + term_w + term_v)
    inter = []
    for i in (1, 2, 3):
        a_con = _sigma_sum(i, A_hat)
        b_con = _sigma_sum(i, B_hat)
        half = Rational(1, 2)
        a_target = half * _sigma_sum(
            i, lambda al, be: calW_op(al, be) - w_op(al, be)) \
            + angular_momentum_op(i)
        b_target = half * _sigma_sum(
            i, lambda al, be: calW_op(al, be) + w_op(al, be)) \
            + angular_momentum_op(i)
        ok_a = _residual(a_con.normal(), a_target.normal()).terms == {}
        ok_b = _residual(b_con.normal(), b_target.normal()).terms == {}
        inter.append((f"sig.A decomposition (i={i})", expr_to_text(a_con.normal()), ok_a))
        inter.append((f"sig.B decomposition (i={i})", expr_to_text(b_con.normal()), ok_b))
    return IdentityResult(
        name="acceleration",
        statement="-i[V_i, U(r)] = -i(V_i U) + U'(lam/r)L_i + lam U' W_i "
                  "- (i lam^2/2) U'' V_i",
        residuals=residuals, intermediates=inter)


_PROVERS = {
    "velocity-form": _prove_velocity_form,
    "correction-sum": _prove_correction_sum,
    "velocity-commutator": _prove_velocity_commutator,
    "quadratic-relation": _prove_quadratic_relation,
    "acceleration": _prove_acceleration,
}

IDENTITY_NAMES = tuple(_PROVERS)

_ALIASES = {"A": "velocity-form", "B": "correction-sum",
            "C": "velocity-commutator", "D": "quadratic-relation",
            "E": "acceleration"}


def check_identity(name: str) -> IdentityResult:
    """Prove one library identity; the residual must be the exact zero form."""
    key = _ALIASES.get(name, name)
    if key not in _PROVERS:
        raise KeyError(f"unknown identity {name!r}; have {sorted(_PROVERS)}")
    return _PROVERS[key]()


def cross_validate(expr: AlgebraExpr, space, reference=None,
                   potential=None, n_states: int = 4, margin: Optional[int] = None,
                   seed: int = 20) -> float:
    """Max deviation of the instantiated expression from a numeric reference.

    Applies both maps to random interior charge-zero states and returns the
    largest weighted-norm deviation relative to the state norm scale.  With
    ``reference=None`` the expression itself is checked against zero.
    """
    op = to_superop(expr, space, potential=potential)
    if margin is None:
        margin = op.bandwidth + (reference.bandwidth if reference is not None else 0)
    worst = 0.0
    for s in range(n_states):
        psi = space.random_state(seed + s, kappa=0,
                                 support_max=space.n_max - margin)
        lhs = op(psi)
        diff = lhs - reference(psi) if reference is not None else lhs
        diff = space.interior(diff, margin)
        worst = max(worst, space.ip.norm(diff))
    return worst
