"""The verification suites: every identity of the theory as a runnable check.

Each check applies operators to random interior charge-zero states (or works
at the matrix level for the coordinate algebra), reports a relative residual,
and passes when the residual is below threshold.  Margins follow the
bandwidth rule: a composition of maps with shell bandwidths b1, b2, ... is
exact on states kept sum(b) shells away from the cutoff.

Suites: kinematics, e4, velocity, quadratic, acceleration, hermiticity,
spectra, symbolic, plus the expected-nonzero diagnostics.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .fock import EPS3, NCState
from .operators import RadialFunction, Space, SuperOp
from .report import CheckRecord, VerificationReport
from . import identities as idn
from . import spectra as spc

__all__ = ["CheckConfig", "CHECK_IDS", "SUITES", "run_suite",
           "parse_config_text", "POTENTIALS"]

_TINY = 1e-300

#: named central potentials available to the CLI and the suites
POTENTIALS: Dict[str, Callable[[float], float]] = {
    "free": lambda r: 0.0,
    "coulomb": lambda r: -1.0 / r,
    "r2": lambda r: r * r,
    "exp": lambda r: float(np.exp(-r)),
}


@dataclass
class CheckConfig:
    """Run configuration; every field has a default and round-trips as text."""

    lams: Tuple[float, ...] = (0.1,)
    n_maxes: Tuple[int, ...] = (12,)
    seed: int = 7
    n_states: int = 5
    margin: str = "auto"          # "auto" or "fixed:k"
    suites: Tuple[str, ...] = ("all",)
    potential: str = "coulomb"
    potential_q: float = 1.0
    tolerance: float = 1e-10
    tol_overrides: Dict[str, float] = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "json"

    def as_dict(self) -> dict:
        return {
            "lams": list(self.lams), "n_maxes": list(self.n_maxes),
            "seed": self.seed, "n_states": self.n_states,
            "margin": self.margin, "suites": list(self.suites),
            "potential": self.potential, "potential_q": self.potential_q,
            "tolerance": self.tolerance,
            "tol_overrides": dict(self.tol_overrides),
            "out": self.out, "fmt": self.fmt,
        }

    def to_text(self) -> str:
        """Losslessly render the config in the plain-text grammar."""
        lines = [
            "lambda = " + ", ".join(repr(v) for v in self.lams),
            "nmax = " + ", ".join(str(v) for v in self.n_maxes),
            f"seed = {self.seed}",
            f"states = {self.n_states}",
            f"margin = {self.margin}",
            f"potential = {self.potential}",
            f"q = {self.potential_q!r}",
            f"tolerance = {self.tolerance!r}",
        ]
        if self.suites:
            lines.append("suites = " + ", ".join(self.suites))
        for key in sorted(self.tol_overrides):
            lines.append(f"tol.{key} = {self.tol_overrides[key]!r}")
        if self.out is not None:
            lines.append(f"out = {self.out}")
        lines.append(f"format = {self.fmt}")
        return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> CheckConfig:
    """Parse the plain-text config grammar: ``key = value`` lines, ``#``
    comments, comma-separated lists, ``tol.<check_id> = x`` overrides."""
    cfg = CheckConfig()
    overrides: Dict[str, float] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (want key = value): {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if key in ("lambda", "lam", "lams"):
            cfg.lams = tuple(float(v) for v in val.split(","))
        elif key in ("nmax", "n_max", "n_maxes"):
            cfg.n_maxes = tuple(int(v) for v in val.split(","))
        elif key == "seed":
            cfg.seed = int(val)
        elif key in ("states", "n_states"):
            cfg.n_states = int(val)
        elif key == "margin":
            cfg.margin = val
        elif key in ("suite", "suites"):
            cfg.suites = tuple(v.strip() for v in val.split(","))
        elif key == "potential":
            cfg.potential = val
        elif key in ("q", "potential_q"):
            cfg.potential_q = float(val)
        elif key in ("tol", "tolerance"):
            cfg.tolerance = float(val)
        elif key.startswith("tol."):
            overrides[key[4:]] = float(val)
        elif key == "out":
            cfg.out = val
        elif key in ("format", "fmt"):
            cfg.fmt = val
        else:
            raise ValueError(f"unknown config key {key!r}")
    cfg.tol_overrides = overrides
    return cfg


# -- residual helpers -----------------------------------------------------------


def _margin(config: CheckConfig, auto: int) -> int:
    if config.margin == "auto":
        return auto
    if config.margin.startswith("fixed:"):
        return int(config.margin.split(":", 1)[1])
    raise ValueError(f"bad margin policy {config.margin!r}")


def _states(space: Space, config: CheckConfig, margin: int,
            kappa: int = 0) -> List[NCState]:
    support = max(space.n_max - margin, abs(kappa))
    return [space.random_state(config.seed + 1000 * t, kappa, support)
            for t in range(config.n_states)]


def _rel_residual(space: Space, diff: NCState, margin: int,
                  scale_states: Sequence[NCState]) -> float:
    num = space.ip.norm(space.interior(diff, margin))
    den = max([space.ip.norm(s) for s in scale_states] + [_TINY])
    return num / den


class _OpCache:
    """Memoize superoperator applications within one parameter point."""

    def __init__(self):
        self._data = {}

    def apply(self, op: SuperOp, psi: NCState, key: Tuple) -> NCState:
        k = (op.name,) + key
        if k not in self._data:
            self._data[k] = op(psi)
        return self._data[k]


def _commutator_residual(space: Space, A: SuperOp, B: SuperOp,
                         target: Optional[Callable[[NCState], NCState]],
                         psi: NCState, margin: int, cache: _OpCache,
                         tag: Tuple) -> float:
    b_psi = cache.apply(B, psi, tag)
    a_psi = cache.apply(A, psi, tag)
    ab = A(b_psi)
    ba = B(a_psi)
    diff = ab - ba
    scales = [ab, ba, psi]
    if target is not None:
        t = target(psi)
        diff = diff - t
        scales.append(t)
    return _rel_residual(space, diff, margin, scales)


# -- check registry ----------------------------------------------------------


@dataclass
class CheckSpec:
    check_id: str
    suite: str
    statement: str
    runner: Callable[[Space, CheckConfig], Tuple[float, str]]
    kind: str = "identity"
    tol: float = 1e-10
    per_space: bool = True  # False: runs once, independent of (lam, n_max) grid


def _matrix_absmax(m) -> float:
    import scipy.sparse as sp
    if sp.issparse(m):
        return 0.0 if m.nnz == 0 else float(np.abs(m.data).max())
    return float(np.abs(m).max())


# ---- kinematics (matrix level + L/X families) -------------------------------


def _run_coordinate_algebra(space: Space, config: CheckConfig):
    lam, x = space.lam, space.x
    worst = 0.0
    for i in range(3):
        for j in range(3):
            acc = x[i] @ x[j] - x[j] @ x[i]
            for k in range(3):
                if EPS3[i, j, k]:
                    acc = acc - 2.0j * lam * EPS3[i, j, k] * x[k]
            worst = max(worst, _matrix_absmax(acc))
    return worst, "max over all index pairs, full truncated space"


def _run_x_square(space: Space, config: CheckConfig):
    import scipy.sparse as sp
    lam = space.lam
    acc = None
    for xi in space.x:
        t = xi @ xi
        acc = t if acc is None else acc + t
    rsq = space.r @ space.r
    eye = sp.identity(space.basis.dim, dtype=complex, format="csr")
    return _matrix_absmax(acc - rsq + lam**2 * eye), ""


def _run_ladder_algebra(space: Space, config: CheckConfig):
    import scipy.sparse as sp
    shells = space.basis.shells
    keep = np.asarray(shells <= space.n_max - 1, dtype=float)
    proj = sp.diags(keep, format="csr", dtype=complex)
    eye = sp.identity(space.basis.dim, dtype=complex, format="csr")
    worst = 0.0
    for al in range(2):
        for be in range(2):
            comm = space.a[al] @ space.ad[be] - space.ad[be] @ space.a[al]
            delta = eye if al == be else 0.0 * eye
            worst = max(worst, _matrix_absmax(proj @ (comm - delta) @ proj))
            worst = max(worst, _matrix_absmax(
                space.a[al] @ space.a[be] - space.a[be] @ space.a[al]))
            worst = max(worst, _matrix_absmax(
                space.ad[al] @ space.ad[be] - space.ad[be] @ space.ad[al]))
    return worst, "commutator relations, interior shells for [a, a+]"


def _run_radial_scalar(space: Space, config: CheckConfig):
    worst = 0.0
    for xi in space.x:
        worst = max(worst, _matrix_absmax(xi @ space.r - space.r @ xi))
    margin = _margin(config, 0)
    states = _states(space, config, margin)
    cache = _OpCache()
    rop = space.radial()
    for a in (1, 2, 3, 4):
        for b in (1, 2, 3, 4):
            if a >= b:
                continue
            lab = space.so4_generator(a, b)
            for t, psi in enumerate(states):
                worst = max(worst, _commutator_residual(
                    space, lab, rop, None, psi, margin, cache, (t,)))
    return worst, "[x_j, r] = 0 and [L_ab, r] = 0"


def _family_runner(pairs, build_ab, build_target, auto_margin):
    """Generic commutator-family runner over index pairs and random states."""

    def run(space: Space, config: CheckConfig):
        margin = _margin(config, auto_margin)
        states = _states(space, config, margin)
        cache = _OpCache()
        worst = 0.0
        for idx in pairs:
            A, B = build_ab(space, idx)
            target = build_target(space, idx) if build_target else None
            for t, psi in enumerate(states):
                worst = max(worst, _commutator_residual(
                    space, A, B, target, psi, margin, cache, (t,)))
        return worst, f"margin {margin}, {len(states)} states"

    return run


def _pairs33():
    return [(i, j) for i in (1, 2, 3) for j in (1, 2, 3) if i < j]


def _eps_combo(space, k_ops, i, j, factor=1.0):
    terms = [(factor * EPS3[i - 1, j - 1, k - 1], k_ops(k))
             for k in (1, 2, 3) if EPS3[i - 1, j - 1, k - 1]]

    def apply(psi):
        out = None
        for c, op in terms:
            t = c * op(psi)
            out = t if out is None else out + t
        return out if out is not None else 0.0 * psi

    return apply


_FAMILIES = {
    "kinematics.LL": (
        "[L_i, L_j] = i eps_ijk L_k", 0,
        lambda s, ij: (s.angular_momentum(ij[0]), s.angular_momentum(ij[1])),
        lambda s, ij: _eps_combo(s, s.angular_momentum, ij[0], ij[1], 1.0j)),
    "kinematics.LX": (
        "[L_i, X_j] = i eps_ijk X_k", 0,
        lambda s, ij: (s.angular_momentum(ij[0]), s.position(ij[1])),
        lambda s, ij: _eps_combo(s, s.position, ij[0], ij[1], 1.0j)),
    "kinematics.XX": (
        "[X_i, X_j] = i lam^2 eps_ijk L_k", 0,
        lambda s, ij: (s.position(ij[0]), s.position(ij[1])),
        lambda s, ij: _eps_combo(s, s.angular_momentum, ij[0], ij[1],
                                 1.0j * s.lam**2)),
    "velocity.LV": (
        "[L_i, V_j] = i eps_ijk V_k", 1,
        lambda s, ij: (s.angular_momentum(ij[0]), s.velocity(ij[1])),
        lambda s, ij: _eps_combo(s, s.velocity, ij[0], ij[1], 1.0j)),
    "velocity.VV": (
        "[V_i, V_j] = 0", 2,
        lambda s, ij: (s.velocity(ij[0]), s.velocity(ij[1])),
        None),
    "velocity.LV4": (
        "[L_i, V_4] = 0", 1,
        lambda s, ij: (s.angular_momentum(ij[0]), s.velocity4()),
        None),
    "velocity.VV4": (
        "[V_i, V_4] = 0", 2,
        lambda s, ij: (s.velocity(ij[0]), s.velocity4()),
        None),
}


def _run_uncertainty(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    cache = _OpCache()
    h0 = space.free_hamiltonian()
    lam = space.lam
    worst = 0.0
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            vi, xj = space.velocity(i), space.position(j)
            delta = 1.0 if i == j else 0.0

            def target(psi, delta=delta):
                if delta == 0.0:
                    return 0.0 * psi
                return -1.0j * delta * (psi - lam**2 * h0(psi))

            for t, psi in enumerate(states):
                worst = max(worst, _commutator_residual(
                    space, vi, xj, target, psi, margin, cache, (t,)))
    return worst, f"margin {margin}, all (i, j) pairs"


def _run_xv4(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    cache = _OpCache()
    lam = space.lam
    worst = 0.0
    for i in (1, 2, 3):
        xi, v4, vi = space.position(i), space.velocity4(), space.velocity(i)

        def target(psi, vi=vi):
            return -1.0j * lam * vi(psi)

        for t, psi in enumerate(states):
            worst = max(worst, _commutator_residual(
                space, xi, v4, target, psi, margin, cache, (t,)))
    return worst, "[X_i, V_4] = -i lam V_i"


def _run_so4_algebra(space: Space, config: CheckConfig):
    margin = _margin(config, 0)
    states = _states(space, config, margin)
    cache = _OpCache()
    worst = 0.0
    idxs = [(a, b) for a in range(1, 5) for b in range(1, 5) if a < b]
    ops = {p: space.so4_generator(*p) for p in idxs}
    for (a, b) in idxs:
        for (c, d) in idxs:
            # i (d_ac L_bd - d_bc L_ad - d_ad L_bc + d_bd L_ac)
            terms = []
            for (da, db), (p, q), sgn in (((a, c), (b, d), 1),
                                          ((b, c), (a, d), -1),
                                          ((a, d), (b, c), -1),
                                          ((b, d), (a, c), 1)):
                if da == db and p != q:
                    terms.append((sgn, (p, q)))

            def target(psi, terms=tuple(terms)):
                out = None
                for sgn, key in terms:
                    op = space.so4_generator(*key)
                    t = (1.0j * sgn) * op(psi)
                    out = t if out is None else out + t
                return out if out is not None else 0.0 * psi

            for t, psi in enumerate(states):
                worst = max(worst, _commutator_residual(
                    space, ops[(a, b)], ops[(c, d)], target, psi, margin,
                    cache, (t,)))
    return worst, "standard so(4) structure constants, all generator pairs"


def _run_e4_lv(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    cache = _OpCache()
    worst = 0.0
    idxs = [(a, b) for a in range(1, 5) for b in range(1, 5) if a < b]
    for (a, b) in idxs:
        lab = space.so4_generator(a, b)
        for c in range(1, 5):
            def target(psi, a=a, b=b, c=c):
                out = None
                if a == c:
                    out = 1.0j * space.velocity_so4(b)(psi)
                if b == c:
                    t = -1.0j * space.velocity_so4(a)(psi)
                    out = t if out is None else out + t
                return out if out is not None else 0.0 * psi

            vc = space.velocity_so4(c)
            for t, psi in enumerate(states):
                worst = max(worst, _commutator_residual(
                    space, lab, vc, target, psi, margin, cache, (t,)))
    return worst, "[L_ab, V_c] = i (d_ac V_b - d_bc V_a), all a<b, c"


def _run_e4_vv(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    states = _states(space, config, margin)
    cache = _OpCache()
    worst = 0.0
    for a in range(1, 5):
        for b in range(a + 1, 5):
            va, vb = space.velocity_so4(a), space.velocity_so4(b)
            for t, psi in enumerate(states):
                worst = max(worst, _commutator_residual(
                    space, va, vb, None, psi, margin, cache, (t,)))
    return worst, "[V_a, V_b] = 0, all a < b <= 4"


# ---- velocity action checks ---------------------------------------------------


def _run_velocity_on_coordinates(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    worst = 0.0
    eye = space.identity_state()
    for i in (1, 2, 3):
        vi = space.velocity(i)
        for j in (1, 2, 3):
            xj = space.state(space.x[j - 1])
            got = vi(xj)
            want = (-1.0j if i == j else 0.0) * eye
            worst = max(worst, _rel_residual(space, got - want, margin, [eye]))
    return worst, "V_i x_j = -i delta_ij"


def _run_velocity_on_radial(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    rsq = RadialFunction.from_callable(lambda r: r * r, space.lam,
                                       space.n_max, name="r2")
    f_state = space.state((space.r @ space.r).astype(complex))
    worst = 0.0
    for j in (1, 2, 3):
        got = space.velocity(j)(f_state)
        want_mat = -1.0j * (space.x[j - 1] @ space.rinv) @ (2.0 * space.r)
        want = space.state(want_mat)
        worst = max(worst, _rel_residual(space, got - want, margin, [want]))
    return worst, "V_j f(r) = -i (x_j / r) f'_lam(r) for f = r^2 (f'_lam = 2r)"


def _run_velocity_forms(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    h0 = space.free_hamiltonian()
    worst = 0.0
    for j in (1, 2, 3):
        vj, vjw, xj = space.velocity(j), space.velocity_w_form(j), space.position(j)
        for psi in states:
            direct = -1.0j * (xj(h0(psi)) - h0(xj(psi)))
            a = vj(psi)
            worst = max(worst, _rel_residual(space, a - vjw(psi), margin, [a]))
            worst = max(worst, _rel_residual(space, a - direct, margin, [a]))
    v4, v4w = space.velocity4(), space.velocity4_cross_form()
    for psi in states:
        a = v4(psi)
        worst = max(worst, _rel_residual(space, a - v4w(psi), margin, [a]))
    return worst, "-i[X_j, H0] = commutator form = cross form; V_4 both forms"


def _run_h0_forms(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    h0 = space.free_hamiltonian()
    lam, a, ad, rinv, r = space.lam, space.a, space.ad, space.rinv, space.r
    worst = 0.0
    for psi in states:
        m = psi.matrix
        s = (2.0 / lam) * (r @ m)
        for al in range(2):
            s = s - ad[al] @ m @ a[al] - a[al] @ m @ ad[al]
        zeta = space.state(rinv @ s / (2.0 * lam))
        got = h0(psi)
        worst = max(worst, _rel_residual(space, got - zeta, margin, [got]))
    return worst, "double-commutator H0 equals (2r/lam - a+.b - b+.a)/(2 lam r)"


def _run_leibniz(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    support = space.n_max - margin
    worst = 0.0
    for t in range(config.n_states):
        A = space.random_state(config.seed + 10 * t, 0, support)
        B = space.random_state(config.seed + 10 * t + 5, 0, support)
        prod = NCState(space.basis, A.matrix @ B.matrix)
        for i in (1, 2, 3):
            vi = space.velocity(i)
            lhs = vi(prod)
            rhs = NCState(space.basis, vi(A).matrix @ B.matrix) \
                + NCState(space.basis, A.matrix @ vi(B).matrix) \
                + space.leibniz_correction(i, A, B)
            worst = max(worst, _rel_residual(space, lhs - rhs, margin,
                                             [lhs, rhs]))
    return worst, "V_i(AB) = (V_i A)B + A(V_i B) + K_i(A, B)"


def _run_correction_sum(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    states = _states(space, config, margin)
    h0 = space.free_hamiltonian()
    lam = space.lam
    worst = 0.0
    for psi in states:
        h0psi = h0(psi)
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                xj = space.state(space.x[j - 1].astype(complex))
                got = 0.5 * (space.leibniz_correction(i, xj, psi)
                             + space.leibniz_correction(i, psi, xj))
                want = (1.0j * lam**2 if i == j else 0.0) * h0psi
                worst = max(worst, _rel_residual(space, got - want, margin,
                                                 [h0psi, psi]))
    return worst, "(K_i(x_j, psi) + K_i(psi, x_j))/2 = i delta_ij lam^2 H0 psi"


def _run_kzero_identity(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    eye = space.identity_state()
    worst = 0.0
    for psi in states:
        for i in (1, 2, 3):
            got = space.leibniz_correction(i, eye, psi)
            worst = max(worst, _rel_residual(space, got, margin, [psi]))
    return worst, "K_i(1, psi) = 0"


# ---- quadratic relations -------------------------------------------------------


def _run_v2h(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    states = _states(space, config, margin)
    h0 = space.free_hamiltonian()
    lam = space.lam
    worst = 0.0
    for psi in states:
        v2 = None
        for j in (1, 2, 3):
            vj = space.velocity(j)
            t = vj(vj(psi))
            v2 = t if v2 is None else v2 + t
        h = h0(psi)
        want = 2.0 * h - lam**2 * h0(h)
        worst = max(worst, _rel_residual(space, v2 - want, margin, [v2, want]))
    return worst, "V^2 = 2 H0 - lam^2 H0^2"


def _run_vvh(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    states = _states(space, config, margin)
    v4 = space.velocity4()
    lam = space.lam
    worst = 0.0
    for psi in states:
        lhs = v4(v4(psi))
        v2 = None
        for j in (1, 2, 3):
            vj = space.velocity(j)
            t = vj(vj(psi))
            v2 = t if v2 is None else v2 + t
        rhs = (1.0 / lam**2) * psi - v2
        worst = max(worst, _rel_residual(space, lhs - rhs, margin, [lhs, rhs]))
    return worst, "(1/lam - lam H0)^2 = 1/lam^2 - V^2"


def _run_casimir2(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    states = _states(space, config, margin)
    c2 = space.casimir2()
    lam = space.lam
    worst = 0.0
    for psi in states:
        got = c2(psi)
        want = (1.0 / lam**2) * psi
        worst = max(worst, _rel_residual(space, got - want, margin, [want]))
    return worst, "C_2 = V_a V_a = 1/lam^2"


def _run_pauli_lubanski(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    scale = 1.0 / space.lam  # velocity scale keeps the check relative
    worst = 0.0
    for a in (1, 2, 3, 4):
        op = space.pauli_lubanski(a)
        for psi in states:
            got = op(psi)
            num = space.ip.norm(space.interior(got, margin))
            worst = max(worst, num / scale)
    return worst, "Lambda_a = 0 on charge-zero states, a = 1..4"


def _run_vh0(space: Space, config: CheckConfig):
    margin = _margin(config, 2)
    states = _states(space, config, margin)
    cache = _OpCache()
    h0 = space.free_hamiltonian()
    worst = 0.0
    for i in (1, 2, 3):
        vi = space.velocity(i)
        for t, psi in enumerate(states):
            worst = max(worst, _commutator_residual(
                space, vi, h0, None, psi, margin, cache, (t,)))
    return worst, "[V_i, H0] = 0"


# ---- acceleration ---------------------------------------------------------------


def _acc_worst(space: Space, config: CheckConfig, fn, name):
    margin = max(_margin(config, 2), 2)
    states = _states(space, config, margin)
    pot = RadialFunction.from_callable(fn, space.lam, space.n_max, name=name)
    worst = 0.0
    for i in (1, 2, 3):
        comm = space.acceleration(i, pot)
        deco = space.acceleration_decomposed(i, pot)
        for psi in states:
            a, b = comm(psi), deco(psi)
            worst = max(worst, _rel_residual(space, a - b, margin, [a, b, psi]))
    return worst


def _run_acc_r2(space, config):
    return _acc_worst(space, config, POTENTIALS["r2"], "r2"), "U = r^2"


def _run_acc_coulomb(space, config):
    return _acc_worst(space, config, POTENTIALS["coulomb"], "coulomb"), "U = -1/r"


def _run_acc_exp(space, config):
    return _acc_worst(space, config, POTENTIALS["exp"], "exp"), "U = exp(-r)"


def _run_acc_constant(space: Space, config: CheckConfig):
    margin = _margin(config, 1)
    states = _states(space, config, margin)
    pot = RadialFunction.from_callable(lambda r: 3.7, space.lam, space.n_max,
                                       name="const")
    worst = 0.0
    for i in (1, 2, 3):
        comm = space.acceleration(i, pot)
        for psi in states:
            got = comm(psi)
            num = space.ip.norm(space.interior(got, margin))
            worst = max(worst, num * space.lam)  # velocity scale 1/lam
    return worst, "constant potential gives zero acceleration (exactly)"


def _run_acc_full_h(space: Space, config: CheckConfig):
    margin = max(_margin(config, 2), 2)
    states = _states(space, config, margin)
    pot = RadialFunction.from_callable(POTENTIALS["coulomb"], space.lam,
                                       space.n_max, name="coulomb")
    h = space.hamiltonian(pot)
    u = space.radial_multiplication(pot)
    worst = 0.0
    for i in (1, 2, 3):
        vi = space.velocity(i)
        full = -1.0j * vi.commutator(h)
        pot_only = -1.0j * vi.commutator(u)
        for psi in states:
            a, b = full(psi), pot_only(psi)
            worst = max(worst, _rel_residual(space, a - b, margin, [a, b, psi]))
    return worst, "-i[V_i, H0 + U] = -i[V_i, U]"


# ---- hermiticity ----------------------------------------------------------------


def _run_ip_axioms(space: Space, config: CheckConfig):
    states = _states(space, config, 0)
    worst = 0.0
    for t in range(len(states) - 1):
        phi, psi = states[t], states[t + 1]
        a = space.ip(phi, psi)
        b = space.ip(psi, phi)
        worst = max(worst, abs(a - np.conj(b)))
        alpha, beta = 0.7 - 0.3j, -1.1 + 0.2j
        lin = space.ip(phi, alpha * psi + beta * states[0])
        expect = alpha * space.ip(phi, psi) + beta * space.ip(phi, states[0])
        worst = max(worst, abs(lin - expect))
        nrm = space.ip(psi, psi)
        if nrm.real <= 0 or abs(nrm.imag) > 1e-12 * abs(nrm):
            worst = max(worst, 1.0)
    return worst, "conjugate symmetry, sesquilinearity, positivity"


def _run_hermiticity(space: Space, config: CheckConfig):
    ops = [space.angular_momentum(1), space.angular_momentum(3),
           space.position(1), space.position(2), space.position_left(3),
           space.radial(), space.velocity(1), space.velocity(3),
           space.velocity4(), space.free_hamiltonian()]
    worst = 0.0
    for op in ops:
        margin = max(_margin(config, op.bandwidth), op.bandwidth)
        states = _states(space, config, margin)
        for t in range(len(states) - 1):
            phi, psi = states[t], states[t + 1]
            a = space.ip(phi, op(psi))
            b = space.ip(op(phi), psi)
            scale = max(space.ip.norm(op(psi)) * space.ip.norm(phi), _TINY)
            worst = max(worst, abs(a - b) / scale)
    return worst, "<phi, O psi> = <O phi, psi> for L, X, V, V4, H0"


def _run_h0_positivity(space: Space, config: CheckConfig):
    sub = space if space.n_max <= 8 else Space(6, space.lam)
    evals = spc.full_kappa0_spectrum(sub)
    lam = sub.lam
    bound = 2.0 / lam**2
    low = max(0.0, -evals.min()) * lam**2
    high = max(0.0, evals.max() - bound) * lam**2
    return max(low, high), \
        f"kappa=0 spectrum of H0 inside [0, 2/lam^2] (n_max {sub.n_max})"


# ---- spectra ---------------------------------------------------------------------


def _run_spectrum_bound(space: Space, config: CheckConfig):
    lam = space.lam
    worst = 0.0
    for j in (0, 1, 2):
        if j > space.n_max - 1:
            continue
        for boundary in ("hard", "dirichlet"):
            res = spc.solve_sector(space, j, None, boundary=boundary)
            ev = res.eigenvalues
            worst = max(worst, max(0.0, -ev.min()) * lam**2)
            worst = max(worst, max(0.0, ev.max() - 2.0 / lam**2) * lam**2)
    return worst, "free sector eigenvalues inside [0, 2/lam^2], j = 0, 1, 2"


def _run_v2_consistency(space: Space, config: CheckConfig):
    worst = 0.0
    for j in (0, 1, 2):
        if j > space.n_max - 3:
            continue
        for row in spc.v2_consistency(space, j):
            worst = max(worst, row["interior_residual"] / row["scale"])
    return worst, "sector V^2 eigen-action matches 2E - lam^2 E^2 (interior rows)"


def _run_m_independence(space: Space, config: CheckConfig):
    worst = 0.0
    pot = RadialFunction.from_callable(POTENTIALS[config.potential], space.lam,
                                       space.n_max, name=config.potential) \
        if config.potential != "free" else None
    for j in (1, 2):
        if j > space.n_max - 1:
            continue
        mats = []
        for m in range(-j, j + 1):
            sector = spc.build_sector(space, j, m, boundary="dirichlet")
            mats.append(spc.reduce_hamiltonian(space, sector, pot))
        scale = max(np.abs(mats[0]).max(), _TINY)
        for mat in mats[1:]:
            worst = max(worst, np.abs(mat - mats[0]).max() / scale)
    return worst, "reduced Hamiltonian identical across m Zeeman levels"


def _run_brute_force(space: Space, config: CheckConfig):
    if space.n_max > 6:
        return 0.0, "skipped (brute-force equivalence runs at n_max <= 6)"
    pot = None
    if config.potential != "free":
        pot = RadialFunction.from_callable(POTENTIALS[config.potential],
                                           space.lam, space.n_max,
                                           name=config.potential)
    full = np.sort(spc.full_kappa0_spectrum(space, pot))
    union: List[float] = []
    for j in range(0, space.n_max + 1):
        res = spc.solve_sector(space, j, pot, boundary="hard")
        union.extend(list(res.eigenvalues) * (2 * j + 1))
    union_arr = np.sort(np.asarray(union))
    if len(union_arr) != len(full):
        return 1.0, f"state count mismatch {len(union_arr)} vs {len(full)}"
    scale = max(np.abs(full).max(), _TINY)
    return float(np.abs(full - union_arr).max() / scale), \
        "full kappa=0 spectrum equals sector union with multiplicity 2j+1"


def _run_comm_limit(space: Space, config: CheckConfig):
    """First-difference convergence of V f(r) at fixed box; needs a schedule,
    so this runner builds its own spaces and ignores the ambient one."""
    box = 4.0
    ratios = []
    for lam in (0.2, 0.1, 0.05):
        n_max = int(round(box / lam)) - 1
        sub = Space(n_max, lam)
        shell_r = lam * (np.arange(n_max + 1) + 1.0)
        f_state = sub.state(sub.shell_diagonal(np.exp(-shell_r)))
        df_diag = sub.shell_diagonal(-np.exp(-shell_r))  # exact d/dr of exp(-r)
        worst = 0.0
        for jdir in (1, 2, 3):
            got = sub.velocity(jdir)(f_state)
            want = sub.state(-1.0j * ((sub.x[jdir - 1] @ sub.rinv) @ df_diag))
            num = sub.ip.norm(sub.interior(got - want, 2))
            den = max(sub.ip.norm(sub.interior(want, 2)), _TINY)
            worst = max(worst, num / den)
        ratios.append(worst)
    decreasing = all(ratios[s + 1] < ratios[s] for s in range(len(ratios) - 1))
    rate = ratios[0] / max(ratios[-1], _TINY)
    detail = ("lam 0.2 -> 0.05 residuals " +
              ", ".join(f"{x:.2e}" for x in ratios) +
              f" (x{rate:.1f} shrink)")
    return (0.0 if decreasing and rate > 8.0 else 1.0), detail


def _run_convergence(space: Space, config: CheckConfig):
    """Free-particle oracle gaps along a fixed-box schedule (j = 0 and 1)."""
    schedule = [(0.4, 19), (0.2, 39), (0.1, 79)]
    floor_fail = 0.0
    details = []
    for j in (0, 1):
        recs = spc.convergence_study(schedule, j)
        for level in range(3):
            gaps = [r.gap for r in recs if r.level == level]
            floors = [1e-8 / lam**2 for lam, _n in schedule]
            ok = all(gaps[s + 1] <= max(gaps[s], floors[s + 1])
                     for s in range(len(gaps) - 1))
            if not ok:
                floor_fail = 1.0
            details.append(f"j{j}l{level}:" + "/".join(f"{g:.1e}" for g in gaps))
    return floor_fail, " ".join(details)


def _run_coulomb_oracle(space: Space, config: CheckConfig):
    recs = spc.convergence_study([(0.1, 79)], 0, POTENTIALS["coulomb"],
                                 "coulomb", levels=1)
    rec = recs[0]
    rel = rec.gap / max(abs(rec.energy_oracle), _TINY)
    return rel, (f"ground level E_nc={rec.energy_nc:.6f} vs "
                 f"oracle {rec.energy_oracle:.6f}")


# ---- symbolic --------------------------------------------------------------------


def _run_symbolic_proofs(space: Space, config: CheckConfig):
    bad = []
    for name in idn.IDENTITY_NAMES:
        res = idn.check_identity(name)
        if not res.ok:
            bad.append(name)
    return (0.0 if not bad else 1.0), \
        ("all identities reduce to the zero normal form" if not bad
         else f"failed: {bad}")


def _run_pauli_lemmas(space: Space, config: CheckConfig):
    a = idn.anticommutator_residual()
    f = idn.fierz_residual()
    ok = (a == 0) and (f == 0)
    return (0.0 if ok else 1.0), "anticommutator, trace and Fierz identities exact"


def _run_cross_validation(space: Space, config: CheckConfig):
    sub = Space(8, space.lam)
    worst = 0.0
    pairs = [
        (idn.velocity_op(3), sub.velocity(3)),
        (idn.velocity_op(1), sub.velocity(1)),
        (idn.h0_zeta(), sub.free_hamiltonian()),
        (idn.velocity4_op(), sub.velocity4()),
        (idn.w_vector_op(2), sub.w_vector(2)),
    ]
    for expr, ref in pairs:
        worst = max(worst, idn.cross_validate(expr, sub, reference=ref,
                                              seed=config.seed))
    for name in idn.IDENTITY_NAMES:
        res = idn.check_identity(name)
        for key, residual in res.residuals.items():
            worst = max(worst, idn.cross_validate(
                residual, sub, reference=None,
                potential=(lambda rr: rr**2) if name == "acceleration" else None,
                seed=config.seed))
    return worst, "symbolic operators vs numeric twins at n_max = 8"


# ---- diagnostics ------------------------------------------------------------------


def _run_kappa1_diag(space: Space, config: CheckConfig):
    margin = 2
    support = min(max(2, space.n_max - margin), 5)
    psi = space.random_state(config.seed, kappa=1, support_max=support)
    v1, v2 = space.velocity(1), space.velocity(2)
    comm = v1(v2(psi)) - v2(v1(psi))
    num = space.ip.norm(space.interior(comm, margin))
    return num / space.ip.norm(psi), \
        "[V_1, V_2] psi on a kappa = 1 state (expected nonzero)"


# -- registry assembly -------------------------------------------------------------


def _family_spec(check_id, statement, margin, build_ab, build_target):
    return CheckSpec(check_id, check_id.split(".")[0], statement,
                     _family_runner(_pairs33(), build_ab, build_target, margin))


CHECKS: List[CheckSpec] = [
    CheckSpec("kinematics.coordinates", "kinematics",
              "[x_i, x_j] = 2 i lam eps_ijk x_k (matrix level)",
              _run_coordinate_algebra, tol=1e-12),
    CheckSpec("kinematics.x_square", "kinematics",
              "x^2 = r^2 - lam^2 (matrix level)", _run_x_square, tol=1e-12),
    CheckSpec("kinematics.ladder", "kinematics",
              "[a_a, a+_b] = delta_ab (interior), [a, a] = [a+, a+] = 0",
              _run_ladder_algebra, tol=1e-12),
    CheckSpec("kinematics.radial_scalar", "kinematics",
              "[x_j, r] = 0 and [L_ab, r] = 0", _run_radial_scalar),
] + [
    _family_spec(cid, st, mg, ab, tg)
    for cid, (st, mg, ab, tg) in _FAMILIES.items()
] + [
    CheckSpec("velocity.uncertainty", "velocity",
              "[V_i, X_j] = -i delta_ij (1 - lam^2 H0)", _run_uncertainty),
    CheckSpec("velocity.XV4", "velocity", "[X_i, V_4] = -i lam V_i", _run_xv4),
    CheckSpec("e4.so4", "e4",
              "[L_ab, L_cd] = i(d_ac L_bd - d_bc L_ad - d_ad L_bc + d_bd L_ac)",
              _run_so4_algebra),
    CheckSpec("e4.LV", "e4", "[L_ab, V_c] = i (d_ac V_b - d_bc V_a)",
              _run_e4_lv),
    CheckSpec("e4.VV", "e4", "[V_a, V_b] = 0 for a, b = 1..4", _run_e4_vv),
    CheckSpec("velocity.on_coordinates", "velocity", "V_i x_j = -i delta_ij",
              _run_velocity_on_coordinates),
    CheckSpec("velocity.on_radial", "velocity",
              "V_j f(r) = -i (x_j/r) f'_lam(r)", _run_velocity_on_radial),
    CheckSpec("velocity.forms", "velocity",
              "definition and normal forms of V_j, V_4 agree",
              _run_velocity_forms),
    CheckSpec("velocity.h0_forms", "velocity",
              "H0 double-commutator equals charge-zero bilinear form",
              _run_h0_forms),
    CheckSpec("velocity.leibniz", "velocity",
              "modified Leibniz rule with correction K", _run_leibniz),
    CheckSpec("velocity.correction_sum", "velocity",
              "(K_i(x_j,.) + K_i(.,x_j))/2 = i delta lam^2 H0",
              _run_correction_sum),
    CheckSpec("velocity.correction_unit", "velocity", "K_i(1, psi) = 0",
              _run_kzero_identity),
    CheckSpec("velocity.comm_limit", "velocity",
              "V_j f(r) converges to -i (x_j/r) f'(r) as lam -> 0",
              _run_comm_limit, per_space=False),
    CheckSpec("quadratic.V2H", "quadratic", "V^2 = 2 H0 - lam^2 H0^2",
              _run_v2h),
    CheckSpec("quadratic.VVH", "quadratic",
              "(1/lam - lam H0)^2 = 1/lam^2 - V^2", _run_vvh),
    CheckSpec("quadratic.C2", "quadratic", "C_2 = V_a V_a = 1/lam^2",
              _run_casimir2),
    CheckSpec("quadratic.pauli_lubanski", "quadratic",
              "Lambda_a = 0 (a = 1..4), hence C_4 = 0", _run_pauli_lubanski),
    CheckSpec("quadratic.VH0", "quadratic", "[V_i, H0] = 0", _run_vh0),
    CheckSpec("acceleration.r2", "acceleration",
              "-i[V_i, U] equals its decomposition, U = r^2", _run_acc_r2),
    CheckSpec("acceleration.coulomb", "acceleration",
              "-i[V_i, U] equals its decomposition, U = -1/r",
              _run_acc_coulomb),
    CheckSpec("acceleration.exp", "acceleration",
              "-i[V_i, U] equals its decomposition, U = exp(-r)",
              _run_acc_exp),
    CheckSpec("acceleration.constant", "acceleration",
              "constant potential gives zero acceleration",
              _run_acc_constant, tol=1e-12),
    CheckSpec("acceleration.full_hamiltonian", "acceleration",
              "-i[V_i, H] = -i[V_i, U] for H = H0 + U", _run_acc_full_h),
    CheckSpec("hermiticity.inner_product", "hermiticity",
              "weighted inner product axioms", _run_ip_axioms, tol=1e-12),
    CheckSpec("hermiticity.operators", "hermiticity",
              "L, X, V, V4, H0 hermitian under the weighted inner product",
              _run_hermiticity),
    CheckSpec("hermiticity.h0_range", "hermiticity",
              "H0 positive with spectrum inside [0, 2/lam^2]",
              _run_h0_positivity, tol=1e-10),
    CheckSpec("spectra.bound", "spectra",
              "sector spectra inside [0, 2/lam^2] (kinetic cutoff)",
              _run_spectrum_bound, tol=1e-8),
    CheckSpec("spectra.v2_consistency", "spectra",
              "sector V^2 equals 2E - lam^2 E^2 on interior rows",
              _run_v2_consistency, tol=1e-8),
    CheckSpec("spectra.m_independence", "spectra",
              "reduced Hamiltonian independent of m", _run_m_independence),
    CheckSpec("spectra.brute_force", "spectra",
              "full kappa=0 spectrum equals sector union", _run_brute_force,
              tol=1e-8),
    CheckSpec("spectra.convergence", "spectra",
              "NC free levels approach the FD oracle at fixed box",
              _run_convergence, tol=0.5, per_space=False),
    CheckSpec("spectra.coulomb_oracle", "spectra",
              "Coulomb ground level within 5% of the FD oracle",
              _run_coulomb_oracle, tol=0.05, per_space=False),
    CheckSpec("symbolic.proofs", "symbolic",
              "appendix identities reduce to the exact zero normal form",
              _run_symbolic_proofs, tol=0.5, per_space=False),
    CheckSpec("symbolic.pauli", "symbolic",
              "Pauli anticommutator/trace and Fierz identities (exact)",
              _run_pauli_lemmas, tol=0.5, per_space=False),
    CheckSpec("symbolic.cross_validation", "symbolic",
              "symbolic operators match numeric twins", _run_cross_validation),
    CheckSpec("diagnostic.kappa1_vv", "diagnostic",
              "[V_1, V_2] != 0 on a kappa = 1 state", _run_kappa1_diag,
              kind="diagnostic", tol=1e-3),
]

CHECK_IDS = tuple(c.check_id for c in CHECKS)
SUITES = tuple(sorted({c.suite for c in CHECKS}))


def run_suite(config: CheckConfig) -> VerificationReport:
    """Execute the configured suites over the (lam, n_max) grid."""
    wanted = set(config.suites)
    if "all" in wanted:
        wanted = set(SUITES)
    unknown = wanted - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}; have {SUITES}")
    report = VerificationReport(config=config.as_dict())
    for check in CHECKS:
        if check.suite not in wanted:
            continue
        tol = config.tol_overrides.get(check.check_id, check.tol)
        if check.tol == 1e-10 and config.tolerance != 1e-10 \
                and check.check_id not in config.tol_overrides:
            tol = config.tolerance
        grid = [(lam, n) for lam in config.lams for n in config.n_maxes] \
            if check.per_space else [(config.lams[0], config.n_maxes[0])]
        for lam, n_max in grid:
            t0 = time.perf_counter()
            params = {"lam": lam, "n_max": n_max, "seed": config.seed}
            try:
                space = Space(n_max, lam)
                residual, detail = check.runner(space, config)
                if check.kind == "diagnostic":
                    passed = residual > tol
                else:
                    passed = residual <= tol
            except ValueError as exc:
                residual, detail, passed = float("nan"), f"skipped: {exc}", True
            ms = (time.perf_counter() - t0) * 1e3
            report.records.append(CheckRecord(
                check_id=check.check_id, suite=check.suite,
                statement=check.statement, params=params,
                residual=float(residual), threshold=float(tol),
                passed=bool(passed), kind=check.kind, wall_time_ms=ms,
                detail=detail))
    return report
