"""Verification suites: one per module, each a list of named residual checks.

Every suite is deterministic given ``RunConfig.seed``: samples are drawn
from child seeds of one ``SeedSequence``, so running with several worker
processes gives the same numbers as running serially.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .am import am_via_rh, gamma_am, gamma_am_2x2
from .caterpillar import (decompose_DLR, normalized_connection, rh_caterpillar,
                          stokes_subdiag)
from .gt import (angle_distance, diagonalizer_P, gt_a_coeffs, gt_coordinates,
                 gt_map, ladder_L, moduli_squared, normalizer_N, rebuild, thimm_act_full)
from .iso import (FlowState, _delta, boundary_fit, conservation_residuals, fit_loglog_slope,
                  g_factor, iso_flow, iso_rhs, mainthm_error, psi_u)
from .linalg import cholesky_upper, hermitian_eigen_desc, minor_det, unitarity_residual
from .oracle import LinearSystem, OracleConfig, connection_numeric, stokes_numeric
from .sampling import random_herm0, random_torus

SUITES = ("gt", "caterpillar", "am", "oracle-xcheck", "iso", "mainthm")


@dataclass
class RunConfig:
    seed: int = 0
    n: int = 4
    samples: int = 50
    tol_unitary: float = 1e-8
    tol_rh: float = 1e-8
    tol_oracle: float = 1e-5
    tol_stokes_drift: float = 1e-4
    tol_slope: float = -0.8
    gap_tol: float = None
    rtol: float = 1e-11
    atol: float = 1e-13
    radius: float = None
    jobs: int = 1
    s_values: tuple = (10.0, 20.0, 40.0, 80.0)

    def oracle_config(self):
        return OracleConfig(R=self.radius, rtol=self.rtol, atol=self.atol)


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    wall: float = 0.0
    detail: dict = field(default_factory=dict)

    def to_json(self):
        d = asdict(self)
        if not d["detail"]:
            del d["detail"]
        return d


@dataclass
class Report:
    suite: str
    config: dict
    checks: list
    table: list = field(default_factory=list)
    table_header: tuple = ()

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self, timing=True):
        checks = [c.to_json() for c in self.checks]
        if not timing:
            for c in checks:
                c.pop("wall", None)
        return {"suite": self.suite, "passed": self.passed, "config": self.config, "checks": checks}

    def csv_rows(self):
        return [(c.name, c.residual, c.tolerance, "pass" if c.passed else "FAIL") for c in self.checks]


def _check(name, residual, tol, wall=0.0, upper=True, **detail):
    residual = float(residual)
    ok = bool(residual <= tol) if upper else bool(residual >= tol)
    return Check(name, residual, float(tol), ok, round(wall, 6), detail)


def _seeds(seed, count):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _map(fn, args, jobs):
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, args))
    return [fn(a) for a in args]


def _aggregate(rows):
    """Columnwise max over per-sample dicts of residuals."""
    keys = rows[0].keys()
    return {k: max(r[k] for r in rows) for k in keys}


# ---------------------------------------------------------------------------
# per-sample workers (module level so they pickle)

def _gt_sample(args):
    n, seed = args
    rng = np.random.default_rng(seed)
    A = random_herm0(n, rng)
    table = gt_map(A)
    out = {}
    lam, V = hermitian_eigen_desc(A)
    out["eigen_reconstruction"] = np.linalg.norm(V @ np.diag(lam) @ V.conj().T - A) / (1 + np.linalg.norm(A, 2))
    d = np.linalg.det(A)
    out["minor_full_det"] = abs(minor_det(A, range(n), range(n)) - d) / max(abs(d), 1e-300)
    M = A @ A.conj().T + np.eye(n)
    R = cholesky_upper(M)
    out["cholesky_roundtrip"] = np.linalg.norm(R.conj().T @ R - M) / np.linalg.norm(M)
    z = complex(*rng.uniform(-4, 4, 2))
    out["gamma_reflection"] = abs(gamma_fn(z) * gamma_fn(1 - z) - np.pi / np.sin(np.pi * z))
    out["interlacing"] = max(0.0, -float(table.gaps().min())) if n > 1 else 0.0
    unit, row, path, mod, norm = 0.0, 0.0, 0.0, 0.0, 0.0
    for k in range(1, n + 1):
        P = diagonalizer_P(A, k)
        unit = max(unit, unitarity_residual(P))
        last = P[k - 1, :k]
        row = max(row, np.abs(last.imag).max(), max(0.0, -last.real.min()))
        Pm = diagonalizer_P(A, k, method="minor")
        path = max(path, np.linalg.norm(P - Pm) / np.linalg.norm(P))
        if k < n:
            a = gt_a_coeffs(A, k)
            mod = max(mod, np.abs(np.abs(a) ** 2 - moduli_squared(table, k)).max())
            for j in range(k + 1):
                _, disc = normalizer_N(table, k + 1, j, with_check=True)
                norm = max(norm, disc)
    out.update(p_unitary=unit, p_row_positive=row, minor_vs_eigen=path, moduli_identity=mod,
               normalizer_identity=norm)
    t = random_torus(n, rng)
    B = thimm_act_full(t, A)
    tb = gt_map(B)
    out["thimm_preserves_gt"] = max((np.abs(tb.level(k) - table.level(k)).max() for k in range(1, n + 1)))
    c0, c1 = gt_coordinates(A), gt_coordinates(B)
    out["thimm_angle_shift"] = max((angle_distance(c1.angles[k] - c0.angles[k], t.angles[k]).max()
                                    for k in range(n - 1)), default=0.0)
    out["rebuild_roundtrip"] = np.linalg.norm(rebuild(c0) - A)
    return {k: float(v) for k, v in out.items()}


def _cat_sample(args):
    n, seed = args
    rng = np.random.default_rng(seed)
    A = random_herm0(n, rng)
    table = gt_map(A)
    out = {}
    res = rh_caterpillar(A)
    out["connection_unitary"] = max([res.diagnostics["unitarity"]]
                                    + [unitarity_residual(normalized_connection(A, k)) for k in range(2, n + 1)])
    w = np.linalg.eigvalsh(res.nu)
    out["positive_definite"] = max(0.0, -float(w.min()))
    out["log_spectra"] = max(np.abs(np.log(np.linalg.eigvalsh(res.nu[:k, :k])[::-1]) - table.level(k)).max()
                             for k in range(1, n + 1))
    t = random_torus(n, rng)
    out["thimm_equivariance"] = np.linalg.norm(rh_caterpillar(thimm_act_full(t, A)).nu
                                               - thimm_act_full(t, res.nu))
    sub = stokes_subdiag(A)
    S = res.stokes.s_plus
    out["subdiag_closed_form"] = max((max(abs(sp - S[k, k + 1]), abs(sm - S[k, k + 1].conjugate()))
                                      for k, (sp, sm) in enumerate(sub)), default=0.0)
    out["diag_stokes"] = res.diagnostics["diag_residual"]
    out["monodromy"] = res.diagnostics["monodromy"]
    B = thimm_act_full(t, A)
    dlr, inv = 0.0, 0.0
    for k in range(2, n + 1):
        f = decompose_DLR(A, k)
        dlr = max(dlr, np.abs(f.product() - normalized_connection(A, k)).max())
        g = decompose_DLR(B, k)
        inv = max(inv, np.abs(f.r - g.r).max(),
                  np.abs(np.abs(np.diag(f.d_left)) - np.abs(np.diag(g.d_left))).max(),
                  np.abs(np.abs(np.diag(f.d_right)) - np.abs(np.diag(g.d_right))).max())
    out["dlr_reconstruction"] = dlr
    out["dlr_thimm_invariance"] = inv
    return {k: float(v) for k, v in out.items()}


def _am_sample(args):
    n, seed = args
    rng = np.random.default_rng(seed)
    A = random_herm0(n, rng)
    table = gt_map(A)
    out = {}
    f = gamma_am(A)
    out["psi_unitary"] = max(unitarity_residual(p) for p in f.psi_factors)
    out["positive_definite"] = max(0.0, -float(np.linalg.eigvalsh(f.gamma).min()))
    out["gt_intertwining"] = max(np.abs(np.log(np.linalg.eigvalsh(f.gamma[:k, :k])[::-1]) - table.level(k)).max()
                                 for k in range(1, n + 1))
    t = random_torus(n, rng)
    out["thimm_equivariance"] = np.linalg.norm(gamma_am(thimm_act_full(t, A)).gamma - thimm_act_full(t, f.gamma))
    out["two_path"] = np.linalg.norm(f.gamma - am_via_rh(A))
    R = random_herm0(n, rng, real=True)
    gR = gamma_am(R).gamma
    sign = 0.0
    for k in range(1, n):
        sa = np.sign(gt_a_coeffs(R, k).real)
        sg = np.sign(gt_a_coeffs(gR, k).real)
        sign = max(sign, float(np.any(sa != sg)))
    out["real_imag_part"] = np.abs(gR.imag).max()
    out["real_sign_vector"] = sign
    a, c = rng.standard_normal(2)
    b = complex(*rng.standard_normal(2))
    M = np.array([[a, b], [np.conj(b), c]])
    out["closed_form_2x2"] = np.abs(gamma_am(M).gamma - gamma_am_2x2(a, b, c)).max()
    return {k: float(v) for k, v in out.items()}


def _oracle_sample(args):
    n, seed, cfg_dict = args
    cfg = OracleConfig(**cfg_dict)
    rng = np.random.default_rng(seed)
    A = random_herm0(n, rng, max_norm=2.0)
    u = np.array([0.0, 1.0, 3.0][:n])
    res = stokes_numeric(LinearSystem(u, A), cfg)
    out = {k: res.residuals[k] for k in ("unitarity", "triangularity", "monodromy", "hermitian")}
    R0 = cfg.radius(LinearSystem(u, A))
    r0 = cfg.inner(LinearSystem(u, A).centred())
    tight = OracleConfig(R=2 * R0, r0=r0 / 2, rtol=cfg.rtol / 10, atol=cfg.atol / 10)
    res2 = stokes_numeric(LinearSystem(u, A), tight)
    out["self_consistency"] = np.abs(res.s_plus - res2.s_plus).max()
    prop = 0.0
    for k1 in range(2, n + 1):
        P = diagonalizer_P(A, k1 - 1)
        B = _delta(P.conj().T @ A @ P, k1)
        e = np.zeros(n)
        e[k1 - 1] = 1.0
        C, _ = connection_numeric(LinearSystem(e, B, chamber=False), cfg)
        prop = max(prop, np.abs(C @ ladder_L(A, k1) - normalized_connection(A, k1)).max())
    out["connection_closed_form"] = prop
    if n == 2:
        out["stokes_vs_caterpillar"] = np.abs(res.s_plus - rh_caterpillar(A).stokes.s_plus).max()
    return {k: float(v) for k, v in out.items()}


def _iso_sample(args):
    n, seed, cfg_dict = args
    cfg = OracleConfig(**cfg_dict)
    rng = np.random.default_rng(seed)
    A = random_herm0(n, rng, max_norm=1.5)
    out = {}
    u = np.cumsum(rng.uniform(0.5, 2.0, n))
    D = iso_rhs(u, A)
    h = 1e-6
    fd = 0.0
    for k in range(n):
        du = np.zeros(n)
        du[k] = h
        # central difference of the flow over a short step
        Ap = iso_flow(FlowState(u, A), u + du, chunks=1).Phi
        Am = iso_flow(FlowState(u, A), u - du, chunks=1).Phi
        fd = max(fd, np.abs((Ap - Am) / (2 * h) - D[k]).max())
    out["rhs_finite_difference"] = fd
    out["rhs_diagonal_fixed"] = max(np.abs(np.diag(D[k])[k]) for k in range(n))
    out["rhs_diagonal_input"] = np.abs(iso_rhs(u, np.diag(np.diag(A)))).max()
    v = u + rng.standard_normal(n) * 0.2
    v = np.sort(v)
    v = u + (v - u) / np.linalg.norm(v - u)
    if not np.all(np.diff(v) > 0):
        v = u + np.linspace(0, 1, n) / np.linalg.norm(np.linspace(0, 1, n))
    st = iso_flow(FlowState(u, A), v)
    cons = conservation_residuals(A, st.Phi)
    out["spectrum_conservation"] = cons["spectrum"]
    out["diagonal_conservation"] = cons["diagonal"]
    out["hermitian_drift"] = st.drift
    if n == 2:
        s0 = stokes_numeric(LinearSystem(u, A), cfg).s_plus
        s1 = stokes_numeric(LinearSystem(v, st.Phi), cfg).s_plus
        out["stokes_drift"] = np.abs(s0 - s1).max()
    g = g_factor(u, A)
    out["g_unitary"] = unitarity_residual(g)
    P1 = psi_u(u, A)
    out["psi_two_path"] = np.linalg.norm(P1 - psi_u(u, A, method="angles"))
    t0, t1 = gt_map(A), gt_map(P1)
    out["psi_preserves_actions"] = max(np.abs(t0.level(k) - t1.level(k)).max() for k in range(1, n + 1))
    # round trip from an undressed seed at ratio 10^3 (n = 2)
    B = random_herm0(2, rng)
    a0, a1 = np.array([0.0, 1e2]), np.array([0.0, 1e3])
    g0 = g_factor(a0, B)
    fl = iso_flow(FlowState(a0, g0.conj().T @ B @ g0), a1, chunks=4, keep_history=True)
    bf = boundary_fit(list(fl.history[-3:]))
    out["boundary_roundtrip"] = np.linalg.norm(bf.estimate - B)
    out["boundary_spectra"] = np.abs(np.linalg.eigvalsh(bf.estimate) - np.linalg.eigvalsh(B)).max()
    return {k: float(v) for k, v in out.items()}


def _mainthm_sample(args):
    n, seed, s_values, cfg_dict = args
    cfg = OracleConfig(**cfg_dict)
    rng = np.random.default_rng(seed)
    A = random_herm0(n, rng, max_norm=1.5)
    errs = []
    for s in s_values:
        u = np.concatenate([np.arange(n - 1, dtype=float), [s]])
        e, _ = mainthm_error(u, A, cfg)
        errs.append(e)
    return errs


# ---------------------------------------------------------------------------
# suites

def _cfg_dict(cfg):
    return {"R": cfg.radius, "rtol": cfg.rtol, "atol": cfg.atol}


def _run_per_sample(worker, args, cfg, tolerances):
    t0 = time.perf_counter()
    rows = _map(worker, args, cfg.jobs)
    wall = time.perf_counter() - t0
    agg = _aggregate(rows)
    per = wall / max(len(agg), 1)
    return [_check(k, v, tolerances.get(k, cfg.tol_rh), per) for k, v in agg.items()]


def suite_gt(cfg):
    args = [(cfg.n, s) for s in _seeds(cfg.seed, cfg.samples)]
    tol = {"eigen_reconstruction": 1e-11, "minor_full_det": 1e-12, "cholesky_roundtrip": 1e-12,
           "gamma_reflection": 1e-10, "interlacing": 1e-10, "p_unitary": cfg.tol_unitary,
           "p_row_positive": 1e-12, "rebuild_roundtrip": 1e-7}
    return _run_per_sample(_gt_sample, args, cfg, tol), []


def suite_caterpillar(cfg):
    args = [(cfg.n, s) for s in _seeds(cfg.seed, cfg.samples)]
    tol = {"connection_unitary": 1e-9, "dlr_reconstruction": 1e-9, "dlr_thimm_invariance": 1e-9}
    return _run_per_sample(_cat_sample, args, cfg, tol), []


def suite_am(cfg):
    args = [(cfg.n, s) for s in _seeds(cfg.seed, cfg.samples)]
    tol = {"psi_unitary": cfg.tol_unitary, "real_sign_vector": 0.0, "closed_form_2x2": 1e-10}
    return _run_per_sample(_am_sample, args, cfg, tol), []


def suite_oracle(cfg):
    if cfg.n not in (2, 3):
        raise ValueError("oracle-xcheck runs at n = 2 or 3")
    args = [(cfg.n, s, _cfg_dict(cfg)) for s in _seeds(cfg.seed, cfg.samples)]
    tol = {"hermitian": 1e-4}
    tol = {k: tol.get(k, cfg.tol_oracle) for k in
           ("unitarity", "triangularity", "monodromy", "hermitian", "self_consistency",
            "connection_closed_form", "stokes_vs_caterpillar")}
    return _run_per_sample(_oracle_sample, args, cfg, tol), []


def suite_iso(cfg):
    args = [(cfg.n, s, _cfg_dict(cfg)) for s in _seeds(cfg.seed, cfg.samples)]
    tol = {"rhs_finite_difference": 1e-6, "rhs_diagonal_fixed": 1e-14, "rhs_diagonal_input": 1e-14,
           "hermitian_drift": 1e-9, "stokes_drift": cfg.tol_stokes_drift, "g_unitary": 1e-10,
           "boundary_roundtrip": 1e-3}
    return _run_per_sample(_iso_sample, args, cfg, tol), []


def suite_mainthm(cfg):
    """Per-sample log-log slopes of the remainder against s for u = (0, 1, ..., s)."""
    if cfg.n < 3:
        raise ValueError("mainthm needs n >= 3 (at n = 2 the identity is exact)")
    s_values = tuple(float(s) for s in cfg.s_values)
    args = [(cfg.n, s, s_values, _cfg_dict(cfg)) for s in _seeds(cfg.seed, cfg.samples)]
    t0 = time.perf_counter()
    errs = np.array(_map(_mainthm_sample, args, cfg.jobs))
    wall = time.perf_counter() - t0
    slopes = [fit_loglog_slope(s_values, e) for e in errs]
    pooled = fit_loglog_slope(s_values, np.exp(np.log(errs).mean(axis=0)))
    checks = [_check("slope_max", max(slopes), cfg.tol_slope, wall / 3),
              _check("slope_min", min(slopes), -1.3, wall / 3, upper=False),
              _check("slope_pooled", pooled, cfg.tol_slope, wall / 3)]
    table = []
    for i, row in enumerate(errs):
        for s, e in zip(s_values, row):
            table.append((i, s, s - (cfg.n - 2), float(e), slopes[i]))
    return checks, table


_SUITE_FUNCS = {"gt": suite_gt, "caterpillar": suite_caterpillar, "am": suite_am,
                "oracle-xcheck": suite_oracle, "iso": suite_iso, "mainthm": suite_mainthm}

TABLE_HEADERS = {"mainthm": ("sample", "s", "ratio", "error", "slope")}


def run_suite(name, cfg):
    """Run suite `name` and return a :class:`Report`."""
    if name not in _SUITE_FUNCS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    checks, table = _SUITE_FUNCS[name](cfg)
    conf = asdict(cfg)
    conf.pop("jobs")
    conf["s_values"] = list(conf["s_values"])
    return Report(name, conf, checks, table, TABLE_HEADERS.get(name, ()))
