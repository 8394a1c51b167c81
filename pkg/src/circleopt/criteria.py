"""Machine checkers for the sufficient conditions of Sturmian optimization.

Each checker evaluates strict inequalities on grids and reports *margins
net of discretization-error bounds*: a "pass" means provably positive
slack at grid scale, a raw violation at a node means "fail", and a
positive raw margin smaller than its error bound is reported as
"inconclusive" rather than silently certified.  Failing a sufficient
condition never claims anything about the observable itself -- the report
only says the hypothesis was not verified.

Checked conditions, all for the doubling map:

* the two-sided slope/positivity test on a window [a, b] (margin names
  "R_positive" and "R_prime_negative");
* membership in the antisymmetric family with window (a, b) and level v
  (conditions A0, A1, A2);
* membership in the even antisymmetric concave family (class "B");
* the cosine-like ratio gate (f(0) - f(1/4)) / eta(f) > kappa with
  kappa = 7/96 - sqrt(3)/36;
* the window search on a half-profile h (conditions H1, H2);
* a full translate scan: solve, form the antipodal difference, certify,
  and cross-check beta against the best Sturmian integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convexity import ConvexityReport, convexity_defect, pointwise_defect
from .sturmian import (
    SturmianCertificate,
    antipodal_difference,
    best_sturmian,
    sturmian_certificate,
)
from .torus import (
    FunctionSpec,
    GridFunction,
    Translate,
    grid_derivative,
    lipschitz_estimate,
    sample,
    value_range,
)
from .transfer import solve_calibrated

KAPPA = 7.0 / 96.0 - math.sqrt(3.0) / 36.0


@dataclass(frozen=True)
class ClassAParams:
    """Window [a, b] and antisymmetry level v for the class-A test."""

    a: float
    b: float
    v: float = 0.0

    def __post_init__(self):
        if not (self.a < self.b < self.a + 0.5):
            raise ValueError(f"need a < b < a + 1/2, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class CriterionReport:
    """Named margins (net of error bounds) for one criterion.

    ``margins[name] > 0`` for every name is exactly ``status == "pass"``.
    ``witnesses`` holds the locations achieving the worst slack.
    """

    criterion: str
    status: str  # "pass" | "fail" | "inconclusive"
    margins: dict = field(default_factory=dict)
    raw_margins: dict = field(default_factory=dict)
    error_bounds: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "status": self.status,
            "pass": self.passed,
            "margins": dict(self.margins),
            "raw_margins": dict(self.raw_margins),
            "error_bounds": dict(self.error_bounds),
            "witnesses": dict(self.witnesses),
            "tolerances": dict(self.tolerances),
            "notes": list(self.notes),
        }


def _status_from(raw: dict, bounds: dict) -> str:
    """fail if any raw margin is <= 0 (witnessed violation at a node);
    pass if every margin clears its error bound; inconclusive otherwise."""
    if any(v <= 0.0 for v in raw.values()):
        return "fail"
    if all(raw[k] - bounds.get(k, 0.0) > 0.0 for k in raw):
        return "pass"
    return "inconclusive"


def _window_grid(lo: float, hi: float, grid_n: int) -> np.ndarray:
    """Closed uniform grid on [lo, hi] including both endpoints."""
    return np.linspace(lo, hi, grid_n + 1)


def _eta_or_raise(f, grid_n: int) -> ConvexityReport:
    rep = convexity_defect(f, "auto", grid_n)
    if not rep.is_finite:
        raise ValueError("convexity defect is flagged infinite; criterion undefined")
    return rep


def _derivative_values(f, xs, grid_n: int):
    """Derivative samples for the a.e. slope conditions.

    Symbolic route when available (exact at the sample points); otherwise
    central grid differences with a widened error estimate.  Returns
    (values at xs, values at xs + 1/2, extra pointwise error, slope
    Lipschitz estimate, route tag).
    """
    if isinstance(f, FunctionSpec):
        try:
            fp = f.derivative()
            return fp(xs), fp(xs + 0.5), 0.0, lipschitz_estimate(fp, grid_n), "symbolic"
        except ValueError:
            f = sample(f, grid_n)
    g = f if isinstance(f, GridFunction) else sample(f, grid_n)
    d = grid_derivative(g, "central")
    lipp = d.lipschitz_estimate()
    # central differences of a function with Lipschitz derivative are off
    # by at most Lip(f') / (2N); doubled for interpolation between nodes
    return d(xs), d(xs + 0.5), lipp / g.n, lipp, "grid"


def check_theorem_sturm(f, a: float, b: float, grid_n: int = 4096) -> CriterionReport:
    """Two-window test: positivity margin on [a,b], slope margin on [b, a+1/2].

    Inequalities checked (eta = convexity defect of f):
      on [a, b]:        f(x) - f(x+1/2) - (1/2) max_y defect(f; y, 1/4) > eta/96
                        over the two preimages y of x + 1/2,
      on [b, a+1/2]:    f'(x) - f'(x+1/2) < -eta/6.

    f may be a spec (exact evaluations and derivatives) or a grid function
    (interpolated evaluations, one-sided-difference slopes, wider bounds).
    """
    if not (a < b < a + 0.5):
        raise ValueError(f"need a < b < a + 1/2, got a={a}, b={b}")
    eta_rep = _eta_or_raise(f, grid_n)
    eta = eta_rep.eta
    lip = lipschitz_estimate(f, grid_n)

    xs1 = _window_grid(a, b, grid_n)
    z = xs1 + 0.5
    branch = np.maximum(
        pointwise_defect(f, z / 2.0, 0.25),
        pointwise_defect(f, z / 2.0 + 0.5, 0.25),
    )
    lhs1 = f(xs1) - f(xs1 + 0.5) - 0.5 * branch
    vals1 = lhs1 - eta / 96.0
    i1 = int(np.argmin(vals1))
    raw1 = float(vals1[i1])
    # Lip of the left side in x: |f(x)| + |f(x+1/2)| + (1/2)*(4 Lip * 1/2)
    bound1 = 3.0 * lip * ((b - a) / grid_n) / 2.0 + eta_rep.error_bound / 96.0

    xs2 = _window_grid(b, a + 0.5, grid_n)
    fp_at, fp_shift, extra, lip_fp, route = _derivative_values(f, xs2, grid_n)
    vals2 = -eta / 6.0 - (fp_at - fp_shift)
    i2 = int(np.argmin(vals2))
    raw2 = float(vals2[i2])
    bound2 = (
        2.0 * lip_fp * ((a + 0.5 - b) / grid_n) / 2.0
        + 2.0 * extra
        + eta_rep.error_bound / 6.0
    )

    raw = {"R_positive": raw1, "R_prime_negative": raw2}
    bounds = {"R_positive": bound1, "R_prime_negative": bound2}
    return CriterionReport(
        criterion="theorem-sturm",
        status=_status_from(raw, bounds),
        margins={k: raw[k] - bounds[k] for k in raw},
        raw_margins=raw,
        error_bounds=bounds,
        witnesses={"R_positive": float(xs1[i1]), "R_prime_negative": float(xs2[i2])},
        tolerances={"eta": eta, "eta_error": eta_rep.error_bound, "grid_n": grid_n},
        notes=(f"derivative route: {route}",),
    )


def check_class_a(f, params: ClassAParams, grid_n: int = 4096) -> CriterionReport:
    """Antisymmetric-family membership: (A0) identity, (A1) window gap, (A2) slope.

    (A0)  f(x) + f(x+1/2) = 2v at nodes (tolerance 1e-10 * range),
    (A1)  2 f(x) - v - max f > eta/96 on [a, b],
    (A2)  f'(x) < -eta/12 on [b, a+1/2] (checked at nodes of f').
    """
    a, b, v = params.a, params.b, params.v
    eta_rep = _eta_or_raise(f, grid_n)
    eta = eta_rep.eta
    lip = lipschitz_estimate(f, grid_n)
    rng = value_range(f, grid_n)

    xs = np.arange(grid_n) / grid_n
    tol_a0 = 1e-10 * max(1.0, rng)
    dev = float(np.max(np.abs(f(xs) + f(xs + 0.5) - 2.0 * v)))
    raw0 = tol_a0 - dev

    # global max of f: fine grid plus non-smooth candidates; upper estimate
    fine = np.arange(4 * grid_n) / (4 * grid_n)
    cands = [f(fine)]
    if isinstance(f, FunctionSpec):
        for bp in f.nonsmooth_points():
            cands.append(np.array([f(bp)]))
    fmax = float(max(np.max(c) for c in cands))
    fmax_err = lip / (4 * grid_n) / 2.0
    xs1 = _window_grid(a, b, grid_n)
    vals1 = 2.0 * f(xs1) - v - (fmax + fmax_err) - eta / 96.0
    i1 = int(np.argmin(vals1))
    raw1 = float(vals1[i1])
    bound1 = 2.0 * lip * ((b - a) / grid_n) / 2.0 + eta_rep.error_bound / 96.0

    xs2 = _window_grid(b, a + 0.5, grid_n)
    fp_at, _, extra, lip_fp, route = _derivative_values(f, xs2, grid_n)
    vals2 = -eta / 12.0 - fp_at
    i2 = int(np.argmin(vals2))
    raw2 = float(vals2[i2])
    bound2 = lip_fp * ((a + 0.5 - b) / grid_n) / 2.0 + extra + eta_rep.error_bound / 12.0

    raw = {"A0_identity": raw0, "A1_window_gap": raw1, "A2_slope": raw2}
    bounds = {"A0_identity": 0.0, "A1_window_gap": bound1, "A2_slope": bound2}
    return CriterionReport(
        criterion="class-A",
        status=_status_from(raw, bounds),
        margins={k: raw[k] - bounds[k] for k in raw},
        raw_margins=raw,
        error_bounds=bounds,
        witnesses={"A1_window_gap": float(xs1[i1]), "A2_slope": float(xs2[i2])},
        tolerances={
            "eta": eta,
            "eta_error": eta_rep.error_bound,
            "a0_tolerance": tol_a0,
            "max_f": fmax,
            "grid_n": grid_n,
            "a": a,
            "b": b,
            "v": v,
        },
        notes=(f"derivative route: {route}",),
    )


def check_class_b(f: FunctionSpec, grid_n: int = 4096) -> CriterionReport:
    """Even antisymmetric concave family membership.

    Verifies at nodes: f(x) + f(x+1/2) constant, f(-x) = f(x), finite
    convexity defect, concavity on [-1/4, 1/4]; and validates the identity
    eta = max f'' = -min f'' together with f'(0) = 0.
    """
    rng = value_range(f, grid_n)
    tol_id = 1e-10 * max(1.0, rng)

    xs = np.arange(grid_n) / grid_n
    s = f(xs) + f(xs + 0.5)
    raw_anti = tol_id - float(np.max(s) - np.min(s))
    raw_even = tol_id - float(np.max(np.abs(f(-xs) - f(xs))))

    try:
        second = f.derivative().derivative()
        fp = f.derivative()
    except ValueError as exc:
        return CriterionReport(
            criterion="class-B",
            status="fail",
            raw_margins={"antisymmetry": raw_anti, "evenness": raw_even, "smoothness": -1.0},
            margins={"antisymmetry": raw_anti, "evenness": raw_even, "smoothness": -1.0},
            notes=(f"no second symbolic derivative: {exc}",),
            tolerances={"identity_tolerance": tol_id, "grid_n": grid_n},
        )

    eta_rep = convexity_defect(f, "second_derivative", grid_n)
    eta = eta_rep.eta
    raw_finite = 1.0 if eta_rep.is_finite else -1.0

    # concavity strictly inside (-1/4, 1/4): endpoints excluded so that
    # right-limits at the quarter points do not leak in
    xs_in = np.linspace(-0.25, 0.25, grid_n + 1)[1:-1]
    vals = second(xs_in)
    tol_cc = 1e-9 * max(1.0, eta)
    i_cc = int(np.argmax(vals))
    raw_cc = tol_cc - float(vals[i_cc])

    # eta identity: max f'' and -min f'' agree with eta within 1% + eval noise
    fine = np.arange(2 * grid_n) / (2 * grid_n)
    cands = [second(fine)]
    eps = 1e-9
    for bp in second.nonsmooth_points():
        cands.append(np.array([second((bp - eps) % 1.0), second((bp + eps) % 1.0)]))
    allv = np.concatenate(cands)
    smax, smin = float(np.max(allv)), float(np.min(allv))
    tol_eta = 0.01 * max(1.0, eta)
    raw_sym = tol_eta - abs(smax + smin)
    raw_eta = tol_eta - abs(eta - smax)

    raw_d0 = 1e-8 * max(1.0, lipschitz_estimate(f, grid_n)) - abs(fp(0.0))

    raw = {
        "antisymmetry": raw_anti,
        "evenness": raw_even,
        "eta_finite": raw_finite,
        "concavity": raw_cc,
        "second_derivative_symmetry": raw_sym,
        "eta_identity": raw_eta,
        "derivative_at_zero": raw_d0,
    }
    return CriterionReport(
        criterion="class-B",
        status=_status_from(raw, {}),
        margins=dict(raw),
        raw_margins=raw,
        witnesses={"concavity": float(xs_in[i_cc])},
        tolerances={
            "eta": eta,
            "identity_tolerance": tol_id,
            "eta_tolerance": tol_eta,
            "max_second": smax,
            "min_second": smin,
            "grid_n": grid_n,
        },
    )


def check_kappa(f: FunctionSpec, grid_n: int = 4096) -> CriterionReport:
    """Ratio gate (f(0) - f(1/4)) / eta(f) > kappa = 7/96 - sqrt(3)/36.

    Requires class-B membership; a class-B failure propagates (the checker
    then certifies nothing about the ratio).
    """
    b_rep = check_class_b(f, grid_n)
    if not b_rep.passed:
        return CriterionReport(
            criterion="kappa",
            status="fail",
            raw_margins={"class_B": -1.0},
            margins={"class_B": -1.0},
            notes=("class-B membership failed; ratio not certified",) + b_rep.notes,
            tolerances={"kappa": KAPPA, "grid_n": grid_n},
        )
    eta = b_rep.tolerances["eta"]
    drop = f(0.0) - f(0.25)
    ratio = drop / eta
    raw = {"ratio_above_kappa": ratio - KAPPA}
    # eta from the second-derivative route is exact at grid scale for this
    # family; propagate its 1% validation tolerance through the quotient
    bound = {"ratio_above_kappa": abs(ratio) * 1e-6}
    return CriterionReport(
        criterion="kappa",
        status=_status_from(raw, bound),
        margins={k: raw[k] - bound[k] for k in raw},
        raw_margins=raw,
        error_bounds=bound,
        witnesses={"drop": drop},
        tolerances={"kappa": KAPPA, "eta": eta, "ratio": ratio, "grid_n": grid_n},
    )


def search_c(h: FunctionSpec, grid_n: int = 10_000) -> tuple[float | None, CriterionReport]:
    """Search c in (0, 1/4) with h(1/4) - 2h(c) > eta/96 and h'(c) > eta/12.

    h is a half-profile on [0, 1/4]: C^1 with increasing Lipschitz
    derivative, h(0) = h'(0) = 0, and eta = esssup h'' over [0, 1/4].
    The scan is exhaustive over a grid of (0, 1/4); reported margins are
    exact evaluations at the returned c, so no discretization bound is
    needed on a success.  On failure the worst margins over the scan are
    reported.
    """
    hp = h.derivative()
    hpp = hp.derivative()
    xs = np.linspace(0.0, 0.25, grid_n + 1)
    eps = 1e-9
    cands = [hpp(xs)]
    for bp in hpp.nonsmooth_points():
        if 0.0 <= bp <= 0.25:
            cands.append(np.array([hpp(max(bp - eps, 0.0)), hpp(min(bp + eps, 0.25))]))
    eta = float(max(np.max(c) for c in cands))
    if eta <= 0.0:
        raise ValueError("profile has nonpositive curvature bound; search undefined")

    h0 = h(0.0)
    hp0 = hp(0.0)
    h4 = h(0.25)
    prec = {
        "h0_zero": 1e-9 * max(1.0, abs(h4)) - abs(h0),
        "hp0_zero": 1e-9 * max(1.0, eta) - abs(hp0),
        "drop_above_kappa": h4 - KAPPA * eta,
        "hp_increasing": float(np.min(np.diff(hp(xs)))) + 1e-9 * eta,
    }

    cs = xs[1:-1]
    m1 = h4 - 2.0 * h(cs) - eta / 96.0
    m2 = hp(cs) - eta / 12.0
    score = np.minimum(m1, m2)
    i = int(np.argmax(score))
    found = bool(score[i] > 0.0)

    raw = {"H1_window_gap": float(m1[i]), "H2_slope": float(m2[i])}
    raw.update(prec)
    status = _status_from(raw, {})
    report = CriterionReport(
        criterion="lemma-sturm-search",
        status=status,
        margins=dict(raw),
        raw_margins=raw,
        witnesses={"c": float(cs[i])},
        tolerances={"eta": eta, "kappa": KAPPA, "h_quarter": h4, "grid_n": grid_n},
        notes=() if found else ("no c with positive margins; hypothesis violated or grid too coarse",),
    )
    return (float(cs[i]) if status == "pass" else None), report


@dataclass(frozen=True)
class TranslateRow:
    """One translate's solve/certify record in a scan."""

    omega: float
    beta: float
    converged: bool
    residual: float
    rotation_p: int
    rotation_q: int
    best_value: float
    beta_gap: float
    certificate: SturmianCertificate


@dataclass(frozen=True)
class ScanResult:
    rows: tuple[TranslateRow, ...]
    grid_n: int
    max_q: int

    @property
    def all_pass(self) -> bool:
        return all(r.certificate.passed and r.converged for r in self.rows)

    def to_csv(self) -> str:
        lines = ["omega,beta,rotation_p,rotation_q,certificate_pass,worst_margin"]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        format(r.omega, ".12g"),
                        format(r.beta, ".12g"),
                        str(r.rotation_p),
                        str(r.rotation_q),
                        "true" if r.certificate.passed else "false",
                        format(r.certificate.worst_margin, ".12g"),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "grid_n": self.grid_n,
            "max_q": self.max_q,
            "all_pass": self.all_pass,
            "rows": [
                {
                    "omega": r.omega,
                    "beta": r.beta,
                    "converged": r.converged,
                    "residual": r.residual,
                    "rotation": [r.rotation_p, r.rotation_q],
                    "best_value": r.best_value,
                    "beta_gap": r.beta_gap,
                    "certificate": r.certificate.to_dict(),
                }
                for r in self.rows
            ],
        }


def scan_translates(
    f: FunctionSpec,
    omega_count: int,
    grid_n: int = 4096,
    max_q: int = 32,
    tol: float | None = None,
    max_iter: int = 100_000,
    epsilon_r: float | None = None,
    w_max: float | None = None,
) -> ScanResult:
    """Solve + certify every translate f(x - j/omega_count).

    For each translate: solve the calibrated equation, form the antipodal
    difference of (f, g), run the certificate (band width defaults
    epsilon_r = 5 (Lip f + Lip g)/N, w_max = 16/N), and record the best
    Sturmian rotation number and integral.  Non-convergence is recorded
    per row; the scan continues.
    """
    rows = []
    for j in range(omega_count):
        omega = j / omega_count
        f_om = Translate(omega, f) if omega != 0.0 else f
        sol = solve_calibrated(f_om, d=2, grid_n=grid_n, tol=tol, max_iter=max_iter)
        f_grid = sample(f_om, grid_n)
        r = antipodal_difference(f_grid, sol.g)
        eps = epsilon_r
        if eps is None:
            eps = 5.0 * (f_grid.lipschitz_estimate() + sol.g.lipschitz_estimate()) / grid_n
        cert = sturmian_certificate(r, eps, w_max if w_max is not None else 16.0 / grid_n)
        mu, val = best_sturmian(f_om, max_q)
        rows.append(
            TranslateRow(
                omega=omega,
                beta=sol.beta,
                converged=sol.converged,
                residual=sol.residual,
                rotation_p=mu.p,
                rotation_q=mu.q,
                best_value=val,
                beta_gap=abs(sol.beta - val),
                certificate=cert,
            )
        )
    return ScanResult(rows=tuple(rows), grid_n=grid_n, max_q=max_q)
