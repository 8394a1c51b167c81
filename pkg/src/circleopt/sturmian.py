"""Sturmian measures of the doubling map and the antipodal-gap certificate.

For each closed semicircle S of T there is a unique invariant probability
measure of x -> 2x supported on S; it is carried by the periodic orbit of
the Sturmian word of its rotation number p/q (for rational rotation
numbers, the only ones needed here).  Orbit points are exact rationals
with denominator 2^q - 1, so orbit-closure checks are exact.

The certificate machinery works with R(x) = (f+g)(x) - (f+g)(x + 1/2) for
a calibrated sub-action g: when the zero set of R is a single pair of
antipodal points, the maximizing measure of f is unique and Sturmian.  On
a grid the zero set is bracketed by a band |R| <= eps_R, and a pass
requires the band to consist of exactly two antipodal arcs of width at
most w_max.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .convexity import pointwise_defect, uniform_defect
from .torus import GridFunction


def sturmian_word(p: int, q: int) -> tuple[int, ...]:
    """Binary word s_n = floor((n+1)p/q) - floor(np/q), n = 0..q-1."""
    return tuple(((n + 1) * p) // q - (n * p) // q for n in range(q))


def _validate_rotation(p: int, q: int):
    if q < 1 or p < 0 or (p >= q and (p, q) != (0, 1)):
        raise ValueError(f"rotation number must satisfy 0 <= p < q, got {p}/{q}")
    if gcd(p, q) != 1:
        raise ValueError(f"rotation number {p}/{q} is not in lowest terms")


@dataclass(frozen=True)
class SturmianMeasure:
    """Uniform measure on the period-q Sturmian orbit of rotation number p/q."""

    p: int
    q: int
    orbit: tuple[Fraction, ...]
    semicircle: tuple[Fraction, Fraction]

    @property
    def rotation(self) -> Fraction:
        return Fraction(self.p, self.q)

    def integrate(self, f) -> float:
        """(1/q) * sum of f over the orbit."""
        pts = np.array([float(x) for x in self.orbit])
        return float(np.mean(f(pts)))

    def to_dict(self):
        return {
            "p": self.p,
            "q": self.q,
            "orbit": [str(x) for x in self.orbit],
            "semicircle": [str(self.semicircle[0]), str(self.semicircle[1])],
        }


def sturmian_measure(p: int, q: int) -> SturmianMeasure:
    """Construct the Sturmian measure with rotation number p/q (reduced)."""
    _validate_rotation(p, q)
    word = sturmian_word(p, q)
    num = 0
    for s in word:
        num = (num << 1) | s
    x0 = Fraction(num, 2**q - 1) if q > 0 else Fraction(0)
    orbit = [x0]
    for _ in range(q - 1):
        nxt = orbit[-1] * 2
        orbit.append(nxt - int(nxt))  # exact mod 1
    pts = sorted(orbit)
    # minimal enclosing arc: complement of the largest cyclic gap
    if len(pts) == 1:
        start = pts[0]
        width = Fraction(0)
    else:
        gaps = [pts[i + 1] - pts[i] for i in range(len(pts) - 1)]
        gaps.append(1 + pts[0] - pts[-1])
        gi = max(range(len(gaps)), key=lambda i: gaps[i])
        start = pts[(gi + 1) % len(pts)]
        width = 1 - gaps[gi]
    if width > Fraction(1, 2):
        raise AssertionError(f"orbit of {p}/{q} does not fit a semicircle (width {width})")
    return SturmianMeasure(p=p, q=q, orbit=tuple(orbit), semicircle=(start, start + Fraction(1, 2)))


def rotation_numbers(max_q: int):
    """All reduced p/q with q <= max_q, ordered by (q, p); includes 0/1."""
    out = [(0, 1)]
    for q in range(2, max_q + 1):
        for p in range(1, q):
            if gcd(p, q) == 1:
                out.append((p, q))
    return out


def best_sturmian(f, max_q: int = 32) -> tuple[SturmianMeasure, float]:
    """Scan all rotation numbers q <= max_q for the largest integral of f.

    Near-ties (relative 1e-12, the noise floor of averaging) keep the
    first, i.e. smallest-denominator, measure; the result is deterministic.
    """
    if max_q < 1:
        raise ValueError("max_q must be >= 1")
    best_mu = None
    best_val = 0.0
    for p, q in rotation_numbers(max_q):
        mu = sturmian_measure(p, q)
        val = mu.integrate(f)
        if best_mu is None or val > best_val + 1e-12 * (1.0 + abs(best_val)):
            best_mu, best_val = mu, val
    assert best_mu is not None
    return best_mu, best_val


def antipodal_difference(f: GridFunction, g: GridFunction) -> GridFunction:
    """R(x) = f(x) + g(x) - f(x+1/2) - g(x+1/2), node-exact.

    Computed as s - roll(s, -N/2) for s = f + g, so R(x + 1/2) = -R(x)
    holds exactly in floating point.
    """
    if f.n != g.n:
        raise ValueError(f"grid sizes disagree: {f.n} vs {g.n}")
    if f.n % 2 != 0:
        raise ValueError(f"antipodal difference needs an even grid, got N={f.n}")
    s = f.values + g.values
    return GridFunction(s - np.roll(s, -(f.n // 2)))


def _circular_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal cyclic runs of True as (start_index, length)."""
    n = mask.size
    if mask.all():
        return [(0, n)]
    if not mask.any():
        return []
    # rotate so position 0 is False, then find plain runs
    off = int(np.argmin(mask))  # first False
    rolled = np.roll(mask, -off)
    runs = []
    in_run = False
    start = 0
    for i, m in enumerate(rolled):
        if m and not in_run:
            in_run = True
            start = i
        elif not m and in_run:
            in_run = False
            runs.append(((start + off) % n, i - start))
    if in_run:
        runs.append(((start + off) % n, rolled.size - start))
    return runs


@dataclass(frozen=True)
class SturmianCertificate:
    """Machine-checkable report on the zero set of an antipodal difference.

    status: "pass" (exactly two antipodal zero arcs, both narrow),
    "inconclusive" (two antipodal arcs but wider than w_max: degenerate or
    under-resolved at this N), "fail" (anything else).
    """

    status: str
    passed: bool
    zero_arcs: tuple[tuple[float, float, int], ...]  # (start_x, width, node_count)
    antipodal_pair: tuple[float, float] | None
    positivity_arc: tuple[float, float] | None  # (start_x, width) of maximal R > eps arc
    worst_margin: float  # min over zero arcs of (w_max - width); negative when too wide
    epsilon_r: float
    w_max: float
    grid_n: int

    def to_dict(self):
        return {
            "status": self.status,
            "pass": self.passed,
            "zero_arcs": [
                {"start": s, "width": w, "nodes": c} for s, w, c in self.zero_arcs
            ],
            "antipodal_pair": list(self.antipodal_pair) if self.antipodal_pair else None,
            "positivity_arc": list(self.positivity_arc) if self.positivity_arc else None,
            "worst_margin": self.worst_margin,
            "epsilon_r": self.epsilon_r,
            "w_max": self.w_max,
            "grid_n": self.grid_n,
        }


def sturmian_certificate(
    r: GridFunction,
    epsilon_r: float | None = None,
    w_max: float | None = None,
) -> SturmianCertificate:
    """Cluster the band |R| <= epsilon_r into cyclic arcs and judge it.

    Defaults: epsilon_r = 2.5 * Lip(R) / N (callers that know f and g pass
    5 * (Lip f + Lip g) / N explicitly; Lip R <= 2 (Lip f + Lip g)),
    w_max = 16 / N.
    """
    n = r.n
    if n % 2 != 0:
        raise ValueError("certificate needs an even grid")
    anti = float(np.max(np.abs(r.values + np.roll(r.values, -(n // 2)))))
    scale = max(1.0, float(np.max(np.abs(r.values))))
    if anti > 1e-12 * scale:
        raise ValueError(f"input is not antisymmetric: max |R(x)+R(x+1/2)| = {anti}")
    if epsilon_r is None:
        epsilon_r = 2.5 * r.lipschitz_estimate() / n
    if w_max is None:
        w_max = 16.0 / n

    mask = np.abs(r.values) <= epsilon_r
    runs = _circular_runs(mask)
    arcs = tuple((start / n, (length - 1) / n, length) for start, length in runs)

    pos_runs = _circular_runs(r.values > epsilon_r)
    positivity = None
    if pos_runs:
        s, ln = max(pos_runs, key=lambda r_: r_[1])
        positivity = (s / n, (ln - 1) / n)

    if len(runs) != 2:
        return SturmianCertificate(
            status="fail",
            passed=False,
            zero_arcs=arcs,
            antipodal_pair=None,
            positivity_arc=positivity,
            worst_margin=(w_max - max((w for _, w, _ in arcs), default=1.0)),
            epsilon_r=float(epsilon_r),
            w_max=float(w_max),
            grid_n=n,
        )

    (s1, l1), (s2, l2) = runs
    antipodal = (
        abs((s2 - s1) % n - n // 2) <= 1 and abs(l1 - l2) <= 1
    )  # guaranteed by exact antisymmetry; kept as a sanity gate
    widths = [(l1 - 1) / n, (l2 - 1) / n]
    worst = w_max - max(widths)
    if not antipodal:
        status = "fail"
    elif worst >= 0.0:
        status = "pass"
    else:
        status = "inconclusive"
    center1 = (s1 + (l1 - 1) / 2.0) / n % 1.0
    pair = (center1, (center1 + 0.5) % 1.0)
    return SturmianCertificate(
        status=status,
        passed=status == "pass",
        zero_arcs=arcs,
        antipodal_pair=pair if status != "fail" else None,
        positivity_arc=positivity,
        worst_margin=float(worst),
        epsilon_r=float(epsilon_r),
        w_max=float(w_max),
        grid_n=n,
    )


def preimage_branch_bound(f, g, x: float, n: int, d: int = 2) -> float:
    """Upper bound for -2*(g(x) - g(x+1/2)) from defects along preimage branches.

    Enumerates all 2^(n-1) branches y with T^(n-1) y = x + 1/2 and returns

        max_y sum_{k=2..n} defect(f; T^(n-k) y, 2^-k)  +  sup-defect(g; 2^-n).

    Only d = 2 is supported: the construction is specific to the doubling
    map and its antipodal structure.
    """
    if d != 2:
        raise ValueError("preimage branch bound is specific to d = 2")
    if n < 2:
        raise ValueError("need n >= 2")
    if n > 20:
        raise ValueError(f"n = {n} would enumerate 2^{n-1} branches; capped at 20")
    m = 2 ** (n - 1)
    ys = ((x + 0.5) + np.arange(m)) / m  # all preimages under T^(n-1)
    # forward orbit T^j y for j = 0..n-2; term k uses point T^(n-k) y
    totals = np.zeros(m)
    pts = ys % 1.0
    powers = [pts.copy()]
    for _ in range(n - 2):
        pts = (2.0 * pts) % 1.0
        powers.append(pts.copy())
    for k in range(2, n + 1):
        delta = 2.0**-k
        at = powers[n - k]
        totals += pointwise_defect(f, at, delta)
    tail = float(uniform_defect(g, 2.0**-n))
    return float(np.max(totals) + tail)
