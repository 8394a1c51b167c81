"""Real-valued functions on the circle T = R/Z.

Two representations are used throughout:

* ``FunctionSpec`` -- an immutable symbolic expression tree with exact
  evaluation and exact derivatives.  Node kinds: cosines, piecewise
  polynomials, sums, scalings, translations, negations and antisymmetric
  extensions of a half-profile.
* ``GridFunction`` -- a uniform N-point sampling ``values[i] = f(i/N)``
  with periodic linear interpolation between nodes.

Everything is immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
import numpy as np

TWO_PI = 2.0 * math.pi

# Snap tolerance (in units of grid spacing) used to decide that an
# evaluation point *is* a node, so node evaluation returns stored values
# exactly even when x = i/N was produced by inexact float arithmetic.
_NODE_SNAP = 1e-9

_JOIN_TOL = 1e-9  # relative continuity tolerance at piecewise junctions


class FunctionSpec:
    """Base class for symbolic period-1 observables.

    Subclasses implement ``_eval`` on arguments already reduced to [0, 1),
    plus exact differentiation and serialization.
    """

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self._eval(arr % 1.0)
        if arr.ndim == 0:
            return float(out)
        return np.asarray(out, dtype=float)

    def _eval(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative(self) -> "FunctionSpec":
        raise NotImplementedError

    def nonsmooth_points(self) -> tuple[float, ...]:
        """Locations in [0,1) where the spec may be non-smooth."""
        return ()

    def lipschitz_bound(self) -> float:
        """A (possibly coarse) upper bound for the Lipschitz constant."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class Cosine(FunctionSpec):
    """cos(2*pi*freq*x + phase) with integer frequency (hence period 1)."""

    freq: int = 1
    phase: float = 0.0

    def __post_init__(self):
        if not (isinstance(self.freq, int) and self.freq >= 1):
            raise ValueError(f"Cosine frequency must be a positive integer, got {self.freq!r}")

    def _eval(self, r):
        return np.cos(TWO_PI * self.freq * r + self.phase)

    def derivative(self):
        # d/dx cos(2 pi k x + p) = 2 pi k cos(2 pi k x + p + pi/2)
        return Scale(TWO_PI * self.freq, Cosine(self.freq, self.phase + math.pi / 2.0))

    def lipschitz_bound(self):
        return TWO_PI * self.freq

    def to_dict(self):
        return {"kind": "cos", "freq": self.freq, "phase": self.phase}


@dataclass(frozen=True)
class PiecewisePoly(FunctionSpec):
    """Piecewise polynomial on [0,1): piece i covers [b_i, b_{i+1}).

    ``breakpoints`` must start at 0 and be strictly increasing in [0,1);
    ``coefficients[i]`` are ascending-power coefficients evaluated at the
    global coordinate x in [0,1).  ``wrap=False`` marks a profile used only
    on a subinterval (e.g. a half-profile), which exempts the 1 -> 0
    junction from continuity requirements in ``derivative``.
    """

    breakpoints: tuple[float, ...]
    coefficients: tuple[tuple[float, ...], ...]
    wrap: bool = True

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        coefs = tuple(tuple(float(c) for c in piece) for piece in self.coefficients)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "coefficients", coefs)
        if len(bps) == 0 or bps[0] != 0.0:
            raise ValueError("PiecewisePoly breakpoints must start at 0.0")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])) or bps[-1] >= 1.0:
            raise ValueError("PiecewisePoly breakpoints must be strictly increasing in [0,1)")
        if len(coefs) != len(bps):
            raise ValueError("need one coefficient tuple per piece")
        if any(len(piece) == 0 for piece in coefs):
            raise ValueError("empty coefficient tuple")

    def _eval(self, r):
        shape = np.shape(r)
        flat = np.atleast_1d(np.asarray(r, dtype=float))
        idx = np.searchsorted(np.asarray(self.breakpoints), flat, side="right") - 1
        out = np.empty_like(flat)
        for i, piece in enumerate(self.coefficients):
            mask = idx == i
            if mask.any():
                out[mask] = np.polynomial.polynomial.polyval(flat[mask], np.asarray(piece))
        return out.reshape(shape)

    def piece_value(self, i: int, x: float) -> float:
        """Evaluate piece i's polynomial at x regardless of piece bounds."""
        return float(np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients[i])))

    def _scale(self) -> float:
        return max(1.0, max(abs(c) for piece in self.coefficients for c in piece))

    def derivative(self):
        m = len(self.breakpoints)
        tol = _JOIN_TOL * self._scale()
        for j in range(1, m):
            b = self.breakpoints[j]
            if abs(self.piece_value(j - 1, b) - self.piece_value(j, b)) > tol:
                raise ValueError(f"derivative of discontinuous piecewise polynomial (jump at x={b})")
        if self.wrap:
            if abs(self.piece_value(m - 1, 1.0) - self.piece_value(0, 0.0)) > tol:
                raise ValueError("derivative of discontinuous piecewise polynomial (jump at x=0)")
        dcoefs = []
        for piece in self.coefficients:
            if len(piece) == 1:
                dcoefs.append((0.0,))
            else:
                dcoefs.append(tuple(j * c for j, c in enumerate(piece) if j >= 1))
        return PiecewisePoly(self.breakpoints, tuple(dcoefs), wrap=self.wrap)

    def nonsmooth_points(self):
        return self.breakpoints

    def lipschitz_bound(self):
        # max |p'| over [0,1] bounded by the coefficient sum; coarse but safe
        return max(sum(j * abs(c) for j, c in enumerate(piece)) for piece in self.coefficients)

    def to_dict(self):
        d = {
            "kind": "piecewise_poly",
            "breakpoints": list(self.breakpoints),
            "coefficients": [list(p) for p in self.coefficients],
        }
        if not self.wrap:
            d["wrap"] = False
        return d


@dataclass(frozen=True)
class Sum(FunctionSpec):
    terms: tuple[FunctionSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) == 0:
            raise ValueError("Sum needs at least one term")

    def _eval(self, r):
        out = self.terms[0]._eval(r)
        for t in self.terms[1:]:
            out = out + t._eval(r)
        return out

    def derivative(self):
        return Sum(tuple(t.derivative() for t in self.terms))

    def nonsmooth_points(self):
        pts = set()
        for t in self.terms:
            pts.update(t.nonsmooth_points())
        return tuple(sorted(pts))

    def lipschitz_bound(self):
        return sum(t.lipschitz_bound() for t in self.terms)

    def to_dict(self):
        return {"kind": "sum", "terms": [t.to_dict() for t in self.terms]}


@dataclass(frozen=True)
class Scale(FunctionSpec):
    factor: float
    inner: FunctionSpec

    def _eval(self, r):
        return self.factor * self.inner._eval(r)

    def derivative(self):
        return Scale(self.factor, self.inner.derivative())

    def nonsmooth_points(self):
        return self.inner.nonsmooth_points()

    def lipschitz_bound(self):
        return abs(self.factor) * self.inner.lipschitz_bound()

    def to_dict(self):
        return {"kind": "scale", "factor": self.factor, "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Translate(FunctionSpec):
    """Translate(omega, f)(x) = f(x - omega)."""

    omega: float
    inner: FunctionSpec

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega) % 1.0)

    def _eval(self, r):
        return self.inner._eval((r - self.omega) % 1.0)

    def derivative(self):
        return Translate(self.omega, self.inner.derivative())

    def nonsmooth_points(self):
        return tuple(sorted((b + self.omega) % 1.0 for b in self.inner.nonsmooth_points()))

    def lipschitz_bound(self):
        return self.inner.lipschitz_bound()

    def to_dict(self):
        return {"kind": "translate", "omega": self.omega, "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class Negate(FunctionSpec):
    inner: FunctionSpec

    def _eval(self, r):
        return -self.inner._eval(r)

    def derivative(self):
        return Negate(self.inner.derivative())

    def nonsmooth_points(self):
        return self.inner.nonsmooth_points()

    def lipschitz_bound(self):
        return self.inner.lipschitz_bound()

    def to_dict(self):
        return {"kind": "negate", "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class AntisymmetricExtension(FunctionSpec):
    """Extend a half-profile h on [0, 1/2] to T by f(x + 1/2) = 2v - f(x).

    The resulting f satisfies f(x) + f(x + 1/2) = 2v identically.  Junction
    continuity (h(0) + h(1/2) = 2v) is enforced at construction; interior
    regularity is whatever the profile provides.
    """

    half: FunctionSpec
    v: float = 0.0

    def __post_init__(self):
        h0 = self.half(0.0)
        h_half = self.half(0.5)
        scale = max(1.0, abs(h0), abs(h_half), abs(self.v))
        if abs(h0 + h_half - 2.0 * self.v) > _JOIN_TOL * scale:
            raise ValueError(
                "antisymmetric extension is discontinuous: h(0) + h(1/2) != 2v "
                f"({h0} + {h_half} != {2 * self.v})"
            )

    def _eval(self, r):
        shape = np.shape(r)
        flat = np.atleast_1d(np.asarray(r, dtype=float))
        lo = self.half._eval(flat)
        hi = 2.0 * self.v - self.half._eval((flat - 0.5) % 1.0)
        return np.where(flat < 0.5, lo, hi).reshape(shape)

    def derivative(self):
        # f' = h' on [0,1/2), -h'(x-1/2) on [1/2,1): the same extension with v=0.
        # The constructor check on the result enforces h'(0) = -h'(1/2),
        # i.e. differentiability of f at the junctions.
        return AntisymmetricExtension(self.half.derivative(), 0.0)

    def nonsmooth_points(self):
        pts = {0.0, 0.5}
        for b in self.half.nonsmooth_points():
            if b < 0.5:
                pts.add(b)
                pts.add(b + 0.5)
        return tuple(sorted(pts))

    def lipschitz_bound(self):
        return self.half.lipschitz_bound()

    def to_dict(self):
        return {"kind": "antisym_ext", "v": self.v, "half": self.half.to_dict()}


_KINDS = ("cos", "piecewise_poly", "sum", "scale", "translate", "negate", "antisym_ext")


def spec_from_dict(d: dict) -> FunctionSpec:
    """Parse the tagged-object JSON grammar; errors name the offending node."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError(f"function spec node must be an object with a 'kind' tag, got {d!r}")
    kind = d["kind"]
    if kind not in _KINDS:
        raise ValueError(f"unknown function spec node kind {kind!r}")
    try:
        if kind == "cos":
            return Cosine(int(d["freq"]), float(d.get("phase", 0.0)))
        if kind == "piecewise_poly":
            return PiecewisePoly(
                tuple(d["breakpoints"]),
                tuple(tuple(p) for p in d["coefficients"]),
                wrap=bool(d.get("wrap", True)),
            )
        if kind == "sum":
            return Sum(tuple(spec_from_dict(t) for t in d["terms"]))
        if kind == "scale":
            return Scale(float(d["factor"]), spec_from_dict(d["inner"]))
        if kind == "translate":
            return Translate(float(d["omega"]), spec_from_dict(d["inner"]))
        if kind == "negate":
            return Negate(spec_from_dict(d["inner"]))
        return AntisymmetricExtension(spec_from_dict(d["half"]), float(d.get("v", 0.0)))
    except KeyError as exc:
        raise ValueError(f"node kind {kind!r} is missing required field {exc.args[0]!r}") from exc


def spec_from_json(text: str) -> FunctionSpec:
    return spec_from_dict(json.loads(text))


@dataclass(frozen=True)
class GridFunction:
    """Uniform sampling of a period-1 function; values[i] = f(i/N).

    Evaluation between nodes uses periodic linear interpolation; evaluation
    at (float-noisy) node positions snaps to the stored value.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1 or v.size < 2:
            raise ValueError("GridFunction needs a 1-d array of at least 2 values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        t = (arr % 1.0) * self.n
        j = np.rint(t)
        exact = np.abs(t - j) < _NODE_SNAP
        i0 = np.floor(t).astype(int)
        frac = t - i0
        v0 = self.values[i0 % self.n]
        v1 = self.values[(i0 + 1) % self.n]
        interp = (1.0 - frac) * v0 + frac * v1
        out = np.where(exact, self.values[j.astype(int) % self.n], interp)
        if arr.ndim == 0:
            return float(out)
        return out

    def lipschitz_estimate(self) -> float:
        """Empirical Lipschitz constant max |f(x_{i+1}) - f(x_i)| * N."""
        d = np.diff(np.concatenate([self.values, self.values[:1]]))
        return float(np.max(np.abs(d)) * self.n)

    def value_range(self) -> float:
        return float(np.max(self.values) - np.min(self.values))

    def to_csv(self) -> str:
        lines = ["x,value"]
        for i, v in enumerate(self.values):
            lines.append(f"{format(i / self.n, '.12g')},{format(v, '.12g')}")
        return "\n".join(lines) + "\n"


def sample(f: FunctionSpec, n: int) -> GridFunction:
    """Sample a spec at n uniform nodes; exact at every node."""
    if n < 4:
        raise ValueError(f"grid size must be at least 4, got {n}")
    return GridFunction(f(np.arange(n) / n))


def refine_linear(g: GridFunction, factor: int) -> GridFunction:
    """Upsample by an integer factor; old nodes are copied exactly."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    v = g.values
    nxt = np.roll(v, -1)
    w = np.arange(factor) / factor
    out = v[:, None] * (1.0 - w) + nxt[:, None] * w
    return GridFunction(out.ravel())


def restrict(g: GridFunction, factor: int) -> GridFunction:
    """Keep every factor-th node (exact subsampling)."""
    if g.n % factor != 0:
        raise ValueError(f"{factor} does not divide grid size {g.n}")
    return GridFunction(g.values[::factor])


def grid_derivative(g: GridFunction, side: str = "central") -> GridFunction:
    """Difference-quotient derivative at spacing 1/N (left/right/central)."""
    if g.n < 4:
        raise ValueError("grid derivative needs at least 4 nodes")
    v = g.values
    n = g.n
    if side == "right":
        return GridFunction((np.roll(v, -1) - v) * n)
    if side == "left":
        return GridFunction((v - np.roll(v, 1)) * n)
    if side == "central":
        return GridFunction((np.roll(v, -1) - np.roll(v, 1)) * (n / 2.0))
    raise ValueError(f"side must be left|right|central, got {side!r}")


@dataclass(frozen=True)
class OneSidedDerivativeReport:
    """Candidate derivative-jump points of a grid function.

    For convex-plus-quadratic functions all genuine jumps are upward, so
    ``jump_magnitudes`` should be >= -threshold throughout.
    """

    locations: tuple[int, ...]
    xs: tuple[float, ...]
    right_derivatives: tuple[float, ...]
    left_derivatives: tuple[float, ...]
    jump_magnitudes: tuple[float, ...]
    total_variation: float
    threshold: float

    def to_dict(self):
        return {
            "locations": list(self.locations),
            "xs": list(self.xs),
            "right_derivatives": list(self.right_derivatives),
            "left_derivatives": list(self.left_derivatives),
            "jump_magnitudes": list(self.jump_magnitudes),
            "total_variation": self.total_variation,
            "threshold": self.threshold,
        }


def one_sided_derivative_report(g: GridFunction, jump_threshold: float | None = None) -> OneSidedDerivativeReport:
    """Locate grid points where the one-sided difference quotients jump.

    The default threshold 10 * Lip(g) / N separates genuine kinks from
    discretization noise.
    """
    n = g.n
    right = (np.roll(g.values, -1) - g.values) * n
    left = (g.values - np.roll(g.values, 1)) * n
    jumps = right - left
    if jump_threshold is None:
        jump_threshold = 10.0 * g.lipschitz_estimate() / n
    idx = np.nonzero(np.abs(jumps) > jump_threshold)[0]
    central = (right + left) / 2.0
    tv = float(np.sum(np.abs(np.diff(np.concatenate([central, central[:1]])))))
    return OneSidedDerivativeReport(
        locations=tuple(int(i) for i in idx),
        xs=tuple(float(i) / n for i in idx),
        right_derivatives=tuple(float(right[i]) for i in idx),
        left_derivatives=tuple(float(left[i]) for i in idx),
        jump_magnitudes=tuple(float(jumps[i]) for i in idx),
        total_variation=tv,
        threshold=float(jump_threshold),
    )


def lipschitz_estimate(f, n: int = 4096) -> float:
    """Empirical Lipschitz estimate for a spec, grid function or callable."""
    if isinstance(f, GridFunction):
        return f.lipschitz_estimate()
    if isinstance(f, FunctionSpec):
        return sample(f, n).lipschitz_estimate()
    xs = np.arange(n) / n
    return GridFunction(np.asarray(f(xs), dtype=float)).lipschitz_estimate()


def value_range(f, n: int = 4096) -> float:
    if isinstance(f, GridFunction):
        return f.value_range()
    if isinstance(f, FunctionSpec):
        return sample(f, n).value_range()
    xs = np.arange(n) / n
    vals = np.asarray(f(xs), dtype=float)
    return float(vals.max() - vals.min())
