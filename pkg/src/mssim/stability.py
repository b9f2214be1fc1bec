"""Time-varying stability index families with exact range bounds.

Four closed families are supported so that the infimum and supremum of
beta over the working window are exact; those bounds feed the CTRW
normalizing constants and the continuity-bound constant, where an
approximate supremum would silently change the law being tested.
"""

from dataclasses import dataclass, field
import math

import numpy as np

FAMILIES = ("constant", "affine", "sinusoid", "table")

# relative slack for domain checks at the horizon, to absorb grids like k/n
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class StabilityIndex:
    """The index t -> beta(t) on [0, horizon].

    ``params`` per family:
      constant:  (c,)
      affine:    (c0, c1)            beta(t) = c0 + c1*t
      sinusoid:  (c0, c1, c2)        beta(t) = c0 + c1*sin(2*pi*c2*t)
      table:     ((t0, b0), ...)     linear interpolation between knots
    """

    family: str
    params: tuple
    horizon: float
    beta_inf: float = field(init=False)
    beta_sup: float = field(init=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon}")
        object.__setattr__(self, "params", self._canonical_params())
        lo, hi = self.bounds_on(0.0, self.horizon)
        if not (0.0 < lo <= hi < 1.0):
            raise ValueError(
                f"beta must stay inside (0, 1) on [0, {self.horizon}]; "
                f"this {self.family} index spans [{lo}, {hi}]"
            )
        object.__setattr__(self, "beta_inf", lo)
        object.__setattr__(self, "beta_sup", hi)

    def _canonical_params(self):
        p = self.params
        if self.family == "table":
            knots = tuple((float(t), float(b)) for t, b in p)
            if len(knots) < 2:
                raise ValueError("table family needs at least two knots")
            ts = [t for t, _ in knots]
            if ts[0] != 0.0:
                raise ValueError(f"table knots must start at t=0, got {ts[0]}")
            if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
                raise ValueError("table knot times must be strictly increasing")
            if ts[-1] < self.horizon:
                raise ValueError(
                    f"last table knot {ts[-1]} does not cover horizon {self.horizon}"
                )
            return knots
        want = {"constant": 1, "affine": 2, "sinusoid": 3}[self.family]
        vals = tuple(float(v) for v in p)
        if len(vals) != want:
            raise ValueError(f"{self.family} family takes {want} parameters, got {len(vals)}")
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"non-finite parameter in {vals}")
        return vals

    # -- evaluation ------------------------------------------------------

    def _check_domain(self, t):
        tol = _EDGE_TOL * max(1.0, self.horizon)
        t = np.asarray(t, dtype=float)
        if (t < -tol).any() or (t > self.horizon + tol).any():
            raise ValueError(f"t outside [0, {self.horizon}]")
        return np.clip(t, 0.0, self.horizon)

    def evaluate(self, t):
        """beta(t) for a scalar t in [0, horizon]."""
        return float(self.evaluate_many(t))

    def evaluate_many(self, t):
        """Vectorized beta(t); accepts scalars or arrays."""
        t = self._check_domain(t)
        if self.family == "constant":
            return np.full_like(t, self.params[0])
        if self.family == "affine":
            c0, c1 = self.params
            return c0 + c1 * t
        if self.family == "sinusoid":
            c0, c1, c2 = self.params
            return c0 + c1 * np.sin(2.0 * math.pi * c2 * t)
        knot_t = np.array([k[0] for k in self.params])
        knot_b = np.array([k[1] for k in self.params])
        return np.interp(t, knot_t, knot_b)

    # -- exact bounds ----------------------------------------------------

    def bounds(self):
        """(beta_inf, beta_sup) over [0, horizon], exact per family."""
        return (self.beta_inf, self.beta_sup)

    def bounds_on(self, a, b):
        """Exact (inf, sup) of beta over the sub-window [a, b]."""
        if not 0.0 <= a <= b:
            raise ValueError(f"invalid window [{a}, {b}]")
        if self.family == "constant":
            c = self.params[0]
            return (c, c)
        if self.family == "affine":
            va, vb = (float(v) for v in self._raw_eval((a, b)))
            return (min(va, vb), max(va, vb))
        if self.family == "sinusoid":
            c0, c1, c2 = self.params
            cand = [a, b]
            if c1 != 0.0 and c2 != 0.0:
                # extrema where 2*pi*c2*t = pi/2 + k*pi
                k0 = math.floor((2.0 * c2 * a - 0.5))
                k1 = math.ceil((2.0 * c2 * b - 0.5)) + 1
                for k in range(min(k0, k1), max(k0, k1) + 1):
                    tc = (0.5 + k) / (2.0 * c2)
                    if a <= tc <= b:
                        cand.append(tc)
            vals = self._raw_eval(cand)
            return (float(np.min(vals)), float(np.max(vals)))
        knot_t = np.array([k[0] for k in self.params])
        inner = knot_t[(knot_t > a) & (knot_t < b)]
        cand = np.concatenate(([a, b], inner))
        vals = self._raw_eval(cand)
        return (float(np.min(vals)), float(np.max(vals)))

    def _raw_eval(self, t):
        """Evaluation without the horizon check (bounds may probe t > horizon knots)."""
        t = np.asarray(t, dtype=float)
        if self.family == "constant":
            return np.full_like(t, self.params[0])
        if self.family == "affine":
            c0, c1 = self.params
            return c0 + c1 * t
        if self.family == "sinusoid":
            c0, c1, c2 = self.params
            return c0 + c1 * np.sin(2.0 * math.pi * c2 * t)
        knot_t = np.array([k[0] for k in self.params])
        knot_b = np.array([k[1] for k in self.params])
        return np.interp(t, knot_t, knot_b)

    def lipschitz_bound(self):
        """A Lipschitz constant for beta on [0, horizon]."""
        if self.family == "constant":
            return 0.0
        if self.family == "affine":
            return abs(self.params[1])
        if self.family == "sinusoid":
            c0, c1, c2 = self.params
            return 2.0 * math.pi * abs(c1 * c2)
        slopes = [
            abs((b1 - b0) / (t1 - t0))
            for (t0, b0), (t1, b1) in zip(self.params, self.params[1:])
        ]
        return max(slopes)

    # -- textual spec ----------------------------------------------------

    @classmethod
    def from_spec(cls, spec, horizon):
        """Parse CLI/config strings like ``constant:0.5`` or ``affine:0.4,0.2``.

        Formats: ``constant:c``, ``affine:c0,c1``, ``sin:c0,c1,c2``,
        ``table:t0,b0;t1,b1;...``.
        """
        try:
            name, _, rest = spec.partition(":")
            name = name.strip().lower()
            if name == "sin":
                name = "sinusoid"
            if name == "table":
                params = tuple(
                    tuple(float(v) for v in knot.split(","))
                    for knot in rest.split(";")
                    if knot.strip()
                )
            else:
                params = tuple(float(v) for v in rest.split(","))
        except (ValueError, AttributeError) as exc:
            raise ValueError(f"cannot parse beta spec {spec!r}: {exc}") from None
        return cls(name, params, float(horizon))

    def spec_string(self):
        """Canonical textual form, round-trips through from_spec."""
        if self.family == "table":
            body = ";".join(f"{t:g},{b:g}" for t, b in self.params)
        else:
            body = ",".join(f"{v:g}" for v in self.params)
        name = "sin" if self.family == "sinusoid" else self.family
        return f"{name}:{body}"
