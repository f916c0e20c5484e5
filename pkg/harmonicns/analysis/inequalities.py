"""Sampled certificates for the supersolution and corner-growth inequalities.

The supersolution ``v+ = e^-|r| p(s)`` with ``p = 8s^4 - 50s^2 + 75`` dominates
solutions of the strip problem when

    p''(s) + G(s) p'(s) + p(s) <= 0   on (0, pi/2),

and the pulled back gradients stay bounded near the corners +-i when
``e^(-delta |Re psi|) |psi'|`` does, which happens exactly for delta >= 1.

"""
import dataclasses
import fractions
import logging
import math

import numpy as np
from numpy.polynomial import Polynomial

from harmonicns.core import constants
from harmonicns.core.errors import ConfigError, VerificationError
from harmonicns.geometry import hyperbolic

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"


def _verdict(ok):
    return PASS if ok else FAIL


@dataclasses.dataclass
class MarginReport:
    """Outcome of a sampled inequality check.

    Args:
        lemma (str): Name of the checked statement.
        samples (int): Number of samples.
        worst_value (float): Largest value of the certified expression.
        worst_location (float or list): Where it was attained.
        verdict (str): ``"pass"`` or ``"fail"``.
        fitted_exponent (float or None): Growth exponent, for fits.
        details (dict): Auxiliary numbers.

    """

    lemma: str
    samples: int
    worst_value: float
    worst_location: object
    verdict: str
    fitted_exponent: float = None
    details: dict = dataclasses.field(default_factory=dict)

    @property
    def passed(self):
        """bool: Whether the verdict is pass."""
        return self.verdict == PASS

    def to_dict(self):
        """Return a JSON-ready dictionary; ``fitted_exponent`` only for fits."""
        data = {
            "lemma": self.lemma,
            "samples": int(self.samples),
            "worst_value": float(self.worst_value),
            "worst_location": self.worst_location,
            "verdict": self.verdict,
        }
        if self.fitted_exponent is not None:
            data["fitted_exponent"] = float(self.fitted_exponent)
        if self.details:
            data["details"] = self.details
        return data


class SupersolutionPolynomial:
    """The polynomial p of the supersolution together with its decay rate.

    Args:
        coefficients (tuple[float]): Coefficients of p, lowest degree first.
        delta (float): Decay rate in r of the supersolution.

    """

    def __init__(self, coefficients=constants.SUPERSOLUTION_COEFFICIENTS,
                 delta=constants.LEMMA_DELTA):
        self.coefficients = tuple(float(c) for c in coefficients)
        self.delta = float(delta)
        self.p = Polynomial(self.coefficients)
        # p1 multiplies G, p2 collects the rest of the operator.
        self.p1 = self.p.deriv()
        self.p2 = self.p.deriv(2) + self.delta**2*self.p

    def __call__(self, s):
        return self.p(np.asarray(s, dtype=float))

    @property
    def top_value(self):
        """float: ``p(pi/2)``, the trace of the supersolution on s = pi/2."""
        return float(self.p(constants.HALF_PI))

    @property
    def limit_at_zero(self):
        """float: Limit of the left-hand side as s -> 0+, using sG(s) -> 1."""
        return float(self.p2(0.) + self.p1.deriv()(0.))

    def squared_roots(self):
        """Exact roots in s^2 of an even quartic, as ``Fraction`` values.

        Returns:
            list[fractions.Fraction]: Sorted roots u of ``p(sqrt(u)) = 0``.

        Raises:
            ValueError: If p is not an even quartic with rational roots in s^2.

        """
        c0, c1, c2, c3, c4 = (list(self.coefficients) + [0.]*5)[:5]
        if c1 or c3 or not c4:
            raise ValueError("p is not an even quartic")
        a, b, c = (fractions.Fraction(x).limit_denominator(10**6)
                   for x in (c4, c2, c0))
        disc = b*b - 4*a*c
        num, den = disc.numerator, disc.denominator
        if disc < 0 or math.isqrt(num)**2 != num or math.isqrt(den)**2 != den:
            raise ValueError("roots in s^2 are not rational")
        root = fractions.Fraction(math.isqrt(num), math.isqrt(den))
        return sorted([(-b - root)/(2*a), (-b + root)/(2*a)])

    def lhs(self, s):
        """``p2(s) + G(s) p1(s)`` on (0, pi/2)."""
        s = np.asarray(s, dtype=float)
        return self.p2(s) + hyperbolic.coefficient_G(s)*self.p1(s)

    def lhs_derivative(self, s):
        """Derivative of ``lhs``, for the gap certificate."""
        s = np.asarray(s, dtype=float)
        G = hyperbolic.coefficient_G(s)
        G_s = 0.5*(-0.5/np.sin(s/2)**2 + 1/np.cos(s)**2)
        return self.p2.deriv()(s) + G_s*self.p1(s) + G*self.p1.deriv()(s)

    def lhs_derivative_bound(self, a, b):
        """Upper bound of ``|lhs'|`` on each interval ``[a, b]`` in (0, pi/2).

        Uses ``|q(s)| <= |q|(b)`` for a polynomial q with its coefficients
        replaced by their absolute values, and the monotone pieces of G:
        ``0 < G <= (cot(a/2) + tan b)/2`` and
        ``|G'| <= (csc(a/2)^2/2 + sec(b)^2)/2``.

        """
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)

        def majorant(q):
            return Polynomial(abs(q.coef))(b)

        G_max = 0.5*(1/np.tan(a/2) + np.tan(b))
        G_s_max = 0.5*(0.5/np.sin(a/2)**2 + 1/np.cos(b)**2)
        return (majorant(self.p2.deriv()) + G_s_max*majorant(self.p1)
                + G_max*majorant(self.p1.deriv()))

    def bound_chain(self, s):
        """Majorant of ``lhs`` from ``G >= (1 + 1/(2cos s))/2`` where ``p1 < 0``."""
        s = np.asarray(s, dtype=float)
        return self.p2(s) + 0.5*(1 + 0.5/np.cos(s))*self.p1(s)


def chebyshev_samples(n, a, b):
    """``n`` increasing Chebyshev points of the first kind on (a, b)."""
    k = np.arange(n)
    nodes = -np.cos(np.pi*(k + 0.5)/n)
    return a + 0.5*(b - a)*(nodes + 1)


def verify_supersolution(n=constants.DEFAULT_SUPERSOLUTION_SAMPLES,
                         polynomial=None, guard=constants.ENDPOINT_GUARD):
    """Certify ``p'' + G p' + delta^2 p <= 0`` on (0, pi/2) by sampling.

    The interior (guard, pi/2 - guard) is covered by Chebyshev samples and a
    gap bound ``(L_k + L_(k+1))/2 + M_k h_k/2`` per sample gap, with M_k the
    interval majorant of ``|lhs'|`` on the gap. The end pieces are covered by
    the limit -125 at 0 and the divergence to -infinity at pi/2. For
    s > sqrt(2)/2, the bound chain through the lower estimate of G is also
    checked.

    Args:
        n (int): Sample count, at least 1000.
        polynomial (SupersolutionPolynomial or None): Defaults to the quartic.
        guard (float): Width of the end pieces.

    Returns:
        MarginReport: Verdict pass iff all samples and gap bounds are negative.

    """
    if n < 1000:
        raise ConfigError("samples", "the supersolution check needs at least 1000 samples")
    polynomial = polynomial or SupersolutionPolynomial()
    s = chebyshev_samples(n, guard, constants.HALF_PI - guard)
    values = polynomial.lhs(s)
    slopes = polynomial.lhs_derivative_bound(s[:-1], s[1:])
    gaps = np.diff(s)
    gap_bound = float(np.max(0.5*(values[1:] + values[:-1]) + 0.5*slopes*gaps))
    worst = int(np.argmax(values))

    split = np.sqrt(2)/2
    low, high = s[s <= split], s[s > split]
    decomposition = bool(np.all(polynomial.p2(low) <= 0.)
                         and np.all(polynomial.bound_chain(high) <= 0.)
                         and np.all(values[s > split]
                                    <= polynomial.bound_chain(high) + 1e-9))
    near_top = float(polynomial.lhs(constants.HALF_PI - 1e-3))
    ok = bool(values[worst] < 0. and gap_bound < 0.
              and polynomial.limit_at_zero < 0. and near_top < 0.)
    report = MarginReport(
        lemma="supersolution",
        samples=n,
        worst_value=float(values[worst]),
        worst_location=float(s[worst]),
        verdict=_verdict(ok),
        details={
            "gap_bound": gap_bound,
            "limit_at_zero": polynomial.limit_at_zero,
            "value_at_guard": float(values[0]),
            "value_near_top": near_top,
            "split_point": float(split),
            "decomposition_holds": decomposition,
        },
    )
    logger.info("Supersolution check: worst %.6g at s=%.6g, gap bound %.6g, %s",
                report.worst_value, report.worst_location, gap_bound, report.verdict)
    return report


def verify_positivity_p(n=1000, polynomial=None):
    """Check that p decreases on (0, pi/2) and stays positive.

    Returns:
        MarginReport: ``worst_value`` is the minimum of p, attained at pi/2.

    """
    polynomial = polynomial or SupersolutionPolynomial()
    s = np.linspace(0., constants.HALF_PI, n + 2)[1:-1]
    decreasing = bool(np.all(polynomial.p1(s) < 0.))
    minimum = min(float(np.min(polynomial(s))), polynomial.top_value)
    details = {"decreasing": decreasing, "top_value": polynomial.top_value}
    try:
        details["squared_roots"] = [str(u) for u in polynomial.squared_roots()]
    except ValueError:
        pass
    ok = decreasing and polynomial.top_value > 0. and minimum == polynomial.top_value
    return MarginReport(
        lemma="positivity",
        samples=n,
        worst_value=minimum,
        worst_location=float(constants.HALF_PI),
        verdict=_verdict(ok),
        details=details,
    )


def growth_samples(delta, n=constants.DEFAULT_PSI_SAMPLES, s0=np.pi/4,
                   r_range=(4., 30.), corner=1):
    """Samples of ``log f2^2`` against ``log 1/(1 - |z|)`` along a strip ray.

    The ray ``w = r + i s0`` approaches ``z = i`` as r -> -infinity and
    ``z = -i`` as r -> +infinity; ``corner = 1`` selects z = i and
    ``corner = -1`` selects z = -i.

    Returns:
        tuple[np.ndarray]: ``(x, y)`` with ``x = log 1/(1 - |z|)`` and
        ``y = log f2(z)^2``.

    """
    r = -corner*np.linspace(*r_range, n)
    w = r + 1j*s0
    defect = hyperbolic.disk_defect_on_strip(w)
    radius = np.sqrt(1 - defect)
    x = -np.log(defect/(1 + radius))
    y = 2*(-delta*abs(r) + np.log(abs(hyperbolic.psi_prime_on_strip(w))))
    return x, y


def _growth_fit(delta, n, corner):
    x, y = growth_samples(delta, n, corner=corner)
    usable = np.isfinite(x) & np.isfinite(y)
    if np.count_nonzero(usable) < 8:
        raise VerificationError("growth fit needs at least 8 usable samples")
    slope, _ = np.polyfit(x[usable], y[usable], 1)
    return float(slope), float(np.max(np.exp(0.5*y[usable])))


def verify_lemma_psi(delta, n=constants.DEFAULT_PSI_SAMPLES,
                     tolerance=constants.GROWTH_FIT_TOLERANCE):
    """Fit the growth of ``f2 = e^(-delta |Re psi|) |psi'|`` at both corners.

    ``f2^2`` grows like ``(1 - |z|)^-(2 - 2 delta)``, so it is bounded exactly
    for delta >= 1. The fitted exponent is checked against ``2 - 2 delta``
    within 10%, or within ``tolerance`` in absolute value when that vanishes.
    The label records whether the fit is bounded, and the verdict also
    requires boundedness to agree with delta >= 1.

    Args:
        delta (float): Decay rate in (0, 2].
        n (int): Samples per corner.
        tolerance (float): Exponent slack for the bounded verdict.

    Returns:
        MarginReport: ``fitted_exponent`` is the exponent at z = i.

    """
    if not 0. < delta <= 2.:
        raise ConfigError("delta", "must lie in (0, 2]")
    if n < 8:
        raise ConfigError("psi_samples", "need at least 8 samples")
    upper, upper_max = _growth_fit(delta, n, corner=1)
    lower, lower_max = _growth_fit(delta, n, corner=-1)
    expected = 2 - 2*delta
    slack = max(tolerance, 0.1*abs(expected))
    matches = abs(upper - expected) <= slack and abs(lower - expected) <= slack
    bounded = max(upper, lower) <= tolerance
    report = MarginReport(
        lemma="corner-growth-bounded" if bounded else "corner-growth-unbounded",
        samples=2*n,
        worst_value=max(upper_max, lower_max),
        worst_location="z=i" if upper_max >= lower_max else "z=-i",
        verdict=_verdict(matches and bounded == (delta >= 1.)),
        fitted_exponent=upper,
        details={
            "delta": float(delta),
            "expected_exponent": expected,
            "exponent_upper_corner": upper,
            "exponent_lower_corner": lower,
            "bounded": bool(bounded),
        },
    )
    logger.info("Corner growth for delta=%g: exponents %.4f (z=i), %.4f (z=-i)",
                delta, upper, lower)
    return report


def uniform_half_disk(n, rng, corner_radius=0.):
    """``n`` area-uniform samples of H, optionally away from +-i."""
    z = np.empty(0, dtype=complex)
    while z.size < n:
        rho = np.sqrt(rng.uniform(0., 1., n))
        alpha = rng.uniform(-constants.HALF_PI, constants.HALF_PI, n)
        batch = rho*np.exp(1j*alpha)
        keep = ((batch.real > 0.) & (abs(batch) < 1.)
                & (np.minimum(abs(batch - 1j), abs(batch + 1j)) > corner_radius))
        z = np.concatenate([z, batch[keep]])
    return z[:n]


def verify_f1(n=10**5, seed=constants.DEFAULT_SEED):
    """Check ``f1 = (1 - |z|^2)|psi'(z)| <= 2`` on random samples of H.

    Since ``|1 + z^2| >= 1 - |z|^2``, the bound is attained only in the limit
    along L towards +-i.

    """
    rng = np.random.default_rng(seed)
    z = uniform_half_disk(n, rng)
    f1 = (1 - abs(z)**2)*abs(hyperbolic.psi_prime(z))
    worst = int(np.argmax(f1))
    return MarginReport(
        lemma="f1-bounded",
        samples=n,
        worst_value=float(f1[worst]),
        worst_location=[float(z[worst].real), float(z[worst].imag)],
        verdict=_verdict(f1[worst] <= 2 + 1e-6),
    )


def delta_ceiling(coefficients, n=10**4, guard=constants.ENDPOINT_GUARD):
    """Largest delta with ``p'' + G p' + delta^2 p <= 0`` on sampled (0, pi/2).

    Returns 0 if p is not positive at every sample or no delta works.

    """
    polynomial = SupersolutionPolynomial(coefficients, delta=0.)
    s = chebyshev_samples(n, guard, constants.HALF_PI - guard)
    p = polynomial(s)
    if np.any(p <= 0.):
        return 0.
    ratio = -polynomial.lhs(s)/p
    return float(np.sqrt(max(float(np.min(ratio)), 0.)))


def quadratic_family_ceiling(count=64, n=10**4):
    """Sweep ``p = 1 - c s^2`` for 0 < c < 4/pi^2 and report the best delta."""
    c_max = 4/np.pi**2
    sweep = [(float(c), delta_ceiling((1., 0., -c), n))
             for c in np.linspace(0., c_max, count + 2)[1:-1]]
    best_c, best_delta = max(sweep, key=lambda item: item[1])
    return {"best_c": best_c, "best_delta": best_delta,
            "sweep": [{"c": c, "delta": d} for c, d in sweep]}
