"""Device physics of the hollow-ring rf-SQUID qubit.

All quantities are SI.  The flux coordinate ``phi`` is measured from the
half-flux-quantum bias point, so the two qubit wells sit near
``phi = -phi0/2`` (state ``|0>_q``) and ``phi = +phi0/2`` (state ``|1>_q``).

Sign convention for the Josephson term: ``-E_J cos(2 pi phi/phi0 + pi)`` is
evaluated as ``+E_J cos(2 pi |phi|/phi0)``.  The two are identical
mathematically; the second form keeps ``U(phi) == U(-phi)`` bit-exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from . import constants as const
from .errors import InvalidArgument, MonostableError

EPS_BRACKET = (1e-12, math.pi - 1e-9)


@dataclass(frozen=True)
class SquidParams:
    """Circuit parameters: loop inductance ``L`` [H], junction critical
    current ``i0`` [A], junction capacitance ``C`` [F]."""

    L: float
    i0: float
    C: float
    flux_bias: float = const.phi0 / 2

    def __post_init__(self):
        for name in ("L", "i0", "C"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidArgument(f"{name} must be positive and finite, got {value!r}")

    @classmethod
    def from_dimensionless(cls, beta: float, ec_over_ej: float, L: float = 1e-9) -> SquidParams:
        """Build parameters for a given screening ``beta`` and ``E_C/E_J`` at loop inductance ``L``."""
        if beta <= 0 or ec_over_ej <= 0:
            raise InvalidArgument("beta and E_C/E_J must be positive")
        i0 = beta * const.phi0 / (2 * math.pi * L)
        E_J = i0 * const.phi0 / (2 * math.pi)
        C = const.e**2 / (2 * ec_over_ej * E_J)
        return cls(L=L, i0=i0, C=C)

    @property
    def beta(self) -> float:
        return 2 * math.pi * self.L * self.i0 / const.phi0

    @property
    def li0_over_phi0(self) -> float:
        return self.L * self.i0 / const.phi0

    @property
    def E_J(self) -> float:
        return self.i0 * const.phi0 / (2 * math.pi)

    @property
    def E_C(self) -> float:
        return const.e**2 / (2 * self.C)

    @property
    def L_J(self) -> float:
        return const.phi0 / (2 * math.pi * self.i0)


@dataclass(frozen=True)
class BoreGeometry:
    """Inner bore radius ``r`` and length ``l`` in metres."""

    r: float
    l: float

    def __post_init__(self):
        if not (0 < self.r < self.l):
            raise InvalidArgument(f"bore geometry needs 0 < r < l, got r={self.r!r}, l={self.l!r}")
        if self.r > self.l / 5:
            warnings.warn(
                f"bore aspect ratio l/r = {self.l / self.r:.3g} < 5; the point-charge estimate of delta is crude",
                stacklevel=3,
            )

    @property
    def aspect(self) -> float:
        return self.l / self.r

    @classmethod
    def from_aspect(cls, aspect: float, r: float = 1e-6) -> BoreGeometry:
        return cls(r=r, l=aspect * r)


@dataclass(frozen=True)
class VpcModel:
    """Vector-potential-charge picture of the bore ends (diagnostics only)."""

    a_bore: float  # Wb/m
    q_A: float  # Wb m
    dphi_A: float  # Wb


@dataclass(frozen=True)
class MinimaSolution:
    epsilon: float
    delta_phi: float
    residual: float

    @property
    def detection_error(self) -> float:
        return self.epsilon**2 / 4


@dataclass(frozen=True)
class ErrorBudget:
    p_delta: float
    p_epsilon: float
    p_leak: float
    p_total: float


@dataclass(frozen=True)
class BackactionModel:
    i_b: float
    T: float
    delta_E: float
    phase: float
    L_L: float
    phi_L: float


@dataclass(frozen=True)
class DissipationEstimate:
    R: float
    tau: float
    eta: float
    delta_E: float
    delta_A: float
    gap: float
    quasiparticle_safe: bool
    #: order-of-magnitude drive energy h/tau
    energy_scale: float


class LeakageEstimate(NamedTuple):
    p_exact: float
    p_approx: float
    p_closed: float


# -- potential landscape ----------------------------------------------------


def potential(phi, p: SquidParams):
    """``U(phi) = phi^2/2L - E_J cos(2 pi phi/phi0 + pi)`` in joules."""
    phi = np.asarray(phi, dtype=float)
    out = phi**2 / (2 * p.L) + p.E_J * np.cos(2 * np.pi * np.abs(phi) / const.phi0)
    return out if out.ndim else float(out)


def biased_potential(phi, i_b: float, p: SquidParams):
    """Potential with a bias current ``i_b`` across the junction (additive constant dropped).

    ``U'(phi) = phi^2/2L - i_b phi + E_J cos(2 pi phi/phi0)``; at ``i_b = 0`` this
    is exactly :func:`potential`.
    """
    phi = np.asarray(phi, dtype=float)
    out = phi**2 / (2 * p.L) - i_b * phi + p.E_J * np.cos(2 * np.pi * np.abs(phi) / const.phi0)
    return out if out.ndim else float(out)


def _beta_of(p_or_beta) -> float:
    return p_or_beta.beta if isinstance(p_or_beta, SquidParams) else float(p_or_beta)


def _minima_from_epsilon(eps: float, beta: float) -> MinimaSolution:
    residual = abs(math.pi - eps - beta * math.sin(eps))
    return MinimaSolution(epsilon=eps, delta_phi=const.phi0 * (1 - eps / math.pi), residual=residual)


def solve_epsilon(beta: float) -> MinimaSolution:
    """Solve ``pi - eps = beta sin(eps)`` for the phase deficit of the well minima.

    Bisection on ``f(eps) = beta sin(eps) - pi + eps`` over ``(1e-12, pi - 1e-9)``;
    ``f`` is negative at the left end and positive at the right end whenever
    ``beta > 1``.  Iterates until the bracket cannot be split further.
    """
    if not beta > 1:
        raise MonostableError(f"beta = {beta!r} <= 1: the potential has a single well")

    def f(x):
        return beta * math.sin(x) - math.pi + x

    lo, hi = EPS_BRACKET
    f_lo = f(lo)
    if f_lo >= 0 or f(hi) <= 0:
        raise MonostableError(f"no sign change for beta = {beta!r}; too close to the monostable limit")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0:
            lo = hi = mid
            break
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return _minima_from_epsilon(0.5 * (lo + hi), beta)


def find_minima_numeric(p: SquidParams | float) -> MinimaSolution:
    """Locate the right-hand well of the potential by direct minimization.

    Works on the dimensionless landscape ``U/E_J = 2 pi^2 x^2/beta + cos(2 pi x)``
    with ``x = phi/phi0``, which is unimodal on ``[0, 1/2]`` for ``beta > 1``.
    A bounded scalar minimization finds the well; a few Newton steps on
    ``dU/dx`` then polish it to full precision.
    """
    beta = _beta_of(p)
    if not beta > 1:
        raise MonostableError(f"beta = {beta!r} <= 1: the potential has a single well")

    def u(x):
        return 2 * math.pi**2 * x**2 / beta + math.cos(2 * math.pi * x)

    def du(x):
        return 4 * math.pi**2 * x / beta - 2 * math.pi * math.sin(2 * math.pi * x)

    def d2u(x):
        return 4 * math.pi**2 / beta - 4 * math.pi**2 * math.cos(2 * math.pi * x)

    res = optimize.minimize_scalar(u, bounds=(0.0, 0.5), method="bounded", options={"xatol": 1e-12})
    x = float(res.x)
    for _ in range(20):
        curvature = d2u(x)
        if curvature <= 0:
            break
        step = du(x) / curvature
        x_new = min(max(x - step, 0.0), 0.5)
        if x_new == x:
            break
        x = x_new
    eps = math.pi * (1 - 2 * x)
    return _minima_from_epsilon(eps, beta)


def li0_threshold(max_error: float = 0.01, step: float = 0.01, start: float = 0.16, stop: float = 100.0) -> float:
    """Smallest ``L i0/phi0`` on a grid of spacing ``step`` whose minima-shift error ``eps^2/4 <= max_error``."""
    n = int(math.floor((stop - start) / step)) + 1
    for j in range(n):
        ratio = round(start + j * step, 12)
        beta = 2 * math.pi * ratio
        if beta <= 1:
            continue
        if solve_epsilon(beta).detection_error <= max_error:
            return ratio
    raise InvalidArgument(f"no L i0/phi0 <= {stop} reaches error {max_error}")


# -- harmonic well, leakage -------------------------------------------------


def effective_inductance(p: SquidParams, eps: float) -> float:
    """Inverse curvature of the well, ``L L_J / (L (1 - eps^2/2) + L_J)``."""
    if not 0 <= eps < math.pi:
        raise InvalidArgument("eps must lie in [0, pi)")
    return p.L * p.L_J / (p.L * (1 - eps**2 / 2) + p.L_J)


def effective_inductance_beta_form(p: SquidParams, eps: float) -> float:
    """Same quantity written as ``beta / (beta (1 - eps^2/2) + 1) * L_J``."""
    if not 0 <= eps < math.pi:
        raise InvalidArgument("eps must lie in [0, pi)")
    beta = p.beta
    return beta / (beta * (1 - eps**2 / 2) + 1) * p.L_J


def ground_state_width(p: SquidParams, eps: float) -> float:
    """``phi1`` with ``phi1^2 = hbar sqrt(L_e / C)``."""
    return math.sqrt(const.hbar * math.sqrt(effective_inductance(p, eps) / p.C))


def _resolve_eps(p: SquidParams, eps: float | None) -> float:
    if not p.beta > 1:
        raise MonostableError(f"beta = {p.beta!r} <= 1: the potential has a single well")
    return solve_epsilon(p.beta).epsilon if eps is None else eps


def overlap_analytic(p: SquidParams, eps: float | None = None) -> float:
    """``|<0'|0>|^2 = exp(-(pi^2/2)(phi1/phi0)^2)`` for the harmonic ground state."""
    phi1 = ground_state_width(p, _resolve_eps(p, eps))
    return math.exp(-(math.pi**2 / 2) * (phi1 / const.phi0) ** 2)


def overlap_quadrature(p: SquidParams, eps: float | None = None) -> float:
    """Numerical quadrature of ``|integral |psi_q|^2 cos(pi (phi - phi0/2)/phi0) dphi|^2``.

    Integrates in the scaled coordinate ``t = (phi - phi0/2)/phi1`` where
    ``|psi_q|^2 = exp(-t^2) / (sqrt(pi) phi1)``.
    """
    phi1 = ground_state_width(p, _resolve_eps(p, eps))
    k = math.pi * phi1 / const.phi0

    def integrand(t):
        return math.exp(-t * t) * math.cos(k * t) / math.sqrt(math.pi)

    value, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return value**2


def leakage_probability(p: SquidParams, eps: float | None = None) -> LeakageEstimate:
    """Probability of leaking out of the qubit subspace after one passage.

    ``eps`` selects the well curvature used for ``p_exact`` and ``p_approx``;
    by default the solved minima shift is used.  ``p_closed`` is always the
    ``eps = 0`` closed form ``sqrt(beta/(beta+1)) sqrt(E_C / 8 E_J)``.
    """
    eps = _resolve_eps(p, eps)
    phi1 = ground_state_width(p, eps)
    x = (math.pi**2 / 2) * (phi1 / const.phi0) ** 2
    beta = p.beta
    p_closed = math.sqrt(beta / (beta + 1)) * math.sqrt(p.E_C / (8 * p.E_J))
    return LeakageEstimate(p_exact=-math.expm1(-x), p_approx=x, p_closed=p_closed)


# -- stray vector potential -------------------------------------------------


def geometric_delta(g: BoreGeometry) -> tuple[float, VpcModel]:
    """Phase deficit ``delta = r / 2l`` from the vector potential leaking out of the bore."""
    a_bore = const.phi0 / (2 * (g.l + g.r / 2))
    q_A = math.pi * g.r**2 * a_bore
    vpc = VpcModel(a_bore=a_bore, q_A=q_A, dphi_A=q_A / (2 * math.pi * g.r))
    return 0.5 / g.aspect, vpc


# -- budget -----------------------------------------------------------------


def combine_errors(*ps: float) -> float:
    """Independent-mechanism combination ``1 - prod(1 - p_i)``."""
    keep = 1.0
    for p in ps:
        if not 0 <= p <= 1:
            raise InvalidArgument(f"error probability {p!r} outside [0, 1]")
        keep *= 1 - p
    return 1 - keep


def detection_error_budget(p: SquidParams, g: BoreGeometry) -> ErrorBudget:
    delta, _ = geometric_delta(g)
    eps = solve_epsilon(p.beta).epsilon
    p_delta = delta**2 / 4
    p_epsilon = eps**2 / 4
    p_leak = leakage_probability(p, eps).p_exact
    return ErrorBudget(p_delta, p_epsilon, p_leak, combine_errors(p_delta, p_epsilon, p_leak))


# -- backaction and dissipation ---------------------------------------------


def backaction(T: float, phi_L_over_phi0: float = 1e6) -> BackactionModel:
    """Bias-current picture of one particle transit lasting ``T`` seconds.

    The source inductor ``L_L`` and its flux are inert bookkeeping; by default
    ``L_L`` is chosen so that ``phi_L = 1e6 phi0``.
    """
    if not T > 0:
        raise InvalidArgument("transit duration T must be positive")
    i_b = const.e / T
    delta_E = i_b * const.phi0 / 2
    phi_L = phi_L_over_phi0 * const.phi0
    return BackactionModel(
        i_b=i_b,
        T=T,
        delta_E=delta_E,
        phase=2 * delta_E * T / const.hbar,
        L_L=phi_L / i_b,
        phi_L=phi_L,
    )


def transit_time(length: float, speed: float = const.c) -> float:
    return length / speed


def emf_estimate(omega: float) -> float:
    """Junction EMF ``~ 2 phi0 omega / 2 pi`` for a tunnel splitting ``hbar omega``.

    Order-of-magnitude only; ``omega`` must come from the caller.
    """
    return 2 * const.phi0 * omega / (2 * math.pi)


def dissipation(R: float, tau: float, gap: float = const.AL_GAP) -> DissipationEstimate:
    """Normal-conductor dissipation estimate for a transit of duration ``tau``.

    ``energy_scale`` is ``h/tau``, a rough order of magnitude for the drive.
    """
    if R < 0:
        raise InvalidArgument("R must be >= 0")
    if not tau > 0:
        raise InvalidArgument("tau must be positive")
    eta = R / const.R_Q
    delta_A = eta * const.h
    delta_E = delta_A / tau
    return DissipationEstimate(
        R=R,
        tau=tau,
        eta=eta,
        delta_E=delta_E,
        delta_A=delta_A,
        gap=gap,
        quasiparticle_safe=bool(delta_E < gap),
        energy_scale=const.h / tau,
    )
