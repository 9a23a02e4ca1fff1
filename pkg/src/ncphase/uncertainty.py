"""Weighted inner product, sector expectations and uncertainty bounds.

The deformed inner product is

    <phi | psi>_rho = integral dy/(1 + tau y^2)  conj(psi)(y) phi(y),

linear in the first argument, conjugating the second.  Quadrature uses the
compactifying substitution y = tan(u) with adaptive refinement; the weight
decays too slowly for naive interval truncation.

The Gaussian test family is

    psi(y) = exp(-(y - a)^2 / (2 sigma^2) + i k y),

so that at tau = 0 the position variance of a centered member is
sigma^2 / 2.  That sigma convention is used by every closed-form oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested accuracy."""

    def __init__(self, message: str, estimate: float):
        super().__init__(f"{message} (error estimate {estimate:.3e})")
        self.estimate = estimate


QUAD_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Gaussian:
    """Gaussian wave packet: center a, width sigma, momentum kick k."""

    center: float = 0.0
    sigma: float = 1.0
    kick: float = 0.0

    def __call__(self, y):
        z = (y - self.center) / self.sigma
        return np.exp(-0.5 * z * z + 1j * self.kick * y)

    def derivative(self, y):
        return (1j * self.kick - (y - self.center) / self.sigma**2) * self(y)

    def second_derivative(self, y):
        g = 1j * self.kick - (y - self.center) / self.sigma**2
        return (g * g - 1.0 / self.sigma**2) * self(y)


def _integrate(f: Callable[[float], complex]) -> complex:
    """integral of f over the real line via y = tan(u).

    Converges to 1e-10 absolute for unit-scale integrands; for integrals of
    large magnitude the acceptance threshold scales with the value (the
    error estimate is then limited by the relative machine accuracy of the
    adaptive rule, not by refinement).
    """

    def real_part(u):
        t = math.tan(u)
        return (f(t) * (1 + t * t)).real

    def imag_part(u):
        t = math.tan(u)
        return (f(t) * (1 + t * t)).imag

    half_pi = math.pi / 2
    value = 0.0j
    for part, picker in ((real_part, 1.0), (imag_part, 1.0j)):
        integral, estimate = quad(
            part, -half_pi, half_pi, epsabs=1e-12, epsrel=1e-12, limit=400
        )
        if estimate > QUAD_TOLERANCE * max(1.0, abs(integral)):
            raise QuadratureError("quadrature did not converge", estimate)
        value += picker * integral
    return value


def rho_inner(phi, psi, tau: float) -> complex:
    """<phi | psi>_rho; linear in phi, conjugating psi."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return _integrate(lambda y: np.conj(psi(y)) * phi(y) / (1 + tau * y * y))


def rho_norm(psi, tau: float) -> float:
    return math.sqrt(rho_inner(psi, psi, tau).real)


# -- sector operators in the y-representation --------------------------------


def apply_operator(name: str, psi, p) -> Callable[[float], complex]:
    """Apply one of Y, P_y, Y^2, P_y^2 (or the bare d/dy detector) to psi.

    P_y acts as (1 + tau y^2)(-i hbar d/dy); psi must expose derivative()
    and second_derivative() (the Gaussian family does).
    """
    hbar, tau = p.hbar, p.tau
    if name == "Y":
        return lambda y: y * psi(y)
    if name == "Y2":
        return lambda y: y * y * psi(y)
    if name == "Py":
        return lambda y: (1 + tau * y * y) * (-1j * hbar) * psi.derivative(y)
    if name == "Py2":
        return lambda y: (
            -(hbar**2)
            * (1 + tau * y * y)
            * ((1 + tau * y * y) * psi.second_derivative(y) + 2 * tau * y * psi.derivative(y))
        )
    if name == "d/dy":
        # Not an observable; kept as a detector that the Hermiticity check
        # actually rejects non-Hermitian operators.
        return lambda y: psi.derivative(y)
    raise ValueError(f"unknown sector operator {name!r}")


def expectation(name: str, psi, p) -> float:
    """<psi | O psi>_rho / <psi | psi>_rho, returned as a real number."""
    tau = p.tau
    norm = rho_inner(psi, psi, tau).real
    value = rho_inner(apply_operator(name, psi, p), psi, tau) / norm
    return value.real


def verify_rho_hermiticity(name: str, pairs: Sequence, p) -> dict:
    """Max |<phi|O psi> - <O phi|psi>| over the test pairs."""
    worst = 0.0
    for phi, psi in pairs:
        left = rho_inner(apply_operator(name, psi, p), phi, p.tau)
        right = rho_inner(psi, apply_operator(name, phi, p), p.tau)
        worst = max(worst, abs(left - right))
    return {"operator": name, "max_defect": worst, "pairs": len(pairs)}


class _YTimes:
    """y * psi, with the derivatives the sector operators need."""

    def __init__(self, psi):
        self.psi = psi

    def __call__(self, y):
        return y * self.psi(y)

    def derivative(self, y):
        return self.psi(y) + y * self.psi.derivative(y)

    def second_derivative(self, y):
        return 2 * self.psi.derivative(y) + y * self.psi.second_derivative(y)


def robertson_lower_bound(psi, p) -> float:
    """(1/2) |<[Y, P_y]>_rho| evaluated entirely by quadrature.

    No closed form is substituted for the commutator: both operator orders
    are applied to the state and integrated.
    """
    tau = p.tau
    norm = rho_inner(psi, psi, tau).real
    py_psi = apply_operator("Py", psi, p)
    py_y_psi = apply_operator("Py", _YTimes(psi), p)
    commutator = rho_inner(
        lambda y: y * py_psi(y) - py_y_psi(y), psi, tau
    ) / norm
    return 0.5 * abs(commutator)


# -- closed-form bounds -------------------------------------------------------


def min_delta_x(p, y_mean: float) -> float:
    """Smallest resolvable x-uncertainty at the given <Y>."""
    if p.tau < 0:
        raise ValueError("tau must be nonnegative")
    return p.theta * math.sqrt(p.tau) * math.sqrt(1 + p.tau * y_mean**2)


def min_delta_py(p, y_mean: float) -> float:
    """Smallest resolvable y-momentum uncertainty at the given <Y>."""
    if p.tau < 0:
        raise ValueError("tau must be nonnegative")
    return p.hbar * math.sqrt(p.tau) * math.sqrt(1 + p.tau * y_mean**2)


def delta_y_solutions(delta_py: float, p, y_mean: float):
    """The two Delta-Y roots of the saturated uncertainty relation."""
    hbar, tau = p.hbar, p.tau
    if tau <= 0:
        raise ValueError("tau must be positive for the root formula")
    discriminant = delta_py**2 - hbar**2 * tau * (1 + tau * y_mean**2)
    if discriminant < 0:
        raise ValueError(
            "delta_py below the minimal momentum: complex discriminant"
        )
    root = math.sqrt(discriminant) / (hbar * tau)
    base = delta_py / (hbar * tau)
    return (base - root, base + root)


def squeezing_bound(p, y_mean: float) -> float:
    """Upper edge of the squeezed Delta-Y interval."""
    if p.hbar * p.tau >= 2:
        raise ValueError("hbar * tau must be below 2")
    return math.sqrt(p.hbar * (1 + p.tau * y_mean**2) / (2 - p.hbar * p.tau))


# -- brute-force confirmation -------------------------------------------------


@dataclass
class StateScan:
    sigma: float
    kick: float
    y_mean: float
    delta_y: float
    py_mean: float
    delta_py: float
    bound_gap: float  # Delta Y * Delta Py - (hbar/2)(1 + tau <Y^2>), >= 0


def scan_state(psi: Gaussian, p) -> StateScan:
    y_mean = expectation("Y", psi, p)
    y2 = expectation("Y2", psi, p)
    py_mean = expectation("Py", psi, p)
    py2 = expectation("Py2", psi, p)
    delta_y = math.sqrt(max(y2 - y_mean**2, 0.0))
    delta_py = math.sqrt(max(py2 - py_mean**2, 0.0))
    bound = 0.5 * p.hbar * (1 + p.tau * y2)
    return StateScan(
        sigma=psi.sigma,
        kick=psi.kick,
        y_mean=y_mean,
        delta_y=delta_y,
        py_mean=py_mean,
        delta_py=delta_py,
        bound_gap=delta_y * delta_py - bound,
    )


def brute_force_min_product(
    p,
    sigmas: Sequence[float],
    kicks: Sequence[float] = (0.0,),
    center: float = 0.0,
) -> dict:
    """Scan the Gaussian family for bound violations and the momentum floor.

    Asserts nothing itself: reports the worst (most negative) gap between
    Delta Y * Delta Py and the state-dependent lower bound, and the smallest
    normalized momentum spread  Delta Py / sqrt(1 + tau <Y>^2)  found, whose
    theoretical floor is hbar sqrt(tau).
    """
    scans = [
        scan_state(Gaussian(center=center, sigma=s, kick=k), p)
        for s in sigmas
        for k in kicks
    ]
    worst_gap = min(scan.bound_gap for scan in scans)
    best = min(
        scans, key=lambda s: s.delta_py / math.sqrt(1 + p.tau * s.y_mean**2)
    )
    min_normalized = best.delta_py / math.sqrt(1 + p.tau * best.y_mean**2)
    floor = p.hbar * math.sqrt(p.tau)
    return {
        "states": len(scans),
        "worst_bound_gap": worst_gap,
        "min_delta_py": best.delta_py,
        "min_delta_py_normalized": min_normalized,
        "momentum_floor": floor,
        "floor_ratio": (min_normalized / floor) if floor > 0 else float("inf"),
        "argmin": {"sigma": best.sigma, "kick": best.kick, "y_mean": best.y_mean},
    }


def uncertainty_report(p, y_mean: float, brute_force: dict | None = None) -> dict:
    """JSON-ready report of the closed-form bounds at one <Y>."""
    report = {
        "hbar": p.hbar,
        "theta": p.theta,
        "tau": p.tau,
        "y_mean": y_mean,
        "delta_x_min": min_delta_x(p, y_mean),
        "delta_py_min": min_delta_py(p, y_mean),
        "squeezing_bound": squeezing_bound(p, y_mean),
    }
    if brute_force is not None:
        report["brute_force"] = brute_force
    return report
