"""Symbolic oscillator Hamiltonians in the deformed phase space.

``build_hamiltonian`` expands the isotropic oscillator written in the
capital-letter operators, pushes it through the Bopp shift to canonical
variables, normal-orders, and truncates.  Under the default policy the
result coincides, coefficient by coefficient, with the three named pieces:

* ``h_core``       (pi1^2 + pi2^2)/2m + m omega^2 (q1^2 + q2^2)/2
* ``h_theta_eta``  (eta/2m hbar + m omega^2 theta/2 hbar)(q2 pi1 - q1 pi2)
* ``h_tau``        tau (m omega^2 q2^2 q1^2 - (i hbar/m) q2 pi2
                        + (1/m) q2^2 pi2^2)
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (
    CANONICAL,
    DEFAULT_POLICY,
    Expression,
    Scalar,
    TruncationPolicy,
    normal_order,
    powers_of,
    truncate,
)
from .maps import BOPP, SubstitutionMap, named_operator, substitute
from .rationals import GaussianRational


def _scalar(value, **exponents: int) -> Scalar:
    if isinstance(value, tuple):
        value = GaussianRational(*value)
    else:
        value = GaussianRational(value)
    return Scalar(value, powers_of(**exponents))


def h_core() -> Expression:
    """The undeformed isotropic oscillator."""
    q1, q2 = Expression.generator("q1"), Expression.generator("q2")
    pi1, pi2 = Expression.generator("pi1"), Expression.generator("pi2")
    kinetic = (pi1 * pi1 + pi2 * pi2) * _scalar(Fraction(1, 2), m=-1)
    potential = (q1 * q1 + q2 * q2) * _scalar(Fraction(1, 2), m=1, omega=2)
    return kinetic + potential


def h_theta_eta() -> Expression:
    """The angular-momentum coupling induced by the flat deformations."""
    q1, q2 = Expression.generator("q1"), Expression.generator("q2")
    pi1, pi2 = Expression.generator("pi1"), Expression.generator("pi2")
    angular = q2 * pi1 - q1 * pi2
    coefficient = Expression.from_scalar(
        _scalar(Fraction(1, 2), eta=1, m=-1, hbar=-1)
    ) + Expression.from_scalar(_scalar(Fraction(1, 2), m=1, omega=2, theta=1, hbar=-1))
    return coefficient * angular


def h_tau() -> Expression:
    """The first-order position-dependent (non-Hermitian) correction."""
    q1, q2 = Expression.generator("q1"), Expression.generator("q2")
    pi2 = Expression.generator("pi2")
    quartic = (q2 * q2 * q1 * q1) * _scalar(1, tau=1, m=1, omega=2)
    linear = (q2 * pi2) * _scalar((0, -1), tau=1, hbar=1, m=-1)
    squared = (q2 * q2 * pi2 * pi2) * _scalar(1, tau=1, m=-1)
    return quartic + linear + squared


def build_hamiltonian(
    policy: TruncationPolicy = DEFAULT_POLICY,
    bopp: SubstitutionMap = BOPP,
) -> Expression:
    """(Px^2 + Py^2)/2m + m omega^2 (X^2 + Y^2)/2, reduced and truncated.

    The capitals expand to their noncommutative images, the Bopp shift maps
    the result to canonical variables, and the outcome is normal-ordered and
    truncated under ``policy``.  The ``bopp`` map is injectable so fault
    drills can exercise a wrong-sign convention.
    """
    X, Y = named_operator("X"), named_operator("Y")
    Px, Py = named_operator("Px"), named_operator("Py")
    kinetic = (Px * Px + Py * Py) * _scalar(Fraction(1, 2), m=-1)
    potential = (X * X + Y * Y) * _scalar(Fraction(1, 2), m=1, omega=2)
    canonical = substitute(kinetic + potential, bopp)
    return truncate(canonical, policy)


def reference_hamiltonian() -> Expression:
    """The normal-ordered sum of the three named pieces."""
    return normal_order(h_core() + h_theta_eta() + h_tau(), CANONICAL)
