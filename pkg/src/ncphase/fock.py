"""Truncated two-mode Fock-space realization and spectra.

The basis is the helicity basis |n+, n-> with graded cutoff n+ + n- <= N,
enumerated in graded lexicographic order (by grade, then by n+); that
enumeration order is part of the wire format.  Dimension is
(N+1)(N+2)/2.

Truncation locality: a polynomial of total degree d in (q, pi) has exact
matrix elements between states with n+ + n- <= N - d, because no
intermediate state of the word product can cross the cutoff.  All interior
assertions rely on that margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .algebra import Expression, MixedAlphabetError
from .hamiltonian import h_core, h_tau, h_theta_eta


class NumericError(RuntimeError):
    """Numeric-layer failure (eigensolver breakdown, bad residuals)."""


@dataclass(frozen=True)
class ParameterPoint:
    """Numeric values of the physical parameters.

    hbar, m, omega must be positive; the deformation parameters theta, eta,
    tau are meant to be small.  Derived quantities are recomputed on access,
    never stored.
    """

    hbar: float = 1.0
    m: float = 1.0
    omega: float = 1.0
    theta: float = 0.0
    eta: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        for name in ("hbar", "m", "omega"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def kappa(self) -> float:
        return math.sqrt(
            1 + self.m**2 * self.omega**2 * self.theta**2 / (4 * self.hbar**2)
        )

    @property
    def omega_r(self) -> float:
        return self.omega * math.sqrt(
            1 + self.eta**2 / (4 * self.m**2 * self.omega**2 * self.hbar**2)
        )

    @property
    def m_r(self) -> float:
        # Taken verbatim from the source coefficient table; its dimensional
        # status is dubious but nothing downstream consumes it.
        return 1.0 / (1.0 / self.m + self.m * self.omega**2 * self.theta**2 / (2 * self.hbar))

    def values(self) -> dict:
        return {
            "hbar": self.hbar,
            "m": self.m,
            "omega": self.omega,
            "theta": self.theta,
            "eta": self.eta,
            "tau": self.tau,
        }


class FockBasis:
    """All |n+, n-> with n+ + n- <= cutoff, in graded-lex order."""

    def __init__(self, cutoff: int):
        if cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        self.cutoff = cutoff
        self.states = [
            (n_plus, grade - n_plus)
            for grade in range(cutoff + 1)
            for n_plus in range(grade + 1)
        ]
        self.index = {state: k for k, state in enumerate(self.states)}
        self.grades = np.array([a + b for a, b in self.states])

    @property
    def dimension(self) -> int:
        return len(self.states)

    def interior(self, margin: int) -> np.ndarray:
        """Boolean mask of states with grade <= cutoff - margin."""
        return self.grades <= self.cutoff - margin


def build_ladder(basis: FockBasis):
    """The four helicity ladder matrices (A+, A-, A+dag, A-dag).

    A+|n+, n-> = sqrt(n+) |n+-1, n->  and its three partners; the daggered
    matrices are exactly the conjugate transposes of the undaggered ones.
    """
    d = basis.dimension
    a_plus = np.zeros((d, d), dtype=complex)
    a_minus = np.zeros((d, d), dtype=complex)
    for (n_plus, n_minus), col in basis.index.items():
        if n_plus >= 1:
            a_plus[basis.index[(n_plus - 1, n_minus)], col] = math.sqrt(n_plus)
        if n_minus >= 1:
            a_minus[basis.index[(n_plus, n_minus - 1)], col] = math.sqrt(n_minus)
    return a_plus, a_minus, a_plus.conj().T, a_minus.conj().T


def build_phase_space(basis: FockBasis, p: ParameterPoint):
    """Canonical phase-space matrices (q1, q2, pi1, pi2) over the basis."""
    a_plus, a_minus, a_plus_dag, a_minus_dag = build_ladder(basis)
    q1 = math.sqrt(p.hbar / (4 * p.m * p.omega)) * (
        a_plus + a_minus + a_plus_dag + a_minus_dag
    )
    q2 = (1 / 2j) * math.sqrt(p.hbar / (p.m * p.omega)) * (
        a_plus - a_minus - a_plus_dag + a_minus_dag
    )
    pi1 = (math.sqrt(p.hbar * p.m * p.omega) / 2j) * (
        a_plus + a_minus - a_plus_dag - a_minus_dag
    )
    pi2 = -(math.sqrt(p.hbar * p.m * p.omega) / 2) * (
        a_plus - a_minus + a_plus_dag - a_minus_dag
    )
    return q1, q2, pi1, pi2


def evaluate(e: Expression, basis: FockBasis, p: ParameterPoint) -> np.ndarray:
    """Realize a canonical-alphabet Expression as a dense matrix.

    Each word becomes the corresponding matrix product; scalars are
    evaluated at the parameter point.  Noncommutative-alphabet input is
    rejected: push it through the Bopp shift first.
    """
    if e.alphabet == "noncommutative":
        raise MixedAlphabetError(
            "cannot evaluate a noncommutative-alphabet expression; "
            "substitute through the Bopp shift first"
        )
    mats = dict(zip(("q1", "q2", "pi1", "pi2"), build_phase_space(basis, p)))
    values = p.values()
    d = basis.dimension
    out = np.zeros((d, d), dtype=complex)
    identity = np.eye(d, dtype=complex)
    products: dict = {(): identity}
    for (word, powers), coef in e.sorted_terms():
        prod = products.get(word)
        if prod is None:
            prod = products[word[:-1]] if word[:-1] in products else None
            if prod is None:
                prod = identity
                for g in word[:-1]:
                    prod = prod @ mats[g]
            prod = prod @ mats[word[-1]]
            products[word] = prod
        scalar = complex(coef)
        for name, exp in zip(("hbar", "m", "omega", "theta", "eta", "tau"), powers):
            if exp:
                scalar *= values[name] ** exp
        out += scalar * prod
    return out


def analytic_energy(n_plus: int, n_minus: int, p: ParameterPoint) -> float:
    """Closed-form level energy: oscillator + angular splitting + tau shift."""
    core = p.hbar * p.omega * (n_plus + n_minus + 1)
    angular = (
        p.hbar
        * (p.eta / (2 * p.m) + p.m * p.omega**2 * p.theta / 2)
        * (n_plus - n_minus)
    )
    tau_shift = (p.tau * p.hbar**2 / (2 * p.m)) * (
        2 * n_plus * n_minus + n_plus + n_minus + 2
    )
    return core + angular + tau_shift


@dataclass
class EigenPair:
    value: complex
    vector: np.ndarray
    residual: float


def diagonalize(h: np.ndarray, residual_factor: float = 1e-8) -> list:
    """Dense non-symmetric eigensolve, sorted by real part.

    Every returned pair satisfies ||H v - lambda v|| <= residual_factor
    times ||H||; a violation (or LAPACK non-convergence) raises
    NumericError.
    """
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    try:
        values, vectors = scipy.linalg.eig(h)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericError(f"eigensolver did not converge: {exc}") from exc
    norm = np.linalg.norm(h)
    pairs = []
    for k in range(len(values)):
        v = vectors[:, k]
        v = v / np.linalg.norm(v)
        residual = float(np.linalg.norm(h @ v - values[k] * v))
        if residual > residual_factor * max(norm, 1.0):
            raise NumericError(
                f"eigenpair residual {residual:.3e} exceeds "
                f"{residual_factor:.1e} * ||H||"
            )
        pairs.append(EigenPair(complex(values[k]), v, residual))
    pairs.sort(key=lambda pair: (pair.value.real, pair.value.imag))
    return pairs


@dataclass
class LevelRow:
    n_plus: int
    n_minus: int
    e_analytic: float
    e_numeric: complex
    residual: float
    overlap: float


@dataclass
class LevelTable:
    """Classified levels plus the eigenpairs no basis label could claim."""

    rows: list
    unclassified: list = field(default_factory=list)

    def row(self, n_plus: int, n_minus: int) -> Optional[LevelRow]:
        for row in self.rows:
            if (row.n_plus, row.n_minus) == (n_plus, n_minus):
                return row
        return None


# Eigenvectors whose best basis overlap is below this are truncation junk.
OVERLAP_FLOOR = 0.5


def classify(pairs: Sequence[EigenPair], basis: FockBasis, p: ParameterPoint) -> LevelTable:
    """Assign each eigenpair to the basis label of maximal overlap.

    Assignment is greedy by descending overlap so that each label is claimed
    at most once; argmax ties resolve to the lower (grade, n+) label because
    that is the basis enumeration order.  Pairs with best overlap below
    OVERLAP_FLOOR are reported as unclassified.
    """
    claims = []
    for pair in pairs:
        weights = np.abs(pair.vector) ** 2
        best = int(np.argmax(weights))
        claims.append((float(weights[best]), best, pair))
    claims.sort(key=lambda item: -item[0])
    taken = set()
    rows, unclassified = [], []
    for overlap, best, pair in claims:
        if overlap < OVERLAP_FLOOR or best in taken:
            unclassified.append(pair)
            continue
        taken.add(best)
        n_plus, n_minus = basis.states[best]
        rows.append(
            LevelRow(
                n_plus=n_plus,
                n_minus=n_minus,
                e_analytic=analytic_energy(n_plus, n_minus, p),
                e_numeric=pair.value,
                residual=pair.residual,
                overlap=overlap,
            )
        )
    rows.sort(key=lambda row: (row.n_plus + row.n_minus, row.n_plus))
    return LevelTable(rows=rows, unclassified=unclassified)


def spectrum(p: ParameterPoint, cutoff: int, hamiltonian: Expression) -> LevelTable:
    """Evaluate, diagonalize and classify in one step."""
    basis = FockBasis(cutoff)
    matrix = evaluate(hamiltonian, basis, p)
    return classify(diagonalize(matrix), basis, p)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


LEVEL_COLUMNS = (
    "n_plus",
    "n_minus",
    "E_analytic",
    "E_numeric_re",
    "E_numeric_im",
    "abs_err",
    "residual",
    "overlap",
)


def level_table_csv(table: LevelTable) -> str:
    lines = [",".join(LEVEL_COLUMNS)]
    for row in table.rows:
        lines.append(
            ",".join(
                [
                    str(row.n_plus),
                    str(row.n_minus),
                    _fmt(row.e_analytic),
                    _fmt(row.e_numeric.real),
                    _fmt(row.e_numeric.imag),
                    _fmt(abs(row.e_numeric - row.e_analytic)),
                    _fmt(row.residual),
                    _fmt(row.overlap),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def level_table_json(table: LevelTable) -> list:
    return [
        {
            "n_plus": row.n_plus,
            "n_minus": row.n_minus,
            "E_analytic": float(_fmt(row.e_analytic)),
            "E_numeric_re": float(_fmt(row.e_numeric.real)),
            "E_numeric_im": float(_fmt(row.e_numeric.imag)),
            "abs_err": float(_fmt(abs(row.e_numeric - row.e_analytic))),
            "residual": float(_fmt(row.residual)),
            "overlap": float(_fmt(row.overlap)),
        }
        for row in table.rows
    ]


# ---------------------------------------------------------------------------
# Reference-identity reports
# ---------------------------------------------------------------------------

DIAGONAL_TOLERANCE = 1e-10


def diagonal_check(basis: FockBasis, p: ParameterPoint) -> dict:
    """Measure the three tau-sector diagonal identities on interior states.

    Each identity compares the measured diagonal of one term of the
    first-order correction (with the tau prefactor divided out) against its
    bundled closed form, on states with grade <= cutoff - 4 where degree-4
    products are truncation-exact.  The fourth row checks that the three
    diagonals sum to the closed-form level shift.
    """
    q1, q2, pi1, pi2 = build_phase_space(basis, p)
    hbar, m, omega = p.hbar, p.m, p.omega
    quartic = m * omega**2 * (q2 @ q2 @ q1 @ q1)
    linear = -(1j * hbar / m) * (q2 @ pi2)
    squared = (1 / m) * (q2 @ q2 @ pi2 @ pi2)
    interior = basis.interior(4)
    states = [s for s, keep in zip(basis.states, interior) if keep]
    idx = np.flatnonzero(interior)

    def closed_form_quartic(n_plus, n_minus):
        return (hbar**2 / (4 * m)) * (
            2 * n_plus * n_minus + n_plus + n_minus + 1.5
        )

    def closed_form_linear(n_plus, n_minus):
        return hbar**2 / (2 * m)

    def closed_form_squared(n_plus, n_minus):
        return (hbar**2 / (4 * m)) * (
            2 * n_plus * n_minus + n_plus + n_minus + 0.5
        )

    def closed_form_sum(n_plus, n_minus):
        return (hbar**2 / (2 * m)) * (2 * n_plus * n_minus + n_plus + n_minus + 2)

    checks = [
        ("diag(m omega^2 q2^2 q1^2)", np.diag(quartic), closed_form_quartic),
        ("diag(-(i hbar/m) q2 pi2)", np.diag(linear), closed_form_linear),
        ("diag((1/m) q2^2 pi2^2)", np.diag(squared), closed_form_squared),
        (
            "diag sum vs closed-form level shift",
            np.diag(quartic + linear + squared),
            closed_form_sum,
        ),
    ]
    rows = []
    for name, diag, formula in checks:
        worst = 0.0
        worst_state = None
        for state, k in zip(states, idx):
            expected = formula(*state)
            err = abs(diag[k] - expected) / max(abs(expected), 1e-300)
            if err > worst:
                worst, worst_state = err, state
        rows.append(
            {
                "identity": name,
                "max_rel_err": worst,
                "worst_state": worst_state,
                "tolerance": DIAGONAL_TOLERANCE,
                "pass": worst <= DIAGONAL_TOLERANCE,
            }
        )
    return {"cutoff": basis.cutoff, "interior_margin": 4, "identities": rows}


COMMUTING_TOLERANCE = 1e-8


def commuting_check(basis: FockBasis, p: ParameterPoint) -> dict:
    """Interior Frobenius norms of the pairwise piece commutators.

    The core/angular commutator vanishes identically; the tau/angular pair
    is claimed to vanish by the source material but does not (the measured
    relative norm is reported); the core/tau pair carries no claim and is
    recorded as observed.
    """
    pieces = {
        "h_core": (evaluate(h_core(), basis, p), 2),
        "h_theta_eta": (evaluate(h_theta_eta(), basis, p), 2),
        "h_tau": (evaluate(h_tau(), basis, p), 4),
    }
    combos = [
        ("h_core", "h_theta_eta", True),
        ("h_tau", "h_theta_eta", True),
        ("h_core", "h_tau", False),
    ]
    rows = []
    for left, right, claimed_zero in combos:
        a, deg_a = pieces[left]
        b, deg_b = pieces[right]
        margin = deg_a + deg_b
        keep = basis.interior(margin)
        comm = (a @ b - b @ a)[np.ix_(keep, keep)]
        norm_a = np.linalg.norm(a[np.ix_(keep, keep)])
        norm_b = np.linalg.norm(b[np.ix_(keep, keep)])
        scale = max(norm_a * norm_b, 1e-300)
        relative = float(np.linalg.norm(comm) / scale)
        rows.append(
            {
                "pair": f"[{left}, {right}]",
                "interior_margin": margin,
                "relative_norm": relative,
                "claimed_zero": claimed_zero,
                "pass": (relative <= COMMUTING_TOLERANCE) if claimed_zero else None,
            }
        )
    return {"cutoff": basis.cutoff, "pairs": rows}
