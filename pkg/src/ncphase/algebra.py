"""Exact symbolic algebra over noncommuting generators with scalar commutators.

Expressions are finite sums of ordered generator words, each weighted by a
Gaussian-rational coefficient times a monomial in the physical parameters
(hbar, m, omega, theta, eta, tau).  All arithmetic is exact; equality of
normal-ordered expressions is literal equality of their term maps.

Two generator alphabets exist and never mix inside a word:

* ``canonical``:       q1 < q2 < pi1 < pi2   with [q_i, pi_i] = i*hbar
* ``noncommutative``:  x < y < px < py       with the deformed flat table
  [x, y] = i*theta, [x, px] = [y, py] = i*hbar, [px, py] = i*eta,
  [x, py] = [y, px] = 0

Normal ordering rewrites every word to nondecreasing generator rank using
the rule  g_i g_j -> g_j g_i + [g_i, g_j]  (rank g_i > rank g_j), which
terminates because all commutators are central.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .rationals import GR_I, GR_ONE, GaussianRational

# Parameter alphabet; the exponent vector of every Scalar follows this order.
PARAMS = ("hbar", "m", "omega", "theta", "eta", "tau")
_PARAM_INDEX = {name: k for k, name in enumerate(PARAMS)}
# Deformation parameters may not appear with negative exponents.
_NONNEGATIVE = ("theta", "eta", "tau")

ZERO_POWERS = (0, 0, 0, 0, 0, 0)

Word = tuple  # tuple[str, ...]
Powers = tuple  # tuple[int, int, int, int, int, int]

ALPHABETS = {
    "canonical": ("q1", "q2", "pi1", "pi2"),
    "noncommutative": ("x", "y", "px", "py"),
}
_GENERATOR_ALPHABET = {
    name: alpha for alpha, names in ALPHABETS.items() for name in names
}
_RANK = {
    name: rank for names in ALPHABETS.values() for rank, name in enumerate(names)
}
# Position-type generators (flip sign under parity); momenta are fixed.
POSITION_GENERATORS = frozenset({"q1", "q2", "x", "y"})


class AlgebraError(ValueError):
    """Base class for symbolic-layer usage errors."""


class MixedAlphabetError(AlgebraError):
    """Raised when an operation would mix generator alphabets."""


class MissingImageError(AlgebraError):
    """Raised by substitution when a generator has no image."""


def generator_alphabet(name: str) -> str:
    try:
        return _GENERATOR_ALPHABET[name]
    except KeyError:
        raise AlgebraError(f"unknown generator {name!r}") from None


def rank(name: str) -> int:
    return _RANK[name]


def powers_of(**exponents: int) -> Powers:
    """Build an exponent vector, e.g. ``powers_of(theta=1, hbar=-1)``."""
    vec = [0] * len(PARAMS)
    for pname, exp in exponents.items():
        if pname not in _PARAM_INDEX:
            raise AlgebraError(f"unknown parameter {pname!r}")
        vec[_PARAM_INDEX[pname]] = exp
    return tuple(vec)


def _add_powers(a: Powers, b: Powers) -> Powers:
    return tuple(x + y for x, y in zip(a, b))


def _validate_powers(powers: Powers) -> None:
    if len(powers) != len(PARAMS):
        raise AlgebraError("exponent vector must have one entry per parameter")
    for pname in _NONNEGATIVE:
        if powers[_PARAM_INDEX[pname]] < 0:
            raise AlgebraError(f"negative exponent not allowed for {pname}")


@dataclass(frozen=True)
class Scalar:
    """A Gaussian-rational coefficient times a parameter monomial."""

    value: GaussianRational
    powers: Powers = ZERO_POWERS

    def __post_init__(self):
        _validate_powers(self.powers)

    def __mul__(self, other: "Scalar") -> "Scalar":
        return Scalar(self.value * other.value, _add_powers(self.powers, other.powers))

    def __neg__(self) -> "Scalar":
        return Scalar(-self.value, self.powers)

    def conjugate(self) -> "Scalar":
        """Complex conjugation; the parameters are real and stay fixed."""
        return Scalar(self.value.conjugate(), self.powers)

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def evaluate(self, values: Mapping[str, float]) -> complex:
        out = complex(self.value)
        for pname, exp in zip(PARAMS, self.powers):
            if exp:
                out *= values[pname] ** exp
        return out

    def __str__(self) -> str:
        return _format_term(self.value, self.powers, ())


ScalarLike = Union[int, Fraction, GaussianRational, Scalar]


def _as_scalar(value: ScalarLike) -> Scalar:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, GaussianRational):
        return Scalar(value)
    if isinstance(value, (int, Fraction)):
        return Scalar(GaussianRational(value))
    raise AlgebraError(f"cannot interpret {value!r} as a scalar")


def _unify_alphabets(a: Optional[str], b: Optional[str]) -> Optional[str]:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise MixedAlphabetError(f"cannot mix alphabets {a!r} and {b!r}")


class Expression:
    """A finite sum of generator words with exact scalar coefficients.

    ``terms`` maps (word, parameter exponent vector) to a GaussianRational.
    Zero coefficients are never stored.  Instances are treated as immutable
    values; no method mutates an existing expression.
    """

    __slots__ = ("alphabet", "terms")

    def __init__(self, alphabet: Optional[str], terms: Mapping):
        clean = {}
        for (word, powers), coef in terms.items():
            if coef.is_zero():
                continue
            _validate_powers(powers)
            for g in word:
                if generator_alphabet(g) != alphabet:
                    raise MixedAlphabetError(
                        f"generator {g!r} does not belong to alphabet {alphabet!r}"
                    )
            clean[(tuple(word), tuple(powers))] = coef
        # A purely scalar expression is alphabet-agnostic.
        if not any(word for (word, _p) in clean):
            alphabet = None
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(alphabet: Optional[str] = None) -> "Expression":
        return Expression(alphabet, {})

    @staticmethod
    def from_scalar(value: ScalarLike) -> "Expression":
        s = _as_scalar(value)
        return Expression(None, {((), s.powers): s.value})

    @staticmethod
    def generator(name: str) -> "Expression":
        return Expression(
            generator_alphabet(name), {((name,), ZERO_POWERS): GR_ONE}
        )

    @staticmethod
    def word(names: Iterable[str], coefficient: ScalarLike = 1) -> "Expression":
        names = tuple(names)
        s = _as_scalar(coefficient)
        alpha = None
        for g in names:
            alpha = _unify_alphabets(alpha, generator_alphabet(g))
        return Expression(alpha, {(names, s.powers): s.value})

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def scalar_terms(self) -> list:
        """The (powers, coefficient) pairs of the identity-word part."""
        return [(p, c) for (w, p), c in self.terms.items() if not w]

    def max_word_length(self) -> int:
        return max((len(w) for (w, _p) in self.terms), default=0)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other) -> "Expression":
        other = _as_expression(other)
        alpha = _unify_alphabets(self.alphabet, other.alphabet)
        merged = dict(self.terms)
        for key, coef in other.terms.items():
            acc = merged.get(key)
            merged[key] = coef if acc is None else acc + coef
        return Expression(alpha, merged)

    __radd__ = __add__

    def __sub__(self, other) -> "Expression":
        return self + (-_as_expression(other))

    def __rsub__(self, other) -> "Expression":
        return _as_expression(other) + (-self)

    def __neg__(self) -> "Expression":
        return Expression(
            self.alphabet, {key: -coef for key, coef in self.terms.items()}
        )

    def __mul__(self, other) -> "Expression":
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            s = _as_scalar(other)
            return Expression(
                self.alphabet,
                {
                    (w, _add_powers(p, s.powers)): coef * s.value
                    for (w, p), coef in self.terms.items()
                },
            )
        other = _as_expression(other)
        alpha = _unify_alphabets(self.alphabet, other.alphabet)
        out: dict = {}
        for (wa, pa), ca in self.terms.items():
            for (wb, pb), cb in other.terms.items():
                key = (wa + wb, _add_powers(pa, pb))
                coef = ca * cb
                acc = out.get(key)
                out[key] = coef if acc is None else acc + coef
        return Expression(alpha, out)

    def __rmul__(self, other) -> "Expression":
        if isinstance(other, (int, Fraction, GaussianRational, Scalar)):
            return self.__mul__(other)
        return _as_expression(other).__mul__(self)

    def __pow__(self, n: int) -> "Expression":
        if not isinstance(n, int) or n < 0:
            raise AlgebraError("expression powers must be nonnegative integers")
        out = Expression.from_scalar(1)
        for _ in range(n):
            out = out * self
        return out

    # -- equality and display --------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expression):
            return NotImplemented
        # Construction normalizes pure-scalar expressions to alphabet None,
        # so term-map plus alphabet equality is canonical.
        return self.terms == other.terms and (
            not self.terms or self.alphabet == other.alphabet
        )

    def sorted_terms(self) -> list:
        """Terms in the canonical order: by word, then by parameter monomial."""

        def key(item):
            (word, powers), _coef = item
            return (len(word), tuple(_RANK[g] for g in word), powers)

        return sorted(self.terms.items(), key=key)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            _format_term(coef, powers, word)
            for (word, powers), coef in self.sorted_terms()
        )

    __repr__ = __str__


def _as_expression(value) -> Expression:
    if isinstance(value, Expression):
        return value
    if isinstance(value, (int, Fraction, GaussianRational, Scalar)):
        return Expression.from_scalar(value)
    raise AlgebraError(f"cannot interpret {value!r} as an expression")


def _format_term(coef: GaussianRational, powers: Powers, word: Word) -> str:
    parts = [str(coef)]
    for pname, exp in zip(PARAMS, powers):
        if exp == 1:
            parts.append(pname)
        elif exp:
            parts.append(f"{pname}^{exp}")
    parts.extend(word)
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Commutator tables
# ---------------------------------------------------------------------------


class AlgebraTable:
    """Central commutator lookup for one alphabet.

    Entries are stored for pairs with rank(g_i) > rank(g_j) only; the
    antisymmetric partner and all unlisted pairs follow automatically.
    Every entry is a pure-scalar Expression, which is what guarantees that
    normal ordering terminates.
    """

    def __init__(self, name: str, entries: Mapping):
        if name not in ALPHABETS:
            raise AlgebraError(f"unknown alphabet {name!r}")
        self.name = name
        self.alphabet = ALPHABETS[name]
        checked = {}
        for (hi, lo), expr in entries.items():
            if rank(hi) <= rank(lo):
                raise AlgebraError("table keys must satisfy rank(g_i) > rank(g_j)")
            if expr.max_word_length() != 0:
                raise AlgebraError("commutators must be central (scalar-valued)")
            checked[(hi, lo)] = expr
        self.entries = checked

    def commutator_of(self, a: str, b: str) -> Expression:
        """The scalar Expression [a, b]."""
        if a == b:
            return Expression.zero()
        if rank(a) > rank(b):
            return self.entries.get((a, b), Expression.zero())
        entry = self.entries.get((b, a))
        return Expression.zero() if entry is None else -entry

    def relation_pairs(self) -> list:
        """All generator pairs (a, b) with rank(a) < rank(b), in rank order."""
        names = self.alphabet
        return [
            (names[i], names[j])
            for i in range(len(names))
            for j in range(i + 1, len(names))
        ]


def _i_times(**exponents: int) -> Expression:
    return Expression.from_scalar(Scalar(GR_I, powers_of(**exponents)))


CANONICAL = AlgebraTable(
    "canonical",
    {
        ("pi1", "q1"): -_i_times(hbar=1),
        ("pi2", "q2"): -_i_times(hbar=1),
    },
)

NONCOMMUTATIVE = AlgebraTable(
    "noncommutative",
    {
        ("y", "x"): -_i_times(theta=1),
        ("px", "x"): -_i_times(hbar=1),
        ("py", "y"): -_i_times(hbar=1),
        ("py", "px"): -_i_times(eta=1),
    },
)

TABLES = {"canonical": CANONICAL, "noncommutative": NONCOMMUTATIVE}


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def multiply(a: Expression, b: Expression) -> Expression:
    """Distributive word concatenation; no reordering is performed."""
    return a * b


def normal_order(e: Expression, table: AlgebraTable) -> Expression:
    """Rewrite every word to nondecreasing generator rank.

    Fixed point of g_i g_j -> g_j g_i + [g_i, g_j] for rank(g_i) > rank(g_j).
    Total on valid input: each swap removes an inversion and each commutator
    branch shortens the word.
    """
    if e.alphabet is not None and e.alphabet != table.name:
        raise MixedAlphabetError(
            f"expression over {e.alphabet!r} cannot be ordered by the "
            f"{table.name!r} table"
        )
    out: dict = {}
    stack = list(e.terms.items())
    while stack:
        (word, powers), coef = stack.pop()
        swap = None
        for i in range(len(word) - 1):
            if rank(word[i]) > rank(word[i + 1]):
                swap = i
                break
        if swap is None:
            acc = out.get((word, powers))
            total = coef if acc is None else acc + coef
            if total.is_zero():
                out.pop((word, powers), None)
            else:
                out[(word, powers)] = total
            continue
        a, b = word[swap], word[swap + 1]
        stack.append(((word[:swap] + (b, a) + word[swap + 2 :], powers), coef))
        comm = table.commutator_of(a, b)
        if not comm.is_zero():
            rest = word[:swap] + word[swap + 2 :]
            for (w2, p2), c2 in comm.terms.items():
                stack.append(((rest + w2, _add_powers(powers, p2)), coef * c2))
    return Expression(e.alphabet, out)


def commutator(a: Expression, b: Expression, table: AlgebraTable) -> Expression:
    """normal_order(a*b - b*a)."""
    return normal_order(a * b - b * a, table)


def jacobi(a: Expression, b: Expression, c: Expression, table: AlgebraTable) -> Expression:
    """[a,[b,c]] + [b,[c,a]] + [c,[a,b]], normal ordered."""
    return (
        commutator(a, commutator(b, c, table), table)
        + commutator(b, commutator(c, a, table), table)
        + commutator(c, commutator(a, b, table), table)
    )


def formal_adjoint(e: Expression) -> Expression:
    """Reverse each word and conjugate each coefficient.

    All lowercase generators are self-adjoint and the parameters are real,
    so the formal dagger needs no further data.
    """
    return Expression(
        e.alphabet,
        {
            (tuple(reversed(word)), powers): coef.conjugate()
            for (word, powers), coef in e.terms.items()
        },
    )


# ---------------------------------------------------------------------------
# Truncation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncationPolicy:
    """Per-parameter exponent caps plus forbidden cross-monomial patterns.

    A term is dropped when some exponent exceeds its cap, or when its
    exponent vector dominates one of the forbidden patterns componentwise.
    Patterns and caps are given over parameter names.
    """

    caps: Mapping[str, int]
    forbidden: tuple  # tuple of exponent-vector patterns

    @staticmethod
    def of(caps: Optional[Mapping[str, int]] = None,
           forbidden: Iterable[Mapping[str, int]] = ()) -> "TruncationPolicy":
        patterns = tuple(powers_of(**pattern) for pattern in forbidden)
        return TruncationPolicy(dict(caps or {}), patterns)

    def keeps(self, powers: Powers) -> bool:
        for pname, cap in self.caps.items():
            if powers[_PARAM_INDEX[pname]] > cap:
                return False
        for pattern in self.forbidden:
            if all(p >= q for p, q in zip(powers, pattern) if q > 0):
                return False
        return True


# First order in each deformation parameter, no cross terms: the truncation
# that keeps exactly the undeformed part plus the three linear corrections.
DEFAULT_POLICY = TruncationPolicy.of(
    forbidden=[
        {"theta": 1, "eta": 1},
        {"tau": 1, "theta": 1},
        {"tau": 1, "eta": 1},
        {"tau": 2},
        {"eta": 2},
        {"theta": 2},
    ]
)

# Keeps theta, eta, tau up to first power each but allows their products.
FIRST_ORDER_CROSS_POLICY = TruncationPolicy.of(caps={"theta": 1, "eta": 1, "tau": 1})

# Kills every deformation parameter: the undeformed oscillator survives.
UNDEFORMED_POLICY = TruncationPolicy.of(caps={"theta": 0, "eta": 0, "tau": 0})


def truncate(e: Expression, policy: TruncationPolicy) -> Expression:
    return Expression(
        e.alphabet,
        {
            (word, powers): coef
            for (word, powers), coef in e.terms.items()
            if policy.keeps(powers)
        },
    )
