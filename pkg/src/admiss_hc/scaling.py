"""Symmetric scaling functions g(a, b) and their admissibility checks.

Scalings are coefficient bundles rather than closures, so canonical-form
detection and the exact identities below are decidable. Three polynomial
families are supported:

* ``PolyScaling``: any symmetric polynomial of degree <= 3,
  ``l1 (a+b)^3 + l2 (a+b)ab + m1 (a+b)^2 + m2 ab + nu (a+b)``;
* ``SumScaling``: the family that makes sum-type objectives constant on
  uniform similarities, ``lam((a+b)^3-(a+b)ab) + mu(2(a+b)^2-ab) + nu(a+b)``;
* ``MaxScaling``: ``lam * a * b``.

``TableScaling`` holds explicit values on ``[1, N]^2`` for arbitrary g.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Union

from .core import Rational, fraction_str, to_fraction

DEFAULT_BOUND = 50


@dataclass(frozen=True)
class PolyScaling:
    lambda1: Fraction = Fraction(0)
    lambda2: Fraction = Fraction(0)
    mu1: Fraction = Fraction(0)
    mu2: Fraction = Fraction(0)
    nu: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "mu1", "mu2", "nu"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))

    def __call__(self, a: int, b: int) -> Fraction:
        s, p = a + b, a * b
        return self.lambda1 * s**3 + self.lambda2 * s * p + self.mu1 * s**2 + self.mu2 * p + self.nu * s

    def to_poly(self) -> "PolyScaling":
        return self

    @property
    def degree(self) -> int:
        if self.lambda1 or self.lambda2:
            return 3
        if self.mu1 or self.mu2:
            return 2
        return 1 if self.nu else 0


@dataclass(frozen=True)
class SumScaling:
    lam: Fraction = Fraction(0)
    mu: Fraction = Fraction(0)
    nu: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("lam", "mu", "nu"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))

    @classmethod
    def degree2(cls, lam: Rational, mu: Rational) -> "SumScaling":
        """The quadratic family ``lam(2(a+b)^2 - ab) + mu(a+b)``."""
        return cls(0, lam, mu)

    @classmethod
    def dasgupta(cls) -> "SumScaling":
        return cls(0, 0, 1)

    def __call__(self, a: int, b: int) -> Fraction:
        s, p = a + b, a * b
        return self.lam * (s**3 - s * p) + self.mu * (2 * s * s - p) + self.nu * s

    def to_poly(self) -> PolyScaling:
        return PolyScaling(self.lam, -self.lam, 2 * self.mu, -self.mu, self.nu)

    def satisfies_solver_condition(self) -> bool:
        """lam >= 0, mu >= 0 and lam + 2 mu + nu > 0 (needed by the charging analysis)."""
        return self.lam >= 0 and self.mu >= 0 and self.lam + 2 * self.mu + self.nu > 0


@dataclass(frozen=True)
class MaxScaling:
    lam: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "lam", to_fraction(self.lam))

    def __call__(self, a: int, b: int) -> Fraction:
        return self.lam * a * b

    def to_poly(self) -> PolyScaling:
        return PolyScaling(0, 0, 0, self.lam, 0)


@dataclass(frozen=True)
class TableScaling:
    """Explicit symmetric values ``values[a-1][b-1] = g(a, b)`` for ``1 <= a, b <= N``."""

    values: tuple = field(default=())

    def __post_init__(self):
        rows = tuple(tuple(to_fraction(v) for v in row) for row in self.values)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("table scaling must be a nonempty square table")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"table scaling is not symmetric at ({i + 1}, {j + 1})")
        object.__setattr__(self, "values", rows)

    @property
    def size(self) -> int:
        return len(self.values)

    def __call__(self, a: int, b: int) -> Fraction:
        if not (1 <= a <= self.size and 1 <= b <= self.size):
            raise ValueError(f"g({a}, {b}) is outside the table range [1, {self.size}]")
        return self.values[a - 1][b - 1]

    @classmethod
    def from_function(cls, fn, size: int) -> "TableScaling":
        return cls(tuple(tuple(fn(a, b) for b in range(1, size + 1)) for a in range(1, size + 1)))


Scaling = Union[PolyScaling, SumScaling, MaxScaling, TableScaling]


def eval_g(s: Scaling, a: int, b: int) -> Fraction:
    if a < 0 or b < 0:
        raise ValueError("g is defined on nonnegative integers")
    return s(a, b)


# Closed forms on the sum family ---------------------------------------------


def quadratic_slice(s: SumScaling, n: int, k: int) -> Fraction:
    """``g(k, n-k)`` via its form as a parabola in ``k`` centred at ``n/2``."""
    if n < 2 or not 1 <= k <= n - 1:
        raise ValueError(f"need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}")
    half = Fraction(n, 2)
    return (
        (s.lam * n + s.mu) * (k - half) ** 2
        + Fraction(3, 4) * s.lam * n**3
        + Fraction(7, 4) * s.mu * n**2
        + s.nu * n
    )


def argmin_argmax_slice(s: SumScaling, n: int) -> tuple[frozenset, frozenset]:
    """Minimising and maximising ``k`` of ``g(k, n-k)`` over ``1 <= k <= n-1``."""
    if s.lam < 0 or s.mu < 0:
        raise ValueError("slice extremes need lam >= 0 and mu >= 0")
    if n < 2:
        raise ValueError("n must be at least 2")
    if s.lam * n + s.mu == 0:
        everything = frozenset(range(1, n))
        return everything, everything
    return frozenset({n // 2, (n + 1) // 2}), frozenset({1, n - 1})


def clique_value_sum(s: SumScaling, n: int) -> Fraction:
    """Objective value of any tree on ``n`` elements with all similarities 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return s.lam / 5 * (n**5 - n) + s.mu / 2 * (n**4 - n) + s.nu / 3 * (n**3 - n)


def clique_value_max(m: MaxScaling, n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be positive")
    return m.lam * (n * n - n) / 2


def five_leaf_residues(g: Scaling) -> tuple[Fraction, Fraction]:
    """Residues of the two identities forced by constancy on 5 uniform elements.

    Both are zero iff the three 5-leaf tree shapes get the same sum-type value.
    """
    r1 = 3 * g(3, 1) + 2 * g(2, 1) - 4 * g(2, 2) - g(1, 1)
    r2 = 2 * g(4, 1) + 2 * g(2, 2) - 3 * g(3, 2) - g(2, 1)
    return r1, r2


def canonicalize(p: PolyScaling) -> Optional[SumScaling]:
    if p.lambda1 == -p.lambda2 and p.mu1 == -2 * p.mu2:
        return SumScaling(p.lambda1, -p.mu2, p.nu)
    return None


# Admissibility predicates ---------------------------------------------------


def admissible_sum_deg2(lam: Rational, mu: Rational) -> bool:
    """Exact test for ``lam(2(a+b)^2 - ab) + mu(a+b)``."""
    lam, mu = to_fraction(lam), to_fraction(mu)
    return lam >= 0 and 9 * lam + mu > 0


def admissible_sum_deg3_sufficient(lam: Rational, mu: Rational, nu: Rational) -> bool:
    """Sufficient (not necessary) condition for the cubic sum family."""
    lam, mu, nu = to_fraction(lam), to_fraction(mu), to_fraction(nu)
    return lam >= 0 and mu >= 0 and 15 * lam + 9 * mu + nu > 0


def admissible_max_deg2(lam: Rational) -> bool:
    return to_fraction(lam) > 0


def _scan_bound(g: Scaling, bound: int) -> int:
    if isinstance(g, TableScaling):
        return min(bound, g.size)
    return bound


def monotone_violation(g: Scaling, bound: int = DEFAULT_BOUND) -> Optional[tuple[int, int]]:
    """First ``(a, b)`` in ``[1, bound]^2`` with ``g(a+1, b) <= g(a, b)``, or None."""
    if bound < 1:
        raise ValueError("bound must be positive")
    amax = _scan_bound(g, bound + 1) - 1 if isinstance(g, TableScaling) else bound
    bmax = _scan_bound(g, bound)
    for a in range(1, amax + 1):
        for b in range(1, bmax + 1):
            if g(a + 1, b) <= g(a, b):
                return a, b
    return None


def superadditive_violation(g: Scaling, bound: int = DEFAULT_BOUND) -> Optional[tuple[int, int, int, int]]:
    """First ``(a, b, c, d)`` with ``a+b+c+d <= bound`` and ``g(a+c, b+d) <= g(a, b) + g(c, d)``."""
    if bound < 4:
        raise ValueError("bound must be at least 4")
    if isinstance(g, TableScaling):
        bound = min(bound, 2 * g.size)
    for a in range(1, bound - 2):
        for b in range(1, bound - a - 1):
            for c in range(1, bound - a - b):
                for d in range(1, bound - a - b - c + 1):
                    if isinstance(g, TableScaling) and max(a + c, b + d) > g.size:
                        continue
                    if g(a + c, b + d) <= g(a, b) + g(c, d):
                        return a, b, c, d
    return None


def functional_identity_violation(g: Scaling, bound: int = DEFAULT_BOUND) -> Optional[tuple[int, int, int, int]]:
    """First ``(a, b, c, d)`` in ``[1, bound]^4`` breaking
    ``g(a+b, c+d) + g(a, b) + g(c, d) == g(a+c, b+d) + g(a, c) + g(b, d)``."""
    if bound < 1:
        raise ValueError("bound must be positive")
    if isinstance(g, TableScaling):
        bound = min(bound, g.size // 2)
    for a, b, c, d in product(range(1, bound + 1), repeat=4):
        if g(a + b, c + d) + g(a, b) + g(c, d) != g(a + c, b + d) + g(a, c) + g(b, d):
            return a, b, c, d
    return None


def functional_identity_check(g: Scaling, bound: int = DEFAULT_BOUND) -> bool:
    return functional_identity_violation(g, bound) is None


def uniform_constancy_violation(g: Scaling, kind: str, n_max: int) -> Optional[tuple[int, frozenset]]:
    """Smallest ``n <= n_max`` where trees on ``n`` uniform elements disagree.

    Works for any g by tracking the set of objective values reachable for each
    cluster size; returns ``(n, values)`` on the first disagreement.
    """
    if kind not in ("sum", "max"):
        raise ValueError(f"unknown objective kind {kind!r}")
    if isinstance(g, TableScaling):
        n_max = min(n_max, g.size + 1)
    values: dict[int, frozenset] = {1: frozenset({Fraction(0)})}
    for n in range(2, n_max + 1):
        acc = set()
        for a in range(1, n // 2 + 1):
            b = n - a
            top = g(a, b) * (a * b if kind == "sum" else 1)
            for x in values[a]:
                for y in values[b]:
                    acc.add(top + x + y)
        values[n] = frozenset(acc)
        if len(acc) > 1:
            return n, values[n]
    return None


# Charging functions ---------------------------------------------------------


def _balanced(s: Scaling, r: int) -> Fraction:
    return s(r // 2, (r + 1) // 2)


def f_step(s: SumScaling, t: int) -> Fraction:
    """``g(floor((t+1)/2), ceil((t+1)/2)) - g(floor(t/2), ceil(t/2))``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return _balanced(s, t + 1) - _balanced(s, t)


def f_prime(s: SumScaling, r: int) -> Fraction:
    """Sum of ``f_step`` over ``floor(r/4) <= t < floor(r/2)``, in telescoped form."""
    if r < 2:
        raise ValueError("r must be at least 2")
    return _balanced(s, r // 2) - _balanced(s, r // 4)


def f_prime_case(s: SumScaling, t: int) -> Fraction:
    """``f_prime`` from the four closed-form polynomials in ``m`` where ``t = 4m + rem``."""
    if t < 2:
        raise ValueError("t must be at least 2")
    m, rem = divmod(t, 4)
    lam, mu, nu = s.lam, s.mu, s.nu
    q = Fraction(1, 4)
    lead = 21 * q * lam * m**3
    if m % 2 == 0 and rem in (0, 1):
        return lead + 21 * q * mu * m**2 + nu * m
    if m % 2 == 0:
        return lead + (9 * lam + 21 * q * mu) * m**2 + (5 * lam + 7 * mu + nu) * m + (lam + 2 * mu + nu)
    if rem in (0, 1):
        return lead + 21 * q * mu * m**2 + (nu - q * lam) * m - q * mu
    return lead + (9 * lam + 21 * q * mu) * m**2 + (19 * q * lam + 7 * mu + nu) * m + (lam + 7 * q * mu + nu)


@dataclass(frozen=True)
class RatioProbe:
    max_ratio: Fraction
    argmax_t: int
    last_ratio: Fraction
    t_max: int


def ratio_bound_probe(s: SumScaling, t_max: int) -> RatioProbe:
    """Scan ``g(t-1, 1) / f_prime(t)`` for ``2 <= t <= t_max``."""
    if not s.satisfies_solver_condition():
        raise ValueError("ratio probe needs lam >= 0, mu >= 0, lam + 2 mu + nu > 0")
    if t_max < 2:
        raise ValueError("t_max must be at least 2")
    best, best_t, ratio = None, 2, None
    for t in range(2, t_max + 1):
        fp = f_prime(s, t)
        if fp <= 0:
            raise ArithmeticError(f"f_prime({t}) = {fp} is not positive")
        ratio = s(t - 1, 1) / fp
        if best is None or ratio > best:
            best, best_t = ratio, t
    return RatioProbe(best, best_t, ratio, t_max)


# Serialization --------------------------------------------------------------


def scaling_from_json(obj: dict) -> Scaling:
    """Parse ``{"kind": "sum"|"max"|"poly"|"table", ...}`` with exact coefficient strings."""
    kind = obj.get("kind")

    def get(name, default="0"):
        return to_fraction(str(obj.get(name, default)))

    if kind == "sum":
        if int(obj.get("degree", 3)) == 2:
            return SumScaling.degree2(get("lambda"), get("mu"))
        return SumScaling(get("lambda"), get("mu"), get("nu"))
    if kind == "max":
        return MaxScaling(get("lambda", "1"))
    if kind == "poly":
        return PolyScaling(get("lambda1"), get("lambda2"), get("mu1"), get("mu2"), get("nu"))
    if kind == "table":
        return TableScaling(tuple(tuple(str(v) for v in row) for row in obj["values"]))
    raise ValueError(f"unknown scaling kind {kind!r}")


def scaling_to_json(s: Scaling) -> dict:
    if isinstance(s, SumScaling):
        return {"kind": "sum", "lambda": fraction_str(s.lam), "mu": fraction_str(s.mu), "nu": fraction_str(s.nu)}
    if isinstance(s, MaxScaling):
        return {"kind": "max", "lambda": fraction_str(s.lam)}
    if isinstance(s, PolyScaling):
        return {
            "kind": "poly",
            "lambda1": fraction_str(s.lambda1),
            "lambda2": fraction_str(s.lambda2),
            "mu1": fraction_str(s.mu1),
            "mu2": fraction_str(s.mu2),
            "nu": fraction_str(s.nu),
        }
    return {"kind": "table", "values": [[fraction_str(v) for v in row] for row in s.values]}


# Verdicts -------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    status: str  # "admissible" | "not_admissible" | "unknown"
    reason: str
    witness: Optional[dict] = None


def _sum_verdict(g: Scaling, bound: int) -> Verdict:
    if isinstance(g, TableScaling):
        bad = uniform_constancy_violation(g, "sum", bound)
        if bad:
            return Verdict("not_admissible", "objective is not constant on uniform similarities",
                           {"n": bad[0], "values": sorted(fraction_str(v) for v in bad[1])})
        mono = monotone_violation(g, bound)
        if mono:
            return Verdict("not_admissible", "g(a+1, b) > g(a, b) fails", {"a": mono[0], "b": mono[1]})
        return Verdict("unknown", f"no violation found up to bound {bound}")

    s = g if isinstance(g, SumScaling) else canonicalize(g.to_poly())
    if s is None:
        r1, r2 = five_leaf_residues(g)
        return Verdict("not_admissible", "objective is not constant on uniform similarities (5-leaf identities)",
                       {"residues": [fraction_str(r1), fraction_str(r2)]})
    mono = monotone_violation(s, bound)
    mono_w = {"a": mono[0], "b": mono[1]} if mono else None
    if s.lam == 0:
        if admissible_sum_deg2(s.mu, s.nu):
            return Verdict("admissible", "degree-2 family with lambda >= 0 and 9 lambda + mu > 0")
        return Verdict("not_admissible", "degree-2 family violates lambda >= 0 or 9 lambda + mu > 0", mono_w)
    if admissible_sum_deg3_sufficient(s.lam, s.mu, s.nu):
        return Verdict("admissible", "cubic family meets the sufficient condition lam, mu >= 0, 15 lam + 9 mu + nu > 0")
    if mono:
        return Verdict("not_admissible", "g(a+1, b) > g(a, b) fails", mono_w)
    return Verdict("unknown", f"sufficient condition fails but no monotonicity violation up to bound {bound}")


def _max_verdict(g: Scaling, bound: int) -> Verdict:
    if isinstance(g, MaxScaling):
        if admissible_max_deg2(g.lam):
            return Verdict("admissible", "g = lam * ab with lam > 0")
        a, b, c, d = superadditive_violation(g, 4)
        return Verdict("not_admissible", "g = lam * ab needs lam > 0", {"abcd": [a, b, c, d]})
    if isinstance(g, (PolyScaling, SumScaling)):
        p = g.to_poly()
        if p.degree <= 2:
            if p.mu1 == 0 and p.nu == 0 and p.mu2 > 0:
                return Verdict("admissible", "quadratic g equals lam * ab with lam > 0")
            reason = "quadratic g must equal lam * ab with lam > 0"
            fi = functional_identity_violation(p, min(bound, 8))
            if fi:
                return Verdict("not_admissible", reason, {"identity_abcd": list(fi)})
            sv = superadditive_violation(p, bound)
            return Verdict("not_admissible", reason, {"superadditive_abcd": list(sv)} if sv else None)
    bad = uniform_constancy_violation(g, "max", bound)
    if bad:
        return Verdict("not_admissible", "objective is not constant on uniform similarities",
                       {"n": bad[0], "values": sorted(fraction_str(v) for v in bad[1])})
    fi = functional_identity_violation(g, min(bound, 12))
    if fi:
        return Verdict("not_admissible", "functional identity fails", {"identity_abcd": list(fi)})
    sv = superadditive_violation(g, bound)
    if sv:
        return Verdict("not_admissible", "g(a+c, b+d) > g(a, b) + g(c, d) fails", {"superadditive_abcd": list(sv)})
    return Verdict("unknown", f"no violation found up to bound {bound}")


def assess_admissibility(g: Scaling, kind: str, bound: int = DEFAULT_BOUND) -> Verdict:
    """Decide admissibility where a theorem applies; otherwise search for a refutation."""
    if kind == "sum":
        return _sum_verdict(g, bound)
    if kind == "max":
        return _max_verdict(g, bound)
    raise ValueError(f"unknown objective kind {kind!r}")
