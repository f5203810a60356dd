"""Degree choice, recursion depth and the recursive tangency bound, all exact.

With C3 = 2^n C1, C4 = 2^(1-2n) C2 and rho = C3 D^-n < 1, the recursion
    Theta(N) <= C4 D^(2n-1) Theta(rho N) + 2 B N + D^2
unrolled k times and closed with Theta(M) <= M^2 gives
    (C4 D^(2n-1))^k (rho^k N)^2 + 2 B N (C3 C4 D^(n-1))^k + D^2 (C4 D^(2n-1))^k,
where k is the unique depth with rho^(k+1) N < B <= rho^k N.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple


@dataclass(frozen=True)
class BoundParams:
    n: int
    epsilon: Fraction
    c1: Fraction = Fraction(1)
    c2: Fraction = Fraction(1)
    degree: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "c1", Fraction(self.c1))
        object.__setattr__(self, "c2", Fraction(self.c2))
        if self.n < 3:
            raise ValueError("the bound is stated for n >= 3")
        if self.epsilon <= 0 or self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("epsilon, c1 and c2 must be positive")
        if self.degree is None:
            object.__setattr__(self, "degree", choose_degree(self.n, self.epsilon, self.c1, self.c2))
        elif self.degree % 2 or self.degree < 2:
            raise ValueError("degree must be even and at least 2")
        elif not _admissible(self.n, self.epsilon, self.c1, self.c2, self.degree):
            raise ValueError(f"degree {self.degree} violates the degree constraints")

    @property
    def c3(self) -> Fraction:
        return 2 ** self.n * self.c1

    @property
    def c4(self) -> Fraction:
        return Fraction(1, 2 ** (2 * self.n - 1)) * self.c2

    @property
    def ratio(self) -> Fraction:
        """C3 D^-n, the per-step shrink factor of the collection size."""
        return self.c3 / Fraction(self.degree) ** self.n


def _c3_c4(n, c1, c2):
    return 2 ** n * Fraction(c1), Fraction(c2) / 2 ** (2 * n - 1)


def constraint_ratio(n: int, c1, d: int) -> bool:
    """C3 D^-n < 1."""
    c3, _ = _c3_c4(n, c1, 1)
    return Fraction(d) ** n > c3


def constraint_epsilon(n: int, epsilon, c1, c2, d: int) -> bool:
    """C4 C3^(2-1/n) <= C3^-eps D^(n eps), compared after raising to the power q n (eps = p/q)."""
    eps = Fraction(epsilon)
    c3, c4 = _c3_c4(n, c1, c2)
    p, q = eps.numerator, eps.denominator
    lhs = c4 ** (q * n) * c3 ** ((2 * n - 1) * q)
    rhs = Fraction(d) ** (n * n * p) / c3 ** (p * n)
    return lhs <= rhs


def _admissible(n, eps, c1, c2, d) -> bool:
    return constraint_ratio(n, c1, d) and constraint_epsilon(n, eps, c1, c2, d)


def choose_degree(n: int, epsilon, c1=1, c2=1) -> int:
    """Smallest even D satisfying both constraints.

    Both constraints are monotone in D, so an exponential search followed by
    bisection over even integers finds the threshold exactly.
    """
    eps = Fraction(epsilon)
    if n < 3 or eps <= 0:
        raise ValueError("need n >= 3 and epsilon > 0")

    def ok(half: int) -> bool:
        return _admissible(n, eps, c1, c2, 2 * half)

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2  # 0 or inadmissible
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return 2 * hi


def critical_k(b: int, n_count: int, params: BoundParams) -> int:
    """The k >= 0 with rho^(k+1) N < b <= rho^k N."""
    if b < 1 or b > n_count:
        raise ValueError(f"need 1 <= b <= N, got b={b}, N={n_count}")
    rho = params.ratio
    k = 0
    level = Fraction(n_count)  # rho^k N
    while not (level * rho < b):
        level *= rho
        k += 1
    return k


def theta_terms(b: int, n_count: int, params: BoundParams) -> Tuple[int, Fraction, Fraction, Fraction]:
    k = critical_k(b, n_count, params)
    d, n = Fraction(params.degree), params.n
    grow = params.c4 * d ** (2 * n - 1)
    shrunk = params.ratio ** k * n_count
    t1 = grow ** k * shrunk ** 2
    t2 = 2 * b * n_count * (params.c3 * params.c4 * d ** (n - 1)) ** k
    t3 = d ** 2 * grow ** k
    return k, t1, t2, t3


def theta_bound(b: int, n_count: int, params: BoundParams) -> Fraction:
    _, t1, t2, t3 = theta_terms(b, n_count, params)
    return t1 + t2 + t3


def asymptotic_form(b: int, n_count: int, params: BoundParams) -> float:
    """B^(1/n - eps) N^(2 - 1/n + eps), for display only."""
    eps, n = float(params.epsilon), params.n
    return b ** (1 / n - eps) * n_count ** (2 - 1 / n + eps)


def loglog_slope(ns: Sequence[int], counts: Sequence[int]) -> float:
    pts = [(math.log(x), math.log(y)) for x, y in zip(ns, counts) if x > 0 and y > 0]
    if len(pts) < 2:
        raise ValueError("need two positive points for a slope")
    xs, ys = zip(*pts)
    return statistics.linear_regression(xs, ys).slope


@dataclass(frozen=True)
class Observation:
    label: str
    b: int
    n_count: int
    pair_count: int  # ordered tangent pairs
    condition_i: bool = True


@dataclass(frozen=True)
class ReportRow:
    observation: Observation
    k: int
    bound: Fraction
    asymptotic: float

    @property
    def inconsistent(self) -> bool:
        return self.observation.pair_count > self.bound

    @property
    def note(self) -> str:
        if not self.observation.condition_i:
            return "condition (i) violated - bound not applicable"
        if self.inconsistent:
            return "INCONSISTENT: observed exceeds bound"
        return ""


@dataclass
class BoundReport:
    params: BoundParams
    rows: List[ReportRow]
    slope: Optional[float] = None

    @property
    def inconsistent(self) -> bool:
        return any(r.inconsistent and r.observation.condition_i for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "b", "N", "observed", "k", "bound", "asymptotic", "note"])
        for r in self.rows:
            o = r.observation
            w.writerow([o.label, o.b, o.n_count, o.pair_count, r.k, str(r.bound),
                        f"{r.asymptotic:.6g}", r.note])
        return buf.getvalue()

    def plot_data(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "N", "count", "bound"])
        for r in self.rows:
            w.writerow([r.observation.label, r.observation.n_count, r.observation.pair_count,
                        f"{float(r.bound):.6g}"])
        return buf.getvalue()

    def table(self) -> str:
        p = self.params
        lines = [
            f"n={p.n} epsilon={p.epsilon} c1={p.c1} c2={p.c2} D={p.degree} "
            f"c3={p.c3} c4={p.c4}",
            f"{'label':<24}{'b':>8}{'N':>8}{'observed':>12}{'k':>4}{'bound':>16}{'asymptotic':>14}  note",
        ]
        for r in self.rows:
            o = r.observation
            lines.append(
                f"{o.label:<24}{o.b:>8}{o.n_count:>8}{o.pair_count:>12}{r.k:>4}"
                f"{float(r.bound):>16.6g}{r.asymptotic:>14.6g}  {r.note}"
            )
        if self.slope is not None:
            lines.append(f"log-log slope of observed vs N: {self.slope:.4f}")
        return "\n".join(lines) + "\n"


def compare_report(observed: Sequence[Observation], params: BoundParams) -> BoundReport:
    rows = []
    for o in observed:
        k, t1, t2, t3 = theta_terms(o.b, o.n_count, params)
        rows.append(ReportRow(o, k, t1 + t2 + t3, asymptotic_form(o.b, o.n_count, params)))
    slope = None
    if len({o.n_count for o in observed}) >= 2:
        try:
            slope = loglog_slope([o.n_count for o in observed], [o.pair_count for o in observed])
        except ValueError:
            slope = None
    return BoundReport(params, rows, slope)
