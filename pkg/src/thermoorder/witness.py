"""Explicit Gibbs-preserving stochastic witnesses via LP feasibility.

A transition between block-diagonal states is possible through a thermal
process exactly when some column-stochastic matrix fixes the Gibbs state
and maps the initial distribution to the target. This module decides that
feasibility and returns the matrix. Small systems (n <= 12 by default) go
through an exact phase-1 simplex over Fractions, so verdicts cannot be
numerically wrong near curve tangency; larger systems use scipy's LP with
post-hoc residual validation. Floats enter the exact path losslessly (every
float is a dyadic rational).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .modes import all_exact, encode_number, parse_number, to_fraction
from .states import BlockState, Hamiltonian, gibbs_state

EXACT_DIMENSION_LIMIT = 12
DIMENSION_LIMIT = 64


class WitnessNumericalError(RuntimeError):
    """Floating solve failed in a way that is not a certified infeasibility."""


@dataclass(frozen=True)
class StochasticWitness:
    """Column-stochastic matrix, row-major; columns act on input levels."""

    matrix: tuple
    tol: float = 1e-9

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.matrix)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix rows must be non-empty and equal length")
        cleaned = []
        for r in rows:
            out = []
            for v in r:
                if v < 0:
                    if float(v) < -self.tol:
                        raise ValueError(f"negative matrix entry {v!r}")
                    v = type(v)(0)  # clamp tiny negatives, keeping the numeric type
                out.append(v)
            cleaned.append(tuple(out))
        rows = tuple(cleaned)
        n_rows, n_cols = len(rows), len(rows[0])
        for j in range(n_cols):
            colsum = math.fsum(float(rows[i][j]) for i in range(n_rows))
            if abs(colsum - 1.0) > max(self.tol, 1e-12):
                raise ValueError(f"column {j} sums to {colsum!r}, not 1")
        object.__setattr__(self, "matrix", rows)

    @property
    def dims(self) -> tuple:
        return (len(self.matrix), len(self.matrix[0]))

    @property
    def exact(self) -> bool:
        return all(all_exact(r) for r in self.matrix)

    def apply(self, p) -> tuple:
        """Matrix-vector product; length must match the column count."""
        n_rows, n_cols = self.dims
        if len(p) != n_cols:
            raise ValueError(f"vector of length {len(p)} against {n_cols} columns")
        if self.exact and all_exact(p):
            return tuple(
                sum((self.matrix[i][j] * p[j] for j in range(n_cols)), Fraction(0))
                for i in range(n_rows)
            )
        return tuple(
            math.fsum(float(self.matrix[i][j]) * float(p[j]) for j in range(n_cols))
            for i in range(n_rows)
        )

    def residuals(self, p, q, gamma) -> dict:
        mp = self.apply(p)
        mg = self.apply(gamma)
        return {
            "map": max(abs(float(a) - float(b)) for a, b in zip(mp, q)),
            "gibbs": max(abs(float(a) - float(b)) for a, b in zip(mg, gamma)),
            "columns": max(
                abs(math.fsum(float(self.matrix[i][j]) for i in range(self.dims[0])) - 1.0)
                for j in range(self.dims[1])
            ),
            "negativity": 0.0,
        }

    def to_json_obj(self, p=None, q=None, gamma=None) -> dict:
        obj = {
            "matrix": [[encode_number(v) for v in row] for row in self.matrix],
            "row_labels": [str(i) for i in range(self.dims[0])],
            "validated": True,
        }
        if p is not None and q is not None and gamma is not None:
            obj["residuals"] = self.residuals(p, q, gamma)
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "StochasticWitness":
        return cls(tuple(tuple(parse_number(v) for v in row) for row in obj["matrix"]))


def apply_witness(w: StochasticWitness, p) -> tuple:
    return w.apply(p)


def identity_witness(n: int) -> StochasticWitness:
    return StochasticWitness(tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    ))


# -- exact phase-1 simplex ---------------------------------------------------

def _feasible_point(a_rows, b):
    """x >= 0 with Ax = b, or None. Exact Fractions, Bland's rule."""
    m, n = len(a_rows), len(a_rows[0])
    tableau = []
    for i in range(m):
        row = list(a_rows[i])
        rhs = b[i]
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tableau.append(row + art + [rhs])
    # reduced costs for min(sum of artificials) with the artificial basis
    z = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            z[j] -= tableau[i][j]
        z[n + m] -= tableau[i][n + m]
    basis = list(range(n, n + m))
    while True:
        enter = next((j for j in range(n + m) if z[j] < 0), -1)
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(m):
            coef = tableau[i][enter]
            if coef > 0:
                ratio = tableau[i][n + m] / coef
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            return None
        pivot = tableau[leave][enter]
        tableau[leave] = [v / pivot for v in tableau[leave]]
        prow = tableau[leave]
        for i in range(m):
            f = tableau[i][enter]
            if i != leave and f != 0:
                tableau[i] = [v - f * w for v, w in zip(tableau[i], prow)]
        f = z[enter]
        if f != 0:
            z = [v - f * w for v, w in zip(z, prow)]
        basis[leave] = enter
    if z[n + m] != 0:
        return None
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tableau[i][n + m]
    return x


def _witness_rows(p, q, gamma):
    """Equality system for column-stochastic M with M gamma = gamma, M p = q.

    One row of each spectral constraint family is implied by the column sums
    and is dropped to keep the tableau small."""
    n = len(p)
    zero = Fraction(0)
    rows, rhs = [], []
    for j in range(n):
        row = [zero] * (n * n)
        for i in range(n):
            row[i * n + j] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(1))
    for i in range(n - 1):
        row = [zero] * (n * n)
        for j in range(n):
            row[i * n + j] = gamma[j]
        rows.append(row)
        rhs.append(gamma[i])
    for i in range(n - 1):
        row = [zero] * (n * n)
        for j in range(n):
            row[i * n + j] = p[j]
        rows.append(row)
        rhs.append(q[i])
    return rows, rhs


def _find_witness_exact(p, q, gamma):
    n = len(p)
    rows, rhs = _witness_rows(p, q, gamma)
    x = _feasible_point(rows, rhs)
    if x is None:
        return None
    witness = StochasticWitness(tuple(tuple(x[i * n + j] for j in range(n)) for i in range(n)))
    # re-validate by direct multiplication; exact arithmetic, so equality is strict
    if witness.apply(p) != tuple(q) or witness.apply(gamma) != tuple(gamma):
        raise WitnessNumericalError("exact solver produced an invalid witness")
    return witness


def _find_witness_float(p, q, gamma):
    from scipy.optimize import linprog

    n = len(p)
    rows, rhs = _witness_rows(
        [float(v) for v in p], [float(v) for v in q], [float(v) for v in gamma]
    )
    a_eq = np.array([[float(v) for v in row] for row in rows])
    b_eq = np.array([float(v) for v in rhs])
    res = linprog(
        c=np.zeros(n * n), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    if res.status == 2:
        return None
    if res.status != 0:
        raise WitnessNumericalError(f"LP solver status {res.status}: {res.message}")
    m = res.x.reshape((n, n))
    # renormalize away solver noise before validation
    m = np.clip(m, 0.0, None)
    m /= m.sum(axis=0, keepdims=True)
    witness = StochasticWitness(tuple(tuple(float(v) for v in row) for row in m))
    r = witness.residuals(p, q, gamma)
    if r["map"] > 1e-8 or r["gibbs"] > 1e-9:
        raise WitnessNumericalError(f"witness failed validation: residuals {r}")
    return witness


def find_witness(p: BlockState, q: BlockState,
                 exact_limit: int = EXACT_DIMENSION_LIMIT,
                 dimension_limit: int = DIMENSION_LIMIT):
    """Gibbs-preserving stochastic matrix with M p = q, or None if none exists.

    Any returned witness has been re-validated by direct multiplication.
    """
    if p.ham != q.ham:
        raise ValueError("witness search needs both states on the same Hamiltonian")
    n = len(p)
    if n > dimension_limit:
        raise ValueError(f"dimension {n} exceeds the configured limit {dimension_limit}")
    gamma = gibbs_state(p.ham).probs
    if p.probs == q.probs:
        return identity_witness(n)
    if q.probs == gamma:
        rows = tuple(tuple(gamma[i] for _ in range(n)) for i in range(n))
        return StochasticWitness(rows)
    if n <= exact_limit:
        # rationalize losslessly, then normalize exactly: float vectors sum to
        # 1 only within rounding, and the reduced equality system needs the
        # totals to agree to the bit
        def unit(values):
            vals = [to_fraction(v) for v in values]
            total = sum(vals, Fraction(0))
            return [v / total for v in vals]

        witness = _find_witness_exact(unit(p.probs), unit(q.probs), unit(gamma))
        if witness is None:
            return None
        if not (p.exact and q.exact):
            witness = StochasticWitness(
                tuple(tuple(float(v) for v in row) for row in witness.matrix)
            )
        return witness
    return _find_witness_float(p.probs, q.probs, gamma)


def random_gibbs_stochastic(ham: Hamiltonian, seed: int, weight: float = 1.0,
                            exchanges: int | None = None) -> StochasticWitness:
    """Random column-stochastic matrix fixing the Gibbs state.

    Composes random two-level Gibbs-preserving exchanges, then mixes the
    product with the identity: weight 0 returns the identity exactly.
    Seeded runs are bit-reproducible.
    """
    import random as _random

    if not 0 <= weight <= 1:
        raise ValueError("mixing weight must lie in [0, 1]")
    n = len(ham)
    gamma = [float(g) / float(ham.partition_function) for g in ham.gibbs]
    rng = _random.Random(seed)
    if exchanges is None:
        exchanges = 2 * n
    m = np.eye(n)
    for _ in range(exchanges):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        # two-level exchange: move a fraction a of column j's mass to i and
        # the gamma-balancing fraction b back, so gamma stays fixed
        cap = min(1.0, gamma[j] / gamma[i])
        a = rng.random() * cap
        b = a * gamma[i] / gamma[j]
        t = np.eye(n)
        t[i, i] = 1.0 - a
        t[j, i] = a
        t[j, j] = 1.0 - b
        t[i, j] = b
        m = t @ m
    m = (1.0 - weight) * np.eye(n) + weight * m
    witness = StochasticWitness(tuple(tuple(float(v) for v in row) for row in m))
    drift = max(
        abs(math.fsum(witness.matrix[i][j] * gamma[j] for j in range(n)) - gamma[i])
        for i in range(n)
    )
    if drift > 1e-12:
        raise WitnessNumericalError(f"generated map drifts off the Gibbs state by {drift}")
    return witness
