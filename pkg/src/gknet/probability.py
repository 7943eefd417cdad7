"""Exact finite joint distributions and the information measures on them.

Probabilities are 64-bit floats validated to sum to one within ``MASS_TOL``.
The support is structural: a tuple is in the support iff it is present in the
mass mapping, zero-mass entries are never stored, and absence from the mapping
is the only zero. All logarithms are base 2; all rates are bits per symbol.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import log2
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import UnknownVariableError

MASS_TOL = 1e-9


@dataclass(frozen=True)
class SymbolSequence:
    """A length-n run of symbols emitted by one named variable."""

    variable: str
    symbols: tuple

    def __len__(self) -> int:
        return len(self.symbols)


class JointPmf:
    """Joint probability mass function over named finite-alphabet variables.

    Immutable after construction. The mass mapping is stored in a canonical
    order (alphabet rank of each coordinate), so identical distributions
    behave identically regardless of how their entries were listed.
    """

    def __init__(self, variables, alphabets, mass):
        variables = tuple(variables)
        if not variables:
            raise ValueError("a pmf needs at least one variable")
        if len(set(variables)) != len(variables) or not all(
            isinstance(v, str) and v for v in variables
        ):
            raise ValueError("variable names must be distinct nonempty strings")
        if set(alphabets) != set(variables):
            raise ValueError("alphabets must name exactly the pmf variables")

        alpha: dict[str, tuple] = {}
        for v in variables:
            symbols = tuple(alphabets[v])
            if not symbols or len(set(symbols)) != len(symbols):
                raise ValueError(f"alphabet of {v!r} must list distinct symbols")
            alpha[v] = symbols
        rank = {v: {s: i for i, s in enumerate(a)} for v, a in alpha.items()}

        cleaned: dict[tuple, float] = {}
        for tup, p in mass.items():
            tup = tuple(tup)
            if len(tup) != len(variables):
                raise ValueError(
                    f"tuple {tup!r} has arity {len(tup)}, expected {len(variables)}"
                )
            for v, s in zip(variables, tup):
                if s not in rank[v]:
                    raise ValueError(f"symbol {s!r} is not in the alphabet of {v!r}")
            p = float(p)
            if p < 0.0:
                raise ValueError(f"negative probability for {tup!r}")
            if p == 0.0:
                continue
            cleaned[tup] = cleaned.get(tup, 0.0) + p
        if not cleaned:
            raise ValueError("pmf has empty support")
        total = sum(cleaned.values())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

        order = sorted(
            cleaned, key=lambda t: tuple(rank[v][s] for v, s in zip(variables, t))
        )
        self.variables = variables
        self.alphabets = alpha
        self.mass = {t: cleaned[t] for t in order}
        self._rank = rank

    @property
    def support(self) -> tuple:
        return tuple(self.mass)

    def symbol_rank(self, var: str, symbol) -> int:
        return self._rank[var][symbol]

    def subset(self, vars) -> tuple:
        """Normalize a variable subset, preserving this pmf's variable order."""
        if isinstance(vars, str):
            vars = (vars,)
        requested = set()
        for v in vars:
            if v not in self._rank:
                raise UnknownVariableError(f"unknown variable {v!r}")
            requested.add(v)
        if not requested:
            raise ValueError("empty variable subset")
        return tuple(v for v in self.variables if v in requested)

    def marginal(self, vars) -> "JointPmf":
        """Marginal pmf on a variable subset, in this pmf's variable order."""
        sub = self.subset(vars)
        if sub == self.variables:
            return self
        idx = [self.variables.index(v) for v in sub]
        agg: dict[tuple, float] = {}
        for tup, p in self.mass.items():
            key = tuple(tup[i] for i in idx)
            agg[key] = agg.get(key, 0.0) + p
        return JointPmf(sub, {v: self.alphabets[v] for v in sub}, agg)

    def marginal_distribution(self, var: str) -> dict:
        """Mapping symbol -> probability for one variable (support only)."""
        return {t[0]: p for t, p in self.marginal((var,)).mass.items()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, JointPmf):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.alphabets == other.alphabets
            and self.mass == other.mass
        )

    def __repr__(self) -> str:
        return f"JointPmf(variables={self.variables!r}, support={len(self.mass)})"


def entropy(pmf: JointPmf, vars) -> float:
    """Shannon entropy, in bits, of the marginal on ``vars``."""
    sub = pmf.subset(vars)
    marg = pmf if sub == pmf.variables else pmf.marginal(sub)
    return -sum(p * log2(p) for p in marg.mass.values())


def conditional_entropy(pmf: JointPmf, target, given) -> float:
    """H(target | given) = H(target, given) - H(given), clamped nonnegative."""
    t = pmf.subset(target)
    g = pmf.subset(given)
    if set(t) & set(g):
        raise ValueError("target and given variables overlap")
    return max(entropy(pmf, t + g) - entropy(pmf, g), 0.0)


def mutual_information(pmf: JointPmf, a, b) -> float:
    """I(a; b) = H(a) + H(b) - H(a, b), clamped nonnegative."""
    sa = pmf.subset(a)
    sb = pmf.subset(b)
    if set(sa) & set(sb):
        raise ValueError("the two variable subsets overlap")
    return max(entropy(pmf, sa) + entropy(pmf, sb) - entropy(pmf, sa + sb), 0.0)


def is_markov_chain(pmf: JointPmf, order, tol: float = 1e-9) -> bool:
    """Check the chain factorization along ``order``.

    True iff for every consecutive triple (A, B, C) of the listed variables
    and every b with p(b) > 0, p(a, c | b) = p(a | b) * p(c | b) for all
    (a, c), within absolute tolerance ``tol``.
    """
    order = tuple(order)
    if len(order) < 3:
        raise ValueError("a chain needs at least 3 variables")
    if len(set(order)) != len(order):
        raise ValueError("chain variables must be distinct")
    for v in order:
        if v not in pmf.variables:
            raise UnknownVariableError(f"unknown variable {v!r}")

    for i in range(len(order) - 2):
        a_var, b_var, c_var = order[i : i + 3]
        marg = pmf.marginal((a_var, b_var, c_var))
        ia, ib, ic = (marg.variables.index(v) for v in (a_var, b_var, c_var))
        pb: dict = {}
        pab: dict = {}
        pcb: dict = {}
        pacb: dict = {}
        for tup, p in marg.mass.items():
            a, b, c = tup[ia], tup[ib], tup[ic]
            pb[b] = pb.get(b, 0.0) + p
            pab[a, b] = pab.get((a, b), 0.0) + p
            pcb[c, b] = pcb.get((c, b), 0.0) + p
            pacb[a, b, c] = pacb.get((a, b, c), 0.0) + p
        for b, mass_b in pb.items():
            for a in pmf.alphabets[a_var]:
                for c in pmf.alphabets[c_var]:
                    lhs = pacb.get((a, b, c), 0.0) / mass_b
                    rhs = (
                        pab.get((a, b), 0.0) * pcb.get((c, b), 0.0) / (mass_b * mass_b)
                    )
                    if abs(lhs - rhs) > tol:
                        return False
    return True


def sample_iid(pmf: JointPmf, n: int, seed: int) -> dict[str, SymbolSequence]:
    """Draw n i.i.d. tuples with numpy's PCG64 generator.

    Identical (pmf, n, seed) yields identical output.
    """
    if n < 1:
        raise ValueError("blocklength must be at least 1")
    rng = np.random.default_rng(seed)
    support = tuple(pmf.mass)
    probs = np.array([pmf.mass[t] for t in support], dtype=float)
    idx = rng.choice(len(support), size=n, p=probs / probs.sum())
    return {
        v: SymbolSequence(v, tuple(support[i][j] for i in idx))
        for j, v in enumerate(pmf.variables)
    }


def is_strongly_typical(seq: SymbolSequence, dist: Mapping, epsilon: float) -> bool:
    """Relative strong typicality: |count(a)/n - p(a)| <= epsilon * p(a).

    Symbols of zero probability must not occur at all.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n = len(seq.symbols)
    if n == 0:
        raise ValueError("empty sequence")
    counts = Counter(seq.symbols)
    unknown = set(counts) - set(dist)
    if unknown:
        raise ValueError(f"symbols outside the distribution alphabet: {sorted(map(str, unknown))}")
    for a, p in dist.items():
        c = counts.get(a, 0)
        if p <= 0.0:
            if c:
                return False
        elif abs(c / n - p) > epsilon * p:
            return False
    return True


def binary_entropy(gamma: float) -> float:
    """h(gamma) in bits, with h(0) = h(1) = 0."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    if gamma in (0.0, 1.0):
        return 0.0
    return -gamma * log2(gamma) - (1.0 - gamma) * log2(1.0 - gamma)


def _parse_prob(value) -> float:
    # exact-fraction strings like "1/3" are accepted and converted on load
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def pmf_to_dict(pmf: JointPmf) -> dict:
    return {
        "variables": list(pmf.variables),
        "alphabets": {v: list(a) for v, a in pmf.alphabets.items()},
        "mass": [{"tuple": list(t), "p": p} for t, p in pmf.mass.items()],
    }


def pmf_from_dict(obj: Mapping) -> JointPmf:
    try:
        variables = obj["variables"]
        alphabets = obj["alphabets"]
        entries = obj["mass"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"pmf object is missing field {exc}") from exc
    mass: dict[tuple, float] = {}
    for entry in entries:
        try:
            tup = tuple(entry["tuple"])
            p = _parse_prob(entry["p"])
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"bad mass entry {entry!r}") from exc
        mass[tup] = mass.get(tup, 0.0) + p
    return JointPmf(variables, alphabets, mass)


def load_pmf(path) -> JointPmf:
    return pmf_from_dict(json.loads(Path(path).read_text()))


def dump_pmf(pmf: JointPmf, path) -> None:
    Path(path).write_text(json.dumps(pmf_to_dict(pmf), indent=2) + "\n")
