"""Y-monomials, q-characters, psi-products, and the folding map."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable

from .crystal import HalfInfMinus, HalfInfPlus, KRTableau, RectTableau, RowTableau, rows_in_window
from .scalar import AT_INFINITY, AT_ZERO, ONE, ZERO, PoleError, Scalar, SpectralParam, psi_mode, qpow


def _param_key(p: SpectralParam):
    return (p.qexp, p.group)


class YMonomial:
    """prod Y_{i,a}^{u_{i,a}} with finitely many nonzero exponents.

    ``modulus`` is None on the affinization (nodes in Z) and n+1 on the
    toroidal side (nodes are residues).  The two never mix.
    """

    __slots__ = ("exps", "modulus", "_hash")

    def __init__(self, exps: Iterable[tuple[tuple[int, SpectralParam], int]] | dict = (), modulus: int | None = None):
        d: dict = {}
        items = exps.items() if isinstance(exps, dict) else exps
        for (i, a), e in items:
            i = int(i)
            if modulus is not None:
                i %= modulus
            d[(i, a)] = d.get((i, a), 0) + int(e)
        self.exps = tuple(sorted(((k, e) for k, e in d.items() if e), key=lambda t: (t[0][0], _param_key(t[0][1]))))
        self.modulus = modulus
        self._hash = hash((self.exps, modulus))

    @staticmethod
    def y(i: int, a: SpectralParam, e: int = 1, modulus: int | None = None) -> "YMonomial":
        return YMonomial({(i, a): e}, modulus)

    def _check(self, other: "YMonomial"):
        if self.modulus != other.modulus:
            raise ValueError("cannot combine monomials from different node domains")

    def __mul__(self, other: "YMonomial") -> "YMonomial":
        self._check(other)
        return YMonomial(list(self.exps) + list(other.exps), self.modulus)

    def inverse(self) -> "YMonomial":
        return YMonomial([(k, -e) for k, e in self.exps], self.modulus)

    def __truediv__(self, other: "YMonomial") -> "YMonomial":
        return self * other.inverse()

    def __pow__(self, k: int) -> "YMonomial":
        return YMonomial([(key, k * e) for key, e in self.exps], self.modulus)

    def __eq__(self, other):
        return isinstance(other, YMonomial) and self.exps == other.exps and self.modulus == other.modulus

    def __hash__(self):
        return self._hash

    def is_one(self) -> bool:
        return not self.exps

    def exponent(self, i: int, a: SpectralParam) -> int:
        for (j, b), e in self.exps:
            if j == i and b == a:
                return e
        return 0

    def at_node(self, i: int) -> dict[SpectralParam, int]:
        return {a: e for (j, a), e in self.exps if j == i}

    def nodes(self) -> set[int]:
        return {i for (i, _), _ in self.exps}

    def node_sum(self, i: int) -> int:
        return sum(e for (j, _), e in self.exps if j == i)

    def restrict(self, nodes) -> "YMonomial":
        nodes = set(nodes)
        return YMonomial([(k, e) for k, e in self.exps if k[0] in nodes], self.modulus)

    def sort_key(self):
        return tuple((i, a.qexp, a.group, e) for (i, a), e in self.exps)

    def __str__(self):
        if not self.exps:
            return "1"
        parts = []
        for (i, a), e in self.exps:
            node = f"{i}" if self.modulus is None else f"{i}bar"
            arg = a.group if a.qexp == 0 else f"{a.group} q^{a.qexp}"
            parts.append(f"Y_{{{node},{arg}}}" + ("" if e == 1 else f"^{{{e}}}"))
        return " ".join(parts)

    __repr__ = __str__

    def to_json(self) -> list:
        return [{"node": i, "base": a.group, "qexp": a.qexp, "exp": e} for (i, a), e in self.exps]

    @staticmethod
    def from_json(obj: list, modulus: int | None = None) -> "YMonomial":
        return YMonomial([((d["node"], SpectralParam(d["base"], d["qexp"])), d["exp"]) for d in obj], modulus)


def one(modulus: int | None = None) -> YMonomial:
    return YMonomial((), modulus)


class QCharacter:
    """A finite multiset of monomials."""

    def __init__(self, terms: dict | Iterable[YMonomial] = (), modulus: int | None = None):
        c: Counter = Counter()
        if isinstance(terms, dict):
            for m, k in terms.items():
                c[m] += k
        else:
            for m in terms:
                c[m] += 1
        for m in c:
            if m.modulus != modulus:
                raise ValueError("monomial domain does not match the character")
        self.terms = {m: k for m, k in c.items() if k}
        if any(k < 0 for k in self.terms.values()):
            raise ValueError("multiplicities must be positive")
        self.modulus = modulus

    def __add__(self, other: "QCharacter") -> "QCharacter":
        if self.modulus != other.modulus:
            raise ValueError("domain mismatch")
        c = Counter(self.terms)
        c.update(other.terms)
        return QCharacter(dict(c), self.modulus)

    def __eq__(self, other):
        return isinstance(other, QCharacter) and self.terms == other.terms and self.modulus == other.modulus

    def __contains__(self, m):
        return m in self.terms

    def size(self) -> int:
        return sum(self.terms.values())

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0].sort_key())

    def multiplicity_free(self) -> bool:
        return all(k == 1 for k in self.terms.values())

    def to_json(self) -> list:
        return [{"mono": m.to_json(), "mult": k} for m, k in self.sorted_terms()]

    @staticmethod
    def from_json(obj: list, modulus: int | None = None) -> "QCharacter":
        return QCharacter({YMonomial.from_json(t["mono"], modulus): t["mult"] for t in obj}, modulus)

    def __str__(self):
        return "\n".join(f"{k} * {m}" if k != 1 else str(m) for m, k in self.sorted_terms())


# ---------------------------------------------------------------------------
# elementary monomials


def box(j: int, a: SpectralParam) -> YMonomial:
    """[[j]]_a = Y_{j-1, a q^j}^{-1} Y_{j, a q^{j-1}}."""
    return YMonomial({(j - 1, a.shift(j)): -1, (j, a.shift(j - 1)): 1})


def a_mono(i: int, a: SpectralParam, modulus: int | None = None) -> YMonomial:
    """A_{i,a} = Y_{i,aq^-1} Y_{i,aq} Y_{i-1,a}^-1 Y_{i+1,a}^-1."""
    return YMonomial([((i, a.shift(-1)), 1), ((i, a.shift(1)), 1), ((i - 1, a), -1), ((i + 1, a), -1)], modulus)


def a_inv(i: int, a: SpectralParam, modulus: int | None = None) -> YMonomial:
    return a_mono(i, a, modulus).inverse()


def m_of_row(T: RowTableau, a: SpectralParam) -> YMonomial:
    ell = T.shape
    m = one()
    for j, x in enumerate(T.entries, start=1):
        m = m * box(x, a.shift(ell + 1 - 2 * j))
    return m


def m_of_halfinf_plus(T: HalfInfPlus, a: SpectralParam) -> YMonomial:
    """Monomial of T_a in the fundamental module of highest weight Y_{l,a}."""
    ell = T.ell
    # the vacuum rows p <= alpha telescope to a single Y factor
    m = YMonomial({(T.alpha, a.shift(ell - T.alpha)): 1})
    for p in range(T.alpha + 1, ell + 1):
        m = m * box(T.entry(p), a.shift(ell + 1 - 2 * p))
    return m


def m_of_halfinf_minus(T: HalfInfMinus, a: SpectralParam) -> YMonomial:
    """Monomial of T_a in the fundamental module of lowest weight Y_{s,a}^{-1}."""
    s = T.s
    m = YMonomial({(T.beta - 1, a.shift(s + 1 - T.beta)): -1})
    for p in range(s + 1, T.beta):
        m = m * box(T.entry(p), a.shift(s + 1 - 2 * p))
    return m


def m_of_kr(T: KRTableau, a: SpectralParam) -> YMonomial:
    """prod over boxes of [[T_{i,j}]]_{a q^{l-1+2(j-i)}}, telescoped column by column."""
    ell = T.ell
    m = one()
    for j, col in enumerate(T.columns, start=1):
        c = col.alpha
        m = m * YMonomial({(c, a.shift(ell - 2 + 2 * j - c)): 1})
        for i in range(c + 1, ell + 1):
            m = m * box(col.entry(i), a.shift(ell - 1 + 2 * (j - i)))
    return m


def m_of_rect(T: RectTableau, a: SpectralParam) -> YMonomial:
    """Box product of the tensor T_{1,1} x T_{2,1} x ... with factor parameters a q^{2(j-i)}."""
    m = one()
    for i, row in enumerate(T.rows, start=1):
        for j, x in enumerate(row, start=1):
            m = m * box(x, a.shift(2 * (j - i)))
    return m


def dominant_check(m: YMonomial, J=None) -> bool:
    """All exponents at nodes of J nonnegative (J=None means every node)."""
    if J is None:
        return all(e >= 0 for _, e in m.exps)
    J = set(J)
    return all(e >= 0 for (i, _), e in m.exps if i in J)


def fold(x, n: int):
    """Reduce nodes modulo n+1."""
    if n < 2:
        raise ValueError("folding needs n >= 2")
    if isinstance(x, YMonomial):
        if x.modulus is not None:
            raise ValueError("already folded")
        return YMonomial(list(x.exps), n + 1)
    if isinstance(x, QCharacter):
        if x.modulus is not None:
            raise ValueError("already folded")
        c: Counter = Counter()
        for m, k in x.terms.items():
            c[fold(m, n)] += k
        return QCharacter(dict(c), n + 1)
    raise TypeError(type(x))


def qchar_row(ell: int, a: SpectralParam, lo: int, hi: int) -> QCharacter:
    if hi - lo + 1 < ell:
        raise ValueError("window too small for the shape")
    return QCharacter(m_of_row(T, a) for T in rows_in_window(ell, lo, hi))


# ---------------------------------------------------------------------------
# ell-weights as psi products


@dataclass(frozen=True)
class PhiEigen:
    """prod psi(a q z)^{e_a}: the eigenvalue of phi_i^{+-}(z) on a basis vector.

    ``factors`` holds (a, e) with e the net (nonzero) exponent of psi(aqz).
    """

    factors: tuple = ()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.factors)
            object.__setattr__(self, "_hash", h)
        return h

    @staticmethod
    def make(pairs: Iterable[tuple[SpectralParam, int]]) -> "PhiEigen":
        c: Counter = Counter()
        for a, e in pairs:
            c[a] += e
        return PhiEigen(tuple(sorted(((a, e) for a, e in c.items() if e), key=lambda t: _param_key(t[0]))))

    def __mul__(self, other: "PhiEigen") -> "PhiEigen":
        return PhiEigen.make(list(self.factors) + list(other.factors))

    def expanded(self) -> list[tuple[SpectralParam, int]]:
        """Factor list with multiplicity, each entry (a, +-1)."""
        out = []
        for a, e in self.factors:
            out.extend([(a, 1 if e > 0 else -1)] * abs(e))
        return out

    def degree(self) -> int:
        return sum(e for _, e in self.factors)

    def linear_factors(self) -> Counter:
        """Exponents n_p of (1 - p z), from psi(aqz) = q (1 - a q^-1 z)/(1 - a q z)."""
        n: Counter = Counter()
        for a, e in self.factors:
            n[a.shift(-1)] += e
            n[a.shift(1)] -= e
        return n

    def value_at(self, c: SpectralParam) -> Scalar:
        """The rational function evaluated at z = 1/c, after cancelling common factors.

        Raises PoleError if the cancelled function has a pole there.
        """
        lin = self.linear_factors()
        order = lin.get(c, 0)
        if order > 0:
            return ZERO
        if order < 0:
            raise PoleError(f"pole at z = 1/({c})")
        out = qpow(self.degree())
        for p, e in sorted(lin.items(), key=lambda t: _param_key(t[0])):
            if e == 0 or p == c:
                continue
            out = out * (ONE - p.ratio(c)) ** e
        return out

    def mode(self, direction: str, m: int) -> Scalar:
        """Coefficient of z^{+m} (at zero) or z^{-m} (at infinity)."""
        return _phi_mode(self, direction, m)

    def __str__(self):
        if not self.factors:
            return "1"
        return " ".join(
            f"psi({a.group} q^{a.qexp + 1} z)" + ("" if e == 1 else f"^{e}") for a, e in self.factors
        )


@lru_cache(maxsize=200_000)
def _phi_mode(e: PhiEigen, direction: str, m: int) -> Scalar:
    series = [ONE] + [ZERO] * m
    for a, s in e.expanded():
        c = a.shift(1)
        f = [psi_mode(c, s, direction, k) for k in range(m + 1)]
        series = [sum((series[k] * f[n - k] for k in range(n + 1)), ZERO) for n in range(m + 1)]
    return series[m]


def lweight_monomial(e: PhiEigen, i: int, modulus: int | None = None) -> YMonomial:
    return YMonomial({(i, a): k for a, k in e.factors}, modulus)


def phi_of_monomial(m: YMonomial, i: int) -> PhiEigen:
    return PhiEigen.make(m.at_node(i).items())


# ---------------------------------------------------------------------------
# string decomposition at one node


@dataclass
class StringDecomposition:
    node: int
    ok: bool
    strings: list = field(default_factory=list)  # (top monomial, coefficient)
    witness: YMonomial | None = None
    missing_partner_of: YMonomial | None = None
    whitelisted: list = field(default_factory=list)
    nonnegative: bool = True

    def to_json(self) -> dict:
        return {
            "node": self.node,
            "ok": self.ok,
            "strings": len(self.strings),
            "nonnegative": self.nonnegative,
            "witness": None if self.witness is None else str(self.witness),
            "missing_partner_of": None if self.missing_partner_of is None else str(self.missing_partner_of),
            "whitelisted": [str(m) for m in self.whitelisted],
        }


def string_expansion(m: YMonomial, r: int) -> dict[YMonomial, int]:
    """m * prod over positive Y_{r,b}^u of (1 + A_{r,bq}^-1)^u, expanded."""
    factors = []
    for b, u in sorted(m.at_node(r).items(), key=lambda t: _param_key(t[0])):
        if u > 0:
            A = a_inv(r, b.shift(1), m.modulus)
            factors.append([(A ** k, comb(u, k)) for k in range(u + 1)])
    out: Counter = Counter()
    for choice in itertools.product(*factors) if factors else [()]:
        t = m
        c = 1
        for mono, k in choice:
            t = t * mono
            c *= k
        out[t] += c
    return {t: c for t, c in out.items() if c}


def string_decompose(chi: QCharacter | dict, r: int, frontier: Iterable[YMonomial] = ()) -> StringDecomposition:
    """Write chi as an integer combination of node-r strings.

    Monomials are processed from the highest node-r weight down; each r-dominant
    top m removes c * string_expansion(m).  A non-dominant top means chi is not
    in the ring generated by Y_{r,b}(1 + A_{r,bq}^-1) and Y_{r',b}^{+-1}
    (r' != r).  Monomials listed in ``frontier`` and everything produced by
    expanding them are exempt: their failures are recorded in ``whitelisted``.
    """
    terms = chi.terms if isinstance(chi, QCharacter) else chi
    remaining: dict[YMonomial, int] = {m: k for m, k in terms.items() if k}
    tainted = set(frontier)
    origin: dict[YMonomial, YMonomial] = {}
    res = StringDecomposition(node=r, ok=True)

    def key(m):
        return (-m.node_sum(r), m.sort_key())

    while remaining:
        m = min(remaining, key=key)
        c = remaining[m]
        if not dominant_check(m, [r]):
            if m in tainted:
                res.whitelisted.append(m)
                del remaining[m]
                continue
            res.ok = False
            res.witness = origin.get(m, m)
            res.missing_partner_of = origin.get(m)
            return res
        taint = m in tainted
        for t, k in string_expansion(m, r).items():
            before = remaining.get(t, 0)
            if before == 0 and t != m:
                origin.setdefault(t, m)
            v = before - c * k
            if taint:
                tainted.add(t)
            if v:
                remaining[t] = v
            else:
                remaining.pop(t, None)
        res.strings.append((m, c))
        if c < 0:
            res.nonnegative = False
    return res
