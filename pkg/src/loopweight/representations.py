"""Loop modules with delta-supported actions, fusion, truncation.

Every action of a current x_i^{+-}(z) on a basis vector is a finite sum of
``DeltaTerm(c, k, t)`` meaning ``k * delta(c z) * t``; the mode x_{i,r}
therefore sends v to ``sum k * c**r * t``.  The currents phi_i^{+-}(z) act
diagonally through a ``PhiEigen``.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .crystal import (
    Box,
    HalfInfMinus,
    HalfInfPlus,
    RectTableau,
    RowTableau,
    TensorWord,
    Weight,
    rects_in_window,
    rows_in_window,
)
from .monomial import PhiEigen, YMonomial, lweight_monomial, one
from .scalar import AT_INFINITY, AT_ZERO, ONE, ZERO, PoleError, Scalar, SpectralParam, qfactorial


class FusionUndefined(ArithmeticError):
    """A coproduct coefficient has a pole at the point pinned by a delta function."""

    def __init__(self, node: int, vector, point: SpectralParam, sign: int):
        self.node = node
        self.vector = vector
        self.point = point
        self.sign = sign
        super().__init__(f"x{'+' if sign > 0 else '-'}_{node} on {vector}: pole at z = 1/({point})")


# ---------------------------------------------------------------------------
# basis vectors and linear combinations


@dataclass(frozen=True)
class Labeled:
    """A tableau T with its spectral parameter: the vector T_a."""

    tableau: object
    param: SpectralParam

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.tableau, self.param))
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        return f"{self.tableau}@{self.param}"

    def to_json(self):
        return {"tableau": self.tableau.to_json(), "param": str(self.param)}


@dataclass(frozen=True)
class Tensor:
    factors: tuple

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.factors)
            object.__setattr__(self, "_hash", h)
        return h

    def __str__(self):
        return " ⊗ ".join(str(f) for f in self.factors)

    def to_json(self):
        return [f.to_json() for f in self.factors]

    def flat(self) -> tuple:
        out = []
        for f in self.factors:
            out.extend(f.flat() if isinstance(f, Tensor) else [f])
        return tuple(out)


@dataclass(frozen=True)
class DeltaTerm:
    support: SpectralParam
    coeff: Scalar
    target: object


class LinComb:
    """Finitely supported map basis vector -> Scalar, zero coefficients dropped."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        self.coeffs = {v: c for v, c in (coeffs or {}).items() if not c.is_zero()}

    @staticmethod
    def of(v, c: Scalar = ONE) -> "LinComb":
        return LinComb({v: c})

    def add_term(self, v, c: Scalar):
        old = self.coeffs.get(v)
        new = c if old is None else old + c
        if new.is_zero():
            self.coeffs.pop(v, None)
        else:
            self.coeffs[v] = new

    def __add__(self, other: "LinComb") -> "LinComb":
        out = LinComb(dict(self.coeffs))
        for v, c in other.coeffs.items():
            out.add_term(v, c)
        return out

    def __neg__(self):
        return LinComb({v: -c for v, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: Scalar) -> "LinComb":
        if k.is_zero():
            return LinComb()
        return LinComb({v: c * k for v, c in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, LinComb) and self.coeffs == other.coeffs

    def __len__(self):
        return len(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items(), key=lambda t: str(t[0]))

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for v, c in self.items():
            s = str(c)
            if (" + " in s or " - " in s) and not s.startswith("("):
                s = f"({s})"
            parts.append(f"{s}·{v}")
        return " + ".join(parts)

    def to_json(self):
        return [{"vector": str(v), "scalar": c.to_json()} for v, c in self.items()]


# ---------------------------------------------------------------------------
# modules


class LoopModule:
    """Base class.  Subclasses implement ``_x_series`` and ``_phi_eigen``."""

    descriptor = "module"

    def __init__(self):
        self._xcache: dict = {}
        self._phicache: dict = {}

    def x_series(self, sign: int, i: int, v) -> tuple:
        key = (sign, i, v)
        out = self._xcache.get(key)
        if out is None:
            out = tuple(self._x_series(sign, i, v))
            self._xcache[key] = out
        return out

    def phi_eigen(self, i: int, v) -> PhiEigen:
        key = (i, v)
        out = self._phicache.get(key)
        if out is None:
            out = self._phi_eigen(i, v)
            self._phicache[key] = out
        return out

    def _x_series(self, sign, i, v):
        raise NotImplementedError

    def _phi_eigen(self, i, v) -> PhiEigen:
        raise NotImplementedError

    def weight(self, v) -> Weight:
        return self.crystal_label(v).weight()

    def crystal_label(self, v):
        raise NotImplementedError

    def generator(self):
        raise NotImplementedError

    def basis_enum(self, window: tuple[int, int]) -> list:
        raise NotImplementedError

    def contains(self, v) -> bool:
        raise NotImplementedError

    def support_nodes(self, v) -> set[int]:
        """Nodes outside of which phi acts trivially on v."""
        w = self.crystal_label(v)
        return _label_nodes(w)

    def lweight(self, v, nodes: Iterable[int] | None = None) -> YMonomial:
        if nodes is None:
            nodes = self.support_nodes(v)
        m = one()
        for i in sorted(nodes):
            m = m * lweight_monomial(self.phi_eigen(i, v), i)
        return m

    def __str__(self):
        return self.descriptor


def _label_nodes(w) -> set[int]:
    if isinstance(w, TensorWord):
        out: set[int] = set()
        for f in w.factors:
            out |= _label_nodes(f)
        return out
    if isinstance(w, RowTableau):
        return set(w.entries) | {x - 1 for x in w.entries}
    if isinstance(w, Box):
        return {w.v, w.v - 1}
    if isinstance(w, RectTableau):
        return {x for r in w.rows for x in r} | {x - 1 for r in w.rows for x in r}
    if isinstance(w, HalfInfPlus):
        return {w.alpha} | set(w.tail) | {x - 1 for x in w.tail}
    if isinstance(w, HalfInfMinus):
        return {w.beta - 1} | set(w.head) | {x - 1 for x in w.head}
    raise TypeError(type(w))


def _set_x_series(T, a: SpectralParam, L: int, sign: int, i: int):
    """Shared action rule on strictly increasing tableaux; L is the shape (or anchor)."""
    if sign > 0:
        if T.contains(i + 1) and not T.contains(i):
            p = T.position(i + 1)
            return [DeltaTerm(a.shift(i + L + 1 - 2 * p), ONE, Labeled(T.etilde(i), a))]
    else:
        if T.contains(i) and not T.contains(i + 1):
            p = T.position(i)
            return [DeltaTerm(a.shift(i + L + 1 - 2 * p), ONE, Labeled(T.ftilde(i), a))]
    return []


def _set_phi(T, a: SpectralParam, L: int, i: int) -> PhiEigen:
    if T.contains(i + 1) and not T.contains(i):
        p = T.position(i + 1)
        return PhiEigen(((a.shift(i + L + 2 - 2 * p), -1),))
    if T.contains(i) and not T.contains(i + 1):
        p = T.position(i)
        return PhiEigen(((a.shift(i + L - 2 * p), 1),))
    return PhiEigen()


class _LabeledModule(LoopModule):
    family: type = object

    def __init__(self, L: int, a: SpectralParam):
        super().__init__()
        self.L = L
        self.a = a

    def _check(self, v):
        if not self.contains(v):
            raise ValueError(f"{v} is not a basis vector of {self}")

    def contains(self, v):
        return isinstance(v, Labeled) and v.param == self.a and isinstance(v.tableau, self.family) and self._shape_ok(v.tableau)

    def _shape_ok(self, T) -> bool:
        return True

    def _x_series(self, sign, i, v):
        self._check(v)
        return _set_x_series(v.tableau, self.a, self.L, sign, i)

    def _phi_eigen(self, i, v):
        self._check(v)
        return _set_phi(v.tableau, self.a, self.L, i)

    def crystal_label(self, v):
        return v.tableau

    def label(self, T) -> Labeled:
        return Labeled(T, self.a)


class FundamentalPlus(_LabeledModule):
    """Basis T_a, T half-infinite of shape l; highest l-weight Y_{l,a}."""

    family = HalfInfPlus

    def __init__(self, ell: int, a: SpectralParam):
        super().__init__(ell, a)
        self.ell = ell
        self.descriptor = f"FUNDP({ell},{a})"

    def _shape_ok(self, T):
        return T.ell == self.ell

    def generator(self):
        return Labeled(HalfInfPlus.vacuum(self.ell), self.a)

    def basis_enum(self, window):
        lo, hi = window
        ell = self.ell
        if lo > ell:
            return [self.generator()]
        top = list(range(hi + 2, ell + 1))
        size = ell - lo + 1 - len(top)
        out = []
        for sub in itertools.combinations(range(lo, hi + 2), size):
            out.append(Labeled(HalfInfPlus.from_entries(ell, lo, list(sub) + top), self.a))
        return out


class FundamentalMinus(_LabeledModule):
    """Basis T_a, T half-infinite with anchor s; lowest l-weight Y_{s,a}^{-1}."""

    family = HalfInfMinus

    def __init__(self, s: int, a: SpectralParam):
        super().__init__(s, a)
        self.s = s
        self.descriptor = f"FUNDM({s},{a})"

    def _shape_ok(self, T):
        return T.s == self.s

    def generator(self):
        return Labeled(HalfInfMinus.vacuum(self.s), self.a)

    def basis_enum(self, window):
        lo, hi = window
        s = self.s
        if hi + 1 < s + 1:
            return [self.generator()]
        bottom = list(range(s + 1, lo))
        size = hi - s + 1 - len(bottom)
        out = []
        for sub in itertools.combinations(range(lo, hi + 2), size):
            out.append(Labeled(HalfInfMinus.from_entries(s, sorted(bottom + list(sub))), self.a))
        return out


class EFLModule(_LabeledModule):
    """Extremal fundamental loop weight module: basis rows of shape l, closed-form action."""

    family = RowTableau

    def __init__(self, ell: int, a: SpectralParam):
        if ell < 1:
            raise ValueError("shape must be >= 1")
        super().__init__(ell, a)
        self.ell = ell
        self.descriptor = f"EFL({ell},{a})"

    def _shape_ok(self, T):
        return T.shape == self.ell

    def generator(self):
        return Labeled(RowTableau(tuple(range(1, self.ell + 1))), self.a)

    def basis_enum(self, window):
        lo, hi = window
        return [Labeled(T, self.a) for T in rows_in_window(self.ell, lo, hi + 1)]


class VectorRep(LoopModule):
    """Basis [[j]]_a, j in Z, with the displayed single-box action."""

    def __init__(self, a: SpectralParam):
        super().__init__()
        self.a = a
        self.descriptor = f"VEC({a})"

    def contains(self, v):
        return isinstance(v, Labeled) and isinstance(v.tableau, Box) and v.param == self.a

    def box(self, j: int) -> Labeled:
        return Labeled(Box(j), self.a)

    def _x_series(self, sign, i, v):
        if not self.contains(v):
            raise ValueError(f"{v} is not a basis vector of {self}")
        j = v.tableau.v
        if sign > 0 and i == j - 1:
            return [DeltaTerm(self.a.shift(j - 1), ONE, self.box(j - 1))]
        if sign < 0 and i == j:
            return [DeltaTerm(self.a.shift(j), ONE, self.box(j + 1))]
        return []

    def _phi_eigen(self, i, v):
        j = v.tableau.v
        if i == j:
            return PhiEigen(((self.a.shift(j - 1), 1),))
        if i == j - 1:
            return PhiEigen(((self.a.shift(j), -1),))
        return PhiEigen()

    def crystal_label(self, v):
        return v.tableau

    def generator(self):
        return self.box(1)

    def basis_enum(self, window):
        lo, hi = window
        return [self.box(j) for j in range(lo, hi + 2)]


class FusionProduct(LoopModule):
    """M_1 ⊗ ... ⊗ M_n with the iterated Drinfeld coproduct.

    x^+ acting on factor k is weighted by phi^-(z) of the factors before k,
    x^- on factor k by phi^+(z) of the factors after k; the product of those
    eigenvalues is one rational function, evaluated at the point fixed by the
    delta function after cancelling common linear factors.
    """

    def __init__(self, modules: Sequence[LoopModule], descriptor: str | None = None):
        super().__init__()
        self.modules = tuple(modules)
        if len(self.modules) < 2:
            raise ValueError("fusion needs at least two factors")
        self.descriptor = descriptor or "FUSE(" + ",".join(str(m) for m in self.modules) + ")"

    def contains(self, v):
        return (
            isinstance(v, Tensor)
            and len(v.factors) == len(self.modules)
            and all(m.contains(f) for m, f in zip(self.modules, v.factors))
        )

    def _partner(self, i, v, k, sign) -> PhiEigen:
        rng = range(0, k) if sign > 0 else range(k + 1, len(self.modules))
        e = PhiEigen()
        for m in rng:
            e = e * self.modules[m].phi_eigen(i, v.factors[m])
        return e

    def _x_series(self, sign, i, v):
        out: dict = {}
        for k, (M, f) in enumerate(zip(self.modules, v.factors)):
            terms = M.x_series(sign, i, f)
            if not terms:
                continue
            partner = self._partner(i, v, k, sign)
            for t in terms:
                try:
                    val = partner.value_at(t.support)
                except PoleError:
                    raise FusionUndefined(i, v, t.support, sign) from None
                if val.is_zero():
                    continue
                target = Tensor(v.factors[:k] + (t.target,) + v.factors[k + 1 :])
                key = (t.support, target)
                c = t.coeff * val
                out[key] = out[key] + c if key in out else c
        return [DeltaTerm(c0, k0, t0) for (c0, t0), k0 in out.items() if not k0.is_zero()]

    def pole_orders(self, sign, i, v):
        """(support, order) of each coproduct coefficient; order < 0 is a pole."""
        res = []
        for k, (M, f) in enumerate(zip(self.modules, v.factors)):
            terms = M.x_series(sign, i, f)
            if not terms:
                continue
            lin = self._partner(i, v, k, sign).linear_factors()
            for t in terms:
                res.append((t.support, lin.get(t.support, 0)))
        return res

    def _phi_eigen(self, i, v):
        e = PhiEigen()
        for M, f in zip(self.modules, v.factors):
            e = e * M.phi_eigen(i, f)
        return e

    def weight(self, v):
        w = Weight()
        for M, f in zip(self.modules, v.factors):
            w = w + M.weight(f)
        return w

    def crystal_label(self, v):
        return TensorWord(tuple(M.crystal_label(f) for M, f in zip(self.modules, v.factors)))

    def support_nodes(self, v):
        out: set[int] = set()
        for M, f in zip(self.modules, v.factors):
            out |= M.support_nodes(f)
        return out

    def generator(self):
        return Tensor(tuple(M.generator() for M in self.modules))

    def basis_enum(self, window):
        return [Tensor(fs) for fs in itertools.product(*(M.basis_enum(window) for M in self.modules))]


class SubModule(LoopModule):
    """The span of the parent's basis vectors satisfying ``pred``.

    The action is the parent's; closure is a property to be verified
    (``submodule_span``), not an assumption.
    """

    def __init__(self, parent: LoopModule, pred: Callable, descriptor: str, generator=None,
                 label: Callable | None = None, enum: Callable | None = None):
        super().__init__()
        self.parent = parent
        self.pred = pred
        self.descriptor = descriptor
        self._generator = generator
        self._label = label
        self._enum = enum

    def contains(self, v):
        return self.parent.contains(v) and self.pred(v)

    def _x_series(self, sign, i, v):
        return self.parent.x_series(sign, i, v)

    def _phi_eigen(self, i, v):
        return self.parent.phi_eigen(i, v)

    def weight(self, v):
        return self.parent.weight(v)

    def crystal_label(self, v):
        return self._label(v) if self._label else self.parent.crystal_label(v)

    def support_nodes(self, v):
        return self.parent.support_nodes(v)

    def generator(self):
        return self._generator if self._generator is not None else self.parent.generator()

    def basis_enum(self, window):
        if self._enum is not None:
            return self._enum(window)
        return [v for v in self.parent.basis_enum(window) if self.pred(v)]

    def __getattr__(self, name):
        # expose parent attributes such as ``modules`` and ``pole_orders``
        if name in ("parent", "pred", "_label", "_enum", "_generator"):
            raise AttributeError(name)
        return getattr(self.parent, name)


# ---------------------------------------------------------------------------
# constructors


def fundamental_plus(ell: int, a: SpectralParam) -> FundamentalPlus:
    return FundamentalPlus(ell, a)


def fundamental_minus(s: int, a: SpectralParam) -> FundamentalMinus:
    return FundamentalMinus(s, a)


def vector_rep(a: SpectralParam) -> VectorRep:
    return VectorRep(a)


def efl_module(ell: int, a: SpectralParam) -> EFLModule:
    return EFLModule(ell, a)


def fuse(M: LoopModule, N: LoopModule) -> FusionProduct:
    """Binary fusion; nested products stay nested."""
    return FusionProduct([M, N])


def fuse_many(modules: Sequence[LoopModule], descriptor: str | None = None) -> FusionProduct:
    """n-fold fusion with the coproduct iterated on a flat tensor."""
    return FusionProduct(modules, descriptor)


def column_vector(entries: Sequence[int], a: SpectralParam) -> Tensor:
    return Tensor(tuple(Labeled(Box(x), a.shift(-2 * m)) for m, x in enumerate(entries)))


def column_module(k: int, a: SpectralParam) -> SubModule:
    """Span of [[i_1]]_a ⊗ [[i_2]]_{aq^-2} ⊗ ... with i_1 < ... < i_k."""
    parent = fuse_many([VectorRep(a.shift(-2 * m)) for m in range(k)])

    def pred(v):
        xs = [f.tableau.v for f in v.factors]
        return all(x < y for x, y in zip(xs, xs[1:]))

    def enum(window):
        lo, hi = window
        return [column_vector(T.entries, a) for T in rows_in_window(k, lo, hi + 1)]

    return SubModule(
        parent, pred, f"COL({k},{a})",
        generator=column_vector(range(1, k + 1), a),
        label=lambda v: RowTableau(tuple(f.tableau.v for f in v.factors)),
        enum=enum,
    )


def rect_params(ell: int, k: int, a: SpectralParam) -> list[SpectralParam]:
    """Factor parameters a q^{2(j-i)}, column by column, each column top to bottom."""
    return [a.shift(2 * (j - i)) for j in range(1, k + 1) for i in range(1, ell + 1)]


def rect_vector(T: RectTableau, a: SpectralParam) -> Tensor:
    ell, k = T.shape
    return Tensor(tuple(Labeled(Box(x), p) for x, p in zip(T.entries_column_order(), rect_params(ell, k, a))))


def rect_module(ell: int, k: int, a: SpectralParam) -> SubModule:
    """Semistandard l x k tableaux inside the fusion of l*k vector representations."""
    params = rect_params(ell, k, a)
    parent = fuse_many([VectorRep(p) for p in params])

    def label(v):
        xs = [f.tableau.v for f in v.factors]
        return RectTableau.from_columns([xs[m * ell : (m + 1) * ell] for m in range(k)])

    def pred(v):
        try:
            label(v)
        except ValueError:
            return False
        return True

    def enum(window):
        lo, hi = window
        return [rect_vector(T, a) for T in rects_in_window(ell, k, lo, hi + 1)]

    return SubModule(parent, pred, f"RECT({ell},{k},{a})", generator=rect_vector(RectTableau.generator(ell, k), a),
                     label=label, enum=enum)


def efl_fused(ell: int, a: SpectralParam) -> SubModule:
    """The T_l part of FUNDP(l, a) ⊗ FUNDM(0, a q^l)."""
    from .crystal import in_T_ell

    parent = fuse_many([FundamentalPlus(ell, a), FundamentalMinus(0, a.shift(ell))])

    def pred(v):
        return in_T_ell(v.factors[0].tableau, v.factors[1].tableau)

    return SubModule(parent, pred, f"EFLFUSED({ell},{a})")


# ---------------------------------------------------------------------------
# applying generators


def _as_lincomb(v) -> LinComb:
    return v if isinstance(v, LinComb) else LinComb.of(v)


def mode_apply(M: LoopModule, sign: int, i: int, r: int, v) -> LinComb:
    """x^{sign}_{i,r} applied to a basis vector or a LinComb."""
    out = LinComb()
    for u, c in _as_lincomb(v).coeffs.items():
        for t in M.x_series(sign, i, u):
            out.add_term(t.target, c * t.coeff * t.support.power(r))
    return out


def phi_mode_apply(M: LoopModule, i: int, sign: int, m: int, v) -> LinComb:
    """phi^{+}_{i,m} (sign +1) or phi^{-}_{i,-m} (sign -1), m >= 0."""
    direction = AT_ZERO if sign > 0 else AT_INFINITY
    out = LinComb()
    for u, c in _as_lincomb(v).coeffs.items():
        out.add_term(u, c * M.phi_eigen(i, u).mode(direction, m))
    return out


def divided_power_apply(M: LoopModule, i: int, sign: int, k: int, v) -> LinComb:
    cur = _as_lincomb(v)
    for _ in range(k):
        cur = mode_apply(M, sign, i, 0, cur)
        if cur.is_zero():
            return cur
    return cur.scale(qfactorial(k).inverse())


# ---------------------------------------------------------------------------
# truncation and related finite views


@dataclass
class Truncation:
    module: LoopModule
    window: tuple[int, int]
    basis: list

    @property
    def nodes(self) -> range:
        return range(self.window[0], self.window[1] + 1)

    def __len__(self):
        return len(self.basis)

    def __contains__(self, v):
        return v in self._set

    def __post_init__(self):
        self._set = set(self.basis)


def truncate(M: LoopModule, window: tuple[int, int], seed=None, enumerate_basis: bool = False) -> Truncation:
    """Vectors reachable from ``seed`` (default: the generator) with x^{+-}_i, i in window.

    With ``enumerate_basis`` the module's explicit window enumeration is used instead.
    """
    lo, hi = window
    if lo > hi:
        raise ValueError("empty window")
    if enumerate_basis:
        basis = M.basis_enum(window)
    else:
        seeds = [M.generator()] if seed is None else (list(seed) if isinstance(seed, (list, tuple, set)) else [seed])
        seen = set(seeds)
        queue = deque(seeds)
        while queue:
            v = queue.popleft()
            for i in range(lo, hi + 1):
                for sign in (1, -1):
                    for t in M.x_series(sign, i, v):
                        if t.target not in seen:
                            seen.add(t.target)
                            queue.append(t.target)
        basis = list(seen)
    basis.sort(key=str)
    return Truncation(M, (lo, hi), basis)


def fusion_defined(ell: int, d: int | None, nodes: Iterable[int] = (0,)) -> bool:
    """Whether EFL(l, a) ⊗ EFL(l, b) is defined for a/b = q^d (None: generic b)."""
    return pole_scan(ell, d, nodes)["defined"]


def pole_scan(ell: int, d: int | None, nodes: Iterable[int] = (0,)) -> dict:
    """Scan every coproduct coefficient at the given nodes for a pole.

    Only rows containing i or i+1 matter at node i (elsewhere the action and
    the eigenvalue are trivial); entries in [i - l, i + l + 1] realise every
    pair of positions, and the action is translation invariant in the node.
    """
    a = SpectralParam("a")
    b = SpectralParam("b") if d is None else a.shift(-d)
    F = fuse_many([EFLModule(ell, a), EFLModule(ell, b)])
    checked = 0
    for i in nodes:
        rows = [T for T in rows_in_window(ell, i - ell, i + ell + 1) if T.contains(i) or T.contains(i + 1)]
        for T1 in rows:
            for T2 in rows:
                v = Tensor((Labeled(T1, a), Labeled(T2, b)))
                for sign in (1, -1):
                    checked += 1
                    for c, order in F.pole_orders(sign, i, v):
                        if order < 0:
                            return {"ell": ell, "d": d, "defined": False, "checked": checked,
                                    "witness": {"vector": str(v), "node": i, "sign": sign, "point": str(c)}}
    return {"ell": ell, "d": d, "defined": True, "checked": checked, "witness": None}


def closed_form_defined(ell: int, d: int) -> bool:
    return not (d % 2 == 0 and -2 * ell + 2 <= d <= 2 * ell - 2)


def submodule_span(M: LoopModule, pred: Callable, window: tuple[int, int], modes: int = 0,
                   basis: Iterable | None = None) -> dict:
    """Check that every windowed mode keeps pred-vectors inside the pred-span."""
    lo, hi = window
    vectors = [v for v in (basis if basis is not None else M.basis_enum(window)) if pred(v)]
    violations = []
    undefined = []
    for v in vectors:
        for i in range(lo, hi + 1):
            for sign in (1, -1):
                try:
                    terms = M.x_series(sign, i, v)
                except FusionUndefined as exc:
                    undefined.append({"vector": str(v), "node": i, "sign": sign, "point": str(exc.point)})
                    continue
                for r in range(-modes, modes + 1):
                    res = mode_apply(M, sign, i, r, v)
                    for t, c in res.coeffs.items():
                        if not pred(t):
                            violations.append({"vector": str(v), "node": i, "sign": sign, "mode": r,
                                               "target": str(t), "coeff": str(c)})
    return {
        "check": "submodule_span",
        "window": [lo, hi],
        "vectors": len(vectors),
        "ok": not violations and not undefined,
        "violations": violations[:20],
        "undefined": undefined[:20],
    }


def iso_column_to_efl(k: int, a: SpectralParam, window: tuple[int, int], modes: int = 2) -> dict:
    """Verify that T -> [[i_1]]_a ⊗ ... ⊗ [[i_k]]_{a q^{-2(k-1)}} intertwines COL(k,a) and EFL(k, a q^{1-k})."""
    C = column_module(k, a)
    E = EFLModule(k, a.shift(1 - k))
    lo, hi = window
    table = []
    mismatches = []
    for Lv in E.basis_enum(window):
        T = Lv.tableau
        f = column_vector(T.entries, a)
        table.append((str(Lv), str(f)))
        for i in range(lo, hi + 1):
            if C.phi_eigen(i, f) != E.phi_eigen(i, Lv):
                mismatches.append({"vector": str(Lv), "node": i, "what": "phi"})
            for sign in (1, -1):
                for r in range(-modes, modes + 1):
                    lhs = mode_apply(C, sign, i, r, f)
                    img = LinComb()
                    for t, c in mode_apply(E, sign, i, r, Lv).coeffs.items():
                        img.add_term(column_vector(t.tableau.entries, a), c)
                    if lhs != img:
                        mismatches.append({"vector": str(Lv), "node": i, "sign": sign, "mode": r,
                                           "column_side": str(lhs), "efl_side": str(img)})
    return {"check": "column-iso", "k": k, "param": str(a), "window": [lo, hi], "vectors": len(table),
            "ok": not mismatches, "mismatches": mismatches[:20], "table": table[:10]}
