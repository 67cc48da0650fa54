"""Tableaux and their crystal structure for the A_infinity diagram.

Row tableaux and both half-infinite families are strictly increasing
sequences, so the Kashiwara operators only need set membership of ``i``
and ``i+1``.  Tensor products use the signature rule in the convention

    f(u x v) = f(u) x v  if phi(u) > eps(v)  else  u x f(v)
    e(u x v) = e(u) x v  if phi(u) >= eps(v) else  u x e(v)

Rectangular tableaux act through the column reading word (columns right to
left, each read top to bottom).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

_STRING_CAP = 256


# ---------------------------------------------------------------------------
# weights


class Weight:
    """A weight, stored through its pairings with the coroots h_i."""

    __slots__ = ("_items", "_hash")

    def __init__(self, pairings: dict[int, int] | Iterable[tuple[int, int]] = ()):
        d: dict[int, int] = {}
        items = pairings.items() if isinstance(pairings, dict) else pairings
        for i, v in items:
            d[int(i)] = d.get(int(i), 0) + int(v)
        self._items = tuple(sorted((i, v) for i, v in d.items() if v))
        self._hash = hash(self._items)

    def pairing(self, i: int) -> int:
        for j, v in self._items:
            if j == i:
                return v
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self._items)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._items)

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(list(self._items) + list(other._items))

    def __neg__(self) -> "Weight":
        return Weight([(i, -v) for i, v in self._items])

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    def scale(self, k: int) -> "Weight":
        return Weight([(i, k * v) for i, v in self._items])

    def __eq__(self, other):
        return isinstance(other, Weight) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"h_{i}:{v:+d}" for i, v in self._items)
        return "{" + inner + "}"


def fundamental_weight(i: int) -> Weight:
    return Weight({i: 1})


def simple_root(i: int) -> Weight:
    """alpha_i, with alpha_i(h_j) = C_{ji}."""
    return Weight({i: 2, i - 1: -1, i + 1: -1})


def weyl_reflect(lam: Weight, i: int) -> Weight:
    """s_i(lam) = lam - lam(h_i) alpha_i."""
    n = lam.pairing(i)
    if n == 0:
        return lam
    return lam - simple_root(i).scale(n)


# ---------------------------------------------------------------------------
# generic crystal element protocol


class CrystalElement:
    def etilde(self, i: int):
        raise NotImplementedError

    def ftilde(self, i: int):
        raise NotImplementedError

    def weight(self) -> Weight:
        raise NotImplementedError

    def eps(self, i: int) -> int:
        n, t = 0, self.etilde(i)
        while t is not None:
            n += 1
            if n > _STRING_CAP:
                raise RuntimeError("string too long")
            t = t.etilde(i)
        return n

    def phi(self, i: int) -> int:
        n, t = 0, self.ftilde(i)
        while t is not None:
            n += 1
            if n > _STRING_CAP:
                raise RuntimeError("string too long")
            t = t.ftilde(i)
        return n


class _SetTableau(CrystalElement):
    """Strictly increasing sequences; subclasses provide membership."""

    def contains(self, v: int) -> bool:
        raise NotImplementedError

    def _replace(self, old: int, new: int):
        raise NotImplementedError

    def _weight_nodes(self) -> Iterable[int]:
        raise NotImplementedError

    def etilde(self, i):
        if self.contains(i + 1) and not self.contains(i):
            return self._replace(i + 1, i)
        return None

    def ftilde(self, i):
        if self.contains(i) and not self.contains(i + 1):
            return self._replace(i, i + 1)
        return None

    def eps(self, i):
        return int(self.contains(i + 1) and not self.contains(i))

    def phi(self, i):
        return int(self.contains(i) and not self.contains(i + 1))

    def weight(self) -> Weight:
        return Weight({k: int(self.contains(k)) - int(self.contains(k + 1)) for k in self._weight_nodes()})


@dataclass(frozen=True)
class RowTableau(_SetTableau):
    """(i_1 < i_2 < ... < i_l)."""

    entries: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(x) for x in self.entries)
        object.__setattr__(self, "entries", e)
        if not e:
            raise ValueError("row tableau needs at least one entry")
        if any(x >= y for x, y in zip(e, e[1:])):
            raise ValueError(f"entries must strictly increase: {e}")

    @property
    def shape(self) -> int:
        return len(self.entries)

    def contains(self, v):
        return v in self.entries

    def position(self, v: int) -> int:
        return self.entries.index(v) + 1

    def entry(self, p: int) -> int:
        return self.entries[p - 1]

    def _replace(self, old, new):
        return RowTableau(tuple(sorted(new if x == old else x for x in self.entries)))

    def _weight_nodes(self):
        return set(self.entries) | {x - 1 for x in self.entries}

    def __str__(self):
        return "(" + "<".join(map(str, self.entries)) + ")"

    def to_json(self):
        return list(self.entries)


@dataclass(frozen=True)
class HalfInfPlus(_SetTableau):
    """(... < i_{l-1} < i_l) with i_j = j for j <= alpha; only the tail is stored."""

    ell: int
    alpha: int
    tail: tuple[int, ...] = ()

    def __post_init__(self):
        tail = tuple(int(x) for x in self.tail)
        object.__setattr__(self, "tail", tail)
        if self.alpha > self.ell or len(tail) != self.ell - self.alpha:
            raise ValueError(f"tail length must be ell - alpha: {self!r}")
        if any(x >= y for x, y in zip(tail, tail[1:])):
            raise ValueError("tail must strictly increase")
        if tail and tail[0] <= self.alpha + 1:
            raise ValueError("alpha is not maximal")

    @staticmethod
    def vacuum(ell: int) -> "HalfInfPlus":
        return HalfInfPlus(ell, ell, ())

    @staticmethod
    def from_entries(ell: int, first: int, entries: Sequence[int]) -> "HalfInfPlus":
        """Entries i_first..i_ell; positions below ``first`` hold i_p = p."""
        entries = list(entries)
        if len(entries) != ell - first + 1:
            raise ValueError("wrong number of entries")
        return _plus_normalize(ell, first - 1, entries)

    def contains(self, v):
        return v <= self.alpha or v in self.tail

    def entry(self, p: int) -> int:
        if p > self.ell:
            raise IndexError(p)
        return p if p <= self.alpha else self.tail[p - self.alpha - 1]

    def position(self, v: int) -> int:
        if v <= self.alpha:
            return v
        return self.alpha + 1 + self.tail.index(v)

    def _replace(self, old, new):
        if old <= self.alpha:
            rest = list(range(old + 1, self.alpha + 1)) + [new] + list(self.tail)
            return _plus_normalize(self.ell, old - 1, sorted(rest))
        return _plus_normalize(self.ell, self.alpha, sorted(new if x == old else x for x in self.tail))

    def _weight_nodes(self):
        return {self.alpha} | set(self.tail) | {x - 1 for x in self.tail}

    def is_vacuum(self) -> bool:
        return self.alpha == self.ell

    def __str__(self):
        shown = [self.alpha] if self.alpha <= self.ell else []
        return "(...<" + "<".join(map(str, shown + list(self.tail))) + ")"

    def to_json(self):
        return {"ell": self.ell, "alpha": self.alpha, "tail": list(self.tail)}


def _plus_normalize(ell, alpha, tail):
    tail = list(tail)
    while tail and tail[0] == alpha + 1:
        alpha += 1
        tail.pop(0)
    return HalfInfPlus(ell, alpha, tuple(tail))


@dataclass(frozen=True)
class HalfInfMinus(_SetTableau):
    """(i_{s+1} < i_{s+2} < ...) with i_p = p for p >= beta; only the head is stored."""

    s: int
    beta: int
    head: tuple[int, ...] = ()

    def __post_init__(self):
        head = tuple(int(x) for x in self.head)
        object.__setattr__(self, "head", head)
        if self.beta < self.s + 1 or len(head) != self.beta - 1 - self.s:
            raise ValueError(f"head length must be beta - 1 - s: {self!r}")
        if any(x >= y for x, y in zip(head, head[1:])):
            raise ValueError("head must strictly increase")
        if head and head[-1] >= self.beta - 1:
            raise ValueError("beta is not minimal")

    @staticmethod
    def vacuum(s: int) -> "HalfInfMinus":
        return HalfInfMinus(s, s + 1, ())

    @staticmethod
    def from_entries(s: int, entries: Sequence[int]) -> "HalfInfMinus":
        """Entries i_{s+1}..i_{s+len}; later positions hold i_p = p."""
        return _minus_normalize(s, s + 1 + len(entries), list(entries))

    def contains(self, v):
        return v >= self.beta or v in self.head

    def entry(self, p: int) -> int:
        if p <= self.s:
            raise IndexError(p)
        return p if p >= self.beta else self.head[p - self.s - 1]

    def position(self, v: int) -> int:
        if v >= self.beta:
            return v
        return self.s + 1 + self.head.index(v)

    def _replace(self, old, new):
        if old >= self.beta:
            rest = list(self.head) + list(range(self.beta, old)) + [new]
            return _minus_normalize(self.s, old + 1, sorted(rest))
        return _minus_normalize(self.s, self.beta, sorted(new if x == old else x for x in self.head))

    def _weight_nodes(self):
        return {self.beta - 1} | set(self.head) | {x - 1 for x in self.head}

    def is_vacuum(self) -> bool:
        return self.beta == self.s + 1

    def __str__(self):
        return "(" + "<".join(map(str, list(self.head) + [self.beta])) + "<...)"

    def to_json(self):
        return {"s": self.s, "beta": self.beta, "head": list(self.head)}


def _minus_normalize(s, beta, head):
    head = list(head)
    while head and head[-1] == beta - 1:
        beta -= 1
        head.pop()
    return HalfInfMinus(s, beta, tuple(head))


def alpha_of(t: HalfInfPlus) -> int:
    return t.alpha


def beta_of(t: HalfInfMinus) -> int:
    return t.beta


# ---------------------------------------------------------------------------
# tensor products


def _acting_factor(stats: Sequence[tuple[int, int]], lowering: bool):
    """Index of the factor hit by f (lowering) or e, via bracket cancellation."""
    open_plus: list[int] = []
    free_minus: list[int] = []
    for k, (e, p) in enumerate(stats):
        for _ in range(e):
            if open_plus:
                open_plus.pop()
            else:
                free_minus.append(k)
        open_plus.extend([k] * p)
    if lowering:
        return open_plus[0] if open_plus else None
    return free_minus[-1] if free_minus else None


def _signature_counts(stats):
    open_plus = 0
    free_minus = 0
    for e, p in stats:
        m = min(e, open_plus)
        open_plus -= m
        free_minus += e - m
        open_plus += p
    return free_minus, open_plus


@dataclass(frozen=True)
class TensorWord(CrystalElement):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("empty tensor word")

    def _stats(self, i):
        return [(f.eps(i), f.phi(i)) for f in self.factors]

    def _act(self, i, lowering):
        k = _acting_factor(self._stats(i), lowering)
        if k is None:
            return None
        f = self.factors[k]
        g = f.ftilde(i) if lowering else f.etilde(i)
        if g is None:
            return None
        return TensorWord(self.factors[:k] + (g,) + self.factors[k + 1 :])

    def etilde(self, i):
        return self._act(i, False)

    def ftilde(self, i):
        return self._act(i, True)

    def eps(self, i):
        return _signature_counts(self._stats(i))[0]

    def phi(self, i):
        return _signature_counts(self._stats(i))[1]

    def weight(self):
        w = Weight()
        for f in self.factors:
            w = w + f.weight()
        return w

    def __len__(self):
        return len(self.factors)

    def __getitem__(self, k):
        return self.factors[k]

    def __str__(self):
        return " ⊗ ".join(str(f) for f in self.factors)

    def to_json(self):
        return [f.to_json() for f in self.factors]


def tensor_etilde(i: int, w: TensorWord):
    return w.etilde(i)


def tensor_ftilde(i: int, w: TensorWord):
    return w.ftilde(i)


def etilde(i: int, t):
    return t.etilde(i)


def ftilde(i: int, t):
    return t.ftilde(i)


def weight_of(t) -> Weight:
    return t.weight()


# ---------------------------------------------------------------------------
# rectangles and Kirillov-Reshetikhin tableaux


@dataclass(frozen=True)
class Box(_SetTableau):
    """A single box [[v]]: the basis of the vector representation."""

    v: int

    def contains(self, x):
        return x == self.v

    def position(self, x):
        return 1

    def _replace(self, old, new):
        return Box(new)

    def _weight_nodes(self):
        return (self.v, self.v - 1)

    def __str__(self):
        return f"[{self.v}]"

    def to_json(self):
        return self.v


@dataclass(frozen=True)
class RectTableau(CrystalElement):
    """l x k semistandard tableau, ``rows[i][j]`` = T_{i+1, j+1}."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("rectangular shape required")
        for r in rows:
            if any(x > y for x, y in zip(r, r[1:])):
                raise ValueError(f"rows must weakly increase: {rows}")
        for r1, r2 in zip(rows, rows[1:]):
            if any(x >= y for x, y in zip(r1, r2)):
                raise ValueError(f"columns must strictly increase: {rows}")

    @staticmethod
    def generator(ell: int, k: int) -> "RectTableau":
        return RectTableau(tuple((i,) * k for i in range(1, ell + 1)))

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]]) -> "RectTableau":
        return RectTableau(tuple(zip(*cols)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(c) for c in zip(*self.rows)]

    def entries_column_order(self) -> list[int]:
        """T_{1,1}, T_{2,1}, ..., T_{l,1}, T_{1,2}, ...; the order of the tensor factors."""
        return [x for c in self.columns() for x in c]

    def reading_word(self) -> TensorWord:
        return TensorWord(tuple(Box(x) for c in reversed(self.columns()) for x in c))

    @staticmethod
    def _from_reading(ell: int, k: int, word: TensorWord) -> "RectTableau":
        vals = [b.v for b in word.factors]
        cols = [vals[m * ell : (m + 1) * ell] for m in range(k)]
        return RectTableau.from_columns(list(reversed(cols)))

    def _act(self, i, lowering):
        w = self.reading_word()
        w2 = w.ftilde(i) if lowering else w.etilde(i)
        if w2 is None:
            return None
        ell, k = self.shape
        return RectTableau._from_reading(ell, k, w2)

    def etilde(self, i):
        return self._act(i, False)

    def ftilde(self, i):
        return self._act(i, True)

    def eps(self, i):
        return self.reading_word().eps(i)

    def phi(self, i):
        return self.reading_word().phi(i)

    def weight(self):
        d: dict[int, int] = {}
        for r in self.rows:
            for x in r:
                d[x] = d.get(x, 0) + 1
                d[x - 1] = d.get(x - 1, 0) - 1
        return Weight(d)

    def rows_constant(self) -> bool:
        return all(len(set(r)) == 1 for r in self.rows)

    def __str__(self):
        return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in self.rows) + "]"

    def to_json(self):
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class KRTableau:
    """k half-infinite columns of shape l with weakly increasing rows."""

    ell: int
    columns: tuple[HalfInfPlus, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        if not self.columns or any(c.ell != self.ell for c in self.columns):
            raise ValueError("columns must share the shape")
        lo = min(c.alpha for c in self.columns) + 1
        for c1, c2 in zip(self.columns, self.columns[1:]):
            for p in range(lo, self.ell + 1):
                if c1.entry(p) > c2.entry(p):
                    raise ValueError("rows must weakly increase")

    @staticmethod
    def vacuum(ell: int, k: int) -> "KRTableau":
        return KRTableau(ell, (HalfInfPlus.vacuum(ell),) * k)

    @property
    def k(self) -> int:
        return len(self.columns)

    def weight(self) -> Weight:
        w = Weight()
        for c in self.columns:
            w = w + c.weight()
        return w

    def __str__(self):
        return " | ".join(str(c) for c in self.columns)


# ---------------------------------------------------------------------------
# the set T_l and the bijection with row tableaux


def in_T_ell(T: HalfInfPlus, Tp: HalfInfMinus) -> bool:
    return T.alpha >= Tp.beta - 1


def pi_iso(w) -> RowTableau:
    """(T x T') -> (j_1 < ... < j_{alpha_T} < i_{alpha_T + 1} < ... < i_l)."""
    T, Tp = (w.factors if isinstance(w, TensorWord) else w)
    if not isinstance(T, HalfInfPlus) or not isinstance(Tp, HalfInfMinus) or Tp.s != 0:
        raise TypeError("expected HalfInfPlus x HalfInfMinus(anchor 0)")
    if not in_T_ell(T, Tp):
        raise ValueError(f"{T} x {Tp} is not in T_l")
    a = T.alpha
    return RowTableau(tuple(Tp.entry(p) for p in range(1, a + 1)) + tuple(T.entry(p) for p in range(a + 1, T.ell + 1)))


def pi_inv(row: RowTableau) -> TensorWord:
    ell = row.shape
    upper = [max(row.entry(p), p) for p in range(1, ell + 1)]
    lower = [min(row.entry(p), p) for p in range(1, ell + 1)]
    return TensorWord((HalfInfPlus.from_entries(ell, 1, upper), HalfInfMinus.from_entries(0, lower)))


# ---------------------------------------------------------------------------
# enumeration


def rows_in_window(ell: int, lo: int, hi: int) -> Iterator[RowTableau]:
    for c in itertools.combinations(range(lo, hi + 1), ell):
        yield RowTableau(c)


def rects_in_window(ell: int, k: int, lo: int, hi: int) -> Iterator[RectTableau]:
    cols = list(itertools.combinations(range(lo, hi + 1), ell))
    for choice in itertools.combinations_with_replacement(range(len(cols)), k):
        cs = [cols[m] for m in choice]
        # combinations_with_replacement yields non-decreasing column indices; rows
        # must still be checked entrywise
        if all(all(x <= y for x, y in zip(c1, c2)) for c1, c2 in zip(cs, cs[1:])):
            yield RectTableau.from_columns(cs)


def kr_in_window(ell: int, k: int, lo: int, hi: int) -> Iterator[KRTableau]:
    """KR tableaux agreeing with the vacuum below lo and with entries <= hi."""
    if lo > ell:
        raise ValueError("window must start at or below the shape")
    cols = [
        HalfInfPlus.from_entries(ell, lo, c)
        for c in itertools.combinations(range(lo, hi + 1), ell - lo + 1)
    ]
    for choice in itertools.product(cols, repeat=k):
        try:
            yield KRTableau(ell, choice)
        except ValueError:
            continue


# ---------------------------------------------------------------------------
# Weyl orbits


def reflect_element(t, i: int):
    """S_i at the crystal level: f^n or e^{-n} with n = wt(t)(h_i)."""
    n = t.weight().pairing(i)
    cur = t
    for _ in range(abs(n)):
        cur = cur.ftilde(i) if n > 0 else cur.etilde(i)
        if cur is None:
            return None
    return cur


def is_extremal_at(t, i: int) -> bool:
    n = t.weight().pairing(i)
    if n >= 0 and t.etilde(i) is None:
        return True
    if n <= 0 and t.ftilde(i) is None:
        return True
    return False


def extremal_orbit(t, window: tuple[int, int], depth: int):
    """Breadth-first orbit under S_i, i in window, up to ``depth`` reflections.

    Returns ``(orbit, certificate)``; the certificate is a dict whose ``ok``
    field is False when some orbit element fails to be i-extremal.
    """
    lo, hi = window
    nodes = range(lo, hi + 1)
    orbit = {t: 0}
    queue = deque([t])
    failure = None
    while queue:
        u = queue.popleft()
        for i in nodes:
            if not is_extremal_at(u, i):
                failure = failure or {"element": str(u), "node": i}
                continue
            if orbit[u] >= depth:
                continue
            v = reflect_element(u, i)
            if v is None:
                failure = failure or {"element": str(u), "node": i, "reason": "reflection undefined"}
                continue
            if v not in orbit:
                orbit[v] = orbit[u] + 1
                queue.append(v)
    cert = {
        "check": "extremal_orbit",
        "start": str(t),
        "window": [lo, hi],
        "depth": depth,
        "size": len(orbit),
        "ok": failure is None,
        "failure": failure,
    }
    return set(orbit), cert
