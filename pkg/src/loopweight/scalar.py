"""Exact coefficients: rational functions in q and formal spectral base symbols.

Numerators and denominators are integer polynomials handled by FLINT
(``fmpz_mpoly``).  Negative powers of q or of a base symbol are carried in
the denominator, so every Laurent polynomial is a fraction with a monomial
denominator.  Fractions are kept reduced with a positive leading
denominator coefficient, which makes equality structural.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable

import flint

MAX_SYMBOLS = 8

_CTX = flint.fmpz_mpoly_ctx.get(("q",) + tuple(f"s{k}" for k in range(MAX_SYMBOLS)), "lex")
_GENS = _CTX.gens()
_NVARS = MAX_SYMBOLS + 1
_ZERO_EXP = (0,) * _NVARS


class PoleError(ArithmeticError):
    """psi evaluated where its denominator 1 - x vanishes."""


class InverseOfZeroError(ArithmeticError):
    """psi^{-1} evaluated at x = q^2, where psi itself vanishes."""


# ---------------------------------------------------------------------------
# base-symbol registry (append only)

_symbols: list[str] = []
_slot_of: dict[str, int] = {}
_lock = threading.Lock()


def register_symbol(name: str) -> int:
    """Return the slot of ``name``, registering it on first use."""
    slot = _slot_of.get(name)
    if slot is not None:
        return slot
    if not name or not (name[0].isalpha()) or not name.replace("_", "a").isalnum() or name == "q":
        raise ValueError(f"invalid base symbol name {name!r}")
    with _lock:
        slot = _slot_of.get(name)
        if slot is None:
            if len(_symbols) >= MAX_SYMBOLS:
                raise ValueError(f"at most {MAX_SYMBOLS} base symbols can be registered")
            slot = len(_symbols)
            _symbols.append(name)
            _slot_of[name] = slot
    return slot


def registered_symbols() -> tuple[str, ...]:
    return tuple(_symbols)


def _var_names() -> list[str]:
    return ["q"] + list(_symbols)


def _poly_from_terms(terms: Iterable[tuple[tuple[int, ...], int]]):
    d: dict[tuple[int, ...], int] = {}
    for exps, c in terms:
        exps = tuple(exps) + (0,) * (_NVARS - len(exps))
        d[exps] = d.get(exps, 0) + int(c)
    d = {e: c for e, c in d.items() if c}
    return _CTX.from_dict(d) if d else _CTX.from_dict({})


def _monomial_poly(exps: tuple[int, ...], coeff: int = 1):
    return _CTX.from_dict({tuple(exps) + (0,) * (_NVARS - len(exps)): coeff})


_P_ONE = _CTX.from_dict({_ZERO_EXP: 1})
_P_ZERO = _CTX.from_dict({})


class Scalar:
    """Reduced fraction ``num/den`` of integer polynomials in q and base symbols."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _reduced: bool = False):
        if den is None:
            den = _P_ONE
        if not _reduced:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors
    @staticmethod
    def from_int(n: int) -> "Scalar":
        return Scalar(_P_ONE * int(n), _P_ONE, _reduced=True)

    @staticmethod
    def monomial(qexp: int = 0, symbols: dict[str, int] | None = None, coeff: int = 1) -> "Scalar":
        """coeff * q^qexp * prod(sym^e)."""
        pos = [0] * _NVARS
        neg = [0] * _NVARS
        pos[0] += max(qexp, 0)
        neg[0] += max(-qexp, 0)
        for name, e in (symbols or {}).items():
            k = register_symbol(name) + 1
            pos[k] += max(e, 0)
            neg[k] += max(-e, 0)
        return Scalar(_monomial_poly(tuple(pos), coeff), _monomial_poly(tuple(neg)), _reduced=coeff != 0)

    # -- predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def is_laurent(self) -> bool:
        return len(self.den) == 1

    def __bool__(self):
        return not self.num.is_zero()

    # -- arithmetic
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if a.is_zero():
            return other
        if c.is_zero():
            return self
        if b == d:
            n = a + c
            if n.is_zero():
                return ZERO
            if len(b) == 1 and b.is_one():
                return Scalar(n, b, _reduced=True)
            g = n.gcd(b)
            if not g.is_one():
                n, b = n / g, b / g
                if not _positive_lead(b):
                    n, b = -n, -b
            return Scalar(n, b, _reduced=True)
        g = b.gcd(d)
        if g.is_one():
            n = a * d + c * b
            den = b * d
        else:
            b1 = b / g
            d1 = d / g
            n = a * d1 + c * b1
            den = b * d1
        if n.is_zero():
            return ZERO
        return Scalar(n, den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.num, self.den, _reduced=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.num, self.den, other.num, other.den
        if a.is_zero() or c.is_zero():
            return ZERO
        if c.is_one() and d.is_one():
            return self
        if a.is_one() and b.is_one():
            return other
        if not d.is_one():
            g = a.gcd(d)
            if not g.is_one():
                a = a / g
                d = d / g
        if not b.is_one():
            g = c.gcd(b)
            if not g.is_one():
                c = c / g
                b = b / g
        num = a * c
        den = b * d
        if not _positive_lead(den):
            num, den = -num, -den
        return Scalar(num, den, _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        num, den = self.den, self.num
        if not _positive_lead(den):
            num, den = -num, -den
        return Scalar(num, den, _reduced=True)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return Scalar(self.num ** k, self.den ** k, _reduced=True)

    # -- comparison / hashing
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    # -- rendering / serialization
    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return to_text(self)

    def to_json(self) -> dict:
        def dump(p):
            return [[int(c)] + [int(v) for v in e[: len(_symbols) + 1]] for e, c in p.terms()]

        return {"vars": _var_names(), "num": dump(self.num), "den": dump(self.den)}

    @staticmethod
    def from_json(obj: dict) -> "Scalar":
        names = obj.get("vars", _var_names())
        slots = [0] + [register_symbol(n) + 1 for n in names[1:]]

        def load(rows):
            terms = []
            for row in rows:
                exps = [0] * _NVARS
                for name_idx, e in enumerate(row[1:]):
                    exps[slots[name_idx]] += int(e)
                terms.append((tuple(exps), int(row[0])))
            return _poly_from_terms(terms)

        return Scalar(load(obj["num"]), load(obj["den"]))


def _positive_lead(p) -> bool:
    return int(p.leading_coefficient()) > 0


def _normalize(num, den):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return _P_ZERO, _P_ONE
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    if not _positive_lead(den):
        num, den = -num, -den
    return num, den


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar.from_int(x)
    if isinstance(x, SpectralParam):
        return x.scalar()
    return NotImplemented


def _render_monomial(exps, names) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 0:
            continue
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _render_terms(terms, names) -> str:
    out = []
    for exps, c in terms:
        mono = _render_monomial(exps, names)
        c = int(c)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(out) if out else "0"


def to_text(x: Scalar) -> str:
    """Canonical text.  Laurent polynomials print with negative exponents."""
    names = _var_names()
    n = len(names)
    if x.num.is_zero():
        return "0"
    if len(x.den) == 1:
        dexps, dc = next(iter(x.den.terms()))
        dc = int(dc)
        terms = [(tuple(int(e[i]) - int(dexps[i]) for i in range(n)), int(c)) for e, c in x.num.terms()]
        if dc == 1:
            return _render_terms(terms, names)
        return f"({_render_terms(terms, names)})/{dc}"
    num = [(e[:n], c) for e, c in x.num.terms()]
    den = [(e[:n], c) for e, c in x.den.terms()]
    return f"({_render_terms(num, names)})/({_render_terms(den, names)})"


ZERO = Scalar(_P_ZERO, _P_ONE, _reduced=True)
ONE = Scalar(_P_ONE, _P_ONE, _reduced=True)
Q = Scalar.monomial(1)
Q_INV = Scalar.monomial(-1)


def qpow(k: int) -> Scalar:
    return Scalar.monomial(k)


@dataclass(frozen=True, order=True)
class SpectralParam:
    """The spectral parameter ``group * q**qexp``."""

    group: str
    qexp: int = 0

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.group, self.qexp))
            object.__setattr__(self, "_hash", h)
        return h

    def __post_init__(self):
        register_symbol(self.group)

    def shift(self, k: int) -> "SpectralParam":
        return SpectralParam(self.group, self.qexp + k)

    def scalar(self) -> Scalar:
        return Scalar.monomial(self.qexp, {self.group: 1})

    def power(self, r: int) -> Scalar:
        """c**r as a Scalar."""
        return Scalar.monomial(self.qexp * r, {self.group: r})

    def ratio(self, other: "SpectralParam") -> Scalar:
        if self.group == other.group:
            return qpow(self.qexp - other.qexp)
        return Scalar.monomial(self.qexp - other.qexp, {self.group: 1, other.group: -1})

    def same_point(self, other: "SpectralParam") -> bool:
        return self == other

    def __str__(self):
        if self.qexp == 0:
            return self.group
        return f"{self.group}*q^{self.qexp}"

    @staticmethod
    def parse(text: str) -> "SpectralParam":
        """Parse ``a0``, ``a0*q^-2``, ``a0q^3`` or ``q^2*a0``."""
        s = text.replace(" ", "")
        qexp = 0
        group = None
        for part in s.split("*"):
            if not part:
                raise ValueError(f"bad spectral parameter {text!r}")
            if part == "q":
                qexp += 1
            elif part.startswith("q^"):
                qexp += int(part[2:].strip("{}()"))
            elif "q^" in part:
                g, e = part.split("q^", 1)
                if group is not None:
                    raise ValueError(f"two base symbols in {text!r}")
                group = g
                qexp += int(e.strip("{}()"))
            else:
                if group is not None:
                    raise ValueError(f"two base symbols in {text!r}")
                group = part
        if group is None:
            raise ValueError(f"no base symbol in {text!r}")
        return SpectralParam(group, qexp)


# ---------------------------------------------------------------------------
# q-combinatorics


def qint(l: int) -> Scalar:
    """The quantum integer [l] = (q^l - q^-l)/(q - q^-1)."""
    if l < 0:
        return -qint(-l)
    out = ZERO
    for k in range(l):
        out = out + qpow(l - 1 - 2 * k)
    return out


def qfactorial(k: int) -> Scalar:
    if k < 0:
        raise ValueError("negative factorial")
    out = ONE
    for j in range(1, k + 1):
        out = out * qint(j)
    return out


def qbinomial(m: int, mp: int) -> Scalar:
    if m < 0 or mp < 0 or mp > m:
        raise ValueError(f"qbinomial({m}, {mp}) needs 0 <= m' <= m")
    return qfactorial(m) / (qfactorial(mp) * qfactorial(m - mp))


# ---------------------------------------------------------------------------
# psi(z) = (q - q^-1 z)/(1 - z)


def psi_eval(x: Scalar) -> Scalar:
    x = _coerce(x)
    den = ONE - x
    if den.is_zero():
        raise PoleError("psi has a pole at 1")
    return (Q - Q_INV * x) / den


def psi_eval_inverse(x: Scalar) -> Scalar:
    x = _coerce(x)
    den = Q - Q_INV * x
    if den.is_zero():
        raise InverseOfZeroError("psi vanishes at q^2")
    return (ONE - x) / den


AT_ZERO = "at-zero"
AT_INFINITY = "at-infinity"


def psi_mode(c, sign: int, direction: str, m: int) -> Scalar:
    """Coefficient of z^m (at zero) or z^-m (at infinity) in psi(cz)^sign."""
    if m < 0:
        raise ValueError("mode index must be >= 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cs = c.scalar() if isinstance(c, SpectralParam) else _coerce(c)
    if direction == AT_ZERO:
        if sign == 1:
            return Q if m == 0 else (Q - Q_INV) * cs ** m
        return Q_INV if m == 0 else qpow(-2 * m) * (Q_INV - Q) * cs ** m
    if direction == AT_INFINITY:
        if sign == 1:
            return Q_INV if m == 0 else (Q_INV - Q) * cs ** (-m)
        return Q if m == 0 else qpow(2 * m) * (Q - Q_INV) * cs ** (-m)
    raise ValueError(f"unknown direction {direction!r}")
