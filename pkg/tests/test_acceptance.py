"""Acceptance criteria 1-10, all with exact (zero-tolerance) equality.

Each test records a PASS/FAIL line in ``conftest.ACCEPTANCE``; pytest prints
the lines in an "acceptance criteria" section at the end of the run.  Running
this file as a script prints them directly.
"""
import itertools
from collections import Counter, deque
from math import comb

import pytest

from conftest import ACCEPTANCE
from loopweight.crystal import RectTableau, extremal_orbit, weyl_reflect
from loopweight.monomial import YMonomial, box
from loopweight.representations import (
    EFLModule,
    column_module,
    column_vector,
    efl_module,
    fuse,
    rect_module,
    truncate,
    vector_rep,
)
from loopweight.scalar import SpectralParam
from loopweight.verify import (
    check_column_iso,
    check_crystal_iso,
    check_extremal,
    check_folded,
    check_fusion_poles,
    check_generic_divided_powers,
    check_relations,
    check_two_construction,
    dominant_monomials,
    truncated_qchar,
)

A = SpectralParam("a")
B = SpectralParam("b")


def record(k: int, ok: bool, msg: str):
    ACCEPTANCE[k] = (ok, msg)
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {msg}")
    assert ok, msg


def guarded(k: int, fn):
    try:
        ok, msg = fn()
    except Exception as exc:  # a crash is a failed criterion, not a missing line
        ok, msg = False, f"raised {type(exc).__name__}: {exc}"
    record(k, ok, msg)


# ---------------------------------------------------------------------------
# independent oracles


def row_sum_oracle(ell: int, a: SpectralParam, lo: int, hi: int) -> Counter:
    """Tableaux sum written out from the box formula, one Y factor at a time."""
    out: Counter = Counter()
    for entries in itertools.combinations(range(lo, hi + 1), ell):
        exps: Counter = Counter()
        for j, x in enumerate(entries, start=1):
            c = a.shift(ell + 1 - 2 * j)
            exps[(x - 1, c.shift(x))] -= 1
            exps[(x, c.shift(x - 1))] += 1
        out[YMonomial(dict(exps))] += 1
    return out


def weyl_weight_orbit(lam, window, depth):
    lo, hi = window
    seen = {lam: 0}
    queue = deque([lam])
    while queue:
        mu = queue.popleft()
        if seen[mu] >= depth:
            continue
        for i in range(lo, hi + 1):
            nu = weyl_reflect(mu, i)
            if nu not in seen:
                seen[nu] = seen[mu] + 1
                queue.append(nu)
    return set(seen)


def forbidden_oracle(ell: int) -> set:
    return set(range(-2 * ell + 2, 2 * ell - 1, 2))


# ---------------------------------------------------------------------------
# criteria


def criterion_1():
    notes = []
    for ell in (1, 2, 3):
        for n in (1, 2):
            E = efl_module(ell, A)
            trunc = truncate(E, (-n, ell + n))
            got = truncated_qchar(E, trunc)
            ref = row_sum_oracle(ell, A, -n, ell + n + 1)
            count = comb(2 * n + ell + 2, ell)
            if got.terms != dict(ref) or got.size() != count or len(trunc) != count:
                return False, f"l={ell} n={n}: {got.size()} terms vs oracle {sum(ref.values())}, binomial {count}"
            notes.append(f"l={ell},n={n}:{count}")
    return True, "q-character equals the tableaux sum (" + ", ".join(notes) + ")"


RELATION_CASES = [
    ("EFL(1,a)", lambda: efl_module(1, A), (-2, 3)),
    ("EFL(2,a)", lambda: efl_module(2, A), (-2, 4)),
    ("VEC(a)", lambda: vector_rep(A), (-2, 3)),
    ("RECT(2,2,a)", lambda: rect_module(2, 2, A), (-2, 4)),
    ("EFL(1,a) x EFL(1,b)", lambda: fuse(efl_module(1, A), efl_module(1, B)), (-2, 3)),
]


def criterion_2():
    notes = []
    for name, make, window in RELATION_CASES:
        cert = check_relations(make(), window, R=2)
        certs = cert.details["certificates"]
        if not cert.ok:
            return False, f"{name}: {cert.details['failures']} residuals, certificate failures {certs['failures'][:1]}"
        notes.append(f"{name}:{cert.params['vectors']}v")
    return True, "every residual is exactly zero, certificates pass (" + ", ".join(notes) + ")"


def criterion_3():
    for ell in (1, 2, 3):
        cert = check_two_construction(ell, (-2, ell + 2), R=2)
        if not cert.ok:
            return False, f"l={ell}: {cert.witnesses[:1]}"
    return True, "fused fundamentals conjugated by Pi match EFL(l) for l=1,2,3, |r|<=2"


def criterion_4():
    for ell in (1, 2, 3, 4):
        cert = check_fusion_poles(ell, (-2 * ell - 2, 2 * ell + 2))
        undefined = {r["d"] for r in cert.details["scan"] if not r["defined"]}
        if undefined != forbidden_oracle(ell):
            return False, f"l={ell}: undefined set {sorted(undefined)}"
        for d, b in cert.details["boundary"].items():
            if not (b["span_closed"] and b["components"] == 2 and b["components_follow_predicate"]):
                return False, f"l={ell} d={d}: {b}"
        if not cert.ok:
            return False, f"l={ell}: {cert.witnesses[:1]}"
    return True, "pole scan equals {-2l+2,...,2l-2}; boundary submodules closed, two components (l<=4)"


def criterion_5():
    for ell in (2, 3):
        cert = check_crystal_iso(ell, (-3, ell + 3))
        if not cert.ok:
            return False, f"l={ell}: {cert.witnesses[:1]}"
    return True, "Pi intertwines e_i, f_i exhaustively on nodes [-3, l+3], l=2,3"


def criterion_6():
    notes = []
    cases = [(f"EFL({ell})", efl_module(ell, A), (-2, ell + 2)) for ell in (1, 2, 3)]
    cases.append(("RECT(2,2)", rect_module(2, 2, A), (-2, 4)))
    for name, M, window in cases:
        v = M.generator()
        cert = check_extremal(M, v, window, 4)
        if not cert.ok:
            return False, f"{name}: {cert.witnesses[:1]}"
        weights = weyl_weight_orbit(M.weight(v), window, 4)
        if cert.details["orbit_size"] != len(weights):
            return False, f"{name}: orbit {cert.details['orbit_size']} vs Weyl weight orbit {len(weights)}"
        notes.append(f"{name}:{len(weights)}")
        if name.startswith("RECT"):
            orbit, _ = extremal_orbit(RectTableau.generator(2, 2), window, 4)
            if not all(t.rows_constant() for t in orbit):
                return False, "RECT(2,2): orbit leaves the rows-constant tableaux"
            if {t.weight() for t in orbit} != weights:
                return False, "RECT(2,2): orbit weights differ from the Weyl orbit"
    return True, "extremal at depth 4; orbit sizes match the Weyl weight orbit (" + ", ".join(notes) + ")"


def criterion_7():
    for k in (2, 3):
        window = (-2, k + 2)
        cert = check_column_iso(k, window, R=2)
        if not cert.ok:
            return False, f"k={k}: {cert.witnesses[:1]}"
        C = column_module(k, A)
        nodes = range(window[0] - 1, window[1] + 2)
        for T in EFLModule(k, A).basis_enum(window):
            f = column_vector(T.tableau.entries, A)
            prod = YMonomial()
            for m, x in enumerate(T.tableau.entries):
                prod = prod * box(x, A.shift(-2 * m))
            if C.lweight(f, nodes) != prod.restrict(nodes):
                return False, f"k={k}: l-weight of {f} is not the box product"
    return True, "column module intertwines with EFL(k) for k=2,3; l-weights are box products"


def criterion_8():
    for ell in (1, 2):
        cert = check_relations(fuse(efl_module(ell, A), efl_module(ell, B)), (-1, ell + 1), R=2)
        if not cert.ok:
            return False, f"l={ell}: relations {cert.witnesses[:1]}"
        dp = check_generic_divided_powers(ell)
        if not dp.ok:
            return False, f"l={ell}: divided powers {dp.witnesses[:1]}"
    return True, "generic EFL(l,a) x EFL(l,b) satisfies the relations; divided powers land with coefficient 1 (l=1,2)"


def criterion_9():
    notes = []
    for ell, n in ((1, 2), (1, 3), (2, 3)):
        assert (n % 2 == 0 and ell <= n + 1) or (n % 2 == 1 and 2 * ell <= n + 1)
        window = (-4, ell + 4)
        E = efl_module(ell, A)
        chi = truncated_qchar(E, truncate(E, window))
        cert = check_folded(chi, n, window)
        if not cert.ok:
            return False, f"(l,n)=({ell},{n}): {cert.witnesses[:1]}"
        notes.append(f"({ell},{n}):{len(cert.details['whitelisted'])} whitelisted")
        if cert.details["frontier"] == 0 and cert.details["whitelisted"]:
            return False, f"(l,n)=({ell},{n}): whitelisted monomials without a frontier"
    return True, "folded characters decompose into strings at every residue (" + ", ".join(notes) + ")"


def criterion_10():
    for ell in (1, 2, 3):
        for n in (1, 2):
            E = efl_module(ell, A)
            window = (-n, ell + n)
            dom = dominant_monomials(E, truncate(E, window), range(window[0], window[1] + 1))
            want = [YMonomial.y(-n + ell - 1, A.shift(-n - 1))]
            if dom != want:
                return False, f"l={ell} n={n}: dominant {list(map(str, dom))}"
    return True, "unique dominant l-weight Y_{-n+l-1, aq^(-n-1)} for l<=3, n<=2"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("k", range(1, 11))
def test_acceptance_criterion(k):
    guarded(k, CRITERIA[k - 1])


if __name__ == "__main__":
    failed = 0
    for k, fn in enumerate(CRITERIA, start=1):
        try:
            guarded(k, fn)
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
