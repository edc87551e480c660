"""Reproduction checks run by ``gapnum verify-paper``.

Each claim pairs a frozen expected value with the computation that should
reproduce it.  ``fast`` skips every claim needing a digraph of width 11 or
more; ``full`` runs them all.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .bounds import has_negative_cycle, minimal_m
from .digraph import CapacityError, get_digraph
from .formulas import expected_gap_number, strip_decomposition_bound
from .oracle import brute_gap_number
from .solver import gap_number, gap_number_table, validate_tiling
from .structure import cylinder_search, max_gapless_run, validate_cylinder

NODE_COUNTS = {3: 16, 5: 182, 7: 1757, 9: 15496, 11: 129500}
MINIMAL_M = {3: 2, 5: 6, 7: 12, 9: 38, 11: 96}
COLUMNS_PER_GAP = {3: 3, 5: 5, 7: 7, 9: 17, 11: 35}
GAPLESS_RUNS = {5: 6, 7: 8, 9: 16, 11: 42}
CYLINDERS = [(3, 3, 1, True), (5, 5, 1, True), (7, 7, 1, True), (9, 17, 1, True),
             (9, 17, 0, False), (11, 35, 1, True), (13, 16, 0, True), (15, 16, 0, True)]
ORACLE_GRID = [(w, n) for w in range(1, 6) for n in range(1, 9)] + \
    [(6, n) for n in range(1, 9)] + [(7, n) for n in range(1, 8)]


@dataclass(frozen=True)
class Claim:
    label: str
    level: str  # "fast" or "full"
    check: Callable[[], tuple[bool, str]]


@dataclass(frozen=True)
class ClaimResult:
    label: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.label}: {self.detail}"

    def to_dict(self) -> dict:
        return {"label": self.label, "ok": self.ok, "detail": self.detail}


def _eq(got, want) -> tuple[bool, str]:
    return got == want, f"got {got}, expected {want}"


def _nodes(w):
    return lambda: _eq(get_digraph(w).node_count, NODE_COUNTS[w])


def _weight(w):
    def check():
        d = minimal_m(get_digraph(w))
        got = (d.minimal_m, str(d.columns_per_monomino))
        return _eq(got, (MINIMAL_M[w], str(Fraction(COLUMNS_PER_GAP[w]))))
    return check


def _width3():
    tab = gap_number_table(3, 60)
    bad = [n for n in range(1, 61) if tab[n] != expected_gap_number(3, n)]
    return not bad, f"mismatches at n = {bad}" if bad else "all n in 1..60 match"


def _run(w):
    def check():
        r = max_gapless_run(w)
        return _eq(r.max_gapless_columns, GAPLESS_RUNS[w])
    return check


def _run13():
    r = max_gapless_run(13)
    return r.unbounded, "unbounded" if r.unbounded else f"bounded at {r.max_gapless_columns}"


def _density13():
    d = minimal_m(get_digraph(13))
    return d.unbounded, "no finite weight" if d.unbounded else f"m = {d.minimal_m}"


def _cylinder(w, p, mu, exists):
    def check():
        g = get_digraph(w)
        wit = cylinder_search(w, p, mu, digraph=g)
        if not exists:
            return wit is None, "none exists" if wit is None else "unexpected cylinder found"
        if wit is None:
            return False, "no cylinder found"
        rep = validate_cylinder(g, wit)
        return rep.ok, f"{len(wit.cycle)}-edge closed walk, {wit.monominoes} monominoes" if rep.ok \
            else f"invalid witness: {rep.error}"
    return check


def _table_vs_formula(w, n_max):
    def check():
        tab = gap_number_table(w, n_max)
        bad = [(n, int(tab[n])) for n in range(1, n_max + 1) if tab[n] != expected_gap_number(w, n)]
        return not bad, f"mismatches {bad}" if bad else f"n in 1..{n_max} match"
    return check


def _width10():
    tab = gap_number_table(10, 27)
    got = {n: int(tab[n]) for n in (3, 7, 11, 15, 19, 23, 25, 27)}
    want = {3: 6, 7: 6, 11: 6, 15: 6, 19: 6, 23: 6, 25: 2, 27: 2}
    return _eq(got, want)


def _width13():
    try:
        tab = gap_number_table(13, 20)
    except CapacityError as exc:
        return False, f"capacity: {exc}"
    bad = [(n, int(tab[n])) for n in range(1, 21) if tab[n] != expected_gap_number(13, n)]
    return not bad, f"mismatches {bad}" if bad else f"n in 1..20 match, M(13,3) = {tab[3]}, M(13,14) = {tab[14]}"


def _decomposition():
    worst = max(strip_decomposition_bound(m, n).bound for m in range(12, 28) for n in range(12, 28))
    return worst <= 9, f"largest bound over 12..27 is {worst}"


def _oracle():
    bad = [(w, n) for w, n in ORACLE_GRID if brute_gap_number(w, n) != gap_number(w, n).gap_number]
    return not bad, f"disagreements {bad}" if bad else f"{len(ORACLE_GRID)} rectangles agree"


def _walkup_zhan(w_max):
    def check():
        bad = []
        for w in range(1, w_max + 1):
            tab = gap_number_table(w, 60)
            for n in range(1, 61):
                v = int(tab[n])
                if v % 4 != (w * n) % 4 or (v == 0) != (w % 4 == 0 and n % 4 == 0) \
                        or ((w * n) % 4 == 1 and w * n > 1 and v == 1):
                    bad.append((w, n, v))
        return not bad, f"violations {bad[:5]}" if bad else f"w <= {w_max}, n <= 60 consistent"
    return check


def _witnesses():
    for w, n in [(3, 9), (7, 7), (10, 3), (5, 13), (8, 8)]:
        r = gap_number(w, n)
        rep = validate_tiling(r.witness)
        if not rep.ok or rep.monomino_count != r.gap_number:
            return False, f"{w}x{n}: {rep.error or 'count mismatch'}"
    return True, "5 witnesses validate"


def _monotone():
    g = get_digraph(7)
    seq = [has_negative_cycle(g, m) for m in range(0, 16)]
    ok = all(not (b and not a) for a, b in zip(seq, seq[1:])) and seq[11] and not seq[12]
    return ok, "negative cycles exactly for m < 12"


def _level(w: int) -> str:
    return "fast" if w < 11 else "full"


def claims() -> list[Claim]:
    out = []
    for w in (3, 5, 7, 9, 11):
        lvl = _level(w)
        out.append(Claim(f"F_{w} has {NODE_COUNTS[w]} nodes", lvl, _nodes(w)))
    for w in (3, 5, 7, 9, 11):
        lvl = _level(w)
        out.append(Claim(f"width {w}: minimal m = {MINIMAL_M[w]}, one gap per {COLUMNS_PER_GAP[w]} columns",
                         lvl, _weight(w)))
    out.append(Claim("width 13: T-edges alone contain a cycle", "full", _density13))
    out.append(Claim("M(3, n) four-case formula for n <= 60", "fast", _width3))
    for w in (5, 7, 9, 11):
        out.append(Claim(f"width {w}: longest gapless run {GAPLESS_RUNS[w]} columns",
                         _level(w), _run(w)))
    out.append(Claim("width 13: gapless runs are unbounded", "full", _run13))
    for w, p, mu, ex in CYLINDERS:
        what = "exists" if ex else "does not exist"
        out.append(Claim(f"{w} x {p} cylinder with <= {mu} monominoes {what}",
                         _level(w), _cylinder(w, p, mu, ex)))
    out.append(Claim("width 10 exceptional lengths and M(10,25) = M(10,27) = 2", "fast", _width10))
    for w in (2, 4, 6, 8, 10, 12):
        out.append(Claim(f"width {w}: even-width formula for n <= 40", _level(w),
                         _table_vs_formula(w, 40)))
    out.append(Claim("width 13: formula with exceptions for n <= 20", "full", _width13))
    out.append(Claim("strip decomposition needs at most 9 gaps", "fast", _decomposition))
    out.append(Claim("brute force agrees with the digraph solver", "fast", _oracle))
    out.append(Claim("mod 4, zero and single-gap laws", "fast", _walkup_zhan(10)))
    out.append(Claim("mod 4, zero and single-gap laws up to width 12", "full", _walkup_zhan(12)))
    out.append(Claim("witness tilings validate", "fast", _witnesses))
    out.append(Claim("negative cycles are monotone in m", "fast", _monotone))
    return out


def run_claims(level: str = "fast") -> list[ClaimResult]:
    if level not in ("fast", "full"):
        raise ValueError("level must be 'fast' or 'full'")
    results = []
    for c in claims():
        if c.level == "full" and level == "fast":
            continue
        try:
            ok, detail = c.check()
        except (CapacityError, MemoryError) as exc:
            ok, detail = False, f"capacity: {exc}"
        results.append(ClaimResult(c.label, bool(ok), detail))
    return results
