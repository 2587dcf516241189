"""検証モジュール - 不変条件の一括検査と既知の閉じた形との照合"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Iterable, NamedTuple

from .algebra import (
    Alpha,
    SPoly,
    ZPoly,
    det_cofactor,
    det_fraction_free,
    poly_derivative,
    poly_shift,
)
from .deformation import (
    DeformParams,
    apply_ode_system,
    exp_deform,
    hermite,
    hermite_at_zero,
    m_at_zero,
    m_family,
    m_from_genfunc,
    m_next_in_n,
    m_next_in_s,
    m_organized_by_zero_values,
    m_poly,
    m_raise_s,
    ode_residual,
    ode_system_matrix,
)
from .export import render_s
from .measure import (
    decomposition_residual,
    gaussian_inner,
    inner_table,
    measure_poly,
    measure_poly_from_derivative,
    moment,
    moment_decompose,
    partial_orthogonality,
    total_charge,
    inner_I_direct,
)
from .orthogonal import (
    SingularGramError,
    SquareReport,
    c_coeffs,
    c_coeffs_by_determinants,
    c_poly,
    gram_matrix,
    singular_points,
    verify_square,
    w_poly,
)

SUITES = ("algebra", "deformation", "measure", "orthogonal")


@dataclass(frozen=True)
class Grid:
    """検証する格子 0 ≤ n ≤ n_max、0 ≤ s ≤ s_max"""
    n_max: int
    s_max: int
    alphas: tuple[Alpha, ...] = (Alpha.PLUS, Alpha.MINUS)


class CheckResult(NamedTuple):
    suite: str
    name: str
    passed: bool
    count: int
    detail: str | None


class ClosedFormCheck(NamedTuple):
    name: str
    passed: bool


@dataclass
class VerifyReport:
    grid: Grid
    checks: list[CheckResult]
    singular: list[tuple[int, int, Alpha]]
    squares: list[SquareReport] = field(default_factory=list)
    closed_forms: list[ClosedFormCheck] | None = None

    @property
    def passed(self) -> bool:
        closed_ok = self.closed_forms is None or all(p.passed for p in self.closed_forms)
        return closed_ok and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def _label(point: dict) -> str:
    return " ".join(f"{k}={v.label if isinstance(v, Alpha) else v}" for k, v in point.items())


def _run_check(
    suite: str, name: str, points: Iterable[dict], predicate: Callable[..., bool]
) -> CheckResult:
    """
    格子点ごとに predicate を評価する

    Gram 行列が特異な点は数えずに飛ばす（別途 SINGULAR として報告される）。
    """
    count = 0
    detail = None
    for point in points:
        try:
            ok = predicate(**point)
        except SingularGramError:
            continue
        count += 1
        if not ok and detail is None:
            detail = _label(point)
    return CheckResult(suite, name, detail is None, count, detail)


# ---------------------------------------------------------------- 各スイート


def _algebra_checks(grid: Grid) -> list[Callable[[], CheckResult]]:
    ns = range(grid.n_max + 1)

    def bareiss(k, alpha):
        # ゼロ値の Hankel 行列（成分は s の多項式）
        m = [[m_at_zero(i + j, alpha) for j in range(k)] for i in range(k)]
        return det_fraction_free(m) == det_cofactor(m)

    def shift_inverse(n):
        return poly_shift(poly_shift(hermite(n), Fraction(1, 2)), Fraction(-1, 2)) == hermite(n)

    def appell(n):
        expected = hermite(n - 1).scale(2 * n) if n else ZPoly()
        return poly_derivative(hermite(n)) == expected

    return [
        lambda: _run_check("algebra", "bareiss vs cofactor",
                           [{"k": k, "alpha": a} for a in grid.alphas for k in range(1, min(grid.n_max, 4) + 2)],
                           bareiss),
        lambda: _run_check("algebra", "shift inverse", [{"n": n} for n in ns], shift_inverse),
        lambda: _run_check("algebra", "hermite derivative", [{"n": n} for n in ns], appell),
    ]


def _deformation_checks(grid: Grid) -> list[Callable[[], CheckResult]]:
    ns = range(grid.n_max + 1)
    sym = [{"n": n, "alpha": a} for a in grid.alphas for n in ns]
    num = [{"n": n, "s": s, "alpha": a} for a in grid.alphas for s in range(grid.s_max + 1) for n in ns]

    def hermite_structure(n):
        h = hermite(n)
        parity = h.coeff(n - 1).is_zero() if n >= 1 else True
        return h.leading() == SPoly.constant(2 ** n) and h.coeff(0) == SPoly.constant(hermite_at_zero(n)) and parity

    def routes(n, alpha):
        params = DeformParams(n, alpha)
        m = m_poly(params)
        return (
            m == m_from_genfunc(params)
            and m == m_organized_by_zero_values(n, alpha)
            and m == exp_deform(hermite(n), SPoly.s(), alpha)
        )

    def inverse(n, alpha):
        return exp_deform(m_poly(DeformParams(n, alpha)), -SPoly.s(), alpha) == hermite(n)

    def derivative(n, alpha):
        if n == 0:
            return m_poly(DeformParams(0, alpha)).derivative().is_zero()
        fam = m_family(n, alpha)
        return fam[n].derivative() == fam[n - 1].scale(2 * n)

    def composition(n, s, alpha):
        h = hermite(n)
        first = exp_deform(h, s, alpha)
        return all(
            exp_deform(first, t, alpha) == exp_deform(h, s + t, alpha)
            for t in range(grid.s_max + 1)
        )

    def s_step(n, s, alpha):
        return m_next_in_s(m_family(n, alpha, s), alpha) == m_poly(DeformParams(n, alpha, s + 1))

    def s_symbolic(n, alpha):
        return m_raise_s(m_family(n, alpha, 0), SPoly.s(), alpha) == m_poly(DeformParams(n, alpha))

    def n_step(n, alpha):
        fam = m_family(n + 1, alpha)
        prev = fam[n - 1] if n >= 1 else fam[0]
        return m_next_in_n(fam[n], prev, fam[: n + 1], n, SPoly.s(), alpha) == fam[n + 1]

    def subleading_coefficient(n, alpha):
        if n < 1:
            return True
        return m_poly(DeformParams(n, alpha)).coeff(n - 1) == SPoly.s() * (2 ** n * n * int(alpha))

    def second_coefficient(n, alpha):
        if n < 2:
            return True
        s = SPoly.s()
        expected = (1 - 2 * s - 2 * s * s) * (-(2 ** (n - 1)) * comb(n, 2))
        return m_poly(DeformParams(n, alpha)).coeff(n - 2) == expected

    def ode(n, alpha):
        return ode_residual(n, alpha).is_zero()

    def ode_system(n, alpha):
        system = ode_system_matrix(n, alpha)
        return all(r.is_zero() for r in apply_ode_system(system, m_family(n, alpha)))

    return [
        lambda: _run_check("deformation", "hermite structure", [{"n": n} for n in ns], hermite_structure),
        lambda: _run_check("deformation", "route equivalence", sym, routes),
        lambda: _run_check("deformation", "inverse map", sym, inverse),
        lambda: _run_check("deformation", "derivative recursion", sym, derivative),
        lambda: _run_check("deformation", "composition of levels", num, composition),
        lambda: _run_check("deformation", "s recursion", num, s_step),
        lambda: _run_check("deformation", "symbolic s shift", sym, s_symbolic),
        lambda: _run_check("deformation", "n recursion", sym, n_step),
        lambda: _run_check("deformation", "subleading coefficient", sym, subleading_coefficient),
        lambda: _run_check("deformation", "second coefficient", sym, second_coefficient),
        lambda: _run_check("deformation", "ode residual", sym, ode),
        lambda: _run_check("deformation", "ode system", sym, ode_system),
    ]


def _measure_checks(grid: Grid) -> list[Callable[[], CheckResult]]:
    levels = [{"s": s, "alpha": a} for a in grid.alphas for s in range(grid.s_max + 1)]
    num = [{"n": n, "s": s, "alpha": a}
           for a in grid.alphas for s in range(grid.s_max + 1) for n in range(grid.n_max + 1)]

    def charge(s, alpha):
        return total_charge(s, alpha) == 1

    def derivative_form(s, alpha):
        return measure_poly(s, alpha).poly == measure_poly_from_derivative(s, alpha).poly

    def partial(n, s, alpha):
        return partial_orthogonality(n, s, alpha) == (1 if n == 0 else 0)

    def recursion(s, alpha):
        return (inner_table(grid.n_max, s, alpha, method="direct")
                == inner_table(grid.n_max, s, alpha, method="recursive"))

    def decomposition(n, s, alpha):
        return decomposition_residual(moment_decompose(n, s, alpha)).is_zero()

    def moments(n, s, alpha):
        direct = gaussian_inner(ZPoly.monomial(n), measure_poly(s, alpha).poly)
        return direct == SPoly.constant(moment(n, s, alpha))

    return [
        lambda: _run_check("measure", "total charge", levels, charge),
        lambda: _run_check("measure", "derivative form", levels, derivative_form),
        lambda: _run_check("measure", "partial orthogonality", num, partial),
        lambda: _run_check("measure", "inner recursion", levels, recursion),
        lambda: _run_check("measure", "decomposition identity", num, decomposition),
        lambda: _run_check("measure", "moment", num, moments),
    ]


def _orthogonal_checks(grid: Grid, squares: list[SquareReport]) -> list[Callable[[], CheckResult]]:
    levels = [{"s": s, "alpha": a} for a in grid.alphas for s in range(grid.s_max + 1)]
    num = [{"n": n, "s": s, "alpha": a}
           for a in grid.alphas for s in range(grid.s_max + 1) for n in range(grid.n_max + 1)]
    positive = [p for p in num if p["n"] >= 1]

    def orthogonality(s, alpha):
        rep = measure_poly(s, alpha)
        family = {}
        for n in range(grid.n_max + 1):
            try:
                family[n] = c_poly(n, s, alpha)
            except SingularGramError:
                continue
        if grid.n_max >= 1:
            gram = gram_matrix(grid.n_max, s, alpha)
            norms, dets = gram.norms, gram.dets
        else:
            norms, dets = (Fraction(1),), (Fraction(1),)
        for n, c_n in family.items():
            for m, c_m in family.items():
                value = gaussian_inner(c_n * c_m, rep.poly).constant_value()
                if n != m and value != 0:
                    return False
                if n == m and norms[n] is not None and value != norms[n]:
                    return False
                # N_n = 0 となるのは Δ_n = 0 のときだけ
                if n == m and (value == 0) != (dets[n] == 0):
                    return False
        return True

    def determinant_ratio(n, s, alpha):
        return c_coeffs(n, s, alpha) == c_coeffs_by_determinants(n, s, alpha)

    def degeneration(n):
        return c_poly(n, 0, Alpha.PLUS) == w_poly(n, 0, Alpha.PLUS) == hermite(n)

    def square(n, s, alpha):
        report = verify_square(n, s, alpha)
        squares.append(report)
        return report.passed

    return [
        lambda: _run_check("orthogonal", "orthogonality", levels, orthogonality),
        lambda: _run_check("orthogonal", "determinant ratio", positive, determinant_ratio),
        lambda: _run_check("orthogonal", "s=0 degeneration",
                           [{"n": n} for n in range(grid.n_max + 1)], degeneration),
        lambda: _run_check("orthogonal", "commuting square", num, square),
    ]


# ---------------------------------------------------------------- 閉じた形


def _m_explicit(n: int, alpha: Alpha) -> ZPoly:
    a = int(alpha)
    s = SPoly.s()
    rows = {
        0: [1],
        1: [2 * a * s, 2],
        2: [4 * (s * (s + 1)) - 2, 8 * a * s, 4],
        # 定数項は 3 経路（s 展開、ゼロ値、母関数）で一致する値を採る
        3: [a * (8 * (s * (s + 1) * (s + 2)) - 12 * s), 24 * (s * (s + 1)) - 12, 24 * a * s, 8],
    }
    return ZPoly(tuple(SPoly.coerce(c) for c in rows[n]))


def _z_table(s: int, alpha: Alpha) -> dict[int, Fraction]:
    a = int(alpha)
    table = {s - 1: Fraction(-s * a), s: Fraction(a, 2), s + 1: Fraction(-a, 2)}
    return {p: c for p, c in sorted(table.items()) if c != 0}


def _z2_table(s: int) -> dict[int, Fraction]:
    table = {
        s - 2: Fraction(s * (s - 1)),
        s - 1: Fraction(-s),
        s: Fraction(s) + Fraction(3, 4),
        s + 1: Fraction(-1, 2),
        s + 2: Fraction(1, 4),
    }
    return {p: c for p, c in sorted(table.items()) if c != 0}


def closed_form_checks(alphas: Iterable[Alpha] = (Alpha.PLUS, Alpha.MINUS)) -> list[ClosedFormCheck]:
    """
    既知の明示式を再現できるかを確認する

    範囲は固定: M は n ≤ 3、I は 0 ≤ s ≤ 5（I_n1 は 2 ≤ n ≤ 8）。
    """
    alphas = tuple(alphas)
    ss = range(6)

    def all_of(items) -> bool:
        return all(items)

    checks = [
        ClosedFormCheck("M explicit list", all_of(
            m_poly(DeformParams(n, a)) == _m_explicit(n, a) for a in alphas for n in range(4)
        )),
        ClosedFormCheck("I_n1 closed form", all_of(
            inner_I_direct(n, 1, s, a) == -((2 * int(a)) ** (n + 1)) * factorial(n) * s
            for a in alphas for s in ss for n in range(2, 9)
        )),
        ClosedFormCheck("I_22 closed form", all_of(
            inner_I_direct(2, 2, s, a) == 16 * (2 * s * s - 8 * s + Fraction(1, 2))
            for a in alphas for s in ss
        )),
        ClosedFormCheck("I_32 closed form", all_of(
            inner_I_direct(3, 2, s, a) == 384 * s * (s - Fraction(5, 2)) * int(a)
            for a in alphas for s in ss
        )),
        ClosedFormCheck("z decomposition", all_of(
            moment_decompose(1, s, a).coeffs == _z_table(s, a) for a in alphas for s in ss
        )),
        ClosedFormCheck("z^2 decomposition", all_of(
            moment_decompose(2, s, a).coeffs == _z2_table(s) for a in alphas for s in ss
        )),
    ]
    return checks


# ---------------------------------------------------------------- 実行と報告


def run_verify(grid: Grid, workers: int = 1, with_closed_forms: bool = False) -> VerifyReport:
    """
    全スイートを格子上で実行する

    各検査は独立なのでスレッドに分配する。結果は (suite, name) で並べ替えるので
    出力はスレッド数に依らない。
    """
    squares: list[SquareReport] = []
    tasks = (
        _algebra_checks(grid)
        + _deformation_checks(grid)
        + _measure_checks(grid)
        + _orthogonal_checks(grid, squares)
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = list(pool.map(lambda task: task(), tasks))
    else:
        checks = [task() for task in tasks]

    checks.sort(key=lambda c: (SUITES.index(c.suite), c.suite, c.name))
    squares.sort(key=lambda r: (r.n, r.s, int(r.alpha)))
    return VerifyReport(
        grid=grid,
        checks=checks,
        singular=singular_points(grid.n_max, grid.s_max, grid.alphas),
        squares=squares,
        closed_forms=closed_form_checks(grid.alphas) if with_closed_forms else None,
    )


def format_report(report: VerifyReport) -> str:
    """人が読む形式の報告"""
    lines = []
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        line = f"[{c.suite}] {c.name}: {status} ({c.count})"
        if c.detail:
            line += f" first failure: {c.detail}"
        lines.append(line)
    for n, s, a in report.singular:
        lines.append(f"SINGULAR n={n} s={s} alpha={a.label}")
    if report.closed_forms is not None:
        for p in report.closed_forms:
            lines.append(f"{p.name}: {'PASS' if p.passed else 'FAIL'}")
    failed = sum(not c.passed for c in report.checks)
    if report.closed_forms is not None:
        failed += sum(not p.passed for p in report.closed_forms)
    lines.append(
        f"total: {len(report.checks)} checks, {failed} failed, {len(report.singular)} singular points"
    )
    return "\n".join(lines)


def _square_record(report: SquareReport) -> dict:
    edges = []
    for edge in report.edges:
        mismatch = None
        if edge.first_mismatch is not None:
            mismatch = {
                "z_power": edge.first_mismatch.z_power,
                "expected": render_s(edge.first_mismatch.expected),
                "got": render_s(edge.first_mismatch.got),
            }
        edges.append({"edge": edge.edge, "pass": edge.passed, "first_mismatch": mismatch})
    return {"n": report.n, "s": report.s, "alpha": report.alpha.label, "edges": edges}


def report_record(report: VerifyReport) -> dict:
    """JSON 用の報告"""
    return {
        "grid": {
            "n_max": report.grid.n_max,
            "s_max": report.grid.s_max,
            "alphas": [a.label for a in report.grid.alphas],
        },
        "checks": [
            {"suite": c.suite, "name": c.name, "pass": c.passed, "count": c.count, "first_failure": c.detail}
            for c in report.checks
        ],
        "singular": [{"n": n, "s": s, "alpha": a.label} for n, s, a in report.singular],
        "squares": [_square_record(r) for r in report.squares],
        "closed_forms": None if report.closed_forms is None else [
            {"name": p.name, "pass": p.passed} for p in report.closed_forms
        ],
        "pass": report.passed,
        "exit_code": report.exit_code,
    }
