"""直交多項式族モジュール - Gram 行列、係数 w_i^n、C 族と W 族、可換図式の検証"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

from .algebra import (
    Alpha,
    SingularMatrixError,
    SPoly,
    ZPoly,
    det_fraction_free,
    solve_linear,
)
from .deformation import DeformParams, exp_deform, hermite, m_poly
from .measure import inner_I_direct, measure_poly, moment

# 可換図式の辺の名前（出力の順序もこの順）
SQUARE_EDGES = ("H→M", "M→C", "w→W", "M→H", "W→C")


class SingularGramError(ArithmeticError):
    """Δ_{n-1} = 0 のため C_n が定義できない点"""

    def __init__(self, n: int, s: int, alpha: Alpha | int):
        self.n = n
        self.s = s
        self.alpha = Alpha.parse(alpha)
        super().__init__(
            f"Gram 行列式 Δ_{n - 1} が 0 です（n={n}, s={s}, alpha={self.alpha.label}）"
        )


@dataclass(frozen=True)
class GramData:
    """
    M_1 ... M_N の Gram データ

    gram[i-1][j-1] = I^s_{ij}、dets[k] = Δ_k（Δ_0 = 1）、
    norms[k] = N_k = ∫ C_k² D_s（Δ_{k-1} = 0 のときは None）。
    """
    s: int
    alpha: Alpha
    N: int
    gram: tuple[tuple[Fraction, ...], ...]
    dets: tuple[Fraction, ...]
    norms: tuple[Fraction | None, ...]

    def entry(self, i: int, j: int) -> Fraction:
        return self.gram[i - 1][j - 1]


@dataclass(frozen=True)
class WCoeffs:
    """C_n = Σ_i w_i M_{n-i} の係数（w_0 = 1）"""
    n: int
    w: tuple[Fraction, ...]


class Mismatch(NamedTuple):
    """最初に一致しなかった z のべきと、その係数"""
    z_power: int
    expected: SPoly
    got: SPoly


class EdgeCheck(NamedTuple):
    edge: str
    passed: bool
    first_mismatch: Mismatch | None


@dataclass(frozen=True)
class SquareReport:
    """可換図式 H→M⇒C→W⇒H の検証結果"""
    n: int
    s: int
    alpha: Alpha
    edges: tuple[EdgeCheck, ...]

    @property
    def passed(self) -> bool:
        return all(edge.passed for edge in self.edges)


def gram_matrix(N: int, s: int, alpha: Alpha | int, workers: int = 1) -> GramData:
    """
    Gram 行列と主小行列式 Δ_n、ノルム N_n を計算する

    Args:
        N: 最大添字（1 以上）
        s: 0 以上の整数
        alpha: 符号 α
        workers: 内積計算のスレッド数（結果は逐次計算と同じ）

    Returns:
        GramData: Gram データ

    Raises:
        MeasureDomainError: s が不正な場合
    """
    if N < 1:
        raise ValueError(f"N は 1 以上を指定してください（指定値: {N}）")
    a = Alpha.parse(alpha)
    pairs = [(i, j) for i in range(1, N + 1) for j in range(i, N + 1)]

    def compute(pair: tuple[int, int]) -> Fraction:
        return inner_I_direct(pair[0], pair[1], s, a)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(compute, pairs))
    else:
        values = [compute(pair) for pair in pairs]
    upper = dict(zip(pairs, values))
    gram = tuple(
        tuple(upper[(min(i, j), max(i, j))] for j in range(1, N + 1))
        for i in range(1, N + 1)
    )

    dets = [Fraction(1)]
    for k in range(1, N + 1):
        minor = [row[:k] for row in gram[:k]]
        dets.append(det_fraction_free(minor).constant_value())

    # N_k = Δ_k / Δ_{k-1}（Schur 補元）
    norms: list[Fraction | None] = [Fraction(1)]
    for k in range(1, N + 1):
        norms.append(dets[k] / dets[k - 1] if dets[k - 1] != 0 else None)

    return GramData(s=s, alpha=a, N=N, gram=gram, dets=tuple(dets), norms=tuple(norms))


def c_coeffs(n: int, s: int, alpha: Alpha | int) -> WCoeffs:
    """
    直交条件 ∫ C_n M_j D_s = 0 (1 ≤ j ≤ n-1) を厳密に解いて w を求める

    Σ_{i=1}^{n-1} w_i I_{(n-i) j} = -I_{nj}、w_0 = 1。

    Raises:
        SingularGramError: Δ_{n-1} = 0 の場合
    """
    if n < 1:
        raise ValueError(f"n は 1 以上を指定してください（指定値: {n}）")
    a = measure_poly(s, alpha).alpha
    return _c_coeffs_cached(n, s, int(a))


@lru_cache(maxsize=None)
def _c_coeffs_cached(n: int, s: int, alpha: int) -> WCoeffs:
    a = Alpha(alpha)
    if n == 1:
        return WCoeffs(n=1, w=(Fraction(1),))
    gram = gram_matrix(n, s, a)
    if gram.dets[n - 1] == 0:
        raise SingularGramError(n, s, a)
    size = n - 1
    lhs = [[gram.entry(n - i, j) for i in range(1, size + 1)] for j in range(1, size + 1)]
    rhs = [-gram.entry(n, j) for j in range(1, size + 1)]
    try:
        solution = solve_linear(lhs, rhs)
    except SingularMatrixError as e:
        raise SingularGramError(n, s, a) from e
    return WCoeffs(n=n, w=(Fraction(1), *solution))


def c_coeffs_by_determinants(n: int, s: int, alpha: Alpha | int) -> WCoeffs:
    """
    行列式の比 w_i = Δ'^i_{n-1} / Δ_{n-1} で w を求める（検算用）

    列は M_{n-1} ... M_1 の逆順に並べ、i 列目を M_n の列に差し替えた
    行列式に全体の負号を付けたものが Δ'^i。
    """
    if n < 1:
        raise ValueError(f"n は 1 以上を指定してください（指定値: {n}）")
    a = measure_poly(s, alpha).alpha
    if n == 1:
        return WCoeffs(n=1, w=(Fraction(1),))
    gram = gram_matrix(n, s, a)
    size = n - 1
    reversed_cols = [[gram.entry(r, size - c) for c in range(size)] for r in range(1, size + 1)]
    delta = det_fraction_free(reversed_cols).constant_value()
    if delta == 0:
        raise SingularGramError(n, s, a)
    w = [Fraction(1)]
    for i in range(1, size + 1):
        replaced = [row[:] for row in reversed_cols]
        for r in range(size):
            replaced[r][i - 1] = gram.entry(r + 1, n)
        w.append(-det_fraction_free(replaced).constant_value() / delta)
    return WCoeffs(n=n, w=tuple(w))


def c_poly(n: int, s: int, alpha: Alpha | int) -> ZPoly:
    """C_0 = 1、C_n = Σ_{i=0}^{n-1} w_i M_{n-i}"""
    if n == 0:
        measure_poly(s, alpha)
        return ZPoly.constant(1)
    coeffs = c_coeffs(n, s, alpha)
    a = Alpha.parse(alpha)
    total = ZPoly()
    for i, w_i in enumerate(coeffs.w):
        total = total + m_poly(DeformParams(n - i, a, s)).scale(w_i)
    return total


def w_poly(n: int, s: int, alpha: Alpha | int) -> ZPoly:
    """W_n = Σ_{i=0}^{n-1} w_i H_{n-i}（同じ係数を Hermite 多項式に適用）"""
    if n == 0:
        measure_poly(s, alpha)
        return ZPoly.constant(1)
    coeffs = c_coeffs(n, s, alpha)
    total = ZPoly()
    for i, w_i in enumerate(coeffs.w):
        total = total + hermite(n - i).scale(w_i)
    return total


def c_poly_direct(n: int, s: int, alpha: Alpha | int) -> ZPoly:
    """
    M を経由せず、z のべきに対する直交条件から C_n を直接求める

    C_n = 2^n z^n + Σ_{k<n} c_k z^k、∫ C_n z^j D_s = 0 (0 ≤ j < n)。
    モーメントは z^k D_s の分解から得る。

    Raises:
        SingularGramError: モーメント行列が特異な場合
    """
    a = measure_poly(s, alpha).alpha
    if n == 0:
        return ZPoly.constant(1)
    moments = [moment(k, s, a) for k in range(2 * n)]
    lead = Fraction(2 ** n)
    lhs = [[moments[j + k] for k in range(n)] for j in range(n)]
    rhs = [-lead * moments[j + n] for j in range(n)]
    try:
        solution = solve_linear(lhs, rhs)
    except SingularMatrixError as e:
        raise SingularGramError(n, s, a) from e
    return ZPoly.numeric([*solution, lead])


def _compare(edge: str, expected: ZPoly, got: ZPoly) -> EdgeCheck:
    size = max(len(expected.coeffs), len(got.coeffs))
    for p in range(size):
        if expected.coeff(p) != got.coeff(p):
            return EdgeCheck(edge, False, Mismatch(p, expected.coeff(p), got.coeff(p)))
    return EdgeCheck(edge, True, None)


def verify_square(n: int, s: int, alpha: Alpha | int) -> SquareReport:
    """
    可換図式の 4 辺と対角を厳密に検証する

    (1) M_n = exp(+s)H_n  (2) C_n = Σ w_i M_{n-i}  (3) W_n = Σ w_i H_{n-i}
    (4) H_n = exp(-s)M_n  対角: C_n = exp(+s)W_n

    Raises:
        SingularGramError: C_n が定義できない場合
    """
    a = measure_poly(s, alpha).alpha
    h_n = hermite(n)
    m_n = m_poly(DeformParams(n, a, s))
    c_n = c_poly(n, s, a)
    w_n = w_poly(n, s, a)
    edges = (
        _compare("H→M", exp_deform(h_n, s, a), m_n),
        # C は z のべきでの直交化と比較する
        _compare("M→C", c_poly_direct(n, s, a), c_n),
        _compare("w→W", exp_deform(c_n, -s, a), w_n),
        _compare("M→H", h_n, exp_deform(m_n, -s, a)),
        _compare("W→C", c_n, exp_deform(w_n, s, a)),
    )
    return SquareReport(n=n, s=s, alpha=a, edges=edges)


def singular_points(
    n_max: int, s_max: int, alphas: Iterable[Alpha | int] = (Alpha.PLUS, Alpha.MINUS)
) -> list[tuple[int, int, Alpha]]:
    """
    格子上で Δ_{n-1} = 0 となる (n, s, α) をすべて列挙する

    Returns:
        list[tuple[int, int, Alpha]]: (n, s, α) の昇順リスト
    """
    points = []
    if n_max < 2:
        return points
    for alpha in alphas:
        a = Alpha.parse(alpha)
        for s in range(s_max + 1):
            gram = gram_matrix(n_max - 1, s, a)
            for n in range(2, n_max + 1):
                if gram.dets[n - 1] == 0:
                    points.append((n, s, a))
    return sorted(points, key=lambda p: (p[0], p[1], int(p[2])))
