"""変形モジュール - Hermite 多項式、指数変形写像 exp(sΣα)、M 多項式族"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import NamedTuple, Sequence

from .algebra import (
    Alpha,
    SLike,
    SPoly,
    ZPoly,
    double_factorial,
    rising_factorial,
)


@dataclass(frozen=True)
class DeformParams:
    """
    M^s_{nα}(z) を指定するパラメータ

    s が None のときは記号的な s（係数は ℚ[s]）、整数のときは数値モード。
    """
    n: int
    alpha: Alpha
    s: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n は 0 以上を指定してください（指定値: {self.n}）")
        if self.s is not None and (isinstance(self.s, bool) or not isinstance(self.s, int) or self.s < 0):
            raise ValueError(f"数値モードの s は 0 以上の整数を指定してください（指定値: {self.s}）")
        object.__setattr__(self, "alpha", Alpha.parse(self.alpha))

    @property
    def is_symbolic(self) -> bool:
        return self.s is None

    def s_value(self) -> SPoly:
        return SPoly.s() if self.s is None else SPoly.constant(self.s)


class OdeEntry(NamedTuple):
    """三角形連立系の 1 成分。対角は D + diag_shift、非対角は coeff"""
    diag_shift: int | None
    coeff: SPoly


@dataclass(frozen=True)
class OdeSystem:
    """(M_0, ..., M_n) が満たす (n+1)×(n+1) 下三角連立微分方程式"""
    size: int
    alpha: Alpha
    matrix: tuple[tuple[OdeEntry, ...], ...]


@lru_cache(maxsize=None)
def hermite(n: int) -> ZPoly:
    """
    物理学者の Hermite 多項式 H_n(z)

    H_{n+1} = 2z H_n - 2n H_{n-1} で生成する。lru_cache は結果が不変なので
    スレッド間で共有してよい。

    Args:
        n: 次数（0 以上）

    Returns:
        ZPoly: 有理数係数の H_n
    """
    if n < 0:
        raise ValueError(f"n は 0 以上を指定してください（指定値: {n}）")
    if n == 0:
        return ZPoly.constant(1)
    if n == 1:
        return ZPoly.numeric([0, 2])
    two_z = ZPoly.numeric([0, 2])
    return two_z * hermite(n - 1) - hermite(n - 2).scale(2 * (n - 1))


def hermite_at_zero(n: int) -> Fraction:
    """H_{2k}(0) = (-1)^k 2^k (2k-1)!!, H_{2k+1}(0) = 0"""
    if n % 2:
        return Fraction(0)
    k = n // 2
    return Fraction((-1) ** k * 2 ** k * double_factorial(2 * k - 1))


def _sigma_operator(p: ZPoly, sigma: SPoly, alpha: int) -> ZPoly:
    # σ Σ_{m=1}^{deg p} α^m d_m / m
    total = ZPoly()
    deriv = p
    for m in range(1, p.degree + 1):
        deriv = deriv.derivative()
        if deriv.is_zero():
            break
        total = total + deriv.scale(Fraction(alpha ** m, m))
    return total.scale(sigma)


def exp_deform(p: ZPoly, sigma: SLike, alpha: Alpha | int) -> ZPoly:
    """
    指数変形写像 exp(σ Σ_{m≥1} α^m d_m/m) を多項式に作用させる

    作用素は次数を下げるので deg p 次で打ち切っても厳密。
    σ = +s が順方向（H → M）、σ = -s が逆方向（M → H）。

    Args:
        p: 変形する多項式
        sigma: s の倍数（整数、有理数または SPoly）
        alpha: 符号 α

    Returns:
        ZPoly: 変形後の多項式
    """
    a = int(Alpha.parse(alpha))
    sigma = SPoly.coerce(sigma)
    result = p
    term = p
    for k in range(1, p.degree + 1):
        term = _sigma_operator(term, sigma, a).scale(Fraction(1, k))
        if term.is_zero():
            break
        result = result + term
    return result


@lru_cache(maxsize=None)
def _m_poly_cached(n: int, alpha: int, s: int | None) -> ZPoly:
    s_poly = SPoly.s() if s is None else SPoly.constant(s)
    total = ZPoly()
    for k in range(n + 1):
        coeff = rising_factorial(s_poly, k) * ((2 * alpha) ** k * comb(n, k))
        total = total + hermite(n - k).scale(coeff)
    return total


def m_poly(params: DeformParams) -> ZPoly:
    """
    s についての展開で M_n を作る

    M_n = Σ_k (2α)^k s(s+1)...(s+k-1) C(n,k) H_{n-k}
    """
    return _m_poly_cached(params.n, int(params.alpha), params.s)


def m_family(n_max: int, alpha: Alpha | int, s: int | None = None) -> list[ZPoly]:
    """M_0 ... M_{n_max} をまとめて返す"""
    a = int(Alpha.parse(alpha))
    return [_m_poly_cached(n, a, s) for n in range(n_max + 1)]


def _exp_series_coeffs(n: int) -> list[ZPoly]:
    # exp(-t^2 + 2tz) の t^0..t^n 係数。E' = g'E から k e_k = Σ j g_j e_{k-j}
    g = {1: ZPoly.numeric([0, 2]), 2: ZPoly.constant(-1)}
    e = [ZPoly.constant(1)]
    for k in range(1, n + 1):
        acc = ZPoly()
        for j, g_j in g.items():
            if j <= k:
                acc = acc + g_j * e[k - j] * j
        e.append(acc.scale(Fraction(1, k)))
    return e


def m_from_genfunc(params: DeformParams) -> ZPoly:
    """
    母関数 exp(-t^2+2tz) / (1-2αt)^s の t^n 係数の n! 倍

    Hermite の漸化式を使わず、両因子の冪級数を直接掛け合わせる。
    """
    n = params.n
    a = int(params.alpha)
    s_poly = params.s_value()
    e = _exp_series_coeffs(n)
    total = ZPoly()
    for k in range(n + 1):
        # (1-2αt)^{-s} の t^k 係数 = (2α)^k (s)_k / k!
        c_k = rising_factorial(s_poly, k) * Fraction((2 * a) ** k, factorial(k))
        total = total + e[n - k].scale(c_k)
    return total.scale(factorial(n))


def m_at_zero(n: int, alpha: Alpha | int) -> SPoly:
    """
    M_n(0) の閉じた形

    n! 2^n α^n Σ_k (-1)^k / (2^{2k} k! (n-2k)!) · (s)_{n-2k}
    上限 n/2 + ((-1)^n - 1)/4 は floor(n/2) に等しい。
    """
    if n < 0:
        raise ValueError(f"n は 0 以上を指定してください（指定値: {n}）")
    a = int(Alpha.parse(alpha))
    s_poly = SPoly.s()
    upper = int(Fraction(n, 2) + Fraction((-1) ** n - 1, 4))
    total = SPoly()
    for k in range(upper + 1):
        weight = Fraction((-1) ** k, 2 ** (2 * k) * factorial(k) * factorial(n - 2 * k))
        total = total + rising_factorial(s_poly, n - 2 * k) * weight
    return total * (factorial(n) * 2 ** n * a ** n)


def m_organized_by_zero_values(n: int, alpha: Alpha | int) -> ZPoly:
    """M_n = Σ_p 2^p C(n, n-p) z^p M_{n-p}(0) でゼロ値だけから組み立てる"""
    if n < 0:
        raise ValueError(f"n は 0 以上を指定してください（指定値: {n}）")
    total = ZPoly()
    for p in range(n + 1):
        total = total + ZPoly.monomial(p, m_at_zero(n - p, alpha) * (2 ** p * comb(n, n - p)))
    return total


def _check_family(m_list: Sequence[ZPoly]) -> int:
    if not m_list:
        raise ValueError("M 多項式のリストが空です")
    for k, m in enumerate(m_list):
        if m.degree != k:
            raise ValueError(f"m_list[{k}] の次数が {m.degree} です（{k} であるべき）")
    return len(m_list) - 1


def m_raise_s(m_list: Sequence[ZPoly], delta: SLike, alpha: Alpha | int) -> ZPoly:
    """
    s を δ だけ上げる: M^{s+δ}_n = Σ_k (2α)^k (δ)_k C(n,k) M^s_{n-k}

    Args:
        m_list: M^s_0 ... M^s_n
        delta: 上げ幅（整数または SPoly）
        alpha: 符号 α

    Returns:
        ZPoly: M^{s+δ}_n
    """
    n = _check_family(m_list)
    a = int(Alpha.parse(alpha))
    total = ZPoly()
    for k in range(n + 1):
        coeff = rising_factorial(delta, k) * ((2 * a) ** k * comb(n, k))
        total = total + m_list[n - k].scale(coeff)
    return total


def m_next_in_s(m_list: Sequence[ZPoly], alpha: Alpha | int) -> ZPoly:
    """M^{s+1}_n = Σ_k (2α)^k n!/(n-k)! M^s_{n-k}"""
    n = _check_family(m_list)
    a = int(Alpha.parse(alpha))
    total = ZPoly()
    for k in range(n + 1):
        total = total + m_list[n - k].scale((2 * a) ** k * factorial(n) // factorial(n - k))
    return total


def m_next_in_n(
    m_n: ZPoly,
    m_prev: ZPoly,
    lower: Sequence[ZPoly],
    n: int,
    s: SLike,
    alpha: Alpha | int,
) -> ZPoly:
    """
    n についての漸化式

    M_{n+1} = 2z M_n - 2n M_{n-1} + s Σ_{m=0}^{n} (2α)^{m+1} n!/(n-m)! M_{n-m}

    Args:
        m_n: M_n
        m_prev: M_{n-1}（n = 0 のときは無視される）
        lower: M_0 ... M_n
        n: 現在の添字
        s: s（記号的なら SPoly.s()）
        alpha: 符号 α

    Returns:
        ZPoly: M_{n+1}

    Raises:
        ValueError: 添字と入力が一致しない場合
    """
    if n < 0 or len(lower) != n + 1:
        raise ValueError(f"lower の長さ {len(lower)} が n+1 = {n + 1} と一致しません")
    _check_family(lower)
    if lower[n] != m_n or (n >= 1 and lower[n - 1] != m_prev):
        raise ValueError("m_n / m_prev が lower の要素と一致しません")
    a = int(Alpha.parse(alpha))
    s_poly = SPoly.coerce(s)
    result = ZPoly.numeric([0, 2]) * m_n
    if n >= 1:
        result = result - m_prev.scale(2 * n)
    tail = ZPoly()
    for m in range(n + 1):
        tail = tail + lower[n - m].scale((2 * a) ** (m + 1) * factorial(n) // factorial(n - m))
    return result + tail.scale(s_poly)


def hermite_operator(p: ZPoly, n: int) -> ZPoly:
    """(d²/dz² - 2z d/dz + 2n) p"""
    d1 = p.derivative()
    return d1.derivative() - ZPoly.numeric([0, 2]) * d1 + p.scale(2 * n)


def ode_inhomogeneity(n: int, alpha: Alpha | int) -> ZPoly:
    """
    M_n の微分方程式の右辺

    2s (2α)^n Σ_{p=0}^{n-1} n! / ((2α)^p p!) M_p
    (2α)^{-p} は α^p / 2^p として厳密に扱う（α² = 1）。
    """
    a = int(Alpha.parse(alpha))
    family = m_family(n, a)
    total = ZPoly()
    for p in range(n):
        weight = Fraction(2 * (2 * a) ** n * factorial(n), factorial(p)) * Fraction(a ** p, 2 ** p)
        total = total + family[p].scale(weight)
    return total.scale(SPoly.s())


def ode_residual(n: int, alpha: Alpha | int) -> ZPoly:
    """(d²/dz² - 2z d/dz + 2n) M_n から右辺を引いたもの。恒等的に 0 になるはず"""
    if n < 0:
        raise ValueError(f"n は 0 以上を指定してください（指定値: {n}）")
    m_n = m_family(n, alpha)[n]
    return hermite_operator(m_n, n) - ode_inhomogeneity(n, alpha)


def ode_system_matrix(n: int, alpha: Alpha | int) -> OdeSystem:
    """
    三角形連立系を作る

    行 j の対角は D + 2j、i < j の成分は -2s (2α)^{j-i} j!/i!、それ以外は 0。
    """
    if n < 0:
        raise ValueError(f"n は 0 以上を指定してください（指定値: {n}）")
    a = Alpha.parse(alpha)
    s_poly = SPoly.s()
    rows = []
    for j in range(n + 1):
        row = []
        for i in range(n + 1):
            if i == j:
                row.append(OdeEntry(diag_shift=2 * j, coeff=SPoly()))
            elif i < j:
                value = -2 * (2 * int(a)) ** (j - i) * factorial(j) // factorial(i)
                row.append(OdeEntry(diag_shift=None, coeff=s_poly * value))
            else:
                row.append(OdeEntry(diag_shift=None, coeff=SPoly()))
        rows.append(tuple(row))
    return OdeSystem(size=n + 1, alpha=a, matrix=tuple(rows))


def apply_ode_system(system: OdeSystem, m_list: Sequence[ZPoly]) -> list[ZPoly]:
    """D = d²/dz² - 2z d/dz と解釈して各行の残差を返す"""
    if len(m_list) != system.size:
        raise ValueError(f"ベクトルの長さ {len(m_list)} が系の大きさ {system.size} と一致しません")
    residuals = []
    for row in system.matrix:
        acc = ZPoly()
        for entry, m in zip(row, m_list):
            if entry.diag_shift is not None:
                acc = acc + hermite_operator(m, 0) + m.scale(entry.diag_shift)
            elif not entry.coeff.is_zero():
                acc = acc + m.scale(entry.coeff)
        residuals.append(acc)
    return residuals
