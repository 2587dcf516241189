"""測度モジュール - 符号不定な密度 D_{sα}、Gauss モーメント積分、内積 I^s_{nm}"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .algebra import Alpha, SPoly, ZPoly, double_factorial
from .deformation import DeformParams, hermite, m_poly


class MeasureDomainError(ValueError):
    """s が 0 以上の整数でない場合のエラー（測度は s ∈ N でのみ定義される）"""


@dataclass(frozen=True)
class MeasureRep:
    """
    D_{sα}(z) の多項式部分 (-α)^s H_s(z - α/2)

    全密度は poly · e^{-z²}/√π（因子は暗黙）。
    """
    s: int
    alpha: Alpha
    poly: ZPoly


@dataclass(frozen=True)
class InnerTable:
    """I^s_{nm}（0 ≤ n, m ≤ N）の対称表"""
    s: int
    alpha: Alpha
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DecompCoeffs:
    """z^n D_s = Σ_p d_p D_p の係数（p の昇順）"""
    n: int
    s: int
    alpha: Alpha
    coeffs: dict[int, Fraction] = field(default_factory=dict)

    def total(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))


def _check_s(s) -> int:
    if isinstance(s, bool) or not isinstance(s, int) or s < 0:
        raise MeasureDomainError(f"s は 0 以上の整数を指定してください（指定値: {s!r}）")
    return s


def _check_index(name: str, value: int) -> None:
    if value < 0:
        raise ValueError(f"{name} は 0 以上を指定してください（指定値: {value}）")


@lru_cache(maxsize=None)
def _measure_cached(s: int, alpha: int) -> ZPoly:
    return hermite(s).shift(Fraction(-alpha, 2)).scale((-alpha) ** s)


def measure_poly(s: int, alpha: Alpha | int) -> MeasureRep:
    """
    測度の多項式部分 (-α)^s H_s(z - α/2) を返す

    Raises:
        MeasureDomainError: s が負または整数でない場合
    """
    a = Alpha.parse(alpha)
    return MeasureRep(s=_check_s(s), alpha=a, poly=_measure_cached(s, int(a)))


def measure_poly_from_derivative(s: int, alpha: Alpha | int) -> MeasureRep:
    """
    元の微分形 α^s e^{-αz} d^s/dz^s e^{-z²+αz} から多項式部分を作る

    d/dz [q e^{-z²+αz}] = (q' + (α - 2z) q) e^{-z²+αz} を s 回繰り返す。
    """
    a = Alpha.parse(alpha)
    _check_s(s)
    weight = ZPoly.numeric([int(a), -2])
    q = ZPoly.constant(1)
    for _ in range(s):
        q = q.derivative() + weight * q
    return MeasureRep(s=s, alpha=a, poly=q.scale(int(a) ** s))


def gaussian_moment(k: int) -> Fraction:
    """<z^k> = ∫ z^k e^{-z²}/√π dz"""
    if k % 2:
        return Fraction(0)
    j = k // 2
    return Fraction(double_factorial(2 * j - 1), 2 ** j)


def gaussian_inner(p: ZPoly, q: ZPoly) -> SPoly:
    """
    ∫ p q e^{-z²}/√π dz をモーメントから厳密に計算する

    Args:
        p, q: z の多項式（係数は s に依存してよい）

    Returns:
        SPoly: 積分値
    """
    product = p * q
    total = SPoly()
    for k, c in enumerate(product.coeffs):
        if k % 2 == 0 and not c.is_zero():
            total = total + c * gaussian_moment(k)
    return total


def total_charge(s: int, alpha: Alpha | int) -> Fraction:
    """∫ D_{sα} dz（常に 1）"""
    rep = measure_poly(s, alpha)
    return gaussian_inner(rep.poly, ZPoly.constant(1)).constant_value()


def inner_I_direct(n: int, m: int, s: int, alpha: Alpha | int) -> Fraction:
    """
    I^s_{nm} = ∫ M_n M_m D_{sα} dz を直接積分する

    Args:
        n, m: 添字
        s: 0 以上の整数
        alpha: 符号 α

    Returns:
        Fraction: 内積
    """
    _check_index("n", n)
    _check_index("m", m)
    rep = measure_poly(s, alpha)
    return _inner_direct_cached(min(n, m), max(n, m), s, int(rep.alpha))


@lru_cache(maxsize=None)
def _inner_direct_cached(n: int, m: int, s: int, alpha: int) -> Fraction:
    m_n = m_poly(DeformParams(n, Alpha(alpha), s))
    m_m = m_poly(DeformParams(m, Alpha(alpha), s))
    return gaussian_inner(m_n * m_m, _measure_cached(s, alpha)).constant_value()


def _raise_coefficient(n: int, k: int, alpha: int) -> int:
    # a^n_k = (2α)^k n!/(n-k)!
    return (2 * alpha) ** k * factorial(n) // factorial(n - k)


@lru_cache(maxsize=None)
def _recursive_level(size: int, s: int, alpha: int) -> tuple[tuple[Fraction, ...], ...]:
    if s == 0:
        return tuple(
            tuple(Fraction(2 ** i * factorial(i)) if i == j else Fraction(0) for j in range(size))
            for i in range(size)
        )
    prev = _recursive_level(size, s - 1, alpha)
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            # I^{s}_{ij} = I^{s-1}_{ij} - Σ_{k≥1} Σ_{l≥1} a^i_k a^j_l I^{s-1}_{(i-k)(j-l)}
            acc = prev[i][j]
            for k in range(1, i + 1):
                a_ik = _raise_coefficient(i, k, alpha)
                for l in range(1, j + 1):
                    acc -= a_ik * _raise_coefficient(j, l, alpha) * prev[i - k][j - l]
            row.append(acc)
        rows.append(tuple(row))
    return tuple(rows)


def inner_I_recursive(n: int, m: int, s: int, alpha: Alpha | int) -> Fraction:
    """
    s についての漸化式で I^s_{nm} を計算する

    I^0_{nm} = 2^n n! δ_{nm} から始めて
    I^{s+1}_{nm} = I^s_{nm} - Σ_{k=1}^{n} Σ_{l=1}^{m} a^n_k a^m_l I^s_{(n-k)(m-l)}
    を繰り返す。M^{s+1} を M^s で展開し、H_{s+1}(z-α/2) を部分積分で
    下げたとき、z に線形な項と k=0 または l=0 の項がすべて相殺した形。
    """
    _check_index("n", n)
    _check_index("m", m)
    a = int(Alpha.parse(alpha))
    table = _recursive_level(max(n, m) + 1, _check_s(s), a)
    return table[n][m]


def inner_table(N: int, s: int, alpha: Alpha | int, method: str = "direct") -> InnerTable:
    """
    0 ≤ n, m ≤ N の内積表を作る

    Args:
        N: 最大添字
        s: 0 以上の整数
        alpha: 符号 α
        method: "direct"（Gauss モーメント）または "recursive"

    Returns:
        InnerTable: 対称表
    """
    _check_index("N", N)
    a = Alpha.parse(alpha)
    if method == "direct":
        compute = inner_I_direct
    elif method == "recursive":
        compute = inner_I_recursive
    else:
        raise ValueError(f"不明な計算方法です: {method}")
    rows = []
    for n in range(N + 1):
        # 対称性を使って上三角だけ計算する
        row = [rows[m][n] if m < n else compute(n, m, s, a) for m in range(N + 1)]
        rows.append(tuple(row))
    return InnerTable(s=s, alpha=a, entries=tuple(rows))


def partial_orthogonality(n: int, s: int, alpha: Alpha | int) -> Fraction:
    """∫ M_n D_{sα} dz（δ_{n0} になるはず）"""
    _check_index("n", n)
    rep = measure_poly(s, alpha)
    m_n = m_poly(DeformParams(n, rep.alpha, s))
    return gaussian_inner(m_n, rep.poly).constant_value()


def moment_decompose(n: int, s: int, alpha: Alpha | int) -> DecompCoeffs:
    """
    z^n D_s = Σ_p d_p D_p の係数を求める

    1 段の規則 z D_p = -pα D_{p-1} + (α/2) D_p - (α/2) D_{p+1} を n 回繰り返す。
    p = 0 では D_{-1} の係数 -pα が 0 なので負の添字には何も流れない。
    """
    _check_index("n", n)
    _check_s(s)
    a = Alpha.parse(alpha)
    half = Fraction(int(a), 2)
    coeffs: dict[int, Fraction] = {s: Fraction(1)}
    for _ in range(n):
        nxt: dict[int, Fraction] = defaultdict(Fraction)
        for p, c in coeffs.items():
            if p > 0:
                nxt[p - 1] += -p * int(a) * c
            nxt[p] += half * c
            nxt[p + 1] -= half * c
        coeffs = {p: c for p, c in nxt.items() if c != 0}
    return DecompCoeffs(n=n, s=s, alpha=a, coeffs=dict(sorted(coeffs.items())))


def decomposition_residual(decomp: DecompCoeffs) -> ZPoly:
    """Σ_p d_p D_p - z^n D_s の多項式部分（0 になるはず）"""
    lhs = ZPoly()
    for p, c in decomp.coeffs.items():
        lhs = lhs + measure_poly(p, decomp.alpha).poly.scale(c)
    rhs = ZPoly.monomial(decomp.n) * measure_poly(decomp.s, decomp.alpha).poly
    return lhs - rhs


def moment(n: int, s: int, alpha: Alpha | int) -> Fraction:
    """∫ z^n D_{sα} dz = Σ_p d_p（各 D_p の全電荷が 1 なので）"""
    return moment_decompose(n, s, alpha).total()
