"""厳密代数モジュール - 有理数、ℚ[s] 多項式、z 多項式、分数なし行列式"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Sequence, Union

# 係数はすべて Fraction（常に既約・分母正）
Rational = Fraction
Scalar = Union[int, Fraction]


class SingularMatrixError(ArithmeticError):
    """厳密連立方程式の係数行列が特異な場合のエラー"""


class Alpha(IntEnum):
    """変形の符号 α = ±1"""
    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, value: "int | str | Alpha") -> "Alpha":
        """
        文字列または整数から α を作る

        Args:
            value: "+1", "1", "-1", "+", "-" または ±1

        Returns:
            Alpha: 対応する符号

        Raises:
            ValueError: ±1 以外の値が指定された場合
        """
        if isinstance(value, str):
            text = value.strip()
            aliases = {"+": 1, "-": -1, "+1": 1, "1": 1, "-1": -1}
            if text not in aliases:
                raise ValueError(f"alpha は +1 か -1 を指定してください（指定値: {value}）")
            return cls(aliases[text])
        if value not in (1, -1):
            raise ValueError(f"alpha は +1 か -1 を指定してください（指定値: {value}）")
        return cls(int(value))

    @property
    def label(self) -> str:
        return "+1" if self is Alpha.PLUS else "-1"


def _trim(coeffs: tuple, zero) -> tuple:
    end = len(coeffs)
    while end > 0 and coeffs[end - 1] == zero:
        end -= 1
    return coeffs[:end]


@dataclass(frozen=True)
class SPoly:
    """
    変形パラメータ s の多項式（ℚ[s]）

    coeffs[k] は s^k の係数。ゼロ多項式は空タプル。
    """
    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        normalized = _trim(tuple(Fraction(c) for c in self.coeffs), 0)
        object.__setattr__(self, "coeffs", normalized)

    @classmethod
    def constant(cls, value: Scalar) -> SPoly:
        return cls((Fraction(value),))

    @classmethod
    def s(cls) -> SPoly:
        """変数 s そのもの"""
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def coerce(cls, value: "SPoly | Scalar") -> SPoly:
        if isinstance(value, SPoly):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        return NotImplemented

    @property
    def degree(self) -> int:
        """次数。ゼロ多項式は -1"""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_value(self) -> Fraction:
        """
        定数多項式の値を返す

        Raises:
            ValueError: s に依存する場合
        """
        if not self.is_constant():
            raise ValueError(f"s に依存する多項式は数値に変換できません: {self.coeffs}")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __add__(self, other):
        other = SPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        size = max(len(self.coeffs), len(other.coeffs))
        return SPoly(tuple(self.coeff(k) + other.coeff(k) for k in range(size)))

    __radd__ = __add__

    def __neg__(self) -> SPoly:
        return SPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = SPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = SPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = SPoly.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return SPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return SPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, power: int) -> SPoly:
        if power < 0:
            raise ValueError("負のべき乗はサポートしていません")
        result = SPoly.constant(1)
        for _ in range(power):
            result = result * self
        return result

    def evaluate(self, value: Scalar) -> Fraction:
        """s に数値を代入する（Horner 法）"""
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def substitute(self, value: "SPoly | Scalar") -> SPoly:
        """s に数値または s の多項式を代入する（例: s → s+1）"""
        value = SPoly.coerce(value)
        result = SPoly()
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def divmod(self, other: SPoly) -> tuple[SPoly, SPoly]:
        """
        ℚ[s] での多項式除算

        Args:
            other: 除数（ゼロ多項式不可）

        Returns:
            tuple[SPoly, SPoly]: (商, 余り)
        """
        if other.is_zero():
            raise ZeroDivisionError("ゼロ多項式で割ることはできません")
        remainder = list(self.coeffs)
        lead = other.coeffs[-1]
        shift_max = len(remainder) - len(other.coeffs)
        if shift_max < 0:
            return SPoly(), self
        quotient = [Fraction(0)] * (shift_max + 1)
        for shift in range(shift_max, -1, -1):
            factor = remainder[shift + len(other.coeffs) - 1] / lead
            quotient[shift] = factor
            if factor == 0:
                continue
            for k, c in enumerate(other.coeffs):
                remainder[shift + k] -= factor * c
        return SPoly(tuple(quotient)), SPoly(tuple(remainder))

    def exact_div(self, other: SPoly) -> SPoly:
        """余りが出ないことを前提とした除算（Bareiss 消去用）"""
        quotient, remainder = self.divmod(other)
        if not remainder.is_zero():
            raise ArithmeticError(f"割り切れません: {self.coeffs} / {other.coeffs}")
        return quotient


SLike = Union[SPoly, int, Fraction]


@dataclass(frozen=True)
class ZPoly:
    """
    z の多項式。係数は SPoly

    coeffs[p] は z^p の係数。末尾のゼロ係数は持たない。
    """
    coeffs: tuple[SPoly, ...] = ()

    def __post_init__(self):
        normalized = _trim(tuple(SPoly.coerce(c) for c in self.coeffs), SPoly())
        object.__setattr__(self, "coeffs", normalized)

    @classmethod
    def constant(cls, value: SLike) -> ZPoly:
        return cls((SPoly.coerce(value),))

    @classmethod
    def z(cls) -> ZPoly:
        return cls((SPoly(), SPoly.constant(1)))

    @classmethod
    def monomial(cls, power: int, coeff: SLike = 1) -> ZPoly:
        return cls((SPoly(),) * power + (SPoly.coerce(coeff),))

    @classmethod
    def numeric(cls, values: Sequence[Scalar]) -> ZPoly:
        """有理数の昇べき係数列から作る"""
        return cls(tuple(SPoly.constant(v) for v in values))

    @property
    def degree(self) -> int:
        """z についての次数。ゼロ多項式は -1"""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_numeric(self) -> bool:
        """すべての係数が s に依存しないか"""
        return all(c.is_constant() for c in self.coeffs)

    def coeff(self, p: int) -> SPoly:
        if 0 <= p < len(self.coeffs):
            return self.coeffs[p]
        return SPoly()

    def leading(self) -> SPoly:
        return self.coeffs[-1] if self.coeffs else SPoly()

    def numeric_coeffs(self) -> list[Fraction]:
        return [c.constant_value() for c in self.coeffs]

    def __add__(self, other):
        other = _coerce_z(other)
        if other is NotImplemented:
            return NotImplemented
        size = max(len(self.coeffs), len(other.coeffs))
        return ZPoly(tuple(self.coeff(p) + other.coeff(p) for p in range(size)))

    __radd__ = __add__

    def __neg__(self) -> ZPoly:
        return ZPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _coerce_z(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_z(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (SPoly, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ZPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZPoly()
        out = [SPoly()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return ZPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, power: int) -> ZPoly:
        if power < 0:
            raise ValueError("負のべき乗はサポートしていません")
        result = ZPoly.constant(1)
        for _ in range(power):
            result = result * self
        return result

    def scale(self, factor: SLike) -> ZPoly:
        factor = SPoly.coerce(factor)
        return ZPoly(tuple(c * factor for c in self.coeffs))

    def derivative(self) -> ZPoly:
        return ZPoly(tuple(c * p for p, c in enumerate(self.coeffs) if p > 0))

    def shift(self, c: Scalar) -> ZPoly:
        """p(z) → p(z + c)"""
        step = ZPoly((SPoly.constant(c), SPoly.constant(1)))
        result = ZPoly()
        for coeff in reversed(self.coeffs):
            result = result * step + ZPoly.constant(coeff)
        return result

    def substitute_s(self, value: "SPoly | Scalar") -> ZPoly:
        """すべての係数の s に代入する"""
        return ZPoly(tuple(c.substitute(value) for c in self.coeffs))

    def evaluate(self, z: Scalar) -> SPoly:
        """z に有理数を代入する"""
        result = SPoly()
        for c in reversed(self.coeffs):
            result = result * z + c
        return result


def _coerce_z(value):
    if isinstance(value, ZPoly):
        return value
    if isinstance(value, (SPoly, int, Fraction)):
        return ZPoly.constant(value)
    return NotImplemented


def poly_derivative(p: ZPoly) -> ZPoly:
    """dp/dz を返す"""
    return p.derivative()


def poly_shift(p: ZPoly, c: Scalar) -> ZPoly:
    """p(z + c) を返す"""
    return p.shift(Fraction(c))


def rising_factorial(x: SLike, k: int) -> SPoly:
    """
    上昇階乗 (x)_k = x(x+1)...(x+k-1)

    Args:
        x: s の多項式または数値
        k: 因子の個数（0 なら 1）

    Returns:
        SPoly: 上昇階乗
    """
    x = SPoly.coerce(x)
    result = SPoly.constant(1)
    for j in range(k):
        result = result * (x + j)
    return result


def double_factorial(k: int) -> int:
    """k!! 。(-1)!! = 0!! = 1"""
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def _square_copy(m: Sequence[Sequence[SLike]]) -> list[list[SPoly]]:
    rows = [[SPoly.coerce(v) for v in row] for row in m]
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise ValueError(f"正方行列ではありません: {size} 行, 列数 {[len(r) for r in rows]}")
    return rows


def det_fraction_free(m: Sequence[Sequence[SLike]]) -> SPoly:
    """
    Bareiss 法による分数なし行列式

    途中の値はすべて ℚ[s] に留まる（各段の割り算は必ず割り切れる）。

    Args:
        m: SPoly（または有理数）を要素とする正方行列

    Returns:
        SPoly: 行列式（0×0 行列は 1）
    """
    mat = _square_copy(m)
    size = len(mat)
    if size == 0:
        return SPoly.constant(1)
    prev_pivot = SPoly.constant(1)
    sign = 1
    for k in range(size - 1):
        pivot_row = k
        while mat[pivot_row][k].is_zero():
            pivot_row += 1
            if pivot_row == size:
                # ピボットがない列 → 行列式は 0
                return SPoly()
        if pivot_row != k:
            mat[pivot_row], mat[k] = mat[k], mat[pivot_row]
            sign = -sign
        pivot = mat[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = pivot * mat[i][j] - mat[i][k] * mat[k][j]
                mat[i][j] = num.exact_div(prev_pivot)
            mat[i][k] = SPoly()
        prev_pivot = pivot
    return mat[size - 1][size - 1] * sign


def det_cofactor(m: Sequence[Sequence[SLike]]) -> SPoly:
    """第 1 行に沿った余因子展開（小さい行列の検算用）"""
    mat = _square_copy(m)
    size = len(mat)
    if size == 0:
        return SPoly.constant(1)
    if size == 1:
        return mat[0][0]
    total = SPoly()
    for j, entry in enumerate(mat[0]):
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = entry * det_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def solve_linear(a: Sequence[Sequence[Scalar]], b: Sequence[Scalar]) -> list[Fraction]:
    """
    有理数係数の連立一次方程式 a x = b を厳密に解く（Gauss-Jordan 消去）

    Args:
        a: 正方係数行列
        b: 右辺

    Returns:
        list[Fraction]: 解ベクトル

    Raises:
        SingularMatrixError: a が特異な場合
    """
    size = len(a)
    if len(b) != size or any(len(row) != size for row in a):
        raise ValueError("係数行列と右辺の大きさが一致しません")
    rows = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError(f"第 {col} 列にピボットがありません")
        rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
        pivot = rows[col][col]
        rows[col] = [v / pivot for v in rows[col]]
        for r in range(size):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[col])]
    return [row[size] for row in rows]
