"""出力モジュール - 多項式・内積表・分解係数の描画と書き出し"""

from __future__ import annotations

import csv
import io
import json
import sys
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TypedDict

from .algebra import Alpha, SPoly, ZPoly
from .config import FORMAT_CHOICES
from .deformation import OdeSystem, apply_ode_system, hermite, m_family, ode_system_matrix
from .measure import DecompCoeffs, InnerTable, inner_table, measure_poly
from .orthogonal import SingularGramError, c_poly, w_poly

FORMATS = FORMAT_CHOICES
ALPHAS = (Alpha.PLUS, Alpha.MINUS)


class PolyRecord(TypedDict):
    """JSON に書き出す多項式 1 本分"""
    family: str
    n: int
    s: str
    alpha: str | None
    poly: dict | None


class TableRecord(TypedDict):
    s: int
    alpha: str
    method: str
    entries: list[list[str]]


class DecompRecord(TypedDict):
    n: int
    s: int
    alpha: str
    coeffs: dict[str, str]


class OdeRecord(TypedDict):
    n: int
    alpha: str
    matrix: list[list[str]]
    residuals: list[dict]


def warn(message: str) -> None:
    """警告を時刻付きで標準エラーに出す（標準出力は結果専用）"""
    print(f"[{datetime.now().strftime('%H:%M:%S')}] Warning: {message}", file=sys.stderr)


def progress(message: str) -> None:
    print(f"[{datetime.now().strftime('%H:%M:%S')}] {message}", file=sys.stderr)


# ---------------------------------------------------------------- JSON


def poly_to_json(p: ZPoly) -> dict:
    """
    多項式を厳密な JSON 形式にする

    {"var": "z", "coeffs": [[r0, r1, ...], ...]}。i 番目の内側リストは
    z^i の係数の s についての昇べき係数列で、各要素は "p/q" か "p"。
    """
    return {"var": "z", "coeffs": [[str(c) for c in sp.coeffs] for sp in p.coeffs]}


def poly_from_json(data: dict) -> ZPoly:
    """
    poly_to_json の逆変換

    Raises:
        ValueError: 形式が不正な場合
    """
    if not isinstance(data, dict) or data.get("var") != "z" or not isinstance(data.get("coeffs"), list):
        raise ValueError(f"多項式の JSON 形式が不正です: {data!r}")
    try:
        return ZPoly(tuple(SPoly(tuple(Fraction(r) for r in row)) for row in data["coeffs"]))
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"係数を有理数として読めません: {e}") from e


def create_poly_record(family: str, n: int, s: int | None, alpha: Alpha | None, poly: ZPoly | None) -> PolyRecord:
    return {
        "family": family,
        "n": n,
        "s": "sym" if s is None else str(s),
        "alpha": None if alpha is None else alpha.label,
        "poly": None if poly is None else poly_to_json(poly),
    }


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------- plain


def _s_terms(c: SPoly) -> list[tuple[bool, str]]:
    # 降べきの (負か, 絶対値の文字列)
    terms = []
    for e in range(c.degree, -1, -1):
        k = c.coeff(e)
        if k == 0:
            continue
        mag = abs(k)
        if e == 0:
            body = str(mag)
        else:
            var = "s" if e == 1 else f"s^{e}"
            if mag == 1:
                body = var
            else:
                body = f"{mag}*{var}" if mag.denominator != 1 else f"{mag}{var}"
        terms.append((k < 0, body))
    return terms


def _join(terms: list[tuple[bool, str]]) -> str:
    if not terms:
        return "0"
    neg, body = terms[0]
    out = ("-" if neg else "") + body
    for neg, body in terms[1:]:
        out += (" - " if neg else " + ") + body
    return out


def render_s(c: SPoly) -> str:
    """s の多項式を降べきで描く（例: "4s^2 + 4s - 2"）"""
    return _join(_s_terms(c))


def render_plain(p: ZPoly) -> str:
    """
    z の降べきで平文にする

    例: 2z + 2s、4z^2 - 8z - 10、8z^3 + 24s*z^2 + (24s^2 + 24s - 12)z + 8s^3 + 24s^2 + 4s
    """
    terms = []
    for power in range(p.degree, -1, -1):
        c = p.coeff(power)
        if c.is_zero():
            continue
        zpart = "" if power == 0 else ("z" if power == 1 else f"z^{power}")
        inner = _s_terms(c)
        if not zpart:
            terms.extend(inner)
            continue
        if len(inner) == 1:
            neg, body = inner[0]
            if body == "1":
                body = zpart
            elif c.is_constant() and Fraction(body).denominator == 1:
                body = body + zpart
            else:
                body = f"{body}*{zpart}"
        else:
            # 複数項の係数は括弧でくくり、先頭の符号を外に出す
            neg = c.coeffs[-1] < 0
            body = f"({render_s(-c if neg else c)}){zpart}"
        terms.append((neg, body))
    return _join(terms)


# ---------------------------------------------------------------- LaTeX


def _latex_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return rf"\frac{{{q.numerator}}}{{{q.denominator}}}"


def _latex_s_parts(c: SPoly) -> list[tuple[bool, str, str]]:
    # 降べきの (負か, 絶対値, s のべき)。絶対値 1 で s を含む項は絶対値を空にする
    parts = []
    for e in range(c.degree, -1, -1):
        k = c.coeff(e)
        if k == 0:
            continue
        mag = abs(k)
        var = "" if e == 0 else ("s" if e == 1 else f"s^{{{e}}}")
        parts.append((k < 0, "" if (mag == 1 and var) else _latex_rational(mag), var))
    return parts


def _latex_s_terms(c: SPoly) -> list[tuple[bool, str]]:
    return [(neg, " ".join(x for x in (mag, var) if x)) for neg, mag, var in _latex_s_parts(c)]


def render_latex(p: ZPoly, alpha: Alpha | None = None, measure: bool = False) -> str:
    """
    z の降べきで LaTeX にする

    alpha を渡すと α を明示する。H, M, C, W は (z, α) → (-z, -α) で (-1)^n 倍
    になるので、z^k の係数は α^{n-k} × (α に依らない部分) と書ける。
    測度 D_s は同じ置換で不変なので（measure=True）、z^k の係数は α^k を持つ。
    """
    n = p.degree
    terms = []
    for power in range(n, -1, -1):
        c = p.coeff(power)
        if c.is_zero():
            continue
        gap = power if measure else n - power
        odd = alpha is not None and gap % 2 == 1
        if odd:
            # α = -1 のときは係数の符号を α に移す
            c = c * int(alpha)
        zpart = "" if power == 0 else ("z" if power == 1 else f"z^{{{power}}}")
        a_part = r"\alpha" if odd else ""
        parts = _latex_s_parts(c)
        if len(parts) > 1 and not (zpart or a_part):
            terms.extend(_latex_s_terms(c))
            continue
        if len(parts) == 1:
            neg, mag, var = parts[0]
            if mag == "1" and (zpart or a_part):
                mag = ""
            pieces = [mag, a_part, var, zpart]
        else:
            neg = c.coeffs[-1] < 0
            pieces = [a_part, f"({_join(_latex_s_terms(-c if neg else c))})", zpart]
        terms.append((neg, " ".join(piece for piece in pieces if piece)))
    return _join(terms)


def render_poly(p: ZPoly, fmt: str, alpha: Alpha | None = None, measure: bool = False) -> str:
    """単独の多項式を指定形式で描く"""
    if fmt == "plain":
        return render_plain(p)
    if fmt == "latex":
        return render_latex(p, alpha, measure)
    if fmt == "json":
        return dumps(poly_to_json(p))
    if fmt == "csv":
        return poly_to_csv(p)
    raise ValueError(f"不明な出力形式です: {fmt}")


# ---------------------------------------------------------------- CSV


def _csv_text(rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def poly_to_csv(p: ZPoly) -> str:
    """power,coefficient の行（昇べき）"""
    rows = [("power", "coefficient")]
    rows += [(k, render_s(c)) for k, c in enumerate(p.coeffs)]
    return _csv_text(rows)


def table_to_csv(table: InnerTable) -> str:
    """I^s_{nm} の表。行が n、列が m"""
    header = ["n"] + [str(m) for m in range(table.size)]
    rows = [header] + [[n, *(str(v) for v in row)] for n, row in enumerate(table.entries)]
    return _csv_text(rows)


def table_record(table: InnerTable, method: str = "direct") -> TableRecord:
    return {
        "s": table.s,
        "alpha": table.alpha.label,
        "method": method,
        "entries": [[str(v) for v in row] for row in table.entries],
    }


# ---------------------------------------------------------------- 分解と ODE


def decomp_record(decomp: DecompCoeffs) -> DecompRecord:
    return {
        "n": decomp.n,
        "s": decomp.s,
        "alpha": decomp.alpha.label,
        "coeffs": {str(p): str(c) for p, c in decomp.coeffs.items()},
    }


def render_decomp(decomp: DecompCoeffs, fmt: str) -> str:
    if fmt == "json":
        return dumps(decomp_record(decomp))
    if fmt == "csv":
        return _csv_text([("p", "coefficient")] + [(p, str(c)) for p, c in decomp.coeffs.items()])
    lines = [f"z^{decomp.n} D_{decomp.s} (alpha={decomp.alpha.label})"]
    lines += [f"  D_{p}: {c}" for p, c in decomp.coeffs.items()]
    return "\n".join(lines)


def _ode_cell(entry) -> str:
    if entry.diag_shift is not None:
        return "D" if entry.diag_shift == 0 else f"D + {entry.diag_shift}"
    return render_s(entry.coeff)


def ode_record(system: OdeSystem) -> OdeRecord:
    m_list = m_family(system.size - 1, system.alpha)
    residuals = apply_ode_system(system, m_list)
    return {
        "n": system.size - 1,
        "alpha": system.alpha.label,
        "matrix": [[_ode_cell(e) for e in row] for row in system.matrix],
        "residuals": [poly_to_json(r) for r in residuals],
    }


def render_ode(system: OdeSystem, fmt: str) -> str:
    record = ode_record(system)
    if fmt == "json":
        return dumps(record)
    if fmt == "csv":
        return _csv_text(record["matrix"])
    width = max(len(cell) for row in record["matrix"] for cell in row)
    lines = [f"(M_0 ... M_{record['n']}) alpha={record['alpha']}"]
    for row in record["matrix"]:
        lines.append("  " + "  ".join(cell.rjust(width) for cell in row))
    zero = all(not r["coeffs"] for r in record["residuals"])
    lines.append(f"residuals: {'all zero' if zero else 'NONZERO'}")
    return "\n".join(lines)


# ---------------------------------------------------------------- 書き出し


def write_output(text: str, path: Path | str | None = None) -> bool:
    """
    結果を書き出す

    Args:
        text: 書き出す内容
        path: 出力先。None の場合は標準出力

    Returns:
        bool: 書き込み成功なら True
    """
    if path is None:
        print(text)
        return True
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        return True
    except OSError as e:
        warn(f"Could not write {path}: {e}")
        return False


def _family_file(family: str, n_max: int, s: int, alpha: Alpha) -> tuple[dict, list[int]]:
    build = c_poly if family == "C" else w_poly
    polys, skipped = [], []
    for n in range(n_max + 1):
        try:
            polys.append(create_poly_record(family, n, s, alpha, build(n, s, alpha)))
        except SingularGramError:
            polys.append(create_poly_record(family, n, s, alpha, None))
            skipped.append(n)
    return {"family": family, "s": s, "alpha": alpha.label, "polys": polys}, skipped


def export_all(out_dir: Path | str, n_max: int, s_max: int) -> tuple[list[Path], list[Path]]:
    """
    既定の成果物一式を書き出す

    Returns:
        tuple[list[Path], list[Path]]: (書き込めたファイル, 失敗したファイル)
    """
    out_dir = Path(out_dir)
    files: dict[str, str] = {}

    files["H.json"] = dumps({
        "family": "H",
        "polys": [create_poly_record("H", n, None, None, hermite(n)) for n in range(n_max + 1)],
    })
    for a in ALPHAS:
        files[f"M_alpha{a.label}.json"] = dumps({
            "family": "M",
            "s": "sym",
            "alpha": a.label,
            "polys": [create_poly_record("M", n, None, a, m) for n, m in enumerate(m_family(n_max, a))],
        })
        files[f"D_alpha{a.label}.json"] = dumps({
            "family": "D",
            "alpha": a.label,
            "polys": [create_poly_record("D", s, s, a, measure_poly(s, a).poly) for s in range(s_max + 1)],
        })
        files[f"ode_n{n_max}_alpha{a.label}.json"] = dumps(ode_record(ode_system_matrix(n_max, a)))
        for s in range(s_max + 1):
            table = inner_table(n_max, s, a)
            files[f"I_s{s}_alpha{a.label}.csv"] = table_to_csv(table)
            files[f"I_s{s}_alpha{a.label}.json"] = dumps(table_record(table))
            for family in ("C", "W"):
                record, skipped = _family_file(family, n_max, s, a)
                for n in skipped:
                    warn(f"{family}_{n} skipped: singular Gram matrix (s={s}, alpha={a.label})")
                files[f"{family}_s{s}_alpha{a.label}.json"] = dumps(record)

    written, failed = [], []
    for name in sorted(files):
        path = out_dir / name
        (written if write_output(files[name], path) else failed).append(path)
    return written, failed
