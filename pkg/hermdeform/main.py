#!/usr/bin/env python3
"""hermdeform - メインエントリーポイント"""

import argparse
import sys

from .algebra import Alpha
from .config import (
    DEFAULT_FORMAT,
    DEFAULT_N_MAX_CEILING,
    DEFAULT_VERIFY_N_MAX,
    DEFAULT_VERIFY_S_MAX,
    DEFAULT_WORKERS,
    get_config,
    save_config,
    validate_alpha,
    validate_n_max,
    validate_s,
)
from .deformation import DeformParams, hermite, m_poly, ode_system_matrix
from .export import (
    FORMATS,
    create_poly_record,
    dumps,
    export_all,
    poly_to_csv,
    progress,
    render_decomp,
    render_ode,
    render_poly,
    table_record,
    table_to_csv,
    warn,
    write_output,
)
from .measure import MeasureDomainError, inner_table, measure_poly, moment_decompose
from .orthogonal import SingularGramError, c_poly, w_poly
from .verify import Grid, format_report, report_record, run_verify

FAMILIES = ("H", "M", "C", "W", "D")


def build_poly(family: str, n: int, s: int | None, alpha: Alpha):
    """
    族と添字から多項式を作る

    D は s で添字付けされるので n を使わない。

    Raises:
        SingularGramError: C_n / W_n が定義できない場合
    """
    if family == "H":
        return hermite(n)
    if family == "M":
        return m_poly(DeformParams(n, alpha, s))
    if family == "C":
        return c_poly(n, s, alpha)
    if family == "W":
        return w_poly(n, s, alpha)
    return measure_poly(s, alpha).poly


def cmd_gen(args) -> int:
    """多項式を描画して出力"""
    alpha = args.alpha
    family = args.family
    label_alpha = None if family == "H" else alpha

    if family == "D" or args.n is not None:
        n = args.s if family == "D" else args.n
        try:
            poly = build_poly(family, n, args.s, alpha)
        except SingularGramError as e:
            warn(str(e))
            return 1
        text = render_poly(poly, args.format, label_alpha, measure=family == "D")
        return 0 if write_output(text, args.out) else 1

    records, lines = [], []
    for n in range(args.n_max + 1):
        try:
            poly = build_poly(family, n, args.s, alpha)
        except SingularGramError as e:
            warn(f"{family}_{n} skipped: {e}")
            poly = None
        records.append((n, poly))

    if args.format == "json":
        text = dumps({
            "family": family,
            "polys": [create_poly_record(family, n, args.s, label_alpha, p) for n, p in records],
        })
    elif args.format == "csv":
        lines = ["n,power,coefficient"]
        for n, p in records:
            if p is not None:
                lines += [f"{n},{row}" for row in poly_to_csv(p).splitlines()[1:]]
        text = "\n".join(lines)
    else:
        for n, p in records:
            body = "SINGULAR" if p is None else render_poly(p, args.format, label_alpha)
            name = f"{family}_{{{n}}}" if args.format == "latex" else f"{family}_{n}"
            lines.append(f"{name} = {body}")
        text = "\n".join(lines)
    return 0 if write_output(text, args.out) else 1


def cmd_table(args) -> int:
    """内積表 I^s_{nm} を CSV / JSON で出力"""
    table = inner_table(args.n_max, args.s, args.alpha, method=args.method)
    if args.format == "json":
        text = dumps(table_record(table, args.method))
    else:
        text = table_to_csv(table)
    return 0 if write_output(text, args.out) else 1


def cmd_decompose(args) -> int:
    decomp = moment_decompose(args.n, args.s, args.alpha)
    return 0 if write_output(render_decomp(decomp, args.format), args.out) else 1


def cmd_ode(args) -> int:
    system = ode_system_matrix(args.n, args.alpha)
    return 0 if write_output(render_ode(system, args.format), args.out) else 1


def cmd_verify(args) -> int:
    """全スイートを実行して報告。1 つでも失敗すれば終了コード 1"""
    alphas = (Alpha.PLUS, Alpha.MINUS) if args.alpha is None else (args.alpha,)
    grid = Grid(n_max=args.n_max, s_max=args.s_max, alphas=alphas)
    progress(f"verify: n_max={grid.n_max} s_max={grid.s_max} workers={args.workers}")
    report = run_verify(grid, workers=args.workers, with_closed_forms=args.paper_table)
    text = dumps(report_record(report)) if args.json else format_report(report)
    if not write_output(text, args.out):
        return 1
    progress(f"verify finished: {'PASS' if report.passed else 'FAIL'}")
    return report.exit_code


def cmd_export(args) -> int:
    progress(f"export: n_max={args.n_max} s_max={args.s_max} -> {args.out}")
    written, failed = export_all(args.out, args.n_max, args.s_max)
    progress(f"wrote {len(written)} file(s)")
    return 0 if not failed else 1


COMMANDS = {
    "gen": cmd_gen,
    "table": cmd_table,
    "decompose": cmd_decompose,
    "ode": cmd_ode,
    "verify": cmd_verify,
    "export": cmd_export,
}


def build_parser(config: dict) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermdeform",
        description="hermdeform - 変形 Hermite 多項式族の厳密計算と検証",
    )
    parser.add_argument(
        "--ceiling",
        type=int,
        default=config.get("n_max_ceiling", DEFAULT_N_MAX_CEILING),
        help="n の上限。デフォルト: %(default)s",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=config.get("workers", DEFAULT_WORKERS),
        help="verify のスレッド数。デフォルト: %(default)s",
    )
    parser.add_argument(
        "--save-config",
        action="store_true",
        help="現在のオプションを設定ファイルに保存して終了",
    )
    sub = parser.add_subparsers(dest="command")
    default_format = config.get("format", DEFAULT_FORMAT)

    gen = sub.add_parser("gen", help="多項式を生成")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    index = gen.add_mutually_exclusive_group()
    index.add_argument("--n", type=int, default=None, help="単一の添字")
    index.add_argument("--n-max", type=int, default=None, help="0..n_max をまとめて出力")
    gen.add_argument("--s", default="sym", help="0 以上の整数、または sym（H, M のみ）")
    gen.add_argument("--alpha", default="+1", help="+1 または -1")
    gen.add_argument("--format", choices=FORMATS, default=default_format)
    gen.add_argument("--out", default=None, help="出力ファイル。指定しない場合は標準出力")

    table = sub.add_parser("table", help="内積表 I^s_{nm}")
    table.add_argument("--n-max", type=int, required=True)
    table.add_argument("--s", required=True)
    table.add_argument("--alpha", default="+1")
    table.add_argument("--method", choices=("direct", "recursive"), default="direct")
    table.add_argument("--format", choices=("csv", "json"), default="csv")
    table.add_argument("--out", default=None)

    decompose = sub.add_parser("decompose", help="z^n D_s の分解係数")
    decompose.add_argument("--n", type=int, required=True)
    decompose.add_argument("--s", required=True)
    decompose.add_argument("--alpha", default="+1")
    decompose.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    decompose.add_argument("--out", default=None)

    ode = sub.add_parser("ode", help="(M_0, ..., M_n) の三角形連立系と残差")
    ode.add_argument("--n", type=int, required=True)
    ode.add_argument("--alpha", default="+1")
    ode.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    ode.add_argument("--out", default=None)

    verify = sub.add_parser("verify", help="全不変条件を格子上で検証")
    verify.add_argument("--n-max", type=int, default=config.get("verify_n_max", DEFAULT_VERIFY_N_MAX))
    verify.add_argument("--s-max", type=int, default=config.get("verify_s_max", DEFAULT_VERIFY_S_MAX))
    verify.add_argument("--alpha", default="both", help="+1、-1 または both")
    verify.add_argument("--paper-table", action="store_true", help="既知の閉じた形とも照合する")
    verify.add_argument("--json", action="store_true", help="報告を JSON で出力")
    verify.add_argument("--out", default=None)

    export = sub.add_parser("export", help="既定の成果物一式をディレクトリに書き出す")
    export.add_argument("--out", required=True)
    export.add_argument("--n-max", type=int, default=config.get("verify_n_max", DEFAULT_VERIFY_N_MAX))
    export.add_argument("--s-max", type=int, default=config.get("verify_s_max", DEFAULT_VERIFY_S_MAX))

    return parser


def _validate(parser: argparse.ArgumentParser, args) -> None:
    # 使い方の誤りは parser.error（終了コード 2）
    try:
        if getattr(args, "alpha", None) is not None:
            args.alpha = None if args.alpha == "both" and args.command == "verify" else validate_alpha(args.alpha)
        if args.command == "gen":
            args.s = validate_s(args.s, args.family)
            if args.family == "D":
                if args.n is not None or args.n_max is not None:
                    parser.error("D は --s で添字付けされます。--n / --n-max は指定できません")
            else:
                if args.n is None and args.n_max is None:
                    parser.error("gen には --n か --n-max が必要です")
                validate_n_max(args.n if args.n is not None else args.n_max, args.ceiling)
        elif args.command in ("table", "decompose"):
            args.s = validate_s(args.s, "D")
        if args.command in ("table", "verify", "export"):
            validate_n_max(args.n_max, args.ceiling)
        if args.command in ("decompose", "ode"):
            validate_n_max(args.n, args.ceiling)
        if args.command in ("verify", "export") and args.s_max < 0:
            raise ValueError(f"s_max は 0 以上を指定してください（指定値: {args.s_max}）")
        if args.workers < 1:
            raise ValueError(f"workers は 1 以上を指定してください（指定値: {args.workers}）")
    except ValueError as e:
        parser.error(str(e))


def main(argv: list[str] | None = None) -> int:
    """メインエントリーポイント"""
    # 設定ファイルからデフォルト値を読み込む
    config = get_config()
    parser = build_parser(config)
    args = parser.parse_args(argv)

    if args.save_config:
        new_config = dict(config)
        new_config.update({"n_max_ceiling": args.ceiling, "workers": args.workers})
        if save_config(new_config):
            print(f"設定を保存しました: {new_config}", file=sys.stderr)
            return 0
        print("設定の保存に失敗しました", file=sys.stderr)
        return 1

    if args.command is None:
        parser.error("コマンドを指定してください: " + ", ".join(COMMANDS))

    _validate(parser, args)
    try:
        return COMMANDS[args.command](args)
    except MeasureDomainError as e:
        parser.error(str(e))


if __name__ == "__main__":
    sys.exit(main())
