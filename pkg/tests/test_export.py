import json
from fractions import Fraction

import pytest

from hermdeform.algebra import Alpha, SPoly, ZPoly
from hermdeform.deformation import DeformParams, hermite, m_poly, ode_system_matrix
from hermdeform.export import (
    export_all,
    poly_from_json,
    poly_to_csv,
    poly_to_json,
    render_decomp,
    render_latex,
    render_ode,
    render_plain,
    render_poly,
    render_s,
    table_to_csv,
    write_output,
)
from hermdeform.measure import inner_table, measure_poly, moment_decompose
from hermdeform.orthogonal import SingularGramError, c_poly, w_poly

ALPHAS = [Alpha.PLUS, Alpha.MINUS]


def all_families(n_max=4, s_max=2):
    for n in range(n_max + 1):
        yield hermite(n)
        for a in ALPHAS:
            yield m_poly(DeformParams(n, a))
            for s in range(s_max + 1):
                yield m_poly(DeformParams(n, a, s))
                try:
                    yield c_poly(n, s, a)
                    yield w_poly(n, s, a)
                except SingularGramError:
                    continue
    for a in ALPHAS:
        for s in range(s_max + 1):
            yield measure_poly(s, a).poly


class TestPlain:
    def test_first_deformed(self):
        assert render_plain(m_poly(DeformParams(1, Alpha.PLUS))) == "2z + 2s"
        assert render_plain(m_poly(DeformParams(1, Alpha.MINUS))) == "2z - 2s"

    def test_orthogonal_example(self):
        assert render_plain(c_poly(2, 1, Alpha.PLUS)) == "4z^2 - 8z - 10"

    def test_weight_at_zero_level(self):
        assert render_plain(measure_poly(0, Alpha.PLUS).poly) == "1"
        assert render_plain(ZPoly()) == "0"

    def test_symbolic_coefficients(self):
        assert render_plain(m_poly(DeformParams(2, Alpha.PLUS))) == "4z^2 + 8s*z + 4s^2 + 4s - 2"
        assert render_plain(m_poly(DeformParams(3, Alpha.PLUS))) == (
            "8z^3 + 24s*z^2 + (24s^2 + 24s - 12)z + 8s^3 + 24s^2 + 4s"
        )
        assert render_plain(m_poly(DeformParams(3, Alpha.MINUS))) == (
            "8z^3 - 24s*z^2 + (24s^2 + 24s - 12)z - 8s^3 - 24s^2 - 4s"
        )

    def test_fractions_and_units(self):
        assert render_plain(ZPoly.numeric([Fraction(1, 2), Fraction(-3, 4)])) == "-3/4*z + 1/2"
        assert render_plain(ZPoly.numeric([0, -1])) == "-z"
        assert render_plain(ZPoly.monomial(1, SPoly((0, 0, 1)))) == "s^2*z"
        assert render_s(SPoly((Fraction(-1, 2), 0, 3))) == "3s^2 - 1/2"
        assert render_s(SPoly()) == "0"


class TestLatex:
    def test_explicit_alpha(self):
        assert render_latex(m_poly(DeformParams(1, Alpha.PLUS)), Alpha.PLUS) == r"2 z + 2 \alpha s"
        assert render_latex(m_poly(DeformParams(2, Alpha.PLUS)), Alpha.PLUS) == (
            r"4 z^{2} + 8 \alpha s z + 4 s^{2} + 4 s - 2"
        )
        assert render_latex(c_poly(2, 1, Alpha.PLUS), Alpha.PLUS) == r"4 z^{2} - 8 \alpha z - 10"

    def test_without_alpha(self):
        assert render_latex(c_poly(2, 1, Alpha.PLUS)) == "4 z^{2} - 8 z - 10"
        assert render_latex(ZPoly.numeric([Fraction(-1, 2), 0, 1])) == r"z^{2} - \frac{1}{2}"

    @pytest.mark.parametrize("n", range(7))
    def test_same_text_for_both_signs(self, n):
        plus = render_latex(m_poly(DeformParams(n, Alpha.PLUS)), Alpha.PLUS)
        minus = render_latex(m_poly(DeformParams(n, Alpha.MINUS)), Alpha.MINUS)
        assert plus == minus
        try:
            c_plus, c_minus = c_poly(n, 2, Alpha.PLUS), c_poly(n, 2, Alpha.MINUS)
        except SingularGramError:
            return
        assert render_latex(c_plus, Alpha.PLUS) == render_latex(c_minus, Alpha.MINUS)

    def test_measure_alpha_on_odd_powers(self):
        def text(s, alpha):
            return render_latex(measure_poly(s, alpha).poly, alpha, measure=True)

        assert text(0, Alpha.PLUS) == "1"
        assert text(1, Alpha.PLUS) == r"-2 \alpha z + 1"
        assert text(2, Alpha.MINUS) == r"4 z^{2} - 4 \alpha z - 1"
        assert text(3, Alpha.PLUS) == r"-8 \alpha z^{3} + 12 z^{2} + 6 \alpha z - 5"
        assert render_poly(measure_poly(1, Alpha.MINUS).poly, "latex", Alpha.MINUS, measure=True) == (
            r"-2 \alpha z + 1"
        )

    @pytest.mark.parametrize("s", range(7))
    def test_measure_same_text_for_both_signs(self, s):
        plus = render_latex(measure_poly(s, Alpha.PLUS).poly, Alpha.PLUS, measure=True)
        minus = render_latex(measure_poly(s, Alpha.MINUS).poly, Alpha.MINUS, measure=True)
        assert plus == minus
        # α を z^k に α^k で戻すと元の多項式になる
        base = measure_poly(s, Alpha.PLUS).poly
        for alpha in ALPHAS:
            a = int(alpha)
            restored = ZPoly(tuple(base.coeff(k) * a ** k for k in range(s + 1)))
            assert restored == measure_poly(s, alpha).poly


class TestJson:
    def test_schema(self):
        assert poly_to_json(m_poly(DeformParams(1, Alpha.PLUS))) == {"var": "z", "coeffs": [["0", "2"], ["2"]]}
        assert poly_to_json(hermite(2)) == {"var": "z", "coeffs": [["-2"], [], ["4"]]}
        assert poly_to_json(ZPoly.numeric([Fraction(-3, 4)]))["coeffs"] == [["-3/4"]]

    def test_round_trip_through_text(self):
        for p in all_families():
            text = render_poly(p, "json")
            assert poly_from_json(json.loads(text)) == p

    @pytest.mark.parametrize("bad", [
        {"var": "x", "coeffs": []},
        {"var": "z"},
        {"var": "z", "coeffs": [["one"]]},
        {"var": "z", "coeffs": [["1/0"]]},
        [1, 2],
    ])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            poly_from_json(bad)


class TestCsv:
    def test_polynomial_rows(self):
        assert poly_to_csv(hermite(2)) == "power,coefficient\n0,-2\n1,0\n2,4"

    def test_inner_table(self):
        assert table_to_csv(inner_table(2, 0, Alpha.PLUS)) == "n,0,1,2\n0,1,0,0\n1,0,2,0\n2,0,0,8"

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render_poly(hermite(1), "yaml")


class TestDecompAndOde:
    def test_decomposition_plain(self):
        text = render_decomp(moment_decompose(1, 2, Alpha.PLUS), "plain")
        assert text.splitlines() == ["z^1 D_2 (alpha=+1)", "  D_1: -2", "  D_2: 1/2", "  D_3: -1/2"]

    def test_decomposition_json(self):
        record = json.loads(render_decomp(moment_decompose(1, 2, Alpha.MINUS), "json"))
        assert record == {"n": 1, "s": 2, "alpha": "-1", "coeffs": {"1": "2", "2": "-1/2", "3": "1/2"}}

    def test_ode_json(self):
        record = json.loads(render_ode(ode_system_matrix(2, Alpha.PLUS), "json"))
        assert record["matrix"] == [["D", "0", "0"], ["-4s", "D + 2", "0"], ["-16s", "-8s", "D + 4"]]
        assert all(r == {"var": "z", "coeffs": []} for r in record["residuals"])

    def test_ode_plain(self):
        assert render_ode(ode_system_matrix(3, Alpha.MINUS), "plain").endswith("residuals: all zero")


class TestWrite:
    def test_stdout(self, capsys):
        assert write_output("hello") is True
        assert capsys.readouterr().out == "hello\n"

    def test_file(self, tmp_path):
        target = tmp_path / "nested" / "out.txt"
        assert write_output("x", target) is True
        assert target.read_text(encoding="utf-8") == "x\n"

    def test_failure_is_reported(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert write_output("x", blocker / "out.txt") is False
        assert "Warning" in capsys.readouterr().err

    def test_export_all(self, tmp_path):
        written, failed = export_all(tmp_path, 2, 1)
        assert failed == []
        names = {p.name for p in written}
        for a in ("+1", "-1"):
            assert f"M_alpha{a}.json" in names
            assert f"D_alpha{a}.json" in names
            assert f"ode_n2_alpha{a}.json" in names
            for s in (0, 1):
                for stem in (f"I_s{s}_alpha{a}.csv", f"I_s{s}_alpha{a}.json",
                             f"C_s{s}_alpha{a}.json", f"W_s{s}_alpha{a}.json"):
                    assert stem in names
        assert "H.json" in names
        m_file = json.loads((tmp_path / "M_alpha+1.json").read_text(encoding="utf-8"))
        assert poly_from_json(m_file["polys"][1]["poly"]) == m_poly(DeformParams(1, Alpha.PLUS))
        c_file = json.loads((tmp_path / "C_s1_alpha-1.json").read_text(encoding="utf-8"))
        assert poly_from_json(c_file["polys"][2]["poly"]) == c_poly(2, 1, Alpha.MINUS)
