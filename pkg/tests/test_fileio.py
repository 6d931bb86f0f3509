import math

import numpy as np
import pytest

import entorder as eo
from entorder.errors import ParseError
from entorder.fileio import emit_report


class TestSpectrumFiles:
    def test_round_trip_tmss(self, tmp_path):
        # values survive to 17 significant digits (one ulp: the base-10
        # encoding cannot represent every natural-log double exactly)
        s = eo.tmss(0.5, 200)
        path = tmp_path / "s.spec"
        eo.write_spectrum(s, path)
        back = eo.read_spectrum(path)
        assert np.allclose(back.log_weights, s.log_weights, rtol=5e-16, atol=0)
        assert back.log_tail_bound == pytest.approx(s.log_tail_bound, rel=5e-16)
        assert back.metadata == s.metadata

    def test_round_trip_psi(self, tmp_path, psi_family):
        path = tmp_path / "p.spec"
        eo.write_spectrum(psi_family[2], path)
        back = eo.read_spectrum(path)
        assert np.allclose(back.log_weights, psi_family[2].log_weights, rtol=5e-16, atol=0)
        assert back.metadata["family"] == "psi"
        assert back.metadata["k"] == 2

    def test_second_generation_bytes_stable(self, tmp_path):
        s = eo.tmss(0.7, 300)
        p1, p2 = tmp_path / "a.spec", tmp_path / "b.spec"
        eo.write_spectrum(s, p1)
        eo.write_spectrum(eo.read_spectrum(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_header(self, tmp_path):
        f = tmp_path / "bad.spec"
        f.write_text("-0.5\n")
        with pytest.raises(ParseError) as err:
            eo.read_spectrum(f)
        assert err.value.line == 1

    def test_bad_weight_line_number(self, tmp_path):
        f = tmp_path / "bad.spec"
        f.write_text("#schmidt-spectrum 1\n-0.30102999566398120\nabc\n")
        with pytest.raises(ParseError) as err:
            eo.read_spectrum(f)
        assert err.value.line == 3

    def test_unknown_metadata_key(self, tmp_path):
        f = tmp_path / "bad.spec"
        f.write_text("#schmidt-spectrum 1\n#color blue\n-0.3\n")
        with pytest.raises(ParseError) as err:
            eo.read_spectrum(f)
        assert err.value.line == 2

    def test_no_weights(self, tmp_path):
        f = tmp_path / "bad.spec"
        f.write_text("#schmidt-spectrum 1\n#family tmss\n")
        with pytest.raises(ParseError):
            eo.read_spectrum(f)

    def test_eighteen_digit_literals(self, tmp_path):
        f = tmp_path / "long.spec"
        v = -0.301029995663981195  # 18 significant digits
        f.write_text(f"#schmidt-spectrum 1\n{v:.18g}\n{v:.18g}\n")
        s = eo.read_spectrum(f)
        assert s.length == 2
        assert s.weights()[0] == pytest.approx(0.5, rel=1e-15)


class TestCanonicalJson:
    def test_sorted_keys_and_newline(self):
        out = emit_report({"b": 1, "a": 2})
        assert out == '{"a":2,"b":1}\n'

    def test_float_formatting(self):
        out = emit_report({"x": 0.1, "y": 1.0, "z": -0.0})
        assert out == '{"x":0.10000000000000001,"y":1,"z":0}\n'

    def test_large_integers(self):
        n = 17093171643561234567890
        assert emit_report({"n": n}) == f'{{"n":{n}}}\n'

    def test_nested_determinism(self):
        rep = {"list": [1, 2.5, None, True], "nested": {"z": "s", "a": [0.25]}}
        assert emit_report(rep) == emit_report(dict(rep))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            emit_report({"x": math.inf})

    def test_non_string_keys_rejected(self):
        with pytest.raises(TypeError):
            emit_report({1: "x"})
