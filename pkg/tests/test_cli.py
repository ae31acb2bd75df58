"""End-to-end runs of the command-line interface."""

import json

import pandas as pd
import pytest

from tcct.core.config import settings
from tcct.main import main

SMALL = ["--d", "20", "--n", "30", "--reps", "60", "--seed", "3"]


def write(path, frame: pd.DataFrame):
    frame.to_csv(path, index=False)
    return path


def report(path) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"group": str}, keep_default_na=False)


@pytest.fixture
def grouped(tmp_path):
    return write(
        tmp_path / "p.csv",
        pd.DataFrame({"g": ["A", "B", "B", "C", "C"], "p": [0.3, 0.6, 0.9, 0.01, 0.2], "w": [1, 1, 1, 2, 2]}),
    )


class TestCombine:
    def test_single_test_group(self, grouped, tmp_path):
        out = tmp_path / "out.csv"
        code = main(["combine", "--input", str(grouped), "--group-col", "g", "--p-col", "p",
                     "--methods", "tcct,cct,tmin", "--output", str(out)])
        assert code == 0
        rows = report(out)
        for method in ("tcct", "cct", "tmin"):
            p = rows[(rows["group"] == "A") & (rows["method"] == method)]["p_combined"].iloc[0]
            assert p == pytest.approx(0.3, abs=1e-9)

    def test_all_truncated_group(self, grouped, tmp_path):
        out = tmp_path / "out.csv"
        main(["combine", "--input", str(grouped), "--group-col", "g", "--p-col", "p", "--output", str(out)])
        row = report(out).set_index(["group", "method"]).loc[("B", "tcct")]
        assert row["p_combined"] == 0.5
        assert row["flags"] == "ALL_TRUNCATED"

    def test_sorted_output_with_sidecar(self, grouped, tmp_path):
        out = tmp_path / "out.csv"
        main(["combine", "--input", str(grouped), "--group-col", "g", "--p-col", "p", "--output", str(out)])
        rows = report(out)
        keys = list(zip(rows["group"], rows["method"]))
        assert keys == sorted(keys)
        meta = json.loads((tmp_path / "out.meta.json").read_text())
        assert meta["methods"] == ["tcct", "cct"]
        assert meta["version"] == settings.VERSION

    def test_equal_weights_reproduce_unweighted(self, tmp_path):
        data = pd.DataFrame({"g": ["A"] * 4, "p": [0.02, 0.4, 0.7, 0.1], "w": [3.0] * 4})
        src = write(tmp_path / "p.csv", data)
        plain, weighted = tmp_path / "plain.csv", tmp_path / "weighted.csv"
        main(["combine", "--input", str(src), "--group-col", "g", "--p-col", "p", "--output", str(plain)])
        main(["combine", "--input", str(src), "--group-col", "g", "--p-col", "p", "--weight-col", "w",
              "--output", str(weighted)])
        assert plain.read_bytes() == weighted.read_bytes()

    def test_missing_column_is_usage_error(self, grouped, tmp_path, capsys):
        code = main(["combine", "--input", str(grouped), "--group-col", "g", "--p-col", "PVAL",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 2
        assert "Column not found in input: PVAL" in capsys.readouterr().err
        assert not (tmp_path / "out.csv").exists()

    def test_bad_p_value_is_data_error(self, tmp_path, capsys):
        src = write(tmp_path / "p.csv", pd.DataFrame({"g": ["A", "A"], "p": ["0.1", "oops"]}))
        code = main(["combine", "--input", str(src), "--group-col", "g", "--p-col", "p",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 3
        assert "Row 3" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "content, message",
        [
            (b"g,p\nA,0.1\n\xff\xfe,0.2\n", "not valid UTF-8"),
            (b'g,p\nA,0.1\n"B,0.2\n', "not well-formed CSV"),
        ],
    )
    def test_malformed_file_is_data_error(self, tmp_path, capsys, content, message):
        src = tmp_path / "p.csv"
        src.write_bytes(content)
        code = main(["combine", "--input", str(src), "--group-col", "g", "--p-col", "p",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 3
        assert message in capsys.readouterr().err

    def test_missing_input_file(self, tmp_path):
        code = main(["combine", "--input", str(tmp_path / "nope.csv"), "--group-col", "g", "--p-col", "p",
                     "--output", str(tmp_path / "out.csv")])
        assert code == 2

    def test_unknown_method(self, grouped, tmp_path):
        code = main(["combine", "--input", str(grouped), "--group-col", "g", "--p-col", "p",
                     "--methods", "stouffer", "--output", str(tmp_path / "out.csv")])
        assert code == 2


class TestLongitudinal:
    @pytest.fixture
    def measurements(self, tmp_path):
        rows = []
        for unit in range(8):
            for t in (1, 2):
                y = 0.0 if (unit + t) % 3 == 0 else 1.0 + 0.1 * unit + 0.05 * t
                rows.append({"unit_id": unit, "timepoint": t, "feature": "f", "response": y,
                             "covariate": int(unit >= 4), "site": "gut"})
        return write(tmp_path / "long.csv", pd.DataFrame(rows))

    def test_two_part_run(self, measurements, tmp_path):
        out = tmp_path / "long.out.csv"
        assert main(["longitudinal", "--input", str(measurements), "--output", str(out)]) == 0
        cells = pd.read_csv(tmp_path / "long.out.cells.csv", keep_default_na=False)
        assert len(cells) == 2 * 2
        assert set(cells["part"]) == {1, 2}
        meta = json.loads((tmp_path / "long.out.meta.json").read_text())
        assert meta["command"] == "longitudinal two-part"

    def test_one_part_with_blocks(self, measurements, tmp_path):
        out = tmp_path / "long.out.csv"
        code = main(["longitudinal", "--input", str(measurements), "--mode", "one-part",
                     "--block-col", "site", "--output", str(out)])
        assert code == 0
        assert set(report(out)["group"]) == {"gut"}

    def test_bad_mode(self, measurements, tmp_path):
        code = main(["longitudinal", "--input", str(measurements), "--mode", "three-part",
                     "--output", str(tmp_path / "o.csv")])
        assert code == 2


class TestSimulate:
    def test_table2_power(self, tmp_path):
        code = main(["simulate", "table2", "--rho", "0.6", "--alpha", "0.05", "--reps", "2000", "--seed", "7",
                     "--output-dir", str(tmp_path)])
        assert code == 0
        rows = pd.read_csv(tmp_path / "table2.csv")
        assert list(rows.columns) == ["effect", "rho", "alpha", "method", "rejections", "replications", "rate", "se"]
        tcct = rows[rows["method"] == "tcct"]["rate"].iloc[0]
        assert 0.88 <= tcct <= 0.93

    def test_table1_small(self, tmp_path):
        assert main(["simulate", "table1", *SMALL, "--rho", "0,0.3", "--output-dir", str(tmp_path)]) == 0
        rows = pd.read_csv(tmp_path / "table1.csv")
        assert len(rows) == 2 * 2 * 4
        assert (rows["effect"] == 0.0).all()
        meta = json.loads((tmp_path / "table1.meta.json").read_text())
        assert meta["seed"] == 3
        assert meta["effects"] == [0.0]

    def test_table_a1_has_both_effects(self, tmp_path):
        assert main(["simulate", "tableA1", *SMALL, "--rho", "0.3", "--output-dir", str(tmp_path)]) == 0
        rows = pd.read_csv(tmp_path / "tableA1.csv")
        assert set(rows["method"]) == {"tmin", "tippett"}
        assert sorted(set(rows["effect"])) == [0.0, settings.EFFECT_SIZE]

    def test_figure1_at_zero_is_near_level(self, tmp_path):
        code = main(["simulate", "figure1", "--c", "0", "--reps", "500", "--seed", "11", "--output-dir", str(tmp_path)])
        assert code == 0
        rows = pd.read_csv(tmp_path / "figure1.csv")
        assert list(rows.columns) == ["c", "method", "power", "se"]
        assert rows["power"].between(0.01, 0.12).all()
        assert (tmp_path / "figure1.svg").exists()

    def test_figure2_small_grid(self, tmp_path):
        code = main(["simulate", "figure2", "--shapes", "0.5,1", "--d", "20", "--reps", "40",
                     "--output-dir", str(tmp_path)])
        assert code == 0
        rows = pd.read_csv(tmp_path / "figure2.csv")
        assert list(rows.columns) == ["shape1", "shape2", "tcct", "cct", "gain"]
        assert len(rows) == 4
        assert (rows["gain"] >= 0).all()
        assert (tmp_path / "figure2.svg").read_text().startswith("<svg")

    @pytest.mark.parametrize(
        "experiment, extra, suffixes",
        [
            ("table1", ["--rho", "0,0.6"], (".csv", ".meta.json")),
            ("table2", ["--rho", "0.3"], (".csv", ".meta.json")),
            ("tableA1", ["--rho", "0.9"], (".csv", ".meta.json")),
            ("figure1", ["--c", "0,0.2"], (".csv", ".svg", ".meta.json")),
            ("figure2", ["--shapes", "0.2,1"], (".csv", ".svg", ".meta.json")),
        ],
    )
    def test_reruns_are_byte_identical(self, tmp_path, experiment, extra, suffixes):
        for name in ("a", "b"):
            code = main(["simulate", experiment, "--d", "10", "--n", "20", "--reps", "30", "--seed", "5",
                         *extra, "--output-dir", str(tmp_path / name)])
            assert code == 0
        for suffix in suffixes:
            first = (tmp_path / "a" / f"{experiment}{suffix}").read_bytes()
            assert first == (tmp_path / "b" / f"{experiment}{suffix}").read_bytes()

    @pytest.mark.parametrize(
        "extra",
        [
            ["table1", "--rho", "1.5"],
            ["table1", "--alpha", "0"],
            ["table1", "--seed", "-1"],
            ["figure1", "--c", "0.2,0.1"],
            ["figure2", "--shapes", "0,1"],
            ["figure2", "--level", "1.5"],
            ["figure1", "--reps", "0"],
        ],
    )
    def test_invalid_overrides(self, extra, tmp_path, capsys):
        assert main(["simulate", *extra, "--output-dir", str(tmp_path)]) == 2
        assert capsys.readouterr().err

    def test_unknown_experiment(self):
        assert main(["simulate", "table9"]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0
    assert settings.VERSION in capsys.readouterr().out


def test_command_required():
    assert main([]) == 2
