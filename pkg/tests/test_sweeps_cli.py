"""Grid sweeps, CSV serialization, figure presets, SVG rendering, and CLI."""

from __future__ import annotations

import base64
import dataclasses
import math
import struct
import subprocess
import sys
import zlib
from pathlib import Path

import numpy as np
import pytest

from cavityblockade import cli, figures, optimizer, steady_state, svgplot, sweeps
from cavityblockade.params import (
    ConfigError,
    Direction,
    RegimeWarning,
    reference_params,
)

pytestmark = pytest.mark.filterwarnings(
    "ignore::cavityblockade.params.RegimeWarning"
)


def kv_lines(text: str) -> dict[str, str]:
    out = {}
    for line in text.strip().splitlines():
        key, sep, value = line.partition(" = ")
        if sep:
            out[key] = value
    return out


class TestEffectiveArrays:
    def test_kappa1_axis_slides_kappa2(self):
        base = reference_params()
        k1 = np.array([0.2, 1.0, 1.8])
        consts = sweeps.effective_arrays(base, {"kappa1": k1})
        assert np.array_equal(consts["omega"], np.sqrt(k1) * base.b_in)

        backward = dataclasses.replace(base, direction=Direction.BACKWARD)
        consts_b = sweeps.effective_arrays(backward, {"kappa1": k1})
        assert np.array_equal(
            consts_b["omega"], np.sqrt(2.0 * base.kappa - k1) * base.b_in
        )

    def test_kappa2_axis_slides_kappa1(self):
        base = reference_params()
        consts = sweeps.effective_arrays(base, {"kappa2": np.array([0.4])})
        assert consts["omega"][0] == pytest.approx(
            math.sqrt(1.6) * base.b_in, rel=1e-15
        )

    def test_unknown_override_key(self):
        with pytest.raises(ConfigError, match="unknown override"):
            sweeps.effective_arrays(reference_params(), {"gain": 2.0})

    def test_rates_must_stay_positive(self):
        # kappa1 = 2.5 slides kappa2 to -0.5.
        with pytest.raises(ConfigError, match="positive"):
            sweeps.effective_arrays(reference_params(), {"kappa1": 2.5})

    def test_delta_p_zero_rejected(self):
        with pytest.raises(ZeroDivisionError):
            sweeps.effective_arrays(
                reference_params(), {"delta_p": np.array([100.0, 0.0])}
            )

    def test_default_j_and_theta_from_params(self):
        base = dataclasses.replace(reference_params(), e_he=5.0, phi_p=0.4)
        consts = sweeps.effective_arrays(base, {})
        assert float(consts["j"]) == base.g * 5.0 / base.delta_p
        assert float(consts["theta"]) == 0.4

        phased = sweeps.effective_arrays(base, {"phi_p": np.array([0.3, 7.0])})
        # Array-path theta is left unwrapped; statistics are periodic in it.
        assert np.array_equal(phased["theta"], np.array([0.3, 7.0]))

    def test_one_warning_per_violated_condition(self):
        base = reference_params()
        with pytest.warns(RegimeWarning) as record:
            sweeps.effective_arrays(base, {"b_in": np.array([0.02, 0.5, 0.9])})
        hits = [r for r in record if "weak cavity drive" in str(r.message)]
        assert len(hits) == 1


class TestSweepAxis:
    def test_values_are_linspace(self):
        axis = sweeps.SweepAxis("delta_c", -1.0, 1.0, 5)
        assert np.array_equal(axis.values(), np.linspace(-1.0, 1.0, 5))

    def test_unknown_parameter(self):
        with pytest.raises(ConfigError, match="not a system parameter"):
            sweeps.SweepAxis("gain", 0.0, 1.0, 5)

    def test_reversed_bounds(self):
        with pytest.raises(ConfigError, match="minimum < maximum"):
            sweeps.SweepAxis("delta_c", 1.0, 1.0, 5)

    def test_too_few_points(self):
        with pytest.raises(ConfigError, match="at least 2"):
            sweeps.SweepAxis("delta_c", 0.0, 1.0, 1)


class TestSweepSpec:
    def axis(self, name="delta_c"):
        return sweeps.SweepAxis(name, -1.0, 1.0, 5)

    def test_shape(self):
        assert sweeps.SweepSpec(axis1=self.axis()).shape == (5,)
        spec = sweeps.SweepSpec(axis1=self.axis("J"), axis2=self.axis("theta"))
        assert spec.shape == (5, 5)

    def test_bad_observable(self):
        with pytest.raises(ConfigError, match="observable"):
            sweeps.SweepSpec(axis1=self.axis(), observable="entropy")

    def test_duplicate_axes(self):
        with pytest.raises(ConfigError, match="must differ"):
            sweeps.SweepSpec(axis1=self.axis(), axis2=self.axis())

    def test_override_colliding_with_axis(self):
        with pytest.raises(ConfigError, match="collide"):
            sweeps.SweepSpec(axis1=self.axis(), overrides={"delta_c": 0.0})

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="unknown override"):
            sweeps.SweepSpec(axis1=self.axis(), overrides={"gain": 0.0})

    def test_optimal_excludes_direct_couplings(self):
        with pytest.raises(ConfigError, match="cannot also be set"):
            sweeps.SweepSpec(
                axis1=self.axis(), overrides={"J": 0.5}, optimal_j_theta=True
            )
        with pytest.raises(ConfigError, match="cannot also be set"):
            sweeps.SweepSpec(axis1=self.axis("J"), optimal_j_theta=True)

    def test_needs_a_direction(self):
        with pytest.raises(ConfigError, match="at least one direction"):
            sweeps.SweepSpec(axis1=self.axis(), directions=())


class TestParseDirections:
    def test_both(self):
        assert sweeps.parse_directions("both") == (
            Direction.FORWARD,
            Direction.BACKWARD,
        )

    def test_single(self):
        assert sweeps.parse_directions("forward") == (Direction.FORWARD,)
        assert sweeps.parse_directions(" Backward ") == (Direction.BACKWARD,)

    def test_junk(self):
        with pytest.raises(ConfigError, match="forward, backward, or both"):
            sweeps.parse_directions("sideways")


class TestRunSweep:
    def test_matches_pointwise_statistics(self):
        base = reference_params()
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("delta_c", -1.0, 1.0, 9),
            overrides={"J": 0.5, "theta": 0.3},
        )
        result = sweeps.run_sweep(spec, base)
        for direction in spec.directions:
            p = dataclasses.replace(base, direction=direction)
            for i, dc in enumerate(result.values1):
                stats = steady_state.steady_stats(
                    dataclasses.replace(p, delta_c=float(dc)), j=0.5, theta=0.3
                )
                grid = result.stats[direction]
                assert grid["g2"][i] == pytest.approx(stats.g2, rel=1e-12)
                assert grid["p1"][i] == pytest.approx(stats.p1, rel=1e-12)
                assert grid["p2"][i] == pytest.approx(stats.p2, rel=1e-12)
                assert grid["n_paper"][i] == pytest.approx(
                    stats.n_cavity_paper, rel=1e-12
                )
                assert grid["n_full"][i] == pytest.approx(
                    stats.n_cavity_full, rel=1e-12
                )

    def test_optimal_grid_matches_scalar_solver(self):
        base = reference_params()
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("delta_e", -1.5, 1.0, 5),
            directions=(Direction.FORWARD,),
            optimal_j_theta=True,
        )
        result = sweeps.run_sweep(spec, base)
        d = Direction.FORWARD
        assert result.valid[d].all()
        for i, de in enumerate(result.values1):
            point = optimizer.solve_optimal(
                dataclasses.replace(base, delta_e=float(de), direction=d)
            )
            assert result.j_used[d][i] == pytest.approx(point.J, abs=1e-9)
            assert result.theta_used[d][i] == pytest.approx(point.theta, abs=1e-9)
            assert result.delta_c_opt[d][i] == pytest.approx(
                point.delta_c_opt, abs=1e-9
            )
        # Without a delta_c axis the sweep evaluates at the per-point optimal
        # detuning, so the blockade must be essentially exact everywhere.
        assert result.stats[d]["g2"].max() < 1e-20

    def test_unsolvable_points_masked(self):
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("delta_e", -1.0, 1.0, 5),
            optimal_j_theta=True,
        )
        result = sweeps.run_sweep(spec, reference_params())
        for direction in spec.directions:
            assert list(result.valid[direction]) == [True, True, False, True, True]
            assert math.isnan(result.stats[direction]["g2"][2])

    def test_parallel_matches_serial(self):
        base = reference_params()
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("J", -2.0, 2.0, 9),
            axis2=sweeps.SweepAxis("theta", -3.0, 3.0, 7),
            overrides={"delta_c": 0.0},
        )
        serial = sweeps.run_sweep(spec, base, jobs=1)
        parallel = sweeps.run_sweep(spec, base, jobs=3)
        for direction in spec.directions:
            assert np.array_equal(
                serial.valid[direction], parallel.valid[direction]
            )
            for name in sweeps.STAT_COLUMNS:
                assert np.array_equal(
                    serial.stats[direction][name],
                    parallel.stats[direction][name],
                    equal_nan=True,
                )

    def test_observable_grid_accessor(self):
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("delta_c", -1.0, 1.0, 3),
            overrides={"J": 0.5, "theta": 0.3},
            observable="n_paper",
        )
        result = sweeps.run_sweep(spec, reference_params())
        d = Direction.FORWARD
        assert np.array_equal(
            result.observable_grid(d), result.stats[d]["n_paper"]
        )


class TestSweepCsv:
    def cross_zero_result(self):
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("delta_e", -1.0, 1.0, 5),
            optimal_j_theta=True,
        )
        return sweeps.run_sweep(spec, reference_params())

    def test_one_dimensional_layout(self, tmp_path):
        result = self.cross_zero_result()
        names = sweeps.write_sweep_csv(result, tmp_path / "scan.csv")
        assert names == ["scan.csv"]
        lines = (tmp_path / "scan.csv").read_text().splitlines()

        assert lines[0] == f"# version = {result.provenance['version']}"
        assert lines[1] == f"# config_hash = {result.provenance['config_hash']}"
        assert lines[2] == "# axis1 = delta_e, -1.0, 1.0, 5"
        assert lines[3] == "delta_e,direction,p1,p2,g2,n_paper,n_full,valid"

        body = [line.split(",") for line in lines[4:]]
        assert len(body) == 10
        assert [row[1] for row in body[:5]] == ["forward"] * 5
        assert [row[1] for row in body[5:]] == ["backward"] * 5
        for offset, direction in ((0, Direction.FORWARD), (5, Direction.BACKWARD)):
            for i in range(5):
                row = body[offset + i]
                assert float(row[0]) == result.values1[i]
                if result.valid[direction][i]:
                    assert row[-1] == "true"
                    assert float(row[4]) == result.stats[direction]["g2"][i]
                else:
                    assert row[-1] == "false"
                    assert row[2:7] == [""] * 5

    def test_two_dimensional_per_direction_files(self, tmp_path):
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("J", -2.0, 2.0, 3),
            axis2=sweeps.SweepAxis("theta", -3.0, 3.0, 4),
            overrides={"delta_c": 0.0},
            observable="n_paper",
        )
        result = sweeps.run_sweep(spec, reference_params())
        names = sweeps.write_sweep_csv(result, tmp_path / "grid.csv")
        assert names == ["grid_forward.csv", "grid_backward.csv"]

        for name, direction in zip(names, spec.directions):
            lines = (tmp_path / name).read_text().splitlines()
            assert lines[2] == "# axis1 = J, -2.0, 2.0, 3"
            assert lines[3] == "# axis2 = theta, -3.0, 3.0, 4"
            assert lines[4] == "# observable = n_paper"
            body = lines[5:]
            assert len(body) == 3
            parsed = np.array(
                [
                    [float(cell) if cell else math.nan for cell in row.split(",")]
                    for row in body
                ]
            )
            assert parsed.shape == (3, 4)
            expected = np.where(
                result.valid[direction],
                result.observable_grid(direction),
                math.nan,
            )
            assert np.array_equal(parsed, expected, equal_nan=True)

    def test_parallel_csv_bytes_identical(self, tmp_path):
        base = reference_params()
        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("J", -2.0, 2.0, 9),
            axis2=sweeps.SweepAxis("theta", -3.0, 3.0, 7),
            overrides={"delta_c": 0.0},
        )
        sweeps.write_sweep_csv(
            sweeps.run_sweep(spec, base, jobs=1), tmp_path / "serial.csv"
        )
        sweeps.write_sweep_csv(
            sweeps.run_sweep(spec, base, jobs=3), tmp_path / "parallel.csv"
        )
        for direction in ("forward", "backward"):
            assert (tmp_path / f"serial_{direction}.csv").read_bytes() == (
                tmp_path / f"parallel_{direction}.csv"
            ).read_bytes()


class TestFigures:
    def test_unknown_name(self, tmp_path):
        with pytest.raises(figures.UnknownFigure, match="fig2a"):
            figures.figure("fig9z", tmp_path)

    def test_preset_names(self):
        assert figures.FIGURE_NAMES == (
            "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d",
            "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig6c", "fig6d",
        )

    def test_rerun_is_bit_identical(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        for name in ("fig2a", "fig6a"):
            files = figures.figure(name, first)
            assert figures.figure(name, second) == files
            for fname in files:
                assert (first / fname).read_bytes() == (second / fname).read_bytes()

    def test_detuning_sweep_figure_files(self, tmp_path):
        files = figures.figure("fig2a", tmp_path)
        assert files == ["fig2a.csv", "fig2a.svg"]
        header = (tmp_path / "fig2a.csv").read_text().splitlines()[3]
        assert header == "delta_c,direction,p1,p2,g2,n_paper,n_full,valid"
        assert (tmp_path / "fig2a.svg").read_text().startswith("<svg")

    def test_microwave_comparison_content(self, tmp_path):
        figures.figure("fig3c", tmp_path)
        lines = (tmp_path / "fig3c.csv").read_text().splitlines()
        assert lines[0] == "delta_c,g2_microwave_on,g2_microwave_off"
        data = np.array(
            [
                [float(cell) if cell else math.nan for cell in line.split(",")]
                for line in lines[1:]
            ]
        )
        dc, on, off = data[:, 0], data[:, 1], data[:, 2]
        point = optimizer.solve_optimal(reference_params())

        # Microwave on: essentially exact antibunching at the optimal detuning.
        i_on = np.nanargmin(on)
        assert on[i_on] < 1e-2
        assert abs(dc[i_on] - point.delta_c_opt) <= (dc[1] - dc[0]) + 1e-12
        # Microwave off: the dip survives but cannot reach the same depth.
        off_min = np.nanmin(off)
        assert 1e-2 < off_min < 1.0


def decode_embedded_png(svg_text: str) -> np.ndarray:
    marker = "base64,"
    start = svg_text.index(marker) + len(marker)
    end = svg_text.index('"', start)
    data = base64.b64decode(svg_text[start:end])
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    pos = 8
    width = height = 0
    compressed = b""
    while pos < len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        body = data[pos + 8 : pos + 8 + length]
        if tag == b"IHDR":
            width, height = struct.unpack(">II", body[:8])
        elif tag == b"IDAT":
            compressed += body
        pos += 12 + length
    raw = zlib.decompress(compressed)
    stride = 1 + 3 * width
    rows = []
    for r in range(height):
        assert raw[r * stride] == 0  # filter byte per scanline
        rows.append(raw[r * stride + 1 : (r + 1) * stride])
    return np.frombuffer(b"".join(rows), dtype=np.uint8).reshape(height, width, 3)


class TestSvgPlot:
    def test_linear_ticks(self):
        assert svgplot.linear_ticks(0.0, 10.0) == [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
        ticks = svgplot.linear_ticks(-1.0, 1.0)
        assert ticks == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])
        assert ticks[2] == 0.0

    def test_log_ticks(self):
        assert svgplot.log_ticks(1e-4, 5e-2) == [1e-4, 1e-3, 1e-2, 1e-1]
        # Huge ranges thin to at most ~10 decade labels.
        assert len(svgplot.log_ticks(1e-30, 1.0)) <= 12

    def test_nan_breaks_line_into_runs(self):
        plot = svgplot.LinePlot(xlabel="x", ylabel="y")
        plot.add_line(
            np.array([0.0, 1.0, 2.0, 3.0]),
            np.array([1.0, math.nan, 2.0, 3.0]),
            "",
        )
        svg = plot.render()
        # Isolated first point becomes a marker; the trailing run is one line.
        assert svg.count("<circle") == 1
        assert svg.count("<polyline") == 1

    def test_log_scale_drops_nonpositive(self):
        plot = svgplot.LinePlot(xlabel="x", ylabel="y", log_y=True)
        plot.add_line(
            np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 2.0]), ""
        )
        svg = plot.render()
        assert svg.count("<polyline") == 1
        assert svg.count("<circle") == 0

    def test_heatmap_colors_and_missing_cells(self):
        z = np.array([[math.nan, 1.0], [2.0, 3.0]])
        heat = svgplot.Heatmap(
            x=np.array([0.0, 1.0]),
            y=np.array([0.0, 1.0]),
            z=z,
            xlabel="x",
            ylabel="y",
            log10_color=False,
        )
        rgb = decode_embedded_png(heat.render())
        assert rgb.shape == (2, 2, 3)
        # Top row is max y: z[:, 1] = (1, 3) spans the color ramp ends.
        assert tuple(rgb[0, 0]) == (68, 1, 84)
        assert tuple(rgb[0, 1]) == (253, 231, 37)
        # Bottom row is min y: the NaN cell renders in the missing-data gray.
        assert tuple(rgb[1, 0]) == (224, 224, 224)
        assert tuple(rgb[1, 1]) == (33, 145, 140)

    def test_heatmap_reports_color_range(self):
        z = np.array([[1.0, 10.0], [100.0, 1000.0]])
        heat = svgplot.Heatmap(
            x=np.array([0.0, 1.0]),
            y=np.array([0.0, 1.0]),
            z=z,
            xlabel="x",
            ylabel="y",
            color_label="log10 g2",
        )
        svg = heat.render()
        assert "log10 g2: 0 to 3" in svg
        assert "<image" in svg


class TestCliInProcess:
    def test_g2_prints_statistics(self, capsys):
        assert cli.main(["g2"]) == 0
        kv = kv_lines(capsys.readouterr().out)
        stats = steady_state.steady_stats(reference_params())
        assert kv["direction"] == "forward"
        assert float(kv["delta_c"]) == 0.0
        assert float(kv["g2"]) == stats.g2
        assert float(kv["p1"]) == stats.p1
        assert float(kv["p2"]) == stats.p2
        assert float(kv["n_paper"]) == stats.n_cavity_paper
        assert float(kv["n_full"]) == stats.n_cavity_full

    def test_g2_with_direct_couplings(self, capsys):
        assert cli.main(["g2", "--J", "0.5", "--theta", "0.3"]) == 0
        kv = kv_lines(capsys.readouterr().out)
        stats = steady_state.steady_stats(reference_params(), j=0.5, theta=0.3)
        assert float(kv["g2"]) == stats.g2

    def test_optimize_reports_root(self, capsys):
        assert cli.main(["optimize"]) == 0
        kv = kv_lines(capsys.readouterr().out)
        point = optimizer.solve_optimal(reference_params())
        assert float(kv["J"]) == point.J
        assert float(kv["theta"]) == point.theta
        assert float(kv["delta_c_opt"]) == point.delta_c_opt
        assert float(kv["residual"]) == point.residual
        assert float(kv["g2"]) < 1e-10

    def test_optimize_fixed_detuning(self, capsys):
        assert cli.main(["optimize", "--fix-delta-c", "--delta-c", "0.0"]) == 0
        kv = kv_lines(capsys.readouterr().out)
        assert float(kv["delta_c_opt"]) == 0.0
        assert float(kv["g2"]) < 1e-10

    def test_sweep_writes_expected_bytes(self, tmp_path, capsys):
        rc = cli.main(
            [
                "sweep",
                "--axis1", "delta_c,-1,1,7",
                "--J", "0.5",
                "--theta", "0.3",
                "--directions", "both",
                "--out", str(tmp_path),
                "--name", "cli",
                "--jobs", "2",
            ]
        )
        assert rc == 0
        assert str(tmp_path / "cli.csv") in capsys.readouterr().out

        spec = sweeps.SweepSpec(
            axis1=sweeps.SweepAxis("delta_c", -1.0, 1.0, 7),
            overrides={"J": 0.5, "theta": 0.3},
            directions=sweeps.parse_directions("both"),
        )
        result = sweeps.run_sweep(spec, reference_params(), jobs=2)
        sweeps.write_sweep_csv(result, tmp_path / "direct.csv")
        assert (tmp_path / "cli.csv").read_bytes() == (
            tmp_path / "direct.csv"
        ).read_bytes()

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        config = tmp_path / "point.cfg"
        config.write_text(
            "# working point\ndelta_c = 0.5\ne_eg = 0.005\n", encoding="utf-8"
        )
        rc = cli.main(["g2", "--config", str(config), "--delta-c", "1.0"])
        assert rc == 0
        kv = kv_lines(capsys.readouterr().out)
        assert float(kv["delta_c"]) == 1.0
        expected = steady_state.steady_stats(
            dataclasses.replace(reference_params(), delta_c=1.0, e_eg=0.005)
        )
        assert float(kv["g2"]) == expected.g2

    def test_missing_config_file(self, tmp_path, capsys):
        rc = cli.main(["g2", "--config", str(tmp_path / "absent.cfg")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_figure_is_config_error(self, tmp_path, capsys):
        assert cli.main(["figure", "fig9z", "--out", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_axis_is_config_error(self, capsys):
        assert cli.main(["sweep", "--axis1", "delta_c,0,1"]) == 1
        assert "name,min,max,n" in capsys.readouterr().err

    def test_invalid_mirror_split_is_config_error(self, capsys):
        # --kappa1 5 slides kappa2 negative; rejected before any solve.
        assert cli.main(["g2", "--kappa1", "5.0"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_jobs_must_be_positive(self, capsys):
        rc = cli.main(["sweep", "--axis1", "delta_c,0,1,5", "--jobs", "0"])
        assert rc == 1
        assert "--jobs" in capsys.readouterr().err

    def test_no_microwave_root_is_numerical_failure(self, capsys):
        assert cli.main(["optimize", "--e-eg", "0"]) == 2
        assert "numerical failure:" in capsys.readouterr().err

    def test_degenerate_detuning_is_numerical_failure(self, capsys):
        assert cli.main(["optimize", "--delta-e", "0"]) == 2
        assert "numerical failure:" in capsys.readouterr().err


class TestCliSubprocess:
    def run(self, *args: str):
        return subprocess.run(
            [sys.executable, "-m", "cavityblockade", *args],
            capture_output=True,
            text=True,
        )

    def test_help_exits_cleanly(self):
        proc = self.run("-h")
        assert proc.returncode == 0
        assert "usage: cavityblockade" in proc.stdout

    def test_g2_entry_point(self):
        proc = self.run("g2")
        assert proc.returncode == 0
        assert "g2 = " in proc.stdout

    def test_figure_regeneration_matches_library(self, tmp_path):
        cli_dir = tmp_path / "from_cli"
        lib_dir = tmp_path / "from_lib"
        proc = self.run("figure", "fig2b", "--out", str(cli_dir), "--jobs", "2")
        assert proc.returncode == 0
        files = figures.figure("fig2b", lib_dir)
        for name in files:
            assert str(cli_dir / name) in proc.stdout
            assert (cli_dir / name).read_bytes() == (lib_dir / name).read_bytes()
