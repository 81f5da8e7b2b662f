"""Figure rendering: files, exported guideline coordinates, edge cases."""

import math

import pytest

from dbm_plots.aggregate import MissingColumnsError
from dbm_plots.figures import KINDS, render
from dbm_plots.thresholds import threshold_dbm, threshold_sbm


def guideline_map(result):
    return {(g.family, g.alpha): g.a_star for g in result.guidelines}


class TestCurveFigures:
    def test_erp_curves_all_alphas(self, phase_csv, tmp_path):
        out = tmp_path / "erp.png"
        result = render("erp_curves", phase_csv, out)
        assert out.exists() and out.stat().st_size > 0
        assert not result.empty
        assert result.cells == 12
        marks = guideline_map(result)
        assert marks[("dbm", 0.4)] == pytest.approx(threshold_dbm(10.0, 0.4))
        assert marks[("dbm", 0.8)] == pytest.approx(14.4, rel=1e-12)
        assert marks[("sbm", None)] == pytest.approx(threshold_sbm(10.0))

    def test_alpha_filter_single_panel(self, phase_csv, tmp_path):
        result = render("erp_curves", phase_csv, tmp_path / "erp08.png", alpha=0.8)
        assert result.cells == 6
        marks = guideline_map(result)
        assert set(marks) == {("dbm", 0.8), ("sbm", None)}
        assert marks[("dbm", 0.8)] == pytest.approx(14.4, rel=1e-12)

    def test_no_overlay_exports_nothing(self, phase_csv, tmp_path):
        result = render("erp_curves", phase_csv, tmp_path / "bare.png", overlay=False)
        assert result.guidelines == ()

    def test_logerr_handles_zero_errors(self, phase_csv, tmp_path):
        # dbm rows are mostly exact (zero error); the log plot must not choke
        out = tmp_path / "logerr.png"
        result = render("logerr_curves", phase_csv, out)
        assert out.exists() and out.stat().st_size > 0
        assert not result.empty

    def test_unmatched_alpha_is_empty(self, phase_csv, tmp_path):
        out = tmp_path / "none.png"
        result = render("erp_curves", phase_csv, out, alpha=0.99)
        assert result.empty
        assert result.cells == 0
        assert out.exists()


class TestHeatmaps:
    def test_erp_heatmap_guidelines(self, phase_csv, tmp_path):
        out = tmp_path / "heat.png"
        result = render("heatmap_erp", phase_csv, out)
        assert out.exists() and out.stat().st_size > 0
        marks = guideline_map(result)
        # one threshold point per grid alpha plus the flat sbm line
        assert set(marks) == {("dbm", 0.4), ("dbm", 0.8), ("sbm", None)}
        for alpha in (0.4, 0.8):
            assert marks[("dbm", alpha)] == pytest.approx(threshold_dbm(10.0, alpha))

    def test_accuracy_heatmap_renders(self, phase_csv, tmp_path):
        result = render("heatmap_accuracy", phase_csv, tmp_path / "acc.png")
        assert not result.empty
        assert result.cells == 6  # dbm slice only

    def test_method_slice(self, phase_csv, tmp_path):
        result = render("heatmap_erp", phase_csv, tmp_path / "sbm.png", method="sbm")
        assert result.cells == 6
        missing = render(
            "heatmap_erp", phase_csv, tmp_path / "ghost.png", method="ghost"
        )
        assert missing.empty


class TestSizeFigures:
    def test_scaling_two_panel(self, scaling_csv, tmp_path):
        out = tmp_path / "scaling.png"
        result = render("scaling", scaling_csv, out)
        assert out.exists() and out.stat().st_size > 0
        assert result.cells == 6
        assert result.guidelines == ()

    def test_runtime(self, scaling_csv, tmp_path):
        out = tmp_path / "runtime.png"
        result = render("runtime", scaling_csv, out)
        assert out.exists() and out.stat().st_size > 0


class TestEdgeCases:
    def test_empty_csv_annotated_figure(self, empty_csv, tmp_path):
        for kind in KINDS:
            out = tmp_path / f"{kind}.png"
            result = render(kind, empty_csv, out)
            assert result.empty
            assert out.exists() and out.stat().st_size > 0

    def test_missing_column_raises(self, missing_column_csv, tmp_path):
        with pytest.raises(MissingColumnsError, match="alpha"):
            render("erp_curves", missing_column_csv, tmp_path / "x.png")

    def test_unknown_kind(self, phase_csv, tmp_path):
        with pytest.raises(ValueError, match="kind"):
            render("pie", phase_csv, tmp_path / "x.png")

    def test_vector_sidecar(self, phase_csv, tmp_path):
        out = tmp_path / "fig.png"
        result = render("erp_curves", phase_csv, out, vector=True)
        assert result.vector_path == str(tmp_path / "fig.svg")
        assert (tmp_path / "fig.svg").stat().st_size > 0

    def test_deterministic_bytes(self, phase_csv, tmp_path):
        one = tmp_path / "one.png"
        two = tmp_path / "two.png"
        render("heatmap_erp", phase_csv, one)
        render("heatmap_erp", phase_csv, two)
        assert one.read_bytes() == two.read_bytes()

    def test_math_of_example_guideline(self):
        # the alpha=0.8, b=10 guideline lands at exactly 14.4
        assert threshold_dbm(10.0, 0.8) == pytest.approx(
            10.0 + 2.0 * math.sqrt(10.0 * 0.4) + 0.4, rel=1e-15
        )
