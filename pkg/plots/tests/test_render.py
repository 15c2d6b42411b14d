"""Rendering tests: every preset id draws its fixture CSV deterministically."""

import hashlib
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from plots import FIGURES, PlotsError, read_table
from plots.cli import main
from plots.render import build_figure, render

FIXTURES = Path(__file__).parent / "fixtures"


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.mark.parametrize("figure_id", sorted(FIGURES))
def test_every_figure_renders(figure_id, tmp_path):
    out = render(figure_id, FIXTURES / f"{figure_id}.csv", tmp_path / "out.png")
    assert out.is_file() and out.stat().st_size > 1000


def test_fig5a_two_series_log_axis():
    fig = build_figure("fig5a", read_table(FIXTURES / "fig5a.csv"))
    try:
        ax = fig.axes[0]
        assert ax.get_yscale() == "log"
        lines = ax.get_lines()
        assert len(lines) == 2
        labels = {line.get_label() for line in lines}
        assert labels == {"finesse_flat", "finesse_apodized"}
    finally:
        plt.close(fig)


@pytest.mark.parametrize(
    ("figure_id", "yscale", "n_series"),
    [
        ("fig2a", "linear", 8),
        ("fig2b", "linear", 6),  # fixture width; wider sweeps add columns
        ("fig3a", "log", 1),
        ("fig3b", "log", 1),
        ("fig3c", "log", 3),
        ("fig4a", "linear", 1),
        ("fig4b", "linear", 1),
        ("fig5b", "linear", 3),
        ("fig5c", "log", 3),
    ],
)
def test_axis_styles(figure_id, yscale, n_series):
    fig = build_figure(figure_id, read_table(FIXTURES / f"{figure_id}.csv"))
    try:
        ax = fig.axes[0]
        assert ax.get_yscale() == yscale
        assert len(ax.get_lines()) == n_series
    finally:
        plt.close(fig)


def test_missing_column_error_names_it(tmp_path):
    src = (FIXTURES / "fig3a.csv").read_text().splitlines()
    doctored = tmp_path / "doctored.csv"
    doctored.write_text(
        "\n".join(
            line.replace("energy_ratio[1]", "ratio[1]") for line in src
        )
        + "\n"
    )
    with pytest.raises(PlotsError, match="'energy_ratio'"):
        render("fig3a", doctored, tmp_path / "out.png")
    assert not (tmp_path / "out.png").exists()


def test_empty_csv_no_image(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("# scenario: figure\n")
    with pytest.raises(PlotsError, match="empty CSV"):
        render("fig3a", empty, tmp_path / "out.png")
    assert not (tmp_path / "out.png").exists()


def test_unknown_figure_id(tmp_path):
    with pytest.raises(PlotsError, match="unknown figure id 'fig9z'"):
        render("fig9z", FIXTURES / "fig3a.csv", tmp_path / "out.png")


def test_unsupported_format(tmp_path):
    with pytest.raises(PlotsError, match="unsupported output format"):
        render("fig3a", FIXTURES / "fig3a.csv", tmp_path / "out.pdf")


@pytest.mark.parametrize("suffix", [".svg", ".png"])
def test_golden_hash_stable(suffix, tmp_path):
    paths = [tmp_path / f"run{i}{suffix}" for i in (1, 2)]
    for p in paths:
        render("fig5c", FIXTURES / "fig5c.csv", p)
    assert sha256(paths[0]) == sha256(paths[1])


def test_svg_has_no_date_stamp(tmp_path):
    out = render("fig5a", FIXTURES / "fig5a.csv", tmp_path / "out.svg")
    text = out.read_text()
    assert "dc:date" not in text


def test_cli_success(tmp_path, capsys):
    out = tmp_path / "fig4b.png"
    code = main(
        ["render", "--figure", "fig4b",
         "--in", str(FIXTURES / "fig4b.csv"), "--out", str(out)]
    )
    assert code == 0 and out.is_file()
    assert str(out) in capsys.readouterr().out


def test_cli_missing_input(tmp_path, capsys):
    code = main(
        ["render", "--figure", "fig3a",
         "--in", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o.png")]
    )
    assert code == 2
    assert "not found" in capsys.readouterr().err
