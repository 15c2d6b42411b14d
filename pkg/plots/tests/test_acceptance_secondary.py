"""Secondary acceptance gate: one printed pass/fail line (``pytest -s``)."""

import hashlib
from pathlib import Path

import matplotlib.pyplot as plt

from plots import FIGURES, read_table
from plots.render import build_figure, render

FIXTURES = Path(__file__).parent / "fixtures"


def test_secondary_figure_rendering(tmp_path):
    rendered = 0
    for figure_id in sorted(FIGURES):
        out = render(figure_id, FIXTURES / f"{figure_id}.csv",
                     tmp_path / f"{figure_id}.png")
        rendered += out.is_file() and out.stat().st_size > 0

    fig = build_figure("fig5a", read_table(FIXTURES / "fig5a.csv"))
    try:
        ax = fig.axes[0]
        fig5a_ok = ax.get_yscale() == "log" and len(ax.get_lines()) == 2
    finally:
        plt.close(fig)

    hashes = []
    for run in (1, 2):
        out = render("fig5a", FIXTURES / "fig5a.csv", tmp_path / f"g{run}.svg")
        hashes.append(hashlib.sha256(out.read_bytes()).hexdigest())
    stable = hashes[0] == hashes[1]

    ok = rendered == len(FIGURES) and fig5a_ok and stable
    line = (
        f"[{'PASS' if ok else 'FAIL'}] S1 figure rendering: "
        f"{rendered}/{len(FIGURES)} preset CSVs rendered; fig5a two series on "
        f"log axis: {fig5a_ok}; golden hash stable across two runs: {stable} "
        f"({hashes[0][:12]})"
    )
    print(line, flush=True)
    assert ok, line
