"""Figure registry: which CSV columns each preset id draws, and how.

Axis scales follow the source figures' style: energy-ratio, finesse, and
oscillation-count axes are logarithmic; frequency sweeps and spatial
profiles are linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PlotsError
from .reader import Table


@dataclass(frozen=True)
class FigureDef:
    """Column references and axis style for one preset id."""

    x: str
    y: tuple[str, ...] = ()
    y_prefix: str | None = None
    yscale: str = "linear"
    xscale: str = "linear"
    markers: tuple[str, ...] = ("o", "s", "^", "d", "v", "*")
    legend: bool = True
    style: dict = field(default_factory=dict)

    def y_columns(self, table: Table) -> list[str]:
        """Resolve the series list against a concrete table.

        Explicit names are checked strictly (missing one is an error naming
        it); a prefix expands to every matching column and the sweep width
        may vary between runs, so only emptiness is an error.
        """
        if self.y_prefix is not None:
            found = table.columns_matching(self.y_prefix)
            if not found:
                raise PlotsError(
                    f"no columns starting with '{self.y_prefix}' in "
                    f"{table.source} (available: {', '.join(table.columns)})"
                )
            return found
        for name in (self.x, *self.y):
            table.column(name)  # raises MissingColumnError with the name
        return list(self.y)


FIGURES: dict[str, FigureDef] = {
    # mode frequencies vs trap intensity
    "fig2a": FigureDef(x="i0", y_prefix="f_m"),
    # tethered-system spectrum vs trap frequency
    "fig2b": FigureDef(x="f_opt", y_prefix="f_mode_", legend=False),
    # optical-to-mechanical energy ratio vs CM frequency
    "fig3a": FigureDef(x="f_cm", y=("energy_ratio",), yscale="log"),
    # CM-branch energy ratio vs trap frequency
    "fig3b": FigureDef(x="f_opt", y=("energy_ratio",), yscale="log"),
    # disk, tether, and composed enhancement factors
    "fig3c": FigureDef(
        x="f_cm", y=("disk_ratio", "tether_ratio", "composed_ratio"),
        yscale="log",
    ),
    # readout-coupling ratio vs CM frequency (signed, crosses zero)
    "fig4a": FigureDef(x="f_cm", y=("g_ratio",)),
    # radial displacement profile of the pinned mode
    "fig4b": FigureDef(x="r", y=("displacement",), markers=("",), legend=False),
    # cavity finesse vs waist-to-radius ratio: flat and apodized membranes
    "fig5a": FigureDef(
        x="w0_over_a", y=("finesse_flat", "finesse_apodized"), yscale="log",
    ),
    # intracavity intensity profiles
    "fig5b": FigureDef(
        x="r",
        y=("i_empty", "i_apodized_a_w0", "i_apodized_a_2p5w0"),
        markers=("", "", ""),
    ),
    # coherence budget vs disk radius
    "fig5c": FigureDef(x="radius", y=("n_th", "n_sc", "n_tot"), yscale="log"),
}
