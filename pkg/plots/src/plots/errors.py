"""Error types for the plotting layer."""


class PlotsError(Exception):
    """Any input problem that should stop rendering with a clear message."""


class MissingColumnError(PlotsError):
    """A figure referenced a CSV column that is not present."""

    def __init__(self, column: str, available: list[str], source: str):
        self.column = column
        super().__init__(
            f"column '{column}' not found in {source} "
            f"(available: {', '.join(available)})"
        )
