"""Exception hierarchy for the cryomux toolkit.

All domain errors derive from CryomuxError so callers (and the CLI) can
distinguish domain failures (exit 1) from usage errors (exit 2).
"""


class CryomuxError(Exception):
    """Base class for all cryomux domain errors."""


class GridMismatch(CryomuxError):
    """Operands do not share the same frequency grid / reference impedance."""


class SingularConversion(CryomuxError):
    """S <-> ABCD conversion is singular at one or more grid points."""


class OutOfSpan(CryomuxError):
    """Requested frequencies fall outside the source grid's span."""


class InvalidLoss(CryomuxError):
    """Passive loss factor below 1 (would imply gain)."""


class UnachievableProfile(CryomuxError):
    """Component spec cannot be rendered (e.g. NT minimum above NT average)."""


class BadChannel(CryomuxError):
    """Switch channel index outside [0, n_channels)."""


class NoMatchExists(CryomuxError):
    """The high-pass L-section topology cannot match the given impedance."""


class NoConvergence(CryomuxError):
    """Iterative fit failed to converge within the iteration budget."""


class DegenerateData(CryomuxError):
    """Input data carries no usable structure (e.g. all-constant samples)."""


class ReservedBitsSet(CryomuxError):
    """SPI frame has non-zero reserved bits."""


class IncompleteConfig(CryomuxError):
    """Assembly configuration is missing a required element."""


class ConfigError(CryomuxError):
    """Configuration file failed validation; carries per-field diagnostics."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class BadSebIndex(CryomuxError):
    """Requested SEB index not present in the configuration."""


class WindowTooShort(CryomuxError):
    """Analysis window shorter than the required number of integration periods."""


class WindowOverlap(CryomuxError):
    """Analysis windows are not disjoint."""


class NoResonanceFound(CryomuxError):
    """No feature with sufficient prominence in the sweep."""
