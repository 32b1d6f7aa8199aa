"""Exception types shared across the toolkit."""


class ZndStabError(Exception):
    """Base class for all toolkit errors."""


class ParameterDomainError(ZndStabError, ValueError):
    """A physical or scaling parameter violates its admissible range."""


class DegenerateProfileError(ZndStabError):
    """Profile construction hit the Chapman-Jouget degenerate point (algebraic decay)."""


class ConsistencyError(ZndStabError):
    """A runtime self-check failed (mode counts, spectra, branch selection)."""


class IntegrationError(ZndStabError):
    """The ODE integrator could not meet its tolerance or step budget."""


class ContourError(ZndStabError):
    """A winding computation could not be completed (near-zero on contour)."""


class InconclusiveError(ZndStabError):
    """A verdict-style computation produced evidence too ambiguous to call.

    Raised only where the caller did not opt into receiving an explicit
    inconclusive result object.
    """


class GlancingError(ZndStabError):
    """A frequency query sits too close to the glancing set for branch selection."""


class StaleInputError(ZndStabError):
    """An input file does not match the manifest hash that should vouch for it."""
