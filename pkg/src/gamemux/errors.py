"""Exception hierarchy shared by the gamemux modules."""


class GamemuxError(Exception):
    """Base class for all gamemux errors."""


class ProfileError(GamemuxError):
    """Invalid or inconsistent game traffic profile."""


class ConfigError(GamemuxError):
    """Bad configuration file or unknown model/profile name."""


class FlowAdmissionError(GamemuxError):
    """No free context identifier left for a new flow."""


class ContextMissError(GamemuxError):
    """Compressed record references a CID with no established context."""


class FramingError(GamemuxError):
    """Compressed record bytes inconsistent with its field mask."""


class TraceIntegrityError(GamemuxError):
    """Trace files do not belong to the same run or are malformed."""
