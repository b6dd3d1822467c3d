"""Exception types shared across the package."""


class RegretLabError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(RegretLabError, ValueError):
    pass


class ResourceLimitError(RegretLabError):
    """An exact computation would exceed its configured budget."""

    def __init__(self, what: str, needed: int, cap: int):
        self.what = what
        self.needed = needed
        self.cap = cap
        super().__init__(f"{what}: needs {needed} > cap {cap}")


class NotApplicableError(RegretLabError):
    """The requested check does not apply to this game (e.g. sigma == 0)."""
