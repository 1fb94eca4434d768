"""Error type shared by every module.

Each failure carries a stable ``code`` string so callers (and the CLI) can
branch on the kind of failure without parsing messages.
"""


class MeanDistError(ValueError):
    def __init__(self, code: str, message: str = "", **details):
        self.code = code
        self.details = details
        super().__init__(f"{code}: {message}" if message else code)


def fail(code: str, message: str = "", **details) -> "MeanDistError":
    return MeanDistError(code, message, **details)
