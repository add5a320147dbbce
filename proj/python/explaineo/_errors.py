import json


class ExplaineoError(Exception):
    """A library error. `code` is the error name, e.g. "ParseError" or "NotInput"."""

    def __init__(self, code, message, details="{}"):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.details = json.loads(details) if isinstance(details, str) else details
