"""Exception hierarchy. Everything raised on purpose derives from SKGError."""


class SKGError(Exception):
    pass


class SchemaError(SKGError):
    """Unknown field, or an attempt to change a field's kind."""


class DuplicateIdError(SKGError):
    pass


class DocumentError(SKGError):
    """A document failed validation."""


class QuerySyntaxError(SKGError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class RequestError(SKGError):
    """A traversal request is malformed."""


class ScoringError(SKGError):
    """A scorer was asked for a ratio with an empty denominator."""


class SnapshotFormatError(SKGError):
    """Snapshot file is truncated, corrupt, or not a snapshot at all."""


class SnapshotVersionError(SnapshotFormatError):
    pass


class IngestError(SKGError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
