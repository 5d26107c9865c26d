"""Exception hierarchy shared across the pipeline.

The CLI maps these onto process exit codes: InputError -> 2,
SchemaError -> 3, NumericError -> 4.
"""


class TopicTreeError(Exception):
    """Base class for all pipeline errors."""


class InputError(TopicTreeError):
    """Unreadable, malformed or inconsistent input data."""


class SchemaError(TopicTreeError):
    """An export or manifest does not match the expected schema."""


class NumericError(TopicTreeError):
    """A numerical routine failed (bad shapes, degenerate factors, ...)."""
