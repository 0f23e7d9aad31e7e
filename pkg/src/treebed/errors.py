"""Exception types shared across the package."""


class TreebedError(Exception):
    """Base class for all package errors."""


class FormatError(TreebedError):
    """Raised when a host/tree/embedding file does not follow the format."""


class InvalidHypergraphError(TreebedError):
    """Raised when edge data does not describe a k-uniform hypergraph."""


class InvalidTreeError(TreebedError):
    """Raised when edge data does not describe a tight k-tree."""


class GeneratorError(TreebedError):
    """Raised when a random generator cannot satisfy its constraints."""


class EmbedError(TreebedError):
    """Raised when an embedding stage fails (precondition or search exhausted)."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage
