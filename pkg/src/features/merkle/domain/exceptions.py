"""
Exceptions specific to the merkle feature.
"""

from src.shared.exceptions import AppError


class MerkleError(AppError):
    """Base exception for state tree errors."""

    def __init__(self, message: str, code: str = "MERKLE_ERROR"):
        super().__init__(message, code=code)


class DuplicateKey(MerkleError):
    """Raised when a build receives the same key twice."""

    def __init__(self, key: bytes):
        self.key = key
        super().__init__(f"Key {key.hex()[:16]} appears more than once.", code="DUPLICATE_KEY")


class KeyAbsent(MerkleError):
    """Raised when a proof is requested for a key the tree does not hold."""

    def __init__(self, key: bytes):
        self.key = key
        super().__init__(f"Key {key.hex()[:16]} is not in the tree.", code="KEY_ABSENT")
