"""
Exceptions specific to the ledger feature.
"""

from src.shared.exceptions import AppError


class LedgerError(AppError):
    """Base exception for ledger errors."""

    def __init__(self, message: str, code: str = "LEDGER_ERROR"):
        super().__init__(message, code=code)


class UnknownAccount(LedgerError):
    """Raised when an account is not mapped to any shard or absent from a shard's state."""

    def __init__(self, account: int):
        self.account = account
        super().__init__(f"Account {account} is not homed here.", code="UNKNOWN_ACCOUNT")


class InsufficientBalance(LedgerError):
    """Raised when a debit exceeds the available balance."""

    def __init__(self, account: int, balance: int, amount: int):
        self.account = account
        self.balance = balance
        self.amount = amount
        super().__init__(
            f"Account {account} holds {balance}, cannot debit {amount}.",
            code="INSUFFICIENT_BALANCE",
        )


class NonceReplay(LedgerError):
    """Raised when a debit reuses a nonce that was already applied."""

    def __init__(self, account: int, nonce: int, applied: int):
        self.account = account
        self.nonce = nonce
        self.applied = applied
        super().__init__(
            f"Nonce {nonce} for account {account} already used (applied {applied}).",
            code="NONCE_REPLAY",
        )


class NonceGap(LedgerError):
    """Raised when a debit skips ahead of the next expected nonce."""

    def __init__(self, account: int, nonce: int, applied: int):
        self.account = account
        self.nonce = nonce
        self.applied = applied
        super().__init__(
            f"Nonce {nonce} for account {account} is ahead of {applied + 1}.",
            code="NONCE_GAP",
        )
