"""Exception hierarchy shared by every module."""


class QRepSealError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(QRepSealError, ValueError):
    pass


class NotPsdError(QRepSealError, ValueError):
    pass


class CompletenessError(QRepSealError, ValueError):
    pass


class RuleKindError(QRepSealError, TypeError):
    pass


class EncodingError(QRepSealError, ValueError):
    pass


class ConfigError(QRepSealError, ValueError):
    pass


class ProtocolError(QRepSealError, ValueError):
    pass


class NotProductError(QRepSealError, ValueError):
    """An encoding is entangled across Alice's and Bob's subsystems."""

    def __init__(self, symbol, schmidt_coefficient):
        self.symbol = symbol
        self.schmidt_coefficient = float(schmidt_coefficient)
        super().__init__(
            f"encoding for symbol {symbol!r} is entangled "
            f"(second Schmidt coefficient {self.schmidt_coefficient:.3e})"
        )


class ScopeError(QRepSealError, ValueError):
    pass


class InfeasibleError(QRepSealError, ValueError):
    pass
