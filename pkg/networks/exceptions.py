class CauchyNetError(Exception):
    """Base class for every numerical or data error raised by the project."""


class PoleEncountered(CauchyNetError):
    def __init__(self, message='shifted component hit a pole', where=None):
        super().__init__(message)
        self.where = where


class NonFinite(CauchyNetError, ArithmeticError):
    pass


class TrainingDiverged(NonFinite):
    def __init__(self, epoch, log, message=None):
        super().__init__(message or f'training diverged at epoch {epoch}')
        self.epoch = epoch
        self.log = log


class DivisionByZero(CauchyNetError, ZeroDivisionError):
    pass


class SchemaError(CauchyNetError, ValueError):
    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class SingularSystem(CauchyNetError):
    pass


class DegenerateRange(CauchyNetError, ValueError):
    pass


class NonPositiveValue(CauchyNetError, ValueError):
    pass


class ParseError(CauchyNetError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class LengthMismatch(CauchyNetError, ValueError):
    pass
