"""
异常层级

数学失败（退出码 1）继承 MathematicalError，输入失败（退出码 2）继承 InputError。
每个异常携带 clause 字段，标明第一个被违反的条件。
"""


class HodgeError(Exception):
    """所有错误的基类"""

    exit_code = 1

    def __init__(self, message: str, clause: str = ""):
        super().__init__(message)
        self.clause = clause or self.__class__.__name__


class MathematicalError(HodgeError):
    exit_code = 1


class InputError(HodgeError):
    exit_code = 2


class DimensionMismatchError(MathematicalError):
    pass


class NotNilpotentError(MathematicalError):
    pass


class NotMixedHodgeError(MathematicalError):
    pass


class SplittingError(MathematicalError):
    pass


class UnsupportedLengthError(MathematicalError):
    pass


class RelativeFiltrationError(MathematicalError):
    pass


class OutOfChartError(MathematicalError):
    pass


class NotInClassifyingSpaceError(MathematicalError):
    pass


class LocalNormalFormError(MathematicalError):
    pass


class NoSolutionError(MathematicalError):
    pass


class NoCentralSolutionError(MathematicalError):
    pass


class BiextensionError(MathematicalError):
    pass


class NotEvenTypeError(MathematicalError):
    pass


class OddTypeError(MathematicalError):
    pass


class GridError(MathematicalError):
    pass


class NotClassifiedError(MathematicalError):
    pass


class SingularOperatorError(MathematicalError):
    pass


class InstanceFormatError(InputError):
    pass


class FiltrationError(InputError):
    pass
