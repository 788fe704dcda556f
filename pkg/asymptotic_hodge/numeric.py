"""
浮点数值层

精确对象到 numpy 数组的转换、矩阵指数、半单算子的实数次幂、
以及正定性判定所需的广义 Hermite 特征值。分数次幂只能在这里计算。
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy import linalg as sla

from .config import Config
from .linear_core import (
    DecFiltration,
    ExactComplex,
    IncFiltration,
    Operator,
    ScalarField,
    Subspace,
    eigenframe,
    integer_eigenspaces,
)

logger = logging.getLogger(__name__)


def float_field(tolerance: Optional[float] = None) -> ScalarField:
    """浮点标量域，容差缺省取配置项 FLOAT_TOLERANCE"""
    if tolerance is None:
        tolerance = Config().FLOAT_TOLERANCE
    return ScalarField("float", exact=False, tolerance=tolerance)


FLOAT = float_field()


def to_numpy(op: Operator) -> np.ndarray:
    arr = np.array([[complex(x) for x in row] for row in op.rows], dtype=complex)
    return arr.reshape(op.n, op.n)


def from_numpy(arr: np.ndarray, field: ScalarField = FLOAT) -> Operator:
    return Operator(np.asarray(arr, dtype=complex).tolist(), field)


def vector_to_float(v: Sequence) -> list:
    return [complex(x) for x in v]


def subspace_to_float(s: Subspace, field: ScalarField = FLOAT) -> Subspace:
    if not s.field.exact:
        return s
    return Subspace(s.ambient_dim, [vector_to_float(b) for b in s.basis], field)


def operator_to_float(op: Operator, field: ScalarField = FLOAT) -> Operator:
    if not op.field.exact:
        return op
    return Operator([[complex(x) for x in r] for r in op.rows], field)


def inc_to_float(W: IncFiltration, field: ScalarField = FLOAT) -> IncFiltration:
    if not W.field.exact:
        return W
    steps = {k: subspace_to_float(s, field) for k, s in W.steps().items()}
    return IncFiltration(steps, W.ambient_dim, field)


def dec_to_float(F: DecFiltration, field: ScalarField = FLOAT) -> DecFiltration:
    if not F.field.exact:
        return F
    steps = {p: subspace_to_float(s, field) for p, s in F.steps().items()}
    return DecFiltration(steps, F.ambient_dim, field)


def exactify(z) -> ExactComplex:
    """浮点数按其二进制值精确转换为高斯有理数"""
    return ExactComplex.of(complex(z))


def exactify_operator(op) -> Operator:
    arr = to_numpy(op) if isinstance(op, Operator) else np.asarray(op, dtype=complex)
    return Operator([[exactify(x) for x in row] for row in arr.tolist()])


def expm(op: Operator) -> Operator:
    """浮点矩阵指数"""
    return from_numpy(sla.expm(to_numpy(op)), op.field if not op.field.exact else FLOAT)


def spectral_function(
    spaces: Dict, n: int, weight: Callable[[object], complex]
) -> Operator:
    """
    在给定的直和分解上按块作用 weight(键) 的浮点算子 P·diag·P⁻¹

    Args:
        spaces: 键 -> 子空间（精确）
        n: 环境维数
        weight: 键到标量的函数

    Returns:
        浮点 Operator
    """
    P, labels = eigenframe(spaces, n, next(iter(spaces.values())).field)
    P_np = to_numpy(P)
    diag = np.diag([complex(weight(label)) for label in labels])
    return from_numpy(P_np @ diag @ np.linalg.inv(P_np))


def hermitian_part(arr: np.ndarray) -> np.ndarray:
    return (arr + arr.conj().T) / 2


def min_generalized_eigenvalue(form: np.ndarray, gram: np.ndarray) -> float:
    """Hermite 矩阵对 (form, gram) 的最小广义特征值，gram 须正定"""
    if form.size == 0:
        return float("inf")
    values = sla.eigh(hermitian_part(form), hermitian_part(gram), eigvals_only=True)
    return float(np.min(values))


def min_eigenvalue(form: np.ndarray) -> float:
    if form.size == 0:
        return float("inf")
    return float(np.min(np.linalg.eigvalsh(hermitian_part(form))))


def _rational_sqrt(y: Fraction) -> Optional[Fraction]:
    if y < 0:
        return None
    rn, rd = math.isqrt(y.numerator), math.isqrt(y.denominator)
    if rn * rn == y.numerator and rd * rd == y.denominator:
        return Fraction(rn, rd)
    return None


def exact_power(y, exponent) -> Optional[Fraction]:
    """y^exponent 为有理数时精确给出（整数或半整数指数），否则返回 None"""
    try:
        base = Fraction(y)
    except (TypeError, ValueError):
        return None
    e = Fraction(exponent)
    if base <= 0:
        return None
    if e.denominator == 1:
        return base ** e.numerator
    if e.denominator == 2:
        root = _rational_sqrt(base)
        return root ** e.numerator if root is not None else None
    return None


def grading_power(op: Operator, y, alpha=1) -> Operator:
    """
    y^{α·op}：所有特征值处的幂都是有理数时返回精确算子，否则退回浮点

    Args:
        op: 整数特征值的半单算子（精确）
        y: 正实数
        alpha: 指数系数
    """
    spaces = integer_eigenspaces(op)
    if op.field.exact and not isinstance(y, complex):
        values = {lam: exact_power(y, Fraction(alpha) * lam) for lam in spaces}
        if all(v is not None for v in values.values()):
            P, labels = eigenframe(spaces, op.n, op.field)
            return P @ Operator.diagonal([values[lam] for lam in labels]) @ P.inverse()
    return spectral_function(spaces, op.n, lambda lam: float(y) ** (float(alpha) * lam))
