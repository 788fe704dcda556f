"""
精确线性代数核心

在高斯有理数域上实现子空间、滤链、算子与商空间坐标，全部运算不做舍入。
同一套算法也可在浮点标量域上运行（见 numeric.FLOAT），此时秩判定使用容差。
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exceptions import (
    DimensionMismatchError,
    FiltrationError,
    NotNilpotentError,
    SingularOperatorError,
)

logger = logging.getLogger(__name__)


class ExactComplex:
    """高斯有理数 re + i·im，实部虚部均为任意精度有理数"""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @classmethod
    def of(cls, value) -> "ExactComplex":
        """
        从 int / Fraction / "a/b" / {"re","im"} / float / complex 构造

        浮点按二进制值精确转换
        """
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, bool):
            raise TypeError("布尔值不是标量")
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        if isinstance(value, float):
            return cls(Fraction(value), 0)
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        if isinstance(value, str):
            return cls(Fraction(value.strip()), 0)
        if isinstance(value, dict):
            return cls(Fraction(value.get("re", 0)), Fraction(value.get("im", 0)))
        raise TypeError(f"无法转换为精确复数: {value!r}")

    @staticmethod
    def _lift(other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return ExactComplex(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ExactComplex(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return ExactComplex(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        norm = o.re * o.re + o.im * o.im
        if norm == 0:
            raise ZeroDivisionError("除以精确零")
        return ExactComplex(
            (self.re * o.re + self.im * o.im) / norm,
            (self.im * o.re - self.re * o.im) / norm,
        )

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ExactComplex(1) / (self ** (-k))
        result = ExactComplex(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def to_json(self):
        if self.im == 0:
            return str(self.re)
        return {"re": str(self.re), "im": str(self.im)}

    def __repr__(self):
        if self.im == 0:
            return f"ExactComplex({self.re})"
        return f"ExactComplex({self.re}, {self.im})"


I_UNIT = ExactComplex(0, 1)


@dataclass(frozen=True)
class ScalarField:
    """标量域：精确（ExactComplex）或浮点（complex，带容差）"""

    name: str
    exact: bool
    tolerance: float = 0.0

    def coerce(self, x):
        if self.exact:
            return ExactComplex.of(x)
        if isinstance(x, (str, dict)):
            x = ExactComplex.of(x)
        return complex(x)

    @property
    def zero(self):
        return ExactComplex(0) if self.exact else 0j

    @property
    def one(self):
        return ExactComplex(1) if self.exact else 1 + 0j

    @property
    def i(self):
        return I_UNIT if self.exact else 1j

    def is_zero(self, x, scale: float = 1.0) -> bool:
        if self.exact:
            return not x
        return abs(x) <= self.tolerance * max(1.0, scale)

    def conj(self, x):
        return x.conjugate()

    def i_power(self, k: int):
        """i 的整数次幂，精确给出 ±1 / ±i"""
        r = k % 4
        if self.exact:
            return [ExactComplex(1), I_UNIT, ExactComplex(-1), -I_UNIT][r]
        return [1 + 0j, 1j, -1 + 0j, -1j][r]


EXACT = ScalarField("exact", True)


def _compatible(a: ScalarField, b: ScalarField) -> ScalarField:
    if a.exact != b.exact:
        raise DimensionMismatchError("精确对象与浮点对象不能直接混合运算", "field")
    return a


# ---------------------------------------------------------------------------
# 矩阵基础运算
# ---------------------------------------------------------------------------


def row_reduce(
    rows: Sequence[Sequence], ncols: int, field: ScalarField = EXACT
) -> Tuple[List[List], List[int]]:
    """
    化为简化行阶梯形

    Args:
        rows: 行向量列表
        ncols: 列数
        field: 标量域

    Returns:
        (非零行组成的简化阶梯矩阵, 主元列)
    """
    m = [list(r) for r in rows]
    if not field.exact:
        # 浮点模式先逐行归一化，再用部分选主元
        normalized = []
        for r in m:
            peak = max((abs(x) for x in r), default=0.0)
            normalized.append([x / peak for x in r] if peak > 0 else r)
        m = normalized
    pivots: List[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r >= nrows:
            break
        if field.exact:
            piv = next((i for i in range(r, nrows) if m[i][c]), None)
        else:
            piv = max(range(r, nrows), key=lambda i: abs(m[i][c]))
            if field.is_zero(m[piv][c]):
                piv = None
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i == r:
                continue
            f = m[i][c]
            if f:
                row_r = m[r]
                m[i] = [a - f * b for a, b in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
    reduced = m[:r]
    if not field.exact:
        zero = field.zero
        for i, row in enumerate(reduced):
            reduced[i] = [zero if field.is_zero(x) else x for x in row]
            for j, pc in enumerate(pivots):
                reduced[i][pc] = field.one if i == j else zero
    return reduced, pivots


def nullspace(
    rows: Sequence[Sequence], ncols: int, field: ScalarField = EXACT
) -> List[List]:
    """齐次方程组 rows·x = 0 的解空间基"""
    if not rows:
        return [_unit(ncols, j, field) for j in range(ncols)]
    rref, pivots = row_reduce(rows, ncols, field)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [field.zero] * ncols
        v[f] = field.one
        for i, pc in enumerate(pivots):
            v[pc] = -rref[i][f]
        basis.append(v)
    return basis


def solve(
    matrix: Sequence[Sequence], rhs: Sequence, field: ScalarField = EXACT
) -> Optional[List]:
    """求 matrix·x = rhs 的一个特解（自由变量取零），无解返回 None"""
    if not matrix:
        return None
    ncols = len(matrix[0])
    augmented = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rref, pivots = row_reduce(augmented, ncols + 1, field)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = rref[i][ncols]
    return x


def determinant(matrix: Sequence[Sequence], field: ScalarField = EXACT):
    """行列式（高斯消元）"""
    m = [list(r) for r in matrix]
    n = len(m)
    det = field.one
    for c in range(n):
        if field.exact:
            piv = next((i for i in range(c, n) if m[i][c]), None)
        else:
            piv = max(range(c, n), key=lambda i: abs(m[i][c]))
            if m[piv][c] == 0:
                piv = None
        if piv is None:
            return field.zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        p = m[c][c]
        det = det * p
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def invert_matrix(matrix: Sequence[Sequence], field: ScalarField = EXACT) -> List[List]:
    n = len(matrix)
    augmented = [list(row) + _unit(n, i, field) for i, row in enumerate(matrix)]
    rref, pivots = row_reduce(augmented, 2 * n, field)
    if pivots[:n] != list(range(n)) or len(rref) < n:
        raise SingularOperatorError("矩阵不可逆", "invertible")
    return [row[n:] for row in rref[:n]]


def mat_mul(
    a: Sequence[Sequence], b: Sequence[Sequence], field: ScalarField = EXACT
) -> List[List]:
    cols = list(zip(*b)) if b else []
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = field.zero
            for x, y in zip(row, col):
                if x and y:
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_vec(a: Sequence[Sequence], v: Sequence, field: ScalarField = EXACT) -> List:
    out = []
    for row in a:
        acc = field.zero
        for x, y in zip(row, v):
            if x and y:
                acc = acc + x * y
        out.append(acc)
    return out


def _unit(n: int, j: int, field: ScalarField) -> List:
    v = [field.zero] * n
    v[j] = field.one
    return v


def scalar_to_json(x):
    if isinstance(x, ExactComplex):
        return x.to_json()
    x = complex(x)
    return {"re": x.real, "im": x.imag}


# ---------------------------------------------------------------------------
# 子空间
# ---------------------------------------------------------------------------


class Subspace:
    """以简化行阶梯形基为规范表示的子空间"""

    __slots__ = ("ambient_dim", "basis", "pivots", "field")

    def __init__(
        self,
        ambient_dim: int,
        vectors: Iterable[Sequence] = (),
        field: ScalarField = EXACT,
    ):
        self.ambient_dim = ambient_dim
        self.field = field
        coerced = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatchError(
                    f"向量长度 {len(v)} 与环境维数 {ambient_dim} 不符", "ambient_dim"
                )
            coerced.append([field.coerce(x) for x in v])
        if coerced:
            self.basis, self.pivots = row_reduce(coerced, ambient_dim, field)
        else:
            self.basis, self.pivots = [], []

    @classmethod
    def zero(cls, n: int, field: ScalarField = EXACT) -> "Subspace":
        return cls(n, (), field)

    @classmethod
    def full(cls, n: int, field: ScalarField = EXACT) -> "Subspace":
        return cls(n, [_unit(n, j, field) for j in range(n)], field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                f"环境维数不一致: {self.ambient_dim} != {other.ambient_dim}",
                "ambient_dim",
            )
        _compatible(self.field, other.field)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace(self.ambient_dim, self.basis + other.basis, self.field)

    def annihilator(self) -> List[List]:
        """满足 φ·v = 0（双线性配对）的线性泛函基"""
        return nullspace(self.basis, self.ambient_dim, self.field)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.field)
        equations = self.annihilator() + other.annihilator()
        solutions = nullspace(equations, self.ambient_dim, self.field)
        return Subspace(self.ambient_dim, solutions, self.field)

    def _residual(self, v: Sequence) -> List:
        w = [self.field.coerce(x) for x in v]
        for row, pc in zip(self.basis, self.pivots):
            f = w[pc]
            if f:
                w = [a - f * b for a, b in zip(w, row)]
        return w

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError("向量长度与环境维数不符", "ambient_dim")
        scale = max((abs(x) for x in v), default=0.0) if not self.field.exact else 1.0
        return all(self.field.is_zero(x, scale) for x in self._residual(v))

    def issubset(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(b) for b in self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        if self.field.exact and other.field.exact:
            return self.pivots == other.pivots and self.basis == other.basis
        return self.issubset(other) and other.issubset(self)

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))

    def conjugate(self) -> "Subspace":
        conjugated = [[x.conjugate() for x in b] for b in self.basis]
        return Subspace(self.ambient_dim, conjugated, self.field)

    def is_real(self) -> bool:
        return self == self.conjugate()

    def image(self, op: "Operator") -> "Subspace":
        return Subspace(self.ambient_dim, [op.apply(b) for b in self.basis], self.field)

    def preimage(self, op: "Operator") -> "Subspace":
        """{v : op(v) ∈ self}"""
        functionals = self.annihilator()
        if not functionals:
            return Subspace.full(self.ambient_dim, self.field)
        rows = [mat_vec(op.transpose().rows, phi, self.field) for phi in functionals]
        solutions = nullspace(rows, self.ambient_dim, self.field)
        return Subspace(self.ambient_dim, solutions, self.field)

    def complement_basis(self, sub: "Subspace") -> List[List]:
        """在 self 中贪心选取向量，把 sub 的基扩充为 self 的基"""
        current = sub
        out = []
        for b in self.basis:
            if not current.contains(b):
                out.append(b)
                current = current + Subspace(self.ambient_dim, [b], self.field)
        return out

    def extend_to_basis(self) -> List[List]:
        """非主元列对应的标准基向量，张成 self 的一个补空间"""
        pivot_set = set(self.pivots)
        return [
            _unit(self.ambient_dim, j, self.field)
            for j in range(self.ambient_dim)
            if j not in pivot_set
        ]

    def coordinates(self, v: Sequence) -> List:
        if not self.contains(v):
            raise DimensionMismatchError("向量不在子空间内", "membership")
        return [self.field.coerce(v[pc]) for pc in self.pivots]

    def to_json(self):
        return [[scalar_to_json(x) for x in b] for b in self.basis]

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def span(
    vectors: Sequence[Sequence], ambient_dim: int, field: ScalarField = EXACT
) -> Subspace:
    return Subspace(ambient_dim, vectors, field)


# ---------------------------------------------------------------------------
# 算子
# ---------------------------------------------------------------------------


class Operator:
    """环境基下的方阵；rows[i][j] 是 e_j 的像的第 i 个坐标"""

    __slots__ = ("rows", "field")
    __hash__ = None

    def __init__(self, rows: Sequence[Sequence], field: ScalarField = EXACT):
        self.field = field
        self.rows = [[field.coerce(x) for x in r] for r in rows]
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise DimensionMismatchError("算子必须是方阵", "square")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int, field: ScalarField = EXACT) -> "Operator":
        return cls([_unit(n, i, field) for i in range(n)], field)

    @classmethod
    def zero(cls, n: int, field: ScalarField = EXACT) -> "Operator":
        return cls([[field.zero] * n for _ in range(n)], field)

    @classmethod
    def diagonal(cls, values: Sequence, field: ScalarField = EXACT) -> "Operator":
        n = len(values)
        rows = [[field.zero] * n for _ in range(n)]
        for i, v in enumerate(values):
            rows[i][i] = field.coerce(v)
        return cls(rows, field)

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence], field: ScalarField = EXACT
    ) -> "Operator":
        n = len(columns)
        return cls([[columns[j][i] for j in range(n)] for i in range(n)], field)

    @classmethod
    def unit(cls, n: int, i: int, j: int, field: ScalarField = EXACT) -> "Operator":
        """把 e_j 映到 e_i 的矩阵单位"""
        rows = [[field.zero] * n for _ in range(n)]
        rows[i][j] = field.one
        return cls(rows, field)

    def column(self, j: int) -> List:
        return [row[j] for row in self.rows]

    def apply(self, v: Sequence) -> List:
        return mat_vec(self.rows, [self.field.coerce(x) for x in v], self.field)

    def __matmul__(self, other: "Operator") -> "Operator":
        _compatible(self.field, other.field)
        return Operator(mat_mul(self.rows, other.rows, self.field), self.field)

    def __add__(self, other: "Operator") -> "Operator":
        _compatible(self.field, other.field)
        rows = [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Operator(rows, self.field)

    def __sub__(self, other: "Operator") -> "Operator":
        _compatible(self.field, other.field)
        rows = [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        return Operator(rows, self.field)

    def __neg__(self) -> "Operator":
        return Operator([[-a for a in r] for r in self.rows], self.field)

    def scale(self, c) -> "Operator":
        c = self.field.coerce(c)
        return Operator([[c * a for a in r] for r in self.rows], self.field)

    def __mul__(self, c) -> "Operator":
        if isinstance(c, Operator):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def conjugate(self) -> "Operator":
        return Operator([[a.conjugate() for a in r] for r in self.rows], self.field)

    def transpose(self) -> "Operator":
        return Operator([list(c) for c in zip(*self.rows)], self.field)

    def is_real(self) -> bool:
        return self.is_close(self.conjugate())

    def max_abs(self) -> float:
        return max((abs(a) for r in self.rows for a in r), default=0.0)

    def is_zero(self) -> bool:
        if self.field.exact:
            return not any(a for r in self.rows for a in r)
        return self.max_abs() <= self.field.tolerance

    def is_close(self, other: "Operator", tolerance: Optional[float] = None) -> bool:
        if self.field.exact and other.field.exact:
            return self.rows == other.rows
        tol = self.field.tolerance if tolerance is None else tolerance
        scale = max(1.0, self.max_abs(), other.max_abs())
        return all(
            abs(complex(a) - complex(b)) <= tol * scale
            for r, s in zip(self.rows, other.rows)
            for a, b in zip(r, s)
        )

    def __eq__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return self.n == other.n and self.is_close(other)

    def power(self, k: int) -> "Operator":
        result = Operator.identity(self.n, self.field)
        for _ in range(k):
            result = result @ self
        return result

    def trace(self):
        acc = self.field.zero
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def bracket(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def is_nilpotent(self) -> bool:
        return self.power(self.n).is_zero()

    def exp(self) -> "Operator":
        """幂零算子的指数（有限级数）"""
        if not self.is_nilpotent():
            raise NotNilpotentError("只对幂零算子取精确指数", "nilpotent")
        result = Operator.identity(self.n, self.field)
        term = Operator.identity(self.n, self.field)
        for k in range(1, self.n + 1):
            term = (term @ self).scale(Fraction(1, k))
            if term.is_zero():
                break
            result = result + term
        return result

    def log(self) -> "Operator":
        """幺幂算子的对数"""
        u = self - Operator.identity(self.n, self.field)
        if not u.is_nilpotent():
            raise NotNilpotentError("只对幺幂算子取精确对数", "unipotent")
        result = Operator.zero(self.n, self.field)
        term = Operator.identity(self.n, self.field)
        for k in range(1, self.n + 1):
            term = term @ u
            if term.is_zero():
                break
            result = result + term.scale(Fraction((-1) ** (k + 1), k))
        return result

    def inverse(self) -> "Operator":
        return Operator(invert_matrix(self.rows, self.field), self.field)

    def kernel(self) -> Subspace:
        return Subspace(self.n, nullspace(self.rows, self.n, self.field), self.field)

    def range_space(self) -> Subspace:
        return Subspace(self.n, [self.column(j) for j in range(self.n)], self.field)

    def to_json(self):
        return [[scalar_to_json(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"Operator(n={self.n}, field={self.field.name})"


def _eigen_bound(op: Operator) -> int:
    row_sums = [sum(abs(a) for a in r) for r in op.rows]
    return int(math.ceil(max(row_sums, default=0.0))) + 1


def integer_eigenspaces(
    op: Operator, bound: Optional[int] = None
) -> Dict[int, Subspace]:
    """
    整数特征值半单算子的特征空间分解

    Raises:
        SingularOperatorError: 特征空间之和不是全空间
    """
    n = op.n
    if bound is None:
        bound = _eigen_bound(op)
    spaces: Dict[int, Subspace] = {}
    total = 0
    for lam in range(-bound, bound + 1):
        shifted = op - Operator.identity(n, op.field).scale(lam)
        k = shifted.kernel()
        if k.dim:
            spaces[lam] = k
            total += k.dim
    if total != n:
        raise SingularOperatorError(
            f"算子不是整数特征值半单算子 (特征空间维数和 {total} != {n})",
            "integer_eigenspaces",
        )
    return spaces


def joint_eigenspaces(
    ops: Sequence[Operator], n: int, field: ScalarField = EXACT
) -> Dict[Tuple[int, ...], Subspace]:
    """两两交换的整数半单算子的联合特征空间"""
    joint: Dict[Tuple[int, ...], Subspace] = {(): Subspace.full(n, field)}
    for op in ops:
        eig = integer_eigenspaces(op)
        refined = {}
        for key, space in joint.items():
            for lam, e in eig.items():
                piece = space.intersect(e)
                if piece.dim:
                    refined[key + (lam,)] = piece
        joint = refined
    if sum(s.dim for s in joint.values()) != n:
        raise SingularOperatorError("算子不可同时对角化", "joint_eigenspaces")
    return joint


def eigenframe(
    spaces: Dict, n: int, field: ScalarField = EXACT
) -> Tuple[Operator, List]:
    """把分解的各块基向量按键排序拼成列矩阵，返回 (P, 每列的键)"""
    columns, labels = [], []
    for key in sorted(spaces):
        for b in spaces[key].basis:
            columns.append(b)
            labels.append(key)
    if len(columns) != n:
        raise DimensionMismatchError("分解的维数之和不等于环境维数", "direct_sum")
    return Operator.from_columns(columns, field), labels


# ---------------------------------------------------------------------------
# 滤链
# ---------------------------------------------------------------------------


class IncFiltration:
    """递增滤链 W：W_k ⊆ W_{k+1}，低于 lo 为 0，高于等于 hi 为全空间"""

    def __init__(
        self, steps: Dict[int, Subspace], ambient_dim: int, field: ScalarField = EXACT
    ):
        self.ambient_dim = ambient_dim
        self.field = field
        if not steps:
            steps = {0: Subspace.full(ambient_dim, field)}
        keys = sorted(steps)
        for a, b in zip(keys, keys[1:]):
            if not steps[a].issubset(steps[b]):
                raise FiltrationError(f"递增滤链在 {a}->{b} 处不嵌套", "nested")
        if steps[keys[-1]].dim != ambient_dim:
            raise FiltrationError("递增滤链的最高一步必须是全空间", "exhaustive")

        def lookup(k):
            below = [key for key in keys if key <= k]
            return steps[below[-1]] if below else Subspace.zero(ambient_dim, field)

        candidates = range(keys[0], keys[-1] + 1)
        nonzero = [k for k in candidates if lookup(k).dim > 0]
        self.hi = next(k for k in candidates if lookup(k).dim == ambient_dim)
        self.lo = nonzero[0] if nonzero else self.hi
        self._steps = {k: lookup(k) for k in range(self.lo, self.hi + 1)}

    @classmethod
    def from_steps(
        cls,
        steps: Dict[int, Subspace],
        ambient_dim: Optional[int] = None,
        field: Optional[ScalarField] = None,
    ) -> "IncFiltration":
        first = next(iter(steps.values()))
        return cls(
            dict(steps),
            first.ambient_dim if ambient_dim is None else ambient_dim,
            first.field if field is None else field,
        )

    @classmethod
    def trivial(
        cls, n: int, weight: int, field: ScalarField = EXACT
    ) -> "IncFiltration":
        return cls({weight: Subspace.full(n, field)}, n, field)

    def __getitem__(self, k: int) -> Subspace:
        if k < self.lo:
            return Subspace.zero(self.ambient_dim, self.field)
        if k >= self.hi:
            return Subspace.full(self.ambient_dim, self.field)
        return self._steps[k]

    def gr_dim(self, k: int) -> int:
        return self[k].dim - self[k - 1].dim

    def weights(self) -> List[int]:
        return [k for k in range(self.lo, self.hi + 1) if self.gr_dim(k) > 0]

    def length(self) -> int:
        """min{k: W_k = V} − max{k: W_k = 0}"""
        return self.hi - (self.lo - 1)

    def weight_span(self) -> int:
        w = self.weights()
        return (w[-1] - w[0]) if w else 0

    def steps(self) -> Dict[int, Subspace]:
        return dict(self._steps)

    def apply(self, g: Operator) -> "IncFiltration":
        steps = {k: self[k].image(g) for k in range(self.lo, self.hi + 1)}
        return IncFiltration(steps, self.ambient_dim, self.field)

    def conjugate(self) -> "IncFiltration":
        steps = {k: s.conjugate() for k, s in self._steps.items()}
        return IncFiltration(steps, self.ambient_dim, self.field)

    def is_real(self) -> bool:
        return all(s.is_real() for s in self._steps.values())

    def shift(self, m: int) -> "IncFiltration":
        """W[m]_k = W_{k+m}"""
        return IncFiltration(
            {k - m: s for k, s in self._steps.items()}, self.ambient_dim, self.field
        )

    def __eq__(self, other):
        if not isinstance(other, IncFiltration):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.lo == other.lo
            and self.hi == other.hi
            and all(self[k] == other[k] for k in range(self.lo, self.hi + 1))
        )

    __hash__ = None

    def to_json(self):
        return {str(k): s.to_json() for k, s in self._steps.items()}

    def __repr__(self):
        dims = {k: s.dim for k, s in self._steps.items()}
        return f"IncFiltration({dims})"


class DecFiltration:
    """递减滤链 F：F^{p+1} ⊆ F^p，p ≤ lo 为全空间，p > hi 为 0"""

    def __init__(
        self, steps: Dict[int, Subspace], ambient_dim: int, field: ScalarField = EXACT
    ):
        self.ambient_dim = ambient_dim
        self.field = field
        if not steps:
            steps = {0: Subspace.full(ambient_dim, field)}
        keys = sorted(steps)
        for a, b in zip(keys, keys[1:]):
            if not steps[b].issubset(steps[a]):
                raise FiltrationError(f"递减滤链在 {a}->{b} 处不嵌套", "nested")

        def lookup(p):
            if p < keys[0]:
                return Subspace.full(ambient_dim, field)
            above = [key for key in keys if key >= p]
            return steps[above[0]] if above else Subspace.zero(ambient_dim, field)

        candidates = range(keys[0] - 1, keys[-1] + 1)
        self.lo = max(p for p in candidates if lookup(p).dim == ambient_dim)
        nonzero = [p for p in candidates if lookup(p).dim > 0]
        self.hi = nonzero[-1] if nonzero else self.lo
        self._steps = {p: lookup(p) for p in range(self.lo, self.hi + 1)}

    @classmethod
    def from_steps(
        cls,
        steps: Dict[int, Subspace],
        ambient_dim: Optional[int] = None,
        field: Optional[ScalarField] = None,
    ) -> "DecFiltration":
        first = next(iter(steps.values()))
        return cls(
            dict(steps),
            first.ambient_dim if ambient_dim is None else ambient_dim,
            first.field if field is None else field,
        )

    def __getitem__(self, p: int) -> Subspace:
        if p <= self.lo:
            return Subspace.full(self.ambient_dim, self.field)
        if p > self.hi:
            return Subspace.zero(self.ambient_dim, self.field)
        return self._steps[p]

    def jumps(self) -> List[int]:
        """满足 F^p ≠ F^{p+1} 的 p"""
        return [p for p in range(self.lo, self.hi + 1) if self[p].dim > self[p + 1].dim]

    def steps(self) -> Dict[int, Subspace]:
        return dict(self._steps)

    def apply(self, g: Operator) -> "DecFiltration":
        steps = {p: s.image(g) for p, s in self._steps.items()}
        return DecFiltration(steps, self.ambient_dim, self.field)

    def conjugate(self) -> "DecFiltration":
        steps = {p: s.conjugate() for p, s in self._steps.items()}
        return DecFiltration(steps, self.ambient_dim, self.field)

    def __eq__(self, other):
        if not isinstance(other, DecFiltration):
            return NotImplemented
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return self.ambient_dim == other.ambient_dim and all(
            self[p] == other[p] for p in range(lo, hi + 2)
        )

    __hash__ = None

    def to_json(self):
        return {str(p): s.to_json() for p, s in self._steps.items()}

    def __repr__(self):
        dims = {p: s.dim for p, s in self._steps.items()}
        return f"DecFiltration({dims})"


# ---------------------------------------------------------------------------
# 分次商 Gr^W_k
# ---------------------------------------------------------------------------


@dataclass
class GradedPiece:
    """Gr^W_k = W_k / W_{k-1}，用提升基 lift 给出坐标"""

    weight: int
    lift: List[List]
    lower: Subspace
    field: ScalarField
    inverse: List[List]  # [lift | W_{k-1} 的基 | W_k 的补] 的逆矩阵

    @property
    def dim(self) -> int:
        return len(self.lift)

    def coordinates(self, v: Sequence) -> List:
        c = mat_vec(self.inverse, [self.field.coerce(x) for x in v], self.field)
        tail = c[self.dim + self.lower.dim:]
        scale = max((abs(x) for x in v), default=0.0) if not self.field.exact else 1.0
        if not all(self.field.is_zero(x, scale) for x in tail):
            raise DimensionMismatchError(
                f"向量不在 W_{self.weight} 中", "graded_membership"
            )
        return c[: self.dim]

    def lift_vector(self, coords: Sequence) -> List:
        n = self.lower.ambient_dim
        out = [self.field.zero] * n
        for c, vec in zip(coords, self.lift):
            if c:
                out = [a + c * b for a, b in zip(out, vec)]
        return out

    def induced_operator(self, op: Operator) -> Operator:
        """保持 W 的算子在 Gr_k 上诱导的矩阵"""
        if self.dim == 0:
            return Operator([], self.field)
        return Operator.from_columns(
            [self.coordinates(op.apply(l)) for l in self.lift], self.field
        )


def graded_piece(
    W: IncFiltration, k: int, lift: Optional[Sequence[Sequence]] = None
) -> GradedPiece:
    field = W.field
    upper, lower = W[k], W[k - 1]
    if lift is None:
        lift = upper.complement_basis(lower)
    else:
        lift = [[field.coerce(x) for x in v] for v in lift]
        generated = lower + Subspace(W.ambient_dim, lift, field) if lift else lower
        if len(lift) != upper.dim - lower.dim or generated != upper:
            raise FiltrationError(f"提升基不是 Gr_{k} 的基", "graded_lift")
    columns = list(lift) + lower.basis + upper.extend_to_basis()
    matrix = [
        [columns[j][i] for j in range(len(columns))] for i in range(W.ambient_dim)
    ]
    inverse = invert_matrix(matrix, field) if matrix else []
    return GradedPiece(k, list(lift), lower, field, inverse)


def induced_graded_filtration(
    F: DecFiltration,
    W: IncFiltration,
    k: int,
    lift: Optional[Sequence[Sequence]] = None,
) -> DecFiltration:
    """
    F 在 Gr^W_k 上诱导的递减滤链

    Args:
        F: 递减滤链
        W: 递增滤链
        k: 权
        lift: 可选的 Gr_k 提升基

    Returns:
        Gr_k 坐标（提升基）下的 DecFiltration
    """
    piece = lift if isinstance(lift, GradedPiece) else graded_piece(W, k, lift)
    return _induced_dec(F, W, k, piece)


def _induced_dec(
    F: DecFiltration, W: IncFiltration, k: int, piece: GradedPiece
) -> DecFiltration:
    m = piece.dim
    steps = {}
    for p in range(F.lo, F.hi + 2):
        part = F[p].intersect(W[k])
        steps[p] = Subspace(m, [piece.coordinates(v) for v in part.basis], F.field)
    return DecFiltration(steps, m, F.field)


def induced_increasing_filtration(
    M: IncFiltration,
    W: IncFiltration,
    k: int,
    piece: Optional[GradedPiece] = None,
) -> IncFiltration:
    """M 在 Gr^W_k 上诱导的递增滤链"""
    piece = piece or graded_piece(W, k)
    m = piece.dim
    steps = {}
    for l in range(M.lo - 1, M.hi + 1):
        part = M[l].intersect(W[k])
        steps[l] = Subspace(m, [piece.coordinates(v) for v in part.basis], M.field)
    return IncFiltration(steps, m, M.field)
