"""
幂零轨道与周期映射的求值
轨道 e^{N(z)}·F_∞、局部正规形 e^{N(z)}e^{Γ(s)}·F_∞、分次自同构 t(y) 以及成员阈值 α
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..exceptions import (
    DimensionMismatchError,
    GridError,
    HodgeError,
    LocalNormalFormError,
    NoSolutionError,
    NotNilpotentError,
)
from ..linear_core import (
    DecFiltration,
    ExactComplex,
    IncFiltration,
    Operator,
    joint_eigenspaces,
    eigenframe,
)
from ..mhs import GPMHSInstance, ValidationReport, bigrading_of, validate_instance
from ..numeric import exact_power, exactify, operator_to_float, spectral_function
from ..weightfilt import relative_weight_filtration

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]


@dataclass
class NilpotentOrbitSpec:
    """容许幂零轨道的数据：N_1..N_r 与 (W, F_∞, 极化)"""

    nilpotents: List[Operator]
    instance: GPMHSInstance  # instance.F 即 F_∞
    weight: Optional[int] = None  # 纯情形的权，混合情形为 None
    _M: Optional[IncFiltration] = field(default=None, init=False, repr=False)

    @property
    def F_inf(self) -> DecFiltration:
        return self.instance.F

    @property
    def W(self) -> IncFiltration:
        return self.instance.W

    @property
    def rank(self) -> int:
        return len(self.nilpotents)

    @property
    def dim(self) -> int:
        return self.instance.dim

    @property
    def length(self) -> int:
        return self.W.length()

    def total_nilpotent(self) -> Operator:
        total = Operator.zero(self.dim, self.W.field)
        for N in self.nilpotents:
            total = total + N
        return total

    def N_of(self, z: Sequence) -> Operator:
        """N(z) = Σ z_j N_j"""
        if len(z) != self.rank:
            raise DimensionMismatchError(
                f"z 的分量数 {len(z)} != 变量数 {self.rank}", "rank"
            )
        total = Operator.zero(self.dim, self.W.field)
        for zj, N in zip(z, self.nilpotents):
            if zj:
                total = total + N.scale(zj)
        return total

    def limit_weight_filtration(self) -> IncFiltration:
        """M = M(ΣN_j, W)"""
        if self._M is None:
            self._M = relative_weight_filtration(self.total_nilpotent(), self.W)
        return self._M


@dataclass
class LocalNormalForm:
    """Γ(s) = Σ_K Γ_K s^K，Γ(0) = 0"""

    terms: Dict[Monomial, Operator]
    rank: int
    dim: int

    def is_zero(self) -> bool:
        return all(op.is_zero() for op in self.terms.values())

    def gamma(self, s: Sequence) -> Operator:
        if len(s) != self.rank:
            raise DimensionMismatchError("s 的分量数与变量数不符", "rank")
        total = None
        for K, op in self.terms.items():
            coefficient = op.field.one
            for sk, power in zip(s, K):
                if power:
                    coefficient = coefficient * op.field.coerce(sk) ** power
            term = op.scale(coefficient)
            total = term if total is None else total + term
        if total is None:
            return Operator.zero(self.dim)
        return total

    def restricted(self, j: int) -> "LocalNormalForm":
        """Γ_j：前 j 个变量置零"""
        kept = {K: op for K, op in self.terms.items() if not any(K[:j])}
        return LocalNormalForm(kept, self.rank, self.dim)

    def to_json(self):
        return {
            ",".join(str(k) for k in K): op.to_json() for K, op in self.terms.items()
        }


@dataclass
class SL2Data:
    """交换的半单元 H_1..H_r 与 W 的实分次 Y_0"""

    H: List[Operator]
    Y0: Operator

    def validate(self, W: Optional[IncFiltration] = None) -> None:
        """
        Raises:
            NoSolutionError: 不交换或 Y_0 不是 W 的分次
        """
        ops = [self.Y0] + list(self.H)
        for i, A in enumerate(ops):
            if not A.is_real():
                raise NoSolutionError("sl2 数据必须是实算子", "sl2_real")
            for B in ops[i + 1:]:
                if not A.bracket(B).is_zero():
                    raise NoSolutionError("H_j 与 Y_0 必须两两交换", "sl2_commute")
        joint_eigenspaces(ops, self.Y0.n, self.Y0.field)
        if W is not None:
            for k in range(W.lo, W.hi + 1):
                shifted = self.Y0 - Operator.identity(W.ambient_dim, W.field).scale(k)
                eigen = shifted.kernel().intersect(W[k])
                if W[k - 1] + eigen != W[k] or eigen.dim != W.gr_dim(k):
                    raise NoSolutionError(f"Y_0 不是 W 的分次（权 {k}）", "sl2_grading")

    def to_json(self):
        return {"H": [h.to_json() for h in self.H], "Y0": self.Y0.to_json()}


@dataclass
class LNFValue:
    """局部正规形在一点的值"""

    z: List[ExactComplex]  # 输入点
    shift: List[int]  # 甲板变换 m = floor(Re z)
    translation: List[ExactComplex]  # z' = z − m，Re z' ∈ [0,1)
    s: List[ExactComplex]  # s_j = e^{2πi z'_j}（精确化的浮点值）
    filtration: DecFiltration


def check_lnf(spec: NilpotentOrbitSpec, lnf: LocalNormalForm) -> None:
    """
    局部正规形的相容性：无常数项、Γ_K ∈ q_(F_∞, M)、K_j = 0 时 [N_j, Γ_K] = 0

    Raises:
        LocalNormalFormError: 第一个不满足的条件
    """
    if lnf.rank != spec.rank:
        raise LocalNormalFormError(f"Γ 的变量数 {lnf.rank} != {spec.rank}", "rank")
    if not lnf.terms:
        return
    for K in lnf.terms:
        if len(K) != spec.rank or any(k < 0 for k in K):
            raise LocalNormalFormError(f"非法单项式 {K}", "monomial")
        if not any(K):
            raise LocalNormalFormError("Γ(0) 必须为 0", "constant_term")
    try:
        M = spec.limit_weight_filtration()
        b = bigrading_of(spec.F_inf, M)
    except HodgeError as e:
        raise LocalNormalFormError(
            f"极限混合 Hodge 结构不可用: {e}", "limit_mhs"
        ) from e
    for K, op in lnf.terms.items():
        if not b.in_q(op):
            raise LocalNormalFormError(f"Γ_{K} 不在 q 中", "in_q")
        for j, N in enumerate(spec.nilpotents):
            if K[j] == 0 and not N.bracket(op).is_zero():
                raise LocalNormalFormError(f"[N_{j + 1}, Γ_{K}] != 0", "commute")
    logger.debug(f"局部正规形检查通过（{len(lnf.terms)} 项）")


def to_exact_point(z: Sequence) -> List[ExactComplex]:
    return [ExactComplex.of(v) for v in z]


def orbit_eval(spec: NilpotentOrbitSpec, z: Sequence) -> DecFiltration:
    """θ(z) = e^{Σ z_j N_j}·F_∞（精确）"""
    z = to_exact_point(z)
    try:
        g = spec.N_of(z).exp()
    except NotNilpotentError as e:
        raise LocalNormalFormError("N(z) 不幂零，N_j 不交换", "commute") from e
    return spec.F_inf.apply(g)


def orbit_membership(spec: NilpotentOrbitSpec, z: Sequence) -> ValidationReport:
    return validate_instance(spec.instance.with_filtration(orbit_eval(spec, z)))


def deck_reduce(z: Sequence) -> Tuple[List[int], List[ExactComplex]]:
    """把每个 Re z_j 移到 [0,1)"""
    z = to_exact_point(z)
    shift = [math.floor(v.re) for v in z]
    return shift, [v - m for v, m in zip(z, shift)]


def nome(z: ExactComplex) -> ExactComplex:
    """s = e^{2πi z}，主分支，按浮点值精确化"""
    return exactify(cmath.exp(2j * math.pi * complex(z)))


def lnf_eval(
    spec: NilpotentOrbitSpec, lnf: Optional[LocalNormalForm], z: Sequence
) -> LNFValue:
    """
    F(z) = e^{N(m)} e^{N(z')} e^{Γ(s)}·F_∞，m = floor(Re z)，s = e^{2πi z'}

    因 s 只依赖 z'，甲板不变性 F(z + 1_j) = e^{N_j}·F(z) 精确成立

    Raises:
        LocalNormalFormError: Γ(s) 不幂零
    """
    z = to_exact_point(z)
    shift, reduced = deck_reduce(z)
    s = [nome(v) for v in reduced]
    g = spec.N_of([ExactComplex(m) for m in shift]).exp() @ spec.N_of(reduced).exp()
    if lnf is not None and lnf.terms:
        try:
            g = g @ lnf.gamma(s).exp()
        except NotNilpotentError as e:
            raise LocalNormalFormError("Γ(s) 不幂零，不在 q 中", "in_q") from e
    return LNFValue(z, shift, reduced, s, spec.F_inf.apply(g))


def grading_t(sl2: SL2Data, y: Sequence) -> Operator:
    """
    t(y) = y_1^{−Y_0/2} Π_j y_j^{−H_j/2}

    在联合特征空间上按变量合并指数；全部为有理数时返回精确算子

    Raises:
        GridError: 存在非正的 y_j
    """
    if len(y) != len(sl2.H):
        raise DimensionMismatchError("y 的分量数与 H_j 个数不符", "rank")
    if any(Fraction(v) <= 0 if not isinstance(v, float) else v <= 0 for v in y):
        raise GridError("t(y) 要求所有 y_j > 0", "positive_y")
    ops = [sl2.Y0] + list(sl2.H)
    n = sl2.Y0.n
    spaces = joint_eigenspaces(ops, n, sl2.Y0.field)

    def exponents(label) -> List[Fraction]:
        out = [Fraction(-label[j + 1], 2) for j in range(len(y))]
        if out:
            out[0] += Fraction(-label[0], 2)
        return out

    values = {}
    for label in spaces:
        value = Fraction(1)
        for yj, e in zip(y, exponents(label)):
            factor = exact_power(yj, e) if not isinstance(yj, float) else None
            if factor is None:
                value = None
                break
            value *= factor
        values[label] = value
    if sl2.Y0.field.exact and all(v is not None for v in values.values()):
        P, labels = eigenframe(spaces, n, sl2.Y0.field)
        return P @ Operator.diagonal([values[label] for label in labels]) @ P.inverse()

    def weight(label) -> float:
        return math.prod(float(yj) ** float(e) for yj, e in zip(y, exponents(label)))

    return spectral_function(spaces, n, weight)


def align_fields(*ops: Operator) -> List[Operator]:
    """任一算子为浮点时全部转为浮点"""
    if all(op.field.exact for op in ops):
        return list(ops)
    return [operator_to_float(op) for op in ops]


def alpha_threshold(
    spec: NilpotentOrbitSpec, steps: int = 40, upper_limit: int = 2 ** 20
) -> Optional[Fraction]:
    """
    沿对角射线 z = iα(1,…,1) 二分搜索使 θ(z) ∈ M 的最小 α

    Returns:
        Fraction 或 None（找不到属于 M 的点）
    """

    def member(alpha: Fraction) -> bool:
        z = [ExactComplex(0, alpha)] * spec.rank
        return orbit_membership(spec, z).passed

    hi = Fraction(1)
    while not member(hi):
        hi *= 2
        if hi > upper_limit:
            logger.warning(f"二分搜索在 α ≤ {upper_limit} 内找不到属于 M 的点")
            return None
    lo = Fraction(0)
    if member(lo):
        return lo
    for _ in range(steps):
        mid = (lo + hi) / 2
        if member(mid):
            hi = mid
        else:
            lo = mid
    logger.info(f"成员阈值 α ≈ {float(hi):.6g}")
    return hi
