"""
混合 Hodge 结构模块
实例校验（分类空间 / 紧对偶）、Deligne 双分次、分次算子 Y、δ 分裂与 sl2 分裂
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    FiltrationError,
    NotMixedHodgeError,
    SplittingError,
    UnsupportedLengthError,
)
from .linear_core import (
    DecFiltration,
    GradedPiece,
    IncFiltration,
    Operator,
    ScalarField,
    Subspace,
    determinant,
    eigenframe,
    graded_piece,
    induced_graded_filtration,
    nullspace,
)
from .numeric import (
    FLOAT,
    dec_to_float,
    inc_to_float,
    min_eigenvalue,
    min_generalized_eigenvalue,
    vector_to_float,
)

logger = logging.getLogger(__name__)

HodgeType = Tuple[int, int]


@dataclass
class Polarization:
    """Gr^W_w 上的极化：W_w 中的提升基与该基下 ⟨,⟩_w 的矩阵"""

    lift: List[List]
    form: List[List]

    def pair(self, a, b, scalars: ScalarField):
        """提升基坐标 a, b 的双线性配对 aᵀ Q b"""
        acc = scalars.zero
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                q = scalars.coerce(self.form[i][j])
                if q and y:
                    acc = acc + x * q * y
        return acc

    def to_float(self) -> "Polarization":
        return Polarization(
            [vector_to_float(v) for v in self.lift],
            [[complex(FLOAT.coerce(x)) for x in row] for row in self.form],
        )


@dataclass
class GPMHSInstance:
    """分次极化混合 Hodge 结构的候选点 (W, F, Hodge 数, 各权极化)"""

    W: IncFiltration
    F: DecFiltration
    hodge_numbers: Dict[HodgeType, int]
    polarizations: Dict[int, Polarization] = field(default_factory=dict)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.W.ambient_dim

    @property
    def field(self) -> ScalarField:
        return self.F.field

    def to_float(self) -> "GPMHSInstance":
        if not self.F.field.exact and not self.W.field.exact:
            return self
        return GPMHSInstance(
            inc_to_float(self.W),
            dec_to_float(self.F),
            dict(self.hodge_numbers),
            {w: p.to_float() for w, p in self.polarizations.items()},
            self.name,
        )

    def with_filtration(self, F: DecFiltration) -> "GPMHSInstance":
        """同一 W 与极化下换一个 Hodge 滤链"""
        base = self if F.field.exact == self.W.field.exact else self.to_float()
        if F.field.exact and not base.W.field.exact:
            F = dec_to_float(F)
        return GPMHSInstance(
            base.W, F, dict(base.hodge_numbers), base.polarizations, base.name
        )

    def transport(self, g: Operator) -> "GPMHSInstance":
        """把全部结构沿可逆算子 g 搬运（基变换）"""
        return GPMHSInstance(
            self.W.apply(g),
            self.F.apply(g),
            dict(self.hodge_numbers),
            {
                w: Polarization([g.apply(v) for v in p.lift], p.form)
                for w, p in self.polarizations.items()
            },
            self.name,
        )

    def graded_piece(self, w: int) -> GradedPiece:
        pol = self.polarizations.get(w)
        return graded_piece(self.W, w, pol.lift if pol else None)


class ValidationStatus(Enum):
    IN_M = "in_M"
    IN_COMPACT_DUAL_ONLY = "in_compact_dual_only"
    INVALID = "invalid"


@dataclass
class ValidationReport:
    """实例校验结果"""

    status: ValidationStatus
    failed_clause: Optional[str]  # 第一个失败的条件
    diagnostics: List[str]  # 诊断信息
    positivity_margin: float  # Hodge–Riemann 正性裕度（广义最小特征值）

    @property
    def passed(self) -> bool:
        return self.status is ValidationStatus.IN_M

    def to_json(self):
        return {
            "status": self.status.value,
            "failed_clause": self.failed_clause,
            "diagnostics": self.diagnostics,
            "positivity_margin": self.positivity_margin,
        }


def hodge_numbers_of(F: DecFiltration, W: IncFiltration) -> Dict[HodgeType, int]:
    """由 (F, W) 读出 h^{p,q}_w = dim F^p Gr_w − dim F^{p+1} Gr_w"""
    numbers: Dict[HodgeType, int] = {}
    for w in W.weights():
        induced = induced_graded_filtration(F, W, w)
        for p in range(induced.lo, induced.hi + 1):
            h = induced[p].dim - induced[p + 1].dim
            if h:
                numbers[(p, w - p)] = h
    return numbers


def _invalid(clause: str, message: str) -> ValidationReport:
    logger.info(f"实例校验失败: {clause} ({message})")
    return ValidationReport(ValidationStatus.INVALID, clause, [message], float("-inf"))


def _is_real_vector(v, scalars: ScalarField) -> bool:
    return all(
        scalars.is_zero(scalars.coerce(x) - scalars.coerce(x).conjugate(), abs(x))
        for x in v
    )


def _hodge_gram(
    pol: Polarization, basis: List[List], p: int, q: int, scalars: ScalarField
) -> List[List]:
    """G_ij = i^{p−q}·Q(c_i, conj c_j)"""
    phase = scalars.i_power(p - q)
    return [
        [phase * pol.pair(ci, [x.conjugate() for x in cj], scalars) for cj in basis]
        for ci in basis
    ]


def _is_positive_definite(gram: List[List], scalars: ScalarField) -> bool:
    if not gram:
        return True
    if scalars.exact:
        for size in range(1, len(gram) + 1):
            minor = determinant([row[:size] for row in gram[:size]], scalars)
            if not minor.is_real() or minor.re <= 0:
                return False
        return True
    arr = np.array(gram, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(arr))))
    return min_eigenvalue(arr) > scalars.tolerance * scale


def validate_instance(inst: GPMHSInstance) -> ValidationReport:
    """
    判断实例属于分类空间 M、仅属于紧对偶，还是无效

    Args:
        inst: 待校验实例

    Returns:
        ValidationReport: 状态、第一个失败条件与正性裕度
    """
    scalars = inst.field
    W, F = inst.W, inst.F
    if W.ambient_dim != F.ambient_dim:
        return _invalid("dimension", "W 与 F 的环境维数不一致")
    if not W.is_real():
        return _invalid("weight_filtration_real", "W 不是实滤链")

    for (p, q), h in inst.hodge_numbers.items():
        if inst.hodge_numbers.get((q, p), 0) != h:
            return _invalid("hodge_symmetry", f"h^{{{p},{q}}} != h^{{{q},{p}}}")
    for w in range(W.lo, W.hi + 1):
        total = sum(h for (p, q), h in inst.hodge_numbers.items() if p + q == w)
        if total != W.gr_dim(w):
            return _invalid(
                "hodge_dimension",
                f"权 {w} 的 Hodge 数之和 {total} != dim Gr = {W.gr_dim(w)}",
            )

    pieces: Dict[int, Tuple[GradedPiece, DecFiltration]] = {}
    for w in W.weights():
        pol = inst.polarizations.get(w)
        if pol is None:
            return _invalid("polarization_missing", f"权 {w} 缺少极化")
        if not all(_is_real_vector(v, scalars) for v in pol.lift):
            return _invalid("polarization_lift", f"权 {w} 的提升基不是实向量")
        try:
            piece = graded_piece(W, w, pol.lift)
        except (FiltrationError, DimensionMismatchError) as e:
            return _invalid("polarization_lift", f"权 {w}: {e}")
        m = piece.dim
        form = [[scalars.coerce(x) for x in row] for row in pol.form]
        if len(form) != m or any(len(row) != m for row in form):
            return _invalid("polarization_size", f"权 {w} 的极化矩阵尺寸错误")
        sign = 1 if w % 2 == 0 else -1
        if any(
            not scalars.is_zero(form[i][j] - sign * form[j][i], 1.0)
            or not scalars.is_zero(form[i][j] - form[i][j].conjugate(), 1.0)
            for i in range(m)
            for j in range(m)
        ):
            return _invalid(
                "polarization_symmetry", f"权 {w} 的极化不是实的 (−1)^w 对称形式"
            )
        if scalars.is_zero(determinant(form, scalars), 1.0):
            return _invalid("polarization_degenerate", f"权 {w} 的极化退化")
        pieces[w] = (piece, induced_graded_filtration(F, W, w, piece))

    # 紧对偶条件
    for w, (piece, Fg) in pieces.items():
        pol = inst.polarizations[w]
        for p in range(Fg.lo, Fg.hi + 1):
            h = Fg[p].dim - Fg[p + 1].dim
            if h != inst.hodge_numbers.get((p, w - p), 0):
                return _invalid(
                    "compact_dual_dimension", f"权 {w}: dim F^{p}/F^{p + 1} = {h}"
                )
        for p in range(Fg.lo, Fg.hi + 1):
            for a in Fg[p].basis:
                for b in Fg[w - p + 1].basis:
                    if not scalars.is_zero(pol.pair(a, b, scalars), 1.0):
                        return _invalid(
                            "compact_dual_orthogonality",
                            f"权 {w}: Q(F^{p}, F^{w - p + 1}) != 0",
                        )

    # Hodge 分解与 Hodge–Riemann 正性
    margin = float("inf")
    diagnostics: List[str] = []
    failed: Optional[str] = None
    for w, (piece, Fg) in pieces.items():
        pol = inst.polarizations[w]
        Fbar = Fg.conjugate()
        for p in range(Fg.lo, Fg.hi + 1):
            q = w - p
            if Fg[p].intersect(Fbar[w - p + 1]).dim:
                failed = failed or "hodge_decomposition"
                diagnostics.append(f"权 {w}: F^{p} ∩ conj F^{w - p + 1} != 0")
                continue
            H = Fg[p].intersect(Fbar[q])
            if H.dim == 0:
                continue
            gram = _hodge_gram(pol, H.basis, p, q, scalars)
            standard = [
                [
                    sum(complex(x) * complex(y).conjugate() for x, y in zip(ci, cj))
                    for cj in H.basis
                ]
                for ci in H.basis
            ]
            local = min_generalized_eigenvalue(
                np.array([[complex(x) for x in row] for row in gram], dtype=complex),
                np.array(standard, dtype=complex),
            )
            margin = min(margin, local)
            if not _is_positive_definite(gram, scalars):
                failed = failed or "positivity"
                diagnostics.append(
                    f"H^{{{p},{q}}} 上 i^{{p-q}}Q(v, v̄) 非正定 (裕度 {local:.3e})"
                )

    if failed:
        logger.info(f"实例仅属于紧对偶: {failed}")
        return ValidationReport(
            ValidationStatus.IN_COMPACT_DUAL_ONLY, failed, diagnostics, margin
        )
    logger.debug(f"实例属于 M，正性裕度 {margin:.6e}")
    return ValidationReport(ValidationStatus.IN_M, None, diagnostics, margin)


def positivity_margin(inst: GPMHSInstance) -> float:
    return validate_instance(inst).positivity_margin


# ---------------------------------------------------------------------------
# Deligne 双分次
# ---------------------------------------------------------------------------


class Bigrading:
    """Deligne 双分次 {I^{p,q}} 及其适配基"""

    def __init__(self, pieces: Dict[HodgeType, Subspace], n: int, scalars: ScalarField):
        self.n = n
        self.field = scalars
        self.pieces = {t: s for t, s in sorted(pieces.items()) if s.dim}
        self.P, self.labels = eigenframe(self.pieces, n, scalars)
        self.P_inv = self.P.inverse()

    @property
    def types(self) -> List[HodgeType]:
        return list(self.pieces)

    def piece(self, p: int, q: int) -> Subspace:
        return self.pieces.get((p, q), Subspace.zero(self.n, self.field))

    def _from_adapted(self, weight) -> Operator:
        diag = Operator.diagonal([weight(label) for label in self.labels], self.field)
        return self.P @ diag @ self.P_inv

    def grading(self) -> Operator:
        """Y：在 I^{p,q} 上作用为 p+q"""
        return self._from_adapted(lambda t: t[0] + t[1])

    def weight_projector(self, k: int) -> Operator:
        return self._from_adapted(lambda t: 1 if t[0] + t[1] == k else 0)

    def adapted(self, A: Operator) -> Operator:
        return self.P_inv @ A @ self.P

    def component(self, A: Operator, a: int, b: int) -> Operator:
        """A 的 (a,b) 分量：把 I^{p,q} 映到 I^{p+a,q+b} 的部分"""
        B = self.adapted(A)
        zero = self.field.zero

        def shift(i, j):
            (p, q), (r, s) = self.labels[i], self.labels[j]
            return (p - r, q - s)

        rows = [
            [
                B.rows[i][j] if shift(i, j) == (a, b) else zero
                for j in range(self.n)
            ]
            for i in range(self.n)
        ]
        return self.P @ Operator(rows, self.field) @ self.P_inv

    def components(self, A: Operator) -> Dict[HodgeType, Operator]:
        B = self.adapted(A)
        shifts = set()
        for i in range(self.n):
            for j in range(self.n):
                if not self.field.is_zero(B.rows[i][j], B.max_abs()):
                    li, lj = self.labels[i], self.labels[j]
                    shifts.add((li[0] - lj[0], li[1] - lj[1]))
        return {s: self.component(A, *s) for s in sorted(shifts)}

    def in_lambda_minus(self, A: Operator) -> bool:
        """A ∈ Λ^{-1,-1} = ⊕_{a,b<0} g^{a,b}"""
        return all(a < 0 and b < 0 for (a, b) in self.components(A))

    def in_q(self, A: Operator) -> bool:
        """A ∈ q = ⊕_{a<0} g^{a,b}"""
        return all(a < 0 for (a, b) in self.components(A))

    def is_r_split(self) -> bool:
        return all(
            self.piece(q, p) == s.conjugate() for (p, q), s in self.pieces.items()
        )

    def to_json(self):
        return {f"{p},{q}": s.to_json() for (p, q), s in self.pieces.items()}


def bigrading_of(F: DecFiltration, W: IncFiltration) -> Bigrading:
    """
    Deligne 闭式公式
    I^{p,q} = F^p ∩ W_{p+q} ∩ (conj F^q ∩ W_{p+q} + Σ_{j≥2} conj F^{q−j+1} ∩ W_{p+q−j})
    并断言条件 (a)(b)(c)
    """
    n = W.ambient_dim
    scalars = F.field
    Fbar = F.conjugate()
    pieces: Dict[HodgeType, Subspace] = {}
    for k in range(W.lo, W.hi + 1):
        Wk = W[k]
        for p in range(F.lo, F.hi + 1):
            q = k - p
            inner = Fbar[q].intersect(Wk)
            j = 2
            while k - j >= W.lo:
                inner = inner + Fbar[q - j + 1].intersect(W[k - j])
                j += 1
            piece = F[p].intersect(Wk).intersect(inner)
            if piece.dim:
                pieces[(p, q)] = piece

    total = sum(s.dim for s in pieces.values())
    spanned = Subspace(n, [b for s in pieces.values() for b in s.basis], scalars)
    if total != n or spanned.dim != n:
        raise NotMixedHodgeError(
            f"双分次各块维数和 {total}、张成维数 {spanned.dim}，环境维数 {n}",
            "bigrading_span",
        )
    bigrading = Bigrading(pieces, n, scalars)

    def direct(pred) -> Subspace:
        vectors = [b for t, s in bigrading.pieces.items() if pred(t) for b in s.basis]
        return Subspace(n, vectors, scalars)

    for p in range(F.lo, F.hi + 2):
        if direct(lambda t, p=p: t[0] >= p) != F[p]:
            raise NotMixedHodgeError(
                f"F^{p} 不等于 ⊕_{{a≥{p}}} I^{{a,b}}", "bigrading_hodge"
            )
    for k in range(W.lo - 1, W.hi + 1):
        if direct(lambda t, k=k: t[0] + t[1] <= k) != W[k]:
            raise NotMixedHodgeError(
                f"W_{k} 不等于 ⊕_{{a+b≤{k}}} I^{{a,b}}", "bigrading_weight"
            )
    for (p, q), s in bigrading.pieces.items():
        lower = direct(lambda t, p=p, q=q: t[0] < p and t[1] < q)
        allowed = bigrading.piece(q, p).conjugate() + lower
        if not s.issubset(allowed):
            raise NotMixedHodgeError(
                f"I^{{{p},{q}}} 不满足共轭条件", "bigrading_conjugation"
            )
    logger.debug(f"Deligne 双分次类型: {bigrading.types}")
    return bigrading


def deligne_bigrading(inst: GPMHSInstance) -> Bigrading:
    return bigrading_of(inst.F, inst.W)


def grading_Y(b: Bigrading) -> Operator:
    return b.grading()


def splitting_operator_from_bigrading(b: Bigrading) -> Operator:
    """
    δ = (i/2)·log g，其中 g = Σ_k conj(π_k)·π_k = e^{−2iδ}，π_k 是 Y 的 k 特征投影
    """
    weights = sorted({p + q for (p, q) in b.types})
    g = Operator.zero(b.n, b.field)
    for k in weights:
        pi = b.weight_projector(k)
        g = g + pi.conjugate() @ pi
    return g.log().scale(b.field.i * b.field.coerce(Fraction(1, 2)))


def delta_splitting(inst: GPMHSInstance) -> Tuple[Operator, GPMHSInstance]:
    """
    Deligne δ 分裂

    Returns:
        (δ, (e^{−iδ}F, W))

    Raises:
        SplittingError: δ 非实、不在 Λ^{-1,-1} 或校正后不是 ℝ 分裂
    """
    b = deligne_bigrading(inst)
    delta = splitting_operator_from_bigrading(b)
    if not delta.is_real():
        raise SplittingError("δ 不是实算子", "delta_real")
    if not b.in_lambda_minus(delta):
        raise SplittingError("δ 不在 Λ^{-1,-1} 中", "delta_lambda")
    shift = delta.scale(-inst.field.i).exp()
    split = inst.with_filtration(inst.F.apply(shift))
    if not deligne_bigrading(split).is_r_split():
        raise SplittingError("e^{−iδ}F 不是 ℝ 分裂", "delta_split")
    logger.info(f"δ 分裂完成: δ {'为零' if delta.is_zero() else '非零'}")
    return delta, split


def sl2_splitting(inst: GPMHSInstance) -> Tuple[Operator, GPMHSInstance]:
    """权跨度不超过 2 时 ε = iδ，F̂ = e^{−iδ}F"""
    span_ = inst.W.weight_span()
    if span_ > 2:
        raise UnsupportedLengthError(
            f"权跨度 {span_} > 2，不支持 sl2 分裂", "unsupported_length"
        )
    delta, split = delta_splitting(inst)
    return delta.scale(inst.field.i), split


def is_r_split(inst: GPMHSInstance) -> bool:
    return deligne_bigrading(inst).is_r_split()


def lie_algebra_basis(inst: GPMHSInstance) -> List[Operator]:
    """
    g_ℂ 的基：保持 W 且在每个 Gr_w 上是 ⟨,⟩_w 的无穷小等距

    以 X 的 n² 个元素为未知量求线性方程组的零空间
    """
    n = inst.dim
    scalars = inst.field
    W = inst.W
    equations: List[List] = []

    def coefficient_row(weights_of_entry) -> List:
        return [weights_of_entry(i, j) for i in range(n) for j in range(n)]

    for k in range(W.lo, W.hi):
        Wk = W[k]
        for phi in Wk.annihilator():
            for v in Wk.basis:
                equations.append(
                    coefficient_row(lambda i, j, phi=phi, v=v: phi[i] * v[j])
                )

    for w in W.weights():
        pol = inst.polarizations.get(w)
        if pol is None:
            continue
        piece = graded_piece(W, w, pol.lift)
        m = piece.dim
        C = piece.inverse[:m]
        L = piece.lift
        Q = [[scalars.coerce(x) for x in row] for row in pol.form]
        for a in range(m):
            for b in range(m):
                def entry(i, j, a=a, b=b):
                    acc = scalars.zero
                    for c in range(m):
                        if C[c][i]:
                            term = Q[c][b] * L[a][j] + Q[a][c] * L[b][j]
                            acc = acc + C[c][i] * term
                    return acc

                equations.append(coefficient_row(entry))

    solutions = nullspace(equations, n * n, scalars)
    return [
        Operator([sol[i * n:(i + 1) * n] for i in range(n)], scalars)
        for sol in solutions
    ]
