"""
权滤链模块
幂零算子的单值权滤链 W(N)、平移 W(N)[−k]、相对权滤链 M(N, W)，以及幂零轨道的容许性检查
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .exceptions import (
    DimensionMismatchError,
    NotMixedHodgeError,
    NotNilpotentError,
    RelativeFiltrationError,
)
from .linear_core import (
    IncFiltration,
    Operator,
    Subspace,
    graded_piece,
    induced_increasing_filtration,
    solve,
)

logger = logging.getLogger(__name__)


@dataclass
class NilpotentData:
    """实幂零算子及其权滤链的中心"""

    N: Operator
    center: int = 0

    def __post_init__(self):
        if not self.N.is_nilpotent():
            raise NotNilpotentError("N 不是幂零算子", "nilpotent")

    @property
    def order(self) -> int:
        """满足 N^{m} = 0 的最小 m"""
        power = Operator.identity(self.N.n, self.N.field)
        for m in range(self.N.n + 1):
            if power.is_zero():
                return m
            power = power @ self.N
        return self.N.n

    def weight_filtration(self) -> IncFiltration:
        return monodromy_weight_filtration(self.N, self.center)


def _kernel_of_power(N: Operator, k: int) -> Subspace:
    if k <= 0:
        return Subspace.zero(N.n, N.field)
    return N.power(k).kernel()


def _image_of_power(N: Operator, k: int) -> Subspace:
    return N.power(k).range_space()


def monodromy_weight_filtration(N: Operator, center: int = 0) -> IncFiltration:
    """
    单值权滤链 W(N)[−center]

    M_l = Σ_{i−j = l−center+1, i,j ≥ 0} ker N^i ∩ im N^j，随后逐条检验定义公理

    Args:
        N: 幂零算子
        center: 中心权

    Returns:
        IncFiltration

    Raises:
        NotNilpotentError: N 不幂零
    """
    if not N.is_nilpotent():
        raise NotNilpotentError("N 不是幂零算子", "nilpotent")
    n = N.n
    kernels = [_kernel_of_power(N, k) for k in range(n + 2)]
    images = [_image_of_power(N, k) for k in range(n + 2)]
    steps: Dict[int, Subspace] = {}
    for l in range(-n - 1, n + 1):
        total = Subspace.zero(n, N.field)
        for j in range(0, n + 2):
            i = l + 1 + j
            if 0 <= i <= n + 1:
                total = total + kernels[i].intersect(images[j])
        steps[center + l] = total
    M = IncFiltration(steps, n, N.field)
    check_weight_axioms(N, M, center)
    logger.debug(f"W(N) 中心 {center}: {M}")
    return M


def check_weight_axioms(N: Operator, M: IncFiltration, center: int) -> None:
    """
    N·M_l ⊆ M_{l−2}，且 N^l: Gr_{center+l} → Gr_{center−l} 为同构

    Raises:
        RelativeFiltrationError: 公理不成立
    """
    for l in range(M.lo, M.hi + 1):
        if not M[l].image(N).issubset(M[l - 2]):
            raise RelativeFiltrationError(f"N·M_{l} ⊄ M_{l - 2}", "lowers_by_two")
    top = max(M.hi - center, center - M.lo, 0)
    for l in range(0, top + 1):
        upper, lower = center + l, center - l
        if M.gr_dim(upper) != M.gr_dim(lower):
            raise RelativeFiltrationError(
                f"dim Gr_{upper} != dim Gr_{lower}", "hard_lefschetz"
            )
        if l == 0 or M.gr_dim(upper) == 0:
            continue
        image = M[upper].image(N.power(l)) + M[lower - 1]
        if image.dim - M[lower - 1].dim != M.gr_dim(lower):
            raise RelativeFiltrationError(
                f"N^{l}: Gr_{upper} → Gr_{lower} 不是同构", "hard_lefschetz"
            )


def _preserves(N: Operator, W: IncFiltration) -> bool:
    return all(W[k].image(N).issubset(W[k]) for k in range(W.lo, W.hi + 1))


def relative_weight_filtration(N: Operator, W: IncFiltration) -> IncFiltration:
    """
    相对权滤链 M(N, W)，按权自下而上逐层提升

    对顶层 Gr^W_b 的每个 l 次本原向量 u，在 M'_{b+l} 中找修正 w，
    使 N^{l+1}(ũ + w) ∈ M'_{b−l−2}；找不到即不存在

    Args:
        N: 保持 W 的实幂零算子
        W: 递增滤链

    Returns:
        IncFiltration: M(N, W)

    Raises:
        RelativeFiltrationError: 相对权滤链不存在
    """
    if not N.is_nilpotent():
        raise NotNilpotentError("N 不是幂零算子", "nilpotent")
    if N.n != W.ambient_dim:
        raise DimensionMismatchError("N 与 W 的维数不一致", "ambient_dim")
    if not _preserves(N, W):
        raise RelativeFiltrationError("N 不保持 W", "preserves_W")

    n = N.n
    field_ = N.field
    span_lo = W.lo - 2 * n - 1
    span_hi = W.hi + 2 * n + 1
    current: Dict[int, Subspace] = {
        k: Subspace.zero(n, field_) for k in range(span_lo, span_hi + 1)
    }

    def lower_step(k: int) -> Subspace:
        if k < span_lo:
            return Subspace.zero(n, field_)
        return current[min(k, span_hi)]

    for b in W.weights():
        piece = graded_piece(W, b)
        Nb = piece.induced_operator(N)
        graded = monodromy_weight_filtration(Nb, b) if piece.dim else None
        additions: Dict[int, List] = {k: [] for k in current}
        if graded is not None:
            top = graded.hi - b
            for l in range(top, -1, -1):
                kernel = _kernel_of_power(Nb, l + 1)
                upper = graded[b + l].intersect(kernel)
                lower = graded[b + l - 1].intersect(kernel)
                for u in upper.complement_basis(lower):
                    lifted = _adjusted_lift(
                        N, piece.lift_vector(u), l, b, lower_step, field_
                    )
                    for j in range(l + 1):
                        image = N.power(j).apply(lifted)
                        for k in range(b + l - 2 * j, span_hi + 1):
                            additions[k].append(image)
        for k in current:
            if additions[k]:
                current[k] = current[k] + Subspace(n, additions[k], field_)

    M = IncFiltration(current, n, field_)
    _check_relative(N, W, M)
    logger.debug(f"M(N, W) = {M}")
    return M


def _adjusted_lift(N: Operator, lift: List, l: int, b: int, lower_step, field_) -> List:
    power = N.power(l + 1)
    residue = power.apply(lift)
    target = lower_step(b - l - 2)
    if target.contains(residue):
        return lift
    sources = lower_step(b + l).basis
    columns = [power.apply(s) for s in sources]
    columns += [[-x for x in t] for t in target.basis]
    if not columns:
        raise RelativeFiltrationError(
            f"权 {b} 的 {l} 次本原向量无法提升", "relative_weight_exists"
        )
    matrix = [[col[i] for col in columns] for i in range(N.n)]
    rhs = [-x for x in residue]
    solution = solve(matrix, rhs, field_)
    if solution is None:
        raise RelativeFiltrationError(
            f"权 {b} 的 {l} 次本原向量无法提升", "relative_weight_exists"
        )
    out = list(lift)
    for coefficient, s in zip(solution[: len(sources)], sources):
        if coefficient:
            out = [a + coefficient * x for a, x in zip(out, s)]
    return out


def _check_relative(N: Operator, W: IncFiltration, M: IncFiltration) -> None:
    for l in range(M.lo, M.hi + 1):
        if not M[l].image(N).issubset(M[l - 2]):
            raise RelativeFiltrationError(
                f"N·M_{l} ⊄ M_{l - 2}", "relative_weight_exists"
            )
    for k in W.weights():
        piece = graded_piece(W, k)
        induced = induced_increasing_filtration(M, W, k, piece)
        expected = monodromy_weight_filtration(piece.induced_operator(N), k)
        if induced != expected:
            raise RelativeFiltrationError(
                f"M 在 Gr^W_{k} 上不诱导 W(N)[−{k}]", "relative_weight_exists"
            )


@dataclass
class AdmissibilityReport:
    """幂零轨道容许性检查结果"""

    clauses: Dict[str, bool] = field(default_factory=dict)  # 条件名 -> 是否通过
    messages: Dict[str, str] = field(default_factory=dict)  # 失败原因
    M: Optional[IncFiltration] = None  # 相对权滤链 M(ΣN_j, W)

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    @property
    def failed_clause(self) -> Optional[str]:
        return next((name for name, ok in self.clauses.items() if not ok), None)

    def to_json(self):
        return {
            "passed": self.passed,
            "failed_clause": self.failed_clause,
            "clauses": dict(self.clauses),
            "messages": dict(self.messages),
            "M": self.M.to_json() if self.M is not None else None,
        }


def check_admissible_orbit(spec) -> AdmissibilityReport:
    """
    检查 (N_1..N_r; F_∞, W) 是否决定容许幂零轨道

    依次检查：实性、保持 W、两两交换、水平性、M(ΣN_j, W) 存在、(F_∞, M) 为 MHS、
    每个 N_j 是 (F_∞, M) 的 (−1,−1) 态射

    Args:
        spec: 带 nilpotents / F_inf / W 属性的轨道数据

    Returns:
        AdmissibilityReport
    """
    from .mhs import bigrading_of

    report = AdmissibilityReport()
    nilpotents: Sequence[Operator] = spec.nilpotents
    F, W = spec.F_inf, spec.W

    def record(name: str, ok: bool, message: str = "") -> bool:
        report.clauses[name] = ok
        if not ok:
            report.messages[name] = message
            logger.info(f"容许性条件失败: {name} ({message})")
        return ok

    record(
        "real_nilpotent",
        all(N.is_real() and N.is_nilpotent() for N in nilpotents),
        "存在非实或非幂零的 N_j",
    )
    record(
        "preserves_W",
        all(_preserves(N, W) for N in nilpotents),
        "存在不保持 W 的 N_j",
    )
    record(
        "commute",
        all(
            A.bracket(B).is_zero()
            for i, A in enumerate(nilpotents)
            for B in nilpotents[i + 1:]
        ),
        "N_i 与 N_j 不交换",
    )
    record(
        "horizontal",
        all(
            F[p].image(N).issubset(F[p - 1])
            for N in nilpotents
            for p in range(F.lo, F.hi + 1)
        ),
        "N_j F^p ⊄ F^{p−1}",
    )
    if not report.passed:
        return report

    total = Operator.zero(W.ambient_dim, W.field)
    for N in nilpotents:
        total = total + N
    try:
        M = relative_weight_filtration(total, W)
    except RelativeFiltrationError as e:
        record("relative_weight_exists", False, str(e))
        return report
    report.M = M
    record("relative_weight_exists", True)

    try:
        bigrading = bigrading_of(F, M)
    except NotMixedHodgeError as e:
        record("limit_is_mhs", False, str(e))
        return report
    record("limit_is_mhs", True)
    record(
        "minus_one_morphisms",
        all(set(bigrading.components(N)) <= {(-1, -1)} for N in nilpotents),
        "存在不是 (−1,−1) 态射的 N_j",
    )
    logger.info(f"容许性检查完成: {'通过' if report.passed else report.failed_clause}")
    return report
