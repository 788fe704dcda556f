"""
度量模块
标准混合 Hodge 度量、扭曲度量 τ、尺度律、图卡坐标 chart_log 与距离替代量
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from .exceptions import (
    DimensionMismatchError,
    NotInClassifyingSpaceError,
    NotMixedHodgeError,
    OutOfChartError,
    SingularOperatorError,
)
from .linear_core import (
    DecFiltration,
    Operator,
    Subspace,
    eigenframe,
    invert_matrix,
    nullspace,
)
from .mhs import (
    Bigrading,
    GPMHSInstance,
    HodgeType,
    bigrading_of,
    deligne_bigrading,
    delta_splitting,
    sl2_splitting,
    validate_instance,
)
from .numeric import dec_to_float, grading_power, to_numpy

logger = logging.getLogger(__name__)


class MetricMode(Enum):
    STANDARD = "standard"
    TWISTED = "twisted"


class TwistSource(Enum):
    DELTA = "delta"
    EPSILON = "epsilon"


@dataclass
class MetricContext:
    """基点 (F, W) 上的 Hodge 度量：双分次、Gram 矩阵与 h-酉标架"""

    bigrading: Bigrading
    gram: np.ndarray  # 适配基下的 Gram 矩阵 h(c_i, c_j)
    frame: np.ndarray  # h-酉标架（列向量，环境坐标）
    frame_inv: np.ndarray
    labels: List[HodgeType]  # 标架每列的 Hodge 类型
    mode: MetricMode = MetricMode.STANDARD
    tau: float = 1.0
    twist_source: TwistSource = TwistSource.DELTA

    @property
    def weights(self) -> np.ndarray:
        return np.array([p + q for p, q in self.labels], dtype=float)

    def coordinates(self, v: Sequence) -> np.ndarray:
        return self.frame_inv @ np.array([complex(x) for x in v], dtype=complex)

    def adapted(self, A) -> np.ndarray:
        arr = to_numpy(A) if isinstance(A, Operator) else np.asarray(A, dtype=complex)
        return self.frame_inv @ arr @ self.frame

    def endo_weights(self) -> np.ndarray:
        """扭曲模式下端算子各矩阵元的权重 τ^{(w_row − w_col)/2}"""
        w = self.weights
        if self.mode is MetricMode.STANDARD:
            return np.ones((len(w), len(w)))
        return self.tau ** ((w[:, None] - w[None, :]) / 2.0)

    def to_json(self):
        return {
            "mode": self.mode.value,
            "tau": self.tau,
            "twist_source": self.twist_source.value,
            "labels": [list(t) for t in self.labels],
            "gram": [
                [{"re": float(x.real), "im": float(x.imag)} for x in row]
                for row in self.gram
            ],
        }


def _hodge_gram(inst: GPMHSInstance, b: Bigrading) -> List[List]:
    """h(c_i, c_j) = i^{p−q}⟨Gr c_i, conj Gr c_j⟩_{p+q}，不同类型之间为 0"""
    scalars = b.field
    pieces = {}
    coords = []
    for j, (p, q) in enumerate(b.labels):
        w = p + q
        if w not in pieces:
            pieces[w] = inst.graded_piece(w)
        coords.append(pieces[w].coordinates(b.P.column(j)))
    n = b.n
    gram = [[scalars.zero] * n for _ in range(n)]
    for i, (p, q) in enumerate(b.labels):
        pol = inst.polarizations[p + q]
        phase = scalars.i_power(p - q)
        for j, label in enumerate(b.labels):
            if label != (p, q):
                continue
            conj = [x.conjugate() for x in coords[j]]
            gram[i][j] = phase * pol.pair(coords[i], conj, scalars)
    return gram


def hodge_metric(
    inst: GPMHSInstance,
    mode: MetricMode = MetricMode.STANDARD,
    twist: TwistSource = TwistSource.DELTA,
    validate: bool = True,
) -> MetricContext:
    """
    构造标准（或扭曲）混合 Hodge 度量

    Args:
        inst: M 中的点
        mode: 标准或扭曲
        twist: 扭曲因子的来源（δ 或 ε）
        validate: 是否先校验 inst ∈ M

    Returns:
        MetricContext

    Raises:
        NotInClassifyingSpaceError: inst 不在 M 中
    """
    if validate:
        report = validate_instance(inst)
        if not report.passed:
            raise NotInClassifyingSpaceError(
                f"实例不在分类空间 M 中: {report.failed_clause}",
                report.failed_clause or "in_M",
            )
    b = deligne_bigrading(inst)
    gram = np.array(
        [[complex(x) for x in row] for row in _hodge_gram(inst, b)], dtype=complex
    )
    gram = (gram + gram.conj().T) / 2
    try:
        lower = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as e:
        raise NotInClassifyingSpaceError("Hodge 度量不是正定的", "positivity") from e
    frame = to_numpy(b.P) @ np.linalg.inv(lower).T
    ctx = MetricContext(
        b,
        gram,
        frame,
        np.linalg.inv(frame),
        list(b.labels),
        MetricMode.STANDARD,
        1.0,
        twist,
    )
    if mode is MetricMode.TWISTED:
        ctx.mode = MetricMode.TWISTED
        standard = MetricContext(b, gram, frame, ctx.frame_inv, list(b.labels))
        ctx.tau = tau(inst, twist, ctx=standard)
    return ctx


def vector_norm(v: Sequence, ctx: MetricContext) -> float:
    c = ctx.coordinates(v)
    if ctx.mode is MetricMode.STANDARD:
        return float(np.linalg.norm(c))
    return float(np.sqrt(np.sum(ctx.tau ** ctx.weights * np.abs(c) ** 2)))


def endo_norm(A, ctx: MetricContext) -> float:
    """酉标架下的 Frobenius 范数 sqrt(Tr(A A*))（扭曲模式按权重缩放）"""
    return float(np.linalg.norm(ctx.adapted(A) * ctx.endo_weights()))


def q_norm(A, ctx: MetricContext) -> float:
    """A 在 q = ⊕_{a<0} g^{a,b} 上的投影的范数（切向量的长度）"""
    B = ctx.adapted(A) * ctx.endo_weights()
    levels = np.array([p for p, _ in ctx.labels])
    mask = (levels[:, None] - levels[None, :]) < 0
    return float(np.linalg.norm(B[mask]))


def splitting_operator(
    inst: GPMHSInstance, source: TwistSource = TwistSource.DELTA
) -> Operator:
    if source is TwistSource.EPSILON:
        return sl2_splitting(inst)[0]
    return delta_splitting(inst)[0]


def tau(
    inst: GPMHSInstance,
    source: TwistSource = TwistSource.DELTA,
    ctx: Optional[MetricContext] = None,
) -> float:
    """
    扭曲因子 τ(F) = 1 + Σ_{p,q<0} ‖ε^{p,q}‖^{−2/(p+q)}

    Raises:
        UnsupportedLengthError: source 为 ε 且权跨度大于 2
    """
    op = splitting_operator(inst, source)
    if op.is_zero():
        return 1.0
    ctx = ctx or hodge_metric(inst, validate=False)
    total = 0.0
    for (p, q), component in ctx.bigrading.components(op).items():
        if p >= 0 or q >= 0:
            continue
        norm = endo_norm(component, ctx)
        if norm > 0:
            total += norm ** (-2.0 / (p + q))
    logger.debug(f"τ = {1.0 + total:.15g} (来源 {source.value})")
    return 1.0 + total


def hodge_type_of(v: Sequence, b: Bigrading) -> Optional[HodgeType]:
    """v 所在的 I^{p,q}；不属于单一类型时返回 None"""
    for t, space in b.pieces.items():
        if space.contains(v):
            return t
    return None


def twisted_norm(
    v: Sequence, inst: GPMHSInstance, source: TwistSource = TwistSource.DELTA
) -> float:
    return vector_norm(v, hodge_metric(inst, MetricMode.TWISTED, source))


def scaling_ratio(inst: GPMHSInstance, Y: Operator, y, alpha, v: Sequence) -> float:
    """‖y^{αY}v‖_{y^{αY}F} / ‖v‖_F，Y 为 W 的实分次"""
    g = grading_power(Y, y, alpha)
    moved = inst.with_filtration(inst.F.apply(g))
    base = hodge_metric(inst)
    target = hodge_metric(moved, validate=False)
    return vector_norm(g.apply(v), target) / vector_norm(v, base)


def twist_bound_ratio(
    inst: GPMHSInstance,
    Y: Operator,
    y,
    v: Sequence,
    source: TwistSource = TwistSource.DELTA,
) -> Tuple[float, float]:
    """
    |t(y)v|_{t(y)F} / |v|_F 的实测值与闭式 ((y^{−1} + τ − 1)/τ)^{(p+q)/2}

    其中 t(y) = y^{−Y/2}

    Returns:
        (实测值, 闭式值)
    """
    base = hodge_metric(inst, MetricMode.TWISTED, source)
    kind = hodge_type_of(v, base.bigrading)
    if kind is None:
        raise DimensionMismatchError("v 不属于单一的 I^{p,q}", "hodge_type")
    g = grading_power(Y, y, Fraction(-1, 2))
    moved = inst.with_filtration(inst.F.apply(g))
    target = hodge_metric(moved, MetricMode.TWISTED, source, validate=False)
    measured = vector_norm(g.apply(v), target) / vector_norm(v, base)
    t = base.tau
    predicted = ((1.0 / float(y) + t - 1.0) / t) ** ((kind[0] + kind[1]) / 2.0)
    return measured, predicted


def basic_bound(
    inst: GPMHSInstance,
    Y: Operator,
    ys: Sequence,
    source: TwistSource = TwistSource.DELTA,
) -> Dict:
    """
    τ(y^{−Y/2}F) = 1 + y(τ(F) − 1) 的逐点检查，C = τ(F) − 1

    Returns:
        dict: C 与每个 y 的实测/预测值
    """
    base = tau(inst, source)
    records = []
    for y in ys:
        g = grading_power(Y, y, Fraction(-1, 2))
        moved = inst.with_filtration(inst.F.apply(g))
        value = tau(moved, source)
        predicted = 1.0 + float(y) * (base - 1.0)
        records.append({"y": float(y), "tau": value, "predicted": predicted})
    return {"C": base - 1.0, "records": records}


# ---------------------------------------------------------------------------
# 图卡坐标与距离替代量
# ---------------------------------------------------------------------------


def chart_frame(F: DecFiltration, W=None) -> Tuple[Operator, List[int]]:
    """
    F 的适配基与每列的 Hodge 层级

    (F, W) 为 MHS 时取 Deligne 双分次；否则取 Hermite 正交分裂 F^a ∩ (F^{a+1})^⊥
    """
    if W is not None:
        try:
            b = bigrading_of(F, W)
            return b.P, [label[0] for label in b.labels]
        except NotMixedHodgeError:
            logger.debug("基点不是 MHS，改用 Hermite 正交分裂作图卡")
    n, scalars = F.ambient_dim, F.field
    spaces: Dict[int, Subspace] = {}
    for a in range(F.lo, F.hi + 1):
        upper = F[a + 1]
        if upper.dim:
            rows = [[x.conjugate() for x in vec] for vec in upper.basis]
            perp = Subspace(n, nullspace(rows, n, scalars), scalars)
        else:
            perp = Subspace.full(n, scalars)
        piece = F[a].intersect(perp)
        if piece.dim:
            spaces[a] = piece
    return eigenframe(spaces, n, scalars)


@dataclass
class ChartPoint:
    """F2 = P e^{u} P⁻¹ · F1，u 在适配基下严格按层级下三角"""

    P: Operator
    P_inv: Operator
    u_adapted: Operator
    levels: List[int]

    @property
    def u(self) -> Operator:
        return self.P @ self.u_adapted @ self.P_inv

    def flow(self, t) -> Operator:
        """e^{t·u}（环境坐标）"""
        return self.P @ self.u_adapted.scale(t).exp() @ self.P_inv


def _align(
    inst: GPMHSInstance, F2: DecFiltration
) -> Tuple[GPMHSInstance, DecFiltration]:
    if F2.ambient_dim != inst.dim:
        raise DimensionMismatchError("两个滤链的环境维数不一致", "ambient_dim")
    if F2.field.exact and not inst.field.exact:
        return inst, dec_to_float(F2, inst.field)
    if not F2.field.exact and inst.field.exact:
        return inst.to_float(), F2
    return inst, F2


def chart_point(inst: GPMHSInstance, F2: DecFiltration) -> ChartPoint:
    """
    求 q_{F1} 中唯一的 u 使 e^u·F1 = F2

    对每个层级 a，把 F2^a 的基写成 [T; S]（T 为层级 ≥ a 的行），
    C·T⁻¹ 在层级恰为 a 的列给出 g(e_j)，u = log g

    Raises:
        OutOfChartError: F2 不在 F1 的图卡内
    """
    inst, F2 = _align(inst, F2)
    F1 = inst.F
    scalars = F1.field
    n = inst.dim
    P, levels = chart_frame(F1, inst.W)
    P_inv = P.inverse()
    columns: List[Optional[List]] = [None] * n
    for a in sorted(set(levels)):
        top = [j for j, level in enumerate(levels) if level >= a]
        target = F2[a]
        if target.dim != len(top):
            raise OutOfChartError(
                f"dim F2^{a} = {target.dim} != {len(top)}", "chart_dimension"
            )
        C = [P_inv.apply(v) for v in target.basis]
        T = [[C[c][i] for c in range(len(C))] for i in top]
        try:
            T_inv = invert_matrix(T, scalars)
        except SingularOperatorError as e:
            raise OutOfChartError(f"F2^{a} 不在 F1 的大胞腔内", "chart_cell") from e
        top_set = set(top)
        for j, level in enumerate(levels):
            if level != a:
                continue
            idx = top.index(j)
            col = []
            for i in range(n):
                if i in top_set:
                    col.append(scalars.one if i == j else scalars.zero)
                    continue
                acc = scalars.zero
                for c in range(len(C)):
                    if C[c][i] and T_inv[c][idx]:
                        acc = acc + C[c][i] * T_inv[c][idx]
                col.append(acc)
            columns[j] = col
    g = Operator.from_columns(columns, scalars)
    return ChartPoint(P, P_inv, g.log(), levels)


def chart_log(inst: GPMHSInstance, F2: DecFiltration) -> Operator:
    return chart_point(inst, F2).u


def distance_surrogate(
    inst: GPMHSInstance,
    F2: DecFiltration,
    mode: MetricMode = MetricMode.STANDARD,
    twist: TwistSource = TwistSource.DELTA,
    panels: int = 64,
) -> float:
    """
    沿 γ(t) = e^{tu}·F1 的路径长度（复合 Simpson，至少 64 段），是 Riemann 距离的上界

    Args:
        inst: 基点 F1（需在 M 中）
        F2: 目标滤链
        mode: 标准或扭曲度量
        twist: 扭曲来源
        panels: Simpson 段数（偶数，至少 64）

    Returns:
        float: 距离替代量，F1 = F2 时为 0
    """
    point = chart_point(inst, F2)
    if point.u_adapted.is_zero():
        return 0.0
    panels = max(64, panels + (panels % 2))
    inst, _ = _align(inst, F2)
    u = point.u
    base_ctx = hodge_metric(inst, mode, twist, validate=False)
    tiny = point.u_adapted.max_abs() <= 1e-13
    ts = [Fraction(k, panels) for k in range(panels + 1)]
    speeds = []
    for t in ts:
        if tiny or t == 0:
            ctx = base_ctx
        else:
            moved = inst.with_filtration(inst.F.apply(point.flow(t)))
            ctx = hodge_metric(moved, mode, twist, validate=False)
        speeds.append(q_norm(u, ctx))
    value = float(simpson(np.array(speeds), x=np.array([float(t) for t in ts])))
    logger.debug(f"距离替代量 {value:.6e}（{panels} 段）")
    return value
