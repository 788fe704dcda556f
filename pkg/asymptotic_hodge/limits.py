"""
约化极限模块
纯情形与混合情形的约化极限 Φ、Satake 边界映射 p_σ、朴素极限以及沿序列的路径依赖实验
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import orth

from .exceptions import (
    HodgeError,
    NoSolutionError,
    NotClassifiedError,
    NotEvenTypeError,
    OddTypeError,
    OutOfChartError,
    SingularOperatorError,
)
from .linear_core import (
    DecFiltration,
    ExactComplex,
    Operator,
    ScalarField,
    Subspace,
    graded_piece,
    induced_graded_filtration,
    induced_increasing_filtration,
    integer_eigenspaces,
    nullspace,
)
from .mhs import (
    ValidationStatus,
    bigrading_of,
    deligne_bigrading,
    delta_splitting,
    splitting_operator_from_bigrading,
    validate_instance,
)
from .metrics import chart_point
from .orbits.evaluation import LocalNormalForm, NilpotentOrbitSpec, SL2Data, lnf_eval
from .orbits.scans import ScanReport, gather_ordered
from .orbits.sl2 import limit_split, phi_from_bigrading, pure_weight
from .weightfilt import monodromy_weight_filtration

logger = logging.getLogger(__name__)


@dataclass
class ReducedLimit:
    """约化极限滤链及其来源"""

    Phi: DecFiltration
    provenance: str  # pure / mixed / satake / naive
    n_invariant: bool  # 对每个 N_j 都有 N·Φ^p ⊆ Φ^p
    status: Optional[ValidationStatus] = None  # 相对实例的 W 的校验结果
    checks: Dict = field(default_factory=dict)

    def to_json(self):
        return {
            "provenance": self.provenance,
            "Phi": self.Phi.to_json(),
            "n_invariant": self.n_invariant,
            "status": self.status.value if self.status else None,
            "checks": self.checks,
        }


def is_n_invariant(Phi: DecFiltration, nilpotents: Sequence[Operator]) -> bool:
    return all(
        Phi[p].image(N).issubset(Phi[p])
        for N in nilpotents
        for p in range(Phi.lo, Phi.hi + 1)
    )


def _status_of(spec: NilpotentOrbitSpec, Phi: DecFiltration) -> ValidationStatus:
    return validate_instance(spec.instance.with_filtration(Phi)).status


def _cone_samples(rank: int) -> List[List[int]]:
    samples = [[1] * rank]
    for j in range(rank):
        y = [1] * rank
        y[j] = 3
        samples.append(y)
    return samples


def reduced_limit_pure(spec: NilpotentOrbitSpec) -> ReducedLimit:
    """
    纯情形 Φ^p = ⊕_{s ≤ k−p} I^{r,s}，双分次取自 δ 分裂后的极限 MHS

    同时在锥内若干采样点上检查 W(N(y)) 不依赖 y，以及 Φ 对每个 N_j 不变

    Raises:
        NoSolutionError: 不是纯幂零轨道，或 Φ 不被 N 保持
    """
    if spec.weight is None:
        raise NoSolutionError("纯情形的约化极限需要权 k", "pure")
    k = spec.weight
    _, hat = limit_split(spec)
    Phi = phi_from_bigrading(deligne_bigrading(hat), pure_weight(k))

    M = spec.limit_weight_filtration()
    interior = all(
        monodromy_weight_filtration(spec.N_of([ExactComplex(v) for v in y]), k) == M
        for y in _cone_samples(spec.rank)
    )
    invariant = is_n_invariant(Phi, spec.nilpotents)
    if not invariant:
        raise NoSolutionError("Φ 不被 N 保持，输入不是纯幂零轨道", "phi_invariant")
    logger.info(f"纯约化极限: Φ 的跳跃 {Phi.jumps()}")
    extras = {"interior_independent": interior}
    return ReducedLimit(Phi, "pure", invariant, _status_of(spec, Phi), extras)


def _eigen_split(Y0: Operator):
    """把 I^{r,s} 按 Y^0 的特征空间切开"""
    eigen = integer_eigenspaces(Y0)

    def weight_of(label, space: Subspace):
        if not space.image(Y0).issubset(space):
            raise NoSolutionError(f"Y^0 不保持 I^{label}", "y0_bigrading")
        parts = [(k, space.intersect(E)) for k, E in eigen.items()]
        parts = [(k, s) for k, s in parts if s.dim]
        if sum(s.dim for _, s in parts) != space.dim:
            raise NoSolutionError(f"I^{label} 不是 Y^0 特征空间的直和", "y0_bigrading")
        return [(k, s.basis) for k, s in parts]

    return weight_of


def reduced_limit_mixed(spec: NilpotentOrbitSpec, Y0: Operator) -> ReducedLimit:
    """
    混合情形 Φ^p = ⊕_{k, s ≤ k−p} I^{r,s}_{(F̂_∞, W¹)} ∩ E_k(Y^0)

    Args:
        spec: 容许幂零轨道
        Y0: W 的实分次，需保持 (F̂_∞, W¹) 的双分次

    Raises:
        NoSolutionError: Y^0 与双分次不相容
    """
    _, hat = limit_split(spec)
    Phi = phi_from_bigrading(deligne_bigrading(hat), _eigen_split(Y0))
    invariant = is_n_invariant(Phi, spec.nilpotents)
    if not invariant:
        logger.info("混合约化极限不被 N 保持，极限依赖 x(∞)")
    return ReducedLimit(Phi, "mixed", invariant, _status_of(spec, Phi))


# ---------------------------------------------------------------------------
# Satake 边界
# ---------------------------------------------------------------------------


def _check_square_zero(spec: NilpotentOrbitSpec) -> None:
    Ns = spec.nilpotents
    for i, A in enumerate(Ns):
        for B in Ns[i:]:
            if not (A @ B + B @ A).is_zero():
                raise NotEvenTypeError("锥中存在 N² ≠ 0 的元素", "square_zero")


def _odd_even_pieces(spec: NilpotentOrbitSpec, F: DecFiltration):
    b = bigrading_of(F, spec.limit_weight_filtration())
    odd = [p for (p, q) in b.types if p + q == -1 and p % 2]
    even = [p for (p, q) in b.types if p + q == -1 and not p % 2]
    return b, odd, even


def satake_map(spec: NilpotentOrbitSpec) -> ReducedLimit:
    """
    Ψ^0 = (⊕_{p 偶} I^{p,−1−p}) ⊕ W_{−2,ℂ}，W = W(σ)[1]

    检查 e^N·Ψ = Ψ（N ∈ σ_ℂ）与 Ψ^0 ∩ conj(Ψ^0) = W_{−2,ℂ}

    Raises:
        NotEvenTypeError: 权不是 −1、N² ≠ 0 或存在奇数 p 的 I^{p,−1−p}
        OddTypeError: 奇型锥，未实现
    """
    if spec.weight != -1:
        raise NotEvenTypeError(f"Satake 映射要求权 −1，实际为 {spec.weight}", "weight")
    _check_square_zero(spec)
    b, odd, even = _odd_even_pieces(spec, spec.F_inf)
    if odd:
        if not even:
            raise OddTypeError("奇型锥的 p_σ 未实现", "odd_type")
        raise NotEvenTypeError(f"I^{{p,−1−p}} 在奇数 p = {odd} 处不为零", "even_type")
    n, scalars = spec.dim, spec.W.field
    W2 = spec.limit_weight_filtration()[-2]
    vectors = [v for p in even for v in b.piece(p, -1 - p).basis] + W2.basis
    Psi0 = Subspace(n, vectors, scalars)
    Psi = DecFiltration({0: Psi0}, n, scalars)

    cone_ops = list(spec.nilpotents)
    cone_ops.append(spec.N_of([ExactComplex(j + 1, 1) for j in range(spec.rank)]))
    invariant = all(Psi.apply(N.exp()) == Psi for N in cone_ops)
    boundary = Psi0.intersect(Psi0.conjugate()) == W2
    logger.info(
        f"Satake 映射: dim Ψ^0 = {Psi0.dim}，e^N 不变 {invariant}，"
        f"属于 B_S(σ) {boundary}"
    )
    return ReducedLimit(
        Psi, "satake", is_n_invariant(Psi, spec.nilpotents), None,
        {"exp_invariant": invariant, "in_boundary_component": boundary},
    )


def satake_tilde_F(spec: NilpotentOrbitSpec) -> DecFiltration:
    """F̃^0 = (⊕_{p 偶} I^{p,−p−1}) ⊕ (⊕_p I^{p,−p})，双分次取自 ℝ 分裂的 (F̂, W)"""
    _, hat = limit_split(spec)
    b = deligne_bigrading(hat)
    vectors = [
        v
        for (p, q), space in b.pieces.items()
        if (p + q == -1 and not p % 2) or p + q == 0
        for v in space.basis
    ]
    scalars = spec.W.field
    return DecFiltration({0: Subspace(spec.dim, vectors, scalars)}, spec.dim, scalars)


def satake_comparison(spec: NilpotentOrbitSpec) -> Dict:
    """p_σ(σ, F̂) 与 (σ, F̃) 的约化极限是否相等"""
    _, hat = limit_split(spec)
    hat_spec = NilpotentOrbitSpec(
        spec.nilpotents, spec.instance.with_filtration(hat.F), spec.weight
    )
    psi = satake_map(hat_spec)
    tilde = spec.instance.with_filtration(satake_tilde_F(spec))
    tilde_spec = NilpotentOrbitSpec(spec.nilpotents, tilde, spec.weight)
    phi_tilde = reduced_limit_pure(tilde_spec)
    equal = psi.Phi == phi_tilde.Phi
    if not equal:
        logger.warning("p_σ(σ, F̂) 与 (σ, F̃) 的约化极限不一致")
    return {"psi": psi.to_json(), "phi_tilde": phi_tilde.to_json(), "equal": equal}


# ---------------------------------------------------------------------------
# 朴素极限
# ---------------------------------------------------------------------------

Polynomial = Dict[int, Operator]


def _poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    out: Polynomial = {}
    for da, A in a.items():
        for db, B in b.items():
            term = A @ B
            out[da + db] = out[da + db] + term if da + db in out else term
    return {d: op for d, op in out.items() if not op.is_zero()}


def orbit_polynomial(spec: NilpotentOrbitSpec, exponents: Sequence[int]) -> Polynomial:
    """e^{i Σ y^{a_j} N_j} 作为 y 的多项式（按次数存放系数算子）"""
    n, scalars = spec.dim, spec.W.field
    step: Polynomial = {}
    for a, N in zip(exponents, spec.nilpotents):
        term = N.scale(scalars.i)
        step[a] = step[a] + term if a in step else term
    total: Polynomial = {0: Operator.identity(n, scalars)}
    power: Polynomial = {0: Operator.identity(n, scalars)}
    for k in range(1, n + 1):
        factor = scalars.one / scalars.coerce(k)
        power = {d: op.scale(factor) for d, op in _poly_mul(power, step).items()}
        if not power:
            break
        for d, op in power.items():
            total[d] = total[d] + op if d in total else op
    return total


def _is_zero_vector(v, scalars: ScalarField) -> bool:
    return all(scalars.is_zero(x) for x in v)


def limit_span(
    columns: List[Dict[int, List]], n: int, scalars: ScalarField
) -> Subspace:
    """
    多项式向量 v_1(y)..v_m(y) 张成的子空间在 y → ∞ 时的极限

    反复用首项系数间的线性关系消去最高次项，直到首项系数线性无关
    """
    columns = [dict(c) for c in columns]
    while True:
        degrees = [max(c) for c in columns]
        leads = [c[d] for c, d in zip(columns, degrees)]
        rows = [[leads[j][i] for j in range(len(leads))] for i in range(n)]
        relations = nullspace(rows, len(leads), scalars)
        if not relations:
            return Subspace(n, leads, scalars)
        c = relations[0]
        active = [j for j in range(len(c)) if not scalars.is_zero(c[j])]
        top = max(degrees[j] for j in active)
        target = [j for j in active if degrees[j] == top][-1]
        combined: Dict[int, List] = {}
        for j in active:
            lift = top - degrees[j]
            for d, vec in columns[j].items():
                scaled = [c[j] * x for x in vec]
                key = d + lift
                if key in combined:
                    scaled = [a + b for a, b in zip(combined[key], scaled)]
                combined[key] = scaled
        combined = {
            d: v
            for d, v in combined.items()
            if d < top and not _is_zero_vector(v, scalars)
        }
        if not combined:
            raise SingularOperatorError(
                "极限计算中出现零向量，生成元线性相关", "limit_span"
            )
        columns[target] = combined


def naive_limit(
    spec: NilpotentOrbitSpec,
    exponents: Optional[Sequence[int]] = None,
    x: Optional[Sequence] = None,
) -> ReducedLimit:
    """
    lim_{y→∞} e^{N(x)} e^{i Σ y^{a_j} N_j}·F_∞，逐步精确计算

    Args:
        spec: 幂零轨道
        exponents: 路径 y_j = y^{a_j} 的指数，默认全为 1
        x: 实部，默认 0
    """
    exponents = list(exponents or [1] * spec.rank)
    if len(exponents) != spec.rank or any(a < 0 for a in exponents):
        raise NoSolutionError(f"非法的路径指数 {exponents}", "path_exponents")
    n, scalars = spec.dim, spec.W.field
    g = orbit_polynomial(spec, exponents)
    F = spec.F_inf
    steps = {}
    for p in range(F.lo + 1, F.hi + 1):
        columns = []
        for v in F[p].basis:
            column = {d: op.apply(v) for d, op in g.items()}
            columns.append(
                {d: w for d, w in column.items() if not _is_zero_vector(w, scalars)}
            )
        steps[p] = limit_span(columns, n, scalars)
    steps[F.lo] = Subspace.full(n, scalars)
    limit = DecFiltration(steps, n, scalars)
    if x is not None and any(x):
        limit = limit.apply(spec.N_of([ExactComplex.of(v) for v in x]).exp())
    status = _status_of(spec, limit)
    logger.info(f"朴素极限（指数 {exponents}）: 状态 {status.value}")
    return ReducedLimit(limit, "naive", is_n_invariant(limit, spec.nilpotents), status)


def plucker_distance(F1: DecFiltration, F2: DecFiltration) -> float:
    """各层 F^p 的正交投影之差的谱范数的最大值；维数不同时为 inf"""
    lo = min(F1.lo, F2.lo)
    hi = max(F1.hi, F2.hi)
    n = F1.ambient_dim
    worst = 0.0
    for p in range(lo + 1, hi + 1):
        a, b = F1[p], F2[p]
        if a.dim != b.dim:
            return math.inf
        if a.dim in (0, n):
            continue
        projections = []
        for s in (a, b):
            rows = np.array([[complex(x) for x in v] for v in s.basis], dtype=complex)
            Q = orth(rows.T)
            projections.append(Q @ Q.conj().T)
        worst = max(worst, float(np.linalg.norm(projections[0] - projections[1], 2)))
    return worst


def limit_distance(
    spec: NilpotentOrbitSpec, candidate: DecFiltration, F: DecFiltration
) -> Dict:
    """候选极限图卡内的距离 max|u|；图卡求解失败时退回投影距离"""
    try:
        point = chart_point(spec.instance.with_filtration(candidate), F)
        return {"distance": point.u.max_abs(), "metric": "chart"}
    except (OutOfChartError, SingularOperatorError) as e:
        logger.warning(f"图卡求解失败（{e.clause}），改用投影距离")
        return {"distance": plucker_distance(candidate, F), "metric": "plucker"}


# ---------------------------------------------------------------------------
# 序列极限
# ---------------------------------------------------------------------------


def default_path(
    rank: int,
    exponents: Optional[Sequence[int]] = None,
    x: Optional[Sequence] = None,
    decades: int = 7,
) -> List[List[ExactComplex]]:
    """z_j(m) = x_j + i·(10^m)^{a_j}，m = 1..decades"""
    exponents = list(exponents or [1] * rank)
    x = [ExactComplex.of(v).re for v in (x or [0] * rank)]
    return [
        [ExactComplex(x[j], 10 ** (m * exponents[j])) for j in range(rank)]
        for m in range(1, decades + 1)
    ]


def _monotone_tail(values: List[float]) -> bool:
    tail = values[len(values) // 2:]
    return all(b <= a * (1 + 1e-9) + 1e-15 for a, b in zip(tail, tail[1:]))


def sequence_limit(
    spec: NilpotentOrbitSpec,
    lnf: Optional[LocalNormalForm],
    points: Optional[Sequence[Sequence]] = None,
    sl2: Optional[SL2Data] = None,
    exponents: Optional[Sequence[int]] = None,
    tolerance: float = 1e-6,
    threads: int = 1,
) -> ScanReport:
    """
    沿序列 z(m) 求值并度量到候选极限的距离

    三种模式：
      pure   纯情形，F(z(m)) → Φ（reduced_limit_pure）
      split  混合单变量且给出 Y^0，F̂ = e^{−iδ}F(z) → e^{x(∞)N}·Φ，
             同时记录 F̃ = e^{−xN}F̂ → Φ
      direct 其余情形，F(z(m)) 与朴素极限比较

    通过条件：末点距离小于 tolerance 且后半段单调不增
    """
    points = points or default_path(spec.rank, exponents)
    points = [[ExactComplex.of(v) for v in z] for z in points]
    x_last = [v.re for v in points[-1]]
    N_last = spec.N_of([ExactComplex(v) for v in x_last])
    tilde_target = None
    if spec.weight is not None:
        mode = "pure"
        target = reduced_limit_pure(spec).Phi
    elif sl2 is not None and spec.rank == 1:
        mode = "split"
        tilde_target = reduced_limit_mixed(spec, sl2.Y0).Phi
        target = tilde_target.apply(N_last.exp())
    else:
        mode = "direct"
        target = naive_limit(spec, exponents, x_last).Phi

    def evaluate(z):
        F = lnf_eval(spec, lnf, z).filtration
        record = {"x": [float(v.re) for v in z], "y": [float(v.im) for v in z]}
        if mode == "split":
            _, hat = delta_splitting(spec.instance.with_filtration(F))
            F = hat.F
            tilde = F.apply(spec.N_of([ExactComplex(v.re) for v in z]).scale(-1).exp())
            tilde_fit = limit_distance(spec, tilde_target, tilde)
            record["tilde_distance"] = tilde_fit["distance"]
        record.update(limit_distance(spec, target, F))
        return record

    records = gather_ordered(evaluate, points, threads)
    distances = [r["distance"] for r in records]
    converged = distances[-1] < tolerance and _monotone_tail(distances)
    report = ScanReport("sequence-limit", mode, records)
    report.fit = {
        "limit": target.to_json(),
        "final_distance": distances[-1],
        "tolerance": tolerance,
    }
    report.passed = converged
    logger.info(f"序列极限（{mode}）: 末点距离 {distances[-1]:.3e}，收敛 {converged}")
    return report


# ---------------------------------------------------------------------------
# sl2 序列
# ---------------------------------------------------------------------------


@dataclass
class SL2Sequence:
    """y(m) = T·v(m) + b(m)"""

    T: np.ndarray  # r × d
    v: np.ndarray  # 样本数 × d
    b: np.ndarray  # 样本数 × r
    groups: List[List[int]]  # 每组坐标，首元为主导坐标

    @property
    def d(self) -> int:
        return self.T.shape[1]

    def to_json(self):
        return {
            "d": self.d,
            "T": self.T.tolist(),
            "b_limit": self.b[-1].tolist(),
            "groups": self.groups,
        }


def _tail_fit(target: np.ndarray, leader: np.ndarray, start: int):
    A = np.stack([leader[start:], np.ones(len(leader) - start)], axis=1)
    coef, *_ = np.linalg.lstsq(A, target[start:], rcond=None)
    residual = float(np.max(np.abs(A @ coef - target[start:])))
    return float(coef[0]), residual


def sl2_sequence_decompose(
    samples: Sequence[Sequence[float]], d: Optional[int] = None
) -> SL2Sequence:
    """
    有限样本下的 sl2 序列分解

    从最后一个坐标往前，后半段上能被已有主导坐标线性拟合
    （残差 < 1e−6·尺度）的坐标并入该组，否则成为新组的主导坐标；
    随后要求相邻组的比值发散、最慢的一组发散、b 收敛

    Raises:
        NotClassifiedError: 任一条件在样本上不成立
    """
    y = np.asarray(samples, dtype=float)
    if y.ndim != 2 or len(y) < 4:
        raise NotClassifiedError("至少需要 4 个样本的二维数组", "samples")
    count, r = y.shape
    start = count // 2
    groups: List[List[int]] = []
    coefficients = np.zeros((r, r))
    for i in reversed(range(r)):
        scale = max(float(np.max(np.abs(y[start:, i]))), 1.0)
        for g, members in enumerate(groups):
            c, residual = _tail_fit(y[:, i], y[:, members[0]], start)
            if residual < 1e-6 * scale and c != 0:
                members.append(i)
                coefficients[i, g] = c
                break
        else:
            coefficients[i, len(groups)] = 1.0
            groups.append([i])

    order = sorted(range(len(groups)), key=lambda g: -y[-1, groups[g][0]])
    groups = [groups[g] for g in order]
    T = coefficients[:, order]
    v = np.stack([y[:, members[0]] for members in groups], axis=1)
    if d is not None and d != len(groups):
        raise NotClassifiedError(f"样本给出 {len(groups)} 组，期望 {d}", "rank")

    first_half = slice(0, start)
    last_quarter = slice(count - max(1, count // 4), count)
    slowest = v[:, -1]
    if not slowest[-1] > 1.25 * float(np.max(slowest[first_half])):
        raise NotClassifiedError("最慢的一组不发散", "diverge")
    for j in range(len(groups) - 1):
        ratio = v[:, j] / v[:, j + 1]
        early = float(np.max(ratio[first_half]))
        if not float(np.min(ratio[last_quarter])) > 1.25 * early:
            raise NotClassifiedError(f"v_{j + 1}/v_{j + 2} 不发散", "ratio")

    b = y - v @ T.T
    scale = max(float(np.max(np.abs(y[-1]))), 1.0)
    drift = float(np.max(np.abs(b[-1] - b[count - 1 - max(1, count // 4)])))
    if drift > 1e-6 * scale:
        raise NotClassifiedError(f"b 不收敛（尾部漂移 {drift:.3e}）", "b_converge")
    logger.info(f"sl2 序列: d = {len(groups)}，分组 {groups}")
    return SL2Sequence(T, v, b, groups)


# ---------------------------------------------------------------------------
# 分次相容性
# ---------------------------------------------------------------------------


def graded_split_consistency(spec: NilpotentOrbitSpec) -> Dict[int, bool]:
    """每个 Gr^W_k 上：(F_∞Gr_k, W¹Gr_k) 的 δ 分裂等于 (F̂_∞Gr_k, W¹Gr_k)"""
    M = spec.limit_weight_filtration()
    _, hat = limit_split(spec)
    W = spec.W
    scalars = W.field
    result = {}
    for k in W.weights():
        piece = graded_piece(W, k)
        Fg = induced_graded_filtration(spec.F_inf, W, k, piece)
        Mg = induced_increasing_filtration(M, W, k, piece)
        try:
            delta = splitting_operator_from_bigrading(bigrading_of(Fg, Mg))
        except HodgeError as e:
            logger.error(f"Gr_{k} 上不是混合 Hodge 结构: {e}")
            raise
        split = Fg.apply(delta.scale(-scalars.i).exp())
        result[k] = split == induced_graded_filtration(hat.F, W, k, piece)
    return result
