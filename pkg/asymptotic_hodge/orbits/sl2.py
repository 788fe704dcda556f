"""
sl2 三元组

单变量三元组 (N, H, N⁺)、锥上的 (N(y), H_(r), N⁺(y))、分裂极限 MHS、
约化极限 Φ 的双分次公式以及 Γ^j 在 ad Y^k 下的权分解
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..exceptions import NoSolutionError, RelativeFiltrationError
from ..linear_core import (
    DecFiltration,
    ExactComplex,
    Operator,
    Subspace,
    eigenframe,
    joint_eigenspaces,
    solve,
)
from ..mhs import (
    Bigrading,
    GPMHSInstance,
    deligne_bigrading,
    delta_splitting,
    grading_Y,
    hodge_numbers_of,
)
from ..weightfilt import monodromy_weight_filtration
from .evaluation import LocalNormalForm, NilpotentOrbitSpec, SL2Data, nome, deck_reduce

logger = logging.getLogger(__name__)


@dataclass
class SL2Triple:
    """[H, N] = −2N，[H, N⁺] = 2N⁺，[N⁺, N] = H"""

    N: Operator
    H: Operator
    N_plus: Operator

    def relations(self) -> Dict[str, bool]:
        return {
            "H_N": self.H.bracket(self.N) == self.N.scale(-2),
            "H_N_plus": self.H.bracket(self.N_plus) == self.N_plus.scale(2),
            "N_plus_N": self.N_plus.bracket(self.N) == self.H,
        }

    def check(self) -> None:
        for name, ok in self.relations().items():
            if not ok:
                raise NoSolutionError(f"sl2 关系 {name} 不成立", "sl2_brackets")

    def to_json(self):
        return {
            "N": self.N.to_json(),
            "H": self.H.to_json(),
            "N_plus": self.N_plus.to_json(),
        }


def _solve_raising(N: Operator, H: Operator) -> Optional[Operator]:
    """解 [H, X] = 2X 与 [X, N] = H，未知量为 X 的 n² 个矩阵元"""
    n, scalars = N.n, N.field
    zero, one = scalars.zero, scalars.one
    rows, rhs = [], []
    for i in range(n):
        for j in range(n):
            row = [zero] * (n * n)
            for a in range(n):
                row[a * n + j] = row[a * n + j] + H.rows[i][a]
                row[i * n + a] = row[i * n + a] - H.rows[a][j]
            row[i * n + j] = row[i * n + j] - one - one
            rows.append(row)
            rhs.append(zero)
    for i in range(n):
        for j in range(n):
            row = [zero] * (n * n)
            for a in range(n):
                row[i * n + a] = row[i * n + a] + N.rows[a][j]
                row[a * n + j] = row[a * n + j] - N.rows[i][a]
            rows.append(row)
            rhs.append(H.rows[i][j])
    solution = solve(rows, rhs, scalars)
    if solution is None:
        return None
    return Operator([solution[i * n:(i + 1) * n] for i in range(n)], scalars)


def sl2_triple_one_var(N: Operator, hat_inst: GPMHSInstance, k: int) -> SL2Triple:
    """
    由 ℝ 分裂的极限 MHS (F̂, W(N)[−k]) 构造 sl2 三元组

    H 在 I^{p,q} 上作用为 p+q−k，N⁺ 由线性方程组唯一确定

    Args:
        N: 实幂零算子
        hat_inst: 权滤链为 W(N)[−k] 的 ℝ 分裂实例
        k: 纯结构的权

    Returns:
        SL2Triple

    Raises:
        NoSolutionError: 输入不生成幂零轨道或方程组无解
    """
    try:
        expected = monodromy_weight_filtration(N, k)
    except RelativeFiltrationError as e:
        raise NoSolutionError(f"W(N) 不满足公理: {e}", "weight_filtration") from e
    if hat_inst.W != expected:
        raise NoSolutionError("实例的权滤链不是 W(N)[−k]", "weight_filtration")
    b = deligne_bigrading(hat_inst)
    if not b.is_r_split():
        raise NoSolutionError("极限 MHS 不是 ℝ 分裂的", "r_split")
    if set(b.components(N)) - {(-1, -1)}:
        raise NoSolutionError("N 不是 (−1,−1) 态射", "minus_one_morphism")
    H = grading_Y(b) - Operator.identity(N.n, N.field).scale(k)
    N_plus = _solve_raising(N, H)
    if N_plus is None:
        raise NoSolutionError("找不到满足 sl2 关系的 N⁺", "n_plus")
    triple = SL2Triple(N, H, N_plus)
    triple.check()
    logger.debug("sl2 三元组构造完成，括号关系精确成立")
    return triple


def limit_split(spec: NilpotentOrbitSpec) -> Tuple[Operator, GPMHSInstance]:
    """
    极限 MHS (F_∞, M) 的 δ 分裂

    Returns:
        (δ, (F̂_∞, M))
    """
    M = spec.limit_weight_filtration()
    F = spec.F_inf
    lmhs = GPMHSInstance(M, F, hodge_numbers_of(F, M), {}, spec.instance.name)
    delta, split = delta_splitting(lmhs)
    numbers = hodge_numbers_of(split.F, M)
    return delta, GPMHSInstance(M, split.F, numbers, {}, spec.instance.name)


def sl2_triple_cone(spec: NilpotentOrbitSpec, y: Sequence) -> SL2Triple:
    """纯情形锥上一点：(N(y), H_(r), N⁺(y))，H_(r) 由 (F̂_∞, W(N(y))[−k]) 给出"""
    if spec.weight is None:
        raise NoSolutionError("锥上的三元组只对纯幂零轨道定义", "pure")
    N_y = spec.N_of([ExactComplex.of(v) for v in y])
    _, hat = limit_split(spec)
    return sl2_triple_one_var(N_y, hat, spec.weight)


def check_sl2_family(triples: Sequence[SL2Triple], y: Sequence) -> Dict[str, bool]:
    """
    两两交换的 sl2 三元组族 (N_j, H_j, N_j⁺)：
    检查 (Σ y_j N_j, Σ H_j, Σ y_j^{−1} N_j⁺) 仍是三元组

    Raises:
        NoSolutionError: 不同指标的三元组不交换
    """
    if len(triples) != len(y):
        raise NoSolutionError("三元组个数与 y 的分量数不符", "rank")
    for i, a in enumerate(triples):
        for b in triples[i + 1:]:
            for X in (a.N, a.H, a.N_plus):
                for Z in (b.N, b.H, b.N_plus):
                    if not X.bracket(Z).is_zero():
                        raise NoSolutionError(
                            "不同指标的 sl2 三元组不交换", "family_commute"
                        )
    field_ = triples[0].N.field
    n = triples[0].N.n
    N = Operator.zero(n, field_)
    H = Operator.zero(n, field_)
    N_plus = Operator.zero(n, field_)
    for t, yj in zip(triples, y):
        yj = field_.coerce(yj)
        N = N + t.N.scale(yj)
        H = H + t.H
        N_plus = N_plus + t.N_plus.scale(field_.one / yj)
    return SL2Triple(N, H, N_plus).relations()


def phi_from_bigrading(b: Bigrading, weight_of) -> DecFiltration:
    """
    约化极限 Φ^p = ⊕_{s ≤ k−p} I^{r,s}

    Args:
        b: ℝ 分裂极限 MHS 的双分次
        weight_of: 每个双分次块所属的权 k（纯情形为常数函数）；
            混合情形按 Y^0 特征值把块再切开后传入
    """
    n, scalars = b.n, b.field
    pieces: List[Tuple[int, List]] = []
    for (r, s), space in b.pieces.items():
        for k, basis in weight_of((r, s), space):
            pieces.append((k - s, basis))
    if not pieces:
        return DecFiltration({0: Subspace.full(n, scalars)}, n, scalars)
    lo = min(level for level, _ in pieces)
    hi = max(level for level, _ in pieces)
    steps = {}
    for p in range(lo, hi + 2):
        vectors = [v for level, basis in pieces if level >= p for v in basis]
        steps[p] = Subspace(n, vectors, scalars)
    return DecFiltration(steps, n, scalars)


def pure_weight(k: int):
    return lambda label, space: [(k, space.basis)]


def nilp_conv_check(triple: SL2Triple, hat_inst: GPMHSInstance, k: int, y=1) -> bool:
    """e^{iyN}·F̂ = e^{−(i/y)N⁺}·Φ，在有理数上精确判定"""
    scalars = triple.N.field
    y = scalars.coerce(y)
    Phi = phi_from_bigrading(deligne_bigrading(hat_inst), pure_weight(k))
    left = hat_inst.F.apply(triple.N.scale(scalars.i * y).exp())
    right = Phi.apply(triple.N_plus.scale(-scalars.i / y).exp())
    return left == right


def split_orbit_sl2(spec: NilpotentOrbitSpec) -> SL2Data:
    """
    由分裂极限 MHS 给出 (H_j, Y_0)

    支持两种情形：纯单变量（Y_0 = k，H = Y_(F̂, W(N)[−k]) − k）
    与 M(N, W) = W（H_j = 0，Y_0 = Y_(F̂, W)）

    Raises:
        NoSolutionError: 其余情形需要多变量 SL2 轨道构造
    """
    _, hat = limit_split(spec)
    n, scalars = spec.dim, spec.W.field
    identity = Operator.identity(n, scalars)
    b = deligne_bigrading(hat)
    if spec.weight is not None and spec.rank == 1:
        H = grading_Y(b) - identity.scale(spec.weight)
        data = SL2Data([H], identity.scale(spec.weight))
    elif spec.limit_weight_filtration() == spec.W:
        zeros = [Operator.zero(n, scalars) for _ in range(spec.rank)]
        data = SL2Data(zeros, grading_Y(b))
    else:
        raise NoSolutionError(
            "只支持纯单变量或 M = W 的情形，请在实例中给出 sl2 数据", "sl2_unsupported"
        )
    data.validate(spec.W)
    logger.info(f"由分裂极限 MHS 得到 sl2 数据（{spec.rank} 个 H_j）")
    return data


# ---------------------------------------------------------------------------
# Γ^j 的权分解
# ---------------------------------------------------------------------------


def cumulative_gradings(sl2: SL2Data) -> List[Operator]:
    """Y^k = Y_0 + H_1 + … + H_k，k = 1..r"""
    out = []
    current = sl2.Y0
    for H in sl2.H:
        current = current + H
        out.append(current)
    return out


def gamma_weight_profile(
    spec: NilpotentOrbitSpec, lnf: LocalNormalForm, sl2: SL2Data, z: Sequence
) -> Dict:
    """
    Γ^j = log(e^{Γ_{j−1}(s)} e^{−Γ_j(s)})（Γ_0 = Γ）在 ad Y^1..Y^r 下分解，
    并断言 μ(k) > 0（某个 k ≤ j−1）的分量为零

    Returns:
        dict: 每个 j 的分量范数、违反项与总的 passed 标志
    """
    _, reduced = deck_reduce(z)
    s = [nome(v) for v in reduced]
    gradings = cumulative_gradings(sl2)
    n = spec.dim
    spaces = joint_eigenspaces(gradings, n, sl2.Y0.field)
    P, labels = eigenframe(spaces, n, sl2.Y0.field)
    P_inv = P.inverse()

    profile = []
    passed = True
    previous = lnf.gamma(s)
    for j in range(1, spec.rank + 1):
        current = lnf.restricted(j).gamma(s)
        piece = (previous.exp() @ current.scale(-1).exp()).log()
        adapted = P_inv @ piece @ P
        components: Dict[Tuple[int, ...], float] = {}
        for a in range(n):
            for c in range(n):
                value = adapted.rows[a][c]
                if not value:
                    continue
                mu = tuple(x - y for x, y in zip(labels[a], labels[c]))
                components[mu] = max(components.get(mu, 0.0), abs(value))
        violations = [
            list(mu) for mu, size in components.items()
            if size > 0 and any(mu[k] > 0 for k in range(j - 1))
        ]
        if violations:
            passed = False
            logger.warning(f"Γ^{j} 在权 {violations} 上不为零")
        profile.append({
            "j": j,
            "components": {
                ",".join(str(x) for x in mu): size
                for mu, size in sorted(components.items())
            },
            "violations": violations,
        })
        previous = current
    return {"passed": passed, "profile": profile}
