"""
双扩张模块
Gr^W_0 ≅ ℤ(0)、Gr^W_{−1} = H、Gr^W_{−2} ≅ ℤ(1) 型的混合 Hodge 结构：中心映射 μ、
高度度量 |[F]| = e^{−2πδ/μ}、ℂ* 作用以及 φ 的局部可积性扫描
"""

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from .exceptions import BiextensionError, NoCentralSolutionError
from .linear_core import ExactComplex, Operator
from .mhs import (
    GPMHSInstance,
    bigrading_of,
    delta_splitting,
    grading_Y,
    lie_algebra_basis,
    splitting_operator_from_bigrading,
)
from .numeric import exactify, exactify_operator
from .orbits.evaluation import (
    LocalNormalForm,
    NilpotentOrbitSpec,
    SL2Data,
    grading_t,
    lnf_eval,
)
from .orbits.scans import ScanReport

logger = logging.getLogger(__name__)


@dataclass
class BiextensionInstance:
    """双扩张型实例：标记的生成元 1 ∈ W_0 与 1^∨ ∈ W_{−2}"""

    instance: GPMHSInstance
    one: List
    one_dual: List
    mu: Optional[Operator] = None

    def check_shape(self) -> None:
        """
        Raises:
            NoCentralSolutionError: 权结构不是 ℤ(0), H, ℤ(1)
        """
        W = self.instance.W
        if not set(W.weights()) <= {0, -1, -2}:
            raise NoCentralSolutionError(
                f"权 {W.weights()} 超出 {{0, −1, −2}}", "biext_weights"
            )
        if W.gr_dim(0) != 1 or W.gr_dim(-2) != 1:
            raise NoCentralSolutionError(
                f"dim Gr_0 = {W.gr_dim(0)}，dim Gr_−2 = {W.gr_dim(-2)}，应均为 1",
                "biext_rank",
            )
        if W[-1].contains(self.one) or not W[0].contains(self.one):
            raise NoCentralSolutionError("1 必须是 Gr_0 的生成元", "biext_one")
        if not W[-2].contains(self.one_dual) or not any(self.one_dual):
            raise NoCentralSolutionError("1^∨ 必须是 Gr_−2 的生成元", "biext_one_dual")


def build_mu(binst: BiextensionInstance) -> Operator:
    """
    μ(W_{−1}) = 0，μ(1) = 1^∨，且 μ 属于 g_ℂ 的中心

    Raises:
        NoCentralSolutionError: 不是双扩张型或 μ 不在中心
    """
    binst.check_shape()
    inst = binst.instance
    scalars = inst.field
    n = inst.dim
    functionals = inst.W[-1].annihilator()
    if len(functionals) != 1:
        raise NoCentralSolutionError("W_{−1} 的余维数不是 1", "biext_rank")
    phi = functionals[0]
    value = sum(
        (scalars.coerce(a) * scalars.coerce(b) for a, b in zip(phi, binst.one)),
        scalars.zero,
    )
    phi = [scalars.coerce(a) / value for a in phi]
    one_dual = [scalars.coerce(x) for x in binst.one_dual]
    mu = Operator([[one_dual[i] * phi[j] for j in range(n)] for i in range(n)], scalars)
    if not lie_algebra_center_check(inst, mu):
        raise NoCentralSolutionError("μ 与 g_ℂ 不交换", "biext_central")
    binst.mu = mu
    logger.debug("μ 构造完成并通过中心性检查")
    return mu


def lie_algebra_center_check(inst: GPMHSInstance, mu: Operator) -> bool:
    """μ 与 g_ℂ 的每个基元交换"""
    return all(mu.bracket(X).is_zero() for X in lie_algebra_basis(inst))


def _ratio_to_mu(op: Operator, mu: Operator) -> ExactComplex:
    """op = c·μ 时返回 c，否则抛出 BiextensionError"""
    scalars = op.field
    entries = ((i, j) for i in range(mu.n) for j in range(mu.n) if mu.rows[i][j])
    pivot = next(entries, None)
    if pivot is None:
        raise BiextensionError("μ = 0", "biext_mu")
    c = op.rows[pivot[0]][pivot[1]] / mu.rows[pivot[0]][pivot[1]]
    if op != mu.scale(c):
        raise BiextensionError("δ 不与 μ 成比例", "delta_proportional")
    if scalars.exact and not c.is_real():
        raise BiextensionError("δ/μ 不是实数", "delta_real")
    return c


def delta_over_mu(inst: GPMHSInstance, mu: Operator, verify: bool = True) -> Fraction:
    """
    δ/μ；verify=True 时走完整的 δ 分裂检查，否则只用一次双分次

    Raises:
        BiextensionError: δ 不与 μ 成比例
    """
    if verify:
        delta, _ = delta_splitting(inst)
    else:
        delta = splitting_operator_from_bigrading(bigrading_of(inst.F, inst.W))
    c = _ratio_to_mu(delta, mu)
    return c.re if isinstance(c, ExactComplex) else c.real


def delta_from_gradings(inst: GPMHSInstance) -> Operator:
    """短长度下的闭式 δ = (Y − Ȳ)/(4i)"""
    Y = grading_Y(bigrading_of(inst.F, inst.W))
    scalars = inst.field
    four_i = scalars.i * scalars.coerce(4)
    return (Y - Y.conjugate()).scale(scalars.one / four_i)


def biext_metric_value(binst: BiextensionInstance) -> float:
    """
    |[F]| = e^{−2π·δ/μ}

    Raises:
        BiextensionError: δ 不与 μ 成比例
    """
    mu = binst.mu or build_mu(binst)
    c = delta_over_mu(binst.instance, mu)
    value = math.exp(-2 * math.pi * float(c))
    logger.info(f"双扩张度量: δ/μ = {float(c):.12g}，|[F]| = {value:.12g}")
    return value


def central_action(binst: BiextensionInstance, t: complex) -> BiextensionInstance:
    """t·F = e^{(log t / 2πi)·μ}·F，系数按浮点值精确化"""
    if t == 0:
        raise BiextensionError("t 必须非零", "central_action")
    mu = binst.mu or build_mu(binst)
    a = exactify(cmath.log(complex(t)) / (2j * math.pi))
    g = Operator.identity(mu.n, mu.field) + mu.scale(a)
    moved = binst.instance.with_filtration(binst.instance.F.apply(g))
    return BiextensionInstance(moved, binst.one, binst.one_dual, mu)


# ---------------------------------------------------------------------------
# φ 的局部可积性
# ---------------------------------------------------------------------------


def _phi_direct(spec: NilpotentOrbitSpec, lnf, mu: Operator, z) -> float:
    """φ = 2π·δ(F(z))/μ"""
    F = lnf_eval(spec, lnf, z).filtration
    ratio = delta_over_mu(spec.instance.with_filtration(F), mu, verify=False)
    return 2 * math.pi * float(ratio)


def _phi_compact(
    spec: NilpotentOrbitSpec, lnf, mu: Operator, sl2: SL2Data, z
) -> Tuple[float, float]:
    """φ = −log|s|·δ(t^{−1}(y) e^{−N(x)} F(z))/μ，返回 (φ, δ/μ)"""
    value = lnf_eval(spec, lnf, z)
    g = spec.N_of([ExactComplex(v.re) for v in value.z]).scale(-1).exp()
    t = grading_t(sl2, [v.im for v in value.z])
    if not t.field.exact:
        t = exactify_operator(t)
    moved = value.filtration.apply(t.inverse() @ g)
    moved_inst = spec.instance.with_filtration(moved)
    ratio = float(delta_over_mu(moved_inst, mu, verify=False))
    s = complex(value.s[0])
    return -math.log(abs(s)) * ratio, ratio


def _point(r: float, theta: float) -> List[ExactComplex]:
    x = exactify(theta / (2 * math.pi)).re
    y = exactify(-math.log(r) / (2 * math.pi)).re
    return [ExactComplex(x, y)]


def phi_integral(
    spec: NilpotentOrbitSpec,
    lnf,
    mu: Operator,
    radius: float,
    n_r: int,
    n_theta: int,
) -> float:
    """∫_{|s|<R} |φ| dA 的中点 Riemann 和（极坐标 r dr dθ）"""
    h_r = radius / n_r
    h_theta = 2 * math.pi / n_theta
    total = 0.0
    for a in range(n_r):
        r = (a + 0.5) * h_r
        for b in range(n_theta):
            theta = (b + 0.5) * h_theta
            total += abs(_phi_direct(spec, lnf, mu, _point(r, theta))) * r
    return total * h_r * h_theta


def phi_scan(
    spec: NilpotentOrbitSpec,
    lnf: Optional[LocalNormalForm],
    mu: Operator,
    sl2: SL2Data,
    moduli: Optional[Sequence[float]] = None,
    radii: Sequence[float] = (1e-1, 1e-2, 1e-3),
    n_r: Tuple[int, int] = (24, 48),
    n_theta: Tuple[int, int] = (4, 8),
    window: float = 0.25,
) -> ScanReport:
    """
    φ/(−log|s|) 在 |s| ∈ [1e−8, 1e−1] 上的有界性，
    以及 ∫|φ| 在收缩圆盘上的嵌套 Riemann 和

    通过条件：两种 φ 表达式一致、比值有界（对 log(−log|s|) 的斜率不超过 window）、
    相邻加密的积分相差不超过 1%、积分随半径单调递减

    Raises:
        BiextensionError: 非单变量
    """
    if spec.rank != 1:
        raise BiextensionError("φ 扫描只支持单变量", "phi_rank")
    moduli = list(moduli or np.logspace(-1.0, -8.0, 15))
    records = []
    ratios = []
    consistent = True
    for r in moduli:
        z = _point(float(r), 0.0)
        direct = _phi_direct(spec, lnf, mu, z)
        compact, ratio = _phi_compact(spec, lnf, mu, sl2, z)
        agree = abs(direct - compact) <= 1e-9 * max(1.0, abs(direct))
        consistent = consistent and agree
        ratios.append(ratio)
        records.append(
            {
                "modulus": float(r),
                "phi": direct,
                "phi_compact": compact,
                "ratio": ratio,
                "agree": agree,
            }
        )

    half = len(ratios) // 2
    sizes = [abs(x) for x in ratios]
    early = max(sizes[:half], default=0.0)
    bounded = max(sizes[half:], default=0.0) <= 1.25 * early + 1e-9
    slope = 0.0
    if len(moduli) >= 2 and max(sizes) > 0:
        slope = float(linregress([math.log(-math.log(r)) for r in moduli], sizes).slope)
    bounded = bounded and slope <= window

    integrals: List[Dict] = []
    converged = True
    for R in radii:
        coarse = phi_integral(spec, lnf, mu, R, n_r[0], n_theta[0])
        fine = phi_integral(spec, lnf, mu, R, n_r[1], n_theta[1])
        ok = abs(fine - coarse) <= 0.01 * abs(fine) + 1e-300
        converged = converged and ok
        integrals.append({"radius": R, "coarse": coarse, "fine": fine, "agree": ok})
    fines = [item["fine"] for item in integrals]
    monotone = all(b <= a for a, b in zip(fines, fines[1:]))

    report = ScanReport("phi-scan", "exact", records)
    report.fit = {
        "ratio_slope": slope,
        "bounded": bounded,
        "consistent": consistent,
        "integrals": integrals,
        "converged": converged,
        "monotone": monotone,
    }
    report.passed = bounded and consistent and converged and monotone
    logger.info(f"φ 扫描: 有界 {bounded}，收敛 {converged}，单调 {monotone}")
    return report
