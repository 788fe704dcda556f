"""
示例实例与随机生成器
随附的实例文档（instances/*.json 的来源）以及按种子生成的随机分次极化 MHS、局部正规形
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .instance_io import load_instance_data
from .linear_core import DecFiltration, ExactComplex, IncFiltration, Operator, Subspace
from .mhs import GPMHSInstance, Polarization, deligne_bigrading
from .orbits.evaluation import LocalNormalForm, NilpotentOrbitSpec
from .reports import to_json_text, write_atomic

logger = logging.getLogger(__name__)


def _e(i: int, n: int) -> List[str]:
    return ["1" if j == i else "0" for j in range(n)]


def _basis(n: int, indices) -> List[List[str]]:
    return [_e(i, n) for i in indices]


def _unit_matrix(n: int, entries: Dict[Tuple[int, int], str]) -> List[List[str]]:
    return [[entries.get((i, j), "0") for j in range(n)] for i in range(n)]


# 二维辛形式 [[0, 1], [−1, 0]]
SYMPLECTIC = [["0", "1"], ["-1", "0"]]


def _diag(values) -> List[List[str]]:
    n = len(values)
    return [[str(values[i]) if i == j else "0" for j in range(n)] for i in range(n)]


# 混合约化极限不被 N 保持的例子
NON_INV = {
    "schema": 1,
    "name": "non_inv",
    "dimension": 4,
    "weight_filtration": {"-2": _basis(4, [1, 2, 3]), "0": _basis(4, range(4))},
    "hodge_filtration": {
        "-2": _basis(4, range(4)),
        "-1": _basis(4, [0, 1, 2]),
        "0": _basis(4, [0, 1]),
    },
    "hodge_numbers": {"0,0": 1, "0,-2": 1, "-1,-1": 1, "-2,0": 1},
    "polarizations": {
        "0": {"lift_basis": [_e(0, 4)], "form": [["1"]]},
        "-2": {
            "lift_basis": _basis(4, [1, 2, 3]),
            "form": [["0", "0", "1"], ["0", "-1", "0"], ["1", "0", "0"]],
        },
    },
    "nilpotents": [_unit_matrix(4, {(2, 0): "1", (2, 1): "1", (3, 2): "1"})],
    "sl2": {"H": [_diag([0, 2, 0, -2])], "Y0": _diag([0, -2, -2, -2])},
}

# 极限依赖于趋向无穷的路径的两变量例子
NON_CONV = {
    "schema": 1,
    "name": "non_conv",
    "dimension": 3,
    "weight_filtration": {"-1": _basis(3, [1, 2]), "0": _basis(3, range(3))},
    "hodge_filtration": {"-1": _basis(3, range(3)), "0": _basis(3, [0, 1])},
    "hodge_numbers": {"0,0": 1, "0,-1": 1, "-1,0": 1},
    "polarizations": {
        "0": {"lift_basis": [_e(0, 3)], "form": [["1"]]},
        "-1": {"lift_basis": _basis(3, [1, 2]), "form": SYMPLECTIC},
    },
    "nilpotents": [
        _unit_matrix(3, {(2, 0): "1", (2, 1): "1"}),
        _unit_matrix(3, {(2, 0): "-1", (2, 1): "1"}),
    ],
}

# 权 1、维数 2 的退化，Γ(s) = s·N
WEIGHT_ONE = {
    "schema": 1,
    "name": "weight_one",
    "dimension": 2,
    "weight": 1,
    "weight_filtration": {"1": _basis(2, range(2))},
    "hodge_filtration": {"0": _basis(2, range(2)), "1": [_e(0, 2)]},
    "hodge_numbers": {"1,0": 1, "0,1": 1},
    "polarizations": {
        "1": {"lift_basis": _basis(2, range(2)), "form": SYMPLECTIC},
    },
    "nilpotents": [_unit_matrix(2, {(1, 0): "1"})],
    "gamma": {"1": _unit_matrix(2, {(1, 0): "1"})},
}

# 两变量幂幺型，Γ = (s_1/2 + s_2)·N
TWO_VAR_DEMO = {
    "schema": 1,
    "name": "two_var_demo",
    "dimension": 2,
    "weight_filtration": {"-2": [_e(1, 2)], "0": _basis(2, range(2))},
    "hodge_filtration": {"-1": _basis(2, range(2)), "0": [_e(0, 2)]},
    "hodge_numbers": {"0,0": 1, "-1,-1": 1},
    "polarizations": {
        "0": {"lift_basis": [_e(0, 2)], "form": [["1"]]},
        "-2": {"lift_basis": [_e(1, 2)], "form": [["1"]]},
    },
    "nilpotents": [_unit_matrix(2, {(1, 0): "1"}), _unit_matrix(2, {(1, 0): "1"})],
    "gamma": {
        "1,0": _unit_matrix(2, {(1, 0): "1/2"}),
        "0,1": _unit_matrix(2, {(1, 0): "1"}),
    },
}

# 双扩张型幂零轨道，N = E_21 + E_30
BIEXT = {
    "schema": 1,
    "name": "biext",
    "dimension": 4,
    "weight_filtration": {
        "-2": [_e(3, 4)],
        "-1": _basis(4, [1, 2, 3]),
        "0": _basis(4, range(4)),
    },
    "hodge_filtration": {"-1": _basis(4, range(4)), "0": _basis(4, [0, 1])},
    "hodge_numbers": {"0,0": 1, "0,-1": 1, "-1,0": 1, "-1,-1": 1},
    "polarizations": {
        "0": {"lift_basis": [_e(0, 4)], "form": [["1"]]},
        "-1": {"lift_basis": _basis(4, [1, 2]), "form": SYMPLECTIC},
        "-2": {"lift_basis": [_e(3, 4)], "form": [["1"]]},
    },
    "nilpotents": [_unit_matrix(4, {(2, 1): "1", (3, 0): "1"})],
    "gamma": {"1": _unit_matrix(4, {(3, 0): "1"})},
    "sl2": {"H": [_diag([0, 1, -1, 0])], "Y0": _diag([0, -1, -1, -2])},
    "biextension": {"one": _e(0, 4), "one_dual": _e(3, 4)},
}

# 静态双扩张：F^0 = span(e0 + iλe3, e1 + ie2)，λ = 1/2
BIEXT_STATIC = {
    "schema": 1,
    "name": "biext_static",
    "dimension": 4,
    "weight_filtration": BIEXT["weight_filtration"],
    "hodge_filtration": {
        "-1": _basis(4, range(4)),
        "0": [
            ["1", "0", "0", {"re": "0", "im": "1/2"}],
            ["0", "1", {"re": "0", "im": "1"}, "0"],
        ],
    },
    "hodge_numbers": BIEXT["hodge_numbers"],
    "polarizations": BIEXT["polarizations"],
    "biextension": {"one": _e(0, 4), "one_dual": _e(3, 4)},
}

# 权 −1 的偶型锥，N² = 0
SATAKE_EVEN = {
    "schema": 1,
    "name": "satake_even",
    "dimension": 2,
    "weight": -1,
    "weight_filtration": {"-1": _basis(2, range(2))},
    "hodge_filtration": {"-1": _basis(2, range(2)), "0": [_e(0, 2)]},
    "hodge_numbers": {"0,-1": 1, "-1,0": 1},
    "polarizations": {
        "-1": {"lift_basis": _basis(2, range(2)), "form": SYMPLECTIC},
    },
    "nilpotents": [_unit_matrix(2, {(1, 0): "1"})],
}

SHIPPED_INSTANCES = {
    doc["name"]: doc
    for doc in (
        NON_INV,
        NON_CONV,
        WEIGHT_ONE,
        TWO_VAR_DEMO,
        BIEXT,
        BIEXT_STATIC,
        SATAKE_EVEN,
    )
}


def write_shipped_instances(directory) -> List[Path]:
    """把随附实例写成 <directory>/<name>.json"""
    directory = Path(directory)
    written = []
    for name, doc in SHIPPED_INSTANCES.items():
        path = directory / f"{name}.json"
        write_atomic(path, to_json_text(doc))
        written.append(path)
    logger.info(f"写出 {len(written)} 个示例实例到 {directory}")
    return written


# ---------------------------------------------------------------------------
# 随机生成器
# ---------------------------------------------------------------------------


@dataclass
class HodgeBlock:
    """一个 Hodge 块：p = q 时为一个实向量，否则为共轭对 a ± ib"""

    p: int
    q: int

    @property
    def size(self) -> int:
        return 1 if self.p == self.q else 2


def _random_blocks(
    rng: random.Random, max_dim: int, max_weights: int
) -> List[Tuple[int, List[HodgeBlock]]]:
    count = rng.randint(1, max_weights)
    weights = sorted(rng.sample(range(-4, 2), count))
    layout = []
    used = 0
    for w in weights:
        blocks = []
        for _ in range(rng.randint(1, 2)):
            if w % 2 == 0 and rng.random() < 0.5:
                block = HodgeBlock(w // 2, w // 2)
            else:
                p = (w + 1) // 2 + (w % 2 == 0) + rng.randint(0, 1)
                block = HodgeBlock(p, w - p)
            if used + block.size > max_dim:
                break
            blocks.append(block)
            used += block.size
        if not blocks:
            break
        layout.append((w, blocks))
    return layout


def _block_form(block: HodgeBlock) -> List[List[int]]:
    """块上使 i^{p−q}Q(v, v̄) > 0 的双线性型"""
    p, q = block.p, block.q
    if p == q:
        return [[1]]
    if (p + q) % 2:
        c = (-1) ** ((p - q + 1) // 2 + 1)
        return [[0, c], [-c, 0]]
    d = (-1) ** ((p - q) // 2)
    return [[d, 0], [0, d]]


def random_split_instance(
    seed: int, max_dim: int = 8, max_weights: int = 4
) -> GPMHSInstance:
    """
    ℝ 分裂的随机 GPMHS：标准基按权从低到高排列，I^{p,q} 由实向量或 a ± ib 张成

    Args:
        seed: 随机种子
        max_dim: 维数上限
        max_weights: 不同权的个数上限
    """
    rng = random.Random(seed)
    layout = _random_blocks(rng, max_dim, max_weights)
    n = sum(b.size for _, blocks in layout for b in blocks)
    pieces: List[Tuple[Tuple[int, int], List[ExactComplex]]] = []
    W_steps: Dict[int, List[List]] = {}
    polarizations: Dict[int, Polarization] = {}
    numbers: Dict[Tuple[int, int], int] = {}
    index = 0
    so_far: List[List] = []
    for w, blocks in layout:
        lift = []
        form_blocks = []
        for block in blocks:
            if block.size == 1:
                v = [ExactComplex(1 if j == index else 0) for j in range(n)]
                pieces.append(((block.p, block.q), v))
                numbers[(block.p, block.q)] = numbers.get((block.p, block.q), 0) + 1
            else:
                v = [
                    ExactComplex(1 if j == index else 0, 1 if j == index + 1 else 0)
                    for j in range(n)
                ]
                pieces.append(((block.p, block.q), v))
                pieces.append(((block.q, block.p), [x.conjugate() for x in v]))
                for t in ((block.p, block.q), (block.q, block.p)):
                    numbers[t] = numbers.get(t, 0) + 1
            for k in range(block.size):
                lift.append(
                    [ExactComplex(1 if j == index + k else 0) for j in range(n)]
                )
            form_blocks.append(_block_form(block))
            index += block.size
        m = len(lift)
        form = [[ExactComplex(0)] * m for _ in range(m)]
        offset = 0
        for block_form in form_blocks:
            for a, row in enumerate(block_form):
                for b, value in enumerate(row):
                    form[offset + a][offset + b] = ExactComplex(value)
            offset += len(block_form)
        polarizations[w] = Polarization(lift, form)
        so_far = so_far + lift
        W_steps[w] = list(so_far)

    W = IncFiltration({w: Subspace(n, vs) for w, vs in W_steps.items()}, n)
    levels = sorted({t[0] for t, _ in pieces})
    F_steps = {
        p: Subspace(n, [v for t, v in pieces if t[0] >= p])
        for p in range(levels[0], levels[-1] + 1)
    }
    F = DecFiltration(F_steps, n)
    return GPMHSInstance(W, F, numbers, polarizations, f"random_{seed}")


def _lambda_operator(inst: GPMHSInstance, rng: random.Random) -> Operator:
    """Λ^{-1,-1} 中的随机元：在双分次适配基下只连接 (p,q) → (a,b)，a < p 且 b < q"""
    b = deligne_bigrading(inst)
    n = inst.dim
    rows = [[ExactComplex(0)] * n for _ in range(n)]
    for i, (a, c) in enumerate(b.labels):
        for j, (p, q) in enumerate(b.labels):
            if a < p and c < q and rng.random() < 0.7:
                rows[i][j] = ExactComplex(rng.randint(-2, 2), rng.randint(-2, 2))
    return b.P @ Operator(rows) @ b.P_inv


def _random_unipotent(n: int, rng: random.Random) -> Operator:
    rows = [[ExactComplex(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.4:
                value = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                rows[i][j] = ExactComplex(value)
    return Operator(rows)


def random_instance(
    seed: int, max_dim: int = 8, max_weights: int = 4, split: bool = False
) -> GPMHSInstance:
    """
    随机 GPMHS：在 ℝ 分裂实例上作用 e^λ（λ ∈ Λ^{-1,-1}）再做实的基变换

    split=True 时跳过 e^λ，结果仍是 ℝ 分裂的
    """
    rng = random.Random(seed * 7919 + 1)
    inst = random_split_instance(seed, max_dim, max_weights)
    if not split:
        lam = _lambda_operator(inst, rng)
        inst = inst.with_filtration(inst.F.apply(lam.exp()))
    g = _random_unipotent(inst.dim, rng)
    if rng.random() < 0.5:
        g = g.transpose()
    return inst.transport(g)


def random_lnf_spec(seed: int) -> Tuple[NilpotentOrbitSpec, LocalNormalForm]:
    """权 1、维数 2 的轨道配随机系数 Γ(s) = c·s·N，c ≠ 0"""
    rng = random.Random(seed)
    loaded = load_instance_data(WEIGHT_ONE)
    c = Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 4))
    N = loaded.nilpotents[0]
    lnf = LocalNormalForm({(1,): N.scale(ExactComplex(c))}, 1, 2)
    return loaded.orbit_spec(), lnf


def shipped(name: str, overrides: Optional[Dict] = None) -> Dict:
    """随附实例文档的副本"""
    doc = dict(SHIPPED_INSTANCES[name])
    if overrides:
        doc.update(overrides)
    return doc
