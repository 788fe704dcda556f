"""
实例文件读写
JSON 实例文件（schema 1）与精确类型之间的转换，以及网格、点、路径参数的解析
"""

import itertools
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .biext import BiextensionInstance
from .exceptions import InstanceFormatError
from .linear_core import DecFiltration, ExactComplex, IncFiltration, Operator, Subspace
from .mhs import GPMHSInstance, Polarization, hodge_numbers_of
from .orbits.evaluation import LocalNormalForm, NilpotentOrbitSpec, SL2Data

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

Matrix = List[List[Any]]


class PolarizationModel(BaseModel):
    """Gr^W_w 的提升基与双线性型矩阵"""

    lift_basis: List[List[Any]]
    form: Matrix


class SL2Model(BaseModel):
    H: List[Matrix]
    Y0: Matrix


class BiextensionModel(BaseModel):
    one: List[Any]
    one_dual: List[Any]


class InstanceDocument(BaseModel):
    """实例文件；全部标量写成 "a/b" 或 {"re": "a/b", "im": "c/d"}"""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    name: str = ""
    dimension: int = Field(gt=0)
    weight: Optional[int] = None  # 纯情形的权
    weight_filtration: Dict[str, List[List[Any]]]
    hodge_filtration: Dict[str, List[List[Any]]]
    hodge_numbers: Dict[str, int] = Field(default_factory=dict)  # "p,q" -> h^{p,q}
    polarizations: Dict[str, PolarizationModel] = Field(default_factory=dict)
    nilpotents: List[Matrix] = Field(default_factory=list)
    gamma: Dict[str, Matrix] = Field(default_factory=dict)  # "K_1,...,K_r" -> Γ_K
    sl2: Optional[SL2Model] = None
    biextension: Optional[BiextensionModel] = None

    @field_validator("schema_version")
    @classmethod
    def check_schema(cls, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise ValueError(f"不支持的 schema 版本 {value}")
        return value


@dataclass
class LoadedInstance:
    """解析后的精确数据"""

    document: InstanceDocument
    instance: GPMHSInstance
    nilpotents: List[Operator]
    gamma: Optional[LocalNormalForm] = None
    sl2: Optional[SL2Data] = None
    biextension: Optional[BiextensionInstance] = None
    weight: Optional[int] = None

    def orbit_spec(self) -> NilpotentOrbitSpec:
        """
        Raises:
            InstanceFormatError: 实例没有给出 nilpotents
        """
        if not self.nilpotents:
            raise InstanceFormatError("该命令需要实例给出 nilpotents", "nilpotents")
        return NilpotentOrbitSpec(self.nilpotents, self.instance, self.weight)

    def require_sl2(self) -> SL2Data:
        if self.sl2 is None:
            raise InstanceFormatError("该命令需要实例给出 sl2 数据", "sl2")
        return self.sl2

    def require_biextension(self) -> BiextensionInstance:
        if self.biextension is None:
            raise InstanceFormatError("该命令需要实例给出 biextension", "biextension")
        return self.biextension


# ---------------------------------------------------------------------------
# 解析
# ---------------------------------------------------------------------------


def _scalar(value) -> ExactComplex:
    if isinstance(value, float):
        raise InstanceFormatError(
            f"实例文件中的标量必须写成有理数字符串: {value!r}", "scalar"
        )
    try:
        return ExactComplex.of(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise InstanceFormatError(f"无法解析标量 {value!r}", "scalar") from e


def _vector(values: Sequence, n: int) -> List[ExactComplex]:
    if len(values) != n:
        raise InstanceFormatError(
            f"向量长度 {len(values)} != 维数 {n}", "vector_length"
        )
    return [_scalar(v) for v in values]


def _matrix(rows: Matrix, n: int) -> Operator:
    if len(rows) != n:
        raise InstanceFormatError(f"矩阵行数 {len(rows)} != 维数 {n}", "matrix_shape")
    return Operator([_vector(row, n) for row in rows])


def _int_key(key: str) -> int:
    try:
        return int(key)
    except ValueError as e:
        raise InstanceFormatError(f"滤链指标必须是整数: {key!r}", "index") from e


def _tuple_key(key: str) -> tuple:
    try:
        return tuple(int(part) for part in key.split(","))
    except ValueError as e:
        raise InstanceFormatError(f"无法解析指标 {key!r}", "index") from e


def parse_document(doc: InstanceDocument) -> LoadedInstance:
    """
    把已通过 schema 校验的文档转为精确类型

    Raises:
        InstanceFormatError: 形状或标量错误
        FiltrationError: 滤链不嵌套或不穷尽
    """
    n = doc.dimension

    def steps(raw):
        return {
            _int_key(k): Subspace(n, [_vector(v, n) for v in vs])
            for k, vs in raw.items()
        }

    W = IncFiltration(steps(doc.weight_filtration), n)
    F = DecFiltration(steps(doc.hodge_filtration), n)
    polarizations = {
        _int_key(w): Polarization(
            [_vector(v, n) for v in pol.lift_basis],
            [[_scalar(x) for x in row] for row in pol.form],
        )
        for w, pol in doc.polarizations.items()
    }
    if doc.hodge_numbers:
        numbers = {_tuple_key(k): v for k, v in doc.hodge_numbers.items()}
    else:
        numbers = hodge_numbers_of(F, W)
    instance = GPMHSInstance(W, F, numbers, polarizations, doc.name)

    nilpotents = [_matrix(m, n) for m in doc.nilpotents]
    gamma = None
    if doc.gamma:
        terms = {_tuple_key(k): _matrix(m, n) for k, m in doc.gamma.items()}
        if any(len(K) != len(nilpotents) for K in terms):
            raise InstanceFormatError("Γ 的单项式长度与变量数不符", "gamma_rank")
        gamma = LocalNormalForm(terms, len(nilpotents), n)
    sl2 = None
    if doc.sl2 is not None:
        sl2 = SL2Data([_matrix(h, n) for h in doc.sl2.H], _matrix(doc.sl2.Y0, n))
    biext = None
    if doc.biextension is not None:
        biext = BiextensionInstance(
            instance,
            _vector(doc.biextension.one, n),
            _vector(doc.biextension.one_dual, n),
        )
    logger.debug(
        f"实例 {doc.name or '(未命名)'}: 维数 {n}，{len(nilpotents)} 个幂零算子"
    )
    return LoadedInstance(doc, instance, nilpotents, gamma, sl2, biext, doc.weight)


def load_instance_data(data: Dict) -> LoadedInstance:
    """
    Raises:
        InstanceFormatError: schema 校验失败
    """
    try:
        doc = InstanceDocument.model_validate(data)
    except ValidationError as e:
        raise InstanceFormatError(
            f"实例文件不符合 schema: {e.errors()[0]['msg']}", "schema"
        ) from e
    return parse_document(doc)


def load_instance(path) -> LoadedInstance:
    """
    读取 JSON 实例文件

    Raises:
        InstanceFormatError: 文件不存在、不是 JSON 或不符合 schema
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise InstanceFormatError(f"找不到实例文件 {path}", "input") from e
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"实例文件不是合法 JSON: {e}", "json") from e
    logger.info(f"加载实例文件 {path}")
    return load_instance_data(data)


# ---------------------------------------------------------------------------
# 序列化
# ---------------------------------------------------------------------------


def dump_instance(
    instance: GPMHSInstance,
    nilpotents: Sequence[Operator] = (),
    gamma: Optional[LocalNormalForm] = None,
    sl2: Optional[SL2Data] = None,
    biextension: Optional[BiextensionInstance] = None,
    weight: Optional[int] = None,
) -> Dict:
    """规范形式的实例文档（可再次由 load_instance_data 读回）"""
    data: Dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "name": instance.name,
        "dimension": instance.dim,
        "weight_filtration": instance.W.to_json(),
        "hodge_filtration": instance.F.to_json(),
        "hodge_numbers": {
            f"{p},{q}": h for (p, q), h in sorted(instance.hodge_numbers.items())
        },
        "polarizations": {
            str(w): {
                "lift_basis": [
                    [ExactComplex.of(x).to_json() for x in v] for v in pol.lift
                ],
                "form": [
                    [ExactComplex.of(x).to_json() for x in row] for row in pol.form
                ],
            }
            for w, pol in sorted(instance.polarizations.items())
        },
        "nilpotents": [N.to_json() for N in nilpotents],
    }
    if weight is not None:
        data["weight"] = weight
    if gamma is not None and gamma.terms:
        data["gamma"] = gamma.to_json()
    if sl2 is not None:
        data["sl2"] = sl2.to_json()
    if biextension is not None:
        data["biextension"] = {
            "one": [ExactComplex.of(x).to_json() for x in biextension.one],
            "one_dual": [ExactComplex.of(x).to_json() for x in biextension.one_dual],
        }
    return data


def dump_loaded(loaded: LoadedInstance) -> Dict:
    return dump_instance(
        loaded.instance,
        loaded.nilpotents,
        loaded.gamma,
        loaded.sl2,
        loaded.biextension,
        loaded.weight,
    )


# ---------------------------------------------------------------------------
# 网格与点
# ---------------------------------------------------------------------------


def _rational(value: float) -> Fraction:
    return Fraction(value).limit_denominator(1000)


def parse_grid(
    spec: str, rank: int, x: Optional[Sequence] = None, log_spaced: bool = True
) -> List[List[ExactComplex]]:
    """
    解析 "y1=5:40:8,y2=2:10:5"（start:stop:count，默认对数均匀）为网格点的笛卡尔积

    取值按 limit_denominator(1000) 精确化；不在 I' = {y_1 ≥ … ≥ y_r ≥ 1} 中的点被丢弃

    Raises:
        InstanceFormatError: 语法错误或变量缺失
    """
    axes: Dict[int, List[Fraction]] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            name, rng = part.split("=")
            index = int(name.strip().lstrip("y")) - 1
            start, stop, count = rng.split(":")
            start, stop, count = float(start), float(stop), int(count)
        except ValueError as e:
            raise InstanceFormatError(
                f"无法解析网格 {part!r}，应为 yj=start:stop:count", "grid"
            ) from e
        if count < 1 or start <= 0 or stop <= 0:
            raise InstanceFormatError(f"网格 {part!r} 的取值必须为正", "grid")
        spacing = np.geomspace if log_spaced else np.linspace
        values = spacing(start, stop, count)
        axes[index] = [_rational(float(v)) for v in values]
    if sorted(axes) != list(range(rank)):
        raise InstanceFormatError(f"网格必须给出 y1..y{rank}", "grid_rank")
    x = [ExactComplex.of(v).re for v in (x or [0] * rank)]
    points = []
    dropped = 0
    for ys in itertools.product(*(axes[j] for j in range(rank))):
        if ys[-1] < 1 or any(a < b for a, b in zip(ys, ys[1:])):
            dropped += 1
            continue
        points.append([ExactComplex(x[j], ys[j]) for j in range(rank)])
    if dropped:
        logger.warning(f"网格中 {dropped} 个点不在 I' 中，已丢弃")
    return points


def parse_point(text: str) -> List[ExactComplex]:
    """ "x1:y1,x2:y2"（有理数），例如 "1/2:3,0:2" """
    point = []
    for part in text.split(","):
        try:
            re_part, im_part = part.split(":")
            point.append(
                ExactComplex(Fraction(re_part.strip()), Fraction(im_part.strip()))
            )
        except (ValueError, ZeroDivisionError) as e:
            raise InstanceFormatError(f"无法解析点 {part!r}，应为 x:y", "point") from e
    return point


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as e:
        raise InstanceFormatError(f"无法解析整数列表 {text!r}", "int_list") from e


def parse_rational_list(text: str) -> List[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise InstanceFormatError(
            f"无法解析有理数列表 {text!r}", "rational_list"
        ) from e
