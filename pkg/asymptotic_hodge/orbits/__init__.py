"""
幂零轨道子包
轨道与局部正规形的求值、sl2 三元组以及渐近扫描
"""

from .evaluation import (
    LocalNormalForm,
    NilpotentOrbitSpec,
    SL2Data,
    lnf_eval,
    orbit_eval,
)
from .scans import ScanReport
from .sl2 import SL2Triple, split_orbit_sl2

__all__ = [
    "LocalNormalForm",
    "NilpotentOrbitSpec",
    "SL2Data",
    "SL2Triple",
    "ScanReport",
    "lnf_eval",
    "orbit_eval",
    "split_orbit_sl2",
]
