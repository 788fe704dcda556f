"""
渐近混合 Hodge 理论计算工具
精确有理算术下的混合 Hodge 结构、幂零轨道渐近与约化极限
"""

__version__ = "0.1.0"

from .config import Config
from .exceptions import HodgeError

__all__ = ["Config", "HodgeError", "__version__"]
