import os

from dotenv import load_dotenv
from pydantic import BaseModel

# 加载环境变量
load_dotenv()


class Config(BaseModel):
    # 并行配置
    THREADS: int = int(os.getenv("THREADS", "4"))

    # 浮点数值配置
    FLOAT_TOLERANCE: float = float(os.getenv("FLOAT_TOLERANCE", "1e-9"))
    SIMPSON_PANELS: int = int(os.getenv("SIMPSON_PANELS", "64"))

    # 相对紧性扫描配置
    POSITIVITY_ETA: float = float(os.getenv("POSITIVITY_ETA", "1e-2"))

    # 拟合与收敛判定配置
    SCAN_SLOPE_WINDOW: float = float(os.getenv("SCAN_SLOPE_WINDOW", "0.25"))
    SEQUENCE_TOLERANCE: float = float(os.getenv("SEQUENCE_TOLERANCE", "1e-6"))
    DECAY_TOLERANCE: float = float(os.getenv("DECAY_TOLERANCE", "1e-8"))

    # 阈值二分配置
    ALPHA_BISECTION_STEPS: int = int(os.getenv("ALPHA_BISECTION_STEPS", "40"))

    # 报告配置
    REPORT_PRECISION: int = int(os.getenv("REPORT_PRECISION", "17"))

    # 日志配置
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    class Config:
        env_file = ".env"

    def get_scan_options(self):
        """获取扫描参数选项"""
        return {
            "threads": max(1, self.THREADS),
            "panels": max(64, self.SIMPSON_PANELS),
            "eta": self.POSITIVITY_ETA,
            "slope_window": self.SCAN_SLOPE_WINDOW,
            "sequence_tolerance": self.SEQUENCE_TOLERANCE,
            "decay_tolerance": self.DECAY_TOLERANCE,
        }
