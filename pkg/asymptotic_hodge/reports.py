"""
报告输出
JSON / CSV 序列化与原子写入；浮点数以 17 位有效数字输出
"""

import csv
import io
import json
import logging
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


def _format_float(x: float, precision: int) -> str:
    return format(x, f".{precision}g")


def _jsonable(value: Any) -> Any:
    if hasattr(value, "to_json"):
        return _jsonable(value.to_json())
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if hasattr(value, "item") and callable(value.item):
        return value.item()
    return value


def to_json_text(payload: Any) -> str:
    return json.dumps(_jsonable(payload), ensure_ascii=False, indent=2) + "\n"


def _cell(value: Any, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _format_float(value, precision)
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v, precision) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, ensure_ascii=False, sort_keys=True)
    return str(value)


def _flatten(data: Dict, prefix: str = "") -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, f"{name}."))
        else:
            out[name] = value
    return out


def to_csv_text(payload: Any, precision: int = 17) -> str:
    """
    ScanReport 逐点记录为一行，拟合参数以 "# key=value" 注释行写在表头之前；
    其它结果展开为 key,value 两列
    """
    data = _jsonable(payload)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    records: Optional[List[Dict]] = (
        data.get("records") if isinstance(data, dict) else None
    )
    if records:
        header = {k: v for k, v in data.items() if k != "records"}
        for key, value in _flatten(header).items():
            buffer.write(f"# {key}={_cell(value, precision)}\n")
        rows = [_flatten(r) for r in records]
        header: List[str] = []
        for row in rows:
            header.extend(k for k in row if k not in header)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row.get(k), precision) for k in header])
    else:
        writer.writerow(["key", "value"])
        flat = _flatten(data) if isinstance(data, dict) else {"value": data}
        for key, value in flat.items():
            writer.writerow([key, _cell(value, precision)])
    return buffer.getvalue()


def render(payload: Any, fmt: str = "json", precision: int = 17) -> str:
    if fmt == "csv":
        return to_csv_text(payload, precision)
    return to_json_text(payload)


def write_atomic(path, text: str) -> None:
    """写入同目录下的临时文件后 os.replace"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.info(f"报告已写入 {path}")


def write_report(
    payload: Any, path=None, fmt: str = "json", precision: int = 17
) -> str:
    """渲染报告；给出 path 时原子写入，返回渲染后的文本"""
    text = render(payload, fmt, precision)
    if path is not None:
        write_atomic(path, text)
    return text
