import dataclasses
import json
from enum import Enum

import sympy as sp
import yaml

from ..core.chern import NSClass
from ..core.exactcore import format_poly
from .config import Config
from .constants import OutputFormat


def to_plain(obj):
    """レポートを JSON/YAML 化できる素の値に変換（有理数は "p/q" 文字列）"""
    if isinstance(obj, sp.Poly):
        return format_poly(obj)
    if isinstance(obj, sp.Rational):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, NSClass):
        return [str(c) for c in obj.coords]
    if isinstance(obj, range):
        return f"{obj.start}..{obj.stop - 1}"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        data = {f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in getattr(obj, "report_properties", ()):
            data[name] = to_plain(getattr(obj, name))
        return data
    if isinstance(obj, dict):
        return {str(key): to_plain(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(item) for item in obj]
    return obj


def _text_lines(value, indent, lines):
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                _text_lines(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_scalar_text(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                _text_lines(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_scalar_text(item)}")
    else:
        lines.append(f"{pad}{_scalar_text(value)}")


def _scalar_text(value):
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (dict, list)):
        return "{}" if isinstance(value, dict) else "[]"
    return str(value)


def render_text(obj, title=None):
    lines = [title, "=" * len(title)] if title else []
    _text_lines(to_plain(obj), 0, lines)
    return "\n".join(lines)


def render_json(obj):
    return json.dumps(to_plain(obj), indent=Config.JSON_INDENT, ensure_ascii=False)


def render_yaml(obj):
    return yaml.safe_dump(to_plain(obj), sort_keys=False, allow_unicode=True)


def render(obj, output_format, title=None):
    """出力形式に応じてレポートを文字列化"""
    output_format = OutputFormat(output_format)
    if output_format == OutputFormat.JSON:
        return render_json(obj)
    if output_format == OutputFormat.YAML:
        return render_yaml(obj)
    return render_text(obj, title)
