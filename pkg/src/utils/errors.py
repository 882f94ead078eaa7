class DimensionError(ValueError):
    """ベクトルや行列の次元が一致しない"""


class RankError(ValueError):
    """階数の前提を満たさない"""


class VariableError(ValueError):
    """許可されていない変数を含む多項式"""


class SheafError(ValueError):
    """層データが前提（直線束など）を満たさない"""


class GeometryError(ValueError):
    """曲面データが前提を満たさない"""


class SlopeMismatchError(ValueError):
    """スロープが一致しないため判定基準が使えない"""


class ProfileError(ValueError):
    """交点数プロファイルの項目不足"""


class RangeError(ValueError):
    """不正なパラメータ範囲"""


class ConfigError(ValueError):
    """設定ファイルのエラー（行番号とフィールド付き）"""

    kind = "config"

    def __init__(self, message, line=None, field=None):
        self.message = message
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(field)
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class ConfigSyntaxError(ConfigError):
    kind = "syntax"


class UnknownKeyError(ConfigError):
    kind = "unknown-key"


class MissingKeyError(ConfigError):
    kind = "missing-key"


class UnresolvedNameError(ConfigError):
    kind = "unresolved-name"


class NonSymmetricMatrixError(ConfigError):
    kind = "non-symmetric"


class MalformedRationalError(ConfigError):
    kind = "malformed-rational"


class ConfigDimensionError(ConfigError):
    kind = "dimension"


class DuplicateKeyError(ConfigError):
    kind = "duplicate-key"
