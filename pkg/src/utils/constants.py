from enum import Enum

# Polynomial generators, in storage order
VARIABLES = ("i", "r", "k")

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION_FAILED = 2


class Sign(Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    ZERO = "Zero"


class Relation(Enum):
    """部分層側から見た比較結果"""
    SUB_STRICTLY_SMALLER = "SubStrictlySmaller"
    EQUAL = "Equal"
    SUB_STRICTLY_LARGER = "SubStrictlyLarger"


class Level(Enum):
    """正規化ヒルベルト多項式の比較が決着した次数"""
    LEADING_K2 = "LeadingK2"
    LINEAR_K = "LinearK"
    CONSTANT_TERM = "ConstantTerm"
    IDENTICAL = "Identical"


class Verdict(Enum):
    K_UNSTABLE = "KUnstable"
    NOT_K_POLYSTABLE = "NotKPolystable"
    INCONCLUSIVE = "Inconclusive"


class Nonproduct(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class OutputFormat(Enum):
    TEXT = "text"
    JSON = "json"
    YAML = "yaml"
