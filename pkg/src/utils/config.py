class Config:
    """アプリケーション設定"""

    # Scan settings
    DEFAULT_WINDOW = 10

    # Ruled family defaults
    DEFAULT_GENUS = 3
    DEFAULT_M = 2
    DEFAULT_DEG_V = 0

    # Sweep settings
    DEFAULT_G_RANGE = (2, 6)
    DEFAULT_M_RANGE = (0, 6)
    DEFAULT_WORKERS = 1

    # Output settings
    DEFAULT_FORMAT = "text"
    CONFIG_SUFFIXES = (".yaml", ".yml")
    JSON_INDENT = 2

    # Logging
    LOG_FORMAT = "%(name)s:%(levelname)s:%(message)s"
