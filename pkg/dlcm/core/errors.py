"""
Error hierarchy. Each error carries the process exit code the CLI reports.
"""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class DlcmError(Exception):
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UsageError(DlcmError):
    exit_code = EXIT_USAGE


class DataError(DlcmError):
    exit_code = EXIT_DATA


class ParseError(DataError):
    def __init__(self, detail: str, line_no: int = 0, path: str = ""):
        location = f"{path}:{line_no}: " if line_no else (f"{path}: " if path else "")
        super().__init__(location + detail)
        self.line_no = line_no
        self.path = path


class CoverageError(DataError):
    pass


class ConfigError(DataError):
    pass


class NumericError(DlcmError):
    exit_code = EXIT_NUMERIC


class TrainingError(NumericError):
    pass


class ContractError(DlcmError, ValueError):
    exit_code = EXIT_NUMERIC


class DimensionError(ContractError):
    pass


# Message constants
NON_SCALAR_ROOT = "backward requires a scalar-shaped root"
ROOT_NOT_ON_GRAPH = "backward root is not on the active graph"
NO_DISCORDANT_PAIRS = "no label-discordant document pair in the training data"
