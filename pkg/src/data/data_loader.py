"""Data loader: JSON files, configuration and logging for the f-convolution toolkit."""

import json
import logging
import os
from typing import Any, Dict, List, Optional

from classes.base import InputFormatError, Side
from classes.domain import FunctionTable, TensorFunction, bitwise_table
from classes.partition import CyclicPartition

DEFAULT_CONFIG: Dict[str, Any] = {
    "jobs": 1,
    "zero_skip": True,
    "min_prime": 2 ** 20,
    "direct_dft_max": 64,
    "integer_capacity": 2 ** 63 - 1,
    "swap_policy": "auto",
    "row_pairing": "consecutive",
    "padding_index": 0,
    "matmul_block": 64,
    "pair_limit": 10 ** 8,
    "log_file": "fconv_log.txt",
    "log_level": "INFO",
}

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
CONFIG_PATH = os.path.join(PROJECT_ROOT, "config.json")
DATA_DIR = os.path.join(PROJECT_ROOT, "data")

LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s | %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def read_json(path: str) -> Any:
    """Parse a JSON file; syntax errors name the file, line and column."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputFormatError(f"{path}: file not found") from None
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def write_json(path: str, data: Any):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def _with_file(path: str, error: InputFormatError) -> InputFormatError:
    return InputFormatError(f"{path}: {error}")


def load_function_table(path: str) -> FunctionTable:
    data = read_json(path)
    try:
        return FunctionTable.from_dict(data)
    except InputFormatError as e:
        raise _with_file(path, e) from None


def load_tensor(path: str, f: FunctionTable, expected: Optional[Side] = None) -> TensorFunction:
    """Read a tensor whose 'domain' names one of f's domains (L, R or T)."""
    domains = {"L": f.dom_l, "R": f.dom_r, "T": f.dom_t}
    data = read_json(path)
    try:
        tensor = TensorFunction.from_dict(data, domains)
    except InputFormatError as e:
        raise _with_file(path, e) from None
    if expected is not None and tensor.side is not expected:
        raise InputFormatError(f"{path}: field 'domain' must be '{expected.value}', got '{tensor.side.value}'")
    return tensor


def load_partition(path: str, f: FunctionTable) -> CyclicPartition:
    data = read_json(path)
    try:
        return CyclicPartition.from_dict(data, f)
    except InputFormatError as e:
        raise _with_file(path, e) from None


def load_config(path: str = CONFIG_PATH) -> Dict[str, Any]:
    """Defaults overlaid with every known key found in the file's sections.

    A relative log_file is placed next to the configuration file, so runs
    from any working directory share one log.
    """
    config = dict(DEFAULT_CONFIG)
    if os.path.exists(path):
        data = read_json(path)
        if not isinstance(data, dict):
            raise InputFormatError(f"{path}: configuration must be a JSON object")
        for key, value in data.items():
            section = value if isinstance(value, dict) else {key: value}
            for name, setting in section.items():
                if name in DEFAULT_CONFIG:
                    config[name] = setting
    if not os.path.isabs(config["log_file"]):
        config["log_file"] = os.path.join(os.path.dirname(os.path.abspath(path)), config["log_file"])
    return config


def configure_logging(config: Dict[str, Any], fresh: bool = True) -> logging.Logger:
    """Send all toolkit logging to the configured log file, truncated on each run."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_fconv", False):
            root.removeHandler(handler)
            handler.close()
    handler = logging.FileHandler(config["log_file"], mode="w" if fresh else "a", encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
    handler._fconv = True
    root.addHandler(handler)
    root.setLevel(getattr(logging, str(config.get("log_level", "INFO")).upper(), logging.INFO))
    return root


class DataProvider:
    """Input files by path, or bundled fixtures by name ("xor", "xor_g.json")."""

    def __init__(self, data_dir: str = DATA_DIR):
        self.data_dir = data_dir
        self._ensure_data_files_exist()

    def _ensure_data_files_exist(self):
        """Ensure the basic function tables exist, create them if missing."""
        os.makedirs(self.data_dir, exist_ok=True)
        defaults = {
            "xor.json": bitwise_table(2, "xor").to_dict(),
            "and.json": bitwise_table(2, "and").to_dict(),
        }
        for filename, data in defaults.items():
            filepath = os.path.join(self.data_dir, filename)
            if not os.path.exists(filepath):
                write_json(filepath, data)

    def path(self, name: str) -> str:
        """An existing file as given, else the fixture of that name, else the name unchanged."""
        if os.path.exists(name):
            return name
        fixture = os.path.join(self.data_dir, name if name.endswith(".json") else f"{name}.json")
        return fixture if os.path.exists(fixture) else name

    def list_fixtures(self) -> List[str]:
        return sorted(name[:-5] for name in os.listdir(self.data_dir) if name.endswith(".json"))

    def get_function(self, name: str) -> FunctionTable:
        return load_function_table(self.path(name))

    def get_partition(self, name: str, f: FunctionTable) -> CyclicPartition:
        return load_partition(self.path(name), f)

    def get_tensor(self, name: str, f: FunctionTable, expected: Optional[Side] = None) -> TensorFunction:
        return load_tensor(self.path(name), f, expected)
