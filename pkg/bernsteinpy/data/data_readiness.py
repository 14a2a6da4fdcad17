import json
import os
import re
import sys
from typing import Any, Dict, List, Optional

import yaml

from bernsteinpy.global_variable import BUILTIN_MODELS, CONFIG_KEYS, CONFIG_SUFFIXES, DATASET_PATH, \
    SELECTION_KEYS
from bernsteinpy.model.measures import AtomicMeasure, ModelParams
from bernsteinpy.model.selection import SelectionKernel
from bernsteinpy.utils.exceptions import InvalidConfigError, InvalidFileError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def resolve_config_path(path_or_name: str) -> str:
    """A file path, or the name of a built-in reference model."""
    if os.path.exists(path_or_name):
        return path_or_name
    if path_or_name in BUILTIN_MODELS:
        return os.path.join(DATASET_PATH, BUILTIN_MODELS[path_or_name])
    raise InvalidFileError(f"config '{path_or_name}' is neither a file nor one of {sorted(BUILTIN_MODELS)}")


def read_config(path_or_name: str) -> Dict[str, Any]:
    """Read a model config from JSON, TOML or YAML.

    Parameters
    ----------
    path_or_name : str
        Path of the config file, or a built-in model name.

    Returns
    -------
    config : dict
        The raw mapping, with the source text kept under ``"__text__"`` for line lookups.
    """
    path = resolve_config_path(path_or_name)
    suffix = os.path.splitext(path)[1].lower()
    if suffix not in CONFIG_SUFFIXES:
        raise InvalidFileError(f"unsupported config suffix '{suffix}', expected one of {CONFIG_SUFFIXES}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        if suffix == ".json":
            config = json.loads(text)
        elif suffix == ".toml":
            config = tomllib.loads(text)
        else:
            config = yaml.safe_load(text)
    except json.JSONDecodeError as err:
        raise InvalidFileError(f"{path}: {err.msg}", line=err.lineno)
    except tomllib.TOMLDecodeError as err:
        match = re.search(r"line (\d+)", str(err))
        raise InvalidFileError(f"{path}: {err}", line=int(match.group(1)) if match else None)
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        raise InvalidFileError(f"{path}: {err}", line=mark.line + 1 if mark is not None else None)
    if not isinstance(config, dict):
        raise InvalidFileError(f"{path}: the top level of a model config must be a mapping")
    config["__text__"] = text
    return config


def locate_key(text: Optional[str], key: str) -> Optional[int]:
    """1-based line of the first occurrence of ``key`` as a config key, if any."""
    if not text:
        return None
    pattern = re.compile(r'(^|[\s{,"\'])' + re.escape(key) + r'["\']?\s*[:=]')
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return number
    return None


def locate_atom(text: Optional[str], key: str, index: int) -> Optional[int]:
    """1-based line of atom ``index`` in the list under ``key``; the key's line if the list cannot be followed.

    Handles inline or multi-line bracket lists (JSON, TOML, YAML flow) and YAML block lists of ``- [r, w]`` items.
    """
    line = locate_key(text, key)
    if line is None:
        return None
    lines = text.splitlines()
    head = lines[line - 1]
    rest = head[head.index(key) + len(key):]
    rest = rest[re.search(r"[:=]", rest).end():]
    if rest.strip():
        # bracket list starting on the key line
        tail = "\n".join([rest] + lines[line:])
        depth, seen = 0, -1
        for pos, char in enumerate(tail):
            if char == "[":
                depth += 1
                if depth == 2:
                    seen += 1
                    if seen == index:
                        return line + tail.count("\n", 0, pos)
            elif char == "]":
                depth -= 1
                if depth == 0:
                    break
        return line
    seen = -1
    for offset, item in enumerate(lines[line:], start=line + 1):
        stripped = item.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if not stripped.startswith("-"):
            break
        seen += 1
        if seen == index:
            return offset
    return line


def _number(config: Dict[str, Any], key: str, text: Optional[str], default: float = 0.0) -> float:
    value = config.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidConfigError(f"expected a number, got {value!r}", key, locate_key(text, key))
    return float(value)


def _measure(config: Dict[str, Any], key: str, support: str, text: Optional[str]) -> AtomicMeasure:
    atoms = config.get(key, [])
    if not isinstance(atoms, list):
        raise InvalidConfigError("expected a list of [location, weight] pairs", key, locate_key(text, key))
    try:
        return AtomicMeasure.from_atoms(atoms, support=support, name=key)
    except InvalidConfigError as err:
        match = re.search(r"\[(\d+)\]$", err.key_path)
        line = locate_atom(text, key, int(match.group(1))) if match else locate_key(text, key)
        raise InvalidConfigError(err.message, err.key_path, line)
    except TypeError:
        raise InvalidConfigError("expected a list of [location, weight] pairs", key, locate_key(text, key))


def build_selection(entry: Any, text: Optional[str] = None) -> SelectionKernel:
    if entry is None:
        return SelectionKernel.neutral()
    if not isinstance(entry, dict):
        raise InvalidConfigError("expected a mapping with kappa, beta, p", "selection", locate_key(text, "selection"))
    for key in entry:
        if key not in SELECTION_KEYS:
            raise InvalidConfigError(f"unknown key, expected one of {SELECTION_KEYS}", f"selection.{key}",
                                     locate_key(text, key))
    try:
        kernel = SelectionKernel.from_lists(entry.get("kappa", 2), entry.get("beta", [0.0]),
                                            entry.get("p", [[0.0, 0.5, 1.0]]))
    except (TypeError, ValueError) as err:
        raise InvalidConfigError(f"malformed selection kernel ({err})", "selection", locate_key(text, "selection"))
    violations = kernel.validate()
    if violations:
        raise InvalidConfigError("; ".join(violations), "selection", locate_key(text, "selection"))
    return kernel


def build_params(config: Dict[str, Any]) -> ModelParams:
    """Validate a raw config mapping and turn it into ModelParams.

    Raises
    ------
    InvalidConfigError
        Unknown keys (with their dotted path) or any violated model constraint.
    """
    text = config.get("__text__")
    for key in config:
        if key != "__text__" and key not in CONFIG_KEYS:
            raise InvalidConfigError(f"unknown key, expected one of {CONFIG_KEYS}", key, locate_key(text, key))
    lambda0 = _number(config, "lambda0", text)
    theta_a = _number(config, "theta_a", text)
    theta_A = _number(config, "theta_A", text)
    for key, value in (("lambda0", lambda0), ("theta_a", theta_a), ("theta_A", theta_A)):
        if value < 0:
            raise InvalidConfigError(f"must be nonnegative, got {value}", key, locate_key(text, key))
    return ModelParams(lambda0=lambda0,
                       lambda_tail=_measure(config, "lambda_atoms", "unit", text),
                       mu=_measure(config, "mu_atoms", "signed", text),
                       nu=_measure(config, "nu_atoms", "signed", text),
                       theta_a=theta_a,
                       theta_A=theta_A,
                       sel=build_selection(config.get("selection"), text),
                       name=str(config.get("name", "model")))


def load_params(path_or_name: str) -> ModelParams:
    return build_params(read_config(path_or_name))


def snapshot(config: Dict[str, Any]) -> Dict[str, Any]:
    """The config without loader bookkeeping, for run records and hashing."""
    return {k: v for k, v in config.items() if k != "__text__"}


def parse_vector(text: str) -> List[float]:
    """Parse a comma-separated coefficient list such as ``"0,0.5,1"``."""
    try:
        values = [float(item) for item in text.split(",") if item.strip() != ""]
    except ValueError:
        raise InvalidConfigError(f"cannot parse coefficient list {text!r}", "--v")
    if not values:
        raise InvalidConfigError("empty coefficient list", "--v")
    return values
