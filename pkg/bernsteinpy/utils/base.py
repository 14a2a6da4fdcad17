# -*- coding: utf-8 -*-
import hashlib
import json
import logging
import os
from typing import Any, Dict

import numpy as np
import pandas as pd


def save_data(df: pd.DataFrame, df_name: str, path: str) -> str:
    """make a csv sheet to store the result

    :param df: the table to store
    :param df_name: the name of the data sheet
    :param path: the path to store the data sheet
    :return: the full path of the written file
    """
    os.makedirs(path, exist_ok=True)
    file_path = os.path.join(path, "{}.csv".format(df_name))
    df.to_csv(file_path, index=False)
    print(f"Successfully store the results of {df_name} in '{df_name}.csv' in {path}.")
    return file_path


def save_json(record: Dict[str, Any], record_name: str, path: str) -> str:
    """Store a report as sorted, indented JSON.

    :param record: a JSON-serializable mapping
    :param record_name: the name of the report
    :param path: the path to store the report
    :return: the full path of the written file
    """
    os.makedirs(path, exist_ok=True)
    file_path = os.path.join(path, "{}.json".format(record_name))
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(to_json(record))
    print(f"Successfully store the report of {record_name} in '{record_name}.json' in {path}.")
    return file_path


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, pd.DataFrame):
        return obj.to_dict(orient="records")
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def to_json(record: Dict[str, Any]) -> str:
    # infinities are written as the strings "inf" / "-inf" so the output stays strict JSON
    return json.dumps(_finite(record), sort_keys=True, indent=2, default=_json_default)


def _finite(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        if np.isnan(obj):
            return "nan"
        if np.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(obj)
    return obj


def config_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a config snapshot."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def replica_rng(seed: int, *index: int) -> np.random.Generator:
    """Independent stream for replica (or replica block) ``index`` under ``seed``.

    Streams are keyed by the index path, so adding replicas leaves earlier ones untouched.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(i) for i in index)))


def log(log_path, log_name):
    # Create and configure logger
    LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(pathname)s %(message)s"
    DATE_FORMAT = '%Y-%m-%d  %H:%M:%S %a '
    os.makedirs(log_path, exist_ok=True)
    logging.basicConfig(filename=os.path.join(log_path, log_name),
                        level=logging.DEBUG,
                        format=LOG_FORMAT,
                        datefmt=DATE_FORMAT,
                        filemode="w")
    logger = logging.getLogger()
    return logger
