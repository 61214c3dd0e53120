# rewirecap/utils/file_state_utils.py

import os
import json
from typing import Any, Dict, List, Optional

import pandas as pd

from rewirecap.utils.tempfile_utils import TempFileManager


class ResultStore:
    @staticmethod
    def frame_text(df: pd.DataFrame) -> str:
        return df.to_csv(index=False, lineterminator="\n")

    @staticmethod
    def write_frame(df: pd.DataFrame, path: str) -> str:
        return TempFileManager.atomic_write_text(path, ResultStore.frame_text(df))

    @staticmethod
    def write_rows(rows: List[Dict[str, Any]], columns: List[str], path: str) -> str:
        df = pd.DataFrame(rows, columns=columns)
        return ResultStore.write_frame(df, path)

    @staticmethod
    def read_frame(path: str) -> Optional[pd.DataFrame]:
        if not os.path.exists(path):
            return None
        return pd.read_csv(path)

    @staticmethod
    def write_json(path: str, data: Any) -> str:
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
        return TempFileManager.atomic_write_text(path, text)

    @staticmethod
    def load_json(path: str) -> Any:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    @staticmethod
    def list_json(directory: str) -> List[str]:
        if not os.path.isdir(directory):
            return []
        return sorted(
            os.path.join(directory, name)
            for name in os.listdir(directory)
            if name.endswith(".json")
        )
