# rewirecap/utils/pipeline_utils.py

import os
import zlib
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from rewirecap.config import OutputConfig
from rewirecap.utils.file_state_utils import ResultStore
from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()

ORIGINAL = "original"


@dataclass(frozen=True)
class CellSpec:
    index: int
    network: str
    strategy: str
    r_f: float
    realization: int
    network_seed: int
    seed: int

    def key(self) -> Dict[str, Any]:
        return {
            "network": self.network,
            "strategy": self.strategy,
            "r_f": self.r_f,
            "realization": self.realization,
            "seed": self.seed,
        }

    @property
    def filename(self) -> str:
        return f"cell_{self.index:06d}.json"

    @property
    def label(self) -> str:
        return f"cell{self.index}/{self.strategy}@{self.r_f:g}#{self.realization}"


class PipelineHelper:
    @staticmethod
    def derive_seed(master_seed: int, *parts: Any) -> int:
        """
        Independent 32-bit seed for a cell, stable across runs and platforms.
        """
        spawn_key = tuple(zlib.crc32(str(part).encode("utf-8")) for part in parts)
        sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=spawn_key)
        return int(sequence.generate_state(1)[0])

    @staticmethod
    def enumerate_cells(
        network: str,
        strategies: Sequence[str],
        rf_grid: Sequence[float],
        realizations: int,
        master_seed: int,
    ) -> List[CellSpec]:
        """
        One original cell per realization followed by every strategy/r_f pair.
        All cells of a realization share the same base network seed.
        """
        cells: List[CellSpec] = []
        for r in range(realizations):
            network_seed = PipelineHelper.derive_seed(master_seed, "network", r)
            cells.append(CellSpec(len(cells), network, ORIGINAL, 0.0, r, network_seed, network_seed))
            for strategy in strategies:
                for r_f in rf_grid:
                    seed = PipelineHelper.derive_seed(master_seed, "rewire", strategy, repr(float(r_f)), r)
                    cells.append(CellSpec(len(cells), network, strategy, float(r_f), r, network_seed, seed))
        return cells

    @staticmethod
    def load_cells(cells_dir: str) -> List[Dict[str, Any]]:
        results = [ResultStore.load_json(path) for path in ResultStore.list_json(cells_dir)]
        return sorted(results, key=lambda r: r["index"])

    @staticmethod
    def keyed_rows(results: Iterable[Dict[str, Any]], section: str) -> List[Dict[str, Any]]:
        rows = []
        for result in results:
            if "error" in result:
                continue
            payload = result.get(section)
            if payload is None:
                continue
            for item in payload if isinstance(payload, list) else [payload]:
                rows.append({**result["key"], **item})
        return rows

    @staticmethod
    def failure_rows(results: Iterable[Dict[str, Any]]) -> List[Dict[str, Any]]:
        return [
            {"index": r["index"], **r["key"], **r["error"]}
            for r in results
            if "error" in r
        ]

    @staticmethod
    def summarize(metrics: pd.DataFrame) -> pd.DataFrame:
        """
        Mean and sample standard deviation of every metric per
        network/strategy/r_f, in first-appearance order.
        """
        group_cols = ["network", "strategy", "r_f"]
        if metrics.empty:
            columns = group_cols + ["n"] + [f"{m}_{s}" for m in OutputConfig.METRIC_COLUMNS for s in ("mean", "std")]
            return pd.DataFrame(columns=columns)

        values = metrics[group_cols + OutputConfig.METRIC_COLUMNS].copy()
        values[OutputConfig.METRIC_COLUMNS] = values[OutputConfig.METRIC_COLUMNS].apply(pd.to_numeric, errors="coerce")
        grouped = values.groupby(group_cols, sort=False)
        stats = grouped[OutputConfig.METRIC_COLUMNS].agg(["mean", "std"])
        stats.columns = [f"{metric}_{stat}" for metric, stat in stats.columns]
        stats.insert(0, "n", grouped.size())
        return stats.reset_index()

    @staticmethod
    def write_section(rows: List[Dict[str, Any]], columns: List[str], out_dir: str, name: str) -> str:
        path = os.path.join(out_dir, name)
        ResultStore.write_rows(rows, columns, path)
        logger.info(f"Wrote {len(rows)} row(s) to {path}")
        return path

    @staticmethod
    def log_run_summary(total: int, failures: int) -> Tuple[int, int]:
        if failures:
            logger.warning(f"Sweep finished: {total - failures}/{total} cells succeeded, {failures} failed")
        else:
            logger.info(f"Sweep finished: all {total} cells succeeded")
        return total - failures, failures
