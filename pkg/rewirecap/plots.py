# rewirecap/plots.py

import os
from typing import Callable, Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from rewirecap.config import OutputConfig  # noqa: E402
from rewirecap.utils.file_state_utils import ResultStore  # noqa: E402
from rewirecap.utils.log_manager import LogManager  # noqa: E402
from rewirecap.utils.pipeline_utils import ORIGINAL  # noqa: E402

logger = LogManager.setup_main_logger()

plt.rcParams["svg.hashsalt"] = "rewirecap"

SWEEP_MEASURES = ["lambda_c", "g_max", "rc"]
NETWORK_MEASURES = ["g_max", "lambda_c", "rc", "cp"]
DEGREE_PLOT_RF = 0.05


class PlotEmitter:
    def __init__(self, result_dir: str):
        self.result_dir = result_dir
        self.plots_dir = os.path.join(result_dir, OutputConfig.PLOTS_DIR)
        manifest_path = os.path.join(result_dir, OutputConfig.MANIFEST)
        manifest = ResultStore.load_json(manifest_path) if os.path.exists(manifest_path) else {}
        self.config_hash = manifest.get("config_hash", "unknown")

    def _frame(self, name: str) -> Optional[pd.DataFrame]:
        return ResultStore.read_frame(os.path.join(self.result_dir, name))

    @staticmethod
    def _missing(df: Optional[pd.DataFrame], columns: Sequence[str]) -> List[str]:
        if df is None:
            return list(columns)
        return [c for c in columns if c not in df.columns]

    def _save(self, fig, name: str, source: str) -> str:
        os.makedirs(self.plots_dir, exist_ok=True)
        path = os.path.join(self.plots_dir, name)
        metadata = {
            "Date": None,
            "Description": f"source={source}; config_hash={self.config_hash}",
        }
        fig.savefig(path, format="svg", metadata=metadata)
        plt.close(fig)
        return path

    def rf_sweep(self) -> Optional[str]:
        summary = self._frame(OutputConfig.SUMMARY_CSV)
        needed = ["strategy", "r_f"] + [f"{m}_mean" for m in SWEEP_MEASURES]
        missing = self._missing(summary, needed)
        if missing:
            logger.warning(f"Skipping r_f sweep plot; missing columns: {', '.join(missing)}")
            return None

        fig, axes = plt.subplots(1, len(SWEEP_MEASURES), figsize=(4 * len(SWEEP_MEASURES), 3.5))
        for ax, measure in zip(axes, SWEEP_MEASURES):
            column = f"{measure}_mean"
            original = summary[summary["strategy"] == ORIGINAL][column].mean()
            ax.axhline(original, color="black", linestyle="--", label=ORIGINAL)
            for strategy, part in summary[summary["strategy"] != ORIGINAL].groupby("strategy", sort=True):
                curve = part.groupby("r_f")[column].mean().sort_index()
                ax.plot(curve.index, curve.values, marker="o", label=strategy)
            ax.set_xlabel("r_f")
            ax.set_ylabel(measure)
        axes[0].legend(fontsize="small")
        fig.tight_layout()
        return self._save(fig, "rf_sweep.svg", OutputConfig.SUMMARY_CSV)

    def utilization(self) -> Optional[str]:
        frame = self._frame(OutputConfig.UTILIZATION_CSV)
        missing = self._missing(frame, ["strategy", "r_f", "k", "U_k"])
        if missing:
            logger.warning(f"Skipping utilization plot; missing columns: {', '.join(missing)}")
            return None

        fig, ax = plt.subplots(figsize=(5, 4))
        for strategy, part in frame.groupby("strategy", sort=True):
            part = part[part["r_f"] == part["r_f"].max()]
            curve = part.groupby("k")["U_k"].mean().sort_index()
            curve = curve[curve > 0]
            ax.loglog(curve.index, curve.values, marker=".", linestyle="", label=strategy)
        ax.set_xlabel("k")
        ax.set_ylabel("U_k")
        ax.legend(fontsize="small")
        fig.tight_layout()
        return self._save(fig, "utilization.svg", OutputConfig.UTILIZATION_CSV)

    def load_vs_lambda(self) -> Optional[str]:
        frame = self._frame(OutputConfig.TRAFFIC_CSV)
        missing = self._missing(frame, ["strategy", "r_f", "beta", "lambda", "load_final"])
        if missing:
            logger.warning(f"Skipping load plot; missing columns: {', '.join(missing)}")
            return None

        betas = sorted(frame["beta"].unique())
        fig, axes = plt.subplots(1, len(betas), figsize=(4 * len(betas), 3.5), squeeze=False)
        for ax, beta in zip(axes[0], betas):
            at_beta = frame[frame["beta"] == beta]
            for strategy, part in at_beta.groupby("strategy", sort=True):
                part = part[part["r_f"] == part["r_f"].max()]
                curve = part.groupby("lambda")["load_final"].mean().sort_index()
                ax.plot(curve.index, curve.values, marker="o", label=strategy)
            ax.set_title(f"beta = {beta}")
            ax.set_xlabel("lambda")
            ax.set_ylabel("L(T)")
        axes[0][0].legend(fontsize="small")
        fig.tight_layout()
        return self._save(fig, "load_vs_lambda.svg", OutputConfig.TRAFFIC_CSV)

    def load_vs_time(self) -> Optional[str]:
        """L(t) at the largest lambda of the sweep, one panel per beta."""
        frame = self._frame(OutputConfig.ANALYTIC_TRACES_CSV)
        missing = self._missing(frame, ["strategy", "r_f", "beta", "lambda", "t", "L_total"])
        if missing:
            logger.warning(f"Skipping load trace plot; missing columns: {', '.join(missing)}")
            return None

        frame = frame[frame["lambda"] == frame["lambda"].max()]
        betas = sorted(frame["beta"].unique())
        fig, axes = plt.subplots(1, len(betas), figsize=(4 * len(betas), 3.5), squeeze=False)
        for ax, beta in zip(axes[0], betas):
            at_beta = frame[frame["beta"] == beta]
            for strategy, part in at_beta.groupby("strategy", sort=True):
                part = part[part["r_f"] == part["r_f"].max()]
                curve = part.groupby("t")["L_total"].mean().sort_index()
                ax.plot(curve.index, curve.values, label=strategy)
            ax.set_title(f"beta = {beta}, lambda = {frame['lambda'].iloc[0]}")
            ax.set_xlabel("t")
            ax.set_ylabel("L(t)")
        axes[0][0].legend(fontsize="small")
        fig.tight_layout()
        return self._save(fig, "load_vs_time.svg", OutputConfig.ANALYTIC_TRACES_CSV)

    def degree_distribution(self) -> Optional[str]:
        frame = self._frame(OutputConfig.DEGREE_CSV)
        missing = self._missing(frame, ["strategy", "r_f", "k", "p_k"])
        if missing:
            logger.warning(f"Skipping degree distribution plot; missing columns: {', '.join(missing)}")
            return None

        fig, ax = plt.subplots(figsize=(5, 4))
        for strategy, part in frame.groupby("strategy", sort=True):
            if strategy != ORIGINAL:
                nearest = (part["r_f"] - DEGREE_PLOT_RF).abs().min()
                part = part[(part["r_f"] - DEGREE_PLOT_RF).abs() == nearest]
            curve = part.groupby("k")["p_k"].mean().sort_index()
            ax.loglog(curve.index, curve.values, marker=".", linestyle="", label=strategy)
        ax.set_xlabel("k")
        ax.set_ylabel("p(k)")
        ax.legend(fontsize="small")
        fig.tight_layout()
        return self._save(fig, "degree_distribution.svg", OutputConfig.DEGREE_CSV)

    def network_measures(self) -> Optional[str]:
        summary = self._frame(OutputConfig.SUMMARY_CSV)
        needed = ["network", "strategy", "r_f"] + [f"{m}_mean" for m in NETWORK_MEASURES]
        missing = self._missing(summary, needed)
        if missing:
            logger.warning(f"Skipping per-network plot; missing columns: {', '.join(missing)}")
            return None

        networks = list(dict.fromkeys(summary["network"]))
        fig, axes = plt.subplots(
            len(networks), len(NETWORK_MEASURES),
            figsize=(3.5 * len(NETWORK_MEASURES), 3 * len(networks)), squeeze=False,
        )
        for row, network in zip(axes, networks):
            part = summary[summary["network"] == network]
            for ax, measure in zip(row, NETWORK_MEASURES):
                column = f"{measure}_mean"
                for strategy, sub in part.groupby("strategy", sort=True):
                    curve = sub.groupby("r_f")[column].mean().sort_index()
                    style = "--" if strategy == ORIGINAL else "-"
                    ax.plot(curve.index, curve.values, marker="o", linestyle=style, label=strategy)
                ax.set_title(f"{network}: {measure}", fontsize="small")
                ax.set_xlabel("r_f")
        axes[0][0].legend(fontsize="small")
        fig.tight_layout()
        return self._save(fig, "network_measures.svg", OutputConfig.SUMMARY_CSV)

    def emit_all(self) -> List[str]:
        renderers: Dict[str, Callable[[], Optional[str]]] = {
            "rf_sweep": self.rf_sweep,
            "utilization": self.utilization,
            "load_vs_lambda": self.load_vs_lambda,
            "load_vs_time": self.load_vs_time,
            "degree_distribution": self.degree_distribution,
            "network_measures": self.network_measures,
        }
        written = []
        for name, render in renderers.items():
            try:
                path = render()
            except Exception as e:
                logger.error(f"Plot {name} failed: {e}", exc_info=True)
                continue
            if path:
                written.append(path)
        logger.info(f"Rendered {len(written)} plot(s) into {self.plots_dir}")
        return written


def emit_plots(result_dir: str) -> List[str]:
    return PlotEmitter(result_dir).emit_all()
