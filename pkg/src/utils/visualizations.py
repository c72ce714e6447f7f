import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns


class BenchmarkVisualizer:
    def __init__(self, output_dir="data/bench"):
        self.output_dir = output_dir

    def _save(self, name):
        os.makedirs(self.output_dir, exist_ok=True)
        path = os.path.join(self.output_dir, name)
        plt.savefig(path, format="png")
        plt.close()
        return path

    def plot_timings(self, table, name="timings.png"):
        """Log-log plot of seconds against problem size, one panel per operation"""
        operations = list(table["operation"].unique())
        fig, axes = plt.subplots(1, len(operations), figsize=(6 * len(operations), 5), squeeze=False)
        for ax, operation in zip(axes[0], operations):
            rows = table[table["operation"] == operation]
            sns.lineplot(x="scale", y="seconds", data=rows, marker="o", ax=ax)
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.set_title(operation)
            ax.set_xlabel("N" if operation == "compute_sigma" else "log2 m")
            ax.set_ylabel("Seconds")
            # reference slope through the first point
            x0, y0 = rows["scale"].iloc[0], rows["seconds"].iloc[0]
            reference = 2 if operation == "compute_sigma" else 1
            xs = np.array(rows["scale"], dtype=float)
            ax.plot(xs, y0 * (xs / x0) ** reference, color="r", linestyle="--",
                    label=f"slope {reference}")
            ax.legend()
        plt.tight_layout()
        return self._save(name)
