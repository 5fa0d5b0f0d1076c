"""Plot every harness CSV found under a directory into PNG files next to it.

    python3 scripts/plot_results.py out/

Convergence tables are drawn log-log, evolution tables against time.
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def load(path):
    rows = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    names = rows[0].split(",")
    data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]], ndmin=2)
    return {n: data[:, i] for i, n in enumerate(names)} if len(rows) > 1 else {}


def plot(path):
    cols = load(path)
    if not cols:
        return None
    fig, ax = plt.subplots(figsize=(5, 4))
    if "error" in cols:
        groups = np.unique(cols["beta"]) if "beta" in cols else [None]
        for b in groups:
            sel = cols["beta"] == b if b is not None else slice(None)
            label = f"beta={b:g}" if b is not None else f"slope {cols['slope'][0]:.2f}"
            ax.loglog(cols["dt"][sel], cols["error"][sel], "o-", label=label)
        ax.set_xlabel("dt")
        ax.set_ylabel("max-norm error")
    else:
        groups = np.unique(cols["beta"]) if "beta" in cols else [None]
        for b in groups:
            sel = cols["beta"] == b if b is not None else slice(None)
            tag = f" beta={b:g}" if b is not None else ""
            ax.plot(cols["t"][sel], cols["entropy"][sel], label="entropy" + tag)
            ax.plot(cols["t"][sel], cols["modified_entropy"][sel], "--", label="modified" + tag)
        ax.set_xlabel("t")
    ax.legend(fontsize=7)
    ax.set_title(Path(path).stem, fontsize=9)
    out = Path(path).with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def main(argv=None):
    roots = [Path(a) for a in (argv if argv is not None else sys.argv[1:])] or [Path("out")]
    for root in roots:
        for csv in sorted(root.rglob("*.csv")):
            out = plot(csv)
            if out is not None:
                print(out)


if __name__ == "__main__":
    main()
