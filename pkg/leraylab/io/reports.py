import json
import datetime
import pandas as pd

from leraylab.io.snapshot import stream_or_file
from leraylab.lab.report import to_plain


HISTORY_COLUMNS = ["iter_or_step", "time", "l2_update", "div_residual", "max_velocity"]
SHELL_COLUMNS = ["r", "shell_max", "shell_mean", "r_argmax", "count"]


@stream_or_file('w')
def write_records(f, records):
    """One JSON object per line, keys sorted; records are reports/fits or plain dicts"""
    for record in records:
        data = record.to_dict() if hasattr(record, "to_dict") else to_plain(record)
        f.write(json.dumps(data, sort_keys=True) + "\n")


@stream_or_file('r')
def read_records(f):
    return [json.loads(line) for line in f if line.strip()]


def summary_table(reports):
    rows = []
    for r in reports:
        values = r.values()
        rows.append({
            "check": r.name,
            "verdict": r.verdict,
            "n": len(values),
            "min": values.min() if len(values) else float("nan"),
            "max": values.max() if len(values) else float("nan"),
            "bound_lo": r.bound[0],
            "bound_hi": r.bound[1]
        })
    return pd.DataFrame(rows, columns=["check", "verdict", "n", "min", "max", "bound_lo", "bound_hi"])


@stream_or_file('w')
def write_summary(f, reports, title="leraylab verification summary", extra=None):
    """Human-readable table; the only place a timestamp is written"""

    f.write("# {0}\n".format(title))
    f.write("# written {0}\n".format(datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")))
    for line in (extra or []):
        f.write("# {0}\n".format(line))
    if reports:
        f.write(summary_table(reports).to_string(index=False) + "\n")


def history_frame(history):
    frame = pd.DataFrame(history)
    if "step" in frame:
        frame = frame.rename(columns={"step": "iter_or_step"})
    for column in HISTORY_COLUMNS:
        if column not in frame:
            frame[column] = float("nan")
    extra = [c for c in frame.columns if c not in HISTORY_COLUMNS]
    return frame[HISTORY_COLUMNS + extra]


def write_history_csv(path, history, seed=None):
    """With a seed, a constant seed column follows the history columns"""
    frame = history_frame(history)
    if seed is not None:
        frame["seed"] = seed
    frame.to_csv(path, index=False)


def write_shells_csv(path, shells, seed=None):
    frame = shells[SHELL_COLUMNS].copy()
    if seed is not None:
        frame["seed"] = seed
    frame.to_csv(path, index=False)
