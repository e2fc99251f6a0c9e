from leraylab.io.snapshot import Snapshot, write_snapshot, read_snapshot, stream_or_file
from leraylab.io.runfile import write_run, parse_run
from leraylab.io.reports import (
    write_records, read_records, write_summary, summary_table, history_frame, write_history_csv, write_shells_csv
)
