import msgpack

from leraylab.io.snapshot import stream_or_file
from leraylab.lab.report import to_plain


RUN_FORMAT = "leraylab-run-1"


@stream_or_file('wb')
def write_run(f, run):
    """Write the bookkeeping of a ProfileRun (no field data) as msgpack"""

    out = {
        "format": RUN_FORMAT,
        "alpha": run.alpha,
        "grid": run.grid.get_parameters(),
        "times": run.times(),
        "residual_history": run.residual_history
    }

    if run.sigma is not None:
        out["sigma"] = run.sigma.get_parameters()

    if run.meta:
        out["meta"] = run.meta

    f.write(msgpack.packb(to_plain(out), use_bin_type=True))


@stream_or_file('rb')
def parse_run(f):
    """Parse a run archive from a filename or file object into a dict"""

    try:
        x = msgpack.unpackb(f.read(), raw=False)
    except Exception as e:
        raise ValueError("corrupt run archive: {0}".format(e))

    if not isinstance(x, dict) or x.get("format") != RUN_FORMAT:
        raise ValueError("not a {0} archive".format(RUN_FORMAT))

    return x
