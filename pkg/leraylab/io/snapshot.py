import functools
import gzip
import struct
import numpy as np

from leraylab.spectral import SpectralField, make_grid
from leraylab.spectral.field import RANKS, component_shape


MAGIC = b"LRLB"
VERSION = 1

#magic, version, rank code, dim, n, L, alpha, time, component count, padding to 64 bytes
HEADER = struct.Struct("<4sHHIIdddI20x")

RANK_CODES = {rank: code for code, rank in enumerate(RANKS)}


class Snapshot(object):
    """A field read back from a snapshot file together with its header values"""

    def __init__(self, field, alpha, time, values=None):
        self.field = field
        self.values = values
        self.alpha = alpha
        self.time = time

    @property
    def grid(self):
        return self.field.grid

    def __repr__(self):
        return "<Snapshot {0} alpha={1:g} t={2:g}>".format(self.field, self.alpha, self.time)


def stream_or_file(mode='r'):
    """Decorator for making a function accept either a filename or file-like object as a first argument"""

    def inner(fn):
        @functools.wraps(fn)
        def streamify(f, *args, **kwargs):
            if isinstance(f, str):

                if f.endswith(".gz"):
                    fh = gzip.open(f, mode if "b" in mode else mode + "t")
                else:
                    fh = open(f, mode)

                with fh:
                    return fn(fh, *args, **kwargs)
            else:
                return fn(f, *args, **kwargs)

        return streamify

    return inner


@stream_or_file('wb')
def write_snapshot(f, field, alpha, time):
    """
    Write a real field as 64-byte header plus component-major little-endian float64 physical samples
    """

    if not field.hermitian:
        raise ValueError("only real fields can be written to a snapshot")

    grid = field.grid
    header = HEADER.pack(MAGIC, VERSION, RANK_CODES[field.rank], grid.dim, grid.n, grid.box_length,
                         float(alpha), float(time), field.ncomponents)
    f.write(header)
    f.write(np.ascontiguousarray(field.physical(), dtype="<f8").tobytes())


@stream_or_file('rb')
def read_snapshot(f):
    """
    :return: Snapshot
    :raises ValueError: on a truncated or corrupt file
    """

    raw = f.read(HEADER.size)
    if len(raw) != HEADER.size:
        raise ValueError("corrupt snapshot: header has {0} of {1} bytes".format(len(raw), HEADER.size))

    magic, version, rank_code, dim, n, box_length, alpha, time, ncomp = HEADER.unpack(raw)
    if magic != MAGIC:
        raise ValueError("corrupt snapshot: bad magic {0!r}".format(magic))
    if version != VERSION:
        raise ValueError("corrupt snapshot: unsupported version {0}".format(version))
    if rank_code >= len(RANKS):
        raise ValueError("corrupt snapshot: unknown rank code {0}".format(rank_code))

    try:
        grid = make_grid(dim, n, box_length)
    except ValueError as e:
        raise ValueError("corrupt snapshot: {0}".format(e))

    rank = RANKS[rank_code]
    shape = component_shape(rank, dim) + grid.shape
    if ncomp != int(np.prod(component_shape(rank, dim))):
        raise ValueError("corrupt snapshot: {0} components for a {1} field in dim {2}".format(ncomp, rank, dim))

    expected = int(np.prod(shape)) * 8
    payload = f.read(expected + 1)
    if len(payload) != expected:
        raise ValueError("corrupt snapshot: payload has {0} bytes, expected {1}".format(len(payload), expected))

    values = np.frombuffer(payload, dtype="<f8").reshape(shape).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("corrupt snapshot: non-finite samples")

    field = SpectralField.from_physical(grid, values, rank=rank, meta={"time": time})
    return Snapshot(field, alpha, time, values)
