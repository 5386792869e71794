import base64
import concurrent.futures
import math
import os
import re
import typing

import numpy as np

__all__ = (
    "ArrayLike",
    "sanitize_message",
    "name_to_flag",
    "coords_of",
    "encode_array",
    "decode_array",
    "jsonable",
    "resolve_threads",
    "map_row_chunks",
    "finite_or_none",
)

ArrayLike = typing.Union[np.ndarray, typing.Sequence[float], typing.Any]

# anything that would mess with a terminal when echoed back
CONTROL_REGEX = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]")


def sanitize_message(content: str) -> str:
    """
    Escape control characters in a string that is about to be printed.

    Args:
        content (`str`): The string to escape.
    Returns:
        The escaped string.
    """
    return CONTROL_REGEX.sub(lambda m: f"\\x{ord(m.group(0)):02x}", content)


def name_to_flag(name: str) -> str:
    """Turns `some_flag` (or `all_`) into `--some-flag` (or `--all`)."""
    return "--" + name.rstrip("_").replace("_", "-")


def coords_of(value: typing.Any) -> np.ndarray:
    """
    Gets the raw coordinate array out of a point, tangent vector, batch or
    plain array-like.

    Args:
        value: A `LorentzPoint`, `TangentVector`, `LorentzBatch` or array-like.
    Returns:
        The underlying numpy array. Plain python sequences become float64.
    """
    for attr in ("coords", "vec", "data"):
        inner = getattr(value, attr, None)
        if isinstance(inner, np.ndarray):
            return inner

    if isinstance(value, np.ndarray):
        return value if value.dtype.kind == "f" else value.astype(np.float64)
    return np.asarray(value, dtype=np.float64)


def encode_array(array: ArrayLike) -> str:
    """
    Serializes an array as base64 of its 64-bit little-endian float values.

    Args:
        array: The array to encode. It is flattened row-major.
    Returns:
        The ASCII base64 string.
    """
    flat = np.ascontiguousarray(np.asarray(array, dtype="<f8").ravel())
    return base64.b64encode(flat.tobytes()).decode("ascii")


def decode_array(blob: str, shape: typing.Optional[typing.Tuple[int, ...]] = None) -> np.ndarray:
    """
    The inverse of `encode_array`.

    Args:
        blob (`str`): The base64 string.
        shape (`tuple[int, ...]`, optional): The shape to restore.
    Returns:
        The float64 array.
    """
    flat = np.frombuffer(base64.b64decode(blob), dtype="<f8").astype(np.float64)
    return flat.reshape(shape) if shape is not None else flat


def finite_or_none(value: float) -> typing.Optional[float]:
    """JSON has no NaN or Inf, so those are written as null."""
    value = float(value)
    return value if math.isfinite(value) else None


def jsonable(obj: typing.Any) -> typing.Any:
    """
    Recursively turns a record into plain JSON types: numpy scalars and
    arrays become Python numbers and lists, NaN and Inf become `None`.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return finite_or_none(obj)
    if isinstance(obj, np.dtype):
        return obj.name
    return obj


def resolve_threads(threads: typing.Union[int, str, None]) -> int:
    """
    Turns a thread setting into a worker count.

    Args:
        threads (`int | str | None`): `1` (or `None`) for single-threaded,
        `"auto"` for one worker per CPU, or an explicit count.
    Returns:
        The number of workers to use.
    """
    if threads is None:
        return 1
    if threads == "auto":
        return os.cpu_count() or 1
    count = int(threads)
    if count < 1:
        raise ValueError("Thread count must be at least 1.")
    return count


def map_row_chunks(
    func: typing.Callable[..., np.ndarray],
    arrays: typing.Sequence[np.ndarray],
    threads: int = 1,
    **kwargs: typing.Any,
) -> np.ndarray:
    """
    Applies a row-wise function to equally long batches, optionally
    splitting the rows over a thread pool.

    With `threads=1` this is just `func(*arrays, **kwargs)`, run on the
    calling thread. Otherwise rows are cut into contiguous chunks,
    processed concurrently and written back in order, so the result does
    not depend on scheduling.

    Args:
        func: The function to apply. It must map `(m, d)` inputs to `(m, d')`.
        arrays: The batches. All must have the same number of rows.
        threads (`int`): Number of workers.
        kwargs: Passed through to `func`.
    Returns:
        The stacked result.
    """
    if threads <= 1:
        return func(*arrays, **kwargs)

    rows = arrays[0].shape[0]
    bounds = np.linspace(0, rows, num=min(threads, rows) + 1, dtype=np.int64)
    spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    with concurrent.futures.ThreadPoolExecutor(max_workers=len(spans)) as pool:
        futures = [
            pool.submit(func, *(arr[a:b] for arr in arrays), **kwargs) for a, b in spans
        ]
        parts = [f.result() for f in futures]

    return np.concatenate(parts, axis=0)
