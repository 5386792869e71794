import csv
import json
import logging
import pathlib
import typing as _typing

import attrs
import numpy as np

from .utils import jsonable

if _typing.TYPE_CHECKING:
    from .base import Harness
    from .command import Command

__all__ = ("CommandContext",)

logger: logging.Logger = logging.getLogger("lresnet")


@attrs.define()
class CommandContext:
    """
    Everything a command needs besides its own arguments: where to write
    reports, in which format, and how to pick a seed.
    """

    harness: "Harness" = attrs.field()
    """The dispatcher running the command."""
    args: _typing.List[str] = attrs.field(factory=list)
    """The raw arguments after the command name."""
    out_dir: pathlib.Path = attrs.field(default=pathlib.Path("."), converter=pathlib.Path)
    """The directory reports are written to."""
    report_format: str = attrs.field(
        default="json", validator=attrs.validators.in_(("json", "csv"))
    )
    """The format of reports that can be written either way."""

    invoked_name: str = attrs.field(init=False, default=None)
    """The name used to invoke the command."""
    command: "Command" = attrs.field(init=False, default=None)
    """The command invoked."""
    kwargs: _typing.Dict[str, _typing.Any] = attrs.field(init=False, factory=dict)
    """The converted arguments, by parameter name. Checks read these."""
    written: _typing.List[pathlib.Path] = attrs.field(init=False, factory=list)
    """Every file written so far."""

    def resolve_seed(self, seed: _typing.Optional[int]) -> int:
        """Returns `seed`, or draws one from OS entropy and logs it if it is `None`."""
        if seed is not None:
            return seed

        seed = int(np.random.SeedSequence().entropy % 2**32)
        logger.info("No --seed given; using seed %d.", seed)
        return seed

    def _path(self, name: str, suffix: str) -> pathlib.Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / f"{name.replace('/', '-')}.{suffix}"

    def write_json(self, name: str, record: _typing.Any) -> pathlib.Path:
        """Writes one record as UTF-8 JSON to `<out_dir>/<name>.json`."""
        path = self._path(name, "json")
        with path.open("w", encoding="utf-8") as f:
            json.dump(jsonable(record), f, indent=2, allow_nan=False)
            f.write("\n")

        self.written.append(path)
        logger.info("Wrote %s", path)
        return path

    def write_csv(self, name: str, rows: _typing.Sequence[_typing.Dict[str, _typing.Any]]) -> pathlib.Path:
        """Writes rows with a header line to `<out_dir>/<name>.csv`, quoting per RFC 4180."""
        path = self._path(name, "csv")
        fields: _typing.List[str] = []
        for row in rows:
            fields.extend(key for key in row if key not in fields)

        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=fields, lineterminator="\r\n")
            writer.writeheader()
            writer.writerows(
                {k: "" if v is None else v for k, v in row.items()} for row in rows
            )

        self.written.append(path)
        logger.info("Wrote %s", path)
        return path

    def write_report(
        self,
        name: str,
        record: _typing.Any,
        rows: _typing.Optional[_typing.Sequence[_typing.Dict[str, _typing.Any]]] = None,
    ) -> pathlib.Path:
        """Writes `rows` as CSV if the context asks for CSV and there are rows, else `record` as JSON."""
        if self.report_format == "csv" and rows is not None:
            return self.write_csv(name, rows)
        return self.write_json(name, record)
