"""Line-oriented UTF-8 file I/O with line-numbered diagnostics."""

from __future__ import annotations

__all__ = ["InputError", "read_lines", "write_lines"]


class InputError(OSError):
    """An unreadable or undecodable input file; message names the location."""


def read_lines(path: str) -> list[str]:
    """Read a UTF-8 text file into lines without trailing newlines.

    Decodes line by line so an encoding error reports the failing line
    number.  A trailing CR (CRLF input) is tolerated and stripped.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    raw_lines = data.split(b"\n")
    if raw_lines and raw_lines[-1] == b"":
        raw_lines.pop()
    lines: list[str] = []
    for lineno, raw in enumerate(raw_lines, start=1):
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise InputError(f"{path}: line {lineno}: invalid UTF-8 ({exc.reason})") from exc
    return lines


def write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")
