"""Interaction events and the CSV / JSON-lines readers that produce them.

An event is one timestamped contact between two users. Direction is not
kept: the dyad is stored with the two IDs in lexicographic order.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    MalformedRecord,
    NegativeTimestamp,
    ParseError,
    ParseErrors,
    SelfInteraction,
    UnknownInteractionType,
)

FORMATS = ("csv", "jsonl")


class InteractionType(str, enum.Enum):
    FACE_TO_FACE = "face_to_face"
    VIDEO = "video"
    CALL = "call"
    MESSAGE = "message"

    @classmethod
    def parse(cls, token: str) -> "InteractionType":
        try:
            return _TYPE_ALIASES[token.strip().lower()]
        except (KeyError, AttributeError):
            raise UnknownInteractionType(f"unknown interaction type {token!r}") from None


_TYPE_ALIASES = {
    "face_to_face": InteractionType.FACE_TO_FACE,
    "f2f": InteractionType.FACE_TO_FACE,
    "video": InteractionType.VIDEO,
    "call": InteractionType.CALL,
    "phone": InteractionType.CALL,
    "message": InteractionType.MESSAGE,
    "email": InteractionType.MESSAGE,
    "text": InteractionType.MESSAGE,
}


@dataclass(frozen=True, order=True)
class InteractionEvent:
    user_a: str
    user_b: str
    timestamp: int
    itype: InteractionType
    size: int = 0

    def __post_init__(self):
        for uid in (self.user_a, self.user_b):
            if not isinstance(uid, str) or not uid.strip():
                raise MalformedRecord(f"user id must be a non-empty token, got {uid!r}")
        if self.user_a == self.user_b:
            raise SelfInteraction(f"{self.user_a!r} interacts with itself")
        if self.user_a > self.user_b:
            a, b = self.user_b, self.user_a
            object.__setattr__(self, "user_a", a)
            object.__setattr__(self, "user_b", b)
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, int):
            raise MalformedRecord(f"timestamp must be an integer, got {self.timestamp!r}")
        if self.timestamp < 0:
            raise NegativeTimestamp(f"negative timestamp {self.timestamp}")
        if not isinstance(self.itype, InteractionType):
            object.__setattr__(self, "itype", InteractionType.parse(self.itype))
        if isinstance(self.size, bool) or not isinstance(self.size, int) or self.size < 0:
            raise MalformedRecord(f"size must be a non-negative integer, got {self.size!r}")
        if self.size and self.itype is not InteractionType.MESSAGE:
            raise MalformedRecord(f"size is only meaningful for messages, got {self.itype.value}")

    def other(self, user: str) -> str:
        """The dyad partner of ``user``."""
        if user == self.user_a:
            return self.user_b
        if user == self.user_b:
            return self.user_a
        raise ValueError(f"{user!r} is not part of this event")

    def to_csv_row(self) -> list[str]:
        return [self.user_a, self.user_b, str(self.timestamp), self.itype.value, str(self.size)]


@dataclass(frozen=True)
class EventStream:
    events: tuple[InteractionEvent, ...] = ()
    source_digest: str = ""
    # (line number, message) for every record dropped in lenient mode
    skipped: tuple[tuple[int, str], ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def users(self) -> list[str]:
        return sorted({u for e in self.events for u in (e.user_a, e.user_b)})

    @classmethod
    def from_events(cls, events: Iterable[InteractionEvent]) -> "EventStream":
        """Build a stream from in-memory events; the digest covers their CSV form."""
        ordered = tuple(sorted(events, key=lambda e: e.timestamp))
        text = dump_csv(ordered)
        return cls(ordered, hashlib.sha256(text.encode("utf-8")).hexdigest())


def _parse_int(token, what: str) -> int:
    if isinstance(token, bool):
        raise MalformedRecord(f"{what} must be an integer, got {token!r}")
    if isinstance(token, int):
        return token
    if isinstance(token, float) and token.is_integer():
        return int(token)
    if isinstance(token, str):
        try:
            return int(token.strip())
        except ValueError:
            pass
    raise MalformedRecord(f"{what} must be an integer, got {token!r}")


def _build(a, b, ts, itype, size) -> InteractionEvent:
    if not isinstance(a, str) or not isinstance(b, str):
        raise MalformedRecord("user ids must be strings")
    a, b = a.strip(), b.strip()
    if not a or not b:
        raise MalformedRecord("empty user id")
    ts = _parse_int(ts, "timestamp")
    if ts < 0:
        raise NegativeTimestamp(f"negative timestamp {ts}")
    kind = InteractionType.parse(itype) if isinstance(itype, str) else None
    if kind is None:
        raise UnknownInteractionType(f"unknown interaction type {itype!r}")
    size = 0 if size is None or size == "" else _parse_int(size, "size")
    return InteractionEvent(a, b, ts, kind, size)


def parse_event_line(line: str, format: str = "csv") -> InteractionEvent:
    """Parse one record. CSV columns are ``user_a,user_b,timestamp,itype[,size]``;
    JSON-lines objects use keys ``a, b, ts, type`` and optional ``size``."""
    if format == "csv":
        rows = list(csv.reader([line]))
        if len(rows) != 1 or len(rows[0]) not in (4, 5):
            n = len(rows[0]) if rows else 0
            raise MalformedRecord(f"expected 4 or 5 columns, got {n}")
        row = rows[0]
        return _build(row[0], row[1], row[2], row[3], row[4] if len(row) == 5 else None)
    if format == "jsonl":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise MalformedRecord("JSON record must be an object")
        missing = [k for k in ("a", "b", "ts", "type") if k not in obj]
        if missing:
            raise MalformedRecord(f"missing key(s): {', '.join(missing)}")
        return _build(obj["a"], obj["b"], obj["ts"], obj["type"], obj.get("size"))
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def _looks_like_header(line: str) -> bool:
    row = next(csv.reader([line]), [])
    if len(row) < 3:
        return False
    try:
        int(row[2].strip())
    except ValueError:
        return True
    return False


def parse_text(text: str, format: str = "csv", *, lenient: bool = False) -> EventStream:
    """Parse a whole document. Strict mode raises :class:`ParseErrors` listing
    every bad line; lenient mode drops them and records them in ``skipped``."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    events: list[InteractionEvent] = []
    errors: list[tuple[int, ParseError]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if lineno == 1 and format == "csv" and _looks_like_header(line):
            continue
        try:
            events.append(parse_event_line(line, format))
        except ParseError as exc:
            errors.append((lineno, exc))
    if errors and not lenient:
        raise ParseErrors(errors)
    events.sort(key=lambda e: e.timestamp)
    return EventStream(tuple(events), digest, tuple((n, str(e)) for n, e in errors))


def load_stream(path, format: str = "csv", *, lenient: bool = False) -> EventStream:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseErrors([(raw[: exc.start].count(b"\n") + 1, MalformedRecord("invalid UTF-8"))])
    stream = parse_text(text, format, lenient=lenient)
    # digest the raw bytes, not the decoded text
    return EventStream(stream.events, hashlib.sha256(raw).hexdigest(), stream.skipped)


def dump_csv(events: Sequence[InteractionEvent] | EventStream) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for e in events:
        writer.writerow(e.to_csv_row())
    return buf.getvalue()


def dump_jsonl(events: Sequence[InteractionEvent] | EventStream) -> str:
    return "".join(
        json.dumps({"a": e.user_a, "b": e.user_b, "ts": e.timestamp, "type": e.itype.value, "size": e.size})
        + "\n"
        for e in events
    )
