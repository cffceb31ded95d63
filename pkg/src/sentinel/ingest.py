"""Streaming readers for CERT-r4.2-style organizational log files.

All log files are plain CSV with an exact header. Timestamps use the
"MM/DD/YYYY HH:MM:SS" convention so real r4.2 files parse unmodified.
Parsers are generators: memory use is independent of file size, and events
come out in file order. Malformed rows are counted, not fatal, unless
strict mode is requested.
"""

import csv
import enum
import os
from dataclasses import dataclass
from datetime import datetime

from .errors import DataError, RowError, SchemaError

TIMESTAMP_FORMAT = "%m/%d/%Y %H:%M:%S"

# Exact canonical headers, one per source file.
LOGON_HEADER = ("id", "date", "user", "pc", "activity")
DEVICE_HEADER = ("id", "date", "user", "pc", "activity")
HTTP_HEADER = ("id", "date", "user", "pc", "url")
FILE_HEADER = ("id", "date", "user", "pc", "filename")
PSYCHOMETRIC_HEADER = ("employee_name", "user_id", "O", "C", "E", "A", "N")
LDAP_HEADER = ("employee_name", "user_id", "email", "role")
ANSWERS_HEADER = ("scenario", "user_id", "start", "end")


class EventKind(enum.Enum):
    LOGON = "Logon"
    LOGOFF = "Logoff"
    DEVICE_CONNECT = "Connect"
    DEVICE_DISCONNECT = "Disconnect"
    HTTP = "Http"
    FILE_ACCESS = "FileAccess"


class SourceKind(enum.Enum):
    LOGON = "logon"
    DEVICE = "device"
    HTTP = "http"
    FILE = "file"


_ACTIVITY_TO_KIND = {
    (SourceKind.LOGON, "Logon"): EventKind.LOGON,
    (SourceKind.LOGON, "Logoff"): EventKind.LOGOFF,
    (SourceKind.DEVICE, "Connect"): EventKind.DEVICE_CONNECT,
    (SourceKind.DEVICE, "Disconnect"): EventKind.DEVICE_DISCONNECT,
}

_SOURCE_HEADERS = {
    SourceKind.LOGON: LOGON_HEADER,
    SourceKind.DEVICE: DEVICE_HEADER,
    SourceKind.HTTP: HTTP_HEADER,
    SourceKind.FILE: FILE_HEADER,
}


@dataclass(frozen=True, slots=True)
class LogEvent:
    """One normalized row from any of the four activity logs."""

    event_id: str
    timestamp: datetime
    user_id: str
    pc_id: str
    kind: EventKind
    detail: str | None = None

    def to_row(self) -> str:
        """Serialize back to the source CSV row (byte-for-byte for canonical rows)."""
        ts = format_timestamp(self.timestamp)
        if self.kind in (EventKind.HTTP, EventKind.FILE_ACCESS):
            last = self.detail if self.detail is not None else ""
        else:
            last = self.kind.value
        return f"{self.event_id},{ts},{self.user_id},{self.pc_id},{last}"


@dataclass(frozen=True, slots=True)
class EmployeeRecord:
    user_id: str
    month: str  # "YYYY-MM"
    role: str


@dataclass(frozen=True, slots=True)
class PsychometricProfile:
    """Big-five personality scores, each an integer in [1, 100], O/C/E/A/N order."""

    user_id: str
    scores: tuple[int, int, int, int, int]


@dataclass(frozen=True, slots=True)
class ThreatAnswer:
    user_id: str
    scenario: int
    start: datetime
    end: datetime


class RowErrorCollector:
    """Counts malformed rows and keeps the first few for reporting."""

    def __init__(self, keep: int = 20):
        self.count = 0
        self.samples: list[RowError] = []
        self._keep = keep

    def add(self, err: RowError):
        self.count += 1
        if len(self.samples) < self._keep:
            self.samples.append(err)

    def __bool__(self):
        return self.count > 0


def parse_timestamp(text: str) -> datetime:
    """Parse "MM/DD/YYYY HH:MM:SS". Much faster than strptime; format is fixed."""
    if len(text) != 19 or text[2] != "/" or text[5] != "/" or text[10] != " " \
            or text[13] != ":" or text[16] != ":":
        raise ValueError(f"timestamp {text!r} does not match MM/DD/YYYY HH:MM:SS")
    return datetime(
        int(text[6:10]), int(text[0:2]), int(text[3:5]),
        int(text[11:13]), int(text[14:16]), int(text[17:19]),
    )


def format_timestamp(ts: datetime) -> str:
    return (f"{ts.month:02d}/{ts.day:02d}/{ts.year:04d} "
            f"{ts.hour:02d}:{ts.minute:02d}:{ts.second:02d}")


def _check_header(path, header_row, expected):
    """Map expected column names to indices; extra columns are tolerated."""
    positions = {}
    for name in expected:
        if name not in header_row:
            raise SchemaError(path, f"missing column {name!r} in header {header_row!r}")
        positions[name] = header_row.index(name)
    return positions


def parse_log_file(path, source_kind: SourceKind, *, errors: RowErrorCollector | None = None,
                   strict: bool = False):
    """Yield LogEvents from one activity log, in file order.

    Malformed rows are recorded in `errors` (if given) and skipped; with
    strict=True the first bad row raises instead.
    """
    expected = _SOURCE_HEADERS[source_kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(path, "file is empty, expected a header row")
        pos = _check_header(path, header, expected)
        idx = [pos[name] for name in expected]
        for row in reader:
            line_no = reader.line_num
            try:
                yield _row_to_event(row, idx, source_kind, path, line_no)
            except RowError as err:
                if strict:
                    raise
                if errors is not None:
                    errors.add(err)


def _row_to_event(row, idx, source_kind, path, line_no) -> LogEvent:
    try:
        fields = [row[i] for i in idx]
    except IndexError:
        raise RowError(path, line_no, f"expected {len(idx)} columns, got {len(row)}")
    event_id, date_text, user, pc, last = fields
    try:
        ts = parse_timestamp(date_text)
    except ValueError as exc:
        raise RowError(path, line_no, str(exc))
    if source_kind in (SourceKind.HTTP, SourceKind.FILE):
        kind = EventKind.HTTP if source_kind is SourceKind.HTTP else EventKind.FILE_ACCESS
        return LogEvent(event_id, ts, user, pc, kind, last)
    kind = _ACTIVITY_TO_KIND.get((source_kind, last))
    if kind is None:
        raise RowError(path, line_no, f"unknown activity {last!r} for {source_kind.value} log")
    return LogEvent(event_id, ts, user, pc, kind)


def load_employee_months(ldap_dir) -> dict[str, dict[str, EmployeeRecord]]:
    """Load LDAP/YYYY-MM.csv files into {month: {user_id: record}}."""
    months: dict[str, dict[str, EmployeeRecord]] = {}
    if not os.path.isdir(ldap_dir):
        return months
    for name in sorted(os.listdir(ldap_dir)):
        if not name.endswith(".csv"):
            continue
        month = name[:-4]
        if len(month) != 7 or month[4] != "-" or not (month[:4] + month[5:]).isdigit():
            raise SchemaError(os.path.join(ldap_dir, name),
                              "employee record files must be named YYYY-MM.csv")
        path = os.path.join(ldap_dir, name)
        records: dict[str, EmployeeRecord] = {}
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise SchemaError(path, "file is empty, expected a header row")
            pos = _check_header(path, header, LDAP_HEADER)
            for row in reader:
                user = row[pos["user_id"]]
                if user in records:
                    raise DataError(f"{path}: duplicate user {user!r} for month {month}")
                records[user] = EmployeeRecord(user, month, row[pos["role"]])
        months[month] = records
    return months


def load_psychometrics(path) -> list[PsychometricProfile]:
    """Load per-user big-five scores, validating the [1, 100] bounds."""
    profiles = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(path, "file is empty, expected a header row")
        pos = _check_header(path, header, PSYCHOMETRIC_HEADER)
        score_idx = [pos[c] for c in ("O", "C", "E", "A", "N")]
        for row in reader:
            user = row[pos["user_id"]]
            try:
                scores = tuple(int(row[i]) for i in score_idx)
            except ValueError:
                raise DataError(f"{path}: non-integer score for user {user!r}")
            for s in scores:
                if not 1 <= s <= 100:
                    raise DataError(f"{path}: score {s} out of [1, 100] for user {user!r}")
            profiles.append(PsychometricProfile(user, scores))
    return profiles


def load_answers(path) -> list[ThreatAnswer]:
    """Load the ground-truth insider list with attack windows."""
    answers = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(path, "file is empty, expected a header row")
        pos = _check_header(path, header, ANSWERS_HEADER)
        for row in reader:
            line_no = reader.line_num
            try:
                scenario = int(row[pos["scenario"]])
                start = parse_timestamp(row[pos["start"]])
                end = parse_timestamp(row[pos["end"]])
            except ValueError as exc:
                raise RowError(path, line_no, str(exc))
            if scenario not in (1, 2, 3):
                raise RowError(path, line_no, f"scenario must be 1, 2 or 3, got {scenario}")
            if start > end:
                raise RowError(path, line_no, "attack window start is after its end")
            answers.append(ThreatAnswer(row[pos["user_id"]], scenario, start, end))
    return answers


def month_of(ts) -> str:
    return f"{ts.year:04d}-{ts.month:02d}"


def next_month(month: str) -> str:
    year, mon = int(month[:4]), int(month[5:7])
    if mon == 12:
        return f"{year + 1:04d}-01"
    return f"{year:04d}-{mon + 1:02d}"
