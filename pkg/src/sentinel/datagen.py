"""Deterministic synthetic organization generator.

Produces a corpus in the same file formats the ingest module reads: four
activity logs, monthly employee records, a psychometric table, a ground
truth answers file, and a config.json echo of the generating parameters.

Behavioral model: benign employees log on each weekday near a personal
mean time inside work hours (normal jitter), browse a little, and a
device-capable subset connects removable media at a stable personal rate.
Each insider is drawn from the complement of the device-capable set, works
normally until a short attack window late in the period, then logs on
after hours, connects a device for the first time, copies a file, uploads
to wikileaks.org, and vanishes from the next month's employee record.

Everything is a pure function of GenConfig: the same config yields a
byte-identical output tree. Events are generated one month at a time so
memory stays flat regardless of the date range.
"""

import json
import os
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

from .errors import ConfigError
from .seeding import derive_rng
from . import ingest

_FIRST_NAMES = (
    "Ada", "Ben", "Cora", "Dev", "Elena", "Femi", "Gwen", "Hugo", "Iris",
    "Jonas", "Kira", "Liam", "Mona", "Nils", "Odette", "Pavel", "Quinn",
    "Rosa", "Sam", "Tara", "Ugo", "Vera", "Wade", "Xena", "Yuri", "Zoe",
)
_LAST_NAMES = (
    "Abbott", "Baker", "Chen", "Dias", "Eriksen", "Fuentes", "Grant",
    "Hale", "Ito", "Jensen", "Kovacs", "Lund", "Mbeki", "Novak", "Okafor",
    "Park", "Quist", "Reyes", "Singh", "Tanaka", "Usman", "Vogel",
    "Weber", "Xu", "Young", "Zhang",
)
_ROLES = (
    "Engineer", "Analyst", "Manager", "Technician", "Scientist",
    "Administrator", "Director", "Specialist",
)
_BENIGN_SITES = (
    "http://www.dailynews.example.com", "http://search.example.com",
    "http://mail.example.org", "http://forum.example.net",
    "http://weather.example.com", "http://sports.example.org",
    "http://recipes.example.net", "http://maps.example.com",
)
_UPLOAD_URL = "http://wikileaks.org/upload"

_LOG_FILES = ("logon.csv", "device.csv", "http.csv", "file.csv")
_HEADERS = {
    "logon.csv": ingest.LOGON_HEADER,
    "device.csv": ingest.DEVICE_HEADER,
    "http.csv": ingest.HTTP_HEADER,
    "file.csv": ingest.FILE_HEADER,
}
_ID_PREFIX = {"logon.csv": "L", "device.csv": "D", "http.csv": "H", "file.csv": "F"}


@dataclass(frozen=True)
class GenConfig:
    seed: int
    n_users: int = 1000
    start_date: date = date(2010, 1, 1)
    end_date: date = date(2010, 7, 31)
    n_insiders: int = 30
    fraction_device_users: float = 0.25
    work_hours: tuple[int, int] = (8, 17)
    logon_jitter_minutes: float = 30.0
    attack_days: int = 3

    def __post_init__(self):
        if self.n_users < 1:
            raise ConfigError("n_users must be at least 1")
        if not 0 <= self.n_insiders <= self.n_users:
            raise ConfigError("n_insiders must be in [0, n_users]")
        if self.start_date >= self.end_date:
            raise ConfigError("start_date must precede end_date")
        if not 0 < self.fraction_device_users <= 1:
            raise ConfigError("fraction_device_users must be in (0, 1]")
        ws, we = self.work_hours
        if not 0 <= ws < we <= 23:
            raise ConfigError("work_hours must satisfy 0 <= start < end <= 23")
        if self.logon_jitter_minutes <= 0:
            raise ConfigError("logon_jitter_minutes must be positive")
        if self.attack_days < 1:
            raise ConfigError("attack_days must be at least 1")

    def to_json(self) -> str:
        data = {
            "seed": self.seed,
            "n_users": self.n_users,
            "start_date": self.start_date.isoformat(),
            "end_date": self.end_date.isoformat(),
            "n_insiders": self.n_insiders,
            "fraction_device_users": self.fraction_device_users,
            "work_hours": list(self.work_hours),
            "logon_jitter_minutes": self.logon_jitter_minutes,
            "attack_days": self.attack_days,
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        data = json.loads(text)
        data["start_date"] = date.fromisoformat(data["start_date"])
        data["end_date"] = date.fromisoformat(data["end_date"])
        data["work_hours"] = tuple(data["work_hours"])
        return cls(**data)


@dataclass
class GenSummary:
    out_dir: str
    row_counts: dict = field(default_factory=dict)
    insider_ids: list = field(default_factory=list)
    months: list = field(default_factory=list)


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    rows_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _month_span(start: date, end: date) -> list[str]:
    months = []
    y, m = start.year, start.month
    while (y, m) <= (end.year, end.month):
        months.append(f"{y:04d}-{m:02d}")
        if m == 12:
            y, m = y + 1, 1
        else:
            m += 1
    return months


def _month_days(month: str, start: date, end: date) -> list[date]:
    """Calendar days of `month` clipped to [start, end]."""
    y, m = int(month[:4]), int(month[5:7])
    day = date(y, m, 1)
    days = []
    while day.month == m:
        if start <= day <= end:
            days.append(day)
        day += timedelta(days=1)
    return days


def _fmt(day: date, seconds: int) -> str:
    seconds = min(seconds, 86399)
    hh, rem = divmod(seconds, 3600)
    mm, ss = divmod(rem, 60)
    return (f"{day.month:02d}/{day.day:02d}/{day.year:04d} "
            f"{hh:02d}:{mm:02d}:{ss:02d}")


class _UserProfile:
    """Static per-user traits, a pure function of (seed, user index)."""

    def __init__(self, idx, config, is_device_user, is_insider):
        rng = derive_rng(config.seed, "profile", idx)
        self.idx = idx
        self.user_id = f"{_FIRST_NAMES[idx % 26][0]}{_LAST_NAMES[idx % 26][0]}" \
                       f"{chr(65 + (idx // 676) % 26)}{idx:04d}"
        self.name = (f"{_FIRST_NAMES[int(rng.integers(26))]} "
                     f"{_LAST_NAMES[int(rng.integers(26))]}")
        self.role = _ROLES[int(rng.integers(len(_ROLES)))]
        self.pc = f"PC-{idx:04d}"
        self.is_device_user = is_device_user
        self.is_insider = is_insider
        ws, we = config.work_hours
        self.logon_mean = float(rng.uniform(ws * 60, we * 60))
        self.attendance = float(rng.uniform(0.90, 0.99))
        self.device_rate = float(rng.uniform(0.15, 0.70)) if is_device_user else 0.0
        self.psych = tuple(int(v) for v in rng.integers(1, 101, size=5))


def generate(config: GenConfig, out_dir) -> GenSummary:
    """Write a full synthetic corpus under out_dir and return its summary."""
    months = _month_span(config.start_date, config.end_date)
    if len(months) < 2:
        raise ConfigError("date range must span at least two calendar months "
                          "(attack month plus the departure month)")

    n_device = int(config.fraction_device_users * config.n_users)
    if n_device < 1:
        raise ConfigError("fraction_device_users leaves no device-capable users")
    order = derive_rng(config.seed, "roles").permutation(config.n_users)
    device_idx = set(int(i) for i in order[:n_device])
    eligible = [int(i) for i in order[n_device:]]
    if config.n_insiders > len(eligible):
        raise ConfigError(
            f"n_insiders={config.n_insiders} exceeds the {len(eligible)} users "
            "with no benign device usage")
    insider_idx = set(eligible[:config.n_insiders])

    users = [_UserProfile(i, config, i in device_idx, i in insider_idx)
             for i in range(config.n_users)]

    attack_month = months[-2]
    final_month = months[-1]
    attack_windows = _plan_attacks(config, users, attack_month)

    os.makedirs(out_dir, exist_ok=True)
    os.makedirs(os.path.join(out_dir, "LDAP"), exist_ok=True)

    _write_psychometrics(out_dir, users)
    _write_ldap(out_dir, users, months, final_month)
    _write_answers(out_dir, users, attack_windows)
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        fh.write(config.to_json())

    counters = {name: 0 for name in _LOG_FILES}
    handles = {}
    try:
        for name in _LOG_FILES:
            handles[name] = open(os.path.join(out_dir, name), "w")
            handles[name].write(",".join(_HEADERS[name]) + "\n")
        for month in months:
            batch = {name: [] for name in _LOG_FILES}
            days = _month_days(month, config.start_date, config.end_date)
            for user in users:
                _emit_user_month(batch, user, month, days, config,
                                 attack_windows.get(user.idx), final_month)
            for name in _LOG_FILES:
                batch[name].sort(key=lambda item: item[0])
                prefix = _ID_PREFIX[name]
                fh = handles[name]
                n = counters[name]
                for _key, line in batch[name]:
                    n += 1
                    fh.write(f"{{{prefix}{n:07d}}},{line}\n")
                counters[name] = n
    finally:
        for fh in handles.values():
            fh.close()

    summary = GenSummary(out_dir=str(out_dir), row_counts=dict(counters),
                         insider_ids=[users[i].user_id for i in sorted(insider_idx)],
                         months=months)
    return summary


def _plan_attacks(config, users, attack_month):
    """Pick each insider's contiguous attack-day window inside the attack month."""
    days = _month_days(attack_month, config.start_date, config.end_date)
    if len(days) < config.attack_days:
        raise ConfigError("attack month too short for the configured attack_days")
    windows = {}
    for user in users:
        if not user.is_insider:
            continue
        rng = derive_rng(config.seed, "attack", user.idx)
        first = int(rng.integers(len(days) - config.attack_days + 1))
        windows[user.idx] = days[first:first + config.attack_days]
    return windows


def _emit_user_month(batch, user, month, days, config, attack_window, final_month):
    """Append one user's events for one month to the per-file batches.

    Sort keys are seconds since the month start, so sorting a batch yields a
    chronologically ordered file.
    """
    if user.is_insider and month == final_month:
        return  # left the organization after the attack month
    rng = derive_rng(config.seed, "events", user.idx, month)
    attack_days = set(attack_window or ())

    workdays = [d for d in days if d.weekday() < 5 and d not in attack_days]
    n = len(workdays)
    if n:
        present = rng.random(n) < user.attendance
        logon_noise = rng.normal(0.0, config.logon_jitter_minutes, size=n)
        session_len = rng.normal(8 * 60, 30, size=n)
        seconds = rng.integers(0, 60, size=6 * n)
        device_draw = rng.random(n)
        connect_frac = rng.random(n)
        http_counts = rng.poisson(2.0, size=n)
        base = days[0].toordinal()
        s_i = 0
        for i, day in enumerate(workdays):
            if not present[i]:
                continue
            day_key = (day.toordinal() - base) * 86400
            logon_min = user.logon_mean + logon_noise[i]
            logon_s = int(min(max(logon_min * 60, 0) + seconds[s_i], 86399))
            logoff_s = int(min(logon_s + max(session_len[i], 60) * 60, 86399))
            batch["logon.csv"].append(
                (day_key + logon_s,
                 f"{_fmt(day, logon_s)},{user.user_id},{user.pc},Logon"))
            batch["logon.csv"].append(
                (day_key + logoff_s,
                 f"{_fmt(day, logoff_s)},{user.user_id},{user.pc},Logoff"))
            if user.is_device_user and device_draw[i] < user.device_rate:
                span = max(logoff_s - logon_s - 3600, 3600)
                con_s = logon_s + 1800 + int(connect_frac[i] * span)
                dis_s = min(con_s + 600 + int(seconds[s_i + 1]) * 60, 86399)
                batch["device.csv"].append(
                    (day_key + con_s,
                     f"{_fmt(day, con_s)},{user.user_id},{user.pc},Connect"))
                batch["device.csv"].append(
                    (day_key + dis_s,
                     f"{_fmt(day, dis_s)},{user.user_id},{user.pc},Disconnect"))
                if connect_frac[i] < 0.5:
                    f_s = min(con_s + 120 + int(seconds[s_i + 2]), 86399)
                    batch["file.csv"].append(
                        (day_key + f_s,
                         f"{_fmt(day, f_s)},{user.user_id},{user.pc},"
                         f"doc-{user.idx:04d}-{i:03d}.pdf"))
            for j in range(int(http_counts[i])):
                h_s = min(logon_s + 900 + int(rng.integers(max(logoff_s - logon_s - 900, 1))),
                          86399)
                site = _BENIGN_SITES[int(rng.integers(len(_BENIGN_SITES)))]
                batch["http.csv"].append(
                    (day_key + h_s,
                     f"{_fmt(day, h_s)},{user.user_id},{user.pc},{site}/page{j}"))
            s_i += 3
    if attack_window and attack_days & set(days):
        _emit_attack_days(batch, user, sorted(attack_days & set(days)), days[0], rng)


def _emit_attack_days(batch, user, window_days, month_first, rng):
    """After-hours logon, first-ever device use, file copy, and upload per day."""
    base = month_first.toordinal()
    for k, day in enumerate(window_days):
        day_key = (day.toordinal() - base) * 86400
        logon_s = int(rng.uniform(22 * 3600, 23 * 3600 + 30 * 60))
        con_s = logon_s + 60 * int(rng.integers(2, 6))
        file_s = con_s + 60 * int(rng.integers(1, 4))
        http_s = file_s + 60 * int(rng.integers(1, 4))
        dis_s = http_s + 60 * int(rng.integers(1, 4))
        logoff_s = min(dis_s + 60 * int(rng.integers(1, 4)), 86399)
        batch["logon.csv"].append(
            (day_key + logon_s,
             f"{_fmt(day, logon_s)},{user.user_id},{user.pc},Logon"))
        batch["logon.csv"].append(
            (day_key + logoff_s,
             f"{_fmt(day, logoff_s)},{user.user_id},{user.pc},Logoff"))
        batch["device.csv"].append(
            (day_key + con_s,
             f"{_fmt(day, con_s)},{user.user_id},{user.pc},Connect"))
        batch["device.csv"].append(
            (day_key + dis_s,
             f"{_fmt(day, dis_s)},{user.user_id},{user.pc},Disconnect"))
        batch["file.csv"].append(
            (day_key + file_s,
             f"{_fmt(day, file_s)},{user.user_id},{user.pc},"
             f"exfil-{user.idx:04d}-{k}.zip"))
        batch["http.csv"].append(
            (day_key + http_s,
             f"{_fmt(day, http_s)},{user.user_id},{user.pc},{_UPLOAD_URL}"))


def _write_psychometrics(out_dir, users):
    with open(os.path.join(out_dir, "psychometric.csv"), "w") as fh:
        fh.write(",".join(ingest.PSYCHOMETRIC_HEADER) + "\n")
        for u in users:
            o, c, e, a, n = u.psych
            fh.write(f"{u.name},{u.user_id},{o},{c},{e},{a},{n}\n")


def _write_ldap(out_dir, users, months, final_month):
    for month in months:
        path = os.path.join(out_dir, "LDAP", f"{month}.csv")
        with open(path, "w") as fh:
            fh.write(",".join(ingest.LDAP_HEADER) + "\n")
            for u in users:
                if u.is_insider and month == final_month:
                    continue
                fh.write(f"{u.name},{u.user_id},{u.user_id}@dtaa.com,{u.role}\n")


def _write_answers(out_dir, users, attack_windows):
    # Window bounds bracket every attack event: activity starts at or after
    # 22:00 on the first day and all events clamp to 23:59:59 of their day.
    with open(os.path.join(out_dir, "answers.csv"), "w") as fh:
        fh.write(",".join(ingest.ANSWERS_HEADER) + "\n")
        for idx in sorted(attack_windows):
            user = users[idx]
            window = attack_windows[idx]
            first, last = window[0], window[-1]
            start = ingest.format_timestamp(
                datetime(first.year, first.month, first.day, 22, 0, 0))
            end = ingest.format_timestamp(
                datetime(last.year, last.month, last.day, 23, 59, 59))
            fh.write(f"1,{user.user_id},{start},{end}\n")


def validate_corpus(corpus_dir) -> ValidationReport:
    """Check a corpus directory for schema, referential, and ordering problems."""
    report = ValidationReport()
    corpus_dir = str(corpus_dir)

    expected = list(_LOG_FILES) + ["psychometric.csv", "answers.csv"]
    for name in expected:
        if not os.path.isfile(os.path.join(corpus_dir, name)):
            report.violations.append(f"missing file: {name}")
    ldap_dir = os.path.join(corpus_dir, "LDAP")
    if not os.path.isdir(ldap_dir) or not any(
            f.endswith(".csv") for f in os.listdir(ldap_dir)):
        report.violations.append("missing monthly employee records: LDAP/*.csv")
    if report.violations:
        return report

    try:
        months = ingest.load_employee_months(ldap_dir)
    except Exception as exc:
        report.violations.append(f"LDAP: {exc}")
        return report
    known_users = set()
    for records in months.values():
        known_users.update(records)

    source_map = {
        "logon.csv": ingest.SourceKind.LOGON,
        "device.csv": ingest.SourceKind.DEVICE,
        "http.csv": ingest.SourceKind.HTTP,
        "file.csv": ingest.SourceKind.FILE,
    }
    for name, source in source_map.items():
        path = os.path.join(corpus_dir, name)
        errors = ingest.RowErrorCollector()
        last_ts = None
        orphans = set()
        try:
            for event in ingest.parse_log_file(path, source, errors=errors):
                report.rows_checked += 1
                if last_ts is not None and event.timestamp < last_ts:
                    report.violations.append(
                        f"{name}: timestamps not monotone at event {event.event_id}")
                last_ts = event.timestamp
                if event.user_id not in known_users:
                    orphans.add(event.user_id)
        except Exception as exc:
            report.violations.append(f"{name}: {exc}")
            continue
        for err in errors.samples:
            report.violations.append(f"{name}: line {err.line_no}: {err.message}")
        if errors.count > len(errors.samples):
            report.violations.append(
                f"{name}: {errors.count - len(errors.samples)} further malformed rows")
        for user in sorted(orphans):
            report.violations.append(
                f"{name}: user {user} appears in no monthly employee record")

    try:
        ingest.load_psychometrics(os.path.join(corpus_dir, "psychometric.csv"))
    except Exception as exc:
        report.violations.append(f"psychometric.csv: {exc}")
    try:
        ingest.load_answers(os.path.join(corpus_dir, "answers.csv"))
    except Exception as exc:
        report.violations.append(f"answers.csv: {exc}")
    return report
