"""Command-line front end.

    negwave --scenario hardy --command report
    negwave --config configs/rotated-pbs.ini --format json --output out.json
    negwave --command verify --input out.json

Exit codes: 0 success, 1 domain/runtime error, 2 configuration error.
Diagnostics go to stderr; stdout carries only the rendered report.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError, NegwaveError
from .fockstate import (
    EQ_TOL,
    StateSpace,
    StateVector,
    clean_part,
    fmt_amp,
    fmt_real,
    max_abs_diff,
    parse_ket,
    render_ket,
    text_table,
)
from .negative import Decomposition, cancellation_report, is_factorizable, reconstruct
from .scenarios import (
    SCENARIOS,
    build_scenario,
    chsh_value,
    conditional_distribution,
    correlation,
    sample,
)

SCHEMA_VERSION = 1
COMMANDS = ("decompose", "report", "conditional", "correlate", "chsh", "sample", "verify")
FORMATS = ("text", "csv", "json")
CONFIG_SECTION = "run"
CONFIG_KEYS = (
    "scenario",
    "theta",
    "command",
    "angles",
    "given",
    "settings",
    "n",
    "seed",
    "format",
    "output",
    "paper_literal",
    "input",
)
LITERAL_SCENARIOS = ("single-photon-bs", "detector-atoms")


@dataclass(frozen=True)
class RunConfig:
    scenario: str | None
    command: str
    theta: float | None = None
    angles: tuple[float, ...] = ()
    given: tuple[str, str] | None = None
    settings: tuple[tuple[str, Any], ...] = ()
    n: int = 10000
    seed: int = 0
    format: str = "text"
    output: str | None = None
    paper_literal: bool = False
    input: str | None = None

    def scenario_params(self) -> dict:
        return {"theta": self.theta, "paper_literal": self.paper_literal}


# -- parsing -----------------------------------------------------------------

_PI_EXPR = re.compile(r"^\s*(-?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """Float, or a multiple of pi such as ``pi/8``, ``3pi/8``, ``-0.5*pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_EXPR.match(text)
    if not m:
        raise ValueError(f"not an angle: {text!r}")
    sign, mult, div = m.groups()
    value = (float(mult) if mult else 1.0) * math.pi / (float(div) if div else 1.0)
    return -value if sign else value


def _parse_pair(text: str, what: str) -> tuple[str, str]:
    sub, sep, val = text.partition("=")
    if not sep or not sub.strip() or not val.strip():
        raise ValueError(f"{what} must look like SUBSYSTEM=VALUE, got {text!r}")
    return sub.strip(), val.strip()


def _parse_setting(text: str) -> tuple[str, Any]:
    sub, val = _parse_pair(text, "setting")
    return sub, "computational" if val == "computational" else parse_angle(val)


def _parse_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="negwave", description="Indep/Negative decomposition reports")
    p.add_argument("--config", help="INI file with a [run] section; flags override it")
    p.add_argument("--scenario", help="one of: " + ", ".join(SCENARIOS))
    p.add_argument("--command", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--theta", help="rotation angle for rotated-pbs (radians or e.g. pi/8)")
    p.add_argument("--angles", nargs="+", help="correlate: pairs t1 t2 ...; chsh: a a' b b'")
    p.add_argument("--given", help="conditional: SUBSYSTEM=LABEL")
    p.add_argument(
        "--setting", action="append", dest="settings", help="SUBSYSTEM=ANGLE|computational (repeatable)"
    )
    p.add_argument("--n", help="sample size")
    p.add_argument("--seed", help="sampling seed")
    p.add_argument("--format", help="text | csv | json")
    p.add_argument("--output", help="destination file (default stdout)")
    p.add_argument("--paper-literal", dest="paper_literal", action="store_const", const="true")
    p.add_argument("--input", help="verify: JSON output of a decompose run")
    return p


def _line_of(path: str, key: str) -> int | None:
    pat = re.compile(rf"^\s*{re.escape(key)}\s*[=:]", re.IGNORECASE)
    for no, line in enumerate(Path(path).read_text().splitlines(), 1):
        if pat.match(line):
            return no
    return None


def _read_config_file(path: str) -> dict[str, str]:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", key="config") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}", key="config") from None
    if not cp.has_section(CONFIG_SECTION):
        raise ConfigError(f"config file lacks a [{CONFIG_SECTION}] section", key="config")
    extra = [s for s in cp.sections() if s != CONFIG_SECTION]
    if extra:
        raise ConfigError(f"unknown section [{extra[0]}]", key=extra[0], line=_line_of(path, "[" + extra[0]))
    values = dict(cp.items(CONFIG_SECTION))
    for key in values:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}", key=key, line=_line_of(path, key))
    if "settings" in values:
        values["settings"] = [s for s in re.split(r"[,\s]+", values["settings"]) if s]
    if "angles" in values:
        values["angles"] = values["angles"].split()
    values["__path__"] = path
    return values


def parse_config(argv: list[str] | None = None) -> RunConfig:
    """Flags, optionally layered over a ``--config`` file, into a RunConfig."""
    ns = build_parser().parse_args(argv)
    raw: dict[str, Any] = {}
    path = None
    if ns.config:
        raw = _read_config_file(ns.config)
        path = raw.pop("__path__")
    for key in CONFIG_KEYS:
        val = getattr(ns, key, None)
        if val is not None:
            raw[key] = val

    def fail(key, msg):
        line = _line_of(path, key) if path and key in raw and getattr(ns, key, None) is None else None
        raise ConfigError(msg, key=key, line=line)

    def convert(key, fn):
        if key not in raw:
            return None
        try:
            return fn(raw[key])
        except (TypeError, ValueError) as exc:
            fail(key, f"bad value for {key}: {exc}")

    command = raw.get("command")
    if command is None:
        raise ConfigError("missing --command", key="command")
    if command not in COMMANDS:
        fail("command", f"unknown command {command!r}")
    scenario = raw.get("scenario")
    if command != "verify":
        if scenario is None:
            raise ConfigError("missing --scenario", key="scenario")
        if scenario not in SCENARIOS:
            fail("scenario", f"unknown scenario {scenario!r}")

    fmt = raw.get("format", "text")
    if fmt not in FORMATS:
        fail("format", f"unknown format {fmt!r}")
    theta = convert("theta", parse_angle)
    angles = convert("angles", lambda xs: tuple(parse_angle(x) for x in xs)) or ()
    given = convert("given", lambda s: _parse_pair(s, "given"))
    settings = convert("settings", lambda xs: tuple(_parse_setting(x) for x in xs)) or ()
    n = convert("n", int)
    seed = convert("seed", int)
    literal = convert("paper_literal", _parse_bool) or False

    if scenario == "rotated-pbs" and theta is None:
        fail("theta", "rotated-pbs requires theta")
    if theta is not None and scenario != "rotated-pbs":
        fail("theta", f"theta is not a parameter of {scenario!r}")
    if literal and scenario not in LITERAL_SCENARIOS:
        fail("paper_literal", f"paper_literal is not a parameter of {scenario!r}")
    if command == "chsh" and len(angles) != 4:
        fail("angles", "chsh needs exactly four angles: a a' b b'")
    if command == "correlate" and (not angles or len(angles) % 2):
        fail("angles", "correlate needs angle pairs: t1 t2 [t1 t2 ...]")
    if command == "conditional" and given is None:
        fail("given", "conditional needs --given SUBSYSTEM=LABEL")
    if command == "verify" and not raw.get("input"):
        fail("input", "verify needs --input FILE")
    if n is not None and n < 1:
        fail("n", "n must be >= 1")

    return RunConfig(
        scenario=scenario,
        command=command,
        theta=theta,
        angles=angles,
        given=given,
        settings=settings,
        n=10000 if n is None else n,
        seed=0 if seed is None else seed,
        format=fmt,
        output=raw.get("output"),
        paper_literal=literal,
        input=raw.get("input"),
    )


# -- running -----------------------------------------------------------------


@dataclass
class Report:
    command: str
    scenario: str | None
    params: dict
    columns: list[str]
    rows: list[dict]
    fields: dict = field(default_factory=dict)


def _state_rows(space: StateSpace, states: dict[str, StateVector]) -> list[dict]:
    kets = set()
    for s in states.values():
        kets |= set(s.terms)
    rows = []
    for ket in sorted(kets, key=space.sort_key):
        row = {"ket": render_ket(space, ket)}
        for name, s in states.items():
            row[name] = s.amplitude(ket)
        rows.append(row)
    return rows


def _residual_field(d: Decomposition) -> list[dict]:
    r = d.residual()
    return [{"ket": render_ket(r.space, k), "amp": a} for k, a in r.terms.items()]


def _space_field(space: StateSpace) -> dict:
    return {"subsystems": list(space.subsystems), "alphabets": [list(a) for a in space.alphabets]}


def _scenario_params(sc) -> dict:
    return {k: v for k, v in sc.params.items()}


def run(cfg: RunConfig) -> Report:
    if cfg.command == "verify":
        return _verify(cfg)
    sc = build_scenario(cfg.scenario, **cfg.scenario_params())
    d = sc.decomposition
    params = _scenario_params(sc)
    fields: dict = {}
    if cfg.paper_literal:
        fields["paper_literal_residual"] = _residual_field(d)
    settings = dict(cfg.settings)
    if settings:
        fields["settings"] = ", ".join(f"{k}={fmt_real(v) if isinstance(v, float) else v}" for k, v in cfg.settings)

    if cfg.command == "decompose":
        rows = _state_rows(d.space, {"psi": d.psi, "indep": d.indep, "negative": d.negative})
        fields = {"alpha": d.alpha, "beta": d.beta, "space": _space_field(d.space), **fields}
        return Report("decompose", sc.name, params, ["ket", "psi", "indep", "negative"], rows, fields)

    if cfg.command == "report":
        rep = cancellation_report(d)
        rows = [
            {
                "ket": render_ket(rep.space, r.ket),
                "indep": r.indep,
                "negative": r.negative,
                "psi": r.psi,
                "status": r.status,
            }
            for r in rep.rows
        ]
        fields = {"alpha": d.alpha, "beta": d.beta, **fields}
        return Report("report", sc.name, params, ["ket", "indep", "negative", "psi", "status"], rows, fields)

    if cfg.command == "conditional":
        dist = conditional_distribution(sc.psi, cfg.given, settings)
        fields = {"given": f"{cfg.given[0]}={cfg.given[1]}", **fields}
        return Report("conditional", sc.name, params, ["outcome", "probability"], dist.records(), fields)

    if cfg.command == "correlate":
        pairs = list(zip(cfg.angles[::2], cfg.angles[1::2]))
        rows = [{"theta1": a, "theta2": b, "E": correlation(sc.psi, a, b)} for a, b in pairs]
        return Report("correlate", sc.name, params, ["theta1", "theta2", "E"], rows, fields)

    if cfg.command == "chsh":
        a, a2, b, b2 = cfg.angles
        row = {"a": a, "a'": a2, "b": b, "b'": b2, "S": chsh_value(sc.psi, a, a2, b, b2)}
        return Report("chsh", sc.name, params, ["a", "a'", "b", "b'", "S"], [row], fields)

    if cfg.command == "sample":
        res = sample(sc.psi, settings, cfg.n, cfg.seed)
        fields = {"n": res.n, "seed": res.seed, "generator": res.generator, **fields}
        return Report("sample", sc.name, params, ["outcome", "count"], res.records(), fields)

    raise ConfigError(f"unknown command {cfg.command!r}", key="command")


def _complex_of(row: dict, name: str) -> complex:
    return complex(float(row[name + "_re"]), float(row[name + "_im"]))


def load_decomposition(doc: dict) -> Decomposition:
    """Rebuild a Decomposition from the JSON rendering of ``decompose``."""
    if doc.get("schema_version") != SCHEMA_VERSION or doc.get("command") != "decompose":
        raise NegwaveError("input is not a decompose report of a supported schema version")
    f = doc["fields"]
    space = StateSpace(tuple(f["space"]["subsystems"]), tuple(tuple(a) for a in f["space"]["alphabets"]))
    states = {}
    for name in ("psi", "indep", "negative"):
        states[name] = StateVector(
            space, {parse_ket(space, r["ket"]): _complex_of(r, name) for r in doc["rows"]}
        )
    alpha = _complex_of(f, "alpha")
    beta = _complex_of(f, "beta")
    return Decomposition(states["psi"], states["indep"], states["negative"], alpha, beta)


def _verify(cfg: RunConfig) -> Report:
    try:
        doc = json.loads(Path(cfg.input).read_text())
    except (OSError, ValueError) as exc:
        raise NegwaveError(f"cannot read {cfg.input}: {exc}") from None
    try:
        d = load_decomposition(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise NegwaveError(f"malformed decompose report: {exc}") from None
    err = max_abs_diff(reconstruct(d), d.psi)
    factorizable, _ = is_factorizable(d.indep)
    # 12 significant digits survive the text round trip well inside EQ_TOL
    ok = err <= EQ_TOL and factorizable
    fields = {"reconstruction_error": err, "indep_factorizable": factorizable, "ok": ok}
    return Report("verify", doc.get("scenario"), doc.get("params", {}), [], [], fields)


# -- rendering ---------------------------------------------------------------


def _num(x: float) -> float:
    return float(fmt_real(x))


def _flatten(columns: list[str], row: dict) -> dict:
    """Split complex cells into ``name_re``/``name_im`` numeric columns."""
    out = {}
    for c in columns:
        v = row[c]
        if isinstance(v, complex):
            out[c + "_re"] = _num(clean_part(v.real))
            out[c + "_im"] = _num(clean_part(v.imag))
        elif isinstance(v, float):
            out[c] = _num(v)
        else:
            out[c] = v
    return out


def _json_value(v):
    if isinstance(v, complex):
        return {"re": _num(clean_part(v.real)), "im": _num(clean_part(v.imag))}
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _json_fields(fields: dict) -> dict:
    out = {}
    for k, v in fields.items():
        if isinstance(v, complex):
            out[k + "_re"] = _num(clean_part(v.real))
            out[k + "_im"] = _num(clean_part(v.imag))
        else:
            out[k] = _json_value(v)
    return out


def _text_value(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, complex):
        return fmt_amp(v)
    if isinstance(v, float):
        return fmt_real(v)
    if isinstance(v, dict) and set(v) == {"subsystems", "alphabets"}:
        return " ".join(f"{s}{{{','.join(a)}}}" for s, a in zip(v["subsystems"], v["alphabets"]))
    if isinstance(v, list) and all(isinstance(x, dict) and "amp" in x for x in v):
        if not v:
            return "0"
        return " + ".join(f"({fmt_amp(x['amp'])}){x['ket']}" for x in v)
    return str(v)


def _flat_columns(report: Report) -> list[str]:
    if not report.rows:
        return list(report.columns)
    return list(_flatten(report.columns, report.rows[0]))


def emit(report: Report, fmt: str) -> bytes:
    header = {"command": report.command, "scenario": report.scenario, **report.params}
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": report.command,
            "scenario": report.scenario,
            "params": _json_value(report.params),
            "fields": _json_fields(report.fields),
            "columns": _flat_columns(report),
            "rows": [_flatten(report.columns, r) for r in report.rows],
        }
        return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in {**header, **report.fields}.items():
            buf.write(f"# {k}: {_text_value(v)}\n")
        cols = _flat_columns(report)
        if cols:
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in report.rows:
                w.writerow({k: _text_value(v) for k, v in _flatten(report.columns, r).items()})
        return buf.getvalue().encode()
    if fmt == "text":
        lines = [f"{k}: {_text_value(v)}" for k, v in {**header, **report.fields}.items()]
        if report.columns:
            cells = [[_text_value(r[c]) for c in report.columns] for r in report.rows]
            lines += ["", text_table(report.columns, cells)]
        return ("\n".join(lines) + "\n").encode()
    raise ConfigError(f"unknown format {fmt!r}", key="format")


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"negwave: config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
        data = emit(report, cfg.format)
    except ConfigError as exc:
        print(f"negwave: config error: {exc}", file=sys.stderr)
        return 2
    except (NegwaveError, ValueError) as exc:
        print(f"negwave: error: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        try:
            Path(cfg.output).write_bytes(data)
        except OSError as exc:
            print(f"negwave: cannot write {cfg.output}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    if report.command == "verify" and not report.fields["ok"]:
        print("negwave: verification failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
