"""Command-line interface: ``littlewood <command> [<sub>] [options]``.

Every run resolves a config (defaults < ``--config`` JSON < flags), writes
its outputs atomically with a header line carrying the format version and
the config digest, and appends an entry to ``runlog.jsonl`` in the
workspace (``$LITTLEWOOD_WORKSPACE`` or ``--workspace``, default ``.``).

Exit codes: 0 ok, 1 certificate verification failed, 2 invalid input,
3 precision cap exceeded (partial results flagged), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import fcntl
import hashlib
import io
import json
import os
import statistics
import sys
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import cf, discrepancy as disc, scan, witness
from .exact import PrecisionExhausted, format_real, parse_real
from .intervals import Interval, fraction_str, parse_fraction
from .pseudo import ChainError, PseudoAbsSeq, geometric_growth_check, pseudo_abs, unit_identity_check

FORMAT_VERSION = 1
WORKSPACE_ENV = "LITTLEWOOD_WORKSPACE"
RUNLOG = "runlog.jsonl"

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_PRECISION, EXIT_IO = 0, 1, 2, 3, 4


class InputError(ValueError):
    pass


# -- config plumbing -------------------------------------------------------------

DEFAULTS: dict[str, dict] = {
    "cf expand": {"x": None, "digits": 20},
    "cf convergents": {"x": None, "K": 20},
    "cf sample": {"M": 3, "depth": 64, "seed": 0},
    "pseudo": {"D": None, "q": None, "K": 20, "C": None},
    "scan": {"kind": "dirichlet", "alpha": None, "beta": None, "shift": "0", "pseudo": None,
             "qmin": 1, "qmax": 1000, "eps": None, "shards": 1, "workers": 1,
             "candidates": "range", "K": 50, "rel_bits": scan.DEFAULT_REL_BITS},
    "disc exact": {"points": None, "K": [1, 2, 4, 8, 16, 32, 64, 100]},
    "disc et": {"seq": "pow2", "x": None, "u": 0, "v": 16},
    "disc scaling": {"M": 3, "seq": "pow2", "nmin": 16, "nmax": 4096, "samples": 20,
                     "seed": 0, "xs": None, "fit_min": 64, "workers": 1},
    "witness eq6": {"alpha": None, "beta": None, "gamma": "0", "eps": "1/5", "kmax": 100,
                    "path": "direct-scan", "exponent": "theorem", "workers": 1},
    "witness eq9": {"D": None, "beta": None, "delta": "0", "eps": "1/5", "kmax": 100,
                    "C": None, "exponent": "theorem", "workers": 1},
    "witness eq7": {"D": None, "beta": None, "delta": "0", "kmax": 100},
    "witness verify": {"file": None},
    "report": {"runs": []},
}
COMMON = ("out", "format")


def config_digest(config: dict) -> str:
    """sha256 of the canonical (sorted-key) JSON form."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def resolve_config(command: str, file_config: dict, flags: dict) -> dict:
    if command not in DEFAULTS:
        raise InputError(f"unknown command {command!r}")
    if file_config.get("command", command) != command:
        raise InputError(f"config is for {file_config['command']!r}, not {command!r}")
    allowed = set(DEFAULTS[command]) | set(COMMON) | {"command"}
    unknown = sorted(set(file_config) - allowed)
    if unknown:
        raise InputError(f"unknown config fields for {command!r}: {', '.join(unknown)}")
    config = {"command": command, **DEFAULTS[command], "out": None, "format": None}
    config.update({k: v for k, v in file_config.items() if k != "command"})
    config.update({k: v for k, v in flags.items() if k in allowed})
    return config


def _require(cfg: dict, *names):
    for n in names:
        if cfg.get(n) is None:
            raise InputError(f"missing required parameter --{n}")


def _real(text, name: str):
    try:
        return parse_real(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--{name}: {exc}") from None


def _frac(text, name: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--{name}: not a rational number: {text!r}") from None


def _pseudo(text, name: str = "D") -> PseudoAbsSeq:
    try:
        return PseudoAbsSeq.parse(text)
    except ChainError as exc:
        raise InputError(f"--{name}: {exc}") from None


# -- output ---------------------------------------------------------------------------

def experiment_config(config: dict) -> dict:
    """The config minus its output destination, so the same experiment
    written to two paths yields identical bytes."""
    return {k: v for k, v in config.items() if k != "out"}


def header(config: dict, partial: bool = False) -> dict:
    config = experiment_config(config)
    out = {"format": FORMAT_VERSION, "digest": config_digest(config), "config": config}
    if partial:
        out["partial"] = True
    return out


def render(kind: str, head: dict, payload) -> str:
    """CSV: a ``# {...}`` header line then RFC-4180 rows; JSON: header first."""
    if kind == "csv":
        buf = io.StringIO()
        buf.write("# " + json.dumps(head, sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(payload["columns"])
        writer.writerows(payload["rows"])
        return buf.getvalue()
    body = {"header": head}
    body.update(payload)
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def append_runlog(workspace: Path, entry: dict) -> None:
    workspace.mkdir(parents=True, exist_ok=True)
    with open(workspace / RUNLOG, "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
            fh.flush()
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def read_runlog(workspace: Path) -> list[dict]:
    path = workspace / RUNLOG
    if not path.exists():
        return []
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _pair(x: Interval | None) -> list[str]:
    return ["", ""] if x is None else [fraction_str(x.lo), fraction_str(x.hi)]


def _bool(x) -> str:
    return "" if x is None else ("true" if x else "false")


# -- commands ---------------------------------------------------------------------------
# Each returns (payload, summary, default format).  Payload for CSV is
# {"columns": [...], "rows": [...]}; any other dict renders as JSON.

def cmd_cf_expand(cfg):
    _require(cfg, "x")
    stream = cf.as_stream(_real(cfg["x"], "x"))
    n = int(cfg["digits"])
    if stream.length() is not None:
        n = min(n, stream.length())
    rows = [[i, stream.digit(i)] for i in range(0, n + 1)]
    return {"columns": ["i", "a_i"], "rows": rows}, {"digits": n}, "csv"


def cmd_cf_convergents(cfg):
    _require(cfg, "x")
    table = cf.convergents(_real(cfg["x"], "x"), int(cfg["K"]))
    rows = [[k, table.source.digit(k), p, q] for k, p, q in table.rows]
    summary = {"K": table.K, "growth_ok": None}
    if table.source.bound is not None:
        summary["growth_ok"] = cf.growth_bounds_check(table, table.source.bound)
    return {"columns": ["k", "a_k", "p_k", "q_k"], "rows": rows}, summary, "csv"


def cmd_cf_sample(cfg):
    s = cf.sample_FM(int(cfg["M"]), int(cfg["depth"]), int(cfg["seed"]))
    payload = {"literal": s.literal(), "digits": s.digits(int(cfg["depth"])),
               "sampling_law": disc.SAMPLING_LAW}
    return payload, {"literal": s.literal()}, "json"


def cmd_pseudo(cfg):
    _require(cfg, "D")
    D = _pseudo(cfg["D"])
    K = int(cfg["K"])
    out = {"D": D.literal(), "terms": [str(n) for n in D.terms(K)],
           "unit_identity": unit_identity_check(D, K)}
    if cfg.get("q") is not None:
        q = int(cfg["q"])
        out["q"] = str(q)
        out["abs"] = fraction_str(pseudo_abs(q, D))
    if cfg.get("C") is not None:
        out["C"] = fraction_str(_frac(cfg["C"], "C"))
        out["geometric_growth"] = geometric_growth_check(D, _frac(cfg["C"], "C"), K)
    return out, {k: out[k] for k in ("D", "unit_identity")}, "json"


def _spec(cfg) -> scan.ProductSpec:
    kind = cfg["kind"]
    _require(cfg, "alpha")
    alpha = _real(cfg["alpha"], "alpha")
    beta = _real(cfg["beta"], "beta") if cfg.get("beta") is not None else None
    shift = _real(cfg["shift"], "shift")
    try:
        if kind == "mixed":
            _require(cfg, "pseudo")
            return scan.mixed(alpha, _pseudo(cfg["pseudo"], "pseudo"), shift)
        return scan.ProductSpec(kind, alpha, beta, shift if kind == "hybrid" else Fraction(0))
    except ValueError as exc:
        raise InputError(str(exc)) from None


SCAN_COLUMNS = ["q", "value_lo", "value_hi", "bound_lo", "bound_hi", "beats_bound"]


def _record_rows(records):
    return [[str(r.q), *_pair(r.value), *_pair(r.bound), _bool(r.beats_bound)] for r in records]


def cmd_scan(cfg):
    spec = _spec(cfg)
    eps = _frac(cfg["eps"], "eps") if cfg.get("eps") is not None else None
    rel = int(cfg["rel_bits"])
    mode = cfg["candidates"]
    if mode == "range":
        records = scan.scan_min(spec, int(cfg["qmin"]), int(cfg["qmax"]), eps=eps,
                                shards=int(cfg["shards"]), workers=int(cfg["workers"]),
                                rel_bits=rel)
    elif mode == "convergents":
        table = cf.convergents(spec.alpha, int(cfg["K"]))
        records = scan.convergent_scan(spec, table, eps=eps, rel_bits=rel)
    elif mode == "chain":
        if spec.pseudo is None:
            raise InputError("--candidates chain needs --kind mixed")
        qs = spec.pseudo.distinct_terms(int(cfg["K"]))
        records = scan.candidate_scan(spec, qs, eps=eps, rel_bits=rel)
    else:
        raise InputError("--candidates must be range, convergents or chain")
    summary = {"spec": spec.describe(), "records": len(records)}
    if records:
        summary["final_q"] = str(records[-1].q)
        summary["final_value"] = _pair(records[-1].value)
    return {"columns": SCAN_COLUMNS, "rows": _record_rows(records)}, summary, "csv"


def _points(cfg) -> disc.PointSet:
    _require(cfg, "points")
    pts = cfg["points"]
    if isinstance(pts, str):
        path = Path(pts[1:] if pts.startswith("@") else pts)
        if pts.startswith("@") or path.is_file():
            pts = path.read_text().replace("\n", ",")
        pts = [p for p in pts.split(",") if p.strip()]
    try:
        return disc.PointSet.from_values(str(p) for p in pts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--points: {exc}") from None


def cmd_disc_exact(cfg):
    ps = _points(cfg)
    Ks = [int(k) for k in cfg["K"]] if not isinstance(cfg["K"], (int, str)) else \
        [int(k) for k in str(cfg["K"]).split(",")]
    report = disc.discrepancy_exact(ps)
    bounds = disc.erdos_turan_bounds(ps, Ks)
    verdict = disc.et_dominates(ps, Ks)
    lo, hi, lc, hc = report.witness
    out = {
        "N": ps.N,
        "discrepancy": fraction_str(report.value),
        "normalized": fraction_str(report.normalized),
        "witness": {"lo": fraction_str(lo), "hi": fraction_str(hi),
                    "lo_closed": lc, "hi_closed": hc},
        "et_bounds": [{"K": K, "bound": _pair(b), "dominates": verdict[K]} for K, b in bounds],
    }
    return out, {"N": ps.N, "discrepancy": out["discrepancy"]}, "json"


def cmd_disc_et(cfg):
    _require(cfg, "x")
    x = _real(cfg["x"], "x")
    u, v = int(cfg["u"]), int(cfg["v"])
    try:
        terms = disc.sequence_terms(cfg["seq"], v)
    except ValueError as exc:
        raise InputError(f"--seq: {exc}") from None
    F = disc.et_functional(terms, x, u, v)
    out = {"seq": cfg["seq"], "x": format_real(x), "u": u, "v": v, "F": _pair(F)}
    return out, {"F": out["F"]}, "json"


def cmd_disc_scaling(cfg):
    xs = None
    if cfg.get("xs"):
        raw = cfg["xs"] if isinstance(cfg["xs"], list) else str(cfg["xs"]).split("|")
        xs = [_real(t, "xs") for t in raw]
    grid = disc.default_grid(int(cfg["nmax"]), int(cfg["nmin"]))
    try:
        res = disc.scaling_experiment(int(cfg["M"]), cfg["seq"], grid, int(cfg["samples"]),
                                      int(cfg["seed"]), xs=xs, fit_min=int(cfg["fit_min"]),
                                      workers=int(cfg["workers"]))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rows = []
    for sample, label, N, lo, hi in res.rows:
        rows.append([sample, label, N, fraction_str(lo), fraction_str(hi),
                     repr(res.slopes[sample])])
    summary = {"median_slope": repr(res.median_slope), "samples": len(res.slopes),
               "sampling_law": res.sampling_law}
    return {"columns": ["sample", "x", "N", "D_lo", "D_hi", "slope"], "rows": rows}, summary, "csv"


def _certs_payload(certs, extra: dict) -> dict:
    out = dict(extra)
    out["count"] = len(certs)
    out["certificates"] = [c.to_json() for c in certs]
    return out


def cmd_witness_eq6(cfg):
    _require(cfg, "alpha", "beta")
    alpha, beta = _real(cfg["alpha"], "alpha"), _real(cfg["beta"], "beta")
    gamma = _real(cfg["gamma"], "gamma")
    try:
        certs = witness.witnesses_eq6(alpha, beta, gamma, _frac(cfg["eps"], "eps"),
                                      int(cfg["kmax"]), path=cfg["path"],
                                      exponent=cfg["exponent"], workers=int(cfg["workers"]))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return _certs_payload(certs, {}), {"certificates": len(certs)}, "json"


def cmd_witness_eq9(cfg):
    _require(cfg, "D", "beta")
    D = _pseudo(cfg["D"])
    beta, delta = _real(cfg["beta"], "beta"), _real(cfg["delta"], "delta")
    C = _frac(cfg["C"], "C") if cfg.get("C") is not None else None
    try:
        certs = witness.witnesses_eq9(D, beta, delta, _frac(cfg["eps"], "eps"), int(cfg["kmax"]),
                                      C=C, exponent=cfg["exponent"], workers=int(cfg["workers"]))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return _certs_payload(certs, {}), {"certificates": len(certs)}, "json"


def cmd_witness_eq7(cfg):
    _require(cfg, "D", "beta")
    D = _pseudo(cfg["D"])
    records = witness.liminf_report_eq7(D, _real(cfg["beta"], "beta"),
                                        _real(cfg["delta"], "delta"), int(cfg["kmax"]))
    summary = {"records": len(records)}
    if records:
        summary["final_value"] = _pair(records[-1].value)
    return {"columns": SCAN_COLUMNS, "rows": _record_rows(records)}, summary, "csv"


def cmd_witness_verify(cfg):
    _require(cfg, "file")
    try:
        certs = witness.load_certificates(cfg["file"])
    except json.JSONDecodeError as exc:
        raise InputError(f"{cfg['file']}: not JSON ({exc})") from None
    results = []
    failures = 0
    for i, obj in enumerate(certs):
        try:
            witness.verify_certificate(obj)
            results.append({"index": i, "ok": True})
        except witness.CertificateError as exc:
            failures += 1
            results.append({"index": i, "ok": False, "failed": str(exc)})
    out = {"checked": len(certs), "failures": failures, "results": results}
    return out, {"checked": len(certs), "failures": failures}, "json"


def cmd_report(cfg, workspace: Path):
    entries = read_runlog(workspace)
    wanted = cfg.get("runs") or []
    if isinstance(wanted, str):
        wanted = [w for w in wanted.split(",") if w]
    if wanted:
        chosen = []
        for ref in wanted:
            match = [e for e in entries if e["digest"].startswith(ref)]
            if not match:
                raise InputError(f"no run with digest prefix {ref!r} in {workspace / RUNLOG}")
            chosen.append(match[-1])
    else:
        chosen = [e for e in entries if e["command"] != "report"]
    return render_report(chosen), {"runs": len(chosen)}, "md"


def _read_output(path: str):
    text = Path(path).read_text()
    if text.startswith("# "):
        head, _, rest = text.partition("\n")
        rows = list(csv.reader(io.StringIO(rest)))
        return json.loads(head[2:]), {"columns": rows[0], "rows": rows[1:]}
    obj = json.loads(text)
    return obj.get("header", {}), obj


def _md_table(columns, rows) -> list[str]:
    out = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    out += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return out


def _approx(pair) -> str:
    if not pair or pair[0] == "":
        return ""
    lo, hi = Fraction(pair[0]), Fraction(pair[1])
    return f"{float((lo + hi) / 2):.6g}"


def render_report(entries: list[dict]) -> str:
    lines = ["# Run report", ""]
    if not entries:
        lines += ["No runs.", ""]
        return "\n".join(lines)
    for e in entries:
        lines += [f"## {e['command']} `{e['digest'][:12]}`", ""]
        lines += [f"- exit status: {e.get('status', 0)}"]
        for path in e.get("outputs", []):
            lines.append(f"- output: `{path}`")
        lines.append("")
        for path in e.get("outputs", []):
            _, data = _read_output(path)
            lines += _report_body(e["command"], data) + [""]
    return "\n".join(lines)


def _report_body(command: str, data: dict) -> list[str]:
    if command in ("scan", "witness eq7"):
        rows = [[r[0] if len(r[0]) <= 30 else r[0][:12] + "..." + f" ({len(r[0])} digits)",
                 _approx(r[1:3]), _approx(r[3:5]), r[5]] for r in data["rows"]]
        return ["Running minima:", ""] + _md_table(["q", "value", "bound", "beats bound"], rows)
    if command in ("witness eq6", "witness eq9"):
        rows = []
        for c in data.get("certificates", []):
            q = c["q"] if len(c["q"]) <= 30 else c["q"][:12] + f"... ({len(c['q'])} digits)"
            path = c["provenance"]["path"]
            if path == "proof-construction":
                path += f" (h={c['provenance']['h']}, N={c['provenance']['N']})"
            rows.append([c["k"], q, _approx(c["product"]), _approx(c["bound"]), path])
        return [f"Certificates: {data.get('count', len(rows))}", ""] + _md_table(
            ["k", "q", "product", "bound", "provenance"], rows)
    if command == "disc scaling":
        by_n: dict[int, list[float]] = {}
        slopes: dict[str, float] = {}
        for sample, _, N, lo, hi, slope in data["rows"]:
            by_n.setdefault(int(N), []).append(float((Fraction(lo) + Fraction(hi)) / 2))
            slopes[sample] = float(slope)
        rows = [[N, f"{statistics.median(v):.6g}", f"{statistics.median(v) / N:.6g}"]
                for N, v in sorted(by_n.items())]
        out = _md_table(["N", "median D_N", "median D_N/N"], rows)
        return out + ["", f"Median fitted log-log slope: {statistics.median(slopes.values()):.4f}"
                      f" over {len(slopes)} samples."]
    if "columns" in data:
        return _md_table(data["columns"], data["rows"])
    body = {k: v for k, v in data.items() if k != "header"}
    return ["```json", json.dumps(body, indent=2), "```"]


HANDLERS = {
    "cf expand": cmd_cf_expand,
    "cf convergents": cmd_cf_convergents,
    "cf sample": cmd_cf_sample,
    "pseudo": cmd_pseudo,
    "scan": cmd_scan,
    "disc exact": cmd_disc_exact,
    "disc et": cmd_disc_et,
    "disc scaling": cmd_disc_scaling,
    "witness eq6": cmd_witness_eq6,
    "witness eq9": cmd_witness_eq9,
    "witness eq7": cmd_witness_eq7,
    "witness verify": cmd_witness_verify,
}


# -- argument parsing --------------------------------------------------------------------

def _add(p, *names, **kw):
    p.add_argument(*names, default=argparse.SUPPRESS, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="littlewood", description=__doc__.split("\n")[0])
    parser.add_argument("--workspace", default=None,
                        help=f"run log directory (default ${WORKSPACE_ENV} or .)")
    parser.add_argument("--config", default=None, help="JSON config; flags override its fields")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def leaf(parent, name, help_text):
        p = parent.add_parser(name, help=help_text)
        _add(p, "--out", help="output file (default: stdout); 'csv' or 'json' alone picks "
                              "the stdout format")
        _add(p, "--format", choices=["csv", "json"])
        return p

    p_cf = sub.add_parser("cf", help="continued fractions").add_subparsers(dest="sub", required=True)
    p = leaf(p_cf, "expand", "partial quotients")
    _add(p, "--x")
    _add(p, "--digits", type=int)
    p = leaf(p_cf, "convergents", "convergent table k = 0..K")
    _add(p, "--x")
    _add(p, "-K", "--K", "--count", dest="K", type=int)
    p = leaf(p_cf, "sample", "seeded sample from F_M")
    _add(p, "--M", type=int)
    _add(p, "--depth", type=int)
    _add(p, "--seed", type=int)

    p = leaf(sub, "pseudo", "pseudo-absolute values")
    _add(p, "--D")
    _add(p, "--q", type=int)
    _add(p, "-K", "--K", dest="K", type=int)
    _add(p, "--C")

    p = leaf(sub, "scan", "running minima of a product")
    _add(p, "--kind", choices=list(scan.KINDS))
    for name in ("alpha", "beta", "shift", "pseudo", "eps"):
        _add(p, f"--{name}")
    _add(p, "--gamma", dest="shift")
    _add(p, "--delta", dest="shift")
    _add(p, "--qmin", type=int)
    _add(p, "--qmax", type=int)
    _add(p, "--shards", type=int)
    _add(p, "--workers", type=int)
    _add(p, "--candidates", choices=["range", "convergents", "chain"])
    _add(p, "-K", "--K", dest="K", type=int)
    _add(p, "--rel-bits", dest="rel_bits", type=int)

    p_d = sub.add_parser("disc", help="discrepancy").add_subparsers(dest="sub", required=True)
    p = leaf(p_d, "exact", "exact discrepancy and Erdos-Turan bounds")
    _add(p, "--points", help="comma-separated rationals, or a file with one per line")
    _add(p, "-K", "--K", dest="K", help="comma-separated K values")
    p = leaf(p_d, "et", "Erdos-Turan functional F(u, v, x)")
    _add(p, "--seq", "--a", dest="seq")
    _add(p, "--x")
    _add(p, "--u", type=int)
    _add(p, "--v", "--K", dest="v", type=int)
    p = leaf(p_d, "scaling", "D_N along a grid for dilated sequences")
    for name in ("M", "nmin", "samples", "seed", "workers"):
        _add(p, f"--{name}", type=int)
    _add(p, "--nmax", "--Nmax", dest="nmax", type=int)
    _add(p, "--fit-min", dest="fit_min", type=int)
    _add(p, "--seq", "--a", dest="seq")
    _add(p, "--xs", help="explicit x literals separated by |")

    p_w = sub.add_parser("witness", help="witness certificates").add_subparsers(dest="sub",
                                                                              required=True)
    p = leaf(p_w, "eq6", "hybrid inequality along convergents of alpha")
    for name in ("alpha", "beta", "gamma", "eps"):
        _add(p, f"--{name}")
    _add(p, "--kmax", type=int)
    _add(p, "--path", choices=["direct-scan", "proof-construction"])
    _add(p, "--exponent", choices=list(witness.EXPONENTS))
    _add(p, "--workers", type=int)
    p = leaf(p_w, "eq9", "mixed inequality at chain terms")
    for name in ("D", "beta", "delta", "eps", "C"):
        _add(p, f"--{name}")
    _add(p, "--kmax", type=int)
    _add(p, "--exponent", choices=list(witness.EXPONENTS))
    _add(p, "--workers", type=int)
    p = leaf(p_w, "eq7", "running minima at chain terms")
    for name in ("D", "beta", "delta"):
        _add(p, f"--{name}")
    _add(p, "--kmax", type=int)
    p = leaf(p_w, "verify", "re-verify certificates")
    _add(p, "file")

    p = leaf(sub, "report", "markdown summary of logged runs")
    _add(p, "runs", nargs="*", help="run digest prefixes (default: all)")
    return parser


def _command_name(ns: argparse.Namespace) -> str:
    return ns.cmd + (f" {ns.sub}" if getattr(ns, "sub", None) else "")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    command = _command_name(ns)
    workspace = Path(ns.workspace or os.environ.get(WORKSPACE_ENV) or ".")
    flags = {k: v for k, v in vars(ns).items() if k not in ("cmd", "sub", "workspace", "config")}
    if flags.get("out") in ("csv", "json"):
        flags["format"] = flags.pop("out")

    try:
        file_config = {}
        if ns.config:
            with open(ns.config) as fh:
                file_config = json.load(fh)
            if not isinstance(file_config, dict):
                raise InputError("config must be a JSON object")
        cfg = resolve_config(command, file_config, flags)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO

    status = EXIT_OK
    partial = False
    try:
        if command == "report":
            payload, summary, fmt = cmd_report(cfg, workspace)
        else:
            payload, summary, fmt = HANDLERS[command](cfg)
    except (InputError, ChainError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except PrecisionExhausted as exc:
        print(f"error: precision cap exceeded: {exc}", file=stderr)
        payload, summary, fmt = {"error": str(exc)}, {"error": str(exc)}, "json"
        status, partial = EXIT_PRECISION, True
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO

    if command == "witness verify" and payload.get("failures"):
        for r in payload["results"]:
            if not r["ok"]:
                print(f"certificate {r['index']} failed: {r['failed']}", file=stderr)
        status = EXIT_VERIFY

    if fmt == "md":
        text = payload
    else:
        kind = cfg.get("format") or fmt
        if kind == "csv" and "columns" not in payload:
            kind = "json"
        if kind == "json" and "columns" in payload:
            payload = {"columns": payload["columns"], "rows": payload["rows"]}
        text = render(kind, header(cfg, partial), payload)

    outputs = []
    try:
        if cfg.get("out"):
            atomic_write(Path(cfg["out"]), text)
            outputs.append(str(Path(cfg["out"]).resolve()))
        else:
            stdout.write(text)
        append_runlog(workspace, {
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "digest": config_digest(experiment_config(cfg)),
            "command": command,
            "status": status,
            "summary": summary,
            "outputs": outputs,
        })
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    return status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
