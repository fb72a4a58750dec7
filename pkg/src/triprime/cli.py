"""Command-line front end. Reports go to stdout, diagnostics to stderr.

Exit status: 0 when every check passed, 1 on a failed check, 2 when a check
was inconclusive or hit a resource cap, 64 on malformed arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import suites
from .characters import check_gelfond, l_one_certified, least_kernel_prime, nonprincipal_real_characters
from .errors import ResourceError, TriprimeError
from .reports import FAIL, INCONCLUSIVE, PASS, BoundReport, canonical_json, format_real
from .sieve import MEMORY_ENV
from .verifier import coverage, minimal_prime_threshold, small_case_table, vacuity_check, validate_witness

log = logging.getLogger("triprime")

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    subcommand: str
    q: int | None = None
    q_lo: int | None = None
    q_hi: int | None = None
    P: int | None = None
    tolerance: float = 1e-6
    max_terms: int = 10**7
    sieve_memory: int | None = None
    format: str = "text"
    jobs: int = 1
    witness: bool = False
    strict: bool = False
    distinct: bool = False
    seed: int = 0
    suites: list[str] = field(default_factory=lambda: list(suites.SUITES))
    quick: bool = False

    def validate(self) -> None:
        if self.q_lo is not None and (self.q_hi is None or self.q_lo > self.q_hi):
            raise UsageError(f"empty range {self.q_lo}..{self.q_hi}")
        if self.q_lo is not None and self.q_lo < 2:
            raise UsageError("scan needs q_lo >= 2")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.jobs < 1:
            raise UsageError("parallelism must be >= 1")
        if self.format not in ("json", "csv", "text"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.sieve_memory is not None and self.sieve_memory <= 0:
            raise UsageError("sieve memory cap must be positive")
        unknown = set(self.suites) - set(suites.SUITES)
        if unknown:
            raise UsageError(f"unknown suites: {sorted(unknown)}")
        if self.subcommand == "verify" and (self.q < 1 or self.P < 2):
            raise UsageError("verify needs q >= 1 and P >= 2")
        if self.subcommand in ("lbound", "kernel-prime") and self.q < 3:
            raise UsageError(f"{self.subcommand} needs q >= 3")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"))
    common.add_argument("--jobs", type=int, help="worker processes for q-scans")
    common.add_argument("--sieve-memory", type=int, help=f"sieve memory cap in bytes (also ${MEMORY_ENV})")
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="JSON file whose keys mirror the long flags")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="triprime", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="coverage of all units mod q with primes <= P")
    p.add_argument("q", type=int)
    p.add_argument("P", type=int)
    _variant_flags(p)

    p = sub.add_parser("scan", parents=[common], help="minimal prime threshold for q_lo..q_hi")
    p.add_argument("q_lo", type=int)
    p.add_argument("q_hi", type=int)
    _variant_flags(p)

    sub.add_parser("table", parents=[common], help="published small-modulus table and vacuity remark")

    p = sub.add_parser("lbound", parents=[common], help="certified L(1, chi) and the lower bound, all real chi mod q")
    p.add_argument("q", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--max-terms", type=int)

    p = sub.add_parser("kernel-prime", parents=[common], help="least prime in the kernel of each real chi mod q")
    p.add_argument("q", type=int)

    p = sub.add_parser("lemmas", parents=[common], help="seeded property suites for the lemmas")
    p.add_argument("--suite", dest="suites", action="append", choices=sorted(suites.SUITES))
    p.add_argument("--quick", action="store_true", help="reduced sweep sizes")
    return parser


def _variant_flags(p):
    p.add_argument("--witness", action="store_true", default=None)
    p.add_argument("--strict", action="store_true", default=None, help="primes strictly below P")
    p.add_argument("--distinct", action="store_true", default=None, help="three distinct primes")


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                loaded = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        values.update({k.replace("-", "_"): v for k, v in loaded.items()})
    values.update({k: v for k, v in vars(ns).items() if v is not None})
    values.pop("config", None)
    values.pop("verbose", None)
    known = RunConfig.__dataclass_fields__
    extra = set(values) - set(known)
    if extra:
        raise UsageError(f"unknown config keys: {sorted(extra)}")
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from None
    cfg.validate()
    return cfg


def _status(reports) -> str:
    statuses = {r["status"] if isinstance(r, dict) else r.status for r in reports}
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


# Record producers. Each returns a list of plain dicts with a "bound_checks" list.

def _verify(cfg: RunConfig) -> list[dict]:
    res = coverage(cfg.q, cfg.P, with_witnesses=cfg.witness, strict=cfg.strict, distinct=cfg.distinct)
    rec = res.as_dict()
    checks = [BoundReport.compare("uncovered classes", len(res.missing), "==", 0, q=cfg.q, P=cfg.P)]
    if cfg.witness:
        bad = sum(not validate_witness(w, strict=cfg.strict, distinct=cfg.distinct)
                  for w in res.witnesses.values())
        checks.append(BoundReport.compare("invalid witnesses", bad, "==", 0, count=len(res.witnesses)))
    rec["bound_checks"] = [c.as_dict() for c in checks]
    return [rec]


def _scan_one(args) -> dict:
    q, witness, distinct = args
    rec = minimal_prime_threshold(q, with_witnesses=witness, distinct=distinct)
    out = rec.as_dict()
    if witness:
        bad = sum(not validate_witness(w, distinct=distinct) for w in rec.witnesses.values())
        out["bound_checks"].append(
            BoundReport.compare("invalid witnesses", bad, "==", 0, count=len(rec.witnesses)).as_dict()
        )
    return out


def _scan(cfg: RunConfig) -> list[dict]:
    work = [(q, cfg.witness, cfg.distinct) for q in range(cfg.q_lo, cfg.q_hi + 1)]
    if cfg.jobs == 1:
        return [_scan_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_scan_one, work, chunksize=8))


def _table(cfg: RunConfig) -> list[dict]:
    out = []
    for r in small_case_table():
        d = r.detail
        out.append({"check": "table", "q": d["q"], "P": r.bound, "P_min": d["P_min"],
                    "covered": d["covered_at_table_value"], "bound_checks": [r.as_dict()]})
    out.append({"check": "vacuity", "x": vacuity_check().computed, "bound_checks": [vacuity_check().as_dict()]})
    return out


def _lbound(cfg: RunConfig) -> list[dict]:
    out = []
    for chi in nonprincipal_real_characters(cfg.q):
        rep = check_gelfond(chi, cfg.tolerance, cfg.max_terms)
        try:
            L = l_one_certified(chi, cfg.tolerance, cfg.max_terms)
            interval = [L.lo, L.hi]
        except ResourceError:
            interval = None
        out.append({"q": cfg.q, "character": chi.label, "L1": interval,
                    "tolerance": cfg.tolerance, "bound_checks": [rep.as_dict()]})
    return out


def _kernel(cfg: RunConfig) -> list[dict]:
    out = []
    for chi in nonprincipal_real_characters(cfg.q):
        r = least_kernel_prime(chi)
        rep = BoundReport.compare("least kernel prime <= q^4", r.prime, "<=", r.bound, character=chi.label)
        out.append({"q": r.q, "character": r.character, "prime": r.prime, "bound": r.bound,
                    "within_bound": r.within_bound, "bound_checks": [rep.as_dict()]})
    return out


_QUICK = {
    "f0": dict(limit=10**4),
    "phi": dict(limit=10**4),
    "boundchi": dict(q_max=60),
    "bt": dict(samples=500, x_max=10**5, y_max=10**5),
    "dusart": dict(x_max=10**5, samples=100, sample_max=10**6),
    "kneser": dict(samples=500),
}
_SEEDED = {"bt", "dusart", "kneser"}


def _lemmas(cfg: RunConfig) -> list[dict]:
    out = []
    for name in cfg.suites:
        kwargs = dict(_QUICK[name]) if cfg.quick else {}
        if name in _SEEDED:
            kwargs["seed"] = cfg.seed
        out.append(suites.SUITES[name](**kwargs).as_dict())
    return out


HANDLERS = {
    "verify": _verify,
    "scan": _scan,
    "table": _table,
    "lbound": _lbound,
    "kernel-prime": _kernel,
    "lemmas": _lemmas,
}


def _cell(value) -> str:
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, list):
        parts = []
        for v in value:
            if isinstance(v, dict) and "primes" in v:
                parts.append("*".join(str(p) for p in v["primes"]))
            elif isinstance(v, dict) and "status" in v:
                parts.append(f"{v['name']}={v['status']}")
            else:
                parts.append(_cell(v))
        return ";".join(parts)
    if isinstance(value, dict):
        return canonical_json(value)
    if value is None:
        return ""
    return str(value)


def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return "".join(canonical_json(r) + "\n" for r in records)
    if fmt == "csv":
        fields = []
        for r in records:
            fields += [k for k in r if k not in fields]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields + ["status"], lineterminator="\n")
        writer.writeheader()
        for r in records:
            row = {k: _cell(v) for k, v in r.items()}
            row["status"] = _status(r["bound_checks"])
            writer.writerow(row)
        return buf.getvalue()
    lines = []
    for r in records:
        head = " ".join(f"{k}={_cell(v)}" for k, v in r.items()
                        if k not in ("bound_checks", "witnesses") and not isinstance(v, (list, dict)))
        lines.append(f"[{_status(r['bound_checks']).upper()}] {head}")
        for c in r["bound_checks"]:
            comp = _cell(c["computed"])
            lines.append(f"    {c['status']:<12} {c['name']}: {comp} {c['relation']} {_cell(c['bound'])}")
        for w in r.get("witnesses", []):
            lines.append(f"    witness {w['a']} = {'*'.join(map(str, w['primes']))} = {w['product']}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    saved = os.environ.get(MEMORY_ENV)
    if cfg.sieve_memory is not None:
        # worker processes inherit the cap through the environment
        os.environ[MEMORY_ENV] = str(cfg.sieve_memory)
    try:
        records = HANDLERS[cfg.subcommand](cfg)
    except ResourceError as exc:
        print(f"triprime: resource limit: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except TriprimeError as exc:
        print(f"triprime: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        if saved is None:
            os.environ.pop(MEMORY_ENV, None)
        else:
            os.environ[MEMORY_ENV] = saved
    out.write(render(records, cfg.format))
    status = _status([c for r in records for c in r["bound_checks"]])
    log.info("%s: %d records, status %s", cfg.subcommand, len(records), status)
    return {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[status]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
