"""Command line: ``cdfan gen | cd-index | lefschetz | verify | lab``.

Exit codes: 0 success, 1 invalid input, 2 retries exhausted, 3 the lab
produced a counterexample candidate, 4 an internal invariant broke.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

from . import __version__, linalg
from .flag import NotInCdSpan, cd_index
from .graded import NotFree
from .lab import LAB_MODES, conjecture_lab
from .lefschetz import (DEFAULT_ENTRY_BOUND, DEFAULT_RETRIES, MODES, ExhaustedRetries, InternalBreach,
                        NoCandidate, SamplerConfig)
from .pairing import DegeneratePairing, DivisibilityViolation
from .pipeline import fan_recursion, verify_suite
from .poset import DEFAULT_DIM_CAP, GradedPoset, PosetError, build_named, ingest, serialize, validate
from .sheaves import InvalidSheaf

EXIT_OK, EXIT_INVALID, EXIT_RETRIES, EXIT_COUNTEREXAMPLE, EXIT_INTERNAL = 0, 1, 2, 3, 4
_NAMED = re.compile(r"^(simplex|cube|crosspoly|polygon)(?:_fan)?:(\d+)$")


@dataclass
class RunConfig:
    seed: int = 0
    retries: int = DEFAULT_RETRIES
    entry_bound: int = DEFAULT_ENTRY_BOUND
    mode: str = "generic"
    dim_cap: int = DEFAULT_DIM_CAP
    output: str | None = None

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(self.mode, self.retries, self.entry_bound)


class InputError(Exception):
    def __init__(self, msg: str, report: dict | None = None):
        self.report = report or {}
        super().__init__(msg)


def emit_report(results: dict, path: str | None, config: RunConfig | None = None) -> str:
    """Stable JSON: sorted keys, the run configuration and library version echoed."""
    payload = dict(results)
    if config is not None:
        payload["config"] = asdict(config)
    payload["version"] = __version__
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)
    return text


def load_poset(name: str, dim_cap: int) -> GradedPoset:
    """A JSON file, or ``family:size`` for a built-in fan."""
    m = _NAMED.match(name)
    if m and not Path(name).exists():
        return build_named(m.group(1), int(m.group(2)), dim_cap)
    p = ingest(name)
    if p.rank_n > dim_cap:
        raise InputError(f"fan dimension {p.rank_n} exceeds the cap {dim_cap}")
    return p


def _require_valid(p: GradedPoset) -> None:
    rep = validate(p)
    if not rep.ok:
        raise InputError("invalid poset: " + "; ".join(f"{k}: {v}" for k, v in rep.failures().items()),
                         {"validation": rep.to_json()})


def _config(args) -> RunConfig:
    return RunConfig(args.seed, args.retries, args.entry_bound, args.mode, args.dim_cap, args.json)


def cmd_gen(args) -> tuple[int, dict]:
    p = build_named(args.family, args.dim, args.dim_cap)
    text = serialize(p, args.output)
    if not args.output:
        sys.stdout.write(text)
    return EXIT_OK, {}


def cmd_cd_index(args) -> tuple[int, dict]:
    cfg = _config(args)
    p = load_poset(args.poset, cfg.dim_cap)
    _require_valid(p)
    res: dict = {"poset": p.name, "method": args.method}
    code = EXIT_OK
    flag = lef = None
    if args.method in ("flag", "both"):
        flag = cd_index(p)
        res["flag"] = flag.to_json()["cd_index"]
    if args.method in ("lefschetz", "both"):
        lef, cert = fan_recursion(p, cfg.sampler(), cfg.seed)
        res["lefschetz"] = lef.to_json()["cd_index"]
        res["certificate"] = cert.to_json()
    chosen = flag or lef
    res.update(chosen.to_json())
    res["cd_string"] = str(chosen)
    if flag is not None and lef is not None:
        res["agree"] = flag == lef
        if not res["agree"]:
            code = EXIT_INTERNAL
    return code, res


def cmd_lefschetz(args) -> tuple[int, dict]:
    cfg = _config(args)
    p = load_poset(args.poset, cfg.dim_cap)
    _require_valid(p)
    cd, cert = fan_recursion(p, cfg.sampler(), cfg.seed)
    if args.debug_tsv:
        from .lefschetz import root_node
        from .poset import incidence_orientation
        from .sheaves import pushforward

        node = root_node(pushforward(p).root, incidence_orientation(p))
        Path(args.debug_tsv).write_text(linalg.to_tsv(node.pairing))
    return EXIT_OK, cert.to_json()


def cmd_verify(args) -> tuple[int, dict]:
    cfg = _config(args)
    p = load_poset(args.poset, cfg.dim_cap)
    rep = verify_suite(p, cfg.seed, cfg.sampler())
    if not rep["valid"]:
        return EXIT_INVALID, rep
    return (EXIT_OK if rep["ok"] else EXIT_INTERNAL), rep


def cmd_lab(args) -> tuple[int, dict]:
    cfg = _config(args)
    p = load_poset(args.poset, cfg.dim_cap)
    _require_valid(p)
    report = conjecture_lab(p, args.trials, args.lab_mode, cfg.seed, cfg.entry_bound)
    return (EXIT_COUNTEREXAMPLE if report.all_failed else EXIT_OK), report.to_json()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--retries", type=int, default=DEFAULT_RETRIES)
    common.add_argument("--entry-bound", type=int, default=DEFAULT_ENTRY_BOUND)
    common.add_argument("--mode", choices=MODES, default="generic")
    common.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    common.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")

    ap = argparse.ArgumentParser(prog="cdfan", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"cdfan {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write the face poset of a built-in fan")
    g.add_argument("--family", required=True, choices=["simplex", "cube", "crosspoly", "polygon"])
    g.add_argument("--dim", type=int, required=True, help="dimension, or number of rays for polygon")
    g.add_argument("-o", "--output", metavar="PATH")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cd-index", parents=[common], help="cd-index by flag vectors and/or the recursion")
    c.add_argument("poset", help="poset JSON file or family:size")
    c.add_argument("--method", choices=["flag", "lefschetz", "both"], default="both")
    c.set_defaults(func=cmd_cd_index)

    lf = sub.add_parser("lefschetz", parents=[common], help="run the recursion and print its certificate")
    lf.add_argument("poset")
    lf.add_argument("--debug-tsv", metavar="PATH", help="dump the root pairing matrix as TSV")
    lf.set_defaults(func=cmd_lefschetz)

    v = sub.add_parser("verify", parents=[common], help="run the full invariant suite")
    v.add_argument("poset")
    v.set_defaults(func=cmd_verify)

    lb = sub.add_parser("lab", parents=[common], help="randomized experiments on the open conjectures")
    lb.add_argument("poset")
    lb.add_argument("--trials", type=int, default=20)
    lb.add_argument("--lab-mode", choices=LAB_MODES, default="multiplication")
    lb.set_defaults(func=cmd_lab)
    return ap


def run_command(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    try:
        code, res = args.func(args)
    except (InputError, PosetError, NotInCdSpan, NoCandidate, OSError) as exc:
        code, res = EXIT_INVALID, {"error": type(exc).__name__, "detail": str(exc),
                                   **getattr(exc, "report", {})}
    except ExhaustedRetries as exc:
        code, res = EXIT_RETRIES, {"error": "ExhaustedRetries", "prefix": exc.prefix, "failures": exc.failures}
    except (InternalBreach, DegeneratePairing, DivisibilityViolation, NotFree, InvalidSheaf) as exc:
        code, res = EXIT_INTERNAL, {"error": type(exc).__name__, "detail": str(exc)}
    if args.command == "gen" and code == EXIT_OK:
        return code
    res["exit_code"] = code
    emit_report(res, args.json, cfg)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
