"""Command-line interface.

Exit codes: 0 ok, 1 refuted (the tested property is false), 2 inconclusive,
3 unreadable or malformed input, 4 any other failure (for example a witness
that does not satisfy its preconditions).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

from . import formats as fm
from .bb84 import normalize_witness, simulate, validate_stats
from .certify import certify, verify_witness
from .cones import (
    PolyV,
    dual,
    enumerate_extreme_rays,
    facets,
    is_classical,
    is_proper,
)
from .errors import BudgetExceeded, GptError
from .sandwich import CATALOG_NAMES, catalog, derive_witness, search_sandwich, verify_sandwich
from .tensor import max_tensor_rays, min_tensor, tensor_equal

OK, REFUTED, INCONCLUSIVE, INPUT_ERROR, ERROR = 0, 1, 2, 3, 4
_STATUS = {OK: "ok", REFUTED: "refuted", INCONCLUSIVE: "inconclusive", INPUT_ERROR: "error", ERROR: "error"}


@dataclass(frozen=True)
class CommandResult:
    exit_code: int
    report: dict

    @property
    def status(self) -> str:
        return _STATUS[self.exit_code]


def _result(code: int, command: str, **fields: Any) -> CommandResult:
    return CommandResult(code, {"command": command, "status": _STATUS[code], **fields})


# --- commands --------------------------------------------------------------


def cmd_classify(args) -> CommandResult:
    cone = fm.cone_from_json(fm.load(args.cone))
    proper = is_proper(cone)
    fields: dict[str, Any] = {"dim": cone.dim, "kind": fm.cone_to_json(cone)["kind"], "proper": proper}
    if proper:
        fields["classical"] = is_classical(cone)
        if fields["kind"] != "lorentz":
            fields["extreme_rays"] = len(enumerate_extreme_rays(cone))
            fields["facets"] = len(facets(cone))
    else:
        fields["classical"] = None
    return _result(OK, "classify", **fields)


def cmd_dual(args) -> CommandResult:
    cone = fm.cone_from_json(fm.load(args.cone))
    return _result(OK, "dual", cone=fm.cone_to_json(dual(cone)))


def cmd_tensor(args) -> CommandResult:
    a = fm.cone_from_json(fm.load(args.cone_a))
    b = fm.cone_from_json(fm.load(args.cone_b))
    if a.dim * b.dim > args.dim_cap:
        return _result(
            INCONCLUSIVE, "tensor", mode=args.mode, reason=f"product dimension {a.dim * b.dim} exceeds cap {args.dim_cap}"
        )
    if args.mode == "min":
        t = min_tensor(a, b)
        rays = enumerate_extreme_rays(t)
        return _result(OK, "tensor", mode="min", extreme_rays=len(rays), cone=fm.cone_to_json(PolyV(t.dim, rays)))
    if args.mode == "max":
        rays = max_tensor_rays(a, b)
        return _result(OK, "tensor", mode="max", extreme_rays=len(rays), cone=fm.cone_to_json(PolyV(a.dim * b.dim, rays)))
    try:
        eq = tensor_equal(a, b, dim_cap=args.dim_cap)
    except BudgetExceeded as exc:  # pragma: no cover - guarded above
        return _result(INCONCLUSIVE, "tensor", mode="equal", reason=str(exc))
    return _result(OK if eq else REFUTED, "tensor", mode="equal", equal=eq)


def cmd_witness(args) -> CommandResult:
    system = fm.system_from_json(fm.load(args.system))
    if args.action == "verify":
        w = fm.witness_from_json(fm.load(args.file))
        rep = verify_witness(w, system.cone, system.unit)
        return _result(OK if rep.ok else REFUTED, "witness verify", report=fm.witness_report_to_json(rep))
    if args.action == "derive":
        s = fm.sandwich_from_json(fm.load(args.file))
        check = verify_sandwich(s, system.cone)
        if not check.ok:
            return _result(REFUTED, "witness derive", failures=list(check.failures))
        w = derive_witness(s, system.cone)
        return _result(OK, "witness derive", witness=fm.witness_to_json(w))
    res = search_sandwich(system.cone, budget=args.budget, seed=args.seed or 0)
    fields: dict[str, Any] = {"search_status": res.status, "tried": res.tried}
    if res.status == "found":
        fields["sandwich"] = fm.sandwich_to_json(res.sandwich)
        fields["witness"] = fm.witness_to_json(derive_witness(res.sandwich, system.cone))
        return _result(OK, "witness search", **fields)
    if res.status == "classical":
        return _result(REFUTED, "witness search", **fields)
    return _result(INCONCLUSIVE, "witness search", **fields)


def cmd_certify(args) -> CommandResult:
    doc_a, doc_b = fm.load(args.party_a), fm.load(args.party_b)
    a, b = fm.system_from_json(doc_a), fm.system_from_json(doc_b)
    wa = fm.witness_from_json(fm.load(args.witness_a) if args.witness_a else doc_a)
    wb = fm.witness_from_json(fm.load(args.witness_b) if args.witness_b else doc_b)
    cert = certify(a, wa, b, wb, seed=args.seed or 0)
    return _result(OK, "certify", certificate=fm.certificate_to_json(cert))


def _ref(value: Any, base: Path) -> Any:
    if isinstance(value, str):
        if value.startswith("catalog:"):
            e = catalog(value.split(":", 1)[1])
            return {"system": fm.system_to_json(e.system), "witness": fm.witness_to_json(e.witness) if e.witness else None}
        return fm.load(base / value)
    return value


def cmd_bb84(args) -> CommandResult:
    cfg = fm.load(args.config)
    if not isinstance(cfg, dict):
        raise fm.FormatError("bb84 config must be an object")
    base = Path(args.config).parent
    try:
        system = fm.system_from_json(_ref(cfg["system"], base))
        w = fm.witness_from_json(_ref(cfg["witness"], base))
        rounds = cfg["rounds"]
    except KeyError as exc:
        raise fm.FormatError(f"bb84 config is missing {exc}") from exc
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if not isinstance(rounds, int) or not isinstance(seed, int):
        raise fm.FormatError("rounds and seed must be integers")
    frac = fm.parse_rat(cfg.get("test_fraction", 0))
    ens = normalize_witness(w, system)
    tr = simulate(ens, system, rounds, seed, test_fraction=frac)
    st = validate_stats(tr, ens)
    code = OK
    if st.error_count:
        code = REFUTED
    elif st.insufficient_data:
        code = INCONCLUSIVE
    return _result(
        code,
        "bb84",
        seed=seed,
        rounds=rounds,
        test_fraction=fm.rat_str(frac),
        ensembles=fm.ensembles_to_json(ens),
        stats=fm.stats_to_json(st),
    )


def cmd_catalog(args) -> CommandResult:
    if args.action == "list":
        return _result(OK, "catalog list", names=list(CATALOG_NAMES))
    if args.name not in CATALOG_NAMES:
        raise fm.FormatError(f"unknown catalog entry {args.name!r}")
    e = catalog(args.name)
    return _result(
        OK,
        "catalog export",
        name=e.name,
        system=fm.system_to_json(e.system),
        classical=is_classical(e.system.cone),
        sandwich=fm.sandwich_to_json(e.sandwich) if e.sandwich else None,
        witness=fm.witness_to_json(e.witness) if e.witness else None,
    )


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (search order, sampling, bb84)")
    common.add_argument("--budget", type=int, default=1000, help="candidate budget for sandwich search")
    common.add_argument("--dim-cap", type=int, default=16, help="largest product dimension for tensor work")
    common.add_argument("--output", default=None, help="write the JSON report here instead of stdout")

    p = argparse.ArgumentParser(prog="gptcone", description="Exact GPT cone geometry and entanglement tools.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="proper/classical check of a cone file")
    c.add_argument("cone")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("dual", parents=[common], help="dual cone")
    c.add_argument("cone")
    c.set_defaults(func=cmd_dual)

    c = sub.add_parser("tensor", parents=[common], help="min/max tensor products or their equality")
    c.add_argument("mode", choices=("min", "max", "equal"))
    c.add_argument("cone_a")
    c.add_argument("cone_b")
    c.set_defaults(func=cmd_tensor)

    c = sub.add_parser("witness", parents=[common], help="verify, derive or search witnesses")
    c.add_argument("action", choices=("verify", "derive", "search"))
    c.add_argument("system")
    c.add_argument("file", nargs="?", help="witness (verify) or sandwich (derive) file")
    c.set_defaults(func=cmd_witness)

    c = sub.add_parser("certify", parents=[common], help="entanglement certificate for A (x) B")
    c.add_argument("party_a", help="system file, may also hold the witness")
    c.add_argument("party_b")
    c.add_argument("--witness-a", default=None)
    c.add_argument("--witness-b", default=None)
    c.set_defaults(func=cmd_certify)

    c = sub.add_parser("bb84", parents=[common], help="simulate the key distribution protocol")
    c.add_argument("config")
    c.set_defaults(func=cmd_bb84)

    c = sub.add_parser("catalog", parents=[common], help="built-in example theories")
    c.add_argument("action", choices=("export", "list"))
    c.add_argument("name", nargs="?")
    c.set_defaults(func=cmd_catalog)
    return p


def _dispatch(parser: argparse.ArgumentParser, args: argparse.Namespace) -> CommandResult:
    func: Callable[[Any], CommandResult] = args.func
    command = args.command
    if command == "witness" and args.action != "search" and not args.file:
        parser.error(f"witness {args.action} needs a file")
    if command == "catalog" and args.action == "export" and not args.name:
        parser.error("catalog export needs a name")
    try:
        return func(args)
    except (fm.FormatError, OSError, KeyError, TypeError) as exc:
        return _result(INPUT_ERROR, command, error=f"{type(exc).__name__}: {exc}")
    except (GptError, ValueError, ArithmeticError) as exc:
        fields = {"error": f"{type(exc).__name__}: {exc}"}
        clause = getattr(exc, "clause", None)
        if clause:
            fields["clause"] = clause
        return _result(ERROR, command, **fields)


def run(argv: Sequence[str] | None = None) -> CommandResult:
    parser = build_parser()
    return _dispatch(parser, parser.parse_args(argv))


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    res = _dispatch(parser, args)
    text = fm.dumps(res.report)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return res.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
