"""JSON forms of cones, systems, tensors, sandwiches, witnesses and reports.

Rationals are written as strings (``"3/4"``).  Readers accept strings and
JSON integers but reject JSON floats, which are not exact.  Every reader
also accepts a larger document that embeds the object under its own key,
so a command's report can be fed straight into another command.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .bb84 import KeyStats, PreparedEnsembles
from .certify import EntanglementCertificate, WitnessReport
from .cones import ConeRep, GptSystem, Lorentz, PolyH, PolyV
from .errors import GptError
from .sandwich import IncompatibilityWitness, Kite, KiteSandwich
from .tensor import MinMembershipCertificate, TensorElement


class FormatError(GptError, ValueError):
    """Malformed input document."""


# --- scalars ---------------------------------------------------------------


def rat_str(x) -> str:
    return str(Fraction(x))


def parse_rat(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise FormatError(f"expected an exact rational, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational {x!r}") from exc
    raise FormatError(f"expected an exact rational, got {x!r}")


def number(x) -> dict:
    """Exact string plus a 12-significant-digit float."""
    return {"exact": rat_str(x), "decimal": float(f"{float(Fraction(x)):.12g}")}


def vec_out(v: Sequence) -> list[str]:
    return [rat_str(x) for x in v]


def vec_in(v) -> tuple[Fraction, ...]:
    if not isinstance(v, list) or not v:
        raise FormatError(f"expected a nonempty list of rationals, got {v!r}")
    return tuple(parse_rat(x) for x in v)


def mat_out(m: Sequence[Sequence]) -> list[list[str]]:
    return [vec_out(r) for r in m]


def mat_in(m) -> tuple[tuple[Fraction, ...], ...]:
    if not isinstance(m, list) or not m:
        raise FormatError(f"expected a nonempty list of rows, got {m!r}")
    return tuple(vec_in(r) for r in m)


def _embedded(doc: Any, key: str, probe: str) -> dict:
    """``doc`` itself if it has ``probe``, else ``doc[key]`` (recursively)."""
    seen = 0
    while isinstance(doc, dict) and seen < 4:
        if probe in doc:
            return doc
        if key in doc:
            doc = doc[key]
            seen += 1
            continue
        break
    raise FormatError(f"no {key} found in document")


# --- cones and systems -----------------------------------------------------


_KINDS = {"poly_v": PolyV, "poly_h": PolyH}


def cone_to_json(c: ConeRep) -> dict:
    if isinstance(c, PolyV):
        return {"dim": c.dim, "kind": "poly_v", "vectors": mat_out(c.generators)}
    if isinstance(c, PolyH):
        return {"dim": c.dim, "kind": "poly_h", "vectors": mat_out(c.facets)}
    return {"dim": c.dim, "kind": "lorentz"}


def cone_from_json(doc: Any) -> ConeRep:
    if isinstance(doc, dict) and "kind" not in doc and "system" in doc:
        doc = doc["system"]
    doc = _embedded(doc, "cone", "kind")
    kind = doc.get("kind")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise FormatError("cone needs an integer 'dim'")
    try:
        if kind in _KINDS:
            return _KINDS[kind](dim, mat_in(doc.get("vectors")))
        if kind == "lorentz":
            return Lorentz(dim)
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from exc
    raise FormatError(f"unknown cone kind {kind!r}")


def system_to_json(s: GptSystem) -> dict:
    return {"cone": cone_to_json(s.cone), "unit": vec_out(s.unit)}


def system_from_json(doc: Any) -> GptSystem:
    if isinstance(doc, dict) and "system" in doc:
        doc = doc["system"]
    if not isinstance(doc, dict) or "unit" not in doc:
        raise FormatError("system needs a 'cone' and a 'unit'")
    cone = cone_from_json(doc)
    try:
        return GptSystem(cone, vec_in(doc["unit"]))
    except (ValueError, TypeError) as exc:
        raise FormatError(str(exc)) from exc


# --- tensors ---------------------------------------------------------------


def tensor_to_json(t: TensorElement) -> dict:
    return {"dims": list(t.dims), "entries": mat_out(t.matrix)}


def tensor_from_json(doc: Any) -> TensorElement:
    doc = _embedded(doc, "tensor", "entries")
    t = TensorElement(mat_in(doc["entries"]))
    if "dims" in doc and list(t.dims) != list(doc["dims"]):
        raise FormatError(f"dims {doc['dims']} do not match entries {t.dims}")
    return t


# --- sandwiches and witnesses ----------------------------------------------


def sandwich_to_json(s: KiteSandwich) -> dict:
    return {"alpha": vec_out(s.kite.alpha), "psi": mat_out(s.psi), "phi": mat_out(s.phi)}


def sandwich_from_json(doc: Any) -> KiteSandwich:
    doc = _embedded(doc, "sandwich", "alpha")
    try:
        return KiteSandwich(mat_in(doc["psi"]), mat_in(doc["phi"]), Kite(vec_in(doc["alpha"])))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad sandwich: {exc}") from exc


_W_KEYS = ("x0", "x1", "xp", "xm", "f0", "f1", "fp", "fm")


def witness_to_json(w: IncompatibilityWitness) -> dict:
    return {k: vec_out(getattr(w, k)) for k in _W_KEYS}


def witness_from_json(doc: Any) -> IncompatibilityWitness:
    doc = _embedded(doc, "witness", "x0")
    missing = [k for k in _W_KEYS if k not in doc]
    if missing:
        raise FormatError(f"witness is missing {', '.join(missing)}")
    try:
        return IncompatibilityWitness(*(vec_in(doc[k]) for k in _W_KEYS))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# --- reports ---------------------------------------------------------------


def witness_report_to_json(r: WitnessReport) -> dict:
    return {
        "ok": r.ok,
        "clauses": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in r.clauses],
    }


def min_certificate_to_json(c: MinMembershipCertificate) -> dict:
    if c.inside:
        return {"inside": True, "coefficients": vec_out(c.coefficients)}
    return {
        "inside": False,
        "separating_functional": tensor_to_json(c.functional),
        "value": rat_str(c.value),
    }


def certificate_to_json(c: EntanglementCertificate) -> dict:
    if isinstance(c.min_exclusion, str):
        min_excl: Any = c.min_exclusion
    else:
        min_excl = min_certificate_to_json(c.min_exclusion)
    return {
        "omega": tensor_to_json(c.omega),
        "phi": tensor_to_json(c.phi),
        "swapped_A": c.swapped_A,
        "magical_value": number(c.magical_value),
        "phi_omega": number(c.phi_omega),
        "normalization": number(c.normalization),
        "positivity": c.positivity,
        "generators_checked": c.generators_checked,
        "min_exclusion": min_excl,
        "max_inclusion": c.max_inclusion,
        "max_inclusion_exact": c.max_inclusion_exact,
        "clauses": [{"name": x.name, "ok": x.ok, "detail": x.detail} for x in c.clauses],
    }


def ensembles_to_json(e: PreparedEnsembles) -> dict:
    return {
        "p0": number(e.p0),
        "p1": number(e.p1),
        "qp": number(e.qp),
        "qm": number(e.qm),
        "eta": number(e.eta),
        "ell": vec_out(e.ell),
        "rho0": vec_out(e.rho0),
        "rho1": vec_out(e.rho1),
        "sigp": vec_out(e.sigp),
        "sigm": vec_out(e.sigm),
    }


def _f12(x: float):
    return None if x != x else float(f"{x:.12g}")


def stats_to_json(s: KeyStats) -> dict:
    return {
        "rounds": s.rounds,
        "kept": s.kept,
        "retained_fraction": _f12(s.retained_fraction),
        "expected_retained": number(s.expected_retained),
        "retained_sigma": _f12(s.retained_sigma),
        "error_count": s.error_count,
        "p0_prime": number(s.p0_prime),
        "qp_prime": number(s.qp_prime),
        "freq_p0": _f12(s.freq_p0),
        "freq_qp": _f12(s.freq_qp),
        "empirical_H": _f12(s.empirical_H),
        "key_rate": _f12(s.formula_rate),
        "tested": s.tested,
        "test_errors": s.test_errors,
        "insufficient_data": s.insufficient_data,
    }


# --- files -----------------------------------------------------------------


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def save(doc: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
