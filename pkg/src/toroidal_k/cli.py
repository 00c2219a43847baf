"""Command-line front end: load a problem file, run one analysis, print a report.

Exit codes: 0 ok, 1 the analysis answered "no" (or bad input), 2 a property
that the theory guarantees failed to hold.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .fan import Cone, Fan, FanError, NonGenericError, cellularity_report
from .gkm import GKMClass
from .laurent import LaurentPoly, parse_laurent
from .lattice import LatticeError
from .toroidal import (
    cellularity_transfer,
    decompose,
    expand_invariant,
    is_gg_class,
    is_tt_class,
    multiply,
    multstr_check,
    ordinary_k,
    orientation_check,
    relwond_check,
    toroidal_gkm_graph,
    transfer_psg,
)
from .weyl import ConsistencyError, RootDatum, RootDatumError, c_sets, orbit_fan, root_datum_from_json
from .weyl import steinberg_basis
from .gkm import symmetrize

COMMANDS = (
    "check-cellular", "gkm-graph", "membership", "symmetrize", "decompose", "multiply",
    "multstr-check", "relwond-check", "ordinary-rank", "steinberg", "transfer-psg", "orientation-check",
)

OK, FAIL, INCONSISTENT = "ok", "fail", "paper-consistency-failure"
EXIT = {OK: 0, FAIL: 1, INCONSISTENT: 2}


class ProblemError(ValueError):
    """Invalid problem input; ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


@dataclass
class Problem:
    root_datum: RootDatum
    fan_plus: Fan
    psg: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)


@dataclass
class Report:
    command: str
    status: str
    payload: dict
    witnesses: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"command": self.command, "status": self.status, "payload": self.payload}
        if self.witnesses:
            out["witnesses"] = self.witnesses
        return out


def _read_json(source) -> dict:
    if isinstance(source, dict):
        return source
    text = str(source)
    if not text.lstrip().startswith("{"):
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_problem(source) -> Problem:
    """Parse and validate a problem from a path, JSON text or a dict."""
    data = _read_json(source)
    if "root_datum" not in data:
        raise ProblemError("missing root datum", "/root_datum")
    try:
        rd = root_datum_from_json(data["root_datum"])
    except (RootDatumError, TypeError, ValueError) as exc:
        raise ProblemError(str(exc), "/root_datum") from exc
    fp = data.get("fan_plus")
    if fp is None:
        raise ProblemError("missing fan", "/fan_plus")
    n = fp.get("ambient_rank")
    if n != rd.l:
        raise ProblemError(f"ambient rank {n} does not match the root datum rank {rd.l}", "/fan_plus/ambient_rank")
    cones = []
    for ci, rays in enumerate(fp.get("cones", [])):
        for ri, ray in enumerate(rays):
            ptr = f"/fan_plus/cones/{ci}/{ri}"
            if len(ray) != n or not all(isinstance(x, int) for x in ray):
                raise ProblemError(f"ray {ray} is not an integer vector of length {n}", ptr)
            if not rd.is_dominant(ray):
                raise ProblemError(f"ray {ray} lies outside the dominant chamber", ptr)
        try:
            cones.append(Cone(rays, n))
        except (FanError, LatticeError) as exc:
            raise ProblemError(str(exc), f"/fan_plus/cones/{ci}") from exc
    if not cones:
        raise ProblemError("the fan needs at least one cone", "/fan_plus/cones")
    try:
        F = Fan(n, cones)
    except FanError as exc:
        raise ProblemError(str(exc), "/fan_plus") from exc
    if any(c.dim != n for c in F.maximal):
        raise ProblemError("maximal cones must be full-dimensional", "/fan_plus/cones")
    return Problem(rd, F, dict(data.get("psg") or {}), dict(data.get("payload") or {}))


# ---------------------------------------------------------------------------
# payload helpers


def _weyl_by_name(rd: RootDatum, name: str):
    for w in rd.weyl:
        if w.name() == name:
            return w
    raise ProblemError(f"unknown Weyl element {name!r}", "/payload")


def _reduced_class(problem: Problem, key: str = "class") -> list[LaurentPoly]:
    raw = problem.payload.get(key)
    if raw is None:
        raise ProblemError(f"missing payload entry {key!r}", f"/payload/{key}")
    m = len(problem.fan_plus.maximal)
    rank = 2 * problem.root_datum.l
    try:
        return [parse_laurent(raw.get(str(k), "0"), rank) for k in range(m)]
    except ValueError as exc:
        raise ProblemError(str(exc), f"/payload/{key}") from exc


def _nu0(problem: Problem) -> list[int]:
    nu0 = problem.psg.get("nu0")
    if nu0 is None:
        raise ProblemError("missing one-parameter subgroup", "/psg/nu0")
    return list(nu0)


# ---------------------------------------------------------------------------
# commands


def _cmd_check_cellular(p: Problem, threads: int) -> Report:
    F = orbit_fan(p.root_datum, p.fan_plus)
    nu0 = _nu0(p)
    rep = cellularity_report(F, nu0)
    tr = cellularity_transfer(p.root_datum, p.fan_plus, nu0, p.psg.get("nu2"))
    payload = {"toric": rep.to_json(), "transfer": tr}
    if not tr["agree"]:
        return Report("check-cellular", INCONSISTENT, payload, [tr])
    return Report("check-cellular", OK if rep.verdict else FAIL, payload)


def _cmd_gkm_graph(p: Problem, threads: int) -> Report:
    G = toroidal_gkm_graph(p.root_datum, p.fan_plus)
    m, W = len(p.fan_plus.maximal), len(p.root_datum.weyl)
    payload = G.to_json()
    payload["vertex_count"] = len(G.vertices)
    payload["expected_vertex_count"] = m * W * W
    status = OK if len(G.vertices) == m * W * W else INCONSISTENT
    return Report("gkm-graph", status, payload)


def _cmd_membership(p: Problem, threads: int) -> Report:
    f = _reduced_class(p)
    reduced = is_gg_class(p.root_datum, p.fan_plus, f)
    full = is_tt_class(toroidal_gkm_graph(p.root_datum, p.fan_plus), expand_invariant(p.root_datum, p.fan_plus, f))
    payload = {"reduced": reduced.to_json(), "full": full.to_json()}
    if reduced.ok != full.ok:
        return Report("membership", INCONSISTENT, payload)
    return Report("membership", OK if reduced.ok else FAIL, payload)


def _cmd_symmetrize(p: Problem, threads: int) -> Report:
    raw = p.payload.get("class")
    if raw is None:
        raise ProblemError("missing payload entry 'class'", "/payload/class")
    l = p.root_datum.l
    try:
        a = GKMClass([parse_laurent(raw.get(str(k), "0"), l) for k in range(len(p.fan_plus.maximal))])
    except ValueError as exc:
        raise ProblemError(str(exc), "/payload/class") from exc
    out = symmetrize(p.root_datum, p.fan_plus, a)
    F = orbit_fan(p.root_datum, p.fan_plus)
    return Report("symmetrize", OK, {"fan": F.to_json(), "class": out.to_json()})


def _cmd_decompose(p: Problem, threads: int) -> Report:
    f = _reduced_class(p)
    m = is_gg_class(p.root_datum, p.fan_plus, f)
    if not m:
        return Report("decompose", FAIL, {"membership": m.to_json()})
    res = decompose(p.root_datum, p.fan_plus, f, check_membership=False)
    return Report("decompose", OK, {"coordinates": "(u, v)", "coefficients": res.to_json()})


def _cmd_multiply(p: Problem, threads: int) -> Report:
    f, g = _reduced_class(p, "f"), _reduced_class(p, "g")
    h = multiply(f, g)
    m = is_gg_class(p.root_datum, p.fan_plus, h)
    payload = {"product": {str(k): str(x) for k, x in enumerate(h)}, "membership": m.to_json()}
    if not m and is_gg_class(p.root_datum, p.fan_plus, f) and is_gg_class(p.root_datum, p.fan_plus, g):
        return Report("multiply", INCONSISTENT, payload)
    return Report("multiply", OK if m else FAIL, payload)


def _pairs(p: Problem):
    rd = p.root_datum
    if "v" in p.payload:
        return [(_weyl_by_name(rd, p.payload["v"]), _weyl_by_name(rd, p.payload.get("v2", p.payload["v"])))]
    return [(v, v2) for v in rd.weyl for v2 in rd.weyl]


def _cmd_multstr(p: Problem, threads: int) -> Report:
    pairs = _pairs(p)
    steinberg_basis(p.root_datum)  # build shared caches before fanning out
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        results = list(ex.map(lambda vv: multstr_check(p.root_datum, p.fan_plus, *vv), pairs))
    bad = [r for r in results if not r["ok"]]
    return Report("multstr-check", INCONSISTENT if bad else OK,
                  {"pairs": len(results), "passed": len(results) - len(bad)}, bad)


def _cmd_relwond(p: Problem, threads: int) -> Report:
    rep = relwond_check(p.root_datum, p.fan_plus)
    return Report("relwond-check", OK if rep["ok"] else INCONSISTENT,
                  {k: v for k, v in rep.items() if k != "failures"}, rep["failures"])


def _cmd_ordinary(p: Problem, threads: int) -> Report:
    rep = ordinary_k(p.root_datum, p.fan_plus)
    return Report("ordinary-rank", OK, {"rank": rep["rank"], "fixed_points": rep["fixed_points"]})


def _cmd_steinberg(p: Problem, threads: int) -> Report:
    rd = p.root_datum
    data = steinberg_basis(rd)
    cs = c_sets(rd)
    payload = {
        "convention": data.convention,
        "basis": {v.name(): str(data.f[v]) for v in rd.weyl},
        "c_sets": [{"I": sorted(i + 1 for i in I), "elements": [v.name() for v in vs]} for I, vs in cs.items()],
        "c_set_sizes": [len(vs) for vs in cs.values()],
    }
    return Report("steinberg", OK, payload)


def _cmd_transfer(p: Problem, threads: int) -> Report:
    F = orbit_fan(p.root_datum, p.fan_plus)
    direction = p.payload.get("direction", "toric->toroidal")
    data = dict(p.psg)
    data.update({k: v for k, v in p.payload.items() if k != "direction"})
    return Report("transfer-psg", OK, transfer_psg(p.root_datum, F, direction, data))


def _cmd_orientation(p: Problem, threads: int) -> Report:
    F = orbit_fan(p.root_datum, p.fan_plus)
    if "nu1" in p.psg:
        nu = list(p.psg["nu1"]) + list(p.psg["nu2"])
    else:
        fwd = transfer_psg(p.root_datum, F, "toric->toroidal", {"nu0": _nu0(p), "nu2": p.psg.get("nu2")})
        nu = fwd["nu1"] + fwd["nu2"]
    rep = orientation_check(toroidal_gkm_graph(p.root_datum, p.fan_plus), nu)
    rep["nu"] = nu
    return Report("orientation-check", OK if rep["ok"] else INCONSISTENT, rep)


DISPATCH = {
    "check-cellular": _cmd_check_cellular,
    "gkm-graph": _cmd_gkm_graph,
    "membership": _cmd_membership,
    "symmetrize": _cmd_symmetrize,
    "decompose": _cmd_decompose,
    "multiply": _cmd_multiply,
    "multstr-check": _cmd_multstr,
    "relwond-check": _cmd_relwond,
    "ordinary-rank": _cmd_ordinary,
    "steinberg": _cmd_steinberg,
    "transfer-psg": _cmd_transfer,
    "orientation-check": _cmd_orientation,
}


def run(problem: Problem, command: str, threads: int = 1) -> Report:
    if command not in DISPATCH:
        raise ProblemError(f"unknown command {command!r}")
    try:
        return DISPATCH[command](problem, threads)
    except ConsistencyError as exc:
        return Report(command, INCONSISTENT, {"error": str(exc)}, [exc.witness] if exc.witness else [])
    except NonGenericError as exc:
        return Report(command, FAIL, {"error": str(exc)})


def format_text(report: Report) -> str:
    lines = [f"command: {report.command}", f"status: {report.status}"]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        else:
            lines.append(f"{prefix}: {json.dumps(obj, sort_keys=True)}")

    walk("", report.payload)
    for w in report.witnesses:
        lines.append(f"witness: {json.dumps(w, sort_keys=True, default=str)}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="toroidal-k", description=__doc__.splitlines()[0])
    parser.add_argument("--input", required=True, help="problem JSON file")
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--payload", help="JSON file with command-specific data (merged into the problem payload)")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        problem = load_problem(args.input)
        if args.payload:
            problem.payload.update(_read_json(args.payload))
        report = run(problem, args.command, args.threads)
    except (ProblemError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2, sort_keys=True, default=str))
    else:
        print(format_text(report))
    return EXIT[report.status]


if __name__ == "__main__":
    sys.exit(main())
