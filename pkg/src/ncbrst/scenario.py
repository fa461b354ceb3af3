"""Scenario files, shipped presets and the check pipeline behind the CLI."""
from __future__ import annotations

import copy
import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import yaml

from . import __version__
from .complexes import (brst, brst_formula_report, contraction_check, eta_zero_map, presentation,
                        shafarevich, supercommute_report)
from .dbracket import (BracketTable, HamiltonianData, check_hamiltonian, commutator_membership,
                       cotangent_moment, single_bracket, standard_table, verify_axioms)
from .homology import (betti_tables, diagonal_check, lie_cohomology, phi_psi, slice_report,
                       verify_decomposition)
from .ncalg import Arrow, Quiver, TensorElement, build_path_algebra, double_quiver, localize
from .repfun import DimensionVector, gauge_bracket_report, rep_algebra, verify_rep_laws
from .report import Check, Report


class ScenarioError(ValueError):
    pass


CHECKS = ("bracket", "brst", "rep", "homology", "decomposition", "phi-psi", "diagonal")
COMMANDS = {
    "verify-bracket": ("bracket",),
    "build-brst": ("brst",),
    "rep": ("rep",),
    "homology": ("homology",),
    "decomposition": ("decomposition",),
    "phi-psi": ("phi-psi",),
    "diagonal": ("diagonal",),
}
# prerequisites run first (never skipped)
REQUIRES = {
    "bracket": (),
    "brst": ("bracket",),
    "rep": ("bracket", "brst"),
    "homology": ("bracket", "brst"),
    "decomposition": ("bracket", "brst"),
    "phi-psi": ("bracket", "brst"),
    "diagonal": ("bracket", "brst"),
}
HOMOLOGICAL = {"homology", "decomposition", "phi-psi", "diagonal"}


@dataclass
class Scenario:
    name: str
    quiver: dict
    bracket: dict
    hamiltonian: dict
    dimension: list
    max_weight: int
    checks: list = field(default_factory=lambda: list(CHECKS))

    def as_dict(self):
        return {"name": self.name, "quiver": self.quiver, "bracket": self.bracket,
                "hamiltonian": self.hamiltonian, "dimension": self.dimension,
                "max_weight": self.max_weight, "checks": self.checks}


# ------------------------------------------------------------ presets

def _loop(name):
    return {"name": name, "source": 1, "target": 1}


def preset(name: str, g: int = 2) -> Scenario:
    """Shipped scenarios: jordan, genus-g, gauge, laurent, group-group, star."""
    if name.startswith("genus-") and name[6:].isdigit():
        name, g = "genus-g", int(name[6:])
    cot = {"default_cotangent": True}
    if name == "jordan":
        d = dict(quiver={"vertices": [1], "arrows": [_loop("x")], "double": {"x": "y"}},
                 bracket={"standard": "cotangent"}, hamiltonian=cot, dimension=[2], max_weight=4)
    elif name == "genus-g":
        if g < 1:
            raise ScenarioError("genus must be at least 1")
        d = dict(quiver={"vertices": [1], "arrows": [_loop(f"x{a}") for a in range(1, g + 1)],
                         "double": {f"x{a}": f"y{a}" for a in range(1, g + 1)}},
                 bracket={"standard": "cotangent"}, hamiltonian=cot, dimension=[2], max_weight=3,
                 checks=["bracket", "brst", "rep", "homology", "decomposition"])
        name = f"genus-{g}"
    elif name == "gauge":
        d = dict(quiver={"vertices": [1], "arrows": [_loop("t")]}, bracket={"standard": "gauge"},
                 hamiltonian={"per_vertex": {1: "t"}}, dimension=[2], max_weight=3,
                 checks=["bracket", "brst", "rep", "homology", "decomposition"])
    elif name == "laurent":
        d = dict(quiver={"vertices": [1], "arrows": [_loop("x")], "double": {"x": "y"}, "localize": ["x"]},
                 bracket={"standard": "cotangent"}, hamiltonian=cot, dimension=[1], max_weight=0,
                 checks=["bracket", "brst", "rep"])
    elif name == "group-group":
        d = dict(quiver={"vertices": [1], "arrows": [_loop("x")], "double": {"x": "y"},
                         "localize": ["x", "y"]},
                 bracket={"standard": "cotangent"}, hamiltonian=cot, dimension=[1], max_weight=0,
                 checks=["bracket", "brst", "rep"])
    elif name == "star":
        d = dict(quiver={"vertices": [1, 2], "arrows": [{"name": "x", "source": 1, "target": 2}],
                         "double": True},
                 bracket={"standard": "cotangent"}, hamiltonian=cot, dimension=[1, 1], max_weight=3,
                 checks=["bracket", "brst", "rep", "homology", "decomposition"])
    else:
        raise ScenarioError(f"unknown preset {name!r}")
    d.setdefault("checks", list(CHECKS))
    return validate_scenario({"name": name, **d})


# ------------------------------------------------------------ loading and validation

def _need(d, key, path, types=None):
    if not isinstance(d, dict) or key not in d:
        raise ScenarioError(f"{path}: missing field {key!r}")
    v = d[key]
    if types is not None and not isinstance(v, types):
        raise ScenarioError(f"{path}.{key}: expected {_tname(types)}, got {type(v).__name__}")
    return v


def _tname(types):
    types = types if isinstance(types, tuple) else (types,)
    return " or ".join(t.__name__ for t in types)


def validate_scenario(raw: dict, source="scenario") -> Scenario:
    if not isinstance(raw, dict):
        raise ScenarioError(f"{source}: top level must be a mapping")
    known = {"name", "quiver", "bracket", "hamiltonian", "dimension", "max_weight", "checks"}
    extra = set(raw) - known
    if extra:
        raise ScenarioError(f"{source}: unknown top-level keys {sorted(extra)}")
    q = _need(raw, "quiver", source, dict)
    _need(q, "vertices", "quiver", list)
    arrows = _need(q, "arrows", "quiver", list)
    for i, a in enumerate(arrows):
        p = f"quiver.arrows[{i}]"
        if not isinstance(a, dict):
            raise ScenarioError(f"{p}: expected a mapping")
        unknown = set(a) - {"name", "source", "target", "degree", "weight", "invertible"}
        if unknown:
            raise ScenarioError(f"{p}: unknown keys {sorted(unknown)}")
        _need(a, "name", p, str)
        for k in ("source", "target"):
            _need(a, k, p)
            if a[k] not in q["vertices"]:
                raise ScenarioError(f"{p}.{k}: {a[k]!r} is not a declared vertex")
        for k in ("degree", "weight"):
            if k in a and (not isinstance(a[k], int) or isinstance(a[k], bool)):
                raise ScenarioError(f"{p}.{k}: expected int")
        if "invertible" in a and not isinstance(a["invertible"], bool):
            raise ScenarioError(f"{p}.invertible: expected bool")
    if "double" in q and not isinstance(q["double"], (bool, dict)):
        raise ScenarioError("quiver.double: expected bool or mapping")
    if "localize" in q and not isinstance(q["localize"], list):
        raise ScenarioError("quiver.localize: expected a list of arrow names")

    b = _need(raw, "bracket", source, dict)
    if ("standard" in b) == ("entries" in b):
        raise ScenarioError("bracket: give exactly one of 'standard' or 'entries'")
    if "entries" in b:
        for i, e in enumerate(b["entries"]):
            p = f"bracket.entries[{i}]"
            _need(e, "lhs", p, str)
            _need(e, "rhs", p, str)
            for j, t in enumerate(_need(e, "terms", p, list)):
                for k in ("left_word", "right_word"):
                    _need(t, k, f"{p}.terms[{j}]", str)
                _need(t, "coeff", f"{p}.terms[{j}]", (int, str))

    h = raw.get("hamiltonian", {"default_cotangent": True})
    if h == "default_cotangent" or h == "cotangent-default":
        h = {"default_cotangent": True}
    if not isinstance(h, dict) or not (h.get("default_cotangent") or isinstance(h.get("per_vertex"), dict)):
        raise ScenarioError("hamiltonian: expected default_cotangent or a per_vertex mapping")

    dim = raw.get("dimension", [1] * len(q["vertices"]))
    if isinstance(dim, int):
        dim = [dim]
    if not isinstance(dim, list) or any(not isinstance(n, int) or n <= 0 for n in dim):
        raise ScenarioError("dimension: expected a list of positive integers")
    if len(dim) != len(q["vertices"]):
        raise ScenarioError(f"dimension: {len(dim)} entries for {len(q['vertices'])} vertices")
    mw = raw.get("max_weight", 2)
    if not isinstance(mw, int) or mw < 0:
        raise ScenarioError("max_weight: expected a non-negative integer")
    checks = raw.get("checks", list(CHECKS))
    if checks == "all" or checks == ["all"]:
        checks = list(CHECKS)
    for c in checks:
        if c not in CHECKS:
            raise ScenarioError(f"checks: unknown check {c!r} (known: {', '.join(CHECKS)})")
    sc = Scenario(str(raw.get("name", source)), copy.deepcopy(q), copy.deepcopy(b), h, dim, mw, list(checks))
    build(sc)  # resolve names now so errors surface at load time
    return sc


def load_scenario(path_or_preset, g=2) -> Scenario:
    """Load a YAML/JSON scenario file, or a preset by name."""
    p = Path(str(path_or_preset))
    if not p.exists():
        return preset(str(path_or_preset), g)
    text = p.read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"{p}: parse error{where}: {getattr(exc, 'problem', exc)}") from exc
    raw = raw or {}
    raw.setdefault("name", p.stem)
    return validate_scenario(raw, str(p))


# ------------------------------------------------------------ building objects

@dataclass
class Built:
    quiver: Quiver
    A: object
    ham: HamiltonianData
    nv: DimensionVector

    @property
    def invertible(self):
        return [a.name for a in self.quiver.arrows if a.invertible]


def _build_quiver(spec) -> Quiver:
    arrows = [Arrow(a["name"], a["source"], a["target"], a.get("degree", 0), a.get("weight", 1),
                    a.get("invertible", False)) for a in spec["arrows"]]
    q = Quiver(spec["vertices"], arrows)
    dbl = spec.get("double")
    if dbl:
        q = double_quiver(q, dbl if isinstance(dbl, dict) else None)
    if spec.get("localize"):
        q = localize(q, spec["localize"])
    return q


def _build_table(spec, q) -> BracketTable:
    if "standard" in spec:
        return standard_table(spec["standard"], q)
    ctx = build_path_algebra(q)
    entries = {}
    for e in spec["entries"]:
        val = TensorElement.zero(ctx, 2)
        for t in e["terms"]:
            val = val + TensorElement.from_elements(ctx.parse(t["left_word"]), ctx.parse(t["right_word"])) \
                * Fraction(str(t["coeff"]))
        entries[(e["lhs"], e["rhs"])] = val
    return BracketTable(ctx, entries, name="custom")


def _build_ham(spec, q) -> HamiltonianData:
    if spec.get("default_cotangent"):
        return cotangent_moment(q)
    ctx = build_path_algebra(q)
    by_str = {str(v): v for v in q.vertices}
    deltas = {}
    for k, s in spec["per_vertex"].items():
        if str(k) not in by_str:
            raise ScenarioError(f"hamiltonian.per_vertex: unknown vertex {k!r}")
        v = by_str[str(k)]
        deltas[v] = ctx.e(v) * ctx.parse(str(s)) * ctx.e(v)
    for v in q.vertices:
        deltas.setdefault(v, ctx.zero())
    return HamiltonianData({v: deltas[v] for v in q.vertices})


def build(sc: Scenario) -> Built:
    try:
        q = _build_quiver(sc.quiver)
        table = _build_table(sc.bracket, q)
        ham = _build_ham(sc.hamiltonian, q)
        A = presentation(q, table, label=sc.name)
        nv = DimensionVector(q, sc.dimension)
    except ScenarioError:
        raise
    except (ValueError, KeyError) as exc:
        raise ScenarioError(f"{sc.name}: {exc}") from exc
    return Built(q, A, ham, nv)


# ------------------------------------------------------------ running

def _jordan_like(b: Built):
    return len(b.quiver.vertices) == 1 and len(b.quiver.dual_pairs) == 1 and len(b.quiver.arrows) == 2


def plan(sc: Scenario, checks) -> list:
    """Requested checks plus prerequisites, in dependency order."""
    want = set()
    for c in checks:
        want.add(c)
        want.update(REQUIRES[c])
    return [c for c in CHECKS if c in want]


def run(sc: Scenario, checks=None, jobs=1) -> Report:
    checks = list(checks or sc.checks)
    b = build(sc)
    steps = plan(sc, checks)
    n = b.nv.total
    if b.invertible:
        if n >= 2 and ({"rep"} | HOMOLOGICAL) & set(steps):
            raise ScenarioError(f"{sc.name}: invertible generators {b.invertible} at total dimension {n} ≥ 2 "
                                "are out of scope for representation and homology checks")
        if HOMOLOGICAL & set(steps):
            raise ScenarioError(f"{sc.name}: homology needs weight-graded polynomial slices; "
                                f"invertible generators {b.invertible} make them infinite")
    for c in ("phi-psi", "diagonal"):
        if c in steps and not _jordan_like(b):
            raise ScenarioError(f"{sc.name}: {c} is defined for the doubled Jordan quiver only")

    rep = Report(f"{sc.name} (ncbrst {__version__})")
    rep.data["scenario"] = sc.as_dict()
    timing = {}
    state = {}
    failed = None
    for step in steps:
        if failed:
            rep.add(f"{step}: not run", False, f"prerequisite '{failed}' failed")
            continue
        t0 = time.perf_counter()
        try:
            part = _STEPS[step](b, sc, state, jobs)
        except (ValueError, KeyError) as exc:
            part = Report(step).add("error", False, f"{type(exc).__name__}: {exc}")
        timing[step] = round(time.perf_counter() - t0, 3)
        rep.extend(part, prefix=f"{step}: ")
        if not part.ok and any(step in REQUIRES[c] for c in steps):
            failed = step
    rep.data["timing"] = timing
    return rep


def _step_bracket(b, sc, state, jobs):
    rep = Report("bracket")
    rep.extend(verify_axioms(b.A.table, max_word_len=2))
    rep.extend(check_hamiltonian(b.A.table, b.ham))
    return rep


def _step_brst(b, sc, state, jobs):
    rep = Report("brst")
    sh = shafarevich(b.A, b.ham)
    B = brst(b.A, b.ham)
    state["sh"], state["B"] = sh, B
    rep.extend(brst_formula_report(B))
    rep.extend(supercommute_report(B))
    gg = single_bracket(B.table, B.charge, B.charge)
    rep.add("{γ,γ} is a sum of commutators", commutator_membership(gg, gg.weight))
    rep.extend(eta_zero_map(B, sh))
    rep.extend(B.check_words(max_len=4))
    rep.extend(verify_axioms(B.table, max_word_len=2, differential=B.d), prefix="BRST table ")
    if len(b.quiver.vertices) <= 2 and sc.bracket.get("standard") == "gauge":
        rep.extend(contraction_check())
    rep.data["brst_presentation"] = B.as_dict()
    return rep


def _step_rep(b, sc, state, jobs):
    rep = Report("rep")
    B = state["B"]
    rep.extend(verify_rep_laws(B, B.table, B.charge, b.nv.as_list()))
    if sc.bracket.get("standard") == "gauge":
        rep.extend(gauge_bracket_report(b.A, b.nv.as_list()))
    return rep


def _step_homology(b, sc, state, jobs):
    rep = Report("homology")
    K = rep_algebra(state["sh"], b.nv.as_list())
    Bn = rep_algebra(state["B"], b.nv.as_list())
    tabK, tabInv, tabB = betti_tables(K, Bn, sc.max_weight, jobs)
    rep.extend(slice_report(K, sc.max_weight), prefix="K ")
    rep.extend(slice_report(Bn, sc.max_weight), prefix="B ")
    rows = lambda tab: [[w, k, d] for w in sorted(tab) for k, d in sorted(tab[w].items(), reverse=True)]
    rep.data["betti_K"] = rows(tabK)
    rep.data["betti_K_GL"] = rows(tabInv)
    rep.data["betti_B"] = rows(tabB)
    rep.data["lie_cohomology"] = [[k, d] for k, d in lie_cohomology(b.nv.as_list()).dims.items()]
    return rep


def _step_decomposition(b, sc, state, jobs):
    rep = verify_decomposition(b.A, b.ham, b.nv.as_list(), sc.max_weight, jobs)
    rep.data["lie_cohomology"] = [[k, d] for k, d in rep.data["lie_cohomology"].items()]
    rep.data["K_GL_positive_degrees"] = [[w, k, d] for w, h in sorted(rep.data["K_GL_positive_degrees"].items())
                                         for k, d in sorted(h.items())]
    return rep


def _step_phi_psi(b, sc, state, jobs):
    return phi_psi(b.A, b.ham, b.nv.total, sc.max_weight)


def _step_diagonal(b, sc, state, jobs):
    return diagonal_check(b.A, b.ham, b.nv.total, sc.max_weight)


_STEPS = {"bracket": _step_bracket, "brst": _step_brst, "rep": _step_rep, "homology": _step_homology,
          "decomposition": _step_decomposition, "phi-psi": _step_phi_psi, "diagonal": _step_diagonal}


# ------------------------------------------------------------ output

def _plain(x):
    """JSON-native copy, so emit(load(emit(r))) is byte-identical."""
    return json.loads(json.dumps(x, default=str, ensure_ascii=False))


def emit(rep: Report, fmt="text") -> str:
    if fmt == "json":
        return json.dumps(_plain(rep.as_dict()), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for key in sorted(k for k in rep.data if k.startswith("betti")):
            buf.write(f"# {key}\n")
            w.writerow(["weight", "degree", "dim"])
            w.writerows(rep.data[key])
            buf.write("\n")
        buf.write("# checks\n")
        w.writerow(["check", "status", "detail"])
        for c in rep.checks:
            w.writerow([c.name, c.status, c.detail])
        return buf.getvalue()
    if fmt == "text":
        lines = [str(rep)]
        for key in sorted(k for k in rep.data if k.startswith("betti")):
            lines.append(f"{key} (weight: degree=dim)")
            by_w = {}
            for w_, k, d in rep.data[key]:
                by_w.setdefault(w_, []).append(f"{k}={d}")
            lines.extend(f"  w={w_}: " + ", ".join(v) for w_, v in sorted(by_w.items()))
        if "timing" in rep.data:
            lines.append("timing (s): " + ", ".join(f"{k}={v}" for k, v in rep.data["timing"].items()))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def load_report(text: str) -> Report:
    d = json.loads(text)
    checks = [Check(c["name"], c["status"], c.get("detail", ""), c.get("witness")) for c in d["checks"]]
    return Report(d["title"], checks, d.get("data", {}))
