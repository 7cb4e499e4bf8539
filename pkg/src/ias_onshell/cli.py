"""Command-line front door: ias-onshell {build,caustic,classify,versal,verify,plot,selftest}.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .caustic import CausticError, family_caustic, parametric_caustic, read_csv
from .classify import ClassifierInconsistency, classify
from .construct import ConstructError, builtin, gen_family, ias_maps
from .germ import FLOAT_ZERO_TOL, GermError, LagrangianGerm, jets, load_germ, normalize_cubic, recenter
from .polyjet import Poly, PolyError
from .verify import CHECKS, run_checks
from .versal import DEFAULT_CUTOFF, VersalError, default_catalog, is_versal, stability_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    germ: str | None = None
    builtin: str | None = None
    kind: str = "both"
    window: tuple | None = None
    res: int | None = None
    cutoff: int = DEFAULT_CUTOFF
    tol: float | None = None
    out: str | None = None
    seed: int = 0

    def kinds(self) -> list[str]:
        return ["cc", "sp"] if self.kind == "both" else [self.kind]


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("ias_onshell") / "fixtures" / f"{name}.json"))


def fixture_names() -> list[str]:
    root = resources.files("ias_onshell") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def parse_window(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--window: expected four numbers, got {text!r}") from None
    if len(vals) != 4:
        raise UsageError(f"--window: expected qmin,qmax,bmin,bmax, got {len(vals)} values")
    if not (vals[1] > vals[0] and vals[3] > vals[2]):
        raise UsageError(f"--window: empty box {text!r}")
    return vals


def parse_point(text: str) -> list:
    """Comma-separated coordinates; integers and p/q stay exact, decimals become floats."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(float(tok) if any(c in tok for c in ".eE") else Fraction(tok))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"--at: cannot parse coordinate {tok!r}") from None
    return out


def resolve_input(cfg: RunConfig):
    """(germ, builtin name); a germ file may also name a builtin as {"builtin": "circle"}."""
    if bool(cfg.germ) == bool(cfg.builtin):
        raise UsageError("give exactly one of --germ PATH or --builtin NAME")
    if cfg.builtin:
        builtin(cfg.builtin)  # validates the name
        return None, cfg.builtin
    path = Path(cfg.germ)
    if not path.exists() and fixture_path(cfg.germ).exists():
        path = fixture_path(cfg.germ)
    if not path.exists():
        raise UsageError(f"{cfg.germ}: no such file (shipped fixtures: {', '.join(fixture_names())})")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GermError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if isinstance(data, dict) and "builtin" in data:
        builtin(data["builtin"])
        return None, data["builtin"]
    return load_germ(path), None


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _suffixed(out: str, kind: str, multi: bool) -> Path:
    p = Path(out)
    return p.with_name(f"{p.stem}_{kind}{p.suffix}") if multi else p


# -- commands ------------------------------------------------------------------------

def cmd_build(cfg: RunConfig) -> int:
    germ, name = resolve_input(cfg)
    if name:
        maps = builtin(name)
        summary = {"builtin": name, "maps": {k: maps[k].formulas for k in cfg.kinds()}}
        for k in cfg.kinds():
            print(f"[{name} {k}] " + "; ".join(f"{key}: {v}" for key, v in maps[k].formulas.items()))
        if cfg.out:
            _emit(summary, cfg.out)
        return EXIT_OK
    names = ["q"] if germ.n == 1 else [f"q{i + 1}" for i in range(germ.n)]
    if germ.S.is_zero():
        print("warning: S vanishes; Degenerate germ, G = -p.beta", file=sys.stderr)
    families = {}
    for k in cfg.kinds():
        fam = gen_family(germ, k)
        families[k] = fam.to_dict()
        print(f"G_{k} = {fam.G.format(fam.var_names())}")
    try:
        h, A = normalize_cubic(recenter(germ, [0] * germ.n))
        print(f"normalized S = {h.S.format(names)}")
        print(f"shear A = {[[str(a) for a in row] for row in A]}")
        if not h.S.is_zero():
            print(f"jets = {jets(h, 7).to_dict()}")
    except GermError as exc:
        print(f"note: {exc}", file=sys.stderr)
    out = families if len(families) > 1 else next(iter(families.values()))
    if cfg.out:
        _emit(out, cfg.out)
    return EXIT_OK


def _caustic_sets(cfg: RunConfig):
    germ, name = resolve_input(cfg)
    out = {}
    if name:
        maps = builtin(name)
        for k in cfg.kinds():
            ias = maps[k]
            win = cfg.window or ((-3.2, 3.2, -3.2, 3.2) if k == "cc" else (-3.2, 3.2, -1.0, 1.0))
            res = cfg.res or (256 if ias.n == 1 else 12)
            out[k] = parametric_caustic(ias, win, res)
        return germ, name, out
    if germ.n not in (1, 2):
        raise UsageError("caustic extraction supports n = 1 or 2")
    win = cfg.window or (-0.5, 0.5, -0.5, 0.5)
    for k in cfg.kinds():
        kw = {} if cfg.tol is None else {"tol_polish": cfg.tol}
        out[k] = family_caustic(gen_family(germ, k), win, cfg.res, **kw)
    return germ, name, out


def _L_curve(germ, name, cs_list):
    from .plotting import curve_of_L, unit_circle
    if name:
        return unit_circle()
    q = np.concatenate([cs.params[:, 0] for cs in cs_list]) if cs_list else np.zeros(1)
    qq = np.linspace(q.min(), q.max(), 256) if len(q) else np.zeros(1)
    return curve_of_L(germ.S.diff(0).compile(), qq)


def cmd_caustic(cfg: RunConfig, svg: str | None = None) -> int:
    germ, name, sets = _caustic_sets(cfg)
    multi = len(sets) > 1
    for k, cs in sets.items():
        if cs.degenerate:
            print(f"[{k}] degenerate: D vanishes identically on the window", file=sys.stderr)
        else:
            print(f"[{k}] {len(cs)} samples, branches {cs.branches()}, dropped {cs.dropped}", file=sys.stderr)
        if cfg.out:
            cs.to_csv(_suffixed(cfg.out, k, multi))
        else:
            sys.stdout.write(cs.to_csv())
    if svg:
        n = germ.n if germ is not None else builtin(name)["cc"].n
        if n != 1:
            print("note: SVG is drawn only for planar caustics (n = 1)", file=sys.stderr)
        else:
            from .plotting import save_caustic_figure
            L = _L_curve(germ, name, list(sets.values()))
            panels = [(cs, L, f"E_{k}") for k, cs in sets.items() if not cs.degenerate]
            save_caustic_figure(panels, svg, caption=f"on-shell caustics of {name or Path(cfg.germ).stem}",
                                equal=bool(name))
    return EXIT_OK


def cmd_classify(cfg: RunConfig, at: str | None = None) -> int:
    germ, name = resolve_input(cfg)
    if germ is None:
        raise UsageError("classify needs a polynomial germ, not a builtin")
    point = parse_point(at) if at else None
    if point is not None and len(point) != germ.n:
        raise UsageError(f"--at has {len(point)} coordinates, expected {germ.n}")
    tol = FLOAT_ZERO_TOL if cfg.tol is None else cfg.tol
    report = {}
    for k in cfg.kinds():
        report[k] = classify(germ, k, point, tol).to_dict()
        print(f"[{k}] {report[k]['class']} ({report[k]['fired']})", file=sys.stderr)
    _emit(report if len(report) > 1 else next(iter(report.values())), cfg.out)
    return EXIT_OK


def cmd_versal(cfg: RunConfig, catalog: bool = False) -> int:
    if catalog:
        entries = []
        ok = True
        for e in default_catalog():
            v = is_versal(e.deformation(cfg.cutoff), "full")
            ok &= bool(v)
            entries.append({**e.to_dict(), **v.to_dict()})
        _emit(entries, cfg.out)
        return EXIT_OK if ok else EXIT_FAIL
    germ, name = resolve_input(cfg)
    if germ is None:
        raise UsageError("versal needs a polynomial germ or --catalog")
    report = {k: stability_check(gen_family(germ, k), cfg.cutoff).to_dict() for k in cfg.kinds()}
    _emit(report if len(report) > 1 else next(iter(report.values())), cfg.out)
    return EXIT_OK if all(r["verdict"] == "versal" for r in report.values()) else EXIT_FAIL


def cmd_verify(cfg: RunConfig, checks: str = "hamiltonian,ma,shell,family") -> int:
    germ, name = resolve_input(cfg)
    wanted = [c.strip() for c in checks.split(",") if c.strip()]
    for c in wanted:
        if c not in CHECKS:
            raise UsageError(f"--checks: unknown check {c!r}; choose from {', '.join(CHECKS)}")
    if name and "family" in wanted:
        raise UsageError("the family check needs a polynomial germ")
    out = []
    family_done = False
    for k in cfg.kinds():
        ias = builtin(name)[k] if name else ias_maps(germ, k)
        todo = [c for c in wanted if c != "family" or not family_done]
        family_done |= "family" in todo
        for r in run_checks(ias, germ, todo):
            d = r.to_dict()
            d["kind"] = k if r.name != "family" else "cc+sp"
            out.append(d)
    _emit(out, cfg.out)
    return EXIT_OK if all(d["passed"] for d in out) else EXIT_FAIL


def cmd_plot(cfg: RunConfig, csv_paths: list[str]) -> int:
    from .plotting import caustic_from_csv, save_caustic_figure, unit_circle
    if not cfg.out:
        raise UsageError("plot needs --out PATH.svg")
    if not csv_paths:
        if not (cfg.germ or cfg.builtin):
            raise UsageError("plot needs --csv files or a --germ/--builtin to compute")
        return _plot_computed(cfg)
    panels = []
    for p in csv_paths:
        header, data = read_csv(p)
        cs = caustic_from_csv(header, data)
        if cs.n != 1:
            raise UsageError(f"{p}: only planar caustics (n = 1) can be drawn")
        L = unit_circle() if header[1] in ("u1", "s1") else None
        panels.append((cs, L, Path(p).stem))
    save_caustic_figure(panels, cfg.out, equal=all(L is not None for _, L, _ in panels))
    return EXIT_OK


def _plot_computed(cfg: RunConfig) -> int:
    from .plotting import save_caustic_figure
    germ, name, sets = _caustic_sets(cfg)
    n = germ.n if germ is not None else builtin(name)["cc"].n
    if n != 1:
        raise UsageError("only planar caustics (n = 1) can be drawn")
    L = _L_curve(germ, name, list(sets.values()))
    panels = [(cs, L, f"E_{k}") for k, cs in sets.items() if not cs.degenerate]
    save_caustic_figure(panels, cfg.out, caption=f"on-shell caustics of {name or Path(cfg.germ).stem}",
                        equal=bool(name))
    return EXIT_OK


def random_germ(rng: random.Random, n: int, max_degree: int = 7, terms: int = 6) -> LagrangianGerm:
    """Random polynomial germ with small rational coefficients and degrees 3..max_degree."""
    from .polyjet import odd_monomials, even_monomials
    mons = [e for e in odd_monomials(n, max_degree) + even_monomials(n, max_degree) if sum(e) >= 3]
    chosen = rng.sample(mons, min(terms, len(mons)))
    coefs = {e: Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for e in chosen}
    return LagrangianGerm(n, Poly(n, coefs))


def cmd_selftest(cfg: RunConfig, count: int = 20) -> int:
    """Fast regression pass: fixture classes, catalog versality, exact identities on random germs."""
    from .verify import check_family_consistency, check_hamiltonian, check_shell
    expected = {"a22": ("A_{2/2}",) * 2, "a42": ("A_{4/2}",) * 2,
                "d42p": ("D_{4/2}+",) * 2, "d42m": ("D_{4/2}-",) * 2,
                "d62p": ("D_{6/2}+", "D_{6/2}-"), "d62m": ("D_{6/2}-", "D_{6/2}+"),
                "d82p": ("D_{8/2}+",) * 2, "d82m": ("D_{8/2}-",) * 2, "e82": ("E_{8/2}",) * 2}
    results = []
    for fx, want in expected.items():
        g = load_germ(fixture_path(fx))
        got = (classify(g, "cc").label, classify(g, "sp").label)
        results.append((f"classify {fx}", got == want, f"{got}"))
    for e in default_catalog():
        v = is_versal(e.deformation(cfg.cutoff), "full")
        results.append((f"versal {e.label}", bool(v), v.verdict))
    rng = random.Random(cfg.seed)
    for i in range(count):
        g = random_germ(rng, 1 + i % 2, 5)
        ok = check_family_consistency(g).passed
        for k in ("cc", "sp"):
            ias = ias_maps(g, k)
            ok &= check_hamiltonian(ias).passed and check_shell(ias).passed
        names = ["q"] if g.n == 1 else ["q1", "q2"]
        results.append((f"identities germ {i}", ok, g.S.format(names)))
    for label, ok, info in results:
        print(f"{'PASS' if ok else 'FAIL'}  {label}  {info}")
    failed = sum(1 for _, ok, _ in results if not ok)
    print(f"{len(results) - failed}/{len(results)} passed (seed {cfg.seed})")
    return EXIT_OK if not failed else EXIT_FAIL


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--germ", help="germ JSON file, or the name of a shipped fixture (e.g. a42)")
    common.add_argument("--builtin", help="circle or torus:n")
    common.add_argument("--kind", choices=["cc", "sp", "both"], default="both")
    common.add_argument("--window", help="qmin,qmax,bmin,bmax (u/v or s/t ranges for builtins)")
    common.add_argument("--res", type=int, help="grid points per axis (>= 2)")
    common.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help="odd truncation degree >= 3")
    common.add_argument("--tol", type=float, help="polish tolerance (caustic) or zero tolerance (classify)")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="ias-onshell", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="generating families and IAS summary")
    c = sub.add_parser("caustic", parents=[common], help="on-shell caustic samples as CSV")
    c.add_argument("--svg", help="also draw the caustic to this SVG file")
    c = sub.add_parser("classify", parents=[common], help="singularity class at a point of L")
    c.add_argument("--at", help="point of L in the coordinates of S, e.g. 0,1/2")
    c = sub.add_parser("versal", parents=[common], help="odd versality / on-shell stability")
    c.add_argument("--catalog", action="store_true", help="check the simple-singularity catalog")
    c = sub.add_parser("verify", parents=[common], help="Monge-Ampere, Hamiltonian, shell, family checks")
    c.add_argument("--checks", default="hamiltonian,ma,shell,family")
    c = sub.add_parser("plot", parents=[common], help="SVG figure from caustic CSVs or a germ")
    c.add_argument("--csv", action="append", default=[], help="caustic CSV (repeatable)")
    c = sub.add_parser("selftest", parents=[common], help="quick regression pass")
    c.add_argument("--count", type=int, default=20, help="random germs for the identity pass")
    return p


def config_from_args(args) -> RunConfig:
    if args.res is not None and args.res < 2:
        raise UsageError("--res must be >= 2")
    if args.cutoff < 3 or args.cutoff % 2 == 0:
        raise UsageError("--cutoff must be odd and >= 3")
    window = parse_window(args.window) if args.window else None
    return RunConfig(args.command, args.germ, args.builtin, args.kind, window, args.res, args.cutoff,
                     args.tol, args.out, args.seed)


VALUE_FLAGS = ("--window", "--at")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn '--window -1,1,...' into '--window=-1,1,...' so argparse does not read it as a flag."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        cfg = config_from_args(args)
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "caustic":
            return cmd_caustic(cfg, args.svg)
        if args.command == "classify":
            return cmd_classify(cfg, args.at)
        if args.command == "versal":
            return cmd_versal(cfg, args.catalog)
        if args.command == "verify":
            return cmd_verify(cfg, args.checks)
        if args.command == "plot":
            return cmd_plot(cfg, args.csv)
        return cmd_selftest(cfg, args.count)
    except ClassifierInconsistency as exc:
        print(f"error: classifier inconsistency: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, GermError, ConstructError, CausticError, VersalError, PolyError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
