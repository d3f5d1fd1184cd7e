"""Command-line front end: compile, bound, reproduce, simulate.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 reproduce mismatch.
Every run writes ``manifest.json`` into the output directory.  The
``RDV_THREADS`` environment variable (or ``--workers``) sets the worker count
for table reproduction and simulation.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .bounds import SolverFailure, lhv_bound, ml_bound, ns_bound, nu_crit, seesaw
from .bounds.lhv import ScenarioTooLarge
from .bounds.noise import NoAdvantage
from .game import Box, GameError, Scenario, compile_game, deterministic_box, quantum_box
from .graph import GraphError, load_graph
from .mcverify import SimulationError, simulate
from .numkit.config import DEFAULT
from .numkit.lp import LPError
from .numkit.sdp import SDPError
from .tables import table_ids

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_MISMATCH = 0, 2, 3, 4
KIND_ALIASES = {"lhv": "lhv", "s": "lhv", "ns": "ns", "n": "ns", "ml": "ml", "npa": "ml", "m": "ml",
                "seesaw": "seesaw", "q": "seesaw", "nu": "nu"}
BOX_SOURCES = ("lhv", "ns", "ml", "seesaw", "uniform")

# settings that may come from a config file, with their types and defaults
SETTINGS = {
    "graph": (str, None), "reflexive": (bool, False), "steps": (int, 1),
    "edge_meet": (bool, False), "same_start": (bool, False), "kinds": (str, "lhv,ns,ml,seesaw"),
    "level": (str, "NPA1"), "restarts": (int, 50), "seed": (int, 0), "dims": (str, None),
    "out": (str, "rdv-out"), "output": (str, None), "trials": (int, 100000), "box": (str, "lhv"),
    "box_file": (str, None), "trace": (str, None), "csv": (str, None), "workers": (int, None),
}


class ConfigError(ValueError):
    pass


def _parse_bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use ``_`` or ``-``."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in SETTINGS:
            raise ConfigError(f"{path}:{n}: unknown key {k!r}")
        typ = SETTINGS[k][0]
        try:
            out[k] = _parse_bool(v) if typ is bool else typ(v)
        except ValueError:
            raise ConfigError(f"{path}:{n}: bad value {v!r} for {k}") from None
    return out


def resolve(args) -> dict:
    """Defaults, then config file, then explicit command-line values."""
    cfg = {k: d for k, (_, d) in SETTINGS.items()}
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for k in SETTINGS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _dims(cfg):
    if not cfg["dims"]:
        return None, None
    parts = str(cfg["dims"]).replace("x", ",").split(",")
    try:
        d = [int(p) for p in parts if p.strip()]
    except ValueError:
        raise ConfigError(f"bad --dims {cfg['dims']!r}; use e.g. 3 or 3,3") from None
    if len(d) == 1:
        d = d * 2
    if len(d) != 2 or min(d) < 1:
        raise ConfigError(f"bad --dims {cfg['dims']!r}")
    return d[0], d[1]


def _scenario(cfg) -> Scenario:
    if not cfg["graph"]:
        raise ConfigError("--graph is required (catalog name or JSON file)")
    if cfg["steps"] < 1:
        raise ConfigError("--steps must be >= 1")
    g = load_graph(cfg["graph"], cfg["reflexive"])
    return Scenario(g, cfg["steps"], cfg["edge_meet"], cfg["same_start"])


def _kinds(cfg) -> list[str]:
    out = []
    for k in str(cfg["kinds"]).split(","):
        k = k.strip().lower()
        if not k:
            continue
        if k not in KIND_ALIASES:
            raise ConfigError(f"unknown bound kind {k!r}; use lhv, ns, ml, seesaw, nu")
        if KIND_ALIASES[k] not in out:
            out.append(KIND_ALIASES[k])
    if not out:
        raise ConfigError("no bound kinds requested")
    return out


def write_manifest(outdir: Path, command: str, cfg: dict, extra: dict | None = None) -> Path:
    import scipy

    outdir.mkdir(parents=True, exist_ok=True)
    man = {
        "command": command, "config": cfg,
        "versions": {"rendezvous_bell": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__, "kernels": kernels.BACKEND},
        "seed": cfg.get("seed"), "tolerances": DEFAULT.to_dict(),
        "threads": cfg.get("workers") or int(os.environ.get("RDV_THREADS", "1")),
    }
    if extra:
        man.update(extra)
    path = outdir / "manifest.json"
    path.write_text(json.dumps(man, indent=2, sort_keys=True))
    return path


def cmd_compile(cfg) -> int:
    sc = _scenario(cfg)
    game = compile_game(sc)
    out = Path(cfg["output"] or Path(cfg["out"]) / "game.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    game.dump(out)
    write_manifest(out.parent, "compile", cfg)
    print(f"{sc.describe()}: outcomes={game.n_outcomes} p={game.p} "
          f"nonzero={len(game.nonzero())} -> {out}")
    return EXIT_OK


def cmd_bound(cfg) -> int:
    sc = _scenario(cfg)
    kinds = _kinds(cfg)
    d_a, d_b = _dims(cfg)
    game = compile_game(sc)
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    write_manifest(outdir, "bound", cfg)
    lhv = None
    q = None
    for k in kinds:
        if k == "lhv" or (k == "nu" and lhv is None):
            lhv = lhv_bound(game)
            rep = lhv
        if k == "ns":
            rep = ns_bound(game)
        elif k == "ml":
            rep = ml_bound(game, cfg["level"])
        elif k == "seesaw" or (k == "nu" and q is None):
            q = seesaw(game, d_a, d_b, restarts=cfg["restarts"], seed=cfg["seed"])
            rep = q
        if k == "nu":
            try:
                cn = nu_crit(q.certificate, game, lhv.value)
            except NoAdvantage as e:
                print(f"nu: {e}")
                (outdir / "nu.json").write_text(json.dumps({"nu_crit": None, "reason": str(e)}))
                continue
            (outdir / "nu.json").write_text(json.dumps(cn.to_dict(), indent=2))
            print(f"nu_crit: {cn.nu:.6f} (v0={cn.v0:.6f}, v1={cn.v1:.6f}, lhv={cn.lhv:.6f})")
            continue
        rep.write(outdir / f"{k}.json")
        extra = f" = {rep.exact}" if rep.exact is not None else ""
        print(f"{k}: {rep.value:.8f}{extra}")
    return EXIT_OK


def cmd_reproduce(cfg, tables) -> int:
    from .reproduce import reproduce

    ids = []
    for t in tables:
        t = t.upper()
        if t == "ALL":
            ids.extend(table_ids())
        elif t in table_ids():
            ids.append(t)
        else:
            raise ConfigError(f"unknown table {t!r}; known: {', '.join(table_ids())}")
    outdir = Path(cfg["out"])
    d_a, d_b = _dims(cfg)
    write_manifest(outdir, "reproduce", cfg, {"tables": ids})

    def show(results):
        for r in results:
            row = r.row()
            print(f"{r.cell.label():38s} exp={row['expected']:>8s} got={row['computed'][:10]:>10s} "
                  f"{row['status']:5s} {r.note}", flush=True)

    summary = reproduce(ids, restarts=cfg["restarts"], seed=cfg["seed"],
                        dims=None if d_a is None else (d_a, d_b), workers=cfg["workers"], progress=show)
    csv_path = summary.write_csv(cfg["csv"] or outdir / "reproduce.csv")
    for line in summary.lines():
        print(line)
    print(f"csv: {csv_path}")
    return EXIT_OK if summary.ok else EXIT_MISMATCH


def _sim_box(cfg, sc, game) -> Box:
    if cfg["box_file"]:
        try:
            data = json.loads(Path(cfg["box_file"]).read_text())
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read box file: {e}") from None
        if data.get("type") == "deterministic":
            from .game import DeterministicStrategy
            return deterministic_box(DeterministicStrategy(tuple(data["alice"])),
                                     DeterministicStrategy(tuple(data["bob"])), game.n_outcomes)
        if data.get("type") == "quantum":
            from .quantum import QuantumStrategy
            return quantum_box(QuantumStrategy.from_dict(data))
        return Box.from_dict(data)
    src = str(cfg["box"]).lower()
    if src not in BOX_SOURCES:
        raise ConfigError(f"unknown box source {src!r}; choose from {', '.join(BOX_SOURCES)}")
    if src == "uniform":
        return Box(np.full(game.shape, 1.0 / game.n_outcomes ** 2))
    if src == "lhv":
        s_a, s_b = lhv_bound(game).certificate
        return deterministic_box(s_a, s_b, game.n_outcomes)
    if src == "ns":
        return ns_bound(game).certificate
    if src == "ml":
        from .bounds.npa import box_from_moments, build_npa
        rep = ml_bound(game, cfg["level"])
        return box_from_moments(rep.certificate, build_npa(game, cfg["level"])[2])
    d_a, d_b = _dims(cfg)
    rep = seesaw(game, d_a, d_b, restarts=cfg["restarts"], seed=cfg["seed"])
    return quantum_box(rep.certificate)


def cmd_simulate(cfg) -> int:
    sc = _scenario(cfg)
    if cfg["trials"] < 1:
        raise ConfigError("--trials must be >= 1")
    game = compile_game(sc)
    box = _sim_box(cfg, sc, game)
    outdir = Path(cfg["out"])
    write_manifest(outdir, "simulate", cfg)
    rep = simulate(sc, box, cfg["trials"], cfg["seed"], trace_path=cfg["trace"], workers=cfg["workers"])
    path = rep.write(cfg["output"] or outdir / "simulation.json")
    from .game import game_value
    exact = game_value(game, box)
    print(f"trials={rep.trials} successes={rep.successes} estimate={rep.estimate:.6f} "
          f"95% CI=[{rep.ci_low:.6f}, {rep.ci_high:.6f}] exact={exact:.6f} -> {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rendezvous-bell", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        sp.add_argument("--config", help="key = value settings file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int, help="worker count (default: RDV_THREADS or 1)")
        if scenario:
            sp.add_argument("--graph", help="catalog name (cubic-2..cubic-9, cycle-N, dircycle-N) or JSON file")
            sp.add_argument("--reflexive", action=argparse.BooleanOptionalAction, default=None)
            sp.add_argument("--steps", type=int, help="steps per party (N_max)")
            sp.add_argument("--edge-meet", dest="edge_meet", action=argparse.BooleanOptionalAction,
                            default=None)
            sp.add_argument("--same-start", dest="same_start", action=argparse.BooleanOptionalAction,
                            default=None)

    def quantum(sp):
        sp.add_argument("--restarts", type=int)
        sp.add_argument("--dims", help="local dimensions, e.g. 3 or 3,3")
        sp.add_argument("--level", choices=["NPA1", "NPA1+AB"])

    sp = sub.add_parser("compile", help="write the game coefficients as JSON")
    common(sp)
    sp.add_argument("--output", help="game dump path")

    sp = sub.add_parser("bound", help="compute bounds on the success probability")
    common(sp)
    quantum(sp)
    sp.add_argument("--kinds", help="comma list of lhv, ns, ml, seesaw, nu")

    sp = sub.add_parser("reproduce", help="recompute reference tables and compare")
    common(sp, scenario=False)
    quantum(sp)
    sp.add_argument("tables", nargs="+", help=f"table ids ({', '.join(table_ids())}) or 'all'")
    sp.add_argument("--csv", help="pass/fail CSV path")

    sp = sub.add_parser("simulate", help="Monte-Carlo estimate for a box")
    common(sp)
    quantum(sp)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--box", help=f"box source: {', '.join(BOX_SOURCES)}")
    sp.add_argument("--box-file", dest="box_file", help="box or strategy JSON (certificate sidecar)")
    sp.add_argument("--trace", help="per-trial CSV path")
    sp.add_argument("--output", help="report JSON path")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if args.command == "compile":
            return cmd_compile(cfg)
        if args.command == "bound":
            return cmd_bound(cfg)
        if args.command == "reproduce":
            return cmd_reproduce(cfg, args.tables)
        return cmd_simulate(cfg)
    except (ConfigError, GraphError, GameError, SimulationError, ScenarioTooLarge, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (SolverFailure, SDPError, LPError) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
