"""Command line front end: ``spectrum``, ``thermal``, ``verify``, ``bzconst``.

Every report is a header (schema, command, full config, seed, build id) plus
named flat tables.  JSON and CSV renderings carry the same numbers; floats are
written with ``repr`` so they round-trip exactly.

Exit codes: 0 success, 1 check failure or divergence, 2 configuration error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import subprocess
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, bzconst
from .fock import DEFAULT_OPERATOR_CAP, CapError, build_basis, local_order_op, number_op
from .hamiltonian import PAIR_MULTIPLICITY, ModelParams, build_full
from .lattice import ConfigError, GeometryError, build_lattice
from .thermal import (DEFAULT_DENSE_CAP, DegenerateTrialError, ThermalState, diagonalize, gbc_table, lro,
                      mean_energies, trial_energy)
from .verify import SUITES, run_suite

SCHEMA = "rpbcs-report/1"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3
COMMANDS = ("spectrum", "thermal", "verify", "bzconst")


@dataclass
class RunConfig:
    command: str
    d: int | None = None
    L: list = field(default_factory=list)
    kappa: float = 0.0
    g: float = 1.0
    gprime: float = 0.0
    B: float = 0.0
    beta: list = field(default_factory=list)
    seed: int = 0
    suite: str = "ALL"
    R: int = 1
    epsilon: float = 0.25
    draws: int = 200
    dense_cap: int = DEFAULT_DENSE_CAP
    operator_cap: int = DEFAULT_OPERATOR_CAP
    tol: float | None = None
    out: str | None = None
    format: str = "json"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.d is None:
            raise ConfigError("missing required flag --d")
        if not self.L and self.command != "bzconst":
            raise ConfigError("missing required flag --L")
        if self.command != "bzconst" and len(self.L) != 1:
            raise ConfigError(f"--L takes a single size for {self.command}")
        for name in ("kappa", "g", "gprime", "B", "epsilon"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"--{name} must be finite")
        if any(not math.isfinite(b) or b < 0 for b in self.beta):
            raise ConfigError("--beta values must be finite and >= 0")
        if self.command == "thermal" and not self.beta:
            raise ConfigError("missing required flag --beta")
        if self.command == "verify" and any(b <= 0 for b in self.beta):
            raise ConfigError("--beta values must be > 0 for verify")
        if self.tol is not None and (not math.isfinite(self.tol) or self.tol < 0):
            raise ConfigError(f"--tol must be finite and >= 0, got {self.tol!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"--format must be json or csv, got {self.format!r}")
        if self.dense_cap < 1 or self.operator_cap < 1:
            raise ConfigError("caps must be positive")
        return self

    @property
    def params(self):
        return ModelParams(kappa=self.kappa, g=self.g, gprime=self.gprime, B=self.B)


def build_id():
    """``git describe`` of the source tree, or the package version."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=Path(__file__).parent,
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"{__version__}+unknown"


def _num(v):
    """JSON-safe scalar; non-finite floats become ``None``."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def _clean(rows):
    return [{k: _num(v) for k, v in row.items()} for row in rows]


def _report(cfg, tables, summary=None):
    return {
        "schema": SCHEMA,
        "command": cfg.command,
        "config": asdict(cfg),
        "seed": cfg.seed,
        "build": build_id(),
        "conventions": {"pair_multiplicity": PAIR_MULTIPLICITY, "boundary": "antiperiodic"},
        "summary": {k: _num(v) for k, v in (summary or {}).items()},
        "tables": {name: _clean(rows) for name, rows in tables.items()},
    }


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def render_json(report):
    return json.dumps(report, indent=1, sort_keys=False) + "\n"


def render_csv(report):
    """Header as ``# key,value`` lines, then one section per table."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for key in ("schema", "command", "seed", "build"):
        w.writerow([f"# {key}", _cell(report[key])])
    w.writerow(["# config", json.dumps(report["config"], sort_keys=True)])
    w.writerow(["# conventions", json.dumps(report["conventions"], sort_keys=True)])
    for k, v in report["summary"].items():
        w.writerow([f"# summary.{k}", _cell(v)])
    for name, rows in report["tables"].items():
        w.writerow([f"## table {name}"])
        cols = list(rows[0]) if rows else []
        w.writerow(cols)
        for row in rows:
            w.writerow([_cell(row[c]) for c in cols])
    return buf.getvalue()


def parse_csv(text):
    """Inverse of ``render_csv`` for the tables; cells stay strings."""
    tables, name, cols = {}, None, None
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        if row[0].startswith("## table "):
            name, cols = row[0][len("## table "):], None
            tables[name] = []
        elif row[0].startswith("# "):
            continue
        elif cols is None:
            cols = row
        else:
            tables[name].append(dict(zip(cols, row)))
    return tables


# ---------------------------------------------------------------- commands


def _basis(cfg):
    lat = build_lattice(cfg.d, cfg.L[0])
    return build_basis(lat, cap=cfg.operator_cap)


def cmd_spectrum(cfg):
    b = _basis(cfg)
    sd = diagonalize(build_full(b, cfg.params), b, cfg.dense_cap)
    sectors, eigen = [], []
    for k, bl in enumerate(sd.blocks):
        label = str(bl.label)
        sectors.append({"block": k, "sector": label, "dim": len(bl.index), "e_min": bl.energies[0],
                        "e_max": bl.energies[-1],
                        "ground_count": int(np.sum(bl.energies - sd.E0 <= sd.degeneracy_tol))})
        eigen += [{"block": k, "sector": label, "n": n, "energy": e} for n, e in enumerate(bl.energies)]
    summary = {"E0": sd.E0, "q": sd.q, "dim": sd.dim, "degeneracy_tol": sd.degeneracy_tol}
    return _report(cfg, {"sectors": sectors, "eigenvalues": eigen}, summary), EXIT_OK


def cmd_thermal(cfg):
    b = _basis(cfg)
    lat = b.lattice
    sd = diagonalize(build_full(b, cfg.params), b, cfg.dense_cap)
    rows, gbc = [], []
    for beta in cfg.beta:
        st = ThermalState(sd, beta)
        dens = [st.expect(number_op(b, i, s)).real for i in range(lat.n_sites) for s in (0, 1)]
        en = mean_energies(sd, beta)
        rows.append({"beta": beta, "density_mean": float(np.mean(dens)),
                     "density_max_dev": float(np.max(np.abs(np.asarray(dens) - 0.5))),
                     "energy": en["energy"], "E1": en["E1"], "free_energy": en["free_energy"],
                     "entropy": en["entropy"], "m_lro": lro(sd, beta)})
        for p, g, bb, c in gbc_table(sd, beta):
            row = {"beta": beta}
            row.update({f"p{m + 1}": float(v) for m, v in enumerate(p)})
            row.update({"g_re": g.real, "g_im": g.imag, "b_re": bb.real, "b_im": bb.imag,
                        "c_re": c.real, "c_im": c.imag})
            gbc.append(row)
    trial = []
    for R in range(1, lat.L):
        try:
            phi = trial_energy(sd, local_order_op(b, R), cfg.epsilon)
        except DegenerateTrialError:
            phi = None
        trial.append({"R": R, "epsilon": cfg.epsilon, "phi": phi})
    summary = {"E0": sd.E0, "q": sd.q}
    return _report(cfg, {"thermal": rows, "gbc": gbc, "trial_energy": trial}, summary), EXIT_OK


def cmd_verify(cfg):
    points = [cfg.params] if cfg._explicit_point else None
    rep = run_suite(cfg.suite, d=cfg.d, L=cfg.L[0], points=points, betas=cfg.beta or None, seed=cfg.seed,
                    n_draws=cfg.draws, R=cfg.R, epsilon=cfg.epsilon, dense_cap=cfg.dense_cap, tolerance=cfg.tol)
    rows = [{"name": c.name, "status": c.status, "kind": c.kind, "margin": c.margin, "tolerance": c.tolerance,
             "relation": c.relation, "params": c.params, "detail": c.detail} for c in rep.checks]
    summary = dict(rep.summary)
    summary["suite"] = rep.suite
    return _report(cfg, {"checks": rows}, summary), (EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_bzconst(cfg):
    d = cfg.d
    Ls = cfg.L or [4, 8, 16]
    betas = cfg.beta or [1.0, 10.0]
    if any(b <= 0 for b in betas):
        raise ConfigError("--beta values must be > 0 for bzconst")
    t0 = time.perf_counter()
    summary, code = {"d": d}, EXIT_OK
    try:
        q = bzconst.i_d_infinite(d)
        green, green_err = bzconst.i_d_green(d)
        ext, ext_err = bzconst.finite_extrapolation(d, (8, 16, 32) if d == 3 else (4, 8, 16))
        summary.update({"I_d": q.estimate, "I_d_error": q.error, "I_d_green": green, "I_d_green_error": green_err,
                        "I_d_finite_extrapolated": ext, "I_d_finite_extrapolated_error": ext_err,
                        "method": q.method})
        quad = [{"N": n, "I_d_squared": v} for n, v in zip(q.resolutions, q.raw)]
    except bzconst.DivergenceError as exc:
        summary.update({"I_d": None, "error": str(exc)})
        quad, code = [], EXIT_FAIL
    finite = [{"L": L, "G_d": bzconst.g_d(d, L), "d_G_d": d * bzconst.g_d(d, L), "I_d_finite": bzconst.i_d_finite(d, L)}
              for L in Ls]
    delta = [{"L": L, "beta": b, "g": cfg.g, "delta": bzconst.delta_beta(d, L, b, cfg.g),
              "delta_prime": bzconst.delta_prime_beta(d, L, b, cfg.g)} for L in Ls for b in betas]
    summary["seconds"] = time.perf_counter() - t0
    return _report(cfg, {"quadrature": quad, "finite_volume": finite, "delta": delta}, summary), code


HANDLERS = {"spectrum": cmd_spectrum, "thermal": cmd_thermal, "verify": cmd_verify, "bzconst": cmd_bzconst}


# ---------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def make_parser():
    p = _Parser(prog="rpbcs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rpbcs {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON file with flat keys; flags override it")
        s.add_argument("--d", type=int)
        s.add_argument("--L", type=int, nargs="+", help="box half-width; bzconst accepts several")
        for key in ("kappa", "g", "gprime", "B", "epsilon", "tol"):
            s.add_argument(f"--{key}", type=float)
        s.add_argument("--beta", type=float, nargs="+")
        s.add_argument("--seed", type=int)
        s.add_argument("--suite", help=f"one of {', '.join(SUITES)}, a comma list, or ALL")
        s.add_argument("--R", type=int)
        s.add_argument("--draws", type=int)
        s.add_argument("--dense-cap", dest="dense_cap", type=int)
        s.add_argument("--operator-cap", dest="operator_cap", type=int)
        s.add_argument("--out")
        s.add_argument("--format", choices=("json", "csv"))
    return p


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def load_config(argv):
    """Merge ``--config`` file values and flags into a validated ``RunConfig``."""
    args = make_parser().parse_args(argv)
    if args.command is None:
        raise ConfigError(f"missing command; choose from {', '.join(COMMANDS)}")
    values = {}
    if args.config:
        try:
            values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)} - {"command"}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")}
    values.update(flags)
    for key in ("L", "beta"):
        if key in values:
            values[key] = _as_list(values[key])
    try:
        cfg = RunConfig(command=args.command, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg._explicit_point = any(k in values for k in ("kappa", "g", "gprime", "B"))
    return cfg.validate()


def main(argv=None):
    try:
        cfg = load_config(sys.argv[1:] if argv is None else argv)
        report, code = HANDLERS[cfg.command](cfg)
    except CapError as exc:
        print(f"rpbcs: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, GeometryError) as exc:
        print(f"rpbcs: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render_json(report) if cfg.format == "json" else render_csv(report)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_FAIL:
        err = report["summary"].get("error")
        msg = err if err else f"{report['summary'].get('fail', 0)} check(s) failed"
        print(f"rpbcs: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
