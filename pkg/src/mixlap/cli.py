"""Batch front-end: config parsing, dispatch, CSV/JSON artifact emission.

Configuration is a flat JSON document; command-line flags override keys.
All artifacts are plain text with full-precision decimal floats so runs can
be diffed byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import assembly, barrier, solve, verify
from .errors import ConfigError, MixlapError
from .fields import ScalarField, TailExpansion, constant
from .kernel import OperatorParams, QuadratureSpec, mixed_apply

_COMMANDS = ("solve", "barrier", "verify", "counterexample")
_CONFIG_KEYS = {
    "command", "s", "domain", "n", "f", "quad", "output_dir", "seed",
    "variant", "dimension", "annulus_radius",
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    s: float = 0.5
    domain: tuple = (-1.0, 1.0)
    n: int = 127
    f: str = "constant:1"
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    output_dir: str = "out"
    seed: int = 0
    variant: str = "auto"       # counterexample selector: ces|general|boundary|auto
    dimension: int = 1          # for the nonnegative-exterior counterexample
    annulus_radius: float = 2.0  # for the boundary-only counterexample


def _require(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document; unknown keys are rejected."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"document: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError("document: must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown key")
    if "command" not in doc:
        raise ConfigError("command: missing required key")
    cfg = RunConfig(command=str(doc["command"]))
    _require(cfg.command in _COMMANDS, "command", f"must be one of {_COMMANDS}")
    if "s" in doc:
        s = float(doc["s"])
        _require(0.0 < s < 1.0, "s", "must lie in (0,1)")
        cfg = replace(cfg, s=s)
    if "domain" in doc:
        dom = doc["domain"]
        _require(isinstance(dom, (list, tuple)) and len(dom) == 2, "domain",
                 "must be a pair [a, b]")
        a, b = float(dom[0]), float(dom[1])
        _require(a < b, "domain", "must satisfy a < b")
        cfg = replace(cfg, domain=(a, b))
    if "n" in doc:
        n = int(doc["n"])
        _require(n >= 1, "n", "must be a positive integer")
        cfg = replace(cfg, n=n)
    if "f" in doc:
        spec = str(doc["f"])
        _load_field(spec, cfg.domain)  # validates eagerly
        cfg = replace(cfg, f=spec)
    if "quad" in doc:
        q = doc["quad"]
        _require(isinstance(q, dict), "quad", "must be an object")
        bad = set(q) - {"inner_radius", "outer_radius", "panels", "tolerance"}
        _require(not bad, "quad", f"unknown sub-key {sorted(bad)[:1]}")
        try:
            cfg = replace(cfg, quad=QuadratureSpec(**q))
        except MixlapError as exc:
            raise ConfigError(f"quad: {exc}") from exc
    if "output_dir" in doc:
        cfg = replace(cfg, output_dir=str(doc["output_dir"]))
    if "seed" in doc:
        cfg = replace(cfg, seed=int(doc["seed"]))
    if "variant" in doc:
        v = str(doc["variant"])
        _require(v in ("auto", "ces", "general", "boundary"), "variant",
                 "must be auto|ces|general|boundary")
        cfg = replace(cfg, variant=v)
    if "dimension" in doc:
        d = int(doc["dimension"])
        _require(d in (1, 2, 3), "dimension", "must be 1, 2 or 3")
        cfg = replace(cfg, dimension=d)
    if "annulus_radius" in doc:
        rr = float(doc["annulus_radius"])
        _require(rr > 1.0, "annulus_radius", "must exceed 1")
        cfg = replace(cfg, annulus_radius=rr)
    return cfg


def _load_field(spec: str, domain) -> ScalarField:
    """Named loads: constant:V | poly:c0,c1,... | csv:path."""
    kind, _, rest = spec.partition(":")
    if kind == "constant":
        try:
            return constant(float(rest))
        except ValueError as exc:
            raise ConfigError(f"f: bad constant value {rest!r}") from exc
    if kind == "poly":
        try:
            coeffs = [float(c) for c in rest.split(",") if c.strip()]
        except ValueError as exc:
            raise ConfigError(f"f: bad polynomial coefficients {rest!r}") from exc
        if not coeffs:
            raise ConfigError("f: polynomial needs at least one coefficient")

        def ev(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for c in reversed(coeffs):
                out = out * x + c
            return out

        plus = tuple((c, float(k)) for k, c in enumerate(coeffs) if c != 0.0)
        minus = tuple((c * (-1.0) ** k, float(k)) for k, c in enumerate(coeffs) if c != 0.0)
        return ScalarField(
            evaluate=ev,
            second_derivative=lambda x: sum(
                k * (k - 1) * coeffs[k] * x ** (k - 2) for k in range(2, len(coeffs))
            ),
            tail=TailExpansion(max(abs(domain[0]), abs(domain[1])), plus, minus),
            name=f"poly({rest})",
        )
    if kind == "csv":
        path = Path(rest)
        if not path.exists():
            raise ConfigError(f"f: sample file {rest!r} not found")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        xs, ys = data[:, 0], data[:, 1]
        order = np.argsort(xs)
        xs, ys = xs[order], ys[order]

        def ev(x):
            return np.interp(np.asarray(x, dtype=float), xs, ys, left=0.0, right=0.0)

        return ScalarField(
            evaluate=ev, kinks=tuple(xs),
            tail=TailExpansion(float(np.max(np.abs(xs)))),
            name=f"csv({rest})", tame_kinks=True,
        )
    raise ConfigError(f"f: unknown load kind {kind!r}")


# ---------------------------------------------------------------------------
# command runners
# ---------------------------------------------------------------------------


def _run_solve(cfg: RunConfig, outdir: Path) -> int:
    a, b = cfg.domain
    mesh = assembly.build_mesh(a, b, cfg.n)
    params = OperatorParams(1, cfg.s)
    sys_ = assembly.build_system(mesh, params, cfg.quad)
    report = solve.solve_dirichlet(sys_, _load_field(cfg.f, cfg.domain))
    solve.export_solution_csv(outdir / "solution.csv", report)
    solve.export_report(outdir / "report.json", report)
    assembly.export_matrix(outdir / "stiffness.txt", sys_.combined(),
                           comment=f"s={cfg.s} n={cfg.n}")
    return 0


def _run_barrier(cfg: RunConfig, outdir: Path) -> int:
    p = barrier.build_barrier(cfg.s, cfg.quad)
    params = OperatorParams(1, cfg.s)
    bf = barrier.beta_field(p)
    gf = barrier.gamma_field(p)
    xs = np.geomspace(p.ell * 1e-3, p.ell * 0.99, 50)
    with open(outdir / "barrier.csv", "w") as fh:
        fh.write("x,beta,gamma,Lgamma\n")
        for x in xs:
            lg = mixed_apply(gf, float(x), params, cfg.quad)
            fh.write(f"{x:.17g},{float(bf(x)):.17g},{float(gf(x)):.17g},{lg:.17g}\n")
    with open(outdir / "certificate.txt", "w") as fh:
        fh.write(f"s = {cfg.s:.17g}\n")
        fh.write(f"case = {p.ladder.case}\n")
        fh.write(f"alphas = {[f'{a:.17g}' for a in p.ladder.alphas]}\n")
        fh.write(f"kappas = {[f'{k:.17g}' for k in p.kappas]}\n")
        fh.write(f"coefficients = {[f'{c:.17g}' for c in p.cs]}\n")
        for key in ("d", "C_sharp", "C2", "C0", "C1", "ell", "M", "R", "c_gamma", "S_d"):
            fh.write(f"{key} = {getattr(p, key):.17g}\n")
        for key, val in sorted(p.certificate.items()):
            fh.write(f"certificate.{key} = {val}\n")
    return 0


def _run_verify(cfg: RunConfig, outdir: Path) -> int:
    reports = verify.run_suite(cfg.s, cfg.n, cfg.seed, cfg.quad, domain=cfg.domain)
    lines = [r.line() for r in reports]
    ok = all(r.passed for r in reports)
    summary = "\n".join(lines) + f"\nsuite: {'all passed' if ok else 'FAILURES'}\n"
    (outdir / "verify_summary.txt").write_text(summary)
    sys.stdout.write(summary)
    return 0 if ok else 1


def _run_counterexample(cfg: RunConfig, outdir: Path) -> int:
    variant = cfg.variant
    if variant == "auto":
        variant = "ces" if cfg.s < 0.5 else "general"
    if variant == "ces":
        rep = verify.counterexample_ces(cfg.s, cfg.quad)
    elif variant == "general":
        rep = verify.counterexample_general(cfg.s, cfg.dimension, cfg.quad)
    elif variant == "boundary":
        rep = verify.counterexample_boundary_only(cfg.annulus_radius, cfg.s,
                                                  cfg.n, cfg.quad)
    else:  # pragma: no cover - guarded by parse_config
        raise ConfigError(f"variant: unknown {variant!r}")
    summary = rep.line() + "\n"
    (outdir / "counterexample_summary.txt").write_text(summary)
    sys.stdout.write(summary)
    return 0 if rep.passed else 1


def run(config: RunConfig) -> int:
    """Dispatch a validated config; returns the process exit status."""
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    runner = {
        "solve": _run_solve,
        "barrier": _run_barrier,
        "verify": _run_verify,
        "counterexample": _run_counterexample,
    }[config.command]
    return runner(config, outdir)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mixlap",
        description="Mixed local/nonlocal Dirichlet solver and verification suite",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None,
                       help="JSON config file; flags override its keys")
        p.add_argument("--s", type=float, default=None)
        p.add_argument("--domain", type=float, nargs=2, default=None,
                       metavar=("A", "B"))
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--f", type=str, default=None,
                       help="constant:V | poly:c0,c1,... | csv:path")
        p.add_argument("--output-dir", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tolerance", type=float, default=None)
        if name == "counterexample":
            p.add_argument("--variant", choices=("auto", "ces", "general", "boundary"),
                           default=None)
            p.add_argument("--dimension", type=int, default=None)
            p.add_argument("--annulus-radius", type=float, default=None)
    return ap


def _config_from_args(args) -> RunConfig:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        if not isinstance(doc, dict):
            raise ConfigError("document: must be a JSON object")
    doc["command"] = args.command
    for key in ("s", "n", "f", "seed"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    if args.domain is not None:
        doc["domain"] = list(args.domain)
    if args.output_dir is not None:
        doc["output_dir"] = args.output_dir
    elif "output_dir" not in doc and os.environ.get("MIXLAP_OUTPUT_DIR"):
        doc["output_dir"] = os.environ["MIXLAP_OUTPUT_DIR"]
    if args.tolerance is not None:
        doc.setdefault("quad", {})["tolerance"] = args.tolerance
    for key in ("variant", "dimension"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    if getattr(args, "annulus_radius", None) is not None:
        doc["annulus_radius"] = args.annulus_radius
    return parse_config(json.dumps(doc))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return run(cfg)
    except MixlapError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
