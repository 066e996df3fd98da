"""Command-line front end.

Configs are flat ``key = value`` files with comma-separated vectors and
``#`` comments, e.g.::

    family = trig
    lambda = 0, -6.2831853, 0
    mu = 0, 0, -6.2831853

Exit codes: 0 success, 1 analysis error, 2 usage error, 3 bound violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import report
from .basis import DEFAULT_NUMERICS, AbelEquation, BasisFamily, Kind, NumericsConfig
from .chebyshev import ect_certificate, et_accuracy_falsifier, zero_count
from .classify import classify
from .continuation import sharpness_demo, sweep
from .cycles import lyapunov_constants, verify_bound
from .errors import AbelError, ParseError, ValidationError

COMMANDS = ("classify", "lyapunov", "cycles", "chebyshev", "sweep", "sharpness")
FORMATS = ("text", "csv", "json")
CONFIG_DIR_ENV = "ABEL_CONFIG_DIR"

_NUMERIC_KEYS = {f.name: f.type for f in dataclasses.fields(NumericsConfig)}
_KEYS = {"command", "family", "lambda", "mu", "m", "alpha", "beta", "window",
         "sweep_param", "sweep_range", "sweep_steps", "samples", "seed"} | set(_NUMERIC_KEYS)
_FAMILIES = {
    "trig": Kind.TRIG, "trigonometric": Kind.TRIG,
    "quadratic": Kind.QUADRATIC, "quadraticpolynomial": Kind.QUADRATIC,
    "trinomial": Kind.TRINOMIAL, "monomialtrinomial": Kind.TRINOMIAL,
    "shifted": Kind.SHIFTED, "shiftedpower": Kind.SHIFTED,
}


@dataclass(frozen=True)
class RunConfig:
    command: str | None
    family: Kind
    params: tuple = ()
    lam: tuple | None = None
    mu: tuple | None = None
    numerics: NumericsConfig = DEFAULT_NUMERICS
    window: tuple | None = None
    sweep_param: str = "lam0"
    sweep_range: tuple | None = None
    sweep_steps: int = 64
    samples: int = 256
    seed: int = 0
    output_format: str = "text"
    out: str | None = None
    source: str = field(default="", repr=False)

    def basis(self):
        return BasisFamily(self.family, self.params)

    def equation(self):
        return AbelEquation(self.basis(), self.lam, self.mu)

    def describe(self):
        return {"family": self.family.value, "params": list(self.params),
                "lambda": None if self.lam is None else list(self.lam),
                "mu": None if self.mu is None else list(self.mu)}


def _floats(value, line_no, key, n=None):
    try:
        out = tuple(float(v) for v in value.split(","))
    except ValueError:
        raise ParseError(line_no, f"{key} must be a comma-separated list of numbers") from None
    if n is not None and len(out) != n:
        raise ValidationError(key, f"expected {n} components, got {len(out)}")
    return out


def parse_config(text, command=None):
    """Parse and validate a ``key = value`` config.

    Raises
    ------
    ParseError
        For malformed lines, duplicate keys and unknown keys.
    ValidationError
        For well-formed values that do not describe a valid run.
    """
    raw = {}
    lines = {}
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(no, f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS:
            raise ParseError(no, f"unknown key {key!r}")
        if key in raw:
            raise ParseError(no, f"duplicate key {key!r}")
        if not value:
            raise ParseError(no, f"empty value for {key!r}")
        raw[key] = value
        lines[key] = no

    cmd = command or raw.get("command")
    if cmd is None:
        raise ValidationError("command", "no command given")
    if cmd not in COMMANDS:
        raise ValidationError("command", f"unknown command {cmd!r}")
    if "family" not in raw:
        raise ValidationError("family", "missing")
    fam = _FAMILIES.get(raw["family"].lower().replace("_", ""))
    if fam is None:
        raise ValidationError("family", f"unknown family {raw['family']!r}")

    params = ()
    if fam is Kind.TRINOMIAL:
        if "m" not in raw:
            raise ValidationError("m", "trinomial family needs m = m0, m1, m2")
        params = _floats(raw["m"], lines["m"], "m", 3)
    elif fam is Kind.SHIFTED:
        for k in ("alpha", "beta"):
            if k not in raw:
                raise ValidationError(k, "shifted family needs alpha and beta")
        params = (_floats(raw["alpha"], lines["alpha"], "alpha", 1)[0],
                  _floats(raw["beta"], lines["beta"], "beta", 1)[0])
    for k in ("m", "alpha", "beta"):
        if k in raw and not params:
            raise ValidationError(k, f"not used by family {fam.value}")
    try:
        BasisFamily(fam, params)
    except ValueError as exc:
        raise ValidationError("family", str(exc)) from None

    lam = _floats(raw["lambda"], lines["lambda"], "lambda", 3) if "lambda" in raw else None
    mu = _floats(raw["mu"], lines["mu"], "mu", 3) if "mu" in raw else None
    if cmd != "sharpness":
        for k, v in (("lambda", lam), ("mu", mu)):
            if v is None:
                raise ValidationError(k, f"required for command {cmd}")

    over = {}
    for k, typ in _NUMERIC_KEYS.items():
        if k in raw:
            v = _floats(raw[k], lines[k], k, 1)[0]
            if typ in (int, "int"):
                if v != int(v):
                    raise ValidationError(k, "must be an integer")
                v = int(v)
            over[k] = v
    try:
        numerics = DEFAULT_NUMERICS.replace(**over)
    except ValueError as exc:
        raise ValidationError("numerics", str(exc)) from None

    window = None
    if "window" in raw:
        window = _floats(raw["window"], lines["window"], "window", 2)
        if not window[0] < window[1]:
            raise ValidationError("window", "needs lo < hi")
    sweep_param = raw.get("sweep_param", "lam0")
    if sweep_param not in ("lam0", "mu0"):
        raise ValidationError("sweep_param", "must be lam0 or mu0")
    sweep_range = None
    if "sweep_range" in raw:
        sweep_range = _floats(raw["sweep_range"], lines["sweep_range"], "sweep_range", 2)
    if cmd == "sweep" and sweep_range is None:
        raise ValidationError("sweep_range", "required for command sweep")
    ints = {}
    for k, lo in (("sweep_steps", 8), ("samples", 64), ("seed", 0)):
        if k in raw:
            v = _floats(raw[k], lines[k], k, 1)[0]
            if v != int(v) or v < lo:
                raise ValidationError(k, f"must be an integer >= {lo}")
            ints[k] = int(v)
    return RunConfig(cmd, fam, params, lam, mu, numerics, window, sweep_param, sweep_range,
                     source=text, **ints)


# ---------------------------------------------------------------- dispatch

def _run_chebyshev(cfg):
    basis = cfg.basis()
    cert = ect_certificate(basis, cfg.numerics.scan_grid)
    out = {"certificate": cert.as_dict()}
    rng = np.random.default_rng(cfg.seed)
    counts = [zero_count(basis, rng.uniform(-1, 1, 3), grid=cfg.numerics.scan_grid)
              for _ in range(50)]
    out["random_combinations"] = {"n": 50, "max_zeros": int(max(counts))}
    if cfg.lam is not None and cfg.mu is not None:
        ce = et_accuracy_falsifier(cfg.equation(), cfg.samples, cfg.numerics.scan_grid)
        out["falsifier"] = None if ce is None else {"direction": list(ce.direction),
                                                    "zeros": ce.zeros}
    return out, True


def _dispatch(cfg):
    """Run the command; returns (result dict, bound_ok, payload object)."""
    cmd = cfg.command
    if cmd == "chebyshev":
        res, ok = _run_chebyshev(cfg)
        return res, ok, None
    if cmd == "sharpness":
        r = sharpness_demo(cfg.basis(), cfg.numerics)
        return r.as_dict(), r.consistent, r
    eq = cfg.equation()
    if cmd == "classify":
        return classify(eq, max(cfg.numerics.scan_grid, 1024)).as_dict(), True, None
    if cmd == "lyapunov":
        return lyapunov_constants(eq, cfg.numerics).as_dict(), True, None
    if cmd == "cycles":
        v = verify_bound(eq, cfg.numerics, cfg.window)
        return v.as_dict(), v.consistent, v
    s = sweep(eq, cfg.sweep_param, cfg.sweep_range, cfg.sweep_steps, cfg.numerics, cfg.window)
    return s.as_dict(), True, s


def execute(cfg: RunConfig):
    """Run a parsed config.

    Returns
    -------
    code : int
        Exit code (0, 1 or 3).
    text : str
        The rendered report in ``cfg.output_format``.
    bundle : str or None
        Reproduction bundle for bound violations.
    """
    head = {"command": cfg.command, "equation": cfg.describe(),
            "numerics": cfg.numerics.as_dict(), "seed": cfg.seed}
    try:
        result, ok, obj = _dispatch(cfg)
    except AbelError as exc:
        body = dict(head, error={"type": type(exc).__name__, "message": str(exc)})
        return 1, report.render(body, cfg.output_format, None), None
    body = dict(head, result=result)
    text = report.render(body, cfg.output_format, obj)
    bundle = None
    if not ok:
        bundle = report.to_json({"reproduce": {"config": cfg.source,
                                               "command": cfg.command,
                                               "numerics": cfg.numerics.as_dict()},
                                 "result": result})
        return 3, text, bundle
    return 0, text, bundle


def _resolve(path):
    if os.path.exists(path) or os.path.isabs(path):
        return path
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and os.path.exists(os.path.join(base, path)):
        return os.path.join(base, path)
    return path


def build_parser():
    p = argparse.ArgumentParser(prog="abelcycles",
                                description="Limit cycles of x' = A(t) x^3 + B(t) x^2.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help=f"config file (relative paths are also "
                   f"looked up in ${CONFIG_DIR_ENV})")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, help="seed for randomized sub-checks")
    p.add_argument("--grid", type=int, help="grid_points for censuses, scan_grid for scans")
    p.add_argument("--tol", type=float, help="ODE relative tolerance (absolute = tol / 100)")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        with open(_resolve(args.config), encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text, args.command)
        over = {}
        if args.grid is not None:
            key = "scan_grid" if args.command in ("classify", "chebyshev") else "grid_points"
            over[key] = args.grid
        if args.tol is not None:
            over.update(ode_rel_tol=args.tol, ode_abs_tol=args.tol / 100)
        numerics = cfg.numerics.replace(**over) if over else cfg.numerics
        cfg = dataclasses.replace(cfg, numerics=numerics, output_format=args.format,
                                  out=args.out,
                                  seed=cfg.seed if args.seed is None else args.seed)
    except (ParseError, ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    code, text, bundle = execute(cfg)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if bundle is not None:
        print("bound violation; reproduction bundle:", file=sys.stderr)
        sys.stderr.write(bundle)
    return code


if __name__ == "__main__":
    sys.exit(main())
