"""Command-line entry point: ``zetalab {eval,zeros,count,speiser,trace,census}``.

Every flag may also be set through an environment variable named
ZETALAB_<FLAG>, e.g. ZETALAB_THREADS=4 or ZETALAB_CHECKPOINT_EVERY=10.
Flags given on the command line win over the environment.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from . import lfunc, speiser, trajectory, zeros
from .contour import rectangle
from .errors import BudgetError, ConvergenceError, DomainError, ZetaLabError

ENV_PREFIX = "ZETALAB_"
FORMATS = ("json", "csv")
EXIT_DOMAIN, EXIT_CONVERGENCE, EXIT_BUDGET = 2, 3, 4


def parse_complex(text: str) -> complex:
    """'re,im' -> complex. A bare real number is accepted too."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")


def parse_floats(n: int | None = None):
    def conv(text: str):
        try:
            vals = tuple(float(p) for p in str(text).split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
        if n is not None and len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return vals
    return conv


def _c(z) -> list[float]:
    return [float(z.real), float(z.imag)]


# --------------------------------------------------------------------------
# run configuration and persistence


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines the output of one command."""

    command: str
    function: str = "zeta"
    tau: float | None = None
    tolerances: dict = field(default_factory=dict)
    region: dict = field(default_factory=dict)
    format: str = "json"
    out: str | None = None
    checkpoint_path: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.format not in FORMATS:
            raise DomainError(f"format must be one of {FORMATS}")
        if self.threads < 1:
            raise DomainError("threads must be at least 1")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def spec(self):
        return lfunc.spec_from_name(self.function, self.tau)

    def config_hash(self) -> str:
        """Hash of the fields that affect results; threads and paths are left out."""
        d = self.to_dict()
        for k in ("out", "checkpoint_path", "threads", "format"):
            d.pop(k)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class Checkpoint:
    run_id: str
    config_hash: str
    completed: dict = field(default_factory=dict)
    partial: dict = field(default_factory=dict)

    def save(self, path: str):
        trajectory._atomic_write(path, json.dumps(asdict(self), sort_keys=True))

    @classmethod
    def load(cls, path: str, config_hash: str) -> "Checkpoint | None":
        """The checkpoint at ``path`` if it belongs to the same configuration."""
        if not path or not os.path.exists(path):
            return None
        with open(path) as fh:
            d = json.load(fh)
        if d.get("config_hash") != config_hash:
            return None
        return cls(d.get("run_id", ""), d["config_hash"], d.get("completed", {}), d.get("partial", {}))


def _emit(cfg: RunConfig, text: str, summary: str):
    """Write the document to --out (atomically) and print the summary, or print the document."""
    if cfg.out:
        trajectory._atomic_write(cfg.out, text)
        print(summary)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _g(x) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# commands


def cmd_eval(cfg: RunConfig, s: complex, deriv: int, method: str = "auto"):
    res = lfunc.evaluate(cfg.spec(), s, deriv, method=method)
    v = complex(res.value)
    if cfg.format == "json":
        text = json.dumps({"function": cfg.function, "tau": cfg.tau, "s": _c(s), "deriv": deriv,
                           "value": _c(v), "est_abs_error": float(res.est_abs_error)})
    else:
        text = _csv([["re_s", "im_s", "deriv", "re", "im", "est_abs_error"],
                     [_g(s.real), _g(s.imag), deriv, _g(v.real), _g(v.imag), _g(res.est_abs_error)]])
    _emit(cfg, text, f"{v.real:.17g},{v.imag:.17g}")
    return v


def cmd_count(cfg: RunConfig):
    x0, x1, y0, y1 = cfg.region["rect"]
    n = zeros.winding_count(cfg.spec(), cfg.region.get("which", "F"), rectangle(x0, x1, y0, y1))
    if cfg.out:
        if cfg.format == "json":
            text = json.dumps({"function": cfg.function, "tau": cfg.tau, "rect": [x0, x1, y0, y1],
                               "which": cfg.region.get("which", "F"), "count": n})
        else:
            text = _csv([["count"], [n]])
        trajectory._atomic_write(cfg.out, text)
    print(n)
    return n


def cmd_zeros(cfg: RunConfig):
    rect = tuple(cfg.region["rect"])
    which = cfg.region.get("which", "F")
    every = float(cfg.region.get("checkpoint_every", 30.0))
    h = cfg.config_hash()
    ck = Checkpoint.load(cfg.checkpoint_path, h)
    resume = zeros.ScanState.from_dict(ck.partial) if ck and ck.partial else None
    last = [time.monotonic()]

    def on_generation(state):
        if cfg.checkpoint_path and time.monotonic() - last[0] >= every:
            Checkpoint(h, h, partial=state.to_dict()).save(cfg.checkpoint_path)
            last[0] = time.monotonic()

    tol = cfg.tolerances.get("tol", 1e-12)
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            recs = zeros.scan_zeros(cfg.spec(), which, rect, tol=tol, executor=ex,
                                    resume=resume, on_generation=on_generation)
    else:
        recs = zeros.scan_zeros(cfg.spec(), which, rect, tol=tol, resume=resume, on_generation=on_generation)
    if cfg.checkpoint_path:
        Checkpoint(h, h, partial=zeros.ScanState(sum(r.multiplicity for r in recs), (), tuple(recs),
                                                 0).to_dict()).save(cfg.checkpoint_path)
    text = zeros.records_to_json(recs) if cfg.format == "json" else zeros.records_to_csv(recs)
    _emit(cfg, text, f"{len(recs)} zeros")
    return recs


def cmd_speiser(cfg: RunConfig):
    spec = cfg.spec()
    reg = cfg.region
    if reg.get("s0") is not None:
        reps = [speiser.speiser_compare(spec, complex(*reg["s0"]), reg["r"])]
    else:
        reps = [speiser.speiser_pipeline(spec, T, reg["C"], reg["shells"], reg["delta"]) for T in reg["T"]]
    if cfg.format == "json":
        docs = [r.to_dict() for r in reps]
        text = json.dumps(docs[0] if len(docs) == 1 else docs)
    else:
        text = speiser.reports_to_csv(reps)
    _emit(cfg, text, f"{sum(r.equal for r in reps)}/{len(reps)} equal")
    return reps


def _step_control(cfg: RunConfig) -> trajectory.StepControl:
    keys = trajectory.StepControl.__dataclass_fields__
    return trajectory.StepControl(**{k: v for k, v in cfg.tolerances.items() if k in keys})


def cmd_trace(cfg: RunConfig):
    reg = cfg.region
    # the starting point is polished by Newton, so a few printed digits suffice
    fam = lfunc.ZetaFamily()
    z = zeros.refine_zero(fam.spec(reg["tau_start"]), reg["target"], complex(*reg["rho"]), max_dist=0.1)
    tr = trajectory.trace(reg["target"], z.rho, reg["tau_start"], reg["tau_end"], _step_control(cfg),
                          family=fam)
    if cfg.format == "json":
        text = json.dumps(tr.to_dict())
    else:
        text = trajectory.plot_data_csv([tr])
    end = tr.samples[-1]
    _emit(cfg, text, f"{tr.classification.kind} {end[0]:.17g} {end[1].real:.17g},{end[1].imag:.17g}")
    return tr


def cmd_census(cfg: RunConfig):
    reg = cfg.region
    res = trajectory.census(reg["H"], _step_control(cfg), margin=reg.get("margin", 8.0),
                            threads=cfg.threads, checkpoint_path=cfg.checkpoint_path,
                            checkpoint_every=float(reg.get("checkpoint_every", 30.0)),
                            config_hash=cfg.config_hash(), classify=reg.get("classify", True))
    text = json.dumps(res.summary_dict()) if cfg.format == "json" else res.summary_csv()
    if reg.get("trajectories"):
        trajectory._atomic_write(reg["trajectories"], trajectory.trajectories_to_jsonl(res))
    if reg.get("plot_data"):
        trajectory._atomic_write(reg["plot_data"], trajectory.plot_data_csv(res.trajectories))
    _emit(cfg, text, f"total={res.total} stays={res.stays} leaves={res.leaves} incomplete={res.incomplete}")
    if res.incomplete:
        raise BudgetError(f"{res.incomplete} incomplete trajectories: {res.reasons}")
    return res


# --------------------------------------------------------------------------
# argument parsing


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--threads", type=int, default=d(1), help="worker threads")
    p.add_argument("--tol", type=float, default=d(None), help="target accuracy of refined values")
    p.add_argument("--out", default=d(None), help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default=d("json"))
    p.add_argument("--checkpoint", default=d(None), help="checkpoint file; resumed if present")


def _function_flags(p):
    p.add_argument("--f", dest="function", default="zeta", help="zeta, lpsi5, factor or family")
    p.add_argument("--tau", type=float, default=None, help="family parameter in [0, 1]")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zetalab", description=__doc__.splitlines()[0])
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate F or a derivative at one point")
    _global_flags(p, suppress=True)
    _function_flags(p)
    p.add_argument("--s", type=parse_complex, required=True, help="point as re,im")
    p.add_argument("--deriv", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--method", choices=("auto", "series", "reflect"), default="auto")

    for name, helptext in (("zeros", "list the zeros in a rectangle"),
                           ("count", "count zeros in a rectangle by the argument principle")):
        p = sub.add_parser(name, help=helptext)
        _global_flags(p, suppress=True)
        _function_flags(p)
        p.add_argument("--rect", type=parse_floats(4), required=True, help="x0,x1,y0,y1")
        p.add_argument("--which", choices=("F", "Fprime"), default="F")
        if name == "zeros":
            p.add_argument("--checkpoint-every", type=float, default=30.0, help="seconds between checkpoints")

    p = sub.add_parser("speiser", help="compare zeros of F and F' left of the critical line")
    _global_flags(p, suppress=True)
    _function_flags(p)
    p.add_argument("--T", type=parse_floats(), default=(100.0,), help="heights, comma separated")
    p.add_argument("--C", type=float, default=20.0, help="surrogate scale for the shell radii")
    p.add_argument("--shells", type=int, default=8)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--s0", type=parse_complex, default=None, help="direct comparison centre, re,im")
    p.add_argument("--r", type=float, default=None, help="direct comparison radius")

    p = sub.add_parser("trace", help="follow a zero of f(s, tau) in tau")
    _global_flags(p, suppress=True)
    p.add_argument("--target", choices=("F", "Fprime"), default="F")
    p.add_argument("--rho", type=parse_complex, required=True, help="starting zero, re,im")
    p.add_argument("--tau-start", type=float, default=0.0)
    p.add_argument("--tau-end", type=float, default=1.0)
    p.add_argument("--h-init", type=float, default=None)
    p.add_argument("--h-max", type=float, default=None)

    p = sub.add_parser("census", help="trace all zeros up to height H from tau = 0 to 1")
    _global_flags(p, suppress=True)
    p.add_argument("--H", type=float, default=100.0)
    p.add_argument("--margin", type=float, default=8.0)
    p.add_argument("--resume", dest="checkpoint", default=argparse.SUPPRESS, help="alias of --checkpoint")
    p.add_argument("--checkpoint-every", type=float, default=30.0, help="seconds between checkpoints")
    p.add_argument("--no-classify", action="store_true", help="skip the equivalence check at events")
    p.add_argument("--h-init", type=float, default=None)
    p.add_argument("--h-max", type=float, default=None)
    p.add_argument("--trajectories", default=None, help="JSON-lines file for all trajectories")
    p.add_argument("--plot-data", default=None, help="CSV of (tau, re, im) samples")
    return ap


def _parsers(ap):
    yield ap
    for act in ap._actions:
        if isinstance(act, argparse._SubParsersAction):
            yield from act.choices.values()


def apply_env(ap: argparse.ArgumentParser, environ=None):
    """Replace flag defaults by ZETALAB_* environment values."""
    environ = os.environ if environ is None else environ
    for p in _parsers(ap):
        for act in p._actions:
            long = [o for o in act.option_strings if o.startswith("--")]
            if not long or act.dest == "help":
                continue
            key = ENV_PREFIX + long[0][2:].replace("-", "_").upper()
            if key not in environ:
                continue
            raw = environ[key]
            if isinstance(act, argparse._StoreTrueAction):
                act.default = raw.strip().lower() in ("1", "true", "yes", "on")
                continue
            try:
                val = act.type(raw) if act.type else raw
            except (argparse.ArgumentTypeError, ValueError) as e:
                p.error(f"{key}: {e}")
            if act.choices is not None and val not in act.choices:
                p.error(f"{key}: invalid choice {val!r}")
            act.default = val
            act.required = False


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    tol = {} if ns.tol is None else {"tol": ns.tol}
    region = {}
    c = ns.command
    if c in ("zeros", "count"):
        region = {"rect": list(ns.rect), "which": ns.which}
        if c == "zeros":
            region["checkpoint_every"] = ns.checkpoint_every
    elif c == "eval":
        region = {"s": _c(ns.s), "deriv": ns.deriv, "method": ns.method}
    elif c == "speiser":
        if (ns.s0 is None) != (ns.r is None):
            raise DomainError("--s0 and --r go together")
        region = {"T": list(ns.T), "C": ns.C, "shells": ns.shells, "delta": ns.delta,
                  "s0": None if ns.s0 is None else _c(ns.s0), "r": ns.r}
    elif c in ("trace", "census"):
        for k in ("h_init", "h_max"):
            if getattr(ns, k) is not None:
                tol[k] = getattr(ns, k)
        if c == "trace":
            region = {"target": ns.target, "rho": _c(ns.rho), "tau_start": ns.tau_start, "tau_end": ns.tau_end}
        else:
            region = {"H": ns.H, "margin": ns.margin, "classify": not ns.no_classify,
                      "checkpoint_every": ns.checkpoint_every, "trajectories": ns.trajectories,
                      "plot_data": ns.plot_data}
    function = getattr(ns, "function", "family" if c in ("trace", "census") else "zeta")
    tau = getattr(ns, "tau", None)
    return RunConfig(c, function, tau, tol, region, ns.format, ns.out, ns.checkpoint, ns.threads)


def run(cfg: RunConfig):
    c = cfg.command
    if c == "eval":
        return cmd_eval(cfg, complex(*cfg.region["s"]), cfg.region["deriv"], cfg.region["method"])
    return {"zeros": cmd_zeros, "count": cmd_count, "speiser": cmd_speiser,
            "trace": cmd_trace, "census": cmd_census}[c](cfg)


_NUMLIST = re.compile(r"^-[0-9.]")


def _glue_negative_values(argv):
    """'--rect -1,2,1,50' -> '--rect=-1,2,1,50', which argparse would read as a flag."""
    out = []
    it = iter(argv)
    for a in it:
        out.append(a)
        if a.startswith("--") and "=" not in a:
            nxt = next(it, None)
            if nxt is None:
                break
            if _NUMLIST.match(nxt):
                out[-1] = f"{a}={nxt}"
            else:
                out.append(nxt)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    apply_env(ap)
    argv = sys.argv[1:] if argv is None else list(argv)
    ns = ap.parse_args(_glue_negative_values(argv))
    try:
        run(config_from_args(ns))
    except DomainError as e:
        print(f"zetalab: domain error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        print(f"zetalab: convergence error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except BudgetError as e:
        print(f"zetalab: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ZetaLabError as e:
        print(f"zetalab: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
