"""Command-line experiments: ``python -m metrivec <command> [flags]``.

Every command writes one JSON report that embeds the full configuration,
the seed and the package version; most also have a CSV table.  Floats are
printed with 12 significant digits and keys are sorted, so repeating a
command with the same configuration gives byte-identical output.

Exit codes: 0 success (including runs whose probes refute something),
2 usage or configuration error, 3 capability or construction error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
from importlib import resources
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields

from . import __version__
from .calculus import ftc_check, primitive
from .errors import CapabilityError, ConstructionError, DomainError, MetrivecError
from .gallery import (
    adversary_partitions,
    coordinate_continuity_probe,
    function_from_id,
)
from .integration import (
    IntegrateConfig,
    integrate,
    mesh_cauchy_probe,
    refinement_cauchy_probe,
    same_points_probe,
    variation_bound_estimate,
)
from .oscillation import (
    Sampler,
    cell_profile,
    darboux_probe,
    discontinuity_measure,
    oscillation_sum,
    pointwise_oscillation,
)
from .partitions import Partition, uniform, uniform_points
from .reals import encode_real, parse_point
from .spaces import (
    DEFAULT_TRUNCATION,
    check_scaling_inequality,
    check_translation_invariance,
    parse_space,
)

__all__ = ["ExperimentConfig", "main", "run", "render_json", "report_schema", "COMMANDS"]

COMMANDS = ("integrate", "oscillate", "darboux", "adversary", "ftc", "spacecheck", "atlas",
            "probe")

EXIT_USAGE, EXIT_CAPABILITY, EXIT_IO = 2, 3, 4

ATLAS_FUNCTIONS = ("rationals:1000,digits:16,ratind,smooth:const,smooth:linear,smooth:poly12,"
                   "smooth:trig,smooth:mix")
ATLAS_SPACES = "lp:1,lp:2,linf,omega-sum,omega-sup"


@dataclass
class ExperimentConfig:
    """Everything a command needs; round-trips through :meth:`to_dict`."""

    command: str
    space: str | None = None
    fn: str | None = None
    a: str = "0"
    b: str = "1"
    eps: float | None = None
    mesh_min: float | None = None
    mesh_levels: int | None = None
    seed: int = 0
    trunc: int = DEFAULT_TRUNCATION
    samples: int = 8
    out: str | None = None
    format: str = "json"
    points: str | None = None
    partition: int | None = None
    r: str | None = None
    n: int | None = None
    grid: int | None = None
    tau: str | None = None
    criterion: str | None = None
    fns: str | None = None
    spaces: str | None = None
    measure_tol: float = 0.01
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


# -- formatting -------------------------------------------------------------------

def _round(obj, digits=12):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {str(k): _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _round(obj.item(), digits)
    return obj


def report_schema() -> dict:
    """The JSON schema every report validates against."""
    text = resources.files("metrivec").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)


def render_json(report) -> str:
    return json.dumps(_round(report), sort_keys=True, indent=2) + "\n"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x:.12g}" if isinstance(x, float) else x for x in row])
    return buf.getvalue()


# -- helpers ---------------------------------------------------------------------

def _requirement(fn_id):
    head, _, arg = (fn_id or "").partition(":")
    if head in ("rationals", "digits") and arg.isdigit():
        return int(arg)
    if head == "rationals":
        return 1000
    if head == "digits":
        return 24
    return 0


def _default_space(fn_id):
    head = (fn_id or "").partition(":")[0]
    return {"rationals": "lp:2", "digits": "linf", "ratind": "l1gamma"}.get(head, "euclidean:2")


def _space(cfg, fn_id=None, text=None):
    text = text or cfg.space or _default_space(fn_id or cfg.fn)
    if text.startswith("euclidean") and ":" not in text:
        text = "euclidean:2"
    return parse_space(text, default_trunc=max(cfg.trunc, _requirement(fn_id or cfg.fn)))


def _function(cfg, fn_id=None, space_text=None):
    fn_id = fn_id or cfg.fn
    if not fn_id:
        raise DomainError("--fn is required (rationals:<Nmax>, digits:<K>, ratind, smooth:<name>)")
    return function_from_id(fn_id, _space(cfg, fn_id, space_text))


def _levels(cfg):
    """Interval counts of the mesh schedule, coarse to fine."""
    a, b = float(parse_point(cfg.a)), float(parse_point(cfg.b))
    finest = 2 ** 14
    if cfg.mesh_min is not None:
        if not cfg.mesh_min > 0:
            raise DomainError("--mesh-min must be positive")
        finest = 2 ** max(0, math.ceil(math.log2((b - a) / cfg.mesh_min)))
    levels = []
    n = finest
    while n >= 8 or not levels:
        levels.append(n)
        n //= 2
    if cfg.mesh_levels is not None:
        if cfg.mesh_levels < 1:
            raise DomainError("--mesh-levels must be positive")
        levels = levels[: cfg.mesh_levels]
    return tuple(sorted(levels))


def _floats(text, default):
    if text is None:
        return list(default)
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ab(cfg):
    a, b = parse_point(cfg.a), parse_point(cfg.b)
    if not a < b:
        raise DomainError(f"need a < b, got a={cfg.a}, b={cfg.b}")
    return a, b


# -- commands --------------------------------------------------------------------

def cmd_integrate(cfg):
    f = _function(cfg)
    a, b = _ab(cfg)
    conf = IntegrateConfig(eps=cfg.eps or 1e-4, levels=_levels(cfg),
                           samples=max(cfg.samples, 2), seed=cfg.seed)
    rep = integrate(f, a, b, conf)
    rows = [(m, s, n) for m, s, n in rep.table()]
    return {"report": rep.to_dict(), "function": f.describe()}, \
        (("mesh", "worst_separation", "samples"), rows)


def cmd_oscillate(cfg):
    f = _function(cfg)
    sampler = Sampler(points=cfg.samples, seed=cfg.seed)
    out, rows, header = {"function": f.describe()}, [], ("t", "omega_estimate", "class")
    if cfg.points:
        pts = [parse_point(p) for p in cfg.points.split(",")]
        profs = [pointwise_oscillation(f, t, sampler=sampler) for t in pts]
        out["points"] = [p.to_dict() for p in profs]
        rows += [(float(t), p.estimate, "point") for t, p in zip(pts, profs)]
        if f.space.representation == "sequence" and cfg.extra.get("coordinates"):
            out["coordinates"] = [coordinate_continuity_probe(f, t, sampler=sampler).to_dict()
                                  for t in pts]
    if cfg.partition:
        a, b = _ab(cfg)
        prof = oscillation_sum(f, Partition(uniform_points(a, b, cfg.partition)), sampler)
        out["partition"] = prof.to_dict()
    if cfg.r is not None:
        cells = cell_profile(f, grid=cfg.grid or 2 ** 10, sampler=sampler)
        rs = _floats(cfg.r, ())
        out["measures"] = [discontinuity_measure(f, r, cells=cells).to_dict() for r in rs]
        rows += cells.rows(rs[0])
    if len(out) == 1:
        raise DomainError("oscillate needs --points, --partition or --r")
    return out, (header, rows)


def cmd_darboux(cfg):
    f = _function(cfg)
    a, b = _ab(cfg)
    levels = _levels(cfg) if (cfg.mesh_min or cfg.mesh_levels) else None
    rep = darboux_probe(f, cfg.eps or 0.05, levels, a, b, Sampler(cfg.samples, cfg.seed))
    d = rep.details
    rows = [(m, e) for m, e in zip(d["meshes"], d["estimates"])]
    return {"report": rep.to_dict(), "function": f.describe()}, (("mesh", "oscillation_sum"), rows)


def cmd_adversary(cfg):
    f = _function(cfg)
    r = float(cfg.r) if cfg.r is not None else 1.0
    res = adversary_partitions(f, r, cfg.n or 100, Sampler(cfg.samples, cfg.seed))
    rows = [(k, encode_real(u), encode_real(v)) for k, (u, v) in
            enumerate(zip(res.first.tags, res.second.tags))]
    rows = [(k, str(u), str(v)) for k, u, v in rows]
    return {"report": res.to_dict(), "function": f.describe()}, (("interval", "tag_first",
                                                                   "tag_second"), rows)


def cmd_ftc(cfg):
    fn = cfg.fn or "smooth:trig"
    if not fn.startswith("smooth:"):
        raise CapabilityError("ftc needs an analytic primitive: use --fn smooth:<name>")
    F = _function(cfg, fn)
    space = F.space
    a = parse_point(cfg.a)
    tau = parse_point(cfg.tau) if cfg.tau is not None else parse_point(cfg.b)
    levels = _levels(cfg) if (cfg.mesh_min or cfg.mesh_levels) else (2 ** 12,)
    conf = IntegrateConfig(eps=cfg.eps or 1e-3, levels=levels, samples=max(cfg.samples, 2),
                           seed=cfg.seed)
    rep = ftc_check(F, F.derivative_function(), space, a, tau, conf)
    tab = primitive(F.derivative_function(), a, tau, cfg.grid or 5, conf)
    k = F.ncoords
    header = ("t", *[f"x{i}" for i in range(1, k + 1)], "converged")
    rows = [(row[0], *row[1:k + 1], row[-1]) for row in tab.rows()]
    return {"report": rep.to_dict(), "function": F.describe(),
            "primitive": {"grid": [encode_real(t) for t in tab.grid],
                          "converged": tab.converged}}, (header, rows)


def cmd_spacecheck(cfg):
    space = _space(cfg, None, cfg.space or "euclidean:3")
    n = cfg.n or 10_000
    reps = [check_translation_invariance(space, n, cfg.seed),
            check_scaling_inequality(space, n, seed=cfg.seed),
            check_scaling_inequality(space, n, seed=cfg.seed, bounded_differences=True)]
    rows = [(r.probe + ("/bounded" if r.notes else ""), r.worst_violation, r.violations,
             r.outcome) for r in reps]
    return {"space": str(space), "flags": {"translation_invariant": space.translation_invariant,
                                           "scaling": space.scaling},
            "reports": [r.to_dict() for r in reps]}, \
        (("probe", "worst_violation", "violations", "outcome"), rows)


def cmd_probe(cfg):
    f = _function(cfg)
    a, b = _ab(cfg)
    crit = cfg.criterion or "same-points"
    n = cfg.n or 64
    if crit == "mesh-cauchy":
        rep = mesh_cauchy_probe(f, a, b, (float(b) - float(a)) / n, max(cfg.samples, 4), cfg.seed)
    elif crit == "refinement-cauchy":
        rep = refinement_cauchy_probe(f, uniform(a, b, n), max(cfg.samples, 4), cfg.seed)
    elif crit == "same-points":
        mode = cfg.extra.get("mode", "adversarial")
        rep = same_points_probe(f, uniform(a, b, n), mode, max(cfg.samples, 4), cfg.seed)
    elif crit == "variation":
        rep = variation_bound_estimate(f, a, b, seed=cfg.seed)
    else:
        raise DomainError(f"unknown criterion {crit!r}; expected mesh-cauchy, "
                          "refinement-cauchy, same-points or variation")
    return {"report": rep.to_dict(), "function": f.describe()}, \
        (("criterion", "separation"), [(rep.criterion, rep.separation)])


def _trend(seps):
    if max(seps) == 0:
        return "no-separation"
    if seps[-1] >= seps[0] * (1 - 1e-9) and seps[-1] > 0:
        return "separation-persisted"
    if all(y < x for x, y in zip(seps, seps[1:])) and seps[-1] <= 0.75 * seps[0]:
        return "separation-shrinking"
    return "inconclusive"


def atlas_cell(fn_id, space_text, cfg, eps=0.05, rs=(0.1, 0.5), grid=2 ** 12,
               tag_levels=(8, 16, 32)):
    """One (function, space) cell of the atlas."""
    f = _function(cfg, fn_id, space_text)
    sampler = Sampler(points=cfg.samples, seed=cfg.seed)
    dar = darboux_probe(f, eps, sampler=sampler)
    cells = cell_profile(f, grid=grid, sampler=sampler)
    measures = [discontinuity_measure(f, r, cells=cells) for r in rs]
    seps = [same_points_probe(f, uniform(0.0, 1.0, n), "adversarial").separation
            for n in tag_levels]
    bounded = f.bound is not None and math.isfinite(f.bound)
    cont_ae = all(m.upper < cfg.measure_tol for m in measures)
    passed = dar.details["passed"]
    trend = _trend(seps)
    return {
        "function": f.label,
        "space": str(f.space),
        "darboux": {"passed": passed, "estimate": dar.separation,
                    "levels": dar.details["levels"], "estimates": dar.details["estimates"]},
        "measures": [{"r": m.r, "lower": m.lower, "upper": m.upper} for m in measures],
        "bounded": bounded,
        "continuous_ae": cont_ae,
        "nowhere_continuous": min(m.lower for m in measures[:1]) >= 1 - cfg.measure_tol,
        "coherent": passed == (bounded and cont_ae),
        "tag_separation": {"levels": list(tag_levels), "separations": seps, "trend": trend},
        "lebesgue_gap": trend == "separation-shrinking" and not cont_ae,
        "annotations": f.annotations(),
    }


def cmd_atlas(cfg):
    fns = (cfg.fns or ATLAS_FUNCTIONS).split(",")
    spaces = (cfg.spaces or ATLAS_SPACES).split(",")
    eps = cfg.eps or 0.05
    rs = tuple(_floats(cfg.r, (0.1, 0.5)))
    grid = cfg.grid or 2 ** 12
    cells = []
    for fn_id in fns:
        for sp in spaces:
            cells.append(atlas_cell(fn_id, sp, cfg, eps, rs, grid))
    rows = [(c["function"], c["space"], c["darboux"]["passed"], c["darboux"]["estimate"],
             *[m["upper"] for m in c["measures"]], c["continuous_ae"], c["coherent"],
             c["tag_separation"]["trend"]) for c in cells]
    header = ("function", "space", "darboux_pass", "darboux_estimate",
              *[f"upper_r{r:g}" for r in rs], "continuous_ae", "coherent", "tag_trend")
    summary = {"cells": len(cells), "coherent": sum(c["coherent"] for c in cells),
               "eps": eps, "r": list(rs), "grid": grid, "measure_tol": cfg.measure_tol}
    return {"cells": cells, "summary": summary}, (header, rows)


_DISPATCH = {
    "integrate": cmd_integrate,
    "oscillate": cmd_oscillate,
    "darboux": cmd_darboux,
    "adversary": cmd_adversary,
    "ftc": cmd_ftc,
    "spacecheck": cmd_spacecheck,
    "atlas": cmd_atlas,
    "probe": cmd_probe,
}


def run(cfg: ExperimentConfig):
    """Execute ``cfg`` and return ``(json_text, csv_text)``."""
    if cfg.command not in _DISPATCH:
        raise DomainError(f"unknown command {cfg.command!r}; expected one of {COMMANDS}")
    if cfg.format not in ("json", "csv", "both"):
        raise DomainError("--format must be json, csv or both")
    result, (header, rows) = _DISPATCH[cfg.command](cfg)
    # the output location is not part of the experiment
    conf = {k: v for k, v in cfg.to_dict().items() if k != "out"}
    report = {"command": cfg.command, "config": conf, "seed": cfg.seed,
              "version": __version__, "result": result}
    return render_json(report), render_csv(header, rows)


# -- argument parsing ----------------------------------------------------------------

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("experiment")
    g.add_argument("--space", help="euclidean:<n>, omega-sup:<M>, omega-sum:<M>, lp:<p>:<M>, "
                                    "linf:<M> or l1gamma")
    g.add_argument("--fn", help="rationals:<Nmax>, digits:<K>, ratind or smooth:<name>")
    g.add_argument("--a", help="left endpoint (e.g. 0, 1/3, irr:0.7071)")
    g.add_argument("--b", help="right endpoint")
    g.add_argument("--eps", type=float, help="tolerance")
    g.add_argument("--mesh-min", dest="mesh_min", type=float, help="finest mesh")
    g.add_argument("--mesh-levels", dest="mesh_levels", type=int, help="number of mesh levels")
    g.add_argument("--seed", type=int, help="seed (default: $METRIVEC_SEED or 0)")
    g.add_argument("--trunc", type=int, help="default truncation M of sequence spaces")
    g.add_argument("--samples", type=int, help="tag or window samples")
    g.add_argument("--out", help="output path (extension replaced per format)")
    g.add_argument("--format", choices=("json", "csv", "both"))
    g.add_argument("--config", help="JSON file with defaults for any of these flags")
    g.add_argument("--points", help="comma-separated points")
    g.add_argument("--partition", type=int, help="uniform partition with this many intervals")
    g.add_argument("--r", help="oscillation threshold(s), comma-separated")
    g.add_argument("--N", dest="n", type=int, help="number of intervals or samples")
    g.add_argument("--grid", type=int, help="grid resolution")
    g.add_argument("--tau", help="upper limit for ftc")
    g.add_argument("--criterion", help="mesh-cauchy, refinement-cauchy, same-points, variation")
    g.add_argument("--fns", help="atlas: comma-separated function ids")
    g.add_argument("--spaces", help="atlas: comma-separated space strings")
    g.add_argument("--measure-tol", dest="measure_tol", type=float)
    g.add_argument("--coordinates", action="store_true", default=None,
                   help="oscillate: also run the coordinatewise continuity probe")
    g.add_argument("--mode", help="probe: tag search for same-points (adversarial|seeded-random)")
    p = argparse.ArgumentParser(prog="metrivec", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"metrivec {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def _config_from_args(ns):
    data = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DomainError(f"config {ns.config} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise DomainError("config file must hold a JSON object")
        data.pop("command", None)
    extra = dict(data.pop("extra", {}) or {})
    for key in ("coordinates", "mode"):
        val = getattr(ns, key)
        if val is not None:
            extra[key] = val
    for key, val in vars(ns).items():
        if key in ("config", "command", "coordinates", "mode") or val is None:
            continue
        data[key] = val
    if "seed" not in data:
        env = os.environ.get("METRIVEC_SEED")
        if env is not None:
            try:
                data["seed"] = int(env)
            except ValueError:
                raise DomainError(f"METRIVEC_SEED must be an integer, got {env!r}") from None
    data["extra"] = extra
    return ExperimentConfig.from_dict({"command": ns.command, **data})


def _write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise OSError(f"output directory {d} does not exist")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        cfg = _config_from_args(ns)
        js, cs = run(cfg)
        if cfg.out:
            stem = os.path.splitext(cfg.out)[0] if cfg.format == "both" else cfg.out
            if cfg.format in ("json", "both"):
                _write(stem + ".json" if cfg.format == "both" else cfg.out, js)
            if cfg.format in ("csv", "both"):
                _write(stem + ".csv" if cfg.format == "both" else cfg.out, cs)
        else:
            sys.stdout.write(cs if cfg.format == "csv" else js)
            if cfg.format == "both":
                sys.stdout.write(cs)
    except (CapabilityError, ConstructionError) as exc:
        print(f"metrivec: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (DomainError, MetrivecError, ValueError) as exc:
        print(f"metrivec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"metrivec: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
