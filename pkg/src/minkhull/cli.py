"""Command line: ``minkhull {hull,verify,converge,spectrum} --config cfg.json``.

Every subcommand writes its artifacts into ``--out`` (or the config's
``output_dir``) plus ``manifest.json`` with the config echo, the library
version and wall time per stage.  Artifacts other than the manifest are
byte-identical for equal (config, seed).
"""

import argparse
import itertools
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import io
from .bounds import (ANALYTIC_TOL, BoundReport, bilipschitz_check, chord_tangent_check,
                     f_function_check, fmax_integral_check, lower_bound_argument_check,
                     projection_estimate_check, reports_to_json, sample_paths,
                     short_displacement_check, translation_length_bound_check)
from .fuchsian import (FuchsianGroup, RadiusTooLarge, genus2_octagon_group, length_spectrum,
                       reduce_word)
from .hull import HullError, fuchsian_hull, sample_domain
from .intrinsic import QuotientSurface, WordCapTooSmall, CoverSurface, quotient_distance_cover
from .lorentz import GeometryError
from .metricspace import cat0_spot_check, convergence_experiment, induced_cone_metric

EXIT_OK, EXIT_VIOLATIONS, EXIT_CONFIG, EXIT_HULL, EXIT_GEOMETRY, EXIT_WORD_CAP = 0, 1, 2, 3, 4, 5


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    group: str = "genus2_octagon"
    seeds: dict = field(default_factory=lambda: {"kind": "single_point"})
    domain_radius: float = 5.0
    steiner_density: int = 8
    word_cap: int = 16
    rng_seed: int = 0
    output_dir: str = "out"
    n_pairs: int = 1000
    n_path_pairs: int = 100
    n_cat0_triangles: int = 20
    ladder: list = field(default_factory=lambda: [50, 200, 800])
    ladder_c: float = 2.0
    ladder_points: int = 16
    spectrum_max_word: int = 3

    def __post_init__(self):
        for name in ("domain_radius", "steiner_density", "word_cap", "n_pairs", "ladder_c",
                     "ladder_points", "spectrum_max_word"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.rng_seed < 0:
            raise ConfigError("rng_seed must be non-negative")
        kind = self.seeds.get("kind")
        if kind not in ("single_point", "hyperboloid_sample", "file"):
            raise ConfigError(f"unknown seed kind {kind!r}")
        if kind == "hyperboloid_sample":
            if not (self.seeds.get("c", 0) > 0 and self.seeds.get("density", 0) > 0):
                raise ConfigError("hyperboloid_sample needs positive c and density")
        if not self.ladder or any(int(d) <= 0 for d in self.ladder):
            raise ConfigError("ladder densities must be positive")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    def build_group(self):
        if self.group == "genus2_octagon":
            return genus2_octagon_group()
        p = Path(self.group)
        if not p.exists():
            raise ConfigError(f"group file {p} not found")
        return FuchsianGroup.from_json(p.read_text())

    def build_seeds(self, group):
        kind = self.seeds["kind"]
        if kind == "single_point":
            return np.array([[0.0, 0.0, 1.0]])
        if kind == "hyperboloid_sample":
            rng = np.random.default_rng(self.rng_seed)
            return float(self.seeds["c"]) * sample_domain(group, int(self.seeds["density"]), rng)
        return io.load_seeds(self.seeds["path"])


class _Stages:
    def __init__(self):
        self.times = {}

    def run(self, name, fn, *args, **kw):
        t = time.perf_counter()
        out = fn(*args, **kw)
        self.times[name] = round(time.perf_counter() - t, 3)
        return out


def _version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _manifest(out, cmd, cfg, stages, extra=None):
    m = {"command": cmd, "config": asdict(cfg), "version": _version(),
         "wall_time_s": stages.times}
    m.update(extra or {})
    io.write(out, "manifest.json", io.dumps(m))


def _hull(cfg, stages):
    group = stages.run("group", cfg.build_group)
    seeds = cfg.build_seeds(group)
    return stages.run("hull", fuchsian_hull, group, seeds, cfg.domain_radius)


def cmd_hull(cfg, out, args):
    stages = _Stages()
    hull = _hull(cfg, stages)
    io.write(out, "mesh.off", stages.run("mesh", io.hull_off, hull))
    io.write(out, "faces.json", io.dumps(stages.run("faces", io.hull_faces, hull)))
    io.write(out, "cone_metric.json", stages.run("cone_metric", io.cone_metric_json, hull))
    io.write(out, "alpha_beta.json", io.dumps(io.alpha_beta_report(hull, cfg.rng_seed)))
    _manifest(out, "hull", cfg, stages)
    return EXIT_OK


def _cone_reports(hull, cfg):
    cm = induced_cone_metric(hull)
    ang = cm.cone_angles()
    chi = cm.euler_characteristic()
    reports = [
        BoundReport.from_margins("cone_angles", ang - 2 * np.pi, ANALYTIC_TOL, cfg.rng_seed),
        BoundReport.from_margins("gauss_bonnet", [1e-6 - abs(cm.gauss_bonnet_sum() - 2 * np.pi * chi)],
                                 0.0, cfg.rng_seed, chi=chi),
    ]
    spot = cat0_spot_check(cm, cfg.n_cat0_triangles, cfg.rng_seed)
    reports.append(BoundReport("cat0_spot", spot.n_triangles,
                               float(min(spot.worst_angle_margin, -spot.max_excess)),
                               spot.violations, spot.tolerance, cfg.rng_seed, False,
                               {"max_excess": spot.max_excess}))
    return reports


def _quotient_cross_check(hull, cfg, n=4):
    """Quotient graph distance against the bounded word search on the cover."""
    rng = np.random.default_rng(cfg.rng_seed)
    h = hull.hconvex
    xs, ys = sample_domain(hull.group, n, rng), sample_domain(hull.group, n, rng)
    qs = QuotientSurface(hull, cfg.steiner_density)
    margins, skipped = [], 0
    for x, y in zip(xs, ys):
        p, q = h.surface_point(x)[1], h.surface_point(y)[1]
        d = qs.distance(p, q)
        try:
            dc = quotient_distance_cover(hull, p, q, cfg.word_cap, cfg.steiner_density,
                                         upper=d * 1.01 + 1e-9)
        except RadiusTooLarge:
            # the certified search radius needs too many translates
            skipped += 1
            continue
        margins.append(0.01 * max(d, 1e-12) - abs(d - dc))
    return BoundReport.from_margins("quotient_cross_check", margins, 0.0, cfg.rng_seed,
                                    skipped=skipped)


def cmd_verify(cfg, out, args):
    stages = _Stages()
    hull = _hull(cfg, stages)
    h = hull.hconvex
    k, seed = cfg.steiner_density, cfg.rng_seed
    a, b = stages.run("alpha_beta", h.alpha_beta)
    cover = stages.run("cover", CoverSurface, hull, k)
    reports = [
        stages.run("bilipschitz", bilipschitz_check, h, cover, cfg.n_pairs, seed),
        stages.run("chord_tangent", lambda: chord_tangent_check(
            [p for _, _, p in sample_paths(h, cover, cfg.n_path_pairs, seed)], a, b)),
        stages.run("projection_estimate", projection_estimate_check, h, cover, cfg.n_path_pairs, seed),
        stages.run("fmax_integral", fmax_integral_check, hull, k),
        stages.run("f_function", f_function_check, hull, k),
        stages.run("translation_length_bound", translation_length_bound_check, hull, k),
        stages.run("lower_bound_argument", lower_bound_argument_check, hull, k),
        stages.run("short_displacement", short_displacement_check, hull.group, 1000, 8, seed),
        stages.run("quotient_cross_check", _quotient_cross_check, hull, cfg),
    ]
    reports.extend(stages.run("cone_metric", _cone_reports, hull, cfg))
    if args.negative_control:
        reports.append(stages.run("control", translation_length_bound_check, hull, k,
                                  alpha=10 * a, control=True))
    io.write(out, "bounds.json", reports_to_json(reports))
    bad = sorted(r.name for r in reports if r.violations)
    _manifest(out, "verify", cfg, stages, {"violations": bad})
    for r in sorted(reports, key=lambda r: r.name):
        tag = "FAIL" if r.violations else "ok"
        print(f"{tag:4s} {r.name}: {r.violations}/{r.samples} violations, worst margin {r.worst_margin:.3e}")
    return EXIT_VIOLATIONS if bad else EXIT_OK


def cmd_converge(cfg, out, args):
    stages = _Stages()
    group = stages.run("group", cfg.build_group)
    rep = stages.run("ladder", convergence_experiment, group, cfg.ladder_c, tuple(cfg.ladder),
                     cfg.ladder_points, cfg.steiner_density, cfg.rng_seed, cfg.domain_radius)
    io.write(out, "gaps.csv", rep.to_csv())
    summary = {"verdict": rep.verdict, "gaps": [float(f"{g:.12g}") for g in rep.gaps],
               "reference_diameter": float(f"{rep.reference_diameter:.12g}"),
               "final_relative_gap": float(f"{rep.final_relative_gap:.12g}"),
               "rng_seed": cfg.rng_seed}
    io.write(out, "converge.json", io.dumps(summary))
    _manifest(out, "converge", cfg, stages)
    print(f"verdict: {rep.verdict}; gaps {summary['gaps']}")
    return EXIT_OK


def _words(n_gens, max_len):
    letters = [i for g in range(1, n_gens + 1) for i in (g, -g)]
    seen = set()
    for n in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=n):
            r = tuple(reduce_word(w))
            if len(r) == n and r not in seen:
                seen.add(r)
                yield r


def cmd_spectrum(cfg, out, args):
    stages = _Stages()
    group = stages.run("group", cfg.build_group)
    words = list(_words(len(group.generators), cfg.spectrum_max_word))
    lengths = stages.run("spectrum", length_spectrum, group, words)
    rows = ["word,translation_length"]
    rows += [f"{' '.join(map(str, w))},{L:.12g}" for w, L in zip(words, lengths)]
    io.write(out, "spectrum.csv", "\n".join(rows) + "\n")
    _manifest(out, "spectrum", cfg, stages, {"n_words": len(words)})
    return EXIT_OK


COMMANDS = {"hull": cmd_hull, "verify": cmd_verify, "converge": cmd_converge,
            "spectrum": cmd_spectrum}


def build_parser():
    p = argparse.ArgumentParser(prog="minkhull", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="experiment config (JSON)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="override rng_seed")
    p.add_argument("--steiner", type=int, help="override steiner_density")
    p.add_argument("--word-cap", type=int, help="override word_cap")
    p.add_argument("--negative-control", action="store_true",
                   help="add a check built to fail (exit code must become nonzero)")
    return p


def load_config(args):
    d = json.loads(args.config.read_text()) if args.config else {}
    for key, attr in (("rng_seed", "seed"), ("steiner_density", "steiner"), ("word_cap", "word_cap")):
        if getattr(args, attr) is not None:
            d[key] = getattr(args, attr)
    return ExperimentConfig.from_dict(d)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, TypeError, json.JSONDecodeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out if args.out is not None else Path(cfg.output_dir)
    try:
        return COMMANDS[args.command](cfg, out, args)
    except WordCapTooSmall as exc:
        print(f"word cap too small: {exc}", file=sys.stderr)
        return EXIT_WORD_CAP
    except HullError as exc:
        print(f"hull error: {exc}", file=sys.stderr)
        return EXIT_HULL
    except (GeometryError, ConfigError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
