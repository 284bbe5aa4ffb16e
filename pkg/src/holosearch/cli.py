"""Command-line interface.

Four subcommands, each a thin wrapper over one experiment:

* ``holo run-ab``   A/B-compare random vs sorted pixel selection.
* ``holo scatter``  Quantisation-change vs error-change square-law scatter.
* ``holo hist``     Back-projection magnitude/angle/change histograms.
* ``holo render``   Single search run with rendered hologram and replay.

Flags may also come from a flat ``key = value`` config file via ``--config``;
explicit flags win over the file, the file wins over defaults. Keys match the
flag names (dashes or underscores both work), e.g. ``trace-stride = 50``.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (
    ExperimentConfig,
    run_convergence_ab,
    run_histograms,
    run_render,
    run_scatter_experiment,
)
from .search import ALGORITHMS, SELECTIONS
from .slm import ModulationScheme
from .targets import SYNTHETIC_NAMES

_CONFIG_KEYS = {
    "image": str,
    "resolution": int,
    "scheme": str,
    "algorithm": str,
    "selection": str,
    "iterations": int,
    "seed": int,
    "symmetry": None,  # parsed as a boolean word
    "t_coeff": float,
    "t0": float,
    "out_dir": str,
    "trace_stride": int,
    "recompute_interval": int,
    "scatter_samples": int,
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def parse_config_file(path) -> dict:
    """Read a flat key = value file into option values.

    Blank lines and ``#`` comments are ignored. Unknown keys and unparseable
    values raise ValueError naming the line number.
    """
    options: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "symmetry":
                if value.lower() not in _BOOL_WORDS:
                    raise ValueError(f"{path}:{lineno}: expected a boolean word, got {value!r}")
                options[key] = _BOOL_WORDS[value.lower()]
            else:
                try:
                    options[key] = _CONFIG_KEYS[key](value)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return options


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    # Defaults are all None so that "flag was given" is distinguishable from
    # "use config-file or built-in default".
    sub.add_argument("--config", metavar="FILE", help="flat key = value options file")
    sub.add_argument("--image", help=f"PGM path or builtin name ({', '.join(SYNTHETIC_NAMES)})")
    sub.add_argument("--resolution", type=int, help="square grid side (64..2048, powers of two)")
    sub.add_argument("--scheme", help="modulation scheme, e.g. binary-phase, phase:8, amplitude:cont")
    sub.add_argument("--algorithm", choices=ALGORITHMS, help="search algorithm")
    sub.add_argument("--selection", choices=SELECTIONS, help="pixel selection policy")
    sub.add_argument("--iterations", type=int, help="search iterations")
    sub.add_argument("--seed", type=int, help="master seed for all random streams")
    sub.add_argument("--symmetry", action="store_const", const=True,
                     help="max the target with its 180-degree rotation")
    sub.add_argument("--t-coeff", type=float, help="annealing start temperature (sa only)")
    sub.add_argument("--t0", type=float, help="annealing decay constant (sa only)")
    sub.add_argument("--out-dir", help="output directory (created if missing)")
    sub.add_argument("--trace-stride", type=int, help="iterations between trace samples")
    sub.add_argument("--recompute-interval", type=int,
                     help="accepted updates between full replay recomputes")
    sub.add_argument("--scatter-samples", type=int, help="pixels sampled by the scatter experiment")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holo",
        description="Search-based hologram optimization experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run-ab", "compare random vs sorted pixel selection on one configuration"),
        ("scatter", "single-pixel quantisation-change vs error-change scatter"),
        ("hist", "back-projection magnitude, angle, and change histograms"),
        ("render", "one search run; writes hologram and replay images"),
    ):
        _add_common_flags(sub.add_parser(name, help=help_text))
    return parser


# Per-subcommand default overrides; everything else comes from ExperimentConfig.
_SUBCOMMAND_DEFAULTS = {
    "run-ab": {},
    "scatter": {"scheme": "phase:cont"},
    "hist": {},
    "render": {},
}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    options = dict(_SUBCOMMAND_DEFAULTS[args.command])
    if args.config:
        options.update(parse_config_file(args.config))
    for key in _CONFIG_KEYS:
        value = getattr(args, key)
        if value is not None:
            options[key] = value
    if "scheme" in options:
        options["scheme"] = ModulationScheme.from_name(options["scheme"])
    return ExperimentConfig(**options)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"holo: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run-ab":
            report = run_convergence_ab(config)
            print(f"initial_mse = {report.initial_mse:.17g}")
            print(f"final_mse_random = {report.final_mse_random:.17g}")
            print(f"final_mse_sps = {report.final_mse_sps:.17g}")
            print(f"improvement_error_reduction = {report.improvement_error_reduction:.17g}")
            print(f"accepted_random = {report.accepted_random}")
            print(f"accepted_sps = {report.accepted_sps}")
            print(f"wrote {report.summary_path}")
        elif args.command == "scatter":
            report = run_scatter_experiment(config)
            print(f"samples = {report.n_samples}")
            print(f"fit_coefficient = {report.fit_coefficient:.17g}")
            print(f"pearson_fit_observed = {report.pearson_fit_observed:.17g}")
            print(f"wrote {report.csv_path}")
        elif args.command == "hist":
            report = run_histograms(config)
            print(f"pixels = {report.n_pixels}")
            print(f"wrote {report.magnitude_path}")
            print(f"wrote {report.angle_path}")
            print(f"wrote {report.change_path}")
        else:
            report = run_render(config)
            print(f"initial_mse = {report.initial_mse:.17g}")
            print(f"final_mse = {report.final_mse:.17g}")
            print(f"accepted = {report.accepted}")
            print(f"wrote {report.hologram_path}")
            print(f"wrote {report.replay_path}")
        return 0
    except (ValueError, OSError) as exc:
        print(f"holo: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
