"""Command line entry point: ``ohmtrace <experiment> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import ConfigError, NetworkError, NetworkIOError, OhmtraceError
from .experiments import EXIT_CONFIG, EXPERIMENTS, ExperimentConfig, run_experiment
from .network import Exhaustion, collapse_boundary, make_family, save_network

log = logging.getLogger("ohmtrace")

_LIST_KEYS = {"depths": int, "tgrid": float}
_SCALAR_KEYS = {"family": str, "trials": int, "seed": int, "out": str, "network": str, "sink": int, "workers": int}


def _split_list(raw: str, cast):
    try:
        return [cast(x) for x in raw.replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigError(f"cannot parse list {raw!r}") from None


def _param(raw: str) -> tuple[str, str]:
    key, sep, value = raw.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"parameters must look like key=value, got {raw!r}")
    return key.strip(), value.strip()


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``param = k=v`` may repeat. ``#`` starts a comment."""
    out: dict = {"params": {}}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key == "param":
            k, v = _param(value)
            out["params"][k] = v
        elif key in _LIST_KEYS:
            out[key] = _split_list(value, _LIST_KEYS[key])
        elif key in _SCALAR_KEYS:
            try:
                out[key] = _SCALAR_KEYS[key](value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ohmtrace", description=__doc__)
    p.add_argument("experiment", choices=sorted(EXPERIMENTS) + ["collapse"],
                   help="experiment to run, or 'collapse' to write a collapsed ball as a network file")
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--family", help="lattice(d), b-ary-tree(b), wedge(exponent) or birth-death(rule)")
    p.add_argument("--param", action="append", default=[], metavar="K=V", help="family or experiment parameter")
    p.add_argument("--depths", help="comma-separated increasing radii")
    p.add_argument("--tgrid", help="comma-separated thresholds in (0, 1)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="CSV output path (stdout if omitted)")
    p.add_argument("--network", help="network file to use instead of a family")
    p.add_argument("--sink", type=int, help="absorbing vertex when --network is given")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    values = read_config_file(args.config) if args.config else {"params": {}}
    for key in _SCALAR_KEYS:
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    for key, cast in _LIST_KEYS.items():
        flag = getattr(args, key)
        if flag is not None:
            values[key] = _split_list(flag, cast)
    for raw in args.param:
        k, v = _param(raw)
        values["params"][k] = v
    return ExperimentConfig(experiment=args.experiment, **values)


def _collapse(config: ExperimentConfig) -> int:
    fam = make_family(config.family or "b-ary-tree(2)", config.params)
    if not config.depths or not config.out:
        raise ConfigError("collapse needs --depths R and --out FILE")
    net, z = collapse_boundary(Exhaustion(fam, config.depths[-1]))
    save_network(net, config.out)
    print(f"wrote {config.out}: {net.num_vertices} vertices, {net.num_edges} edges, sink {z}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = make_config(args)
        config.validate()
        if config.experiment == "collapse":
            return _collapse(config)
        report = run_experiment(config)
    except (ConfigError, NetworkError, NetworkIOError) as exc:
        print(f"ohmtrace: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OhmtraceError as exc:
        print(f"ohmtrace: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if config.out:
        report.write(config.out)
        log.info("wrote %s (%d rows)", config.out, len(report.rows))
    else:
        sys.stdout.write(report.to_csv())
    for note in report.notes:
        print(f"ohmtrace: {note}", file=sys.stderr)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
