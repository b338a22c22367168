"""Command-line entry point: ``schottky <command> [options]``.

Commands:
    build-nori  build the Nori group on P^n (odd n) and write it as JSON
    verify      check the Schottky axioms of a group file
    orbit       two-sided orbit point cloud of one generator (CSV)
    words       list reduced words, or check their ping-pong images (--check)
    limit-set   modulus decomposition and limit set of a map or generator
    decay       decay table of a matrix, or the normalized orbit of a map (CSV)
    obstruct    run the even-dimension contradiction harness on a candidate

Exit status is 0 on success/PASS, 1 when a failure witness was produced and
2 on input errors.  Every artifact is written atomically; with a fixed seed
the output is byte-identical between runs.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np

from .asymptotics import normalized_orbit, verify_decay
from .config import DEFAULT_SEED, RunConfig, merge_tolerances
from .errors import FiniteOrder, ParseError, SchottkyError
from .group import (SchottkyData, check_word_images, nori_build, sample_interior_points,
                    verify_schottky, word_displacement, word_image_region)
from .obstruction import contradiction_harness
from .projective import ProjPoint, random_unit_vectors
from .psl import ProjMap, finite_order, limit_set, modulus_decomposition, orbit_rows
from .serialize import (complex_from_json, csv_text, dumps, matrix_from_json, read_json,
                        vector_from_json, write_csv, write_json)
from .words import enumerate_reduced_words, word_count

log = logging.getLogger("schottky")

COMMANDS = ("build-nori", "verify", "orbit", "words", "limit-set", "decay", "obstruct")
EXIT_OK, EXIT_WITNESS, EXIT_INPUT = 0, 1, 2

# per-command defaults for --samples (number of sampled points) and --mmax
SAMPLE_DEFAULTS = {"verify": 10**4, "obstruct": 10**4, "words": 100, "orbit": 20, "decay": 1}
MMAX_DEFAULTS = {"orbit": 200, "decay": 200}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schottky", description="Schottky groups on complex projective space.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", nargs="?", help="input JSON (group, map, candidate or decay spec)")
    p.add_argument("--n", type=int, default=3, help="projective dimension (build-nori)")
    p.add_argument("--g", type=int, default=2, help="number of generators (build-nori)")
    p.add_argument("--alpha", type=float, default=0.2, help="region threshold (build-nori)")
    p.add_argument("--samples", type=int, default=None, help="sample / start-point count")
    p.add_argument("--seed", type=int, default=None, help=f"sampling seed (default {DEFAULT_SEED})")
    p.add_argument("--maxlen", type=int, default=4, help="maximal word length (words)")
    p.add_argument("--check", action="store_true", help="check word images on interior points (words)")
    p.add_argument("--mmax", type=int, default=None, help="number of iterates (orbit, decay)")
    p.add_argument("--gen", type=int, default=1, help="1-based generator index for group inputs")
    p.add_argument("--depth", type=int, default=8, help="chain depth (obstruct)")
    p.add_argument("--config", help="JSON file with optional 'tolerances' and 'seed'")
    p.add_argument("-o", "--output", help="output file (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def _split_tolerances(argv: Sequence[str]):
    """Pull ``--tol.<name>=<value>`` / ``--tol.<name> <value>`` out of ``argv``."""
    rest, tol = [], {}
    it = iter(range(len(argv)))
    for i in it:
        arg = argv[i]
        if not arg.startswith("--tol."):
            rest.append(arg)
            continue
        key = arg[len("--tol."):]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            if i + 1 >= len(argv):
                raise ParseError(f"{arg} needs a value")
            value = argv[i + 1]
            next(it)
        tol[key] = value
    return rest, tol


def parse_args(argv: Optional[Sequence[str]] = None):
    """Parse ``argv`` into ``(RunConfig, namespace)``; bad input raises :class:`ParseError`."""
    argv = list(sys.argv[1:] if argv is None else argv)
    rest, tol = _split_tolerances(argv)
    ns = build_parser().parse_args(rest)
    seed = DEFAULT_SEED
    overrides = {}
    if ns.config:
        cfg = _read(ns.config)
        if not isinstance(cfg, dict) or not set(cfg) <= {"tolerances", "seed"}:
            raise ParseError("config file must be an object with optional keys 'tolerances' and 'seed'")
        overrides.update(cfg.get("tolerances") or {})
        seed = int(cfg.get("seed", seed))
    overrides.update(tol)  # command-line flags win over the config file
    if ns.seed is not None:
        seed = ns.seed
    for name in ("samples", "mmax", "maxlen", "depth"):
        value = getattr(ns, name)
        if value is not None and value < (0 if name == "maxlen" else 1):
            raise ParseError(f"--{name} must be positive")
    config = RunConfig(command=ns.command, tolerances=merge_tolerances(overrides), seed=seed,
                       output_path=ns.output)
    return config, ns


def _read(path) -> object:
    try:
        return read_json(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def _need_input(ns) -> str:
    if not ns.input:
        raise ParseError(f"'{ns.command}' needs an input file")
    return ns.input


def _load_group(path) -> SchottkyData:
    return SchottkyData.from_json(_read(path))


def _load_map(path, gen: int) -> ProjMap:
    """A single map: either a ProjMap file or generator ``gen`` of a group file."""
    data = _read(path)
    if isinstance(data, dict) and "generators" in data:
        s = SchottkyData.from_json(data)
        if not 1 <= gen <= s.g:
            raise ParseError(f"--gen {gen} out of range 1..{s.g}")
        return s.generators[gen - 1]
    return ProjMap.from_json(data)


def _emit_json(config: RunConfig, obj) -> None:
    if config.output_path:
        write_json(config.output_path, obj)
    else:
        sys.stdout.write(dumps(obj))


def _emit_csv(config: RunConfig, header, rows) -> None:
    if config.output_path:
        write_csv(config.output_path, header, rows)
    else:
        sys.stdout.write(csv_text(header, rows))


# --------------------------------------------------------------------------
# commands


def cmd_build_nori(config: RunConfig, ns) -> int:
    s = nori_build(ns.n, ns.g, ns.alpha)
    _emit_json(config, s.to_json())
    return EXIT_OK


def cmd_verify(config: RunConfig, ns) -> int:
    s = _load_group(_need_input(ns))
    report = verify_schottky(s, samples=ns.samples or SAMPLE_DEFAULTS["verify"], seed=config.seed,
                             tol=config.tol("boundary"), exact_tol=config.tol("mapping_exact"))
    _emit_json(config, report.to_dict())
    log.info("verify: %s", report.status)
    return EXIT_WITNESS if report.first_witness() is not None else EXIT_OK


def cmd_orbit(config: RunConfig, ns) -> int:
    path = _need_input(ns)
    data = _read(path)
    m_max = ns.mmax or MMAX_DEFAULTS["orbit"]
    count = ns.samples or SAMPLE_DEFAULTS["orbit"]
    if isinstance(data, dict) and "generators" in data:
        s = SchottkyData.from_json(data)
        gm = _load_map(path, ns.gen)
        starts = sample_interior_points(s, count, seed=config.seed, tol=config.tol("boundary"))
    else:
        gm = ProjMap.from_json(data)
        starts = random_unit_vectors(np.random.default_rng(config.seed), gm.ambient_dim + 1, count)
    n1 = gm.ambient_dim + 1
    header = ["start", "m"] + [f"{part}{i}" for i in range(n1) for part in ("re", "im")]
    rows = []
    inv = np.linalg.inv(gm.lift)
    for idx, x in enumerate(starts):
        back = orbit_rows(inv, x, m_max)[::-1]
        fwd = orbit_rows(gm.lift, x, m_max)[1:]
        for m, y in zip(range(-m_max, m_max + 1), np.vstack([back, fwd])):
            rows.append([idx, m] + [float(v) for z in y for v in (z.real, z.imag)])
    _emit_csv(config, header, rows)
    return EXIT_OK


def cmd_words(config: RunConfig, ns) -> int:
    s = _load_group(_need_input(ns))
    words = list(enumerate_reduced_words(s.g, ns.maxlen))
    out = {"g": s.g, "max_len": ns.maxlen, "count": len(words),
           "expected_count": word_count(s.g, ns.maxlen)}
    if not ns.check:
        out["words"] = [w.to_json() for w in words]
        _emit_json(config, out)
        return EXIT_OK
    xs = sample_interior_points(s, ns.samples or SAMPLE_DEFAULTS["words"], seed=config.seed,
                                tol=config.tol("boundary"))
    check = check_word_images(s, words, xs)
    displacement = [word_displacement(s, w, xs) for w in words if len(w)]
    out.update({
        "points": check.points,
        "checked_words": check.words,
        "violations": check.violations,
        "min_margin": check.min_margin,
        "min_displacement": min(displacement) if displacement else None,
        "predicted": [{"word": w.to_json(), "region": "%s_%d" % word_image_region(s, w)[::-1]}
                      for w in words if len(w)],
    })
    _emit_json(config, out)
    return EXIT_WITNESS if check.violations else EXIT_OK


def cmd_limit_set(config: RunConfig, ns) -> int:
    gm = _load_map(_need_input(ns), ns.gen)
    gap, ftol = config.tol("cluster_gap"), config.tol("finite_order")
    order = finite_order(gm, tol=ftol, gap=gap)
    if order is not None:
        _emit_json(config, {"finite_order": order, "limit_set": None})
        return EXIT_WITNESS
    dec = modulus_decomposition(gm, gap)
    limit = limit_set(gm, gap=gap, tol=ftol)
    out = {
        "n": gm.ambient_dim,
        "decomposition": dec.to_json(),
        "reassembly_error": dec.reassembly_error(),
        "limit_set": [{"r": float(p.r), "subspace": L.to_json()} for p, L in zip(dec.parts, limit)],
    }
    _emit_json(config, out)
    return EXIT_OK


def cmd_decay(config: RunConfig, ns) -> int:
    path = _need_input(ns)
    data = _read(path)
    m_max = ns.mmax or MMAX_DEFAULTS["decay"]
    if isinstance(data, dict) and "t" in data:
        # explicit decay instance {"t": matrix, "lam": [re, im], "l": int, "v": vector}
        missing = {"t", "lam", "l", "v"} - set(data)
        if missing:
            raise ParseError(f"decay spec misses keys {sorted(missing)}")
        table = verify_decay(matrix_from_json(data["t"]), complex_from_json(data["lam"]), int(data["l"]),
                             vector_from_json(data["v"]), m_max, threshold=config.tol("decay"))
        _emit_csv(config, ["m", "norm", "distance_to_span"], table.rows())
        log.info("decay: first below %g at m = %s", table.threshold, table.first_below)
        return EXIT_OK if table.first_below is not None else EXIT_WITNESS
    gm = _load_map(path, ns.gen)
    x = random_unit_vectors(np.random.default_rng(config.seed), gm.ambient_dim + 1, 1)[0]
    diag = normalized_orbit(gm, ProjPoint(x), m_max, gap=config.tol("cluster_gap"))
    _emit_csv(config, ["m", "norm", "distance_to_span"], diag.rows())
    return EXIT_OK


def cmd_obstruct(config: RunConfig, ns) -> int:
    s = _load_group(_need_input(ns))
    report = contradiction_harness(s, samples=ns.samples or SAMPLE_DEFAULTS["obstruct"], seed=config.seed,
                                   depth=ns.depth)
    _emit_json(config, report.to_json())
    log.info("obstruct: %s", report.verdict)
    return EXIT_WITNESS if report.has_witness else EXIT_OK


HANDLERS = {
    "build-nori": cmd_build_nori,
    "verify": cmd_verify,
    "orbit": cmd_orbit,
    "words": cmd_words,
    "limit-set": cmd_limit_set,
    "decay": cmd_decay,
    "obstruct": cmd_obstruct,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the exit status instead of exiting."""
    try:
        config, ns = parse_args(argv)
    except SchottkyError as exc:
        print(f"schottky: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return HANDLERS[config.command](config, ns)
    except FiniteOrder as exc:
        print(f"schottky: finite order map: {exc}", file=sys.stderr)
        return EXIT_WITNESS
    except (SchottkyError, OSError, KeyError, TypeError) as exc:
        print(f"schottky: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
