"""Command line front end.

Exit codes: 0 success, 1 a verification failed (or a sampler run did not
converge), 2 bad usage or unreadable input.  Every stochastic command
takes an explicit seed and its output depends on nothing else.
"""

from __future__ import annotations

import argparse
import random
import re
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import analysis, avoider, family as fam, grid as gridmod, lll, scaffold


class UsageError(Exception):
    pass


def _lengths(text: str) -> list[int]:
    """``"8..12"`` (inclusive) or ``"16,32,64"``."""
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(a, b + 1))
    try:
        out = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad length list {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty length list")
    return out


def _ints(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_bits(path: str) -> str:
    text = "".join(Path(path).read_text().split())
    if set(text) - {"0", "1"}:
        raise UsageError(f"{path}: expected only 0/1 characters")
    return text


def _read_rows(path: str) -> list[str]:
    rows = Path(path).read_text().split()
    if rows and rows[0].startswith("d="):
        _, g = gridmod.parse_grid(Path(path).read_text())
        return ["".join(map(str, r)) for r in g.reshape(-1, g.shape[-1])]
    return rows


def _random_bits(seed: int, count: int) -> str:
    if count == 0:
        return ""
    return format(random.Random(seed).getrandbits(count), f"0{count}b")


def _source(spec: str, count: int) -> str:
    """``random:<seed>`` or a file of 0/1 characters; ``count`` bits are needed."""
    if spec.startswith("random:"):
        try:
            seed = int(spec[len("random:"):])
        except ValueError:
            raise UsageError(f"--source: bad seed in {spec!r}") from None
        return _random_bits(seed, count)
    bits = _read_bits(spec)
    if len(bits) < count:
        raise UsageError(f"--source: {spec} has {len(bits)} bits, {count} needed")
    return bits


def _ladder(text: str) -> scaffold.PeriodLadder:
    try:
        return scaffold.PeriodLadder.parse(text)
    except scaffold.LadderError as exc:
        raise UsageError(f"--ladder: {exc}") from None


def _grid_ladder(text: str, d: int) -> gridmod.GridLadder:
    try:
        return gridmod.GridLadder(tuple(_ints(text)), d)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise UsageError(f"--ladder: {exc}") from None


# -- commands ---------------------------------------------------------------

def cmd_plan(args) -> int:
    plan = lll.make_grid_plan(args.alpha, args.dim, args.ceiling)
    _emit(lll.plan_text(plan), args.out)
    return 0


def cmd_forbidden_gen(args) -> int:
    if args.mode == "random":
        if args.seed is None:
            raise UsageError("--seed is required for --mode random")
        family = fam.gen_random_family(args.alpha, args.lengths, args.seed, args.dim)
    else:
        if args.dim != 1:
            raise UsageError("--mode lz supports --dim 1 only")
        family = fam.gen_lz_family(args.alpha, args.lengths)
    _emit(fam.write_family(family), args.out)
    return 0


def _stats_text(family, config, trace, grid: bool) -> str:
    min_len = avoider._resolve_min_len(family, config)
    lines = [
        f"seed={config.seed}",
        f"N={config.N}",
        f"grid={str(grid).lower()}",
        f"min_len={min_len}",
        f"selection={config.selection}",
        f"max_rounds={config.max_rounds}",
    ]
    lines += [f"{k}={v}" for k, v in trace.stats().items()]
    return "\n".join(lines) + "\n"


def _sample_one(family, args, seed):
    config = avoider.SamplerConfig(args.n, seed, args.min_len, args.selection, args.max_rounds)
    if args.grid:
        trace = avoider.resample_grid(family, config)
        body = "".join(row + "\n" for row in trace.result)
    else:
        trace = avoider.resample_run(family, config)
        body = trace.result + "\n"
    return body, _stats_text(family, config, trace, args.grid), trace.converged


def _sample_job(payload):
    family_text, args, seed = payload
    return _sample_one(fam.parse_family(family_text), args, seed)


def cmd_sample(args) -> int:
    family = fam.read_family(args.family)
    if args.grid and family.dim != 2:
        raise UsageError("--grid needs a family with dim=2")
    if not args.grid and family.dim != 1:
        raise UsageError(f"family has dim={family.dim}; pass --grid")
    if args.seeds is None:
        if args.seed is None:
            raise UsageError("--seed is required")
        body, stats, ok = _sample_one(family, args, args.seed)
        _emit(body, args.out)
        if args.stats_out:
            Path(args.stats_out).write_text(stats)
        return 0 if ok else 1

    if not args.out:
        raise UsageError("--seeds needs --out DIR")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    payloads = [(fam.write_family(family), args, s) for s in args.seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_sample_job, payloads))
    else:
        results = [_sample_one(family, args, s) for s in args.seeds]
    ok_all = True
    for seed, (body, stats, ok) in zip(args.seeds, results):
        (outdir / f"seed-{seed}.txt").write_text(body)
        (outdir / f"seed-{seed}.stats").write_text(stats)
        ok_all &= ok
    return 0 if ok_all else 1


def cmd_scaffold(args) -> int:
    ladder = _ladder(args.ladder)
    bits = _source(args.source, scaffold.fresh_count(ladder, args.n))
    _emit(scaffold.build_sequence(bits, ladder, args.n) + "\n", args.out)
    return 0


def cmd_grid(args) -> int:
    ladder = _grid_ladder(args.ladder, args.d)
    try:
        region = gridmod._region(gridmod.parse_region(args.region), ladder.d)
    except ValueError as exc:
        raise UsageError(f"--region: {exc}") from None
    need = gridmod.required_source_length(ladder, region)
    g = gridmod.build_grid(_source(args.source, need), ladder, region)
    _emit(gridmod.write_grid(g, region), args.out)
    return 0


def cmd_verify_avoid(args) -> int:
    family = fam.read_family(args.family)
    x = _read_rows(args.input) if family.dim == 2 else _read_bits(args.input)
    res = analysis.verify_avoidance(x, family, args.min_len)
    if res.ok:
        print("ok")
        return 0
    if family.dim == 2:
        r, c, s = res.counterexample
        print(f"violation: row={r} col={c} side={s}")
    else:
        start, n = res.counterexample
        print(f"violation: start={start} length={n} word={x[start:start + n]}")
    return 1


def cmd_verify_ladder(args) -> int:
    ladder = _ladder(args.ladder)
    omega = _read_bits(args.input)
    levels = [args.s] if args.s is not None else range(ladder.depth - 1)
    for s in levels:
        bad = analysis.ladder_periodicity_violation(omega, ladder, s)
        if bad is not None:
            print(f"mismatch: level s={s} position={bad}")
            return 1
    print("ok")
    return 0


def cmd_verify_ap(args) -> int:
    """Every length-m pattern of the input lies inside every window of length k."""
    omega = _read_bits(args.input)
    m, k = args.pattern_len, args.window
    if not 0 < m <= k <= len(omega):
        raise UsageError("need 0 < --pattern-len <= --window <= input length")
    for x in sorted({omega[i:i + m] for i in range(len(omega) - m + 1)}):
        occ = analysis.recurrence_gap(omega, x).occurrences
        # runs of start positions with no occurrence; a window misses x
        # exactly when it contains k - m + 1 of them in a row
        free = [occ[0]] + [b - a - 1 for a, b in zip(occ, occ[1:])] + [len(omega) - m - occ[-1]]
        if max(free) > k - m:
            print(f"pattern {x} missing from some window of length {k}")
            return 1
    print("ok")
    return 0


def cmd_decompose(args) -> int:
    if (args.window is None) == (args.cube is None):
        raise UsageError("give exactly one of --window m,k or --cube m1,...,md,k")
    if args.window is not None:
        if len(args.window) != 2:
            raise UsageError("--window takes m,k")
        m, k = args.window
        dec = scaffold.decompose_window(m, k, _ladder(args.ladder))
        lines = [f"window={m}..{m + k}"]
        fmt = str
    else:
        *origin, k = args.cube
        ladder = _grid_ladder(args.ladder, len(origin))
        dec = gridmod.decompose_cube(origin, k, ladder)
        lines = ["cube=" + "x".join(f"{a}..{a + k}" for a in origin), f"s_bound={dec.s_bound}"]
        fmt = lambda p: ",".join(map(str, p))
    lines += [
        f"cutoff={dec.cutoff}",
        f"small_rank_count={dec.small_rank_count}",
        f"density_bound={dec.density_bound}",
        f"density_ok={str(dec.density_ok).lower()}",
        f"s={dec.s}",
        f"L_total={dec.total_length}",
    ]
    for (a, b), p, q in zip(dec.intervals, dec.starts, dec.ends):
        lines.append(f"interval {a} {b} first_at={fmt(p)} last_at={fmt(q)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_stats_complexity(args) -> int:
    omega = _read_bits(args.input)
    _emit(analysis.profile_csv(analysis.complexity_profile(omega, args.lengths)), args.out)
    return 0


def cmd_stats_recurrence(args) -> int:
    omega = _read_bits(args.input)
    if args.patterns:
        pats = [p for p in args.patterns.split(",") if p]
    elif args.pattern_len:
        m = args.pattern_len
        pats = sorted({omega[i:i + m] for i in range(len(omega) - m + 1)})
    else:
        raise UsageError("give --patterns or --pattern-len")
    _emit(analysis.recurrence_csv([analysis.recurrence_gap(omega, p) for p in pats]), args.out)
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forbidden-ap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp):
        sp.add_argument("-o", "--out", help="output file (default stdout)")

    sp = sub.add_parser("plan", help="certified local-lemma plan for alpha")
    sp.add_argument("--alpha", required=True, type=fam.as_alpha)
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--ceiling", type=int, default=lll.DEFAULT_L_CEILING)
    out(sp)
    sp.set_defaults(func=cmd_plan)

    forb = sub.add_parser("forbidden", help="forbidden families").add_subparsers(
        dest="action", required=True)
    sp = forb.add_parser("gen", help="generate a family file")
    sp.add_argument("--alpha", required=True, type=fam.as_alpha)
    sp.add_argument("--lengths", required=True, type=_lengths)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--mode", choices=("random", "lz"), default="random")
    sp.add_argument("--dim", type=int, default=1)
    out(sp)
    sp.set_defaults(func=cmd_forbidden_gen)

    sp = sub.add_parser("sample", help="resample until no forbidden word remains")
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", required=True, type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--seeds", type=_lengths, help="batch mode: a..b or list; --out is a directory")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--min-len", type=int)
    sp.add_argument("--max-rounds", type=int, default=1_000_000)
    sp.add_argument("--selection", choices=("leftmost", "random"), default="leftmost")
    sp.add_argument("--grid", action="store_true")
    sp.add_argument("--stats-out")
    out(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("scaffold", help="almost periodic sequence from a source")
    sp.add_argument("--ladder", required=True)
    sp.add_argument("--source", required=True, help="FILE or random:<seed>")
    sp.add_argument("--n", required=True, type=int)
    out(sp)
    sp.set_defaults(func=cmd_scaffold)

    sp = sub.add_parser("grid", help="d-dimensional configuration over a region")
    sp.add_argument("--ladder", required=True)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--region", required=True, help="lo..hi per axis joined by x, hi exclusive")
    sp.add_argument("--source", required=True, help="FILE or random:<seed>")
    out(sp)
    sp.set_defaults(func=cmd_grid)

    ver = sub.add_parser("verify", help="checks whose verdict is the exit code").add_subparsers(
        dest="check", required=True)
    sp = ver.add_parser("avoid")
    sp.add_argument("--family", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--min-len", type=int, default=1)
    sp.set_defaults(func=cmd_verify_avoid)
    sp = ver.add_parser("ladder")
    sp.add_argument("--ladder", required=True)
    sp.add_argument("--input", required=True)
    sp.add_argument("--s", type=int, help="single level (default: all)")
    sp.set_defaults(func=cmd_verify_ladder)
    sp = ver.add_parser("ap")
    sp.add_argument("--input", required=True)
    sp.add_argument("--pattern-len", required=True, type=int)
    sp.add_argument("--window", required=True, type=int)
    sp.set_defaults(func=cmd_verify_ap)

    sp = sub.add_parser("decompose", help="source intervals of a window or cube")
    sp.add_argument("--ladder", required=True)
    sp.add_argument("--window", type=_ints, help="m,k")
    sp.add_argument("--cube", type=_ints, help="m1,...,md,k")
    out(sp)
    sp.set_defaults(func=cmd_decompose)

    st = sub.add_parser("stats", help="empirical diagnostics as CSV").add_subparsers(
        dest="report", required=True)
    sp = st.add_parser("complexity")
    sp.add_argument("--input", required=True)
    sp.add_argument("--lengths", required=True, type=_lengths)
    out(sp)
    sp.set_defaults(func=cmd_stats_complexity)
    sp = st.add_parser("recurrence")
    sp.add_argument("--input", required=True)
    sp.add_argument("--patterns")
    sp.add_argument("--pattern-len", type=int)
    out(sp)
    sp.set_defaults(func=cmd_stats_recurrence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, OSError, lll.PlanSearchError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
