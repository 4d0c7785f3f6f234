"""Command-line front end.

Exit codes: 0 accept, 2 reject, 3 no feasible hypothesis, 4 per-string
assignment not one-to-one (unconstrained tests), 1 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .decision import (known_source_test, unconstrained_known_test, unconstrained_unknown_test,
                       unknown_source_test, Mode)
from .exponents import bernoulli_pair, c_star, c_uc_star, rejection_exponents
from .io import csv_text, file_sha256, read_distributions, read_key_values, read_sequences
from .model import (Alphabet, DecisionOutcome, InfeasibleError, KnownInstance, Matching,
                    SeqMatchError, InputError, UnknownInstance, Verdict)
from .simulate import SimPlan, TestSelector, compare_tests, run_plan

EXIT_ACCEPT, EXIT_ERROR, EXIT_REJECT, EXIT_INFEASIBLE, EXIT_NON_INJECTIVE = 0, 1, 2, 3, 4
VERDICT_EXIT = {Verdict.ACCEPT: EXIT_ACCEPT, Verdict.REJECT: EXIT_REJECT,
                Verdict.NON_INJECTIVE: EXIT_NON_INJECTIVE}
PLAN_KEYS = ("seed", "lambda", "trials", "n_grid", "mode", "constrained", "rho", "sources",
             "outsiders", "k")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: {message}")


class _UsageError(Exception):
    pass


def _manifest(command: str, inputs: dict[str, Path], config: dict, seed) -> list[str]:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    lines = [f"seqmatch {__version__}", f"subcommand: {command}"]
    for name, path in sorted(inputs.items()):
        lines.append(f"input {name}: {Path(path).resolve()} sha256={file_sha256(path)}")
    lines.append(f"config-sha256: {hashlib.sha256(blob.encode()).hexdigest()}")
    lines.append(f"seed: {seed if seed is not None else 'none'}")
    return lines


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid(spec: str) -> list[float]:
    """Inclusive grid from ``a:b:step``."""
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise InputError(f"grid {spec!r} is not of the form a:b:step") from None
    if not (step > 0 and b >= a and all(map(math.isfinite, (a, b, step)))):
        raise InputError(f"grid {spec!r} needs a <= b and step > 0")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + k * step, 12) for k in range(count)]


def _report(command: str, inputs, config, outcome: DecisionOutcome) -> str:
    lines = [f"# {c}" for c in _manifest(command, inputs, config, None)]
    lines.append(f"verdict = {outcome.verdict.value}")
    edges = outcome.matching.edges if outcome.matching is not None else ()
    lines.append("matching = " + " ".join(f"{i}-{j}" for i, j in edges))
    if outcome.assignment is not None:
        lines.append("assignment = " + " ".join(str(i) for i in outcome.assignment))
    for key in ("best_weight", "second_weight", "threshold"):
        lines.append(f"{key} = {format(getattr(outcome, key), '.9g')}")
    return "\n".join(lines) + "\n"


def cmd_match_known(args) -> int:
    sources = read_distributions(args.sources)
    size = args.alphabet_size if args.alphabet_size is not None else sources[0].size
    if size != sources[0].size:
        raise InputError(f"--alphabet-size {size} disagrees with the sources ({sources[0].size})")
    seqs = read_sequences(args.sequences, Alphabet(size))
    inst = KnownInstance(sources, seqs, args.k, unequal_lengths=args.unequal_lengths)
    config = {"k": args.k, "lambda": args.lam, "unconstrained": args.unconstrained,
              "unequal_lengths": args.unequal_lengths, "alphabet_size": size}
    try:
        outcome = unconstrained_known_test(inst, args.lam) if args.unconstrained else \
            known_source_test(inst, args.lam)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    inputs = {"sources": args.sources, "sequences": args.sequences}
    _emit(_report("match-known", inputs, config, outcome), args.output)
    return VERDICT_EXIT[outcome.verdict]


def cmd_match_unknown(args) -> int:
    alphabet = Alphabet(args.alphabet_size) if args.alphabet_size is not None else None
    train = read_sequences(args.train, alphabet)
    seqs = read_sequences(args.sequences, alphabet)
    inst = UnknownInstance(train, seqs, args.k, alphabet=alphabet,
                           unequal_lengths=args.unequal_lengths)
    config = {"k": args.k, "lambda": args.lam, "unconstrained": args.unconstrained,
              "unequal_lengths": args.unequal_lengths, "alphabet_size": inst.alphabet.size}
    try:
        outcome = unconstrained_unknown_test(inst, args.lam) if args.unconstrained else \
            unknown_source_test(inst, args.lam)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    inputs = {"train": args.train, "sequences": args.sequences}
    _emit(_report("match-unknown", inputs, config, outcome), args.output)
    return VERDICT_EXIT[outcome.verdict]


def cmd_exponents(args) -> int:
    header = ["parameter", "c_star", "c_uc_star", "rej_exp_constrained", "rej_exp_unconstrained"]
    rows = []
    inputs = {}
    if args.bernoulli_rho_grid is not None:
        config = {"rho_grid": args.bernoulli_rho_grid, "lambda": args.lam}
        for rho in _grid(args.bernoulli_rho_grid):
            rows.append(_exponent_row(rho, bernoulli_pair(rho), args.lam))
    else:
        mus = read_distributions(args.sources)
        inputs["sources"] = args.sources
        config = {"lambda_grid": args.lambda_grid, "lambda": args.lam}
        lams = _grid(args.lambda_grid) if args.lambda_grid is not None else [args.lam]
        for lam in lams:
            rows.append(_exponent_row(math.nan if lam is None else lam, mus, lam))
    comments = _manifest("exponents", inputs, config, None)
    _emit(csv_text(header, rows, comments), args.output)
    return 0


def _exponent_row(param: float, mus, lam: float | None) -> list:
    if lam is None:
        return [param, c_star(mus), c_uc_star(mus), math.nan, math.nan]
    rep = rejection_exponents(mus, lam)
    return [param, rep.c_star, rep.c_uc_star, rep.rejection_constrained,
            rep.rejection_unconstrained]


def _bool(text: str) -> bool | str:
    low = text.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    if low in ("both", "compare"):
        return "both"
    raise InputError(f"expected true, false or both, got {text!r}")


def _plan_settings(args) -> tuple[dict, dict[str, Path]]:
    """Merge the plan file (if any) with inline flags; flags win."""
    flags = {"seed": args.seed, "lambda": args.lam, "trials": args.trials, "n_grid": args.n_grid,
             "mode": args.mode, "constrained": args.constrained, "rho": args.rho,
             "sources": args.sources, "outsiders": args.outsiders, "k": args.k}
    settings: dict = dict.fromkeys(PLAN_KEYS)
    inputs: dict[str, Path] = {}
    base = Path(".")
    if args.plan:
        inputs["plan"] = Path(args.plan)
        base = Path(args.plan).parent
        settings.update(read_key_values(args.plan, PLAN_KEYS))
    settings.update({k: v for k, v in flags.items() if v is not None})
    parsed = {}
    for key, raw in settings.items():
        where = ""
        if isinstance(raw, tuple):
            lineno, raw = raw
            where = f"{args.plan}:{lineno}: "
        if raw is None:
            parsed[key] = None
            continue
        try:
            parsed[key] = _plan_value(key, raw, base if where else Path("."))
        except (ValueError, InputError) as exc:
            raise InputError(f"{where}{key}: {exc}") from None
    if parsed["seed"] is None:
        env = os.environ.get("SEQMATCH_SEED")
        parsed["seed"] = int(env) if env is not None else 0
    for key in ("sources", "outsiders"):
        if parsed[key] is not None:
            inputs[key] = parsed[key]
    return parsed, inputs


def _plan_value(key: str, raw, base: Path):
    if not isinstance(raw, str):
        return raw
    if key in ("seed", "trials", "k"):
        return int(raw)
    if key in ("lambda", "rho"):
        return float(raw)
    if key == "n_grid":
        return [int(x) for x in raw.replace(",", " ").split()]
    if key == "mode":
        return Mode(raw.strip().lower())
    if key == "constrained":
        return _bool(raw)
    return base / raw


def cmd_simulate(args) -> int:
    s, inputs = _plan_settings(args)
    for key in ("lambda", "trials", "n_grid"):
        if s[key] is None:
            raise InputError(f"simulation needs {key}")
    if (s["rho"] is None) == (s["sources"] is None):
        raise InputError("give exactly one of rho or sources")
    mus = bernoulli_pair(s["rho"]) if s["rho"] is not None else read_distributions(s["sources"])
    outsiders = read_distributions(s["outsiders"]) if s["outsiders"] is not None else []
    k = s["k"] if s["k"] is not None else len(mus)
    mode = s["mode"] or Mode.KNOWN
    constrained = True if s["constrained"] is None else s["constrained"]
    truth = Matching.identity(k, len(mus), k + len(outsiders))
    plan = SimPlan(mus, truth, s["n_grid"], s["trials"], s["lambda"], s["seed"],
                   TestSelector(mode, constrained is not False), outsiders)
    if constrained == "both":
        comp = compare_tests(plan, threads=args.threads)
        reports = [comp.constrained, comp.unconstrained]
        notes = [f"rejection gap n={n}: {format(comp.rejection_gap(n), '.9g')} "
                 f"z={format(comp.z_score(n), '.9g')}" for n in plan.n_grid]
    else:
        reports = [run_plan(plan, threads=args.threads)]
        notes = []
    config = {"seed": s["seed"], "lambda": s["lambda"], "trials": s["trials"], "n_grid": s["n_grid"],
              "mode": mode.value, "constrained": constrained, "rho": s["rho"], "k": k}
    comments = _manifest("simulate", inputs, config, s["seed"]) + notes
    rows = []
    for rep in reports:
        for r in rep.rows:
            rows.append([r.n, rep.test, r.error_rate, r.rejection_rate, r.correct_rate,
                         rep.fitted_exponent])
    header = ["n", "test", "error_rate", "rejection_rate", "correct_rate", "fitted_exponent"]
    _emit(csv_text(header, rows, comments), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="seqmatch", description="Match sequences to sources with a no-match option.")
    p.add_argument("--version", action="version", version=f"seqmatch {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--sequences", required=True, type=Path)
        sp.add_argument("--k", required=True, type=int)
        sp.add_argument("--lambda", dest="lam", required=True, type=float)
        sp.add_argument("--unconstrained", action="store_true")
        sp.add_argument("--unequal-lengths", action="store_true")
        sp.add_argument("--alphabet-size", type=int)
        sp.add_argument("--output")

    mk = sub.add_parser("match-known", help="match strings to known distributions")
    mk.add_argument("--sources", required=True, type=Path)
    common(mk)
    mk.set_defaults(func=cmd_match_known)

    mu = sub.add_parser("match-unknown", help="match strings to training strings")
    mu.add_argument("--train", required=True, type=Path)
    common(mu)
    mu.set_defaults(func=cmd_match_unknown)

    ex = sub.add_parser("exponents", help="Chernoff minima and rejection exponents")
    src = ex.add_mutually_exclusive_group(required=True)
    src.add_argument("--sources", type=Path)
    src.add_argument("--bernoulli-rho-grid")
    ex.add_argument("--lambda-grid")
    ex.add_argument("--lambda", dest="lam", type=float)
    ex.add_argument("--output")
    ex.set_defaults(func=cmd_exponents)

    sm = sub.add_parser("simulate", help="Monte Carlo error and rejection rates")
    sm.add_argument("--plan", type=Path)
    sm.add_argument("--seed", type=int)
    sm.add_argument("--lambda", dest="lam", type=float)
    sm.add_argument("--trials", type=int)
    sm.add_argument("--n-grid")
    sm.add_argument("--mode", choices=[m.value for m in Mode])
    sm.add_argument("--constrained", choices=["true", "false", "both"])
    sm.add_argument("--rho", type=float)
    sm.add_argument("--sources", type=Path)
    sm.add_argument("--outsiders", type=Path)
    sm.add_argument("--k", type=int)
    sm.add_argument("--threads", type=int, default=1)
    sm.add_argument("--output")
    sm.set_defaults(func=cmd_simulate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)
    if getattr(args, "lambda_grid", None) is not None and args.sources is None:
        print("seqmatch exponents: --lambda-grid needs --sources", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (SeqMatchError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
