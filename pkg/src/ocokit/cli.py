"""Experiment runner: run / compare / repro-l1 / verify subcommands.

Configuration is flat ``key = value`` text.  Output is CSV with floats
printed to 12 significant digits, so a fixed config and seed always
produces byte-identical output.  Exit codes: 0 success, 1 property or
bound violation, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .bounds import BoundRule
from .core import AdaGradRate, ConstantRate, FeasibleSet, InverseSqrtRate
from .driver import repro_l1_example, run_rounds
from .learners import (
    BoundConfig,
    DualAveraging,
    EntropicFtrl,
    FtrlCompositeL1,
    FtrlProximal,
    StronglyConvexOgd,
)
from .mirror import MirrorDescent
from .streams import (
    L1AdversaryStream,
    LogisticStream,
    RandomLinearStream,
    StronglyConvexQuadraticStream,
    load_svmlight,
)
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


_INT_KEYS = {"T", "seed", "n"}
_FLOAT_KEYS = {"R", "R_inf", "G", "G_inf", "lambda", "eta"}
_STR_KEYS = {"learner", "learners", "stream", "bound", "out", "data"}

_DEFAULTS = {
    "seed": 0,
    "n": 2,
    "R": 1.0,
    "R_inf": 1.0,
    "G": 1.0,
    "G_inf": 1.0,
    "lambda": 0.0,
}

LEARNERS = ("dual-averaging", "constant-ogd", "ftrl-proximal", "adagrad-ftrl-proximal",
            "ftrl-l1", "md-l1", "entropic", "ogd-strongly-convex")
STREAMS = ("random-linear", "random-linear-sup", "l1-adversary", "logistic",
           "strongly-convex")

# which guarantees can certify which learner
COMPAT = {
    "dual-averaging": {"da-closed-form", "general-ftrl"},
    "constant-ogd": {"non-adaptive", "general-ftrl"},
    "ftrl-proximal": {"prox-closed-form", "ftrl-proximal", "weak-proximal"},
    "adagrad-ftrl-proximal": {"adagrad-per-coord", "ftrl-proximal", "weak-proximal"},
    "ftrl-l1": {"composite"},
    "md-l1": {"mirror-descent"},
    "entropic": {"entropic", "general-ftrl"},
    "ogd-strongly-convex": {"strongly-convex-log"},
}


def parse_config(path: str) -> dict:
    cfg = dict(_DEFAULTS)
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as err:
        raise UsageError(f"cannot read config: {err}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _INT_KEYS:
            try:
                cfg[key] = int(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} must be an integer")
        elif key in _FLOAT_KEYS:
            try:
                cfg[key] = float(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} must be a number")
        elif key in _STR_KEYS:
            cfg[key] = value
        else:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
    return cfg


def _require(cfg, *keys):
    for key in keys:
        if key not in cfg:
            raise UsageError(f"config is missing required key {key!r}")


def build_stream(cfg):
    name = cfg["stream"]
    seed, n = cfg["seed"], cfg["n"]
    if name == "random-linear":
        return RandomLinearStream(seed, n, cfg["G"], "l2")
    if name == "random-linear-sup":
        return RandomLinearStream(seed, n, cfg["G_inf"], "sup")
    if name == "l1-adversary":
        if n != 1:
            raise UsageError("the l1-adversary stream is one-dimensional (set n = 1)")
        try:
            return L1AdversaryStream(cfg["G"], cfg["lambda"])
        except ValueError as err:
            raise UsageError(str(err))
    if name == "logistic":
        if "data" in cfg:
            try:
                with open(cfg["data"], encoding="utf-8") as fh:
                    examples, dim = load_svmlight(fh)
            except OSError as err:
                raise UsageError(f"cannot read data file: {err}")
            if dim > n:
                raise UsageError(f"data has {dim} features but n = {n}")
            return LogisticStream([(np.pad(a, (0, n - len(a))), y) for a, y in examples], n)
        _require(cfg, "T")
        return LogisticStream.synthetic(seed, n, cfg["T"])
    if name == "strongly-convex":
        return StronglyConvexQuadraticStream(seed, n, center_radius=cfg["R"])
    raise UsageError(f"unknown stream {cfg.get('stream')!r} (choose from {', '.join(STREAMS)})")


def build_learner(name, cfg):
    n = cfg["n"]
    R, G = cfg["R"], cfg["G"]
    eta = cfg.get("eta")
    if name == "dual-averaging":
        sched = ConstantRate(eta) if eta else InverseSqrtRate(R / (math.sqrt(2) * G), shift=1)
        return DualAveraging(n, sched)
    if name == "constant-ogd":
        if eta is None:
            _require(cfg, "T")
            eta = R / (G * math.sqrt(cfg["T"]))
            cfg["eta"] = eta
        return DualAveraging(n, ConstantRate(eta))
    if name == "ftrl-proximal":
        sched = ConstantRate(eta) if eta else InverseSqrtRate(math.sqrt(2) * R / G, shift=0)
        return FtrlProximal(n, sched, FeasibleSet.l2_ball(R))
    if name == "adagrad-ftrl-proximal":
        return FtrlProximal(n, AdaGradRate(math.sqrt(2) * cfg["R_inf"]),
                            FeasibleSet.box(cfg["R_inf"]))
    if name == "ftrl-l1":
        if eta is None:
            _require(cfg, "T")
            eta = R / (G * math.sqrt(cfg["T"]))
            cfg["eta"] = eta
        return FtrlCompositeL1(n, ConstantRate(eta), cfg["lambda"])
    if name == "md-l1":
        if eta is None:
            _require(cfg, "T")
            eta = R / (G * math.sqrt(cfg["T"]))
            cfg["eta"] = eta
        return MirrorDescent(n, ConstantRate(eta), lam=cfg["lambda"])
    if name == "entropic":
        if n < 2:
            raise UsageError("the entropic learner needs n >= 2")
        return EntropicFtrl(n, cfg["G_inf"])
    if name == "ogd-strongly-convex":
        return StronglyConvexOgd(n)
    raise UsageError(f"unknown learner {name!r} (choose from {', '.join(LEARNERS)})")


def _bound_rule(cfg) -> BoundRule:
    name = cfg["bound"]
    try:
        rule = BoundRule(name)
    except ValueError:
        known = ", ".join(r.value for r in BoundRule)
        raise UsageError(f"unknown bound {name!r} (choose from {known})")
    learner = cfg["learner"]
    if name not in COMPAT.get(learner, set()):
        allowed = ", ".join(sorted(COMPAT.get(learner, set())))
        raise UsageError(f"bound {name!r} does not certify learner {learner!r} "
                         f"(allowed: {allowed})")
    return rule


def _comparator_set(cfg, learner):
    if learner.feasible_set.kind != FeasibleSet.UNCONSTRAINED:
        return learner.feasible_set
    return FeasibleSet.l2_ball(cfg["R"])


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    _require(cfg, "learner", "stream", "T", "bound")
    if cfg["T"] < 0:
        raise UsageError("T must be >= 0")
    learner = build_learner(cfg["learner"], cfg)
    rule = _bound_rule(cfg)
    stream = build_stream(cfg)
    if getattr(stream, "dim", learner.dim) != learner.dim:
        raise UsageError("learner and stream dimensions differ")
    bc = BoundConfig(R=cfg["R"], R_inf=cfg["R_inf"], G=cfg["G"], G_inf=cfg["G_inf"],
                     n=cfg["n"], eta=cfg.get("eta"))
    if cfg["learner"] == "ogd-strongly-convex" and isinstance(stream, StronglyConvexQuadraticStream):
        bc.G = stream.gradient_cap
    result = run_rounds(learner, stream, cfg["T"], rule, bc, _comparator_set(cfg, learner))
    rec = result.record
    lines = ["round,loss,comp_loss,cum_regret,bound,decomposition"]
    for t in range(len(rec)):
        lines.append(",".join([str(t + 1), _fmt(rec.loss[t]), _fmt(rec.comp_loss[t]),
                               _fmt(rec.cum_regret[t]), _fmt(rec.bound[t]),
                               _fmt(rec.strong_ftrl_rhs[t])]))
    _emit(lines, args.out or cfg.get("out"))
    return EXIT_OK if result.bound_ok else EXIT_VIOLATION


def cmd_compare(args) -> int:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    _require(cfg, "learners", "stream", "T")
    names = [name.strip() for name in cfg["learners"].split(",") if name.strip()]
    if len(names) < 2:
        raise UsageError("compare needs at least two learners (learners = a, b)")
    T = cfg["T"]
    columns = {}
    for name in names:
        learner = build_learner(name, dict(cfg))
        stream = build_stream(dict(cfg))  # same seed: every learner sees the same draw
        losses, nonzeros = [], []
        for t in range(1, T + 1):
            event = stream.event(t, learner.x)
            losses.append(event.loss_at(learner.x))
            x_next = learner.step(event.g)
            nonzeros.append(int(np.count_nonzero(x_next)))
        columns[name] = (losses, np.cumsum(losses), nonzeros)
    header = ["round"]
    for name in names:
        header += [f"loss_{name}", f"cum_loss_{name}", f"nonzeros_{name}"]
    lines = [",".join(header)]
    for t in range(T):
        row = [str(t + 1)]
        for name in names:
            losses, cum, nz = columns[name]
            row += [_fmt(losses[t]), _fmt(cum[t]), str(nz[t])]
        lines.append(",".join(row))
    _emit(lines, args.out or cfg.get("out"))
    return EXIT_OK


def cmd_repro_l1(args) -> int:
    result = repro_l1_example()
    lines = ["t,x_md,x_ftrl"]
    for t, x_md, x_ftrl in result.rows:
        lines.append(f"{t},{_fmt(x_md)},{_fmt(x_ftrl)}")
    _emit(lines, args.out)
    if not result.ok:
        for msg in result.failures:
            print(f"repro-l1: {msg}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args) -> int:
    name = args.suite
    if name != "all" and name not in SUITES:
        known = ", ".join(sorted(SUITES) + ["all"])
        raise UsageError(f"unknown suite {name!r} (choose from {known})")
    result = run_suite(name)
    for line in result.lines:
        print(line)
    if not result.passed:
        for msg in result.failures:
            print(f"verify {name}: {msg}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocokit",
        description="Online convex optimization learners with a regret-bound "
                    "verification harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one learner/stream/bound experiment")
    run_p.add_argument("--config", required=True, help="key = value config file")
    run_p.add_argument("--out", help="write CSV here instead of stdout")
    run_p.add_argument("--seed", type=int, help="override the config seed")

    cmp_p = sub.add_parser("compare", help="run several learners on one stream")
    cmp_p.add_argument("--config", required=True)
    cmp_p.add_argument("--out", help="write CSV here instead of stdout")
    cmp_p.add_argument("--seed", type=int)

    rep_p = sub.add_parser("repro-l1", help="reproduce the 1-D L1 oscillation example")
    rep_p.add_argument("--out", help="write CSV here instead of stdout")

    ver_p = sub.add_parser("verify", help="run a named property suite")
    ver_p.add_argument("suite", help="suite name, or 'all'")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    handlers = {"run": cmd_run, "compare": cmd_compare,
                "repro-l1": cmd_repro_l1, "verify": cmd_verify}
    try:
        return handlers[args.command](args)
    except UsageError as err:
        print(f"ocokit: {err}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
