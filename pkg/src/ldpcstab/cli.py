"""Command-line experiment runner.

Configs are flat ``key = value`` files, one experiment each.  Keys:

    command        tables | derivatives | thresholds | explore | mapdec
    sequence_kind  poisson | right_regular        (derivatives)
    eps            design parameter of the sequence (derivatives)
    N_list         comma-separated N values          (tables, derivatives)
    x_points       number of x grid points on [0, 1] (derivatives)
    pair           cycle | regular:dv,dc | poisson:N,eps | right_regular:N,eps
    channel        KIND:param, e.g. BEC:0.8 or BSC:0.1 (explore, mapdec)
    family         BEC | BSC | BAWGNC                 (thresholds)
    n              blocklength                        (explore)
    l              steps per stage                    (explore; default from choose_l)
    eps_frac       explored check half-edge budget / n (explore)
    a              exponent for the subcritical K > n^a test (explore; omit for supercritical)
    runs           number of runs                     (explore)
    direct         1 to decide the cycle event on a sampled graph too (explore)
    graph          example1 | example2                (mapdec)
    p_list         comma-separated BSC crossovers     (mapdec)
    seed           64-bit master seed

Run i draws its randomness from ``SeedSequence(seed, spawn_key=(i,))``, so
results do not depend on ``--threads``.  Every CSV starts with a
``# config-hash: <sha256>`` comment followed by the header row.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import sys
from dataclasses import dataclass, field

import numpy as np

from .degseq import (DegreePair, ValidationError, cycle_pair, heavy_tail_poisson, regular_pair,
                     right_regular)
from .tanner import GuardExceeded

COMMANDS = ("tables", "derivatives", "thresholds", "explore", "mapdec")
TABLE_N = (2 ** 7, 2 ** 9, 2 ** 11, 2 ** 15, 2 ** 19)
TABLE_EPS = (0.3, 0.5, 0.7)
EXIT_OK, EXIT_VALIDATION, EXIT_GUARD = 0, 2, 3

_FIELDS = ("command", "sequence_kind", "eps", "N_list", "channel", "n", "seed", "runs", "out")


@dataclass
class ExperimentConfig:
    command: str
    sequence_kind: str = "poisson"
    eps: float = 0.5
    N_list: tuple = TABLE_N
    channel: str = "BEC:0.5"
    n: int = 1024
    seed: int = 0
    runs: int = 100
    out: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"command must be one of {COMMANDS}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        if int(self.runs) < 0 or int(self.n) < 1:
            raise ValidationError("runs must be >= 0 and n >= 1")

    def get(self, key, default=None):
        return self.extra.get(key, default)

    def to_text(self) -> str:
        items = [("command", self.command), ("sequence_kind", self.sequence_kind),
                 ("eps", repr(float(self.eps))), ("N_list", ",".join(map(str, self.N_list))),
                 ("channel", self.channel), ("n", str(self.n)), ("seed", str(self.seed)),
                 ("runs", str(self.runs)), ("out", self.out)]
        items += sorted(self.extra.items())
        return "".join(f"{k} = {v}\n" for k, v in items)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        kv = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"config line without '=': {raw!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            if k in kv:
                raise ValidationError(f"duplicate config key {k!r}")
            kv[k] = v
        if "command" not in kv:
            raise ValidationError("config needs a command")
        base = {}
        try:
            for k in _FIELDS:
                if k not in kv:
                    continue
                v = kv.pop(k)
                if k == "eps":
                    base[k] = float(v)
                elif k in ("n", "seed", "runs"):
                    base[k] = int(v)
                elif k == "N_list":
                    base[k] = tuple(int(x) for x in v.split(",") if x.strip())
                else:
                    base[k] = v
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        return cls(**base, extra=kv)

    def hash(self) -> str:
        text = self.to_text().replace(f"out = {self.out}\n", "")
        return hashlib.sha256(text.encode()).hexdigest()


# parsing helpers -----------------------------------------------------------------------

def parse_pair(spec: str) -> DegreePair:
    kind, _, args = spec.partition(":")
    vals = [a for a in args.split(",") if a.strip()]
    try:
        if kind == "cycle":
            return cycle_pair()
        if kind == "regular":
            return regular_pair(int(vals[0]), int(vals[1]))
        if kind == "poisson":
            return heavy_tail_poisson(int(vals[0]), float(vals[1]))
        if kind == "right_regular":
            return right_regular(int(vals[0]), float(vals[1]))
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"bad pair spec {spec!r}: {exc}") from None
    raise ValidationError(f"unknown pair kind {kind!r}")


def parse_channel(spec: str):
    from .channel import Channel
    kind, _, param = spec.partition(":")
    try:
        return Channel(kind, float(param))
    except ValueError as exc:
        raise ValidationError(f"bad channel spec {spec!r}: {exc}") from None


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv(cfg: ExperimentConfig, header: list, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# config-hash: {cfg.hash()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([_fmt(x) for x in r] for r in rows)
    return buf.getvalue()


# commands -------------------------------------------------------------------------------

def cmd_tables(cfg: ExperimentConfig) -> str:
    """λ'(0) for both sequences at eps = 0.5 and the right-regular L₂ at eps 0.3/0.5/0.7."""
    rows = []
    for N in cfg.N_list:
        rows.append(("lambda_prime0", "right_regular", N, 0.5, right_regular(N, 0.5).lambda_prime0))
        rows.append(("lambda_prime0", "poisson", N, 0.5, heavy_tail_poisson(N, 0.5).lambda_prime0))
    for N in cfg.N_list:
        for e in TABLE_EPS:
            rows.append(("L2", "right_regular", N, e, right_regular(N, e).L2))
    return _csv(cfg, ["quantity", "sequence", "N", "eps", "value"], rows)


def cmd_derivatives(cfg: ExperimentConfig) -> str:
    from .universal import f, f_double_prime, f_prime
    x = np.linspace(0.0, 1.0, int(cfg.get("x_points", 101)))
    rows = []
    for N in cfg.N_list:
        cols = [np.atleast_1d(fn(cfg.sequence_kind, N, cfg.eps, x)) for fn in (f, f_prime, f_double_prime)]
        rows += [(cfg.sequence_kind, N, cfg.eps, xi, a, b, c) for xi, a, b, c in zip(x, *cols)]
    return _csv(cfg, ["sequence", "N", "eps", "x", "f", "f1", "f2"], rows)


def cmd_thresholds(cfg: ExperimentConfig) -> str:
    from .de import bp_threshold, stability_threshold
    pair = parse_pair(cfg.get("pair", "cycle"))
    fam = cfg.get("family", "BEC")
    tol = float(cfg.get("tol", 1e-4))
    bp = bp_threshold(fam, pair, tol=tol)
    fp = bp_threshold(fam, pair, method="fixed_point") if fam == "BEC" else None
    st = stability_threshold(fam, pair)
    return _csv(cfg, ["pair", "family", "bp_threshold_de", "bp_threshold_fixed_point", "stability_threshold"],
                [(cfg.get("pair", "cycle"), fam, bp, fp, st)])


def _explore_params(cfg: ExperimentConfig):
    from .universal import choose_l
    pair = parse_pair(cfg.get("pair", "cycle"))
    if pair.lam.size <= 2 or pair.lam[2] <= 0:
        raise ValidationError("pair has lambda_2 = 0; the exploration needs degree-two nodes")
    ch = parse_channel(cfg.channel)
    a = cfg.get("a")
    a = None if a in (None, "") else float(a)
    if "l" in cfg.extra:
        l = int(cfg.get("l"))
    elif a is not None:
        l = 1
    else:
        l = choose_l(ch, pair.mu)
    return pair, ch, l, float(cfg.get("eps_frac", 0.5)), a


def cmd_explore(cfg: ExperimentConfig, threads: int = 1) -> tuple[str, str]:
    """Per-run CSV plus a summary comparing empirical frequencies with the bounds."""
    from .explore import binomial_sigma, run_batch, subcritical_bound
    pair, ch, l, eps_frac, a = _explore_params(cfg)
    direct = cfg.get("direct", "0") == "1"
    res = run_batch(pair, ch, cfg.n, l, eps_frac, cfg.runs, cfg.seed, a=a, direct=direct,
                    threads=threads)
    header = ["run", "K", "stages", "restarts", "A_final", "explored_check_halfedges", "K_exceeds_n_a",
              "cycle_event", "landed_active", "direct_event"]
    rows = [(r.run, r.K, r.stages, r.restarts, r.a_final, r.explored, r.exceeded, r.cycle_event,
             r.landed_active, r.direct_event) for r in res]
    lines = [f"runs={cfg.runs} n={cfg.n} l={l} eps_frac={eps_frac} seed={cfg.seed}"]
    if res:
        R = len(res)
        if a is not None:
            pk = sum(r.exceeded for r in res) / R
            gamma = (ch.error_prob_power(l) ** (1 / l)) * pair.mu
            d = pair.max_check_degree - 1
            if 0 < gamma < 1:
                b = subcritical_bound(cfg.n, a, l, gamma, 1 - gamma ** l, d)
                lines.append(f"P(K > n^a) = {pk:.4f} (sigma {binomial_sigma(pk, R):.4f}); bound {b:.4f}")
            else:
                lines.append(f"P(K > n^a) = {pk:.4f}; gamma = {gamma:.4f} is not subcritical")
        else:
            pc = sum(r.cycle_event for r in res) / R
            lines.append(f"P(cycle event via exploration) = {pc:.4f} (sigma {binomial_sigma(pc, R):.4f})")
            if direct:
                pd = sum(r.direct_event for r in res) / R
                lines.append(f"P(C_v) on sampled graphs = {pd:.4f} (sigma {binomial_sigma(pd, R):.4f})")
    return _csv(cfg, header, rows), "\n".join(lines) + "\n"


def cmd_mapdec(cfg: ExperimentConfig) -> str:
    from .mapdec import bit_error_lower_bound, exact_bitwise_error
    from .channel import Channel
    from .tanner import example_graph
    which = cfg.get("graph", "example1")
    if which not in ("example1", "example2"):
        raise ValidationError("graph must be example1 or example2")
    G = example_graph(1 if which == "example1" else 2)
    code = G.to_code()
    v = int(cfg.get("v", 0))
    rows = []
    for p in _floats(cfg.get("p_list", "0.05,0.1,0.2")):
        b = bit_error_lower_bound(code, G, v, Channel("BSC", p), sum_bound=float(cfg.get("sum_bound", 1)))
        rows.append((which, v, p, b.bound, exact_bitwise_error(code, p, v), b.pattern_mass,
                     b.realization_mass, b.matched_fraction, b.matching_size, b.l))
    return _csv(cfg, ["graph", "v", "p", "lower_bound", "exact_pb", "pattern_mass", "realization_mass",
                      "matched_fraction", "matching_size", "l"], rows)


def run(cfg: ExperimentConfig, threads: int = 1) -> tuple[str, str]:
    if cfg.command == "explore":
        return cmd_explore(cfg, threads)
    fn = {"tables": cmd_tables, "derivatives": cmd_derivatives, "thresholds": cmd_thresholds,
          "mapdec": cmd_mapdec}[cfg.command]
    return fn(cfg), ""


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpcstab", description="LDPC stability experiments")
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="experiment to run (overrides the config's command)")
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--out", help="CSV output path (default: stdout)")
    ap.add_argument("--seed", type=int, help="64-bit master seed")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for batched runs")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="extra config entries")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        lines = [text]
        if args.command:
            lines.append(f"command = {args.command}")
        if args.seed is not None:
            lines.append(f"seed = {args.seed}")
        if args.out:
            lines.append(f"out = {args.out}")
        # later assignments override earlier ones
        merged = {}
        for ln in "\n".join(lines + args.set).splitlines():
            body = ln.split("#", 1)[0].strip()
            if body:
                if "=" not in body:
                    raise ValidationError(f"config line without '=': {ln!r}")
                k, v = (s.strip() for s in body.split("=", 1))
                merged[k] = v
        cfg = ExperimentConfig.from_text("".join(f"{k} = {v}\n" for k, v in merged.items()))
        if args.threads < 1:
            raise ValidationError("--threads must be positive")
        csv_text, summary = run(cfg, args.threads)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if summary:
        sys.stderr.write(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
