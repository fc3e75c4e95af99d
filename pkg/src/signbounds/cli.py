"""Command-line front end: subset bounds and discoveries from a CSV of
p-values/z-statistics/survival pairs, the shortcut-versus-brute-force
oracle check, and the Monte-Carlo simulation presets.

Exit codes: 0 success, 2 input error, 3 size/feasibility error, 4 oracle
mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .baselines import PROCEDURE_NAMES, build_spec, run_stepwise
from .combiners import COMBINER_NAMES
from .directional import dct_bounds, qi_closed_testing, sign_split
from .partitioning import (
    adaptive_pc_bounds,
    alpha_tilde,
    ap_adjusted_base_pvalues,
    ap_bounds_shortcut,
    partition_confidence_set_bruteforce,
)
from .closed_testing import HypothesisFamily, lower_bound_bruteforce, lower_bound_shortcut
from .reports import InputData, InputError, Report, read_input_csv, topk_subsets
from .simulation import PRESETS, SimConfig, preset_configs, run_simulation
from .validation import SizeError

BOUND_METHODS = ("dct", "ap", "qi", "pc") + PROCEDURE_NAMES


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "oracle-check":
            return _cmd_oracle_check(args)
        return _cmd_simulate(args)
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signbounds",
        description="Simultaneous confidence bounds and discoveries for parameter signs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="bounds/discoveries for a CSV of test results")
    b.add_argument("--input", required=True, help="CSV with columns {id,p}, {id,z} or "
                   "{id,pi_trt,se_trt,pi_ctl,se_ctl}")
    b.add_argument("--method", default="dct", choices=BOUND_METHODS)
    b.add_argument("--combiner", default="fisher", choices=COMBINER_NAMES)
    b.add_argument("--alpha", type=float, default=0.05)
    b.add_argument("--level", default="alpha", choices=("alpha", "alpha-tilde"),
                   help="operating level for partitioning methods (alpha-tilde gives the "
                        "unconditional-only guarantee)")
    b.add_argument("--subsets", help="file with one subset per line: comma-separated record "
                   "ids, optionally prefixed 'name='")
    b.add_argument("--topk-sweep", type=int, default=0, metavar="K",
                   help="also query the top-k subsets by |z|, k = 1..K")
    b.add_argument("--oracle", action="store_true",
                   help="force the exhaustive enumeration path (n <= 25)")
    b.add_argument("--output", help="write the report here instead of stdout")
    b.add_argument("--format", default="json", choices=("json", "csv"))

    o = sub.add_parser("oracle-check", help="compare shortcuts against brute force on random instances")
    o.add_argument("--R", type=int, default=200, help="number of random instances")
    o.add_argument("--n", type=int, default=10, help="maximum family size (<= 15)")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    s = sub.add_parser("simulate", help="run a Monte-Carlo study")
    s.add_argument("--preset", choices=PRESETS, help="packaged design; omit to configure by flags")
    s.add_argument("--B", type=int, help="replications per configuration")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--n-plus", type=int, default=0)
    s.add_argument("--n-minus", type=int, default=0)
    s.add_argument("--snr", type=float, default=0.0)
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--combiner", default="fisher", choices=COMBINER_NAMES)
    s.add_argument("--methods", default="dct,ap", help="comma-separated method names")
    s.add_argument("--level", default="alpha", choices=("alpha", "alpha-tilde"))
    s.add_argument("--output", default="simulation", help="output prefix for .json and .csv")
    return parser


def _parse_subsets_file(path, data: InputData) -> list:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            name, _, ids = line.partition("=")
            if not ids:
                name, ids = f"subset{lineno}", name
            idx = tuple(sorted(data.index_of(tok.strip()) for tok in ids.split(",") if tok.strip()))
            out.append((name.strip(), idx))
    return out


def _gather_subsets(args, data: InputData) -> list:
    subsets = []
    if args.subsets:
        subsets.extend(_parse_subsets_file(args.subsets, data))
    if args.topk_sweep:
        subsets.extend(topk_subsets(data, args.topk_sweep))
    return subsets


def _cmd_bounds(args) -> int:
    data = read_input_csv(args.input)
    subsets = _gather_subsets(args, data)
    n = data.n
    report = Report(method=args.method, combiner=args.combiner, alpha=args.alpha,
                    level=args.level, n=n, ids=data.ids)
    full = tuple(range(n))

    if args.method in PROCEDURE_NAMES:
        res = run_stepwise(data.pvalues, build_spec(args.method, n, args.alpha))
        label = "nonpositive" if res.nonpositive else "negative"
        report.combiner = None
        report.bounds = {
            "ell_plus": len(res.declare_positive),
            "ell_minus": len(res.declare_negative),
            "n_plus_lower": len(res.declare_positive),
            "n_plus_upper": n - len(res.declare_negative),
        }
        report.discoveries = {
            "positive": [{"id": data.ids[i]} for i in res.declare_positive],
            label: [{"id": data.ids[i]} for i in res.declare_negative],
        }
        return _emit(report, args)

    split = sign_split(data.pvalues)
    report.s_minus = tuple(data.ids[i] for i in split.s_minus)
    level_value = args.alpha if args.level == "alpha" else alpha_tilde(args.alpha, n)

    if args.method == "dct":
        res = dct_bounds([full] + [idx for _, idx in subsets], split, args.combiner,
                         args.alpha, exhaustive=args.oracle)
        report.bounds = {
            "ell_plus": res.ell_plus[full],
            "ell_minus": res.ell_minus[full],
            "n_plus_lower": res.ell_plus[full],
            "n_plus_upper": n - res.ell_minus[full],
        }
        report.subsets = [
            {"name": name, "ids": [data.ids[i] for i in idx],
             "ell_plus": res.ell_plus[idx], "ell_minus": res.ell_minus[idx],
             "n_plus_lower": res.ell_plus[idx], "n_plus_upper": len(idx) - res.ell_minus[idx]}
            for name, idx in subsets
        ]
        report.discoveries = _discovery_lists(data, res.adjusted, res.d_plus, res.d_minus, "negative")
    elif args.method == "ap":
        compute = (partition_confidence_set_bruteforce if args.oracle else ap_bounds_shortcut)
        cs = compute(full, split, args.combiner, level_value)
        report.bounds = _ap_bounds_dict(cs)
        report.subsets = []
        for name, idx in subsets:
            sub = compute(idx, split, args.combiner, level_value)
            entry = {"name": name, "ids": [data.ids[i] for i in idx]}
            entry.update(_ap_bounds_dict(sub))
            report.subsets.append(entry)
        p_bar, q_bar = ap_adjusted_base_pvalues(split, args.combiner)
        d_plus = tuple(np.flatnonzero(p_bar <= level_value))
        d_minus = tuple(np.flatnonzero(q_bar <= level_value))
        report.discoveries = {
            "positive": [{"id": data.ids[i], "adjusted_p": float(p_bar[i])} for i in d_plus],
            "nonpositive": [{"id": data.ids[i], "adjusted_p": float(q_bar[i])} for i in d_minus],
        }
    elif args.method == "qi":
        res, qi = qi_closed_testing(split, args.combiner, args.alpha,
                                    queries=[full] + [idx for _, idx in subsets])
        report.qi_pvalue = qi
        report.bounds = {
            "ell_plus": res.ell_plus[full],
            "ell_minus": res.ell_minus[full],
            "n_plus_lower": res.ell_plus[full],
            "n_plus_upper": n - res.ell_minus[full],
        }
        report.subsets = [
            {"name": name, "ids": [data.ids[i] for i in idx],
             "ell_plus": res.ell_plus[idx], "ell_minus": res.ell_minus[idx]}
            for name, idx in subsets
        ]
        report.discoveries = _discovery_lists(data, res.adjusted, res.d_plus, res.d_minus, "negative")
    else:  # pc
        pc = adaptive_pc_bounds(split, args.combiner, level_value)
        report.bounds = {
            "ell_plus": pc.l_plus,
            "ell_minus": pc.l_minus,
            "n_plus_lower": pc.l_plus,
            "n_plus_upper": n - pc.l_minus,
        }
        report.pc_bounds = {
            "l_plus": pc.l_plus,
            "l_minus": pc.l_minus,
            "pc_pvalues_plus": list(pc.pc_pvalues_plus),
            "pc_pvalues_minus": list(pc.pc_pvalues_minus),
        }
    return _emit(report, args)


def _ap_bounds_dict(cs) -> dict:
    return {
        "ell_plus": cs.ell_plus_tilde,
        "ell_minus": cs.ell_minus_tilde,
        "n_plus_lower": cs.ell_plus_tilde,
        "n_plus_upper": cs.n_plus_upper,
        "n_plus_confidence_set": list(cs.n_plus_set),
    }


def _discovery_lists(data, adjusted, d_plus, d_minus, minus_label) -> dict:
    return {
        "positive": [{"id": data.ids[i], "adjusted_p": float(adjusted[i])} for i in d_plus],
        minus_label: [{"id": data.ids[i], "adjusted_p": float(adjusted[i])} for i in d_minus],
    }


def _emit(report: Report, args) -> int:
    if args.format == "json":
        text = report.to_json() + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        if args.output:
            with open(args.output, "w", newline="", encoding="utf-8") as fh:
                report.write_csv(fh)
        else:
            report.write_csv(sys.stdout)
    return 0


def _cmd_oracle_check(args) -> int:
    if args.n > 15:
        raise SizeError(f"oracle-check limited to n <= 15, got {args.n}")
    rng = np.random.default_rng(args.seed)
    alphas = (0.01, 0.05, 0.2)
    checked = 0
    for r in range(args.R):
        n = int(rng.integers(1, args.n + 1))
        pool = np.array([0.0, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0])
        p = np.where(rng.random(n) < 0.25, rng.choice(pool, n), rng.uniform(size=n))
        split = sign_split(p)
        subset = tuple(i for i in range(n) if rng.random() < 0.6)
        for kind in COMBINER_NAMES:
            fam = HypothesisFamily(p, kind)
            for alpha in alphas:
                cs_fast = ap_bounds_shortcut(subset, split, kind, alpha)
                cs_slow = partition_confidence_set_bruteforce(subset, split, kind, alpha)
                f_fast = np.array(cs_fast.f_values)
                if args.inject_fault and r == 0:
                    f_fast = f_fast.copy()
                    f_fast[0] = 1.0 - f_fast[0]
                if (cs_fast.n_plus_set != cs_slow.n_plus_set
                        or not np.allclose(f_fast, cs_slow.f_values, atol=1e-10)):
                    _dump_mismatch("partitioning", p, subset, kind, alpha, cs_fast, cs_slow)
                    return 4
                lb_fast = lower_bound_shortcut(subset, fam, alpha)
                lb_slow = lower_bound_bruteforce(subset, fam, alpha)
                if lb_fast != lb_slow:
                    _dump_mismatch("closed-testing", p, subset, kind, alpha, lb_fast, lb_slow)
                    return 4
                checked += 1
    print(f"oracle-check: {checked} comparisons over {args.R} instances, all consistent")
    return 0


def _dump_mismatch(which, p, subset, kind, alpha, fast, slow):
    print(f"oracle-check: {which} mismatch", file=sys.stderr)
    print(f"  p={list(p)} subset={list(subset)} combiner={kind} alpha={alpha}", file=sys.stderr)
    print(f"  shortcut={fast}", file=sys.stderr)
    print(f"  bruteforce={slow}", file=sys.stderr)


def _cmd_simulate(args) -> int:
    if args.preset:
        configs = preset_configs(args.preset, B=args.B, seed=args.seed)
    else:
        methods = tuple(tok.strip() for tok in args.methods.split(",") if tok.strip())
        configs = [SimConfig(n=args.n, n_plus=args.n_plus, n_minus=args.n_minus,
                             snr=args.snr, alpha=args.alpha, combiner=args.combiner,
                             methods=methods, B=args.B or 2000, seed=args.seed,
                             level=args.level)]
    summaries = [run_simulation(cfg) for cfg in configs]
    json_path = args.output + ".json"
    csv_path = args.output + ".csv"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump([s.to_dict() for s in summaries], fh, indent=2)
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["snr", "method", "metric", "value", "mc_se"])
        for s in summaries:
            for row in s.csv_rows():
                writer.writerow(row)
    print(f"simulate: wrote {json_path} and {csv_path} ({len(configs)} configuration(s))")
    return 0


if __name__ == "__main__":
    sys.exit(main())
