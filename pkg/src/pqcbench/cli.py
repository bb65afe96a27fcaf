"""Command-line experiment runner.

Subcommands: ``list`` (catalog inspection), ``run`` (descriptor reports over
a circuit/width/layer grid), ``baseline`` (finite-sampling KL bias),
``tables`` (CRZ-vs-CRX and two-qubit-configuration comparisons), and
``saturation`` (expressibility against two-qubit gate count with the bias
floor).

Exit codes: 0 on success, 2 on configuration errors, 1 on runtime errors.
All randomness derives from ``--seed``; output is byte-identical for a fixed
seed regardless of ``--workers``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import descriptors as desc
from . import templates as tpl

CRZ_CRX_PAIRS = (
    ("c03", "c04"),
    ("c05", "c06"),
    ("c07", "c08"),
    ("c13", "c14"),
    ("c16", "c17"),
    ("c18", "c19"),
)
CONFIG_CIRCUITS = (
    ("nearest-neighbor", "nn-cmp"),
    ("circuit-block", "cb-cmp"),
    ("all-to-all", "aa-cmp"),
)


class ConfigError(ValueError):
    pass


def _template_dir() -> str | None:
    return os.environ.get("PQC_TEMPLATE_DIR") or None


def _parse_layers(text: str) -> list[int]:
    if ".." in text:
        lo_txt, hi_txt = text.split("..", 1)
        try:
            lo, hi = int(lo_txt), int(hi_txt)
        except ValueError as exc:
            raise ConfigError(f"bad layer range {text!r}") from exc
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad layer range {text!r}")
        return list(range(lo, hi + 1))
    try:
        value = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad layer count {text!r}") from exc
    if value < 1:
        raise ConfigError("layer count must be >= 1")
    return [value]


def _resolve_circuits(spec_text: str) -> list[tpl.CircuitTemplate]:
    cat = {t.id: t for t in tpl.catalog(_template_dir())}
    if spec_text == "all":
        return [cat[c] for c in tpl.BENCHMARK_IDS if c in cat]
    out = []
    for cid in spec_text.split(","):
        cid = cid.strip()
        if cid not in cat:
            raise ConfigError(f"unknown circuit id {cid!r}")
        out.append(cat[cid])
    return out


def _estimator_config(args) -> desc.EstimatorConfig:
    cfg = desc.EstimatorConfig(
        pair_count=args.pairs, n_bin=args.bins, t_max=args.tmax, workers=args.workers
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.repeats < 1:
        raise ConfigError("repeats must be >= 1")
    if not (1 <= args.n <= 16):
        raise ConfigError("width must be in [1, 16]")
    return cfg


def _report_row(report: desc.DescriptorReport, repeat: int, master_seed: int, t_max: int) -> dict:
    row = {
        "circuit_id": report.template_id,
        "n": report.n,
        "L": report.layers,
        "repeat": repeat,
        "seed": master_seed,
        "pairs": report.pair_count,
        "bins": report.n_bin,
        "expr": report.expr,
        "ent": report.ent,
    }
    for t in range(1, t_max + 1):
        row[f"fp_t{t}"] = report.frame_potentials[t - 1]
    for t in range(1, t_max + 1):
        row[f"welch_t{t}"] = report.welch_bounds[t - 1]
    row["n_params"] = report.costs.num_params
    row["n_2q"] = report.costs.num_two_qubit
    row["depth"] = report.costs.depth
    row["connectivity"] = report.connectivity
    return row


def _write_rows(rows: list[dict], out_path: str, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- subcommands ----------------------------------------------------------------

def cmd_list(args) -> int:
    rows = []
    for template in tpl.catalog(_template_dir()):
        n = template.exact_qubits or 4
        cm = tpl.cost_metrics(template, n, 1)
        rows.append(
            (template.id, template.connectivity, n, cm.num_params, cm.num_two_qubit, cm.depth)
        )
    header = ("id", "connectivity", "n", "params(L=1)", "two-qubit(L=1)", "depth(L=1)")
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    for row in [header] + rows:
        print("  ".join(str(v).ljust(w) for v, w in zip(row, widths)))
    return 0


def cmd_run(args) -> int:
    cfg = _estimator_config(args)
    circuits = _resolve_circuits(args.circuits)
    layers = _parse_layers(args.layers)
    rows = []
    for template in circuits:
        for L in layers:
            for repeat in range(args.repeats):
                rng = desc.run_stream(args.seed, template.id, args.n, L, repeat)
                report = desc.compute_report(template, args.n, L, cfg, rng)
                rows.append(_report_row(report, repeat, args.seed, cfg.t_max))
    _write_rows(rows, args.out, args.format)
    return 0


def cmd_baseline(args) -> int:
    cfg = _estimator_config(args)
    N = 1 << args.n
    mean, std = desc.kl_bias_baseline(
        N, cfg.n_bin, cfg.pair_count, args.repeats, desc.RngStream(args.seed, (0xB1A5,))
    )
    rows = [
        {
            "n": args.n,
            "dim": N,
            "bins": cfg.n_bin,
            "pairs": cfg.pair_count,
            "repeats": args.repeats,
            "bias_mean": mean,
            "bias_std": std,
            "seed": args.seed,
        }
    ]
    _write_rows(rows, args.out, args.format)
    return 0


def _summaries(args, cfg, circuit_ids: Sequence[str]):
    out = {}
    for cid in circuit_ids:
        template = tpl.get_template(cid, _template_dir())
        reports = desc.repeat_reports(template, args.n, args.layers, cfg, args.seed, args.repeats)
        out[cid] = desc.summarize_repeats(reports)
    return out


def cmd_tables(args) -> int:
    cfg = _estimator_config(args)
    rows = []
    if args.which == "crz-crx":
        ids = [cid for pair in CRZ_CRX_PAIRS for cid in pair]
        stats = _summaries(args, cfg, ids)
        for crz_id, crx_id in CRZ_CRX_PAIRS:
            a, b = stats[crz_id], stats[crx_id]
            rows.append(
                {
                    "crz_id": crz_id,
                    "crz_expr": a.expr_mean,
                    "crz_expr_std": a.expr_std,
                    "crz_ent": a.ent_mean,
                    "crz_ent_std": a.ent_std,
                    "crx_id": crx_id,
                    "crx_expr": b.expr_mean,
                    "crx_expr_std": b.expr_std,
                    "crx_ent": b.ent_mean,
                    "crx_ent_std": b.ent_std,
                    "n": args.n,
                    "L": args.layers,
                    "pairs": cfg.pair_count,
                    "repeats": args.repeats,
                    "seed": args.seed,
                }
            )
    else:
        stats = _summaries(args, cfg, [cid for _, cid in CONFIG_CIRCUITS])
        for label, cid in CONFIG_CIRCUITS:
            s = stats[cid]
            rows.append(
                {
                    "configuration": label,
                    "circuit_id": cid,
                    "expr": s.expr_mean,
                    "expr_std": s.expr_std,
                    "ent": s.ent_mean,
                    "ent_std": s.ent_std,
                    "n": args.n,
                    "L": args.layers,
                    "pairs": cfg.pair_count,
                    "repeats": args.repeats,
                    "seed": args.seed,
                }
            )
    _write_rows(rows, args.out, args.format)
    return 0


def cmd_saturation(args) -> int:
    cfg = _estimator_config(args)
    circuits = _resolve_circuits(args.circuits)
    layers = _parse_layers(args.layers)
    N = 1 << args.n
    bias_mean, _ = desc.kl_bias_baseline(
        N, cfg.n_bin, cfg.pair_count, args.repeats, desc.RngStream(args.seed, (0xB1A5,))
    )
    rows = []
    for template in circuits:
        for L in layers:
            rng = desc.run_stream(args.seed, template.id, args.n, L, 0)
            report = desc.compute_report(template, args.n, L, cfg, rng)
            rows.append(
                {
                    "circuit_id": template.id,
                    "n": args.n,
                    "L": L,
                    "n_2q": report.costs.num_two_qubit,
                    "expr": report.expr,
                    "bias": bias_mean,
                    "pairs": cfg.pair_count,
                    "bins": cfg.n_bin,
                    "seed": args.seed,
                }
            )
    _write_rows(rows, args.out, args.format)
    return 0


# -- entry point ------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, pairs=5000, repeats=1) -> None:
    p.add_argument("--n", type=int, default=4, help="qubit count (default 4)")
    p.add_argument("--pairs", type=int, default=pairs, help="sampled state pairs")
    p.add_argument("--bins", type=int, default=75, help="histogram bin count")
    p.add_argument("--tmax", type=int, default=4, help="highest frame-potential moment")
    p.add_argument("--repeats", type=int, default=repeats, help="independent seeded runs")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--workers", type=int, default=1, help="sampling worker processes")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqc",
        description="Parameterized-quantum-circuit descriptor benchmarks "
        "(expressibility, entangling capability, frame potentials, costs).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="show the template catalog")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("run", help="descriptor reports over a (circuit, n, L) grid")
    p.add_argument("--circuits", default="all", help="'all' or comma-separated ids")
    p.add_argument("--layers", default="1", help="layer count or range A..B")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("baseline", help="finite-sampling KL bias floor")
    _add_common(p, repeats=5)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("tables", help="reproduce the comparison tables")
    p.add_argument("which", choices=("crz-crx", "connectivity"))
    p.add_argument("--layers", type=int, default=1)
    _add_common(p, repeats=5)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("saturation", help="expressibility vs two-qubit gate count")
    p.add_argument("--circuits", default="all", help="'all' or comma-separated ids")
    p.add_argument("--layers", default="1..10", help="layer range (default 1..10)")
    _add_common(p, repeats=5)
    p.set_defaults(func=cmd_saturation)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, tpl.TemplateError, ValueError, KeyError) as exc:
        print(f"pqc: {exc}", file=sys.stderr)
        print(f"run 'pqc {args.command} --help' for usage", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pqc: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
