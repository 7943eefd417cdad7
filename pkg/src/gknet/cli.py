"""Command-line frontend for decomposition, feasibility checks, planning,
and end-to-end transport simulations.

Exit codes: 0 = feasible / success, 2 = clean infeasible verdict,
1 = operational error (schema violation, binding mismatch, delivery failure),
so scripts can branch on verdicts without parsing the report.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import codec, rlnc
from .common_info import decompose, decompose_source, gk_entropy, partition_to_dict
from .errors import GknetError
from .feasibility import (
    MODE_COMMON_INFORMATION,
    MODE_CONDITIONAL_ENTROPY,
    check_ak,
    check_bsi,
    check_dmb_support,
    check_multicast,
    check_separation,
    check_separation_l,
    plan_degraded_messages,
)
from .netgraph import expand_with_latent_sources, load_network
from .probability import (
    binary_entropy,
    conditional_entropy,
    entropy,
    load_pmf,
    mutual_information,
    sample_iid,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


@dataclass
class RunConfig:
    command: str
    pmf: Path | None = None
    net: Path | None = None
    n: int = 1000
    epsilon: float = 0.1
    gamma_points: int = 1001
    gamma: float = 1.0
    seed: int = 1
    out: Path | None = None
    format: str = "json"
    fig: Path | None = None
    dump_rates: Path | None = None
    packet_size: int = 64
    vars: tuple = ()
    source: str | None = None
    side: tuple = ()
    x_var: str | None = None
    helper_var: str | None = None
    mode: str = MODE_COMMON_INFORMATION

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("blocklength must be at least 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def _require(config: RunConfig, **attrs):
    for name, label in attrs.items():
        if not getattr(config, name):
            raise ValueError(f"{label} is required for {config.command!r}")


def _load_inputs(config: RunConfig, need_net: bool = True):
    _require(config, pmf="--pmf")
    pmf = load_pmf(config.pmf)
    net = None
    if config.net:
        net = load_network(config.net)
    elif need_net:
        raise ValueError(f"--net is required for {config.command!r}")
    return pmf, net


def _pair_measures(pmf) -> dict:
    x, y = pmf.variables
    part = decompose(pmf, (x, y))
    hk = gk_entropy(part)
    return {
        "H(K)": hk,
        f"H({x})": entropy(pmf, x),
        f"H({y})": entropy(pmf, y),
        f"H({x},{y})": entropy(pmf, (x, y)),
        f"H({x}|{y})": conditional_entropy(pmf, x, y),
        f"H({y}|{x})": conditional_entropy(pmf, y, x),
        f"I({x};{y})": mutual_information(pmf, x, y),
        f"H({x}|K)": max(entropy(pmf, x) - hk, 0.0),
        f"H({y}|K)": max(entropy(pmf, y) - hk, 0.0),
    }


def _cmd_decompose(config: RunConfig):
    pmf, _ = _load_inputs(config, need_net=False)
    vars_ = config.vars or pmf.variables
    part = decompose(pmf, vars_)
    payload = partition_to_dict(part)
    if len(part.variables) == 2 and set(part.variables) == set(pmf.variables):
        payload["measures"] = _pair_measures(pmf)
    else:
        hk = gk_entropy(part)
        payload["measures"] = {"H(K)": hk}
        for v in part.variables:
            payload["measures"][f"H({v})"] = entropy(pmf, v)
            payload["measures"][f"H({v}|K)"] = max(entropy(pmf, v) - hk, 0.0)
    rows = [["component", "weight", "members"]]
    for comp in payload["components"]:
        members = ";".join(
            f"{v}:{'|'.join(s)}" for v, s in sorted(comp["members"].items())
        )
        rows.append([comp["index"], comp["weight"], members])
    if config.fig:
        from .plots import save_partition_figure

        save_partition_figure(part, config.fig)
    return EXIT_OK, payload, rows


def _report_result(report, config: RunConfig, extra: dict | None = None):
    payload = report.to_dict()
    if extra:
        payload.update(extra)
    code = EXIT_OK if report.ok else EXIT_INFEASIBLE
    return code, payload, report.csv_rows()


def _cmd_check(config: RunConfig):
    problem = config.command.split()[1]
    pmf, net = _load_inputs(config)
    if problem == "multicast":
        report = check_multicast(net, pmf)
    elif problem == "separation":
        report = check_separation(net, pmf)
    elif problem == "separation-l":
        report = check_separation_l(net, pmf)
    elif problem == "bsi":
        _require(config, source="--source", side="--side")
        report = check_bsi(net, pmf, config.source, config.side)
    elif problem == "ak":
        _require(config, x_var="--x", helper_var="--helper")
        report = check_ak(net, pmf, config.x_var, config.helper_var, config.gamma_points)
        if config.fig:
            from .plots import save_ak_figure

            save_ak_figure(report, config.fig)
    else:
        raise ValueError(f"unknown check {problem!r}")
    return _report_result(report, config)


def _cmd_plan(config: RunConfig):
    pmf, _ = _load_inputs(config, need_net=False)
    _require(config, source="--source", side="--side")
    plan = plan_degraded_messages(pmf, config.source, config.side, config.mode)
    payload = plan.to_dict()
    code = EXIT_OK
    if config.net:
        net = load_network(config.net)
        report = check_dmb_support(
            net, plan, net.sources[config.source], net.terminals
        )
        payload["support"] = report.to_dict()
        if not report.ok:
            code = EXIT_INFEASIBLE
    rows = [["message", "rate", "cumulative", "payload"]]
    for m, cum in zip(plan.messages, plan.cumulative):
        rows.append([m.name, m.rate, cum, m.payload_kind])
    return code, payload, rows


def _rate_rows(rates: dict) -> list:
    rows = [["stream", "bits", "rate_bits_per_symbol", "target_bits_per_symbol"]]
    for name, (bits, rate, target) in rates.items():
        rows.append([name, bits, rate, target])
    return rows


def _dump_rates(config: RunConfig, rates: dict) -> None:
    if not config.dump_rates:
        return
    with open(config.dump_rates, "w", newline="") as fh:
        csv.writer(fh).writerows(_rate_rows(rates))


def _maybe_rate_figure(config: RunConfig, rates: dict, title: str) -> None:
    if not config.fig:
        return
    from .plots import save_rate_figure

    save_rate_figure({k: (v[1], v[2]) for k, v in rates.items()}, config.fig, title)


def _cmd_simulate_multicast(config: RunConfig):
    pmf, net = _load_inputs(config)
    if len(pmf.variables) != 2:
        raise ValueError("multicast simulation expects a two-variable pmf")
    x, y = pmf.variables
    sep = check_separation(net, pmf)
    if not sep.ok:
        return EXIT_INFEASIBLE, sep.to_dict(), sep.csv_rows()

    part = decompose(pmf, (x, y))
    decomps = {v: decompose_source(pmf, part, v) for v in (x, y)}
    book = codec.build_codebook(part, decomps)
    seqs = sample_iid(pmf, config.n, config.seed)
    block = codec.encode_multicast_block(seqs[x], seqs[y], book, config.epsilon)

    sx, sy = net.sources[x], net.sources[y]
    latents = [(f"{x}'", (sx,)), (f"{y}'", (sy,)), ("K*", (sx, sy))]
    expanded = expand_with_latent_sources(net, latents)
    binding = {"x": f"{x}'", "y": f"{y}'", "k": "K*"}
    delivered = rlnc.deliver_multicast(
        expanded, block, binding, config.seed, config.packet_size
    )

    hk = gk_entropy(part)
    targets = {
        "k": hk,
        "x": max(entropy(pmf, x) - hk, 0.0),
        "y": max(entropy(pmf, y) - hk, 0.0),
    }
    rates = {
        name: (block.streams[name].nbits, block.rates[name], targets[name])
        for name in ("k", "x", "y")
    }
    terminals = {}
    all_exact = True
    for t, tb in delivered.items():
        exact = tb.streams == block.streams
        xd, yd = codec.decode_multicast_block(tb, book)
        exact = exact and xd == seqs[x] and yd == seqs[y]
        terminals[t] = exact
        all_exact &= exact
    payload = {
        "scheme": "simulate-multicast",
        "n": config.n,
        "seed": config.seed,
        "typical": block.typical,
        "separation": sep.to_dict(),
        "rates": {k: {"bits": v[0], "rate": v[1], "target": v[2]} for k, v in rates.items()},
        "total_rate": sum(v[1] for v in rates.values()),
        "total_target": sum(v[2] for v in rates.values()),
        "bit_exact": terminals,
        "ok": all_exact,
    }
    _dump_rates(config, rates)
    _maybe_rate_figure(config, rates, "Multicast stream rates")
    return (EXIT_OK if all_exact else EXIT_ERROR), payload, _rate_rows(rates)


def _cmd_simulate_bsi(config: RunConfig):
    pmf, net = _load_inputs(config, need_net=False)
    _require(config, source="--source", side="--side")
    src, side = config.source, config.side
    plan = plan_degraded_messages(pmf, src, side, MODE_COMMON_INFORMATION)
    partitions = [decompose(pmf, (src, yv)) for yv in side]
    decomps = [decompose_source(pmf, partitions[0], src)]
    seqs = sample_iid(pmf, config.n, config.seed)
    messages = codec.encode_bsi_messages(seqs[src], plan, partitions, decomps)

    levels = {}
    all_exact = True
    for i, yv in enumerate(side, start=1):
        decoded = codec.decode_bsi(messages[:i], seqs[yv], partitions, decomps)
        exact = decoded == seqs[src]
        levels[f"level_{i}"] = exact
        all_exact &= exact

    rates = {}
    cum_bits = 0
    for m, bits in zip(plan.messages, messages):
        cum_bits += bits.nbits
        rates[m.name] = (bits.nbits, bits.nbits / config.n, m.rate)
    payload = {
        "scheme": "simulate-bsi",
        "n": config.n,
        "seed": config.seed,
        "plan": plan.to_dict(),
        "rates": {k: {"bits": v[0], "rate": v[1], "target": v[2]} for k, v in rates.items()},
        "bit_exact": levels,
        "ok": all_exact,
    }
    code = EXIT_OK if all_exact else EXIT_ERROR
    if net is not None:
        support = check_dmb_support(net, plan, net.sources[src], net.terminals)
        payload["support"] = support.to_dict()
        if all_exact and not support.ok:
            code = EXIT_INFEASIBLE
    _dump_rates(config, rates)
    _maybe_rate_figure(config, rates, "Degraded message rates")
    return code, payload, _rate_rows(rates)


def _cmd_simulate_ak(config: RunConfig):
    pmf, net = _load_inputs(config, need_net=False)
    _require(config, x_var="--x", helper_var="--helper")
    x, y = config.x_var, config.helper_var
    part = decompose(pmf, (x, y))
    decomps = {v: decompose_source(pmf, part, v) for v in part.variables}
    book = codec.build_codebook(part, decomps)
    seqs = sample_iid(pmf, config.n, config.seed)
    block = codec.encode_ak(
        seqs[x], seqs[y], book, config.gamma, config.seed, config.epsilon
    )
    decoded = codec.decode_ak(block, book)
    exact = decoded == seqs[x]

    hk = gk_entropy(part)
    hx = entropy(pmf, x)
    g = block.gamma
    targets = {
        "k": g * hk + binary_entropy(g),
        "x": g * max(hx - hk, 0.0) + (1 - g) * hx,
    }
    rates = {
        name: (block.streams[name].nbits, block.rates[name], targets[name])
        for name in ("k", "x")
    }
    payload = {
        "scheme": "simulate-ak",
        "n": config.n,
        "seed": config.seed,
        "gamma": g,
        "typical": block.typical,
        "rates": {k: {"bits": v[0], "rate": v[1], "target": v[2]} for k, v in rates.items()},
        "bit_exact": exact,
        "ok": exact,
    }
    code = EXIT_OK if exact else EXIT_ERROR
    if net is not None:
        report = check_ak(net, pmf, x, y, config.gamma_points)
        payload["region"] = report.to_dict()
        if exact and not report.ok:
            code = EXIT_INFEASIBLE
        if config.fig:
            from .plots import save_ak_figure

            save_ak_figure(report, config.fig)
    elif config.fig:
        _maybe_rate_figure(config, rates, "Helper-assisted stream rates")
    _dump_rates(config, rates)
    return code, payload, _rate_rows(rates)


_HANDLERS = {
    "decompose": _cmd_decompose,
    "check multicast": _cmd_check,
    "check separation": _cmd_check,
    "check separation-l": _cmd_check,
    "check bsi": _cmd_check,
    "check ak": _cmd_check,
    "plan dmb": _cmd_plan,
    "simulate multicast": _cmd_simulate_multicast,
    "simulate bsi": _cmd_simulate_bsi,
    "simulate ak": _cmd_simulate_ak,
}


def _human_lines(payload: dict, indent: str = "") -> list:
    lines = []
    for key, value in payload.items():
        if key == "checks" and isinstance(value, list):
            lines.append(f"{indent}checks:")
            for c in value:
                mark = "ok " if c["holds"] else "FAIL"
                lines.append(
                    f"{indent}  [{mark}] {c['label']}: "
                    f"{c['lhs']:.6f} vs {c['rhs']:.6f} (slack {c['slack']:+.6f})"
                )
        elif isinstance(value, dict) and key != "witnesses":
            lines.append(f"{indent}{key}:")
            lines.extend(_human_lines(value, indent + "  "))
        elif key == "witnesses":
            keep = {k: v for k, v in value.items() if not isinstance(v, list)}
            if keep:
                lines.append(f"{indent}witnesses: {json.dumps(keep, sort_keys=True)}")
        else:
            if isinstance(value, float):
                value = f"{value:.6f}"
            lines.append(f"{indent}{key}: {value}")
    return lines


def _write_output(config: RunConfig, payload: dict, rows: list) -> None:
    if config.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif config.format == "csv":
        buf = io.StringIO()
        csv.writer(buf).writerows(rows)
        text = buf.getvalue()
    else:
        text = "\n".join(_human_lines(payload)) + "\n"
    if config.out:
        Path(config.out).write_text(text)
    else:
        sys.stdout.write(text)


def run(config: RunConfig) -> int:
    """Dispatch one command; returns the process exit code."""
    handler = _HANDLERS.get(config.command)
    if handler is None:
        print(f"unknown command {config.command!r}", file=sys.stderr)
        return EXIT_ERROR
    try:
        code, payload, rows = handler(config)
    except GknetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write_output(config, payload, rows)
    return code


def _csv_list(text: str) -> tuple:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gknet",
        description="Common-information decomposition, feasibility checks, and "
        "zero-error transport simulations on capacitated networks.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p, net_help="network JSON file"):
        p.add_argument("--pmf", type=Path, required=True, help="joint pmf JSON file")
        p.add_argument("--net", type=Path, help=net_help)
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        p.add_argument(
            "--format", choices=("json", "csv", "human"), default="json",
            help="report format (default json)",
        )
        p.add_argument("--fig", type=Path, help="render a matplotlib figure to this file")

    def sim_flags(p):
        p.add_argument("--n", type=int, default=1000, help="blocklength (default 1000)")
        p.add_argument("--epsilon", type=float, default=0.1,
                       help="typicality tolerance (default 0.1)")
        p.add_argument("--seed", type=int, default=1, help="PRNG seed (default 1)")
        p.add_argument("--dump-rates", type=Path,
                       help="write per-stream empirical rates as CSV")
        p.add_argument("--packet-size", type=int, default=64,
                       help="transport payload bytes (default 64)")

    p = sub.add_parser("decompose", help="component partition and its entropies")
    common(p)
    p.add_argument("--vars", type=_csv_list, default=(),
                   help="comma-separated variable subset (default: all)")

    p = sub.add_parser("check", help="feasibility checks")
    p.add_argument("problem",
                   choices=("multicast", "separation", "separation-l", "bsi", "ak"))
    common(p)
    p.add_argument("--source", help="source variable (bsi)")
    p.add_argument("--side", type=_csv_list, default=(),
                   help="comma-separated side variables bound to terminals in order")
    p.add_argument("--x", dest="x_var", help="delivered variable (ak)")
    p.add_argument("--helper", dest="helper_var", help="helper variable (ak)")
    p.add_argument("--gamma-points", type=int, default=1001,
                   help="gamma sweep resolution (default 1001)")

    p = sub.add_parser("plan", help="degraded message planning")
    p.add_argument("problem", choices=("dmb",))
    common(p)
    p.add_argument("--source", required=True, help="source variable")
    p.add_argument("--side", type=_csv_list, required=True,
                   help="comma-separated side variables, nearest terminal first")
    p.add_argument("--mode",
                   choices=(MODE_COMMON_INFORMATION, MODE_CONDITIONAL_ENTROPY),
                   default=MODE_COMMON_INFORMATION)

    p = sub.add_parser("simulate", help="end-to-end encode, deliver, decode")
    p.add_argument("problem", choices=("multicast", "bsi", "ak"))
    common(p)
    sim_flags(p)
    p.add_argument("--source", help="source variable (bsi)")
    p.add_argument("--side", type=_csv_list, default=(),
                   help="comma-separated side variables (bsi)")
    p.add_argument("--x", dest="x_var", help="delivered variable (ak)")
    p.add_argument("--helper", dest="helper_var", help="helper variable (ak)")
    p.add_argument("--gamma", type=float, default=1.0, help="helper duty cycle (ak)")
    p.add_argument("--gamma-points", type=int, default=1001,
                   help="gamma sweep resolution for the region report (ak)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = args.cmd if not hasattr(args, "problem") else f"{args.cmd} {args.problem}"
    fields = {
        "pmf": "pmf", "net": "net", "n": "n", "epsilon": "epsilon",
        "gamma_points": "gamma_points", "gamma": "gamma", "seed": "seed",
        "out": "out", "format": "format", "fig": "fig",
        "dump_rates": "dump_rates", "packet_size": "packet_size",
        "vars": "vars", "source": "source", "side": "side",
        "x_var": "x_var", "helper_var": "helper_var", "mode": "mode",
    }
    kwargs = {}
    for attr, key in fields.items():
        if hasattr(args, key) and getattr(args, key) is not None:
            kwargs[attr] = getattr(args, key)
    return RunConfig(command=command, **kwargs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
