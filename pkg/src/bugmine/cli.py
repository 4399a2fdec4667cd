"""Command-line pipeline: fetch -> ingest -> cluster -> discover -> analyze.

Each stage is its own subcommand reading and writing the documented file
formats, so any stage can be rerun or tested in isolation; ``autocluster``
chains clustering, discovery, scoring and selection in one go. All
randomness flows from ``--seed``; artifacts are byte-stable for a fixed
configuration.

Exit codes: 0 ok, 2 usage or input parse error, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from . import analytics, bugzilla, clustering, discovery, ingest, metrics
from .distance import Metric

EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None


def _parse_thresholds(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad threshold list {text!r}") from None
    if not values or any(v <= 0 for v in values) or values != sorted(values):
        raise argparse.ArgumentTypeError("thresholds must be positive and ascending")
    return values


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad date {text!r} (want YYYY-MM-DD)") from None


def _percent(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad percentage {text!r}") from None
    if not 0.0 < value <= 100.0:
        raise argparse.ArgumentTypeError("percentage must be in (0, 100]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bugmine",
        description="Mine issue-tracker bug lifecycles into clustered process models.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=Path,
        help="key=value file supplying defaults for this command's flags",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    fetch = add_command("fetch", "download closed-bug history as JSON")
    fetch.add_argument("--base-url", required=True)
    fetch.add_argument("--from", dest="date_from", type=_parse_date, required=True)
    fetch.add_argument("--to", dest="date_to", type=_parse_date, required=True)
    fetch.add_argument("--page-size", type=int, default=500)
    fetch.add_argument("--max-retries", type=int, default=3)
    fetch.add_argument("--delay", type=float, default=0.0)
    fetch.add_argument("--limit", type=int, help="keep only the first N bug ids")
    fetch.add_argument("--out", type=Path, required=True)

    ing = add_command("ingest", "history CSV/JSON to event-log CSV")
    ing.add_argument("--input", type=Path, required=True)
    ing.add_argument("--format", choices=("csv", "json"))
    ing.add_argument("--catalog", type=Path, help="seed activity catalog CSV")
    ing.add_argument("--out", type=Path, required=True)

    clu = add_command("cluster", "k-medoid clustering of an event log")
    clu.add_argument("--input", type=Path, required=True)
    clu.add_argument("--k", type=int, required=True)
    clu.add_argument("--metric", choices=("lcs", "dtw"), default="lcs")
    clu.add_argument("--seed", type=int, default=1)
    clu.add_argument("--out", type=Path, required=True)

    disc = add_command("discover", "mine a process model from an event log")
    disc.add_argument("--input", type=Path, required=True)
    disc.add_argument("--activity-pct", type=_percent, default=100.0)
    disc.add_argument("--path-pct", type=_percent, default=100.0)
    disc.add_argument("--index", type=int, default=0, help="artifact name suffix")
    disc.add_argument("--out", type=Path, required=True)

    ev = add_command("evaluate", "complexity/fitness of a model vs a log")
    ev.add_argument("--model", type=Path, required=True)
    ev.add_argument("--input", type=Path, required=True)
    ev.add_argument(
        "--complexity-include-endpoints",
        action=argparse.BooleanOptionalAction,
        default=True,
    )
    ev.add_argument("--out", type=Path, required=True)

    ana = add_command("analyze", "loops, reopens and bottlenecks")
    ana.add_argument("--input", type=Path, required=True)
    ana.add_argument("--model", type=Path, required=True)
    ana.add_argument("--thresholds", type=_parse_thresholds, default=[500.0, 1000.0])
    ana.add_argument("--index", type=int, default=0, help="artifact name suffix")
    ana.add_argument("--out", type=Path, required=True)

    auto = add_command("autocluster", "cluster several times and keep the best set")
    auto.add_argument("--input", type=Path, required=True)
    auto.add_argument("--k", type=int, required=True)
    auto.add_argument("--metric", choices=("lcs", "dtw"), default="lcs")
    auto.add_argument("--runs", type=int, default=3)
    auto.add_argument("--seed", type=_parse_seeds, help="comma-separated, one per run")
    auto.add_argument("--activity-pct", type=_percent, default=100.0)
    auto.add_argument("--path-pct", type=_percent, default=100.0)
    auto.add_argument("--thresholds", type=_parse_thresholds, default=[500.0, 1000.0])
    auto.add_argument(
        "--complexity-include-endpoints",
        action=argparse.BooleanOptionalAction,
        default=True,
    )
    auto.add_argument("--out", type=Path, required=True)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Prepend flags from a key=value config file; explicit flags win."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        return argv
    path = Path(argv[at + 1])
    if not path.exists():
        raise ingest.ParseError(f"config file {path} does not exist")
    extra: list[str] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ingest.ParseError(f"config line {line!r} is not key=value")
        key, value = line.split("=", 1)
        flag = "--" + key.strip()
        if flag not in argv:
            extra.extend((flag, value.strip()))
    # Insert config-derived flags after the subcommand so argparse scopes them.
    return argv + extra


def _read_log(path: Path) -> ingest.EventLog:
    with open(path, encoding="utf-8", newline="") as fh:
        return ingest.read_event_log_csv(fh)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_json(path: Path, payload: object) -> None:
    _write(path, json.dumps(payload, indent=2) + "\n")


def cmd_fetch(args: argparse.Namespace) -> int:
    spec = bugzilla.FetchSpec(
        base_url=args.base_url.rstrip("/"),
        date_from=args.date_from,
        date_to=args.date_to,
        page_size=args.page_size,
        max_retries=args.max_retries,
        delay_s=args.delay,
    )
    ids = bugzilla.fetch_closed_bug_ids(spec, bugzilla.urllib_transport)
    if args.limit is not None:
        ids = ids[: args.limit]
    records = bugzilla.fetch_history_for_bugs(spec, ids, bugzilla.urllib_transport)
    payload = [
        {
            "bug_id": r.bug_id,
            "who": r.who,
            "when": ingest.format_timestamp(r.when),
            "what": r.what,
            "removed": r.removed,
            "added": r.added,
        }
        for r in records
    ]
    _write_json(args.out / "history.json", payload)
    print(f"fetched {len(ids)} bugs, {len(records)} history records")
    return 0


def cmd_ingest(args: argparse.Namespace) -> int:
    fmt = args.format or ("json" if args.input.suffix.lower() == ".json" else "csv")
    with open(args.input, encoding="utf-8", newline="") as fh:
        records = ingest.parse_history_records(fh, fmt)
    if args.catalog and args.catalog.exists():
        with open(args.catalog, encoding="utf-8", newline="") as fh:
            catalog = ingest.read_catalog_csv(fh)
    else:
        catalog = ingest.ActivityCatalog()
    log = ingest.build_event_log(records, catalog)

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "event_log.csv", "w", encoding="utf-8", newline="") as fh:
        ingest.write_event_log_csv(log, fh)
    with open(args.out / "catalog.csv", "w", encoding="utf-8", newline="") as fh:
        ingest.write_catalog_csv(catalog, fh)
    print(f"ingested {len(records)} records into {len(log)} events")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    log = _read_log(args.input)
    traces = ingest.to_sequential(log)
    metric = Metric(args.metric)
    cluster_set = clustering.k_medoid(traces, args.k, metric, args.seed)

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "assignment.csv", "w", encoding="utf-8", newline="") as fh:
        clustering.write_assignment_csv(cluster_set, traces, fh)
    for i, sublog in enumerate(clustering.cluster_sublogs(cluster_set, log)):
        with open(args.out / f"cluster_{i}.csv", "w", encoding="utf-8", newline="") as fh:
            ingest.write_event_log_csv(sublog, fh)
    print(f"clustered {len(traces)} traces into {args.k} clusters "
          f"(total cost {cluster_set.total_cost})")
    return 0


def cmd_discover(args: argparse.Namespace) -> int:
    log = _read_log(args.input)
    model = discovery.discover_model(log, args.activity_pct, args.path_pct)
    model = discovery.annotate_durations(model, log)
    _write(args.out / f"model_{args.index}.xml", discovery.export_model_xml(model))
    _write(args.out / f"model_{args.index}.dot", discovery.export_dot(model))
    print(f"discovered model with {len(model.nodes)} activities, "
          f"{len(model.edges)} transitions")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    log = _read_log(args.input)
    model_xml = args.model.read_text(encoding="utf-8")
    c = metrics.complexity(model_xml, args.complexity_include_endpoints)
    f = metrics.fitness(model_xml, log)
    report = metrics.weighted_goodness([(c, f, len(ingest.to_sequential(log)))])
    _write_json(args.out / "goodness.json", metrics.goodness_to_dict(report))
    print(f"complexity {c}, fitness {f:.3f}, g_ratio {report.g_ratio:.6f}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    log = _read_log(args.input)
    model = discovery.import_model_xml(args.model.read_text(encoding="utf-8"))
    loops = analytics.loop_report(log)
    reopen = analytics.reopen_analysis(log)
    necks = analytics.bottlenecks(model, args.thresholds)
    _write_json(
        args.out / f"analytics_{args.index}.json",
        {
            "loops": analytics.loop_report_to_dict(loops),
            "reopen": analytics.reopen_report_to_dict(reopen),
            "bottlenecks": analytics.bottleneck_report_to_dict(necks),
        },
    )
    name = str(args.index)
    table = analytics.cluster_comparison(loops, [])
    _write(args.out / f"loops_{name}.txt", table.render())
    with open(args.out / f"reopen_hist_{name}.csv", "w", encoding="utf-8", newline="") as fh:
        analytics.write_histogram_csv(
            [(f, name, stat.percentage) for f, stat in reopen.per_factor.items()], fh
        )
    with open(args.out / f"bottleneck_hist_{name}.csv", "w", encoding="utf-8", newline="") as fh:
        analytics.write_histogram_csv(
            [(f">{theta:g}d", name, pct) for theta, pct in necks.pct_over.items()], fh
        )
    print(f"analyzed {report_summary(loops, reopen, necks)}")
    return 0


def report_summary(
    loops: analytics.LoopReport,
    reopen: analytics.ReopenReport,
    necks: analytics.BottleneckReport,
) -> str:
    return (
        f"{sum(loops.self_loops.values())} self-loops, "
        f"{reopen.total_cases} cases, {len(necks.transitions)} transitions"
    )


def cmd_autocluster(args: argparse.Namespace) -> int:
    log = _read_log(args.input)
    traces = ingest.to_sequential(log)
    metric = Metric(args.metric)
    seeds = args.seed if args.seed else list(range(1, args.runs + 1))
    best, reports = clustering.select_best_cluster_set(
        log,
        args.k,
        metric,
        runs=args.runs,
        seeds=seeds,
        include_endpoints=args.complexity_include_endpoints,
    )
    winner = clustering.pick_best_run(reports)

    args.out.mkdir(parents=True, exist_ok=True)
    main_model = discovery.annotate_durations(
        discovery.discover_model(log, args.activity_pct, args.path_pct), log
    )
    main_xml = discovery.export_model_xml(main_model)
    _write(args.out / "main_model.xml", main_xml)
    _write(args.out / "main_model.dot", discovery.export_dot(main_model))
    main_complexity = metrics.complexity(main_xml, args.complexity_include_endpoints)

    with open(args.out / "assignment.csv", "w", encoding="utf-8", newline="") as fh:
        clustering.write_assignment_csv(best, traces, fh)

    loop_reports = []
    hist_reopen: list[tuple[str, str, float]] = []
    hist_neck: list[tuple[str, str, float]] = []

    def analyze_one(name: str, sublog: ingest.EventLog, model) -> None:
        loops = analytics.loop_report(sublog)
        reopen = analytics.reopen_analysis(sublog)
        necks = analytics.bottlenecks(model, args.thresholds)
        loop_reports.append(loops)
        for factor, stat in reopen.per_factor.items():
            hist_reopen.append((factor, name, stat.percentage))
        for theta, pct in necks.pct_over.items():
            hist_neck.append((f">{theta:g}d", name, pct))
        _write_json(
            args.out / f"analytics_{name}.json",
            {
                "loops": analytics.loop_report_to_dict(loops),
                "reopen": analytics.reopen_report_to_dict(reopen),
                "bottlenecks": analytics.bottleneck_report_to_dict(necks),
            },
        )

    analyze_one("main", log, main_model)
    for i, sublog in enumerate(clustering.cluster_sublogs(best, log)):
        with open(args.out / f"cluster_{i}.csv", "w", encoding="utf-8", newline="") as fh:
            ingest.write_event_log_csv(sublog, fh)
        model = discovery.annotate_durations(
            discovery.discover_model(sublog, 100.0, 100.0), sublog
        )
        _write(args.out / f"model_{i}.xml", discovery.export_model_xml(model))
        _write(args.out / f"model_{i}.dot", discovery.export_dot(model))
        analyze_one(str(i), sublog, model)

    _write_json(
        args.out / "goodness.json",
        metrics.goodness_to_dict(reports[winner], main_complexity),
    )
    table = analytics.cluster_comparison(loop_reports[0], loop_reports[1:])
    _write(args.out / "loops.txt", table.render())
    with open(args.out / "reopen_hist.csv", "w", encoding="utf-8", newline="") as fh:
        analytics.write_histogram_csv(hist_reopen, fh)
    with open(args.out / "bottleneck_hist.csv", "w", encoding="utf-8", newline="") as fh:
        analytics.write_histogram_csv(hist_neck, fh)
    _write_json(
        args.out / "selection.json",
        {
            "selected_run": winner + 1,
            "selected_seed": seeds[winner],
            "g_ratio": reports[winner].g_ratio,
            "runs": [
                {
                    "run": i + 1,
                    "seed": seeds[i],
                    "c_score": r.c_score,
                    "f_score": r.f_score,
                    "g_ratio": r.g_ratio,
                    "selected": i == winner,
                }
                for i, r in enumerate(reports)
            ],
        },
    )
    print(f"selected run {winner + 1} of {args.runs} "
          f"(seed {seeds[winner]}, g_ratio {reports[winner].g_ratio:.6f})")
    return 0


_COMMANDS = {
    "fetch": cmd_fetch,
    "ingest": cmd_ingest,
    "cluster": cmd_cluster,
    "discover": cmd_discover,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
    "autocluster": cmd_autocluster,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (ingest.ParseError, discovery.ModelXmlError, bugzilla.DecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, bugzilla.TransportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
