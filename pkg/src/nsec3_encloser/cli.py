"""Command-line entry point: ``forge <subcommand> ...``."""

import argparse
import asyncio
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .config.settings import get_settings
from .core.names import base32hex_encode, parse_name
from .core.nsec3 import Nsec3Params, nsec3_hash
from .models.fields import parse_salt
from .models.sim_models import SimConfig
from .services.attack_harness import (
    SweepAxis,
    amplification_report,
    loss_table,
    measure_block_time,
    run_parameter_sweep,
    simulate,
    sweep_rows,
)
from .services.param_scanner import aggregate, export_distribution, load_dataset, scan_batch, synthetic_population
from .services.reporting import export_loss_table, export_report, export_sweep
from .services.signers import get_signer
from .services.transport import FixtureTransport, UdpTransport
from .services.zone_forge import build_plain_zone, build_with_retries, load_config, sign_zone, validate_zone
from .services.zonefile import parse_zonefile, write_zone_files
from .utils.exceptions import ConfigurationError, DatasetError, ForgeError, InvariantViolation
from .utils.logging_config import setup_logging, verbosity_to_level

logger = logging.getLogger(__name__)


@dataclass
class CliConfig:
    """Parsed command line: one subcommand plus global options."""

    command: str
    seed: int
    seed_given: bool = False
    verbosity: int = 0
    output_dir: Path = Path("output")
    log_file: Optional[Path] = None
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> "CliConfig":
        values = vars(namespace).copy()
        settings = get_settings()
        seed = values.pop("seed")
        output_dir = values.pop("output_dir")
        log_file = values.pop("log_file")
        return cls(
            command=values.pop("command"),
            seed=settings.DEFAULT_SEED if seed is None else seed,
            seed_given=seed is not None,
            verbosity=values.pop("verbose"),
            output_dir=settings.OUTPUT_DIR if output_dir is None else output_dir,
            log_file=settings.LOG_FILE if log_file is None else log_file,
            options=values,
        )


def _read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DatasetError(f"Cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path} is not valid JSON: {exc}") from exc


def _sim_config(cli: CliConfig) -> SimConfig:
    document = _read_json(cli.options["config"]) if cli.options.get("config") else {}
    if cli.seed_given or "seed" not in document:
        document["seed"] = cli.seed
    if cli.options.get("profile"):
        document["profile"] = cli.options["profile"]
    try:
        cfg = SimConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigurationError("Invalid simulation config", details={"errors": exc.errors(include_url=False)}) from exc
    if cli.options.get("benchmark"):
        cfg = cfg.model_copy(update={"block_time": measure_block_time()})
    return cfg


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def cmd_gen_zone(cli: CliConfig) -> int:
    configs = load_config(_read_json(cli.options["config"]), seed=cli.seed)
    out_dir = cli.options.get("out") or cli.output_dir
    signer = get_signer(cli.options["signer"], seed=cli.seed)
    for cfg in configs:
        zone = build_plain_zone(cfg) if cli.options["plain"] else build_with_retries(cfg, seed=cli.seed)
        zone = sign_zone(zone, signer)
        paths = write_zone_files(zone, out_dir)
        print(f"{cfg.origin}: {len(zone.nsec3_chain)} NSEC3 records -> {paths[0]}")
    return 0


def cmd_validate_zone(cli: CliConfig) -> int:
    path = Path(cli.options["zonefile"])
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"Cannot read zonefile {path}: {exc}") from exc
    zone = parse_zonefile(text)
    report = validate_zone(zone, trials=cli.options["trials"], seed=cli.seed)
    print(report.summary())
    if not report.passed:
        for qname, count in report.counterexamples[:10]:
            print(f"  {qname}: {count} NSEC3 records")
        raise InvariantViolation(f"{len(report.counterexamples)} denials without three NSEC3 records")
    return 0


def cmd_hash(cli: CliConfig) -> int:
    try:
        salt = parse_salt(cli.options["salt"])
    except ValueError as exc:
        raise ConfigurationError(str(exc), config_key="salt") from exc
    params = Nsec3Params(
        algorithm=cli.options["algorithm"],
        iterations=cli.options["iterations"],
        salt=salt,
    )
    print(base32hex_encode(nsec3_hash(parse_name(cli.options["name"]), params)))
    return 0


def cmd_attack_sim(cli: CliConfig) -> int:
    report = simulate(_sim_config(cli))
    out_dir = cli.options.get("out") or cli.output_dir
    export_report(report, out_dir)
    summary = report.summary()
    print(
        f"attack {summary['attack_status']}: {summary['attack_query_blocks']:.0f} blocks/query, "
        f"amplification {summary['amplification_factor']:.1f}x"
    )
    print(
        f"benign: {report.benign_arrivals} sent, {report.benign_lost} lost, "
        f"adjusted loss {report.adjusted_loss_rate:.2%}, peak utilization {summary['peak_utilization']:.2f}"
    )
    return 0


def cmd_sweep(cli: CliConfig) -> int:
    axis = SweepAxis(cli.options["axis"])
    reports = run_parameter_sweep(
        _sim_config(cli), axis, cli.options["values"], workers=cli.options["workers"], progress=cli.verbosity > 0
    )
    out = cli.options.get("out") or Path(cli.output_dir) / f"sweep_{axis.value}.csv"
    export_sweep(sweep_rows(reports, axis), out)
    for report in reports:
        peak = max(sample.utilization for sample in report.step_samples) if report.step_samples else 0.0
        print(
            f"{axis.value}={getattr(report.config, axis.config_field)}: peak step utilization {peak:.2f}, "
            f"adjusted loss {report.adjusted_loss_rate:.2%}"
        )
    return 0


def cmd_amplification(cli: CliConfig) -> int:
    report = amplification_report(_sim_config(cli))
    for key, value in report.to_dict().items():
        print(f"{key}: {value:.3f}" if isinstance(value, float) else f"{key}: {value}")
    return 0


def cmd_loss_table(cli: CliConfig) -> int:
    base = _sim_config(cli)
    rows = loss_table(
        base,
        rates=cli.options["rates"],
        profiles=cli.options["profiles"].split(","),
        seeds=range(cli.seed, cli.seed + cli.options["seeds"]),
    )
    out = cli.options.get("out") or Path(cli.output_dir) / "loss_table.csv"
    export_loss_table(rows, out)
    for row in rows:
        print(f"{row['profile']:>9} {row['rate']:>6}/s  adjusted loss {row['adjusted_loss_rate']:.2%}")
    return 0


def cmd_scan(cli: CliConfig) -> int:
    path = Path(cli.options["input"])
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetError(f"Cannot read domain list {path}: {exc}") from exc
    domains = [parse_name(line.strip()) for line in lines if line.strip() and not line.startswith("#")]
    if cli.options.get("fixtures"):
        transport = FixtureTransport.load(cli.options["fixtures"])
    else:
        transport = UdpTransport(nameserver=cli.options.get("nameserver"))
    results = asyncio.run(
        scan_batch(
            domains,
            transport,
            cli.options["out"],
            concurrency=cli.options.get("concurrency"),
            rate_limit=cli.options["rate"],
            progress=cli.verbosity > 0,
        )
    )
    errors = sum(1 for r in results if r.error)
    print(f"{len(results)} domains probed, {errors} errors -> {cli.options['out']}")
    return 0


def cmd_scan_report(cli: CliConfig) -> int:
    results = synthetic_population() if cli.options["synthetic"] else load_dataset(cli.options["input"])
    summary = aggregate(results)
    export_distribution(summary, cli.options["out"])
    for line in summary.lines():
        print(line)
    return 0


COMMANDS: Dict[str, Callable[[CliConfig], int]] = {
    "gen-zone": cmd_gen_zone,
    "validate-zone": cmd_validate_zone,
    "hash": cmd_hash,
    "attack-sim": cmd_attack_sim,
    "sweep": cmd_sweep,
    "amplification": cmd_amplification,
    "loss-table": cmd_loss_table,
    "scan": cmd_scan,
    "scan-report": cmd_scan_report,
}


# Commands that write under --output-dir unless --out is given.
OUTPUT_COMMANDS = frozenset({"gen-zone", "attack-sim", "sweep", "loss-table"})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="forge", description="NSEC3 closest-encloser resolver load toolkit")
    parser.add_argument("--seed", type=int, default=None, help="Seed for all randomness (default: FORGE_DEFAULT_SEED)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    parser.add_argument("--output-dir", type=Path, default=None, help="Directory for generated artifacts")
    parser.add_argument("--log-file", type=Path, default=None, help="Also write logs to this file")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    gen = sub.add_parser("gen-zone", help="Generate forged NSEC3 zones from a JSON config")
    gen.add_argument("--config", type=Path, required=True)
    gen.add_argument("--out", type=Path, default=None, help="Zone output directory")
    gen.add_argument("--signer", choices=["test", "rsa"], default="test")
    gen.add_argument("--plain", action="store_true", help="Emit a conventional chain instead of the forged one")

    val = sub.add_parser("validate-zone", help="Check that denials always carry three NSEC3 records")
    val.add_argument("zonefile", type=Path)
    val.add_argument("--trials", type=int, default=10000)

    hsh = sub.add_parser("hash", help="Print the NSEC3 hash of a name")
    hsh.add_argument("name")
    hsh.add_argument("--iterations", type=int, default=0)
    hsh.add_argument("--salt", default="-", help="Hex salt or '-'")
    hsh.add_argument("--algorithm", type=int, default=1)

    def _sim_options(cmd: argparse.ArgumentParser) -> None:
        cmd.add_argument("--config", type=Path, default=None, help="Simulation config JSON")
        cmd.add_argument("--profile", choices=["unbound", "bind", "bind9_16", "bind9_18", "powerdns", "knot"])
        cmd.add_argument("--benchmark", action="store_true", help="Measure block time on this host")

    sim = sub.add_parser("attack-sim", help="Simulate a resolver under attack")
    _sim_options(sim)
    sim.add_argument("--out", type=Path, default=None, help="Report directory")

    swp = sub.add_parser("sweep", help="Simulate across iterations, salt length or key size")
    _sim_options(swp)
    swp.add_argument("--axis", choices=[axis.value for axis in SweepAxis], required=True)
    swp.add_argument("--values", type=_int_list, required=True, help="Comma-separated values")
    swp.add_argument("--workers", type=int, default=1)
    swp.add_argument("--out", type=Path, default=None, help="Sweep CSV path")

    amp = sub.add_parser("amplification", help="Report per-query cost amplification")
    _sim_options(amp)

    loss = sub.add_parser("loss-table", help="Benign loss for constant attack rates per resolver profile")
    _sim_options(loss)
    loss.add_argument("--rates", type=_int_list, default=[110, 120, 130, 140, 150])
    loss.add_argument("--profiles", default="unbound,bind,powerdns,knot")
    loss.add_argument("--seeds", type=int, default=1, help="Seeds averaged per cell")
    loss.add_argument("--out", type=Path, default=None)

    scan = sub.add_parser("scan", help="Probe domains for NSEC/NSEC3 parameters")
    scan.add_argument("--input", type=Path, required=True, help="One domain per line")
    scan.add_argument("--out", type=Path, required=True, help="NDJSON dataset, appended and resumed")
    scan.add_argument("--rate", type=float, default=None, help="Queries per second (default: FORGE_SCAN_RATE_LIMIT)")
    scan.add_argument("--concurrency", type=int, default=None)
    scan.add_argument("--nameserver", default=None, help="Send every probe to this address")
    scan.add_argument("--fixtures", type=Path, default=None, help="Replay recorded responses instead of UDP")

    rep = sub.add_parser("scan-report", help="Aggregate a scan dataset into CCDF tables")
    rep.add_argument("--in", dest="input", type=Path, default=None)
    rep.add_argument("--out", type=Path, required=True, help="CCDF CSV path")
    rep.add_argument("--synthetic", action="store_true", help="Use the built-in reference population")
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; 0 on success, 1 on a domain or configuration error, 2 on a usage error."""
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if namespace.command == "scan-report" and not namespace.synthetic and namespace.input is None:
        parser.print_usage(sys.stderr)
        print("forge scan-report: one of --in or --synthetic is required", file=sys.stderr)
        return 2

    cli = CliConfig.from_namespace(namespace)
    settings = get_settings()
    level = verbosity_to_level(cli.verbosity) if cli.verbosity else settings.LOG_LEVEL
    setup_logging(level, cli.log_file, json_file=settings.JSON_LOGS)

    try:
        if cli.command in OUTPUT_COMMANDS and not cli.options.get("out"):
            settings.ensure_directories(cli.output_dir)
        return COMMANDS[cli.command](cli)
    except ForgeError as exc:
        logger.debug(f"{cli.command} failed", exc_info=True)
        print(f"forge {cli.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
