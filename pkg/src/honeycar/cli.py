"""Command-line interface: ``honeycar {ingest,sweep,decide,simulate}``.

Data goes to ``--out`` (or stdout); diagnostics go to stderr. Outputs are a
pure function of the flags and input files.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import economics, ingest, report, sim, solver
from .model import (
    BudgetContext,
    DomainError,
    HoneypotKind,
    HoneypotProfile,
    KindOutcome,
    PenaltyMode,
    Variant,
)

DEFAULT_M_MAX = 6


class CLIError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    catalog: Optional[str]
    nvd_feed: Optional[str]
    honeypot: str
    T: float
    beta: float
    lambda_lih: float
    lambda_hih: float
    alpha_lih: float
    alpha_hih: float
    m_max: int
    variant: str
    mode: str
    multistart: int
    seed: int
    budget: Optional[float]
    loss: Optional[float]
    cost_lih: float
    cost_hih: float
    rounds: str
    out: Optional[str]
    format: str

    def __post_init__(self):
        if (self.catalog is None) == (self.nvd_feed is None):
            raise CLIError("exactly one of --catalog and --nvd-feed is required")
        if not 0.0 < self.beta <= 1.0:
            raise CLIError("--beta must lie in (0, 1]")
        if self.m_max < 1:
            raise CLIError("--m-max must be >= 1")
        if self.multistart < 0:
            raise CLIError("--multistart must be >= 0")

    def kinds(self) -> list[HoneypotKind]:
        if self.honeypot == "both":
            return [HoneypotKind.LIH, HoneypotKind.HIH]
        return [HoneypotKind(self.honeypot)]

    def profile(self, kind: HoneypotKind) -> HoneypotProfile:
        try:
            if kind is HoneypotKind.LIH:
                return HoneypotProfile.lih(self.cost_lih, self.lambda_lih, self.alpha_lih)
            return HoneypotProfile.hih(self.cost_hih, self.lambda_hih, self.alpha_hih)
        except ValueError as exc:
            raise CLIError(f"{kind.name} profile: {exc}") from None

    def params(self) -> solver.GameParams:
        return solver.GameParams(
            time_constant=self.T,
            beta=self.beta,
            variant=Variant(self.variant),
            penalty_mode=PenaltyMode(self.mode),
        )

    def options(self) -> solver.SolverOptions:
        return solver.SolverOptions(
            multistart_count=max(self.multistart, 1),
            multistart=self.multistart > 0,
            seed=self.seed,
        )

    def echo(self) -> dict:
        return asdict(self)


def load_catalog(config: RunConfig) -> ingest.Catalog:
    path = Path(config.catalog or config.nvd_feed)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None
    if config.catalog is not None:
        return ingest.parse_catalog_csv(text, name=path.name)
    return ingest.parse_nvd_feed(text, name=path.name)


def eligible_for(catalog, profile):
    return ingest.game_vulnerabilities(ingest.filter_candidates(catalog, profile))


def _emit(text: str, config: RunConfig) -> None:
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _warn(message: str) -> None:
    print(f"honeycar: warning: {message}", file=sys.stderr)


def cmd_ingest(config: RunConfig) -> int:
    catalog = load_catalog(config)
    if not catalog.records:
        _warn("catalog contains no records")
    if catalog.skipped:
        _warn(f"{catalog.skipped} feed item(s) lacked CVSS metrics and were skipped")
    per_kind = {}
    table = []
    for kind in config.kinds():
        profile = config.profile(kind)
        records = ingest.filter_candidates(catalog, profile)
        per_kind[kind.value] = len(records)
        for rec in records:
            v = ingest.derive_game_vulnerability(rec)
            table.append({
                "kind": kind.value,
                "cve_id": rec.cve_id,
                "cvss_score": rec.cvss_score,
                "complexity": rec.complexity.name,
                "exploit_time": v.exploit_time,
                "open_cost": v.open_cost,
                "patch_cost": v.patch_cost,
            })
    if config.format == "csv":
        for kind, count in per_kind.items():
            print(f"honeycar: {kind} eligible: {count}", file=sys.stderr)
        lines = ["kind,cve_id,cvss_score,complexity,exploit_time,open_cost,patch_cost"]
        lines += [
            f"{r['kind']},{r['cve_id']},{r['cvss_score']!r},{r['complexity']},"
            f"{r['exploit_time']!r},{r['open_cost']!r},{r['patch_cost']!r}"
            for r in table
        ]
        _emit("\n".join(lines) + "\n", config)
    else:
        _emit(report.dump_report("ingest", config.echo(), {
            "source": catalog.source,
            "records": len(catalog.records),
            "skipped": catalog.skipped,
            "eligible": per_kind,
            "table": table,
        }), config)
    return 0


def _sweep_kind(catalog, config: RunConfig, kind: HoneypotKind):
    profile = config.profile(kind)
    eligible = eligible_for(catalog, profile)
    if not eligible:
        _warn(f"no eligible vulnerabilities for {kind.name}")
        return []
    m_max = min(config.m_max, len(eligible))
    return solver.cardinality_sweep(eligible, m_max, config.params(), config.options(), profile)


def cmd_sweep(config: RunConfig) -> int:
    catalog = load_catalog(config)
    rows = []
    for kind in config.kinds():
        rows.extend(_sweep_kind(catalog, config, kind))
    notes = report.conformance_note(rows)
    if config.format == "csv":
        _emit(report.sweep_csv(rows), config)
        sys.stderr.write(report.conformance_text(notes))
    else:
        _emit(report.dump_report("sweep", config.echo(), {"rows": rows, "conformance": notes}), config)
    return 0


def _best_outcome(rows) -> Optional[KindOutcome]:
    scored = [r for r in rows if r.breakdown is not None]
    if not scored:
        return None
    best = max(scored, key=lambda r: (r.breakdown.utility, -r.m))
    return KindOutcome(best.breakdown.utility, best.breakdown, best.equilibrium, best.m, best.subset)


def cmd_decide(config: RunConfig, utility_rounds: float = 1.0) -> int:
    if config.budget is None or config.loss is None:
        raise CLIError("decide needs --budget and --loss")
    context = BudgetContext(
        budget=config.budget,
        expected_loss=config.loss,
        lih_profile=config.profile(HoneypotKind.LIH),
        hih_profile=config.profile(HoneypotKind.HIH),
    )
    per_type = {}
    if context.expected_loss >= context.budget:
        catalog = load_catalog(config)
        for kind in HoneypotKind:
            outcome = _best_outcome(_sweep_kind(catalog, config, kind))
            if outcome is None:
                raise CLIError(f"no playable configuration for {kind.name}")
            per_type[kind] = outcome
    decision = economics.invest_decision(
        context, {k: o.utility for k, o in per_type.items()}, utility_rounds, per_type
    )
    body = {"decision": decision, "utility_rounds": utility_rounds}
    if config.format == "csv":
        _emit(report.key_value_csv({"schema_version": report.SCHEMA_VERSION, **body}), config)
    else:
        _emit(report.dump_report("decide", config.echo(), body), config)
    return 0


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise CLIError(f"not a comma-separated list of numbers: {text!r}") from None


def cmd_simulate(config: RunConfig, policy: sim.AttackerPolicy, trace: Optional[str] = None,
                 pin_x: Optional[str] = None, pin_nu: Optional[float] = None) -> int:
    if config.honeypot == "both":
        raise CLIError("simulate needs a single --honeypot kind (lih or hih)")
    kind = HoneypotKind(config.honeypot)
    catalog = load_catalog(config)
    eligible = eligible_for(catalog, config.profile(kind))
    if not eligible:
        raise CLIError(f"no eligible vulnerabilities for {kind.name}")
    m = min(config.m_max, len(eligible))
    if pin_x is None:
        row = solver.cardinality_sweep(eligible, m, config.params(), config.options())[-1]
        by_id = {v.id: v for v in eligible}
        instance = solver.make_instance([by_id[i] for i in row.subset], config.params())
        eq = row.equilibrium
    else:
        # A pinned strategy refers to the first m eligible records in catalog order.
        instance = solver.make_instance(eligible[:m], config.params())
        x = _parse_vector(pin_x)
        if len(x) != instance.size:
            raise CLIError(f"--pin-x has {len(x)} entries, the offered set has {instance.size}")
        eq, _ = economics.evaluate_configuration(
            instance.offered, config.profile(kind), config.params(), config.options(),
            pinned_x=x, pinned_value=pin_nu,
        )
    rounds = instance.size if config.rounds == "m" else int(config.rounds)
    events, stats = sim.run_rounds(instance, eq.x, policy, rounds, config.seed)
    validation = sim.compare_to_analytic(stats, instance, eq.x)
    if not stats.standard_errors_defined:
        _warn("standard errors are undefined for this few rounds")
    if trace:
        with open(trace, "w", encoding="utf-8", newline="") as fh:
            sim.write_trace_csv(events, instance.ids, fh)
    body = {
        "kind": kind,
        "subset": list(instance.ids),
        "equilibrium": eq,
        "stats": stats,
        "validation": validation,
        "standard_errors_defined": stats.standard_errors_defined,
    }
    if config.format == "csv":
        _emit(report.key_value_csv({"schema_version": report.SCHEMA_VERSION, **body}), config)
    else:
        _emit(report.dump_report("simulate", config.echo(), body), config)
    return 0


def _rounds_arg(text: str) -> str:
    if text == "m":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'm'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("rounds must be >= 1")
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--catalog", help="catalog CSV")
    src.add_argument("--nvd-feed", help="NVD JSON 1.1 feed")
    common.add_argument("--honeypot", choices=["lih", "hih", "both"], default=None)
    common.add_argument("--T", type=float, default=4.0, help="time constant, must exceed every exploit time")
    common.add_argument("--beta", type=float, default=0.5)
    common.add_argument("--lambda-lih", type=float, default=0.4)
    common.add_argument("--lambda-hih", type=float, default=0.6)
    common.add_argument("--alpha-lih", type=float, default=0.5)
    common.add_argument("--alpha-hih", type=float, default=0.7)
    common.add_argument("--m-max", type=int, default=DEFAULT_M_MAX)
    common.add_argument("--variant", choices=["a", "b"], default="a")
    common.add_argument("--mode", choices=["literal", "signed"], default="literal")
    common.add_argument("--multistart", type=int, default=32,
                        help="random starts for variant b; 0 runs one descent from the uniform point")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=float)
    common.add_argument("--loss", type=float)
    common.add_argument("--cost-lih", type=float, default=0.0)
    common.add_argument("--cost-hih", type=float, default=0.0)
    common.add_argument("--rounds", type=_rounds_arg, default="10000",
                        help="simulated rounds, or 'm' for one round per offered vulnerability")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "report"], default=None)

    parser = argparse.ArgumentParser(prog="honeycar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse a catalog and list eligible vulnerabilities")
    sub.add_parser("sweep", parents=[common], help="solve the game for every offered-set size")
    p_decide = sub.add_parser("decide", parents=[common], help="investment decision and honeypot type")
    p_decide.add_argument("--utility-rounds", type=float, default=1.0,
                          help="multiplier applied to single-round utilities in the residual budget")
    p_sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo run of the repeated game")
    p_sim.add_argument("--policy", choices=[p.value for p in sim.AttackerPolicy], default="best-response")
    p_sim.add_argument("--trace", help="write the per-round event trace CSV here")
    p_sim.add_argument("--pin-x", help="comma-separated strategy to simulate instead of the solved one")
    p_sim.add_argument("--pin-nu", type=float, help="externally reported value for a pinned strategy")
    return parser


_DEFAULT_FORMAT = {"ingest": "report", "sweep": "csv", "decide": "report", "simulate": "report"}
_DEFAULT_HONEYPOT = {"ingest": "both", "sweep": "both", "decide": "both", "simulate": "hih"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "decide" and (args.budget is None or args.loss is None):
        parser.error("decide requires --budget and --loss")
    try:
        config = RunConfig(
            catalog=args.catalog,
            nvd_feed=args.nvd_feed,
            honeypot=args.honeypot or _DEFAULT_HONEYPOT[args.command],
            T=args.T,
            beta=args.beta,
            lambda_lih=args.lambda_lih,
            lambda_hih=args.lambda_hih,
            alpha_lih=args.alpha_lih,
            alpha_hih=args.alpha_hih,
            m_max=args.m_max,
            variant=args.variant,
            mode=args.mode,
            multistart=args.multistart,
            seed=args.seed,
            budget=args.budget,
            loss=args.loss,
            cost_lih=args.cost_lih,
            cost_hih=args.cost_hih,
            rounds=args.rounds,
            out=args.out,
            format=args.format or _DEFAULT_FORMAT[args.command],
        )
        if args.command == "ingest":
            return cmd_ingest(config)
        if args.command == "sweep":
            return cmd_sweep(config)
        if args.command == "decide":
            return cmd_decide(config, args.utility_rounds)
        return cmd_simulate(config, sim.AttackerPolicy(args.policy), args.trace, args.pin_x, args.pin_nu)
    except CLIError as exc:
        print(f"honeycar: error: {exc}", file=sys.stderr)
        return 2
    except (ingest.CatalogError, DomainError, solver.ConvergenceError, ValueError) as exc:
        print(f"honeycar: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
