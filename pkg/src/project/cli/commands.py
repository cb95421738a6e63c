"""
Implementations of the bandspectra subcommands.

Each command takes the parsed arguments and the run context, writes its table
to stdout (logs go to stderr) and returns an exit code.
"""
import json
import sys
from fractions import Fraction
from typing import Any, List, Optional, Sequence, TextIO

from src.core.sampling.entry_distribution import EntryDistribution
from src.core.utils.config_manager import ConfigManager
from src.core.utils.report_logger import ReportLogger
from src.core.utils.report_writer import ReportWriter, format_cell
from src.core.utils.run_context import RunContext
from src.project.cli.verify_suite import VerifySuite
from src.project.spectra import combinatorics, metrics, moments, simulate

logger = ReportLogger()

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_NUMERICAL = 4

# `simulate --hutchinson` given without a count
CONFIGURED_PROBES = "configured"


def print_table(columns: Sequence[str], rows: Sequence[Sequence[Any]], stream: Optional[TextIO] = None):
    """Left-aligned plain-text table."""
    stream = stream or sys.stdout
    cells = [list(columns)] + [[format_cell(cell) for cell in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    for row in cells:
        stream.write("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() + "\n")


def _float_cell(value: Any) -> str:
    return f"{float(value):.10g}"


# ============================================
# moments
# ============================================

def cmd_moments(args, context: RunContext) -> int:
    gamma = args.gamma if args.gamma is not None else args.y / 2
    rows = moments.moment_table(args.lmax, gamma if args.exact else float(gamma))
    columns = ["l", "polynomial", f"m_l(gamma={format_cell(gamma)})", f"m_l(y={format_cell(2 * gamma)})"]
    render = format_cell if args.exact else _float_cell
    table = [[row.order, str(row.polynomial), render(row.value_gamma), render(row.value_y)] for row in rows]
    print_table(columns, table)
    if args.out:
        coefficient_rows = [[row.order, " ".join(row.polynomial.coefficient_strings()), row.value_gamma, row.value_y]
                            for row in rows]
        ReportWriter(args.out, context).write_table(
            "moments", ["l", "coefficients", "value_gamma", "value_y"], coefficient_rows,
            {'gamma': gamma, 'y': 2 * gamma, 'exact': args.exact},
        )
    return EXIT_OK


# ============================================
# simulate
# ============================================

def _hutchinson_probes(args) -> int:
    if args.hutchinson == CONFIGURED_PROBES:
        return ConfigManager().get_hutchinson_probes()
    return args.hutchinson or 0


def _simulation_config(args) -> simulate.SimulationConfig:
    values = {'distribution': args.dist, 'replicates': args.reps, 'seed': args.seed}
    if args.preset:
        values.update(ConfigManager().get_preset(args.preset))
    for key in ('p', 'n', 'd'):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    missing = [key for key in ('p', 'n', 'd') if key not in values]
    if missing:
        raise ValueError(f"missing --{', --'.join(missing)} (give them or use --preset)")
    return simulate.SimulationConfig(**values)


def cmd_simulate(args, context: RunContext) -> int:
    config = _simulation_config(args)
    max_order = args.lmax or ConfigManager().get_max_order()
    probes = _hutchinson_probes(args)
    samples = simulate.run_ensemble(config, max_order=max_order, want_eigenvalues=args.eig,
                                    workers=args.workers, hutchinson_probes=probes,
                                    backend=args.backend)
    summary = simulate.summarize(samples)
    out_dir = args.out or ConfigManager().get_output_directory()
    writer = ReportWriter(out_dir, context)
    metadata = config.metadata()

    columns = ["replicate"] + [f"m_{l}" for l in range(1, max_order + 1)]
    if args.eig:
        columns += ["lambda_min", "lambda_max"]
    rows = []
    for sample in samples:
        row = [sample.replicate_index] + list(sample.empirical_moments)
        if args.eig:
            row += [sample.min_eigenvalue, sample.max_eigenvalue]
        rows.append(row)
    writer.write_table("ensemble", columns, rows, metadata)

    if args.eig:
        histogram = simulate.histogram(samples, bins=args.bins)
        y = float(config.y)
        reference = moments.mp_density(histogram.centers, y) if y > 0 else [None] * len(histogram.densities)
        writer.write_table(
            "histogram", ["bin_left", "bin_right", "density", "mp_density"],
            [[left, right, density, ref] for left, right, density, ref
             in zip(histogram.edges[:-1], histogram.edges[1:], histogram.densities, reference)],
            metadata,
        )

    if probes:
        estimate_rows = []
        for sample in samples:
            for l, estimate in enumerate(sample.trace_estimates, start=1):
                estimate_rows.append([sample.replicate_index, l, sample.empirical_moments[l - 1] * config.p,
                                      estimate.estimate, estimate.standard_error, estimate.probes])
        writer.write_table("trace_estimates",
                           ["replicate", "l", "trace", "estimate", "standard_error", "probes"],
                           estimate_rows, metadata)

    theory = [moments.limit_moment_polynomial(l) for l in range(1, max_order + 1)]
    report = metrics.moment_report(summary.mean_moments, theory, config.gamma)
    report_columns = ["l", "empirical", "theory_gamma", "theory_y", "rel_err_gamma", "rel_err_y", "preferred"]
    report_rows = [[r.order, r.empirical, r.theory_gamma, r.theory_y, r.relative_error_gamma,
                    r.relative_error_y, r.preferred] for r in report]
    writer.write_table("moment_report", report_columns, report_rows, metadata)

    print_table(report_columns, [[row[0]] + [_float_cell(v) for v in row[1:6]] + [row[6]] for row in report_rows])
    if summary.max_eigenvalue is not None:
        bound = moments.support_bound(float(config.y))
        sys.stdout.write(f"lambda_min = {_float_cell(summary.min_eigenvalue)}, "
                         f"lambda_max = {_float_cell(summary.max_eigenvalue)}, "
                         f"(1 + sqrt(y))^2 = {_float_cell(bound)}\n")
    return EXIT_OK


# ============================================
# trees
# ============================================

def cmd_trees(args, context: RunContext) -> int:
    if args.l < 1:
        raise ValueError(f"--l must be >= 1, got {args.l}")
    rows = []
    total = [Fraction(0)] * args.l
    for tree in combinatorics.enumerate_canonical_trees(args.l):
        r, weight = moments.tree_contribution(tree)
        total[r] += weight
        term = moments.MomentPolynomial(args.l, tuple(weight if i == r else Fraction(0) for i in range(args.l)))
        if args.json:
            record = tree.to_dict()
            record['weight'] = format_cell(weight)
            sys.stdout.write(json.dumps(record, separators=(",", ":")) + "\n")
        else:
            rows.append([" ".join(map(str, tree.child_counts)), r, str(tree.profile), weight, str(term)])
    if not args.json:
        print_table(["tree", "r", "profile", "weight", "contribution"], rows)
    logger.info(f"m_{args.l} = {moments.MomentPolynomial(args.l, tuple(total))}")
    return EXIT_OK


# ============================================
# verify
# ============================================

def cmd_verify(args, context: RunContext) -> int:
    results = VerifySuite().run(args.suite)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        sys.stdout.write(f"{status}  {result.name}" + (f"  ({result.detail})" if result.detail else "") + "\n")
    failed = [result.name for result in results if not result.passed]
    sys.stdout.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return EXIT_OK if not failed else EXIT_VERIFY_FAILED


def distribution_names() -> List[str]:
    return EntryDistribution.get_all_distributions()
