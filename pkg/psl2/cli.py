#!/usr/bin/env python3
"""
PSL2 Subgroups CLI

Command-line interface for counting, sampling and analysing finitely
generated subgroups of PSL2(Z).

Usage:
    python -m psl2.cli count --max-size 36 --format csv
    python -m psl2.cli sample --family fi --size 6 --count 3 --seed 7
    python -m psl2.cli analyze --generators "abaB,babab"
    python -m psl2.cli member --generators "abaB,babab" --word "abab"
    python -m psl2.cli asymptotics --family t2 --max-size 500 --format csv
    python -m psl2.cli stats --family all --size 200 --samples 500 --seed 1
    python -m psl2.cli verify --oracle --max-size 7
    python -m psl2.cli export --generators "ab" --format dot

Machine-readable output goes to stdout, progress and status lines to stderr.
Exit codes: 0 success, 2 usage error, 3 invalid size / family / type,
1 any other failure.

Author: PSL2 Subgroups Team
License: MIT
"""

import functools
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import click
import numpy as np
import pandas as pd
from tqdm import tqdm

from psl2.config import FAMILIES, config
from psl2.exceptions import (
    InvalidGraphError, InvalidSizeError, NotRealizableError, PSL2Error, UnknownFamilyError,
)
from psl2.schemas import AnalysisReport, CountRow, VerifyReport
from counting.asymptotics import (
    FORMULAS, bender_diagnostic, connectivity_report, deviation_exponent, expected_type,
    probability_reports, ratio_table,
)
from counting.cache import TableCache
from counting.tables import CountingEngine
from oracle.brute import brute_counts
from sampling.subgroups import Sampler
from stallings.export import graph_from_json, graph_to_dot, graph_to_json
from stallings.graphs import (
    StallingsGraph, canonical_form, combinatorial_type, is_cyclically_reduced, membership, stallings_graph,
)
from stallings.properties import access_path_length, basis, index, is_free, isomorphism_type
from stallings.words import parse_generators

logger = logging.getLogger(__name__)

USAGE_EXIT = 2
DOMAIN_EXIT = 3

FAMILY_COLUMNS = {
    "all": "all",
    "fi": "finite_index",
    "crfree": "cr_free",
    "free": "free",
    "frfi": "free_finite_index",
}

SAMPLE_FAMILIES = ("all", "fi", "free", "frfi")
STATS_FAMILIES = ("all", "fi", "free")


@dataclass
class CliConfig:
    """Options shared by every command"""
    cache_dir: Path
    use_cache: bool = True
    verbose: bool = False

    def engine(self) -> CountingEngine:
        cache = TableCache(self.cache_dir) if self.use_cache and config.cache.enabled else None
        return CountingEngine(cache=cache)


def handle_errors(func):
    """Map library errors onto exit codes"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (InvalidSizeError, UnknownFamilyError, NotRealizableError) as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(DOMAIN_EXIT)
        except PSL2Error as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(1)
    return wrapper


def _check_family(family: str, allowed) -> str:
    if family not in allowed:
        raise UnknownFamilyError(f"Unknown family {family!r}; expected one of {', '.join(allowed)}")
    return family


def _check_size(n: int, name: str = "size", minimum: int = 1) -> int:
    if n < minimum:
        raise InvalidSizeError(f"{name} must be at least {minimum}, got {n}")
    return n


def _status(message: str):
    click.echo(message, err=True)


def _emit_frame(df: pd.DataFrame, fmt: str):
    if fmt == "csv":
        click.echo(df.to_csv(index=False), nl=False)
    elif fmt == "json":
        click.echo(df.to_json(orient="records"))
    else:
        click.echo(df.to_string(index=False))


def _load_graph(generators: Optional[str], graph_file: Optional[str]) -> StallingsGraph:
    if (generators is None) == (graph_file is None):
        raise click.UsageError("give exactly one of --generators and --graph-file")
    if generators is not None:
        return stallings_graph(parse_generators(generators))
    try:
        text = Path(graph_file).read_text()
    except OSError as e:
        raise InvalidGraphError(f"cannot read {graph_file}: {e}") from e
    return graph_from_json(text)


@click.group()
@click.option('--cache-dir', type=click.Path(file_okay=False), default=None,
              help='Table cache directory (default: PSL2_CACHE_DIR)')
@click.option('--no-cache', is_flag=True, help='Neither read nor write cached tables')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
@click.pass_context
def cli(ctx, cache_dir, no_cache, verbose):
    """Subgroups of PSL2(Z) via Stallings graphs"""
    level = logging.DEBUG if verbose else getattr(logging, config.log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    for error in config.validate_config():
        logger.warning(f"Configuration: {error}")
    ctx.obj = CliConfig(
        cache_dir=Path(cache_dir) if cache_dir else config.cache.directory,
        use_cache=not no_cache,
        verbose=verbose,
    )


@cli.command()
@click.option('--family', default=None, help='Single family column: ' + ', '.join(FAMILIES))
@click.option('--max-size', required=True, type=int, help='Largest size')
@click.option('--format', 'fmt', default='csv', type=click.Choice(['csv', 'json', 'text']),
              help='Output format')
@click.pass_obj
@handle_errors
def count(obj: CliConfig, family, max_size, fmt):
    """Exact numbers of subgroups of each size"""
    if family is not None:
        _check_family(family, FAMILIES)
    _check_size(max_size, "--max-size")
    engine = obj.engine()
    _status(f"📊 Counting subgroups up to size {max_size}...")
    df = engine.count_table(max_size)
    if family is not None:
        df = df[["size", FAMILY_COLUMNS[family]]]
    if fmt == "json" and family is None:
        rows = [CountRow(**{k: int(v) for k, v in row.items()}).model_dump() for row in df.to_dict("records")]
        click.echo(json.dumps(rows))
    elif fmt == "json":
        click.echo(json.dumps([{k: int(v) for k, v in row.items()} for row in df.to_dict("records")]))
    else:
        _emit_frame(df, fmt)
    _status("✅ Done")


@cli.command()
@click.option('--family', default='all', help='Family: ' + ', '.join(SAMPLE_FAMILIES))
@click.option('--size', required=True, type=int, help='Subgroup size')
@click.option('--count', 'how_many', default=1, type=click.IntRange(min=1), help='Number of samples')
@click.option('--seed', default=None, type=click.IntRange(min=0, max=2 ** 64 - 1),
              help='Random seed (printed when omitted)')
@click.option('--format', 'fmt', default='json', type=click.Choice(['json', 'dot']), help='Output format')
@click.option('--output', '-o', default=None, type=click.Path(), help='Output file (json) or directory (dot)')
@click.option('--jobs', default=1, type=click.IntRange(min=1), help='Parallel workers')
@click.pass_obj
@handle_errors
def sample(obj: CliConfig, family, size, how_many, seed, fmt, output, jobs):
    """Uniform random subgroups of a given size"""
    _check_family(family, SAMPLE_FAMILIES)
    _check_size(size)
    sampler = Sampler(obj.engine(), seed if seed is not None else config.default_seed)
    _status(f"🎲 Seed: {sampler.seed}")
    graphs = sampler.sample_many(family, size, how_many, jobs)

    if fmt == "json":
        lines = "\n".join(graph_to_json(g) for g in graphs) + "\n"
        if output:
            Path(output).write_text(lines)
            _status(f"💾 Saved {len(graphs)} graphs to {output}")
        else:
            click.echo(lines, nl=False)
    elif output:
        directory = Path(output)
        directory.mkdir(parents=True, exist_ok=True)
        for i, g in enumerate(graphs):
            (directory / f"sample-{i}.dot").write_text(graph_to_dot(g, f"sample{i}"))
        _status(f"💾 Saved {len(graphs)} DOT files to {directory}")
    else:
        for i, g in enumerate(graphs):
            click.echo(graph_to_dot(g, f"sample{i}"))
    _status(f"✅ Sampled {len(graphs)} subgroups (acceptance rate {sampler.stats.acceptance_rate:.3f})")


def analysis_report(g: StallingsGraph) -> AnalysisReport:
    idx = index(g)
    free, rank = is_free(g)
    return AnalysisReport(
        combinatorial_type=list(combinatorial_type(g)),
        index=idx if idx != math.inf else "infinite",
        free=free,
        rank=rank,
        isomorphism_type=list(isomorphism_type(g)),
        basis=basis(g).to_dict(),
        cyclically_reduced=is_cyclically_reduced(g),
        canonical_form=canonical_form(g).hex(),
    )


@cli.command()
@click.option('--generators', default=None, help='Comma separated words, e.g. "abaB,babab"')
@click.option('--graph-file', default=None, type=click.Path(dir_okay=False), help='JSON graph file')
@click.option('--format', 'fmt', default='text', type=click.Choice(['json', 'text']), help='Output format')
@handle_errors
def analyze(generators, graph_file, fmt):
    """Index, isomorphism type, freeness and basis of a subgroup"""
    g = _load_graph(generators, graph_file)
    if g.root is None:
        raise InvalidGraphError("analysis needs a rooted graph")
    report = analysis_report(g)

    if fmt == "json":
        click.echo(report.model_dump_json())
        return
    click.echo(f"🔍 Stallings graph: {g.n} vertices")
    click.echo(f"  Combinatorial type (n, k2, k3, l2, l3, m): {tuple(report.combinatorial_type)}")
    click.echo(f"  Index: {report.index}")
    click.echo(f"  Isomorphism type (l2, l3, r): {tuple(report.isomorphism_type)}")
    click.echo(f"  Free: {'yes, rank ' + str(report.rank) if report.free else 'no'}")
    click.echo(f"  Cyclically reduced: {'yes' if report.cyclically_reduced else 'no'}")
    for kind, words in report.basis.items():
        if words:
            click.echo(f"  {kind}: {', '.join(w or 'ε' for w in words)}")


@cli.command()
@click.option('--generators', default=None, help='Comma separated words')
@click.option('--graph-file', default=None, type=click.Path(dir_okay=False), help='JSON graph file')
@click.option('--word', '-w', 'words', multiple=True, required=True, help='Word to test (repeatable)')
@handle_errors
def member(generators, graph_file, words):
    """Decide membership of words in a subgroup"""
    g = _load_graph(generators, graph_file)
    for w in words:
        inside = membership(g, w)
        click.echo(f"{w}\t{'true' if inside else 'false'}")


@cli.command()
@click.option('--family', required=True, help='Coefficient family: ' + ', '.join(sorted(FORMULAS)))
@click.option('--max-size', required=True, type=int, help='Largest size')
@click.option('--min-size', default=1, type=int, help='Smallest size')
@click.option('--step', default=1, type=click.IntRange(min=1), help='Size step')
@click.option('--report', 'kind', default='ratios',
              type=click.Choice(['ratios', 'probabilities', 'connectivity', 'bender']), help='Report kind')
@click.option('--terms', default=2, type=click.IntRange(1, 4), help='Bender terms s (bender report)')
@click.option('--format', 'fmt', default='csv', type=click.Choice(['csv', 'json', 'text']), help='Output format')
@click.pass_obj
@handle_errors
def asymptotics(obj: CliConfig, family, max_size, min_size, step, kind, terms, fmt):
    """Exact coefficients against their asymptotic equivalents"""
    _check_family(family, sorted(FORMULAS))
    _check_size(min_size, "--min-size")
    _check_size(max_size, "--max-size")
    engine = obj.engine()
    sizes = range(min_size, max_size + 1, step)
    if kind == "ratios":
        df = ratio_table(engine, family, sizes)
    elif kind == "probabilities":
        df = probability_reports(engine, sizes)
    elif kind == "connectivity":
        df = connectivity_report(engine, sizes)
    else:
        bender_family = {"gpr_tilde": "gpr", "gfi_tilde": "gfi", "g0_tilde": "g0"}.get(family, family)
        rows = [bender_diagnostic(engine, bender_family, n, terms) for n in sizes if n > terms]
        df = pd.DataFrame([{k: v for k, v in r.to_dict().items() if k != "coefficients"} for r in rows])
    _emit_frame(df, fmt)


def _moment_rows(family: str, n: int, graphs: List[StallingsGraph], engine: CountingEngine,
                 acceptance: float) -> pd.DataFrame:
    types = np.array([tuple(combinatorial_type(g)) for g in graphs], dtype=float)
    ranks = np.array([isomorphism_type(g).r for g in graphs], dtype=float)
    predicted = expected_type(family, n)
    observed = {
        "l2": types[:, 3].mean(),
        "l3": types[:, 4].mean(),
        "k3": types[:, 2].mean(),
        "r": ranks.mean(),
    }
    rows = [{"quantity": f"E[{key}]", "observed": observed[key], "predicted": getattr(predicted, key)}
            for key in observed]

    if family in ("all", "fi"):
        l2 = types[:, 3]
        root = math.sqrt(n)
        for side, r, freq in (("lower", 0.5, np.mean(l2 <= 0.5 * root)), ("upper", 1.5, np.mean(l2 >= 1.5 * root))):
            bound = deviation_exponent(family, "l2", side, r, n)
            rows.append({"quantity": f"P(l2 {'<=' if side == 'lower' else '>='} {r} sqrt(n))",
                         "observed": float(freq), "predicted": math.exp(bound.log_bound)})
    if family == "all":
        rows.append({"quantity": "connectivity acceptance", "observed": acceptance,
                     "predicted": float(engine.connectivity_probability(n))})
    if family == "free":
        lengths = np.array([access_path_length(g) for g in graphs], dtype=float)
        rows.append({"quantity": "E[access path length]", "observed": lengths.mean(), "predicted": np.nan})
    return pd.DataFrame(rows, columns=["quantity", "observed", "predicted"])


@cli.command()
@click.option('--family', default='all', help='Family: ' + ', '.join(STATS_FAMILIES))
@click.option('--size', required=True, type=int, help='Subgroup size (at least 2)')
@click.option('--samples', default=1000, type=click.IntRange(min=1), help='Number of samples')
@click.option('--seed', default=None, type=click.IntRange(min=0, max=2 ** 64 - 1), help='Random seed')
@click.option('--jobs', default=1, type=click.IntRange(min=1), help='Parallel workers')
@click.option('--format', 'fmt', default='text', type=click.Choice(['csv', 'json', 'text']), help='Output format')
@click.pass_obj
@handle_errors
def stats(obj: CliConfig, family, size, samples, seed, jobs, fmt):
    """Monte-Carlo moments of the isomorphism type against predictions"""
    _check_family(family, STATS_FAMILIES)
    _check_size(size, minimum=2)
    engine = obj.engine()
    sampler = Sampler(engine, seed if seed is not None else config.default_seed)
    _status(f"🎲 Seed: {sampler.seed}")
    if jobs > 1:
        graphs = sampler.sample_many(family, size, samples, jobs)
    else:
        sampler.prepare(family, size)
        graphs = [sampler.sample(family, size)
                  for _ in tqdm(range(samples), desc=f"{family} n={size}", unit="sample", disable=None)]
    df = _moment_rows(family, size, graphs, engine, sampler.stats.acceptance_rate)
    _emit_frame(df, fmt)


def _trimmed(row) -> List[int]:
    row = list(row)
    while row and row[-1] == 0:
        row.pop()
    return row


def oracle_results(engine: CountingEngine, max_size: int, progress: bool = False):
    """family -> size -> agreement between enumeration and the counting tables"""
    results = {family: {} for family in FAMILIES}
    for n in range(1, max_size + 1):
        for family in FAMILIES:
            brute = brute_counts(n, family, progress=progress)
            ok = brute.subgroups == engine.family_count(family, n)
            if family == "all" and n >= 2:
                _, connected = engine.gpr_tables(n)
                ok = ok and brute.loops_row() == _trimmed(connected.row(n))
            elif family == "crfree" and n >= 2:
                _, connected = engine.free_tables(n)
                ok = ok and brute.b_edges_row() == _trimmed(connected.row(n))
            elif family == "free":
                ga, gb = engine.one_loop_tables(n)
                ok = ok and brute.by_loop_letter["a"] == ga[n] and brute.by_loop_letter["b"] == gb[n]
            results[family][n] = ok
            if not ok:
                logger.warning(f"Oracle disagreement for {family} at n={n}")
    return results


@cli.command()
@click.option('--oracle/--no-oracle', default=False, help='Cross-check against brute-force enumeration')
@click.option('--max-size', default=7, type=int, help='Largest size')
@click.option('--format', 'fmt', default='json', type=click.Choice(['json', 'text']), help='Output format')
@click.pass_obj
@handle_errors
def verify(obj: CliConfig, oracle, max_size, fmt):
    """Pass/fail matrix of table self-checks or of the brute-force oracle"""
    _check_size(max_size, "--max-size")
    engine = obj.engine()
    if oracle:
        if max_size > config.limits.oracle_max_size:
            raise InvalidSizeError(f"the oracle is limited to sizes <= {config.limits.oracle_max_size}")
        results = oracle_results(engine, max_size, progress=fmt == "text")
    else:
        # exact divisions raise on any inconsistency
        engine.count_table(max_size)
        growth = engine.growth_inequality_holds(max_size)
        results = {"growth": {max_size: growth}}
    report = VerifyReport(max_size=max_size, results=results,
                          passed=all(all(row.values()) for row in results.values()))

    if fmt == "json":
        click.echo(report.model_dump_json())
    else:
        for family, row in report.results.items():
            marks = " ".join(f"{n}:{'✅' if ok else '❌'}" for n, ok in row.items())
            click.echo(f"{family:>8}  {marks}")
        click.echo("✅ All checks passed" if report.passed else "❌ Some checks failed")
    if not report.passed:
        sys.exit(1)


@cli.command()
@click.option('--generators', default=None, help='Comma separated words')
@click.option('--graph-file', default=None, type=click.Path(dir_okay=False), help='JSON graph file')
@click.option('--format', 'fmt', default='json', type=click.Choice(['json', 'dot']), help='Output format')
@click.option('--output', '-o', default=None, type=click.Path(dir_okay=False), help='Output file')
@handle_errors
def export(generators, graph_file, fmt, output):
    """Write the Stallings graph of a subgroup as JSON or DOT"""
    g = _load_graph(generators, graph_file)
    text = graph_to_json(g) + "\n" if fmt == "json" else graph_to_dot(g)
    if output:
        Path(output).write_text(text)
        _status(f"💾 Saved graph to {output}")
    else:
        click.echo(text, nl=False)


def run(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code instead of exiting"""
    try:
        result = cli.main(args=argv, prog_name="psl2", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return USAGE_EXIT
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return 1
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 1)
    return result if isinstance(result, int) else 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
