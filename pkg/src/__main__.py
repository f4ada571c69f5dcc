"""PrivGNN Workbench CLI

Command-line interface for privacy accounting, private graph releases and
experiment sweeps.
"""

import logging
import logging.handlers
import sys
from pathlib import Path

import click
import numpy as np
import yaml

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from schemas import ConversionForm, ModelKind, PrivacyParams, SbmSpec
from accounting import budget_table, describe_budget, pate_budget, pate_rdp_curve, privgnn_rdp_curve
from graphs import save_dataset
from models import save_checkpoint
from pipelines import BASELINES, PatePipeline, PrivGnnPipeline, run_baseline
from harness import (
    DEFAULT_PUBLISHED_VALUES,
    compare_to_published,
    generate_sbm,
    load_experiment_config,
    load_published_values,
    load_sbm_spec,
    load_sweep_spec,
    published_accounting_rows,
    read_table,
    reports_table,
    resolve_dataset,
    run_sweep,
    write_record,
    write_table,
)


def setup_logging(level: str = "INFO", logging_config: dict = None):
    """Setup logging configuration."""
    handlers = [logging.StreamHandler()]
    log_file = (logging_config or {}).get('file')
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=int(logging_config.get('max_size_mb', 50)) * 1024 * 1024,
            backupCount=int(logging_config.get('backup_count', 5)),
        ))
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        handlers=handlers,
        force=True,
    )


CONFIG_PATH_KEYS = (
    ('storage', 'results_directory'),
    ('storage', 'published_budgets'),
    ('logging', 'file'),
)


def load_config(config_path: str = "config/config.yaml") -> dict:
    """Load configuration from YAML file.

    Relative storage and log paths are taken relative to the config file.
    """
    try:
        with open(config_path, 'r') as f:
            config = yaml.safe_load(f) or {}
        base = Path(config_path).resolve().parent
        for section, key in CONFIG_PATH_KEYS:
            value = (config.get(section) or {}).get(key)
            if value and not Path(value).is_absolute():
                config[section][key] = str(base / value)
        return config
    except FileNotFoundError:
        click.echo(f"Error: Configuration file not found at {config_path}")
        sys.exit(1)
    except yaml.YAMLError as e:
        click.echo(f"Error parsing configuration file: {e}")
        sys.exit(1)


def _results_dir(config: dict, out: str = None) -> Path:
    return Path(out) if out else Path(config.get('storage', {}).get('results_directory', './results'))


def _max_order(config: dict) -> int:
    return int(config.get('accountant', {}).get('max_order', 32))


@click.group()
@click.option('--config', default='config/config.yaml', help='Configuration file path')
@click.option('--log-level', default=None, help='Logging level (overrides config)')
@click.pass_context
def cli(ctx, config, log_level):
    """PrivGNN Workbench - private GNN releases with RDP accounting."""
    ctx.ensure_object(dict)

    # Load configuration
    ctx.obj['config'] = load_config(config)

    # Setup logging
    logging_config = ctx.obj['config'].get('logging', {})
    setup_logging(log_level or logging_config.get('level', 'INFO'), logging_config)


@cli.command()
@click.option('--gamma', default=0.3, type=float, help='Poisson sampling ratio')
@click.option('--lambda', 'lambda_', required=True, type=float, help='Noise rate (1 / Laplace scale)')
@click.option('--queries', required=True, type=int, help='Number of answered queries |Q|')
@click.option('--delta', required=True, type=float, help='Target delta')
@click.option('--mechanism', default='privgnn', type=click.Choice(['privgnn', 'pate']), help='Mechanism to account')
@click.option('--table', 'table_path', default=None, help='Write the per-order table as CSV')
@click.pass_context
def account(ctx, gamma, lambda_, queries, delta, mechanism, table_path):
    """Compute the (ε, δ) budget for a parameter set."""
    config = ctx.obj['config']
    max_order = _max_order(config)
    try:
        params = PrivacyParams(gamma=gamma, lambda_=lambda_, num_queries=queries, delta=delta)
        if mechanism == 'privgnn':
            form = ConversionForm(config.get('accountant', {}).get('conversion', 'shifted'))
            figures = describe_budget(params, max_order, form)
            click.echo(
                f"mechanism=privgnn gamma={gamma} lambda={lambda_} queries={queries} delta={delta} "
                f"epsilon={figures['epsilon']!r} alpha={figures['optimal_alpha']} "
                f"crude={figures['crude_epsilon']!r} alternative={figures['alternative_epsilon']!r} "
                f"alternative_alpha={figures['alternative_alpha']}"
            )
            curve = privgnn_rdp_curve(params, max_order)
        else:
            guarantee = pate_budget(lambda_, queries, delta, max_order)
            click.echo(
                f"mechanism=pate lambda={lambda_} queries={queries} delta={delta} "
                f"epsilon={guarantee.epsilon!r} alpha={guarantee.optimal_order}"
            )
            curve, form = pate_rdp_curve(lambda_, queries, max_order), ConversionForm.STANDARD
        if table_path:
            write_table(budget_table(curve, delta, form), table_path)
            click.echo(f"✅ Order table written to {table_path}")
    except ValueError as e:
        click.echo(f"❌ Accounting failed: {e}")
        sys.exit(1)


@cli.group()
def run():
    """Run a release pipeline or a baseline."""
    pass


def _finish_run(result_report, out_dir: Path, student=None, checkpoint: str = None):
    stem = f"{result_report.method}-{result_report.config_hash}-seed{result_report.seed}"
    write_record(result_report, out_dir / f"{stem}.txt")
    write_table(reports_table([result_report]), out_dir / f"{stem}.csv")
    if checkpoint and student is not None:
        save_checkpoint(student, checkpoint)
        click.echo(f"  💾 Student checkpoint: {checkpoint}")
    click.echo(f"✅ {result_report.method}: accuracy={result_report.accuracy:.4f} "
               f"epsilon={result_report.epsilon:.4f} delta={result_report.delta}")
    click.echo(f"  📄 {out_dir / (stem + '.txt')}")


@run.command('privgnn')
@click.option('--config', 'config_file', required=True, help='Experiment YAML file')
@click.option('--out', default=None, help='Output directory for the report')
@click.option('--workers', default=None, type=int, help='Concurrent query jobs')
@click.option('--checkpoint', default=None, help='Save the student model to this file')
@click.pass_context
def run_privgnn(ctx, config_file, out, workers, checkpoint):
    """Run the PrivGNN release."""
    try:
        experiment = load_experiment_config(config_file)
        if experiment.privgnn is None:
            raise ValueError(f"{config_file} has no 'privgnn' section")
        config = experiment.privgnn
        if workers:
            config = config.model_copy(update={'max_workers': workers})
        dataset = resolve_dataset(experiment.dataset, Path(config_file).parent)
        result = PrivGnnPipeline(config).run(dataset)
    except Exception as e:
        click.echo(f"❌ PrivGNN run failed: {e}")
        sys.exit(1)
    _finish_run(result.report, _results_dir(ctx.obj['config'], out), result.student, checkpoint)


@run.command('pate')
@click.option('--config', 'config_file', required=True, help='Experiment YAML file')
@click.option('--teachers', default=None, type=int, help='Number of teachers (overrides config)')
@click.option('--kind', default=None, type=click.Choice(['gnn', 'mlp']), help='Teacher model family')
@click.option('--out', default=None, help='Output directory for the report')
@click.option('--checkpoint', default=None, help='Save the student model to this file')
@click.pass_context
def run_pate(ctx, config_file, teachers, kind, out, checkpoint):
    """Run PATE-G (gnn teachers) or PATE-M (mlp teachers)."""
    try:
        experiment = load_experiment_config(config_file)
        if experiment.pate is None:
            raise ValueError(f"{config_file} has no 'pate' section")
        config = experiment.pate
        update = {}
        if teachers is not None:
            update['n_teachers'] = teachers
        if kind is not None:
            update['teacher_kind'] = ModelKind(kind)
        if update:
            config = type(config)(**{**config.model_dump(by_alias=True), **update})
        dataset = resolve_dataset(experiment.dataset, Path(config_file).parent)
        result = PatePipeline(config).run(dataset)
    except Exception as e:
        click.echo(f"❌ PATE run failed: {e}")
        sys.exit(1)
    _finish_run(result.report, _results_dir(ctx.obj['config'], out), result.student, checkpoint)


@run.command('baseline')
@click.option('--config', 'config_file', required=True, help='Experiment YAML file')
@click.option('--which', required=True, type=click.Choice(list(BASELINES)), help='b1: private-trained, b2: public-trained')
@click.option('--out', default=None, help='Output directory for the report')
@click.pass_context
def run_baseline_cmd(ctx, config_file, which, out):
    """Run a non-private baseline."""
    try:
        experiment = load_experiment_config(config_file)
        if experiment.baseline is None:
            raise ValueError(f"{config_file} has no 'baseline' section")
        dataset = resolve_dataset(experiment.dataset, Path(config_file).parent)
        report = run_baseline(which, dataset, experiment.baseline)
    except Exception as e:
        click.echo(f"❌ Baseline run failed: {e}")
        sys.exit(1)
    _finish_run(report, _results_dir(ctx.obj['config'], out))


@cli.command('gen-synthetic')
@click.option('--spec', 'spec_file', default=None, help='SBM spec YAML (default: synthetic section of config)')
@click.option('--out', required=True, help='Output dataset directory')
@click.option('--seed', default=None, type=int, help='Generator seed')
@click.pass_context
def gen_synthetic(ctx, spec_file, out, seed):
    """Generate a stochastic block model dataset."""
    try:
        if spec_file:
            spec = load_sbm_spec(spec_file)
            spec_seed = 0
        else:
            defaults = dict(ctx.obj['config'].get('synthetic', {}))
            spec_seed = int(defaults.pop('seed', 0))
            spec = SbmSpec(**defaults)
        dataset = generate_sbm(spec, np.random.default_rng(spec_seed if seed is None else seed))
        paths = save_dataset(dataset, out)
    except Exception as e:
        click.echo(f"❌ Dataset generation failed: {e}")
        sys.exit(1)
    click.echo(f"✅ Generated {dataset.private.num_nodes} private / {dataset.public.num_nodes} public nodes")
    for name, path in paths.items():
        click.echo(f"  📄 {name}: {path}")


@cli.command()
@click.option('--spec', 'spec_file', required=True, help='Sweep YAML file')
@click.option('--out', required=True, help='Output CSV path')
@click.option('--parallel-cells', default=None, type=int, help='Cells run concurrently')
@click.pass_context
def sweep(ctx, spec_file, out, parallel_cells):
    """Run a parameter sweep and write one CSV row per cell."""
    try:
        spec = load_sweep_spec(spec_file)
        dataset = resolve_dataset(spec.base.dataset, Path(spec_file).parent)
        result = run_sweep(spec, dataset, parallel_cells)
        write_table(result.table, out)
    except Exception as e:
        click.echo(f"❌ Sweep failed: {e}")
        sys.exit(1)
    failed = result.table[result.table['error'] != '']
    click.echo(f"✅ Sweep finished: {len(result.table)} cells written to {out}")
    for _, row in failed.iterrows():
        click.echo(f"  ⚠️ cell {row['cell']}: {row['error']}")


@cli.command()
@click.option('--report', 'report_file', default=None, help='Sweep/accounting CSV (default: recompute from the accountant)')
@click.option('--out', default=None, help='Output CSV path')
@click.pass_context
def compare(ctx, report_file, out):
    """Compare our budgets with published values (informational)."""
    config = ctx.obj['config']
    try:
        published_values = load_published_values(config.get('storage', {}).get('published_budgets'))
        if report_file:
            table = read_table(report_file)
        else:
            table = published_accounting_rows(published_values, _max_order(config))
        comparison, missing = compare_to_published(table, published_values)
        out_path = Path(out) if out else _results_dir(config) / 'published_comparison.csv'
        write_table(comparison, out_path)
    except Exception as e:
        click.echo(f"❌ Comparison failed: {e}")
        sys.exit(1)
    click.echo(f"✅ Compared {len(comparison)} published tuples → {out_path}")
    for _, row in comparison.iterrows():
        click.echo(
            f"  {row['dataset']:<12} {row['mechanism']:<8} γ={row['gamma']} λ={row['lambda']} "
            f"|Q|={row['queries']} ours={row['ours_tight']:.2f} published={row['published_value']:.2f} "
            f"ratio={row['ratio']:.2f}"
        )
    if missing:
        click.echo(f"⚠️ {len(missing)} published tuples not covered by the report:")
        for key in missing:
            click.echo(f"  - {key}")


@cli.command()
@click.pass_context
def status(ctx):
    """Show configuration summary."""
    config = ctx.obj['config']
    click.echo("PrivGNN Workbench Status")
    click.echo("=" * 40)
    accountant = config.get('accountant', {})
    click.echo(f"Accountant: orders 2..{accountant.get('max_order', 32)}, conversion {accountant.get('conversion', 'shifted')}")
    storage = config.get('storage', {})
    results = Path(storage.get('results_directory', 'results'))
    click.echo(f"Results directory: {results} {'✅' if results.exists() else '(not created yet)'}")
    budgets = Path(storage.get('published_budgets', DEFAULT_PUBLISHED_VALUES))
    click.echo(f"Published budgets: {budgets} {'✅' if budgets.exists() else '❌'}")
    synthetic = config.get('synthetic', {})
    if synthetic:
        click.echo(
            f"Default SBM: {synthetic.get('num_classes')} classes x {synthetic.get('nodes_per_class')} nodes, "
            f"p_in={synthetic.get('intra_p')}, p_out={synthetic.get('inter_p')}"
        )
    logging_config = config.get('logging', {})
    click.echo(f"Logging: level {logging_config.get('level', 'INFO')}, file {logging_config.get('file', '-')}")


if __name__ == '__main__':
    cli()
