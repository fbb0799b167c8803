"""Command-line interface: evaluate, validate, report, genprompts, cache."""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click

from .backends import ResponseCache
from .config import load_config
from .corpus import Category
from .errors import ConfigError, IncompleteRunError, MtbiasError
from .gender import GenderLabel
from .reporting import render_reports
from .runner import evaluate, genprompts_rows, validate

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUN = 2
EXIT_INCOMPLETE = 3


@click.group()
@click.option("--config", "config_path", type=click.Path(), help="Run configuration YAML.")
@click.option("--run-dir", "run_dir", type=click.Path(), help="Run directory for artifacts.")
@click.option("--parallelism", type=int, default=None, help="Worker pool size override.")
@click.option("--seed", type=int, default=None, help="Seed override for mock providers.")
@click.option("--offline", is_flag=True, help="Serve everything from cache; fail on miss.")
@click.pass_context
def cli(ctx: click.Context, config_path, run_dir, parallelism, seed, offline):
    """Occupational gender-bias evaluation for machine translation."""
    ctx.ensure_object(dict)
    ctx.obj.update(
        config_path=config_path,
        run_dir=run_dir,
        parallelism=parallelism,
        seed=seed,
        offline=offline,
    )


def _load_config_from_ctx(ctx: click.Context):
    config_path = ctx.obj.get("config_path")
    if not config_path:
        raise ConfigError("--config is required for this command")
    config = load_config(config_path)
    seed = ctx.obj.get("seed")
    if seed is not None and seed != config.seed:
        from dataclasses import replace

        config = replace(config, seed=seed)
    return config


def _run_dir_from_ctx(ctx: click.Context, config=None) -> Path:
    run_dir = ctx.obj.get("run_dir")
    if run_dir:
        return Path(run_dir)
    if config is not None:
        return Path("runs") / config.config_hash()[:12]
    raise ConfigError("--run-dir is required for this command")


@cli.command("evaluate")
@click.pass_context
def cmd_evaluate(ctx: click.Context):
    """Translate, detect, aggregate, score, and report for each model/language."""
    config = _load_config_from_ctx(ctx)
    run_dir = _run_dir_from_ctx(ctx, config)
    result = evaluate(
        config,
        run_dir,
        parallelism=ctx.obj.get("parallelism"),
        offline=ctx.obj.get("offline", False),
    )
    click.echo(f"run {result.manifest.run_id} complete: {run_dir}")
    reports = run_dir / "reports"
    for name in sorted(p.name for p in reports.iterdir()):
        click.echo(f"  reports/{name}")


@cli.command("validate")
@click.pass_context
def cmd_validate(ctx: click.Context):
    """Measure pipeline accuracy on a gold-labeled corpus."""
    config = _load_config_from_ctx(ctx)
    run_dir = _run_dir_from_ctx(ctx, config)
    report = validate(
        config,
        run_dir,
        parallelism=ctx.obj.get("parallelism"),
        offline=ctx.obj.get("offline", False),
    )
    click.echo(f"samples:             {report.n_samples}")
    click.echo(f"occupation accuracy: {report.occupation_accuracy:.4f}")
    click.echo(f"gender accuracy:     {report.gender_accuracy:.4f}")
    click.echo(f"overall accuracy:    {report.overall_accuracy:.4f}")
    click.echo(f"detection failures:  {report.n_detection_failures}")


@cli.command("report")
@click.option(
    "--format",
    "formats",
    type=click.Choice(["md", "csv", "json", "all"]),
    multiple=True,
    default=("all",),
)
@click.pass_context
def cmd_report(ctx: click.Context, formats):
    """Re-render reports from a completed run directory."""
    run_dir = _run_dir_from_ctx(ctx)
    selected = ("md", "csv", "json") if "all" in formats else tuple(formats)
    written = render_reports(run_dir, formats=selected)
    for fmt, path in sorted(written.items()):
        click.echo(f"{fmt}: {path}")


@cli.command("genprompts")
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), default=None,
              help="Emit prompts for every 4-digit occupation title in this taxonomy.")
@click.option("--occupation", "occupations", multiple=True, help="Explicit occupation title (repeatable).")
@click.option("--category", "categories", multiple=True,
              type=click.Choice(["all"] + [c.value for c in Category]), default=("all",))
@click.option("--gender", "genders", multiple=True,
              type=click.Choice(["all"] + [g.value for g in GenderLabel]), default=("not_clear",))
@click.option("--language", default=None, help="Append the target-language sentence.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.pass_context
def cmd_genprompts(ctx: click.Context, taxonomy_path, occupations, categories, genders, language, out_path):
    """Emit generation prompts (one CSV row per occupation x category x gender)."""
    titles = list(occupations)
    if taxonomy_path:
        from .taxonomy import load_taxonomy

        tax = load_taxonomy(taxonomy_path)
        titles.extend(tax.lookup(code).title for code in tax.codes_at_level(4))
    category_values = (
        list(Category) if "all" in categories else [Category(c) for c in dict.fromkeys(categories)]
    )
    gender_values = (
        list(GenderLabel) if "all" in genders else [GenderLabel(g) for g in dict.fromkeys(genders)]
    )
    rows = genprompts_rows(titles, category_values, gender_values, language)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["occupation", "category", "gender", "language", "prompt"])
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"wrote {len(rows)} prompts to {out}")


@cli.group("cache")
def cmd_cache():
    """Inspect or clear the response cache."""


def _cache_from_ctx(ctx: click.Context, cache_dir) -> ResponseCache:
    if cache_dir:
        return ResponseCache(cache_dir)
    config = _load_config_from_ctx(ctx)
    return ResponseCache(config.cache_dir)


@cmd_cache.command("stats")
@click.option("--cache-dir", type=click.Path(), default=None)
@click.pass_context
def cmd_cache_stats(ctx: click.Context, cache_dir):
    cache = _cache_from_ctx(ctx, cache_dir)
    stats = cache.stats()
    click.echo(f"entries: {stats.entries}")
    click.echo(f"bytes:   {stats.total_bytes}")


@cmd_cache.command("clear")
@click.option("--cache-dir", type=click.Path(), default=None)
@click.pass_context
def cmd_cache_clear(ctx: click.Context, cache_dir):
    cache = _cache_from_ctx(ctx, cache_dir)
    removed = cache.clear()
    click.echo(f"removed {removed} entries")


def main(argv: list[str] | None = None) -> int:
    """Entry point with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return EXIT_CONFIG
    except IncompleteRunError as exc:
        click.echo(f"incomplete run: {exc}", err=True)
        return EXIT_INCOMPLETE
    except MtbiasError as exc:
        click.echo(f"run error: {exc}", err=True)
        return EXIT_RUN
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_RUN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
