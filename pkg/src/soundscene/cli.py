"""Operator commands: run the service, render offline, manage the catalog,
and run the questionnaire statistics tools.

Exit codes: 0 success; 1 serve/config failure; 2 invalid input file
(project or WAV); 3 missing assets during render. Machine-readable output
(ids, paths) goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .catalog import Catalog, Role, browse
from .config import load_config
from .errors import InvalidWav, MissingAsset, SoundsceneError, UnsupportedEncoding
from .project import ProjectStore, canonical_json, project_from_dict, project_to_dict
from .render import RenderOptions, encode_wav_pcm16, mix_timeline
from .stats import (
    BUILTIN_SUMMARY_N,
    BUILTIN_SUMMARY_ROWS,
    compute_summary_rows,
    load_responses_csv,
    verify_table2,
)


@click.group()
def main() -> None:
    """Sound-memory composition engine."""


@main.command()
@click.option("--addr", default=None, help="host:port to listen on")
@click.option("--store", default=None, type=click.Path(), help="project store root")
@click.option("--backend", default=None, type=click.Choice(["mock", "http"]))
@click.option("--config", "config_path", default=None, type=click.Path(exists=True))
def serve(addr, store, backend, config_path):
    """Run the HTTP service (long-running)."""
    import uvicorn

    from .service import create_app

    try:
        config = load_config(config_path)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"bad config: {exc}", err=True)
        sys.exit(1)
    if addr:
        config.addr = addr
    if store:
        config.store = store
    if backend:
        config.backend = backend
    host, sep, port_text = config.addr.rpartition(":")
    if not sep or not port_text.isdigit():
        click.echo(f"bad --addr {config.addr!r}, expected host:port", err=True)
        sys.exit(1)
    try:
        app = create_app(
            config.store,
            backend=config.backend,
            describe_url=config.describe_url,
            generate_url=config.generate_url,
            auth_token=config.auth_token,
        )
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port_text), log_level="warning")
    except (OSError, ValueError, SystemExit, SoundsceneError) as exc:
        click.echo(f"serve failed: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.argument("project_json", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@click.option("--normalize", is_flag=True, default=False)
@click.option("--rate", default=48000, type=click.Choice(["44100", "48000"]), show_default=True)
@click.option("--master-gain", default=1.0, type=float, show_default=True)
@click.option("--store", default=None, type=click.Path(exists=True, file_okay=False),
              help="store root holding catalog.json (default: grandparent of the project file)")
def render(project_json, out, normalize, rate, master_gain, store):
    """Mix a stopped project timeline down to a 16-bit WAV."""
    project_path = Path(project_json)
    store_root = Path(store) if store else project_path.resolve().parent.parent
    try:
        project = project_from_dict(json.loads(project_path.read_text()))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, SoundsceneError) as exc:
        click.echo(f"invalid project file: {exc}", err=True)
        sys.exit(2)
    if project.timeline is None or project.timeline.duration_ms <= 0:
        click.echo("project has no stopped timeline to render", err=True)
        sys.exit(2)
    catalog = Catalog.load(store_root)
    try:
        options = RenderOptions(target_rate=int(rate), master_gain=master_gain, normalize=normalize)
        mixed = mix_timeline(project.timeline, catalog.buffer, options)
    except MissingAsset as exc:
        click.echo(f"missing asset: {exc}", err=True)
        sys.exit(3)
    except SoundsceneError as exc:
        click.echo(f"render failed: {exc}", err=True)
        sys.exit(2)
    Path(out).write_bytes(encode_wav_pcm16(mixed))
    click.echo(out)


@main.command("catalog-add")
@click.argument("wav_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--role", required=True, type=click.Choice(["music", "ambient", "effect"]))
@click.option("--labels", default="", help="comma-separated labels, first is primary")
@click.option("--loopable", is_flag=True, default=False)
@click.option("--store", required=True, type=click.Path(file_okay=False))
def catalog_add(wav_path, role, labels, loopable, store):
    """Ingest a WAV file into the catalog; prints the new asset id."""
    catalog = Catalog.load(store)
    tokens = [t for t in labels.split(",") if t.strip()]
    try:
        asset = catalog.ingest(
            Path(wav_path).read_bytes(), Role(role), labels=tokens, loopable=loopable
        )
    except (InvalidWav, UnsupportedEncoding, ValueError) as exc:
        click.echo(f"invalid WAV: {exc}", err=True)
        sys.exit(2)
    catalog.save()
    click.echo(asset.id)


@main.command("catalog-list")
@click.option("--store", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--role", default=None, type=click.Choice(["music", "ambient", "effect"]))
@click.option("--page", default=0, type=int)
@click.option("--page-size", default=50, type=int)
def catalog_list(store, role, page, page_size):
    """List catalog assets, one JSON object per line."""
    catalog = Catalog.load(store)
    result = browse(catalog, Role(role) if role else None, page=page, page_size=page_size)
    for asset in result.assets:
        click.echo(
            json.dumps(
                {
                    "id": asset.id,
                    "role": asset.role.value,
                    "labels": list(asset.labels),
                    "duration_ms": asset.duration_ms,
                },
                sort_keys=True,
            )
        )
    click.echo(f"total: {result.total}", err=True)


@main.command("project-export")
@click.argument("project_id")
@click.option("--store", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("-o", "--out", default=None, type=click.Path(dir_okay=False))
def project_export(project_id, store, out):
    """Print a project's canonical JSON (or write it to a file)."""
    store_obj = ProjectStore(store)
    try:
        project = store_obj.load(project_id)
    except SoundsceneError as exc:
        click.echo(f"cannot load project: {exc}", err=True)
        sys.exit(2)
    payload = canonical_json(project_to_dict(project))
    if out:
        Path(out).write_bytes(payload)
        click.echo(out)
    else:
        click.echo(payload.decode("utf-8"), nl=False)


@main.group()
def stats():
    """Questionnaire statistics tools."""


def _print_report(rows, n) -> bool:
    checks = verify_table2(rows, n)
    all_ok = True
    for row, check in zip(rows, checks):
        status = "ok" if check.passed else "FAIL"
        click.echo(
            f"{row.label:>5}  t={row.t:>6.3f}  p_reported={row.p:.3f}  "
            f"p_recomputed={check.p_recomputed:.6f}  mean_gap={check.mean_gap:.4f}  "
            f"implied_sd={check.implied_sd_diff:.4f}  [{status}]"
        )
        all_ok = all_ok and check.passed
    click.echo(f"{'all rows consistent' if all_ok else 'INCONSISTENT rows found'} (n={n})")
    return all_ok


@stats.command("table2")
@click.option("--builtin", is_flag=True, default=True, help="use the built-in summary rows")
@click.option("--n", default=BUILTIN_SUMMARY_N, type=int, show_default=True)
def stats_table2(builtin, n):
    """Consistency-check the built-in published summary table."""
    if not _print_report(BUILTIN_SUMMARY_ROWS, n):
        sys.exit(1)


@stats.command("verify-table2")
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--n", default=None, type=int, help="override the participant count")
def stats_verify(csv_path, n):
    """Recompute the summary table from raw paired responses and verify it."""
    try:
        responses_a, responses_b = load_responses_csv(csv_path)
        rows = compute_summary_rows(responses_a, responses_b)
    except (SoundsceneError, KeyError, ValueError) as exc:
        click.echo(f"bad responses CSV: {exc}", err=True)
        sys.exit(2)
    if not _print_report(rows, n or len(responses_a)):
        sys.exit(1)


if __name__ == "__main__":
    main()
