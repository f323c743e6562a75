"""Command-line front door: serve the API, run attack simulations, and
analyze session logs.

Simulation defaults target the small verification regime (6 images, length-2
passwords on a 2x3 grid) where brute-force cross-checks are feasible; pass
explicit dimensions for larger experiments.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .attacks import (
    entropy_bits,
    password_space,
    shoulder_surf_experiment,
    simulate_guess_attack,
)
from .config import AppConfig, load_config
from .scheme import GridSpec
from .stats import analyze_sessions, format_analysis, load_sessions


def _grid_and_ids(cols: int, rows: int) -> tuple[GridSpec, list[str]]:
    grid = GridSpec(cols=cols, rows=rows)
    return grid, [f"img{i:02d}" for i in range(grid.n_cells)]


@click.group()
def main():
    """Curve-trace graphical password toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=False, help="JSON config file; defaults apply if omitted.")
def serve(config_path):
    """Run the authentication service (HTTP+JSON)."""
    import uvicorn

    from .images import load_catalog, synth_catalog
    from .service import AuthService, create_app

    config = load_config(config_path) if config_path else AppConfig()
    dims = (config.image_width, config.image_height)
    if config.images_dir:
        catalog = load_catalog(config.images_dir, dims, config.grid)
    else:
        click.echo("images.dir not configured; using a synthetic catalog", err=True)
        catalog = synth_catalog(config.grid.n_cells, seed=0, target_dims=dims)
    service = AuthService(config, catalog)
    app = create_app(service)
    host, port = config.host_port
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.group()
def simulate():
    """Monte Carlo attack experiments."""


@simulate.command()
@click.option("--trials", "-t", default=30000, show_default=True)
@click.option("--cols", default=2, show_default=True)
@click.option("--rows", default=3, show_default=True)
@click.option("--length", "-n", default=2, show_default=True, help="pass-images per password")
@click.option("--seed", default=0, show_default=True)
def guess(trials, cols, rows, length, seed):
    """Random-guess attack through the full verification path."""
    grid, ids = _grid_and_ids(cols, rows)
    res = simulate_guess_attack(ids, grid, n=length, trials=trials, seed=seed)
    space = password_space(len(ids), length)
    lo, hi = res.exact_interval_3sigma
    click.echo(f"password space        : {space} (1/space = {1 / space:.6f})")
    click.echo(f"exact-guess rate      : {res.exact_rate:.6f}  (3-sigma [{lo:.6f}, {hi:.6f}])")
    click.echo(f"trace-accepted rate   : {res.accept_rate:.6f}  "
               f"(>= exact rate; the gap is coincidental subsequence acceptance)")


@simulate.command()
@click.option("--sessions", "-k", default=3, show_default=True)
@click.option("--retention", "-r", default=1.0, show_default=True)
@click.option("--trials", "-t", default=20, show_default=True)
@click.option("--cols", default=2, show_default=True)
@click.option("--rows", default=3, show_default=True)
@click.option("--length", "-n", default=2, show_default=True)
@click.option("--jitter", default=0, show_default=True, help="decoy detour budget per trace")
@click.option("--seed", default=0, show_default=True)
def shoulder(sessions, retention, trials, cols, rows, length, jitter, seed):
    """Shoulder-surfing candidate-set decay over repeated observations."""
    grid, ids = _grid_and_ids(cols, rows)
    report = shoulder_surf_experiment(
        ids, grid, n=length, sessions=sessions, retention=retention,
        trials=trials, seed=seed, jitter_budget=jitter,
    )
    click.echo(report.as_table())
    click.echo("")
    for k in range(1, sessions + 1):
        click.echo(
            f"after {k} observation(s): median {report.median_after(k):g}, "
            f"mean {report.mean_after(k):.1f} candidates"
        )


@main.command()
@click.option("--images", "-N", "n_images", required=True, type=int)
@click.option("--length", "-n", required=True, type=int)
def entropy(n_images, length):
    """Password-space size and entropy for N catalog images, length n."""
    space = password_space(n_images, length)
    click.echo(f"password space : {space}")
    click.echo(f"entropy        : {entropy_bits(n_images, length):.3f} bits")


@main.command()
@click.option("--log", "log_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def analyze(log_path):
    """Summarize a session log: per-scheme stats, t-test, learning trend."""
    records = load_sessions(log_path)
    if not records:
        click.echo("log is empty")
        sys.exit(1)
    click.echo(format_analysis(analyze_sessions(records)))


@main.command("synth-images")
@click.option("--count", "-c", required=True, type=int)
@click.option("--out", "-o", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--width", default=96, show_default=True)
@click.option("--height", default=96, show_default=True)
def synth_images(count, out_dir, seed, width, height):
    """Generate a deterministic procedural image corpus."""
    from .images import save_catalog, synth_catalog

    catalog = synth_catalog(count, seed=seed, target_dims=(width, height))
    written = save_catalog(catalog, Path(out_dir))
    click.echo(f"wrote {len(written)} images to {out_dir}")


if __name__ == "__main__":
    main()
