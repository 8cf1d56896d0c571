"""Command-line entry point: `render --kind ... --in ... --out ...`."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .render import KINDS, FigureSpec, SchemaError, render


@click.group()
def main():
    """Render figures from Local SGD simulator CSV outputs."""


@main.command("render")
@click.option("--kind", type=click.Choice(list(KINDS)), required=True)
@click.option("--in", "inputs", multiple=True, required=True,
              type=click.Path(), help="Input CSV (repeatable).")
@click.option("--out", "output", required=True, type=click.Path())
@click.option("--linear-y", is_flag=True, default=False,
              help="Linear y axis (traces default to log scale).")
@click.option("--log-x", is_flag=True, default=False)
def render_cmd(kind, inputs, output, linear_y, log_x):
    spec = FigureSpec(inputs=tuple(Path(p) for p in inputs), kind=kind,
                      output=Path(output), log_y=not linear_y, log_x=log_x)
    try:
        path = render(spec)
    except SchemaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
