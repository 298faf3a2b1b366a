"""Render utilisation-vs-attack-rate curves from a sweep CSV."""

import argparse
import logging
import sys
from pathlib import Path

import plotly.graph_objects as go

from nsec3_encloser.services.reporting import load_sweep
from nsec3_encloser.utils.exceptions import ForgeError
from nsec3_encloser.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)


def build_figure(frame) -> go.Figure:
    figure = go.Figure()
    for value, rows in frame.groupby("value", sort=True):
        rows = rows.sort_values("rate")
        figure.add_trace(
            go.Scatter(
                x=rows["rate"],
                y=rows["utilization"] * 100,
                mode="lines+markers",
                name=f"{rows['axis'].iloc[0]}={value}",
            )
        )
    figure.update_layout(
        xaxis_title="Attack rate (queries/s)",
        yaxis_title="Resolver utilisation (%)",
        yaxis_range=[0, 105],
        template="plotly_white",
    )
    return figure


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("sweep_csv", type=Path)
    parser.add_argument("--out", type=Path, default=None, help="HTML output (default: next to the CSV)")
    args = parser.parse_args()
    setup_logging(logging.INFO)

    try:
        frame = load_sweep(args.sweep_csv)
    except ForgeError as exc:
        logger.error(str(exc))
        return 1
    out = args.out or args.sweep_csv.with_suffix(".html")
    build_figure(frame).write_html(out, include_plotlyjs="cdn")
    logger.info(f"Wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
