"""Command-line entry: figviz <figure_id> --in DIR --out FILE.png"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .plots import FIGURE_IDS, FigureSpec, plot_figure
from .schema import SchemaError


def _collect_inputs(figure_id: str, in_dir: Path) -> tuple[Path, ...]:
    if figure_id == "fig2":
        hists = tuple(sorted(in_dir.glob("hist_*.csv")))
        if not hists:
            raise FileNotFoundError(f"no hist_*.csv files in {in_dir}")
        return hists
    summary = in_dir / "summary.csv"
    if not summary.is_file():
        raise FileNotFoundError(f"no summary.csv in {in_dir}")
    return (summary,)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figviz",
        description="Regenerate figure families from simulator sweep CSVs",
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding summary.csv / hist_*.csv")
    parser.add_argument("--out", required=True, help="output image path (.png)")
    args = parser.parse_args(argv)

    in_dir = Path(args.in_dir)
    try:
        inputs = _collect_inputs(args.figure_id, in_dir)
        spec = FigureSpec(figure_id=args.figure_id, inputs=inputs, output=Path(args.out))
        written = plot_figure(spec)
    except (FileNotFoundError, SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {written}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
