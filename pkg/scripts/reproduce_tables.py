"""Recompute every golden-table R_t value and write a JSON report."""

import argparse
from collections import Counter

from db.tables import get_all_entries, save_report
from engine.precision import Precision
from engine.verify import reproduce_tables
import config


def main() -> None:
    """Reproduce all tables and save the report."""
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--prec", type=int, default=config.default_precision())
    parser.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args()

    print("Loading golden tables...")
    entries = get_all_entries()
    if not entries:
        print("No golden table entries found. Check data/golden_tables.json.")
        return

    print(f"Computing R_t for {len(entries)} entries at P = {args.prec}...")
    rows = reproduce_tables(Precision(args.prec), entries=entries, jobs=args.jobs)

    print("Saving report...")
    path = save_report(rows)

    counts = Counter(row["status"] for row in rows)
    print(f"Report saved to {path}")
    print(f"match: {counts['match']}  mismatch: {counts['mismatch']}  failed: {counts['failed']}")
    for row in rows:
        if row["status"] != "match":
            print(f"  {row['family']} t={row['t']}: got {row['R_rational']} ({row['R_decimal']}), expected {row['expected']}")
    print("Table reproduction complete!")


if __name__ == "__main__":
    main()
