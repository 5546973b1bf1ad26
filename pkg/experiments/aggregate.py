"""
Report Aggregator - summary statistics over the rows of one or more sweeps.

    validity   row counts, errors, bound violations
    trend      median info bound per (noise, T60) and whether it rises with T60
"""

import logging
from dataclasses import dataclass

import pandas as pd

from schemas import BoundRow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrendCheck:
    noise_id: str
    t60_s: tuple[float, ...]
    median_db: tuple[float, ...]

    @property
    def nondecreasing(self) -> bool:
        return all(b >= a for a, b in zip(self.median_db, self.median_db[1:]))


class ReportAggregator:
    """Aggregate bound-report rows into validity and trend summaries."""

    def __init__(self, rows: list[BoundRow]):
        self.rows = rows
        self.frame = pd.DataFrame([r.model_dump() for r in rows])

    # =========================================================================
    # SECTION 1: BOUND VALIDITY
    # =========================================================================

    def validity(self) -> dict:
        total = len(self.rows)
        errors = [r for r in self.rows if r.error]
        evaluated = [r for r in self.rows if not r.error]
        violations = [r for r in evaluated if r.bound_holds is False]
        return {
            "rows": total,
            "errors": len(errors),
            "evaluated": len(evaluated),
            "violations": len(violations),
            "holds_rate": round(100.0 * (len(evaluated) - len(violations)) / max(len(evaluated), 1), 1),
        }

    def all_hold(self) -> bool:
        v = self.validity()
        return v["errors"] == 0 and v["violations"] == 0

    # =========================================================================
    # SECTION 2: T60 TREND
    # =========================================================================

    def median_info_bound(self, column: str = "info_bound_lin_db") -> pd.DataFrame:
        """Median of `column` per (noise_id, t60_s) over all seeds and cancellers."""
        if self.frame.empty:
            return pd.DataFrame(columns=["noise_id", "t60_s", column])
        ok = self.frame[self.frame["error"].isna() & self.frame[column].notna()]
        return (
            ok.groupby(["noise_id", "t60_s"], sort=True)[column]
            .median()
            .reset_index()
        )

    def trend_checks(self, column: str = "info_bound_lin_db") -> list[TrendCheck]:
        medians = self.median_info_bound(column)
        checks = []
        for noise_id, group in medians.groupby("noise_id", sort=True):
            group = group.sort_values("t60_s")
            check = TrendCheck(noise_id, tuple(group["t60_s"]), tuple(group[column]))
            if not check.nondecreasing:
                logger.warning(f"{noise_id}: median info bound does not rise with T60 {check.median_db}")
            checks.append(check)
        return checks

    def summary_frame(self) -> pd.DataFrame:
        """One line per (noise, T60, canceller): NMSE and bounds (medians over seeds)."""
        cols = ["nmse_db", "info_bound_lin_db", "support_bound_weighted_db", "unified_bound_db"]
        if self.frame.empty:
            return pd.DataFrame(columns=["noise_id", "t60_s", "canceller", *cols])
        ok = self.frame[self.frame["error"].isna()]
        return ok.groupby(["noise_id", "t60_s", "canceller"], sort=True)[cols].median().reset_index()
