# Outcome of an inequality check and the report writers
#
# Created On: Oct 19, 2026
#

from dataclasses import dataclass, field
from pathlib import Path
import csv
import logging
import math

from .utils import canonical_json, digest, format_float
from ..scripts.constants import SCHEMA_VERSION

logger = logging.getLogger(__name__)

__all__ = ["CheckReport", "sample_ratio", "write_json", "write_csv", "write_dat"]


def sample_ratio(lhs:float, rhs:float):
    """
    Ratio of one sample: 0 when the left side vanishes, inf when only the right
    side does.
    """
    if not lhs > 0:
        return 0.0
    if not rhs > 0:
        return math.inf
    return lhs / rhs


@dataclass
class CheckReport:
    """
    The outcome of one inequality check.

    Attributes
    ----------
    check_id : str
    digest : str
        sha256 of the canonical JSON of the inputs, 16 hex digits.
    labels : list
        One label per sample (a lambda value, a cube, an instance index).
    lhs, rhs : list of float
    ceiling : float
        The check passes when ``empirical <= ceiling * (1 + slack)``.
    runtime : float
        Seconds; left out of JSON unless asked for.
    notes : dict
        Extra measured quantities (realized thresholds, constants, ...).
    """

    check_id: str
    digest: str
    labels: list
    lhs: list
    rhs: list
    ceiling: float = math.inf
    slack: float = 0.0
    runtime: float = 0.0
    notes: dict = field(default_factory=dict)

    @classmethod
    def build(cls, check_id:str, inputs, lhs, rhs, labels=None, ceiling:float=math.inf, slack:float=0.0, notes:dict=None):
        lhs = [float(v) for v in lhs]
        rhs = [float(v) for v in rhs]
        if len(lhs) != len(rhs):
            raise ValueError(f"{check_id}: {len(lhs)} left sides for {len(rhs)} right sides")
        if labels is None:
            labels = list(range(len(lhs)))
        return cls(
            check_id=check_id, digest=digest(inputs), labels=list(labels),
            lhs=lhs, rhs=rhs, ceiling=float(ceiling), slack=float(slack),
            notes=dict(notes or {}),
        )

    @classmethod
    def combine(cls, check_id:str, reports, ceiling:float=None, notes:dict=None):
        """Concatenate the samples of several reports; labels get the source index."""
        reports = list(reports)
        labels, lhs, rhs = [], [], []
        for i, rep in enumerate(reports):
            labels += [f"{i}:{lab}" for lab in rep.labels]
            lhs += rep.lhs
            rhs += rep.rhs
        if ceiling is None:
            ceiling = reports[0].ceiling if reports else math.inf
        slack = max((rep.slack for rep in reports), default=0.0)
        merged = cls(
            check_id=check_id, digest=digest([rep.digest for rep in reports]),
            labels=labels, lhs=lhs, rhs=rhs, ceiling=ceiling, slack=slack,
            runtime=sum(rep.runtime for rep in reports), notes=dict(notes or {}),
        )
        return merged

    @property
    def ratios(self):
        return [sample_ratio(l, r) for l, r in zip(self.lhs, self.rhs)]

    @property
    def empirical(self):
        """Largest sample ratio, 0 for a report without samples."""
        return max(self.ratios, default=0.0)

    @property
    def passed(self):
        return self.empirical <= self.ceiling * (1.0 + self.slack)

    def with_ceiling(self, ceiling:float):
        self.ceiling = float(ceiling)
        return self

    def to_dict(self, timings:bool=False):
        data = {
            "check_id": self.check_id,
            "digest": self.digest,
            "labels": [str(lab) for lab in self.labels],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratios": self.ratios,
            "empirical": self.empirical,
            "ceiling": self.ceiling,
            "slack": self.slack,
            "passed": self.passed,
            "notes": self.notes,
        }
        if timings:
            data["runtime"] = self.runtime
        return data

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{self.check_id}: {status} empirical={format_float(self.empirical)} ceiling={format_float(self.ceiling)}"

    def __str__(self):
        return self.summary()


def write_json(reports, path:Path, timings:bool=False, meta:dict=None):
    """Write reports ordered by check id; keys sorted, so equal runs give equal bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(reports, key=lambda rep: rep.check_id)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "meta": meta or {},
        "passed": all(rep.passed for rep in ordered),
        "reports": [rep.to_dict(timings=timings) for rep in ordered],
    }
    path.write_text(canonical_json(payload, indent=2) + "\n")
    logger.info("wrote %d reports to %s", len(ordered), path)
    return path


def write_csv(reports, path:Path):
    """One row per sample: ``check_id,label,lhs,rhs,ratio``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check_id", "label", "lhs", "rhs", "ratio"])
        for rep in sorted(reports, key=lambda r: r.check_id):
            for lab, l, r, q in zip(rep.labels, rep.lhs, rep.rhs, rep.ratios):
                writer.writerow([rep.check_id, lab, format_float(l), format_float(r), format_float(q)])
    return path


def write_dat(report:CheckReport, path:Path):
    """Whitespace separated columns ``label lhs rhs ratio`` ready for gnuplot."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {report.check_id} {report.digest}", "# label lhs rhs ratio"]
    for lab, l, r, q in zip(report.labels, report.lhs, report.rhs, report.ratios):
        lines.append(f"{lab} {format_float(l)} {format_float(r)} {format_float(q)}")
    path.write_text("\n".join(lines) + "\n")
    return path
