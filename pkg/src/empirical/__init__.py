"""
Empirical Counts

Prime-by-prime scans of two curves: coprime counts, A_d(x), the
inclusion-exclusion identity, congruence obstructions and density
comparisons against the predicted constant.
"""

from .checkpoint import CheckpointHeader, CheckpointWriter, read_checkpoint, verify_checkpoint
from .reports import write_csv, write_json
from .scan import (
    Comparison,
    ObstructionPattern,
    ScanPlan,
    a_d_count,
    compare_report,
    divisibility_profile,
    find_obstruction,
    gcd_histogram,
    inclusion_exclusion_check,
    load_obstructions,
    max_order,
    obstruction_scan,
    pi_coprime,
    predicted_density,
    quadratic_pattern,
    run_scan,
)

__all__ = [
    "CheckpointHeader",
    "CheckpointWriter",
    "Comparison",
    "ObstructionPattern",
    "ScanPlan",
    "a_d_count",
    "compare_report",
    "divisibility_profile",
    "find_obstruction",
    "gcd_histogram",
    "inclusion_exclusion_check",
    "load_obstructions",
    "max_order",
    "obstruction_scan",
    "pi_coprime",
    "predicted_density",
    "quadratic_pattern",
    "read_checkpoint",
    "run_scan",
    "verify_checkpoint",
    "write_csv",
    "write_json",
]
