"""
SPDX-License-Identifier: MIT
"""

from dataclasses import dataclass

@dataclass(frozen=True)
class OracleReport:
    """
    The outcome of one oracle check.

    A check passes iff its largest observed violation is within tolerance. Negative controls are built to fail: they
    are `ok` when they do.

    Attributes:
        check: The check name (e.g. `state-bounds`).
        instance: A description of the checked instance.
        max_violation: The largest observed violation (a ratio or an error, depending on the check).
        tolerance: The largest acceptable violation.
        details: Free-form diagnostics (offending batch, worst point...).
        expected_failure: Whether the instance is a negative control.
    """
    check: str
    instance: str
    max_violation: float
    tolerance: float
    details: str = ''
    expected_failure: bool = False

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    @property
    def ok(self) -> bool:
        return self.passed != self.expected_failure

    def as_summary(self) -> dict[str, str]:
        summary = {
            'check': self.check,
            'instance': self.instance,
            'max_violation': f'{self.max_violation:.6e}',
            'tolerance': f'{self.tolerance:.6e}',
            'passed': str(self.passed).lower(),
            'expected_failure': str(self.expected_failure).lower(),
            'ok': str(self.ok).lower(),
        }
        if self.details:
            summary['details'] = self.details

        return summary

    def control(self) -> 'OracleReport':
        """
        Return the same report flagged as a negative control.
        """
        return OracleReport(self.check, self.instance, self.max_violation, self.tolerance, self.details, True)
