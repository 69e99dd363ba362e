"""Errors raised by the benchmark harness."""
from rxl.exceptions import RxlError


class MismatchedOutput(RxlError):
    """Raised when the original and rewritten form of a program disagree."""

    def __init__(self, scenario: str, detail: str):
        super().__init__(
            message=f"Mismatched output in {scenario}: {detail}",
            details={"scenario": scenario}
        )


class BenchAssertionFailed(RxlError):
    """Raised when a benchmark computes a wrong answer; its timings are void."""

    def __init__(self, scenario: str, strategy: str, detail: str):
        super().__init__(
            message=f"Benchmark {scenario}/{strategy} failed: {detail}",
            details={"scenario": scenario, "strategy": strategy}
        )
