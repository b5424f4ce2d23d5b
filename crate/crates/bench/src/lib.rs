//! Workloads shared by the pipeline benchmarks.

/// Recursive Fibonacci: call-heavy, shallow loops.
pub fn fib_source(n: u32) -> String {
    format!(
        "def fib(n):\n    if n < 2:\n        return n\n    return fib(n - 1) + fib(n - 2)\n\nresult = fib({n})\n"
    )
}

/// Nested counting loops: line-heavy, no calls.
pub fn loops_source(n: u32) -> String {
    format!(
        "total = 0\nfor i in range({n}):\n    for j in range({n}):\n        total += i * j\n"
    )
}
