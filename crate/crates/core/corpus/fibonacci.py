def fib(n):
    # naive recursion: fib(n) = fib(n - 1) + fib(n - 2)
    if n < 2:
        return n
    return fib(n - 1) + fib(n - 2)


def fib_series(count):
    series = []
    a, b = 0, 1
    for i in range(count):
        series.append(a)
        a, b = b, a + b  # advance the pair
    return series


print(fib(5))
print(fib_series(8))
