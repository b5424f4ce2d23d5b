def add(a, b):
    c = a + b  # sum
    return c
add(2, 3)
