def subsets(items):
    """All subsets of items, built by backtracking."""
    result = []
    current = []
    backtrack(items, 0, current, result)
    return result


def backtrack(items, start, current, result):
    result.append(list(current))  # record a copy of the partial subset
    for i in range(start, len(items)):
        current.append(items[i])
        backtrack(items, i + 1, current, result)
        current.pop()


print(subsets([1, 2, 3]))
