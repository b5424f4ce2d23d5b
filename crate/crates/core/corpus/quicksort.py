def quick_sort(collection):
    """Sort a list by partitioning around a pivot."""
    if len(collection) < 2:
        return collection
    pivot = collection.pop()  # take the last element as pivot
    greater = []
    lesser = []
    for element in collection:
        if element > pivot:
            greater.append(element)
        else:
            lesser.append(element)
    return quick_sort(lesser) + [pivot] + quick_sort(greater)


result = quick_sort([5, 2, 8, 1, 9, 3])
print(result)
