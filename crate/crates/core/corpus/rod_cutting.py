def best_piece(prices, length):
    # piece with the highest price per unit that still fits
    best = 1
    for size in range(1, length + 1):
        if prices[size - 1] / size > prices[best - 1] / best:
            best = size
    return best


def cut_rod(prices, length):
    """Greedy rod cutting: repeatedly cut the densest piece that fits."""
    revenue = 0
    pieces = []
    while length > 0:
        size = best_piece(prices, length)
        pieces.append(size)
        revenue += prices[size - 1]
        length -= size
    return revenue, pieces


print(cut_rod([1, 5, 8, 9], 4))
