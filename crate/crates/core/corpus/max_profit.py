def max_profit(prices):
    """Best profit from one buy followed by one later sell."""
    if len(prices) == 0:
        return 0
    lowest = prices[0]
    best = 0
    for price in prices:
        if price < lowest:
            lowest = price  # cheaper day to buy
        profit = price - lowest
        if profit > best:
            best = profit
    return best


print(max_profit([7, 1, 5, 3, 6, 4]))
