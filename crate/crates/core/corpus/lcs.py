def lcs_length(a, b):
    """Length of the longest common subsequence, by dynamic programming."""
    rows = len(a) + 1
    cols = len(b) + 1
    table = []
    for i in range(rows):
        table.append([0] * cols)
    for i in range(1, rows):
        for j in range(1, cols):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1  # extend a match
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[rows - 1][cols - 1]


print(lcs_length("ABCB", "BDCAB"))
