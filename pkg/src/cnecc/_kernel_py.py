"""Pure-Python decode kernel, the import-time fallback for cnecc._ckernel.

Implements exactly the windowed recurrence of the featureful WindowDecoder
(extend, merge on (state, residual), commit table hits, prune the rest) on
flat integer state, without trace or emission bookkeeping.  The compiled
kernel is tested bit-for-bit against this one.
"""

BACKEND_NAME = "pure-python"


def decode_words(y, x_len, l, omega, next_state, out_word, table_w):
    """Minimum-error-weight decode of one received word sequence.

    y: received omega-bit words; next_state/out_word: flat trellis tables
    indexed by state*2 + bit; table_w: dense weight per flat window int,
    -1 where the window is not a correctable footprint.

    Returns (ok, weight, bits): ok is False when no survivor explains the
    stream, in which case weight and bits are meaningless.
    """
    n = len(y)
    low_mask = (1 << (omega * l)) - 1
    top_shift = omega * l

    free = min(x_len, l + 1)
    pad = l + 1 - free
    survivors = []  # rows [state, residual, weight, last_commit, history]
    for prefix in range(1 << free):
        hist = prefix << pad
        state = 0
        res = 0
        for i in range(l + 1):
            idx = (state << 1) | ((hist >> (l - i)) & 1)
            res = (res << omega) | (y[i] ^ out_word[idx])
            state = next_state[idx]
        survivors.append([state, res, 0, -1, hist])

    def classify(rows, window_start):
        live = []
        for row in rows:
            res = row[1]
            if res >> top_shift:
                tw = table_w[res]
                if tw < 0:
                    continue
                row[2] += tw
                row[1] = 0
                row[3] = window_start
            live.append(row)
        return live

    survivors = classify(survivors, 0)
    if not survivors:
        return False, 0, []

    for w in range(1, n - l):
        new_idx = w + l  # input instant entering the window
        word = y[new_idx]
        forced = new_idx >= x_len
        merged = []
        slot = {}
        for state, res, weight, commit, hist in survivors:
            for b in (0,) if forced else (0, 1):
                idx = (state << 1) | b
                child = [
                    next_state[idx],
                    ((res & low_mask) << omega) | (word ^ out_word[idx]),
                    weight,
                    commit,
                    (hist << 1) | b,
                ]
                key = (child[0] << top_shift + omega) | child[1]
                at = slot.get(key)
                if at is None:
                    slot[key] = len(merged)
                    merged.append(child)
                else:
                    old = merged[at]
                    if (child[2], child[3], child[4]) < (old[2], old[3], old[4]):
                        merged[at] = child
        survivors = classify(merged, w)
        if not survivors:
            return False, 0, []

    winner = None
    for row in survivors:
        if row[1] == 0 and (winner is None or (row[2], row[3], row[4]) < (winner[2], winner[3], winner[4])):
            winner = row
    if winner is None:
        return False, 0, []
    hist = winner[4]
    bits = [(hist >> (n - 1 - i)) & 1 for i in range(x_len)]
    return True, winner[2], bits
