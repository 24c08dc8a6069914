# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled decode kernel; semantics identical to cnecc._kernel_py.

Histories are kept as 128-bit (high, low) pairs, so received sequences are
limited to 128 words here; the plan layer enforces that and falls back to
the pure kernel otherwise.  Merge lookups use a caller-provided slot map of
size state_count << window_bits, versioned by a stamp array so it never has
to be cleared between windows.
"""

from libc.stdint cimport int32_t, int64_t, uint64_t

BACKEND_NAME = "compiled"


def decode_words(int32_t[::1] y, int x_len, int l, int omega,
                 int32_t[::1] next_state, int32_t[::1] out_word, int32_t[::1] table_w,
                 int32_t[::1] st_a, int64_t[::1] res_a, int64_t[::1] wt_a,
                 int64_t[::1] lc_a, uint64_t[::1] hh_a, uint64_t[::1] hl_a,
                 int32_t[::1] st_b, int64_t[::1] res_b, int64_t[::1] wt_b,
                 int64_t[::1] lc_b, uint64_t[::1] hh_b, uint64_t[::1] hl_b,
                 int32_t[::1] slot, int32_t[::1] stamp, int32_t[::1] stamp_state,
                 unsigned char[::1] out_bits):
    cdef int n = y.shape[0]
    cdef int top_shift = omega * l
    cdef int w_bits = omega * (l + 1)
    cdef int64_t low_mask = (<int64_t> 1 << top_shift) - 1
    cdef int free = x_len if x_len < l + 1 else l + 1
    cdef int pad = l + 1 - free

    cdef int count = 0, nxt_count, prefix, i, b, w, idx, new_idx, at
    cdef int state, forced, nbits
    cdef int64_t res, weight, commit, key, tw
    cdef uint64_t hh, hl, carry
    cdef int32_t cur_stamp = stamp_state[0] + 1
    cdef int bitpos

    # first window: one survivor per input prefix, tail bits forced to zero
    for prefix in range(1 << free):
        hl = <uint64_t> prefix << pad
        state = 0
        res = 0
        for i in range(l + 1):
            idx = (state << 1) | <int> ((hl >> (l - i)) & 1)
            res = (res << omega) | (y[i] ^ out_word[idx])
            state = next_state[idx]
        st_a[count] = state
        res_a[count] = res
        wt_a[count] = 0
        lc_a[count] = -1
        hh_a[count] = 0
        hl_a[count] = hl
        count += 1

    # classify the first window
    nxt_count = 0
    for i in range(count):
        res = res_a[i]
        if res >> top_shift:
            tw = table_w[res]
            if tw < 0:
                continue
            wt_a[i] += tw
            res_a[i] = 0
            lc_a[i] = 0
        st_a[nxt_count] = st_a[i]
        res_a[nxt_count] = res_a[i]
        wt_a[nxt_count] = wt_a[i]
        lc_a[nxt_count] = lc_a[i]
        hh_a[nxt_count] = hh_a[i]
        hl_a[nxt_count] = hl_a[i]
        nxt_count += 1
    count = nxt_count
    if count == 0:
        stamp_state[0] = cur_stamp
        return False, 0

    for w in range(1, n - l):
        new_idx = w + l
        forced = 1 if new_idx >= x_len else 0
        nbits = 1 if forced else 2
        nxt_count = 0
        cur_stamp += 1
        for i in range(count):
            for b in range(nbits):
                idx = (st_a[i] << 1) | b
                state = next_state[idx]
                res = ((res_a[i] & low_mask) << omega) | (y[new_idx] ^ out_word[idx])
                weight = wt_a[i]
                commit = lc_a[i]
                carry = hl_a[i] >> 63
                hl = (hl_a[i] << 1) | <uint64_t> b
                hh = (hh_a[i] << 1) | carry
                key = (<int64_t> state << w_bits) | res
                if stamp[key] == cur_stamp:
                    at = slot[key]
                    if (weight < wt_b[at]
                            or (weight == wt_b[at]
                                and (commit < lc_b[at]
                                     or (commit == lc_b[at]
                                         and (hh < hh_b[at]
                                              or (hh == hh_b[at] and hl < hl_b[at])))))):
                        st_b[at] = state
                        res_b[at] = res
                        wt_b[at] = weight
                        lc_b[at] = commit
                        hh_b[at] = hh
                        hl_b[at] = hl
                else:
                    stamp[key] = cur_stamp
                    slot[key] = nxt_count
                    st_b[nxt_count] = state
                    res_b[nxt_count] = res
                    wt_b[nxt_count] = weight
                    lc_b[nxt_count] = commit
                    hh_b[nxt_count] = hh
                    hl_b[nxt_count] = hl
                    nxt_count += 1
        # classify window w
        count = 0
        for i in range(nxt_count):
            res = res_b[i]
            if res >> top_shift:
                tw = table_w[res]
                if tw < 0:
                    continue
                wt_b[i] += tw
                res_b[i] = 0
                lc_b[i] = w
            st_a[count] = st_b[i]
            res_a[count] = res_b[i]
            wt_a[count] = wt_b[i]
            lc_a[count] = lc_b[i]
            hh_a[count] = hh_b[i]
            hl_a[count] = hl_b[i]
            count += 1
        if count == 0:
            stamp_state[0] = cur_stamp
            return False, 0

    stamp_state[0] = cur_stamp
    cdef int best = -1
    for i in range(count):
        if res_a[i] != 0:
            continue
        if best < 0 or (wt_a[i] < wt_a[best]
                        or (wt_a[i] == wt_a[best]
                            and (lc_a[i] < lc_a[best]
                                 or (lc_a[i] == lc_a[best]
                                     and (hh_a[i] < hh_a[best]
                                          or (hh_a[i] == hh_a[best] and hl_a[i] < hl_a[best])))))):
            best = i
    if best < 0:
        return False, 0
    hh = hh_a[best]
    hl = hl_a[best]
    for i in range(x_len):
        bitpos = n - 1 - i
        if bitpos < 64:
            out_bits[i] = <unsigned char> ((hl >> bitpos) & 1)
        else:
            out_bits[i] = <unsigned char> ((hh >> (bitpos - 64)) & 1)
    return True, <int> wt_a[best]
