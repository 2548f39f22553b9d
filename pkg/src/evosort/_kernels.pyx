# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled engine: the full budgeted trial loop with C-level state.

This mirrors the pure-Python engine decision for decision - same splitmix64
streams, same pivot draws, same comparison scheduling, same publication
points - so a trial produces identical records on either engine.  Any
behavioural change in order.py / quicksort.py / localsort.py / topk.py must
be replicated here (the cross-engine equality tests will catch a slip).
"""

import numpy as np


cdef unsigned long long MASK64 = 0xFFFFFFFFFFFFFFFFULL
cdef unsigned long long GAMMA = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.1102230246251565e-16  # 2**-53, same literal as rng.py


cdef inline unsigned long long _mix64(unsigned long long z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef unsigned long long _derive2(unsigned long long master,
                                 unsigned long long tag) nogil:
    cdef unsigned long long h = master
    h = _mix64(h + GAMMA)
    h = _mix64(h ^ tag)
    return h


cdef class Rng:
    cdef unsigned long long state

    def __cinit__(self, unsigned long long seed):
        self.state = seed

    cdef inline unsigned long long next64(self) nogil:
        self.state = self.state + GAMMA
        return _mix64(self.state)

    cdef inline long long randbelow(self, long long bound) nogil:
        cdef unsigned long long v, mask
        if bound <= 1:
            return 0
        v = <unsigned long long>(bound - 1)
        mask = 0
        while mask < v:
            mask = (mask << 1) | 1ULL
        while True:
            v = self.next64() & mask
            if v < <unsigned long long>bound:
                return <long long>v

    cdef inline double unif01(self) nogil:
        return <double>(self.next64() >> 11) * INV53


# -- world ------------------------------------------------------------------

cdef class _World:
    cdef long long[::1] rank
    cdef long long[::1] elem
    cdef double[::1] cdf
    cdef Rng evo
    cdef long long n, t, probes, alpha
    cdef bint gaussian

    def __cinit__(self, long long n, long long alpha, bint gaussian,
                  double[::1] cdf, unsigned long long seed,
                  bint identity_init):
        cdef long long r, j, tmp
        self.n = n
        self.alpha = alpha
        self.gaussian = gaussian
        self.cdf = cdf
        self.t = 0
        self.probes = 0
        self.rank = np.empty(n + 1, dtype=np.int64)
        self.elem = np.empty(n + 1, dtype=np.int64)
        for r in range(n + 1):
            self.elem[r] = r
        cdef Rng init = Rng(_derive2(seed, 11))  # TAG_INIT
        if not identity_init:
            for r in range(n, 1, -1):
                j = 1 + init.randbelow(r)
                tmp = self.elem[r]
                self.elem[r] = self.elem[j]
                self.elem[j] = tmp
        for r in range(1, n + 1):
            self.rank[self.elem[r]] = r
        self.evo = Rng(_derive2(seed, 12))  # TAG_EVOLUTION

    cdef int advance(self) except -1:
        cdef long long i, lo, hi, d, idx, e1, e2
        cdef double u
        self.t += 1
        for i in range(self.alpha):
            if not self.gaussian:
                lo = 1 + self.evo.randbelow(self.n - 1)
                hi = lo + 1
            else:
                u = self.evo.unif01()
                idx = 0
                while self.cdf[idx] <= u:
                    idx += 1
                d = idx + 1
                lo = 1 + self.evo.randbelow(self.n - d)
                hi = lo + d
            e1 = self.elem[lo]
            e2 = self.elem[hi]
            self.elem[lo] = e2
            self.elem[hi] = e1
            self.rank[e1] = hi
            self.rank[e2] = lo
            if self.elem[self.rank[e1]] != e1 or self.elem[self.rank[e2]] != e2:
                raise RuntimeError("swap corrupted the permutation")
        return 0

    cdef inline bint probe(self, long long a, long long b) nogil:
        self.probes += 1
        return self.rank[a] < self.rank[b]

    cdef int check_bijection(self, signed char[::1] seen) except -1:
        cdef long long r, e
        for r in range(1, self.n + 1):
            seen[r] = 0
        for r in range(1, self.n + 1):
            e = self.elem[r]
            if e < 1 or e > self.n or seen[e] or self.rank[e] != r:
                raise RuntimeError("permutation bijectivity violated")
            seen[e] = 1
        return 0


# -- resumable quicksort ------------------------------------------------------

cdef int ST_EMPTY = 0   # no run
cdef int ST_ACTIVE = 1  # run waiting on a comparison
cdef int ST_DONE = 2    # completed run awaiting publication

cdef int FR_SORT = 0
cdef int FR_PART = 1

cdef class _QS:
    """In-place quicksort over work[0:m]; frames mirror the pure engine's
    (segment, pivot, scan, partitions) stack, larger side first."""
    cdef long long[::1] work
    cdef signed char[::1] abuf
    cdef long long[::1] tmp
    cdef long long[:, ::1] frames  # rows: kind, lo, hi, pidx, i, nl
    cdef Py_ssize_t depth
    cdef long long m
    cdef int status
    cdef long long pa, pb

    def __cinit__(self, long long cap):
        self.work = np.empty(cap, dtype=np.int64)
        self.abuf = np.empty(cap, dtype=np.int8)
        self.tmp = np.empty(cap, dtype=np.int64)
        self.frames = np.empty((cap + 4, 6), dtype=np.int64)
        self.status = ST_EMPTY

    cdef void start(self, long long[::1] items, long long m, Rng rng):
        cdef long long i
        for i in range(m):
            self.work[i] = items[i]
        self.m = m
        self.frames[0, 0] = FR_SORT
        self.frames[0, 1] = 0
        self.frames[0, 2] = m
        self.depth = 1
        self.settle(rng)

    cdef void settle(self, Rng rng):
        cdef long long lo, hi, pidx, i, nl, j, w, pivot
        cdef long long[:, ::1] fr = self.frames
        while self.depth > 0:
            lo = fr[self.depth - 1, 1]
            hi = fr[self.depth - 1, 2]
            if fr[self.depth - 1, 0] == FR_SORT:
                if hi - lo <= 1:
                    self.depth -= 1
                    continue
                pidx = lo + rng.randbelow(hi - lo)
                fr[self.depth - 1, 0] = FR_PART
                fr[self.depth - 1, 3] = pidx
                fr[self.depth - 1, 4] = lo
                fr[self.depth - 1, 5] = 0
            else:
                pidx = fr[self.depth - 1, 3]
                i = fr[self.depth - 1, 4]
                if i == pidx:
                    i += 1
                    fr[self.depth - 1, 4] = i
                if i < hi:
                    self.pa = self.work[i]
                    self.pb = self.work[pidx]
                    self.status = ST_ACTIVE
                    return
                # partition complete: stable rewrite larger | pivot | smaller
                nl = fr[self.depth - 1, 5]
                pivot = self.work[pidx]
                w = 0
                for j in range(lo, hi):
                    if j != pidx and self.abuf[j]:
                        self.tmp[w] = self.work[j]
                        w += 1
                self.tmp[w] = pivot
                w += 1
                for j in range(lo, hi):
                    if j != pidx and not self.abuf[j]:
                        self.tmp[w] = self.work[j]
                        w += 1
                for j in range(lo, hi):
                    self.work[j] = self.tmp[j - lo]
                self.depth -= 1
                # push smaller side then larger side (larger processed first)
                fr[self.depth, 0] = FR_SORT
                fr[self.depth, 1] = lo + nl + 1
                fr[self.depth, 2] = hi
                self.depth += 1
                fr[self.depth, 0] = FR_SORT
                fr[self.depth, 1] = lo
                fr[self.depth, 2] = lo + nl
                self.depth += 1
        self.status = ST_DONE

    cdef void feed(self, bint a_larger, Rng rng):
        cdef Py_ssize_t top = self.depth - 1
        self.abuf[self.frames[top, 4]] = 1 if a_larger else 0
        if a_larger:
            self.frames[top, 5] += 1
        self.frames[top, 4] += 1
        self.settle(rng)


# -- local sort ---------------------------------------------------------------

cdef class _LS:
    """Sliding-block local sort over order[0:m] with MaxFind scans."""
    cdef long long[::1] order
    cdef long long[::1] block
    cdef long long[::1] out
    cdef long long m, block_size, nxt, block_len, out_len
    cdef long long champ, champ_idx, j
    cdef int status
    cdef long long pa, pb

    def __cinit__(self, long long cap, long long block_size):
        self.order = np.empty(cap, dtype=np.int64)
        self.block = np.empty(block_size + 1, dtype=np.int64)
        self.out = np.empty(cap, dtype=np.int64)
        self.block_size = block_size
        self.status = ST_EMPTY

    cdef void start(self, long long[::1] items, long long m):
        cdef long long i
        for i in range(m):
            self.order[i] = items[i]
        self.m = m
        self.nxt = m if m < self.block_size else self.block_size
        for i in range(self.nxt):
            self.block[i] = self.order[i]
        self.block_len = self.nxt
        self.out_len = 0
        self._begin_scan()
        self.settle()

    cdef void _begin_scan(self):
        self.champ = self.block[0]
        self.champ_idx = 0
        self.j = 1

    cdef void settle(self):
        cdef long long i
        while self.j >= self.block_len:
            # scan finished: emit champion, slide the block
            self.out[self.out_len] = self.champ
            self.out_len += 1
            for i in range(self.champ_idx, self.block_len - 1):
                self.block[i] = self.block[i + 1]
            self.block_len -= 1
            if self.nxt < self.m:
                self.block[self.block_len] = self.order[self.nxt]
                self.block_len += 1
                self.nxt += 1
            if self.block_len == 0:
                self.status = ST_DONE
                return
            self._begin_scan()
        self.pa = self.champ
        self.pb = self.block[self.j]
        self.status = ST_ACTIVE

    cdef void feed(self, bint a_larger):
        if not a_larger:
            self.champ = self.block[self.j]
            self.champ_idx = self.j
        self.j += 1
        self.settle()


# -- inversion counting -------------------------------------------------------

cdef long long _merge_count(long long[::1] a, long long[::1] buf,
                            long long m) nogil:
    cdef long long total = 0, width = 1
    cdef long long lo, mid, hi, i, j, w
    while width < m:
        lo = 0
        while lo < m - width:
            mid = lo + width
            hi = lo + 2 * width
            if hi > m:
                hi = m
            i = lo
            j = mid
            w = lo
            while i < mid and j < hi:
                if a[i] <= a[j]:
                    buf[w] = a[i]
                    i += 1
                else:
                    buf[w] = a[j]
                    j += 1
                    total += mid - i
                w += 1
            while i < mid:
                buf[w] = a[i]
                i += 1
                w += 1
            while j < hi:
                buf[w] = a[j]
                j += 1
                w += 1
            for i in range(lo, hi):
                a[i] = buf[i]
            lo += 2 * width
        width *= 2
    return total


def count_inversions(seq):
    """Pairs (i < j) with seq[i] > seq[j]; compiled twin of the pure merge
    counter."""
    cdef long long[::1] a = np.asarray(seq, dtype=np.int64)
    cdef long long m = a.shape[0]
    if m < 2:
        return 0
    cdef long long[::1] buf = np.empty(m, dtype=np.int64)
    return _merge_count(a, buf, m)


# -- lane ids -----------------------------------------------------------------

cdef int LANE_FULL = 0
cdef int LANE_WINDOW = 1   # set pipeline refine lane
cdef int LANE_CAND = 2
cdef int LANE_TOP = 3
cdef int LANE_LOCAL = 4

cdef int PUB_WARMING = 0
cdef int PUB_SET = 1
cdef int PUB_ORDER = 2


def run_trial(int problem, int model, long long n, long long k,
              long long alpha, double[::1] gaussian_cdf, long long margin,
              long long cmargin, long long block, long long modulus,
              unsigned long long world_seed, unsigned long long algo_seed,
              long long horizon, long long sample_every, int identity_init,
              long long[::1] rec_t, signed char[::1] rec_warm,
              signed char[::1] rec_setok, long long[::1] rec_kt,
              long long[::1] rec_disp):
    """Drive one (world, pipeline) pair for ``horizon`` steps, recording a
    sample every ``sample_every`` steps.  Returns (records, probes,
    forfeited).  problem: 0 set / 1 selection; model: 0 consecutive /
    1 gaussian."""
    cdef _World world = _World(n, alpha, model == 1, gaussian_cdf,
                               world_seed, identity_init)
    cdef Rng arng = Rng(algo_seed)

    cdef long long lo_cut = k - margin if k - margin > 0 else 0
    cdef long long hi_cut = k + margin if k + margin < n else n
    cdef long long cand_len = k + cmargin if k + cmargin < n else n

    # universe snapshot reused by the full lane
    cdef long long[::1] universe = np.arange(1, n + 1, dtype=np.int64)

    cdef _QS qs_full = _QS(n)
    cdef _QS qs_window = _QS(hi_cut - lo_cut) if problem == 0 else None
    cdef _QS qs_cand = _QS(cand_len) if problem == 1 else None
    cdef _QS qs_top = _QS(k) if problem == 1 and model == 0 else None
    cdef _LS ls = _LS(k, block) if problem == 1 else None

    # mailbox
    cdef long long[::1] mb_locked = np.empty(max(lo_cut, 1), dtype=np.int64)
    cdef long long[::1] mb_window = np.empty(max(hi_cut - lo_cut, 1),
                                             dtype=np.int64)
    cdef long long[::1] pl_locked = np.empty(max(lo_cut, 1), dtype=np.int64)
    cdef long long[::1] mb_cand = np.empty(max(cand_len, 1), dtype=np.int64)
    cdef long long[::1] mb_shortlist = np.empty(k, dtype=np.int64)
    cdef long long[::1] mb_ordered = np.empty(k, dtype=np.int64)
    cdef bint has_window = False, has_cand = False
    cdef bint has_shortlist = False, has_ordered = False

    # published estimate
    cdef int pub_kind = PUB_WARMING
    cdef long long[::1] pub_items = np.empty(k, dtype=np.int64)

    # metric scratch
    cdef long long[::1] kt_a = np.empty(k, dtype=np.int64)
    cdef long long[::1] kt_buf = np.empty(k, dtype=np.int64)
    cdef signed char[::1] seen = np.empty(n + 1, dtype=np.int8)

    cdef long long step, t, i, probes_before, used
    cdef long long forfeited = 0, n_rec = 0
    cdef long long residue, disp, r
    cdef int lane
    cdef bint ok, ans, can_build
    cdef _QS qs

    for step in range(horizon):
        world.advance()
        t = world.t
        residue = t % modulus

        # residue -> lane
        if problem == 0:
            lane = LANE_FULL if residue == 1 else LANE_WINDOW
        elif model == 0:
            if residue == 1:
                lane = LANE_FULL
            elif residue == 2:
                lane = LANE_CAND
            elif residue == 3:
                lane = LANE_TOP
            else:
                lane = LANE_LOCAL
        else:
            if residue == 1:
                lane = LANE_FULL
            elif residue == 2:
                lane = LANE_CAND
            else:
                lane = LANE_LOCAL

        probes_before = world.probes

        # -- one lane step, mirroring Lane.step ----------------------------
        if lane == LANE_LOCAL:
            if ls.status == ST_EMPTY and has_ordered:
                ls.start(mb_ordered, k)
            if ls.status == ST_DONE:
                for i in range(k):
                    pub_items[i] = ls.out[i]
                pub_kind = PUB_ORDER
                ls.status = ST_EMPTY
            elif ls.status == ST_ACTIVE:
                ans = world.probe(ls.pa, ls.pb)
                ls.feed(ans)
                if ls.status == ST_DONE:
                    for i in range(k):
                        pub_items[i] = ls.out[i]
                    pub_kind = PUB_ORDER
                    ls.start(mb_ordered, k)  # restart on the same step
        else:
            if lane == LANE_FULL:
                qs = qs_full
                can_build = True
            elif lane == LANE_WINDOW:
                qs = qs_window
                can_build = has_window
            elif lane == LANE_CAND:
                qs = qs_cand
                can_build = has_cand
            else:
                qs = qs_top
                can_build = has_shortlist

            if qs.status == ST_EMPTY and can_build:
                if lane == LANE_FULL:
                    qs.start(universe, n, arng)
                elif lane == LANE_WINDOW:
                    for i in range(lo_cut):
                        pl_locked[i] = mb_locked[i]
                    qs.start(mb_window, hi_cut - lo_cut, arng)
                elif lane == LANE_CAND:
                    qs.start(mb_cand, cand_len, arng)
                else:
                    qs.start(mb_shortlist, k, arng)
            if qs.status == ST_DONE:
                _publish_qs(problem, model, lane, qs, k, lo_cut, hi_cut,
                            cand_len, mb_locked, mb_window, pl_locked,
                            mb_cand, mb_shortlist, mb_ordered, pub_items)
                if lane == LANE_WINDOW:
                    pub_kind = PUB_SET
                elif lane == LANE_FULL:
                    has_window = True
                    has_cand = True
                elif lane == LANE_CAND:
                    has_shortlist = True
                    if model == 1:
                        has_ordered = True
                else:
                    has_ordered = True
                qs.status = ST_EMPTY
            elif qs.status == ST_ACTIVE:
                ans = world.probe(qs.pa, qs.pb)
                qs.feed(ans, arng)
                if qs.status == ST_DONE:
                    _publish_qs(problem, model, lane, qs, k, lo_cut, hi_cut,
                                cand_len, mb_locked, mb_window, pl_locked,
                                mb_cand, mb_shortlist, mb_ordered, pub_items)
                    if lane == LANE_WINDOW:
                        pub_kind = PUB_SET
                    elif lane == LANE_FULL:
                        has_window = True
                        has_cand = True
                    elif lane == LANE_CAND:
                        has_shortlist = True
                        if model == 1:
                            has_ordered = True
                    else:
                        has_ordered = True
                    # restart on the same step
                    qs.status = ST_EMPTY
                    if lane == LANE_FULL:
                        qs.start(universe, n, arng)
                    elif lane == LANE_WINDOW:
                        for i in range(lo_cut):
                            pl_locked[i] = mb_locked[i]
                        qs.start(mb_window, hi_cut - lo_cut, arng)
                    elif lane == LANE_CAND:
                        qs.start(mb_cand, cand_len, arng)
                    else:
                        qs.start(mb_shortlist, k, arng)

        used = world.probes - probes_before
        if used > 1:
            raise RuntimeError("probe budget violated: more than one probe "
                               "issued in a single time step")
        if used == 0:
            forfeited += 1

        # -- sampling ------------------------------------------------------
        if t % sample_every == 0:
            rec_t[n_rec] = t
            if pub_kind == PUB_WARMING:
                rec_warm[n_rec] = 1
                rec_setok[n_rec] = 0
                rec_kt[n_rec] = -1
                rec_disp[n_rec] = -1
            elif pub_kind == PUB_SET:
                rec_warm[n_rec] = 0
                ok = True
                for i in range(k):
                    if world.rank[pub_items[i]] > k:
                        ok = False
                        break
                rec_setok[n_rec] = 1 if ok else 0
                rec_kt[n_rec] = -1
                rec_disp[n_rec] = -1
            else:
                rec_warm[n_rec] = 0
                ok = True
                disp = 0
                for i in range(k):
                    r = world.rank[pub_items[i]]
                    kt_a[i] = r
                    if r > k:
                        ok = False
                    r = r - (i + 1)
                    if r < 0:
                        r = -r
                    if r > disp:
                        disp = r
                rec_setok[n_rec] = 1 if ok else 0
                rec_kt[n_rec] = _merge_count(kt_a, kt_buf, k) if k > 1 else 0
                rec_disp[n_rec] = disp
            n_rec += 1
            world.check_bijection(seen)

    return n_rec, world.probes, forfeited


cdef int _publish_qs(int problem, int model, int lane, _QS qs, long long k,
                     long long lo_cut, long long hi_cut, long long cand_len,
                     long long[::1] mb_locked, long long[::1] mb_window,
                     long long[::1] pl_locked, long long[::1] mb_cand,
                     long long[::1] mb_shortlist, long long[::1] mb_ordered,
                     long long[::1] pub_items) except -1:
    cdef long long i
    if lane == LANE_FULL:
        if problem == 0:
            for i in range(lo_cut):
                mb_locked[i] = qs.work[i]
            for i in range(hi_cut - lo_cut):
                mb_window[i] = qs.work[lo_cut + i]
        else:
            for i in range(cand_len):
                mb_cand[i] = qs.work[i]
    elif lane == LANE_WINDOW:
        # top-k set = locked prefix + best of the sorted window
        for i in range(lo_cut):
            pub_items[i] = pl_locked[i]
        for i in range(k - lo_cut):
            pub_items[lo_cut + i] = qs.work[i]
    elif lane == LANE_CAND:
        for i in range(k):
            mb_shortlist[i] = qs.work[i]
        if model == 1:
            for i in range(k):
                mb_ordered[i] = qs.work[i]
    else:  # LANE_TOP
        for i in range(k):
            mb_ordered[i] = qs.work[i]
    return 0


# -- standalone metered quicksort (runtime / displacement statistics) --------

def metered_quicksort(long long n, long long alpha, int model,
                      double[::1] gaussian_cdf, unsigned long long world_seed,
                      unsigned long long algo_seed):
    """Run one quicksort over the whole universe at one comparison per time
    step against a fresh world.  Returns (comparisons, max displacement of
    the estimate against the true order at completion)."""
    cdef _World world = _World(n, alpha, model == 1, gaussian_cdf,
                               world_seed, 0)
    cdef Rng arng = Rng(algo_seed)
    cdef _QS qs = _QS(n)
    cdef long long[::1] universe = np.arange(1, n + 1, dtype=np.int64)
    cdef long long comparisons = 0, disp = 0, i, d
    qs.start(universe, n, arng)
    while qs.status == ST_ACTIVE:
        world.advance()
        qs.feed(world.probe(qs.pa, qs.pb), arng)
        comparisons += 1
    for i in range(n):
        d = world.rank[qs.work[i]] - (i + 1)
        if d < 0:
            d = -d
        if d > disp:
            disp = d
    return comparisons, disp


def sample_distances(long long n, double[::1] cdf, unsigned long long seed,
                     long long count):
    """Draw ``count`` gaussian swap distances (consuming rank draws exactly
    like the world does) and return a histogram over d = 1..n-1."""
    cdef Rng evo = Rng(_derive2(seed, 12))  # TAG_EVOLUTION stream
    cdef long long[::1] hist = np.zeros(n, dtype=np.int64)
    cdef long long i, d, idx
    cdef double u
    for i in range(count):
        u = evo.unif01()
        idx = 0
        while cdf[idx] <= u:
            idx += 1
        d = idx + 1
        evo.randbelow(n - d)  # rank_lo draw, kept for stream parity
        hist[d] += 1
    return np.asarray(hist)
